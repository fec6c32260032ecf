//! L-fold repetition of an ensemble and its modulo-n coarse-graining.
//!
//! Drawing `c⃗ = (c_1, …, c_L)` i.i.d. from `η` and keeping only the class
//! `ω_n(c⃗) = Σ c_k mod n` yields the coarse ensemble `E^(L)`. Class weights
//! come from iterated cyclic convolution; explicit states are only built
//! within the dimension cap.

use crate::ensembles::{Ensemble, Origin};
use crate::error::{Error, Result};
use crate::tensor::{ComplexMatrix, DimCap, MultiPartyOperator};
use crate::Real;

/// A base ensemble together with a fold count `L ≥ 1`.
#[derive(Clone, Copy, Debug)]
pub struct FoldSpec<'a, T: Real> {
    base: &'a Ensemble<T>,
    folds: usize,
}

impl<'a, T: Real> FoldSpec<'a, T> {
    pub fn new(base: &'a Ensemble<T>, folds: usize) -> Result<Self> {
        if folds == 0 {
            return Err(Error::InvalidArgument("fold count must be at least 1".into()));
        }
        Ok(Self { base, folds })
    }

    pub fn base(&self) -> &'a Ensemble<T> {
        self.base
    }

    pub fn folds(&self) -> usize {
        self.folds
    }

    /// Number of classes, equal to the base state count.
    pub fn n(&self) -> usize {
        self.base.len()
    }

    /// Dimension of the explicit L-fold states, checked against `cap`.
    pub fn explicit_dim(&self, cap: DimCap) -> Result<usize> {
        cap.checked_pow(self.base.dim(), self.folds)
    }
}

/// `Σ entries mod n`; the empty sequence maps to 0.
pub fn omega(entries: &[usize], n: usize) -> Result<usize> {
    if n == 0 {
        return Err(Error::InvalidArgument("modulus must be positive".into()));
    }
    let mut acc = 0;
    for &c in entries {
        if c >= n {
            return Err(Error::InvalidArgument(format!("entry {c} is outside 0..{n}")));
        }
        acc = (acc + c) % n;
    }
    Ok(acc)
}

/// Class weights `η^(L)_i = Σ_{ω_n(c⃗) = i} η_{c⃗}` by `L`-fold cyclic convolution.
pub fn fold_probs<T: Real>(probs: &[T], n: usize, folds: usize) -> Result<Vec<T>> {
    if probs.len() != n || n == 0 {
        return Err(Error::InvalidArgument(format!(
            "expected {n} probabilities, got {}",
            probs.len()
        )));
    }
    let mut acc = vec![T::zero(); n];
    acc[0] = T::one();
    for _ in 0..folds {
        let mut next = vec![T::zero(); n];
        for (i, &a) in acc.iter().enumerate() {
            if a == T::zero() {
                continue;
            }
            for (j, &p) in probs.iter().enumerate() {
                next[(i + j) % n] += a * p;
            }
        }
        acc = next;
    }
    Ok(acc)
}

/// Unnormalized class buckets `Σ_{ω_n(c⃗) = i} η_{c⃗} ρ_{c⃗}`.
fn class_buckets<T: Real>(spec: &FoldSpec<T>, cap: DimCap) -> Result<Vec<MultiPartyOperator<T>>> {
    spec.explicit_dim(cap)?;
    let base = spec.base;
    let n = base.len();
    let weighted: Vec<MultiPartyOperator<T>> = base
        .states()
        .iter()
        .zip(base.probs())
        .map(|(s, &p)| s.with_matrix(s.matrix().scale(p)))
        .collect::<Result<_>>()?;

    let mut buckets = weighted.clone();
    for _ in 1..spec.folds {
        let mut next: Vec<Option<MultiPartyOperator<T>>> = vec![None; n];
        for (i, b) in buckets.iter().enumerate() {
            for (j, w) in weighted.iter().enumerate() {
                let term = b.tensor(w, cap)?;
                let k = (i + j) % n;
                next[k] = Some(match next[k].take() {
                    None => term,
                    Some(acc) => {
                        let sum = acc.matrix() + term.matrix();
                        acc.with_matrix(sum)?
                    }
                });
            }
        }
        buckets = next
            .into_iter()
            .map(|b| b.expect("every class receives a term"))
            .collect();
    }
    Ok(buckets)
}

fn coarse_states<T: Real>(spec: &FoldSpec<T>, cap: DimCap) -> Result<(Vec<T>, Vec<MultiPartyOperator<T>>)> {
    let n = spec.n();
    let probs = fold_probs(spec.base.probs(), n, spec.folds)?;
    if let Some(class) = probs.iter().position(|&p| p <= T::zero()) {
        return Err(Error::DegenerateClass { class });
    }
    let buckets = class_buckets(spec, cap)?;
    let states = buckets
        .into_iter()
        .zip(&probs)
        .map(|(b, &p)| {
            let m: ComplexMatrix<T> = b.matrix().scale(T::one() / p);
            b.with_matrix(m)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((probs, states))
}

/// The explicit coarse ensemble `{η^(L)_i, ρ^(L)_i}`.
///
/// Slots are the base slots repeated `L` times, keeping each party's labels,
/// so partial transposes over party bipartitions apply unchanged.
pub fn coarse_ensemble<T: Real>(spec: &FoldSpec<T>, cap: DimCap) -> Result<Ensemble<T>> {
    let (probs, states) = coarse_states(spec, cap)?;
    Ok(Ensemble::new(spec.base.parties().clone(), probs, states)?
        .with_origin(Some(Origin::Coarse { folds: spec.folds })))
}

/// The coarse states with uniform weights `1/n`.
pub fn direct_encoding<T: Real>(spec: &FoldSpec<T>, cap: DimCap) -> Result<Ensemble<T>> {
    let (_, states) = coarse_states(spec, cap)?;
    let n = states.len();
    let probs = vec![T::one() / T::lit(n as f64); n];
    Ok(Ensemble::new(spec.base.parties().clone(), probs, states)?
        .with_origin(Some(Origin::Direct { folds: spec.folds })))
}

/// `1/2 + 1/2·(2η_0 − 1)^L` for `L = 1..=lmax`.
pub fn corollary1_curve<T: Real>(eta0: T, lmax: usize) -> Result<Vec<T>> {
    let half = T::lit(0.5);
    if !(eta0 >= half && eta0 <= T::one()) {
        return Err(Error::InvalidArgument(format!("eta0 = {eta0} must lie in [1/2, 1]")));
    }
    let base = T::lit(2.0) * eta0 - T::one();
    Ok((1..=lmax).map(|l| half + half * powi(base, l)).collect())
}

/// `1/n + ((n−1)/n)·(n·q − 1)^L`.
///
/// `q` may undershoot `1/n` by rounding noise (1e−12); the base is then
/// clamped to zero.
pub fn prop2_bound<T: Real>(n: usize, q: T, folds: usize) -> Result<T> {
    if n == 0 {
        return Err(Error::InvalidArgument("n must be positive".into()));
    }
    let nn = T::lit(n as f64);
    let floor = T::one() / nn;
    if !q.is_finite() || q < floor - T::tol(1e-12) {
        return Err(Error::InvalidArgument(format!("q = {q} is below the floor 1/{n}")));
    }
    let base = (nn * q - T::one()).max(T::zero());
    Ok(floor + (nn - T::one()) / nn * powi(base, folds))
}

/// `(L, prop2_bound(n, q, L))` for `L = 1..=lmax`.
pub fn bound_curve<T: Real>(n: usize, q: T, lmax: usize) -> Result<Vec<(usize, T)>> {
    (1..=lmax).map(|l| prop2_bound(n, q, l).map(|b| (l, b))).collect()
}

fn powi<T: Real>(x: T, k: usize) -> T {
    match i32::try_from(k) {
        Ok(k) => x.powi(k),
        Err(_) => x.powf(T::lit(k as f64)),
    }
}
