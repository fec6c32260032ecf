//! Validated state ensembles and the GHZ-based example families.

use std::fmt;

use num_traits::Zero;

use crate::error::{Error, Result};
use crate::partitions::PartySet;
use crate::scalar::{re, Real, C};
use crate::tensor::{ComplexMatrix, DimCap, MultiPartyOperator, SlotStructure};

/// How an ensemble was produced, when known. Carried through files so
/// reports can evaluate builder-specific conditions.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Origin {
    Example1 { d: usize, m: usize },
    Example2(ExampleParams),
    Coarse { folds: usize },
    Direct { folds: usize },
}

/// Probabilities paired with states on a common slot structure.
#[derive(Clone, Debug, PartialEq)]
pub struct Ensemble<T: Real = f64> {
    parties: PartySet,
    probs: Vec<T>,
    states: Vec<MultiPartyOperator<T>>,
    origin: Option<Origin>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Severity {
    Pass,
    Warn,
    Fail,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: String,
    pub severity: Severity,
    pub residual: f64,
}

/// Per-invariant outcome of [`Ensemble::validate`].
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Diagnostics {
    pub checks: Vec<Check>,
}

impl Diagnostics {
    fn push(&mut self, name: impl Into<String>, severity: Severity, residual: f64) {
        self.checks.push(Check {
            name: name.into(),
            severity,
            residual,
        });
    }

    pub fn is_valid(&self) -> bool {
        self.checks.iter().all(|c| c.severity != Severity::Fail)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| c.severity == Severity::Fail)
    }

    pub fn warnings(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| c.severity == Severity::Warn)
    }

    pub fn get(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}

impl fmt::Display for Diagnostics {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            let tag = match c.severity {
                Severity::Pass => "pass",
                Severity::Warn => "warn",
                Severity::Fail => "FAIL",
            };
            writeln!(f, "{tag:>4}  {:<16} residual {:.3e}", c.name, c.residual)?;
        }
        Ok(())
    }
}

impl<T: Real> Ensemble<T> {
    /// Builds and validates; any hard failure is rejected with its diagnostics.
    pub fn new(parties: PartySet, probs: Vec<T>, states: Vec<MultiPartyOperator<T>>) -> Result<Self> {
        let e = Self::from_parts_unchecked(parties, probs, states)?;
        let diag = e.validate();
        if !diag.is_valid() {
            return Err(Error::InvalidEnsemble(format!("\n{diag}")));
        }
        Ok(e)
    }

    /// Structural checks only (shapes, slot agreement); probability and state
    /// invariants are left to [`Ensemble::validate`].
    pub fn from_parts_unchecked(parties: PartySet, probs: Vec<T>, states: Vec<MultiPartyOperator<T>>) -> Result<Self> {
        if probs.len() != states.len() {
            return Err(Error::InvalidEnsemble(format!(
                "{} probabilities for {} states",
                probs.len(),
                states.len()
            )));
        }
        if states.len() < 2 {
            return Err(Error::InvalidEnsemble("need at least 2 states".into()));
        }
        let slots = states[0].slots();
        if states.iter().any(|s| s.slots() != slots) {
            return Err(Error::InvalidEnsemble("states disagree on slot structure".into()));
        }
        if slots.num_parties() != parties.len() {
            return Err(Error::PartySetMismatch(parties.len(), slots.num_parties()));
        }
        Ok(Self {
            parties,
            probs,
            states,
            origin: None,
        })
    }

    pub fn with_origin(mut self, origin: Option<Origin>) -> Self {
        self.origin = origin;
        self
    }

    pub fn origin(&self) -> Option<Origin> {
        self.origin
    }

    pub fn parties(&self) -> &PartySet {
        &self.parties
    }

    pub fn probs(&self) -> &[T] {
        &self.probs
    }

    pub fn states(&self) -> &[MultiPartyOperator<T>] {
        &self.states
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.states[0].dim()
    }

    pub fn slots(&self) -> &SlotStructure {
        self.states[0].slots()
    }

    /// `Σ η_i ρ_i`.
    pub fn average(&self) -> ComplexMatrix<T> {
        let mut acc = ComplexMatrix::zeros(self.dim());
        for (p, s) in self.probs.iter().zip(&self.states) {
            acc += &s.matrix().scale(*p);
        }
        acc
    }

    /// Reports every invariant with its measured residual; never errors.
    ///
    /// Probability sum, sign, Hermiticity and trace are hard failures; a
    /// minimum eigenvalue in `[−1e−10, 0)` passes with a warning.
    pub fn validate(&self) -> Diagnostics {
        let mut d = Diagnostics::default();
        let min_prob = self.probs.iter().copied().fold(T::infinity(), T::min);
        let neg = (-min_prob).max(T::zero()).to_f64_lossy();
        d.push(
            "prob_nonnegative",
            if neg > 0.0 { Severity::Fail } else { Severity::Pass },
            neg,
        );
        let sum: T = self.probs.iter().copied().sum();
        let sum_err = (sum - T::one()).abs();
        d.push(
            "prob_sum",
            if sum_err <= T::tol(1e-12) {
                Severity::Pass
            } else {
                Severity::Fail
            },
            sum_err.to_f64_lossy(),
        );
        for (i, s) in self.states.iter().enumerate() {
            let h = s.matrix().hermiticity_residual();
            let herm_ok = h <= T::tol(1e-12) * (T::one() + s.matrix().max_abs());
            d.push(
                format!("hermitian[{i}]"),
                if herm_ok { Severity::Pass } else { Severity::Fail },
                h.to_f64_lossy(),
            );
            let tr = (s.matrix().trace() - C::<T>::from(T::one())).norm();
            d.push(
                format!("trace[{i}]"),
                if tr <= T::tol(1e-10) {
                    Severity::Pass
                } else {
                    Severity::Fail
                },
                tr.to_f64_lossy(),
            );
            if !herm_ok {
                d.push(format!("psd[{i}]"), Severity::Fail, f64::NAN);
                continue;
            }
            match s.eigenvalues() {
                Ok(ev) => {
                    let min = ev[0];
                    let sev = if min >= T::zero() {
                        Severity::Pass
                    } else if min >= -T::tol(1e-10) {
                        Severity::Warn
                    } else {
                        Severity::Fail
                    };
                    d.push(format!("psd[{i}]"), sev, (-min).max(T::zero()).to_f64_lossy());
                }
                Err(_) => d.push(format!("psd[{i}]"), Severity::Fail, f64::NAN),
            }
        }
        d
    }

    /// True iff `Tr(ρ_i ρ_j) ≤ 1e−10` for every `i ≠ j`.
    pub fn is_orthogonal(&self) -> bool {
        self.max_overlap() <= T::tol(1e-10)
    }

    /// Largest pairwise `Tr(ρ_i ρ_j)`, `i ≠ j`.
    pub fn max_overlap(&self) -> T {
        let mut worst = T::neg_infinity();
        for i in 0..self.len() {
            for j in i + 1..self.len() {
                let o = self.states[i].matrix().trace_product(self.states[j].matrix()).re;
                worst = worst.max(o);
            }
        }
        worst
    }
}

/// `(1/√d) Σ_i |i⟩^{⊗m}`.
pub fn ghz_vector<T: Real>(d: usize, m: usize) -> Vec<C<T>> {
    let dim = d.pow(m as u32);
    let amp = re(T::one() / T::lit(d as f64).sqrt());
    // |i…i⟩ sits at i·(d^{m−1} + … + 1).
    let step: usize = (0..m).map(|k| d.pow(k as u32)).sum();
    let mut v = vec![C::zero(); dim];
    for i in 0..d {
        v[i * step] = amp;
    }
    v
}

fn check_dm(d: usize, m: usize) -> Result<()> {
    if d < 2 {
        return Err(Error::InvalidArgument(format!("d must be at least 2, got {d}")));
    }
    if m < 2 {
        return Err(Error::InvalidArgument(format!("m must be at least 2, got {m}")));
    }
    Ok(())
}

/// Projector onto the `m`-party, `d`-level GHZ state.
pub fn ghz_state<T: Real>(d: usize, m: usize, cap: DimCap) -> Result<MultiPartyOperator<T>> {
    check_dm(d, m)?;
    cap.checked_pow(d, m)?;
    MultiPartyOperator::new(
        ComplexMatrix::projector(&ghz_vector::<T>(d, m)),
        SlotStructure::uniform(d, m)?,
    )
}

/// Two orthogonal states: the GHZ complement with weight `(d^m−1)/d^m` and
/// the GHZ projector with weight `1/d^m`.
pub fn example1<T: Real>(d: usize, m: usize, cap: DimCap) -> Result<Ensemble<T>> {
    let ghz = ghz_state::<T>(d, m, cap)?;
    let dim = ghz.dim();
    let dm = T::lit(dim as f64);
    let complement = &ComplexMatrix::identity(dim) - ghz.matrix();
    let tau0 = ghz.with_matrix(complement.scale(T::one() / (dm - T::one())))?;
    let probs = vec![(dm - T::one()) / dm, T::one() / dm];
    Ok(Ensemble::new(PartySet::standard(m)?, probs, vec![tau0, ghz])?.with_origin(Some(Origin::Example1 { d, m })))
}

/// Parameters of the `2^t`-state GHZ-parity family.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ExampleParams {
    pub d: usize,
    pub m: usize,
    pub s: usize,
    pub t: usize,
}

impl ExampleParams {
    pub fn new(d: usize, m: usize, s: usize, t: usize) -> Self {
        Self { d, m, s, t }
    }

    pub fn validate(&self, cap: DimCap) -> Result<()> {
        check_dm(self.d, self.m)?;
        if self.s < 1 || self.t < 1 {
            return Err(Error::InvalidArgument(format!(
                "s and t must be positive, got s={} t={}",
                self.s, self.t
            )));
        }
        if self.t >= 32 {
            return Err(Error::InvalidArgument("t must be below 32".into()));
        }
        let exp = self
            .m
            .checked_mul(self.s)
            .and_then(|x| x.checked_mul(self.t))
            .ok_or(Error::DimensionCap {
                dim: usize::MAX,
                cap: cap.0,
            })?;
        cap.checked_pow(self.d, exp).map(|_| ())
    }

    pub fn num_states(&self) -> usize {
        1 << self.t
    }

    /// `(λ_0, λ_1)`.
    pub fn lambdas<T: Real>(&self) -> (T, T) {
        let big = T::lit(self.d as f64).powi((self.m * self.s) as i32);
        let small = (T::lit(self.d as f64).powi(self.m as i32) - T::lit(2.0)).powi(self.s as i32);
        let two_big = T::lit(2.0) * big;
        ((big + small) / two_big, (big - small) / two_big)
    }

    /// `η_0 = λ_0^t` against `2/n`, and the equivalent size inequality
    /// `(1 − 2/d^m)^s < 2^{1/t} − 1`.
    pub fn size_condition(&self) -> SizeCondition {
        let lhs = (1.0 - 2.0 / (self.d as f64).powi(self.m as i32)).powi(self.s as i32);
        let rhs = 2f64.powf(1.0 / self.t as f64) - 1.0;
        let (l0, _) = self.lambdas::<f64>();
        SizeCondition {
            lhs,
            rhs,
            holds: lhs < rhs,
            eta0: l0.powi(self.t as i32),
            two_over_n: 2.0 / self.num_states() as f64,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SizeCondition {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
    pub eta0: f64,
    pub two_over_n: f64,
}

impl fmt::Display for SizeCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let rel = if self.holds { "<" } else { ">=" };
        write!(
            f,
            "(1 - 2/d^m)^s = {} {rel} 2^(1/t) - 1 = {} (eta0 = {}, 2/n = {})",
            self.lhs, self.rhs, self.eta0, self.two_over_n
        )
    }
}

/// `k`-th binary digit of `i`, `k = 1` least significant.
pub fn binary_digit(i: usize, k: usize) -> usize {
    (i >> (k - 1)) & 1
}

/// The `2^t`-state family: `ρ_i = ⊗_k σ_{b_k(i)}`, `η_i = Π_k λ_{b_k(i)}`.
///
/// Slots are ordered copy `k = 1..t`, then qudit block `1..s`, then party, so
/// party `A_j` owns every slot whose index is `j mod m`.
pub fn example2<T: Real>(p: ExampleParams, cap: DimCap) -> Result<Ensemble<T>> {
    p.validate(cap)?;
    let ExampleParams { d, m, s, t } = p;
    let ghz = ghz_state::<T>(d, m, cap)?;
    let block_dim = ghz.dim();
    let flip = &ComplexMatrix::identity(block_dim) - &ghz.matrix().scale(T::lit(2.0));
    let mut pi1 = flip.clone();
    for _ in 1..s {
        pi1 = pi1.kron(&flip);
    }
    let sdim = pi1.dim();
    let big = T::lit(sdim as f64);
    let small = (T::lit(block_dim as f64) - T::lit(2.0)).powi(s as i32);
    let id = ComplexMatrix::identity(sdim);
    let sigma = [
        (&id + &pi1).scale(T::one() / (big + small)),
        (&id - &pi1).scale(T::one() / (big - small)),
    ];
    let (l0, l1) = p.lambdas::<T>();
    let lambda = [l0, l1];

    let slot_count = m * s * t;
    let slots = SlotStructure::new(vec![d; slot_count], (0..slot_count).map(|k| k % m).collect())?;
    let mut probs = Vec::with_capacity(p.num_states());
    let mut states = Vec::with_capacity(p.num_states());
    for i in 0..p.num_states() {
        let mut eta = T::one();
        let mut rho: Option<ComplexMatrix<T>> = None;
        for k in 1..=t {
            let b = binary_digit(i, k);
            eta *= lambda[b];
            rho = Some(match rho {
                None => sigma[b].clone(),
                Some(acc) => acc.kron(&sigma[b]),
            });
        }
        probs.push(eta);
        states.push(MultiPartyOperator::new(rho.expect("t >= 1"), slots.clone())?);
    }
    Ok(Ensemble::new(PartySet::standard(m)?, probs, states)?.with_origin(Some(Origin::Example2(p))))
}

/// Basis-state projector `|i⟩⟨i|` on one slot of dimension `dim` per party.
pub fn basis_projector<T: Real>(index: usize, slots: &SlotStructure) -> MultiPartyOperator<T> {
    let dim = slots.dim();
    let mut m = ComplexMatrix::zeros(dim);
    m.set(index, index, re(T::one()));
    MultiPartyOperator::new(m, slots.clone()).expect("dimension matches")
}
