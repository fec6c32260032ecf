//! Certified minimum-error discrimination values.
//!
//! Every solve returns a primal value (attained by an explicit POVM) and a dual
//! value `Tr Y` for a Hermitian `Y` with `Y ⪰ w_i A_i` for all `i`, so the true
//! optimum is bracketed regardless of whether the iteration converged. Applied
//! to partially transposed states, the dual value upper-bounds the optimum over
//! measurements local to a bipartition.

use num_traits::Zero;

use crate::ensembles::Ensemble;
use crate::error::{Error, Result};
use crate::partitions::{all_bipartitions, Bipartition};
use crate::scalar::{Real, C};
use crate::tensor::{psd_report, ComplexMatrix, MultiPartyOperator, SlotStructure};

/// POVM elements on a common slot structure.
#[derive(Clone, Debug, PartialEq)]
pub struct Povm<T: Real> {
    elements: Vec<MultiPartyOperator<T>>,
}

impl<T: Real> Povm<T> {
    /// Validates PSD elements (tol 1e−10) summing to the identity (1e−10).
    pub fn new(elements: Vec<MultiPartyOperator<T>>) -> Result<Self> {
        let povm = Self::from_elements_unchecked(elements)?;
        let tol = T::tol(1e-10);
        for (i, m) in povm.elements.iter().enumerate() {
            let rep = m.is_psd(Some(tol))?;
            if !rep.psd {
                return Err(Error::InvalidArgument(format!(
                    "POVM element {i} has eigenvalue {}",
                    rep.min_eigenvalue
                )));
            }
        }
        let dev = povm.completeness_residual();
        if dev > tol {
            return Err(Error::InvalidArgument(format!(
                "POVM elements sum to identity only within {dev}"
            )));
        }
        Ok(povm)
    }

    fn from_elements_unchecked(elements: Vec<MultiPartyOperator<T>>) -> Result<Self> {
        let first = elements
            .first()
            .ok_or_else(|| Error::InvalidArgument("empty POVM".into()))?;
        if elements.iter().any(|m| m.slots() != first.slots()) {
            return Err(Error::InvalidArgument("POVM elements disagree on slots".into()));
        }
        Ok(Self { elements })
    }

    /// `M_pivot = 𝟙`, all others zero.
    pub fn trivial(pivot: usize, n: usize, slots: &SlotStructure) -> Self {
        let elements = (0..n)
            .map(|i| {
                if i == pivot {
                    MultiPartyOperator::identity(slots.clone())
                } else {
                    MultiPartyOperator::zeros(slots.clone())
                }
            })
            .collect();
        Self { elements }
    }

    pub fn elements(&self) -> &[MultiPartyOperator<T>] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// `max |Σ M_i − 𝟙|` entry-wise.
    pub fn completeness_residual(&self) -> T {
        let dim = self.elements[0].dim();
        let mut sum = ComplexMatrix::zeros(dim);
        for m in &self.elements {
            sum += m.matrix();
        }
        sum.max_diff(&ComplexMatrix::identity(dim))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    /// One weighted operator dominates all others; `M_pivot = 𝟙` is optimal.
    Dominant { pivot: usize },
    /// Two operators: projector onto the positive part of the difference.
    ClosedForm,
    /// Damped fixed-point POVM iteration.
    Iterative { iterations: usize },
}

#[derive(Clone, Debug)]
pub struct DiscriminationResult<T: Real> {
    pub primal_value: T,
    pub dual_value: T,
    pub gap: T,
    pub povm: Povm<T>,
    /// `λ_min(Herm(Σ_j w_j A_j M_j − w_i A_i))` for each `i`.
    pub certificate_min_eigs: Vec<T>,
    /// `gap ≤ tol`.
    pub certified: bool,
    pub method: Method,
}

#[derive(Clone, Copy, Debug)]
pub struct SolverOptions<T> {
    pub tol: T,
    pub max_iterations: usize,
    /// Mixing weight applied once the iteration stops improving.
    pub damping: T,
    /// Iterations between certificate evaluations.
    pub check_every: usize,
}

impl<T: Real> Default for SolverOptions<T> {
    fn default() -> Self {
        Self {
            tol: T::tol(1e-8),
            max_iterations: 100_000,
            damping: T::lit(0.5),
            check_every: 10,
        }
    }
}

fn weighted_ops<T: Real>(weights: &[T], ops: &[MultiPartyOperator<T>]) -> Result<Vec<ComplexMatrix<T>>> {
    if weights.len() != ops.len() {
        return Err(Error::DimensionMismatch {
            expected: weights.len(),
            found: ops.len(),
        });
    }
    if ops.is_empty() {
        return Err(Error::InvalidArgument("no operators".into()));
    }
    let dim = ops[0].dim();
    let mut out = Vec::with_capacity(ops.len());
    for (w, op) in weights.iter().zip(ops) {
        if op.dim() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                found: op.dim(),
            });
        }
        if *w < T::zero() || !w.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "weight {w} is not a nonnegative number"
            )));
        }
        if !op.is_hermitian() {
            return Err(Error::NotHermitian {
                residual: op.matrix().hermiticity_residual().to_f64_lossy(),
            });
        }
        out.push(op.matrix().hermitian_part().scale(*w));
    }
    Ok(out)
}

fn primal<T: Real>(weighted: &[ComplexMatrix<T>], povm: &[ComplexMatrix<T>]) -> T {
    weighted.iter().zip(povm).map(|(a, m)| a.trace_product(m).re).sum()
}

/// `Herm(Σ_j A_j M_j)`.
fn lagrange_operator<T: Real>(weighted: &[ComplexMatrix<T>], povm: &[ComplexMatrix<T>]) -> ComplexMatrix<T> {
    let mut y = ComplexMatrix::zeros(weighted[0].dim());
    for (a, m) in weighted.iter().zip(povm) {
        y += &a.matmul(m);
    }
    y.hermitian_part()
}

struct Certificate<T: Real> {
    min_eigs: Vec<T>,
    dual: T,
}

/// Residual spectra of `Y0 − A_i` and the cheaper of two feasible duals:
/// `Y0 + max(0, −min λ)·𝟙` or `Y0 + Σ_i (Y0 − A_i)_−`.
fn certify<T: Real>(weighted: &[ComplexMatrix<T>], povm: &[ComplexMatrix<T>]) -> Result<Certificate<T>> {
    let y0 = lagrange_operator(weighted, povm);
    let base = y0.trace().re;
    let dim = T::lit(y0.dim() as f64);
    let mut min_eigs = Vec::with_capacity(weighted.len());
    let mut negative_mass = T::zero();
    for a in weighted {
        let eig = (&y0 - a).hermitian_part();
        let eig = crate::tensor::hermitian_eigen(&eig)?;
        min_eigs.push(eig.min());
        negative_mass += eig.values.iter().filter(|&&l| l < T::zero()).map(|&l| -l).sum::<T>();
    }
    let worst = min_eigs.iter().copied().fold(T::infinity(), T::min);
    let lift = (-worst).max(T::zero()) * dim;
    Ok(Certificate {
        min_eigs,
        dual: base + lift.min(negative_mass),
    })
}

fn finish<T: Real>(
    weighted: &[ComplexMatrix<T>],
    povm: Vec<ComplexMatrix<T>>,
    slots: &SlotStructure,
    method: Method,
    tol: T,
) -> Result<DiscriminationResult<T>> {
    let cert = certify(weighted, &povm)?;
    let primal_value = primal(weighted, &povm);
    let dual_value = cert.dual;
    let gap = (dual_value - primal_value).max(T::zero());
    let elements = povm
        .into_iter()
        .map(|m| MultiPartyOperator::new(m, slots.clone()))
        .collect::<Result<Vec<_>>>()?;
    Ok(DiscriminationResult {
        primal_value,
        dual_value,
        gap,
        povm: Povm::from_elements_unchecked(elements)?,
        certificate_min_eigs: cert.min_eigs,
        certified: gap <= tol,
        method,
    })
}

/// Maximizes `Σ_i w_i Tr(A_i M_i)` over POVMs.
///
/// Two operators use the closed form; otherwise a dominant operator is tried
/// first and the fixed-point iteration runs only if none dominates.
pub fn optimal_global<T: Real>(
    weights: &[T],
    ops: &[MultiPartyOperator<T>],
    opts: &SolverOptions<T>,
) -> Result<DiscriminationResult<T>> {
    if opts.tol <= T::zero() {
        return Err(Error::InvalidArgument("solver tolerance must be positive".into()));
    }
    let weighted = weighted_ops(weights, ops)?;
    let slots = ops[0].slots();
    if weighted.len() == 1 {
        let povm = vec![ComplexMatrix::identity(slots.dim())];
        return finish(&weighted, povm, slots, Method::Dominant { pivot: 0 }, opts.tol);
    }
    if weighted.len() == 2 {
        return closed_form(&weighted, slots, opts.tol);
    }
    if let Some(pivot) = dominant_pivot(&weighted)? {
        let povm = trivial_povm(pivot, weighted.len(), slots.dim());
        return finish(&weighted, povm, slots, Method::Dominant { pivot }, opts.tol);
    }
    iterate(&weighted, slots, opts)
}

/// The fixed-point iteration regardless of operator count.
pub fn optimal_global_iterative<T: Real>(
    weights: &[T],
    ops: &[MultiPartyOperator<T>],
    opts: &SolverOptions<T>,
) -> Result<DiscriminationResult<T>> {
    let weighted = weighted_ops(weights, ops)?;
    iterate(&weighted, ops[0].slots(), opts)
}

/// Two-operator optimum `w_1 Tr B + Σ λ_+(w_0 A − w_1 B)`.
pub fn helstrom_value<T: Real>(weights: &[T; 2], ops: &[MultiPartyOperator<T>; 2]) -> Result<T> {
    let weighted = weighted_ops(weights, ops)?;
    let eig = crate::tensor::hermitian_eigen(&(&weighted[0] - &weighted[1]))?;
    let pos: T = eig.values.iter().filter(|&&l| l > T::zero()).copied().sum();
    Ok(weighted[1].trace().re + pos)
}

fn trivial_povm<T: Real>(pivot: usize, n: usize, dim: usize) -> Vec<ComplexMatrix<T>> {
    (0..n)
        .map(|i| {
            if i == pivot {
                ComplexMatrix::identity(dim)
            } else {
                ComplexMatrix::zeros(dim)
            }
        })
        .collect()
}

fn closed_form<T: Real>(
    weighted: &[ComplexMatrix<T>],
    slots: &SlotStructure,
    tol: T,
) -> Result<DiscriminationResult<T>> {
    let diff = &weighted[0] - &weighted[1];
    let eig = crate::tensor::hermitian_eigen(&diff)?;
    let m0 = eig.projector_above(T::zero());
    let m1 = &ComplexMatrix::identity(diff.dim()) - &m0;
    let mut res = finish(weighted, vec![m0, m1], slots, Method::ClosedForm, tol)?;
    // Y = w_1 B + (w_0 A − w_1 B)_+ is feasible by construction.
    let exact: T = weighted[1].trace().re + eig.values.iter().filter(|&&l| l > T::zero()).copied().sum::<T>();
    if exact < res.dual_value {
        res.dual_value = exact.max(res.primal_value);
        res.gap = (res.dual_value - res.primal_value).max(T::zero());
        res.certified = res.gap <= tol;
    }
    Ok(res)
}

/// Index `p` with `A_p − A_i ⪰ 0` for all `i`, trying only the operator of
/// largest trace (lowest index on ties).
fn dominant_pivot<T: Real>(weighted: &[ComplexMatrix<T>]) -> Result<Option<usize>> {
    let mut pivot = 0;
    let mut best = T::neg_infinity();
    for (i, a) in weighted.iter().enumerate() {
        let tr = a.trace().re;
        if tr > best {
            best = tr;
            pivot = i;
        }
    }
    for (i, a) in weighted.iter().enumerate() {
        if i == pivot {
            continue;
        }
        let ev = crate::tensor::hermitian_eigenvalues(&(&weighted[pivot] - a))?;
        if !psd_report(&ev, None)?.psd {
            return Ok(None);
        }
    }
    Ok(Some(pivot))
}

fn iterate<T: Real>(
    weighted: &[ComplexMatrix<T>],
    slots: &SlotStructure,
    opts: &SolverOptions<T>,
) -> Result<DiscriminationResult<T>> {
    let n = weighted.len();
    let dim = weighted[0].dim();
    let identity = ComplexMatrix::<T>::identity(dim);

    // Shift every operator to PSD; the objective moves by a constant.
    let mut shift = T::zero();
    let mut scale = T::zero();
    for a in weighted {
        let eig = crate::tensor::hermitian_eigen(a)?;
        shift = shift.max(eig.min().abs());
        scale = scale.max(eig.max_abs());
    }
    // A small extra margin keeps every B_j and R² full rank, so the update
    // stays a congruence of PSD matrices.
    let shift = shift + T::lit(0.01) * scale.max(T::min_positive_value());
    let shifted: Vec<ComplexMatrix<T>> = weighted.iter().map(|a| a + &identity.scale(shift)).collect();
    let pinv_floor = T::tol(1e-13) * (scale + shift).max(T::min_positive_value());

    let inv_n = T::one() / T::lit(n as f64);
    let mut povm: Vec<ComplexMatrix<T>> = vec![identity.scale(inv_n); n];
    let mut best: Option<(T, Vec<ComplexMatrix<T>>)> = None;
    let mut damping = T::one();
    let mut last_primal = T::neg_infinity();
    let check_every = opts.check_every.max(1);

    let mut iterations = 0;
    while iterations < opts.max_iterations {
        // R² = Σ_j B_j M_j B_j; M_j ← R⁺ B_j M_j B_j R⁺.
        let pieces: Vec<ComplexMatrix<T>> = shifted
            .iter()
            .zip(&povm)
            .map(|(b, m)| b.matmul(m).matmul(b).hermitian_part())
            .collect();
        let mut r2 = ComplexMatrix::zeros(dim);
        for p in &pieces {
            r2 += p;
        }
        let eig = crate::tensor::hermitian_eigen(&r2)?;
        let floor = pinv_floor * pinv_floor;
        let r_pinv = eig.apply(|l| if l > floor { T::one() / l.sqrt() } else { T::zero() });
        let kernel = eig.apply(|l| if l > floor { T::zero() } else { T::one() });
        let kernel_share = kernel.scale(inv_n);
        for (m, p) in povm.iter_mut().zip(&pieces) {
            let mut update = r_pinv.matmul(p).matmul(&r_pinv).hermitian_part();
            update += &kernel_share;
            *m = if damping == T::one() {
                update
            } else {
                &m.scale(T::one() - damping) + &update.scale(damping)
            };
        }
        iterations += 1;

        if iterations % check_every == 0 || iterations == opts.max_iterations {
            let value = primal(weighted, &povm);
            let cert = certify(weighted, &povm)?;
            let gap = cert.dual - value;
            let better = best.as_ref().is_none_or(|(g, _)| gap < *g);
            if better {
                best = Some((gap, povm.clone()));
            }
            // Aim below the certification tolerance so primal values are
            // themselves accurate to it.
            if gap <= opts.tol * T::lit(0.1) {
                break;
            }
            // First plateau or oscillation: switch to damped updates.
            if damping == T::one() && value <= last_primal {
                damping = opts.damping;
            }
            last_primal = value;
        }
    }
    let povm = best.map(|(_, p)| p).unwrap_or(povm);
    finish(weighted, povm, slots, Method::Iterative { iterations }, opts.tol)
}

fn transposed_states<T: Real>(e: &Ensemble<T>, x: &Bipartition) -> Result<Vec<MultiPartyOperator<T>>> {
    if x.num_parties() != e.parties().len() {
        return Err(Error::PartySetMismatch(x.num_parties(), e.parties().len()));
    }
    let side = x.side_b();
    e.states().iter().map(|s| s.partial_transpose(&side)).collect()
}

/// Partial-transpose upper bound for bipartition `x`: the global optimum
/// against `{η_i, Γ_X(ρ_i)}`.
pub fn q_upper<T: Real>(e: &Ensemble<T>, x: &Bipartition, opts: &SolverOptions<T>) -> Result<DiscriminationResult<T>> {
    let pt = transposed_states(e, x)?;
    optimal_global(e.probs(), &pt, opts)
}

/// Same as [`q_upper`] but transposing `side_a` instead of `side_b`.
pub fn q_upper_side_a<T: Real>(
    e: &Ensemble<T>,
    x: &Bipartition,
    opts: &SolverOptions<T>,
) -> Result<DiscriminationResult<T>> {
    if x.num_parties() != e.parties().len() {
        return Err(Error::PartySetMismatch(x.num_parties(), e.parties().len()));
    }
    let side = x.side_a();
    let pt = e
        .states()
        .iter()
        .map(|s| s.partial_transpose(&side))
        .collect::<Result<Vec<_>>>()?;
    optimal_global(e.probs(), &pt, opts)
}

#[derive(Clone, Debug, PartialEq)]
pub struct CertificateCheck<T> {
    pub min_eigs: Vec<T>,
    pub holds: bool,
}

/// Optimality test for `povm` against the partially transposed ensemble.
pub fn prop1_check<T: Real>(e: &Ensemble<T>, x: &Bipartition, povm: &Povm<T>, tol: T) -> Result<CertificateCheck<T>> {
    let pt = transposed_states(e, x)?;
    certificate_check(e.probs(), &pt, povm, tol)
}

/// `λ_min(Herm(Σ_j w_j A_j M_j − w_i A_i)) ≥ −tol` for every `i`.
pub fn certificate_check<T: Real>(
    weights: &[T],
    ops: &[MultiPartyOperator<T>],
    povm: &Povm<T>,
    tol: T,
) -> Result<CertificateCheck<T>> {
    let weighted = weighted_ops(weights, ops)?;
    if povm.len() != weighted.len() {
        return Err(Error::DimensionMismatch {
            expected: weighted.len(),
            found: povm.len(),
        });
    }
    let mats: Vec<ComplexMatrix<T>> = povm.elements().iter().map(|m| m.matrix().clone()).collect();
    if mats[0].dim() != weighted[0].dim() {
        return Err(Error::DimensionMismatch {
            expected: weighted[0].dim(),
            found: mats[0].dim(),
        });
    }
    let cert = certify(&weighted, &mats)?;
    let holds = cert.min_eigs.iter().all(|&l| l >= -tol);
    Ok(CertificateCheck {
        min_eigs: cert.min_eigs,
        holds,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct DominanceCheck<T> {
    pub pivot: usize,
    /// `λ_min(η_p Γ(ρ_p) − η_i Γ(ρ_i))`; `None` at the pivot itself.
    pub min_eigs: Vec<Option<T>>,
    pub holds: bool,
}

/// Whether `η_p Γ_X(ρ_p) − η_i Γ_X(ρ_i) ⪰ 0` for every `i ≠ p`; when it
/// holds, the local optimum and its upper bound both equal `η_p`.
pub fn theorem1_check<T: Real>(e: &Ensemble<T>, x: &Bipartition, pivot: usize) -> Result<DominanceCheck<T>> {
    if pivot >= e.len() {
        return Err(Error::InvalidArgument(format!(
            "pivot {pivot} out of range for {} states",
            e.len()
        )));
    }
    let pt = transposed_states(e, x)?;
    let probs = e.probs();
    let lead = pt[pivot].matrix().scale(probs[pivot]);
    let mut min_eigs = Vec::with_capacity(e.len());
    let mut holds = true;
    for (i, s) in pt.iter().enumerate() {
        if i == pivot {
            min_eigs.push(None);
            continue;
        }
        let diff = (&lead - &s.matrix().scale(probs[i])).hermitian_part();
        let ev = crate::tensor::hermitian_eigenvalues(&diff)?;
        holds &= psd_report(&ev, None)?.psd;
        min_eigs.push(Some(ev[0]));
    }
    Ok(DominanceCheck { pivot, min_eigs, holds })
}

/// Builds the certified result for a dominant pivot without iterating.
pub fn dominant_result<T: Real>(
    e: &Ensemble<T>,
    x: &Bipartition,
    check: &DominanceCheck<T>,
    tol: T,
) -> Result<DiscriminationResult<T>> {
    let pt = transposed_states(e, x)?;
    let weighted = weighted_ops(e.probs(), &pt)?;
    let povm = trivial_povm(check.pivot, e.len(), e.dim());
    finish(&weighted, povm, e.slots(), Method::Dominant { pivot: check.pivot }, tol)
}

#[derive(Clone, Debug)]
pub struct BipartitionEntry<T: Real> {
    pub bipartition: Bipartition,
    pub label: String,
    pub result: std::result::Result<DiscriminationResult<T>, String>,
}

#[derive(Clone, Debug)]
pub struct BipartitionTable<T: Real> {
    /// Maximum dual value over the entries that solved.
    pub max: T,
    pub entries: Vec<BipartitionEntry<T>>,
}

impl<T: Real> BipartitionTable<T> {
    pub fn all_solved(&self) -> bool {
        self.entries.iter().all(|e| e.result.is_ok())
    }

    pub fn all_certified(&self) -> bool {
        self.entries
            .iter()
            .all(|e| e.result.as_ref().is_ok_and(|r| r.certified))
    }
}

/// Upper bound for every bipartition, and the maximum. Each bipartition first
/// tries the dominance shortcut with the largest-probability pivot.
pub fn max_bipartition_q<T: Real>(e: &Ensemble<T>, opts: &SolverOptions<T>) -> BipartitionTable<T> {
    let pivot = argmax(e.probs());
    let mut entries = Vec::new();
    let mut max = T::neg_infinity();
    for x in all_bipartitions(e.parties().len()) {
        let result = theorem1_check(e, &x, pivot)
            .and_then(|chk| {
                if chk.holds {
                    dominant_result(e, &x, &chk, opts.tol)
                } else {
                    q_upper(e, &x, opts)
                }
            })
            .map_err(|err| err.to_string());
        if let Ok(r) = &result {
            max = max.max(r.dual_value);
        }
        entries.push(BipartitionEntry {
            bipartition: x,
            label: x.label(e.parties()),
            result,
        });
    }
    BipartitionTable { max, entries }
}

/// Lowest index of the largest value.
pub fn argmax<T: Real>(values: &[T]) -> usize {
    let mut best = 0;
    for (i, v) in values.iter().enumerate() {
        if *v > values[best] {
            best = i;
        }
    }
    best
}

/// `max_i η_i`: always achievable by guessing without measuring.
pub fn guessing_floor<T: Real>(e: &Ensemble<T>) -> T {
    e.probs()[argmax(e.probs())]
}

/// Success probability of measuring every party in a fixed local orthonormal
/// basis and guessing `decide(outcomes)`.
///
/// `bases[p]` lists party `p`'s basis vectors in its local index order (the
/// party's slots in slot order, most significant first).
pub fn locc_strategy_value<T: Real>(
    e: &Ensemble<T>,
    bases: &[Vec<Vec<C<T>>>],
    decide: impl Fn(&[usize]) -> usize,
) -> Result<T> {
    let slots = e.slots();
    let m = slots.num_parties();
    if bases.len() != m {
        return Err(Error::InvalidArgument(format!("{} bases for {m} parties", bases.len())));
    }
    let party_slots: Vec<Vec<usize>> = (0..m).map(|p| slots.slots_of(p)).collect();
    for (p, basis) in bases.iter().enumerate() {
        let pd = slots.party_dim(p);
        if basis.len() != pd || basis.iter().any(|v| v.len() != pd) {
            return Err(Error::InvalidArgument(format!(
                "party {p} basis must be {pd} vectors of length {pd}"
            )));
        }
        for i in 0..pd {
            for j in 0..pd {
                let ip: C<T> = basis[i]
                    .iter()
                    .zip(&basis[j])
                    .map(|(a, b)| a.conj() * b)
                    .fold(C::zero(), |a, b| a + b);
                let want = if i == j { T::one() } else { T::zero() };
                if (ip - C::from(want)).norm() > T::tol(1e-10) {
                    return Err(Error::InvalidArgument(format!("party {p} basis is not orthonormal")));
                }
            }
        }
    }

    let dim = slots.dim();
    // Local index of each party for every full index.
    let local: Vec<Vec<usize>> = (0..dim)
        .map(|i| {
            let digits = slots.digits(i);
            party_slots
                .iter()
                .map(|ps| ps.iter().fold(0, |acc, &s| acc * slots.slot_dims()[s] + digits[s]))
                .collect()
        })
        .collect();

    let party_dims: Vec<usize> = (0..m).map(|p| slots.party_dim(p)).collect();
    let mut outcome = vec![0usize; m];
    let mut total = T::zero();
    loop {
        let guess = decide(&outcome);
        if guess >= e.len() {
            return Err(Error::InvalidArgument(format!("decision {guess} out of range")));
        }
        let v: Vec<C<T>> = (0..dim)
            .map(|i| (0..m).fold(C::from(T::one()), |acc, p| acc * bases[p][outcome[p]][local[i][p]]))
            .collect();
        total += e.probs()[guess] * e.states()[guess].matrix().quadratic_form(&v).re;

        let mut p = m;
        loop {
            if p == 0 {
                return Ok(total);
            }
            p -= 1;
            outcome[p] += 1;
            if outcome[p] < party_dims[p] {
                break;
            }
            outcome[p] = 0;
        }
    }
}

/// Standard basis for every party of `slots`.
pub fn computational_bases<T: Real>(slots: &SlotStructure) -> Vec<Vec<Vec<C<T>>>> {
    (0..slots.num_parties())
        .map(|p| {
            let d = slots.party_dim(p);
            (0..d)
                .map(|k| {
                    (0..d)
                        .map(|j| if j == k { C::from(T::one()) } else { C::zero() })
                        .collect()
                })
                .collect()
        })
        .collect()
}
