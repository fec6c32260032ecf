//! Admissibility of an ensemble for multi-player data hiding, fold-count
//! sizing, seeded protocol simulation and per-coalition security tables.
//!
//! An ensemble hides data when its states are mutually orthogonal (global
//! recovery is perfect) and every bipartition bound `q_X` is below `2/n`, so
//! that coarse-graining `L` copies drives every coalition towards a blind
//! guess.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use statrs::distribution::{ChiSquared, ContinuousCDF};

use crate::discrimination::{
    argmax, max_bipartition_q, optimal_global, theorem1_check, BipartitionTable, Method, SolverOptions,
};
use crate::ensembles::{Ensemble, Origin, SizeCondition};
use crate::error::{Error, Result};
use crate::folding::{coarse_ensemble, fold_probs, omega, prop2_bound, FoldSpec};
use crate::partitions::{all_bipartitions, all_partitions, coarser_bipartitions};
use crate::scalar::C;
use crate::tensor::{hermitian_eigen, ComplexMatrix, DimCap, MultiPartyOperator};

/// Probabilities below this are reported as effectively empty classes.
pub const NEGLIGIBLE_CLASS: f64 = 1e-12;

/// Fold counts beyond this are not searched by [`min_folds_for`].
pub const MAX_FOLDS: usize = 1_000_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Admissible,
    Inadmissible,
    /// Some bipartition bound straddles `2/n` without a certificate.
    Undecided,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Admissible => "admissible",
            Status::Inadmissible => "inadmissible",
            Status::Undecided => "undecided",
        })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct QEntry {
    pub bipartition: String,
    /// Upper bound on `q_X` (the certified dual value).
    pub q: Option<f64>,
    /// Value attained by the returned POVM.
    pub primal: Option<f64>,
    pub gap: Option<f64>,
    pub certified: bool,
    pub method: Option<String>,
    pub error: Option<String>,
}

/// Dominance of one weighted state on every bipartition plus `η_pivot < 2/n`.
#[derive(Clone, Debug, Serialize)]
pub struct FastPath {
    pub pivot: usize,
    pub eta_pivot: f64,
    pub two_over_n: f64,
    /// Per bipartition, the smallest eigenvalue over `η_p Γ(ρ_p) − η_i Γ(ρ_i)`.
    pub min_eigenvalues: Vec<f64>,
    pub dominance: bool,
    pub holds: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct SizeReport {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
    pub eta0: f64,
    pub line: String,
}

impl From<SizeCondition> for SizeReport {
    fn from(c: SizeCondition) -> Self {
        Self {
            lhs: c.lhs,
            rhs: c.rhs,
            holds: c.holds,
            eta0: c.eta0,
            line: c.to_string(),
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct HidingReport {
    pub status: Status,
    pub admissible: bool,
    pub n: usize,
    pub orthogonal: bool,
    pub max_overlap: f64,
    pub p_global: f64,
    pub q_table: Vec<QEntry>,
    pub max_q: f64,
    pub two_over_n: f64,
    pub fast_path: Option<FastPath>,
    pub size_condition: Option<SizeReport>,
    /// Value of the computational-basis product measurement with the best
    /// per-outcome guess; a lower bound on every `p_X`.
    pub product_basis_lower_bound: f64,
    /// `(L, bound)` for `L = 1..=curve_len`.
    pub bound_curve: Vec<(usize, f64)>,
    pub epsilon: f64,
    pub min_folds: Option<usize>,
    pub notes: Vec<String>,
}

#[derive(Clone, Copy, Debug)]
pub struct HidingOptions {
    pub solver: SolverOptions<f64>,
    pub epsilon: f64,
    pub curve_len: usize,
}

impl Default for HidingOptions {
    fn default() -> Self {
        Self {
            solver: SolverOptions::default(),
            epsilon: 1e-6,
            curve_len: 20,
        }
    }
}

fn method_label(m: Method) -> String {
    match m {
        Method::Dominant { pivot } => format!("dominant:{pivot}"),
        Method::ClosedForm => "closed_form".into(),
        Method::Iterative { iterations } => format!("iterative:{iterations}"),
    }
}

fn q_entries(table: &BipartitionTable<f64>) -> Vec<QEntry> {
    table
        .entries
        .iter()
        .map(|e| match &e.result {
            Ok(r) => QEntry {
                bipartition: e.label.clone(),
                q: Some(r.dual_value),
                primal: Some(r.primal_value),
                gap: Some(r.gap),
                certified: r.certified,
                method: Some(method_label(r.method)),
                error: None,
            },
            Err(msg) => QEntry {
                bipartition: e.label.clone(),
                q: None,
                primal: None,
                gap: None,
                certified: false,
                method: None,
                error: Some(msg.clone()),
            },
        })
        .collect()
}

fn fast_path(e: &Ensemble<f64>) -> Result<FastPath> {
    let pivot = argmax(e.probs());
    let n = e.len();
    let mut min_eigenvalues = Vec::new();
    let mut dominance = true;
    for x in all_bipartitions(e.parties().len()) {
        let chk = theorem1_check(e, &x, pivot)?;
        dominance &= chk.holds;
        min_eigenvalues.push(chk.min_eigs.iter().flatten().copied().fold(f64::INFINITY, f64::min));
    }
    let eta_pivot = e.probs()[pivot];
    let two_over_n = 2.0 / n as f64;
    Ok(FastPath {
        pivot,
        eta_pivot,
        two_over_n,
        min_eigenvalues,
        dominance,
        holds: dominance && eta_pivot < two_over_n,
    })
}

/// `Σ_j max_i η_i ⟨j|ρ_i|j⟩` over computational basis states `j`.
pub fn product_basis_value(e: &Ensemble<f64>) -> f64 {
    (0..e.dim())
        .map(|j| {
            e.probs()
                .iter()
                .zip(e.states())
                .map(|(p, s)| p * s.matrix().get(j, j).re)
                .fold(f64::NEG_INFINITY, f64::max)
        })
        .sum()
}

fn classify(orthogonal: bool, entries: &[QEntry], two_over_n: f64) -> Status {
    if !orthogonal {
        return Status::Inadmissible;
    }
    // Primal values are attained, so they bound q_X from below.
    if entries.iter().any(|q| q.primal.is_some_and(|p| p >= two_over_n)) {
        return Status::Inadmissible;
    }
    if entries.iter().all(|q| q.q.is_some_and(|v| v < two_over_n)) {
        Status::Admissible
    } else {
        Status::Undecided
    }
}

/// Full admissibility report.
pub fn check_hiding(e: &Ensemble<f64>, opts: &HidingOptions) -> Result<HidingReport> {
    let n = e.len();
    let two_over_n = 2.0 / n as f64;
    let orthogonal = e.is_orthogonal();
    let max_overlap = e.max_overlap();
    let p_global = if orthogonal {
        1.0
    } else {
        optimal_global(e.probs(), e.states(), &opts.solver)?.dual_value
    };

    let fast = fast_path(e)?;
    let table = max_bipartition_q(e, &opts.solver);
    let q_table = q_entries(&table);
    let max_q = q_table
        .iter()
        .map(|q| q.q.unwrap_or(f64::INFINITY))
        .fold(f64::NEG_INFINITY, f64::max);
    let status = classify(orthogonal, &q_table, two_over_n);

    let size_condition = match e.origin() {
        Some(Origin::Example2(p)) => Some(SizeReport::from(p.size_condition())),
        _ => None,
    };

    let mut notes = Vec::new();
    if !orthogonal {
        notes.push(format!(
            "states are not mutually orthogonal (max overlap {max_overlap:e})"
        ));
    }
    if fast.dominance && !fast.holds {
        notes.push(format!(
            "dominant weight eta_{} = {} is not below 2/n = {}",
            fast.pivot, fast.eta_pivot, two_over_n
        ));
    }
    for (i, &p) in e.probs().iter().enumerate() {
        if p < NEGLIGIBLE_CLASS {
            notes.push(format!("class {i} has negligible probability {p:e}"));
        }
    }
    for q in q_table.iter().filter(|q| !q.certified) {
        match &q.error {
            Some(err) => notes.push(format!("bipartition {} failed: {err}", q.bipartition)),
            None => notes.push(format!("bipartition {} is not certified", q.bipartition)),
        }
    }

    let (bound_curve, min_folds) = if max_q.is_finite() && max_q >= 1.0 / n as f64 - 1e-12 {
        let curve = (1..=opts.curve_len)
            .map(|l| prop2_bound(n, max_q, l).map(|b| (l, b)))
            .collect::<Result<Vec<_>>>()?;
        let folds = if status == Status::Admissible {
            Some(min_folds_for(n, max_q, opts.epsilon)?)
        } else {
            None
        };
        (curve, folds)
    } else {
        (Vec::new(), None)
    };
    if let Some(l) = min_folds {
        for (i, &p) in fold_probs(e.probs(), n, l)?.iter().enumerate() {
            if p < NEGLIGIBLE_CLASS {
                notes.push(format!("class {i} has negligible probability {p:e} at L = {l}"));
            }
        }
    }

    Ok(HidingReport {
        status,
        admissible: status == Status::Admissible,
        n,
        orthogonal,
        max_overlap,
        p_global,
        q_table,
        max_q,
        two_over_n,
        fast_path: Some(fast),
        size_condition,
        product_basis_lower_bound: product_basis_value(e),
        bound_curve,
        epsilon: opts.epsilon,
        min_folds,
        notes,
    })
}

/// Smallest `L ≥ 1` with `prop2_bound(n, q, L) − 1/n ≤ ε`.
pub fn min_folds_for(n: usize, q: f64, epsilon: f64) -> Result<usize> {
    if epsilon.is_nan() || epsilon <= 0.0 {
        return Err(Error::InvalidArgument(format!(
            "epsilon must be positive, got {epsilon}"
        )));
    }
    if q.is_nan() || q >= 2.0 / n as f64 {
        return Err(Error::Inadmissible(format!(
            "q = {q} is not below 2/{n}; the bound does not decay"
        )));
    }
    let floor = 1.0 / n as f64;
    for l in 1..=MAX_FOLDS {
        if prop2_bound(n, q, l)? - floor <= epsilon {
            return Ok(l);
        }
    }
    Err(Error::InvalidArgument(format!(
        "epsilon {epsilon} needs more than {MAX_FOLDS} folds"
    )))
}

/// Fold count needed for coalition advantage at most `ε`; errors unless the
/// ensemble is admissible.
pub fn min_folds(e: &Ensemble<f64>, epsilon: f64) -> Result<usize> {
    let report = check_hiding(
        e,
        &HidingOptions {
            epsilon,
            ..Default::default()
        },
    )?;
    match report.status {
        Status::Admissible => min_folds_for(report.n, report.max_q, epsilon),
        s => Err(Error::Inadmissible(format!("ensemble is {s}"))),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Broadcast,
    Direct,
}

/// Scheme parameters with the admissibility verdict recorded at construction.
#[derive(Clone, Debug)]
pub struct SchemeConfig {
    pub ensemble: Ensemble<f64>,
    pub folds: usize,
    pub seed: u64,
    pub mode: Mode,
    /// Run even without a hiding guarantee.
    pub force: bool,
    status: Status,
}

impl SchemeConfig {
    pub fn new(ensemble: Ensemble<f64>, folds: usize, seed: u64, mode: Mode) -> Result<Self> {
        let status = check_hiding(&ensemble, &HidingOptions::default())?.status;
        Self::with_status(ensemble, folds, seed, mode, status)
    }

    /// Reuses a verdict from an earlier [`check_hiding`] run.
    pub fn with_status(ensemble: Ensemble<f64>, folds: usize, seed: u64, mode: Mode, status: Status) -> Result<Self> {
        if folds == 0 {
            return Err(Error::InvalidArgument("fold count must be at least 1".into()));
        }
        Ok(Self {
            ensemble,
            folds,
            seed,
            mode,
            force: false,
            status,
        })
    }

    pub fn forced(mut self, force: bool) -> Self {
        self.force = force;
        self
    }

    pub fn status(&self) -> Status {
        self.status
    }

    fn guard(&self, x: usize) -> Result<()> {
        let n = self.ensemble.len();
        if x >= n {
            return Err(Error::InvalidArgument(format!("datum {x} is outside 0..{n}")));
        }
        if self.status != Status::Admissible && !self.force {
            return Err(Error::Inadmissible(format!(
                "ensemble is {}; pass the force flag to run without a hiding guarantee",
                self.status
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ProtocolTranscript {
    pub trial: u64,
    pub c_vec: Vec<usize>,
    pub x: usize,
    pub y: usize,
    pub z: usize,
    pub recovered: Option<usize>,
    pub seed: u64,
}

#[derive(Clone, Debug, Serialize)]
pub struct ProtocolSummary {
    pub trials: u64,
    pub folds: usize,
    pub x: usize,
    pub seed: u64,
    pub recovery_rate: Option<f64>,
    pub class_counts: Vec<u64>,
    pub empirical: Vec<f64>,
    pub expected: Vec<f64>,
    /// Largest `|empirical − expected| / σ` over classes with `0 < p < 1`.
    pub max_sigma: f64,
    pub guarantee: bool,
    pub warning: Option<String>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ProtocolRun {
    pub transcripts: Vec<ProtocolTranscript>,
    pub summary: ProtocolSummary,
}

/// Per-trial generator: the configured seed on stream `trial`.
fn trial_rng(seed: u64, trial: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(trial);
    rng
}

/// Inverse-CDF draw; mass lost to rounding goes to the last positive class.
fn sample_index(rng: &mut impl Rng, probs: &[f64]) -> usize {
    let u: f64 = rng.gen();
    let mut cum = 0.0;
    for (i, &p) in probs.iter().enumerate() {
        cum += p;
        if u < cum {
            return i;
        }
    }
    probs.iter().rposition(|&p| p > 0.0).unwrap_or(0)
}

/// Seeded broadcast-protocol runs for datum `x`.
///
/// Global recovery uses the orthogonal class measurement, which returns
/// `ω_n(c⃗)` with certainty; without orthogonality `recovered` is absent.
pub fn run_protocol(cfg: &SchemeConfig, x: usize, trials: u64) -> Result<ProtocolRun> {
    cfg.guard(x)?;
    if trials == 0 {
        return Err(Error::InvalidArgument("trials must be positive".into()));
    }
    let e = &cfg.ensemble;
    let n = e.len();
    let orthogonal = e.is_orthogonal();
    let mut transcripts = Vec::with_capacity(trials as usize);
    let mut class_counts = vec![0u64; n];
    let mut hits = 0u64;
    for trial in 0..trials {
        let mut rng = trial_rng(cfg.seed, trial);
        let c_vec: Vec<usize> = (0..cfg.folds).map(|_| sample_index(&mut rng, e.probs())).collect();
        let y = omega(&c_vec, n)?;
        let z = (x + y) % n;
        let recovered = orthogonal.then(|| (z + n - y) % n);
        class_counts[y] += 1;
        if recovered == Some(x) {
            hits += 1;
        }
        transcripts.push(ProtocolTranscript {
            trial,
            c_vec,
            x,
            y,
            z,
            recovered,
            seed: cfg.seed,
        });
    }

    let expected = fold_probs(e.probs(), n, cfg.folds)?;
    let total = trials as f64;
    let empirical: Vec<f64> = class_counts.iter().map(|&c| c as f64 / total).collect();
    let max_sigma = empirical
        .iter()
        .zip(&expected)
        .filter(|(_, &p)| p > 0.0 && p < 1.0)
        .map(|(&f, &p)| (f - p).abs() / (p * (1.0 - p) / total).sqrt())
        .fold(0.0, f64::max);
    let guarantee = cfg.status == Status::Admissible;
    Ok(ProtocolRun {
        transcripts,
        summary: ProtocolSummary {
            trials,
            folds: cfg.folds,
            x,
            seed: cfg.seed,
            recovery_rate: orthogonal.then(|| hits as f64 / total),
            class_counts,
            empirical,
            expected,
            max_sigma,
            guarantee,
            warning: (!guarantee).then(|| format!("no hiding guarantee: ensemble is {}", cfg.status)),
        },
    })
}

/// The prepared state of the direct-encoding variant and its recovery check.
#[derive(Clone, Debug, Serialize)]
pub struct DirectEncoding {
    pub x: usize,
    pub folds: usize,
    pub dim: usize,
    pub prior: f64,
    pub trace: f64,
    pub purity: f64,
    /// `Tr(ρ_x Π_x)` with `Π_x` the support projector of `ρ_x`.
    pub recovery_probability: f64,
    /// `max_{j≠x} Tr(ρ_x Π_j)`.
    pub confusion: f64,
    pub recovery_ok: bool,
    #[serde(skip)]
    pub state: MultiPartyOperator<f64>,
}

pub fn direct_encode(cfg: &SchemeConfig, x: usize, cap: DimCap) -> Result<DirectEncoding> {
    if cfg.mode != Mode::Direct {
        return Err(Error::InvalidArgument("direct encoding needs mode = direct".into()));
    }
    cfg.guard(x)?;
    let spec = FoldSpec::new(&cfg.ensemble, cfg.folds)?;
    let coarse = crate::folding::direct_encoding(&spec, cap)?;
    let supports = coarse
        .states()
        .iter()
        .map(|s| Ok(hermitian_eigen(s.matrix())?.projector_above(1e-10)))
        .collect::<Result<Vec<ComplexMatrix<f64>>>>()?;
    let rho = coarse.states()[x].clone();
    let recovery_probability = rho.matrix().trace_product(&supports[x]).re;
    let confusion = supports
        .iter()
        .enumerate()
        .filter(|(j, _)| *j != x)
        .map(|(_, p)| rho.matrix().trace_product(p).re)
        .fold(0.0, f64::max);
    Ok(DirectEncoding {
        x,
        folds: cfg.folds,
        dim: rho.dim(),
        prior: coarse.probs()[x],
        trace: rho.trace(),
        purity: rho.matrix().trace_product(rho.matrix()).re,
        recovery_probability,
        confusion,
        recovery_ok: (recovery_probability - 1.0).abs() <= 1e-10 && confusion <= 1e-10 && coarse.is_orthogonal(),
        state: rho,
    })
}

/// Comparison of explicit Born sampling against structural sampling.
#[derive(Clone, Debug, Serialize)]
pub struct BornCrossCheck {
    pub folds: usize,
    pub outcomes: usize,
    pub samples: u64,
    pub explicit_counts: Vec<u64>,
    pub structural_counts: Vec<u64>,
    pub chi2: f64,
    pub dof: usize,
    pub p_value: f64,
}

/// Orthonormal basis adapted to mutually orthogonal states: each state's
/// eigenvectors on its support, then a completion of the common kernel.
/// Returns the basis and, per state, `(basis position, eigenvalue)` pairs.
type AdaptedBasis = (Vec<Vec<C<f64>>>, Vec<Vec<(usize, f64)>>);

fn adapted_basis(e: &Ensemble<f64>) -> Result<AdaptedBasis> {
    let dim = e.dim();
    let mut basis = Vec::with_capacity(dim);
    let mut spectra = Vec::with_capacity(e.len());
    let mut covered = ComplexMatrix::<f64>::zeros(dim);
    for s in e.states() {
        let eig = hermitian_eigen(s.matrix())?;
        let mut spec = Vec::new();
        for (k, &l) in eig.values.iter().enumerate() {
            if l > 1e-10 {
                spec.push((basis.len(), l));
                let v = eig.vector(k);
                covered += &ComplexMatrix::projector(&v);
                basis.push(v);
            }
        }
        spectra.push(spec);
    }
    let rest = &ComplexMatrix::identity(dim) - &covered;
    let eig = hermitian_eigen(&rest.hermitian_part())?;
    for (k, &l) in eig.values.iter().enumerate() {
        if l > 0.5 {
            basis.push(eig.vector(k));
        }
    }
    if basis.len() != dim {
        return Err(Error::InvalidArgument("states are not mutually orthogonal".into()));
    }
    Ok((basis, spectra))
}

fn kron_vec(a: &[C<f64>], b: &[C<f64>]) -> Vec<C<f64>> {
    a.iter().flat_map(|&x| b.iter().map(move |&y| x * y)).collect()
}

/// Measures each of the `L` copies in a basis adapted to the base states.
///
/// The explicit path builds `ρ_{c⃗}` as a matrix and samples from
/// `⟨o|ρ_{c⃗}|o⟩`; the structural path samples one eigenvalue index per copy.
/// Both histograms are compared with a two-sample chi-square test.
pub fn born_cross_check(
    e: &Ensemble<f64>,
    folds: usize,
    samples: u64,
    seed: u64,
    cap: DimCap,
) -> Result<BornCrossCheck> {
    if samples == 0 {
        return Err(Error::InvalidArgument("samples must be positive".into()));
    }
    FoldSpec::new(e, folds)?.explicit_dim(cap)?;
    let n = e.len();
    let base_dim = e.dim();
    let (basis, spectra) = adapted_basis(e)?;
    let outcomes = base_dim.pow(folds as u32);

    // Explicit: Born probabilities of every product outcome, cached per c⃗.
    let mut product_basis: Vec<Vec<C<f64>>> = basis.clone();
    for _ in 1..folds {
        product_basis = product_basis
            .iter()
            .flat_map(|a| basis.iter().map(move |b| kron_vec(a, b)))
            .collect();
    }
    let mut cache: Vec<Option<Vec<f64>>> = vec![None; n.pow(folds as u32)];
    let mut rng = trial_rng(seed, 1);
    let mut explicit_counts = vec![0u64; outcomes];
    for _ in 0..samples {
        let c_vec: Vec<usize> = (0..folds).map(|_| sample_index(&mut rng, e.probs())).collect();
        let key = c_vec.iter().fold(0, |acc, &c| acc * n + c);
        if cache[key].is_none() {
            let mut rho = e.states()[c_vec[0]].clone();
            for &c in &c_vec[1..] {
                rho = rho.tensor(&e.states()[c], cap)?;
            }
            let born = product_basis
                .iter()
                .map(|v| rho.matrix().quadratic_form(v).re.max(0.0))
                .collect();
            cache[key] = Some(born);
        }
        let born = cache[key].as_ref().expect("filled above");
        explicit_counts[sample_index(&mut rng, born)] += 1;
    }

    // Structural: per copy, an eigen-index of the drawn base state.
    let mut rng = trial_rng(seed, 2);
    let mut structural_counts = vec![0u64; outcomes];
    for _ in 0..samples {
        let mut outcome = 0;
        for _ in 0..folds {
            let c = sample_index(&mut rng, e.probs());
            let weights: Vec<f64> = spectra[c].iter().map(|&(_, l)| l).collect();
            let k = sample_index(&mut rng, &weights);
            outcome = outcome * base_dim + spectra[c][k].0;
        }
        structural_counts[outcome] += 1;
    }

    let (chi2, dof, p_value) = two_sample_chi2(&explicit_counts, &structural_counts);
    Ok(BornCrossCheck {
        folds,
        outcomes,
        samples,
        explicit_counts,
        structural_counts,
        chi2,
        dof,
        p_value,
    })
}

/// Two-sample chi-square homogeneity statistic, degrees of freedom and
/// p-value over bins occupied in either sample.
pub fn two_sample_chi2(a: &[u64], b: &[u64]) -> (f64, usize, f64) {
    let na: f64 = a.iter().sum::<u64>() as f64;
    let nb: f64 = b.iter().sum::<u64>() as f64;
    let ka = (nb / na).sqrt();
    let kb = (na / nb).sqrt();
    let mut chi2 = 0.0;
    let mut bins = 0;
    for (&x, &y) in a.iter().zip(b) {
        if x + y == 0 {
            continue;
        }
        bins += 1;
        let d = ka * x as f64 - kb * y as f64;
        chi2 += d * d / (x + y) as f64;
    }
    if bins < 2 {
        return (chi2, 0, 1.0);
    }
    let dof = bins - 1;
    let dist = ChiSquared::new(dof as f64).expect("positive degrees of freedom");
    (chi2, dof, 1.0 - dist.cdf(chi2))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ValueKind {
    /// Closed-form optimum for two dominant-pivot states.
    Exact,
    /// Minimum of the decaying bound over coarser bipartitions.
    Bound,
}

impl fmt::Display for ValueKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ValueKind::Exact => "exact",
            ValueKind::Bound => "bound",
        })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CoalitionRow {
    pub partition: String,
    pub folds: usize,
    pub value: f64,
    pub kind: ValueKind,
}

/// Largest party count for which partitions are enumerated.
pub const COALITION_PARTY_LIMIT: usize = 6;

/// Guessing-probability bound for each nontrivial partition at each `L`.
pub fn coalition_table(e: &Ensemble<f64>, folds: &[usize], opts: &SolverOptions<f64>) -> Result<Vec<CoalitionRow>> {
    let m = e.parties().len();
    if m > COALITION_PARTY_LIMIT {
        return Err(Error::PartitionGuard {
            m,
            limit: COALITION_PARTY_LIMIT,
        });
    }
    if folds.contains(&0) {
        return Err(Error::InvalidArgument("fold count must be at least 1".into()));
    }
    let n = e.len();
    let bips = all_bipartitions(m);
    let fast = fast_path(e)?;
    let exact = n == 2 && fast.dominance;

    let mut q = Vec::with_capacity(bips.len());
    if !exact {
        let table = max_bipartition_q(e, opts);
        for entry in &table.entries {
            match &entry.result {
                Ok(r) => q.push((entry.bipartition, r.dual_value)),
                Err(msg) => {
                    return Err(Error::InvalidArgument(format!(
                        "bipartition {} could not be solved: {msg}",
                        entry.label
                    )))
                }
            }
        }
    }

    let mut rows = Vec::new();
    for x in all_partitions(m)? {
        if x.is_trivial() {
            continue;
        }
        let label = x.label(e.parties());
        let coarser = coarser_bipartitions(&x)?;
        for &l in folds {
            let (value, kind) = if exact {
                let p = e.probs()[fast.pivot];
                (0.5 + 0.5 * (2.0 * p - 1.0).powi(l as i32), ValueKind::Exact)
            } else {
                let mut best = f64::INFINITY;
                for (b, qb) in &q {
                    if coarser.contains(b) {
                        best = best.min(prop2_bound(n, *qb, l)?);
                    }
                }
                (best, ValueKind::Bound)
            };
            rows.push(CoalitionRow {
                partition: label.clone(),
                folds: l,
                value,
                kind,
            });
        }
    }
    Ok(rows)
}

pub fn coalition_report(e: &Ensemble<f64>, folds: usize) -> Result<Vec<CoalitionRow>> {
    coalition_table(e, &[folds], &SolverOptions::default())
}

/// The coarse ensemble for a scheme configuration, within `cap`.
pub fn coarse_for(cfg: &SchemeConfig, cap: DimCap) -> Result<Ensemble<f64>> {
    coarse_ensemble(&FoldSpec::new(&cfg.ensemble, cfg.folds)?, cap)
}
