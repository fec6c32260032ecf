//! Acceptance criteria, one line per criterion.
//!
//! Runs without the libtest harness so the verdict lines are always printed;
//! exits nonzero when any criterion fails.

mod common;

use std::process::ExitCode;
use std::time::{Duration, Instant};

use nlhide_core::discrimination::{
    certificate_check, computational_bases, locc_strategy_value, optimal_global, optimal_global_iterative, prop1_check,
    q_upper, theorem1_check, SolverOptions,
};
use nlhide_core::ensembles::{example1, example2, ExampleParams};
use nlhide_core::folding::{coarse_ensemble, prop2_bound, FoldSpec};
use nlhide_core::hiding::{born_cross_check, check_hiding, min_folds, run_protocol, HidingOptions, Mode, SchemeConfig};
use nlhide_core::partitions::all_bipartitions;
use nlhide_core::tensor::{DimCap, SlotStructure};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const CAP: DimCap = DimCap::DEFAULT;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(t0: Instant, limit: Duration) -> Result<Duration, String> {
    let took = t0.elapsed();
    ensure(took < limit, || format!("took {took:.2?}, limit {limit:?}"))?;
    Ok(took)
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn c1_example1_bounds() -> Outcome {
    let t0 = Instant::now();
    let opts = SolverOptions::default();
    for (d, m) in [(2, 2), (2, 3), (3, 2)] {
        let e = example1::<f64>(d, m, CAP).map_err(err)?;
        let want = (e.dim() as f64 - 1.0) / e.dim() as f64;
        for x in all_bipartitions(m) {
            let chk = theorem1_check(&e, &x, 0).map_err(err)?;
            ensure(chk.holds, || {
                format!("({d},{m}) {x}: dominance fails {:?}", chk.min_eigs)
            })?;
            let r = q_upper(&e, &x, &opts).map_err(err)?;
            ensure((r.dual_value - want).abs() <= 1e-8, || {
                format!("({d},{m}) {x}: q = {} want {want}", r.dual_value)
            })?;
        }
    }
    let took = within(t0, Duration::from_secs(10))?;
    Ok(format!("q = (d^m-1)/d^m on all bipartitions, {took:.2?}"))
}

fn c2_corollary1() -> Outcome {
    let t0 = Instant::now();
    let base = example1::<f64>(2, 2, CAP).map_err(err)?;
    let x = all_bipartitions(2)[0];
    let mut vals = Vec::new();
    for l in 1..=3 {
        let e = coarse_ensemble(&FoldSpec::new(&base, l).map_err(err)?, CAP).map_err(err)?;
        let r = q_upper(&e, &x, &SolverOptions::default()).map_err(err)?;
        let want = 0.5 + 0.5 * 0.5f64.powi(l as i32);
        ensure(
            (r.dual_value - want).abs() <= 1e-6 && (r.primal_value - want).abs() <= 1e-6,
            || format!("L={l}: primal {} dual {} want {want}", r.primal_value, r.dual_value),
        )?;
        vals.push(r.dual_value);
    }
    let took = within(t0, Duration::from_secs(60))?;
    Ok(format!("values {vals:.10?}, {took:.2?}"))
}

fn c3_prop2() -> Outcome {
    let base = example1::<f64>(2, 2, CAP).map_err(err)?;
    let x = all_bipartitions(2)[0];
    let opts = SolverOptions::default();
    let q = q_upper(&base, &x, &opts).map_err(err)?.dual_value;
    let mut worst = f64::NEG_INFINITY;
    for l in 1..=3 {
        let e = coarse_ensemble(&FoldSpec::new(&base, l).map_err(err)?, CAP).map_err(err)?;
        let v = q_upper(&e, &x, &opts).map_err(err)?.dual_value;
        let b = prop2_bound(2, q, l).map_err(err)?;
        worst = worst.max(v - b);
        ensure(v <= b + 1e-6, || format!("L={l}: value {v} exceeds bound {b}"))?;
    }
    for l in 1..=30 {
        let lhs = prop2_bound(2, 0.75, l).map_err(err)? - 0.5;
        let rhs = 2f64.powi(-(l as i32 + 1));
        ensure((lhs - rhs).abs() <= 1e-15 * rhs, || format!("L={l}: {lhs} vs {rhs}"))?;
    }
    Ok(format!("max(value - bound) = {worst:e}; closed form exact for L <= 30"))
}

fn c4_example2() -> Outcome {
    let t0 = Instant::now();
    let p = ExampleParams::new(2, 2, 2, 2);
    let e = example2::<f64>(p, CAP).map_err(err)?;
    let mut min_eig = f64::INFINITY;
    for x in all_bipartitions(2) {
        let chk = theorem1_check(&e, &x, 0).map_err(err)?;
        let m = chk.min_eigs.iter().flatten().copied().fold(f64::INFINITY, f64::min);
        min_eig = min_eig.min(m);
        ensure(chk.holds && m >= -1e-10, || format!("{x}: min eigenvalue {m}"))?;
    }
    let eta0 = e.probs()[0];
    ensure((eta0 - 25.0 / 64.0).abs() <= 1e-15 && eta0 < 0.5, || {
        format!("eta0 = {eta0}")
    })?;
    let sc = p.size_condition();
    ensure(sc.holds && sc.lhs == 0.25 && (sc.rhs - 0.4142136).abs() < 1e-7, || {
        sc.to_string()
    })?;

    let small = example2::<f64>(ExampleParams::new(2, 2, 1, 2), CAP).map_err(err)?;
    let report = check_hiding(&small, &HidingOptions::default()).map_err(err)?;
    let fp = report.fast_path.as_ref().ok_or("no fast path reported")?;
    let size = report.size_condition.as_ref().ok_or("no size condition reported")?;
    ensure(
        !fp.holds && !size.holds && size.lhs == 0.5 && !report.admissible,
        || format!("(2,2,1,2) should fail: fast path {} size {}", fp.holds, size.line),
    )?;
    let took = within(t0, Duration::from_secs(60))?;
    Ok(format!(
        "min eigenvalue {min_eig:e}, {sc}; (2,2,1,2) rejected: {}, {took:.2?}",
        size.line
    ))
}

fn c5_reduction() -> Outcome {
    let mut worst: f64 = 0.0;
    for (d, m) in [(2, 2), (2, 3)] {
        let a = example2::<f64>(ExampleParams::new(d, m, 1, 1), CAP).map_err(err)?;
        let b = example1::<f64>(d, m, CAP).map_err(err)?;
        for (p, q) in a.probs().iter().zip(b.probs()) {
            worst = worst.max((p - q).abs());
        }
        for (s, t) in a.states().iter().zip(b.states()) {
            worst = worst.max(s.matrix().max_diff(t.matrix()));
        }
        ensure(a.slots() == b.slots(), || format!("({d},{m}): slot layouts differ"))?;
    }
    ensure(worst <= 1e-12, || format!("max entry difference {worst:e}"))?;
    Ok(format!("max entry difference {worst:e}"))
}

fn c6_locc() -> Outcome {
    let e = example1::<f64>(2, 2, CAP).map_err(err)?;
    let bases = computational_bases::<f64>(e.slots());
    let v = locc_strategy_value(&e, &bases, |o| usize::from(o[0] == o[1])).map_err(err)?;
    let q = q_upper(&e, &all_bipartitions(2)[0], &SolverOptions::default())
        .map_err(err)?
        .dual_value;
    ensure((v - 0.75).abs() <= 1e-12, || format!("strategy value {v}"))?;
    ensure((v - q).abs() <= 1e-12, || format!("strategy {v} vs bound {q}"))?;
    Ok(format!("strategy {v}, bound {q}"))
}

fn c7_protocol() -> Outcome {
    let t0 = Instant::now();
    let e = example1::<f64>(2, 2, CAP).map_err(err)?;
    let cfg = SchemeConfig::new(e, 3, 42, Mode::Broadcast).map_err(err)?;
    let a = run_protocol(&cfg, 1, 10_000).map_err(err)?;
    let b = run_protocol(&cfg, 1, 10_000).map_err(err)?;
    let s = &a.summary;
    ensure(s.recovery_rate == Some(1.0), || {
        format!("recovery rate {:?}", s.recovery_rate)
    })?;
    for (i, (f, p)) in s.empirical.iter().zip([0.5625, 0.4375]).enumerate() {
        let sigma = (p * (1.0 - p) / 1e4f64).sqrt();
        ensure((f - p).abs() <= 4.0 * sigma, || {
            format!("class {i}: {f} vs {p} (sigma {sigma})")
        })?;
    }
    let ja = serde_json::to_vec(&a.transcripts).map_err(err)?;
    let jb = serde_json::to_vec(&b.transcripts).map_err(err)?;
    ensure(ja == jb, || "transcripts differ between identical seeds".into())?;
    let took = within(t0, Duration::from_secs(5))?;
    Ok(format!(
        "recovery 1.0, frequencies {:?}, max {:.2} sigma, {took:.2?}",
        s.empirical, s.max_sigma
    ))
}

fn c8_sizing() -> Outcome {
    let e = example1::<f64>(2, 2, CAP).map_err(err)?;
    let l = min_folds(&e, 1e-6).map_err(err)?;
    ensure(l == 19, || format!("min_folds = {l}"))?;
    let chk = born_cross_check(&e, 2, 20_000, 7, CAP).map_err(err)?;
    ensure(chk.outcomes == 16, || format!("{} outcomes", chk.outcomes))?;
    ensure(chk.p_value > 0.001, || {
        format!("chi2 {} dof {} p {}", chk.chi2, chk.dof, chk.p_value)
    })?;
    Ok(format!(
        "min_folds 19; chi2 {:.3} on {} dof, p = {:.4}",
        chk.chi2, chk.dof, chk.p_value
    ))
}

fn c9_solver() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let opts = SolverOptions::default();
    let mut worst_gap: f64 = 0.0;
    let mut worst_res = f64::INFINITY;
    let mut worst_agree: f64 = 0.0;
    for k in 0..50 {
        let n = 2 + k % 3;
        let e = common::random_ensemble(&mut rng, n);
        ensure(e.dim() <= 16, || format!("member {k} has dim {}", e.dim()))?;
        let transposed = k % 2 == 1;
        let x = all_bipartitions(e.parties().len())[0];
        let ops = if transposed {
            e.states()
                .iter()
                .map(|s| s.partial_transpose(&x.side_b()))
                .collect::<Result<Vec<_>, _>>()
                .map_err(err)?
        } else {
            e.states().to_vec()
        };
        let r = optimal_global(e.probs(), &ops, &opts).map_err(err)?;
        ensure(r.certified, || format!("member {k} not converged: gap {:e}", r.gap))?;
        worst_gap = worst_gap.max(r.gap);
        ensure(r.gap <= 1e-8, || format!("member {k}: gap {:e}", r.gap))?;
        let chk = if transposed {
            prop1_check(&e, &x, &r.povm, 1e-7)
        } else {
            certificate_check(e.probs(), &ops, &r.povm, 1e-7)
        }
        .map_err(err)?;
        let m = chk.min_eigs.iter().copied().fold(f64::INFINITY, f64::min);
        worst_res = worst_res.min(m);
        ensure(m >= -1e-7, || format!("member {k}: certificate residual {m:e}"))?;
        if n == 2 {
            let it = optimal_global_iterative(e.probs(), &ops, &opts).map_err(err)?;
            let diff = (it.primal_value - r.primal_value)
                .abs()
                .max((it.dual_value - r.dual_value).abs());
            worst_agree = worst_agree.max(diff);
            ensure(diff <= 1e-8, || {
                format!("member {k}: iterative vs closed form differ by {diff:e}")
            })?;
        }
    }
    Ok(format!(
        "max gap {worst_gap:e}, min residual {worst_res:e}, max n=2 disagreement {worst_agree:e}"
    ))
}

fn c10_kernel() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let layouts = [
        SlotStructure::uniform(2, 2).unwrap(),
        SlotStructure::uniform(2, 3).unwrap(),
        SlotStructure::new(vec![2, 3, 2], vec![0, 1, 0]).unwrap(),
        SlotStructure::uniform(4, 3).unwrap(),
        SlotStructure::uniform(2, 6).unwrap(),
        SlotStructure::new(vec![2, 2, 2, 2, 2, 2], vec![0, 1, 2, 0, 1, 2]).unwrap(),
    ];
    let mut worst: f64 = 0.0;
    for k in 0..100 {
        let slots = &layouts[k % layouts.len()];
        let a = common::random_hermitian(&mut rng, slots);
        let parties = slots.num_parties();
        let bips = all_bipartitions(parties);
        let x = bips[rng.gen_range(0..bips.len())];
        let pt = a.partial_transpose(&x.side_b()).map_err(err)?;
        let back = pt.partial_transpose(&x.side_b()).map_err(err)?;
        worst = worst
            .max(back.matrix().max_diff(a.matrix()))
            .max((pt.trace() - a.trace()).abs())
            .max(pt.matrix().hermiticity_residual());

        // Factorization over two operators sharing the party labels.
        let small = SlotStructure::uniform(2, parties).unwrap();
        if small.dim() * small.dim() <= 64 {
            let b = common::random_hermitian(&mut rng, &small);
            let c = common::random_hermitian(&mut rng, &small);
            let bc = b.tensor(&c, CAP).map_err(err)?;
            let lhs = bc.partial_transpose(&x.side_b()).map_err(err)?;
            let rhs = b
                .partial_transpose(&x.side_b())
                .map_err(err)?
                .tensor(&c.partial_transpose(&x.side_b()).map_err(err)?, CAP)
                .map_err(err)?;
            worst = worst.max(lhs.matrix().max_diff(rhs.matrix()));
        }
    }
    ensure(worst <= 1e-10, || format!("max residual {worst:e}"))?;
    Ok(format!("100 operators up to dim 64, max residual {worst:e}"))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("example 1 bound exactness", c1_example1_bounds),
        ("two-state closed form on coarse ensembles", c2_corollary1),
        ("exponential bound", c3_prop2),
        ("example 2 admissibility", c4_example2),
        ("example 2 reduces to example 1", c5_reduction),
        ("product-measurement achievability", c6_locc),
        ("protocol soundness", c7_protocol),
        ("hiding sizing and sampling agreement", c8_sizing),
        ("solver certification", c9_solver),
        ("partial-transpose kernel properties", c10_kernel),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        match run() {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail}", i + 1),
            Err(detail) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {detail}", i + 1);
            }
        }
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
