mod common;

use nlhide_core::discrimination::SolverOptions;
use nlhide_core::ensembles::example1;
use nlhide_core::folding::{fold_probs, omega, prop2_bound};
use nlhide_core::hiding::{coalition_table, run_protocol, Mode, SchemeConfig};
use nlhide_core::partitions::{all_bipartitions, all_partitions, coarser_bipartitions, Partition};
use nlhide_core::tensor::{DimCap, SlotStructure};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn layout(kind: usize) -> SlotStructure {
    match kind % 5 {
        0 => SlotStructure::uniform(2, 2).unwrap(),
        1 => SlotStructure::new(vec![2, 3], vec![0, 1]).unwrap(),
        2 => SlotStructure::uniform(2, 3).unwrap(),
        3 => SlotStructure::new(vec![2, 2, 2, 2], vec![0, 1, 0, 1]).unwrap(),
        _ => SlotStructure::new(vec![2, 2, 2, 2, 2, 2], vec![0, 1, 2, 0, 1, 2]).unwrap(),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn partial_transpose_kernel(seed in any::<u64>(), kind in 0usize..5) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let slots = layout(kind);
        let a = common::random_hermitian(&mut rng, &slots);
        let scale = 1.0 + a.matrix().max_abs();
        for x in all_bipartitions(slots.num_parties()) {
            let pt = a.partial_transpose(&x.side_b()).unwrap();
            let back = pt.partial_transpose(&x.side_b()).unwrap();
            prop_assert!(back.matrix().max_diff(a.matrix()) <= 1e-12 * scale);
            prop_assert!((pt.trace() - a.trace()).abs() <= 1e-12 * scale);
            prop_assert!(pt.matrix().hermiticity_residual() <= 1e-12 * scale);
            // Transposing the other side is the full transpose of this one.
            let other = a.partial_transpose(&x.side_a()).unwrap();
            let ev1 = pt.eigenvalues().unwrap();
            let ev2 = other.eigenvalues().unwrap();
            for (p, q) in ev1.iter().zip(&ev2) {
                prop_assert!((p - q).abs() <= 1e-10 * scale);
            }
        }
    }

    #[test]
    fn partial_transpose_factorizes(seed in any::<u64>()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let s1 = SlotStructure::uniform(2, 2).unwrap();
        let s2 = SlotStructure::new(vec![3, 2], vec![0, 1]).unwrap();
        let a = common::random_hermitian(&mut rng, &s1);
        let b = common::random_hermitian(&mut rng, &s2);
        let ab = a.tensor(&b, DimCap::DEFAULT).unwrap();
        for side in [[0usize], [1]] {
            let lhs = ab.partial_transpose(&side).unwrap();
            let rhs = a.partial_transpose(&side).unwrap().tensor(&b.partial_transpose(&side).unwrap(), DimCap::DEFAULT).unwrap();
            prop_assert!(lhs.matrix().max_diff(rhs.matrix()) <= 1e-12);
        }
    }

    #[test]
    fn partitions_form_a_partial_order(m in 2usize..6, i in any::<prop::sample::Index>(), j in any::<prop::sample::Index>(), k in any::<prop::sample::Index>()) {
        let all = all_partitions(m).unwrap();
        let (x, y, z) = (&all[i.index(all.len())], &all[j.index(all.len())], &all[k.index(all.len())]);
        prop_assert!(x.is_coarser_than(x).unwrap());
        if x.is_coarser_than(y).unwrap() && y.is_coarser_than(x).unwrap() {
            prop_assert_eq!(x, y);
        }
        if x.is_coarser_than(y).unwrap() && y.is_coarser_than(z).unwrap() {
            prop_assert!(x.is_coarser_than(z).unwrap());
        }
        prop_assert!(Partition::trivial(m).is_coarser_than(x).unwrap());
        prop_assert!(x.is_coarser_than(&Partition::finest(m)).unwrap());
        if !x.is_trivial() {
            let bips = coarser_bipartitions(x).unwrap();
            prop_assert!(!bips.is_empty());
            for b in bips {
                prop_assert!(b.as_partition().is_coarser_than(x).unwrap());
            }
        }
    }

    #[test]
    fn fold_probs_matches_enumeration(raw in prop::collection::vec(0.01f64..1.0, 2..=4), l in 0usize..=6) {
        let sum: f64 = raw.iter().sum();
        let probs: Vec<f64> = raw.iter().map(|x| x / sum).collect();
        let n = probs.len();
        let mut brute = vec![0.0; n];
        for code in 0..n.pow(l as u32) {
            let mut rest = code;
            let mut c = Vec::with_capacity(l);
            for _ in 0..l {
                c.push(rest % n);
                rest /= n;
            }
            brute[omega(&c, n).unwrap()] += c.iter().map(|&i| probs[i]).product::<f64>();
        }
        let got = fold_probs(&probs, n, l).unwrap();
        for (a, b) in got.iter().zip(&brute) {
            prop_assert!((a - b).abs() <= 1e-13);
        }
        prop_assert!((got.iter().sum::<f64>() - 1.0).abs() <= 1e-12);
    }

    #[test]
    fn bound_is_monotone(n in 2usize..6, frac in 0.0f64..1.0, l in 1usize..40) {
        let q = 1.0 / n as f64 + frac * (1.0 / n as f64);
        let a = prop2_bound(n, q, l).unwrap();
        let b = prop2_bound(n, q, l + 1).unwrap();
        prop_assert!(b <= a);
        prop_assert!(b >= 1.0 / n as f64);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn transcript_arithmetic(seed in any::<u64>(), x in 0usize..2, l in 1usize..8) {
        let e = example1::<f64>(2, 2, DimCap::DEFAULT).unwrap();
        let cfg = SchemeConfig::new(e, l, seed, Mode::Broadcast).unwrap();
        let run = run_protocol(&cfg, x, 400).unwrap();
        for t in &run.transcripts {
            prop_assert_eq!((t.z + 2 - t.y) % 2, t.x);
            prop_assert_eq!((t.z + 2 - t.x) % 2, t.y);
            prop_assert_eq!(t.y, omega(&t.c_vec, 2).unwrap());
            prop_assert_eq!(t.recovered, Some(x));
            prop_assert_eq!(t.seed, seed);
        }
        let s = &run.summary;
        for (f, p) in s.empirical.iter().zip(&s.expected) {
            prop_assert!((f - p).abs() <= 4.0 * (p * (1.0 - p) / 400.0).sqrt() + 1e-12);
        }
    }
}

#[test]
fn coalition_bounds_decay() {
    let e = example1::<f64>(2, 3, DimCap::DEFAULT).unwrap();
    let folds = [1, 5, 10, 20];
    let rows = coalition_table(&e, &folds, &SolverOptions::default()).unwrap();
    for chunk in rows.chunks(folds.len()) {
        for w in chunk.windows(2) {
            assert!(w[1].value < w[0].value);
            assert!(w[1].value > 0.5);
        }
    }
}
