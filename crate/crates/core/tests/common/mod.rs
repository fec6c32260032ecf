#![allow(dead_code)]

use nlhide_core::ensembles::Ensemble;
use nlhide_core::partitions::PartySet;
use nlhide_core::scalar::C;
use nlhide_core::tensor::{ComplexMatrix, MultiPartyOperator, SlotStructure};
use rand::Rng;

/// Ginibre-style random density matrix of the given rank.
pub fn random_state<R: Rng>(rng: &mut R, slots: &SlotStructure, rank: usize) -> MultiPartyOperator<f64> {
    let dim = slots.dim();
    let g: Vec<Vec<C<f64>>> = (0..rank)
        .map(|_| {
            (0..dim)
                .map(|_| C::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
                .collect()
        })
        .collect();
    let mut m = ComplexMatrix::zeros(dim);
    for v in &g {
        m += &ComplexMatrix::projector(v);
    }
    let tr = m.trace().re;
    MultiPartyOperator::new(m.scale(1.0 / tr), slots.clone()).unwrap()
}

/// Random Hermitian matrix with entries in [-1, 1].
pub fn random_hermitian<R: Rng>(rng: &mut R, slots: &SlotStructure) -> MultiPartyOperator<f64> {
    let dim = slots.dim();
    let raw = ComplexMatrix::from_fn(dim, |_, _| C::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)));
    MultiPartyOperator::new(raw.hermitian_part(), slots.clone()).unwrap()
}

pub fn random_probs<R: Rng>(rng: &mut R, n: usize) -> Vec<f64> {
    let raw: Vec<f64> = (0..n).map(|_| rng.gen_range(0.05..1.0)).collect();
    let sum: f64 = raw.iter().sum();
    let mut p: Vec<f64> = raw.iter().map(|x| x / sum).collect();
    let rest: f64 = p[1..].iter().sum();
    p[0] = 1.0 - rest;
    p
}

/// Random slot layouts with total dimension at most 16.
pub fn random_slots<R: Rng>(rng: &mut R) -> SlotStructure {
    match rng.gen_range(0..4) {
        0 => SlotStructure::uniform(2, 2).unwrap(),
        1 => SlotStructure::uniform(2, 3).unwrap(),
        2 => SlotStructure::uniform(4, 2).unwrap(),
        _ => SlotStructure::new(vec![2, 2, 2, 2], vec![0, 1, 0, 1]).unwrap(),
    }
}

pub fn random_ensemble<R: Rng>(rng: &mut R, n: usize) -> Ensemble<f64> {
    let slots = random_slots(rng);
    let states = (0..n)
        .map(|_| {
            let rank = rng.gen_range(1..=slots.dim());
            random_state(rng, &slots, rank)
        })
        .collect();
    let parties = PartySet::standard(slots.num_parties()).unwrap();
    Ensemble::new(parties, random_probs(rng, n), states).unwrap()
}

/// Spectrum via nalgebra on the real 2D×2D embedding; each eigenvalue of the
/// complex matrix appears twice there, so every other value is kept.
pub fn oracle_eigenvalues(m: &ComplexMatrix<f64>) -> Vec<f64> {
    let n = m.dim();
    let big = nalgebra::DMatrix::<f64>::from_fn(2 * n, 2 * n, |r, c| {
        let z = m.get(r % n, c % n);
        match (r < n, c < n) {
            (true, true) | (false, false) => z.re,
            (true, false) => -z.im,
            (false, true) => z.im,
        }
    });
    let eig = nalgebra::SymmetricEigen::new(big);
    let mut vals: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
    vals.into_iter().step_by(2).collect()
}
