//! Shared helpers for the unit tests: a tiny deterministic xorshift stream
//! and random fixture constructors.

use crate::clifford::EMForm;
use crate::matrix::PhaseMatrix;
use crate::symplectic::{generator_exp, GeneratorId, SymplecticTransform};

/// Deterministic xorshift64* stream of uniforms in (−1, 1).
pub fn rng_stream(seed: u64) -> impl FnMut() -> f64 {
    let mut state = seed.wrapping_mul(0x9e3779b97f4a7c15).wrapping_add(0x2545f4914f6cdd1d);
    move || {
        state ^= state << 13;
        state ^= state >> 7;
        state ^= state << 17;
        (state >> 11) as f64 / (1u64 << 53) as f64 * 2.0 - 1.0
    }
}

pub fn random_em(next: &mut dyn FnMut() -> f64) -> EMForm {
    EMForm::new(next(), [next(), next(), next()], [next(), next(), next()], [
        next(),
        next(),
        next(),
    ])
}

pub fn random_hamiltonian4(next: &mut dyn FnMut() -> f64) -> PhaseMatrix {
    random_em(next).assemble()
}

/// Random word in the ten 4×4 generators with tracked inverse.
pub fn random_word4(len: usize, tau_cap: f64, next: &mut dyn FnMut() -> f64) -> SymplecticTransform {
    let mut t = SymplecticTransform::identity(4);
    for _ in 0..len {
        let k = GeneratorId::new(((next().abs() * 9.9999) as usize).min(9)).unwrap();
        let tau = next() * tau_cap;
        t = t.then(&generator_exp(k, tau).unwrap());
    }
    t
}

/// Random word of embedded generators on a 2n-dimensional space.
pub fn random_word_2n(
    pairs: usize,
    len: usize,
    tau_cap: f64,
    next: &mut dyn FnMut() -> f64,
) -> SymplecticTransform {
    assert!(pairs >= 2);
    let dim = 2 * pairs;
    let mut t = SymplecticTransform::identity(dim);
    for _ in 0..len {
        let k = GeneratorId::new(((next().abs() * 9.9999) as usize).min(9)).unwrap();
        let tau = next() * tau_cap;
        let i = ((next().abs() * pairs as f64) as usize).min(pairs - 1);
        let mut j = ((next().abs() * pairs as f64) as usize).min(pairs - 1);
        if i == j {
            j = (i + 1) % pairs;
        }
        let (lo, hi) = (i.min(j), i.max(j));
        let step = generator_exp(k, tau).unwrap().embed_pairs(lo, hi, dim).unwrap();
        t = t.then(&step);
    }
    t
}

/// Block-diagonal Hamiltonian with elliptic blocks ωₖ·η₀.
pub fn block_diag_elliptic(omegas: &[f64]) -> PhaseMatrix {
    let dim = 2 * omegas.len();
    let mut m = PhaseMatrix::zeros(dim);
    for (k, &w) in omegas.iter().enumerate() {
        m.set(2 * k, 2 * k + 1, w);
        m.set(2 * k + 1, 2 * k, -w);
    }
    m
}

/// Frequencies with pairwise separation, suitable for forward-constructed
/// fixtures (degenerate frequencies give the steering invariants no signal).
pub fn separated_frequencies(
    n: usize,
    lo: f64,
    hi: f64,
    min_gap: f64,
    next: &mut dyn FnMut() -> f64,
) -> Vec<f64> {
    loop {
        let ws: Vec<f64> = (0..n).map(|_| lo + next().abs() * (hi - lo)).collect();
        let mut ok = true;
        for i in 0..n {
            for j in i + 1..n {
                if (ws[i] - ws[j]).abs() < min_gap {
                    ok = false;
                }
            }
        }
        if ok {
            return ws;
        }
    }
}
