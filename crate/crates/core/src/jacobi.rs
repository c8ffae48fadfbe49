//! Iterative 2n×2n block-diagonalization driver.
//!
//! Exactly like the classical Jacobi eigenvalue iteration, but the elementary
//! unit is a canonical pair instead of a coordinate: each step selects the
//! pair of pairs with the dominant coupling (largest sum of squared entries
//! of the two off-diagonal 2×2 blocks), decouples the corresponding 4×4
//! restriction, and embeds the resulting transform into the full space.
//! Convergence is monitored defensively — no proof is attempted — via a step
//! cap, a non-increase band and a strict-decrease window on the residual.

use crate::decouple4::{decouple4_classified, Strategy, StructureClass};
use crate::matrix::PhaseMatrix;
use crate::symplectic::{
    hamiltonian_defect, skew_hamiltonian_defect, SymplecticTransform, STRUCT_TOL,
};
use crate::{Error, Result};

/// Driver configuration.
#[derive(Debug, Clone)]
pub struct JacobiConfig {
    /// Relative residual threshold: Frobenius norm of all off-block-diagonal
    /// 2×2 blocks over the Frobenius norm of the whole matrix.
    pub tolerance: f64,
    /// Cap on block-steps; `None` resolves to `64·n²` for n canonical pairs.
    pub max_sweeps: Option<usize>,
    pub strategy: Strategy,
}

impl Default for JacobiConfig {
    fn default() -> Self {
        Self { tolerance: 1e-12, max_sweeps: None, strategy: Strategy::One }
    }
}

impl JacobiConfig {
    pub fn resolved_max_sweeps(&self, pairs: usize) -> usize {
        self.max_sweeps.unwrap_or(64 * pairs * pairs).max(1)
    }
}

/// Outcome of a driver run.
#[derive(Debug, Clone)]
pub struct JacobiReport {
    /// Accumulated transform `T` with `T·input·T⁻¹ = result`.
    pub transform: SymplecticTransform,
    /// 2×2 block-diagonal result.
    pub result: PhaseMatrix,
    /// Number of 4×4 block-steps taken.
    pub steps: usize,
    /// Relative off-block residual before each step plus the final value.
    pub residual_history: Vec<f64>,
}

/// Relative off-block-diagonal residual of a 2n×2n matrix.
pub fn off_block_residual(h: &PhaseMatrix) -> f64 {
    let n = h.pairs();
    let mut off = 0.0f64;
    for i in 0..n {
        for k in 0..n {
            if i == k {
                continue;
            }
            for a in 0..2 {
                for b in 0..2 {
                    let v = h.get(2 * i + a, 2 * k + b);
                    off += v * v;
                }
            }
        }
    }
    let total = h.frobenius();
    if total == 0.0 {
        0.0
    } else {
        off.sqrt() / total
    }
}

/// Canonical-pair indices `(i, k)`, `i < k`, whose combined off-diagonal 2×2
/// blocks have the largest sum of squared entries; ties break towards the
/// lexicographically smallest pair.
pub fn select_dominant_block(h: &PhaseMatrix) -> Result<(usize, usize)> {
    let n = h.pairs();
    if n < 2 {
        return Err(Error::DimensionTooSmall(h.dim()));
    }
    let mut best = (0usize, 1usize);
    let mut best_sum = f64::NEG_INFINITY;
    for i in 0..n {
        for k in i + 1..n {
            let mut sum = 0.0;
            for a in 0..2 {
                for b in 0..2 {
                    let u = h.get(2 * i + a, 2 * k + b);
                    let l = h.get(2 * k + a, 2 * i + b);
                    sum += u * u + l * l;
                }
            }
            if sum > best_sum {
                best_sum = sum;
                best = (i, k);
            }
        }
    }
    Ok(best)
}

/// Block-diagonalize a Hamiltonian or skew-Hamiltonian 2n×2n matrix by
/// successive embedded 4×4 decoupling steps.
///
/// 2×2 inputs are already "block-diagonal" and are returned unchanged with
/// zero steps. Complex off-axis eigenvalues of a selected 4×4 restriction
/// propagate as `ComplexEigenvalues`; a stalling residual raises
/// `NoConvergence`.
pub fn jacobi_decouple(h: &PhaseMatrix, cfg: &JacobiConfig) -> Result<JacobiReport> {
    if cfg.tolerance <= 0.0 {
        return Err(Error::NoConvergence { steps: 0, residual: f64::INFINITY });
    }
    let ham = hamiltonian_defect(h);
    let scale = h.max_abs().max(1.0);
    let class = if ham <= STRUCT_TOL * scale {
        StructureClass::Hamiltonian
    } else {
        let skew = skew_hamiltonian_defect(h);
        if skew <= STRUCT_TOL * scale {
            StructureClass::SkewHamiltonian
        } else {
            return Err(Error::NotStructured { ham, skew });
        }
    };

    let n = h.pairs();
    let mut work = h.clone();
    let mut transform = SymplecticTransform::identity(h.dim());
    let mut history = vec![off_block_residual(&work)];

    if n < 2 {
        return Ok(JacobiReport { transform, result: work, steps: 0, residual_history: history });
    }

    let max_steps = cfg.resolved_max_sweeps(n);
    let mut steps = 0usize;

    loop {
        let residual = *history.last().unwrap();
        if residual <= cfg.tolerance {
            return Ok(JacobiReport { transform, result: work, steps, residual_history: history });
        }
        if steps >= max_steps {
            return Err(Error::NoConvergence { steps, residual });
        }

        let (i, k) = select_dominant_block(&work)?;
        let sub = work.pair_submatrix(i, k);
        // Entry tolerance for the 4×4 step, scaled so that "every block below
        // it" implies the global relative residual is met, with a floor at
        // the rounding level of the full matrix.
        let sub_tol = (cfg.tolerance * work.frobenius() / (4.0 * n as f64))
            .max(1e-15 * work.frobenius());
        let report = decouple4_classified(&sub, cfg.strategy, sub_tol, class)?;
        let step = report.transform.embed_pairs(i, k, work.dim())?;
        work = step.apply(&work);
        transform = transform.then(&step);
        steps += 1;

        let r = off_block_residual(&work);
        history.push(r);

        // Defensive monitoring: a single step may not grow the residual by
        // more than a factor 2, and every stretch of 10 steps must decrease
        // it strictly (checked only while above tolerance).
        if r > cfg.tolerance {
            if r > 2.0 * residual {
                return Err(Error::NoConvergence { steps, residual: r });
            }
            if steps >= 10 {
                let before = history[history.len() - 11];
                if r >= before {
                    return Err(Error::NoConvergence { steps, residual: r });
                }
            }
        }
    }
}
