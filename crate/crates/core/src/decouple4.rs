//! Symplectic 2×2 block-diagonalization of a single 4×4 matrix.
//!
//! A 4×4 Hamiltonian matrix is block-diagonal exactly when the four coupling
//! coefficients P_y, E_y, B_x, B_z of its EM form vanish, equivalently when
//! P⃗ and E⃗ are orthogonal to B⃗ and B⃗ points along ŷ. The four-step
//! strategy drives it there: a γ₀-rotation zeroing ε_r (or ε_g), two spatial
//! rotations aligning the auxiliary vector b⃗ with ŷ, and one boost zeroing
//! the remaining ε. The boost is only possible while |ε/b_y| < 1; beyond that
//! the matrix has complex off-axis eigenvalues and no symplectic
//! block-diagonalization exists.
//!
//! Skew-Hamiltonian matrices carry the same steering data directly in their
//! own coefficients (c₁₀ = ε_g, c₁₄ = ε_r, (c₁₁,c₁₂,c₁₃) = b⃗), so the same
//! four steps block-diagonalize them as well.
//!
//! Equal frequencies silence all steering invariants at once (ε_r, ε_g and
//! b⃗ vanish identically while coupling remains); that case falls back to
//! spatial rotations aimed at the field vectors themselves.

use crate::clifford::{cross3, decompose4, dirac_basis, dot3, em_form, EMForm};
use crate::matrix::PhaseMatrix;
use crate::symplectic::{
    generator_exp, hamiltonian_defect, skew_hamiltonian_defect, GeneratorId, SymplecticTransform,
};
use crate::{Error, Result};

/// Default absolute tolerance on the coupling residual (max |entry| of the
/// off-diagonal 2×2 blocks).
pub const RESIDUAL_TOL: f64 = 1e-12;

/// Below this magnitude an angle argument counts as zero and the step is
/// skipped; the arctan expressions are undefined at 0/0.
pub const SKIP_TOL: f64 = 1e-14;

/// Limit on repetitions of the four-step sequence.
pub const PASS_LIMIT: usize = 64;

/// Auxiliary scalars and vectors steering the block-diagonalization.
///
/// `eps_r = E⃗·B⃗`, `eps_g = B⃗·P⃗`, `eps_b = E⃗·P⃗`, and
/// `r⃗ = 𝓔P⃗ + B⃗×E⃗`, `g⃗ = 𝓔E⃗ + P⃗×B⃗`, `b⃗ = 𝓔B⃗ + E⃗×P⃗`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AuxInvariants {
    pub eps_r: f64,
    pub eps_g: f64,
    pub eps_b: f64,
    pub rvec: [f64; 3],
    pub gvec: [f64; 3],
    pub bvec: [f64; 3],
}

impl AuxInvariants {
    pub fn from_em(em: &EMForm) -> Self {
        Self {
            eps_r: dot3(em.evec, em.bvec),
            eps_g: dot3(em.bvec, em.pvec),
            eps_b: dot3(em.evec, em.pvec),
            rvec: add3(scale3(em.pvec, em.energy), cross3(em.bvec, em.evec)),
            gvec: add3(scale3(em.evec, em.energy), cross3(em.pvec, em.bvec)),
            bvec: add3(scale3(em.bvec, em.energy), cross3(em.evec, em.pvec)),
        }
    }
}

fn add3(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] + b[0], a[1] + b[1], a[2] + b[2]]
}

fn scale3(a: [f64; 3], s: f64) -> [f64; 3] {
    [a[0] * s, a[1] * s, a[2] * s]
}

/// Auxiliary invariants of a 4×4 Hamiltonian matrix via the EM-form
/// formulas. The same values are recoverable from the skew-Hamiltonian
/// components of H² (see [`coupling_from_square`]).
pub fn aux_invariants(h: &PhaseMatrix) -> Result<AuxInvariants> {
    let em = em_form(h)?;
    Ok(AuxInvariants::from_em(&em))
}

/// The subset of steering data shared by the Hamiltonian and
/// skew-Hamiltonian paths.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CouplingInvariants {
    pub eps_r: f64,
    pub eps_g: f64,
    pub bvec: [f64; 3],
}

/// Extract (ε_r, ε_g, b⃗) from the skew-Hamiltonian components of `H²`:
/// `ε_g = Tr(γ₁₀ᵀH²)/8`, `ε_r = Tr(γ₁₄ᵀH²)/8`, `bᵢ = Tr(γ₁₀₊ᵢᵀH²)/8`.
pub fn coupling_from_square(h: &PhaseMatrix) -> Result<CouplingInvariants> {
    if h.dim() != 4 {
        return Err(Error::DimensionMismatch(h.dim(), 4));
    }
    let basis = dirac_basis();
    let h2 = h.mul(h);
    let c = |k: usize| basis.gamma(k).dot(&h2) / 8.0;
    Ok(CouplingInvariants {
        eps_r: c(14),
        eps_g: c(10),
        bvec: [c(11), c(12), c(13)],
    })
}

/// Steering data of a skew-Hamiltonian matrix, read from its own
/// coefficients: ε_g = c₁₀, b⃗ = (c₁₁, c₁₂, c₁₃), ε_r = c₁₄.
pub fn coupling_of_skew(c: &PhaseMatrix) -> Result<CouplingInvariants> {
    let coeffs = decompose4(c)?;
    Ok(CouplingInvariants {
        eps_r: coeffs.m[14],
        eps_g: coeffs.m[10],
        bvec: [coeffs.m[11], coeffs.m[12], coeffs.m[13]],
    })
}

/// Predicted `(ε̃_r, ε̃_g, ε̃_b)` after `R_k(τ)·H·R_k(τ)⁻¹`, per the
/// closed-form transformation rules of the auxiliary scalar products. Only
/// γ₀ and the six boosts change them; spatial rotations leave all three
/// invariant. The ε̃_b rule under γ₀ needs `(P⃗²−E⃗²)/2`, which is why the
/// prediction takes the full EM form rather than the invariants alone.
pub fn transform_table_eps(k: GeneratorId, tau: f64, em: &EMForm) -> Result<[f64; 3]> {
    if k.index() > 6 {
        return Err(Error::BadGenerator(k.index()));
    }
    let aux = AuxInvariants::from_em(em);
    let (er, eg, eb) = (aux.eps_r, aux.eps_g, aux.eps_b);
    Ok(match k.index() {
        0 => {
            let (c, s) = (tau.cos(), tau.sin());
            let (c2, s2) = ((2.0 * tau).cos(), (2.0 * tau).sin());
            let p2me2 = (dot3(em.pvec, em.pvec) - dot3(em.evec, em.evec)) / 2.0;
            [er * c + eg * s, eg * c - er * s, eb * c2 + p2me2 * s2]
        }
        i @ 1..=3 => {
            let (ch, sh) = (tau.cosh(), tau.sinh());
            let ax = i - 1;
            [er * ch - aux.bvec[ax] * sh, eg, eb * ch - aux.rvec[ax] * sh]
        }
        i => {
            let (ch, sh) = (tau.cosh(), tau.sinh());
            let ax = i - 4;
            [er, eg * ch + aux.bvec[ax] * sh, eb * ch + aux.gvec[ax] * sh]
        }
    })
}

/// Which of the two four-step variants to run. They differ in which ε the
/// γ₀-rotation zeroes first and along which axis the closing boost acts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Strategy {
    #[default]
    One,
    Two,
}

impl Strategy {
    pub fn number(self) -> u8 {
        match self {
            Strategy::One => 1,
            Strategy::Two => 2,
        }
    }

    pub fn from_number(n: u8) -> Option<Self> {
        match n {
            1 => Some(Strategy::One),
            2 => Some(Strategy::Two),
            _ => None,
        }
    }
}

/// Structure class of the input, fixing how steering data is extracted.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StructureClass {
    Hamiltonian,
    SkewHamiltonian,
}

/// Outcome of a 4×4 block-diagonalization.
#[derive(Debug, Clone)]
pub struct DecoupleReport {
    /// Accumulated transform `T` with `T·input·T⁻¹ = result`.
    pub transform: SymplecticTransform,
    /// The 2×2 block-diagonal result.
    pub result: PhaseMatrix,
    pub strategy: Strategy,
    /// Number of four-step passes executed (0 when already block-diagonal).
    pub passes: usize,
    /// Final max |entry| of the off-diagonal 2×2 coupling blocks.
    pub residual: f64,
}

/// Max |entry| of the off-diagonal 2×2 blocks of a 4×4 matrix.
pub fn coupling_residual(h: &PhaseMatrix) -> f64 {
    let mut m = 0.0f64;
    for i in 0..2 {
        for j in 2..4 {
            m = m.max(h.get(i, j).abs()).max(h.get(j, i).abs());
        }
    }
    m
}

/// Block-diagonalize a 4×4 Hamiltonian (or skew-Hamiltonian) matrix with the
/// default residual tolerance.
pub fn decouple4(h: &PhaseMatrix, strategy: Strategy) -> Result<DecoupleReport> {
    decouple4_with_tol(h, strategy, RESIDUAL_TOL)
}

/// As [`decouple4`] with an explicit residual tolerance; the 2n×2n driver
/// passes a tolerance scaled to the norm of the full matrix.
pub fn decouple4_with_tol(h: &PhaseMatrix, strategy: Strategy, tol: f64) -> Result<DecoupleReport> {
    if h.dim() != 4 {
        return Err(Error::DimensionMismatch(h.dim(), 4));
    }
    let ham = hamiltonian_defect(h);
    let class = if ham <= crate::symplectic::STRUCT_TOL {
        StructureClass::Hamiltonian
    } else {
        let skew = skew_hamiltonian_defect(h);
        if skew <= crate::symplectic::STRUCT_TOL {
            StructureClass::SkewHamiltonian
        } else {
            return Err(Error::NotStructured { ham, skew });
        }
    };
    decouple4_classified(h, strategy, tol, class)
}

pub(crate) fn decouple4_classified(
    h: &PhaseMatrix,
    strategy: Strategy,
    tol: f64,
    class: StructureClass,
) -> Result<DecoupleReport> {
    let mut work = h.clone();
    let mut transform = SymplecticTransform::identity(4);
    let mut passes = 0usize;

    let coupling = |m: &PhaseMatrix| -> Result<CouplingInvariants> {
        match class {
            StructureClass::Hamiltonian => {
                let em = em_form_lenient(m)?;
                let aux = AuxInvariants::from_em(&em);
                Ok(CouplingInvariants { eps_r: aux.eps_r, eps_g: aux.eps_g, bvec: aux.bvec })
            }
            StructureClass::SkewHamiltonian => coupling_of_skew(m),
        }
    };

    loop {
        let residual = coupling_residual(&work);
        if residual <= tol {
            return Ok(DecoupleReport { transform, result: work, strategy, passes, residual });
        }
        if passes >= PASS_LIMIT {
            return Err(Error::NoConvergence { steps: passes, residual });
        }
        passes += 1;

        let mut inv = coupling(&work)?;

        // Step 1: γ₀-rotation zeroing ε_r (strategy 1) or ε_g (strategy 2).
        let tau1 = match strategy {
            Strategy::One => step_angle(-inv.eps_r, inv.eps_g),
            Strategy::Two => step_angle(inv.eps_g, inv.eps_r),
        };
        if tau1 != 0.0 {
            apply_step(&mut work, &mut transform, 0, tau1)?;
            inv = coupling(&work)?;
        }

        // Steps 2 and 3: spatial rotations aligning b⃗ with ŷ. Skipped when
        // b⃗ vanishes; the residual test then decides on the next pass.
        let bnorm = dot3(inv.bvec, inv.bvec).sqrt();
        if bnorm >= SKIP_TOL {
            let tau2 = step_angle(-inv.bvec[0], inv.bvec[1]);
            if tau2 != 0.0 {
                apply_step(&mut work, &mut transform, 9, tau2)?;
                inv = coupling(&work)?;
            }
            let tau3 = step_angle(inv.bvec[2], inv.bvec[1]);
            if tau3 != 0.0 {
                apply_step(&mut work, &mut transform, 7, tau3)?;
                inv = coupling(&work)?;
            }
        } else if class == StructureClass::Hamiltonian
            && inv.eps_r.abs() < SKIP_TOL
            && inv.eps_g.abs() < SKIP_TOL
        {
            // Degenerate steering (equal frequencies): ε_r, ε_g and b⃗ all
            // vanish while coupling remains, so the scalar products give the
            // spatial rotations nothing to aim at. The coupling is still
            // removable: with b⃗ = 0 the field vectors obey E⃗·B⃗ = B⃗·P⃗ = 0
            // and E⃗×P⃗ = −𝓔B⃗, so aligning B⃗ itself with ŷ (or, for
            // B⃗ = 0, rotating the y-component out of the then-parallel
            // P⃗/E⃗ pair) zeroes all four coupling coefficients.
            let em = em_form_lenient(&work)?;
            if dot3(em.bvec, em.bvec).sqrt() >= SKIP_TOL {
                let tau2 = step_angle(-em.bvec[0], em.bvec[1]);
                if tau2 != 0.0 {
                    apply_step(&mut work, &mut transform, 9, tau2)?;
                }
                let em = em_form_lenient(&work)?;
                let tau3 = step_angle(em.bvec[2], em.bvec[1]);
                if tau3 != 0.0 {
                    apply_step(&mut work, &mut transform, 7, tau3)?;
                }
            } else {
                let refvec = if dot3(em.pvec, em.pvec).sqrt() >= SKIP_TOL {
                    em.pvec
                } else {
                    em.evec
                };
                let tau2 = step_angle(refvec[1], refvec[0]);
                if tau2 != 0.0 {
                    apply_step(&mut work, &mut transform, 9, tau2)?;
                }
            }
            inv = coupling(&work)?;
        }

        // Step 4: boost zeroing the surviving ε. Feasible only while
        // |ε/b_y| < 1; otherwise the eigenvalues are complex off-axis.
        let target = match strategy {
            Strategy::One => inv.eps_g,
            Strategy::Two => inv.eps_r,
        };
        if target.abs() >= SKIP_TOL {
            let by = inv.bvec[1];
            if target.abs() >= by.abs() {
                return Err(Error::ComplexEigenvalues);
            }
            let ratio = target / by;
            let (gen, tau4) = match strategy {
                Strategy::One => (5, -ratio.atanh()),
                Strategy::Two => (2, ratio.atanh()),
            };
            apply_step(&mut work, &mut transform, gen, tau4)?;
        }
    }
}

/// EM form extraction that tolerates the rounding-level skew-Hamiltonian
/// coefficients accumulated by repeated transforms.
fn em_form_lenient(h: &PhaseMatrix) -> Result<EMForm> {
    let coeffs = decompose4(h)?;
    let defect = coeffs.max_skew_hamiltonian();
    if defect > 1e-8 * h.max_abs().max(1.0) {
        return Err(Error::NotHamiltonian { defect });
    }
    Ok(EMForm {
        energy: coeffs.m[0],
        pvec: [coeffs.m[1], coeffs.m[2], coeffs.m[3]],
        evec: [coeffs.m[4], coeffs.m[5], coeffs.m[6]],
        bvec: [coeffs.m[7], coeffs.m[8], coeffs.m[9]],
    })
}

/// Two-argument arctan with the 0/0 case mapped to "skip".
fn step_angle(y: f64, x: f64) -> f64 {
    if y.abs() < SKIP_TOL && x.abs() < SKIP_TOL {
        0.0
    } else {
        y.atan2(x)
    }
}

fn apply_step(
    work: &mut PhaseMatrix,
    transform: &mut SymplecticTransform,
    generator: usize,
    tau: f64,
) -> Result<()> {
    let step = generator_exp(GeneratorId::new(generator)?, tau)?;
    *work = step.apply(work);
    *transform = transform.then(&step);
    Ok(())
}
