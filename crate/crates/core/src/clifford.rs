//! Real Pauli (2×2) and real Dirac (4×4) matrix bases.
//!
//! The three real Pauli matrices η₀, η₁, η₂ represent Cl(1,1): they mutually
//! anti-commute, η₀² = −1, η₁² = η₂² = +1, and together with η₃ = 1 they span
//! all real 2×2 matrices. Their Kronecker products generate the sixteen real
//! Dirac matrices γ₀…γ₁₅ representing Cl(3,1), every one of which is either
//! symmetric or skew-symmetric and either Hamiltonian (γ₀…γ₉) or
//! skew-Hamiltonian (γ₁₀…γ₁₅). Trace orthogonality `Tr(γⱼᵀγₖ) = 4δⱼₖ` makes
//! coefficient extraction a plain projection.

use std::sync::OnceLock;

use crate::matrix::PhaseMatrix;
use crate::{Error, Result};

pub use crate::matrix::kronecker;

/// Absolute max-norm tolerance for structural "is zero" classification.
/// Inputs handled here are O(1); zeroness is structural, not approximate.
pub const CLASSIFY_TOL: f64 = 1e-12;

/// The real 2×2 Pauli matrices plus the identity η₃.
#[derive(Debug, Clone)]
pub struct PauliBasis {
    /// Skew-symmetric, squares to −1; the 2×2 symplectic unit.
    pub eta0: PhaseMatrix,
    /// Symmetric, squares to +1.
    pub eta1: PhaseMatrix,
    /// Symmetric, squares to +1; η₂ = η₀η₁.
    pub eta2: PhaseMatrix,
    /// Identity.
    pub eta3: PhaseMatrix,
}

impl PauliBasis {
    fn build() -> Self {
        let eta0 = PhaseMatrix::from_rows(&[vec![0., 1.], vec![-1., 0.]]).unwrap();
        let eta1 = PhaseMatrix::from_rows(&[vec![0., 1.], vec![1., 0.]]).unwrap();
        let eta2 = eta0.mul(&eta1);
        let eta3 = PhaseMatrix::identity(2);
        Self { eta0, eta1, eta2, eta3 }
    }

    /// Coefficients `(h₀, h₁, h₂, h₃)` of a 2×2 matrix in the η-basis,
    /// `hₖ = Tr(ηₖᵀ M)/2`.
    pub fn decompose(&self, m: &PhaseMatrix) -> [f64; 4] {
        assert_eq!(m.dim(), 2);
        [
            self.eta0.dot(m) / 2.0,
            self.eta1.dot(m) / 2.0,
            self.eta2.dot(m) / 2.0,
            self.eta3.dot(m) / 2.0,
        ]
    }

    /// `h₀η₀ + h₁η₁ + h₂η₂` (the general 2×2 Hamiltonian matrix).
    pub fn assemble(&self, h: [f64; 3]) -> PhaseMatrix {
        self.eta0.scale(h[0]).add(&self.eta1.scale(h[1])).add(&self.eta2.scale(h[2]))
    }
}

/// Shared immutable Pauli basis.
pub fn pauli_basis() -> &'static PauliBasis {
    static BASIS: OnceLock<PauliBasis> = OnceLock::new();
    BASIS.get_or_init(PauliBasis::build)
}

/// The sixteen real Dirac matrices with their classification.
///
/// Ordering: γ₀ is the symplectic unit; γ₁, γ₂, γ₃ the symmetric basis
/// vectors; γ₄ = γ₀γ₁, γ₅ = γ₀γ₂, γ₆ = γ₀γ₃ the symmetric bi-vectors;
/// γ₇ = γ₂γ₃, γ₈ = γ₃γ₁, γ₉ = γ₁γ₂ the skew-symmetric bi-vectors;
/// γ₁₀ = γ₁₄γ₀, …, γ₁₃ = γ₁₄γ₃ the 3-vectors; γ₁₄ = γ₀γ₁γ₂γ₃ the
/// pseudo-scalar; γ₁₅ = 1.
#[derive(Debug, Clone)]
pub struct DiracBasis {
    gammas: [PhaseMatrix; 16],
    signature: [i32; 16],
    symmetric: [bool; 16],
    hamiltonian: [bool; 16],
}

/// Construct the basis from the explicit γ₀…γ₃ representation; all other
/// elements are formed by exact products, so every entry is exactly 0 or ±1.
pub fn build_dirac_basis() -> DiracBasis {
    let g0 = PhaseMatrix::from_rows(&[
        vec![0., 1., 0., 0.],
        vec![-1., 0., 0., 0.],
        vec![0., 0., 0., 1.],
        vec![0., 0., -1., 0.],
    ])
    .unwrap();
    let g1 = PhaseMatrix::from_rows(&[
        vec![0., -1., 0., 0.],
        vec![-1., 0., 0., 0.],
        vec![0., 0., 0., 1.],
        vec![0., 0., 1., 0.],
    ])
    .unwrap();
    let g2 = PhaseMatrix::from_rows(&[
        vec![0., 0., 0., 1.],
        vec![0., 0., 1., 0.],
        vec![0., 1., 0., 0.],
        vec![1., 0., 0., 0.],
    ])
    .unwrap();
    let g3 = PhaseMatrix::from_rows(&[
        vec![-1., 0., 0., 0.],
        vec![0., 1., 0., 0.],
        vec![0., 0., -1., 0.],
        vec![0., 0., 0., 1.],
    ])
    .unwrap();

    let g4 = g0.mul(&g1);
    let g5 = g0.mul(&g2);
    let g6 = g0.mul(&g3);
    let g7 = g2.mul(&g3);
    let g8 = g3.mul(&g1);
    let g9 = g1.mul(&g2);
    let g14 = g0.mul(&g1).mul(&g2).mul(&g3);
    let g10 = g14.mul(&g0);
    let g11 = g14.mul(&g1);
    let g12 = g14.mul(&g2);
    let g13 = g14.mul(&g3);
    let g15 = PhaseMatrix::identity(4);

    let gammas = [g0, g1, g2, g3, g4, g5, g6, g7, g8, g9, g10, g11, g12, g13, g14, g15];

    let mut signature = [0i32; 16];
    let mut symmetric = [false; 16];
    let mut hamiltonian = [false; 16];
    let sum = &gammas[0];
    for (k, gk) in gammas.iter().enumerate() {
        let sq = gk.mul(gk);
        let id = PhaseMatrix::identity(4);
        signature[k] = if sq.max_abs_diff(&id) < CLASSIFY_TOL {
            1
        } else {
            debug_assert!(sq.max_abs_diff(&id.scale(-1.0)) < CLASSIFY_TOL);
            -1
        };
        symmetric[k] = gk.is_symmetric(CLASSIFY_TOL);
        // Hamiltonian predicate γₖᵀ = γ₀γₖγ₀ at the 4×4 level.
        hamiltonian[k] = gk.transpose().max_abs_diff(&sum.mul(gk).mul(sum)) < CLASSIFY_TOL;
    }

    DiracBasis { gammas, signature, symmetric, hamiltonian }
}

/// Shared immutable Dirac basis, built once.
pub fn dirac_basis() -> &'static DiracBasis {
    static BASIS: OnceLock<DiracBasis> = OnceLock::new();
    BASIS.get_or_init(build_dirac_basis)
}

impl DiracBasis {
    pub fn gamma(&self, k: usize) -> &PhaseMatrix {
        &self.gammas[k]
    }

    /// Sign of γₖ²: +1 or −1.
    pub fn signature(&self, k: usize) -> i32 {
        self.signature[k]
    }

    pub fn is_symmetric(&self, k: usize) -> bool {
        self.symmetric[k]
    }

    pub fn is_hamiltonian(&self, k: usize) -> bool {
        self.hamiltonian[k]
    }

    /// Copy of the basis with element `k` replaced, classification flags
    /// kept as-is. Meant for fault injection in verification harnesses; a
    /// doctored element makes the affected selftest cells fail loudly.
    pub fn with_gamma(&self, k: usize, gamma: PhaseMatrix) -> Self {
        assert_eq!(gamma.dim(), 4);
        let mut out = self.clone();
        out.gammas[k] = gamma;
        out
    }

    /// Assemble `Σ cₖ γₖ` from up to sixteen coefficients.
    pub fn assemble(&self, coeffs: &[f64]) -> PhaseMatrix {
        assert!(coeffs.len() <= 16);
        let mut out = PhaseMatrix::zeros(4);
        for (k, &c) in coeffs.iter().enumerate() {
            if c != 0.0 {
                out = out.add(&self.gammas[k].scale(c));
            }
        }
        out
    }
}

/// The sixteen coefficients of a real 4×4 matrix in the γ-basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DiracCoefficients {
    pub m: [f64; 16],
}

impl DiracCoefficients {
    /// `Σₖ m[k] γₖ`; reproduces the decomposed matrix to a few ulps.
    pub fn reconstruct(&self) -> PhaseMatrix {
        dirac_basis().assemble(&self.m)
    }

    /// Largest skew-Hamiltonian coefficient `m₁₀…m₁₅` by magnitude.
    pub fn max_skew_hamiltonian(&self) -> f64 {
        self.m[10..16].iter().fold(0.0f64, |acc, x| acc.max(x.abs()))
    }
}

/// Project a 4×4 matrix onto the γ-basis: `mₖ = Tr(γₖᵀ M)/4`.
pub fn decompose4(m: &PhaseMatrix) -> Result<DiracCoefficients> {
    if m.dim() != 4 {
        return Err(Error::DimensionMismatch(m.dim(), 4));
    }
    let basis = dirac_basis();
    let mut out = [0.0; 16];
    for (k, slot) in out.iter_mut().enumerate() {
        *slot = basis.gammas[k].dot(m) / 4.0;
    }
    Ok(DiracCoefficients { m: out })
}

/// The ten Hamiltonian coefficients grouped by transformation behavior:
/// a scalar `𝓔`, the vector `P⃗` (γ₁…γ₃), and the electric / magnetic
/// bi-vector triples `E⃗` (γ₄…γ₆) and `B⃗` (γ₇…γ₉).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EMForm {
    pub energy: f64,
    pub pvec: [f64; 3],
    pub evec: [f64; 3],
    pub bvec: [f64; 3],
}

impl EMForm {
    pub fn new(energy: f64, pvec: [f64; 3], evec: [f64; 3], bvec: [f64; 3]) -> Self {
        Self { energy, pvec, evec, bvec }
    }

    /// `𝓔γ₀ + P⃗·γ⃗ + E⃗·(γ₄,γ₅,γ₆) + B⃗·(γ₇,γ₈,γ₉)`.
    pub fn assemble(&self) -> PhaseMatrix {
        let mut c = [0.0; 10];
        c[0] = self.energy;
        c[1..4].copy_from_slice(&self.pvec);
        c[4..7].copy_from_slice(&self.evec);
        c[7..10].copy_from_slice(&self.bvec);
        dirac_basis().assemble(&c)
    }

    /// The four coefficients coupling the two canonical pairs. The 4×4
    /// matrix is 2×2 block-diagonal exactly when all of them vanish.
    pub fn coupling(&self) -> [f64; 4] {
        [self.pvec[1], self.evec[1], self.bvec[0], self.bvec[2]]
    }

    pub fn max_coupling(&self) -> f64 {
        self.coupling().iter().fold(0.0f64, |m, c| m.max(c.abs()))
    }
}

/// Extract the EM form of a 4×4 Hamiltonian matrix.
///
/// Fails with `NotHamiltonian` when any skew-Hamiltonian coefficient
/// (including the trace part m₁₅) exceeds [`CLASSIFY_TOL`].
pub fn em_form(h: &PhaseMatrix) -> Result<EMForm> {
    let coeffs = decompose4(h)?;
    let defect = coeffs.max_skew_hamiltonian();
    if defect > CLASSIFY_TOL {
        return Err(Error::NotHamiltonian { defect });
    }
    Ok(EMForm {
        energy: coeffs.m[0],
        pvec: [coeffs.m[1], coeffs.m[2], coeffs.m[3]],
        evec: [coeffs.m[4], coeffs.m[5], coeffs.m[6]],
        bvec: [coeffs.m[7], coeffs.m[8], coeffs.m[9]],
    })
}

pub(crate) fn dot3(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

pub(crate) fn cross3(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [
        a[1] * b[2] - a[2] * b[1],
        a[2] * b[0] - a[0] * b[2],
        a[0] * b[1] - a[1] * b[0],
    ]
}
