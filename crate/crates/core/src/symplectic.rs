//! Structural predicates and elementary symplectic transformations.
//!
//! The ten Hamiltonian Dirac matrices γ₀…γ₉ generate one-parameter subgroups
//! of Sp(4) with closed-form exponentials: skew-symmetric generators
//! (γ₀, γ₇, γ₈, γ₉) square to −1 and give rotation-like transforms
//! `cos(τ/2) + sin(τ/2)γ`, symmetric ones (γ₁…γ₆) square to +1 and give
//! boost-like transforms with cosh/sinh. Inverses are tracked alongside the
//! forward matrices as negated-argument products; they are never obtained by
//! numerical inversion, so `M·M⁻¹ = 1` holds to rounding for arbitrarily long
//! generator words.

use crate::clifford::dirac_basis;
use crate::matrix::PhaseMatrix;
use crate::{Error, Result};

/// Default absolute tolerance for the structure predicates. Looser than the
/// classification tolerance because predicate inputs are typically products
/// of many transforms.
pub const STRUCT_TOL: f64 = 1e-10;

/// Boost arguments beyond this cap would overflow cosh towards 1e21 and are
/// rejected.
pub const BOOST_ARG_CAP: f64 = 50.0;

/// Max-norm defect of the Hamiltonian condition `Hᵀ = γ₀Hγ₀`.
pub fn hamiltonian_defect(h: &PhaseMatrix) -> f64 {
    let g0 = PhaseMatrix::symplectic_unit(h.dim());
    h.transpose().max_abs_diff(&g0.mul(h).mul(&g0))
}

/// Max-norm defect of the skew-Hamiltonian condition `Cᵀ = −γ₀Cγ₀`.
pub fn skew_hamiltonian_defect(c: &PhaseMatrix) -> f64 {
    let g0 = PhaseMatrix::symplectic_unit(c.dim());
    c.transpose().max_abs_diff(&g0.mul(c).mul(&g0).scale(-1.0))
}

/// Max-norm defect of the symplectic condition `Mγ₀Mᵀ = γ₀`.
pub fn symplectic_defect(m: &PhaseMatrix) -> f64 {
    let g0 = PhaseMatrix::symplectic_unit(m.dim());
    m.mul(&g0).mul(&m.transpose()).max_abs_diff(&g0)
}

/// `Hᵀ = γ₀Hγ₀` within [`STRUCT_TOL`]; the generator property of linear
/// Hamiltonian flows.
pub fn is_hamiltonian(h: &PhaseMatrix) -> bool {
    hamiltonian_defect(h) <= STRUCT_TOL
}

/// `Cᵀ = −γ₀Cγ₀` within [`STRUCT_TOL`]; e.g. any even power of a Hamiltonian
/// matrix.
pub fn is_skew_hamiltonian(c: &PhaseMatrix) -> bool {
    skew_hamiltonian_defect(c) <= STRUCT_TOL
}

/// `Mγ₀Mᵀ = γ₀` within [`STRUCT_TOL`]; linear canonical transformations.
pub fn is_symplectic(m: &PhaseMatrix) -> bool {
    symplectic_defect(m) <= STRUCT_TOL
}

/// The symplectic inverse `M⁻¹ = −γ₀Mᵀγ₀`, valid for symplectic `M`.
pub fn symplectic_inverse(m: &PhaseMatrix) -> Result<PhaseMatrix> {
    let defect = symplectic_defect(m);
    if defect > STRUCT_TOL {
        return Err(Error::NotSymplectic { defect });
    }
    let g0 = PhaseMatrix::symplectic_unit(m.dim());
    Ok(g0.mul(&m.transpose()).mul(&g0).scale(-1.0))
}

/// Projection onto the Hamiltonian subspace: `½(M + γ₀Mᵀγ₀)`.
///
/// For `M = exp(Hτ)` this keeps exactly the odd Taylor terms, so the result
/// shares the block structure (and decoupling transforms) of `H`.
pub fn hamiltonian_part(m: &PhaseMatrix) -> PhaseMatrix {
    let g0 = PhaseMatrix::symplectic_unit(m.dim());
    m.add(&g0.mul(&m.transpose()).mul(&g0)).scale(0.5)
}

/// Whether a generator squares to −1 (rotation-like, compact) or +1
/// (boost-like, non-compact).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GeneratorKind {
    RotationLike,
    BoostLike,
}

/// One of the ten symplectic generators γ₀…γ₉.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct GeneratorId(usize);

impl GeneratorId {
    pub fn new(k: usize) -> Result<Self> {
        if k <= 9 {
            Ok(Self(k))
        } else {
            Err(Error::BadGenerator(k))
        }
    }

    #[inline]
    pub fn index(self) -> usize {
        self.0
    }

    pub fn kind(self) -> GeneratorKind {
        match self.0 {
            0 | 7 | 8 | 9 => GeneratorKind::RotationLike,
            _ => GeneratorKind::BoostLike,
        }
    }
}

/// A symplectic matrix paired with its exactly-tracked inverse.
#[derive(Debug, Clone, PartialEq)]
pub struct SymplecticTransform {
    matrix: PhaseMatrix,
    inverse: PhaseMatrix,
}

impl SymplecticTransform {
    pub fn identity(dim: usize) -> Self {
        Self { matrix: PhaseMatrix::identity(dim), inverse: PhaseMatrix::identity(dim) }
    }

    /// Pair a forward matrix with a known inverse. Caller is responsible for
    /// the two actually being inverses; used internally and by tests.
    pub fn from_parts(matrix: PhaseMatrix, inverse: PhaseMatrix) -> Self {
        debug_assert_eq!(matrix.dim(), inverse.dim());
        Self { matrix, inverse }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.matrix.dim()
    }

    pub fn matrix(&self) -> &PhaseMatrix {
        &self.matrix
    }

    pub fn inverse_matrix(&self) -> &PhaseMatrix {
        &self.inverse
    }

    /// The inverse transform (swap of the tracked pair).
    pub fn inverted(&self) -> Self {
        Self { matrix: self.inverse.clone(), inverse: self.matrix.clone() }
    }

    /// Composition `next ∘ self`: applying the result equals applying `self`
    /// first, then `next`.
    pub fn then(&self, next: &Self) -> Self {
        Self {
            matrix: next.matrix.mul(&self.matrix),
            inverse: self.inverse.mul(&next.inverse),
        }
    }

    /// Similarity action `M·H·M⁻¹` on an operator-like matrix.
    pub fn apply(&self, h: &PhaseMatrix) -> PhaseMatrix {
        self.matrix.mul(h).mul(&self.inverse)
    }

    /// Inverse similarity action `M⁻¹·H·M`.
    pub fn apply_inverse(&self, h: &PhaseMatrix) -> PhaseMatrix {
        self.inverse.mul(h).mul(&self.matrix)
    }

    /// Congruence action `M·Σ·Mᵀ` on a covariance-like matrix.
    pub fn apply_congruence(&self, sigma: &PhaseMatrix) -> PhaseMatrix {
        self.matrix.mul(sigma).mul(&self.matrix.transpose())
    }

    /// Embed a 4×4 transform at canonical pairs `(i, k)` of a larger space.
    pub fn embed_pairs(&self, i: usize, k: usize, dim: usize) -> Result<Self> {
        if self.dim() != 4 {
            return Err(Error::DimensionMismatch(self.dim(), 4));
        }
        check_embedding(i, k, dim)?;
        Ok(Self {
            matrix: PhaseMatrix::embed_pairs(&self.matrix, i, k, dim),
            inverse: PhaseMatrix::embed_pairs(&self.inverse, i, k, dim),
        })
    }
}

fn check_embedding(i: usize, k: usize, dim: usize) -> Result<()> {
    if i >= k || 2 * k + 1 >= dim {
        return Err(Error::BadEmbedding(i, k));
    }
    Ok(())
}

/// The elementary transform `Rₖ(τ) = exp(γₖ τ/2)` in closed form:
/// `cos(τ/2) + sin(τ/2)γₖ` for rotation-like k, `cosh(τ/2) + sinh(τ/2)γₖ`
/// for boost-like k. The inverse is the same form at `−τ`.
pub fn generator_exp(k: GeneratorId, tau: f64) -> Result<SymplecticTransform> {
    if !tau.is_finite() {
        return Err(Error::NonFiniteEntry);
    }
    if k.kind() == GeneratorKind::BoostLike && tau.abs() > BOOST_ARG_CAP {
        return Err(Error::HyperbolicOverflow(tau, BOOST_ARG_CAP));
    }
    let gamma = dirac_basis().gamma(k.index());
    let id = PhaseMatrix::identity(4);
    let (c, s) = match k.kind() {
        GeneratorKind::RotationLike => ((tau / 2.0).cos(), (tau / 2.0).sin()),
        GeneratorKind::BoostLike => ((tau / 2.0).cosh(), (tau / 2.0).sinh()),
    };
    Ok(SymplecticTransform::from_parts(
        id.scale(c).add(&gamma.scale(s)),
        id.scale(c).add(&gamma.scale(-s)),
    ))
}

/// `Rₖ(τ)` acting on canonical pairs `(i, k)` of a `dim`-dimensional space,
/// identity elsewhere.
pub fn generator_exp_embedded(
    k: GeneratorId,
    tau: f64,
    pair: (usize, usize),
    dim: usize,
) -> Result<SymplecticTransform> {
    check_embedding(pair.0, pair.1, dim)?;
    generator_exp(k, tau)?.embed_pairs(pair.0, pair.1, dim)
}

/// Similarity transform `M·H·M⁻¹` with dimension checking.
pub fn similarity(t: &SymplecticTransform, h: &PhaseMatrix) -> Result<PhaseMatrix> {
    if t.dim() != h.dim() {
        return Err(Error::DimensionMismatch(t.dim(), h.dim()));
    }
    Ok(t.apply(h))
}
