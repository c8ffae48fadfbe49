use thiserror::Error;

/// Errors shared by all modules of the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Phase-space matrices act on canonical pairs and must have even dimension.
    #[error("matrix dimension {0} is odd; phase-space matrices have even dimension")]
    DimensionOdd(usize),

    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),

    /// Pair selection needs at least two canonical pairs.
    #[error("dimension {0} too small: need at least two canonical pairs")]
    DimensionTooSmall(usize),

    #[error("matrix contains a non-finite entry")]
    NonFiniteEntry,

    #[error("matrix is not Hamiltonian (defect {defect:.3e})")]
    NotHamiltonian { defect: f64 },

    #[error("matrix is neither Hamiltonian nor skew-Hamiltonian (defects {ham:.3e} / {skew:.3e})")]
    NotStructured { ham: f64, skew: f64 },

    #[error("matrix is not symplectic (defect {defect:.3e})")]
    NotSymplectic { defect: f64 },

    #[error("generator index {0} outside 0..=9")]
    BadGenerator(usize),

    #[error("bad pair embedding ({0}, {1}): indices must be distinct, ordered and in range")]
    BadEmbedding(usize, usize),

    /// Guard against cosh/sinh overflow for extreme boost arguments.
    #[error("boost argument {0:.3e} exceeds the cap of {1}")]
    HyperbolicOverflow(f64, f64),

    /// The spectrum leaves the real and imaginary axes; symplectic
    /// block-diagonalization is impossible for such matrices.
    #[error("complex off-axis eigenvalues: symplectic block-diagonalization is impossible")]
    ComplexEigenvalues,

    #[error("no convergence after {steps} steps (residual {residual:.3e})")]
    NoConvergence { steps: usize, residual: f64 },

    /// Requested the oscillator normal form of a block that is not elliptic.
    #[error("2x2 block is not elliptic (radicand {0:.3e})")]
    HyperbolicBlock(f64),

    /// An elliptic block with rotation angle at π has no unambiguous logarithm.
    #[error("logarithm branch point: elliptic rotation angle at pi")]
    LogBranch,

    /// A hyperbolic mode admits no bounded matched distribution.
    #[error("unstable lattice: hyperbolic mode has no bounded matched distribution")]
    UnstableLattice,

    #[error("emittances must be finite and strictly positive")]
    NonPositiveEmittance,
}
