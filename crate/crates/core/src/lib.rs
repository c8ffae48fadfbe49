//! Structure-preserving linear algebra for Hamiltonian phase spaces.
//!
//! A real matrix `H` is *Hamiltonian* when `Hᵀ = γ₀ H γ₀`, where `γ₀` is the
//! symplectic unit matrix; it is *skew-Hamiltonian* when `Cᵀ = −γ₀ C γ₀`, and
//! a transformation `M` is *symplectic* when `M γ₀ Mᵀ = γ₀`. This crate
//! block-diagonalizes such matrices by successive elementary symplectic
//! transformations, in the spirit of Jacobi's eigenvalue method: the ten
//! generators of `Sp(4)` are taken from the real Dirac algebra Cl(3,1), whose
//! rotation-like and boost-like one-parameter groups have closed-form
//! exponentials. Everything downstream — eigenvalues, 2×2 normal forms,
//! matrix exponentials and logarithms, matched second-moment (covariance)
//! matrices — is read off the decoupled form.
//!
//! The main entry points are [`jacobi::jacobi_decouple`] for the iterative
//! 2n×2n driver, [`decouple4::decouple4`] for a single 4×4 problem,
//! [`spectrum`] for eigenvalues / exp / log, and [`beams`] for second-moment
//! machinery.

pub mod beams;
pub mod clifford;
pub mod decouple4;
mod error;
pub mod jacobi;
pub mod matrix;
pub mod selftest;
pub mod spectrum;
pub mod symplectic;

#[cfg(test)]
pub(crate) mod testutil;

pub use error::Error;
pub use matrix::PhaseMatrix;

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;
