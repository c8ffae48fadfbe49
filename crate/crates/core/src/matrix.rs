//! Dense square matrices of even dimension — the universal carrier for
//! Hamiltonian, skew-Hamiltonian, symplectic and covariance matrices.
//!
//! Storage is row-major `Vec<f64>`. Dimensions in this crate are tiny
//! (4×4-dominated, 2n×2n with n ≲ 10), so all products are plain triple
//! loops; no attempt is made at blocking or SIMD.

use crate::{Error, Result};

/// Dense square real matrix of even dimension `2n`.
#[derive(Debug, Clone, PartialEq)]
pub struct PhaseMatrix {
    dim: usize,
    data: Vec<f64>,
}

impl PhaseMatrix {
    /// Validating constructor: `dim` must be even and positive, `data` of
    /// length `dim²` with finite entries.
    pub fn new(dim: usize, data: Vec<f64>) -> Result<Self> {
        if dim == 0 || !dim.is_multiple_of(2) {
            return Err(Error::DimensionOdd(dim));
        }
        if data.len() != dim * dim {
            return Err(Error::DimensionMismatch(data.len(), dim * dim));
        }
        if !data.iter().all(|x| x.is_finite()) {
            return Err(Error::NonFiniteEntry);
        }
        Ok(Self { dim, data })
    }

    /// Build from nested rows; rows must all have the same even length.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let dim = rows.len();
        for row in rows {
            if row.len() != dim {
                return Err(Error::DimensionMismatch(row.len(), dim));
            }
        }
        Self::new(dim, rows.concat())
    }

    pub fn zeros(dim: usize) -> Self {
        assert!(dim > 0 && dim.is_multiple_of(2), "internal: dimension must be even");
        Self { dim, data: vec![0.0; dim * dim] }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.data[i * dim + i] = 1.0;
        }
        m
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            for j in 0..dim {
                m.data[i * dim + j] = f(i, j);
            }
        }
        m
    }

    /// The symplectic unit matrix `γ₀ = 1ₙ ⊗ η₀` in canonical-pair ordering
    /// `ψ = (q₁, p₁, q₂, p₂, …)`.
    pub fn symplectic_unit(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for k in 0..dim / 2 {
            m.data[(2 * k) * dim + 2 * k + 1] = 1.0;
            m.data[(2 * k + 1) * dim + 2 * k] = -1.0;
        }
        m
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of canonical pairs `n = dim/2`.
    #[inline]
    pub fn pairs(&self) -> usize {
        self.dim / 2
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.dim + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.dim + j] = v;
    }

    pub fn data(&self) -> &[f64] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn mul(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim, "internal: dimension mismatch in mul");
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == 0.0 {
                    continue;
                }
                let row = &other.data[k * n..(k + 1) * n];
                let dst = &mut out.data[i * n..(i + 1) * n];
                for j in 0..n {
                    dst[j] += a * row[j];
                }
            }
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect();
        Self { dim: self.dim, data }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!(self.dim, other.dim);
        let data = self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect();
        Self { dim: self.dim, data }
    }

    pub fn scale(&self, s: f64) -> Self {
        Self { dim: self.dim, data: self.data.iter().map(|a| a * s).collect() }
    }

    pub fn transpose(&self) -> Self {
        let n = self.dim;
        Self::from_fn(n, |i, j| self.data[j * n + i])
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|i| self.data[i * self.dim + i]).sum()
    }

    pub fn frobenius(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0f64, |m, x| m.max(x.abs()))
    }

    /// Max-norm distance to another matrix.
    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        assert_eq!(self.dim, other.dim);
        self.data
            .iter()
            .zip(&other.data)
            .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()))
    }

    /// `Tr(AᵀB)`, the Frobenius inner product.
    pub fn dot(&self, other: &Self) -> f64 {
        assert_eq!(self.dim, other.dim);
        self.data.iter().zip(&other.data).map(|(a, b)| a * b).sum()
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        let n = self.dim;
        for i in 0..n {
            for j in i + 1..n {
                if (self.data[i * n + j] - self.data[j * n + i]).abs() > tol {
                    return false;
                }
            }
        }
        true
    }

    pub fn is_skew_symmetric(&self, tol: f64) -> bool {
        let n = self.dim;
        for i in 0..n {
            for j in i..n {
                if (self.data[i * n + j] + self.data[j * n + i]).abs() > tol {
                    return false;
                }
            }
        }
        true
    }

    /// Apply a vector: `y = M x`.
    pub fn apply_vec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.dim);
        let n = self.dim;
        (0..n)
            .map(|i| self.data[i * n..(i + 1) * n].iter().zip(x).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// The 4×4 restriction to canonical pairs `i` and `k`, rows/columns
    /// ordered `(2i, 2i+1, 2k, 2k+1)`. Because `γ₀` couples only within
    /// pairs, this restriction of a (skew-)Hamiltonian matrix is itself
    /// (skew-)Hamiltonian with respect to the 4×4 symplectic unit.
    pub fn pair_submatrix(&self, i: usize, k: usize) -> Self {
        let idx = [2 * i, 2 * i + 1, 2 * k, 2 * k + 1];
        Self::from_fn(4, |a, b| self.get(idx[a], idx[b]))
    }

    /// Embed a 4×4 matrix at canonical pairs `(i, k)` of a `dim`-dimensional
    /// identity.
    pub fn embed_pairs(four: &Self, i: usize, k: usize, dim: usize) -> Self {
        assert_eq!(four.dim, 4);
        let mut out = Self::identity(dim);
        let idx = [2 * i, 2 * i + 1, 2 * k, 2 * k + 1];
        for a in 0..4 {
            for b in 0..4 {
                out.set(idx[a], idx[b], four.get(a, b));
            }
        }
        out
    }
}

/// Kronecker product. Satisfies `(A⊗B)ᵀ = Aᵀ⊗Bᵀ`, `(A⊗B)(C⊗D) = AC⊗BD` and
/// `Tr(A⊗B) = Tr(A)Tr(B)`.
pub fn kronecker(a: &PhaseMatrix, b: &PhaseMatrix) -> PhaseMatrix {
    let (na, nb) = (a.dim(), b.dim());
    PhaseMatrix::from_fn(na * nb, |i, j| a.get(i / nb, j / nb) * b.get(i % nb, j % nb))
}
