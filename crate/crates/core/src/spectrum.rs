//! Eigenvalues, 2×2 normal forms, and matrix exponential / logarithm through
//! normal coordinates.
//!
//! Eigenvalues of a Hamiltonian matrix come in ±λ pairs on the real or the
//! imaginary axis (anything else forbids symplectic block-diagonalization).
//! A 2×2 block `h₀η₀ + h₁η₁ + h₂η₂` squares to `−(h₀²−h₁²−h₂²)·1`, so its
//! pair is `±√(−h₀²+h₁²+h₂²)`. For 4×4 matrices the pairs follow from the
//! two trace invariants `K₁ = Tr(H²)/4` and `K₂ = Tr(H⁴)/16 − K₁²/4` as
//! `λ = ±√(K₁+2√K₂)`, `Λ = ±√(K₁−2√K₂)`; a negative `K₂` signals complex
//! off-axis eigenvalues. Exponentials and logarithms are computed
//! block-by-block in decoupled coordinates, where every block exponential
//! has a two-term closed form.

use num_complex::Complex64;

use crate::clifford::pauli_basis;
use crate::jacobi::{jacobi_decouple, off_block_residual, JacobiConfig};
use crate::matrix::PhaseMatrix;
use crate::symplectic::{
    hamiltonian_defect, hamiltonian_part, symplectic_defect, SymplecticTransform, STRUCT_TOL,
};
use crate::{Error, Result};

/// Absolute tolerance separating elliptic / hyperbolic / degenerate-zero
/// squared-eigenvalue radicands (inputs are O(1) by contract).
pub const CLASS_TOL: f64 = 1e-12;

/// Spectral class of one ±λ eigenvalue pair.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EigenClass {
    /// Purely imaginary pair ±iω (stable oscillation).
    Elliptic,
    /// Purely real pair ±λ (exponential growth/decay).
    Hyperbolic,
    /// Double zero.
    DegenerateZero,
}

impl EigenClass {
    fn order(self) -> u8 {
        match self {
            EigenClass::Elliptic => 0,
            EigenClass::Hyperbolic => 1,
            EigenClass::DegenerateZero => 2,
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            EigenClass::Elliptic => "elliptic",
            EigenClass::Hyperbolic => "hyperbolic",
            EigenClass::DegenerateZero => "degenerate-zero",
        }
    }
}

/// One eigenvalue pair ±(re + i·im); the stored representative has
/// non-negative components and `omega = |λ|`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EigenPair {
    pub re: f64,
    pub im: f64,
    pub class: EigenClass,
    pub omega: f64,
}

impl EigenPair {
    /// Classify a squared eigenvalue `λ²`; negative radicands give elliptic
    /// pairs, positive ones hyperbolic pairs.
    fn from_squared(lambda_sq: f64) -> Self {
        if lambda_sq > CLASS_TOL {
            let l = lambda_sq.sqrt();
            EigenPair { re: l, im: 0.0, class: EigenClass::Hyperbolic, omega: l }
        } else if lambda_sq < -CLASS_TOL {
            let w = (-lambda_sq).sqrt();
            EigenPair { re: 0.0, im: w, class: EigenClass::Elliptic, omega: w }
        } else {
            EigenPair { re: 0.0, im: 0.0, class: EigenClass::DegenerateZero, omega: 0.0 }
        }
    }
}

/// Eigenvalue pairs sorted by descending ω, then class.
#[derive(Debug, Clone, PartialEq)]
pub struct Spectrum {
    pairs: Vec<EigenPair>,
}

impl Spectrum {
    fn new(mut pairs: Vec<EigenPair>) -> Self {
        pairs.sort_by(|a, b| {
            b.omega
                .partial_cmp(&a.omega)
                .unwrap()
                .then(a.class.order().cmp(&b.class.order()))
        });
        Self { pairs }
    }

    pub fn pairs(&self) -> &[EigenPair] {
        &self.pairs
    }
}

fn pauli_coeffs(h: &PhaseMatrix) -> Result<[f64; 3]> {
    if h.dim() != 2 {
        return Err(Error::DimensionMismatch(h.dim(), 2));
    }
    let c = pauli_basis().decompose(h);
    // 2×2 Hamiltonian ⇔ trace-free; the η₃ component is the defect.
    if c[3].abs() > CLASS_TOL * h.max_abs().max(1.0) {
        return Err(Error::NotHamiltonian { defect: c[3].abs() });
    }
    Ok([c[0], c[1], c[2]])
}

/// Eigenvalue pair of a trace-free 2×2 matrix: `λ = ±√(−h₀²+h₁²+h₂²)`.
pub fn eigen2(h: &PhaseMatrix) -> Result<Spectrum> {
    let c = pauli_coeffs(h)?;
    let lambda_sq = -c[0] * c[0] + c[1] * c[1] + c[2] * c[2];
    Ok(Spectrum::new(vec![EigenPair::from_squared(lambda_sq)]))
}

/// Eigenvalues of a 4×4 Hamiltonian matrix from the trace invariants K₁, K₂.
pub fn eigen4(h: &PhaseMatrix) -> Result<Spectrum> {
    if h.dim() != 4 {
        return Err(Error::DimensionMismatch(h.dim(), 4));
    }
    let defect = hamiltonian_defect(h);
    if defect > STRUCT_TOL * h.max_abs().max(1.0) {
        return Err(Error::NotHamiltonian { defect });
    }
    let h2 = h.mul(h);
    let k1 = h2.trace() / 4.0;
    let k2 = h2.mul(&h2).trace() / 16.0 - k1 * k1 / 4.0;
    let scale = (k1 * k1).max(1.0);
    if k2 < -CLASS_TOL * scale {
        return Err(Error::ComplexEigenvalues);
    }
    let root = k2.max(0.0).sqrt();
    Ok(Spectrum::new(vec![
        EigenPair::from_squared(k1 + 2.0 * root),
        EigenPair::from_squared(k1 - 2.0 * root),
    ]))
}

/// Normal form of one degree of freedom.
///
/// Elliptic blocks reduce to `±ω·η₀` (the harmonic-oscillator form) by one
/// rotation and one boost; hyperbolic blocks reduce analogously to `±λ·η₁`,
/// an extension flagged by [`EigenClass::Hyperbolic`] in `class`. The sign
/// is the symplectically invariant orientation of the block.
#[derive(Debug, Clone)]
pub struct NormalForm2 {
    /// Non-negative frequency (elliptic) or growth rate (hyperbolic).
    pub omega: f64,
    /// ±1; the normal form is `orientation·ω·η₀` resp. `orientation·λ·η₁`.
    pub orientation: f64,
    pub class: EigenClass,
    /// 2×2 transform `V` with `V·H·V⁻¹` in normal form.
    pub transform: SymplecticTransform,
}

impl NormalForm2 {
    /// The normal-form matrix itself.
    pub fn matrix(&self) -> PhaseMatrix {
        let p = pauli_basis();
        match self.class {
            EigenClass::Hyperbolic => p.eta1.scale(self.orientation * self.omega),
            _ => p.eta0.scale(self.orientation * self.omega),
        }
    }
}

fn pauli_rotation(tau: f64) -> SymplecticTransform {
    let p = pauli_basis();
    let (c, s) = ((tau / 2.0).cos(), (tau / 2.0).sin());
    SymplecticTransform::from_parts(
        p.eta3.scale(c).add(&p.eta0.scale(s)),
        p.eta3.scale(c).add(&p.eta0.scale(-s)),
    )
}

fn pauli_boost(tau: f64) -> SymplecticTransform {
    let p = pauli_basis();
    let (c, s) = ((tau / 2.0).cosh(), (tau / 2.0).sinh());
    SymplecticTransform::from_parts(
        p.eta3.scale(c).add(&p.eta2.scale(s)),
        p.eta3.scale(c).add(&p.eta2.scale(-s)),
    )
}

/// Oscillator normal form of an elliptic 2×2 Hamiltonian block
/// (`h₀² > h₁² + h₂²`). Step 1 rotates by `exp(η₀τ/2)`, `τ = −arctan(h₂/h₁)`,
/// zeroing h₂ while h̃₁ keeps the sign of h₁; step 2 boosts by `exp(η₂τ/2)`,
/// `τ = −artanh(h̃₁/h₀)`, leaving `sign(h₀)·ω·η₀` with
/// `ω = √(h₀²−h₁²−h₂²)`.
pub fn normal_form2(h: &PhaseMatrix) -> Result<NormalForm2> {
    let c = pauli_coeffs(h)?;
    let radicand = c[0] * c[0] - c[1] * c[1] - c[2] * c[2];
    if radicand <= CLASS_TOL {
        return Err(Error::HyperbolicBlock(radicand));
    }
    Ok(elliptic_normal_form(h, c, radicand))
}

/// Normal form of any non-degenerate 2×2 Hamiltonian block; hyperbolic
/// blocks get the boost form `±λ·η₁`. Degenerate blocks (radicand ≈ 0) have
/// no normal form under symplectic transformations.
pub fn normal_form2_any(h: &PhaseMatrix) -> Result<NormalForm2> {
    let c = pauli_coeffs(h)?;
    let radicand = c[0] * c[0] - c[1] * c[1] - c[2] * c[2];
    if radicand > CLASS_TOL {
        Ok(elliptic_normal_form(h, c, radicand))
    } else if radicand < -CLASS_TOL {
        Ok(hyperbolic_normal_form(h, c, radicand))
    } else {
        Err(Error::HyperbolicBlock(radicand))
    }
}

/// Rotation zeroing h₂: `τ = −arctan(h₂/h₁)` on the principal branch so the
/// new h₁ keeps the old sign; for h₁ = 0 the angle `−(π/2)·sign(h₂)` maps
/// the η₂ component onto η₁.
fn step1_rotation(h: &PhaseMatrix, c: [f64; 3]) -> (PhaseMatrix, [f64; 3], SymplecticTransform) {
    if c[1].abs() < 1e-300 && c[2].abs() < 1e-300 {
        return (h.clone(), c, SymplecticTransform::identity(2));
    }
    let tau = if c[1].abs() > 0.0 {
        -(c[2] / c[1]).atan()
    } else {
        -std::f64::consts::FRAC_PI_2 * c[2].signum()
    };
    let rot = pauli_rotation(tau);
    let ht = rot.apply(h);
    let ct = pauli_basis().decompose(&ht);
    (ht, [ct[0], ct[1], ct[2]], rot)
}

fn elliptic_normal_form(h: &PhaseMatrix, c: [f64; 3], radicand: f64) -> NormalForm2 {
    let omega = radicand.sqrt();
    let orientation = if c[0] >= 0.0 { 1.0 } else { -1.0 };
    let (_, ct, rot) = step1_rotation(h, c);
    // Boost zeroing the η₁ component: τ = −artanh(h̃₁/h₀), the log-of-ratio
    // form of the same angle.
    let transform = if ct[1].abs() < 1e-300 {
        rot
    } else {
        let tau = -(ct[1] / ct[0]).atanh();
        rot.then(&pauli_boost(tau))
    };
    NormalForm2 { omega, orientation, class: EigenClass::Elliptic, transform }
}

fn hyperbolic_normal_form(h: &PhaseMatrix, c: [f64; 3], radicand: f64) -> NormalForm2 {
    let lambda = (-radicand).sqrt();
    let (_, ct, rot) = step1_rotation(h, c);
    let orientation = if ct[1] >= 0.0 { 1.0 } else { -1.0 };
    // Boost zeroing the η₀ component: τ = −artanh(h₀/h̃₁).
    let transform = if ct[0].abs() < 1e-300 {
        rot
    } else {
        let tau = -(ct[0] / ct[1]).atanh();
        rot.then(&pauli_boost(tau))
    };
    NormalForm2 { omega: lambda, orientation, class: EigenClass::Hyperbolic, transform }
}

/// Complex diagonalization of an elliptic normal form — provided for
/// completeness only. The change of basis `V = (1/√2)[[i, 1], [−i, 1]]` is
/// *not* symplectic; it maps `ω̂·η₀` to `diag(iω̂, −iω̂)`.
#[derive(Debug, Clone)]
pub struct ComplexDiag2 {
    pub eigenvalues: [Complex64; 2],
    pub basis: [[Complex64; 2]; 2],
    pub basis_inv: [[Complex64; 2]; 2],
}

impl ComplexDiag2 {
    /// Always true; kept as an explicit marker that this output has left the
    /// symplectic (real canonical) domain.
    pub fn is_non_symplectic(&self) -> bool {
        true
    }
}

pub fn complex_diag2(nf: &NormalForm2) -> ComplexDiag2 {
    let i = Complex64::new(0.0, 1.0);
    let one = Complex64::new(1.0, 0.0);
    let s = 1.0 / 2.0f64.sqrt();
    let w = nf.orientation * nf.omega;
    ComplexDiag2 {
        eigenvalues: [i * w, -i * w],
        basis: [[i * s, one * s], [-i * s, one * s]],
        basis_inv: [[-i * s, i * s], [one * s, one * s]],
    }
}

/// Closed-form exponential of a (nearly) trace-free 2×2 block.
fn exp_block2(b: &PhaseMatrix) -> PhaseMatrix {
    let id = PhaseMatrix::identity(2);
    let det = b.get(0, 0) * b.get(1, 1) - b.get(0, 1) * b.get(1, 0);
    if det > 0.0 {
        // elliptic: B² = −det·1
        let w = det.sqrt();
        let factor = if w > 1e-150 { w.sin() / w } else { 1.0 };
        id.scale(w.cos()).add(&b.scale(factor))
    } else if det < 0.0 {
        let mu = (-det).sqrt();
        let factor = if mu > 1e-150 { mu.sinh() / mu } else { 1.0 };
        id.scale(mu.cosh()).add(&b.scale(factor))
    } else {
        id.add(b)
    }
}

/// Logarithm of a 2×2 symplectic block read as `a·1 + s·(unit generator)`.
fn log_block2(n: &PhaseMatrix) -> Result<PhaseMatrix> {
    let a = n.trace() / 2.0;
    let g = n.sub(&PhaseMatrix::identity(2).scale(a));
    let det = g.get(0, 0) * g.get(1, 1) - g.get(0, 1) * g.get(1, 0);
    let tol = 1e-14 * n.max_abs().max(1.0).powi(2);
    if det > tol {
        // elliptic: rotation by θ ∈ (0, π)
        let w = det.sqrt();
        let theta = w.atan2(a);
        if std::f64::consts::PI - theta < 1e-8 {
            return Err(Error::LogBranch);
        }
        Ok(g.scale(theta / w))
    } else if det < -tol {
        // hyperbolic: cosh(t) = a must be positive for a real logarithm
        if a <= 0.0 {
            return Err(Error::LogBranch);
        }
        let mu = (-det).sqrt();
        Ok(g.scale(mu.asinh() / mu))
    } else {
        // parabolic shear: log(1 + G) = G for nilpotent G
        if a < 0.0 {
            return Err(Error::LogBranch);
        }
        Ok(g)
    }
}

/// Matrix exponential of a Hamiltonian matrix through decoupled coordinates:
/// `exp(H) = T⁻¹·exp(D)·T` with per-block closed forms. The result is
/// symplectic.
pub fn sympl_exp(h: &PhaseMatrix) -> Result<PhaseMatrix> {
    sympl_exp_with(h, &JacobiConfig::default())
}

pub fn sympl_exp_with(h: &PhaseMatrix, cfg: &JacobiConfig) -> Result<PhaseMatrix> {
    let defect = hamiltonian_defect(h);
    if defect > STRUCT_TOL * h.max_abs().max(1.0) {
        return Err(Error::NotHamiltonian { defect });
    }
    if h.dim() == 2 {
        return Ok(exp_block2(h));
    }
    let report = jacobi_decouple(h, cfg)?;
    let mut blocks = PhaseMatrix::zeros(h.dim());
    for k in 0..h.pairs() {
        let b = PhaseMatrix::from_fn(2, |i, j| report.result.get(2 * k + i, 2 * k + j));
        let e = exp_block2(&b);
        for i in 0..2 {
            for j in 0..2 {
                blocks.set(2 * k + i, 2 * k + j, e.get(i, j));
            }
        }
    }
    Ok(report.transform.apply_inverse(&blocks))
}

/// Matrix logarithm of a symplectic matrix: decouple the Hamiltonian part of
/// `M` (which block-diagonalizes `M` itself), take per-block logarithms via
/// arctan/artanh, and transform back. The result is Hamiltonian and
/// satisfies `sympl_exp(result) = M`.
pub fn sympl_log(m: &PhaseMatrix) -> Result<PhaseMatrix> {
    sympl_log_with(m, &JacobiConfig::default())
}

pub fn sympl_log_with(m: &PhaseMatrix, cfg: &JacobiConfig) -> Result<PhaseMatrix> {
    let defect = symplectic_defect(m);
    if defect > 1e-8 * m.max_abs().max(1.0) {
        return Err(Error::NotSymplectic { defect });
    }
    if m.dim() == 2 {
        return log_block2(m);
    }
    let hp = hamiltonian_part(m);
    let report = jacobi_decouple(&hp, cfg)?;
    let mt = report.transform.apply(m);
    // Decoupling the Hamiltonian part must block-diagonalize M as well; with
    // degenerate blocks it can fail to, which surfaces here.
    let off = off_block_residual(&mt);
    if off > 1e-8 {
        return Err(Error::NoConvergence { steps: report.steps, residual: off });
    }
    let mut blocks = PhaseMatrix::zeros(m.dim());
    for k in 0..m.pairs() {
        let b = PhaseMatrix::from_fn(2, |i, j| mt.get(2 * k + i, 2 * k + j));
        let l = log_block2(&b)?;
        for i in 0..2 {
            for j in 0..2 {
                blocks.set(2 * k + i, 2 * k + j, l.get(i, j));
            }
        }
    }
    Ok(report.transform.apply_inverse(&blocks))
}

/// Spectrum of a Hamiltonian matrix of any even dimension: closed forms for
/// 2×2 and 4×4, decoupled block reading beyond that.
pub fn spectrum_of(h: &PhaseMatrix, cfg: &JacobiConfig) -> Result<Spectrum> {
    match h.dim() {
        2 => eigen2(h),
        4 => eigen4(h),
        _ => {
            let defect = hamiltonian_defect(h);
            if defect > STRUCT_TOL * h.max_abs().max(1.0) {
                return Err(Error::NotHamiltonian { defect });
            }
            let report = jacobi_decouple(h, cfg)?;
            let mut pairs = Vec::with_capacity(h.pairs());
            for k in 0..h.pairs() {
                let b = PhaseMatrix::from_fn(2, |i, j| report.result.get(2 * k + i, 2 * k + j));
                let c = pauli_basis().decompose(&b);
                pairs.push(EigenPair::from_squared(-c[0] * c[0] + c[1] * c[1] + c[2] * c[2]));
            }
            Ok(Spectrum::new(pairs))
        }
    }
}

/// Per-block normal forms of a decoupled matrix, in block order.
pub fn block_normal_forms(decoupled: &PhaseMatrix) -> Vec<Result<NormalForm2>> {
    (0..decoupled.pairs())
        .map(|k| {
            let b = PhaseMatrix::from_fn(2, |i, j| decoupled.get(2 * k + i, 2 * k + j));
            normal_form2_any(&b)
        })
        .collect()
}
