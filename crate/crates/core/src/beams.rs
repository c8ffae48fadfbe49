//! Second-moment (covariance) machinery for particle ensembles.
//!
//! The matrix of second moments `Σ = ⟨ψψᵀ⟩` pairs with the Hamiltonian
//! matrix `S = Σγ₀ᵀ`; under a symplectic map `M` they evolve as
//! `Σ ↦ MΣMᵀ` and `S ↦ MSM⁻¹`, so `(H, S)` form a Lax pair and all traces
//! `Tr(Sᵏ)` are invariants of the motion. A beam is *matched* to `M` when
//! `MΣMᵀ = Σ`, equivalently when `S` commutes with `M`; in the normal
//! coordinates that block-diagonalize the Hamiltonian part of `M`, the
//! matched `S` is `−εₖ·η₀` per canonical pair (so `Σ` is `εₖ·1₂` per pair),
//! with the emittances εₖ the per-mode phase-space areas.

use rand_chacha::ChaCha12Rng;
use rand_core::{RngCore, SeedableRng};

use crate::jacobi::{jacobi_decouple, off_block_residual, JacobiConfig};
use crate::matrix::PhaseMatrix;
use crate::spectrum::{normal_form2_any, EigenClass, NormalForm2};
use crate::symplectic::{hamiltonian_part, symplectic_defect, SymplecticTransform};
use crate::{Error, Result};

/// A covariance matrix Σ together with its Hamiltonian partner `S = Σγ₀ᵀ`.
#[derive(Debug, Clone)]
pub struct MomentMatrix {
    sigma: PhaseMatrix,
    s: PhaseMatrix,
}

impl MomentMatrix {
    /// Build from a symmetric Σ. Positive semi-definiteness is the caller's
    /// contract; symmetry is validated here.
    pub fn from_sigma(sigma: PhaseMatrix) -> Result<Self> {
        let defect = sigma.sub(&sigma.transpose()).max_abs();
        if defect > 1e-12 * sigma.max_abs().max(1.0) {
            return Err(Error::NotHamiltonian { defect });
        }
        let g0t = PhaseMatrix::symplectic_unit(sigma.dim()).transpose();
        let s = sigma.mul(&g0t);
        Ok(Self { sigma, s })
    }

    pub fn sigma(&self) -> &PhaseMatrix {
        &self.sigma
    }

    /// The Hamiltonian partner `S = Σγ₀ᵀ`; Σ is recoverable as `S·γ₀`.
    pub fn s_matrix(&self) -> &PhaseMatrix {
        &self.s
    }

    /// Lax invariant `Tr(Sᵏ)`.
    pub fn lax_trace(&self, k: usize) -> f64 {
        let mut p = self.s.clone();
        for _ in 1..k {
            p = p.mul(&self.s);
        }
        p.trace()
    }
}

/// Propagate second moments through a symplectic map: `Σ ↦ MΣMᵀ` (and the
/// partner consistently as `S ↦ MSM⁻¹`).
pub fn moment_update(moments: &MomentMatrix, m: &SymplecticTransform) -> Result<MomentMatrix> {
    if m.dim() != moments.sigma.dim() {
        return Err(Error::DimensionMismatch(m.dim(), moments.sigma.dim()));
    }
    let sigma = m.apply_congruence(&moments.sigma);
    MomentMatrix::from_sigma(sigma)
}

/// Strictly positive per-mode emittances ε₁ ≥ … are not required in any
/// order; they are assigned to decoupled modes by descending frequency.
#[derive(Debug, Clone, PartialEq)]
pub struct Emittances(Vec<f64>);

impl Emittances {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() || !values.iter().all(|e| e.is_finite() && *e > 0.0) {
            return Err(Error::NonPositiveEmittance);
        }
        Ok(Self(values))
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Normal coordinates of a stable one-turn map: the transform to the frame
/// where the Hamiltonian part of `M` is in per-block oscillator form, the
/// per-block frequencies, and the emittance assignment (descending ω).
#[derive(Debug, Clone)]
pub struct MatchedFrame {
    /// `T` with `T·M·T⁻¹` block-diagonal and each block `a·1 + c·η₀`.
    pub transform: SymplecticTransform,
    /// Per-block frequency of the Hamiltonian part, block order.
    pub omegas: Vec<f64>,
    /// `assignment[block] = rank`: block of rank 0 has the largest ω.
    pub assignment: Vec<usize>,
}

/// Build the matched frame of a symplectic matrix whose Hamiltonian part
/// decouples with all-elliptic blocks.
pub fn matched_frame(m: &PhaseMatrix, cfg: &JacobiConfig) -> Result<MatchedFrame> {
    let defect = symplectic_defect(m);
    if defect > 1e-8 * m.max_abs().max(1.0) {
        return Err(Error::NotSymplectic { defect });
    }
    let n = m.pairs();
    let hp = hamiltonian_part(m);
    let report = jacobi_decouple(&hp, cfg)?;

    // Per-block oscillator normal forms; hyperbolic or degenerate modes have
    // no bounded matched distribution.
    let mut transform = report.transform.clone();
    let mut omegas = Vec::with_capacity(n);
    let mut block_normal = SymplecticTransform::identity(m.dim());
    for k in 0..n {
        let b = PhaseMatrix::from_fn(2, |i, j| report.result.get(2 * k + i, 2 * k + j));
        let nf: NormalForm2 = match normal_form2_any(&b) {
            Ok(nf) if nf.class == EigenClass::Elliptic => nf,
            Ok(_) | Err(Error::HyperbolicBlock(_)) => return Err(Error::UnstableLattice),
            Err(e) => return Err(e),
        };
        omegas.push(nf.omega);
        let mut fwd = PhaseMatrix::identity(m.dim());
        let mut inv = PhaseMatrix::identity(m.dim());
        for i in 0..2 {
            for j in 0..2 {
                fwd.set(2 * k + i, 2 * k + j, nf.transform.matrix().get(i, j));
                inv.set(2 * k + i, 2 * k + j, nf.transform.inverse_matrix().get(i, j));
            }
        }
        block_normal = block_normal.then(&SymplecticTransform::from_parts(fwd, inv));
    }
    transform = transform.then(&block_normal);

    // In these coordinates M itself must be block-diagonal; degenerate
    // Hamiltonian parts can defeat that, which is detected here.
    let mt = transform.apply(m);
    if off_block_residual(&mt) > 1e-8 {
        return Err(Error::NoConvergence { steps: report.steps, residual: off_block_residual(&mt) });
    }

    // ranks by descending frequency, ties by block index
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| omegas[b].partial_cmp(&omegas[a]).unwrap().then(a.cmp(&b)));
    let mut assignment = vec![0usize; n];
    for (rank, &block) in order.iter().enumerate() {
        assignment[block] = rank;
    }

    Ok(MatchedFrame { transform, omegas, assignment })
}

/// Matched second moments for a stable symplectic one-turn map: in normal
/// coordinates `S̃ = −εₖ·η₀` per pair (so `Σ̃ = εₖ·1₂`), transformed back.
/// The k-th largest emittance attaches to the k-th largest frequency.
pub fn matched_sigma(m: &PhaseMatrix, eps: &Emittances) -> Result<MomentMatrix> {
    matched_sigma_with(m, eps, &JacobiConfig::default())
}

pub fn matched_sigma_with(
    m: &PhaseMatrix,
    eps: &Emittances,
    cfg: &JacobiConfig,
) -> Result<MomentMatrix> {
    let n = m.pairs();
    if eps.len() != n {
        return Err(Error::DimensionMismatch(eps.len(), n));
    }
    let frame = matched_frame(m, cfg)?;
    let mut s_normal = PhaseMatrix::zeros(m.dim());
    for block in 0..n {
        let e = eps.values()[frame.assignment[block]];
        s_normal.set(2 * block, 2 * block + 1, -e);
        s_normal.set(2 * block + 1, 2 * block, e);
    }
    let s = frame.transform.apply_inverse(&s_normal);
    let sigma = s.mul(&PhaseMatrix::symplectic_unit(m.dim()));
    MomentMatrix::from_sigma(sigma)
}

/// Deterministic matched-phase-space sampler.
///
/// Draws standard normals with the Box–Muller transform over a ChaCha12
/// stream seeded from `seed`, scales pair `k` of the normal coordinates by
/// `√εₖ`, and maps through the inverse frame transform. The sample
/// covariance converges to the matched Σ at the Monte-Carlo rate.
pub fn sample_matched(
    m: &PhaseMatrix,
    eps: &Emittances,
    count: usize,
    seed: u64,
) -> Result<Vec<Vec<f64>>> {
    let n = m.pairs();
    if eps.len() != n {
        return Err(Error::DimensionMismatch(eps.len(), n));
    }
    if count == 0 {
        return Err(Error::DimensionTooSmall(0));
    }
    let frame = matched_frame(m, &JacobiConfig::default())?;
    let scales: Vec<f64> =
        (0..n).map(|block| eps.values()[frame.assignment[block]].sqrt()).collect();

    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let mut normals = NormalStream::new(&mut rng);
    let mut out = Vec::with_capacity(count);
    for _ in 0..count {
        let mut xi = vec![0.0f64; 2 * n];
        for block in 0..n {
            xi[2 * block] = scales[block] * normals.next();
            xi[2 * block + 1] = scales[block] * normals.next();
        }
        out.push(frame.transform.inverse_matrix().apply_vec(&xi));
    }
    Ok(out)
}

/// Box–Muller standard normals from a uniform u64 stream.
struct NormalStream<'a, R: RngCore> {
    rng: &'a mut R,
    spare: Option<f64>,
}

impl<'a, R: RngCore> NormalStream<'a, R> {
    fn new(rng: &'a mut R) -> Self {
        Self { rng, spare: None }
    }

    fn uniform01(&mut self) -> f64 {
        // 53-bit mantissa in [0, 1)
        (self.rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    fn next(&mut self) -> f64 {
        if let Some(z) = self.spare.take() {
            return z;
        }
        // u ∈ (0, 1] keeps the logarithm finite
        let u = 1.0 - self.uniform01();
        let v = self.uniform01();
        let r = (-2.0 * u.ln()).sqrt();
        let (s, c) = (2.0 * std::f64::consts::PI * v).sin_cos();
        self.spare = Some(r * s);
        r * c
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::clifford::dirac_basis;
    use crate::symplectic::{generator_exp, is_hamiltonian, GeneratorId};
    use crate::testutil::{block_diag_elliptic, random_word_2n, rng_stream, separated_frequencies};

    fn exp_gamma0(w: f64) -> PhaseMatrix {
        PhaseMatrix::identity(4).scale(w.cos()).add(&dirac_basis().gamma(0).scale(w.sin()))
    }

    #[test]
    fn moment_matrix_duality() {
        let sigma = PhaseMatrix::identity(4).scale(1.5);
        let mm = MomentMatrix::from_sigma(sigma.clone()).unwrap();
        assert!(is_hamiltonian(mm.s_matrix()));
        let back = mm.s_matrix().mul(&PhaseMatrix::symplectic_unit(4));
        assert!(back.max_abs_diff(&sigma) < 1e-15);
    }

    #[test]
    fn moment_update_examples() {
        let mut next = rng_stream(139);
        let mut a = PhaseMatrix::from_fn(4, |_, _| next());
        a = a.mul(&a.transpose()).add(&PhaseMatrix::identity(4).scale(2.0));
        let mm = MomentMatrix::from_sigma(a).unwrap();

        // identity map leaves the moments alone
        let id = SymplecticTransform::identity(4);
        let upd = moment_update(&mm, &id).unwrap();
        assert!(upd.sigma().max_abs_diff(mm.sigma()) < 1e-15);

        // R₀ is orthogonal at the 4×4 level, so Σ = 1 is a fixed point
        let iso = MomentMatrix::from_sigma(PhaseMatrix::identity(4)).unwrap();
        let r0 = generator_exp(GeneratorId::new(0).unwrap(), 0.6).unwrap();
        let upd = moment_update(&iso, &r0).unwrap();
        assert!(upd.sigma().max_abs_diff(&PhaseMatrix::identity(4)) < 1e-14);

        // Lax invariants under a random symplectic word
        let word = random_word_2n(2, 8, 0.6, &mut next);
        let upd = moment_update(&mm, &word).unwrap();
        for k in [2usize, 4] {
            let t0 = mm.lax_trace(k);
            let t1 = upd.lax_trace(k);
            assert!((t0 - t1).abs() < 1e-9 * t0.abs().max(1.0), "k={k}");
        }
    }

    #[test]
    fn matched_identity_frame_gives_unity_sigma() {
        // M = exp(ωγ₀) with eps = (1, 1): normal coordinates are already
        // matched, Σ = 1₄.
        let m = exp_gamma0(0.8);
        let eps = Emittances::new(vec![1.0, 1.0]).unwrap();
        let mm = matched_sigma(&m, &eps).unwrap();
        assert!(mm.sigma().max_abs_diff(&PhaseMatrix::identity(4)) < 1e-12);
        let fixed = m.mul(mm.sigma()).mul(&m.transpose());
        assert!(fixed.max_abs_diff(mm.sigma()) < 1e-12);
    }

    #[test]
    fn matched_boosted_rotation_fixed_point_and_invariants() {
        // boosted equal-frequency rotation M = R₅(0.5)·exp(γ₀)·R₅(−0.5), eps = (2, 3)
        let r5 = generator_exp(GeneratorId::new(5).unwrap(), 0.5).unwrap();
        let m = r5.matrix().mul(&exp_gamma0(1.0)).mul(r5.inverse_matrix());
        let eps = Emittances::new(vec![2.0, 3.0]).unwrap();
        let mm = matched_sigma(&m, &eps).unwrap();
        let fixed = m.mul(mm.sigma()).mul(&m.transpose());
        let rel = fixed.sub(mm.sigma()).frobenius() / mm.sigma().frobenius();
        assert!(rel < 1e-8, "relative fixed-point error {rel}");
        // Σ symmetric, S Hamiltonian, pair-wise invariants {2, 3}:
        // Tr(S²) = −2(ε₁²+ε₂²), Tr(S⁴) = 2(ε₁⁴+ε₂⁴)
        assert!(mm.sigma().is_symmetric(1e-10));
        assert!(is_hamiltonian(mm.s_matrix()));
        assert!((mm.lax_trace(2) + 2.0 * (4.0 + 9.0)).abs() < 1e-8);
        assert!((mm.lax_trace(4) - 2.0 * (16.0 + 81.0)).abs() < 1e-7);
    }

    #[test]
    fn emittance_validation() {
        assert!(matches!(Emittances::new(vec![1.0, 0.0]), Err(Error::NonPositiveEmittance)));
        assert!(matches!(Emittances::new(vec![1.0, -2.0]), Err(Error::NonPositiveEmittance)));
        assert!(matches!(Emittances::new(vec![]), Err(Error::NonPositiveEmittance)));
        assert!(matches!(Emittances::new(vec![f64::NAN]), Err(Error::NonPositiveEmittance)));
    }

    #[test]
    fn unstable_lattice_detected() {
        // a boost word has hyperbolic Hamiltonian part: no matched beam
        let k1 = GeneratorId::new(1).unwrap();
        let m = generator_exp(k1, 0.9).unwrap();
        let eps = Emittances::new(vec![1.0, 1.0]).unwrap();
        assert!(matches!(matched_sigma(m.matrix(), &eps), Err(Error::UnstableLattice)));
    }

    #[test]
    fn emittances_follow_frequency_order() {
        // two well-separated modes; the larger emittance goes to the larger ω
        let mut next = rng_stream(149);
        let diag = block_diag_elliptic(&[0.4, 1.3]);
        let word = random_word_2n(2, 6, 0.4, &mut next);
        let h = word.apply(&diag);
        let m = crate::spectrum::sympl_exp(&h).unwrap();
        let eps = Emittances::new(vec![5.0, 0.5]).unwrap();
        let mm = matched_sigma(&m, &eps).unwrap();
        // invariants of S: eigen-frequencies are the emittances
        let s2 = mm.lax_trace(2);
        let s4 = mm.lax_trace(4);
        assert!((s2 + 2.0 * (25.0 + 0.25)).abs() < 1e-7);
        assert!((s4 - 2.0 * (625.0 + 0.0625)).abs() < 1e-6);
        // frame sanity: frequencies of the Hamiltonian part are sin(ω)
        let frame = matched_frame(&m, &JacobiConfig::default()).unwrap();
        let mut oms = frame.omegas.clone();
        oms.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert!((oms[0] - 0.4f64.sin()).abs() < 1e-9);
        assert!((oms[1] - 1.3f64.sin()).abs() < 1e-9);
    }

    #[test]
    fn sampler_is_deterministic_and_finite() {
        let m = exp_gamma0(0.7);
        let eps = Emittances::new(vec![1.0, 2.0]).unwrap();
        let a = sample_matched(&m, &eps, 16, 42).unwrap();
        let b = sample_matched(&m, &eps, 16, 42).unwrap();
        assert_eq!(a, b);
        let c = sample_matched(&m, &eps, 16, 43).unwrap();
        assert_ne!(a, c);
        let single = sample_matched(&m, &eps, 1, 7).unwrap();
        assert_eq!(single.len(), 1);
        assert!(single[0].iter().all(|x| x.is_finite()));
        assert!(sample_matched(&m, &eps, 0, 7).is_err());
    }

    #[test]
    fn sample_covariance_converges() {
        let mut next = rng_stream(151);
        let ws = separated_frequencies(2, 0.3, 1.4, 0.15, &mut next);
        let diag = block_diag_elliptic(&ws);
        let word = random_word_2n(2, 5, 0.4, &mut next);
        let h = word.apply(&diag);
        let m = crate::spectrum::sympl_exp(&h).unwrap();
        let eps = Emittances::new(vec![1.4, 0.7]).unwrap();
        let mm = matched_sigma(&m, &eps).unwrap();

        let count = 100_000;
        let pts = sample_matched(&m, &eps, count, 4242).unwrap();
        let dim = 4;
        let mut cov = vec![0.0f64; dim * dim];
        for p in &pts {
            for i in 0..dim {
                for j in 0..dim {
                    cov[i * dim + j] += p[i] * p[j];
                }
            }
        }
        for v in cov.iter_mut() {
            *v /= count as f64;
        }
        for i in 0..dim {
            for j in 0..dim {
                let want = mm.sigma().get(i, j);
                let band = 5.0
                    * (mm.sigma().get(i, i) * mm.sigma().get(j, j) / count as f64).sqrt();
                assert!(
                    (cov[i * dim + j] - want).abs() < band,
                    "entry ({i},{j}): got {}, want {want}, band {band}",
                    cov[i * dim + j]
                );
            }
        }
    }
}
