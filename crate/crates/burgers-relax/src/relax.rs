//! Relaxation tensor via the block-operator matrix exponential.
//!
//! G(t) is the (1,1) tensor block of D̄ e^{tA} D̄ for t ≥ 0 and zero for
//! t < 0, with A = D̄ L̄ D̄ symmetric negative definite. A is eigendecomposed
//! once; every evaluation of G, its time derivatives, and every decay bound
//! then reduces to reweighting the same eigensystem, with no step-size error.
//!
//! The two-sided estimates certified here: with α₂𝓘 ≤ −A ≤ α₁𝓘 and
//! β₁𝓘 ≤ D̄ ≤ β₂𝓘,
//!
//! ```text
//!   β₁²α₂^(2j) e^(−α₁t) I ≤  G^(2j)(t)   ≤ β₂²α₁^(2j) e^(−α₂t) I
//!  −β₂²α₁^(2j+1) e^(−α₂t) I ≤ G^(2j+1)(t) ≤ −β₁²α₂^(2j+1) e^(−α₁t) I
//! ```
//!
//! Each bound pairs the power-of-α factor with the exponential of the
//! *other* α, which is what the sandwich (−A)^k e^{tA} with
//! α₂ ≤ −A ≤ α₁ and e^{−α₁t} ≤ e^{tA} ≤ e^{−α₂t} actually yields.

use std::path::Path;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::block::{build_a, BurgersMaterial, SpectralBounds};
use crate::error::{Error, Result};
use crate::tensor::{kelvin_len, ElasticTensor4};

/// Eigendecomposition of the block generator plus the D̄ sandwich, ready to
/// evaluate G(t) and its derivatives for any t.
///
/// Immutable and shareable; evaluation is a pure function of (t, k).
#[derive(Debug, Clone)]
pub struct RelaxationEvaluator {
    dim: usize,
    n: usize,
    /// Eigenvalues of A, ascending (all strictly negative).
    lambda: DVector<f64>,
    /// Orthonormal eigenvectors of A, columns aligned with `lambda`.
    q: DMatrix<f64>,
    /// Flat D̄.
    dbar: DMatrix<f64>,
    /// Flat D̄⁻¹.
    dbar_inv: DMatrix<f64>,
    /// Top d̃ rows of D̄Q; G^(k)(t) = W Λᵏ e^{tΛ} Wᵀ.
    w_top: DMatrix<f64>,
    bounds: SpectralBounds,
    material_hash: u64,
}

impl RelaxationEvaluator {
    /// Builds the evaluator from a material: forms A, eigendecomposes it,
    /// and stores the pieces needed for all later evaluations.
    pub fn build(m: &BurgersMaterial) -> Result<Self> {
        let (a, dbar_bm) = build_a(m)?;
        let side = a.side();
        let (lambda, q) = crate::linalg::sym_eigen(a.flat());
        let alpha1 = -lambda[0];
        let alpha2 = -lambda[side - 1];
        if alpha2.is_nan() || alpha2 <= 0.0 {
            return Err(Error::NotSpd { min_eig: alpha2 });
        }

        let dbar = dbar_bm.flat().clone();
        let mut dbar_inv = DMatrix::zeros(side, side);
        let dt = kelvin_len(m.dim());
        for i in 0..=m.n() {
            let inv = m.c()[i].inverse_spd()?.sqrt_spd()?;
            dbar_inv
                .view_mut((i * dt, i * dt), (dt, dt))
                .copy_from(inv.kelvin_matrix());
        }

        let dq = &dbar * &q;
        let w_top = dq.rows(0, dt).into_owned();

        let dbar_eigs = crate::linalg::sym_eigenvalues(&dbar);
        let beta1 = dbar_eigs[0];
        let beta2 = dbar_eigs[side - 1];

        Ok(Self {
            dim: m.dim(),
            n: m.n(),
            lambda,
            q,
            dbar,
            dbar_inv,
            w_top,
            bounds: SpectralBounds {
                alpha1,
                alpha2,
                beta1,
                beta2,
            },
            material_hash: material_fingerprint(m),
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn side(&self) -> usize {
        (self.n + 1) * kelvin_len(self.dim)
    }

    pub fn bounds(&self) -> SpectralBounds {
        self.bounds
    }

    pub fn eigenvalues(&self) -> &DVector<f64> {
        &self.lambda
    }

    pub fn eigenvectors(&self) -> &DMatrix<f64> {
        &self.q
    }

    pub fn dbar(&self) -> &DMatrix<f64> {
        &self.dbar
    }

    pub fn dbar_inv(&self) -> &DMatrix<f64> {
        &self.dbar_inv
    }

    pub fn material_hash(&self) -> u64 {
        self.material_hash
    }

    /// Residual of the eigensystem against a freshly assembled A, plus the
    /// orthonormality defect of Q. Both sit at rounding level.
    pub fn reconstruction_residual(&self, m: &BurgersMaterial) -> Result<f64> {
        let (a, _) = build_a(m)?;
        let recon = &self.q * DMatrix::from_diagonal(&self.lambda) * self.q.transpose();
        let rel = (&recon - a.flat()).norm() / a.flat().norm();
        let side = self.side();
        let ortho = (self.q.transpose() * &self.q - DMatrix::identity(side, side)).norm();
        Ok(rel.max(ortho))
    }

    fn g_deriv_raw(&self, t: f64, k: usize) -> DMatrix<f64> {
        let side = self.side();
        let mut diag = DVector::zeros(side);
        for i in 0..side {
            let l = self.lambda[i];
            diag[i] = l.powi(k as i32) * (t * l).exp();
        }
        &self.w_top * DMatrix::from_diagonal(&diag) * self.w_top.transpose()
    }

    /// G(t): zero tensor for t < 0 (causality), otherwise the (1,1) block of
    /// D̄ e^{tA} D̄, a symmetric positive definite Kelvin matrix.
    pub fn eval_g(&self, t: f64) -> ElasticTensor4 {
        self.eval_g_deriv(t, 0)
    }

    /// k-th time derivative of G at t ≥ 0 (k = 0 is G itself).
    /// For t < 0 returns the zero tensor.
    pub fn eval_g_deriv(&self, t: f64, k: usize) -> ElasticTensor4 {
        if t < 0.0 {
            return ElasticTensor4::zero(self.dim);
        }
        let raw = self.g_deriv_raw(t, k);
        let sym = (&raw + raw.transpose()) * 0.5;
        ElasticTensor4::from_kelvin_matrix(self.dim, sym).expect("W e W^T is symmetric")
    }

    /// H(t) = −Ġ(t).
    pub fn eval_h(&self, t: f64) -> ElasticTensor4 {
        let g1 = self.eval_g_deriv(t, 1);
        ElasticTensor4::from_kelvin_matrix(self.dim, -g1.kelvin_matrix().clone())
            .expect("negation preserves symmetry")
    }

    /// Full block matrix e^{tA}.
    pub fn full_exp(&self, t: f64) -> DMatrix<f64> {
        let side = self.side();
        let mut diag = DVector::zeros(side);
        for i in 0..side {
            diag[i] = (t * self.lambda[i]).exp();
        }
        &self.q * DMatrix::from_diagonal(&diag) * self.q.transpose()
    }

    /// ∫₀ʰ e^{sA} ds = Q diag((e^{hλ}−1)/λ) Qᵀ.
    pub fn exp_integral(&self, h: f64) -> DMatrix<f64> {
        let side = self.side();
        let mut diag = DVector::zeros(side);
        for i in 0..side {
            let z = h * self.lambda[i];
            diag[i] = z.exp_m1() / self.lambda[i];
        }
        &self.q * DMatrix::from_diagonal(&diag) * self.q.transpose()
    }

    /// ∫₀ʰ ∫₀ˢ e^{τA} dτ ds = Q diag((e^{hλ}−1−hλ)/λ²) Qᵀ.
    pub fn exp_double_integral(&self, h: f64) -> DMatrix<f64> {
        let side = self.side();
        let mut diag = DVector::zeros(side);
        for i in 0..side {
            let l = self.lambda[i];
            diag[i] = ((h * l).exp_m1() - h * l) / (l * l);
        }
        &self.q * DMatrix::from_diagonal(&diag) * self.q.transpose()
    }

    /// ∫_{u1}^{u2} G(u) du for 0 ≤ u1 ≤ u2, evaluated in closed form.
    /// Negative parts of the range contribute nothing (causality).
    pub fn g_integral(&self, u1: f64, u2: f64) -> DMatrix<f64> {
        let dt = kelvin_len(self.dim);
        if u2 <= 0.0 {
            return DMatrix::zeros(dt, dt);
        }
        let a = u1.max(0.0);
        let side = self.side();
        let mut diag = DVector::zeros(side);
        for i in 0..side {
            let l = self.lambda[i];
            diag[i] = ((u2 * l).exp() - (a * l).exp()) / l;
        }
        let raw = &self.w_top * DMatrix::from_diagonal(&diag) * self.w_top.transpose();
        (&raw + raw.transpose()) * 0.5
    }

    /// Writes the evaluator to a versioned portable JSON file.
    pub fn save(&self, path: &Path) -> Result<()> {
        let repr = EvaluatorFile {
            version: EVALUATOR_FILE_VERSION,
            material_hash: self.material_hash,
            dim: self.dim,
            n: self.n,
            eigenvalues: self.lambda.iter().cloned().collect(),
            q: self.q.as_slice().to_vec(),
            dbar: self.dbar.as_slice().to_vec(),
            dbar_inv: self.dbar_inv.as_slice().to_vec(),
            bounds: self.bounds,
        };
        let file = std::fs::File::create(path)?;
        serde_json::to_writer(std::io::BufWriter::new(file), &repr)
            .map_err(|e| Error::Csv(format!("evaluator serialization: {e}")))
    }

    /// Loads an evaluator previously written by [`save`](Self::save).
    pub fn load(path: &Path) -> Result<Self> {
        let file = std::fs::File::open(path)?;
        let repr: EvaluatorFile = serde_json::from_reader(std::io::BufReader::new(file))
            .map_err(|e| Error::Config(format!("evaluator file parse: {e}")))?;
        if repr.version != EVALUATOR_FILE_VERSION {
            return Err(Error::Config(format!(
                "evaluator file version {} unsupported (expected {})",
                repr.version, EVALUATOR_FILE_VERSION
            )));
        }
        let side = (repr.n + 1) * kelvin_len(repr.dim);
        if repr.eigenvalues.len() != side || repr.q.len() != side * side {
            return Err(Error::Config("evaluator file has inconsistent sizes".into()));
        }
        let lambda = DVector::from_vec(repr.eigenvalues);
        let q = DMatrix::from_vec(side, side, repr.q);
        let dbar = DMatrix::from_vec(side, side, repr.dbar);
        let dbar_inv = DMatrix::from_vec(side, side, repr.dbar_inv);
        let dt = kelvin_len(repr.dim);
        let w_top = (&dbar * &q).rows(0, dt).into_owned();
        Ok(Self {
            dim: repr.dim,
            n: repr.n,
            lambda,
            q,
            dbar,
            dbar_inv,
            w_top,
            bounds: repr.bounds,
            material_hash: repr.material_hash,
        })
    }

    /// Loads an evaluator and verifies it was built from `m`.
    pub fn load_for(path: &Path, m: &BurgersMaterial) -> Result<Self> {
        let ev = Self::load(path)?;
        if ev.material_hash != material_fingerprint(m) {
            return Err(Error::Config(
                "evaluator file does not match the configured material".into(),
            ));
        }
        Ok(ev)
    }
}

const EVALUATOR_FILE_VERSION: u32 = 1;

#[derive(Serialize, Deserialize)]
struct EvaluatorFile {
    version: u32,
    material_hash: u64,
    dim: usize,
    n: usize,
    eigenvalues: Vec<f64>,
    q: Vec<f64>,
    dbar: Vec<f64>,
    dbar_inv: Vec<f64>,
    bounds: SpectralBounds,
}

/// Stable FNV-1a fingerprint of the material's defining data.
pub fn material_fingerprint(m: &BurgersMaterial) -> u64 {
    let mut h: u64 = 0xcbf29ce484222325;
    let mut eat = |bytes: &[u8]| {
        for &b in bytes {
            h ^= b as u64;
            h = h.wrapping_mul(0x100000001b3);
        }
    };
    eat(&(m.dim() as u64).to_le_bytes());
    eat(&(m.n() as u64).to_le_bytes());
    eat(&m.rho().to_bits().to_le_bytes());
    for e in m.eta() {
        eat(&e.to_bits().to_le_bytes());
    }
    for c in m.c() {
        for v in c.kelvin_matrix().iter() {
            eat(&v.to_bits().to_le_bytes());
        }
    }
    h
}

/// One violated derivative estimate.
#[derive(Debug, Clone)]
pub struct EstimateViolation {
    pub t: f64,
    pub j: usize,
    pub derivative_order: usize,
    pub side: &'static str,
    pub margin: f64,
}

/// Result of sweeping the two-sided derivative estimates over a grid.
#[derive(Debug, Clone)]
pub struct EstimateReport {
    pub checked: usize,
    pub worst_margin: f64,
    pub violations: Vec<EstimateViolation>,
}

impl EstimateReport {
    pub fn passed(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn first_violation(&self) -> Option<&EstimateViolation> {
        self.violations.first()
    }
}

/// Checks the two-sided eigenvalue estimates on G^(k), k = 0..2j_max+1,
/// at every grid point. A side fails when the smallest eigenvalue of the
/// difference drops below −tol·scale, with scale = β₂²α₁ᵏe^{−α₂t}.
pub fn verify_estimates(
    ev: &RelaxationEvaluator,
    t_grid: &[f64],
    j_max: usize,
    tol: f64,
) -> EstimateReport {
    let b = ev.bounds();
    let dt = kelvin_len(ev.dim());
    let eye = DMatrix::<f64>::identity(dt, dt);
    let mut checked = 0;
    let mut worst: f64 = f64::INFINITY;
    let mut violations = Vec::new();
    for &t in t_grid {
        if t < 0.0 {
            continue;
        }
        for j in 0..=j_max {
            for (k, lower, upper) in [
                (
                    2 * j,
                    b.beta1 * b.beta1 * b.alpha2.powi(2 * j as i32) * (-b.alpha1 * t).exp(),
                    b.beta2 * b.beta2 * b.alpha1.powi(2 * j as i32) * (-b.alpha2 * t).exp(),
                ),
                (
                    2 * j + 1,
                    -b.beta2 * b.beta2 * b.alpha1.powi(2 * j as i32 + 1) * (-b.alpha2 * t).exp(),
                    -b.beta1 * b.beta1 * b.alpha2.powi(2 * j as i32 + 1) * (-b.alpha1 * t).exp(),
                ),
            ] {
                let g = ev.eval_g_deriv(t, k);
                let scale = b.beta2 * b.beta2 * b.alpha1.powi(k as i32) * (-b.alpha2 * t).exp();
                let low_margin = min_eig(&(g.kelvin_matrix() - &eye * lower)) / scale;
                let up_margin = min_eig(&(&eye * upper - g.kelvin_matrix())) / scale;
                checked += 1;
                worst = worst.min(low_margin.min(up_margin));
                if low_margin < -tol {
                    violations.push(EstimateViolation {
                        t,
                        j,
                        derivative_order: k,
                        side: "lower",
                        margin: low_margin,
                    });
                }
                if up_margin < -tol {
                    violations.push(EstimateViolation {
                        t,
                        j,
                        derivative_order: k,
                        side: "upper",
                        margin: up_margin,
                    });
                }
            }
        }
    }
    EstimateReport {
        checked,
        worst_margin: worst,
        violations,
    }
}

fn min_eig(m: &DMatrix<f64>) -> f64 {
    crate::linalg::min_eig(m)
}

/// Verified decay constants for the kernel H = −Ġ.
///
/// κ₁..κ₄ and κ̃₄ come from the spectral bounds; κ₅ ≥ κ₆ > 0 are the decay
/// rates of the two-sided envelope β₁²e^{−κ₅T} ≤ G(T) ≤ β₂²e^{−κ₆T}.
/// When `pure_exponential_item_v` is true (β₁ ≥ 1 ≥ β₂) the prefactors can
/// be dropped, so the same κ₅/κ₆ certify the pure-exponential envelope
/// e^{−κ₅T} ≤ G(T) ≤ e^{−κ₆T}; otherwise only the prefactored form is
/// certified.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DecayCertificate {
    pub kappa1: f64,
    pub kappa2: f64,
    pub kappa3: f64,
    pub kappa4: f64,
    pub kappa4_tilde: f64,
    pub kappa5: f64,
    pub kappa6: f64,
    pub beta1_sq: f64,
    pub beta2_sq: f64,
    pub pure_exponential_item_v: bool,
    /// Verification horizon [t_min, t_max].
    pub horizon: (f64, f64),
    /// Number of grid points checked.
    pub samples: usize,
    /// Worst signed margin across all grid inequalities (≥ −tol·scale).
    pub worst_margin: f64,
}

/// Kernel-inequality checks at a single time, split out so negative
/// controls can probe them with tampered values.
pub(crate) fn check_kernel_inequalities(
    h: &DMatrix<f64>,
    h_dot: &DMatrix<f64>,
    h_ddot: &DMatrix<f64>,
    kappa1: f64,
    kappa2: f64,
    kappa3: f64,
    tol: f64,
) -> std::result::Result<f64, (&'static str, String)> {
    let scale = kappa1 * h.norm() + h_dot.norm() + 1e-300;
    // -kappa1 H <= Hdot <= -kappa2 H
    let upper = min_eig(&(-(h_dot.clone()) - h * kappa2)) / scale;
    let lower = min_eig(&(h_dot + h * kappa1)) / scale;
    let mut worst = upper.min(lower);
    if upper < -tol {
        return Err((
            "(ii) Hdot <= -kappa2 H",
            format!("margin {upper:.3e} below -{tol:.1e}"),
        ));
    }
    if lower < -tol {
        return Err((
            "(ii) -kappa1 H <= Hdot",
            format!("margin {lower:.3e} below -{tol:.1e}"),
        ));
    }
    // Hddot <= kappa3 H
    let scale2 = kappa3 * h.norm() + h_ddot.norm() + 1e-300;
    let second = min_eig(&(h * kappa3 - h_ddot)) / scale2;
    worst = worst.min(second);
    if second < -tol {
        return Err((
            "(ii) Hddot <= kappa3 H",
            format!("margin {second:.3e} below -{tol:.1e}"),
        ));
    }
    Ok(worst)
}

/// Certifies the exponential-decay conditions on the grid and returns the
/// constants.
///
/// The grid must start at 0 and reach at least 10/α₂. Matrix inequalities
/// are verified with tolerance `1e-9·scale` at every point; the first
/// violation aborts with the offending item and time.
pub fn decay_certificate(ev: &RelaxationEvaluator, t_grid: &[f64]) -> Result<DecayCertificate> {
    const TOL: f64 = 1e-9;
    let b = ev.bounds();
    let mut grid: Vec<f64> = t_grid.iter().cloned().filter(|t| *t >= 0.0).collect();
    grid.sort_by(|x, y| x.partial_cmp(y).unwrap());
    if grid.is_empty() || grid[0] > 1e-12 {
        return Err(Error::CertificateFailed {
            item: "grid",
            t: *grid.first().unwrap_or(&f64::NAN),
            detail: "verification grid must start at t = 0".into(),
        });
    }
    let t_max = *grid.last().unwrap();
    if t_max < 10.0 / b.alpha2 * (1.0 - 1e-12) {
        return Err(Error::CertificateFailed {
            item: "grid",
            t: t_max,
            detail: format!("grid must reach 10/alpha2 = {:.6e}", 10.0 / b.alpha2),
        });
    }

    let kappa1 = b.alpha1;
    let kappa2 = b.alpha2;
    let kappa3 = b.alpha1 * b.alpha1;
    let kappa4 = b.beta2 * b.beta2 * b.alpha1 * (1.0 + b.alpha1);
    let kappa4_tilde = b.alpha2;
    let beta1_sq = b.beta1 * b.beta1;
    let beta2_sq = b.beta2 * b.beta2;

    let dt = kelvin_len(ev.dim());
    let eye = DMatrix::<f64>::identity(dt, dt);
    let mut worst = f64::INFINITY;

    // item (iii)/(iv) at t = 0: K = G(0) symmetric strongly convex
    let k0 = ev.eval_g(0.0);
    let k_min = k0.min_eigenvalue();
    if k_min <= 0.0 {
        return Err(Error::CertificateFailed {
            item: "(iv) K strongly convex",
            t: 0.0,
            detail: format!("min eigenvalue {k_min:.3e}"),
        });
    }

    for &t in &grid {
        let h = ev.eval_g_deriv(t, 1).kelvin_matrix() * -1.0;
        let h_dot = ev.eval_g_deriv(t, 2).kelvin_matrix() * -1.0;
        let h_ddot = ev.eval_g_deriv(t, 3).kelvin_matrix() * -1.0;

        // item (iii): major symmetry is structural; the raw block residual
        // is absorbed at construction, so only record the identity margin.
        // item (iv): H(t) strongly convex, checked against its provable
        // floor beta1^2 alpha2 e^{-alpha1 t}.
        let floor = beta1_sq * b.alpha2 * (-b.alpha1 * t).exp();
        let conv_margin = (min_eig(&h) - floor * (1.0 - TOL)) / (floor + h.norm() * TOL + 1e-300);
        if conv_margin < -TOL {
            return Err(Error::CertificateFailed {
                item: "(iv) H strongly convex",
                t,
                detail: format!("min eig {:.6e} below floor {:.6e}", min_eig(&h), floor),
            });
        }
        worst = worst.min(conv_margin);

        match check_kernel_inequalities(&h, &h_dot, &h_ddot, kappa1, kappa2, kappa3, TOL) {
            Ok(m) => worst = worst.min(m),
            Err((item, detail)) => {
                return Err(Error::CertificateFailed { item, t, detail });
            }
        }

        // item (ii) decay envelope: |H| + |Hdot| <= kappa4 e^{-kappa4~ t}
        let envelope = kappa4 * (-kappa4_tilde * t).exp();
        let lhs = spectral_norm(&h) + spectral_norm(&h_dot);
        let env_margin = (envelope - lhs) / envelope;
        if env_margin < -TOL {
            return Err(Error::CertificateFailed {
                item: "(ii) |H|+|Hdot| <= kappa4 exp(-kappa4~ t)",
                t,
                detail: format!("{lhs:.6e} > {envelope:.6e}"),
            });
        }
        worst = worst.min(env_margin);

        // item (v), prefactored: beta1^2 e^{-alpha1 T} I <= G(T) <= beta2^2 e^{-alpha2 T} I
        if t > 0.0 {
            let g = ev.eval_g(t);
            let low = beta1_sq * (-b.alpha1 * t).exp();
            let up = beta2_sq * (-b.alpha2 * t).exp();
            let scale = up;
            let low_margin = min_eig(&(g.kelvin_matrix() - &eye * low)) / scale;
            let up_margin = min_eig(&(&eye * up - g.kelvin_matrix())) / scale;
            if low_margin < -TOL || up_margin < -TOL {
                return Err(Error::CertificateFailed {
                    item: "(v) two-sided envelope on G",
                    t,
                    detail: format!("margins ({low_margin:.3e}, {up_margin:.3e})"),
                });
            }
            worst = worst.min(low_margin.min(up_margin));
        }
    }

    Ok(DecayCertificate {
        kappa1,
        kappa2,
        kappa3,
        kappa4,
        kappa4_tilde,
        kappa5: b.alpha1,
        kappa6: b.alpha2,
        beta1_sq,
        beta2_sq,
        pure_exponential_item_v: b.beta1 >= 1.0 && b.beta2 <= 1.0,
        horizon: (grid[0], t_max),
        samples: grid.len(),
        worst_margin: worst,
    })
}

fn spectral_norm(m: &DMatrix<f64>) -> f64 {
    crate::linalg::spectral_norm(m)
}

/// Relative residual of K − ∫₀ᵀ H dt = G(T), with the integral evaluated by
/// adaptive Simpson quadrature on the Kelvin entries (independent of the
/// closed-form integral used elsewhere).
pub fn ftc_residual(ev: &RelaxationEvaluator, t_end: f64, quad_tol: f64) -> f64 {
    let f = |t: f64| ev.eval_h(t).kelvin_matrix().clone();
    let integral = adaptive_simpson_matrix(&f, 0.0, t_end, quad_tol, 30);
    let lhs = ev.eval_g(0.0).kelvin_matrix() - integral;
    let g_end = ev.eval_g(t_end);
    (lhs - g_end.kelvin_matrix()).norm() / g_end.kelvin_matrix().norm()
}

fn adaptive_simpson_matrix(
    f: &dyn Fn(f64) -> DMatrix<f64>,
    a: f64,
    b: f64,
    tol: f64,
    depth: usize,
) -> DMatrix<f64> {
    let fa = f(a);
    let fb = f(b);
    let fm = f(0.5 * (a + b));
    let whole = simpson(&fa, &fm, &fb, b - a);
    simpson_rec(f, a, b, &fa, &fm, &fb, &whole, tol, depth)
}

fn simpson(fa: &DMatrix<f64>, fm: &DMatrix<f64>, fb: &DMatrix<f64>, h: f64) -> DMatrix<f64> {
    (fa + fm * 4.0 + fb) * (h / 6.0)
}

#[allow(clippy::too_many_arguments)]
fn simpson_rec(
    f: &dyn Fn(f64) -> DMatrix<f64>,
    a: f64,
    b: f64,
    fa: &DMatrix<f64>,
    fm: &DMatrix<f64>,
    fb: &DMatrix<f64>,
    whole: &DMatrix<f64>,
    tol: f64,
    depth: usize,
) -> DMatrix<f64> {
    let m = 0.5 * (a + b);
    let flm = f(0.5 * (a + m));
    let frm = f(0.5 * (m + b));
    let left = simpson(fa, &flm, fm, m - a);
    let right = simpson(fm, &frm, fb, b - m);
    let correction = (&left + &right - whole) / 15.0;
    if depth == 0 || correction.norm() * 15.0 <= 15.0 * tol {
        return left + right + correction;
    }
    simpson_rec(f, a, m, fa, &flm, fm, &left, tol / 2.0, depth - 1)
        + simpson_rec(f, m, b, fm, &frm, fb, &right, tol / 2.0, depth - 1)
}
