//! Fourth-order fully symmetric tensor algebra in the Kelvin representation.
//!
//! Symmetric second-order tensors in d ∈ {2,3} are stored as vectors of
//! length d̃ = d(d+1)/2 with √2-weighted shear components, so that the
//! Frobenius inner product of two tensors equals the Euclidean inner product
//! of their vectors. A fully symmetric fourth-order tensor then becomes a
//! symmetric d̃×d̃ matrix whose eigenvalues are the true tensor eigenvalues:
//! positive definiteness of the matrix is exactly strong convexity of the
//! tensor, and spectral projections are orthogonal.
//!
//! Component ordering is a frozen contract used by all file I/O:
//!
//! * d = 3 → (11, 22, 33, 23, 13, 12)
//! * d = 2 → (11, 22, 12)

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

const SQRT2: f64 = std::f64::consts::SQRT_2;

/// Number of Kelvin components for spatial dimension `dim`.
pub fn kelvin_len(dim: usize) -> usize {
    dim * (dim + 1) / 2
}

/// Index pairs (p, q) of the Kelvin components, in the frozen ordering.
pub fn kelvin_index_pairs(dim: usize) -> &'static [(usize, usize)] {
    match dim {
        2 => &[(0, 0), (1, 1), (0, 1)],
        3 => &[(0, 0), (1, 1), (2, 2), (1, 2), (0, 2), (0, 1)],
        _ => panic!("unsupported dimension {dim}"),
    }
}

fn check_dim(dim: usize) -> Result<()> {
    if dim == 2 || dim == 3 {
        Ok(())
    } else {
        Err(Error::DimensionMismatch {
            expected: 3,
            got: dim,
        })
    }
}

/// Symmetric second-order tensor (strain or stress) stored as a Kelvin vector.
#[derive(Debug, Clone, PartialEq)]
pub struct SymTensor2 {
    dim: usize,
    kelvin: DVector<f64>,
}

impl SymTensor2 {
    /// Builds from raw Kelvin components (off-diagonals carry weight √2).
    pub fn from_kelvin(dim: usize, kelvin: DVector<f64>) -> Result<Self> {
        check_dim(dim)?;
        if kelvin.len() != kelvin_len(dim) {
            return Err(Error::DimensionMismatch {
                expected: kelvin_len(dim),
                got: kelvin.len(),
            });
        }
        Ok(Self { dim, kelvin })
    }

    pub fn zero(dim: usize) -> Self {
        Self {
            dim,
            kelvin: DVector::zeros(kelvin_len(dim)),
        }
    }

    /// Kelvin vector of the d×d identity matrix.
    pub fn identity(dim: usize) -> Self {
        let mut k = DVector::zeros(kelvin_len(dim));
        for i in 0..dim {
            k[i] = 1.0;
        }
        Self { dim, kelvin: k }
    }

    /// Converts a dense symmetric matrix to Kelvin form.
    ///
    /// The input must be symmetric; the upper triangle is read.
    pub fn from_matrix(mat: &DMatrix<f64>) -> Result<Self> {
        let dim = mat.nrows();
        check_dim(dim)?;
        if mat.ncols() != dim {
            return Err(Error::DimensionMismatch {
                expected: dim,
                got: mat.ncols(),
            });
        }
        let pairs = kelvin_index_pairs(dim);
        let mut k = DVector::zeros(pairs.len());
        for (a, &(p, q)) in pairs.iter().enumerate() {
            k[a] = if p == q { mat[(p, q)] } else { SQRT2 * mat[(p, q)] };
        }
        Ok(Self { dim, kelvin: k })
    }

    /// Converts back to the dense d×d symmetric matrix.
    pub fn to_matrix(&self) -> DMatrix<f64> {
        let pairs = kelvin_index_pairs(self.dim);
        let mut m = DMatrix::zeros(self.dim, self.dim);
        for (a, &(p, q)) in pairs.iter().enumerate() {
            if p == q {
                m[(p, q)] = self.kelvin[a];
            } else {
                let v = self.kelvin[a] / SQRT2;
                m[(p, q)] = v;
                m[(q, p)] = v;
            }
        }
        m
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kelvin(&self) -> &DVector<f64> {
        &self.kelvin
    }

    /// Frobenius inner product; equals the Euclidean product of Kelvin vectors.
    pub fn dot(&self, other: &Self) -> f64 {
        self.kelvin.dot(&other.kelvin)
    }

    /// Frobenius norm.
    pub fn norm(&self) -> f64 {
        self.kelvin.norm()
    }

    pub fn scale(&self, s: f64) -> Self {
        Self {
            dim: self.dim,
            kelvin: &self.kelvin * s,
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        Self {
            dim: self.dim,
            kelvin: &self.kelvin + &other.kelvin,
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        Self {
            dim: self.dim,
            kelvin: &self.kelvin - &other.kelvin,
        }
    }
}

/// Fully symmetric fourth-order tensor as a symmetric d̃×d̃ Kelvin matrix.
///
/// Minor symmetry is structural (the representation cannot encode a
/// violation); major symmetry is validated at construction.
#[derive(Debug, Clone, PartialEq)]
pub struct ElasticTensor4 {
    dim: usize,
    kelvin_mat: DMatrix<f64>,
}

/// Relative asymmetry allowed in an `ElasticTensor4` Kelvin matrix.
pub const MAJOR_SYMMETRY_TOL: f64 = 1e-14;

impl ElasticTensor4 {
    /// Builds from a Kelvin matrix, validating major symmetry and
    /// storing the symmetrized matrix.
    pub fn from_kelvin_matrix(dim: usize, mat: DMatrix<f64>) -> Result<Self> {
        check_dim(dim)?;
        let dt = kelvin_len(dim);
        if mat.nrows() != dt || mat.ncols() != dt {
            return Err(Error::DimensionMismatch {
                expected: dt,
                got: mat.nrows(),
            });
        }
        let asym = (&mat - mat.transpose()).norm();
        let scale = mat.norm();
        if scale > 0.0 && asym > MAJOR_SYMMETRY_TOL * scale {
            return Err(Error::InvalidMaterial(format!(
                "major symmetry violated: relative residual {:.3e}",
                asym / scale
            )));
        }
        let sym = (&mat + mat.transpose()) * 0.5;
        Ok(Self {
            dim,
            kelvin_mat: sym,
        })
    }

    /// Converts an engineering-Voigt stiffness matrix to Kelvin form.
    ///
    /// Voigt convention: strain vector carries doubled shears (γ = 2e),
    /// stress vector carries plain shears. The conversion scales row and
    /// column `a` by √2 whenever `a` is a shear index.
    pub fn from_voigt_matrix(dim: usize, mat: DMatrix<f64>) -> Result<Self> {
        check_dim(dim)?;
        let dt = kelvin_len(dim);
        if mat.nrows() != dt || mat.ncols() != dt {
            return Err(Error::DimensionMismatch {
                expected: dt,
                got: mat.nrows(),
            });
        }
        let mut k = mat;
        for a in dim..dt {
            for b in 0..dt {
                k[(a, b)] *= SQRT2;
            }
        }
        for b in dim..dt {
            for a in 0..dt {
                k[(a, b)] *= SQRT2;
            }
        }
        Self::from_kelvin_matrix(dim, k)
    }

    /// Identity tensor: acts as the identity on symmetric matrices.
    pub fn identity(dim: usize) -> Self {
        let dt = kelvin_len(dim);
        Self {
            dim,
            kelvin_mat: DMatrix::identity(dt, dt),
        }
    }

    pub fn zero(dim: usize) -> Self {
        let dt = kelvin_len(dim);
        Self {
            dim,
            kelvin_mat: DMatrix::zeros(dt, dt),
        }
    }

    /// Isotropic tensor c_pqrs = λ δ_pq δ_rs + μ (δ_pr δ_qs + δ_ps δ_qr).
    ///
    /// Requires strong convexity: μ > 0 and dλ + 2μ > 0.
    pub fn isotropic(dim: usize, lambda: f64, mu: f64) -> Result<Self> {
        check_dim(dim)?;
        if mu <= 0.0 || dim as f64 * lambda + 2.0 * mu <= 0.0 {
            return Err(Error::InvalidMaterial(format!(
                "isotropic parameters violate strong convexity: mu={mu}, d*lambda+2*mu={}",
                dim as f64 * lambda + 2.0 * mu
            )));
        }
        let dt = kelvin_len(dim);
        let trace_dyad = {
            let m = SymTensor2::identity(dim);
            m.kelvin() * m.kelvin().transpose()
        };
        let mat = DMatrix::identity(dt, dt) * (2.0 * mu) + trace_dyad * lambda;
        Ok(Self {
            dim,
            kelvin_mat: mat,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kelvin_matrix(&self) -> &DMatrix<f64> {
        &self.kelvin_mat
    }

    /// Applies the tensor to a symmetric second-order tensor: Cξ.
    pub fn apply(&self, xi: &SymTensor2) -> Result<SymTensor2> {
        if xi.dim() != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: xi.dim(),
            });
        }
        SymTensor2::from_kelvin(self.dim, &self.kelvin_mat * xi.kelvin())
    }

    /// Tensor product CD. The result need not be major-symmetric when the
    /// factors do not commute, so it is returned as a general Kelvin-matrix
    /// wrapper.
    pub fn compose(&self, other: &Self) -> Result<GeneralTensor4> {
        if other.dim != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: other.dim,
            });
        }
        Ok(GeneralTensor4 {
            dim: self.dim,
            kelvin_mat: &self.kelvin_mat * &other.kelvin_mat,
        })
    }

    /// Relative commutator residual ‖CD − DC‖_F / (‖C‖_F ‖D‖_F).
    pub fn commute_residual(&self, other: &Self) -> Result<f64> {
        if other.dim != self.dim {
            return Err(Error::DimensionMismatch {
                expected: self.dim,
                got: other.dim,
            });
        }
        let cd = &self.kelvin_mat * &other.kelvin_mat;
        let dc = &other.kelvin_mat * &self.kelvin_mat;
        let denom = self.kelvin_mat.norm() * other.kelvin_mat.norm();
        if denom == 0.0 {
            return Ok(0.0);
        }
        Ok((cd - dc).norm() / denom)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.kelvin_mat.norm()
    }

    /// Smallest eigenvalue of the Kelvin matrix (the convexity constant on
    /// symmetric arguments).
    pub fn min_eigenvalue(&self) -> f64 {
        crate::linalg::min_eig(&self.kelvin_mat)
    }

    pub fn max_eigenvalue(&self) -> f64 {
        crate::linalg::max_eig(&self.kelvin_mat)
    }

    /// Spectral decomposition with eigenvalue clustering.
    ///
    /// Eigenvalues within `tol` (relative to the largest magnitude) are
    /// merged and share one projection. Fails unless the tensor is positive
    /// definite.
    pub fn spectral(&self, tol: f64) -> Result<SpectralDecomp> {
        let (vals, vecs) = crate::linalg::sym_eigen(&self.kelvin_mat);
        let min = vals[0];
        if min <= 0.0 {
            return Err(Error::NotSpd { min_eig: min });
        }
        let scale = vals.iter().cloned().fold(0.0f64, |a, b| a.max(b.abs()));
        // descending order, clustered
        let dt = kelvin_len(self.dim);
        let mut eigenvalues = Vec::new();
        let mut projections: Vec<DMatrix<f64>> = Vec::new();
        let mut members: Vec<f64> = Vec::new();
        let mut proj = DMatrix::zeros(dt, dt);
        for pos in 0..dt {
            let idx = dt - 1 - pos;
            let lam = vals[idx];
            if pos > 0 && (members.last().unwrap() - lam).abs() > tol * scale {
                eigenvalues.push(members.iter().sum::<f64>() / members.len() as f64);
                projections.push(std::mem::replace(&mut proj, DMatrix::zeros(dt, dt)));
                members.clear();
            }
            let v = vecs.column(idx);
            proj += v * v.transpose();
            members.push(lam);
        }
        eigenvalues.push(members.iter().sum::<f64>() / members.len() as f64);
        projections.push(proj);
        Ok(SpectralDecomp {
            dim: self.dim,
            eigenvalues,
            projections,
        })
    }

    /// Principal square root of a symmetric positive definite tensor.
    pub fn sqrt_spd(&self) -> Result<Self> {
        self.map_spectrum(|l| l.sqrt())
    }

    /// Inverse of a symmetric positive definite tensor.
    pub fn inverse_spd(&self) -> Result<Self> {
        self.map_spectrum(|l| 1.0 / l)
    }

    fn map_spectrum(&self, f: impl Fn(f64) -> f64) -> Result<Self> {
        let (vals, vecs) = crate::linalg::sym_eigen(&self.kelvin_mat);
        if vals[0] <= 0.0 {
            return Err(Error::NotSpd { min_eig: vals[0] });
        }
        let dt = kelvin_len(self.dim);
        let mut out = DMatrix::zeros(dt, dt);
        for i in 0..dt {
            let v = vecs.column(i);
            out += v * v.transpose() * f(vals[i]);
        }
        Self::from_kelvin_matrix(self.dim, out)
    }

    /// Dense component c_pqrs reconstructed from the Kelvin matrix.
    pub fn dense_component(&self, p: usize, q: usize, r: usize, s: usize) -> f64 {
        let pairs = kelvin_index_pairs(self.dim);
        let mut total = 0.0;
        for (a, &(ap, aq)) in pairs.iter().enumerate() {
            let ea = basis_entry(ap, aq, p, q);
            if ea == 0.0 {
                continue;
            }
            for (b, &(bp, bq)) in pairs.iter().enumerate() {
                let eb = basis_entry(bp, bq, r, s);
                if eb != 0.0 {
                    total += self.kelvin_mat[(a, b)] * ea * eb;
                }
            }
        }
        total
    }
}

/// Entry (p,q) of the orthonormal Kelvin basis matrix for index pair (ap,aq).
fn basis_entry(ap: usize, aq: usize, p: usize, q: usize) -> f64 {
    if ap == aq {
        if p == ap && q == aq {
            1.0
        } else {
            0.0
        }
    } else if (p == ap && q == aq) || (p == aq && q == ap) {
        1.0 / SQRT2
    } else {
        0.0
    }
}

/// Fourth-order tensor with minor symmetry only; the Kelvin matrix may be
/// non-symmetric. Produced by composing non-commuting tensors.
#[derive(Debug, Clone)]
pub struct GeneralTensor4 {
    dim: usize,
    kelvin_mat: DMatrix<f64>,
}

impl GeneralTensor4 {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kelvin_matrix(&self) -> &DMatrix<f64> {
        &self.kelvin_mat
    }

    pub fn is_major_symmetric(&self, tol: f64) -> bool {
        let scale = self.kelvin_mat.norm();
        scale == 0.0 || (&self.kelvin_mat - self.kelvin_mat.transpose()).norm() <= tol * scale
    }

    /// Converts to `ElasticTensor4` if major symmetry holds within `tol`.
    pub fn try_into_elastic(self, tol: f64) -> Result<ElasticTensor4> {
        if !self.is_major_symmetric(tol) {
            let rel = (&self.kelvin_mat - self.kelvin_mat.transpose()).norm() / self.kelvin_mat.norm();
            return Err(Error::InvalidMaterial(format!(
                "product is not major-symmetric (relative residual {rel:.3e})"
            )));
        }
        let sym = (&self.kelvin_mat + self.kelvin_mat.transpose()) * 0.5;
        ElasticTensor4::from_kelvin_matrix(self.dim, sym)
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.kelvin_mat.norm()
    }
}

/// Spectral decomposition of a symmetric positive definite tensor:
/// eigenvalues in descending order with orthogonal Kelvin projections.
#[derive(Debug, Clone)]
pub struct SpectralDecomp {
    dim: usize,
    pub eigenvalues: Vec<f64>,
    pub projections: Vec<DMatrix<f64>>,
}

impl SpectralDecomp {
    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Σ λₖ Pₖ, which must reproduce the original tensor.
    pub fn reconstruct(&self) -> ElasticTensor4 {
        let dt = kelvin_len(self.dim);
        let mut m = DMatrix::zeros(dt, dt);
        for (l, p) in self.eigenvalues.iter().zip(&self.projections) {
            m += p * *l;
        }
        ElasticTensor4::from_kelvin_matrix(self.dim, m).expect("projections are symmetric")
    }

    /// Largest violation of the projection identities:
    /// ΣPₖ = I, PₖPⱼ = δₖⱼPₖ, Pₖ = Pₖᵀ.
    pub fn projection_residual(&self) -> f64 {
        let dt = kelvin_len(self.dim);
        let mut worst: f64 = 0.0;
        let mut sum = DMatrix::zeros(dt, dt);
        for p in &self.projections {
            sum += p;
            worst = worst.max((p - p.transpose()).norm());
        }
        worst = worst.max((sum - DMatrix::identity(dt, dt)).norm());
        for (k, pk) in self.projections.iter().enumerate() {
            for (j, pj) in self.projections.iter().enumerate() {
                let prod = pk * pj;
                let target = if k == j { pk.clone() } else { DMatrix::zeros(dt, dt) };
                worst = worst.max((prod - target).norm());
            }
        }
        worst
    }
}

/// Outcome of the model-admissibility check on (C₀..Cₙ, η₀..ηₙ):
/// positive viscosities, major symmetry, and strong convexity.
#[derive(Debug, Clone)]
pub struct ValidationReport {
    /// min over i of ηᵢ.
    pub eta_star: f64,
    /// min over i of the smallest Kelvin eigenvalue of Cᵢ.
    pub c_star: f64,
    /// Relative major-symmetry residual per tensor.
    pub symmetry_residuals: Vec<f64>,
    /// Human-readable failures; empty iff the check passes.
    pub failures: Vec<String>,
}

impl ValidationReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }
}

/// Checks the admissibility conditions for a tensor/viscosity family.
///
/// Passes iff every ηᵢ > 0 and every Cᵢ is strongly convex (positive
/// definite Kelvin matrix).
pub fn check_admissibility(c_list: &[ElasticTensor4], eta_list: &[f64]) -> ValidationReport {
    let mut failures = Vec::new();
    if c_list.is_empty() || c_list.len() != eta_list.len() {
        failures.push(format!(
            "need equal-length nonempty tensor and viscosity lists, got {} and {}",
            c_list.len(),
            eta_list.len()
        ));
        return ValidationReport {
            eta_star: f64::NAN,
            c_star: f64::NAN,
            symmetry_residuals: Vec::new(),
            failures,
        };
    }
    let eta_star = eta_list.iter().cloned().fold(f64::INFINITY, f64::min);
    if eta_star.is_nan() || eta_star <= 0.0 {
        let i = eta_list
            .iter()
            .position(|&e| e.is_nan() || e <= 0.0)
            .unwrap_or_default();
        failures.push(format!(
            "viscosity eta_{i} = {} is not positive",
            eta_list[i]
        ));
    }
    let mut c_star = f64::INFINITY;
    let mut symmetry_residuals = Vec::with_capacity(c_list.len());
    for (i, c) in c_list.iter().enumerate() {
        let m = c.kelvin_matrix();
        let scale = m.norm();
        let res = if scale == 0.0 {
            0.0
        } else {
            (m - m.transpose()).norm() / scale
        };
        symmetry_residuals.push(res);
        let min_eig = c.min_eigenvalue();
        if min_eig <= 0.0 {
            failures.push(format!(
                "C_{i} is not strongly convex: min Kelvin eigenvalue {min_eig:.3e}"
            ));
        }
        c_star = c_star.min(min_eig);
    }
    ValidationReport {
        eta_star,
        c_star,
        symmetry_residuals,
        failures,
    }
}
