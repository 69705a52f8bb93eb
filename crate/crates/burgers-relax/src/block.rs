//! Tensor block matrix algebra for the extended Burgers model.
//!
//! The internal-variable system for the state Y = (ψ, φ₁, …, φₙ) is
//! Ẏ = L_b Y + (ė, 0, …, 0), where L_b is an (n+1)×(n+1) block matrix of
//! fourth-order tensors. L_b is generally not symmetric, but it factors as
//! L_b = L̄ C̄ with C̄ = diag(C₀, …, Cₙ) and a symmetric L̄, which yields the
//! symmetric negative definite generator A = D̄ L̄ D̄ with D̄ = √C̄ and the
//! exponential factorization C̄ e^{tL_b} = D̄ e^{tA} D̄.
//!
//! In the Kelvin representation every block is a d̃×d̃ matrix and block
//! matrices are flat square matrices of side (n+1)d̃.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::tensor::{check_admissibility, kelvin_len, ElasticTensor4, SymTensor2, ValidationReport};

/// Stacked vector of n+1 symmetric tensors (ψ, φ₁, …, φₙ).
#[derive(Debug, Clone)]
pub struct BlockVector {
    dim: usize,
    blocks: usize,
    flat: DVector<f64>,
}

impl BlockVector {
    pub fn zero(dim: usize, blocks: usize) -> Self {
        Self {
            dim,
            blocks,
            flat: DVector::zeros(blocks * kelvin_len(dim)),
        }
    }

    pub fn from_blocks(parts: &[SymTensor2]) -> Result<Self> {
        let dim = parts
            .first()
            .ok_or_else(|| Error::InvalidMaterial("empty block vector".into()))?
            .dim();
        let dt = kelvin_len(dim);
        let mut flat = DVector::zeros(parts.len() * dt);
        for (i, p) in parts.iter().enumerate() {
            if p.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: p.dim(),
                });
            }
            flat.rows_mut(i * dt, dt).copy_from(p.kelvin());
        }
        Ok(Self {
            dim,
            blocks: parts.len(),
            flat,
        })
    }

    pub fn from_flat(dim: usize, blocks: usize, flat: DVector<f64>) -> Result<Self> {
        if flat.len() != blocks * kelvin_len(dim) {
            return Err(Error::DimensionMismatch {
                expected: blocks * kelvin_len(dim),
                got: flat.len(),
            });
        }
        Ok(Self { dim, blocks, flat })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn blocks(&self) -> usize {
        self.blocks
    }

    pub fn flat(&self) -> &DVector<f64> {
        &self.flat
    }

    pub fn block(&self, i: usize) -> SymTensor2 {
        let dt = kelvin_len(self.dim);
        SymTensor2::from_kelvin(self.dim, self.flat.rows(i * dt, dt).into_owned())
            .expect("block slice has Kelvin length")
    }

    pub fn set_block(&mut self, i: usize, value: &SymTensor2) {
        let dt = kelvin_len(self.dim);
        self.flat.rows_mut(i * dt, dt).copy_from(value.kelvin());
    }

    /// Inner product: sum of blockwise Frobenius products.
    pub fn dot(&self, other: &Self) -> f64 {
        self.flat.dot(&other.flat)
    }

    pub fn norm(&self) -> f64 {
        self.flat.norm()
    }
}

/// (n+1)×(n+1) array of d̃×d̃ Kelvin blocks, stored flat.
#[derive(Debug, Clone)]
pub struct BlockMatrix {
    dim: usize,
    blocks: usize,
    flat: DMatrix<f64>,
}

impl BlockMatrix {
    pub fn zeros(dim: usize, blocks: usize) -> Self {
        let side = blocks * kelvin_len(dim);
        Self {
            dim,
            blocks,
            flat: DMatrix::zeros(side, side),
        }
    }

    pub fn from_flat(dim: usize, blocks: usize, flat: DMatrix<f64>) -> Result<Self> {
        let side = blocks * kelvin_len(dim);
        if flat.nrows() != side || flat.ncols() != side {
            return Err(Error::DimensionMismatch {
                expected: side,
                got: flat.nrows(),
            });
        }
        Ok(Self { dim, blocks, flat })
    }

    pub fn identity(dim: usize, blocks: usize) -> Self {
        let side = blocks * kelvin_len(dim);
        Self {
            dim,
            blocks,
            flat: DMatrix::identity(side, side),
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn blocks(&self) -> usize {
        self.blocks
    }

    pub fn flat(&self) -> &DMatrix<f64> {
        &self.flat
    }

    pub fn side(&self) -> usize {
        self.blocks * kelvin_len(self.dim)
    }

    /// Copies block (i, j) out as a d̃×d̃ matrix.
    pub fn block(&self, i: usize, j: usize) -> DMatrix<f64> {
        let dt = kelvin_len(self.dim);
        self.flat.view((i * dt, j * dt), (dt, dt)).into_owned()
    }

    pub fn set_block(&mut self, i: usize, j: usize, value: &DMatrix<f64>) {
        let dt = kelvin_len(self.dim);
        self.flat.view_mut((i * dt, j * dt), (dt, dt)).copy_from(value);
    }

    pub fn mul(&self, other: &Self) -> Self {
        Self {
            dim: self.dim,
            blocks: self.blocks,
            flat: &self.flat * &other.flat,
        }
    }

    pub fn apply(&self, v: &BlockVector) -> BlockVector {
        BlockVector {
            dim: self.dim,
            blocks: self.blocks,
            flat: &self.flat * v.flat(),
        }
    }

    /// Relative symmetry residual; membership in 𝕄 means this is ≤ 1e-13.
    pub fn symmetry_residual(&self) -> f64 {
        let scale = self.flat.norm();
        if scale == 0.0 {
            return 0.0;
        }
        (&self.flat - self.flat.transpose()).norm() / scale
    }

    pub fn is_symmetric(&self, tol: f64) -> bool {
        self.symmetry_residual() <= tol
    }

    /// Smallest eigenvalue of the symmetrized flat matrix; membership in 𝕄₊
    /// additionally requires this to be ≥ γ > 0.
    pub fn min_eigenvalue(&self) -> f64 {
        crate::linalg::min_eig(&self.flat)
    }
}

/// Extended Burgers material: one Maxwell element (C₀, η₀) in series with
/// n ≥ 1 Kelvin–Voigt elements (Cᵢ, ηᵢ), plus the mass density.
///
/// Construction validates the admissibility conditions (positive
/// viscosities, strong convexity of every Cᵢ). Immutable afterwards.
#[derive(Debug, Clone)]
pub struct BurgersMaterial {
    dim: usize,
    rho: f64,
    c: Vec<ElasticTensor4>,
    eta: Vec<f64>,
}

impl BurgersMaterial {
    pub fn new(dim: usize, rho: f64, c: Vec<ElasticTensor4>, eta: Vec<f64>) -> Result<Self> {
        if c.len() != eta.len() || c.len() < 2 {
            return Err(Error::InvalidMaterial(format!(
                "need n+1 >= 2 tensors with matching viscosities, got {} tensors and {} viscosities",
                c.len(),
                eta.len()
            )));
        }
        if rho.is_nan() || rho <= 0.0 {
            return Err(Error::InvalidMaterial(format!("rho = {rho} must be positive")));
        }
        for t in &c {
            if t.dim() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: t.dim(),
                });
            }
        }
        let report = check_admissibility(&c, &eta);
        if !report.passed() {
            return Err(Error::InvalidMaterial(report.failures.join("; ")));
        }
        Ok(Self { dim, rho, c, eta })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of Kelvin–Voigt elements.
    pub fn n(&self) -> usize {
        self.c.len() - 1
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }

    pub fn c(&self) -> &[ElasticTensor4] {
        &self.c
    }

    pub fn eta(&self) -> &[f64] {
        &self.eta
    }

    /// Reciprocal viscosities aᵢ = ηᵢ⁻¹.
    pub fn a(&self, i: usize) -> f64 {
        1.0 / self.eta[i]
    }

    pub fn validation_report(&self) -> ValidationReport {
        check_admissibility(&self.c, &self.eta)
    }
}

/// Builds L_b: first row (−(Σᵢ ηᵢ⁻¹)C₀, η₁⁻¹C₁, …, ηₙ⁻¹Cₙ), first column
/// below (ηᵢ⁻¹C₀), diagonal (−ηᵢ⁻¹Cᵢ), zeros elsewhere. Generally not
/// symmetric.
pub fn build_lb(m: &BurgersMaterial) -> BlockMatrix {
    let n = m.n();
    let mut lb = BlockMatrix::zeros(m.dim(), n + 1);
    let a_sum: f64 = (0..=n).map(|i| m.a(i)).sum();
    lb.set_block(0, 0, &(m.c()[0].kelvin_matrix() * (-a_sum)));
    for i in 1..=n {
        lb.set_block(0, i, &(m.c()[i].kelvin_matrix() * m.a(i)));
        lb.set_block(i, 0, &(m.c()[0].kelvin_matrix() * m.a(i)));
        lb.set_block(i, i, &(m.c()[i].kelvin_matrix() * (-m.a(i))));
    }
    lb
}

/// C̄ = diag(C₀, …, Cₙ).
pub fn build_cbar(m: &BurgersMaterial) -> BlockMatrix {
    let n = m.n();
    let mut cb = BlockMatrix::zeros(m.dim(), n + 1);
    for i in 0..=n {
        cb.set_block(i, i, m.c()[i].kelvin_matrix());
    }
    cb
}

/// D̄ = √C̄, blockwise principal square roots. In 𝕄₊.
pub fn build_dbar(m: &BurgersMaterial) -> Result<BlockMatrix> {
    let n = m.n();
    let mut db = BlockMatrix::zeros(m.dim(), n + 1);
    for i in 0..=n {
        db.set_block(i, i, m.c()[i].sqrt_spd()?.kelvin_matrix());
    }
    Ok(db)
}

/// L̄ = diag(−Σᵢηᵢ⁻¹ I, −η₁⁻¹ I, …, −ηₙ⁻¹ I) + M̄ + M̄ᵗ, where M̄ has first
/// row (O, η₁⁻¹ I, …, ηₙ⁻¹ I) and zeros below. Symmetric by construction.
pub fn build_lbar(m: &BurgersMaterial) -> BlockMatrix {
    let n = m.n();
    let dt = kelvin_len(m.dim());
    let eye = DMatrix::identity(dt, dt);
    let mut lbar = BlockMatrix::zeros(m.dim(), n + 1);
    let a_sum: f64 = (0..=n).map(|i| m.a(i)).sum();
    lbar.set_block(0, 0, &(&eye * (-a_sum)));
    for i in 1..=n {
        lbar.set_block(i, i, &(&eye * (-m.a(i))));
        lbar.set_block(0, i, &(&eye * m.a(i)));
        lbar.set_block(i, 0, &(&eye * m.a(i)));
    }
    lbar
}

/// The symmetric generator A = D̄ L̄ D̄ together with D̄.
///
/// A is symmetric negative definite for every admissible material.
pub fn build_a(m: &BurgersMaterial) -> Result<(BlockMatrix, BlockMatrix)> {
    let dbar = build_dbar(m)?;
    let lbar = build_lbar(m);
    let a = dbar.mul(&lbar).mul(&dbar);
    Ok((a, dbar))
}

/// Two-sided spectral bounds: α₂ 𝓘 ≤ −A ≤ α₁ 𝓘 and β₁ 𝓘 ≤ D̄ ≤ β₂ 𝓘.
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct SpectralBounds {
    pub alpha1: f64,
    pub alpha2: f64,
    pub beta1: f64,
    pub beta2: f64,
}

/// Computes (α₁, α₂, β₁, β₂) by eigendecomposition of −A and D̄.
///
/// Fails if −A is not positive definite, which signals an inadmissible
/// material upstream.
pub fn spectral_bounds(m: &BurgersMaterial) -> Result<SpectralBounds> {
    let (a, dbar) = build_a(m)?;
    let neg_a = -a.flat().clone();
    let eigs = crate::linalg::sym_eigenvalues(&neg_a);
    let alpha1 = eigs[eigs.len() - 1];
    let alpha2 = eigs[0];
    if alpha2.is_nan() || alpha2 <= 0.0 {
        return Err(Error::NotSpd { min_eig: alpha2 });
    }
    let dbar_eigs = crate::linalg::sym_eigenvalues(dbar.flat());
    let beta1 = dbar_eigs[0];
    let beta2 = dbar_eigs[dbar_eigs.len() - 1];
    Ok(SpectralBounds {
        alpha1,
        alpha2,
        beta1,
        beta2,
    })
}

/// Relative residual of the quadratic dissipation identity
///
/// ⟨−(C̄ L_b) Y, Y⟩ = η₀⁻¹|C₀ψ|² + Σᵢ ηᵢ⁻¹|C₀ψ − Cᵢφᵢ|²,
///
/// normalized by 1 + |⟨−(C̄ L_b)Y, Y⟩|.
pub fn quadratic_identity_residual(m: &BurgersMaterial, y: &BlockVector) -> Result<f64> {
    let n = m.n();
    if y.blocks() != n + 1 || y.dim() != m.dim() {
        return Err(Error::DimensionMismatch {
            expected: n + 1,
            got: y.blocks(),
        });
    }
    let lb = build_lb(m);
    let cbar = build_cbar(m);
    let clb_y = cbar.apply(&lb.apply(y));
    let lhs = -clb_y.dot(y);

    let psi = y.block(0);
    let c0_psi = m.c()[0].apply(&psi)?;
    let mut rhs = m.a(0) * c0_psi.dot(&c0_psi);
    for i in 1..=n {
        let ci_phi = m.c()[i].apply(&y.block(i))?;
        let diff = c0_psi.sub(&ci_phi);
        rhs += m.a(i) * diff.dot(&diff);
    }
    Ok((lhs - rhs).abs() / (1.0 + lhs.abs()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sample;
    use approx::assert_relative_eq;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    /// Entry-wise construction of L_b straight from its definition,
    /// independent of `build_lb`'s block writes.
    fn lb_entrywise_oracle(m: &BurgersMaterial) -> DMatrix<f64> {
        let n = m.n();
        let dt = kelvin_len(m.dim());
        let side = (n + 1) * dt;
        let mut out = DMatrix::zeros(side, side);
        for bi in 0..=n {
            for bj in 0..=n {
                for r in 0..dt {
                    for c in 0..dt {
                        let v = if bi == 0 && bj == 0 {
                            -(0..=n).map(|i| m.a(i)).sum::<f64>() * m.c()[0].kelvin_matrix()[(r, c)]
                        } else if bi == 0 {
                            m.a(bj) * m.c()[bj].kelvin_matrix()[(r, c)]
                        } else if bj == 0 {
                            m.a(bi) * m.c()[0].kelvin_matrix()[(r, c)]
                        } else if bi == bj {
                            -m.a(bi) * m.c()[bi].kelvin_matrix()[(r, c)]
                        } else {
                            0.0
                        };
                        out[(bi * dt + r, bj * dt + c)] = v;
                    }
                }
            }
        }
        out
    }

    #[test]
    fn lb_unit_surrogate_is_two_by_two_pattern() {
        let m = sample::unit_surrogate(2).unwrap();
        let lb = build_lb(&m);
        let dt = kelvin_len(2);
        let eye = DMatrix::<f64>::identity(dt, dt);
        assert_relative_eq!((lb.block(0, 0) + &eye * 2.0).norm(), 0.0, epsilon = 1e-15);
        assert_relative_eq!((lb.block(0, 1) - &eye).norm(), 0.0, epsilon = 1e-15);
        assert_relative_eq!((lb.block(1, 0) - &eye).norm(), 0.0, epsilon = 1e-15);
        assert_relative_eq!((lb.block(1, 1) + &eye).norm(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn lb_matches_entrywise_oracle() {
        let c0 = ElasticTensor4::isotropic(3, 1.0, 1.0).unwrap();
        let c1 = ElasticTensor4::isotropic(3, 0.5, 2.0).unwrap();
        let m = BurgersMaterial::new(3, 1.0, vec![c0, c1], vec![2.0, 0.5]).unwrap();
        let lb = build_lb(&m);
        let oracle = lb_entrywise_oracle(&m);
        assert_relative_eq!((lb.flat() - &oracle).norm(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn lb_sparsity_for_n2() {
        let mut rng = StdRng::seed_from_u64(5);
        let m = sample::random_material(&mut rng, 3, 2).unwrap();
        let lb = build_lb(&m);
        assert_eq!(lb.block(1, 2).norm(), 0.0);
        assert_eq!(lb.block(2, 1).norm(), 0.0);
        // L_b itself is not symmetric for a generic material
        assert!(lb.symmetry_residual() > 1e-3);
    }

    #[test]
    fn unit_surrogate_a_matrix_and_bounds() {
        let m = sample::unit_surrogate(2).unwrap();
        let (a, dbar) = build_a(&m).unwrap();
        let dt = kelvin_len(2);
        // D = identity, A = [[-2, 1], [1, -1]] per Kelvin channel
        assert_relative_eq!(
            (dbar.flat() - DMatrix::<f64>::identity(2 * dt, 2 * dt)).norm(),
            0.0,
            epsilon = 1e-14
        );
        let eye = DMatrix::<f64>::identity(dt, dt);
        assert_relative_eq!((a.block(0, 0) + &eye * 2.0).norm(), 0.0, epsilon = 1e-14);
        assert_relative_eq!((a.block(0, 1) - &eye).norm(), 0.0, epsilon = 1e-14);
        assert_relative_eq!((a.block(1, 1) + &eye).norm(), 0.0, epsilon = 1e-14);

        // closed-form 2x2 eigendecomposition oracle: eigs of -[[-2,1],[1,-1]]
        // are (3 ± √5)/2
        let b = spectral_bounds(&m).unwrap();
        let s5 = 5.0f64.sqrt();
        assert_relative_eq!(b.alpha1, (3.0 + s5) / 2.0, max_relative = 1e-14);
        assert_relative_eq!(b.alpha2, (3.0 - s5) / 2.0, max_relative = 1e-14);
        assert_relative_eq!(b.beta1, 1.0, max_relative = 1e-14);
        assert_relative_eq!(b.beta2, 1.0, max_relative = 1e-14);
    }

    #[test]
    fn factorization_lb_equals_lbar_cbar() {
        let mut rng = StdRng::seed_from_u64(41);
        for _ in 0..100 {
            let dim = if rng.gen_bool(0.5) { 2 } else { 3 };
            let n = rng.gen_range(1..=3);
            let m = sample::random_material(&mut rng, dim, n).unwrap();
            let lb = build_lb(&m);
            let prod = build_lbar(&m).mul(&build_cbar(&m));
            let rel = (lb.flat() - prod.flat()).norm() / lb.flat().norm();
            assert!(rel <= 1e-13, "L_b != Lbar*Cbar: rel={rel:.3e}");
        }
    }

    #[test]
    fn a_is_symmetric_negative_definite() {
        let mut rng = StdRng::seed_from_u64(42);
        for _ in 0..100 {
            let dim = if rng.gen_bool(0.5) { 2 } else { 3 };
            let n = rng.gen_range(1..=3);
            let m = sample::random_material(&mut rng, dim, n).unwrap();
            let (a, _) = build_a(&m).unwrap();
            assert!(a.symmetry_residual() <= 1e-13);
            let bounds = spectral_bounds(&m).unwrap();
            assert!(bounds.alpha2 > 0.0);
            assert!(bounds.alpha1 > bounds.alpha2);
        }
    }

    #[test]
    fn quadratic_identity_holds() {
        let mut rng = StdRng::seed_from_u64(43);
        let m = sample::unit_surrogate(3).unwrap();
        // Y = 0
        let y = BlockVector::zero(3, 2);
        assert_eq!(quadratic_identity_residual(&m, &y).unwrap(), 0.0);

        // psi = 0 reduces to sum eta_i^{-1} |C_i phi_i|^2
        for _ in 0..50 {
            let mut y = sample::random_block_vector(&mut rng, 3, 2);
            y.set_block(0, &SymTensor2::zero(3));
            assert!(quadratic_identity_residual(&m, &y).unwrap() <= 1e-12);
        }

        // random materials and vectors
        let mut worst = 0.0f64;
        for _ in 0..1000 {
            let dim = if rng.gen_bool(0.5) { 2 } else { 3 };
            let n = rng.gen_range(1..=3);
            let m = sample::random_material(&mut rng, dim, n).unwrap();
            let y = sample::random_block_vector(&mut rng, dim, n + 1);
            worst = worst.max(quadratic_identity_residual(&m, &y).unwrap());
        }
        assert!(worst <= 1e-12, "worst residual {worst:.3e}");
    }

    #[test]
    fn dissipation_lower_bound() {
        // <-(Cbar Lb) Y, Y> >= alpha2 * beta1^2 ||Y||^2
        let mut rng = StdRng::seed_from_u64(44);
        for _ in 0..50 {
            let dim = if rng.gen_bool(0.5) { 2 } else { 3 };
            let n = rng.gen_range(1..=3);
            let m = sample::random_material(&mut rng, dim, n).unwrap();
            let b = spectral_bounds(&m).unwrap();
            let c = b.alpha2 * b.beta1 * b.beta1;
            let lb = build_lb(&m);
            let cbar = build_cbar(&m);
            for _ in 0..10 {
                let y = sample::random_block_vector(&mut rng, dim, n + 1);
                let lhs = -cbar.apply(&lb.apply(&y)).dot(&y);
                assert!(
                    lhs >= c * y.dot(&y) * (1.0 - 1e-10),
                    "dissipation bound violated: {lhs} < {}",
                    c * y.dot(&y)
                );
            }
        }
    }
}
