//! Seeded material and input generators for property sweeps, demos, and the
//! `compare` command.
//!
//! All generators are deterministic given the RNG state.

use nalgebra::DMatrix;
use rand::Rng;

use crate::block::{BlockVector, BurgersMaterial};
use crate::constitutive::StrainHistory;
use crate::error::Result;
use crate::tensor::{kelvin_len, ElasticTensor4, SymTensor2};

/// The scalar Burgers surrogate: n = 1, C₀ = C₁ = identity, η₀ = η₁ = 1.
/// Every Kelvin channel carries the same scalar dynamics, so closed forms
/// from the 2×2 channel system apply verbatim.
pub fn unit_surrogate(dim: usize) -> Result<BurgersMaterial> {
    BurgersMaterial::new(
        dim,
        1.0,
        vec![ElasticTensor4::identity(dim), ElasticTensor4::identity(dim)],
        vec![1.0, 1.0],
    )
}

/// Random orthogonal d̃×d̃ matrix via QR of a Gaussian matrix, with the sign
/// convention that makes R's diagonal positive (deterministic for a given
/// RNG).
fn random_orthogonal<R: Rng>(rng: &mut R, side: usize) -> DMatrix<f64> {
    let g = DMatrix::from_fn(side, side, |_, _| {
        // Box-Muller from two uniforms; avoids extra dependencies
        let u1: f64 = rng.gen_range(f64::EPSILON..1.0);
        let u2: f64 = rng.gen_range(0.0..1.0);
        (-2.0 * u1.ln()).sqrt() * (2.0 * std::f64::consts::PI * u2).cos()
    });
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..side {
        if r[(j, j)] < 0.0 {
            for i in 0..side {
                q[(i, j)] = -q[(i, j)];
            }
        }
    }
    q
}

/// Random SPD Kelvin tensor with eigenvalues log-uniform in [0.5, 3].
pub fn random_spd_tensor<R: Rng>(rng: &mut R, dim: usize) -> ElasticTensor4 {
    let dt = kelvin_len(dim);
    let q = random_orthogonal(rng, dt);
    spd_from_basis(dim, &q, rng)
}

fn spd_from_basis<R: Rng>(dim: usize, q: &DMatrix<f64>, rng: &mut R) -> ElasticTensor4 {
    let dt = kelvin_len(dim);
    let mut m = DMatrix::zeros(dt, dt);
    for j in 0..dt {
        let lam = (rng.gen_range(0.5f64.ln()..3.0f64.ln())).exp();
        let col = q.column(j);
        m += col * col.transpose() * lam;
    }
    ElasticTensor4::from_kelvin_matrix(dim, m).expect("spd construction is symmetric")
}

fn random_viscosities<R: Rng>(rng: &mut R, count: usize) -> Vec<f64> {
    (0..count)
        .map(|_| (rng.gen_range(0.5f64.ln()..2.0f64.ln())).exp())
        .collect()
}

/// Random admissible material with independently drawn (generally
/// non-commuting) SPD tensors.
pub fn random_material<R: Rng>(rng: &mut R, dim: usize, n: usize) -> Result<BurgersMaterial> {
    let c = (0..=n).map(|_| random_spd_tensor(rng, dim)).collect();
    BurgersMaterial::new(dim, 1.0, c, random_viscosities(rng, n + 1))
}

/// Random commuting material: all tensors share one random eigenbasis.
pub fn random_commuting_material<R: Rng>(rng: &mut R, dim: usize, n: usize) -> Result<BurgersMaterial> {
    let q = random_orthogonal(rng, kelvin_len(dim));
    let c = (0..=n).map(|_| spd_from_basis(dim, &q, rng)).collect();
    BurgersMaterial::new(dim, 1.0, c, random_viscosities(rng, n + 1))
}

/// Random isotropic material (always commuting).
pub fn random_isotropic_material<R: Rng>(rng: &mut R, dim: usize, n: usize) -> Result<BurgersMaterial> {
    let c = (0..=n)
        .map(|_| {
            let mu = rng.gen_range(0.5..2.0);
            let lambda = rng.gen_range(0.3..2.0);
            ElasticTensor4::isotropic(dim, lambda, mu)
        })
        .collect::<Result<Vec<_>>>()?;
    BurgersMaterial::new(dim, 1.0, c, random_viscosities(rng, n + 1))
}

/// Random stacked block vector with entries uniform in [-1, 1].
pub fn random_block_vector<R: Rng>(rng: &mut R, dim: usize, blocks: usize) -> BlockVector {
    let mut v = BlockVector::zero(dim, blocks);
    for i in 0..blocks {
        v.set_block(i, &random_sym_tensor(rng, dim));
    }
    v
}

/// Random symmetric second-order tensor with dense entries in [-1, 1].
pub fn random_sym_tensor<R: Rng>(rng: &mut R, dim: usize) -> SymTensor2 {
    let mut m = DMatrix::zeros(dim, dim);
    for p in 0..dim {
        for q in p..dim {
            let v = rng.gen_range(-1.0..1.0);
            m[(p, q)] = v;
            m[(q, p)] = v;
        }
    }
    SymTensor2::from_matrix(&m).expect("symmetric by construction")
}

/// Random piecewise-linear strain history on a uniform grid, starting at
/// zero strain.
pub fn random_history<R: Rng>(
    rng: &mut R,
    dim: usize,
    nodes: usize,
    t_max: f64,
) -> Result<StrainHistory> {
    assert!(nodes >= 2);
    let times: Vec<f64> = (0..nodes)
        .map(|i| t_max * i as f64 / (nodes - 1) as f64)
        .collect();
    let mut values = Vec::with_capacity(nodes);
    let mut current = SymTensor2::zero(dim);
    values.push(current.clone());
    for _ in 1..nodes {
        current = current.add(&random_sym_tensor(rng, dim).scale(0.2));
        values.push(current.clone());
    }
    StrainHistory::new(times, values)
}
