//! Relaxation tensor machinery for the anisotropic extended Burgers
//! viscoelastic model.
//!
//! The extended Burgers model chains one Maxwell element (spring C₀,
//! dashpot η₀) with n Kelvin–Voigt elements (Cᵢ, ηᵢ). This crate builds
//! its relaxation tensor G(t) — the causal kernel with
//! σ(t) = ∫₀ᵗ G(t−s) ė(s) ds — by two independent routes:
//!
//! * [`relax`] — the (1,1) block of D̄ e^{tA} D̄ from the symmetric block
//!   generator A = D̄ L̄ D̄ of the internal-variable system. Works for any
//!   admissible anisotropic family and yields positivity, smoothness,
//!   causality, and two-sided exponential decay estimates.
//! * [`prony`] — Laplace-domain partial fractions over the joint spectral
//!   channels of a commuting family, producing an explicit Prony series.
//!
//! Around the kernel: [`constitutive`] drives strain histories through the
//! internal-variable system and the hereditary convolution and checks their
//! equivalence; [`fem`] runs a desk-scale P1 solver of the associated
//! viscoelastic wave system and records its energy decay; [`cli`] ties the
//! pieces into the `burgers-relax` binary.
//!
//! Symmetric tensors use the Kelvin convention throughout ([`tensor`]):
//! √2-weighted shear components in the frozen ordering (11, 22, 33, 23,
//! 13, 12) for d = 3 and (11, 22, 12) for d = 2.

pub mod block;
pub mod cli;
pub mod config;
pub mod constitutive;
pub mod csvio;
pub mod error;
pub mod fem;
pub mod linalg;
pub mod prony;
pub mod relax;
pub mod report;
pub mod sample;
pub mod tensor;

pub use block::{
    build_a, build_cbar, build_dbar, build_lb, build_lbar, quadratic_identity_residual,
    spectral_bounds, BlockMatrix, BlockVector, BurgersMaterial, SpectralBounds,
};
pub use constitutive::{
    convolve, cross_check_ode_equivalence, integrate_internal, verify_integro_differential,
    StrainHistory,
};
pub use error::{Error, Result};
pub use prony::{build_prony_form, eval_g_prony, no_maxwell_counterexample, PronyForm};
pub use relax::{decay_certificate, verify_estimates, DecayCertificate, RelaxationEvaluator};
pub use tensor::{check_admissibility, ElasticTensor4, SpectralDecomp, SymTensor2};
