//! Build the relaxation tensor of an anisotropic extended Burgers material
//! and tabulate G(t).
//!
//! ```bash
//! cargo run --example build_relaxation
//! ```

use burgers_relax::{BurgersMaterial, ElasticTensor4, RelaxationEvaluator};

fn main() -> burgers_relax::Result<()> {
    // Maxwell spring + two Kelvin-Voigt springs, 3D, mildly anisotropic:
    // isotropic parts with different moduli (commutativity is NOT required
    // for this construction)
    let c0 = ElasticTensor4::isotropic(3, 1.2, 1.0)?;
    let c1 = ElasticTensor4::isotropic(3, 0.8, 0.6)?;
    let c2 = ElasticTensor4::isotropic(3, 0.5, 1.5)?;
    let material = BurgersMaterial::new(3, 1.0, vec![c0, c1, c2], vec![1.0, 0.7, 2.0])?;

    let ev = RelaxationEvaluator::build(&material)?;
    let b = ev.bounds();
    println!("spectral bounds: alpha1={:.6} alpha2={:.6} beta1={:.6} beta2={:.6}", b.alpha1, b.alpha2, b.beta1, b.beta2);
    println!("eigenvalues of the block generator: {:?}", ev.eigenvalues().as_slice().iter().map(|l| (l * 1e4).round() / 1e4).collect::<Vec<_>>());

    println!("\n   t      min eig G(t)   max eig G(t)    envelope [b1^2 e^(-a1 t), b2^2 e^(-a2 t)]");
    for i in 0..=10 {
        let t = i as f64 * 0.5;
        let g = ev.eval_g(t);
        println!(
            "{t:6.2}   {:12.6e}  {:12.6e}    [{:.6e}, {:.6e}]",
            g.min_eigenvalue(),
            g.max_eigenvalue(),
            b.beta1 * b.beta1 * (-b.alpha1 * t).exp(),
            b.beta2 * b.beta2 * (-b.alpha2 * t).exp(),
        );
    }
    println!("\nG(-1) norm (causality): {}", ev.eval_g(-1.0).kelvin_matrix().norm());
    Ok(())
}
