//! Cross-check the two constructions of G(t) on a commuting family:
//! block-operator exponential vs Laplace partial fractions.
//!
//! ```bash
//! cargo run --example compare_methods
//! ```

use burgers_relax::{build_prony_form, eval_g_prony, BurgersMaterial, RelaxationEvaluator};
use rand::SeedableRng;

fn main() -> burgers_relax::Result<()> {
    // shared random eigenbasis makes the family commute exactly
    let mut rng = rand::rngs::StdRng::seed_from_u64(42);
    let material: BurgersMaterial =
        burgers_relax::sample::random_commuting_material(&mut rng, 3, 2)?;

    let ev = RelaxationEvaluator::build(&material)?;
    let pf = build_prony_form(&material, 1e-10)?;

    println!("channels: {}", pf.channels.len());
    for ch in &pf.channels {
        println!(
            "  channel {}: poles {:?}",
            ch.k + 1,
            ch.roots.iter().map(|(r, m)| format!("{r:.6} (x{m})")).collect::<Vec<_>>()
        );
    }

    let mut worst = 0.0f64;
    println!("\n   t      |G_exp - G_prony| / |G_exp|");
    for i in 0..=12 {
        let t = i as f64 * 0.75;
        let a = ev.eval_g(t);
        let b = eval_g_prony(&pf, t);
        let rel = (a.kelvin_matrix() - b.kelvin_matrix()).norm() / a.kelvin_matrix().norm();
        worst = worst.max(rel);
        println!("{t:6.2}   {rel:.3e}");
    }
    println!("\nmax discrepancy: {worst:.3e} (method agreement threshold 1e-8)");
    Ok(())
}
