//! Sweep the two-sided eigenvalue estimates on G and its time derivatives
//! over a log-spaced grid.
//!
//! ```bash
//! cargo run --example derivative_bounds
//! ```

use burgers_relax::{verify_estimates, RelaxationEvaluator};
use rand::SeedableRng;

fn main() -> burgers_relax::Result<()> {
    let mut rng = rand::rngs::StdRng::seed_from_u64(7);
    let material = burgers_relax::sample::random_material(&mut rng, 3, 3)?;
    let ev = RelaxationEvaluator::build(&material)?;
    let b = ev.bounds();

    let t_max = 10.0 / b.alpha2;
    let grid: Vec<f64> = (0..40)
        .map(|i| 1e-3 * (t_max / 1e-3).powf(i as f64 / 39.0))
        .collect();
    let report = verify_estimates(&ev, &grid, 3, 1e-10);

    println!(
        "checked {} inequalities over t in [1e-3, {:.3}], derivative orders 0..=7",
        report.checked, t_max
    );
    println!("worst scaled margin: {:.3e}", report.worst_margin);
    match report.first_violation() {
        None => println!("all estimates hold"),
        Some(v) => println!(
            "violated: t={:.3e} order={} side={} margin={:.3e}",
            v.t, v.derivative_order, v.side, v.margin
        ),
    }
    Ok(())
}
