//! Shared oracles for the integration suites.

use nalgebra::DMatrix;

/// General matrix exponential by scaling-and-squaring with a Taylor core,
/// independent of the eigendecomposition path under test.
pub fn expm(a: &DMatrix<f64>) -> DMatrix<f64> {
    let n = a.nrows();
    let norm = a.norm();
    let squarings = if norm > 0.25 {
        (norm / 0.25).log2().ceil() as i32
    } else {
        0
    };
    let scaled = a / 2f64.powi(squarings);
    let mut term = DMatrix::<f64>::identity(n, n);
    let mut sum = DMatrix::<f64>::identity(n, n);
    for k in 1..=24 {
        term = &term * &scaled / k as f64;
        sum += &term;
    }
    let mut result = sum;
    for _ in 0..squarings {
        result = &result * &result;
    }
    result
}

/// Prints the per-criterion verdict line and panics on failure.
pub fn verdict(number: u32, name: &str, pass: bool, detail: &str, started: std::time::Instant) {
    let status = if pass { "PASS" } else { "FAIL" };
    println!(
        "criterion {number:02} ({name}): {status}  {detail}  [{:.2}s]",
        started.elapsed().as_secs_f64()
    );
    assert!(pass, "criterion {number:02} ({name}) failed: {detail}");
}
