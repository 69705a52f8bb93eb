//! Time-domain constitutive response.
//!
//! Two independent routes from a strain history to the stress trace:
//!
//! 1. `integrate_internal` — advances the internal-variable system
//!    Ẏ = L_b Y + (ė, 0, …, 0) with the exact exponential propagator per
//!    step (piecewise-linear strain makes the forcing piecewise constant,
//!    so each step is closed-form through the stored eigensystem).
//! 2. `convolve` — evaluates σ(t) = ∫₀ᵗ G(t−s) ė(s) ds, with each
//!    sub-interval integral of G done in closed form.
//!
//! Both are exact for piecewise-linear strain up to rounding, so their
//! agreement tests correctness rather than step-size tuning. The
//! integro-differential form of the constitutive law provides a third,
//! finite-difference-limited check.

use nalgebra::{DMatrix, DVector};

use crate::block::{BlockVector, BurgersMaterial};
use crate::error::{Error, Result};
use crate::relax::RelaxationEvaluator;
use crate::tensor::{kelvin_len, SymTensor2};

/// Piecewise-linear strain history on a strictly increasing grid starting
/// at t = 0 with e(0) = 0, so the strain rate is piecewise constant.
#[derive(Debug, Clone)]
pub struct StrainHistory {
    times: Vec<f64>,
    values: Vec<SymTensor2>,
}

impl StrainHistory {
    pub fn new(times: Vec<f64>, values: Vec<SymTensor2>) -> Result<Self> {
        if times.len() != values.len() || times.len() < 2 {
            return Err(Error::InvalidHistory(format!(
                "need matching times/values with at least two nodes, got {} and {}",
                times.len(),
                values.len()
            )));
        }
        if times[0] != 0.0 {
            return Err(Error::InvalidHistory(format!(
                "history must start at t = 0, got {}",
                times[0]
            )));
        }
        if values[0].norm() != 0.0 {
            return Err(Error::InvalidHistory("initial strain must be zero".into()));
        }
        for w in times.windows(2) {
            if w[1].is_nan() || w[1] <= w[0] {
                return Err(Error::InvalidHistory(format!(
                    "times must be strictly increasing, got {} then {}",
                    w[0], w[1]
                )));
            }
        }
        let dim = values[0].dim();
        if values.iter().any(|v| v.dim() != dim) {
            return Err(Error::InvalidHistory("mixed dimensions in history".into()));
        }
        Ok(Self { times, values })
    }

    /// Ramp e(t) = t·direction on a uniform grid.
    pub fn ramp(direction: &SymTensor2, t_max: f64, nodes: usize) -> Result<Self> {
        let times: Vec<f64> = (0..nodes)
            .map(|i| t_max * i as f64 / (nodes - 1) as f64)
            .collect();
        let values = times.iter().map(|&t| direction.scale(t)).collect();
        Self::new(times, values)
    }

    pub fn dim(&self) -> usize {
        self.values[0].dim()
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn values(&self) -> &[SymTensor2] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Constant strain rate on segment j (between nodes j and j+1).
    pub fn rate(&self, j: usize) -> SymTensor2 {
        let h = self.times[j + 1] - self.times[j];
        self.values[j + 1].sub(&self.values[j]).scale(1.0 / h)
    }
}

/// Internal state at one time: ψ = e₀ˢ, φᵢ = eᵢ, and the Maxwell dashpot
/// strain φ₀ integrated for diagnostics.
#[derive(Debug, Clone)]
pub struct InternalState {
    pub psi: SymTensor2,
    pub phi: Vec<SymTensor2>,
    pub phi0: SymTensor2,
}

/// Stress trace on the history grid.
#[derive(Debug, Clone)]
pub struct StressTrace {
    pub times: Vec<f64>,
    pub stress: Vec<SymTensor2>,
}

/// Stress trace plus the full internal state at every node.
#[derive(Debug, Clone)]
pub struct ResponseTrace {
    pub times: Vec<f64>,
    pub stress: Vec<SymTensor2>,
    pub states: Vec<InternalState>,
}

/// Integrates the internal-variable system with the exact per-step
/// exponential update of the transformed state U = D̄ Y:
///
/// U(t+h) = e^{hA} U(t) + (∫₀ʰ e^{sA} ds) D̄ F,  F = (ė, 0, …, 0),
///
/// and recovers σ = C₀ψ at every node.
pub fn integrate_internal(m: &BurgersMaterial, history: &StrainHistory) -> Result<ResponseTrace> {
    if history.dim() != m.dim() {
        return Err(Error::DimensionMismatch {
            expected: m.dim(),
            got: history.dim(),
        });
    }
    let ev = RelaxationEvaluator::build(m)?;
    integrate_internal_with(m, &ev, history)
}

/// Same as [`integrate_internal`] but reusing a prebuilt evaluator.
pub fn integrate_internal_with(
    m: &BurgersMaterial,
    ev: &RelaxationEvaluator,
    history: &StrainHistory,
) -> Result<ResponseTrace> {
    let n = m.n();
    let dt = kelvin_len(m.dim());
    let side = (n + 1) * dt;

    let mut u = DVector::<f64>::zeros(side);
    let mut phi0 = SymTensor2::zero(m.dim());
    let mut stress = Vec::with_capacity(history.len());
    let mut states = Vec::with_capacity(history.len());

    let record = |u: &DVector<f64>, phi0: &SymTensor2| -> Result<(SymTensor2, InternalState)> {
        let y = ev.dbar_inv() * u;
        let y = BlockVector::from_flat(m.dim(), n + 1, y)?;
        let psi = y.block(0);
        let sigma = m.c()[0].apply(&psi)?;
        let phi = (1..=n).map(|i| y.block(i)).collect();
        Ok((
            sigma,
            InternalState {
                psi,
                phi,
                phi0: phi0.clone(),
            },
        ))
    };

    let (s0, st0) = record(&u, &phi0)?;
    stress.push(s0);
    states.push(st0);

    for j in 0..history.len() - 1 {
        let h = history.times()[j + 1] - history.times()[j];
        let rate = history.rate(j);
        // forcing F = (rate, 0, ..., 0) lifted by Dbar
        let mut f = DVector::<f64>::zeros(side);
        f.rows_mut(0, dt).copy_from(rate.kelvin());
        let df = ev.dbar() * &f;

        // sigma integral over the step for the phi0 diagnostic:
        // int sigma = C0 * block0( Dbar^{-1} * int U ), with
        // int U = (int e^{sA}) U + (int int e^{sA}) Dbar F
        let int_u = ev.exp_integral(h) * &u + ev.exp_double_integral(h) * &df;
        let y_int = BlockVector::from_flat(m.dim(), n + 1, ev.dbar_inv() * int_u)?;
        let sigma_int = m.c()[0].apply(&y_int.block(0))?;
        phi0 = phi0.add(&sigma_int.scale(m.a(0)));

        u = ev.full_exp(h) * &u + ev.exp_integral(h) * &df;

        let (s, st) = record(&u, &phi0)?;
        stress.push(s);
        states.push(st);
    }

    Ok(ResponseTrace {
        times: history.times().to_vec(),
        stress,
        states,
    })
}

/// Hereditary-integral route: σ(tⱼ) = Σ_segments (∫ G) · rate, with the
/// G-integrals in closed form through the eigensystem.
pub fn convolve(ev: &RelaxationEvaluator, history: &StrainHistory) -> Result<StressTrace> {
    if history.dim() != ev.dim() {
        return Err(Error::DimensionMismatch {
            expected: ev.dim(),
            got: history.dim(),
        });
    }
    let times = history.times();
    let mut stress = Vec::with_capacity(times.len());
    for (j, &t) in times.iter().enumerate() {
        let mut sigma = SymTensor2::zero(history.dim());
        for seg in 0..j {
            // u = t - s runs over [t - t_{seg+1}, t - t_seg]
            let gint = ev.g_integral(t - times[seg + 1], t - times[seg]);
            let contrib = &gint * history.rate(seg).kelvin();
            sigma = sigma.add(&SymTensor2::from_kelvin(history.dim(), contrib)?);
        }
        stress.push(sigma);
    }
    Ok(StressTrace {
        times: times.to_vec(),
        stress,
    })
}

/// Max relative L² discrepancy between the convolution and
/// internal-variable routes over a shared history.
pub fn cross_check_ode_equivalence(m: &BurgersMaterial, history: &StrainHistory) -> Result<f64> {
    let ev = RelaxationEvaluator::build(m)?;
    let by_ode = integrate_internal_with(m, &ev, history)?;
    let by_conv = convolve(&ev, history)?;
    let mut num = 0.0f64;
    let mut den = 0.0f64;
    for (a, b) in by_ode.stress.iter().zip(&by_conv.stress) {
        num += a.sub(b).norm().powi(2);
        den += b.norm().powi(2);
    }
    if den == 0.0 {
        return Ok(num.sqrt());
    }
    Ok((num / den).sqrt())
}

/// Residual of the integro-differential constitutive law
///
/// ė = C₀⁻¹σ̇ + η₀⁻¹σ + Σᵢ (ηᵢ⁻¹σ − ηᵢ⁻²Cᵢ ∫₀ᵗ e^{−(t−s)ηᵢ⁻¹Cᵢ} σ(s) ds),
///
/// evaluated on the trace grid. σ̇ and ė use second-order central
/// differences (one-sided second-order at the ends); the kernel integrals
/// treat σ as piecewise linear and integrate each segment in closed form
/// per channel. Returns the max residual relative to max‖ė‖.
pub fn verify_integro_differential(
    m: &BurgersMaterial,
    history: &StrainHistory,
    stress: &[SymTensor2],
) -> Result<f64> {
    let times = history.times();
    if stress.len() != times.len() {
        return Err(Error::InvalidHistory(
            "stress trace length does not match history".into(),
        ));
    }
    let dt = kelvin_len(m.dim());
    let n = m.n();
    let c0_inv = m.c()[0].inverse_spd()?;

    // spectral split of each eta_i^{-1} C_i for the closed-form kernels
    struct Channelized {
        eigs: Vec<f64>,
        projections: Vec<DMatrix<f64>>,
    }
    let mut kernels = Vec::with_capacity(n);
    for i in 1..=n {
        let scaled = crate::tensor::ElasticTensor4::from_kelvin_matrix(
            m.dim(),
            m.c()[i].kelvin_matrix() * m.a(i),
        )?;
        let dec = scaled.spectral(1e-12)?;
        kernels.push(Channelized {
            eigs: dec.eigenvalues.clone(),
            projections: dec.projections.clone(),
        });
    }

    // J_i(t_j) = int_0^{t_j} e^{-(t_j - s) eta_i^{-1} C_i} sigma(s) ds,
    // advanced recursively: J(t_{j+1}) = e^{-h K} J(t_j) + segment integral
    // with sigma piecewise linear on the segment.
    let mut j_acc: Vec<DVector<f64>> = vec![DVector::zeros(dt); n];
    let mut j_at: Vec<Vec<DVector<f64>>> = vec![Vec::with_capacity(times.len()); n];
    for acc in j_at.iter_mut() {
        acc.push(DVector::zeros(dt));
    }
    for seg in 0..times.len() - 1 {
        let h = times[seg + 1] - times[seg];
        let s0 = stress[seg].kelvin();
        let s1 = stress[seg + 1].kelvin();
        for (i, ker) in kernels.iter().enumerate() {
            let mut next = DVector::zeros(dt);
            for (lam, proj) in ker.eigs.iter().zip(&ker.projections) {
                // channel decay e^{-lam u}; integral of (sigma0 + (s/h)(sigma1-sigma0))
                // against e^{-lam (h - s)} ds over [0, h]
                let z = lam * h;
                let em = (-z).exp();
                // w0 = int_0^h e^{-lam(h-s)} (1 - s/h) ds, w1 = ... (s/h) ds
                let (w0, w1) = if z.abs() < 1e-6 {
                    // series to O(z^3) keeps full precision for tiny z
                    (
                        h * (0.5 - z / 6.0 + z * z / 24.0),
                        h * (0.5 - z / 3.0 + z * z / 8.0),
                    )
                } else {
                    let phi1 = (1.0 - em) / z;
                    let phi2 = (1.0 - phi1) / z;
                    (h * (phi1 - phi2), h * phi2)
                };
                next += proj * (j_acc[i].clone() * em + s0 * w0 + s1 * w1);
            }
            j_acc[i] = next.clone();
            j_at[i].push(next);
        }
    }

    // central differences for sigma-dot and e-dot
    let diff = |values: &dyn Fn(usize) -> DVector<f64>, j: usize| -> DVector<f64> {
        let last = times.len() - 1;
        if j == 0 {
            let h0 = times[1] - times[0];
            let h1 = times[2] - times[1];
            // second-order one-sided on a possibly nonuniform grid
            let a = -(2.0 * h0 + h1) / (h0 * (h0 + h1));
            let b = (h0 + h1) / (h0 * h1);
            let c = -h0 / (h1 * (h0 + h1));
            values(0) * a + values(1) * b + values(2) * c
        } else if j == last {
            let h0 = times[last - 1] - times[last - 2];
            let h1 = times[last] - times[last - 1];
            let a = h1 / (h0 * (h0 + h1));
            let b = -(h0 + h1) / (h0 * h1);
            let c = (h0 + 2.0 * h1) / (h1 * (h0 + h1));
            values(last - 2) * a + values(last - 1) * b + values(last) * c
        } else {
            let h0 = times[j] - times[j - 1];
            let h1 = times[j + 1] - times[j];
            let a = -h1 / (h0 * (h0 + h1));
            let b = (h1 - h0) / (h0 * h1);
            let c = h0 / (h1 * (h0 + h1));
            values(j - 1) * a + values(j) * b + values(j + 1) * c
        }
    };

    let sigma_at = |j: usize| stress[j].kelvin().clone();
    let strain_at = |j: usize| history.values()[j].kelvin().clone();

    let mut worst = 0.0f64;
    let mut scale = 0.0f64;
    for j in 0..times.len() {
        let e_dot = diff(&strain_at, j);
        scale = scale.max(e_dot.norm());
    }
    let scale = scale.max(1e-300);

    for j in 0..times.len() {
        let e_dot = diff(&strain_at, j);
        let s_dot = diff(&sigma_at, j);
        let mut rhs = c0_inv.kelvin_matrix() * &s_dot + stress[j].kelvin() * m.a(0);
        for i in 1..=n {
            rhs += stress[j].kelvin() * m.a(i);
            rhs -= m.c()[i].kelvin_matrix() * &j_at[i - 1][j] * (m.a(i) * m.a(i));
        }
        worst = worst.max((e_dot - rhs).norm() / scale);
    }
    Ok(worst)
}

#[cfg(test)]
#[allow(clippy::excessive_precision)] // frozen oracle constants keep all 17 digits
mod tests {
    use super::*;
    use crate::sample;
    use approx::assert_relative_eq;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    /// Analytic ramp-response oracle for the unit scalar surrogate:
    /// σ(t) = ∫₀ᵗ G(u) du with G from the closed-form 2×2 channel.
    fn surrogate_ramp_oracle(t: f64) -> f64 {
        let s5 = 5.0f64.sqrt();
        let r_slow = (-3.0 + s5) / 2.0;
        let r_fast = (-3.0 - s5) / 2.0;
        let w_slow = (5.0 - s5) / 10.0;
        let w_fast = (5.0 + s5) / 10.0;
        w_slow / -r_slow * (1.0 - (r_slow * t).exp()) + w_fast / -r_fast * (1.0 - (r_fast * t).exp())
    }

    #[test]
    fn history_validation() {
        let dim = 2;
        let zero = SymTensor2::zero(dim);
        let one = SymTensor2::identity(dim);
        assert!(StrainHistory::new(vec![0.0, 1.0], vec![zero.clone(), one.clone()]).is_ok());
        // nonzero initial strain
        assert!(StrainHistory::new(vec![0.0, 1.0], vec![one.clone(), one.clone()]).is_err());
        // non-monotone times
        assert!(
            StrainHistory::new(vec![0.0, 1.0, 0.5], vec![zero.clone(), one.clone(), one.clone()])
                .is_err()
        );
        // must start at zero time
        assert!(StrainHistory::new(vec![0.5, 1.0], vec![zero, one]).is_err());
    }

    #[test]
    fn zero_history_gives_zero_everything() {
        let m = sample::unit_surrogate(2).unwrap();
        let zero = SymTensor2::zero(2);
        let history =
            StrainHistory::new(vec![0.0, 1.0, 2.0], vec![zero.clone(), zero.clone(), zero]).unwrap();
        let trace = integrate_internal(&m, &history).unwrap();
        for s in &trace.stress {
            assert_eq!(s.norm(), 0.0);
        }
        let ev = RelaxationEvaluator::build(&m).unwrap();
        let conv = convolve(&ev, &history).unwrap();
        for s in &conv.stress {
            assert_eq!(s.norm(), 0.0);
        }
        assert_eq!(cross_check_ode_equivalence(&m, &history).unwrap(), 0.0);
        let res = verify_integro_differential(&m, &history, &trace.stress).unwrap();
        assert_eq!(res, 0.0);
    }

    #[test]
    fn unit_ramp_matches_analytic_integral() {
        // frozen endpoint values recomputed with the closed-form oracle:
        // sigma(1) = 0.48596333835916072, sigma(5) = 0.89282924341832949
        assert_relative_eq!(surrogate_ramp_oracle(1.0), 0.48596333835916072, max_relative = 1e-14);
        assert_relative_eq!(surrogate_ramp_oracle(5.0), 0.89282924341832949, max_relative = 1e-14);

        let m = sample::unit_surrogate(2).unwrap();
        let dir = SymTensor2::identity(2);
        let history = StrainHistory::ramp(&dir, 5.0, 501).unwrap();
        let trace = integrate_internal(&m, &history).unwrap();
        // exponential update is exact: compare at interior and end nodes
        for (j, &t) in history.times().iter().enumerate() {
            let expected = surrogate_ramp_oracle(t);
            let got = trace.stress[j].kelvin()[0];
            assert!(
                (got - expected).abs() <= 1e-12 * expected.max(1e-12),
                "t={t}: {got} vs {expected}"
            );
        }
        // convolution path agrees with the same oracle
        let ev = RelaxationEvaluator::build(&m).unwrap();
        let conv = convolve(&ev, &history).unwrap();
        let got = conv.stress.last().unwrap().kelvin()[0];
        assert_relative_eq!(got, 0.89282924341832949, max_relative = 1e-12);
    }

    #[test]
    fn long_time_ramp_stress_approaches_eta0() {
        let mut rng = StdRng::seed_from_u64(3);
        let m = sample::random_material(&mut rng, 2, 2).unwrap();
        let ev = RelaxationEvaluator::build(&m).unwrap();
        let t_max = 50.0 / ev.bounds().alpha2;
        let dir = SymTensor2::identity(2);
        let history = StrainHistory::ramp(&dir, t_max, 2001).unwrap();
        let trace = integrate_internal(&m, &history).unwrap();
        let sigma_end = trace.stress.last().unwrap();
        // steady creep: all strain rate flows through the Maxwell dashpot,
        // sigma -> eta0 * rate
        let expected = dir.scale(m.eta()[0]);
        let rel = sigma_end.sub(&expected).norm() / expected.norm();
        assert!(rel <= 1e-6, "steady-state mismatch {rel:.3e}");
    }

    #[test]
    fn paths_agree_on_random_histories() {
        let mut rng = StdRng::seed_from_u64(21);
        let mut worst = 0.0f64;
        for _ in 0..50 {
            let dim = if rng.gen_bool(0.5) { 2 } else { 3 };
            let n = rng.gen_range(1..=3);
            let m = sample::random_material(&mut rng, dim, n).unwrap();
            let nodes = rng.gen_range(5..40);
            let history = sample::random_history(&mut rng, dim, nodes, 3.0).unwrap();
            worst = worst.max(cross_check_ode_equivalence(&m, &history).unwrap());
        }
        assert!(worst <= 1e-10, "worst path discrepancy {worst:.3e}");
    }

    #[test]
    fn relaxation_experiment_smoothed_step() {
        // e(t) = e0 min(t/eps, 1): for t > eps the stress approaches G(t) e0
        let m = sample::unit_surrogate(2).unwrap();
        let ev = RelaxationEvaluator::build(&m).unwrap();
        let eps = 1e-4;
        let e0 = SymTensor2::identity(2);
        let mut times = vec![0.0, eps];
        let mut values = vec![SymTensor2::zero(2), e0.clone()];
        for i in 1..=20 {
            times.push(eps + i as f64 * 0.1);
            values.push(e0.clone());
        }
        let history = StrainHistory::new(times.clone(), values).unwrap();
        let trace = integrate_internal(&m, &history).unwrap();
        for (j, &t) in times.iter().enumerate().skip(2) {
            let g = ev.eval_g(t).kelvin_matrix()[(0, 0)];
            let got = trace.stress[j].kelvin()[0];
            assert!(
                (got - g).abs() <= 2e-4 * g,
                "t={t}: relaxation {got} vs G(t) {g}"
            );
        }
        // monotone decay toward zero, never negative
        for w in trace.stress.windows(2).skip(1) {
            let a = w[0].kelvin()[0];
            let b = w[1].kelvin()[0];
            assert!(b < a && b > 0.0);
        }
    }

    #[test]
    fn internal_strain_trace_matches_kernel_formula() {
        // e_1(t) = int_0^t e^{-(t-s) eta_1^{-1} C_1} eta_1^{-1} sigma(s) ds:
        // for the unit surrogate under a ramp the kernel integral has the
        // closed form (per Kelvin channel, with K = 1)
        //   phi_1(t) = sum_r w_r/(-r) [ (1 - e^{-t}) - (e^{rt} - e^{-t})/(r+1) ]
        // derived by integrating e^{-(t-s)} (1 - e^{rs}) term by term.
        let m = sample::unit_surrogate(2).unwrap();
        let dir = SymTensor2::identity(2);
        let history = StrainHistory::ramp(&dir, 3.0, 301).unwrap();
        let trace = integrate_internal(&m, &history).unwrap();

        let s5 = 5.0f64.sqrt();
        let oracle = |t: f64| -> f64 {
            let mut total = 0.0;
            for (r, w) in [
                ((-3.0 + s5) / 2.0, (5.0 - s5) / 10.0),
                ((-3.0 - s5) / 2.0, (5.0 + s5) / 10.0),
            ] {
                total += w / -r * ((1.0 - (-t).exp()) - ((r * t).exp() - (-t).exp()) / (r + 1.0));
            }
            total
        };
        for (j, &t) in history.times().iter().enumerate().skip(1).step_by(50) {
            let got = trace.states[j].phi[0].kelvin()[0];
            let expected = oracle(t);
            assert!(
                (got - expected).abs() <= 1e-9 * expected.abs().max(1e-9),
                "t={t}: phi_1 {got} vs kernel integral {expected}"
            );
        }
    }

    #[test]
    fn integro_differential_residual_ramp() {
        let m = sample::unit_surrogate(2).unwrap();
        let dir = SymTensor2::identity(2);
        // h = 1e-3 on [0, 1]
        let history = StrainHistory::ramp(&dir, 1.0, 1001).unwrap();
        let trace = integrate_internal(&m, &history).unwrap();
        let res = verify_integro_differential(&m, &history, &trace.stress).unwrap();
        assert!(res <= 1e-5, "ramp residual {res:.3e}");
    }

    #[test]
    fn integro_differential_residual_converges_second_order() {
        // smooth (non-ramp) history: e(t) = sin(t) direction, sampled
        let m = sample::unit_surrogate(2).unwrap();
        let dir = SymTensor2::identity(2);
        let residual_at = |nodes: usize| {
            let times: Vec<f64> = (0..nodes).map(|i| i as f64 / (nodes - 1) as f64).collect();
            let values: Vec<SymTensor2> = times.iter().map(|&t| dir.scale(t.sin())).collect();
            let history = StrainHistory::new(times, values).unwrap();
            let trace = integrate_internal(&m, &history).unwrap();
            verify_integro_differential(&m, &history, &trace.stress).unwrap()
        };
        let r1 = residual_at(51);
        let r2 = residual_at(101);
        let r4 = residual_at(201);
        // halving h divides the residual by ~4; allow slack for constants
        assert!(r2 <= r1 / 2.5, "r1={r1:.3e} r2={r2:.3e}");
        assert!(r4 <= r2 / 2.5, "r2={r2:.3e} r4={r4:.3e}");
    }

    proptest::proptest! {
        #![proptest_config(proptest::prelude::ProptestConfig::with_cases(16))]
        #[test]
        fn equivalence_on_arbitrary_histories(seed in 0u64..1000, nodes in 4usize..24) {
            let mut rng = StdRng::seed_from_u64(seed);
            let m = sample::random_material(&mut rng, 2, 1).unwrap();
            let history = sample::random_history(&mut rng, 2, nodes, 2.0).unwrap();
            let disc = cross_check_ode_equivalence(&m, &history).unwrap();
            proptest::prop_assert!(disc <= 1e-10);
        }
    }
}
