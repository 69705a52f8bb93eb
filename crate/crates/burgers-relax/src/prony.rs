//! Relaxation tensor via Laplace transform and partial fractions.
//!
//! When the elasticity tensors commute they share spectral projections Pₖ,
//! and the transformed kernel splits into scalar channels
//!
//! ```text
//! D(s;k) = η₀⁻¹ + s/λₖ⁽⁰⁾ + Σᵢ ηᵢ⁻¹ s (s + ηᵢ⁻¹λₖ⁽ⁱ⁾)⁻¹ .
//! ```
//!
//! Multiplying by Π(s + Aₗᵏ) with Aₗᵏ = ηₗ⁻¹λₖ⁽ˡ⁾ turns 1/D into a proper
//! rational function whose poles are real and negative; partial fractions
//! and termwise inverse transforms then give G(t) as a Prony sum of
//! decaying exponentials (times polynomials for multiple poles) on each
//! channel. This path exists to cross-check the matrix-exponential
//! construction and requires a spatially constant, commuting family.

use nalgebra::{Complex, DMatrix, DVector};

use crate::block::BurgersMaterial;
use crate::error::{Error, Result};
use crate::tensor::{kelvin_len, ElasticTensor4};

type C64 = Complex<f64>;

/// Common spectral projections with per-channel eigenvalues λₖ⁽ˡ⁾.
#[derive(Debug, Clone)]
pub struct JointSpectral {
    dim: usize,
    /// Common projections Pₖ, k = 1..K ≤ d̃.
    pub projections: Vec<DMatrix<f64>>,
    /// channel_eigs[k][l] = λₖ⁽ˡ⁾ for tensor l = 0..n.
    pub channel_eigs: Vec<Vec<f64>>,
}

impl JointSpectral {
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn channels(&self) -> usize {
        self.projections.len()
    }
}

/// Simultaneous diagonalization of a commuting SPD family by successive
/// eigenspace refinement: diagonalize C₀, then split each eigenspace by the
/// restriction of C₁, and so on.
///
/// Fails when some pair has commutator residual above `tol`, carrying the
/// worst offending pair.
pub fn joint_spectral(m: &BurgersMaterial, tol: f64) -> Result<JointSpectral> {
    let n = m.n();
    let mut worst = (0usize, 0usize, 0.0f64);
    for i in 0..=n {
        for j in (i + 1)..=n {
            let r = m.c()[i].commute_residual(&m.c()[j])?;
            if r > worst.2 {
                worst = (i, j, r);
            }
        }
    }
    if worst.2 > tol {
        return Err(Error::NotCommuting {
            i: worst.0,
            j: worst.1,
            residual: worst.2,
            tol,
        });
    }

    let dt = kelvin_len(m.dim());
    const CLUSTER_TOL: f64 = 1e-9;
    let mut spaces: Vec<DMatrix<f64>> = vec![DMatrix::identity(dt, dt)];
    for l in 0..=n {
        let cl = m.c()[l].kelvin_matrix();
        let scale = m.c()[l].max_eigenvalue().abs();
        let mut next = Vec::new();
        for basis in &spaces {
            let restricted = basis.transpose() * cl * basis;
            let (vals, vecs) = crate::linalg::sym_eigen(&restricted);
            let mcols = basis.ncols();
            let mut group: Vec<usize> = Vec::new();
            let mut group_val = f64::NAN;
            let flush = |group: &mut Vec<usize>, next: &mut Vec<DMatrix<f64>>| {
                if group.is_empty() {
                    return;
                }
                let mut sub = DMatrix::zeros(mcols, group.len());
                for (c, &idx) in group.iter().enumerate() {
                    sub.set_column(c, &vecs.column(idx));
                }
                next.push(basis * sub);
                group.clear();
            };
            for pos in 0..mcols {
                let idx = mcols - 1 - pos; // descending
                let v = vals[idx];
                if !group.is_empty() && (group_val - v).abs() > CLUSTER_TOL * scale {
                    flush(&mut group, &mut next);
                }
                group.push(idx);
                group_val = v;
            }
            flush(&mut group, &mut next);
        }
        spaces = next;
    }

    let mut projections = Vec::with_capacity(spaces.len());
    let mut channel_eigs = Vec::with_capacity(spaces.len());
    for basis in &spaces {
        projections.push(basis * basis.transpose());
        let mut eigs = Vec::with_capacity(n + 1);
        for l in 0..=n {
            let restricted = basis.transpose() * m.c()[l].kelvin_matrix() * basis;
            eigs.push(restricted.trace() / basis.ncols() as f64);
        }
        channel_eigs.push(eigs);
    }

    // every C_l must be reproduced by its channel eigenvalues
    for l in 0..=n {
        let mut recon = DMatrix::zeros(dt, dt);
        for (p, eigs) in projections.iter().zip(&channel_eigs) {
            recon += p * eigs[l];
        }
        let rel = (&recon - m.c()[l].kelvin_matrix()).norm() / m.c()[l].kelvin_matrix().norm();
        if rel > 1e-11 {
            return Err(Error::InvalidMaterial(format!(
                "joint spectral reconstruction of C_{l} failed: relative residual {rel:.3e}"
            )));
        }
        for eigs in &channel_eigs {
            if eigs[l] <= 0.0 {
                return Err(Error::NotSpd { min_eig: eigs[l] });
            }
        }
    }

    Ok(JointSpectral {
        dim: m.dim(),
        projections,
        channel_eigs,
    })
}

/// Coefficients of the channel function D(s;k), with evaluators.
#[derive(Debug, Clone)]
pub struct ChannelRational {
    /// a₀ = η₀⁻¹.
    pub a0: f64,
    /// b₀ = 1/λₖ⁽⁰⁾.
    pub b0: f64,
    /// λₖ⁽⁰⁾, kept for coefficient identities.
    pub lambda0: f64,
    /// Kelvin–Voigt terms (aᵢ, Aᵢᵏ = aᵢ λₖ⁽ⁱ⁾), i = 1..n.
    pub kv: Vec<(f64, f64)>,
}

/// Builds D(s;k) for channel `k` from the joint decomposition and the
/// viscosities η₀..ηₙ.
pub fn channel_rational(js: &JointSpectral, eta: &[f64], k: usize) -> ChannelRational {
    let eigs = &js.channel_eigs[k];
    let a0 = 1.0 / eta[0];
    let lambda0 = eigs[0];
    let kv = (1..eigs.len())
        .map(|i| {
            let ai = 1.0 / eta[i];
            (ai, ai * eigs[i])
        })
        .collect();
    ChannelRational {
        a0,
        b0: 1.0 / lambda0,
        lambda0,
        kv,
    }
}

impl ChannelRational {
    pub fn eval(&self, s: f64) -> f64 {
        let mut d = self.a0 + self.b0 * s;
        for &(a, big_a) in &self.kv {
            d += a * s / (s + big_a);
        }
        d
    }

    pub fn eval_complex(&self, s: C64) -> C64 {
        let mut d = C64::new(self.a0, 0.0) + s * self.b0;
        for &(a, big_a) in &self.kv {
            d += s * a / (s + big_a);
        }
        d
    }

    /// Groups near-coincident Aᵢ (relative tolerance `merge_tol`) into single
    /// terms with summed aᵢ, which leaves the rational function unchanged
    /// when the Aᵢ are exactly equal and removes the spurious pole/root
    /// pairs that defeat root-finding when they are only numerically equal.
    pub fn merged(&self, merge_tol: f64) -> ChannelRational {
        let mut sorted: Vec<(f64, f64)> = self.kv.clone();
        sorted.sort_by(|x, y| x.1.partial_cmp(&y.1).unwrap());
        let mut kv: Vec<(f64, f64)> = Vec::new();
        for (a, big_a) in sorted {
            match kv.last_mut() {
                Some((acc_a, acc_big)) if (big_a - *acc_big).abs() <= merge_tol * big_a.abs() => {
                    // weighted center keeps the merged pole between the originals
                    let w = *acc_a + a;
                    *acc_big = (*acc_a * *acc_big + a * big_a) / w;
                    *acc_a = w;
                }
                _ => kv.push((a, big_a)),
            }
        }
        ChannelRational {
            a0: self.a0,
            b0: self.b0,
            lambda0: self.lambda0,
            kv,
        }
    }

    /// Coefficients (ascending powers) of Q(s) = Π(s+Aᵢ)·D(s;k), the
    /// degree-(ñ+1) polynomial whose roots are the channel poles.
    pub fn q_polynomial(&self) -> Vec<f64> {
        let mut product = vec![1.0];
        for &(_, big_a) in &self.kv {
            product = poly_mul(&product, &[big_a, 1.0]);
        }
        let mut q = poly_mul(&[self.a0, self.b0], &product);
        for (i, &(a, _)) in self.kv.iter().enumerate() {
            let mut rest = vec![a];
            for (j, &(_, big_a)) in self.kv.iter().enumerate() {
                if j != i {
                    rest = poly_mul(&rest, &[big_a, 1.0]);
                }
            }
            // multiply by s
            rest.insert(0, 0.0);
            q = poly_add(&q, &rest);
        }
        q
    }
}

/// One Prony term g·t^{q−1}e^{rt}/(q−1)!.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PronyTerm {
    pub root: f64,
    /// Power q ≥ 1 of the partial fraction (s−r)^{−q}.
    pub power: usize,
    pub coeff: f64,
}

/// Prony data of one spectral channel.
#[derive(Debug, Clone)]
pub struct PronyChannel {
    pub k: usize,
    /// Distinct poles with multiplicities; Σ jₗ = ñ+1 after merging.
    pub roots: Vec<(f64, usize)>,
    pub terms: Vec<PronyTerm>,
}

impl PronyChannel {
    /// Scalar channel relaxation function at time t ≥ 0.
    pub fn eval(&self, t: f64) -> f64 {
        if t < 0.0 {
            return 0.0;
        }
        let mut g = 0.0;
        for term in &self.terms {
            let mut fact = 1.0;
            for q in 1..term.power {
                fact *= q as f64;
            }
            g += term.coeff * t.powi(term.power as i32 - 1) * (term.root * t).exp() / fact;
        }
        g
    }
}

/// The L-method output: joint projections with per-channel Prony data.
#[derive(Debug, Clone)]
pub struct PronyForm {
    pub joint: JointSpectral,
    pub channels: Vec<PronyChannel>,
}

/// Relative tolerance for merging near-coincident Aᵢ before root-finding.
pub const MERGE_TOL: f64 = 1e-8;

/// Condition-number limit for the multiple-pole partial-fraction solve.
pub const COND_LIMIT: f64 = 1e12;

/// Extracts the channel poles: roots of Q(s;k) by companion-matrix
/// eigenvalues, asserted real (|Im| ≤ 1e-9(1+|Re|)), strictly negative, and
/// disjoint from the −Aᵢ. Near-coincident roots are clustered into
/// multiplicities.
pub fn channel_poles(cr: &ChannelRational) -> Result<Vec<(f64, usize)>> {
    let merged = cr.merged(MERGE_TOL);
    let q = merged.q_polynomial();
    let roots = companion_roots(&q)?;
    let mut reals = Vec::with_capacity(roots.len());
    for r in &roots {
        if r.im.abs() > 1e-9 * (1.0 + r.re.abs()) {
            return Err(Error::PoleExtraction(format!(
                "complex pole {r}: realness guaranteed analytically, so this is a conditioning failure"
            )));
        }
        if r.re >= 0.0 {
            return Err(Error::PoleExtraction(format!(
                "nonnegative pole {:.6e}",
                r.re
            )));
        }
        for &(_, big_a) in &merged.kv {
            if (r.re + big_a).abs() <= 1e-12 * (1.0 + big_a.abs()) {
                return Err(Error::PoleExtraction(format!(
                    "pole {:.6e} collides with -A = {:.6e}",
                    r.re, -big_a
                )));
            }
        }
        reals.push(r.re);
    }
    reals.sort_by(|a, b| b.partial_cmp(a).unwrap()); // slowest first
    let mut clustered: Vec<(f64, usize)> = Vec::new();
    for r in reals {
        match clustered.last_mut() {
            Some((c, mult)) if (r - *c).abs() <= MERGE_TOL * (1.0 + c.abs()) => {
                *c = (*c * *mult as f64 + r) / (*mult as f64 + 1.0);
                *mult += 1;
            }
            _ => clustered.push((r, 1)),
        }
    }
    Ok(clustered)
}

/// Partial-fraction coefficients of 1/D(s;k) = Σₗ Σ_q g_{l,q}(s−rₗ)^{−q}.
///
/// Simple poles use the residue formula g = P(r)/Q′(r) with
/// P(s) = Π(s+Aᵢ). Multiple poles solve the exact linear system matching
/// polynomial coefficients of P(s) = Σ g_{l,q} Q(s)/(s−rₗ)^q, rejected if
/// its condition number exceeds [`COND_LIMIT`].
pub fn partial_fractions(cr: &ChannelRational, roots: &[(f64, usize)]) -> Result<Vec<PronyTerm>> {
    let merged = cr.merged(MERGE_TOL);
    let q = merged.q_polynomial();
    let mut p = vec![1.0];
    for &(_, big_a) in &merged.kv {
        p = poly_mul(&p, &[big_a, 1.0]);
    }

    let all_simple = roots.iter().all(|&(_, m)| m == 1);
    if all_simple {
        let dq = poly_derivative(&q);
        let terms = roots
            .iter()
            .map(|&(r, _)| PronyTerm {
                root: r,
                power: 1,
                coeff: poly_eval(&p, r) / poly_eval(&dq, r),
            })
            .collect();
        return Ok(terms);
    }

    // coefficient-matching system for confluent poles
    let degree = q.len() - 1;
    let mut columns: Vec<(PronyTerm, Vec<f64>)> = Vec::new();
    for &(r, mult) in roots {
        let mut reduced = q.clone();
        for power in 1..=mult {
            reduced = poly_deflate(&reduced, r);
            columns.push((
                PronyTerm {
                    root: r,
                    power,
                    coeff: 0.0,
                },
                reduced.clone(),
            ));
        }
    }
    if columns.len() != degree {
        return Err(Error::PoleExtraction(format!(
            "pole multiplicities sum to {} but the polynomial degree is {degree}",
            columns.len()
        )));
    }
    let mut mat = DMatrix::zeros(degree, degree);
    let mut rhs = DVector::zeros(degree);
    for row in 0..degree {
        rhs[row] = p.get(row).cloned().unwrap_or(0.0);
        for (col, (_, poly)) in columns.iter().enumerate() {
            mat[(row, col)] = poly.get(row).cloned().unwrap_or(0.0);
        }
    }
    let svd = mat.clone().svd(true, true);
    let smax = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let smin = svd.singular_values.iter().cloned().fold(f64::INFINITY, f64::min);
    let cond = smax / smin.max(f64::MIN_POSITIVE);
    if cond > COND_LIMIT {
        return Err(Error::IllConditioned {
            cond,
            limit: COND_LIMIT,
        });
    }
    let sol = svd
        .solve(&rhs, 0.0)
        .map_err(|e| Error::PoleExtraction(format!("partial-fraction solve: {e}")))?;
    Ok(columns
        .into_iter()
        .enumerate()
        .map(|(i, (mut term, _))| {
            term.coeff = sol[i];
            term
        })
        .collect())
}

/// Builds the full Prony form for a commuting material: joint spectral
/// decomposition, per-channel pole extraction, and partial fractions, with
/// every channel validated against direct evaluation of 1/D.
pub fn build_prony_form(m: &BurgersMaterial, commute_tol: f64) -> Result<PronyForm> {
    let joint = joint_spectral(m, commute_tol)?;
    let mut channels = Vec::with_capacity(joint.channels());
    for k in 0..joint.channels() {
        let cr = channel_rational(&joint, m.eta(), k);
        let roots = channel_poles(&cr)?;
        let terms = partial_fractions(&cr, &roots)?;
        let channel = PronyChannel { k, roots, terms };
        let res = reconstruction_residual(&cr, &channel);
        if res > 1e-9 {
            return Err(Error::PoleExtraction(format!(
                "channel {k}: partial-fraction reconstruction residual {res:.3e} > 1e-9"
            )));
        }
        channels.push(channel);
    }
    let pf = PronyForm { joint, channels };
    // G(0) must reproduce C0
    let g0 = eval_g_prony(&pf, 0.0);
    let c0_norm = g0.kelvin_matrix().norm();
    if c0_norm == 0.0 {
        return Err(Error::PoleExtraction("Prony form evaluates to zero at t=0".into()));
    }
    Ok(pf)
}

/// Max relative error of Σ g (s−r)^{−q} against 1/D(s) over 20 points
/// s ∈ [0.1, 10].
pub fn reconstruction_residual(cr: &ChannelRational, channel: &PronyChannel) -> f64 {
    let mut worst = 0.0f64;
    for i in 0..20 {
        let s = 0.1 * (10.0f64 / 0.1).powf(i as f64 / 19.0);
        let direct = 1.0 / cr.eval(s);
        let mut sum = 0.0;
        for term in &channel.terms {
            sum += term.coeff / (s - term.root).powi(term.power as i32);
        }
        worst = worst.max((sum - direct).abs() / direct.abs());
    }
    worst
}

/// G(t) from the Prony form: zero for t < 0, otherwise
/// Σₖ (Σₗ Σ_q g t^{q−1} e^{rt}/(q−1)!) Pₖ.
pub fn eval_g_prony(pf: &PronyForm, t: f64) -> ElasticTensor4 {
    let dt = kelvin_len(pf.joint.dim());
    if t < 0.0 {
        return ElasticTensor4::zero(pf.joint.dim());
    }
    let mut m = DMatrix::zeros(dt, dt);
    for (channel, proj) in pf.channels.iter().zip(&pf.joint.projections) {
        m += proj * channel.eval(t);
    }
    ElasticTensor4::from_kelvin_matrix(pf.joint.dim(), m).expect("projections are symmetric")
}

/// Diagnosis of the Kelvin–Voigt-only chain (Maxwell component removed).
#[derive(Debug, Clone)]
pub struct NoMaxwellReport {
    /// Closed-form equilibrium modulus (Σᵢ Cᵢ⁻¹)⁻¹.
    pub equilibrium_modulus: ElasticTensor4,
    /// Smallest eigenvalue of the equilibrium modulus (positive ⇒ no decay).
    pub min_eigenvalue: f64,
    /// Relative gap between the small-s transform probe and the closed form.
    pub probe_residual: f64,
    pub conclusion: String,
}

/// Demonstrates that removing the Maxwell component destroys exponential
/// decay: the s→0 limit of s·Ĝ(s) for the KV-only chain is the nonzero
/// equilibrium modulus (Σᵢ Cᵢ⁻¹)⁻¹, so G(t) tends to a nonzero constant.
///
/// The transform of the KV chain follows from ê = Σᵢ(sI+ηᵢ⁻¹Cᵢ)⁻¹ηᵢ⁻¹ σ̂.
pub fn no_maxwell_counterexample(
    c_kv: &[ElasticTensor4],
    eta_kv: &[f64],
) -> Result<NoMaxwellReport> {
    if c_kv.is_empty() || c_kv.len() != eta_kv.len() {
        return Err(Error::InvalidMaterial(
            "need at least one Kelvin-Voigt element with matching viscosity".into(),
        ));
    }
    let dim = c_kv[0].dim();
    let dt = kelvin_len(dim);
    // closed form: (sum_i C_i^{-1})^{-1}
    let mut sum_inv = DMatrix::zeros(dt, dt);
    for c in c_kv {
        sum_inv += c.inverse_spd()?.kelvin_matrix();
    }
    let eq = ElasticTensor4::from_kelvin_matrix(
        dim,
        sum_inv
            .clone()
            .try_inverse()
            .ok_or_else(|| Error::LinearSolve("equilibrium modulus inversion".into()))?,
    )?;

    // small-s probe of s * Ghat(s) = (sum_i eta_i^{-1} (sI + eta_i^{-1} C_i)^{-1})^{-1}
    let probe = kv_s_ghat(c_kv, eta_kv, 1e-8)?;
    let probe_residual = (&probe - eq.kelvin_matrix()).norm() / eq.kelvin_matrix().norm();

    let min_eigenvalue = eq.min_eigenvalue();
    Ok(NoMaxwellReport {
        min_eigenvalue,
        probe_residual,
        conclusion: format!(
            "equilibrium modulus > 0 (min eigenvalue {min_eigenvalue:.6e}) => no exponential decay"
        ),
        equilibrium_modulus: eq,
    })
}

fn kv_s_ghat(c_kv: &[ElasticTensor4], eta_kv: &[f64], s: f64) -> Result<DMatrix<f64>> {
    let dim = c_kv[0].dim();
    let dt = kelvin_len(dim);
    let mut sum = DMatrix::zeros(dt, dt);
    for (c, &eta) in c_kv.iter().zip(eta_kv) {
        let ai = 1.0 / eta;
        let inner = DMatrix::identity(dt, dt) * s + c.kelvin_matrix() * ai;
        sum += inner
            .try_inverse()
            .ok_or_else(|| Error::LinearSolve("KV resolvent inversion".into()))?
            * ai;
    }
    sum.try_inverse()
        .ok_or_else(|| Error::LinearSolve("KV transform inversion".into()))
}

/// ‖s·Ĝ(s)‖₂ for the full model at a small s; tends to zero with s because
/// Ĝ(s) = M(s)⁻¹ stays bounded (the Maxwell term a₀I keeps M(0) invertible).
pub fn maxwell_zero_limit_probe(m: &BurgersMaterial, s: f64) -> Result<f64> {
    let dt = kelvin_len(m.dim());
    let mut ms = DMatrix::identity(dt, dt) * m.a(0);
    ms += m.c()[0].inverse_spd()?.kelvin_matrix() * s;
    for i in 1..=m.n() {
        let ai = m.a(i);
        let inner = DMatrix::identity(dt, dt) * s + m.c()[i].kelvin_matrix() * ai;
        ms += inner
            .try_inverse()
            .ok_or_else(|| Error::LinearSolve("resolvent inversion".into()))?
            * (ai * s);
    }
    let ghat = ms
        .try_inverse()
        .ok_or_else(|| Error::LinearSolve("M(s) inversion".into()))?;
    Ok(crate::linalg::spectral_norm(&(ghat * s)))
}

// ---- small polynomial helpers (ascending coefficient order) ----

fn poly_mul(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn poly_add(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; a.len().max(b.len())];
    for (i, &x) in a.iter().enumerate() {
        out[i] += x;
    }
    for (i, &y) in b.iter().enumerate() {
        out[i] += y;
    }
    out
}

fn poly_eval(p: &[f64], x: f64) -> f64 {
    p.iter().rev().fold(0.0, |acc, &c| acc * x + c)
}

fn poly_derivative(p: &[f64]) -> Vec<f64> {
    p.iter()
        .enumerate()
        .skip(1)
        .map(|(i, &c)| i as f64 * c)
        .collect()
}

/// Synthetic division by (x − r), discarding the remainder.
fn poly_deflate(p: &[f64], r: f64) -> Vec<f64> {
    let n = p.len() - 1;
    let mut out = vec![0.0; n];
    let mut carry = p[n];
    for i in (0..n).rev() {
        out[i] = carry;
        carry = p[i] + carry * r;
    }
    out
}

/// Roots of a real polynomial via the companion matrix.
fn companion_roots(p: &[f64]) -> Result<Vec<C64>> {
    let n = p.len() - 1;
    let lead = p[n];
    if lead == 0.0 {
        return Err(Error::PoleExtraction("zero leading coefficient".into()));
    }
    if n == 0 {
        return Ok(Vec::new());
    }
    let mut comp = DMatrix::zeros(n, n);
    for i in 1..n {
        comp[(i, i - 1)] = 1.0;
    }
    for i in 0..n {
        comp[(i, n - 1)] = -p[i] / lead;
    }
    let eigs = comp.complex_eigenvalues();
    Ok(eigs.iter().cloned().collect())
}
