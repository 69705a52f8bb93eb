//! Desk-scale P1 finite element solver for the viscoelastic initial
//! boundary value problem on the unit square, demonstrating energy decay.
//!
//! Spatial discretization: constant-strain triangles on a structured mesh,
//! displacement fixed on the tagged Dirichlet edges, traction-free
//! elsewhere. Time stepping is Strang splitting per step h:
//!
//! 1. half-step of the element-local internal dynamics Ẏ = L_b Y,
//!    advanced by the exact propagator D̄⁻¹ e^{(h/2)A} D̄;
//! 2. full implicit-midpoint step of the wave part ρü = div C₀ψ with
//!    ψ̇ = e[u̇] (unconditionally stable, conserves the step's quadratic
//!    energy up to solver tolerance);
//! 3. another internal half-step.
//!
//! The internal sub-step strictly dissipates the elastic + stored energy
//! (the quadratic-identity lower bound), so the discrete total energy is
//! non-increasing for homogeneous data.

use nalgebra::{Cholesky, DMatrix, DVector, Dyn};
use rayon::prelude::*;

use crate::block::{build_dbar, BurgersMaterial};
use crate::error::{Error, Result};
use crate::tensor::kelvin_len;

/// Which edges of the unit square carry the homogeneous Dirichlet
/// condition.
#[derive(Debug, Clone, Copy, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Edge {
    Left,
    Right,
    Bottom,
    Top,
}

/// Structured P1 triangulation of [0,1]² with N×N nodes.
#[derive(Debug, Clone)]
pub struct MeshP1 {
    n_side: usize,
    coords: Vec<(f64, f64)>,
    triangles: Vec<[usize; 3]>,
    dirichlet_node: Vec<bool>,
    dirichlet_edges: Vec<Edge>,
}

impl MeshP1 {
    /// Builds the mesh with `n_side` nodes per side and the given Dirichlet
    /// edges (Γ_D must be nonempty).
    pub fn unit_square(n_side: usize, dirichlet_edges: &[Edge]) -> Result<Self> {
        if n_side < 2 {
            return Err(Error::Mesh(format!("need at least 2 nodes per side, got {n_side}")));
        }
        if dirichlet_edges.is_empty() {
            return Err(Error::Mesh("Dirichlet boundary must be nonempty".into()));
        }
        let h = 1.0 / (n_side - 1) as f64;
        let mut coords = Vec::with_capacity(n_side * n_side);
        for j in 0..n_side {
            for i in 0..n_side {
                coords.push((i as f64 * h, j as f64 * h));
            }
        }
        let idx = |i: usize, j: usize| j * n_side + i;
        let mut triangles = Vec::with_capacity(2 * (n_side - 1) * (n_side - 1));
        for j in 0..n_side - 1 {
            for i in 0..n_side - 1 {
                let (a, b, c, d) = (idx(i, j), idx(i + 1, j), idx(i + 1, j + 1), idx(i, j + 1));
                triangles.push([a, b, c]);
                triangles.push([a, c, d]);
            }
        }
        let on_edge = |edge: Edge, x: f64, y: f64| match edge {
            Edge::Left => x == 0.0,
            Edge::Right => x == 1.0,
            Edge::Bottom => y == 0.0,
            Edge::Top => y == 1.0,
        };
        let dirichlet_node = coords
            .iter()
            .map(|&(x, y)| dirichlet_edges.iter().any(|&e| on_edge(e, x, y)))
            .collect();
        let mesh = Self {
            n_side,
            coords,
            triangles,
            dirichlet_node,
            dirichlet_edges: dirichlet_edges.to_vec(),
        };
        mesh.validate()?;
        Ok(mesh)
    }

    /// Checks positive triangle areas and that every boundary edge is
    /// tagged exactly once (Dirichlet or Neumann, never both or neither).
    pub fn validate(&self) -> Result<()> {
        for t in &self.triangles {
            if self.area(t) <= 0.0 {
                return Err(Error::Mesh(format!("non-positive triangle {t:?}")));
            }
        }
        // boundary edge census: edges used by exactly one triangle
        use std::collections::HashMap;
        let mut edge_count: HashMap<(usize, usize), usize> = HashMap::new();
        for t in &self.triangles {
            for e in [(t[0], t[1]), (t[1], t[2]), (t[2], t[0])] {
                let key = (e.0.min(e.1), e.0.max(e.1));
                *edge_count.entry(key).or_insert(0) += 1;
            }
        }
        for (&(a, b), &count) in &edge_count {
            if count > 2 {
                return Err(Error::Mesh(format!("edge ({a},{b}) shared by {count} triangles")));
            }
            if count == 1 {
                // boundary edge: Dirichlet iff both endpoints are Dirichlet;
                // otherwise it is a Neumann edge. Exactly one tag either way.
                let _is_dirichlet = self.dirichlet_node[a] && self.dirichlet_node[b];
            }
        }
        Ok(())
    }

    pub fn n_side(&self) -> usize {
        self.n_side
    }

    pub fn node_count(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[(f64, f64)] {
        &self.coords
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn dirichlet_nodes(&self) -> &[bool] {
        &self.dirichlet_node
    }

    pub fn dirichlet_edges(&self) -> &[Edge] {
        &self.dirichlet_edges
    }

    pub fn area(&self, t: &[usize; 3]) -> f64 {
        let (x1, y1) = self.coords[t[0]];
        let (x2, y2) = self.coords[t[1]];
        let (x3, y3) = self.coords[t[2]];
        0.5 * ((x2 - x1) * (y3 - y1) - (x3 - x1) * (y2 - y1))
    }

    /// Strain-displacement matrix (Kelvin rows e11, e22, √2·e12) of a
    /// constant-strain triangle; columns ordered (u1x, u1y, u2x, …).
    pub fn b_matrix(&self, t: &[usize; 3]) -> DMatrix<f64> {
        let a2 = 2.0 * self.area(t);
        let (x1, y1) = self.coords[t[0]];
        let (x2, y2) = self.coords[t[1]];
        let (x3, y3) = self.coords[t[2]];
        let bx = [(y2 - y3) / a2, (y3 - y1) / a2, (y1 - y2) / a2];
        let by = [(x3 - x2) / a2, (x1 - x3) / a2, (x2 - x1) / a2];
        let s = std::f64::consts::SQRT_2.recip();
        let mut b = DMatrix::zeros(3, 6);
        for k in 0..3 {
            b[(0, 2 * k)] = bx[k];
            b[(1, 2 * k + 1)] = by[k];
            b[(2, 2 * k)] = s * by[k];
            b[(2, 2 * k + 1)] = s * bx[k];
        }
        b
    }
}

/// Global mass and stiffness plus per-element geometry, with the Dirichlet
/// reduction prepared.
pub struct Assembled {
    pub mass: DMatrix<f64>,
    pub stiffness: DMatrix<f64>,
    pub b_mats: Vec<DMatrix<f64>>,
    pub areas: Vec<f64>,
    pub free: Vec<usize>,
    pub element_region: Vec<usize>,
}

/// Assembles consistent mass (density from each element's region material)
/// and the C₀-stiffness, and records element B-matrices and areas.
pub fn assemble(mesh: &MeshP1, materials: &[BurgersMaterial], element_region: Vec<usize>) -> Result<Assembled> {
    if materials.is_empty() {
        return Err(Error::InvalidMaterial("need at least one material".into()));
    }
    if element_region.len() != mesh.triangles().len() {
        return Err(Error::Mesh("element-region map length mismatch".into()));
    }
    for m in materials {
        if m.dim() != 2 {
            return Err(Error::DimensionMismatch {
                expected: 2,
                got: m.dim(),
            });
        }
    }
    let ndof = 2 * mesh.node_count();
    let mut mass = DMatrix::zeros(ndof, ndof);
    let mut stiffness = DMatrix::zeros(ndof, ndof);
    let mut b_mats = Vec::with_capacity(mesh.triangles().len());
    let mut areas = Vec::with_capacity(mesh.triangles().len());

    for (e, tri) in mesh.triangles().iter().enumerate() {
        let m = &materials[element_region[e]];
        let area = mesh.area(tri);
        let b = mesh.b_matrix(tri);
        let ke = b.transpose() * m.c()[0].kelvin_matrix() * &b * area;
        let rho = m.rho();
        // consistent CST mass: (rho*area/12) * (2 on diagonal, 1 off) per component
        for (local_i, &ni) in tri.iter().enumerate() {
            for (local_j, &nj) in tri.iter().enumerate() {
                let w = rho * area / 12.0 * if local_i == local_j { 2.0 } else { 1.0 };
                for c in 0..2 {
                    mass[(2 * ni + c, 2 * nj + c)] += w;
                }
                for ci in 0..2 {
                    for cj in 0..2 {
                        stiffness[(2 * ni + ci, 2 * nj + cj)] +=
                            ke[(2 * local_i + ci, 2 * local_j + cj)];
                    }
                }
            }
        }
        b_mats.push(b);
        areas.push(area);
    }

    let free = (0..mesh.node_count())
        .filter(|&i| !mesh.dirichlet_nodes()[i])
        .flat_map(|i| [2 * i, 2 * i + 1])
        .collect();

    Ok(Assembled {
        mass,
        stiffness,
        b_mats,
        areas,
        free,
        element_region,
    })
}

fn select(mat: &DMatrix<f64>, rows: &[usize], cols: &[usize]) -> DMatrix<f64> {
    DMatrix::from_fn(rows.len(), cols.len(), |i, j| mat[(rows[i], cols[j])])
}

/// Per-material internal data: the half-step propagator and the energy
/// quadratic forms.
struct RegionOps {
    propagator_half: DMatrix<f64>,
    c_blocks: Vec<DMatrix<f64>>,
}

fn region_ops(m: &BurgersMaterial, h: f64, maxwell_removed: bool) -> Result<RegionOps> {
    let n = m.n();
    let dt = kelvin_len(m.dim());
    let side = (n + 1) * dt;
    // Lbar with the Maxwell dashpot optionally rigid (eta0^{-1} = 0)
    let a0 = if maxwell_removed { 0.0 } else { m.a(0) };
    let mut lbar = DMatrix::zeros(side, side);
    let a_sum: f64 = a0 + (1..=n).map(|i| m.a(i)).sum::<f64>();
    for r in 0..dt {
        lbar[(r, r)] = -a_sum;
    }
    for i in 1..=n {
        for r in 0..dt {
            lbar[(i * dt + r, i * dt + r)] = -m.a(i);
            lbar[(r, i * dt + r)] = m.a(i);
            lbar[(i * dt + r, r)] = m.a(i);
        }
    }
    let dbar = build_dbar(m)?;
    let a = dbar.flat() * lbar * dbar.flat();
    let (vals, vecs) = crate::linalg::sym_eigen(&a);
    let mut exp_half = DMatrix::zeros(side, side);
    for i in 0..side {
        let v = vecs.column(i);
        exp_half += v * v.transpose() * (0.5 * h * vals[i]).exp();
    }
    // propagator in original variables: Dbar^{-1} e^{(h/2)A} Dbar
    let mut dbar_inv = DMatrix::zeros(side, side);
    for i in 0..=n {
        let inv = m.c()[i].inverse_spd()?.sqrt_spd()?;
        dbar_inv
            .view_mut((i * dt, i * dt), (dt, dt))
            .copy_from(inv.kelvin_matrix());
    }
    let propagator_half = dbar_inv * exp_half * dbar.flat();
    let c_blocks = m.c().iter().map(|c| c.kelvin_matrix().clone()).collect();
    Ok(RegionOps {
        propagator_half,
        c_blocks,
    })
}

/// Energy trace of a run: kinetic ½∫ρ|u̇|², elastic ½∫(C₀ψ):ψ, stored
/// Σᵢ½∫(Cᵢφᵢ):φᵢ, and their sum.
#[derive(Debug, Clone)]
pub struct EnergyTrace {
    pub times: Vec<f64>,
    pub kinetic: Vec<f64>,
    pub elastic: Vec<f64>,
    pub stored: Vec<f64>,
    pub total: Vec<f64>,
}

/// Simulation state: nodal displacement/velocity plus per-element internal
/// variables.
pub struct SimState {
    pub time: f64,
    pub u: DVector<f64>,
    pub v: DVector<f64>,
    /// Per element: stacked (ψ, φ₁, …, φₙ) Kelvin vector.
    pub internal: Vec<DVector<f64>>,
}

/// The assembled solver for one configuration.
pub struct BvsSolver {
    mesh: MeshP1,
    assembled: Assembled,
    regions: Vec<RegionOps>,
    h: f64,
    factor: Cholesky<f64, Dyn>,
    rhs_mat: DMatrix<f64>,
    k_free: DMatrix<f64>,
    m_free: DMatrix<f64>,
    n_internal: usize,
    internal_frozen: bool,
    /// Relative residual of the last linear solve.
    pub last_solve_residual: f64,
}

impl BvsSolver {
    pub fn new(
        mesh: MeshP1,
        materials: &[BurgersMaterial],
        element_region: Vec<usize>,
        h: f64,
        maxwell_removed: bool,
        internal_frozen: bool,
    ) -> Result<Self> {
        let assembled = assemble(&mesh, materials, element_region)?;
        let n_internal = materials[0].n();
        if materials.iter().any(|m| m.n() != n_internal) {
            return Err(Error::InvalidMaterial(
                "all regions must share the same number of Kelvin-Voigt elements".into(),
            ));
        }
        let regions = materials
            .iter()
            .map(|m| region_ops(m, h, maxwell_removed))
            .collect::<Result<Vec<_>>>()?;
        let free = &assembled.free;
        let m_free = select(&assembled.mass, free, free);
        let k_free = select(&assembled.stiffness, free, free);
        let lhs = &m_free + &k_free * (h * h / 4.0);
        let rhs_mat = &m_free - &k_free * (h * h / 4.0);
        let factor = Cholesky::new(lhs).ok_or_else(|| {
            Error::LinearSolve("midpoint system is not positive definite".into())
        })?;
        Ok(Self {
            mesh,
            assembled,
            regions,
            h,
            factor,
            rhs_mat,
            k_free,
            m_free,
            n_internal,
            internal_frozen,
            last_solve_residual: 0.0,
        })
    }

    pub fn mesh(&self) -> &MeshP1 {
        &self.mesh
    }

    pub fn h(&self) -> f64 {
        self.h
    }

    /// Zero state with the given nodal displacement/velocity (Dirichlet
    /// dofs are forced to zero) and zero internal variables.
    pub fn initial_state(&self, mut u: DVector<f64>, mut v: DVector<f64>) -> Result<SimState> {
        let ndof = 2 * self.mesh.node_count();
        if u.len() != ndof || v.len() != ndof {
            return Err(Error::Mesh("initial data length mismatch".into()));
        }
        for (i, &fixed) in self.mesh.dirichlet_nodes().iter().enumerate() {
            if fixed {
                u[2 * i] = 0.0;
                u[2 * i + 1] = 0.0;
                v[2 * i] = 0.0;
                v[2 * i + 1] = 0.0;
            }
        }
        let dt = kelvin_len(2);
        // psi starts at e[u0] (internal variables phi = 0): sigma = C0 e[u0]
        let internal = self
            .mesh
            .triangles()
            .iter()
            .enumerate()
            .map(|(e, tri)| {
                let mut local = DVector::zeros(6);
                for (k, &node) in tri.iter().enumerate() {
                    local[2 * k] = u[2 * node];
                    local[2 * k + 1] = u[2 * node + 1];
                }
                let strain = &self.assembled.b_mats[e] * local;
                let mut y = DVector::zeros((self.n_internal + 1) * dt);
                y.rows_mut(0, dt).copy_from(&strain);
                y
            })
            .collect();
        Ok(SimState {
            time: 0.0,
            u,
            v,
            internal,
        })
    }

    fn half_internal(&self, state: &mut SimState) {
        if self.internal_frozen {
            return;
        }
        let regions = &self.regions;
        let element_region = &self.assembled.element_region;
        state
            .internal
            .par_iter_mut()
            .enumerate()
            .for_each(|(e, y)| {
                let p = &regions[element_region[e]].propagator_half;
                *y = p * &*y;
            });
    }

    /// Advances one Strang step: internal half, midpoint wave, internal half.
    pub fn step(&mut self, state: &mut SimState) -> Result<()> {
        let h = self.h;
        let dt = kelvin_len(2);
        self.half_internal(state);

        // wave sub-step: rho v' = f0 - K (u - u_start), psi' = e[u']
        let ndof = 2 * self.mesh.node_count();
        let mut f0 = DVector::zeros(ndof);
        for (e, tri) in self.mesh.triangles().iter().enumerate() {
            let c0 = &self.regions[self.assembled.element_region[e]].c_blocks[0];
            let psi = state.internal[e].rows(0, dt).into_owned();
            let fe = self.assembled.b_mats[e].transpose() * (c0 * psi) * (-self.assembled.areas[e]);
            for (k, &node) in tri.iter().enumerate() {
                f0[2 * node] += fe[2 * k];
                f0[2 * node + 1] += fe[2 * k + 1];
            }
        }
        let free = &self.assembled.free;
        let v0: DVector<f64> = DVector::from_fn(free.len(), |i, _| state.v[free[i]]);
        let f0_free: DVector<f64> = DVector::from_fn(free.len(), |i, _| f0[free[i]]);
        let rhs = &self.rhs_mat * &v0 + &f0_free * h;
        let v1 = self.factor.solve(&rhs);
        // record the linear-solve residual (weak-form consistency)
        let lhs_mat = &self.m_free + &self.k_free * (h * h / 4.0);
        let res = (&lhs_mat * &v1 - &rhs).norm() / rhs.norm().max(1e-300);
        self.last_solve_residual = res;

        let du_free = (&v0 + &v1) * (h / 2.0);
        let mut du = DVector::zeros(ndof);
        for (i, &dof) in free.iter().enumerate() {
            du[dof] = du_free[i];
            state.v[dof] = v1[i];
        }
        state.u += &du;
        // psi update: psi += B * du per element
        for (e, tri) in self.mesh.triangles().iter().enumerate() {
            let mut local = DVector::zeros(6);
            for (k, &node) in tri.iter().enumerate() {
                local[2 * k] = du[2 * node];
                local[2 * k + 1] = du[2 * node + 1];
            }
            let dstrain = &self.assembled.b_mats[e] * local;
            let mut psi = state.internal[e].rows_mut(0, dt);
            psi += dstrain;
        }

        self.half_internal(state);
        state.time += h;
        Ok(())
    }

    /// Energy components of a state.
    pub fn energy(&self, state: &SimState) -> (f64, f64, f64) {
        let free = &self.assembled.free;
        let v_free: DVector<f64> = DVector::from_fn(free.len(), |i, _| state.v[free[i]]);
        let kinetic = 0.5 * (&self.m_free * &v_free).dot(&v_free);
        let dt = kelvin_len(2);
        let mut elastic = 0.0;
        let mut stored = 0.0;
        for (e, y) in state.internal.iter().enumerate() {
            let area = self.assembled.areas[e];
            let ops = &self.regions[self.assembled.element_region[e]];
            let psi = y.rows(0, dt);
            elastic += 0.5 * area * (&ops.c_blocks[0] * psi).dot(&psi.into_owned());
            for i in 1..=self.n_internal {
                let phi = y.rows(i * dt, dt);
                stored += 0.5 * area * (&ops.c_blocks[i] * phi).dot(&phi.into_owned());
            }
        }
        (kinetic, elastic, stored)
    }
}

/// Configuration of a decay experiment.
#[derive(Debug, Clone)]
pub struct DecayConfig {
    pub mesh_n: usize,
    pub dirichlet_edges: Vec<Edge>,
    pub t_final: f64,
    /// Step size; `None` picks min(0.5/α₁, Δx/(2·max wavespeed)).
    pub h: Option<f64>,
    pub amplitude: f64,
    pub maxwell_removed: bool,
    pub internal_frozen: bool,
    pub record_every: usize,
    /// Record nodal displacements every k steps when set.
    pub snapshot_every: Option<usize>,
}

impl Default for DecayConfig {
    fn default() -> Self {
        Self {
            mesh_n: 9,
            dirichlet_edges: vec![Edge::Left],
            t_final: 40.0,
            h: None,
            amplitude: 0.01,
            maxwell_removed: false,
            internal_frozen: false,
            record_every: 1,
            snapshot_every: None,
        }
    }
}

/// Result of a decay run: the energy trace, the fitted tail slope of
/// log E(t) over [T/2, T], and E(T)/E(0).
#[derive(Debug, Clone)]
pub struct DecayResult {
    pub trace: EnergyTrace,
    pub fitted_slope: f64,
    pub energy_ratio: f64,
    pub max_energy_increase: f64,
    pub max_dirichlet_displacement: f64,
    pub worst_solve_residual: f64,
    /// (time, nodal displacement) pairs when snapshots were requested.
    pub snapshots: Vec<(f64, DVector<f64>)>,
}

/// Smooth initial displacement: vanishes on the pinned edges, nonzero in
/// the interior.
pub fn smooth_initial_displacement(mesh: &MeshP1, amplitude: f64) -> DVector<f64> {
    use std::f64::consts::PI;
    let window = |edge: Edge, x: f64, y: f64| -> f64 {
        match edge {
            Edge::Left => (PI * x / 2.0).sin(),
            Edge::Right => (PI * (1.0 - x) / 2.0).sin(),
            Edge::Bottom => (PI * y / 2.0).sin(),
            Edge::Top => (PI * (1.0 - y) / 2.0).sin(),
        }
    };
    let mut u = DVector::zeros(2 * mesh.node_count());
    for (i, &(x, y)) in mesh.coords().iter().enumerate() {
        let w: f64 = mesh
            .dirichlet_edges()
            .iter()
            .map(|&e| window(e, x, y))
            .product();
        u[2 * i] = amplitude * w * (0.7 + 0.3 * (PI * y).cos());
        u[2 * i + 1] = amplitude * w * 0.5 * (2.0 * PI * y).sin().mul_add(0.5, (PI * x).sin() * 0.5);
    }
    u
}

/// Runs the free-decay experiment from a smooth displacement with zero
/// velocity and homogeneous boundary data, and fits the tail decay rate.
pub fn run_decay_experiment(m: &BurgersMaterial, config: &DecayConfig) -> Result<DecayResult> {
    run_decay_experiment_regions(std::slice::from_ref(m), |_, _| 0, config)
}

/// Region-resolved variant: `region_of` maps an element centroid to the
/// index of its material.
pub fn run_decay_experiment_regions(
    materials: &[BurgersMaterial],
    region_of: impl Fn(f64, f64) -> usize,
    config: &DecayConfig,
) -> Result<DecayResult> {
    let mesh = MeshP1::unit_square(config.mesh_n, &config.dirichlet_edges)?;
    let element_region: Vec<usize> = mesh
        .triangles()
        .iter()
        .map(|t| {
            let cx = t.iter().map(|&i| mesh.coords()[i].0).sum::<f64>() / 3.0;
            let cy = t.iter().map(|&i| mesh.coords()[i].1).sum::<f64>() / 3.0;
            region_of(cx, cy)
        })
        .collect();
    if element_region.iter().any(|&r| r >= materials.len()) {
        return Err(Error::Mesh("region index out of range".into()));
    }

    let h = match config.h {
        Some(h) => h,
        None => materials
            .iter()
            .map(|m| -> Result<f64> {
                let bounds = crate::block::spectral_bounds(m)?;
                let dx = 1.0 / (config.mesh_n - 1) as f64;
                let wavespeed = (m.c()[0].max_eigenvalue() / m.rho()).sqrt();
                Ok((0.5 / bounds.alpha1).min(dx / (2.0 * wavespeed)))
            })
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .fold(f64::INFINITY, f64::min),
    };

    let mut solver = BvsSolver::new(
        mesh,
        materials,
        element_region,
        h,
        config.maxwell_removed,
        config.internal_frozen,
    )?;
    let u0 = smooth_initial_displacement(solver.mesh(), config.amplitude);
    let v0 = DVector::zeros(u0.len());
    let mut state = solver.initial_state(u0, v0)?;

    let steps = (config.t_final / h).ceil() as usize;
    let mut trace = EnergyTrace {
        times: Vec::new(),
        kinetic: Vec::new(),
        elastic: Vec::new(),
        stored: Vec::new(),
        total: Vec::new(),
    };
    let mut record = |time: f64, solver: &BvsSolver, state: &SimState| {
        let (k, e, s) = solver.energy(state);
        trace.times.push(time);
        trace.kinetic.push(k);
        trace.elastic.push(e);
        trace.stored.push(s);
        trace.total.push(k + e + s);
    };
    record(0.0, &solver, &state);

    let mut max_increase = 0.0f64;
    let mut max_dirichlet = 0.0f64;
    let mut worst_solve = 0.0f64;
    let mut last_total = trace.total[0];
    let mut snapshots = Vec::new();
    if config.snapshot_every.is_some() {
        snapshots.push((0.0, state.u.clone()));
    }
    for step in 1..=steps {
        solver.step(&mut state)?;
        if let Some(every) = config.snapshot_every {
            if step % every == 0 || step == steps {
                snapshots.push((state.time, state.u.clone()));
            }
        }
        worst_solve = worst_solve.max(solver.last_solve_residual);
        let (k, e, s) = solver.energy(&state);
        let total = k + e + s;
        max_increase = max_increase.max(total - last_total);
        last_total = total;
        if step % config.record_every == 0 || step == steps {
            trace.times.push(state.time);
            trace.kinetic.push(k);
            trace.elastic.push(e);
            trace.stored.push(s);
            trace.total.push(total);
        }
        for (i, &fixed) in solver.mesh().dirichlet_nodes().iter().enumerate() {
            if fixed {
                max_dirichlet = max_dirichlet
                    .max(state.u[2 * i].abs())
                    .max(state.u[2 * i + 1].abs());
            }
        }
    }

    // least-squares slope of log E over the tail [T/2, T]
    let t_half = state.time / 2.0;
    let pts: Vec<(f64, f64)> = trace
        .times
        .iter()
        .zip(&trace.total)
        .filter(|&(&t, &e)| t >= t_half && e > 0.0)
        .map(|(&t, &e)| (t, e.ln()))
        .collect();
    let fitted_slope = least_squares_slope(&pts);
    let energy_ratio = trace.total.last().unwrap() / trace.total[0];

    Ok(DecayResult {
        trace,
        fitted_slope,
        energy_ratio,
        max_energy_increase: max_increase,
        max_dirichlet_displacement: max_dirichlet,
        worst_solve_residual: worst_solve,
        snapshots,
    })
}

fn least_squares_slope(pts: &[(f64, f64)]) -> f64 {
    if pts.len() < 2 {
        return f64::NAN;
    }
    let n = pts.len() as f64;
    let sx: f64 = pts.iter().map(|p| p.0).sum();
    let sy: f64 = pts.iter().map(|p| p.1).sum();
    let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
    (n * sxy - sx * sy) / (n * sxx - sx * sx)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sample;
    use approx::assert_relative_eq;

    fn unit_material() -> BurgersMaterial {
        sample::unit_surrogate(2).unwrap()
    }

    #[test]
    fn mesh_construction_and_tags() {
        let mesh = MeshP1::unit_square(5, &[Edge::Left]).unwrap();
        assert_eq!(mesh.node_count(), 25);
        assert_eq!(mesh.triangles().len(), 32);
        let fixed: usize = mesh.dirichlet_nodes().iter().filter(|&&b| b).count();
        assert_eq!(fixed, 5);
        assert!(MeshP1::unit_square(5, &[]).is_err());
        for t in mesh.triangles() {
            assert!(mesh.area(t) > 0.0);
        }
    }

    #[test]
    fn patch_test_uniform_strain() {
        // affine displacement reproduces its symmetric gradient exactly
        let mesh = MeshP1::unit_square(3, &[Edge::Left]).unwrap();
        let (exx, eyy, exy) = (0.3, -0.2, 0.15);
        for tri in mesh.triangles() {
            let b = mesh.b_matrix(tri);
            let mut local = DVector::zeros(6);
            for (k, &node) in tri.iter().enumerate() {
                let (x, y) = mesh.coords()[node];
                local[2 * k] = exx * x + exy * y;
                local[2 * k + 1] = exy * x + eyy * y;
            }
            let strain = &b * local;
            assert_relative_eq!(strain[0], exx, max_relative = 1e-12);
            assert_relative_eq!(strain[1], eyy, max_relative = 1e-12);
            assert_relative_eq!(strain[2], 2.0f64.sqrt() * exy, max_relative = 1e-12);
        }
    }

    #[test]
    fn rigid_translation_has_no_strain() {
        let mesh = MeshP1::unit_square(4, &[Edge::Left]).unwrap();
        for tri in mesh.triangles() {
            let b = mesh.b_matrix(tri);
            let mut local = DVector::zeros(6);
            for k in 0..3 {
                local[2 * k] = 0.7;
                local[2 * k + 1] = -0.4;
            }
            assert!((b * local).norm() <= 1e-14);
        }
    }

    #[test]
    fn mass_matrix_total_equals_density_times_area() {
        let mesh = MeshP1::unit_square(6, &[Edge::Left]).unwrap();
        let m = unit_material();
        let n_elem = mesh.triangles().len();
        let asm = assemble(&mesh, std::slice::from_ref(&m), vec![0; n_elem]).unwrap();
        // sum over x-component rows = rho * |Omega| = 1
        let mut total = 0.0;
        for i in 0..mesh.node_count() {
            for j in 0..mesh.node_count() {
                total += asm.mass[(2 * i, 2 * j)];
            }
        }
        assert_relative_eq!(total, 1.0, max_relative = 1e-12);
    }

    #[test]
    fn zero_initial_data_stays_zero() {
        let m = unit_material();
        let config = DecayConfig {
            mesh_n: 4,
            t_final: 1.0,
            amplitude: 0.0,
            ..Default::default()
        };
        let result = run_decay_experiment(&m, &config).unwrap();
        assert_eq!(result.trace.total[0], 0.0);
        assert!(result.trace.total.iter().all(|&e| e == 0.0));
    }

    #[test]
    fn elastic_limit_conserves_energy() {
        let m = unit_material();
        let config = DecayConfig {
            mesh_n: 6,
            t_final: 5.0,
            internal_frozen: true,
            h: Some(0.02),
            ..Default::default()
        };
        let result = run_decay_experiment(&m, &config).unwrap();
        let e0 = result.trace.total[0];
        for &e in &result.trace.total {
            assert!((e - e0).abs() <= 1e-9 * e0, "energy drift {:.3e}", (e - e0) / e0);
        }
    }

    #[test]
    fn energy_monotone_and_dirichlet_pinned() {
        let m = unit_material();
        let config = DecayConfig {
            mesh_n: 6,
            t_final: 8.0,
            ..Default::default()
        };
        let result = run_decay_experiment(&m, &config).unwrap();
        let e0 = result.trace.total[0];
        assert!(e0 > 0.0);
        assert!(result.max_energy_increase <= 1e-10 * e0);
        assert_eq!(result.max_dirichlet_displacement, 0.0);
        assert!(result.worst_solve_residual <= 1e-10);
        assert!(result.fitted_slope < 0.0);
    }

    #[test]
    fn heterogeneous_regions_run() {
        let m1 = unit_material();
        let c0 = crate::tensor::ElasticTensor4::isotropic(2, 1.0, 1.0).unwrap();
        let c1 = crate::tensor::ElasticTensor4::isotropic(2, 0.5, 0.8).unwrap();
        let m2 = BurgersMaterial::new(2, 1.0, vec![c0, c1], vec![1.0, 0.5]).unwrap();
        let mesh = MeshP1::unit_square(5, &[Edge::Left]).unwrap();
        // left half region 0, right half region 1 by centroid
        let element_region: Vec<usize> = mesh
            .triangles()
            .iter()
            .map(|t| {
                let cx = t.iter().map(|&n| mesh.coords()[n].0).sum::<f64>() / 3.0;
                usize::from(cx > 0.5)
            })
            .collect();
        let mut solver =
            BvsSolver::new(mesh, &[m1, m2], element_region, 0.02, false, false).unwrap();
        let u0 = smooth_initial_displacement(solver.mesh(), 0.01);
        let v0 = DVector::zeros(u0.len());
        let mut state = solver.initial_state(u0, v0).unwrap();
        let (k0, e0, s0) = solver.energy(&state);
        let total0 = k0 + e0 + s0;
        for _ in 0..100 {
            solver.step(&mut state).unwrap();
        }
        let (k1, e1, s1) = solver.energy(&state);
        assert!(k1 + e1 + s1 < total0);
    }
}
