//! Command implementations behind the `burgers-relax` binary.
//!
//! Every command is a plain function over a parsed configuration so the
//! CLI surface is testable without spawning processes. Failure paths
//! return errors that the binary prints as one `error: …` line with a
//! nonzero exit code.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::block::spectral_bounds;
use crate::config::{parse_t_grid, ModelConfig};
use crate::constitutive::{convolve, integrate_internal_with};
use crate::csvio::{fmt, write_csv, write_stress_trace};
use crate::error::{Error, Result};
use crate::fem::{run_decay_experiment_regions, DecayConfig};
use crate::prony::{build_prony_form, eval_g_prony};
use crate::relax::{decay_certificate, verify_estimates, RelaxationEvaluator};
use crate::report::Report;
use crate::sample;
use crate::tensor::kelvin_len;

#[derive(Parser)]
#[command(
    name = "burgers-relax",
    about = "Relaxation tensor construction and decay certification for the anisotropic extended Burgers model",
    version
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Method {
    Exp,
    Prony,
    Both,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ResponseMethod {
    Ode,
    Conv,
    Both,
}

#[derive(Args)]
pub struct ConfigArg {
    /// Path to the JSON model configuration.
    #[arg(long)]
    pub config: PathBuf,
}

#[derive(Subcommand)]
pub enum Command {
    /// Check model admissibility and commutativity; exit 0 iff admissible.
    Validate {
        #[command(flatten)]
        config: ConfigArg,
        /// Print the report as JSON instead of text.
        #[arg(long)]
        json: bool,
    },
    /// Tabulate G(t) over a time grid as CSV.
    Relax {
        #[command(flatten)]
        config: ConfigArg,
        #[arg(long, default_value = "relaxation.csv")]
        out: PathBuf,
        #[arg(long, value_enum, default_value_t = Method::Exp)]
        method: Method,
        /// Override the config t-grid: "start:stop:count[:log]".
        #[arg(long, allow_hyphen_values = true)]
        tgrid: Option<String>,
        /// Reuse/store the eigensystem in this file.
        #[arg(long)]
        cache: Option<PathBuf>,
    },
    /// Export the Prony form (channels, poles, coefficients, projections).
    PronyExport {
        #[command(flatten)]
        config: ConfigArg,
        #[arg(long, default_value = "prony.csv")]
        out: PathBuf,
    },
    /// Verify the derivative estimates and the decay conditions; persist
    /// the certificate.
    Certificate {
        #[command(flatten)]
        config: ConfigArg,
        #[arg(long, default_value = "certificate.json")]
        out: PathBuf,
        #[arg(long)]
        json: bool,
        #[arg(long)]
        cache: Option<PathBuf>,
    },
    /// Drive the material with a strain history CSV and write the stress.
    Respond {
        #[command(flatten)]
        config: ConfigArg,
        /// Strain history CSV: t plus Kelvin strain components.
        #[arg(long)]
        strain: PathBuf,
        #[arg(long, default_value = "stress.csv")]
        out: PathBuf,
        #[arg(long, value_enum, default_value_t = ResponseMethod::Ode)]
        method: ResponseMethod,
    },
    /// Run the energy-decay experiment and write the energy trace.
    Simulate {
        #[command(flatten)]
        config: ConfigArg,
        #[arg(long, default_value = "energy.csv")]
        out: PathBuf,
        /// Also dump nodal displacements every k steps (long CSV format).
        #[arg(long)]
        snapshots: Option<PathBuf>,
        #[arg(long, default_value_t = 50)]
        snapshot_every: usize,
    },
    /// Cross-check the exponential and Prony constructions.
    Compare {
        #[command(flatten)]
        config: ConfigArg,
        #[arg(long, allow_hyphen_values = true)]
        tgrid: Option<String>,
        /// Additional random commuting materials to sweep.
        #[arg(long, default_value_t = 0)]
        count: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        json: bool,
    },
}

/// Runs a parsed command, returning the process exit code.
pub fn run(cli: Cli) -> Result<i32> {
    match cli.command {
        Command::Validate { config, json } => cmd_validate(&config.config, json),
        Command::Relax {
            config,
            out,
            method,
            tgrid,
            cache,
        } => cmd_relax(&config.config, &out, method, tgrid.as_deref(), cache.as_deref()),
        Command::PronyExport { config, out } => cmd_prony_export(&config.config, &out),
        Command::Certificate {
            config,
            out,
            json,
            cache,
        } => cmd_certificate(&config.config, &out, json, cache.as_deref()),
        Command::Respond {
            config,
            strain,
            out,
            method,
        } => cmd_respond(&config.config, &strain, &out, method),
        Command::Simulate {
            config,
            out,
            snapshots,
            snapshot_every,
        } => cmd_simulate(&config.config, &out, snapshots.as_deref(), snapshot_every),
        Command::Compare {
            config,
            tgrid,
            count,
            seed,
            json,
        } => cmd_compare(&config.config, tgrid.as_deref(), count, seed, json),
    }
}

fn cmd_validate(config_path: &Path, json: bool) -> Result<i32> {
    let config = ModelConfig::from_path(config_path)?;
    let mut report = Report::default();

    // admissibility (strong convexity + positive viscosities)
    let specs = config
        .materials
        .iter()
        .map(|s| s.build(config.dim))
        .collect::<Result<Vec<_>>>()?;
    let admissibility = crate::tensor::check_admissibility(&specs, &config.viscosities);
    let worst_sym = admissibility
        .symmetry_residuals
        .iter()
        .cloned()
        .fold(0.0f64, f64::max);
    report.push(
        "admissibility",
        admissibility.passed(),
        worst_sym,
        None,
        if admissibility.passed() {
            format!(
                "c_* = {:.6e}, eta_* = {:.6e}",
                admissibility.c_star, admissibility.eta_star
            )
        } else {
            admissibility.failures.join("; ")
        },
    );

    // commutativity (decides whether the Prony path is available)
    let mut worst = 0.0f64;
    let mut worst_pair = (0usize, 0usize);
    for i in 0..specs.len() {
        for j in (i + 1)..specs.len() {
            let r = specs[i].commute_residual(&specs[j])?;
            if r > worst {
                worst = r;
                worst_pair = (i, j);
            }
        }
    }
    let commuting = worst <= config.run.commute_tol;
    report.push(
        "commutativity",
        true, // informational: does not gate the exit code
        worst,
        Some(format!("pair (C{}, C{})", worst_pair.0, worst_pair.1)),
        if commuting {
            "commuting: yes (L-method available)".to_string()
        } else {
            "commuting: no (L-method unavailable)".to_string()
        },
    );

    if json {
        println!("{}", report.to_json());
    } else {
        println!("{report}");
    }
    Ok(if admissibility.passed() { 0 } else { 1 })
}

fn evaluator_for(
    m: &crate::block::BurgersMaterial,
    cache: Option<&Path>,
) -> Result<RelaxationEvaluator> {
    if let Some(path) = cache {
        if path.exists() {
            if let Ok(ev) = RelaxationEvaluator::load_for(path, m) {
                return Ok(ev);
            }
        }
        let ev = RelaxationEvaluator::build(m)?;
        ev.save(path)?;
        return Ok(ev);
    }
    RelaxationEvaluator::build(m)
}

fn cmd_relax(
    config_path: &Path,
    out: &Path,
    method: Method,
    tgrid: Option<&str>,
    cache: Option<&Path>,
) -> Result<i32> {
    let config = ModelConfig::from_path(config_path)?;
    let m = config.build_material()?;
    let grid = match tgrid {
        Some(spec) => parse_t_grid(spec)?,
        None => config.parse_t_grid()?,
    };
    let dt = kelvin_len(config.dim);

    let ev = match method {
        Method::Exp | Method::Both => Some(evaluator_for(&m, cache)?),
        Method::Prony => None,
    };
    let pf = match method {
        Method::Prony | Method::Both => Some(build_prony_form(&m, config.run.commute_tol)?),
        Method::Exp => None,
    };

    let mut header: Vec<String> = vec!["t".into()];
    for r in 1..=dt {
        for c in 1..=dt {
            header.push(format!("G_{r}_{c}"));
        }
    }
    if method == Method::Both {
        header.push("max_discrepancy".into());
    }
    let header_refs: Vec<&str> = header.iter().map(String::as_str).collect();

    let mut rows = Vec::with_capacity(grid.len());
    for &t in &grid {
        let primary = match (&ev, &pf) {
            (Some(ev), _) => ev.eval_g(t),
            (None, Some(pf)) => eval_g_prony(pf, t),
            _ => unreachable!(),
        };
        let mut row = vec![fmt(t)];
        for r in 0..dt {
            for c in 0..dt {
                row.push(fmt(primary.kelvin_matrix()[(r, c)]));
            }
        }
        if method == Method::Both {
            let other = eval_g_prony(pf.as_ref().unwrap(), t);
            let scale = primary.kelvin_matrix().norm().max(1e-300);
            let disc = (primary.kelvin_matrix() - other.kelvin_matrix()).norm() / scale;
            row.push(fmt(disc));
        }
        rows.push(row);
    }
    write_csv(out, &header_refs, &rows)?;
    println!("wrote {} rows to {}", rows.len(), out.display());
    Ok(0)
}

fn cmd_prony_export(config_path: &Path, out: &Path) -> Result<i32> {
    let config = ModelConfig::from_path(config_path)?;
    let m = config.build_material()?;
    let pf = build_prony_form(&m, config.run.commute_tol)?;
    let header = ["record", "channel", "root", "multiplicity_index", "coefficient"];
    let mut rows: Vec<Vec<String>> = Vec::new();
    for ch in &pf.channels {
        for term in &ch.terms {
            rows.push(vec![
                "term".into(),
                (ch.k + 1).to_string(),
                fmt(term.root),
                term.power.to_string(),
                fmt(term.coeff),
            ]);
        }
    }
    // projection entries follow, reusing the row/col columns
    for (k, p) in pf.joint.projections.iter().enumerate() {
        for r in 0..p.nrows() {
            for c in 0..p.ncols() {
                rows.push(vec![
                    "proj".into(),
                    (k + 1).to_string(),
                    (r + 1).to_string(),
                    (c + 1).to_string(),
                    fmt(p[(r, c)]),
                ]);
            }
        }
    }
    write_csv(out, &header, &rows)?;
    println!(
        "wrote {} channels ({} rows) to {}",
        pf.channels.len(),
        rows.len(),
        out.display()
    );
    Ok(0)
}

fn cmd_certificate(
    config_path: &Path,
    out: &Path,
    json: bool,
    cache: Option<&Path>,
) -> Result<i32> {
    let config = ModelConfig::from_path(config_path)?;
    let m = config.build_material()?;
    let ev = evaluator_for(&m, cache)?;
    let b = ev.bounds();
    let mut report = Report::default();

    // derivative estimates on a log grid
    let t_max = 10.0 / b.alpha2;
    let est_grid: Vec<f64> = (0..20)
        .map(|i| 1e-3 * (t_max / 1e-3).powf(i as f64 / 19.0))
        .collect();
    let est = verify_estimates(&ev, &est_grid, 2, 1e-10);
    report.push(
        "derivative estimates (j <= 2)",
        est.passed(),
        est.worst_margin,
        est.first_violation()
            .map(|v| format!("t={:.3e}, j={}, {}", v.t, v.j, v.side)),
        format!("{} inequalities checked", est.checked),
    );

    // decay certificate on a linear grid reaching 10/alpha2
    let cert_grid: Vec<f64> = (0..=50).map(|i| t_max * i as f64 / 50.0).collect();
    match decay_certificate(&ev, &cert_grid) {
        Ok(cert) => {
            report.push(
                "decay certificate",
                true,
                cert.worst_margin,
                None,
                format!(
                    "kappa1={:.6e} kappa2={:.6e} kappa3={:.6e} kappa4={:.6e} kappa4~={:.6e} item(v) {}",
                    cert.kappa1,
                    cert.kappa2,
                    cert.kappa3,
                    cert.kappa4,
                    cert.kappa4_tilde,
                    if cert.pure_exponential_item_v {
                        "pure-exponential"
                    } else {
                        "beta-prefactored only"
                    }
                ),
            );
            let file = std::fs::File::create(out)?;
            serde_json::to_writer_pretty(std::io::BufWriter::new(file), &cert)
                .map_err(|e| Error::Csv(format!("certificate serialization: {e}")))?;
        }
        Err(e) => {
            report.push("decay certificate", false, f64::NAN, None, e.to_string());
        }
    }

    if json {
        println!("{}", report.to_json());
    } else {
        println!("{report}");
    }
    Ok(if report.passed() { 0 } else { 1 })
}

fn cmd_respond(
    config_path: &Path,
    strain_path: &Path,
    out: &Path,
    method: ResponseMethod,
) -> Result<i32> {
    let config = ModelConfig::from_path(config_path)?;
    let m = config.build_material()?;
    let history = crate::csvio::read_strain_history(strain_path, config.dim)?;
    let ev = RelaxationEvaluator::build(&m)?;
    match method {
        ResponseMethod::Ode => {
            let trace = integrate_internal_with(&m, &ev, &history)?;
            write_stress_trace(out, config.dim, &trace.times, &trace.stress, None)?;
        }
        ResponseMethod::Conv => {
            let trace = convolve(&ev, &history)?;
            write_stress_trace(out, config.dim, &trace.times, &trace.stress, None)?;
        }
        ResponseMethod::Both => {
            let ode = integrate_internal_with(&m, &ev, &history)?;
            let conv = convolve(&ev, &history)?;
            let disc: Vec<f64> = ode
                .stress
                .iter()
                .zip(&conv.stress)
                .map(|(a, b)| a.sub(b).norm() / b.norm().max(1e-300))
                .collect();
            write_stress_trace(out, config.dim, &ode.times, &ode.stress, Some(("discrepancy", &disc)))?;
        }
    }
    println!("wrote {} rows to {}", history.len(), out.display());
    Ok(0)
}

fn cmd_simulate(
    config_path: &Path,
    out: &Path,
    snapshots: Option<&Path>,
    snapshot_every: usize,
) -> Result<i32> {
    let config = ModelConfig::from_path(config_path)?;
    let materials = config.build_region_materials()?;
    let decay_config = DecayConfig {
        mesh_n: config.run.mesh_n,
        dirichlet_edges: config.run.dirichlet_edges.clone(),
        t_final: config.run.t_final,
        h: config.run.h,
        amplitude: config.run.amplitude,
        maxwell_removed: config.run.maxwell_removed,
        internal_frozen: false,
        record_every: config.run.record_every,
        snapshot_every: snapshots.map(|_| snapshot_every),
    };
    let result =
        run_decay_experiment_regions(&materials, |x, y| config.region_of(x, y), &decay_config)?;

    let header = ["t", "kinetic", "elastic", "stored", "total"];
    let rows: Vec<Vec<String>> = result
        .trace
        .times
        .iter()
        .enumerate()
        .map(|(i, &t)| {
            vec![
                fmt(t),
                fmt(result.trace.kinetic[i]),
                fmt(result.trace.elastic[i]),
                fmt(result.trace.stored[i]),
                fmt(result.trace.total[i]),
            ]
        })
        .collect();
    write_csv(out, &header, &rows)?;

    if let Some(snap_path) = snapshots {
        let mesh = crate::fem::MeshP1::unit_square(config.run.mesh_n, &config.run.dirichlet_edges)?;
        let header = ["t", "node", "x", "y", "ux", "uy"];
        let mut rows = Vec::new();
        for (t, u) in &result.snapshots {
            for (node, &(x, y)) in mesh.coords().iter().enumerate() {
                rows.push(vec![
                    fmt(*t),
                    node.to_string(),
                    fmt(x),
                    fmt(y),
                    fmt(u[2 * node]),
                    fmt(u[2 * node + 1]),
                ]);
            }
        }
        write_csv(snap_path, &header, &rows)?;
    }

    println!(
        "E(T)/E(0) = {:.6e}, fitted tail slope = {:.6e}, max energy increase = {:.3e}",
        result.energy_ratio, result.fitted_slope, result.max_energy_increase
    );
    Ok(0)
}

fn cmd_compare(
    config_path: &Path,
    tgrid: Option<&str>,
    count: usize,
    seed: u64,
    json: bool,
) -> Result<i32> {
    let config = ModelConfig::from_path(config_path)?;
    let grid = match tgrid {
        Some(spec) => parse_t_grid(spec)?,
        None => config.parse_t_grid()?,
    };
    let mut report = Report::default();
    let mut all_ok = true;

    let mut check = |label: String, m: &crate::block::BurgersMaterial| -> Result<()> {
        let ev = RelaxationEvaluator::build(m)?;
        let pf = build_prony_form(m, config.run.commute_tol)?;
        let mut worst = 0.0f64;
        let mut worst_t = 0.0f64;
        for &t in &grid {
            let a = ev.eval_g(t);
            let b = eval_g_prony(&pf, t);
            let scale = a.kelvin_matrix().norm().max(1e-300);
            let d = (a.kelvin_matrix() - b.kelvin_matrix()).norm() / scale;
            if d > worst {
                worst = d;
                worst_t = t;
            }
        }
        let bounds = spectral_bounds(m)?;
        let mut pole_ok = true;
        for ch in &pf.channels {
            for &(r, _) in &ch.roots {
                if r > -bounds.alpha2 + 1e-9 || r < -bounds.alpha1 - 1e-9 {
                    pole_ok = false;
                }
            }
        }
        let pass = worst <= 1e-8 && pole_ok;
        all_ok &= pass;
        report.push(
            &label,
            pass,
            worst,
            Some(format!("t={worst_t:.6e}")),
            if pole_ok {
                "poles within [-alpha1, -alpha2]".into()
            } else {
                "pole outside spectral bounds".to_string()
            },
        );
        Ok(())
    };

    let m = config.build_material()?;
    check("config material".into(), &m)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for i in 0..count {
        let dim = if i % 2 == 0 { 2 } else { 3 };
        let n = 1 + i % 3;
        let m = if i % 2 == 0 {
            sample::random_isotropic_material(&mut rng, dim, n)?
        } else {
            sample::random_commuting_material(&mut rng, dim, n)?
        };
        check(format!("random commuting material {i}"), &m)?;
    }

    if json {
        println!("{}", report.to_json());
    } else {
        println!("{report}");
    }
    Ok(if all_ok { 0 } else { 1 })
}
