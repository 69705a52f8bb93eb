//! JSON run configuration.
//!
//! One file describes the material (dimension, Maxwell + Kelvin–Voigt
//! tensors, viscosities, density), optional rectangular regions for
//! heterogeneous runs, and run parameters. Matrices are given in Kelvin
//! component ordering; engineering-Voigt matrices must be marked
//! explicitly with `"type": "voigt"` — there is no implicit conversion.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::block::BurgersMaterial;
use crate::error::{Error, Result};
use crate::fem::Edge;
use crate::tensor::{kelvin_len, ElasticTensor4};

/// One elasticity tensor in the config.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "lowercase")]
pub enum MaterialSpec {
    /// λ, μ isotropic tensor.
    Isotropic { lambda: f64, mu: f64 },
    /// d̃×d̃ Kelvin matrix, row-major rows.
    Kelvin { matrix: Vec<Vec<f64>> },
    /// d̃×d̃ engineering-Voigt stiffness matrix (explicit converter).
    Voigt { matrix: Vec<Vec<f64>> },
}

impl MaterialSpec {
    pub fn build(&self, dim: usize) -> Result<ElasticTensor4> {
        match self {
            MaterialSpec::Isotropic { lambda, mu } => ElasticTensor4::isotropic(dim, *lambda, *mu),
            MaterialSpec::Kelvin { matrix } => {
                ElasticTensor4::from_kelvin_matrix(dim, rows_to_matrix(dim, matrix)?)
            }
            MaterialSpec::Voigt { matrix } => {
                ElasticTensor4::from_voigt_matrix(dim, rows_to_matrix(dim, matrix)?)
            }
        }
    }
}

fn rows_to_matrix(dim: usize, rows: &[Vec<f64>]) -> Result<nalgebra::DMatrix<f64>> {
    let dt = kelvin_len(dim);
    if rows.len() != dt || rows.iter().any(|r| r.len() != dt) {
        return Err(Error::Config(format!(
            "matrix must be {dt}x{dt} for dim {dim}"
        )));
    }
    Ok(nalgebra::DMatrix::from_fn(dt, dt, |i, j| rows[i][j]))
}

/// Override material on an axis-aligned rectangle (x0, x1, y0, y1).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RegionSpec {
    pub rect: [f64; 4],
    pub materials: Vec<MaterialSpec>,
    pub viscosities: Vec<f64>,
    #[serde(default)]
    pub rho: Option<f64>,
}

/// Run parameters shared by the commands.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(default)]
pub struct RunParams {
    /// "start:stop:count[:log]".
    pub t_grid: String,
    pub mesh_n: usize,
    pub t_final: f64,
    pub h: Option<f64>,
    pub amplitude: f64,
    pub dirichlet_edges: Vec<Edge>,
    pub maxwell_removed: bool,
    pub record_every: usize,
    pub cluster_tol: f64,
    pub commute_tol: f64,
}

impl Default for RunParams {
    fn default() -> Self {
        Self {
            t_grid: "0:10:50".into(),
            mesh_n: 9,
            t_final: 40.0,
            h: None,
            amplitude: 0.01,
            dirichlet_edges: vec![Edge::Left],
            maxwell_removed: false,
            record_every: 1,
            cluster_tol: 1e-9,
            commute_tol: 1e-8,
        }
    }
}

/// The top-level configuration file.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ModelConfig {
    pub dim: usize,
    pub n: usize,
    pub rho: f64,
    /// n+1 tensors: Maxwell spring first, then the Kelvin–Voigt springs.
    pub materials: Vec<MaterialSpec>,
    /// n+1 viscosities: Maxwell dashpot first.
    pub viscosities: Vec<f64>,
    #[serde(default)]
    pub regions: Vec<RegionSpec>,
    #[serde(default)]
    pub run: RunParams,
}

impl ModelConfig {
    pub fn from_json(text: &str) -> Result<Self> {
        let config: ModelConfig = serde_json::from_str(text)
            .map_err(|e| Error::Config(format!("parse error: {e}")))?;
        config.check_shape()?;
        Ok(config)
    }

    pub fn from_path(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::from_json(&text)
    }

    fn check_shape(&self) -> Result<()> {
        if self.materials.len() != self.n + 1 {
            return Err(Error::Config(format!(
                "field 'materials': expected n+1 = {} entries, got {}",
                self.n + 1,
                self.materials.len()
            )));
        }
        if self.viscosities.len() != self.n + 1 {
            return Err(Error::Config(format!(
                "field 'viscosities': expected n+1 = {} entries, got {}",
                self.n + 1,
                self.viscosities.len()
            )));
        }
        for region in &self.regions {
            if region.materials.len() != self.n + 1 || region.viscosities.len() != self.n + 1 {
                return Err(Error::Config(
                    "field 'regions': every region needs n+1 materials and viscosities".into(),
                ));
            }
        }
        Ok(())
    }

    /// Builds the primary (homogeneous) material, validating admissibility.
    pub fn build_material(&self) -> Result<BurgersMaterial> {
        let c = self
            .materials
            .iter()
            .map(|spec| spec.build(self.dim))
            .collect::<Result<Vec<_>>>()?;
        BurgersMaterial::new(self.dim, self.rho, c, self.viscosities.clone())
    }

    /// Builds the per-region material list: index 0 is the base material,
    /// followed by one material per region entry.
    pub fn build_region_materials(&self) -> Result<Vec<BurgersMaterial>> {
        let mut out = vec![self.build_material()?];
        for region in &self.regions {
            let c = region
                .materials
                .iter()
                .map(|spec| spec.build(self.dim))
                .collect::<Result<Vec<_>>>()?;
            out.push(BurgersMaterial::new(
                self.dim,
                region.rho.unwrap_or(self.rho),
                c,
                region.viscosities.clone(),
            )?);
        }
        Ok(out)
    }

    /// Region index of a point: the last containing rectangle wins,
    /// defaulting to the base material.
    pub fn region_of(&self, x: f64, y: f64) -> usize {
        let mut idx = 0;
        for (i, region) in self.regions.iter().enumerate() {
            let [x0, x1, y0, y1] = region.rect;
            if x >= x0 && x <= x1 && y >= y0 && y <= y1 {
                idx = i + 1;
            }
        }
        idx
    }

    pub fn parse_t_grid(&self) -> Result<Vec<f64>> {
        parse_t_grid(&self.run.t_grid)
    }
}

/// Parses a "start:stop:count[:log]" grid specification.
pub fn parse_t_grid(spec: &str) -> Result<Vec<f64>> {
    let parts: Vec<&str> = spec.split(':').collect();
    if parts.len() != 3 && parts.len() != 4 {
        return Err(Error::Config(format!(
            "t-grid '{spec}' must be start:stop:count[:log]"
        )));
    }
    let start: f64 = parts[0]
        .parse()
        .map_err(|_| Error::Config(format!("t-grid start '{}' is not a number", parts[0])))?;
    let stop: f64 = parts[1]
        .parse()
        .map_err(|_| Error::Config(format!("t-grid stop '{}' is not a number", parts[1])))?;
    let count: usize = parts[2]
        .parse()
        .map_err(|_| Error::Config(format!("t-grid count '{}' is not an integer", parts[2])))?;
    if count < 2 || stop <= start {
        return Err(Error::Config(format!(
            "t-grid '{spec}' needs count >= 2 and stop > start"
        )));
    }
    let log = match parts.get(3) {
        None => false,
        Some(&"log") => true,
        Some(other) => {
            return Err(Error::Config(format!(
                "t-grid modifier '{other}' (only 'log' is recognized)"
            )))
        }
    };
    if log && start <= 0.0 {
        return Err(Error::Config("log-spaced t-grid needs start > 0".into()));
    }
    let grid = (0..count)
        .map(|i| {
            let s = i as f64 / (count - 1) as f64;
            if log {
                start * (stop / start).powf(s)
            } else {
                start + (stop - start) * s
            }
        })
        .collect();
    Ok(grid)
}

/// The reference decay-experiment configuration (8×8-cell mesh, scalar
/// surrogate material, left edge pinned, T = 40).
pub fn reference_decay_config() -> ModelConfig {
    ModelConfig {
        dim: 2,
        n: 1,
        rho: 1.0,
        materials: vec![
            MaterialSpec::Isotropic {
                lambda: 0.0,
                mu: 0.5,
            },
            MaterialSpec::Isotropic {
                lambda: 0.0,
                mu: 0.5,
            },
        ],
        viscosities: vec![1.0, 1.0],
        regions: Vec::new(),
        run: RunParams::default(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_round_trip() {
        let text = r#"{
            "dim": 2, "n": 1, "rho": 1.0,
            "materials": [
                {"type": "isotropic", "lambda": 0.0, "mu": 0.5},
                {"type": "kelvin", "matrix": [[1,0,0],[0,1,0],[0,0,1]]}
            ],
            "viscosities": [1.0, 1.0],
            "run": {"t_grid": "0:5:11"}
        }"#;
        let config = ModelConfig::from_json(text).unwrap();
        let m = config.build_material().unwrap();
        assert_eq!(m.n(), 1);
        let grid = config.parse_t_grid().unwrap();
        assert_eq!(grid.len(), 11);
        assert_eq!(grid[0], 0.0);
        assert_eq!(*grid.last().unwrap(), 5.0);
    }

    #[test]
    fn shape_errors() {
        let text = r#"{
            "dim": 2, "n": 2, "rho": 1.0,
            "materials": [{"type": "isotropic", "lambda": 0.0, "mu": 0.5}],
            "viscosities": [1.0]
        }"#;
        assert!(matches!(
            ModelConfig::from_json(text),
            Err(Error::Config(msg)) if msg.contains("materials")
        ));
    }

    #[test]
    fn inadmissible_material_rejected_on_build() {
        let text = r#"{
            "dim": 2, "n": 1, "rho": 1.0,
            "materials": [
                {"type": "isotropic", "lambda": 0.0, "mu": 0.5},
                {"type": "isotropic", "lambda": 0.0, "mu": 0.5}
            ],
            "viscosities": [1.0, -1.0]
        }"#;
        let config = ModelConfig::from_json(text).unwrap();
        assert!(config.build_material().is_err());
    }

    #[test]
    fn t_grid_forms() {
        assert_eq!(parse_t_grid("0:1:3").unwrap(), vec![0.0, 0.5, 1.0]);
        let log = parse_t_grid("0.1:10:3:log").unwrap();
        assert!((log[1] - 1.0).abs() < 1e-12);
        assert!(parse_t_grid("0:1:1").is_err());
        assert!(parse_t_grid("0:10:5:log").is_err());
        assert!(parse_t_grid("1:0:5").is_err());
        assert!(parse_t_grid("nonsense").is_err());
    }

    #[test]
    fn regions_and_lookup() {
        let text = r#"{
            "dim": 2, "n": 1, "rho": 1.0,
            "materials": [
                {"type": "isotropic", "lambda": 0.0, "mu": 0.5},
                {"type": "isotropic", "lambda": 0.0, "mu": 0.5}
            ],
            "viscosities": [1.0, 1.0],
            "regions": [{
                "rect": [0.5, 1.0, 0.0, 1.0],
                "materials": [
                    {"type": "isotropic", "lambda": 1.0, "mu": 1.0},
                    {"type": "isotropic", "lambda": 1.0, "mu": 1.0}
                ],
                "viscosities": [2.0, 2.0]
            }]
        }"#;
        let config = ModelConfig::from_json(text).unwrap();
        let mats = config.build_region_materials().unwrap();
        assert_eq!(mats.len(), 2);
        assert_eq!(config.region_of(0.25, 0.5), 0);
        assert_eq!(config.region_of(0.75, 0.5), 1);
    }
}
