//! Scenario configuration: parsing, validation and model construction.

use std::collections::BTreeMap;

use fockmod::bimodule::{ModuleVector, OneParticleVector, Sector};
use fockmod::models::{Model, ObservableGenerator, SigmaKind};
use fockmod::weyl::{GeneratorSet, GridSpec, GroupElement, StateKind, TestFunctionPair, WeylElement};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub const SCHEMA: &str = "fockmod/1";
pub const MAX_TRUNCATION: usize = 4;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        source: std::io::Error,
    },
    #[error("invalid config: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("invalid config: {0}")]
    Invalid(String),
}

fn invalid(msg: impl Into<String>) -> ConfigError {
    ConfigError::Invalid(msg.into())
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub dimension: usize,
    pub points: usize,
    pub spacing: f64,
    #[serde(default = "one")]
    pub spinor_components: usize,
}

fn one() -> usize {
    1
}

/// A real grid function. Positions are in physical units `x = i·spacing`.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum FunctionSpec {
    Zero,
    /// `amplitude` at the grid point nearest to `center`.
    PointMass {
        center: Vec<f64>,
        #[serde(default = "unit")]
        amplitude: f64,
    },
    /// `amplitude` on every grid point with `lo ≤ x ≤ hi` in each coordinate.
    Box {
        lo: Vec<f64>,
        hi: Vec<f64>,
        #[serde(default = "unit")]
        amplitude: f64,
    },
    /// `amplitude·exp(−1/(1 − (ρ/width)²))` for `ρ < width`.
    Bump {
        center: Vec<f64>,
        width: f64,
        #[serde(default = "unit")]
        amplitude: f64,
    },
    /// Explicit values in site order.
    Values(Vec<f64>),
}

fn unit() -> f64 {
    1.0
}

impl FunctionSpec {
    pub fn evaluate(&self, grid: &GridSpec) -> Result<Vec<f64>, ConfigError> {
        let h = grid.spacing();
        let d = grid.dimension();
        let check_dim = |v: &[f64], what: &str| {
            if v.len() == d {
                Ok(())
            } else {
                Err(invalid(format!("{what} has {} coordinates, grid dimension is {d}", v.len())))
            }
        };
        let position = |x: usize| -> Vec<f64> { grid.coords(x).iter().map(|&c| c as f64 * h).collect() };
        let mut out = vec![0.0; grid.len()];
        match self {
            FunctionSpec::Zero => {}
            FunctionSpec::PointMass { center, amplitude } => {
                check_dim(center, "point_mass center")?;
                let coords = center
                    .iter()
                    .map(|&c| {
                        let i = (c / h).round();
                        if i < 0.0 || i >= grid.points_per_axis() as f64 {
                            Err(invalid(format!("point_mass center {c} lies outside the grid")))
                        } else {
                            Ok(i as usize)
                        }
                    })
                    .collect::<Result<Vec<_>, _>>()?;
                let site = grid.site(&coords).ok_or_else(|| invalid("point_mass center lies outside the grid"))?;
                out[site] = *amplitude;
            }
            FunctionSpec::Box { lo, hi, amplitude } => {
                check_dim(lo, "box lo")?;
                check_dim(hi, "box hi")?;
                for (x, v) in out.iter_mut().enumerate() {
                    let p = position(x);
                    if p.iter().zip(lo.iter().zip(hi)).all(|(c, (l, u))| *l - 1e-9 <= *c && *c <= *u + 1e-9) {
                        *v = *amplitude;
                    }
                }
            }
            FunctionSpec::Bump {
                center,
                width,
                amplitude,
            } => {
                check_dim(center, "bump center")?;
                if !(*width > 0.0) {
                    return Err(invalid(format!("bump width must be > 0 (got {width})")));
                }
                for (x, v) in out.iter_mut().enumerate() {
                    let rho = position(x).iter().zip(center).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
                    let t = rho / width;
                    if t < 1.0 {
                        *v = amplitude * (-1.0 / (1.0 - t * t)).exp();
                    }
                }
            }
            FunctionSpec::Values(values) => {
                if values.len() != grid.len() {
                    return Err(invalid(format!(
                        "explicit values have length {}, grid has {} points",
                        values.len(),
                        grid.len()
                    )));
                }
                out.clone_from(values);
            }
        }
        Ok(out)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeneratorConfig {
    pub name: String,
    pub s0: FunctionSpec,
    pub s1: FunctionSpec,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SectorName {
    Plus,
    Minus,
}

impl From<SectorName> for Sector {
    fn from(s: SectorName) -> Sector {
        match s {
            SectorName::Plus => Sector::Plus,
            SectorName::Minus => Sector::Minus,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VectorConfig {
    pub name: String,
    pub shape: FunctionSpec,
    #[serde(default = "plus")]
    pub sector: SectorName,
    #[serde(default)]
    pub component: usize,
    #[serde(default)]
    pub normalize: bool,
}

fn plus() -> SectorName {
    SectorName::Plus
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModuleTerm {
    pub vector: String,
    /// Exponents `n` of the right coefficient `W(n)`; empty means `𝟏`.
    #[serde(default)]
    pub weyl: Vec<i64>,
    /// `[re, im]`, default `1`.
    #[serde(default)]
    pub coefficient: Option<[f64; 2]>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModuleVectorConfig {
    pub name: String,
    pub terms: Vec<ModuleTerm>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ObservableConfig {
    pub name: String,
    pub generator: Vec<i64>,
    pub w1: String,
    pub w2: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub schema: String,
    pub name: String,
    pub grid: GridConfig,
    pub sigma: SigmaKind,
    #[serde(default)]
    pub generators: Vec<GeneratorConfig>,
    #[serde(default)]
    pub vectors: Vec<VectorConfig>,
    #[serde(default)]
    pub module_vectors: Vec<ModuleVectorConfig>,
    #[serde(default)]
    pub observables: Vec<ObservableConfig>,
    #[serde(default = "default_truncation")]
    pub truncation: usize,
    /// Highest level of the normal-form probe vectors.
    #[serde(default = "default_probe_level")]
    pub probe_level: usize,
    #[serde(default = "default_state")]
    pub state: StateKind,
    #[serde(default)]
    pub seed: u64,
    /// Check names; empty selects every check valid for the subcommand.
    #[serde(default)]
    pub checks: Vec<String>,
    #[serde(default)]
    pub tolerances: BTreeMap<String, f64>,
    /// Random case counts per check.
    #[serde(default)]
    pub cases: BTreeMap<String, usize>,
}

fn default_truncation() -> usize {
    3
}

fn default_probe_level() -> usize {
    2
}

fn default_state() -> StateKind {
    StateKind::Quasifree
}

/// A validated scenario with its model and named inputs.
#[derive(Debug, Clone)]
pub struct Scenario {
    pub config: ScenarioConfig,
    pub model: Model,
    pub vectors: Vec<(String, OneParticleVector)>,
    pub module_vectors: Vec<(String, ModuleVector)>,
    pub observables: Vec<ObservableGenerator>,
}

impl ScenarioConfig {
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        let config: ScenarioConfig = serde_json::from_str(text)?;
        if config.schema != SCHEMA {
            return Err(invalid(format!("schema must be \"{SCHEMA}\" (got \"{}\")", config.schema)));
        }
        Ok(config)
    }

    pub fn from_path(path: &str) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Io {
            path: path.to_string(),
            source,
        })?;
        ScenarioConfig::from_json(&text)
    }

    pub fn build(self) -> Result<Scenario, ConfigError> {
        if !(1..=MAX_TRUNCATION).contains(&self.truncation) {
            return Err(invalid(format!("truncation must be in 1..={MAX_TRUNCATION} (got {})", self.truncation)));
        }
        let g = &self.grid;
        let grid = GridSpec::new(g.dimension, g.points, g.spacing, g.spinor_components)
            .map_err(|e| invalid(e.to_string()))?;
        unique(self.generators.iter().map(|x| x.name.as_str()), "generator")?;
        unique(self.vectors.iter().map(|x| x.name.as_str()), "vector")?;
        unique(self.module_vectors.iter().map(|x| x.name.as_str()), "module vector")?;
        unique(self.observables.iter().map(|x| x.name.as_str()), "observable")?;
        let pairs = self
            .generators
            .iter()
            .map(|gc| {
                let s0 = gc.s0.evaluate(&grid)?;
                let s1 = gc.s1.evaluate(&grid)?;
                TestFunctionPair::new(&grid, s0, s1).map_err(|e| invalid(format!("generator {}: {e}", gc.name)))
            })
            .collect::<Result<Vec<_>, _>>()?;
        let gens = GeneratorSet::new(grid.clone(), pairs).map_err(|e| invalid(e.to_string()))?;
        let model = Model::new(self.sigma, gens, self.truncation).map_err(|e| invalid(e.to_string()))?;
        let rank = model.rank();

        let mut vectors = Vec::new();
        for vc in &self.vectors {
            if vc.component >= grid.spinor_components() {
                return Err(invalid(format!(
                    "vector {}: component {} out of range (spinor components {})",
                    vc.name,
                    vc.component,
                    grid.spinor_components()
                )));
            }
            let values = vc.shape.evaluate(&grid)?;
            let entries = values
                .iter()
                .enumerate()
                .filter(|(_, v)| **v != 0.0)
                .map(|(x, v)| (model.basis().index(vc.sector.into(), x, vc.component), Complex64::new(*v, 0.0)));
            let mut w = OneParticleVector::from_entries(model.dim(), entries);
            if w.is_zero() {
                return Err(invalid(format!("vector {} is zero on the grid", vc.name)));
            }
            if vc.normalize {
                w = w.normalized();
            }
            vectors.push((vc.name.clone(), w));
        }
        let lookup = |name: &str| {
            vectors
                .iter()
                .find(|(n, _)| n == name)
                .map(|(_, w)| w.clone())
                .ok_or_else(|| invalid(format!("unknown vector \"{name}\"")))
        };
        let exponents = |n: &[i64], what: &str| {
            if n.is_empty() {
                Ok(GroupElement::zero(rank))
            } else if n.len() == rank {
                Ok(GroupElement::new(n.to_vec()))
            } else {
                Err(invalid(format!("{what}: {} exponents for {rank} generators", n.len())))
            }
        };

        let mut module_vectors = Vec::new();
        for mc in &self.module_vectors {
            let mut f = ModuleVector::zero();
            for t in &mc.terms {
                let w = lookup(&t.vector)?;
                let n = exponents(&t.weyl, &format!("module vector {}", mc.name))?;
                let c = t.coefficient.map_or(Complex64::new(1.0, 0.0), |[re, im]| Complex64::new(re, im));
                let part = ModuleVector::from_vector(&w, &WeylElement::term(n, c));
                f = &f + &part;
            }
            module_vectors.push((mc.name.clone(), f));
        }

        let mut observables = Vec::new();
        for oc in &self.observables {
            let w1 = lookup(&oc.w1)?;
            let w2 = lookup(&oc.w2)?;
            for (label, w) in [(&oc.w1, &w1), (&oc.w2, &w2)] {
                if w.support().any(|b| model.basis().sector(b) != Sector::Plus) {
                    return Err(invalid(format!("observable {}: vector {label} must lie in the plus sector", oc.name)));
                }
            }
            observables.push(ObservableGenerator {
                name: oc.name.clone(),
                generator: exponents(&oc.generator, &format!("observable {}", oc.name))?,
                w1: model.lift(&w1),
                w2: model.lift(&w2),
            });
        }

        Ok(Scenario {
            config: self,
            model,
            vectors,
            module_vectors,
            observables,
        })
    }
}

fn unique<'a>(names: impl Iterator<Item = &'a str>, what: &str) -> Result<(), ConfigError> {
    let mut seen = std::collections::BTreeSet::new();
    for n in names {
        if !seen.insert(n) {
            return Err(invalid(format!("duplicate {what} name \"{n}\"")));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> GridSpec {
        GridSpec::new(1, 8, 0.5, 1).unwrap()
    }

    #[test]
    fn point_mass_snaps_to_nearest_site() {
        let v = FunctionSpec::PointMass {
            center: vec![1.1],
            amplitude: 2.0,
        }
        .evaluate(&grid())
        .unwrap();
        assert_eq!(v[2], 2.0);
        assert_eq!(v.iter().filter(|x| **x != 0.0).count(), 1);
    }

    #[test]
    fn box_is_inclusive() {
        let v = FunctionSpec::Box {
            lo: vec![0.5],
            hi: vec![1.5],
            amplitude: 1.0,
        }
        .evaluate(&grid())
        .unwrap();
        assert_eq!(v, vec![0.0, 1.0, 1.0, 1.0, 0.0, 0.0, 0.0, 0.0]);
    }

    #[test]
    fn bump_vanishes_at_width() {
        let v = FunctionSpec::Bump {
            center: vec![1.0],
            width: 1.0,
            amplitude: 1.0,
        }
        .evaluate(&grid())
        .unwrap();
        assert_eq!(v[0], 0.0);
        assert_eq!(v[4], 0.0);
        assert!((v[2] - (-1.0f64).exp()).abs() < 1e-15);
    }

    #[test]
    fn wrong_lengths_are_rejected() {
        assert!(FunctionSpec::Values(vec![1.0; 3]).evaluate(&grid()).is_err());
        assert!(FunctionSpec::PointMass {
            center: vec![1.0, 2.0],
            amplitude: 1.0
        }
        .evaluate(&grid())
        .is_err());
        assert!(FunctionSpec::PointMass {
            center: vec![9.0],
            amplitude: 1.0
        }
        .evaluate(&grid())
        .is_err());
    }
}
