//! Run configuration, read from a single TOML document.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::cover_algebra::SolverMode;
use crate::error::{Error, Result};
use crate::systems::{ExtensionRecipe, Metric, Potential, Subshift, SystemDescriptor};
use crate::topo_pressure::PressureOptions;
use crate::zoo::{self, OracleKind, ZooEntry};

/// A zoo name or an inline system table.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SystemSpec {
    Zoo(String),
    Inline(InlineSystem),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum InlineSystem {
    /// Subshift of finite type from its 0/1 transition rows.
    Subshift { name: Option<String>, rows: Vec<Vec<u8>> },
    Doubling,
    Translation {
        half_width: usize,
        #[serde(default = "point_recipe")]
        extension: ExtensionRecipe,
    },
    /// Point table with a `next` column; `inf` holds distances to infinity.
    Sampled {
        name: Option<String>,
        csv: PathBuf,
        #[serde(default)]
        metric: MetricSpec,
        circumference: Option<f64>,
        extension: Option<ExtensionRecipe>,
    },
}

fn point_recipe() -> ExtensionRecipe {
    ExtensionRecipe::Point
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MetricSpec {
    #[default]
    Euclidean,
    Circle,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum PotentialSpec {
    Zero {
        #[serde(default)]
        constant: f64,
    },
    Constant {
        value: f64,
    },
    /// `weight · 1_[word]`.
    Indicator {
        word: Vec<u8>,
        #[serde(default = "one")]
        weight: f64,
        alphabet: Option<usize>,
        #[serde(default)]
        constant: f64,
        at_infinity: Option<f64>,
    },
    /// Locally constant, one value per word of length `depth`.
    Cylinder {
        depth: usize,
        values: Vec<f64>,
        alphabet: Option<usize>,
        #[serde(default)]
        constant: f64,
        at_infinity: Option<f64>,
    },
    /// Tent on the integers, vanishing at infinity.
    Bump {
        #[serde(default)]
        center: i64,
        #[serde(default = "one")]
        height: f64,
        #[serde(default = "four")]
        half_width: f64,
        #[serde(default)]
        constant: f64,
    },
    /// One value per scaffold point of the base sample.
    Table {
        values: Vec<f64>,
        #[serde(default)]
        constant: f64,
        at_infinity: Option<f64>,
    },
}

fn one() -> f64 {
    1.0
}

fn four() -> f64 {
    4.0
}

impl Default for PotentialSpec {
    fn default() -> Self {
        Self::Zero { constant: 0.0 }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModeSpec {
    #[default]
    Exact,
    Greedy,
}

impl From<ModeSpec> for SolverMode {
    fn from(m: ModeSpec) -> Self {
        match m {
            ModeSpec::Exact => SolverMode::Exact,
            ModeSpec::Greedy => SolverMode::Greedy,
        }
    }
}

/// Scale of the property sweep.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct PropertySettings {
    /// Zoo systems to sweep; empty means the whole registry.
    pub systems: Vec<String>,
    /// Largest `n` for the finite-level checks.
    pub n_max: usize,
    /// Largest `m + n` for submultiplicativity.
    pub submultiplicative_n_max: usize,
    /// Largest `n` for the entropy identity.
    pub identity_n_max: usize,
    pub chunk_q: Vec<usize>,
    pub shift_constant: f64,
}

impl Default for PropertySettings {
    fn default() -> Self {
        Self {
            systems: Vec::new(),
            n_max: 6,
            submultiplicative_n_max: 10,
            identity_n_max: 10,
            chunk_q: vec![2, 3],
            shift_constant: 0.7,
        }
    }
}

/// Every tunable of a run. Missing keys take the values of `Default`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub system: SystemSpec,
    pub potential: PotentialSpec,
    /// Empty means `diam/4 · 2^-k`, `k < 3`.
    pub epsilon_grid: Vec<f64>,
    pub n_max: usize,
    pub cover_n_max: usize,
    pub tolerance: f64,
    pub mode: ModeSpec,
    pub seed: u64,
    /// Scale of the lower-bound construction; defaults to the selected ε.
    pub pipeline_epsilon: Option<f64>,
    pub n_grid: Vec<usize>,
    pub q_grid: Vec<usize>,
    pub out: PathBuf,
    pub properties: PropertySettings,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            system: SystemSpec::Zoo("full-2-shift".into()),
            potential: PotentialSpec::default(),
            epsilon_grid: Vec::new(),
            n_max: 10,
            cover_n_max: 6,
            tolerance: 1e-3,
            mode: ModeSpec::Exact,
            seed: 0,
            pipeline_epsilon: None,
            n_grid: vec![6, 9, 12],
            q_grid: vec![2, 3],
            out: PathBuf::from("out"),
            properties: PropertySettings::default(),
        }
    }
}

/// A system together with the oracle it is judged against.
#[derive(Clone, Debug)]
pub struct ResolvedSystem {
    pub name: String,
    pub descriptor: SystemDescriptor,
    pub oracle: Option<OracleKind>,
}

impl ResolvedSystem {
    pub fn entry(&self) -> ZooEntry {
        ZooEntry { name: "configured", system: self.descriptor.clone(), oracle: self.oracle, notes: "" }
    }
}

impl From<ZooEntry> for ResolvedSystem {
    fn from(e: ZooEntry) -> Self {
        Self { name: e.name.to_string(), descriptor: e.system, oracle: e.oracle }
    }
}

impl RunConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: RunConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    /// Reads a config; relative CSV paths resolve against its directory.
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        let mut cfg = Self::from_toml(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        if let SystemSpec::Inline(InlineSystem::Sampled { csv, .. }) = &mut cfg.system {
            if csv.is_relative() {
                if let Some(dir) = path.parent() {
                    *csv = dir.join(&*csv);
                }
            }
        }
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |field: &str, why: &str| Err(Error::Config(format!("field `{field}`: {why}")));
        if self.epsilon_grid.iter().any(|&e| !(e > 0.0)) {
            return bad("epsilon_grid", "values must be positive");
        }
        if self.n_max == 0 {
            return bad("n_max", "must be at least 1");
        }
        if !(self.tolerance > 0.0) {
            return bad("tolerance", "must be positive");
        }
        if self.n_grid.iter().all(|&n| n < 3) {
            return bad("n_grid", "needs a value of at least 3");
        }
        let n_top = *self.n_grid.iter().max().expect("checked nonempty");
        if self.q_grid.is_empty() || self.q_grid.iter().any(|&q| q <= 1 || q >= n_top) {
            return bad("q_grid", &format!("chunk lengths must satisfy 1 < q < {n_top}"));
        }
        if self.properties.chunk_q.iter().any(|&q| q <= 1) {
            return bad("properties.chunk_q", "chunk lengths must satisfy 1 < q < n");
        }
        if self.properties.n_max == 0 || self.properties.identity_n_max == 0 {
            return bad("properties.n_max", "must be at least 1");
        }
        if let Some(e) = self.pipeline_epsilon {
            if !(e > 0.0) {
                return bad("pipeline_epsilon", "must be positive");
            }
        }
        Ok(())
    }

    pub fn solver_mode(&self) -> SolverMode {
        self.mode.into()
    }

    pub fn pressure_options(&self) -> PressureOptions {
        PressureOptions {
            n_max: self.n_max,
            cover_n_max: self.cover_n_max,
            mode: self.solver_mode(),
            tolerance: self.tolerance,
        }
    }

    pub fn resolve_system(&self) -> Result<ResolvedSystem> {
        resolve_system(&self.system)
    }

    pub fn epsilon_grid_for(&self, sys: &SystemDescriptor) -> Result<Vec<f64>> {
        if self.epsilon_grid.is_empty() {
            sys.default_epsilon_grid(3)
        } else {
            Ok(self.epsilon_grid.clone())
        }
    }
}

pub fn resolve_system(spec: &SystemSpec) -> Result<ResolvedSystem> {
    Ok(match spec {
        SystemSpec::Zoo(name) => zoo::lookup(name)?.into(),
        SystemSpec::Inline(InlineSystem::Subshift { name, rows }) => {
            let shift = Subshift::new(rows.clone())?;
            let name = name.clone().unwrap_or_else(|| "subshift".into());
            ResolvedSystem {
                descriptor: SystemDescriptor::symbolic(name.clone(), shift),
                name,
                oracle: Some(OracleKind::TransferMatrix),
            }
        }
        SystemSpec::Inline(InlineSystem::Doubling) => zoo::lookup("doubling-map")?.into(),
        SystemSpec::Inline(InlineSystem::Translation { half_width, extension }) => {
            let descriptor = SystemDescriptor::translation(*half_width, *extension);
            ResolvedSystem {
                name: descriptor.name.clone(),
                descriptor,
                oracle: Some(OracleKind::ValueAtInfinity),
            }
        }
        SystemSpec::Inline(InlineSystem::Sampled { name, csv, metric, circumference, extension }) => {
            let metric = match metric {
                MetricSpec::Euclidean => Metric::Euclidean,
                MetricSpec::Circle => Metric::Circle { circumference: circumference.unwrap_or(1.0) },
            };
            let name = name.clone().unwrap_or_else(|| "sampled".into());
            let descriptor = SystemDescriptor::from_csv(name.clone(), csv, metric, *extension)?;
            ResolvedSystem { name, descriptor, oracle: None }
        }
    })
}

/// Builds the potential; symbolic specs default to the system alphabet.
pub fn build_potential(spec: &PotentialSpec, sys: &SystemDescriptor) -> Result<Potential> {
    let alphabet = |given: &Option<usize>| -> Result<usize> {
        given.or(sys.alphabet()).ok_or_else(|| {
            Error::Config("field `potential.alphabet`: required for systems without an alphabet".into())
        })
    };
    let declare = |p: Potential, at: &Option<f64>| match at {
        Some(c) => p.with_infinity(*c),
        None => p,
    };
    Ok(match spec {
        PotentialSpec::Zero { constant } => Potential::constant(*constant),
        PotentialSpec::Constant { value } => Potential::constant(*value),
        PotentialSpec::Indicator { word, weight, alphabet: a, constant, at_infinity } => {
            declare(Potential::indicator(word, alphabet(a)?, *weight)?, at_infinity).plus_constant(*constant)
        }
        PotentialSpec::Cylinder { depth, values, alphabet: a, constant, at_infinity } => {
            declare(Potential::cylinder(*depth, alphabet(a)?, values.clone())?, at_infinity).plus_constant(*constant)
        }
        PotentialSpec::Bump { center, height, half_width, constant } => {
            Potential::bump(*center, *height, *half_width)?.plus_constant(*constant)
        }
        PotentialSpec::Table { values, constant, at_infinity } => {
            declare(Potential::table(values.clone()), at_infinity).plus_constant(*constant)
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_fill_missing_keys() {
        let cfg = RunConfig::from_toml("system = \"golden-mean\"\n").unwrap();
        assert_eq!(cfg.n_max, 10);
        assert_eq!(cfg.q_grid, vec![2, 3]);
        assert_eq!(cfg.resolve_system().unwrap().name, "golden-mean");
    }

    #[test]
    fn inline_tables_parse() {
        let text = r#"
epsilon_grid = [0.4, 0.2]
[system]
kind = "translation"
half_width = 16
[potential]
kind = "bump"
constant = 2.0
"#;
        let cfg = RunConfig::from_toml(text).unwrap();
        let sys = cfg.resolve_system().unwrap();
        assert!(!sys.descriptor.is_compact());
        let f = build_potential(&cfg.potential, &sys.descriptor).unwrap();
        assert_eq!(f.at_infinity, Some(2.0));
    }

    #[test]
    fn errors_name_the_field() {
        let err = RunConfig::from_toml("q_grid = [1, 2]\n").unwrap_err().to_string();
        assert!(err.contains("q_grid"), "{err}");
        let err = RunConfig::from_toml("n_max = \"ten\"\n").unwrap_err().to_string();
        assert!(err.contains("n_max") && err.contains("line 1"), "{err}");
        let err = RunConfig::from_toml("bogus = 1\n").unwrap_err().to_string();
        assert!(err.contains("bogus"), "{err}");
    }
}
