//! Experiment configuration.
//!
//! A config is TOML restricted to flat dotted keys, one per line:
//!
//! ```text
//! problem.kind = "quadratic"
//! graph.m = 10
//! algo.alpha = "auto"
//! ```
//!
//! Section headers (`[graph]`) are accepted as well since they are plain
//! TOML. [`ExperimentConfig::dump`] writes the flat form.

use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::CliError;

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentConfig {
    pub problem: ProblemConfig,
    pub data: DataConfig,
    pub reg: RegConfig,
    pub graph: GraphConfig,
    pub algo: AlgoConfig,
    pub output: OutputConfig,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProblemKind {
    Sigmoid,
    Quadratic,
}

/// Which part of the objective holds `λ₂‖x‖²`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RegSplit {
    HCarriesL2,
    GCarriesL2,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ProblemConfig {
    pub kind: ProblemKind,
    pub seed: u64,
    /// Dimension of generated quadratics.
    pub n: usize,
    /// Shared diagonal `Q` for every quadratic (centers stay random).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub diag: Option<Vec<f64>>,
    pub reg_split: RegSplit,
}

impl Default for ProblemConfig {
    fn default() -> Self {
        ProblemConfig {
            kind: ProblemKind::Quadratic,
            seed: 0,
            n: 5,
            diag: None,
            reg_split: RegSplit::HCarriesL2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DataConfig {
    /// LIBSVM file, relative to the config file. Without it the sigmoid
    /// problem uses a synthetic 123-feature one-hot dataset.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub path: Option<PathBuf>,
    /// Seeded sample count (synthetic set size when `path` is absent).
    #[serde(skip_serializing_if = "Option::is_none")]
    pub subsample: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub n_override: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RegKind {
    Zero,
    L1,
    SquaredL2,
    ElasticNet,
    Box,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RegConfig {
    pub kind: RegKind,
    pub lambda1: f64,
    pub lambda2: f64,
    pub lo: f64,
    pub hi: f64,
}

impl Default for RegConfig {
    fn default() -> Self {
        RegConfig {
            kind: RegKind::ElasticNet,
            lambda1: 5e-4,
            lambda2: 5e-4,
            lo: -1.0,
            hi: 1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GraphKind {
    /// One fixed topology for every slot.
    Static,
    /// Alternating path matchings (`B = 2`).
    AlternatingPath,
    /// Random periodic schedule with `period` slot graphs.
    Periodic,
    /// Fresh random graphs every slot, connected over every `B` slots.
    Random,
    /// Explicit list of matrices from `graph.matrices`.
    Matrices,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Topology {
    Complete,
    Path,
    Ring,
    Star,
    /// No edges at all.
    Empty,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GraphConfig {
    pub kind: GraphKind,
    pub m: usize,
    /// Declared weight floor; defaults to the schedule's own.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub eta: Option<f64>,
    /// Connectivity interval; `random` schedules need it, others derive it.
    #[serde(rename = "B", skip_serializing_if = "Option::is_none")]
    pub interval: Option<usize>,
    pub period: usize,
    pub seed: u64,
    pub edge_prob: f64,
    pub topology: Topology,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub matrices: Option<PathBuf>,
    pub cyclic: bool,
}

impl Default for GraphConfig {
    fn default() -> Self {
        GraphConfig {
            kind: GraphKind::Periodic,
            m: 10,
            eta: None,
            interval: None,
            period: 2,
            seed: 0,
            edge_prob: 0.2,
            topology: Topology::Ring,
            matrices: None,
            cyclic: true,
        }
    }
}

/// `algo.alpha`: a number or `"auto"`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum Alpha {
    #[default]
    Auto,
    Value(f64),
}

impl Serialize for Alpha {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            Alpha::Auto => s.serialize_str("auto"),
            Alpha::Value(v) => s.serialize_f64(*v),
        }
    }
}

impl<'de> Deserialize<'de> for Alpha {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            Num(f64),
            Int(i64),
            Str(String),
        }
        match Raw::deserialize(d)? {
            Raw::Num(v) => Ok(Alpha::Value(v)),
            Raw::Int(v) => Ok(Alpha::Value(v as f64)),
            Raw::Str(s) if s == "auto" => Ok(Alpha::Auto),
            Raw::Str(s) => Err(serde::de::Error::custom(format!(
                "alpha must be a number or \"auto\", got \"{s}\""
            ))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InitKind {
    Zeros,
    Gaussian,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AlgoConfig {
    pub alpha: Alpha,
    pub safety: f64,
    pub max_iter: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub tol: Option<f64>,
    pub init: InitKind,
    pub init_scale: f64,
    pub seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub radius: Option<f64>,
}

impl Default for AlgoConfig {
    fn default() -> Self {
        AlgoConfig {
            alpha: Alpha::Auto,
            safety: 0.9,
            max_iter: 100,
            tol: None,
            init: InitKind::Zeros,
            init_scale: 1.0,
            seed: 0,
            radius: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OutputConfig {
    pub trace: PathBuf,
    pub snapshot_every: usize,
}

impl Default for OutputConfig {
    fn default() -> Self {
        OutputConfig {
            trace: PathBuf::from("trace.csv"),
            snapshot_every: 1,
        }
    }
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let cfg: ExperimentConfig =
            toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        cfg.check()?;
        Ok(cfg)
    }

    /// Reads a config and resolves data and matrix paths against the
    /// config file's directory.
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        let mut cfg = Self::parse(&text)?;
        let base = path.parent().unwrap_or(Path::new(""));
        for p in [&mut cfg.data.path, &mut cfg.graph.matrices]
            .into_iter()
            .flatten()
        {
            if p.is_relative() {
                *p = base.join(&*p);
            }
            if !p.exists() {
                return Err(CliError::Config(format!(
                    "referenced file {} does not exist",
                    p.display()
                )));
            }
        }
        Ok(cfg)
    }

    fn check(&self) -> Result<(), CliError> {
        let bad = |msg: String| Err(CliError::Config(msg));
        if self.graph.m < 1 {
            return bad("graph.m must be at least 1".into());
        }
        for (name, v) in [
            ("reg.lambda1", self.reg.lambda1),
            ("reg.lambda2", self.reg.lambda2),
        ] {
            if !(v >= 0.0 && v.is_finite()) {
                return bad(format!("{name} = {v} must be finite and nonnegative"));
            }
        }
        if self.problem.kind == ProblemKind::Quadratic && self.problem.n == 0 {
            return bad("problem.n must be positive".into());
        }
        if self.graph.kind == GraphKind::Matrices && self.graph.matrices.is_none() {
            return bad("graph.kind = \"matrices\" needs graph.matrices".into());
        }
        Ok(())
    }

    /// Flat `section.key = value` lines, loadable by [`ExperimentConfig::parse`].
    pub fn dump(&self) -> String {
        let value = toml::Value::try_from(self).expect("config serializes to TOML");
        let mut out = String::new();
        if let toml::Value::Table(sections) = value {
            for (section, body) in sections {
                if let toml::Value::Table(fields) = body {
                    for (key, v) in fields {
                        out.push_str(&format!("{section}.{key} = {v}\n"));
                    }
                }
            }
        }
        out
    }
}

impl fmt::Display for ExperimentConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.dump())
    }
}
