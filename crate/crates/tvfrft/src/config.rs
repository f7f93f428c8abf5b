//! JSON experiment configuration.
//!
//! Every command reads the same schema. Command-line flags and an optional
//! config file are both turned into JSON objects; fields present in the file
//! take precedence over flags, and absent fields fall back to the defaults
//! below. The schema is documented in `configs/README.md`.

use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use tvfrft_core::bandlimit::SpectralSupports;
use tvfrft_core::graph::{build_cycle_time_graph, build_gaussian_kernel_graph, cartesian_product, shift_operator, Graph, PointCloud, ShiftKind};
use tvfrft_core::linalg::CMat;
use tvfrft_core::localized::{exponential_kernel, ideal_kernel};
use tvfrft_core::reconstruct::RecoveryPath;
use tvfrft_core::select::{ObjectiveForm, Strategy};
use tvfrft_core::spectral::SignConvention;

use crate::io;

#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("{path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("invalid config: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("invalid config: {0}")]
    Invalid(String),
    #[error(transparent)]
    Io(#[from] io::IoError),
    #[error(transparent)]
    Core(#[from] tvfrft_core::Error),
}

fn invalid(msg: impl Into<String>) -> ConfigError {
    ConfigError::Invalid(msg.into())
}

/// Vertex graph source.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case", deny_unknown_fields)]
pub enum GraphSpec {
    /// Edge-list CSV with header `src,dst,weight`.
    Edges {
        path: PathBuf,
        #[serde(default)]
        vertices: Option<usize>,
        #[serde(default)]
        directed: bool,
    },
    /// Gaussian-kernel graph over a point-cloud CSV with header `x1,...,xd`.
    Points { path: PathBuf, kernel_width: f64, threshold: f64 },
    /// Gaussian-kernel graph over seeded uniform points in the unit cube.
    RandomGeometric { vertices: usize, dimension: usize, kernel_width: f64, threshold: f64, seed: u64 },
    Cycle {
        vertices: usize,
        #[serde(default)]
        directed: bool,
    },
    /// Cartesian product of a time cycle with another graph, vertex `(t, v)`
    /// at `t·N + v`.
    Product { times: usize, vertex: Box<GraphSpec> },
}

/// Uniform points in `[0, 1)^dimension` drawn from a seeded generator.
pub fn random_points(vertices: usize, dimension: usize, seed: u64) -> Vec<Vec<f64>> {
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    (0..vertices).map(|_| (0..dimension).map(|_| rng.random::<f64>()).collect()).collect()
}

impl GraphSpec {
    pub fn build(&self) -> Result<Graph, ConfigError> {
        Ok(match self {
            GraphSpec::Edges { path, vertices, directed } => io::read_edges(path, *vertices, *directed)?,
            GraphSpec::Points { path, kernel_width, threshold } => build_gaussian_kernel_graph(&io::read_points(path, *kernel_width, *threshold)?)?,
            GraphSpec::RandomGeometric { vertices, dimension, kernel_width, threshold, seed } => {
                let points = random_points(*vertices, *dimension, *seed);
                build_gaussian_kernel_graph(&PointCloud { points, kernel_width: *kernel_width, sparsify_threshold: *threshold })?
            }
            GraphSpec::Cycle { vertices, directed } => build_cycle_time_graph(*vertices, *directed)?,
            GraphSpec::Product { times, vertex } => cartesian_product(&build_cycle_time_graph(*times, false)?, &vertex.build()?)?,
        })
    }

    /// The same spec with the vertex count replaced, for size sweeps.
    pub fn with_vertices(&self, n: usize) -> Result<GraphSpec, ConfigError> {
        match self {
            GraphSpec::RandomGeometric { dimension, kernel_width, threshold, seed, .. } => Ok(GraphSpec::RandomGeometric {
                vertices: n,
                dimension: *dimension,
                kernel_width: *kernel_width,
                threshold: *threshold,
                seed: *seed,
            }),
            GraphSpec::Cycle { directed, .. } => Ok(GraphSpec::Cycle { vertices: n, directed: *directed }),
            _ => Err(invalid("size sweeps need a random_geometric or cycle graph")),
        }
    }

    fn check_paths(&self) -> Result<(), ConfigError> {
        match self {
            GraphSpec::Edges { path, .. } | GraphSpec::Points { path, .. } => check_exists(path),
            GraphSpec::Product { vertex, .. } => vertex.check_paths(),
            _ => Ok(()),
        }
    }
}

fn check_exists(path: &Path) -> Result<(), ConfigError> {
    if path.exists() {
        Ok(())
    } else {
        Err(invalid(format!("{} does not exist", path.display())))
    }
}

/// Spectral band: lowest `k_t × k_g` product band, explicit factor lists, or
/// an explicit joint list.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum BandSpec {
    Lowest { k_t: usize, k_g: usize },
    Product { f_t: Vec<usize>, f_g: Vec<usize> },
    Joint { f_j: Vec<usize> },
}

impl BandSpec {
    pub fn build(&self, n: usize, t: usize) -> Result<SpectralSupports, ConfigError> {
        Ok(match self {
            BandSpec::Lowest { k_t, k_g } => {
                if *k_t > t || *k_g > n {
                    return Err(invalid(format!("band {k_t}×{k_g} exceeds the {t}×{n} spectrum")));
                }
                SpectralSupports::lowest(n, t, *k_t, *k_g)?
            }
            BandSpec::Product { f_t, f_g } => SpectralSupports::product(n, t, f_t, f_g)?,
            BandSpec::Joint { f_j } => SpectralSupports::joint(n, t, f_j)?,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum KernelSpec {
    /// Indicator of the band.
    Ideal,
    /// `exp(-ℓ/K_J)` over the joint index.
    Exponential,
}

impl KernelSpec {
    pub fn values(self, band: &SpectralSupports) -> Vec<f64> {
        match self {
            KernelSpec::Ideal => ideal_kernel(band),
            KernelSpec::Exponential => exponential_kernel(band.size(), band.k_j),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BenchConfig {
    pub vertex_counts: Vec<usize>,
    /// `M_J = round(fraction · NT)`.
    pub sample_fraction: f64,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig { vertex_counts: vec![40, 80, 120, 160], sample_fraction: 0.1 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GridConfig {
    #[serde(with = "strategy_name")]
    pub strategy: Strategy,
    /// Samples per cell; defaults to `K_J`.
    pub samples: Option<usize>,
    /// Orders at which the synthetic signal is bandlimited.
    pub signal_alpha: f64,
    pub signal_beta: f64,
    pub lower: f64,
    pub upper: f64,
    pub coarse_step: f64,
    pub fine_step: f64,
    /// Half-width of the fine window around the coarse minimum.
    pub window: f64,
    pub workers: Option<usize>,
}

impl Default for GridConfig {
    fn default() -> Self {
        GridConfig {
            strategy: Strategy::MinPinv,
            samples: None,
            signal_alpha: 1.0,
            signal_beta: 1.0,
            lower: -4.0,
            upper: 4.0,
            coarse_step: 0.5,
            fine_step: 0.1,
            window: 0.5,
            workers: None,
        }
    }
}

mod strategy_list {
    use serde::{Deserialize, Deserializer, Serializer};
    use tvfrft_core::select::Strategy;

    pub fn serialize<S: Serializer>(v: &[Strategy], ser: S) -> Result<S::Ok, S::Error> {
        ser.collect_seq(v.iter().map(|s| s.name()))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(de: D) -> Result<Vec<Strategy>, D::Error> {
        Vec::<String>::deserialize(de)?
            .into_iter()
            .map(|s| Strategy::parse(&s).ok_or_else(|| serde::de::Error::custom(format!("unknown strategy `{s}`"))))
            .collect()
    }
}

macro_rules! named_enum {
    ($module:ident, $ty:ty) => {
        mod $module {
            use serde::{Deserialize, Deserializer, Serializer};

            pub fn serialize<S: Serializer>(v: &$ty, ser: S) -> Result<S::Ok, S::Error> {
                ser.serialize_str(v.name())
            }

            pub fn deserialize<'de, D: Deserializer<'de>>(de: D) -> Result<$ty, D::Error> {
                let s = String::deserialize(de)?;
                <$ty>::parse(&s).ok_or_else(|| serde::de::Error::custom(format!("unknown value `{s}`")))
            }
        }
    };
}

named_enum!(strategy_name, tvfrft_core::select::Strategy);
named_enum!(form_name, tvfrft_core::select::ObjectiveForm);
named_enum!(path_name, tvfrft_core::reconstruct::RecoveryPath);

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ShiftName {
    Adjacency,
    Laplacian,
    NormalizedLaplacian,
    NormalizedAdjacency,
}

impl From<ShiftName> for ShiftKind {
    fn from(s: ShiftName) -> Self {
        match s {
            ShiftName::Adjacency => ShiftKind::Adjacency,
            ShiftName::Laplacian => ShiftKind::Laplacian,
            ShiftName::NormalizedLaplacian => ShiftKind::NormalizedLaplacian,
            ShiftName::NormalizedAdjacency => ShiftKind::NormalizedAdjacency,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConventionName {
    /// `exp(-jπkα/2)` eigenvalue phases, reducing to the usual DFT at order 1.
    StandardMinus,
    /// `exp(+jπkα/2)` eigenvalue phases.
    InverseDftPlus,
}

impl From<ConventionName> for SignConvention {
    fn from(c: ConventionName) -> Self {
        match c {
            ConventionName::StandardMinus => SignConvention::StandardMinus,
            ConventionName::InverseDftPlus => SignConvention::InverseDftPlus,
        }
    }
}

/// A complete experiment or command configuration.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    /// Identifier written to every result row.
    pub id: String,
    pub graph: Option<GraphSpec>,
    pub shift: ShiftName,
    /// Number of time instants `T`.
    pub times: usize,
    pub alpha: f64,
    pub beta: f64,
    pub convention: ConventionName,
    pub band: BandSpec,
    #[serde(with = "strategy_list")]
    pub strategies: Vec<Strategy>,
    #[serde(with = "form_name")]
    pub form: ObjectiveForm,
    #[serde(with = "path_name")]
    pub path: RecoveryPath,
    pub kernel: KernelSpec,
    pub sample_counts: Vec<usize>,
    pub sigma: f64,
    pub trials: usize,
    /// Seed for noise and random baselines.
    pub seed: u64,
    /// Seed for the synthetic signal; defaults to `seed`.
    pub signal_seed: Option<u64>,
    /// `‖vec(x)‖₂` of the synthetic signal; defaults to `√(NT)`.
    pub amplitude: Option<f64>,
    /// Signal CSV used instead of a synthetic one.
    pub signal: Option<PathBuf>,
    pub output: Option<PathBuf>,
    pub bench: BenchConfig,
    pub grid: GridConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            id: "experiment".into(),
            graph: None,
            shift: ShiftName::Laplacian,
            times: 4,
            alpha: 1.0,
            beta: 1.0,
            convention: ConventionName::StandardMinus,
            band: BandSpec::Lowest { k_t: 2, k_g: 10 },
            strategies: Strategy::GREEDY.iter().copied().chain([Strategy::Random]).collect(),
            form: ObjectiveForm::Direct,
            path: RecoveryPath::Direct,
            kernel: KernelSpec::Ideal,
            sample_counts: vec![20, 60, 100, 140, 180],
            sigma: 0.01,
            trials: 10,
            seed: 0,
            signal_seed: None,
            amplitude: None,
            signal: None,
            output: None,
            bench: BenchConfig::default(),
            grid: GridConfig::default(),
        }
    }
}

/// Overlay `over` onto `base`, recursing into nested objects.
pub fn merge(base: &mut Value, over: Value) {
    match (base, over) {
        (Value::Object(b), Value::Object(o)) => {
            for (k, v) in o {
                match b.get_mut(&k) {
                    Some(slot) if slot.is_object() && v.is_object() => merge(slot, v),
                    _ => {
                        b.insert(k, v);
                    }
                }
            }
        }
        (b, o) => *b = o,
    }
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        let cfg: ExperimentConfig = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read { path: path.to_path_buf(), source })?;
        Self::from_json(&text)
    }

    /// Build a config from flag values, overridden by the file at `file`.
    pub fn resolve(flags: Map<String, Value>, file: Option<&Path>) -> Result<Self, ConfigError> {
        let mut value = Value::Object(flags);
        if let Some(path) = file {
            let text = std::fs::read_to_string(path).map_err(|source| ConfigError::Read { path: path.to_path_buf(), source })?;
            merge(&mut value, serde_json::from_str(&text)?);
        }
        let cfg: ExperimentConfig = serde_json::from_value(value)?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.trials == 0 {
            return Err(invalid("trials must be at least 1"));
        }
        if self.sample_counts.windows(2).any(|w| w[0] >= w[1]) {
            return Err(invalid("sample_counts must be strictly ascending"));
        }
        if !(self.sigma >= 0.0) || !self.sigma.is_finite() {
            return Err(invalid(format!("sigma must be a nonnegative number, got {}", self.sigma)));
        }
        if self.times < 2 {
            return Err(invalid("times must be at least 2"));
        }
        if let Some(g) = &self.graph {
            g.check_paths()?;
        }
        if let Some(p) = &self.signal {
            check_exists(p)?;
        }
        let g = &self.grid;
        if !(g.coarse_step > 0.0 && g.fine_step > 0.0 && g.lower < g.upper && g.window >= 0.0) {
            return Err(invalid("grid needs positive steps, lower < upper and a nonnegative window"));
        }
        if !(self.bench.sample_fraction > 0.0 && self.bench.sample_fraction <= 1.0) {
            return Err(invalid("bench.sample_fraction must lie in (0, 1]"));
        }
        Ok(())
    }

    pub fn graph_spec(&self) -> Result<&GraphSpec, ConfigError> {
        self.graph.as_ref().ok_or_else(|| invalid("no graph given"))
    }

    /// Shift operator of the configured vertex graph.
    pub fn vertex_shift(&self) -> Result<CMat, ConfigError> {
        let g = self.graph_spec()?.build()?;
        Ok(shift_operator(&g, self.shift.into())?)
    }

    pub fn signal_seed(&self) -> u64 {
        self.signal_seed.unwrap_or(self.seed)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use serde_json::json;

    #[test]
    fn band_forms_parse() {
        let b: BandSpec = serde_json::from_value(json!({"k_t": 2, "k_g": 3})).unwrap();
        assert_eq!(b, BandSpec::Lowest { k_t: 2, k_g: 3 });
        let b: BandSpec = serde_json::from_value(json!({"f_t": [0], "f_g": [1, 2]})).unwrap();
        assert_eq!(b.build(4, 3).unwrap().joint_band, vec![1, 2]);
        let b: BandSpec = serde_json::from_value(json!({"f_j": [0, 5]})).unwrap();
        assert_eq!(b.build(4, 3).unwrap().k_j, 2);
    }

    #[test]
    fn file_fields_override_flags() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("c.json");
        std::fs::write(&path, r#"{"seed": 9, "grid": {"fine_step": 0.2}}"#).unwrap();
        let flags = json!({"seed": 3, "trials": 2, "grid": {"coarse_step": 1.0}}).as_object().unwrap().clone();
        let cfg = ExperimentConfig::resolve(flags, Some(&path)).unwrap();
        assert_eq!((cfg.seed, cfg.trials, cfg.grid.coarse_step, cfg.grid.fine_step), (9, 2, 1.0, 0.2));
    }

    #[test]
    fn invalid_configs_are_rejected() {
        assert!(ExperimentConfig::from_json(r#"{"trials": 0}"#).is_err());
        assert!(ExperimentConfig::from_json(r#"{"sample_counts": [5, 3]}"#).is_err());
        assert!(ExperimentConfig::from_json(r#"{"strategies": ["best"]}"#).is_err());
        assert!(ExperimentConfig::from_json(r#"{"graph": {"type": "edges", "path": "/no/such/file.csv"}}"#).is_err());
        assert!(ExperimentConfig::from_json(r#"{"unknown": 1}"#).is_err());
    }

    #[test]
    fn random_points_are_seeded() {
        assert_eq!(random_points(5, 2, 1), random_points(5, 2, 1));
        assert_ne!(random_points(5, 2, 1), random_points(5, 2, 2));
    }
}
