//! Experiment protocols: sample-count sweeps, runtime benchmarks and
//! fractional-order grid searches over synthetic or loaded signals.
//!
//! Randomness is derived from the configured seeds only. The signal is drawn
//! once per experiment; each trial draws a full `NT` noise field from its own
//! sub-seed, and every sampling set reads the same field at its indices, so
//! strategies are compared on identical noise.

mod bench;
mod grid;
mod sweep;

use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use tvfrft_core::bandlimit::{synthesize_bandlimited, SpectralSupports};
use tvfrft_core::linalg::C64;
use tvfrft_core::localized::localized_operator;
use tvfrft_core::reconstruct::{draw_noise, localized_recovery_operator, nmse, recovery_operator, reconstruct_direct, RecoveryOperator, RecoveryPath};
use tvfrft_core::select::{greedy_select, random_select, ObjectiveForm, SamplingProblem, SelectOptions, Strategy};
use tvfrft_core::spectral::{JointTransform, TimeVertexSignal, TransformFactory, MATERIALIZE_BUDGET};

use crate::config::{ConfigError, ExperimentConfig, KernelSpec};

pub use bench::run_bench;
pub use grid::{canonical_order, run_grid, GridCell, GridOutcome};
pub use sweep::run_sweep;

#[derive(Debug, thiserror::Error)]
pub enum HarnessError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Core(#[from] tvfrft_core::Error),
    #[error(transparent)]
    Io(#[from] crate::io::IoError),
    #[error("{strategy} selection of {m} samples failed: {source}")]
    Selection { strategy: &'static str, m: usize, source: tvfrft_core::Error },
    #[error("{0}")]
    Invalid(String),
}

const SIGNAL_STREAM: u64 = 1;
const NOISE_STREAM: u64 = 2;
const RANDOM_STREAM: u64 = 3;

/// Mix a seed with a path of integers (splitmix64 finalizer per step).
pub fn derive_seed(seed: u64, parts: &[u64]) -> u64 {
    let mut z = seed;
    for &p in parts {
        z = z.wrapping_add(p.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15));
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^= z >> 31;
    }
    z
}

/// Noise fields for every trial, complex when the signal is complex.
pub fn noise_fields(seed: u64, trials: usize, len: usize, sigma: f64, complex: bool) -> Result<Vec<Vec<C64>>, HarnessError> {
    (0..trials)
        .map(|trial| {
            let mut rng = ChaCha20Rng::seed_from_u64(derive_seed(seed, &[NOISE_STREAM, trial as u64]));
            Ok(draw_noise(&mut rng, len, sigma, complex)?)
        })
        .collect()
}

/// Seed of the random baseline set for one trial and sample count.
pub fn random_set_seed(seed: u64, trial: usize, m: usize) -> u64 {
    derive_seed(seed, &[RANDOM_STREAM, trial as u64, m as u64])
}

/// Transform, band and sampling problem of a configuration at orders `(α, β)`.
pub(crate) struct Instance {
    pub joint: JointTransform,
    pub band: SpectralSupports,
    pub problem: SamplingProblem,
}

impl Instance {
    pub fn new(cfg: &ExperimentConfig, factory: &TransformFactory, alpha: f64, beta: f64) -> Result<Self, HarnessError> {
        let n = factory.vertex.size();
        let t = factory.time.size();
        let joint = factory.joint(alpha, beta)?;
        let band = cfg.band.build(n, t)?;
        let mut problem = SamplingProblem::new(&joint, &band)?;
        if cfg.kernel != KernelSpec::Ideal {
            problem = problem.with_localized(localized_operator(&joint, &cfg.kernel.values(&band), &band, MATERIALIZE_BUDGET)?);
        }
        Ok(Instance { joint, band, problem })
    }

    pub fn size(&self) -> usize {
        self.joint.size()
    }

    pub fn recovery(&self, path: RecoveryPath, set: &[usize]) -> Result<RecoveryOperator, HarnessError> {
        Ok(match path {
            RecoveryPath::Direct => recovery_operator(&self.problem, set)?,
            RecoveryPath::Localized => {
                let op = self.problem.localized_operator()?;
                localized_recovery_operator(&op, set, self.joint.n_vertices, self.joint.n_times)?
            }
        })
    }

    pub fn select(&self, strategy: Strategy, form: ObjectiveForm, m: usize) -> Result<Vec<usize>, HarnessError> {
        greedy_select(strategy, form, &self.problem, m, &SelectOptions::default())
            .map(|p| p.indices)
            .map_err(|source| HarnessError::Selection { strategy: strategy.name(), m, source })
    }

    pub fn random(&self, m: usize, seed: u64) -> Result<Vec<usize>, HarnessError> {
        random_select(self.size(), m, seed).map_err(|source| HarnessError::Selection { strategy: "random", m, source })
    }
}

/// The configured signal file, or a seeded synthetic signal bandlimited
/// under `joint` with `‖vec(x)‖₂ = amplitude` (default `√(NT)`).
pub fn experiment_signal(cfg: &ExperimentConfig, joint: &JointTransform, band: &SpectralSupports) -> Result<TimeVertexSignal, HarnessError> {
    if let Some(path) = &cfg.signal {
        let x = crate::io::read_signal(path)?;
        if x.n_vertices() != joint.n_vertices || x.n_times() != joint.n_times {
            return Err(HarnessError::Invalid(format!(
                "signal is {}×{}, graph and time axis give {}×{}",
                x.n_vertices(),
                x.n_times(),
                joint.n_vertices,
                joint.n_times
            )));
        }
        return Ok(x);
    }
    let amplitude = cfg.amplitude.unwrap_or((joint.size() as f64).sqrt());
    Ok(synthesize_bandlimited(derive_seed(cfg.signal_seed(), &[SIGNAL_STREAM]), joint, band, amplitude)?)
}

/// NMSE of the reconstruction from noisy samples `x_S + e_S`.
pub(crate) fn trial_nmse(x: &TimeVertexSignal, noise: &[C64], r: &RecoveryOperator) -> Result<f64, HarnessError> {
    let samples: Vec<C64> = r.sample_set.iter().map(|&i| x.vec()[i] + noise[i]).collect();
    let y = reconstruct_direct(&samples, r)?;
    Ok(nmse(x, &y)?)
}

pub(crate) fn factory_for(cfg: &ExperimentConfig) -> Result<TransformFactory, HarnessError> {
    let shift = cfg.vertex_shift()?;
    Ok(TransformFactory::new(cfg.times, &shift, cfg.convention.into())?)
}
