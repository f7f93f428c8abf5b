//! JSON files exchanged between the `select` and `reconstruct` commands.

use serde::{Deserialize, Serialize};
use tvfrft_core::reconstruct::ReconstructionReport;
use tvfrft_core::select::SamplingPlan;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlanFile {
    pub indices: Vec<usize>,
    pub objective_trace: Vec<f64>,
    pub strategy: String,
    pub form: String,
    pub seed: Option<u64>,
    pub alpha: f64,
    pub beta: f64,
    /// Joint band indices.
    pub band: Vec<usize>,
    #[serde(default)]
    pub notes: Vec<String>,
}

impl From<&SamplingPlan> for PlanFile {
    fn from(p: &SamplingPlan) -> Self {
        PlanFile {
            indices: p.indices.clone(),
            objective_trace: p.objective_trace.clone(),
            strategy: p.strategy.name().to_string(),
            form: p.form.name().to_string(),
            seed: p.seed,
            alpha: p.alpha,
            beta: p.beta,
            band: p.band.clone(),
            notes: p.notes.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportFile {
    pub nmse: f64,
    pub residual_norm: f64,
    pub covariance_trace: f64,
    pub path: String,
    pub cutoff: f64,
    pub warnings: Vec<String>,
}

impl From<&ReconstructionReport> for ReportFile {
    fn from(r: &ReconstructionReport) -> Self {
        ReportFile {
            nmse: r.nmse,
            residual_norm: r.residual_norm,
            covariance_trace: r.covariance_trace,
            path: r.path.name().to_string(),
            cutoff: r.cutoff,
            warnings: r.warnings.clone(),
        }
    }
}
