//! Result tables written as CSV or JSON.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum TableFormat {
    Csv,
    Json,
}

/// One configuration cell. Fields that do not apply to an experiment are
/// left empty.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResultRow {
    pub experiment: String,
    /// Grid stage (`coarse` or `fine`) or bench status.
    pub stage: Option<String>,
    pub strategy: Option<String>,
    pub form: Option<String>,
    pub samples: Option<usize>,
    pub vertices: Option<usize>,
    pub alpha: Option<f64>,
    pub beta: Option<f64>,
    pub trials: usize,
    pub nmse_mean: Option<f64>,
    pub nmse_std: Option<f64>,
    pub runtime_ms: Option<f64>,
    /// Transform construction time, reported apart from `runtime_ms`.
    pub setup_ms: Option<f64>,
}

impl ResultRow {
    pub fn new(experiment: &str, trials: usize) -> Self {
        ResultRow {
            experiment: experiment.to_string(),
            stage: None,
            strategy: None,
            form: None,
            samples: None,
            vertices: None,
            alpha: None,
            beta: None,
            trials,
            nmse_mean: None,
            nmse_std: None,
            runtime_ms: None,
            setup_ms: None,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct ResultTable {
    pub rows: Vec<ResultRow>,
}

const COLUMNS: [&str; 13] =
    ["experiment", "stage", "strategy", "form", "samples", "vertices", "alpha", "beta", "trials", "nmse_mean", "nmse_std", "runtime_ms", "setup_ms"];

fn opt<T: ToString>(v: &Option<T>) -> String {
    v.as_ref().map(T::to_string).unwrap_or_default()
}

/// Mean and sample standard deviation (zero for a single value).
pub fn mean_std(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return (mean, 0.0);
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

impl ResultTable {
    pub fn push(&mut self, row: ResultRow) {
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut out = COLUMNS.join(",");
        out.push('\n');
        for r in &self.rows {
            let fields = [
                r.experiment.clone(),
                opt(&r.stage),
                opt(&r.strategy),
                opt(&r.form),
                opt(&r.samples),
                opt(&r.vertices),
                opt(&r.alpha),
                opt(&r.beta),
                r.trials.to_string(),
                opt(&r.nmse_mean),
                opt(&r.nmse_std),
                opt(&r.runtime_ms),
                opt(&r.setup_ms),
            ];
            let _ = writeln!(out, "{}", fields.join(","));
        }
        out
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.rows).expect("rows serialize")
    }

    pub fn render(&self, format: TableFormat) -> String {
        match format {
            TableFormat::Csv => self.to_csv(),
            TableFormat::Json => self.to_json(),
        }
    }

    pub fn write(&self, path: &Path, format: TableFormat) -> std::io::Result<()> {
        std::fs::write(path, self.render(format))
    }

    /// Rows of one strategy, in table order.
    pub fn strategy_rows<'a>(&'a self, strategy: &'a str) -> impl Iterator<Item = &'a ResultRow> + 'a {
        self.rows.iter().filter(move |r| r.strategy.as_deref() == Some(strategy))
    }
}
