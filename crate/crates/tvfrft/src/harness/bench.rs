use std::time::Instant;

use tvfrft_core::reconstruct::is_real;
use tvfrft_core::select::Strategy;
use tvfrft_core::spectral::{TransformFactory, MATERIALIZE_BUDGET};

use super::{experiment_signal, noise_fields, random_set_seed, trial_nmse, HarnessError, Instance};
use crate::config::ExperimentConfig;
use crate::table::{mean_std, ResultRow, ResultTable};

fn elapsed_ms(start: Instant) -> f64 {
    start.elapsed().as_secs_f64() * 1e3
}

/// Selection plus reconstruction time and NMSE across vertex counts.
///
/// Building the graph, both eigendecompositions and the band factors is
/// timed once per size and reported as `setup_ms`; `runtime_ms` is the mean
/// over trials of selecting `M_J = round(fraction · NT)` samples and
/// reconstructing. Cells run one after another so timings do not contend.
pub fn run_bench(cfg: &ExperimentConfig) -> Result<ResultTable, HarnessError> {
    let spec = cfg.graph_spec()?;
    let mut table = ResultTable::default();
    for &n in &cfg.bench.vertex_counts {
        let nt = n * cfg.times;
        let m = ((cfg.bench.sample_fraction * nt as f64).round() as usize).clamp(1, nt);
        if nt > MATERIALIZE_BUDGET {
            let mut row = ResultRow::new(&cfg.id, cfg.trials);
            row.stage = Some("skipped".into());
            row.vertices = Some(n);
            row.samples = Some(m);
            table.push(row);
            continue;
        }
        let start = Instant::now();
        let shift = tvfrft_core::graph::shift_operator(&spec.with_vertices(n)?.build()?, cfg.shift.into())?;
        let factory = TransformFactory::new(cfg.times, &shift, cfg.convention.into())?;
        let inst = Instance::new(cfg, &factory, cfg.alpha, cfg.beta)?;
        let setup_ms = elapsed_ms(start);

        let x = experiment_signal(cfg, &inst.joint, &inst.band)?;
        let noise = noise_fields(cfg.seed, cfg.trials, nt, cfg.sigma, !is_real(&x))?;
        for &strategy in &cfg.strategies {
            let mut errors = Vec::with_capacity(cfg.trials);
            let mut times = Vec::with_capacity(cfg.trials);
            for (trial, field) in noise.iter().enumerate() {
                let start = Instant::now();
                let set = if strategy == Strategy::Random {
                    inst.random(m, random_set_seed(cfg.seed, trial, m))?
                } else {
                    inst.select(strategy, cfg.form, m)?
                };
                let r = inst.recovery(cfg.path, &set)?;
                let err = trial_nmse(&x, field, &r)?;
                times.push(elapsed_ms(start));
                errors.push(err);
            }
            let (mean, std) = mean_std(&errors);
            let mut row = ResultRow::new(&cfg.id, cfg.trials);
            row.stage = Some("completed".into());
            row.strategy = Some(strategy.name().to_string());
            row.form = (strategy != Strategy::Random).then(|| cfg.form.name().to_string());
            row.samples = Some(m);
            row.vertices = Some(n);
            row.alpha = Some(cfg.alpha);
            row.beta = Some(cfg.beta);
            row.nmse_mean = Some(mean);
            row.nmse_std = Some(std);
            row.runtime_ms = Some(mean_std(&times).0);
            row.setup_ms = Some(setup_ms);
            table.push(row);
        }
    }
    Ok(table)
}
