use tvfrft_core::reconstruct::is_real;
use tvfrft_core::select::Strategy;

use super::{experiment_signal, factory_for, noise_fields, random_set_seed, trial_nmse, HarnessError, Instance};
use crate::config::ExperimentConfig;
use crate::table::{mean_std, ResultRow, ResultTable};

/// Mean NMSE against sample count for every configured strategy.
///
/// Greedy sets are selected once at the largest count and their prefixes
/// reused, since greedy selection is incremental. The random baseline draws
/// a fresh set per trial and count. A count of zero yields the zero
/// estimate, so its NMSE is one.
pub fn run_sweep(cfg: &ExperimentConfig) -> Result<ResultTable, HarnessError> {
    let factory = factory_for(cfg)?;
    let inst = Instance::new(cfg, &factory, cfg.alpha, cfg.beta)?;
    let nt = inst.size();
    if let Some(&m) = cfg.sample_counts.iter().find(|&&m| m > nt) {
        return Err(HarnessError::Invalid(format!("sample count {m} exceeds NT = {nt}")));
    }
    let x = experiment_signal(cfg, &inst.joint, &inst.band)?;
    let noise = noise_fields(cfg.seed, cfg.trials, nt, cfg.sigma, !is_real(&x))?;
    let m_max = cfg.sample_counts.last().copied().unwrap_or(0);
    let mut table = ResultTable::default();
    for &strategy in &cfg.strategies {
        let greedy = if strategy != Strategy::Random && m_max > 0 { Some(inst.select(strategy, cfg.form, m_max)?) } else { None };
        for &m in &cfg.sample_counts {
            let mut errors = Vec::with_capacity(cfg.trials);
            if m == 0 {
                errors.resize(cfg.trials, 1.0);
            } else if let Some(order) = &greedy {
                let r = inst.recovery(cfg.path, &order[..m])?;
                for field in &noise {
                    errors.push(trial_nmse(&x, field, &r)?);
                }
            } else {
                for (trial, field) in noise.iter().enumerate() {
                    let set = inst.random(m, random_set_seed(cfg.seed, trial, m))?;
                    errors.push(trial_nmse(&x, field, &inst.recovery(cfg.path, &set)?)?);
                }
            }
            let (mean, std) = mean_std(&errors);
            let mut row = ResultRow::new(&cfg.id, cfg.trials);
            row.strategy = Some(strategy.name().to_string());
            row.form = (strategy != Strategy::Random).then(|| cfg.form.name().to_string());
            row.samples = Some(m);
            row.alpha = Some(cfg.alpha);
            row.beta = Some(cfg.beta);
            row.nmse_mean = Some(mean);
            row.nmse_std = Some(std);
            table.push(row);
        }
    }
    Ok(table)
}
