use std::collections::BTreeMap;

use rayon::prelude::*;
use tvfrft_core::reconstruct::is_real;
use tvfrft_core::spectral::TimeVertexSignal;
use tvfrft_core::linalg::C64;

use super::{experiment_signal, factory_for, noise_fields, trial_nmse, HarnessError, Instance};
use crate::config::ExperimentConfig;
use crate::table::{mean_std, ResultRow, ResultTable};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridCell {
    pub alpha: f64,
    pub beta: f64,
    pub nmse_mean: f64,
    pub nmse_std: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct GridOutcome {
    pub table: ResultTable,
    /// Best fine cell.
    pub best: GridCell,
    /// Best coarse cell, the centre of the fine window.
    pub coarse_best: GridCell,
    pub coarse_cells: usize,
    pub fine_cells: usize,
}

/// The time transform has period 4 in its order; map `α` into `(-2, 2]`.
pub fn canonical_order(alpha: f64) -> f64 {
    let a = alpha - 4.0 * ((alpha + 2.0) / 4.0).floor();
    let a = if a <= -2.0 { a + 4.0 } else { a };
    // Snap to a fixed lattice so equivalent orders share a cache key.
    (a * 1e9).round() / 1e9
}

fn axis(lower: f64, upper: f64, step: f64) -> Vec<f64> {
    let count = ((upper - lower) / step + 1e-9).floor() as usize;
    (0..=count).map(|k| snap(lower + k as f64 * step)).collect()
}

fn snap(v: f64) -> f64 {
    (v * 1e9).round() / 1e9
}

fn window(centre: f64, half: f64, step: f64, lower: f64, upper: f64) -> Vec<f64> {
    let k = (half / step + 1e-9).floor() as i64;
    (-k..=k).map(|i| snap(centre + i as f64 * step)).filter(|&v| v >= lower - 1e-9 && v <= upper + 1e-9).collect()
}

type Key = (u64, u64);

fn key(alpha: f64, beta: f64) -> Key {
    (canonical_order(alpha).to_bits(), snap(beta).to_bits())
}

struct Evaluator<'a> {
    cfg: &'a ExperimentConfig,
    factory: tvfrft_core::spectral::TransformFactory,
    signal: TimeVertexSignal,
    noise: Vec<Vec<C64>>,
    samples: usize,
}

impl Evaluator<'_> {
    fn cell(&self, k: Key) -> Result<(f64, f64), HarnessError> {
        let (alpha, beta) = (f64::from_bits(k.0), f64::from_bits(k.1));
        let inst = Instance::new(self.cfg, &self.factory, alpha, beta)?;
        let set = inst.select(self.cfg.grid.strategy, self.cfg.form, self.samples)?;
        let r = inst.recovery(self.cfg.path, &set)?;
        let errors = self.noise.iter().map(|field| trial_nmse(&self.signal, field, &r)).collect::<Result<Vec<_>, _>>()?;
        Ok(mean_std(&errors))
    }

    /// Evaluate every distinct cell once, in parallel, keyed by canonical order.
    fn evaluate(&self, cells: &[(f64, f64)], cache: &mut BTreeMap<Key, (f64, f64)>) -> Result<(), HarnessError> {
        let mut todo: Vec<Key> = cells.iter().map(|&(a, b)| key(a, b)).filter(|k| !cache.contains_key(k)).collect();
        todo.sort_unstable();
        todo.dedup();
        let results: Vec<Result<(f64, f64), HarnessError>> = todo.par_iter().map(|&k| self.cell(k)).collect();
        for (k, r) in todo.into_iter().zip(results) {
            cache.insert(k, r?);
        }
        Ok(())
    }
}

/// Lowest NMSE; ties go to a canonical `α`, then to the earlier cell.
fn argmin(cells: &[GridCell]) -> GridCell {
    let canonical = |c: &GridCell| canonical_order(c.alpha) == snap(c.alpha);
    let mut best = cells[0];
    for c in &cells[1..] {
        if c.nmse_mean < best.nmse_mean || (c.nmse_mean == best.nmse_mean && canonical(c) && !canonical(&best)) {
            best = *c;
        }
    }
    best
}

/// Coarse-then-fine search over `(α, β)` for the orders whose band best
/// explains the signal. Each cell selects `samples` indices with the
/// configured strategy, reconstructs the noisy samples and records the NMSE
/// against the clean signal. Without a signal file the signal is synthesized
/// bandlimited at `(signal_alpha, signal_beta)`.
pub fn run_grid(cfg: &ExperimentConfig) -> Result<GridOutcome, HarnessError> {
    let g = &cfg.grid;
    let factory = factory_for(cfg)?;
    let origin = Instance::new(cfg, &factory, g.signal_alpha, g.signal_beta)?;
    let signal = experiment_signal(cfg, &origin.joint, &origin.band)?;
    let noise = noise_fields(cfg.seed, cfg.trials, origin.size(), cfg.sigma, !is_real(&signal))?;
    let samples = g.samples.unwrap_or(origin.band.k_j);
    if samples == 0 || samples > origin.size() {
        return Err(HarnessError::Invalid(format!("grid sample count {samples} outside 1..={}", origin.size())));
    }
    let eval = Evaluator { cfg, factory, signal, noise, samples };
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(g.workers.unwrap_or(0))
        .build()
        .map_err(|e| HarnessError::Invalid(e.to_string()))?;

    let mut cache = BTreeMap::new();
    let coarse_axis = axis(g.lower, g.upper, g.coarse_step);
    let coarse: Vec<(f64, f64)> = coarse_axis.iter().flat_map(|&a| coarse_axis.iter().map(move |&b| (a, b))).collect();
    pool.install(|| eval.evaluate(&coarse, &mut cache))?;
    let lookup = |cells: &[(f64, f64)], cache: &BTreeMap<Key, (f64, f64)>| -> Vec<GridCell> {
        cells
            .iter()
            .map(|&(alpha, beta)| {
                let (nmse_mean, nmse_std) = cache[&key(alpha, beta)];
                GridCell { alpha, beta, nmse_mean, nmse_std }
            })
            .collect()
    };
    let coarse_cells = lookup(&coarse, &cache);
    let coarse_best = argmin(&coarse_cells);

    let fa = window(coarse_best.alpha, g.window, g.fine_step, g.lower, g.upper);
    let fb = window(coarse_best.beta, g.window, g.fine_step, g.lower, g.upper);
    let fine: Vec<(f64, f64)> = fa.iter().flat_map(|&a| fb.iter().map(move |&b| (a, b))).collect();
    pool.install(|| eval.evaluate(&fine, &mut cache))?;
    let fine_cells = lookup(&fine, &cache);
    let best = argmin(&fine_cells);

    let mut table = ResultTable::default();
    for (stage, cells) in [("coarse", &coarse_cells), ("fine", &fine_cells)] {
        for c in cells.iter() {
            let mut row = ResultRow::new(&cfg.id, cfg.trials);
            row.stage = Some(stage.into());
            row.strategy = Some(g.strategy.name().to_string());
            row.form = Some(cfg.form.name().to_string());
            row.samples = Some(samples);
            row.alpha = Some(c.alpha);
            row.beta = Some(c.beta);
            row.nmse_mean = Some(c.nmse_mean);
            row.nmse_std = Some(c.nmse_std);
            table.push(row);
        }
    }
    Ok(GridOutcome { table, best, coarse_best, coarse_cells: coarse.len(), fine_cells: fine.len() })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_orders() {
        assert_eq!(canonical_order(1.9), 1.9);
        assert_eq!(canonical_order(-2.1), 1.9);
        assert_eq!(canonical_order(2.0), 2.0);
        assert_eq!(canonical_order(-2.0), 2.0);
        assert_eq!(canonical_order(-4.0), 0.0);
        assert_eq!(canonical_order(3.5), -0.5);
    }

    #[test]
    fn axes_and_windows() {
        assert_eq!(axis(-4.0, 4.0, 0.5).len(), 17);
        let w = window(2.0, 0.5, 0.1, -4.0, 4.0);
        assert_eq!(w.len(), 11);
        assert_eq!((w[0], w[10]), (1.5, 2.5));
        assert_eq!(window(4.0, 0.5, 0.1, -4.0, 4.0).len(), 6);
    }
}
