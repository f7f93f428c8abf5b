//! Objective values evaluated from the literal matrices of each criterion.
//! Used for `objective_value`, the exhaustive oracle, the `recompute` option
//! and non-unitary transforms.

use alloc::borrow::Cow;
use alloc::vec::Vec;

use super::{pick, score_of, SamplingProblem, Strategy, ObjectiveForm, RANK_TOL};
use crate::error::{Error, Result};
use crate::linalg::{self, hermitian_eigenvalues, is_hermitian, principal, select_cols, select_rows, singular_values, CMat};

pub(crate) struct Context<'a> {
    strategy: Strategy,
    form: ObjectiveForm,
    problem: &'a SamplingProblem,
    /// Localized kernel: `T`, or `TᴴT` for the smallest-singular-value rule.
    operator: Option<Cow<'a, CMat>>,
    rank: usize,
}

fn descending(mut v: Vec<f64>) -> Vec<f64> {
    v.sort_by(|a, b| b.total_cmp(a));
    v
}

fn singular(gram: &[f64], r: usize) -> bool {
    let top = gram.first().copied().unwrap_or(0.0);
    !(top > 0.0) || gram.len() < r || !(gram[r - 1] > RANK_TOL * top)
}

impl<'a> Context<'a> {
    pub(crate) fn new(strategy: Strategy, form: ObjectiveForm, problem: &'a SamplingProblem) -> Result<Self> {
        if strategy == Strategy::Random {
            return Err(Error::RandomHasNoObjective);
        }
        let (operator, rank) = match form {
            ObjectiveForm::Direct => (None, problem.band.k_j),
            ObjectiveForm::Localized => {
                let op = problem.localized_operator()?;
                let rank = op.rank();
                let m: Cow<'a, CMat> = match op {
                    Cow::Borrowed(op) => Cow::Borrowed(&op.matrix),
                    Cow::Owned(op) => Cow::Owned(op.matrix),
                };
                (Some(m), rank)
            }
        };
        Ok(Context { strategy, form, problem, operator, rank })
    }

    fn operator(&self) -> &CMat {
        self.operator.as_deref().expect("localized form carries its operator")
    }

    /// Objective value of a complete set; singular criteria map to the
    /// strategy's infinite sentinel.
    pub(crate) fn value(&self, set: &[usize]) -> f64 {
        let r = set.len().min(self.rank);
        let sentinel = self.strategy.singular_value(self.form);
        if r == 0 {
            return sentinel;
        }
        let p = self.problem;
        match (self.form, self.strategy) {
            (ObjectiveForm::Direct, Strategy::MaxSigMin) | (ObjectiveForm::Direct, Strategy::MinTrac) => {
                let sv = singular_values(&select_rows(&p.synthesis, set));
                let gram: Vec<f64> = sv.iter().map(|s| s * s).collect();
                if singular(&gram, r) {
                    return sentinel;
                }
                if self.strategy == Strategy::MaxSigMin {
                    sv[r - 1]
                } else {
                    gram[..r].iter().map(|g| 1.0 / g).sum()
                }
            }
            (ObjectiveForm::Direct, Strategy::MinPinv) | (ObjectiveForm::Direct, Strategy::MaxSig) => {
                let ws = select_cols(&p.analysis, set);
                let sv = singular_values(&ws);
                let gram: Vec<f64> = sv.iter().map(|s| s * s).collect();
                if singular(&gram, r) {
                    return sentinel;
                }
                if self.strategy == Strategy::MinPinv {
                    gram[..r].iter().map(|g| 1.0 / g).sum()
                } else {
                    linalg::norm_sqr(ws.as_slice())
                }
            }
            (ObjectiveForm::Direct, Strategy::MaxVol) => {
                let bs = select_rows(&p.synthesis, set) * select_cols(&p.analysis, set);
                volume(&bs, r).unwrap_or(sentinel)
            }
            (ObjectiveForm::Localized, Strategy::MaxSigMin) => {
                let sv = singular_values(&select_cols(self.operator(), set));
                let gram: Vec<f64> = sv.iter().map(|s| s * s).collect();
                if singular(&gram, r) {
                    return sentinel;
                }
                1.0 / sv[r - 1]
            }
            (ObjectiveForm::Localized, Strategy::MinTrac) | (ObjectiveForm::Localized, Strategy::MinPinv) => {
                let ts = principal(self.operator(), set);
                if is_hermitian(&ts, 1e-9) {
                    let ev = descending(hermitian_eigenvalues(&ts));
                    if singular(&ev, r) {
                        return sentinel;
                    }
                    ev[..r].iter().map(|g| 1.0 / g).sum()
                } else {
                    if singular(&singular_values(&ts), r) {
                        return sentinel;
                    }
                    linalg::pinv(&ts).trace().re
                }
            }
            (ObjectiveForm::Localized, Strategy::MaxSig) => {
                let ts = principal(self.operator(), set);
                let spectrum = if is_hermitian(&ts, 1e-9) { descending(hermitian_eigenvalues(&ts)) } else { singular_values(&ts) };
                if singular(&spectrum, r) {
                    return sentinel;
                }
                ts.trace().re
            }
            (ObjectiveForm::Localized, Strategy::MaxVol) => volume(&principal(self.operator(), set), r).unwrap_or(sentinel),
            (_, Strategy::Random) => unreachable!("rejected in Context::new"),
        }
    }
}

/// Pseudo-determinant over the `r` leading eigenvalues (Hermitian input) or
/// singular values (otherwise); `None` when rank deficient.
fn volume(m: &CMat, r: usize) -> Option<f64> {
    let spectrum = if is_hermitian(m, 1e-9) { descending(hermitian_eigenvalues(m)) } else { singular_values(m) };
    if singular(&spectrum, r) {
        return None;
    }
    Some(spectrum[..r].iter().product())
}

/// Objective value of strategy `strategy` in form `form` on the set `set`.
pub fn objective_value(strategy: Strategy, form: ObjectiveForm, problem: &SamplingProblem, set: &[usize]) -> Result<f64> {
    if set.is_empty() {
        return Err(Error::EmptySampleSet);
    }
    if let Some(&bad) = set.iter().find(|&&i| i >= problem.size()) {
        return Err(Error::BandIndex { index: bad, bound: problem.size() });
    }
    Ok(Context::new(strategy, form, problem)?.value(set))
}

pub(crate) fn greedy(strategy: Strategy, form: ObjectiveForm, problem: &SamplingProblem, m: usize) -> Result<(Vec<usize>, Vec<f64>)> {
    let ctx = Context::new(strategy, form, problem)?;
    let nt = problem.size();
    let mut chosen = alloc::vec![false; nt];
    let mut set: Vec<usize> = Vec::with_capacity(m);
    let mut trace = Vec::with_capacity(m);
    for step in 0..m {
        let mut scores = Vec::with_capacity(nt);
        let mut values = alloc::vec![0.0; nt];
        for y in 0..nt {
            if chosen[y] {
                continue;
            }
            set.push(y);
            let v = ctx.value(&set);
            set.pop();
            values[y] = v;
            scores.push((y, score_of(strategy, form, v)));
        }
        let y = pick(&scores).ok_or(Error::AllCandidatesSingular { step })?;
        chosen[y] = true;
        set.push(y);
        trace.push(values[y]);
    }
    Ok((set, trace))
}
