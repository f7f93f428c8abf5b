//! Incremental greedy evaluation.
//!
//! Selected feature vectors are orthonormalized on the fly (a pivoted
//! Cholesky driven only by kernel entries). Every candidate is then described
//! by its coordinates `c` in that basis and its out-of-span energy `w²`, and
//! each criterion of `G + [c; w][c; w]ᴴ` follows from the eigenpairs of the
//! current Gram matrix `G` by rank-one update formulas.

use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;

use super::{pick, ObjectiveForm, SamplingProblem, Strategy, RANK_TOL};
use crate::error::{Error, Result};
use crate::linalg::{hermitian_eigen, C64, CMat, CVec};

/// Kernel matrix `k(a, b) = ⟨φ_a, φ_b⟩` of the features, accessed by column.
enum Kernel {
    /// `k(a, b) = Σ_k left[a, k] · right[k, b]`.
    Factors { left: CMat, right: CMat },
    Dense(CMat),
}

impl Kernel {
    fn diagonal(&self) -> Vec<f64> {
        match self {
            Kernel::Factors { left, right } => (0..left.nrows())
                .map(|y| {
                    let mut acc = C64::new(0.0, 0.0);
                    for k in 0..left.ncols() {
                        acc += left[(y, k)] * right[(k, y)];
                    }
                    acc.re
                })
                .collect(),
            Kernel::Dense(m) => (0..m.nrows()).map(|y| m[(y, y)].re).collect(),
        }
    }

    fn column(&self, s: usize) -> CVec {
        match self {
            Kernel::Factors { left, right } => left * right.column(s),
            Kernel::Dense(m) => m.column(s).into_owned(),
        }
    }
}

fn kernel_for(strategy: Strategy, form: ObjectiveForm, problem: &SamplingProblem) -> Result<(Kernel, usize)> {
    let v = &problem.synthesis;
    let w = &problem.analysis;
    Ok(match form {
        ObjectiveForm::Direct => {
            let k = match strategy {
                Strategy::MaxSigMin | Strategy::MinTrac => Kernel::Factors { left: v.clone(), right: v.adjoint() },
                Strategy::MinPinv | Strategy::MaxSig => Kernel::Factors { left: w.adjoint(), right: w.clone() },
                Strategy::MaxVol => Kernel::Factors { left: v.clone(), right: w.clone() },
                Strategy::Random => return Err(Error::RandomHasNoObjective),
            };
            (k, problem.band.k_j)
        }
        ObjectiveForm::Localized => {
            let op = problem.localized_operator()?;
            let rank = op.rank();
            let m = if strategy == Strategy::MaxSigMin { op.gram(&problem.joint) } else { op.into_owned().matrix };
            (Kernel::Dense(m), rank)
        }
    })
}

/// Smallest eigenvalue of `diag(poles) + u uᴴ` given `weights = |u_i|²`,
/// found by bisection on the secular equation between the two smallest poles.
fn smallest_updated_eigenvalue(poles: &mut [(f64, f64)]) -> f64 {
    poles.sort_by(|a, b| a.0.total_cmp(&b.0));
    let p1 = poles[0].0;
    if poles[0].1 == 0.0 {
        // The smallest pole stays an eigenvalue, with its own basis vector.
        return p1;
    }
    let total: f64 = poles.iter().map(|p| p.1).sum();
    let mut hi = p1 + total;
    if poles.len() > 1 {
        hi = hi.min(poles[1].0);
    }
    let mut lo = p1;
    if hi <= lo {
        return lo;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        let f = 1.0 + poles.iter().map(|&(p, w)| w / (p - mid)).sum::<f64>();
        if f < 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-15 * hi.abs() {
            break;
        }
    }
    0.5 * (lo + hi)
}

struct Evaluation {
    score: f64,
    value: f64,
}

struct Aggregates {
    trace: f64,
    trace_inv: f64,
    logdet: f64,
}

#[allow(clippy::too_many_arguments)]
fn evaluate(strategy: Strategy, form: ObjectiveForm, lambda: &[f64], agg: &Aggregates, z: &[C64], w2: f64, norm2: f64, grows: bool) -> Evaluation {
    match strategy {
        Strategy::MaxSig => {
            let v = agg.trace + norm2;
            Evaluation { score: v, value: v }
        }
        Strategy::MinTrac | Strategy::MinPinv => {
            let q: f64 = z.iter().zip(lambda).map(|(zi, l)| zi.norm_sqr() / l).sum();
            let v = if grows {
                agg.trace_inv + (1.0 + q) / w2
            } else {
                let q2: f64 = z.iter().zip(lambda).map(|(zi, l)| zi.norm_sqr() / (l * l)).sum();
                agg.trace_inv - q2 / (1.0 + q)
            };
            Evaluation { score: -v, value: v }
        }
        Strategy::MaxVol => {
            let lv = if grows {
                agg.logdet + w2.ln()
            } else {
                let q: f64 = z.iter().zip(lambda).map(|(zi, l)| zi.norm_sqr() / l).sum();
                agg.logdet + q.ln_1p()
            };
            Evaluation { score: lv, value: lv.exp() }
        }
        Strategy::MaxSigMin => {
            let mut poles: Vec<(f64, f64)> = lambda.iter().zip(z).map(|(&l, zi)| (l, zi.norm_sqr())).collect();
            if grows {
                poles.push((0.0, w2));
            }
            let mu = smallest_updated_eigenvalue(&mut poles).max(0.0);
            let s = mu.sqrt();
            let value = match form {
                ObjectiveForm::Direct => s,
                ObjectiveForm::Localized => 1.0 / s,
            };
            Evaluation { score: mu, value }
        }
        Strategy::Random => unreachable!("rejected before evaluation"),
    }
}

pub(crate) fn greedy(strategy: Strategy, form: ObjectiveForm, problem: &SamplingProblem, m: usize) -> Result<(Vec<usize>, Vec<f64>)> {
    let (kernel, rank) = kernel_for(strategy, form, problem)?;
    let nt = problem.size();
    let diag = kernel.diagonal();
    let cap = rank.min(m);
    // coords[(i, y)] = ⟨φ_y, e_i⟩ for the orthonormal basis e_0..e_{r-1}
    let mut coords = CMat::zeros(cap, nt);
    let mut resid: Vec<f64> = diag.iter().map(|d| d.max(0.0)).collect();
    let mut r = 0usize;
    let mut gram = CMat::zeros(cap, cap);
    let mut chosen = alloc::vec![false; nt];
    let mut indices = Vec::with_capacity(m);
    let mut trace = Vec::with_capacity(m);

    for step in 0..m {
        let g = gram.view((0, 0), (r, r)).into_owned();
        let (lambda, e) = hermitian_eigen(&g);
        let lambda: Vec<f64> = lambda.iter().map(|l| l.max(f64::MIN_POSITIVE)).collect();
        let agg = Aggregates {
            trace: lambda.iter().sum(),
            trace_inv: lambda.iter().map(|l| 1.0 / l).sum(),
            logdet: lambda.iter().map(|l| l.ln()).sum(),
        };
        let zall = e.adjoint() * coords.rows(0, r);
        let saturated = r >= rank;
        let must_grow = indices.len() < rank;

        let mut scores = Vec::with_capacity(nt);
        let mut values = alloc::vec![0.0; nt];
        let mut zbuf: Vec<C64> = alloc::vec![C64::new(0.0, 0.0); r];
        for y in 0..nt {
            if chosen[y] {
                continue;
            }
            let grows = !saturated && diag[y] > 0.0 && resid[y] > RANK_TOL * diag[y];
            if must_grow && !grows {
                scores.push((y, f64::NEG_INFINITY));
                continue;
            }
            for i in 0..r {
                zbuf[i] = zall[(i, y)];
            }
            let ev = evaluate(strategy, form, &lambda, &agg, &zbuf, resid[y], diag[y], grows);
            values[y] = ev.value;
            scores.push((y, ev.score));
        }
        let s = pick(&scores).ok_or(Error::AllCandidatesSingular { step })?;
        chosen[s] = true;
        indices.push(s);
        trace.push(values[s]);

        let grows = !saturated && diag[s] > 0.0 && resid[s] > RANK_TOL * diag[s] && r < cap;
        if grows {
            let d = resid[s].sqrt();
            let col = kernel.column(s);
            let cs: CVec = coords.view((0, s), (r, 1)).column(0).map(|z| z.conj());
            let proj = coords.rows(0, r).tr_mul(&cs);
            let inv = 1.0 / d;
            for y in 0..nt {
                let val = (col[y] - proj[y]) * inv;
                coords[(r, y)] = val;
                if !chosen[y] {
                    resid[y] = (resid[y] - val.norm_sqr()).max(0.0);
                }
            }
            coords[(r, s)] = C64::new(d, 0.0);
            resid[s] = 0.0;
            r += 1;
        }
        let cs: CVec = coords.view((0, s), (r, 1)).column(0).into_owned();
        let update = &cs * cs.adjoint();
        let mut block = gram.view_mut((0, 0), (r, r));
        block += update;
    }
    Ok((indices, trace))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn dense_smallest(poles: &[(f64, f64)], u: &[C64]) -> f64 {
        let n = poles.len();
        let mut m = CMat::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = C64::new(poles[i].0, 0.0);
            for j in 0..n {
                m[(i, j)] += u[i] * u[j].conj();
            }
        }
        crate::linalg::hermitian_eigenvalues(&m)[0]
    }

    #[test]
    fn secular_solver_matches_dense_eigenvalue() {
        let u = [C64::new(0.3, 0.1), C64::new(-0.7, 0.2), C64::new(0.05, -0.4), C64::new(0.9, 0.0)];
        let poles_only = [0.0, 0.2, 0.9, 1.7];
        let mut poles: Vec<(f64, f64)> = poles_only.iter().zip(&u).map(|(&p, z)| (p, z.norm_sqr())).collect();
        let dense = dense_smallest(&poles, &u);
        let got = smallest_updated_eigenvalue(&mut poles);
        assert!((got - dense).abs() < 1e-13, "{got} vs {dense}");
    }

    #[test]
    fn secular_solver_handles_zero_weight_and_single_pole() {
        let mut p = [(0.5, 0.0), (1.0, 0.3)];
        assert_eq!(smallest_updated_eigenvalue(&mut p), 0.5);
        let mut single = [(0.0, 0.8)];
        assert!((smallest_updated_eigenvalue(&mut single) - 0.8).abs() < 1e-15);
    }
}
