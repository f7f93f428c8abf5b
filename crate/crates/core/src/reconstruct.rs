//! Recovery operators, direct and localized reconstruction, noise error
//! covariance and design criteria.

use alloc::string::String;
use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;
use rand::Rng;
use rand_distr::{Distribution, Normal};

use crate::bandlimit::complex_normal;
use crate::error::{Error, Result};
use crate::linalg::{self, pinv, principal, select_cols, select_rows, singular_values, C64, CMat, CVec, PINV_CUTOFF};
use crate::localized::LocalizedOperator;
use crate::select::{SamplingProblem, RANK_TOL};
use crate::spectral::TimeVertexSignal;

/// Recovery below this smallest singular value is flagged as ill-posed.
pub const ILL_POSED_SIGMA: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum RecoveryPath {
    #[default]
    Direct,
    Localized,
}

impl RecoveryPath {
    pub fn name(self) -> &'static str {
        match self {
            RecoveryPath::Direct => "direct",
            RecoveryPath::Localized => "localized",
        }
    }

    pub fn parse(s: &str) -> Option<Self> {
        [RecoveryPath::Direct, RecoveryPath::Localized].into_iter().find(|p| p.name().eq_ignore_ascii_case(s))
    }
}

/// Linear map from the compact sample vector to the full signal.
#[derive(Debug, Clone, PartialEq)]
pub struct RecoveryOperator {
    /// `NT × |S|`; column `i` belongs to `sample_set[i]`.
    pub matrix: CMat,
    pub sample_set: Vec<usize>,
    pub path: RecoveryPath,
    pub n_vertices: usize,
    pub n_times: usize,
    pub warnings: Vec<String>,
}

fn check_set(set: &[usize], nt: usize) -> Result<()> {
    if set.is_empty() {
        return Err(Error::EmptySampleSet);
    }
    if let Some(&bad) = set.iter().find(|&&i| i >= nt) {
        return Err(Error::BandIndex { index: bad, bound: nt });
    }
    Ok(())
}

/// `R = J^{-α,-β}[:, F] · (J^{-α,-β}[S, F])^†`.
pub fn recovery_operator(problem: &SamplingProblem, set: &[usize]) -> Result<RecoveryOperator> {
    check_set(set, problem.size())?;
    let vs = select_rows(&problem.synthesis, set);
    let mut warnings = Vec::new();
    let sv = singular_values(&vs);
    let r = set.len().min(problem.band.k_j);
    if sv.get(r - 1).copied().unwrap_or(0.0) < ILL_POSED_SIGMA {
        warnings.push(String::from("sampled band matrix is nearly rank deficient; recovery is ill-posed"));
    }
    Ok(RecoveryOperator {
        matrix: &problem.synthesis * pinv(&vs),
        sample_set: set.to_vec(),
        path: RecoveryPath::Direct,
        n_vertices: problem.joint.n_vertices,
        n_times: problem.joint.n_times,
        warnings,
    })
}

/// `T[:, S] · (T[S, S])^†`.
pub fn localized_recovery_operator(op: &LocalizedOperator, set: &[usize], n_vertices: usize, n_times: usize) -> Result<RecoveryOperator> {
    check_set(set, op.size())?;
    let mut warnings = Vec::new();
    if !op.ideal {
        warnings.push(String::from("non-ideal kernel: reconstruction is approximate"));
    }
    let ts = principal(&op.matrix, set);
    Ok(RecoveryOperator {
        matrix: select_cols(&op.matrix, set) * pinv(&ts),
        sample_set: set.to_vec(),
        path: RecoveryPath::Localized,
        n_vertices,
        n_times,
        warnings,
    })
}

/// Compact sample vector `x_S`.
pub fn sample(x: &TimeVertexSignal, set: &[usize]) -> Vec<C64> {
    set.iter().map(|&i| x.vec()[i]).collect()
}

/// Full-length masked vector `D x` from compact samples.
pub fn masked(samples: &[C64], set: &[usize], nt: usize) -> Vec<C64> {
    let mut out = alloc::vec![C64::new(0.0, 0.0); nt];
    for (&i, &v) in set.iter().zip(samples) {
        out[i] = v;
    }
    out
}

/// `x' = R · samples`.
pub fn reconstruct_direct(samples: &[C64], r: &RecoveryOperator) -> Result<TimeVertexSignal> {
    if samples.len() != r.sample_set.len() {
        return Err(Error::DimensionMismatch { expected: r.sample_set.len(), found: samples.len() });
    }
    let y = &r.matrix * CVec::from_column_slice(samples);
    TimeVertexSignal::from_vec(r.n_vertices, r.n_times, y.as_slice())
}

/// `x' = T[:, S] · (T[S, S])^† · samples`.
pub fn reconstruct_localized(samples: &[C64], set: &[usize], op: &LocalizedOperator, n_vertices: usize, n_times: usize) -> Result<TimeVertexSignal> {
    let r = localized_recovery_operator(op, set, n_vertices, n_times)?;
    reconstruct_direct(samples, &r)
}

/// Error covariance `E = σ² R Rᴴ` and its trace.
pub fn error_covariance(r: &RecoveryOperator, sigma: f64) -> (CMat, f64) {
    let e = (&r.matrix * r.matrix.adjoint()) * C64::new(sigma * sigma, 0.0);
    let tr = e.trace().re;
    (e, tr)
}

/// Trace of `σ² R Rᴴ` without forming the covariance.
pub fn error_covariance_trace(r: &RecoveryOperator, sigma: f64) -> f64 {
    sigma * sigma * linalg::norm_sqr(r.matrix.as_slice())
}

/// Localized covariance `σ² M Mᴴ` with `M = T^{1/2} ((T^{1/2})[S, :])^†`.
pub fn error_covariance_localized(op: &LocalizedOperator, set: &[usize], sigma: f64) -> Result<(CMat, f64)> {
    check_set(set, op.size())?;
    let m = &op.sqrt_matrix * pinv(&select_rows(&op.sqrt_matrix, set));
    let e = (&m * m.adjoint()) * C64::new(sigma * sigma, 0.0);
    let tr = e.trace().re;
    Ok((e, tr))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Criterion {
    /// `tr[(T_S)^{-1}]`
    A,
    /// `det[(T_S)^{-1}]`
    D,
    /// `‖((T^{1/2})[S, :])^†‖₂`
    E,
    /// `tr[T_S]`
    T,
}

/// Design criterion of a sample set; singular sets give `+∞` for the
/// minimized criteria and `-∞` for `T`.
pub fn criterion_value(kind: Criterion, op: &LocalizedOperator, set: &[usize]) -> Result<f64> {
    check_set(set, op.size())?;
    let r = set.len().min(op.rank());
    let sentinel = if kind == Criterion::T { f64::NEG_INFINITY } else { f64::INFINITY };
    if r == 0 {
        return Ok(sentinel);
    }
    let deficient = |spec: &[f64]| {
        let top = spec.first().copied().unwrap_or(0.0);
        !(top > 0.0) || !(spec[r - 1] > RANK_TOL * top)
    };
    if kind == Criterion::E {
        let sv = singular_values(&select_rows(&op.sqrt_matrix, set));
        let gram: Vec<f64> = sv.iter().map(|s| s * s).collect();
        return Ok(if deficient(&gram) { sentinel } else { 1.0 / sv[r - 1] });
    }
    let ts = principal(&op.matrix, set);
    let mut ev = linalg::hermitian_eigenvalues(&ts);
    ev.reverse();
    if deficient(&ev) {
        return Ok(sentinel);
    }
    Ok(match kind {
        Criterion::A => ev[..r].iter().map(|l| 1.0 / l).sum(),
        Criterion::D => 1.0 / ev[..r].iter().product::<f64>(),
        Criterion::T => ts.trace().re,
        Criterion::E => unreachable!(),
    })
}

/// `‖estimate − reference‖² / ‖reference‖²`.
pub fn nmse(reference: &TimeVertexSignal, estimate: &TimeVertexSignal) -> Result<f64> {
    if reference.vec().len() != estimate.vec().len() {
        return Err(Error::DimensionMismatch { expected: reference.vec().len(), found: estimate.vec().len() });
    }
    let energy = reference.energy();
    if energy == 0.0 {
        return Err(Error::ZeroReference);
    }
    let err: f64 = reference.vec().iter().zip(estimate.vec()).map(|(a, b)| (a - b).norm_sqr()).sum();
    Ok(err / energy)
}

/// i.i.d. Gaussian noise with variance `σ²` per vector entry.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseModel {
    pub sigma: f64,
    pub seed: u64,
}

/// Draw `len` noise entries: `CN(0, σ²)` when `complex`, else `N(0, σ²)`.
pub fn draw_noise<R: Rng + ?Sized>(rng: &mut R, len: usize, sigma: f64, complex: bool) -> Result<Vec<C64>> {
    if !(sigma >= 0.0) || !sigma.is_finite() {
        return Err(Error::BadSigma(sigma));
    }
    if complex {
        Ok((0..len).map(|_| complex_normal(rng) * sigma).collect())
    } else {
        let normal = Normal::new(0.0, sigma).map_err(|_| Error::BadSigma(sigma))?;
        Ok((0..len).map(|_| C64::new(normal.sample(rng), 0.0)).collect())
    }
}

pub fn is_real(x: &TimeVertexSignal) -> bool {
    x.vec().iter().all(|z| z.im == 0.0)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ReconstructionReport {
    pub nmse: f64,
    pub residual_norm: f64,
    pub covariance_trace: f64,
    pub path: RecoveryPath,
    pub cutoff: f64,
    pub warnings: Vec<String>,
}

/// Compare a reconstruction with its reference and attach the noise
/// covariance trace of the operator used.
pub fn report(reference: &TimeVertexSignal, estimate: &TimeVertexSignal, r: &RecoveryOperator, sigma: f64) -> Result<ReconstructionReport> {
    let err = nmse(reference, estimate)?;
    let residual: f64 = reference.vec().iter().zip(estimate.vec()).map(|(a, b)| (a - b).norm_sqr()).sum::<f64>().sqrt();
    Ok(ReconstructionReport {
        nmse: err,
        residual_norm: residual,
        covariance_trace: error_covariance_trace(r, sigma),
        path: r.path,
        cutoff: PINV_CUTOFF,
        warnings: r.warnings.clone(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sig(v: &[f64]) -> TimeVertexSignal {
        let c: Vec<C64> = v.iter().map(|&x| C64::new(x, 0.0)).collect();
        TimeVertexSignal::from_vec(v.len(), 1, &c).unwrap()
    }

    #[test]
    fn nmse_examples() {
        let x = sig(&[1.0, -2.0, 0.5]);
        assert_eq!(nmse(&x, &x).unwrap(), 0.0);
        assert_eq!(nmse(&x, &sig(&[0.0, 0.0, 0.0])).unwrap(), 1.0);
        assert!((nmse(&x, &sig(&[2.0, -4.0, 1.0])).unwrap() - 1.0).abs() < 1e-15);
        assert_eq!(nmse(&sig(&[0.0]), &sig(&[1.0])), Err(Error::ZeroReference));
    }

    #[test]
    fn mask_round_trip() {
        let x = sig(&[1.0, 2.0, 3.0, 4.0]);
        let s = sample(&x, &[3, 1]);
        let m = masked(&s, &[3, 1], 4);
        assert_eq!(m, alloc::vec![C64::new(0.0, 0.0), C64::new(2.0, 0.0), C64::new(0.0, 0.0), C64::new(4.0, 0.0)]);
    }

    #[test]
    fn noise_rejects_bad_sigma() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha20Rng::seed_from_u64(1);
        assert!(draw_noise(&mut rng, 3, -1.0, true).is_err());
        let z = draw_noise(&mut rng, 5, 0.0, false).unwrap();
        assert!(z.iter().all(|v| *v == C64::new(0.0, 0.0)));
    }
}
