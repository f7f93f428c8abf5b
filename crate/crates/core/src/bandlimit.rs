//! Joint limiting and bandlimiting projectors, perfect localization and
//! bandlimited signal synthesis.

use alloc::vec::Vec;
#[allow(unused_imports)]
use num_traits::Float;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::linalg::{self, hermitian_part, C64, CMat, CVec};
use crate::spectral::{JointTransform, TimeVertexSignal};

fn check_indices(idx: &[usize], bound: usize) -> Result<()> {
    for w in idx.windows(2) {
        if w[0] >= w[1] {
            return Err(Error::UnsortedIndices);
        }
    }
    if let Some(&last) = idx.last() {
        if last >= bound {
            return Err(Error::BandIndex { index: last, bound });
        }
    }
    Ok(())
}

fn product_indices(n: usize, outer: &[usize], inner: &[usize]) -> Vec<usize> {
    outer.iter().flat_map(|&t| inner.iter().map(move |&v| t * n + v)).collect()
}

/// Vertex, time and joint sampling supports.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SupportSets {
    pub vertex_support: Vec<usize>,
    pub time_support: Vec<usize>,
    pub joint_support: Vec<usize>,
}

impl SupportSets {
    pub fn product(n: usize, t: usize, time_support: &[usize], vertex_support: &[usize]) -> Result<Self> {
        check_indices(time_support, t)?;
        check_indices(vertex_support, n)?;
        Ok(SupportSets {
            vertex_support: vertex_support.to_vec(),
            time_support: time_support.to_vec(),
            joint_support: product_indices(n, time_support, vertex_support),
        })
    }
}

/// Diagonal 0/1 operator stored as its indicator.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DiagonalProjector {
    pub indicator: Vec<bool>,
}

impl DiagonalProjector {
    pub fn from_indices(size: usize, idx: &[usize]) -> Result<Self> {
        let mut indicator = alloc::vec![false; size];
        for &i in idx {
            if i >= size {
                return Err(Error::BandIndex { index: i, bound: size });
            }
            indicator[i] = true;
        }
        Ok(DiagonalProjector { indicator })
    }

    pub fn size(&self) -> usize {
        self.indicator.len()
    }

    pub fn indices(&self) -> Vec<usize> {
        (0..self.size()).filter(|&i| self.indicator[i]).collect()
    }

    pub fn complement(&self) -> Self {
        DiagonalProjector { indicator: self.indicator.iter().map(|b| !b).collect() }
    }

    pub fn matrix(&self) -> CMat {
        let n = self.size();
        CMat::from_fn(n, n, |i, j| if i == j && self.indicator[i] { C64::new(1.0, 0.0) } else { C64::new(0.0, 0.0) })
    }

    pub fn apply(&self, x: &[C64]) -> Vec<C64> {
        x.iter().zip(&self.indicator).map(|(&v, &keep)| if keep { v } else { C64::new(0.0, 0.0) }).collect()
    }
}

/// `D_J = D_T ⊗ D_G`, the indicator of the joint support.
pub fn joint_limiting(n: usize, t: usize, time_support: &[usize], vertex_support: &[usize]) -> Result<DiagonalProjector> {
    let s = SupportSets::product(n, t, time_support, vertex_support)?;
    DiagonalProjector::from_indices(n * t, &s.joint_support)
}

/// Spectral supports of a bandlimited model.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SpectralSupports {
    pub n_vertices: usize,
    pub n_times: usize,
    /// Time-frequency band when the joint band is a product band.
    pub time_band: Option<Vec<usize>>,
    /// Vertex-frequency band when the joint band is a product band.
    pub vertex_band: Option<Vec<usize>>,
    pub joint_band: Vec<usize>,
    pub k_t: usize,
    pub k_g: usize,
    pub k_j: usize,
}

impl SpectralSupports {
    /// Product band `{ f_t·N + f_g }`.
    pub fn product(n: usize, t: usize, time_band: &[usize], vertex_band: &[usize]) -> Result<Self> {
        check_indices(time_band, t)?;
        check_indices(vertex_band, n)?;
        let joint_band = product_indices(n, time_band, vertex_band);
        Ok(SpectralSupports {
            n_vertices: n,
            n_times: t,
            time_band: Some(time_band.to_vec()),
            vertex_band: Some(vertex_band.to_vec()),
            k_t: time_band.len(),
            k_g: vertex_band.len(),
            k_j: joint_band.len(),
            joint_band,
        })
    }

    /// Product band of the `k_t` lowest time and `k_g` lowest vertex indices.
    pub fn lowest(n: usize, t: usize, k_t: usize, k_g: usize) -> Result<Self> {
        let tb: Vec<usize> = (0..k_t).collect();
        let gb: Vec<usize> = (0..k_g).collect();
        Self::product(n, t, &tb, &gb)
    }

    /// Arbitrary joint band; `K_T` and `K_G` count the distinct time and
    /// vertex frequencies it touches.
    pub fn joint(n: usize, t: usize, joint_band: &[usize]) -> Result<Self> {
        check_indices(joint_band, n * t)?;
        let mut ts: Vec<usize> = joint_band.iter().map(|f| f / n).collect();
        let mut gs: Vec<usize> = joint_band.iter().map(|f| f % n).collect();
        ts.dedup();
        gs.sort_unstable();
        gs.dedup();
        Ok(SpectralSupports {
            n_vertices: n,
            n_times: t,
            time_band: None,
            vertex_band: None,
            k_t: ts.len(),
            k_g: gs.len(),
            k_j: joint_band.len(),
            joint_band: joint_band.to_vec(),
        })
    }

    pub fn size(&self) -> usize {
        self.n_vertices * self.n_times
    }

    pub fn sigma(&self) -> DiagonalProjector {
        DiagonalProjector::from_indices(self.size(), &self.joint_band).expect("band validated at construction")
    }

    fn check_transform(&self, j: &JointTransform) -> Result<()> {
        if j.n_vertices != self.n_vertices {
            return Err(Error::DimensionMismatch { expected: self.n_vertices, found: j.n_vertices });
        }
        if j.n_times != self.n_times {
            return Err(Error::DimensionMismatch { expected: self.n_times, found: j.n_times });
        }
        Ok(())
    }
}

/// Band synthesis and analysis factors: `V = J^{-α,-β}[:, F]` and `W = J[F, :]`,
/// so the bandlimiting projector is `B = V W`.
pub fn band_factors(j: &JointTransform, band: &SpectralSupports) -> Result<(CMat, CMat)> {
    band.check_transform(j)?;
    Ok((j.inverse_columns(&band.joint_band), j.rows(&band.joint_band)))
}

#[derive(Debug, Clone, PartialEq)]
pub struct Projectors {
    pub b: CMat,
    pub sigma: DiagonalProjector,
    pub alpha: f64,
    pub beta: f64,
}

impl Projectors {
    pub fn complement(&self) -> CMat {
        CMat::identity(self.b.nrows(), self.b.nrows()) - &self.b
    }
}

/// `B = J^{-α,-β} Σ_F J^{α,β}` materialized within the budget.
pub fn joint_bandlimiting(j: &JointTransform, band: &SpectralSupports, budget: usize) -> Result<Projectors> {
    if j.size() > budget {
        return Err(Error::BudgetExceeded { size: j.size(), budget });
    }
    let (v, w) = band_factors(j, band)?;
    let b = if band.k_j == 0 { CMat::zeros(j.size(), j.size()) } else { v * w };
    Ok(Projectors { b, sigma: band.sigma(), alpha: j.alpha, beta: j.beta })
}

/// Factor projectors `(B_T, B_G)` of a product band, so that `B = B_T ⊗ B_G`.
pub fn factor_projectors(j: &JointTransform, band: &SpectralSupports) -> Option<(CMat, CMat)> {
    let tb = band.time_band.as_ref()?;
    let gb = band.vertex_band.as_ref()?;
    let proj = |inv: &CMat, fwd: &CMat, idx: &[usize]| {
        let cols = linalg::select_cols(inv, idx);
        let rows = linalg::select_rows(fwd, idx);
        cols * rows
    };
    Some((
        proj(&j.time_inverse.matrix, &j.time_factor.matrix, tb),
        proj(&j.vertex_inverse.matrix, &j.vertex_factor.matrix, gb),
    ))
}

/// `B · vec(x)` reshaped to a signal.
pub fn project_bandlimited(x: &TimeVertexSignal, p: &Projectors) -> Result<TimeVertexSignal> {
    let nt = p.b.nrows();
    if x.vec().len() != nt {
        return Err(Error::DimensionMismatch { expected: nt, found: x.vec().len() });
    }
    let y = &p.b * x.to_cvec();
    TimeVertexSignal::from_vec(x.n_vertices(), x.n_times(), y.as_slice())
}

/// Draw a standard circular complex Gaussian `CN(0, 1)` sample.
pub fn complex_normal<R: rand::Rng + ?Sized>(rng: &mut R) -> C64 {
    let h = core::f64::consts::FRAC_1_SQRT_2;
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    C64::new(h * re, h * im)
}

/// Seeded bandlimited signal: `CN(0,1)` coefficients on the band, inverse
/// transformed and scaled to `‖vec(x)‖₂ = amplitude`.
pub fn synthesize_bandlimited(seed: u64, j: &JointTransform, band: &SpectralSupports, amplitude: f64) -> Result<TimeVertexSignal> {
    band.check_transform(j)?;
    if band.k_j == 0 {
        return Err(Error::EmptyBand);
    }
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut coeffs = TimeVertexSignal::zeros(j.n_vertices, j.n_times);
    for &f in &band.joint_band {
        coeffs.data.as_mut_slice()[f] = complex_normal(&mut rng);
    }
    let mut x = j.apply_inverse(&coeffs)?;
    let norm = x.energy().sqrt();
    if norm > 0.0 {
        x.data *= C64::new(amplitude / norm, 0.0);
    }
    Ok(x)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LocalizationReport {
    pub lambda_max: f64,
    pub localized: bool,
    /// `‖BDB − (BDB)ᴴ‖_F` before symmetrization.
    pub asymmetry: f64,
    pub norm_bd: f64,
    pub norm_db: f64,
    /// False when `B` is not Hermitian, where the equivalence is unproved.
    pub proved_regime: bool,
}

/// Largest eigenvalue of `B D B` and the perfect-localization verdict.
pub fn check_perfect_localization(d: &DiagonalProjector, b: &CMat) -> Result<LocalizationReport> {
    let n = b.nrows();
    if d.size() != n {
        return Err(Error::DimensionMismatch { expected: n, found: d.size() });
    }
    let dm = d.matrix();
    let bd = b * &dm;
    let db = &dm * b;
    let m = &bd * b;
    let asymmetry = linalg::hermitian_defect(&m);
    let lambda_max = linalg::hermitian_eigenvalues(&hermitian_part(&m)).last().copied().unwrap_or(0.0);
    Ok(LocalizationReport {
        lambda_max,
        localized: lambda_max >= 1.0 - 1e-8,
        asymmetry,
        norm_bd: linalg::spectral_norm(&bd),
        norm_db: linalg::spectral_norm(&db),
        proved_regime: linalg::is_hermitian(b, 1e-9),
    })
}

/// Unit vector supported on `support` and fixed by `B`, when one exists:
/// the least singular direction of `(I − B)[:, support]`, accepted if its
/// residual is below `tol`.
pub fn localized_vector(b: &CMat, support: &[usize], tol: f64) -> Result<Option<CVec>> {
    let n = b.nrows();
    check_indices(support, n)?;
    if support.is_empty() {
        return Ok(None);
    }
    let complement = linalg::select_cols(&(CMat::identity(n, n) - b), support);
    // The Gram matrix shares right singular vectors with the complement.
    let (_, vectors) = linalg::hermitian_eigen(&(complement.adjoint() * &complement));
    let v = vectors.column(0);
    if (&complement * v).norm() > tol * v.norm() {
        return Ok(None);
    }
    let mut x = CVec::zeros(n);
    for (k, &i) in support.iter().enumerate() {
        x[i] = vectors[(k, 0)];
    }
    let norm = x.norm();
    Ok(Some(x / C64::new(norm, 0.0)))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Bandwidth {
    pub k_t: usize,
    pub k_g: usize,
    pub k_j: usize,
}

/// Default relative threshold for counting spectral entries.
pub const BANDWIDTH_TOL: f64 = 1e-8;

/// Count joint, time and vertex spectral support of `x` above `tol · max|x̂|`.
pub fn measure_bandwidth(x: &TimeVertexSignal, j: &JointTransform, tol: f64) -> Result<Bandwidth> {
    let xh = j.apply(x)?;
    let max = linalg::max_abs(xh.vec().iter().copied());
    if max == 0.0 {
        return Ok(Bandwidth { k_t: 0, k_g: 0, k_j: 0 });
    }
    let cut = tol * max;
    let big = |z: &C64| z.norm() > cut;
    let k_j = xh.vec().iter().filter(|z| big(z)).count();
    // X̂ is N×T: columns are time frequencies, rows are vertex frequencies.
    let k_t = (0..xh.n_times()).filter(|&t| xh.data.column(t).iter().any(big)).count();
    let k_g = (0..xh.n_vertices()).filter(|&v| xh.data.row(v).iter().any(big)).count();
    Ok(Bandwidth { k_t, k_g, k_j })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{build_cycle_time_graph, shift_operator, ShiftKind};
    use crate::linalg::frobenius;
    use crate::spectral::{SignConvention, TransformFactory, MATERIALIZE_BUDGET};

    fn factory(n: usize, t: usize) -> TransformFactory {
        let g = build_cycle_time_graph(n, false).unwrap();
        TransformFactory::new(t, &shift_operator(&g, ShiftKind::Laplacian).unwrap(), SignConvention::StandardMinus).unwrap()
    }

    #[test]
    fn joint_limiting_examples() {
        let d = joint_limiting(3, 2, &[0, 1], &[0, 1, 2]).unwrap();
        assert!(d.indicator.iter().all(|&b| b));
        let d = joint_limiting(3, 2, &[0], &[1]).unwrap();
        assert_eq!(d.indices(), alloc::vec![1]);
        let sum = d.matrix() + d.complement().matrix();
        assert_eq!(sum, CMat::identity(6, 6));
        assert_eq!(joint_limiting(3, 2, &[2], &[0]), Err(Error::BandIndex { index: 2, bound: 2 }));
    }

    #[test]
    fn full_and_empty_bands() {
        let f = factory(3, 4);
        let j = f.joint(0.4, 0.7).unwrap();
        let full = SpectralSupports::lowest(3, 4, 4, 3).unwrap();
        let p = joint_bandlimiting(&j, &full, MATERIALIZE_BUDGET).unwrap();
        assert!(linalg::distance_to_identity(&p.b) < 1e-10);
        let empty = SpectralSupports::joint(3, 4, &[]).unwrap();
        let p = joint_bandlimiting(&j, &empty, MATERIALIZE_BUDGET).unwrap();
        assert_eq!(p.b, CMat::zeros(12, 12));
    }

    #[test]
    fn product_band_factorizes() {
        let f = factory(5, 4);
        let j = f.joint(0.9, 1.3).unwrap();
        let band = SpectralSupports::lowest(5, 4, 2, 3).unwrap();
        let p = joint_bandlimiting(&j, &band, MATERIALIZE_BUDGET).unwrap();
        let (bt, bg) = factor_projectors(&j, &band).unwrap();
        assert!(frobenius(&(&p.b - bt.kronecker(&bg))) < 1e-10);
        assert!(frobenius(&(&p.b * &p.b - &p.b)) < 1e-10);
    }

    #[test]
    fn synthesis_is_deterministic_normalized_and_bandlimited() {
        let f = factory(6, 4);
        let j = f.joint(0.3, 0.8).unwrap();
        let band = SpectralSupports::lowest(6, 4, 2, 3).unwrap();
        let a = synthesize_bandlimited(11, &j, &band, 1.0).unwrap();
        let b = synthesize_bandlimited(11, &j, &band, 1.0).unwrap();
        assert_eq!(a, b);
        assert!((a.energy().sqrt() - 1.0).abs() < 1e-12);
        let xh = j.apply(&a).unwrap();
        let sigma = band.sigma();
        for (i, z) in xh.vec().iter().enumerate() {
            if !sigma.indicator[i] {
                assert!(z.norm() < 1e-12);
            }
        }
        let bw = measure_bandwidth(&a, &j, BANDWIDTH_TOL).unwrap();
        assert_eq!(bw, Bandwidth { k_t: 2, k_g: 3, k_j: 6 });
    }

    #[test]
    fn single_spike_has_unit_bandwidth() {
        let f = factory(4, 3);
        let j = f.joint(0.5, 0.5).unwrap();
        let mut spike = TimeVertexSignal::zeros(4, 3);
        spike.data[(2, 1)] = C64::new(1.0, 0.0);
        let x = j.apply_inverse(&spike).unwrap();
        assert_eq!(measure_bandwidth(&x, &j, BANDWIDTH_TOL).unwrap(), Bandwidth { k_t: 1, k_g: 1, k_j: 1 });
        assert_eq!(measure_bandwidth(&TimeVertexSignal::zeros(4, 3), &j, BANDWIDTH_TOL).unwrap().k_j, 0);
    }

    #[test]
    fn localization_trivial_cases() {
        let f = factory(3, 3);
        let j = f.joint(0.2, 0.6).unwrap();
        let band = SpectralSupports::lowest(3, 3, 2, 2).unwrap();
        let p = joint_bandlimiting(&j, &band, MATERIALIZE_BUDGET).unwrap();
        let all = DiagonalProjector::from_indices(9, &(0..9).collect::<Vec<_>>()).unwrap();
        let r = check_perfect_localization(&all, &p.b).unwrap();
        assert!((r.lambda_max - 1.0).abs() < 1e-10 && r.localized);
        let none = DiagonalProjector::from_indices(9, &[]).unwrap();
        let r = check_perfect_localization(&none, &p.b).unwrap();
        assert!(r.lambda_max.abs() < 1e-12 && !r.localized);
    }
}
