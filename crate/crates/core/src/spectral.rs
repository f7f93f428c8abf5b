//! Discrete fractional Fourier transform, graph (fractional) Fourier
//! transforms and their joint time-vertex Kronecker product.

use alloc::vec::Vec;
use core::f64::consts::PI;
use num_traits::Zero;
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::linalg::{self, c, eigen_general, from_eigen, frobenius, hermitian_eigen, is_hermitian, C64, CMat, CVec, RMat};

/// Default limit on `NT` for materializing the joint `NT × NT` matrix.
pub const MATERIALIZE_BUDGET: usize = 4096;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum SignConvention {
    /// Phase `e^{+jπk̃α/2}`; order 1 is the unitary inverse DFT.
    InverseDftPlus,
    /// Phase `e^{-jπk̃α/2}`; order 1 is the unitary DFT.
    #[default]
    StandardMinus,
}

impl SignConvention {
    fn sign(self) -> f64 {
        match self {
            SignConvention::InverseDftPlus => 1.0,
            SignConvention::StandardMinus => -1.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Domain {
    Time,
    Vertex,
}

#[derive(Debug, Clone, PartialEq)]
pub struct FractionalTransform {
    pub order: f64,
    pub matrix: CMat,
    pub size: usize,
    pub domain: Domain,
}

/// DFT matrix with entry `(t,k) = exp(-j2πtk/T)`, optionally scaled by `1/√T`.
pub fn dft_matrix(t: usize, unitary: bool) -> CMat {
    let scale = if unitary && t > 0 { 1.0 / (t as f64).sqrt() } else { 1.0 };
    CMat::from_fn(t, t, |r, k| {
        // reduce the exponent first so large products stay exact
        let e = (r * k) % t;
        C64::from_polar(scale, -2.0 * PI * e as f64 / t as f64)
    })
}

/// The nearly tridiagonal matrix that commutes with the unitary DFT.
pub fn commuting_matrix(t: usize) -> RMat {
    let mut s = RMat::zeros(t, t);
    for n in 0..t {
        s[(n, n)] = 2.0 * (2.0 * PI * n as f64 / t as f64).cos() - 4.0;
        if n + 1 < t {
            s[(n, n + 1)] = 1.0;
            s[(n + 1, n)] = 1.0;
        }
    }
    if t > 1 {
        s[(0, t - 1)] += 1.0;
        s[(t - 1, 0)] += 1.0;
    }
    s
}

/// Eigenvalue index `k̃` of the `k`-th Hermite-Gaussian vector.
pub fn hermite_index(t: usize, k: usize) -> f64 {
    if k + 1 == t {
        if t.is_multiple_of(2) {
            t as f64
        } else {
            (t - 1) as f64
        }
    } else {
        k as f64
    }
}

fn sorted_block_eigenvectors(block: RMat) -> RMat {
    let n = block.nrows();
    if n == 0 {
        return block;
    }
    let eig = block.symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]).then(a.cmp(&b)));
    RMat::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])])
}

fn sign_changes(v: &[f64]) -> usize {
    let max = v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let nz: Vec<f64> = v.iter().copied().filter(|x| x.abs() > 1e-9 * max).collect();
    nz.windows(2).filter(|w| (w[0] < 0.0) != (w[1] < 0.0)).count()
}

/// Orthonormal DFT eigenvectors ordered like Hermite-Gaussian functions.
///
/// The commuting matrix is split into even and odd parts so that each
/// eigenvector has a definite parity; within each part eigenvectors are sorted
/// by decreasing eigenvalue, which orders them by increasing zero-crossing
/// count, and the two parts are interleaved (even at even positions).
pub fn hermite_dft_eigenbasis(t: usize) -> Result<RMat> {
    if t < 2 {
        return Err(Error::SizeTooSmall { needed: 2, found: t });
    }
    let r = t / 2;
    let even = t.is_multiple_of(2);
    let h = core::f64::consts::FRAC_1_SQRT_2;
    let mut p = RMat::zeros(t, t);
    p[(0, 0)] = 1.0;
    for i in 1..=(r - usize::from(even)) {
        p[(i, i)] = h;
        p[(i, t - i)] = h;
    }
    if even {
        p[(r, r)] = 1.0;
    }
    for i in (r + 1)..t {
        p[(i, i)] = -h;
        p[(i, t - i)] = h;
    }
    let cs = &p * commuting_matrix(t) * p.transpose();
    let ne = t / 2 + 1;
    let no = t - ne;
    let ve = sorted_block_eigenvectors(cs.view((0, 0), (ne, ne)).into_owned());
    let vo = sorted_block_eigenvectors(cs.view((ne, ne), (no, no)).into_owned());
    let pt = p.transpose();
    let even_vecs = pt.columns(0, ne) * ve;
    let odd_vecs = pt.columns(ne, no) * vo;

    let mut u = RMat::zeros(t, t);
    let (mut ei, mut oi) = (0, 0);
    for k in 0..t {
        let col = if (k % 2 == 0 && ei < ne) || oi >= no {
            ei += 1;
            even_vecs.column(ei - 1).into_owned()
        } else {
            oi += 1;
            odd_vecs.column(oi - 1).into_owned()
        };
        u.set_column(k, &col);
    }
    for k in 0..t {
        let mut col: Vec<f64> = u.column(k).iter().copied().collect();
        let max = col.iter().fold(0.0f64, |m, x| m.max(x.abs()));
        if let Some(first) = col.iter().copied().find(|x| x.abs() > 1e-10 * max) {
            if first < 0.0 {
                col.iter_mut().for_each(|x| *x = -*x);
                u.set_column(k, &nalgebra::DVector::from_vec(col));
            }
        }
    }

    let dft = dft_matrix(t, true);
    let uc = linalg::to_complex(&u);
    let mut worst = 0.0f64;
    for k in 0..t {
        let col = uc.column(k);
        let lam = C64::from_polar(1.0, -PI * hermite_index(t, k) / 2.0);
        let res = (&dft * col - col * lam).norm();
        worst = worst.max(res);
    }
    if !(worst < 1e-8) {
        return Err(Error::HermiteResidual(worst));
    }
    Ok(u)
}

/// Zero-crossing count of each column, used for diagnostics and tests.
pub fn zero_crossings(u: &RMat) -> Vec<usize> {
    (0..u.ncols()).map(|k| sign_changes(u.column(k).as_slice())).collect()
}

/// Cached Hermite basis that produces DFRFT matrices of any order.
#[derive(Debug, Clone, PartialEq)]
pub struct HermiteBasis {
    pub basis: RMat,
    pub index: Vec<f64>,
    pub convention: SignConvention,
}

impl HermiteBasis {
    pub fn new(t: usize, convention: SignConvention) -> Result<Self> {
        let basis = hermite_dft_eigenbasis(t)?;
        let index = (0..t).map(|k| hermite_index(t, k)).collect();
        Ok(HermiteBasis { basis, index, convention })
    }

    pub fn size(&self) -> usize {
        self.basis.nrows()
    }

    pub fn transform(&self, alpha: f64) -> FractionalTransform {
        let t = self.size();
        let s = self.convention.sign();
        let phases: Vec<C64> = self.index.iter().map(|&k| C64::from_polar(1.0, s * PI * k * alpha / 2.0)).collect();
        let u = &self.basis;
        let mut m = CMat::zeros(t, t);
        for j in 0..t {
            for i in 0..t {
                let mut acc = C64::zero();
                for k in 0..t {
                    acc += phases[k] * (u[(i, k)] * u[(j, k)]);
                }
                m[(i, j)] = acc;
            }
        }
        FractionalTransform { order: alpha, matrix: m, size: t, domain: Domain::Time }
    }
}

/// DFRFT matrix of order `alpha`.
pub fn dfrft_matrix(t: usize, alpha: f64, convention: SignConvention) -> Result<FractionalTransform> {
    Ok(HermiteBasis::new(t, convention)?.transform(alpha))
}

/// Eigendecomposition `M = QΛQ⁻¹` with its reconstruction residual.
#[derive(Debug, Clone, PartialEq)]
pub struct SpectralDecomp {
    pub basis: CMat,
    pub eigenvalues: Vec<C64>,
    pub basis_inverse: CMat,
    pub reconstruction_residual: f64,
}

fn fix_phases(q: &mut CMat, qi: &mut CMat) {
    let n = q.ncols();
    for k in 0..n {
        let max = q.column(k).iter().fold(0.0f64, |m, z| m.max(z.norm()));
        let first = q.column(k).iter().copied().find(|z| z.norm() > 1e-8 * max);
        if let Some(z) = first {
            let ph = z.conj() / z.norm();
            for i in 0..q.nrows() {
                q[(i, k)] *= ph;
            }
            let inv = ph.conj();
            for j in 0..qi.ncols() {
                qi[(k, j)] *= inv;
            }
        }
    }
}

/// Graph Fourier transform of a shift operator.
///
/// Returns the decomposition `S = UΔU⁻¹`, eigenvalues ascending by real part
/// then imaginary part, and the GFT matrix `U⁻¹`. Hermitian shifts use the
/// Hermitian eigensolver, so `U` is unitary.
pub fn gft_matrix(shift: &CMat) -> Result<(SpectralDecomp, CMat)> {
    let n = shift.nrows();
    if !shift.is_square() {
        return Err(Error::DimensionMismatch { expected: n, found: shift.ncols() });
    }
    let scale = frobenius(shift).max(f64::MIN_POSITIVE);
    let (values, mut u, mut ui) = if is_hermitian(shift, 1e-12) {
        let (vals, u) = hermitian_eigen(shift);
        let ui = u.adjoint();
        (vals.into_iter().map(|v| c(v, 0.0)).collect::<Vec<_>>(), u, ui)
    } else {
        let e = eigen_general(shift)?;
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| {
            let (x, y) = (e.values[a], e.values[b]);
            x.re.total_cmp(&y.re).then(x.im.total_cmp(&y.im)).then(a.cmp(&b))
        });
        let e = linalg::reorder(&e, &order);
        (e.values, e.vectors, e.vectors_inv)
    };
    fix_phases(&mut u, &mut ui);
    let residual = frobenius(&(from_eigen(&u, &values, &ui) - shift)) / scale;
    if !(residual < linalg::EIGEN_RESIDUAL_GATE) {
        return Err(Error::NotDiagonalizable { residual });
    }
    let gft = ui.clone();
    Ok((SpectralDecomp { basis: u, eigenvalues: values, basis_inverse: ui, reconstruction_residual: residual }, gft))
}

/// Eigendecomposition of the GFT matrix, reused for every fractional order.
#[derive(Debug, Clone, PartialEq)]
pub struct GfrftBasis {
    pub decomp: SpectralDecomp,
    /// Eigenvalues within 1e-12 of the negative real axis, where the principal
    /// power is discontinuous.
    pub branch_cut_eigenvalues: usize,
    pub unitary: bool,
}

impl GfrftBasis {
    /// Decompose `F_G = U⁻¹ = QΛQ⁻¹`; eigenpairs are ordered by principal
    /// argument, then modulus.
    pub fn new(gft: &SpectralDecomp) -> Result<Self> {
        let f = &gft.basis_inverse;
        let n = f.nrows();
        let e = eigen_general(f)?;
        let mut values = e.values.clone();
        let mut flagged = 0;
        for v in values.iter_mut() {
            if v.re < 0.0 && v.im.abs() <= 1e-12 {
                v.im = 0.0;
                flagged += 1;
            }
        }
        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| {
            let (x, y) = (values[a], values[b]);
            x.arg().total_cmp(&y.arg()).then(x.norm().total_cmp(&y.norm())).then(a.cmp(&b))
        });
        let mut e = linalg::reorder(&e, &order);
        e.values = order.iter().map(|&k| values[k]).collect();
        let unitary = e.unitary_basis && e.values.iter().all(|v| (v.norm() - 1.0).abs() < 1e-10);
        Ok(GfrftBasis {
            decomp: SpectralDecomp {
                basis: e.vectors,
                eigenvalues: e.values,
                basis_inverse: e.vectors_inv,
                reconstruction_residual: e.residual,
            },
            branch_cut_eigenvalues: flagged,
            unitary,
        })
    }

    pub fn size(&self) -> usize {
        self.decomp.eigenvalues.len()
    }

    pub fn transform(&self, beta: f64) -> Result<FractionalTransform> {
        let d = &self.decomp;
        let mut powers = Vec::with_capacity(d.eigenvalues.len());
        for &l in &d.eigenvalues {
            if l.norm() == 0.0 {
                if beta < 0.0 {
                    return Err(Error::ZeroEigenvalue(beta));
                }
                powers.push(if beta == 0.0 { c(1.0, 0.0) } else { C64::zero() });
            } else {
                powers.push((l.ln() * beta).exp());
            }
        }
        let matrix = from_eigen(&d.basis, &powers, &d.basis_inverse);
        Ok(FractionalTransform { order: beta, size: matrix.nrows(), matrix, domain: Domain::Vertex })
    }
}

/// GFRFT matrix of order `beta` for a GFT decomposition.
pub fn gfrft_matrix(gft: &SpectralDecomp, beta: f64) -> Result<FractionalTransform> {
    GfrftBasis::new(gft)?.transform(beta)
}

/// N×T time-vertex signal stored as a column-major matrix, so the underlying
/// slice is the column-stacked vector `vec(X)`.
#[derive(Debug, Clone, PartialEq)]
pub struct TimeVertexSignal {
    pub data: CMat,
}

impl TimeVertexSignal {
    pub fn new(data: CMat) -> Self {
        TimeVertexSignal { data }
    }

    pub fn zeros(n: usize, t: usize) -> Self {
        TimeVertexSignal { data: CMat::zeros(n, t) }
    }

    pub fn from_vec(n: usize, t: usize, v: &[C64]) -> Result<Self> {
        if v.len() != n * t {
            return Err(Error::DimensionMismatch { expected: n * t, found: v.len() });
        }
        Ok(TimeVertexSignal { data: CMat::from_column_slice(n, t, v) })
    }

    pub fn n_vertices(&self) -> usize {
        self.data.nrows()
    }

    pub fn n_times(&self) -> usize {
        self.data.ncols()
    }

    /// `vec(X)` with `vec[t·N + v] = X[v][t]`.
    pub fn vec(&self) -> &[C64] {
        self.data.as_slice()
    }

    pub fn to_cvec(&self) -> CVec {
        CVec::from_column_slice(self.vec())
    }

    pub fn energy(&self) -> f64 {
        linalg::norm_sqr(self.vec())
    }
}

/// Joint transform `J = F^α ⊗ F^β` held in factored form together with the
/// factors of its inverse `J^{-α,-β}`.
#[derive(Debug, Clone, PartialEq)]
pub struct JointTransform {
    pub alpha: f64,
    pub beta: f64,
    pub n_vertices: usize,
    pub n_times: usize,
    pub time_factor: FractionalTransform,
    pub vertex_factor: FractionalTransform,
    pub time_inverse: FractionalTransform,
    pub vertex_inverse: FractionalTransform,
    /// Both factors are unitary within 1e-9.
    pub unitary: bool,
}

fn is_unitary(m: &CMat) -> bool {
    linalg::distance_to_identity(&(m * m.adjoint())) < 1e-9
}

impl JointTransform {
    pub fn new(time: &HermiteBasis, vertex: &GfrftBasis, alpha: f64, beta: f64) -> Result<Self> {
        let time_factor = time.transform(alpha);
        let time_inverse = time.transform(-alpha);
        let vertex_factor = vertex.transform(beta)?;
        let vertex_inverse = vertex.transform(-beta)?;
        let unitary = is_unitary(&time_factor.matrix) && is_unitary(&vertex_factor.matrix);
        Ok(JointTransform {
            alpha,
            beta,
            n_vertices: vertex.size(),
            n_times: time.size(),
            time_factor,
            vertex_factor,
            time_inverse,
            vertex_inverse,
            unitary,
        })
    }

    pub fn size(&self) -> usize {
        self.n_vertices * self.n_times
    }

    /// The inverse transform `J^{-α,-β}` as its own joint transform.
    pub fn inverse(&self) -> JointTransform {
        JointTransform {
            alpha: -self.alpha,
            beta: -self.beta,
            n_vertices: self.n_vertices,
            n_times: self.n_times,
            time_factor: self.time_inverse.clone(),
            vertex_factor: self.vertex_inverse.clone(),
            time_inverse: self.time_factor.clone(),
            vertex_inverse: self.vertex_factor.clone(),
            unitary: self.unitary,
        }
    }

    fn check_budget(&self, budget: usize) -> Result<()> {
        if self.size() > budget {
            return Err(Error::BudgetExceeded { size: self.size(), budget });
        }
        Ok(())
    }

    /// Dense `NT × NT` matrix `F^α ⊗ F^β`.
    pub fn matrix(&self, budget: usize) -> Result<CMat> {
        self.check_budget(budget)?;
        Ok(self.time_factor.matrix.kronecker(&self.vertex_factor.matrix))
    }

    /// Dense inverse `F^{-α} ⊗ F^{-β}`.
    pub fn inverse_matrix(&self, budget: usize) -> Result<CMat> {
        self.check_budget(budget)?;
        Ok(self.time_inverse.matrix.kronecker(&self.vertex_inverse.matrix))
    }

    /// Entry `J[row, col]` from the factors.
    pub fn entry(&self, row: usize, col: usize) -> C64 {
        let n = self.n_vertices;
        self.time_factor.matrix[(row / n, col / n)] * self.vertex_factor.matrix[(row % n, col % n)]
    }

    /// Entry `J^{-α,-β}[row, col]` from the factors.
    pub fn inverse_entry(&self, row: usize, col: usize) -> C64 {
        let n = self.n_vertices;
        self.time_inverse.matrix[(row / n, col / n)] * self.vertex_inverse.matrix[(row % n, col % n)]
    }

    /// Columns of `J^{-α,-β}` listed in `cols` (an `NT × |cols|` matrix).
    pub fn inverse_columns(&self, cols: &[usize]) -> CMat {
        CMat::from_fn(self.size(), cols.len(), |i, j| self.inverse_entry(i, cols[j]))
    }

    /// Rows of `J` listed in `rows` (a `|rows| × NT` matrix).
    pub fn rows(&self, rows: &[usize]) -> CMat {
        CMat::from_fn(rows.len(), self.size(), |i, j| self.entry(rows[i], j))
    }

    fn check_signal(&self, x: &TimeVertexSignal) -> Result<()> {
        if x.n_vertices() != self.n_vertices {
            return Err(Error::DimensionMismatch { expected: self.n_vertices, found: x.n_vertices() });
        }
        if x.n_times() != self.n_times {
            return Err(Error::DimensionMismatch { expected: self.n_times, found: x.n_times() });
        }
        Ok(())
    }

    /// Forward transform in matrix form `X̂ = F^β X (F^α)ᵀ`.
    pub fn apply(&self, x: &TimeVertexSignal) -> Result<TimeVertexSignal> {
        self.check_signal(x)?;
        Ok(TimeVertexSignal::new(&self.vertex_factor.matrix * &x.data * self.time_factor.matrix.transpose()))
    }

    /// Inverse transform `X = F^{-β} X̂ (F^{-α})ᵀ`.
    pub fn apply_inverse(&self, xh: &TimeVertexSignal) -> Result<TimeVertexSignal> {
        self.check_signal(xh)?;
        Ok(TimeVertexSignal::new(&self.vertex_inverse.matrix * &xh.data * self.time_inverse.matrix.transpose()))
    }
}

/// Joint transform of a signal in matrix form.
pub fn jfrft(x: &TimeVertexSignal, j: &JointTransform) -> Result<TimeVertexSignal> {
    j.apply(x)
}

/// Joint transform in vectorized form `(F^α ⊗ F^β) vec(x)`.
pub fn jfrft_vec(x: &TimeVertexSignal, j: &JointTransform, budget: usize) -> Result<CVec> {
    j.check_signal(x)?;
    Ok(j.matrix(budget)? * x.to_cvec())
}

/// Builder for joint transforms at many orders over fixed time and vertex
/// decompositions.
#[derive(Debug, Clone, PartialEq)]
pub struct TransformFactory {
    pub time: HermiteBasis,
    pub vertex: GfrftBasis,
    pub gft: SpectralDecomp,
}

impl TransformFactory {
    pub fn new(n_times: usize, vertex_shift: &CMat, convention: SignConvention) -> Result<Self> {
        let time = HermiteBasis::new(n_times, convention)?;
        let (gft, _) = gft_matrix(vertex_shift)?;
        let vertex = GfrftBasis::new(&gft)?;
        Ok(TransformFactory { time, vertex, gft })
    }

    pub fn joint(&self, alpha: f64, beta: f64) -> Result<JointTransform> {
        JointTransform::new(&self.time, &self.vertex, alpha, beta)
    }
}
