//! Dense complex linear algebra helpers shared by the spectral, selection and
//! reconstruction modules.

use alloc::vec::Vec;
use nalgebra::{DMatrix, DVector};
use num_complex::Complex64;
use num_traits::Zero;
// Float supplies float methods under no_std; when std is linked its inherent
// methods shadow the trait.
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};

pub type C64 = Complex64;
pub type CMat = DMatrix<C64>;
pub type CVec = DVector<C64>;
pub type RMat = DMatrix<f64>;

/// Relative singular-value cutoff used by every pseudo-inverse.
pub const PINV_CUTOFF: f64 = 1e-10;

pub fn c(re: f64, im: f64) -> C64 {
    C64::new(re, im)
}

pub fn to_complex(m: &RMat) -> CMat {
    m.map(|x| C64::new(x, 0.0))
}

pub fn identity(n: usize) -> CMat {
    CMat::identity(n, n)
}

pub fn frobenius(m: &CMat) -> f64 {
    m.norm()
}

/// `‖m − I‖_F`.
pub fn distance_to_identity(m: &CMat) -> f64 {
    let mut acc = 0.0;
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            let d = if i == j { m[(i, j)] - C64::new(1.0, 0.0) } else { m[(i, j)] };
            acc += d.norm_sqr();
        }
    }
    acc.sqrt()
}

/// `‖m − mᴴ‖_F`.
pub fn hermitian_defect(m: &CMat) -> f64 {
    let mut acc = 0.0;
    for j in 0..m.ncols() {
        for i in 0..m.nrows() {
            acc += (m[(i, j)] - m[(j, i)].conj()).norm_sqr();
        }
    }
    acc.sqrt()
}

pub fn is_hermitian(m: &CMat, rel_tol: f64) -> bool {
    m.is_square() && hermitian_defect(m) <= rel_tol * frobenius(m).max(1.0)
}

/// `(m + mᴴ) / 2`.
pub fn hermitian_part(m: &CMat) -> CMat {
    let n = m.nrows();
    CMat::from_fn(n, n, |i, j| (m[(i, j)] + m[(j, i)].conj()) * 0.5)
}

/// Eigenvalues and orthonormal eigenvectors of a Hermitian matrix, ascending.
pub fn hermitian_eigen(m: &CMat) -> (Vec<f64>, CMat) {
    let n = m.nrows();
    if n == 0 {
        return (Vec::new(), CMat::zeros(0, 0));
    }
    let eig = hermitian_part(m).symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]).then(a.cmp(&b)));
    let values = order.iter().map(|&k| eig.eigenvalues[k]).collect();
    let vectors = CMat::from_fn(n, n, |i, j| eig.eigenvectors[(i, order[j])]);
    (values, vectors)
}

/// Eigenvalues of a Hermitian matrix, ascending.
pub fn hermitian_eigenvalues(m: &CMat) -> Vec<f64> {
    if m.nrows() == 0 {
        return Vec::new();
    }
    let mut v: Vec<f64> = hermitian_part(m).symmetric_eigenvalues().iter().copied().collect();
    v.sort_by(f64::total_cmp);
    v
}

/// Thin singular value decomposition `m = U diag(s) Vᴴ` with `s` descending.
#[derive(Debug, Clone, PartialEq)]
pub struct Svd {
    pub u: CMat,
    pub singular_values: Vec<f64>,
    pub v: CMat,
}

const JACOBI_MAX_SWEEPS: usize = 80;

/// One-sided (Hestenes) Jacobi SVD. Columns are rotated pairwise until they
/// are mutually orthogonal; their norms are then the singular values. Wide
/// inputs are handled through the adjoint.
///
/// nalgebra's bidiagonal complex SVD can return inaccurate singular vectors
/// for clustered singular values, which Jacobi does not.
pub fn svd(m: &CMat) -> Svd {
    let (rows, cols) = m.shape();
    if rows < cols {
        let t = svd(&m.adjoint());
        return Svd { u: t.v, singular_values: t.singular_values, v: t.u };
    }
    let mut a = m.clone();
    let mut v = CMat::identity(cols, cols);
    for _ in 0..JACOBI_MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..cols {
            for q in (p + 1)..cols {
                let (mut alpha, mut beta, mut gamma) = (0.0, 0.0, C64::zero());
                for i in 0..rows {
                    let (x, y) = (a[(i, p)], a[(i, q)]);
                    alpha += x.norm_sqr();
                    beta += y.norm_sqr();
                    gamma += x.conj() * y;
                }
                let g = gamma.norm();
                if g == 0.0 || g <= f64::EPSILON * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                // Removing the phase of `gamma` from column q leaves a real rotation.
                let phase = (gamma / g).conj();
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for mat in [&mut a, &mut v] {
                    for i in 0..mat.nrows() {
                        let x = mat[(i, p)];
                        let y = mat[(i, q)] * phase;
                        mat[(i, p)] = x * c - y * s;
                        mat[(i, q)] = x * s + y * c;
                    }
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let norms: Vec<f64> = (0..cols).map(|j| a.column(j).norm()).collect();
    let mut order: Vec<usize> = (0..cols).collect();
    order.sort_by(|&x, &y| norms[y].total_cmp(&norms[x]));
    let mut u = CMat::zeros(rows, cols);
    let mut vs = CMat::zeros(cols, cols);
    let mut singular_values = Vec::with_capacity(cols);
    for (k, &j) in order.iter().enumerate() {
        let s = norms[j];
        if s > 0.0 {
            u.set_column(k, &(a.column(j) / C64::new(s, 0.0)));
        }
        vs.set_column(k, &v.column(j));
        singular_values.push(s);
    }
    Svd { u, singular_values, v: vs }
}

/// Singular values, descending.
pub fn singular_values(m: &CMat) -> Vec<f64> {
    if m.nrows() == 0 || m.ncols() == 0 {
        return Vec::new();
    }
    svd(m).singular_values
}

pub fn spectral_norm(m: &CMat) -> f64 {
    singular_values(m).first().copied().unwrap_or(0.0)
}

/// Moore-Penrose pseudo-inverse with singular values below
/// `PINV_CUTOFF · σ_max` treated as zero.
pub fn pinv(m: &CMat) -> CMat {
    let (r, cdim) = m.shape();
    if r == 0 || cdim == 0 {
        return CMat::zeros(cdim, r);
    }
    let d = svd(m);
    let cut = PINV_CUTOFF * d.singular_values[0];
    let mut out = CMat::zeros(cdim, r);
    for (k, &s) in d.singular_values.iter().enumerate() {
        if s <= cut || s == 0.0 {
            continue;
        }
        out += d.v.column(k) * (d.u.column(k).adjoint() / C64::new(s, 0.0));
    }
    out
}

/// Rows of `m` listed in `rows`, in order.
pub fn select_rows(m: &CMat, rows: &[usize]) -> CMat {
    CMat::from_fn(rows.len(), m.ncols(), |i, j| m[(rows[i], j)])
}

/// Columns of `m` listed in `cols`, in order.
pub fn select_cols(m: &CMat, cols: &[usize]) -> CMat {
    CMat::from_fn(m.nrows(), cols.len(), |i, j| m[(i, cols[j])])
}

/// Principal submatrix `m[idx, idx]`.
pub fn principal(m: &CMat, idx: &[usize]) -> CMat {
    CMat::from_fn(idx.len(), idx.len(), |i, j| m[(idx[i], idx[j])])
}

pub fn kron(a: &CMat, b: &CMat) -> CMat {
    a.kronecker(b)
}

/// Eigendecomposition `m = Q Λ Q⁻¹` of a diagonalizable complex matrix.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    pub values: Vec<C64>,
    pub vectors: CMat,
    pub vectors_inv: CMat,
    /// `‖QΛQ⁻¹ − M‖_F / ‖M‖_F`.
    pub residual: f64,
    /// True when the Schur form was diagonal and `Q` is unitary.
    pub unitary_basis: bool,
}

/// Gate applied to every general eigendecomposition.
pub const EIGEN_RESIDUAL_GATE: f64 = 1e-8;

/// General eigendecomposition through the complex Schur form.
///
/// For normal matrices the Schur vectors are returned directly, so the basis is
/// unitary. Otherwise eigenvectors of the triangular factor are obtained by
/// back-substitution and the basis is inverted by LU.
pub fn eigen_general(m: &CMat) -> Result<EigenDecomposition> {
    let n = m.nrows();
    if !m.is_square() {
        return Err(Error::DimensionMismatch { expected: n, found: m.ncols() });
    }
    if n == 0 {
        return Ok(EigenDecomposition {
            values: Vec::new(),
            vectors: CMat::zeros(0, 0),
            vectors_inv: CMat::zeros(0, 0),
            residual: 0.0,
            unitary_basis: true,
        });
    }
    let scale = frobenius(m).max(f64::MIN_POSITIVE);
    let (z, t) = m.clone().schur().unpack();
    let values: Vec<C64> = (0..n).map(|i| t[(i, i)]).collect();
    let mut off = 0.0;
    for j in 0..n {
        for i in 0..j {
            off += t[(i, j)].norm_sqr();
        }
    }
    let (vectors, vectors_inv, unitary_basis) = if off.sqrt() <= 1e-12 * scale {
        let zi = z.adjoint();
        (z, zi, true)
    } else {
        let mut y = CMat::zeros(n, n);
        let small = f64::EPSILON * scale;
        for k in 0..n {
            let lk = t[(k, k)];
            y[(k, k)] = C64::new(1.0, 0.0);
            for i in (0..k).rev() {
                let mut acc = C64::zero();
                for j in (i + 1)..=k {
                    acc += t[(i, j)] * y[(j, k)];
                }
                let mut den = t[(i, i)] - lk;
                if den.norm() < small {
                    den = C64::new(small, 0.0);
                }
                y[(i, k)] = -acc / den;
            }
            let nrm = y.column(k).norm();
            if nrm > 0.0 {
                let inv = 1.0 / nrm;
                for i in 0..=k {
                    y[(i, k)] *= inv;
                }
            }
        }
        let q = &z * y;
        let qi = q.clone().lu().try_inverse().ok_or(Error::NotDiagonalizable { residual: f64::INFINITY })?;
        (q, qi, false)
    };
    let mut recon = vectors.clone();
    for j in 0..n {
        let l = values[j];
        for i in 0..n {
            recon[(i, j)] *= l;
        }
    }
    let recon = recon * &vectors_inv;
    let residual = frobenius(&(recon - m)) / scale;
    let inv_defect = distance_to_identity(&(&vectors * &vectors_inv));
    if !(residual < EIGEN_RESIDUAL_GATE) || !(inv_defect < EIGEN_RESIDUAL_GATE) {
        return Err(Error::NotDiagonalizable { residual: residual.max(inv_defect) });
    }
    Ok(EigenDecomposition { values, vectors, vectors_inv, residual, unitary_basis })
}

/// Permute an eigendecomposition so eigenpairs follow `order`.
pub fn reorder(decomp: &EigenDecomposition, order: &[usize]) -> EigenDecomposition {
    let n = order.len();
    EigenDecomposition {
        values: order.iter().map(|&k| decomp.values[k]).collect(),
        vectors: CMat::from_fn(n, n, |i, j| decomp.vectors[(i, order[j])]),
        vectors_inv: CMat::from_fn(n, n, |i, j| decomp.vectors_inv[(order[i], j)]),
        residual: decomp.residual,
        unitary_basis: decomp.unitary_basis,
    }
}

/// `Q diag(d) Q⁻¹`.
pub fn from_eigen(q: &CMat, d: &[C64], qi: &CMat) -> CMat {
    let mut scaled = q.clone();
    for j in 0..d.len() {
        let l = d[j];
        for i in 0..q.nrows() {
            scaled[(i, j)] *= l;
        }
    }
    scaled * qi
}

/// `Σ |x_i|²`.
pub fn norm_sqr(x: &[C64]) -> f64 {
    x.iter().map(|z| z.norm_sqr()).sum()
}

/// Largest entry magnitude.
pub fn max_abs(x: impl IntoIterator<Item = C64>) -> f64 {
    x.into_iter().map(|z| z.norm()).fold(0.0, f64::max)
}
