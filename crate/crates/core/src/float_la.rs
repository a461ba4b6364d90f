//! Floating-point kernels backed by the LAPACK SVD.

use ndarray::{s, Array2, ArrayView2};
use ndarray_linalg::SVD;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::matcore::{inverse, Tolerance};
use crate::matrix::Matrix;

type C = Complex64;

fn to_nd(a: &Matrix<C>) -> Array2<C> {
    Array2::from_shape_vec((a.rows(), a.cols()), a.data().to_vec()).expect("shape matches data")
}

fn from_nd(a: ArrayView2<C>) -> Matrix<C> {
    Matrix::from_fn(a.nrows(), a.ncols(), |i, j| a[[i, j]])
}

/// Thin SVD with singular values sorted in decreasing order.
pub(crate) struct Svd {
    pub u: Matrix<C>,
    pub sigma: Vec<f64>,
    pub v_t: Matrix<C>,
}

pub(crate) fn svd(a: &Matrix<C>) -> Svd {
    let (m, n) = a.shape();
    let k = m.min(n);
    if k == 0 {
        return Svd {
            u: Matrix::zeros(m, 0),
            sigma: Vec::new(),
            v_t: Matrix::zeros(0, n),
        };
    }
    let (u, sigma, v_t) = to_nd(a).svd(true, true).expect("LAPACK SVD converges");
    let u = from_nd(u.as_ref().expect("u requested").slice(s![.., ..k]));
    let v_t = from_nd(v_t.as_ref().expect("v_t requested").slice(s![..k, ..]));
    let mut order: Vec<usize> = (0..k).collect();
    order.sort_by(|&i, &j| sigma[j].total_cmp(&sigma[i]));
    Svd {
        u: u.select_cols(&order),
        sigma: order.iter().map(|&i| sigma[i]).collect(),
        v_t: v_t.select_rows(&order),
    }
}

fn count_above(sigma: &[f64], rel: f64, floor: f64) -> usize {
    let top = sigma.first().copied().unwrap_or(0.0).max(floor);
    if top == 0.0 {
        return 0;
    }
    sigma.iter().take_while(|&&s| s > rel * top).count()
}

pub(crate) fn rank_rel(a: &Matrix<C>, rel: f64, floor: f64) -> usize {
    count_above(&svd(a).sigma, rel, floor)
}

/// `F = U_r Σ_r`, `G = V_r*`.
pub(crate) fn full_rank_factors(a: &Matrix<C>, tol: &Tolerance) -> (Matrix<C>, Matrix<C>) {
    let s = svd(a);
    let r = count_above(&s.sigma, tol.structural, 0.0);
    let cols: Vec<usize> = (0..r).collect();
    let f = Matrix::from_fn(a.rows(), r, |i, j| s.u[(i, j)] * s.sigma[j]);
    (f, s.v_t.select_rows(&cols))
}

/// `V_r Σ_r⁻¹ U_r*`
pub(crate) fn pinv(a: &Matrix<C>, floor: f64, tol: &Tolerance) -> Matrix<C> {
    let s = svd(a);
    let r = count_above(&s.sigma, tol.structural, floor);
    let ur = Matrix::from_fn(a.rows(), r, |i, j| s.u[(i, j)] / s.sigma[j]);
    &s.v_t.select_rows(&(0..r).collect::<Vec<_>>()).adjoint() * &ur.adjoint()
}

/// Inverse of `a` restricted to `R(A^k)`, with `k ≥ ind(a)`: along `N(A^k)`
/// (Drazin) or along `N((A^k)*)` (core-EP). With `A^k = UΣV*` and
/// `B = U_r`, `C = V_r` this is `B(C*AB)⁻¹C*` or `B(B*AB)⁻¹B*`.
pub(crate) fn spectral_inverse(a: &Matrix<C>, k: usize, core_ep: bool, scale: f64, tol: &Tolerance) -> Result<Matrix<C>> {
    let n = a.rows();
    let floor = a.frobenius().max(scale).powi(k as i32);
    let s = svd(&a.pow(k));
    let r = count_above(&s.sigma, tol.structural, floor);
    if r == 0 {
        return Ok(Matrix::zeros(n, n));
    }
    let idx: Vec<usize> = (0..r).collect();
    let b = s.u.select_cols(&idx);
    let c = if core_ep { b.clone() } else { s.v_t.select_rows(&idx).adjoint() };
    let mid = &(&c.adjoint() * a) * &b;
    let inv = inverse(&mid, tol).map_err(|_| Error::Singular("spectral_inverse"))?;
    Ok(&(&b * &inv) * &c.adjoint())
}

/// Orthonormal basis of the range of `a`, with rank judged against
/// `max(σ_max, floor)`.
pub(crate) fn range_basis(a: &Matrix<C>, floor: f64, tol: &Tolerance) -> Matrix<C> {
    let s = svd(a);
    let r = count_above(&s.sigma, tol.structural, floor);
    s.u.select_cols(&(0..r).collect::<Vec<_>>())
}

/// Orthonormal basis of the orthogonal complement of the columns of `q`,
/// which must themselves be orthonormal.
pub(crate) fn complement_basis(q: &Matrix<C>) -> Matrix<C> {
    let m = q.rows();
    let r = q.cols();
    if r == m {
        return Matrix::zeros(m, 0);
    }
    let proj = Matrix::<C>::identity(m) - q * q.adjoint();
    let s = svd(&proj);
    s.u.select_cols(&(0..m - r).collect::<Vec<_>>())
}
