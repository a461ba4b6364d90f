//! Moore-Penrose, weighted Moore-Penrose, group, Drazin, core, dual core and
//! core-EP inverses. All of them are assembled from full-rank factorizations.

use crate::axioms::{require, Env, Label};
use crate::error::{Error, Result};
use crate::matcore::{index, index_scaled, inverse, mat_eq, MetricMatrix, Tolerance};
use crate::matrix::Matrix;
use crate::float_la;
use crate::scalar::{Backend, Scalar};

fn square(op: &'static str, a: &Matrix<impl Scalar>) -> Result<()> {
    if a.is_square() {
        Ok(())
    } else {
        Err(Error::NotSquare {
            op,
            rows: a.rows(),
            cols: a.cols(),
        })
    }
}

/// `A† = G*(GG*)⁻¹(F*F)⁻¹F*` for `A = FG`.
/// The float backend uses the thin SVD directly.
pub fn moore_penrose<T: Scalar>(a: &Matrix<T>, tol: &Tolerance) -> Matrix<T> {
    moore_penrose_scaled(a, 0.0, tol)
}

/// [`moore_penrose`] with float rank judged against `max(σ_max, scale)`.
pub(crate) fn moore_penrose_scaled<T: Scalar>(a: &Matrix<T>, scale: f64, tol: &Tolerance) -> Matrix<T> {
    if T::BACKEND == Backend::Float {
        return float_la::pinv(&a.to_float(), scale, tol).map(|z| T::from_c64(*z));
    }
    let (f, g) = T::full_rank_factors(a, tol);
    if f.cols() == 0 {
        return Matrix::zeros(a.cols(), a.rows());
    }
    let fh = f.adjoint();
    let gh = g.adjoint();
    let ggh = inverse(&(&g * &gh), tol).expect("G has full row rank");
    let fhf = inverse(&(&fh * &f), tol).expect("F has full column rank");
    &(&(&gh * &ggh) * &fhf) * &fh
}

/// `A†_{M,N} = N⁻¹G*(GN⁻¹G*)⁻¹(F*MF)⁻¹F*M` for `A = FG`, verified against
/// its four defining equations before it is returned.
pub fn weighted_mp<T: Scalar>(
    a: &Matrix<T>,
    m: &MetricMatrix<T>,
    n: &MetricMatrix<T>,
    tol: &Tolerance,
) -> Result<Matrix<T>> {
    if m.dim() != a.rows() || n.dim() != a.cols() {
        return Err(Error::shape(
            "weighted_mp",
            format!("A is {:?}, M is {}, N is {}", a.shape(), m.dim(), n.dim()),
        ));
    }
    let (f, g) = T::full_rank_factors(a, tol);
    if f.cols() == 0 {
        return Ok(Matrix::zeros(a.cols(), a.rows()));
    }
    let ninv = n.inverse();
    let fh = f.adjoint();
    let gh = g.adjoint();
    let no_solution = |_| Error::nonexistent("weighted Moore-Penrose inverse", "metric restricted to a range is singular");
    let left = inverse(&(&(&g * ninv) * &gh), tol).map_err(no_solution)?;
    let right = inverse(&(&(&fh * m.matrix()) * &f), tol).map_err(no_solution)?;
    let x = &(&(&(&(ninv * &gh) * &left) * &right) * &fh) * m.matrix();
    let env = Env::plain(*tol).with_m(m).with_n(n);
    require(
        "weighted Moore-Penrose inverse",
        &[Label::E1, Label::E2, Label::E3M, Label::E4N],
        a,
        &x,
        &env,
    )?;
    Ok(x)
}

/// `A# = F(GF)⁻²G` (exact) or the float spectral form; exists iff `ind(A) ≤ 1`.
pub fn group_inverse<T: Scalar>(a: &Matrix<T>, tol: &Tolerance) -> Result<Matrix<T>> {
    let k = index(a, tol)?;
    if k > 1 {
        return Err(Error::nonexistent("group inverse", format!("index is {k}")));
    }
    if T::BACKEND == Backend::Float {
        return float_spectral(a, k, false, 0.0, tol);
    }
    let (f, g) = T::full_rank_factors(a, tol);
    if f.cols() == 0 {
        return Ok(Matrix::zeros(a.rows(), a.cols()));
    }
    let gf_inv = inverse(&(&g * &f), tol).map_err(|_| Error::nonexistent("group inverse", "GF is singular"))?;
    Ok(&(&(&f * &gf_inv) * &gf_inv) * &g)
}

/// `A# = AX²` given `A = A²X` and `A = YA²`; also checks `AX² = YAX = Y²A`.
pub fn group_from_factors<T: Scalar>(
    a: &Matrix<T>,
    x: &Matrix<T>,
    y: &Matrix<T>,
    tol: &Tolerance,
) -> Result<Matrix<T>> {
    square("group_from_factors", a)?;
    if x.shape() != a.shape() || y.shape() != a.shape() {
        return Err(Error::shape("group_from_factors", "X and Y must match A"));
    }
    let a2 = a * a;
    if !mat_eq(&(&a2 * x), a, tol) {
        return Err(Error::precondition("group_from_factors", "A ≠ A²X"));
    }
    if !mat_eq(&(y * &a2), a, tol) {
        return Err(Error::precondition("group_from_factors", "A ≠ YA²"));
    }
    let g1 = &(a * x) * x;
    let g2 = &(y * a) * x;
    let g3 = &(y * y) * a;
    if !mat_eq(&g1, &g2, tol) || !mat_eq(&g1, &g3, tol) {
        return Err(Error::verification("group_from_factors", "AX², YAX and Y²A differ"));
    }
    Ok(g1)
}

/// Drazin inverse. Exact backend: iterated full-rank factorization: `A = B₁C₁`,
/// `CᵢBᵢ = Bᵢ₊₁Cᵢ₊₁` until `CₖBₖ` is invertible or zero, then
/// `A^D = B₁⋯Bₖ(CₖBₖ)^{-(k+1)}Cₖ⋯C₁`. Float backend: `B(C*AB)⁻¹C*` from
/// the singular bases of `A^k`.
pub fn drazin<T: Scalar>(a: &Matrix<T>, tol: &Tolerance) -> Result<Matrix<T>> {
    drazin_scaled(a, 0.0, tol)
}

/// [`drazin`] with float ranks judged against `scale^p` at the p-th power.
pub(crate) fn drazin_scaled<T: Scalar>(a: &Matrix<T>, scale: f64, tol: &Tolerance) -> Result<Matrix<T>> {
    square("drazin", a)?;
    if T::BACKEND == Backend::Float {
        return float_spectral(a, index_scaled(a, scale, tol)?, false, scale, tol);
    }
    let n = a.rows();
    let (b1, c1) = T::full_rank_factors(a, tol);
    if b1.cols() == 0 {
        return Ok(Matrix::zeros(n, n));
    }
    let mut bs = vec![b1];
    let mut cs = vec![c1];
    loop {
        let cb = cs.last().unwrap() * bs.last().unwrap();
        let r = cb.rows();
        let (b, c) = T::full_rank_factors(&cb, tol);
        if b.cols() == 0 {
            return Ok(Matrix::zeros(n, n));
        }
        if b.cols() == r {
            let inv = inverse(&cb, tol).map_err(|_| Error::Singular("drazin"))?;
            let k = bs.len();
            let mut left = Matrix::identity(n);
            for bi in &bs {
                left = &left * bi;
            }
            let mut right = Matrix::identity(n);
            for ci in &cs {
                right = ci * &right;
            }
            return Ok(&(&left * &inv.pow(k + 1)) * &right);
        }
        bs.push(b);
        cs.push(c);
    }
}

/// `A^# A A†`; requires `ind(A) ≤ 1`.
pub fn core<T: Scalar>(a: &Matrix<T>, tol: &Tolerance) -> Result<Matrix<T>> {
    let g = group_inverse(a, tol).map_err(|e| relabel(e, "core inverse"))?;
    Ok(&(&g * a) * &moore_penrose(a, tol))
}

/// `A† A A^#`; requires `ind(A) ≤ 1`.
pub fn dual_core<T: Scalar>(a: &Matrix<T>, tol: &Tolerance) -> Result<Matrix<T>> {
    let g = group_inverse(a, tol).map_err(|e| relabel(e, "dual core inverse"))?;
    Ok(&(&moore_penrose(a, tol) * a) * &g)
}

/// `A^D A^k (A^k)†` with `k = ind(A)`.
pub fn core_ep<T: Scalar>(a: &Matrix<T>, tol: &Tolerance) -> Result<Matrix<T>> {
    core_ep_scaled(a, 0.0, tol)
}

/// [`core_ep`] with float ranks judged against `scale^p` at the p-th power.
pub(crate) fn core_ep_scaled<T: Scalar>(a: &Matrix<T>, scale: f64, tol: &Tolerance) -> Result<Matrix<T>> {
    let k = index_scaled(a, scale, tol)?;
    if T::BACKEND == Backend::Float {
        return float_spectral(a, k, true, scale, tol);
    }
    let ak = a.pow(k);
    Ok(&(&drazin(a, tol)? * &ak) * &moore_penrose(&ak, tol))
}

fn float_spectral<T: Scalar>(a: &Matrix<T>, k: usize, core_ep: bool, scale: f64, tol: &Tolerance) -> Result<Matrix<T>> {
    Ok(float_la::spectral_inverse(&a.to_float(), k, core_ep, scale, tol)?.map(|z| T::from_c64(*z)))
}

fn relabel(e: Error, what: &'static str) -> Error {
    match e {
        Error::NonExistent { reason, .. } => Error::NonExistent { what, reason },
        other => other,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::axioms::{check_all, classify};
    use crate::scalar::Q;
    use num_complex::Complex64;

    fn t() -> Tolerance {
        Tolerance::default()
    }

    fn q(rows: &[&[&str]]) -> Matrix<Q> {
        Matrix::parse_rows(rows).unwrap()
    }

    #[test]
    fn moore_penrose_examples() {
        let a = q(&[&["1", "i"], &["0", "0"], &["0", "0"]]);
        let expected = q(&[&["1/2", "0", "0"], &["-1/2i", "0", "0"]]);
        assert_eq!(moore_penrose(&a, &t()), expected);
        assert_eq!(moore_penrose(&Matrix::<Q>::identity(3), &t()), Matrix::identity(3));
        assert_eq!(moore_penrose(&Matrix::<Q>::zeros(2, 3), &t()), Matrix::zeros(3, 2));

        let af = a.to_float();
        let xf = moore_penrose(&af, &t());
        assert!(mat_eq(&xf, &expected.to_float(), &t()));
    }

    #[test]
    fn moore_penrose_satisfies_penrose_equations() {
        let a = q(&[&["1", "2", "0", "0", "-1"], &["-1", "0", "1", "0", "1"], &["0", "2", "0", "-1", "0"]]);
        let x = moore_penrose(&a, &t());
        let env = Env::plain(t());
        let labels = [Label::E1, Label::E2, Label::E3, Label::E4];
        assert!(check_all(&labels, &a, &x, &env).unwrap().overall);
        let xf = moore_penrose(&a.to_float(), &t());
        assert!(mat_eq(&xf, &x.to_float(), &t()));
    }

    #[test]
    fn weighted_mp_examples() {
        let a = q(&[&["1", "i"], &["2", "0"], &["0", "1"]]);
        let i3 = MetricMatrix::identity(3);
        let i2 = MetricMatrix::identity(2);
        assert_eq!(weighted_mp(&a, &i3, &i2, &t()).unwrap(), moore_penrose(&a, &t()));

        let b = Matrix::<Q>::from_i64(&[&[2, 1], &[1, 1]]);
        let m = MetricMatrix::new(Matrix::from_i64(&[&[3, 0], &[0, 5]]), &t()).unwrap();
        let n = MetricMatrix::new(Matrix::from_i64(&[&[2, 0], &[0, 7]]), &t()).unwrap();
        assert_eq!(weighted_mp(&b, &m, &n, &t()).unwrap(), inverse(&b, &t()).unwrap());

        let m = MetricMatrix::new(q(&[&["2", "i", "0"], &["-i", "2", "0"], &["0", "0", "1"]]), &t()).unwrap();
        let n = MetricMatrix::new(q(&[&["3", "1"], &["1", "1"]]), &t()).unwrap();
        assert!(weighted_mp(&a, &m, &n, &t()).is_ok());
    }

    #[test]
    fn weighted_mp_indefinite_metric_can_fail() {
        let a = Matrix::<Q>::from_i64(&[&[1], &[1]]);
        let m = MetricMatrix::new(Matrix::from_i64(&[&[1, 0], &[0, -1]]), &t()).unwrap();
        let n = MetricMatrix::identity(1);
        let err = weighted_mp(&a, &m, &n, &t()).unwrap_err();
        assert!(err.is_nonexistence());
    }

    #[test]
    fn group_examples() {
        let a = Matrix::<Q>::from_i64(&[&[1, 1], &[0, 0]]);
        assert_eq!(group_inverse(&a, &t()).unwrap(), a);
        let b = Matrix::<Q>::from_i64(&[&[2, 1], &[1, 1]]);
        assert_eq!(group_inverse(&b, &t()).unwrap(), inverse(&b, &t()).unwrap());
        let n = Matrix::<Q>::from_i64(&[&[0, 1], &[0, 0]]);
        assert!(group_inverse(&n, &t()).unwrap_err().is_nonexistence());
    }

    #[test]
    fn group_from_factor_examples() {
        let b = Matrix::<Q>::from_i64(&[&[2, 1], &[1, 1]]);
        let binv = inverse(&b, &t()).unwrap();
        assert_eq!(group_from_factors(&b, &binv, &binv, &t()).unwrap(), binv);
        let a = Matrix::<Q>::from_i64(&[&[1, 1], &[0, 0]]);
        assert_eq!(group_from_factors(&a, &a, &a, &t()).unwrap(), a);
        let c = Matrix::<Q>::from_i64(&[&[1, 2, 0], &[0, 0, 0], &[1, 0, 1]]);
        let g = group_inverse(&c, &t()).unwrap();
        assert_eq!(group_from_factors(&c, &g, &g, &t()).unwrap(), g);
        let z = Matrix::<Q>::zeros(2, 2);
        assert!(group_from_factors(&a, &z, &a, &t()).is_err());
    }

    #[test]
    fn drazin_examples() {
        let n = Matrix::<Q>::from_i64(&[&[0, 1], &[0, 0]]);
        assert_eq!(drazin(&n, &t()).unwrap(), Matrix::zeros(2, 2));
        let b = Matrix::<Q>::from_i64(&[&[2, 1], &[1, 1]]);
        assert_eq!(drazin(&b, &t()).unwrap(), inverse(&b, &t()).unwrap());
        let blk = Matrix::<Q>::from_i64(&[&[2, 1, 0, 0], &[1, 1, 0, 0], &[0, 0, 0, 1], &[0, 0, 0, 0]]);
        let expected = Matrix::<Q>::from_i64(&[&[1, -1, 0, 0], &[-1, 2, 0, 0], &[0, 0, 0, 0], &[0, 0, 0, 0]]);
        assert_eq!(drazin(&blk, &t()).unwrap(), expected);
    }

    #[test]
    fn drazin_defining_equations_on_a_mixed_matrix() {
        let a = Matrix::<Q>::from_i64(&[&[1, 1, 0, 2], &[0, 0, 1, 0], &[0, 0, 0, 1], &[0, 0, 0, 0]]);
        let k = index(&a, &t()).unwrap();
        let x = drazin(&a, &t()).unwrap();
        let labels = [Label::E1k(k), Label::E2, Label::E5];
        assert!(check_all(&labels, &a, &x, &Env::plain(t())).unwrap().overall);
        let xf = drazin(&a.to_float(), &t()).unwrap();
        assert!(mat_eq(&xf, &x.to_float(), &t()));
    }

    #[test]
    fn core_examples() {
        let a = Matrix::<Q>::from_i64(&[&[1, 1], &[0, 0]]);
        let c = core(&a, &t()).unwrap();
        assert_eq!(c, Matrix::from_i64(&[&[1, 0], &[0, 0]]));
        let r = classify(&a, &c, &Env::plain(t()), 1);
        for l in [Label::E1, Label::E2, Label::E3, Label::E6, Label::E7] {
            assert!(r.holds(l), "{l}");
        }
        let d = dual_core(&a, &t()).unwrap();
        assert_eq!(d, q(&[&["1/2", "1/2"], &["1/2", "1/2"]]));
        let r = classify(&a, &d, &Env::plain(t()), 1);
        for l in [Label::E4, Label::E8, Label::E9] {
            assert!(r.holds(l), "{l}");
        }
        assert_eq!(core(&Matrix::<Q>::identity(2), &t()).unwrap(), Matrix::identity(2));
        assert!(core(&Matrix::<Q>::from_i64(&[&[0, 1], &[0, 0]]), &t()).is_err());
    }

    #[test]
    fn core_ep_examples() {
        let a = Matrix::<Q>::from_i64(&[&[1, 1], &[0, 0]]);
        assert_eq!(core_ep(&a, &t()).unwrap(), core(&a, &t()).unwrap());
        let n = Matrix::<Q>::from_i64(&[&[0, 1, 0], &[0, 0, 1], &[0, 0, 0]]);
        assert_eq!(core_ep(&n, &t()).unwrap(), Matrix::zeros(3, 3));
        let b = Matrix::<Q>::from_i64(&[&[2, 1], &[1, 1]]);
        assert_eq!(core_ep(&b, &t()).unwrap(), inverse(&b, &t()).unwrap());

        let c = Matrix::<Q>::from_i64(&[&[1, 1, 0, 2], &[0, 0, 1, 0], &[0, 0, 0, 1], &[0, 0, 0, 0]]);
        let k = index(&c, &t()).unwrap();
        let x = core_ep(&c, &t()).unwrap();
        let labels = [Label::E1k(k), Label::E2, Label::E7];
        assert!(check_all(&labels, &c, &x, &Env::plain(t())).unwrap().overall);
    }

    #[test]
    fn float_backend_agrees_on_core_ep() {
        let c = Matrix::<Q>::from_i64(&[&[1, 1, 0, 2], &[0, 0, 1, 0], &[0, 0, 0, 1], &[0, 0, 0, 0]]);
        let xf: Matrix<Complex64> = core_ep(&c.to_float(), &t()).unwrap();
        assert!(mat_eq(&xf, &core_ep(&c, &t()).unwrap().to_float(), &t()));
    }
}
