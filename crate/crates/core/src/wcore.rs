//! M-weighted core and N-weighted dual core inverses, and reverse-order-law
//! diagnostics for them.

use std::fmt;

use crate::axioms::{check_all, require, Env, Label};
use crate::classical::group_inverse;
use crate::error::{Error, Result};
use crate::float_la;
use crate::matcore::{index, inverse, mat_eq, one_inverse, range_equal, range_subset, MetricMatrix, SubspaceRelation, Tolerance};
use crate::matrix::Matrix;
use crate::scalar::{Backend, Scalar};

/// How the {1}-inverse inside `A(A*MA²)^{(1)}A*M` is produced.
#[derive(Clone, Copy, Debug)]
pub enum CoreVariant<'a, T> {
    /// Moore-Penrose inverse as the {1}-inverse.
    ClosedForm,
    /// Row-reduction {1}-inverse with an optional free block.
    Algorithm1(Option<&'a Matrix<T>>),
}

fn check_metric<T: Scalar>(op: &'static str, a: &Matrix<T>, m: &MetricMatrix<T>) -> Result<()> {
    if !a.is_square() {
        return Err(Error::NotSquare {
            op,
            rows: a.rows(),
            cols: a.cols(),
        });
    }
    if m.dim() != a.rows() {
        return Err(Error::shape(op, format!("metric is {0}x{0}, A is {1}x{1}", m.dim(), a.rows())));
    }
    Ok(())
}

fn require_index_le1<T: Scalar>(what: &'static str, a: &Matrix<T>, tol: &Tolerance) -> Result<()> {
    let k = index(a, tol)?;
    if k > 1 {
        return Err(Error::nonexistent(what, format!("index is {k}, group inverse missing")));
    }
    Ok(())
}

/// The unique `X` with `(MAX)* = MAX`, `XA² = A`, `AX² = X`, computed as
/// `A(A*MA²)^{(1)}A*M`.
pub fn m_weighted_core<T: Scalar>(
    a: &Matrix<T>,
    m: &MetricMatrix<T>,
    variant: CoreVariant<'_, T>,
    tol: &Tolerance,
) -> Result<Matrix<T>> {
    const WHAT: &str = "M-weighted core inverse";
    check_metric("m_weighted_core", a, m)?;
    require_index_le1(WHAT, a, tol)?;
    let x = match variant {
        CoreVariant::ClosedForm if T::BACKEND == Backend::Float => float_m_core(a, m, tol)?,
        _ => {
            let ah_m = &a.adjoint() * m.matrix();
            let core = &(&ah_m * a) * a;
            let inner = match variant {
                CoreVariant::ClosedForm => crate::classical::moore_penrose(&core, tol),
                CoreVariant::Algorithm1(l) => one_inverse(&core, l, tol)?,
            };
            &(a * &inner) * &ah_m
        }
    };
    let env = Env::plain(*tol).with_m(m);
    require(WHAT, &[Label::E3M, Label::E6, Label::E7], a, &x, &env).map_err(|_| {
        Error::nonexistent(WHAT, "no solution of the defining equations for this metric")
    })?;
    Ok(x)
}

/// `A^#·Q(Q*MQ)⁻¹Q*M` with `Q` an orthonormal basis of `R(A)`: the same
/// matrix as the closed form, without squaring the condition number of `A`.
fn float_m_core<T: Scalar>(a: &Matrix<T>, m: &MetricMatrix<T>, tol: &Tolerance) -> Result<Matrix<T>> {
    let af = a.to_float();
    let q = float_la::range_basis(&af, 0.0, tol);
    let qh = q.adjoint();
    let mf = m.matrix().to_float();
    let gram = inverse(&(&(&qh * &mf) * &q), tol)
        .map_err(|_| Error::nonexistent("M-weighted core inverse", "Q*MQ is singular on R(A)"))?;
    let proj = &(&(&q * &gram) * &qh) * &mf;
    let x = &group_inverse(&af, tol)? * &proj;
    Ok(x.map(|z| T::from_c64(*z)))
}

/// The unique `X` with `(NXA)* = NXA`, `A²X = A`, `X²A = X`, obtained as
/// the conjugate transpose of the `N⁻¹`-weighted core inverse of `A*`.
pub fn n_weighted_dual_core<T: Scalar>(a: &Matrix<T>, n: &MetricMatrix<T>, tol: &Tolerance) -> Result<Matrix<T>> {
    const WHAT: &str = "N-weighted dual core inverse";
    check_metric("n_weighted_dual_core", a, n)?;
    require_index_le1(WHAT, a, tol)?;
    let ninv = MetricMatrix::new(n.inverse().clone(), tol)?;
    let y = m_weighted_core(&a.adjoint(), &ninv, CoreVariant::ClosedForm, tol)
        .map_err(|_| Error::nonexistent(WHAT, "no solution of the defining equations for this metric"))?;
    let x = y.adjoint();
    let env = Env::plain(*tol).with_n(n);
    require(WHAT, &[Label::E4N, Label::E8, Label::E9], a, &x, &env)?;
    Ok(x)
}

/// `A^#AX` for a given `X ∈ A{1,3^M}`, cross-checked against
/// [`m_weighted_core`].
pub fn m_core_from_13m<T: Scalar>(
    a: &Matrix<T>,
    m: &MetricMatrix<T>,
    x: &Matrix<T>,
    tol: &Tolerance,
) -> Result<Matrix<T>> {
    check_metric("m_core_from_13m", a, m)?;
    let env = Env::plain(*tol).with_m(m);
    let r = check_all(&[Label::E1, Label::E3M], a, x, &env)?;
    if !r.overall {
        return Err(Error::precondition("m_core_from_13m", "X is not in A{1,3^M}"));
    }
    let g = group_inverse(a, tol)?;
    let y = &(&g * a) * x;
    let reference = m_weighted_core(a, m, CoreVariant::ClosedForm, tol)?;
    if !mat_eq(&y, &reference, tol) {
        return Err(Error::verification("m_core_from_13m", "A^#AX differs from the M-weighted core inverse"));
    }
    Ok(y)
}

/// Conditions around `(AB)^{⊛,M} = B^{⊛,M}A^{⊛,M}`, each computed directly.
#[derive(Clone, Debug)]
pub struct RolReport {
    pub rol_holds: bool,
    /// False when `ind(AB) ≥ 2`, in which case `rol_holds` is false too.
    pub ab_core_exists: bool,
    pub ind_a: usize,
    pub ind_b: usize,
    pub ind_ab: usize,
    /// `R(B^{⊛}A) ⊆ R(AB)`
    pub range_incl_1: SubspaceRelation,
    /// `R(AB) ⊆ R(BA)`
    pub range_incl_2: SubspaceRelation,
    /// `MBB^{⊛}AA^{⊛} = MAA^{⊛}BB^{⊛}`
    pub commute_m: bool,
    /// `BB^{⊛}AA^{⊛} = AA^{⊛}BB^{⊛}`
    pub commute_plain: bool,
    /// `BB^{⊛}A^{⊛} ∈ C{3^M}` and `∈ C{6}` for `C = ABB^{⊛}`
    pub c_membership: (bool, bool),
    /// `R(A*MB) = R(MBA*)`
    pub range_star_cond: bool,
}

impl RolReport {
    /// Hypotheses under which the reverse order law is characterized by
    /// range inclusions plus commutativity.
    pub fn iff_hypotheses(&self) -> bool {
        self.ind_a <= 1 && self.ind_b <= 1 && self.ind_ab <= 1 && self.range_star_cond
    }

    pub fn necessary_conditions(&self) -> bool {
        self.range_incl_1.holds && self.range_incl_2.holds && self.c_membership == (true, true)
    }

    /// `(rol_holds, inclusions ∧ commute_m, inclusions ∧ commute_plain)`
    pub fn iff_triple(&self) -> (bool, bool, bool) {
        let incl = self.range_incl_1.holds && self.range_incl_2.holds;
        (self.rol_holds, incl && self.commute_m, incl && self.commute_plain)
    }
}

impl fmt::Display for RolReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "rol_holds={}", self.rol_holds)?;
        writeln!(f, "ab_core_exists={}", self.ab_core_exists)?;
        writeln!(f, "ind_a={}", self.ind_a)?;
        writeln!(f, "ind_b={}", self.ind_b)?;
        writeln!(f, "ind_ab={}", self.ind_ab)?;
        writeln!(f, "range_incl_1={} ranks={:?}", self.range_incl_1.holds, self.range_incl_1.ranks)?;
        writeln!(f, "range_incl_2={} ranks={:?}", self.range_incl_2.holds, self.range_incl_2.ranks)?;
        writeln!(f, "commute_m={}", self.commute_m)?;
        writeln!(f, "commute_plain={}", self.commute_plain)?;
        writeln!(f, "c_membership_3M={}", self.c_membership.0)?;
        writeln!(f, "c_membership_6={}", self.c_membership.1)?;
        write!(f, "range_star_cond={}", self.range_star_cond)
    }
}

/// Reverse-order-law report for the M-weighted core inverse.
pub fn check_rol_m_core<T: Scalar>(
    a: &Matrix<T>,
    b: &Matrix<T>,
    m: &MetricMatrix<T>,
    tol: &Tolerance,
) -> Result<RolReport> {
    check_metric("check_rol_m_core", a, m)?;
    check_metric("check_rol_m_core", b, m)?;
    let ab = a * b;
    let ba = b * a;
    let ind_a = index(a, tol)?;
    let ind_b = index(b, tol)?;
    let ind_ab = index(&ab, tol)?;
    let ac = m_weighted_core(a, m, CoreVariant::ClosedForm, tol)?;
    let bc = m_weighted_core(b, m, CoreVariant::ClosedForm, tol)?;
    let product = &bc * &ac;
    let (ab_core_exists, rol_holds) = if ind_ab <= 1 {
        let abc = m_weighted_core(&ab, m, CoreVariant::ClosedForm, tol)?;
        (true, mat_eq(&abc, &product, tol))
    } else {
        (false, false)
    };
    let range_incl_1 = range_subset(&(&bc * a), &ab, tol)?;
    let range_incl_2 = range_subset(&ab, &ba, tol)?;
    let bbc = b * &bc;
    let aac = a * &ac;
    let left = &bbc * &aac;
    let right = &aac * &bbc;
    let commute_m = mat_eq(&(m.matrix() * &left), &(m.matrix() * &right), tol);
    let commute_plain = mat_eq(&left, &right, tol);
    let c = a * &bbc;
    let z = &bbc * &ac;
    let env = Env::plain(*tol).with_m(m);
    let c_membership = (
        crate::axioms::check(Label::E3M, &c, &z, &env)?.holds,
        crate::axioms::check(Label::E6, &c, &z, &env)?.holds,
    );
    let ah = a.adjoint();
    let mb = m.matrix() * b;
    let range_star_cond = range_equal(&(&ah * &mb), &(&mb * &ah), tol)?.holds;
    Ok(RolReport {
        rol_holds,
        ab_core_exists,
        ind_a,
        ind_b,
        ind_ab,
        range_incl_1,
        range_incl_2,
        commute_m,
        commute_plain,
        c_membership,
        range_star_cond,
    })
}

/// Reverse-order-law report for the N-weighted dual core inverse.
///
/// `rol_holds` compares `(AB)_{N}` with `B_{N}A_{N}` directly; the remaining
/// fields are those of the conjugate-transposed problem
/// `(B*, A*, N⁻¹)`, under which the dual inverse becomes an M-weighted core
/// inverse.
pub fn check_rol_n_dual<T: Scalar>(
    a: &Matrix<T>,
    b: &Matrix<T>,
    n: &MetricMatrix<T>,
    tol: &Tolerance,
) -> Result<RolReport> {
    check_metric("check_rol_n_dual", a, n)?;
    check_metric("check_rol_n_dual", b, n)?;
    let ninv = MetricMatrix::new(n.inverse().clone(), tol)?;
    let mut report = check_rol_m_core(&b.adjoint(), &a.adjoint(), &ninv, tol)?;
    let ab = a * b;
    report.ind_a = index(a, tol)?;
    report.ind_b = index(b, tol)?;
    report.ind_ab = index(&ab, tol)?;
    if report.ind_ab <= 1 {
        let ad = n_weighted_dual_core(a, n, tol)?;
        let bd = n_weighted_dual_core(b, n, tol)?;
        let abd = n_weighted_dual_core(&ab, n, tol)?;
        report.ab_core_exists = true;
        report.rol_holds = mat_eq(&abd, &(&bd * &ad), tol);
    } else {
        report.ab_core_exists = false;
        report.rol_holds = false;
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::classical::{core, dual_core};
    use crate::matcore::inverse;
    use crate::scalar::Q;

    fn t() -> Tolerance {
        Tolerance::default()
    }

    fn q(rows: &[&[&str]]) -> Matrix<Q> {
        Matrix::parse_rows(rows).unwrap()
    }

    fn metric() -> MetricMatrix<Q> {
        MetricMatrix::new(q(&[&["2", "i"], &["-i", "2"]]), &t()).unwrap()
    }

    #[test]
    fn m_core_examples() {
        let a = Matrix::<Q>::from_i64(&[&[1, 1], &[0, 0]]);
        let i2 = MetricMatrix::identity(2);
        let x = m_weighted_core(&a, &i2, CoreVariant::ClosedForm, &t()).unwrap();
        assert_eq!(x, Matrix::from_i64(&[&[1, 0], &[0, 0]]));
        assert_eq!(x, core(&a, &t()).unwrap());

        let b = Matrix::<Q>::from_i64(&[&[2, 1], &[1, 1]]);
        let x = m_weighted_core(&b, &metric(), CoreVariant::ClosedForm, &t()).unwrap();
        assert_eq!(x, inverse(&b, &t()).unwrap());
    }

    #[test]
    fn m_core_variants_agree() {
        let a = Matrix::<Q>::from_i64(&[&[1, 1], &[0, 0]]);
        let m = metric();
        let closed = m_weighted_core(&a, &m, CoreVariant::ClosedForm, &t()).unwrap();
        let env = Env::plain(t()).with_m(&m);
        assert!(check_all(&[Label::E3M, Label::E6, Label::E7, Label::E1, Label::E2], &a, &closed, &env)
            .unwrap()
            .overall);
        for l in ["0", "1", "-3/2+i"] {
            let l = q(&[&[l]]);
            let alg = m_weighted_core(&a, &m, CoreVariant::Algorithm1(Some(&l)), &t()).unwrap();
            assert_eq!(alg, closed);
        }
    }

    #[test]
    fn m_core_rejects_index_two() {
        let n = Matrix::<Q>::from_i64(&[&[0, 1], &[0, 0]]);
        let err = m_weighted_core(&n, &metric(), CoreVariant::ClosedForm, &t()).unwrap_err();
        assert!(err.is_nonexistence());
    }

    #[test]
    fn n_dual_core_example() {
        let a = Matrix::<Q>::from_i64(&[&[1, 1], &[0, 0]]);
        let y = n_weighted_dual_core(&a, &metric(), &t()).unwrap();
        let expected = q(&[&["1/2-1/4i", "1/2-1/4i"], &["1/2+1/4i", "1/2+1/4i"]]);
        assert_eq!(y, expected);
        let i2 = MetricMatrix::identity(2);
        assert_eq!(n_weighted_dual_core(&a, &i2, &t()).unwrap(), dual_core(&a, &t()).unwrap());
        let b = Matrix::<Q>::from_i64(&[&[2, 1], &[1, 1]]);
        assert_eq!(n_weighted_dual_core(&b, &metric(), &t()).unwrap(), inverse(&b, &t()).unwrap());
    }

    #[test]
    fn m_core_from_13m_examples() {
        let a = Matrix::<Q>::from_i64(&[&[1, 1], &[0, 0]]);
        let m = metric();
        let x = m_weighted_core(&a, &m, CoreVariant::ClosedForm, &t()).unwrap();
        assert_eq!(m_core_from_13m(&a, &m, &x, &t()).unwrap(), x);
        let b = Matrix::<Q>::from_i64(&[&[2, 1], &[1, 1]]);
        let binv = inverse(&b, &t()).unwrap();
        assert_eq!(m_core_from_13m(&b, &m, &binv, &t()).unwrap(), binv);
        assert!(m_core_from_13m(&a, &m, &Matrix::zeros(2, 2), &t()).is_err());
    }

    #[test]
    fn rol_trivial_cases() {
        let i2 = Matrix::<Q>::identity(2);
        let m = MetricMatrix::identity(2);
        let r = check_rol_m_core(&i2, &i2, &m, &t()).unwrap();
        assert!(r.rol_holds && r.necessary_conditions() && r.commute_m && r.commute_plain && r.range_star_cond);

        let a = Matrix::<Q>::from_i64(&[&[2, 1], &[1, 1]]);
        let b = Matrix::<Q>::from_i64(&[&[1, 2], &[0, 1]]);
        assert!(check_rol_m_core(&a, &b, &m, &t()).unwrap().rol_holds);

        let p = Matrix::<Q>::from_i64(&[&[1, 1], &[0, 0]]);
        let r = check_rol_m_core(&p, &p, &metric(), &t()).unwrap();
        assert!(r.rol_holds && r.necessary_conditions());

        let r = check_rol_n_dual(&i2, &i2, &m, &t()).unwrap();
        assert!(r.rol_holds);
        let r = check_rol_n_dual(&p, &p, &metric(), &t()).unwrap();
        assert!(r.rol_holds);
    }

    #[test]
    fn rol_reports_index_two_products() {
        let a = Matrix::<Q>::from_i64(&[&[1, 1], &[0, 0]]);
        let b = Matrix::<Q>::from_i64(&[&[0, 0], &[0, 1]]);
        let r = check_rol_m_core(&a, &b, &MetricMatrix::identity(2), &t()).unwrap();
        assert_eq!(r.ind_ab, 2);
        assert!(!r.ab_core_exists && !r.rol_holds);
    }
}
