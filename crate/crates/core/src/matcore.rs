//! Rank, index, elimination and subspace machinery shared by every other module.

use std::fmt;

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::scalar::{Backend, Scalar};

/// Numerical policy for the float backend. The exact backend ignores it.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerance {
    /// Multiplier on `max(m,n)·ε·σ_max` in [`rank`].
    pub rank_factor: f64,
    /// Relative singular-value cutoff used by factorizations, elimination
    /// pivots, indices and subspace tests on computed (rounded) matrices.
    pub structural: f64,
    /// Relative bound on `‖M − M*‖_F` for metric matrices.
    pub herm: f64,
    /// Relative bound for matrix equality.
    pub eq: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Tolerance {
            rank_factor: 1.0,
            structural: 1e-10,
            herm: 1e-12,
            eq: 1e-9,
        }
    }
}

impl Tolerance {
    pub fn with_eq(eq: f64) -> Self {
        Tolerance {
            eq,
            ..Tolerance::default()
        }
    }
}

/// Numerical rank: pivot count on the exact backend, singular values above
/// `max(m,n)·ε·σ_max·rank_factor` on the float backend.
pub fn rank<T: Scalar>(a: &Matrix<T>, tol: &Tolerance) -> usize {
    let dim = a.rows().max(a.cols()) as f64;
    T::rank_rel(a, dim * f64::EPSILON * tol.rank_factor, 0.0)
}

/// Rank of a matrix that is itself the result of rounded arithmetic.
/// `floor` is a lower bound on the scale against which roundoff is judged,
/// typically the product of the norms of the factors that produced `a`.
pub(crate) fn srank<T: Scalar>(a: &Matrix<T>, floor: f64, tol: &Tolerance) -> usize {
    T::rank_rel(a, tol.structural, floor)
}

/// Sequence `rank(A^0), rank(A^1), …` up to the first repeat; the index is
/// its length minus two.
fn rank_sequence<T: Scalar>(a: &Matrix<T>, scale: f64, tol: &Tolerance) -> Vec<usize> {
    let n = a.rows();
    let norm = a.frobenius().max(scale);
    let mut ranks = vec![n];
    let mut power = Matrix::identity(n);
    for p in 1..=n + 1 {
        power = &power * a;
        let r = srank(&power, norm.powi(p as i32), tol);
        let prev = *ranks.last().unwrap();
        ranks.push(r);
        if r == prev {
            break;
        }
    }
    ranks
}

/// Smallest `k` with `rank(A^k) = rank(A^{k+1})`.
pub fn index<T: Scalar>(a: &Matrix<T>, tol: &Tolerance) -> Result<usize> {
    if !a.is_square() {
        return Err(Error::NotSquare {
            op: "index",
            rows: a.rows(),
            cols: a.cols(),
        });
    }
    Ok(rank_sequence(a, 0.0, tol).len() - 2)
}

/// [`index`] for a computed matrix whose roundoff is judged against
/// `scale^p` at the p-th power, `scale` being a bound such as `‖A‖‖W‖`.
pub(crate) fn index_scaled<T: Scalar>(a: &Matrix<T>, scale: f64, tol: &Tolerance) -> Result<usize> {
    index(a, tol)?;
    Ok(rank_sequence(a, scale, tol).len() - 2)
}

/// Equality: exact on the exact backend, relative Frobenius test otherwise.
pub fn mat_eq<T: Scalar>(x: &Matrix<T>, y: &Matrix<T>, tol: &Tolerance) -> bool {
    if x.shape() != y.shape() {
        return false;
    }
    match T::BACKEND {
        Backend::Exact => x == y,
        Backend::Float => {
            let scale = 1f64.max(x.frobenius()).max(y.frobenius());
            (x - y).frobenius() <= tol.eq * scale
        }
    }
}

/// `‖lhs − rhs‖_F / max(1, ‖lhs‖_F)`; identically zero on the exact backend.
pub fn residual<T: Scalar>(lhs: &Matrix<T>, rhs: &Matrix<T>) -> f64 {
    match T::BACKEND {
        Backend::Exact => 0.0,
        Backend::Float => (lhs - rhs).frobenius() / lhs.frobenius().max(1.0),
    }
}

/// Reduced row echelon form and the list of pivot columns.
///
/// The exact backend pivots on the first nonzero entry; the float backend
/// uses partial pivoting and treats entries below `structural·max|a_ij|`
/// as zero.
pub fn rref<T: Scalar>(a: &Matrix<T>, tol: &Tolerance) -> (Matrix<T>, Vec<usize>) {
    let (m, n) = a.shape();
    let mut rows: Vec<Vec<T>> = (0..m).map(|i| a.row(i).to_vec()).collect();
    let scale = a.data().iter().map(Scalar::abs_f64).fold(0.0, f64::max);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..n {
        if r == m {
            break;
        }
        let candidate = match T::BACKEND {
            Backend::Exact => (r..m).find(|&i| !rows[i][c].is_zero()),
            Backend::Float => (r..m)
                .max_by(|&i, &j| rows[i][c].abs_f64().total_cmp(&rows[j][c].abs_f64()))
                .filter(|&i| !rows[i][c].negligible(scale, tol)),
        };
        let Some(p) = candidate else {
            for row in rows.iter_mut().skip(r) {
                row[c] = T::zero();
            }
            continue;
        };
        rows.swap(r, p);
        let inv = T::one().div(&rows[r][c]);
        for x in rows[r].iter_mut() {
            *x = x.mul(&inv);
        }
        rows[r][c] = T::one();
        let pivot_row = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (x, p) in row.iter_mut().zip(&pivot_row).skip(c) {
                if !p.is_zero() {
                    *x = x.sub(&f.mul(p));
                }
            }
            row[c] = T::zero();
        }
        pivots.push(c);
        r += 1;
    }
    let out = Matrix::from_rows(rows).unwrap_or_else(|_| Matrix::zeros(m, n));
    (out, pivots)
}

/// RREF of `[A | I_m]`.
pub fn rref_augmented<T: Scalar>(a: &Matrix<T>, tol: &Tolerance) -> Matrix<T> {
    rref(&a.hstack(&Matrix::identity(a.rows())), tol).0
}

/// Inverse by Gauss-Jordan elimination.
pub fn inverse<T: Scalar>(a: &Matrix<T>, tol: &Tolerance) -> Result<Matrix<T>> {
    let n = a.rows();
    if !a.is_square() {
        return Err(Error::NotSquare {
            op: "inverse",
            rows: a.rows(),
            cols: a.cols(),
        });
    }
    let (r, pivots) = rref(&a.hstack(&Matrix::identity(n)), tol);
    if pivots.iter().take_while(|&&c| c < n).count() < n {
        return Err(Error::Singular("inverse"));
    }
    Ok(r.submatrix(0, n, n, 2 * n))
}

/// A {1}-inverse `Q` of `b` (so `bQb = b`) built from the row reduction of
/// `[b | I]`. With `b` of shape m×n and rank r, the free block `l` has shape
/// (n−r)×(m−r) and defaults to zero.
pub fn one_inverse<T: Scalar>(
    b: &Matrix<T>,
    l: Option<&Matrix<T>>,
    tol: &Tolerance,
) -> Result<Matrix<T>> {
    let (m, n) = b.shape();
    let aug = rref_augmented(b, tol);
    let e = aug.submatrix(0, m, n, n + m);
    let (_, pivots) = rref(b, tol);
    let r = pivots.len();
    let l = match l {
        Some(l) if l.shape() != (n - r, m - r) => {
            return Err(Error::shape(
                "one_inverse",
                format!(
                    "free block is {}x{}, expected {}x{}",
                    l.rows(),
                    l.cols(),
                    n - r,
                    m - r
                ),
            ))
        }
        Some(l) => l.clone(),
        None => Matrix::zeros(n - r, m - r),
    };
    let mut order = pivots.clone();
    order.extend((0..n).filter(|c| !pivots.contains(c)));
    let p = Matrix::<T>::identity(n).select_cols(&order);
    let mid = Matrix::block(
        &Matrix::identity(r),
        &Matrix::zeros(r, m - r),
        &Matrix::zeros(n - r, r),
        &l,
    );
    Ok(&(&p * &mid) * &e)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SubspaceKind {
    RangeSubset,
    RangeEqual,
    NullSubset,
    NullEqual,
}

/// Outcome of a range or null-space comparison with the ranks that decide it.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SubspaceRelation {
    pub kind: SubspaceKind,
    pub holds: bool,
    /// `(rank of the concatenation, rank of the reference, rank of the other)`.
    pub ranks: (usize, usize, usize),
}

impl fmt::Display for SubspaceRelation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{:?}:{} ranks={:?}",
            self.kind, self.holds, self.ranks
        )
    }
}

fn subspace_floor<T: Scalar>(a: &Matrix<T>, b: &Matrix<T>) -> f64 {
    a.frobenius().max(b.frobenius())
}

/// `R(a) ⊆ R(b)`, decided by `rank([b | a]) = rank(b)`.
pub fn range_subset<T: Scalar>(
    a: &Matrix<T>,
    b: &Matrix<T>,
    tol: &Tolerance,
) -> Result<SubspaceRelation> {
    if a.rows() != b.rows() {
        return Err(Error::shape(
            "range_subset",
            format!("{} rows vs {} rows", a.rows(), b.rows()),
        ));
    }
    let floor = subspace_floor(a, b);
    let rc = srank(&b.hstack(a), floor, tol);
    let rb = srank(b, floor, tol);
    let ra = srank(a, floor, tol);
    Ok(SubspaceRelation {
        kind: SubspaceKind::RangeSubset,
        holds: rc == rb,
        ranks: (rc, rb, ra),
    })
}

pub fn range_equal<T: Scalar>(
    a: &Matrix<T>,
    b: &Matrix<T>,
    tol: &Tolerance,
) -> Result<SubspaceRelation> {
    let sub = range_subset(a, b, tol)?;
    let (rc, rb, ra) = sub.ranks;
    Ok(SubspaceRelation {
        kind: SubspaceKind::RangeEqual,
        holds: rc == rb && rc == ra,
        ranks: sub.ranks,
    })
}

/// `N(a) ⊆ N(b)`, decided by `rank([a; b]) = rank(a)`.
pub fn null_subset<T: Scalar>(
    a: &Matrix<T>,
    b: &Matrix<T>,
    tol: &Tolerance,
) -> Result<SubspaceRelation> {
    if a.cols() != b.cols() {
        return Err(Error::shape(
            "null_subset",
            format!("{} columns vs {} columns", a.cols(), b.cols()),
        ));
    }
    let floor = subspace_floor(a, b);
    let rc = srank(&a.vstack(b), floor, tol);
    let ra = srank(a, floor, tol);
    let rb = srank(b, floor, tol);
    Ok(SubspaceRelation {
        kind: SubspaceKind::NullSubset,
        holds: rc == ra,
        ranks: (rc, ra, rb),
    })
}

pub fn null_equal<T: Scalar>(
    a: &Matrix<T>,
    b: &Matrix<T>,
    tol: &Tolerance,
) -> Result<SubspaceRelation> {
    let sub = null_subset(a, b, tol)?;
    let (rc, ra, rb) = sub.ranks;
    Ok(SubspaceRelation {
        kind: SubspaceKind::NullEqual,
        holds: rc == ra && rc == rb,
        ranks: sub.ranks,
    })
}

/// `X = f·(g·core·f)⁻¹·g`, an outer inverse of `core` (`X·core·X = X`).
pub fn outer_from_full_rank<T: Scalar>(
    f: &Matrix<T>,
    g: &Matrix<T>,
    core: &Matrix<T>,
    tol: &Tolerance,
) -> Result<Matrix<T>> {
    if core.shape() != (g.cols(), f.rows()) || g.rows() != f.cols() {
        return Err(Error::shape(
            "outer_from_full_rank",
            format!(
                "f {:?}, g {:?}, core {:?}",
                f.shape(),
                g.shape(),
                core.shape()
            ),
        ));
    }
    let inner = &(g * core) * f;
    let inv = inverse(&inner, tol).map_err(|_| Error::Singular("outer_from_full_rank"))?;
    Ok(&(f * &inv) * g)
}

/// Invertible Hermitian matrix used as `M` or `N` in the weighted equations.
#[derive(Clone, Debug)]
pub struct MetricMatrix<T> {
    m: Matrix<T>,
    inv: Matrix<T>,
}

impl<T: Scalar> MetricMatrix<T> {
    pub fn new(m: Matrix<T>, tol: &Tolerance) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::NotSquare {
                op: "metric",
                rows: m.rows(),
                cols: m.cols(),
            });
        }
        let asym = (&m - &m.adjoint()).frobenius();
        let hermitian = match T::BACKEND {
            Backend::Exact => asym == 0.0 && m.is_hermitian_exact(),
            Backend::Float => asym <= tol.herm * m.frobenius(),
        };
        if !hermitian {
            let rel = asym / m.frobenius().max(f64::MIN_POSITIVE);
            return Err(Error::NonHermitianMetric(rel));
        }
        let inv = inverse(&m, tol).map_err(|_| Error::SingularMetric {
            rank: rank(&m, tol),
            dim: m.rows(),
        })?;
        Ok(MetricMatrix { m, inv })
    }

    pub fn identity(n: usize) -> Self {
        MetricMatrix {
            m: Matrix::identity(n),
            inv: Matrix::identity(n),
        }
    }

    pub fn matrix(&self) -> &Matrix<T> {
        &self.m
    }

    pub fn inverse(&self) -> &Matrix<T> {
        &self.inv
    }

    pub fn dim(&self) -> usize {
        self.m.rows()
    }
}

/// The pair `(A, W)` with `A` m×n, `W` n×m nonzero, and the cached indices
/// of `AW` and `WA`.
#[derive(Clone, Debug)]
pub struct WeightedContext<T> {
    pub a: Matrix<T>,
    pub w: Matrix<T>,
    pub kappa: usize,
    pub ind_aw: usize,
    pub ind_wa: usize,
    pub tol: Tolerance,
}

impl<T: Scalar> WeightedContext<T> {
    pub fn m(&self) -> usize {
        self.a.rows()
    }

    pub fn n(&self) -> usize {
        self.a.cols()
    }

    pub fn aw(&self) -> Matrix<T> {
        &self.a * &self.w
    }

    pub fn wa(&self) -> Matrix<T> {
        &self.w * &self.a
    }

    /// `‖A‖_F‖W‖_F`, the roundoff scale of `AW` and `WA`.
    pub fn scale(&self) -> f64 {
        self.a.frobenius() * self.w.frobenius()
    }

    pub fn waw(&self) -> Matrix<T> {
        &(&self.w * &self.a) * &self.w
    }
}

pub fn make_context<T: Scalar>(
    a: Matrix<T>,
    w: Matrix<T>,
    tol: &Tolerance,
) -> Result<WeightedContext<T>> {
    if w.shape() != (a.cols(), a.rows()) {
        return Err(Error::shape(
            "make_context",
            format!("A is {:?} but W is {:?}", a.shape(), w.shape()),
        ));
    }
    if w.is_zero() {
        return Err(Error::ZeroWeight);
    }
    let aw = &a * &w;
    let wa = &w * &a;
    let scale = a.frobenius() * w.frobenius();
    let ind_aw = index_scaled(&aw, scale, tol)?;
    let ind_wa = index_scaled(&wa, scale, tol)?;
    let kappa = ind_aw.max(ind_wa);
    let floor = scale.powi(kappa as i32);
    let r1 = srank(&aw.pow(kappa), floor, tol);
    let r2 = srank(&wa.pow(kappa), floor, tol);
    if r1 != r2 {
        return Err(Error::verification(
            "make_context",
            format!("rank((AW)^k) = {r1} but rank((WA)^k) = {r2} at k = {kappa}"),
        ));
    }
    Ok(WeightedContext {
        a,
        w,
        kappa,
        ind_aw,
        ind_wa,
        tol: *tol,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::Q;
    use num_complex::Complex64;

    fn q(rows: &[&[&str]]) -> Matrix<Q> {
        Matrix::parse_rows(rows).unwrap()
    }

    fn t() -> Tolerance {
        Tolerance::default()
    }

    #[test]
    fn rank_examples() {
        assert_eq!(rank(&Matrix::<Q>::identity(3), &t()), 3);
        assert_eq!(rank(&q(&[&["1", "i"], &["0", "0"], &["0", "0"]]), &t()), 1);
        assert_eq!(rank(&Matrix::<Q>::zeros(2, 2), &t()), 0);
        let f = Matrix::<Complex64>::parse_rows(&[&["1", "i"], &["0", "0"], &["0", "0"]]).unwrap();
        assert_eq!(rank(&f, &t()), 1);
    }

    #[test]
    fn index_examples() {
        assert_eq!(index(&Matrix::<Q>::from_i64(&[&[2, 1], &[1, 1]]), &t()).unwrap(), 0);
        assert_eq!(index(&Matrix::<Q>::from_i64(&[&[1, 1], &[0, 0]]), &t()).unwrap(), 1);
        assert_eq!(index(&Matrix::<Q>::from_i64(&[&[0, 1], &[0, 0]]), &t()).unwrap(), 2);
        assert_eq!(index(&Matrix::<Q>::zeros(3, 3), &t()).unwrap(), 1);
        assert!(index(&Matrix::<Q>::zeros(2, 3), &t()).is_err());
        let n = Matrix::<Complex64>::from_i64(&[&[0, 1, 0], &[0, 0, 1], &[0, 0, 0]]);
        assert_eq!(index(&n, &t()).unwrap(), 3);
    }

    #[test]
    fn rref_augmented_examples() {
        let i2 = Matrix::<Q>::identity(2);
        assert_eq!(rref_augmented(&i2, &t()), i2.hstack(&i2));
        let a = Matrix::<Q>::from_i64(&[&[0, 1], &[0, 0]]);
        assert_eq!(
            rref_augmented(&a, &t()),
            Matrix::from_i64(&[&[0, 1, 1, 0], &[0, 0, 0, 1]])
        );
        let a = Matrix::<Q>::from_i64(&[&[2, 0], &[0, 0]]);
        assert_eq!(
            rref_augmented(&a, &t()),
            q(&[&["1", "0", "1/2", "0"], &["0", "0", "0", "1"]])
        );
    }

    #[test]
    fn one_inverse_examples() {
        let b = Matrix::<Q>::from_i64(&[&[2, 1], &[1, 1]]);
        let binv = inverse(&b, &t()).unwrap();
        let l = Matrix::<Q>::zeros(0, 0);
        assert_eq!(one_inverse(&b, Some(&l), &t()).unwrap(), binv);

        let b = Matrix::<Q>::from_i64(&[&[1, 0], &[0, 0]]);
        let l = Matrix::<Q>::zeros(1, 1);
        let qm = one_inverse(&b, Some(&l), &t()).unwrap();
        assert_eq!(qm, b);
        assert_eq!(&(&b * &qm) * &b, b);

        let z = Matrix::<Q>::zeros(3, 3);
        let l = Matrix::<Q>::from_i64(&[&[1, 2, 3], &[4, 5, 6], &[7, 8, 9]]);
        let qm = one_inverse(&z, Some(&l), &t()).unwrap();
        assert_eq!(&(&z * &qm) * &z, z);

        assert!(one_inverse(&b, Some(&Matrix::zeros(2, 2)), &t()).is_err());
    }

    #[test]
    fn one_inverse_rectangular_with_free_block() {
        let b = q(&[&["1", "2", "i"], &["2", "4", "2i"]]);
        let l = q(&[&["3", "-1"]]).transpose();
        let qm = one_inverse(&b, Some(&l), &t()).unwrap();
        assert_eq!(qm.shape(), (3, 2));
        assert_eq!(&(&b * &qm) * &b, b);
    }

    #[test]
    fn subspace_examples() {
        let a = Matrix::<Q>::from_i64(&[&[1, 2], &[2, 4]]);
        assert!(range_subset(&a, &a, &t()).unwrap().holds);
        let e1 = Matrix::<Q>::from_i64(&[&[1], &[0]]);
        let i2 = Matrix::<Q>::identity(2);
        assert!(range_subset(&e1, &i2, &t()).unwrap().holds);
        let rel = range_subset(&i2, &e1, &t()).unwrap();
        assert!(!rel.holds);
        assert_eq!((rel.ranks.0, rel.ranks.1), (2, 1));

        assert!(null_subset(&a, &a, &t()).unwrap().holds);
        assert!(null_subset(&i2, &a, &t()).unwrap().holds);
        let r1 = Matrix::<Q>::from_i64(&[&[1, 0]]);
        let r2 = Matrix::<Q>::from_i64(&[&[0, 1]]);
        assert!(!null_subset(&r1, &r2, &t()).unwrap().holds);
        assert!(range_subset(&r1, &e1, &t()).is_err());
        assert!(null_subset(&e1, &i2, &t()).is_err());
        assert!(range_equal(&a, &e1.hstack(&e1).scale(&Q::from_i64(0, 1)), &t())
            .map(|r| !r.holds)
            .unwrap());
    }

    #[test]
    fn outer_examples() {
        let i2 = Matrix::<Q>::identity(2);
        assert_eq!(outer_from_full_rank(&i2, &i2, &i2, &t()).unwrap(), i2);
        let f = Matrix::<Q>::from_i64(&[&[1], &[0]]);
        let g = Matrix::<Q>::from_i64(&[&[1, 0]]);
        let x = outer_from_full_rank(&f, &g, &i2, &t()).unwrap();
        assert_eq!(x, Matrix::from_i64(&[&[1, 0], &[0, 0]]));
        assert_eq!(&x * &x, x);
        let g0 = Matrix::<Q>::from_i64(&[&[0, 1]]);
        assert!(matches!(
            outer_from_full_rank(&f, &g0, &i2, &t()),
            Err(Error::Singular(_))
        ));
    }

    #[test]
    fn metric_validation() {
        let m = q(&[&["2", "i"], &["-i", "2"]]);
        assert!(MetricMatrix::new(m, &t()).is_ok());
        let bad = q(&[&["2", "i"], &["i", "2"]]);
        assert!(matches!(MetricMatrix::new(bad, &t()), Err(Error::NonHermitianMetric(_))));
        let sing = q(&[&["1", "1"], &["1", "1"]]);
        assert!(matches!(
            MetricMatrix::new(sing, &t()),
            Err(Error::SingularMetric { rank: 1, dim: 2 })
        ));
    }

    #[test]
    fn context_examples() {
        let a = q(&[&["1", "i"], &["0", "0"], &["0", "0"]]);
        let w = Matrix::<Q>::from_i64(&[&[1, 1, 0], &[0, 0, 0]]);
        let ctx = make_context(a, w, &t()).unwrap();
        assert_eq!(ctx.kappa, 1);
        let ctx = make_context(Matrix::<Q>::identity(2), Matrix::identity(2), &t()).unwrap();
        assert_eq!(ctx.kappa, 0);
        assert!(matches!(
            make_context(Matrix::<Q>::identity(2), Matrix::zeros(2, 2), &t()),
            Err(Error::ZeroWeight)
        ));
        assert!(make_context(Matrix::<Q>::identity(2), Matrix::identity(3), &t()).is_err());
    }
}
