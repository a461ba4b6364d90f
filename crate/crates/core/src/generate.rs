//! Seeded random instance generators for tests and the self-test.
//!
//! Families:
//! - small Gaussian-integer matrices and positive-definite metrics;
//! - weighted contexts with a prescribed κ, built as
//!   `A = P[[A₁, A₂], [0, A₃]]Q⁻¹`, `W = Q[[W₁, W₂], [0, W₃]]P⁻¹` with `A₃W₃`
//!   and `W₃A₃` nilpotent (unimodular `P`, `Q` on the exact backend,
//!   unitary on the float backend);
//! - index-one matrices `S·diag(D, 0)·S⁻¹`;
//! - reverse-order-law pairs with `A² = BA` (idempotent `A = B`, and
//!   `B = A + Y(I − AA#)` for index-one `A`) and with `BA = B²`;
//! - `{1^W}` members as {1}-inverses of `WAW`, and `{2^W}` members as outer
//!   inverses of `WAW` from random full-rank factors.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::axioms::{check, Env, Label};
use crate::classical::group_inverse;
use crate::error::{Error, Result};
use crate::float_la::svd;
use crate::matcore::{index, inverse, make_context, one_inverse, outer_from_full_rank, MetricMatrix, Tolerance, WeightedContext};
use crate::matrix::Matrix;
use crate::scalar::{Backend, Scalar};

const TRIES: usize = 200;

/// Shape and index targets for [`Generator::context`].
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ContextShape {
    pub m: usize,
    pub n: usize,
    /// `rank((AW)^κ)`; at most `min(m, n)`.
    pub r: usize,
    pub kappa: usize,
}

pub struct Generator {
    rng: ChaCha8Rng,
    /// Entries are drawn from `[-bound, bound]` (real and imaginary parts).
    pub bound: i64,
    /// Probability that an entry gets a nonzero imaginary part.
    pub complex_rate: f64,
}

/// Inverse of a unit upper triangular matrix by back substitution.
fn unit_upper_inverse<T: Scalar>(u: &Matrix<T>) -> Matrix<T> {
    let n = u.rows();
    let mut x = Matrix::<T>::identity(n);
    for j in 0..n {
        for i in (0..j).rev() {
            let mut acc = T::zero();
            for p in i + 1..=j {
                acc.mul_acc(&u[(i, p)], &x[(p, j)]);
            }
            x[(i, j)] = acc.neg();
        }
    }
    x
}

impl Generator {
    pub fn new(seed: u64) -> Self {
        Generator {
            rng: ChaCha8Rng::seed_from_u64(seed),
            bound: 2,
            complex_rate: 0.3,
        }
    }

    pub fn usize_in(&mut self, lo: usize, hi: usize) -> usize {
        self.rng.random_range(lo..=hi)
    }

    pub fn coin(&mut self, p: f64) -> bool {
        self.rng.random_bool(p)
    }

    fn int(&mut self, bound: i64) -> i64 {
        self.rng.random_range(-bound..=bound)
    }

    pub fn entry<T: Scalar>(&mut self, bound: i64) -> T {
        let re = self.int(bound);
        let im = if self.rng.random_bool(self.complex_rate) { self.int(bound) } else { 0 };
        T::from_i64(re, im)
    }

    pub fn matrix<T: Scalar>(&mut self, rows: usize, cols: usize) -> Matrix<T> {
        let b = self.bound;
        Matrix::from_fn(rows, cols, |_, _| self.entry(b))
    }

    /// Random matrix of exact rank `r` as a product of random full-rank factors.
    pub fn matrix_of_rank<T: Scalar>(&mut self, rows: usize, cols: usize, r: usize, tol: &Tolerance) -> Matrix<T> {
        loop {
            let f = self.matrix::<T>(rows, r);
            let g = self.matrix::<T>(r, cols);
            let a = &f * &g;
            if crate::matcore::rank(&a, tol) == r {
                return a;
            }
        }
    }

    /// Unit lower times unit upper triangular, so the determinant is one and
    /// the inverse is again a Gaussian-integer matrix.
    pub fn unimodular<T: Scalar>(&mut self, n: usize) -> (Matrix<T>, Matrix<T>) {
        let mut l = Matrix::<T>::identity(n);
        let mut u = Matrix::<T>::identity(n);
        for i in 0..n {
            for j in 0..i {
                l[(i, j)] = self.entry(1);
                u[(j, i)] = self.entry(1);
            }
        }
        let p = &l * &u;
        let pinv = &unit_upper_inverse(&u) * &unit_upper_inverse(&l.transpose()).transpose();
        (p, pinv)
    }

    pub fn unitary(&mut self, n: usize) -> Matrix<Complex64> {
        let z = Matrix::from_fn(n, n, |_, _| {
            Complex64::new(self.rng.random_range(-1.0..1.0), self.rng.random_range(-1.0..1.0))
        });
        svd(&z).u
    }

    /// An invertible matrix with its inverse: unimodular on the exact
    /// backend, unitary on the float backend.
    pub fn invertible_pair<T: Scalar>(&mut self, n: usize) -> (Matrix<T>, Matrix<T>) {
        match T::BACKEND {
            Backend::Exact => self.unimodular(n),
            Backend::Float => {
                let u = self.unitary(n);
                (u.map(|z| T::from_c64(*z)), u.adjoint().map(|z| T::from_c64(*z)))
            }
        }
    }

    /// Exact: unimodular. Float: `U·diag(d)·V` with unitary `U`, `V` and
    /// `d ∈ [1, 2]`, so the condition number stays below two.
    pub fn well_conditioned<T: Scalar>(&mut self, n: usize) -> Matrix<T> {
        match T::BACKEND {
            Backend::Exact => self.unimodular(n).0,
            Backend::Float => {
                let u = self.unitary(n);
                let v = self.unitary(n);
                let d: Vec<f64> = (0..n).map(|_| self.rng.random_range(1.0..2.0)).collect();
                let ud = Matrix::from_fn(n, n, |i, j| u[(i, j)] * d[j]);
                (&ud * &v).map(|z| T::from_c64(*z))
            }
        }
    }

    /// `B*B + I`, Hermitian positive definite.
    pub fn pd_metric<T: Scalar>(&mut self, n: usize, tol: &Tolerance) -> MetricMatrix<T> {
        let b = self.matrix::<T>(n, n);
        let m = &b.adjoint() * &b + Matrix::identity(n);
        MetricMatrix::new(m, tol).expect("B*B + I is a valid metric")
    }

    /// A context with the requested shape, core rank and κ.
    pub fn context<T: Scalar>(&mut self, shape: ContextShape, tol: &Tolerance) -> Result<WeightedContext<T>> {
        let ContextShape { m, n, r, kappa } = shape;
        let (sm, sn) = (m - r.min(m), n - r.min(n));
        let feasible = match (sm, sn) {
            (0, 0) => kappa == 0,
            (0, _) | (_, 0) => kappa == 1,
            _ => kappa >= 1 && kappa <= sm.min(sn) + usize::from(sm != sn),
        };
        if r > m.min(n) || !feasible {
            return Err(Error::precondition("context", format!("no {m}x{n} context with r = {r}, κ = {kappa}")));
        }
        for _ in 0..TRIES {
            let (p, pinv) = self.invertible_pair::<T>(m);
            let (q, qinv) = self.invertible_pair::<T>(n);
            let a1 = self.well_conditioned::<T>(r);
            let w1 = self.well_conditioned::<T>(r);
            let a2 = self.matrix::<T>(r, sn);
            let w2 = self.matrix::<T>(r, sm);
            let (a3, w3) = self.nilpotent_pair::<T>(sm, sn, kappa);
            let a = &(&p * &Matrix::block(&a1, &a2, &Matrix::zeros(sm, r), &a3)) * &qinv;
            let w = &(&q * &Matrix::block(&w1, &w2, &Matrix::zeros(sn, r), &w3)) * &pinv;
            if w.is_zero() {
                continue;
            }
            match make_context(a, w, tol) {
                Ok(ctx) if ctx.kappa == kappa => return Ok(ctx),
                _ => {}
            }
        }
        Err(Error::precondition("context", format!("failed to hit κ = {kappa} for {m}x{n}, r = {r}")))
    }

    /// `(A₃, W₃)` with `A₃W₃`, `W₃A₃` nilpotent and the larger of their
    /// indices equal to `kappa`: `A₃ = S·J·T⁻¹`, `W₃ = T·E·S⁻¹` with `J` a
    /// broken superdiagonal and `E` a partial identity.
    fn nilpotent_pair<T: Scalar>(&mut self, sm: usize, sn: usize, kappa: usize) -> (Matrix<T>, Matrix<T>) {
        let (j, e) = if sm <= sn {
            self.shift_pair::<T>(sm, sn, kappa)
        } else {
            let (j, e) = self.shift_pair::<T>(sn, sm, kappa);
            (e, j)
        };
        let (s, sinv) = self.invertible_pair::<T>(sm);
        let (t, tinv) = self.invertible_pair::<T>(sn);
        (&(&s * &j) * &tinv, &(&t * &e) * &sinv)
    }

    /// `J` (`p×q`, `p ≤ q`) and `E = [I; 0]` (`q×p`). Links `(i, i+1)` with
    /// `i + 1 < p` form runs of `kappa − 1`, so `JE` and `EJ` have index
    /// `kappa`; for `kappa = p + 1` the extra link `(p−1, p)` lengthens the
    /// run of `EJ` alone.
    fn shift_pair<T: Scalar>(&mut self, p: usize, q: usize, kappa: usize) -> (Matrix<T>, Matrix<T>) {
        let mut j = Matrix::<T>::zeros(p, q);
        let full = kappa > p;
        for i in 0..p {
            let link = if i + 1 < p {
                full || (i + 1) % kappa != 0
            } else {
                full && i + 1 < q
            };
            if link {
                j[(i, i + 1)] = T::from_i64(1 + self.int(1).abs(), 0);
            }
        }
        let mut e = Matrix::<T>::zeros(q, p);
        for i in 0..p {
            e[(i, i)] = T::one();
        }
        (j, e)
    }

    /// Random `m×n` context with sizes in `[lo, hi]` and `κ ≤ kmax`, drawn
    /// through [`Generator::context`].
    pub fn random_context<T: Scalar>(&mut self, lo: usize, hi: usize, kmax: usize, tol: &Tolerance) -> WeightedContext<T> {
        loop {
            let m = self.usize_in(lo, hi);
            let n = self.usize_in(lo, hi);
            let r = self.usize_in(0, m.min(n));
            let kappa = if r == m && r == n { 0 } else { self.usize_in(1, kmax) };
            if let Ok(ctx) = self.context(ContextShape { m, n, r, kappa }, tol) {
                return ctx;
            }
        }
    }

    /// `S·diag(D, 0)·S⁻¹` with `S`, `D` from [`Generator::well_conditioned`]:
    /// index at most one.
    pub fn index_one<T: Scalar>(&mut self, n: usize, r: usize) -> Matrix<T> {
        let s = self.well_conditioned::<T>(n);
        let sinv = inverse(&s, &Tolerance::default()).expect("well-conditioned matrix is invertible");
        let d = self.well_conditioned::<T>(r);
        let mid = Matrix::block(&d, &Matrix::zeros(r, n - r), &Matrix::zeros(n - r, r), &Matrix::zeros(n - r, n - r));
        &(&s * &mid) * &sinv
    }

    /// `S·diag(D, N)·S⁻¹` with `N` nilpotent of index exactly `k`: a square
    /// matrix of index `k`. The core rank is random when `k > 0`.
    pub fn of_index<T: Scalar>(&mut self, n: usize, k: usize) -> Matrix<T> {
        assert!(k <= n, "index {k} exceeds the dimension {n}");
        let s = if k == 0 { 0 } else { self.usize_in(k, n) };
        let r = n - s;
        let mut nil = Matrix::<T>::zeros(s, s);
        for i in 0..s.saturating_sub(1) {
            if (i + 1) % k != 0 {
                nil[(i, i + 1)] = self.entry::<T>(1).add(&T::from_i64(2, 0));
            }
        }
        let d = self.well_conditioned::<T>(r);
        let sm = self.well_conditioned::<T>(n);
        let sinv = inverse(&sm, &Tolerance::default()).expect("well-conditioned matrix is invertible");
        let mid = Matrix::block(&d, &Matrix::zeros(r, s), &Matrix::zeros(s, r), &nil);
        &(&sm * &mid) * &sinv
    }

    /// Idempotent `F(GF)⁻¹G` of rank `r`.
    pub fn idempotent<T: Scalar>(&mut self, n: usize, r: usize, tol: &Tolerance) -> Matrix<T> {
        loop {
            let f = self.matrix::<T>(n, r);
            let g = self.matrix::<T>(r, n);
            if let Ok(p) = outer_from_full_rank(&f, &g, &Matrix::identity(n), tol) {
                return p;
            }
        }
    }

    /// A pair with `A² = BA` and both of index at most one. Alternates
    /// between `B = A` idempotent and `B = A + Y(I − AA#)` for index-one `A`.
    pub fn rol_pair_m<T: Scalar>(&mut self, n: usize, tol: &Tolerance) -> (Matrix<T>, Matrix<T>) {
        loop {
            let r = self.usize_in(0, n);
            if self.coin(0.25) {
                let a = self.idempotent::<T>(n, r, tol);
                return (a.clone(), a);
            }
            let a = self.index_one::<T>(n, r);
            let ag = group_inverse(&a, tol).expect("index-one matrix has a group inverse");
            let y = self.matrix::<T>(n, n);
            let b = &a + &(&y * &(Matrix::identity(n) - &a * &ag));
            if index(&b, tol).map(|k| k <= 1).unwrap_or(false) {
                return (a, b);
            }
        }
    }

    /// A pair with `BA = B²` and both of index at most one:
    /// `A = B + (I − B#B)Y`.
    pub fn rol_pair_n<T: Scalar>(&mut self, n: usize, tol: &Tolerance) -> (Matrix<T>, Matrix<T>) {
        loop {
            let r = self.usize_in(0, n);
            let b = self.index_one::<T>(n, r);
            let bg = group_inverse(&b, tol).expect("index-one matrix has a group inverse");
            let y = self.matrix::<T>(n, n);
            let a = &b + &(&(Matrix::identity(n) - &bg * &b) * &y);
            if index(&a, tol).map(|k| k <= 1).unwrap_or(false) {
                return (a, b);
            }
        }
    }

    /// A `{1^W}` member: a {1}-inverse of `WAW` with a random free block,
    /// retried until `AWXWA = A` holds.
    pub fn w_inner<T: Scalar>(&mut self, ctx: &WeightedContext<T>) -> Result<Matrix<T>> {
        let tol = &ctx.tol;
        let waw = ctx.waw();
        let r = crate::matcore::rank(&waw, tol);
        let env = Env::weighted(ctx);
        for _ in 0..TRIES.min(20) {
            let l = self.matrix::<T>(ctx.m() - r, ctx.n() - r);
            let x = one_inverse(&waw, Some(&l), tol)?;
            if check(Label::E1W, &ctx.a, &x, &env)?.holds {
                return Ok(x);
            }
        }
        Err(Error::nonexistent("{1^W} member", "rank(WAW) < rank(A)"))
    }

    /// A `{2^W}` member of rank `s`: `F(G·WAW·F)⁻¹G` with random `F`, `G`.
    pub fn w_outer<T: Scalar>(&mut self, ctx: &WeightedContext<T>, s: usize) -> Result<Matrix<T>> {
        let waw = ctx.waw();
        for _ in 0..TRIES {
            let f = self.matrix::<T>(ctx.m(), s);
            let g = self.matrix::<T>(s, ctx.n());
            if let Ok(x) = outer_from_full_rank(&f, &g, &waw, &ctx.tol) {
                return Ok(x);
            }
        }
        Err(Error::nonexistent("{2^W} member", format!("rank(WAW) < {s}")))
    }

    /// A matrix of the same shape with one entry moved by `delta`.
    pub fn perturb<T: Scalar>(&mut self, x: &Matrix<T>, delta: T) -> Matrix<T> {
        let mut y = x.clone();
        let i = self.usize_in(0, x.rows() - 1);
        let j = self.usize_in(0, x.cols() - 1);
        y[(i, j)] = y[(i, j)].add(&delta);
        y
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matcore::rank;
    use crate::scalar::Q;

    #[test]
    fn unimodular_inverse_is_exact() {
        let mut g = Generator::new(1);
        for n in 0..6 {
            let (p, pinv) = g.unimodular::<Q>(n);
            assert_eq!(&p * &pinv, Matrix::identity(n));
        }
    }

    #[test]
    fn unitary_is_unitary() {
        let mut g = Generator::new(2);
        let u = g.unitary(5);
        assert!((&u.adjoint() * &u - Matrix::identity(5)).frobenius() < 1e-12);
    }

    #[test]
    fn contexts_hit_prescribed_kappa() {
        let tol = Tolerance::default();
        let mut g = Generator::new(3);
        for (m, n, r, k) in [(4, 3, 1, 2), (5, 5, 2, 3), (3, 6, 0, 2), (4, 4, 4, 0), (6, 4, 2, 1), (2, 2, 0, 1)] {
            let shape = ContextShape { m, n, r, kappa: k };
            let e = g.context::<Q>(shape, &tol).unwrap();
            assert_eq!((e.m(), e.n(), e.kappa), (m, n, k));
            assert_eq!(rank(&e.aw().pow(k), &tol), r);
            let f = g.context::<Complex64>(shape, &tol).unwrap();
            assert_eq!(f.kappa, k);
        }
    }

    #[test]
    fn every_feasible_shape_is_generated() {
        let tol = Tolerance::default();
        let mut g = Generator::new(6);
        let mut hits = 0;
        for m in 1..=5 {
            for n in 1..=5 {
                for r in 0..=m.min(n) {
                    for kappa in 0..=4 {
                        if let Ok(ctx) = g.context::<Q>(ContextShape { m, n, r, kappa }, &tol) {
                            assert_eq!(ctx.kappa, kappa);
                            hits += 1;
                        }
                    }
                }
            }
        }
        assert!(hits > 100, "{hits}");
    }

    #[test]
    fn rol_pairs_satisfy_their_relation() {
        let tol = Tolerance::default();
        let mut g = Generator::new(4);
        for _ in 0..10 {
            let (a, b) = g.rol_pair_m::<Q>(4, &tol);
            assert_eq!(&a * &a, &b * &a);
            let (a, b) = g.rol_pair_n::<Q>(4, &tol);
            assert_eq!(&b * &a, &b * &b);
        }
    }

    #[test]
    fn weighted_members() {
        let tol = Tolerance::default();
        let mut g = Generator::new(5);
        for _ in 0..10 {
            let ctx = g.random_context::<Q>(2, 5, 3, &tol);
            let env = Env::weighted(&ctx);
            if let Ok(x) = g.w_inner(&ctx) {
                assert!(check(Label::E1W, &ctx.a, &x, &env).unwrap().holds);
            }
            let s = rank(&ctx.waw(), &tol);
            if s > 0 {
                let x = g.w_outer(&ctx, s).unwrap();
                assert!(check(Label::E2W, &ctx.a, &x, &env).unwrap().holds);
            }
        }
    }
}
