//! Weighted core-EP decomposition of a pair `(A, W)` on the float backend.
//!
//! `A = U[[A₁, A₂], [0, A₃]]V*` and `W = V[[W₁, W₂], [0, W₃]]U*` with `U`, `V`
//! unitary, `A₁`, `W₁` invertible r×r and `A₃W₃`, `W₃A₃` nilpotent. The
//! leading columns of `U` and `V` span `R((AW)^κ)` and `R((WA)^κ)`.

use num_complex::Complex64;

use crate::classical::moore_penrose_scaled;
use crate::error::{Error, Result};
use crate::float_la::{complement_basis, range_basis};
use crate::matcore::{inverse, Tolerance, WeightedContext};
use crate::matrix::Matrix;
use crate::scalar::{Backend, Scalar};

type M = Matrix<Complex64>;

#[derive(Clone, Debug)]
pub struct WCepDecomposition {
    pub u: M,
    pub v: M,
    pub r: usize,
    pub kappa: usize,
    pub a1: M,
    pub a2: M,
    pub a3: M,
    pub w1: M,
    pub w2: M,
    pub w3: M,
    /// `A₁W₁`
    pub c: M,
    /// `A₁W₂ + A₂W₃`
    pub e: M,
    /// `A₃W₃`
    pub nblk: M,
    /// `W₁A₁`
    pub rblk: M,
    /// `W₁A₂ + W₂A₃`
    pub sblk: M,
    /// `W₃A₃`
    pub tblk: M,
    /// `Σ_{i<κ} C^{κ−i} E N^i`
    pub ehat: M,
    /// `(A₁A₁* + A₂(I − A₃†A₃)A₂*)⁻¹`
    pub delta: M,
    /// `A₃†`
    pub a3_pinv: M,
    /// `‖A‖_F‖W‖_F`
    pub scale: f64,
    pub tol: Tolerance,
}

/// Relative residuals of the structural identities of a decomposition.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct DecompositionResiduals {
    pub a_reconstruction: f64,
    pub w_reconstruction: f64,
    pub u_unitarity: f64,
    pub v_unitarity: f64,
    /// `‖U₂*AV₁‖` and `‖V₂*WU₁‖`, combined.
    pub lower_left: f64,
    /// `‖N^κ‖` and `‖T^κ‖`, combined, relative to `(‖A‖‖W‖)^κ`.
    pub nilpotency: f64,
}

impl DecompositionResiduals {
    pub fn max(&self) -> f64 {
        [
            self.a_reconstruction,
            self.w_reconstruction,
            self.u_unitarity,
            self.v_unitarity,
            self.lower_left,
            self.nilpotency,
        ]
        .into_iter()
        .fold(0.0, f64::max)
    }
}

fn rel(lhs: &M, rhs: &M) -> f64 {
    (lhs - rhs).frobenius() / rhs.frobenius().max(1.0)
}

fn cols(q: &M, r0: usize, r1: usize) -> M {
    q.submatrix(0, q.rows(), r0, r1)
}

/// Build the decomposition. Only the float backend is supported; an exact
/// context yields [`Error::FloatOnly`].
pub fn wcep_decompose<T: Scalar>(ctx: &WeightedContext<T>) -> Result<WCepDecomposition> {
    if T::BACKEND == Backend::Exact {
        return Err(Error::FloatOnly("weighted core-EP decomposition"));
    }
    let tol = ctx.tol;
    let a = ctx.a.to_float();
    let w = ctx.w.to_float();
    let k = ctx.kappa;
    let floor = (a.frobenius() * w.frobenius()).powi(k as i32);
    let aw = &a * &w;
    let wa = &w * &a;
    let u1 = range_basis(&aw.pow(k), floor, &tol);
    let v1 = range_basis(&wa.pow(k), floor, &tol);
    if u1.cols() != v1.cols() {
        return Err(Error::verification(
            "wcep_decompose",
            format!("rank((AW)^k) = {} but rank((WA)^k) = {}", u1.cols(), v1.cols()),
        ));
    }
    let r = u1.cols();
    let u = u1.hstack(&complement_basis(&u1));
    let v = v1.hstack(&complement_basis(&v1));
    let (m, n) = (a.rows(), a.cols());
    let at = &(&u.adjoint() * &a) * &v;
    let wt = &(&v.adjoint() * &w) * &u;
    let a1 = at.submatrix(0, r, 0, r);
    let a2 = at.submatrix(0, r, r, n);
    let a3 = at.submatrix(r, m, r, n);
    let w1 = wt.submatrix(0, r, 0, r);
    let w2 = wt.submatrix(0, r, r, m);
    let w3 = wt.submatrix(r, n, r, m);
    if r > 0 {
        inverse(&a1, &tol).map_err(|_| Error::verification("wcep_decompose", "A1 is singular"))?;
        inverse(&w1, &tol).map_err(|_| Error::verification("wcep_decompose", "W1 is singular"))?;
    }
    let c = &a1 * &w1;
    let e = &(&a1 * &w2) + &(&a2 * &w3);
    let nblk = &a3 * &w3;
    let rblk = &w1 * &a1;
    let sblk = &(&w1 * &a2) + &(&w2 * &a3);
    let tblk = &w3 * &a3;
    let mut ehat = M::zeros(r, m - r);
    for i in 0..k {
        ehat = ehat + &(&c.pow(k - i) * &e) * &nblk.pow(i);
    }
    let a_norm = a.frobenius();
    let a3p = moore_penrose_scaled(&a3, a_norm, &tol);
    let proj = M::identity(n - r) - &a3p * &a3;
    let gram = &a1 * &a1.adjoint() + &(&a2 * &proj) * &a2.adjoint();
    let delta = inverse(&gram, &tol)?;
    let dec = WCepDecomposition {
        u,
        v,
        r,
        kappa: k,
        a1,
        a2,
        a3,
        w1,
        w2,
        w3,
        c,
        e,
        nblk,
        rblk,
        sblk,
        tblk,
        ehat,
        delta,
        a3_pinv: a3p,
        scale: ctx.scale(),
        tol,
    };
    let res = dec.residuals(&a, &w);
    if res.max() > tol.eq {
        return Err(Error::verification(
            "wcep_decompose",
            format!("structural residual {:.3e} exceeds {:.1e}", res.max(), tol.eq),
        ));
    }
    Ok(dec)
}

impl WCepDecomposition {
    pub fn m(&self) -> usize {
        self.u.rows()
    }

    pub fn n(&self) -> usize {
        self.v.rows()
    }

    /// `W₃N = W₃A₃W₃`
    pub fn w3n(&self) -> M {
        &self.w3 * &self.nblk
    }

    /// `(W₃N)†`, a `{1,2,3}`-inverse of `W₃N`.
    pub fn w3n_pinv(&self) -> M {
        moore_penrose_scaled(&self.w3n(), self.scale * self.w3.frobenius(), &self.tol)
    }

    /// `U·[[A₁, A₂], [0, A₃]]·V*`
    pub fn reconstruct_a(&self) -> M {
        let z = M::zeros(self.m() - self.r, self.r);
        &(&self.u * &M::block(&self.a1, &self.a2, &z, &self.a3)) * &self.v.adjoint()
    }

    /// `V·[[W₁, W₂], [0, W₃]]·U*`
    pub fn reconstruct_w(&self) -> M {
        let z = M::zeros(self.n() - self.r, self.r);
        &(&self.v * &M::block(&self.w1, &self.w2, &z, &self.w3)) * &self.u.adjoint()
    }

    pub fn residuals(&self, a: &M, w: &M) -> DecompositionResiduals {
        let (m, n, r, k) = (self.m(), self.n(), self.r, self.kappa);
        let u2 = cols(&self.u, r, m);
        let v1 = cols(&self.v, 0, r);
        let u1 = cols(&self.u, 0, r);
        let v2 = cols(&self.v, r, n);
        let ll_a = (&(&u2.adjoint() * a) * &v1).frobenius() / a.frobenius().max(1.0);
        let ll_w = (&(&v2.adjoint() * w) * &u1).frobenius() / w.frobenius().max(1.0);
        let scale = (a.frobenius() * w.frobenius()).powi(k as i32).max(1.0);
        let nil = (self.nblk.pow(k).frobenius() + self.tblk.pow(k).frobenius()) / scale;
        DecompositionResiduals {
            a_reconstruction: rel(&self.reconstruct_a(), a),
            w_reconstruction: rel(&self.reconstruct_w(), w),
            u_unitarity: rel(&(&self.u.adjoint() * &self.u), &M::identity(m)),
            v_unitarity: rel(&(&self.v.adjoint() * &self.v), &M::identity(n)),
            lower_left: ll_a.max(ll_w),
            nilpotency: if k == 0 { 0.0 } else { nil },
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matcore::make_context;
    use crate::scalar::Q;

    #[test]
    fn exact_backend_is_rejected() {
        let a = Matrix::<Q>::from_i64(&[&[1, 1], &[0, 0]]);
        let ctx = make_context(a, Matrix::identity(2), &Tolerance::default()).unwrap();
        assert!(matches!(wcep_decompose(&ctx), Err(Error::FloatOnly(_))));
    }

    #[test]
    fn decomposes_first_example() {
        let a = Matrix::<Complex64>::parse_rows(&[&["1", "i"], &["0", "0"], &["0", "0"]]).unwrap();
        let w = Matrix::<Complex64>::from_i64(&[&[1, 1, 0], &[0, 0, 0]]);
        let ctx = make_context(a.clone(), w.clone(), &Tolerance::default()).unwrap();
        let d = wcep_decompose(&ctx).unwrap();
        assert_eq!(d.r, 1);
        assert!(d.residuals(&a, &w).max() < 1e-12);
        assert_eq!(d.ehat.shape(), (1, 2));
    }

    #[test]
    fn decomposes_wide_example() {
        let a = Matrix::<Complex64>::from_i64(&[
            &[-1, 0, 0, 0, 0],
            &[0, 1, 0, 0, 0],
            &[0, 0, 0, 1, 0],
            &[0, 0, 0, 0, -1],
        ]);
        let w = Matrix::<Complex64>::from_i64(&[&[2, 0, 0, 0], &[0, 1, 0, 0], &[0, 0, 1, 1], &[0, 0, 0, 1], &[0, 0, 0, 0]]);
        let ctx = make_context(a.clone(), w.clone(), &Tolerance::default()).unwrap();
        let d = wcep_decompose(&ctx).unwrap();
        assert_eq!((d.r, d.kappa), (2, 3));
        assert!(d.residuals(&a, &w).max() < 1e-12);
    }
}
