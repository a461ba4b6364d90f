//! W-weighted Drazin and core-EP inverses and the `{1,2,3,1ᵏ}^W` /
//! `{1,2,4,ᵏ1}^W` families with their canonical members, parametrizations
//! and recovery formulas.

use crate::axioms::{check, check_all, w1231k_labels, w124k1_labels, Env, Label, VerificationReport};
use crate::classical::{core_ep_scaled, drazin_scaled, moore_penrose, moore_penrose_scaled};
use crate::decomposition::WCepDecomposition;
use crate::error::{Error, Result};
use crate::matcore::{inverse, mat_eq, WeightedContext};
use crate::matrix::Matrix;
use crate::scalar::Scalar;

fn verified<T: Scalar>(
    what: &'static str,
    ctx: &WeightedContext<T>,
    x: Matrix<T>,
    labels: &[Label],
) -> Result<Matrix<T>> {
    let report = check_all(labels, &ctx.a, &x, &Env::weighted(ctx))?;
    if report.overall {
        Ok(x)
    } else {
        let failing: Vec<String> = report.failing().iter().map(Label::to_string).collect();
        Err(Error::verification(what, format!("labels {} do not hold", failing.join(","))))
    }
}

/// `A^{D,W} = A((WA)^D)²`, checked against `((AW)^D)²A` and the defining
/// conditions `ZWAWZ = Z`, `AWZ = ZWA`, `ZW(AW)^{κ+1} = (AW)^κ`.
pub fn w_drazin<T: Scalar>(ctx: &WeightedContext<T>) -> Result<Matrix<T>> {
    let tol = &ctx.tol;
    let wad = drazin_scaled(&ctx.wa(), ctx.scale(), tol)?;
    let awd = drazin_scaled(&ctx.aw(), ctx.scale(), tol)?;
    let x = &(&ctx.a * &wad) * &wad;
    let y = &(&awd * &awd) * &ctx.a;
    if !mat_eq(&x, &y, tol) {
        return Err(Error::verification("W-weighted Drazin inverse", "A((WA)^D)² ≠ ((AW)^D)²A"));
    }
    verified(
        "W-weighted Drazin inverse",
        ctx,
        x,
        &[Label::E2W, Label::E5W, Label::E1kW(ctx.kappa)],
    )
}

/// `A^{†◯,W} = A((WA)^{†◯})²`.
pub fn w_core_ep<T: Scalar>(ctx: &WeightedContext<T>) -> Result<Matrix<T>> {
    let cep = core_ep_scaled(&ctx.wa(), ctx.scale(), &ctx.tol)?;
    let x = &(&ctx.a * &cep) * &cep;
    verified(
        "W-weighted core-EP inverse",
        ctx,
        x,
        &[Label::E3W, Label::E6W, Label::E1kW(ctx.kappa)],
    )
}

pub fn is_w1231k<T: Scalar>(ctx: &WeightedContext<T>, x: &Matrix<T>, k: usize) -> Result<VerificationReport> {
    check_all(&w1231k_labels(k), &ctx.a, x, &Env::weighted(ctx))
}

pub fn is_w124k1<T: Scalar>(ctx: &WeightedContext<T>, x: &Matrix<T>, k: usize) -> Result<VerificationReport> {
    check_all(&w124k1_labels(k), &ctx.a, x, &Env::weighted(ctx))
}

/// Shared pieces of the family formulas.
struct FamilyParts<T> {
    /// `(WAW)†`, the `{1,2,3}^W` and `{1,2,4}^W` base member.
    p: Matrix<T>,
    waw: Matrix<T>,
    adw: Matrix<T>,
}

impl<T: Scalar> FamilyParts<T> {
    fn new(ctx: &WeightedContext<T>) -> Result<Self> {
        let waw = ctx.waw();
        Ok(FamilyParts {
            p: moore_penrose_scaled(&waw, ctx.scale() * ctx.w.frobenius(), &ctx.tol),
            adw: w_drazin(ctx)?,
            waw,
        })
    }

    fn upper(&self, m: usize) -> Matrix<T> {
        let pw = &self.p * &self.waw;
        let corr = &(&(&(Matrix::identity(m) - &pw) * &self.adw) * &self.waw) * &self.p;
        &self.p + &corr
    }

    fn lower(&self, n: usize) -> Matrix<T> {
        let wp = &self.waw * &self.p;
        let corr = &(&(&self.p * &self.waw) * &self.adw) * &(Matrix::identity(n) - &wp);
        &self.p + &corr
    }

    /// `(WAW)† − (WAW)†·WAW·A^{D,W}·WAW·(WAW)†`
    fn kernel_factor(&self) -> Matrix<T> {
        let t = &(&(&(&self.p * &self.waw) * &self.adw) * &self.waw) * &self.p;
        &self.p - &t
    }
}

/// `A^{⊖,W} = P + (I − P·WAW)·A^{D,W}·WAW·P` with `P = (WAW)†`.
pub fn canonical_w1231k<T: Scalar>(ctx: &WeightedContext<T>) -> Result<Matrix<T>> {
    let parts = FamilyParts::new(ctx)?;
    verified("canonical {1,2,3,1^k}^W member", ctx, parts.upper(ctx.m()), &w1231k_labels(ctx.kappa))
}

/// `A_{⊖,W} = P + P·WAW·A^{D,W}·(I − WAW·P)` with `P = (WAW)†`.
pub fn canonical_w124k1<T: Scalar>(ctx: &WeightedContext<T>) -> Result<Matrix<T>> {
    let parts = FamilyParts::new(ctx)?;
    verified("canonical {1,2,4,k1}^W member", ctx, parts.lower(ctx.n()), &w124k1_labels(ctx.kappa))
}

/// `A^{⊖,W} + (I − (AW)†AW)·M·((WAW)† − (WAW)†WAW·A^{D,W}·WAW(WAW)†)`.
pub fn family_member_w1231k<T: Scalar>(ctx: &WeightedContext<T>, mparam: &Matrix<T>) -> Result<Matrix<T>> {
    let m = ctx.m();
    if mparam.shape() != (m, m) {
        return Err(Error::shape("family_member_w1231k", format!("parameter must be {m}x{m}")));
    }
    let parts = FamilyParts::new(ctx)?;
    let aw = ctx.aw();
    let proj = Matrix::identity(m) - &moore_penrose_scaled(&aw, ctx.scale(), &ctx.tol) * &aw;
    let x = parts.upper(m) + &(&proj * mparam) * &parts.kernel_factor();
    verified("{1,2,3,1^k}^W family member", ctx, x, &w1231k_labels(ctx.kappa))
}

/// `A_{⊖,W} + ((WAW)† − (WAW)†WAW·A^{D,W}·WAW(WAW)†)·N·(I − WA(WA)†)`.
pub fn family_member_w124k1<T: Scalar>(ctx: &WeightedContext<T>, nparam: &Matrix<T>) -> Result<Matrix<T>> {
    let n = ctx.n();
    if nparam.shape() != (n, n) {
        return Err(Error::shape("family_member_w124k1", format!("parameter must be {n}x{n}")));
    }
    let parts = FamilyParts::new(ctx)?;
    let wa = ctx.wa();
    let proj = Matrix::identity(n) - &wa * &moore_penrose_scaled(&wa, ctx.scale(), &ctx.tol);
    let x = parts.lower(n) + &(&parts.kernel_factor() * nparam) * &proj;
    verified("{1,2,4,k1}^W family member", ctx, x, &w124k1_labels(ctx.kappa))
}

/// The `(1,2)` block forced by Hermitian-ness of `WAWX` once `X₄` is fixed:
/// `X₂ = −(W₁C)⁻¹(W₁E + W₂N)X₄`.
pub fn block_form_x2(dec: &WCepDecomposition, x4: &Matrix<num_complex::Complex64>) -> Result<Matrix<num_complex::Complex64>> {
    let tol = &dec.tol;
    let w1c = &dec.w1 * &dec.c;
    let inv = inverse(&w1c, tol)?;
    let rhs = &(&dec.w1 * &dec.e) + &(&dec.w2 * &dec.nblk);
    Ok(-(&(&inv * &rhs) * x4))
}

/// Assemble `U·[[(W₁A₁W₁)⁻¹, X₂], [0, X₄]]·V*` after checking
/// `X₄ ∈ (W₃N){1,2,3}` and `X₂ = X₂W₃NX₄`, then verify the result is a
/// `{1,2,3,1^κ}^W` member.
pub fn block_form_w1231k(
    ctx: &WeightedContext<num_complex::Complex64>,
    dec: &WCepDecomposition,
    x4: &Matrix<num_complex::Complex64>,
    x2: &Matrix<num_complex::Complex64>,
) -> Result<Matrix<num_complex::Complex64>> {
    let tol = &dec.tol;
    let r = dec.r;
    let (m, n) = (dec.u.rows(), dec.v.rows());
    if x4.shape() != (m - r, n - r) || x2.shape() != (r, n - r) {
        return Err(Error::shape(
            "block_form_w1231k",
            format!("X4 must be {}x{}, X2 must be {}x{}", m - r, n - r, r, n - r),
        ));
    }
    let w3n = dec.w3n();
    let env = Env::plain(*tol);
    let rep = check_all(&[Label::E1, Label::E2, Label::E3], &w3n, x4, &env)?;
    if !rep.overall {
        return Err(Error::precondition("block_form_w1231k", "X4 is not a {1,2,3}-inverse of W3·N"));
    }
    if !mat_eq(&(&(x2 * &w3n) * x4), x2, tol) {
        return Err(Error::precondition("block_form_w1231k", "X2 ≠ X2·W3·N·X4"));
    }
    let x1 = inverse(&(&(&dec.w1 * &dec.a1) * &dec.w1), tol)?;
    let blocks = Matrix::block(&x1, x2, &Matrix::zeros(m - r, r), x4);
    let x = &(&dec.u * &blocks) * &dec.v.adjoint();
    verified("block-form {1,2,3,1^k}^W member", ctx, x, &w1231k_labels(ctx.kappa))
}

/// `(A^{D,W}, A^{D,†,W}, A^{c,†,W})` recovered from any `{1,2,3,1ᵏ}^W` member.
#[derive(Clone, Debug, PartialEq)]
pub struct Recovered<T> {
    pub w_drazin: Matrix<T>,
    pub wdmp: Matrix<T>,
    pub wcmp: Matrix<T>,
}

pub fn recover_from_member<T: Scalar>(ctx: &WeightedContext<T>, x: &Matrix<T>, k: usize) -> Result<Recovered<T>> {
    if !is_w1231k(ctx, x, k)?.overall {
        return Err(Error::precondition("recover_from_member", format!("X is not a {{1,2,3,1^{k}}}^W member")));
    }
    let tol = &ctx.tol;
    let (a, w) = (&ctx.a, &ctx.w);
    let xw = x * w;
    let wx = w * x;
    let aw = ctx.aw();
    let wa = ctx.wa();
    let ap = moore_penrose(a, tol);
    let adw = &(&xw.pow(k + 2) * &aw.pow(k)) * a;
    let wdmp = &(&wx.pow(k + 1) * &wa.pow(k + 1)) * &ap;
    let wcmp = &(&ap * a) * &wdmp;
    let reference = w_drazin(ctx)?;
    if !mat_eq(&adw, &reference, tol) {
        return Err(Error::verification("recover_from_member", "recovered A^{D,W} differs from the direct one"));
    }
    Ok(Recovered {
        w_drazin: adw,
        wdmp,
        wcmp,
    })
}

/// Outcome of the EP-type checks for a weighted pair.
#[derive(Clone, Debug, PartialEq)]
pub struct EpReport {
    /// `(XW)^k(AW)^k` is Hermitian.
    pub generalized_ep: bool,
    /// `(AW)^j(AW)† = (AW)†(AW)^j` with `j = ind(AW)`.
    pub k_ep_aw: bool,
    /// `(WA)^j(WA)† = (WA)†(WA)^j` with `j = ind(WA)`.
    pub k_ep_wa: bool,
    pub collapse: Collapse,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Collapse {
    /// Both k-EP flags hold.
    pub applicable: bool,
    /// `(WAW)† = A^{⊖,W}`
    pub pinv_eq_upper: bool,
    /// `A^{⊖,W} = A_{⊖,W}`
    pub upper_eq_lower: bool,
}

fn k_ep<T: Scalar>(b: &Matrix<T>, k: usize, scale: f64, tol: &crate::matcore::Tolerance) -> bool {
    let bk = b.pow(k);
    let bp = moore_penrose_scaled(b, scale, tol);
    mat_eq(&(&bk * &bp), &(&bp * &bk), tol)
}

pub fn ep_checks<T: Scalar>(ctx: &WeightedContext<T>, x: &Matrix<T>, k: usize) -> Result<EpReport> {
    if !is_w1231k(ctx, x, k)?.overall {
        return Err(Error::precondition("ep_checks", format!("X is not a {{1,2,3,1^{k}}}^W member")));
    }
    let tol = &ctx.tol;
    let g = &(x * &ctx.w).pow(k) * &ctx.aw().pow(k);
    let generalized_ep = mat_eq(&g, &g.adjoint(), tol);
    let k_ep_aw = k_ep(&ctx.aw(), ctx.ind_aw, ctx.scale(), tol);
    let k_ep_wa = k_ep(&ctx.wa(), ctx.ind_wa, ctx.scale(), tol);
    let upper = canonical_w1231k(ctx)?;
    let lower = canonical_w124k1(ctx)?;
    let p = moore_penrose_scaled(&ctx.waw(), ctx.scale() * ctx.w.frobenius(), tol);
    Ok(EpReport {
        generalized_ep,
        k_ep_aw,
        k_ep_wa,
        collapse: Collapse {
            applicable: k_ep_aw && k_ep_wa,
            pinv_eq_upper: mat_eq(&p, &upper, tol),
            upper_eq_lower: mat_eq(&upper, &lower, tol),
        },
    })
}

/// Whether `X` satisfies each condition set of the W-weighted core inverse
/// characterization at `κ ≤ 1`, in the order (ii), (iii), (iv), (v).
pub fn w_core_condition_sets<T: Scalar>(ctx: &WeightedContext<T>, x: &Matrix<T>) -> Result<[bool; 4]> {
    use Label::*;
    let env = Env::weighted(ctx);
    let mut holds = std::collections::HashMap::new();
    for l in [E1WAW, E2W, E3W, E1kW(1), E6W] {
        holds.insert(l, check(l, &ctx.a, x, &env)?.holds);
    }
    let all = |ls: &[Label]| ls.iter().all(|l| holds[l]);
    Ok([
        all(&[E1WAW, E2W, E3W, E1kW(1), E6W]),
        all(&[E1WAW, E3W, E6W]),
        all(&[E3W, E2W, E1kW(1)]),
        all(&[E3W, E1kW(1), E6W]),
    ])
}


#[cfg(test)]
mod block_tests {
    use super::*;
    use crate::decomposition::wcep_decompose;
    use crate::generate::{ContextShape, Generator};
    use crate::matcore::{make_context, Tolerance};
    use num_complex::Complex64;

    type C = Complex64;

    #[test]
    fn forced_x2_gives_members() {
        let tol = Tolerance::default();
        let mut g = Generator::new(21);
        let mut zero_x2_failures = 0;
        for _ in 0..40 {
            let ctx = g.random_context::<C>(1, 6, 3, &tol);
            let d = wcep_decompose(&ctx).unwrap();
            let x4 = d.w3n_pinv();
            let x2 = block_form_x2(&d, &x4).unwrap();
            let x = block_form_w1231k(&ctx, &d, &x4, &x2).unwrap();
            assert!(is_w1231k(&ctx, &x, ctx.kappa).unwrap().overall);
            match block_form_w1231k(&ctx, &d, &x4, &Matrix::zeros(d.r, ctx.n() - d.r)) {
                Ok(_) => {}
                Err(Error::Verification { .. }) => zero_x2_failures += 1,
                Err(e) => panic!("unexpected {e}"),
            }
        }
        assert!(zero_x2_failures > 0);
    }

    #[test]
    fn zero_x4_when_w3n_vanishes() {
        let tol = Tolerance::default();
        let mut g = Generator::new(22);
        let ctx = g.context::<C>(ContextShape { m: 4, n: 3, r: 2, kappa: 1 }, &tol).unwrap();
        let d = wcep_decompose(&ctx).unwrap();
        assert!(d.w3n().frobenius() < 1e-12);
        let z4 = Matrix::zeros(2, 1);
        let x = block_form_w1231k(&ctx, &d, &z4, &Matrix::zeros(2, 1)).unwrap();
        assert!(mat_eq(&x, &w_core_ep(&ctx).unwrap(), &tol));
    }

    #[test]
    fn identity_context_block_form() {
        let tol = Tolerance::default();
        let ctx = make_context(Matrix::<C>::identity(3), Matrix::identity(3), &tol).unwrap();
        let d = wcep_decompose(&ctx).unwrap();
        assert_eq!(d.r, 3);
        let x = block_form_w1231k(&ctx, &d, &Matrix::zeros(0, 0), &Matrix::zeros(3, 0)).unwrap();
        assert!(mat_eq(&x, &Matrix::identity(3), &tol));
    }

    #[test]
    fn rejects_bad_x4() {
        let tol = Tolerance::default();
        let mut g = Generator::new(23);
        let ctx = g.context::<C>(ContextShape { m: 4, n: 4, r: 1, kappa: 2 }, &tol).unwrap();
        let d = wcep_decompose(&ctx).unwrap();
        let bad = Matrix::from_fn(3, 3, |i, j| C::new((i + 2 * j) as f64, 1.0));
        assert!(matches!(
            block_form_w1231k(&ctx, &d, &bad, &Matrix::zeros(1, 3)),
            Err(Error::Precondition { .. })
        ));
    }
}
