//! W-κ-MP, W-MP-κ and W-MP-κ-MP matrices, the weighted DMP/MPD/CMP helpers,
//! their characterizing systems, block representations and projector
//! identities.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;

use crate::classical::{drazin_scaled, moore_penrose};
use crate::decomposition::WCepDecomposition;
use crate::error::{Error, Result};
use crate::matcore::{
    inverse, mat_eq, null_equal, range_equal, range_subset, rank, srank, SubspaceRelation, Tolerance,
    WeightedContext,
};
use crate::matrix::Matrix;
use crate::scalar::Scalar;
use crate::wfamily::w_drazin;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum IndexMpKind {
    /// `A^{κ,†,W} = (WA)^{κ+1}A†`
    KMp,
    /// `A^{†,κ,W} = A†(AW)^{κ+1}`
    MpK,
    /// `A^{†,κ,†,W} = A†(AW)^{κ+1}AA†`
    MpKMp,
}

impl fmt::Display for IndexMpKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            IndexMpKind::KMp => "k-mp",
            IndexMpKind::MpK => "mp-k",
            IndexMpKind::MpKMp => "mp-k-mp",
        })
    }
}

impl FromStr for IndexMpKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "k-mp" => Ok(IndexMpKind::KMp),
            "mp-k" => Ok(IndexMpKind::MpK),
            "mp-k-mp" => Ok(IndexMpKind::MpKMp),
            other => Err(Error::Parse(format!("unknown index-MP kind `{other}`"))),
        }
    }
}

/// Products shared by every formula in this module.
struct Parts<T> {
    k: usize,
    a: Matrix<T>,
    ap: Matrix<T>,
    aw: Matrix<T>,
    wa: Matrix<T>,
    w: Matrix<T>,
    /// `(WA)^D`
    d: Matrix<T>,
    /// `(AW)^D`
    e: Matrix<T>,
    adw: Matrix<T>,
    /// `A((WA)^D)^{κ+1}`
    g: Matrix<T>,
    /// `((AW)^D)^{κ+1}A`
    h: Matrix<T>,
    /// `‖A‖‖W‖`
    scale: f64,
    tol: Tolerance,
}

impl<T: Scalar> Parts<T> {
    fn new(ctx: &WeightedContext<T>) -> Result<Self> {
        let tol = ctx.tol;
        let k = ctx.kappa;
        let aw = ctx.aw();
        let wa = ctx.wa();
        let d = drazin_scaled(&wa, ctx.scale(), &tol)?;
        let e = drazin_scaled(&aw, ctx.scale(), &tol)?;
        let g = &ctx.a * &d.pow(k + 1);
        let h = &e.pow(k + 1) * &ctx.a;
        Ok(Parts {
            k,
            a: ctx.a.clone(),
            ap: moore_penrose(&ctx.a, &tol),
            aw,
            wa,
            w: ctx.w.clone(),
            d,
            e,
            adw: w_drazin(ctx)?,
            g,
            h,
            scale: ctx.scale(),
            tol,
        })
    }

    fn eq(&self, x: &Matrix<T>, y: &Matrix<T>) -> bool {
        mat_eq(x, y, &self.tol)
    }

    fn k_mp(&self) -> Matrix<T> {
        &self.wa.pow(self.k + 1) * &self.ap
    }

    fn mp_k(&self) -> Matrix<T> {
        &self.ap * &self.aw.pow(self.k + 1)
    }

    fn mp_k_mp(&self) -> Matrix<T> {
        &(&self.mp_k() * &self.a) * &self.ap
    }

    /// `A^{D,†,W} = W·A^{D,W}·W·A·A†`
    fn wdmp(&self) -> Matrix<T> {
        &(&(&(&self.w * &self.adw) * &self.w) * &self.a) * &self.ap
    }

    /// `A^{†,D,W} = A†·A·W·A^{D,W}·W`
    fn wmpd(&self) -> Matrix<T> {
        &(&(&(&self.ap * &self.a) * &self.w) * &self.adw) * &self.w
    }

    fn wcmp(&self) -> Matrix<T> {
        &(&self.ap * &self.a) * &self.wdmp()
    }

    fn compute(&self, which: IndexMpKind) -> Matrix<T> {
        match which {
            IndexMpKind::KMp => self.k_mp(),
            IndexMpKind::MpK => self.mp_k(),
            IndexMpKind::MpKMp => self.mp_k_mp(),
        }
    }
}

fn system_holds<T: Scalar>(which: IndexMpKind, p: &Parts<T>, x: &Matrix<T>) -> bool {
    characterizations(which, p, x).iter().find(|(n, _)| *n == "defining system").map(|(_, b)| *b).unwrap_or(false)
}

fn checked<T: Scalar>(ctx: &WeightedContext<T>, which: IndexMpKind) -> Result<Matrix<T>> {
    let p = Parts::new(ctx)?;
    let x = p.compute(which);
    if !system_holds(which, &p, &x) {
        return Err(Error::verification("index-MP matrix", format!("{which} fails its defining system")));
    }
    Ok(x)
}

/// `(WA)^{κ+1}A†`, checked against `XGX = X`, `GX = A(WA)^D WAA†`,
/// `XA = (WA)^{κ+1}` with `G = A((WA)^D)^{κ+1}`.
pub fn w_k_mp<T: Scalar>(ctx: &WeightedContext<T>) -> Result<Matrix<T>> {
    checked(ctx, IndexMpKind::KMp)
}

/// `A†(AW)^{κ+1}`, checked against `XHX = X`, `XH = A†AW(AW)^D A`,
/// `AX = (AW)^{κ+1}` with `H = ((AW)^D)^{κ+1}A`.
pub fn w_mp_k<T: Scalar>(ctx: &WeightedContext<T>) -> Result<Matrix<T>> {
    checked(ctx, IndexMpKind::MpK)
}

/// `A†(AW)^{κ+1}AA†`, checked against `XGX = X`, `XG = A†AWA(WA)^D`,
/// `AX = (AW)^{κ+1}AA†`.
pub fn w_mp_k_mp<T: Scalar>(ctx: &WeightedContext<T>) -> Result<Matrix<T>> {
    checked(ctx, IndexMpKind::MpKMp)
}

/// `W·A^{D,W}·W·A·A†`
pub fn wdmp<T: Scalar>(ctx: &WeightedContext<T>) -> Result<Matrix<T>> {
    Ok(Parts::new(ctx)?.wdmp())
}

/// `A†·A·W·A^{D,W}·W`
pub fn wmpd<T: Scalar>(ctx: &WeightedContext<T>) -> Result<Matrix<T>> {
    Ok(Parts::new(ctx)?.wmpd())
}

/// `A†·A·W·A^{D,W}·W·A·A†`
pub fn wcmp<T: Scalar>(ctx: &WeightedContext<T>) -> Result<Matrix<T>> {
    Ok(Parts::new(ctx)?.wcmp())
}

/// Every characterizing system for `which`, evaluated on `x`.
fn characterizations<T: Scalar>(which: IndexMpKind, p: &Parts<T>, x: &Matrix<T>) -> Vec<(&'static str, bool)> {
    let k = p.k;
    let (a, ap, w, g, h) = (&p.a, &p.ap, &p.w, &p.g, &p.h);
    let eq = |l: &Matrix<T>, r: &Matrix<T>| p.eq(l, r);
    let wa_k = p.wa.pow(k);
    let wa_k1 = p.wa.pow(k + 1);
    let aw_k = p.aw.pow(k);
    let aw_k1 = p.aw.pow(k + 1);
    let aap = a * ap;
    let apa = ap * a;
    // W·A^{D,W}·W·A = (WA)^D·WA and A·W·A^{D,W}·W = AW·(AW)^D
    let wadwwa = &(&(w * &p.adw) * w) * a;
    let awadww = &(&(a * w) * &p.adw) * w;
    match which {
        IndexMpKind::KMp => {
            let xg = x * g;
            let gx = g * x;
            let xgx = &xg * x;
            // A(WA)^D·WAA†
            let adwaap = &(&(&(a * &p.d) * w) * a) * ap;
            let xa = x * a;
            let wx = &wadwwa * x;
            // X·A(WA)^D·WAA†
            let x_adwaap = x * &adwaap;
            vec![
                ("defining system", eq(&xgx, x) && eq(&gx, &adwaap) && eq(&xa, &wa_k1)),
                ("theorem (ii)", eq(&(&gx * g), g) && eq(&xgx, x) && eq(&gx, &adwaap) && eq(&xa, &wa_k1)),
                ("theorem (iii)", eq(&xgx, x) && eq(&gx, &adwaap) && eq(&xg, &wadwwa)),
                ("theorem (iv)", eq(&wx, x) && eq(&(a * x), &(&aw_k1 * &aap))),
                ("corollary (ii)", eq(&wx, x) && eq(&gx, &(&(&(&(a * w) * &p.adw) * w) * &aap))),
                ("corollary (iii)", eq(&(x * &aap), x) && eq(&xa, &wa_k1)),
                ("corollary (iv)", eq(&x_adwaap, x) && eq(&xg, &wadwwa)),
                ("corollary (v)", eq(&(&xg * &wa_k), &wa_k) && eq(&x_adwaap, x)),
                ("corollary (vi)", eq(&wx, x) && eq(&(&p.d * x), &(&wa_k * ap))),
            ]
        }
        IndexMpKind::MpK => {
            let xh = x * h;
            let hx = h * x;
            let xhx = &xh * x;
            // A†AW(AW)^D A
            let apawea = &(&(&apa * w) * &p.e) * a;
            let ax = a * x;
            let xw = x * &awadww;
            vec![
                ("defining system", eq(&xhx, x) && eq(&xh, &apawea) && eq(&ax, &aw_k1)),
                ("theorem (ii)", eq(&(h * &xh), h) && eq(&xhx, x) && eq(&xh, &apawea) && eq(&ax, &aw_k1)),
                ("theorem (iii)", eq(&xhx, x) && eq(&xh, &apawea) && eq(&hx, &awadww)),
                ("theorem (iv)", eq(&xw, x) && eq(&(x * a), &(&apa * &wa_k1))),
                ("corollary (ii)", eq(&xw, x) && eq(&xh, &apawea)),
                ("corollary (iii)", eq(&(&apa * x), x) && eq(&ax, &aw_k1)),
                ("corollary (iv)", eq(&(&(&(&apa * w) * &p.e) * &ax), x) && eq(&hx, &awadww)),
                ("corollary (v)", eq(&(&aw_k * &hx), &aw_k) && eq(&(&(&(&apa * w) * &p.e) * &ax), x)),
                ("corollary (vi)", eq(&xw, x) && eq(&(x * &p.e), &(ap * &aw_k))),
            ]
        }
        IndexMpKind::MpKMp => {
            let xg = x * g;
            let xh = x * h;
            let hx = h * x;
            let ax = a * x;
            // A†AWA(WA)^D
            let apawad = &(&(&apa * w) * a) * &p.d;
            // (AW)^D·AWAA†
            let eawaap = &(&(&(&p.e * a) * w) * a) * ap;
            let rhs_ax = &aw_k1 * &aap;
            let x_eawaap = x * &eawaap;
            // A†(AW)^D·AWAX
            let ap_eawax = &(&(&(ap * &p.e) * a) * w) * &ax;
            vec![
                ("defining system", eq(&(&xg * x), x) && eq(&xg, &apawad) && eq(&ax, &rhs_ax)),
                ("theorem (ii)", eq(&(&xh * x), x) && eq(&hx, &eawaap) && eq(&ax, &rhs_ax)),
                ("theorem (iii)", eq(&(&xh * x), x) && eq(&hx, &eawaap) && eq(&xg, &apawad)),
                ("theorem (iv)", eq(&(&apa * x), x) && eq(&ax, &rhs_ax)),
                ("corollary (ii)", eq(&(x * a), &(&apa * &wa_k1)) && eq(&(x * &aap), x)),
                ("corollary (iii)", eq(&x_eawaap, x) && eq(&xg, &apawad)),
                ("corollary (iv)", eq(&x_eawaap, x) && eq(&(&xg * &wa_k), &(&apa * &wa_k))),
                ("corollary (v)", eq(&ap_eawax, x) && eq(&hx, &eawaap)),
                ("corollary (vi)", eq(&ap_eawax, x) && eq(&(&aw_k * &hx), &(&aw_k * &aap))),
            ]
        }
    }
}

/// Per-system verdicts for one candidate `X`.
#[derive(Clone, Debug, PartialEq)]
pub struct CharacterizationReport {
    pub which: IndexMpKind,
    /// `X` equals the definition formula.
    pub definition: bool,
    pub systems: Vec<(&'static str, bool)>,
}

impl CharacterizationReport {
    /// The equivalence statements agree: every verdict, including
    /// `definition`, is the same.
    pub fn consistent(&self) -> bool {
        self.systems.iter().all(|(_, b)| *b == self.definition)
    }
}

impl fmt::Display for CharacterizationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "which={}", self.which)?;
        writeln!(f, "definition={}", self.definition)?;
        for (name, b) in &self.systems {
            writeln!(f, "{}={}", name.replace(' ', "_"), b)?;
        }
        write!(f, "consistent={}", self.consistent())
    }
}

pub fn check_characterizations<T: Scalar>(
    ctx: &WeightedContext<T>,
    which: IndexMpKind,
    x: &Matrix<T>,
) -> Result<CharacterizationReport> {
    if x.shape() != (ctx.n(), ctx.m()) {
        return Err(Error::shape(
            "check_characterizations",
            format!("X must be {}x{}", ctx.n(), ctx.m()),
        ));
    }
    let p = Parts::new(ctx)?;
    Ok(CharacterizationReport {
        which,
        definition: p.eq(x, &p.compute(which)),
        systems: characterizations(which, &p, x),
    })
}

/// Block representation through the weighted core-EP decomposition, as
/// displayed for the three matrices.
pub fn via_decomposition(dec: &WCepDecomposition, which: IndexMpKind) -> Result<Matrix<Complex64>> {
    assemble(dec, which, false)
}

/// The block representation with the full top-right block of `(WA)^{κ+1}`,
/// `Σ_{i<κ} R^{κ−i}ST^i`, in place of `R^κS`, and with the top-right block
/// `ÊA₃A₃†` of `(AW)^{κ+1}AA†` kept. The first change is void for `κ ≤ 1`;
/// the second matters whenever `ÊA₃ ≠ 0`.
pub fn via_decomposition_corrected(dec: &WCepDecomposition, which: IndexMpKind) -> Result<Matrix<Complex64>> {
    assemble(dec, which, true)
}

fn assemble(dec: &WCepDecomposition, which: IndexMpKind, corrected: bool) -> Result<Matrix<Complex64>> {
    let (m, n, r, k) = (dec.m(), dec.n(), dec.r, dec.kappa);
    let a3p = &dec.a3_pinv;
    let proj = Matrix::identity(n - r) - a3p * &dec.a3;
    let a1d = &dec.a1.adjoint() * &dec.delta;
    let pa2d = &(&proj * &dec.a2.adjoint()) * &dec.delta;
    let ck1 = dec.c.pow(k + 1);
    let blocks = match which {
        IndexMpKind::KMp => {
            let rk1 = dec.rblk.pow(k + 1);
            let shat = if corrected {
                (0..k).fold(Matrix::zeros(r, n - r), |acc, i| {
                    acc + &(&dec.rblk.pow(k - i) * &dec.sblk) * &dec.tblk.pow(i)
                })
            } else {
                &dec.rblk.pow(k) * &dec.sblk
            };
            let tl = &(&rk1 * &a1d) + &(&shat * &pa2d);
            let tr = -(&(&(&rk1 * &a1d) * &dec.a2) * a3p) + &shat * &(a3p - &(&(&pa2d * &dec.a2) * a3p));
            Matrix::block(&tl, &tr, &Matrix::zeros(n - r, r), &Matrix::zeros(n - r, m - r))
        }
        IndexMpKind::MpK => Matrix::block(&(&a1d * &ck1), &(&a1d * &dec.ehat), &(&pa2d * &ck1), &(&pa2d * &dec.ehat)),
        IndexMpKind::MpKMp => {
            let (tr, br) = if corrected {
                let eh = &(&dec.ehat * &dec.a3) * a3p;
                (&a1d * &eh, &pa2d * &eh)
            } else {
                (Matrix::zeros(r, m - r), Matrix::zeros(n - r, m - r))
            };
            Matrix::block(&(&a1d * &ck1), &tr, &(&pa2d * &ck1), &br)
        }
    };
    Ok(&(&dec.v * &blocks) * &dec.u.adjoint())
}

/// Idempotency and range/null-space verdicts for one product.
#[derive(Clone, Debug, PartialEq)]
pub struct ProjectorVerdict {
    pub name: &'static str,
    pub idempotent: bool,
    pub range: SubspaceRelation,
    pub null: SubspaceRelation,
}

impl ProjectorVerdict {
    pub fn holds(&self) -> bool {
        self.idempotent && self.range.holds && self.null.holds
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProjectorReport {
    pub projectors: Vec<ProjectorVerdict>,
    /// `A^{κ,†,W}` is a `{1,2}`-inverse of `A((WA)^D)^{κ+1}` with range
    /// `R((WA)^κ)` and null space `N(A^{D,W}A†)`.
    pub outer_k_mp: bool,
    /// `A^{†,κ,W}` is a `{1,2}`-inverse of `((AW)^D)^{κ+1}A` with range
    /// `R(A†A^{D,W})` and null space `N((AW)^κ)`.
    pub outer_mp_k: bool,
    /// The same claim read literally with `A((WA)^D)^{κ+1}` in place of
    /// `((AW)^D)^{κ+1}A`.
    pub outer_mp_k_literal: bool,
    /// `rank(A^{κ,†,W}) = rank(A^{†,κ,W}) = rank(A((WA)^D)^{κ+1})`
    pub ranks_equal: bool,
    pub ranks: (usize, usize, usize),
    /// The literal range `R((WA)^κ)` in the first projector identity has
    /// the wrong number of rows unless `m = n`; the check above uses
    /// `R((AW)^κ)`. `None` when `m ≠ n`.
    pub literal_first_range: Option<bool>,
}

impl ProjectorReport {
    pub fn all_hold(&self) -> bool {
        self.projectors.iter().all(ProjectorVerdict::holds) && self.outer_k_mp && self.outer_mp_k && self.ranks_equal
    }
}

impl fmt::Display for ProjectorReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for p in &self.projectors {
            writeln!(
                f,
                "{}: idempotent={} range={} null={}",
                p.name, p.idempotent, p.range.holds, p.null.holds
            )?;
        }
        writeln!(f, "outer_k_mp={}", self.outer_k_mp)?;
        writeln!(f, "outer_mp_k={}", self.outer_mp_k)?;
        writeln!(f, "outer_mp_k_literal={}", self.outer_mp_k_literal)?;
        writeln!(f, "ranks={:?} equal={}", self.ranks, self.ranks_equal)?;
        match self.literal_first_range {
            Some(b) => write!(f, "literal_first_range={b}"),
            None => write!(f, "literal_first_range=n/a"),
        }
    }
}

pub fn projector_checks<T: Scalar>(ctx: &WeightedContext<T>) -> Result<ProjectorReport> {
    let p = Parts::new(ctx)?;
    let tol = &p.tol;
    let k = p.k;
    let xk = p.k_mp();
    let xm = p.mp_k();
    let xmm = p.mp_k_mp();
    let aw_k = p.aw.pow(k);
    let wa_k = p.wa.pow(k);
    let adw_ap = &p.adw * &p.ap;
    let ap_adw = &p.ap * &p.adw;
    let verdict = |name, q: Matrix<T>, range: &Matrix<T>, null: &Matrix<T>| -> Result<ProjectorVerdict> {
        Ok(ProjectorVerdict {
            name,
            idempotent: mat_eq(&(&q * &q), &q, tol),
            range: range_equal(&q, range, tol)?,
            null: null_equal(&q, null, tol)?,
        })
    };
    let projectors = vec![
        verdict("G·A^{k,+,W}", &p.g * &xk, &aw_k, &adw_ap)?,
        verdict("A^{k,+,W}·G", &xk * &p.g, &wa_k, &wa_k)?,
        verdict("H·A^{+,k,W}", &p.h * &xm, &aw_k, &aw_k)?,
        verdict("A^{+,k,W}·H", &xm * &p.h, &ap_adw, &wa_k)?,
        verdict("H·A^{+,k,+,W}", &p.h * &xmm, &aw_k, &adw_ap)?,
        verdict("A^{+,k,+,W}·G", &xmm * &p.g, &ap_adw, &wa_k)?,
    ];
    let is_12 = |x: &Matrix<T>, b: &Matrix<T>| mat_eq(&(&(x * b) * x), x, tol) && mat_eq(&(&(b * x) * b), b, tol);
    let outer_k_mp = is_12(&xk, &p.g) && range_equal(&xk, &wa_k, tol)?.holds && null_equal(&xk, &adw_ap, tol)?.holds;
    let range_mp = range_equal(&xm, &ap_adw, tol)?.holds && null_equal(&xm, &aw_k, tol)?.holds;
    let outer_mp_k = is_12(&xm, &p.h) && range_mp;
    let outer_mp_k_literal = is_12(&xm, &p.g) && range_mp;
    let ranks = (rank(&xk, tol), rank(&xm, tol), rank(&p.g, tol));
    let literal_first_range = if ctx.m() == ctx.n() {
        Some(range_equal(&(&p.g * &xk), &wa_k, tol)?.holds)
    } else {
        None
    };
    Ok(ProjectorReport {
        projectors,
        outer_k_mp,
        outer_mp_k,
        outer_mp_k_literal,
        ranks_equal: ranks.0 == ranks.1 && ranks.1 == ranks.2,
        ranks,
        literal_first_range,
    })
}

/// Full-rank factors of a computed matrix, with rank judged against `floor`.
fn scaled_factors<T: Scalar>(a: &Matrix<T>, floor: f64, tol: &Tolerance) -> (Matrix<T>, Matrix<T>) {
    let (f, g) = T::full_rank_factors(a, tol);
    let r = srank(a, floor, tol).min(f.cols());
    let idx: Vec<usize> = (0..r).collect();
    (f.select_cols(&idx), g.select_rows(&idx))
}

/// Oblique projector onto `R(s)` along `N(t)`: `F(GF)⁻¹G` with `F` a basis
/// of `R(s)` and `G` a row basis of `t`. Ranks are judged against the
/// given floors.
fn oblique_projector<T: Scalar>(
    (s, s_floor): (&Matrix<T>, f64),
    (t, t_floor): (&Matrix<T>, f64),
    tol: &Tolerance,
) -> Result<Matrix<T>> {
    let (f, _) = scaled_factors(s, s_floor, tol);
    let (_, g) = scaled_factors(t, t_floor, tol);
    if f.cols() != g.rows() {
        return Err(Error::precondition(
            "oblique_projector",
            format!("rank of range {} differs from rank of null-space complement {}", f.cols(), g.rows()),
        ));
    }
    if f.cols() == 0 {
        return Ok(Matrix::zeros(s.rows(), s.rows()));
    }
    let inv = inverse(&(&g * &f), tol).map_err(|_| Error::Singular("oblique_projector"))?;
    Ok(&(&f * &inv) * &g)
}

/// Solve the projector system independently of the definition formula:
/// `X = B·Y` with `B` a basis of the prescribed range and `Y` from a left
/// inverse of `M·B`, where `M` is `A((WA)^D)^{κ+1}` (k-mp) or
/// `((AW)^D)^{κ+1}A` (mp-k). The result is checked against both system
/// conditions and against the definition formula.
pub fn solve_projector_system<T: Scalar>(ctx: &WeightedContext<T>, which: IndexMpKind) -> Result<Matrix<T>> {
    let p = Parts::new(ctx)?;
    let tol = &p.tol;
    let k = p.k;
    let aw_k = p.aw.pow(k);
    let pow_floor = p.scale.powi(k as i32);
    let adw_ap = &p.adw * &p.ap;
    let adw_ap_floor = p.adw.frobenius() * p.ap.frobenius();
    let (mm, range, range_floor, proj) = match which {
        IndexMpKind::KMp => (
            &p.g,
            p.wa.pow(k),
            pow_floor,
            oblique_projector((&aw_k, pow_floor), (&adw_ap, adw_ap_floor), tol)?,
        ),
        IndexMpKind::MpK => (
            &p.h,
            &p.ap * &p.adw,
            adw_ap_floor,
            oblique_projector((&aw_k, pow_floor), (&aw_k, pow_floor), tol)?,
        ),
        IndexMpKind::MpKMp => {
            return Err(Error::precondition("solve_projector_system", "defined for k-mp and mp-k only"))
        }
    };
    let (b, _) = scaled_factors(&range, range_floor, tol);
    let x = if b.cols() == 0 {
        Matrix::zeros(ctx.n(), ctx.m())
    } else {
        let mb = mm * &b;
        let mbh = mb.adjoint();
        let gram = inverse(&(&mbh * &mb), tol)
            .map_err(|_| Error::nonexistent("projector system solution", "M·B is rank deficient"))?;
        &b * &(&(&gram * &mbh) * &proj)
    };
    if !mat_eq(&(mm * &x), &proj, tol) {
        return Err(Error::nonexistent("projector system solution", "M·X = P has no solution in the range"));
    }
    if !range_subset(&x, &range, tol)?.holds {
        return Err(Error::verification("solve_projector_system", "R(X) is not inside the prescribed range"));
    }
    if !p.eq(&x, &p.compute(which)) {
        return Err(Error::verification("solve_projector_system", "solution differs from the definition formula"));
    }
    Ok(x)
}

/// The composition identities relating the three matrices to the weighted
/// DMP and MPD inverses, each side computed separately.
pub fn composition_identities<T: Scalar>(ctx: &WeightedContext<T>) -> Result<Vec<(&'static str, bool)>> {
    let p = Parts::new(ctx)?;
    let k = p.k;
    let (a, ap, w) = (&p.a, &p.ap, &p.w);
    let xk = p.k_mp();
    let xm = p.mp_k();
    let xmm = p.mp_k_mp();
    let dmp = p.wdmp();
    let mpd = p.wmpd();
    let wa_k1 = p.wa.pow(k + 1);
    let aw_k1 = p.aw.pow(k + 1);
    let apawad = &(&(&(ap * a) * w) * a) * &p.d;
    let eawaap = &(&(&(&p.e * a) * w) * a) * ap;
    Ok(vec![
        ("(i)", p.eq(&xk, &(&wa_k1 * &dmp))),
        ("(ii)", p.eq(&(&p.g * &xk), &(a * &dmp))),
        ("(iii)", p.eq(&(&xmm * &p.g), &apawad) && p.eq(&(&xm * &p.g), &apawad)),
        ("(iv)", p.eq(&(&xm * &p.h), &(&mpd * a))),
        ("(v)", p.eq(&xm, &(&mpd * &aw_k1))),
        (
            "(vi)",
            p.eq(&xmm, &(&(&xm * a) * &dmp))
                && p.eq(&xmm, &(&(&mpd * a) * &xk))
                && p.eq(&xmm, &(&(&(&mpd * a) * &wa_k1) * &dmp)),
        ),
        ("(vii)", p.eq(&(&p.h * &xmm), &eawaap)),
    ])
}
