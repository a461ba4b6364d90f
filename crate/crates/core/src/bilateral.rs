//! Weighted generalized bilateral inverses `X₁WAWX₂`, their duals, the
//! uniqueness systems and the self-duality criteria.

use std::fmt;

use crate::axioms::{check, Env, Label};
use crate::error::{Error, Result};
use crate::matcore::{mat_eq, null_equal, null_subset, range_equal, range_subset, SubspaceRelation, WeightedContext};
use crate::matrix::Matrix;
use crate::scalar::Scalar;

/// Two weighted {1}- or {2}-inverses with their declared classes, each a
/// subset of `{E1W, E2W}`.
#[derive(Clone, Debug, PartialEq)]
pub struct BilateralSpec<T> {
    pub x1: Matrix<T>,
    pub x2: Matrix<T>,
    pub x1_class: Vec<Label>,
    pub x2_class: Vec<Label>,
}

fn verify_class<T: Scalar>(ctx: &WeightedContext<T>, x: &Matrix<T>, class: &[Label], which: &str) -> Result<()> {
    if x.shape() != ctx.a.shape() {
        return Err(Error::shape("BilateralSpec", format!("{which} must be {}x{}", ctx.m(), ctx.n())));
    }
    if class.is_empty() {
        return Err(Error::precondition("BilateralSpec", format!("{which} needs a declared class")));
    }
    let env = Env::weighted(ctx);
    for &label in class {
        if !matches!(label, Label::E1W | Label::E2W) {
            return Err(Error::precondition("BilateralSpec", format!("class label {label} is not 1W or 2W")));
        }
        if !check(label, &ctx.a, x, &env)?.holds {
            return Err(Error::verification("BilateralSpec", format!("{which} fails {label}")));
        }
    }
    Ok(())
}

impl<T: Scalar> BilateralSpec<T> {
    pub fn new(
        ctx: &WeightedContext<T>,
        x1: Matrix<T>,
        x2: Matrix<T>,
        x1_class: Vec<Label>,
        x2_class: Vec<Label>,
    ) -> Result<Self> {
        verify_class(ctx, &x1, &x1_class, "X1")?;
        verify_class(ctx, &x2, &x2_class, "X2")?;
        Ok(BilateralSpec {
            x1,
            x2,
            x1_class,
            x2_class,
        })
    }

    fn x1_is(&self, l: Label) -> bool {
        self.x1_class.contains(&l)
    }

    fn x2_is(&self, l: Label) -> bool {
        self.x2_class.contains(&l)
    }

    /// The same pair with `X₁` and `X₂` exchanged.
    pub fn swapped(&self) -> Self {
        BilateralSpec {
            x1: self.x2.clone(),
            x2: self.x1.clone(),
            x1_class: self.x2_class.clone(),
            x2_class: self.x1_class.clone(),
        }
    }
}

/// `X₁·W·A·W·X₂`
pub fn bilateral<T: Scalar>(ctx: &WeightedContext<T>, spec: &BilateralSpec<T>) -> Matrix<T> {
    &(&spec.x1 * &ctx.waw()) * &spec.x2
}

/// `X₂·W·A·W·X₁`
pub fn dual_bilateral<T: Scalar>(ctx: &WeightedContext<T>, spec: &BilateralSpec<T>) -> Matrix<T> {
    &(&spec.x2 * &ctx.waw()) * &spec.x1
}

fn require_outer_inner<T: Scalar>(spec: &BilateralSpec<T>, op: &'static str) -> Result<()> {
    if !spec.x1_is(Label::E2W) || !spec.x2_is(Label::E1W) {
        return Err(Error::precondition(op, "requires X1 in A{2^W} and X2 in A{1^W}"));
    }
    Ok(())
}

/// Verdicts of `XWAWX = X`, `XWA = X₁WA`, `AWXWAWX = AW·X₁WAWX₂`.
pub fn bilateral_system<T: Scalar>(ctx: &WeightedContext<T>, spec: &BilateralSpec<T>, x: &Matrix<T>) -> [bool; 3] {
    let tol = &ctx.tol;
    let waw = ctx.waw();
    let aw = ctx.aw();
    let wa = ctx.wa();
    let xwaw = x * &waw;
    [
        mat_eq(&(&xwaw * x), x, tol),
        mat_eq(&(x * &wa), &(&spec.x1 * &wa), tol),
        mat_eq(&(&(&aw * &xwaw) * x), &(&aw * &bilateral(ctx, spec)), tol),
    ]
}

/// Verdicts of `XWAWX = X`, `AWX = AWX₁`, `XWAWXWA = X₂WAWX₁·WA`.
pub fn dual_bilateral_system<T: Scalar>(
    ctx: &WeightedContext<T>,
    spec: &BilateralSpec<T>,
    x: &Matrix<T>,
) -> [bool; 3] {
    let tol = &ctx.tol;
    let waw = ctx.waw();
    let aw = ctx.aw();
    let wa = ctx.wa();
    let xwaw = x * &waw;
    [
        mat_eq(&(&xwaw * x), x, tol),
        mat_eq(&(&aw * x), &(&aw * &spec.x1), tol),
        mat_eq(&(&(&xwaw * x) * &wa), &(&dual_bilateral(ctx, spec) * &wa), tol),
    ]
}

/// The dual system's third equation as printed, `XWAWXWA = AW·X₂WAWX₁`.
/// The two sides are n×n and m×m; `None` unless `m = n`.
pub fn dual_bilateral_literal_third<T: Scalar>(
    ctx: &WeightedContext<T>,
    spec: &BilateralSpec<T>,
    x: &Matrix<T>,
) -> Option<bool> {
    if ctx.m() != ctx.n() {
        return None;
    }
    let lhs = &(&(x * &ctx.waw()) * x) * &ctx.wa();
    Some(mat_eq(&lhs, &(&ctx.aw() * &dual_bilateral(ctx, spec)), &ctx.tol))
}

/// Solve `XWAWX = X`, `XWA = X₁WA`, `AWXWAWX = AW(WAW)^{X₁→X₂}`.
///
/// Any solution `Y` satisfies `Y = YWAWY = YWA·WX₁WAWX₂ = X₁WAWX₁WAWX₂`, so
/// that product is formed separately, checked against the system and
/// compared with `X₁WAWX₂`.
pub fn solve_bilateral_system<T: Scalar>(ctx: &WeightedContext<T>, spec: &BilateralSpec<T>) -> Result<Matrix<T>> {
    require_outer_inner(spec, "solve_bilateral_system")?;
    let x = bilateral(ctx, spec);
    if !bilateral_system(ctx, spec, &x).iter().all(|&b| b) {
        return Err(Error::verification("solve_bilateral_system", "X1 WAW X2 fails the system"));
    }
    let waw = ctx.waw();
    let forced = &(&(&(&spec.x1 * &waw) * &spec.x1) * &waw) * &spec.x2;
    if !bilateral_system(ctx, spec, &forced).iter().all(|&b| b) || !mat_eq(&forced, &x, &ctx.tol) {
        return Err(Error::verification("solve_bilateral_system", "second solution differs"));
    }
    Ok(x)
}

/// Solve `XWAWX = X`, `AWX = AWX₁`, `XWAWXWA = (WAW)^{X₂→X₁}WA`; any
/// solution equals `X₂WAWX₁WAWX₁`.
pub fn solve_dual_bilateral_system<T: Scalar>(
    ctx: &WeightedContext<T>,
    spec: &BilateralSpec<T>,
) -> Result<Matrix<T>> {
    require_outer_inner(spec, "solve_dual_bilateral_system")?;
    let x = dual_bilateral(ctx, spec);
    if !dual_bilateral_system(ctx, spec, &x).iter().all(|&b| b) {
        return Err(Error::verification("solve_dual_bilateral_system", "X2 WAW X1 fails the system"));
    }
    let waw = ctx.waw();
    let forced = &(&(&(&spec.x2 * &waw) * &spec.x1) * &waw) * &spec.x1;
    if !dual_bilateral_system(ctx, spec, &forced).iter().all(|&b| b) || !mat_eq(&forced, &x, &ctx.tol) {
        return Err(Error::verification("solve_dual_bilateral_system", "second solution differs"));
    }
    Ok(x)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SelfDualityVariant {
    /// `X₁ ∈ A{2^W}`, `X₂ ∈ A{1^W}`: (i) self dual, (ii) `X₁` equals both
    /// products, (iii) `N(WAWX₂) ⊆ N(X₁)` and `R(X₁) ⊆ R(X₂WAW)`.
    OuterInner,
    /// `X₁, X₂ ∈ A{1^W}`: (i) self dual, (ii) `AWX₂ = AWX₁` and
    /// `X₁WA = X₂WA`.
    InnerInner,
    /// `X₂ ∈ A{2^W}`: (i) self dual, (ii) `N(X₂) ⊆ N(X₂WAWX₁)` and
    /// `R(X₁WAWX₂) ⊆ R(X₂)`.
    Outer,
}

impl fmt::Display for SelfDualityVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            SelfDualityVariant::OuterInner => "outer-inner",
            SelfDualityVariant::InnerInner => "inner-inner",
            SelfDualityVariant::Outer => "outer",
        })
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SelfDuality {
    pub variant: SelfDualityVariant,
    pub self_dual: bool,
    pub cond_ii: bool,
    /// Only for [`SelfDualityVariant::OuterInner`].
    pub cond_iii: Option<bool>,
    /// The subspace relations behind the subspace condition of the variant.
    pub relations: Vec<SubspaceRelation>,
}

impl SelfDuality {
    /// All conditions agree with `self_dual`.
    pub fn consistent(&self) -> bool {
        self.cond_ii == self.self_dual && self.cond_iii.is_none_or(|c| c == self.self_dual)
    }
}

impl fmt::Display for SelfDuality {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "variant={}", self.variant)?;
        writeln!(f, "self_dual={}", self.self_dual)?;
        writeln!(f, "cond_ii={}", self.cond_ii)?;
        if let Some(c) = self.cond_iii {
            writeln!(f, "cond_iii={c}")?;
        }
        for r in &self.relations {
            writeln!(f, "{r}")?;
        }
        write!(f, "consistent={}", self.consistent())
    }
}

/// Pick the variant from the declared classes, preferring `OuterInner`.
pub fn self_duality_variant<T>(spec: &BilateralSpec<T>) -> Result<SelfDualityVariant> {
    let has = |c: &[Label], l| c.contains(&l);
    if has(&spec.x1_class, Label::E2W) && has(&spec.x2_class, Label::E1W) {
        Ok(SelfDualityVariant::OuterInner)
    } else if has(&spec.x1_class, Label::E1W) && has(&spec.x2_class, Label::E1W) {
        Ok(SelfDualityVariant::InnerInner)
    } else if has(&spec.x2_class, Label::E2W) {
        Ok(SelfDualityVariant::Outer)
    } else {
        Err(Error::precondition("self_duality", "no self-duality criterion applies to the declared classes"))
    }
}

pub fn self_duality<T: Scalar>(ctx: &WeightedContext<T>, spec: &BilateralSpec<T>) -> Result<SelfDuality> {
    self_duality_as(ctx, spec, self_duality_variant(spec)?)
}

/// Evaluate the conditions of a chosen variant; the declared classes must
/// cover its hypotheses.
pub fn self_duality_as<T: Scalar>(
    ctx: &WeightedContext<T>,
    spec: &BilateralSpec<T>,
    variant: SelfDualityVariant,
) -> Result<SelfDuality> {
    let tol = &ctx.tol;
    let waw = ctx.waw();
    let bil = bilateral(ctx, spec);
    let dual = dual_bilateral(ctx, spec);
    let self_dual = mat_eq(&bil, &dual, tol);
    let (x1, x2) = (&spec.x1, &spec.x2);
    let report = match variant {
        SelfDualityVariant::OuterInner => {
            require_outer_inner(spec, "self_duality")?;
            let n = null_subset(&(&waw * x2), x1, tol)?;
            let r = range_subset(x1, &(x2 * &waw), tol)?;
            SelfDuality {
                variant,
                self_dual,
                cond_ii: mat_eq(x1, &bil, tol) && mat_eq(x1, &dual, tol),
                cond_iii: Some(n.holds && r.holds),
                relations: vec![n, r],
            }
        }
        SelfDualityVariant::InnerInner => {
            if !spec.x1_is(Label::E1W) || !spec.x2_is(Label::E1W) {
                return Err(Error::precondition("self_duality", "requires X1, X2 in A{1^W}"));
            }
            let aw = ctx.aw();
            let wa = ctx.wa();
            SelfDuality {
                variant,
                self_dual,
                cond_ii: mat_eq(&(&aw * x2), &(&aw * x1), tol) && mat_eq(&(x1 * &wa), &(x2 * &wa), tol),
                cond_iii: None,
                relations: Vec::new(),
            }
        }
        SelfDualityVariant::Outer => {
            if !spec.x2_is(Label::E2W) {
                return Err(Error::precondition("self_duality", "requires X2 in A{2^W}"));
            }
            let n = null_subset(x2, &dual, tol)?;
            let r = range_subset(&bil, x2, tol)?;
            SelfDuality {
                variant,
                self_dual,
                cond_ii: n.holds && r.holds,
                cond_iii: None,
                relations: vec![n, r],
            }
        }
    };
    Ok(report)
}

/// For `X ∈ A{2^W}`: `N(AWX) = N(XWAWX) = N(X)` and
/// `R(XWA) = R(XWAWX) = R(X)`.
pub fn range_null_relations<T: Scalar>(ctx: &WeightedContext<T>, x: &Matrix<T>) -> Result<[SubspaceRelation; 4]> {
    let tol = &ctx.tol;
    let xwawx = &(x * &ctx.waw()) * x;
    Ok([
        null_equal(&(&ctx.aw() * x), x, tol)?,
        null_equal(&xwawx, x, tol)?,
        range_equal(&(x * &ctx.wa()), x, tol)?,
        range_equal(&xwawx, x, tol)?,
    ])
}
