//! Equation labels for generalized inverses and a checker that evaluates them.
//!
//! Unweighted labels take `A` (m×n) and a candidate `Z` (n×m). Labels ending
//! in `W` take `A` (m×n), the weight `W` (n×m) and a candidate `Z` (m×n).

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::matcore::{mat_eq, residual, MetricMatrix, Tolerance, WeightedContext};
use crate::matrix::Matrix;
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Label {
    /// `AZA = A`
    E1,
    /// `ZAZ = Z`
    E2,
    /// `(AZ)* = AZ`
    E3,
    /// `(ZA)* = ZA`
    E4,
    /// `(MAZ)* = MAZ`
    E3M,
    /// `(NZA)* = NZA`
    E4N,
    /// `AZ = ZA`
    E5,
    /// `ZA^{k+1} = A^k`
    E1k(usize),
    /// `ZA² = A`
    E6,
    /// `AZ² = Z`
    E7,
    /// `A²Z = A`
    E8,
    /// `Z²A = Z`
    E9,
    /// `AWZWA = A`
    E1W,
    /// `WAWZWAW = WAW`
    E1WAW,
    /// `ZWAWZ = Z`
    E2W,
    /// `(WAWZ)* = WAWZ`
    E3W,
    /// `(ZWAW)* = ZWAW`
    E4W,
    /// `AWZ = ZWA`
    E5W,
    /// `A(WZ)² = Z`
    E6W,
    /// `ZW(AW)^{k+1} = (AW)^k`
    E1kW(usize),
    /// `(WA)^{k+1}WZ = (WA)^k`
    EkW1(usize),
}

impl Label {
    pub fn is_weighted(self) -> bool {
        matches!(
            self,
            Label::E1W
                | Label::E1WAW
                | Label::E2W
                | Label::E3W
                | Label::E4W
                | Label::E5W
                | Label::E6W
                | Label::E1kW(_)
                | Label::EkW1(_)
        )
    }

    /// Every label, with `k` substituted into the indexed ones.
    pub fn all(k: usize) -> Vec<Label> {
        use Label::*;
        vec![
            E1, E2, E3, E4, E3M, E4N, E5, E1k(k), E6, E7, E8, E9, E1W, E1WAW, E2W, E3W, E4W,
            E5W, E6W, E1kW(k), EkW1(k),
        ]
    }

    pub fn unweighted(k: usize) -> Vec<Label> {
        Label::all(k).into_iter().filter(|l| !l.is_weighted()).collect()
    }

    /// Parse a comma-separated list. Besides single labels (`1`, `3M`,
    /// `1k`, `2W`, `1kW`, `kW1`, `1WAW`) the group names `mp`, `drazin`,
    /// `1231kW`, `124k1W` and `all` are accepted. `k` fills indexed labels.
    pub fn parse_list(s: &str, k: usize) -> Result<Vec<Label>> {
        let mut out = Vec::new();
        for tok in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            match tok {
                "all" => out.extend(Label::all(k)),
                "mp" => out.extend([Label::E1, Label::E2, Label::E3, Label::E4]),
                "drazin" => out.extend([Label::E1k(k), Label::E2, Label::E5]),
                "1231kW" => out.extend(w1231k_labels(k)),
                "124k1W" => out.extend(w124k1_labels(k)),
                other => out.push(Label::parse_one(other, k)?),
            }
        }
        if out.is_empty() {
            return Err(Error::Parse("empty label list".into()));
        }
        Ok(out)
    }

    fn parse_one(tok: &str, k: usize) -> Result<Label> {
        let t = tok.strip_prefix('E').unwrap_or(tok);
        let (t, explicit_k) = match t.split_once('@') {
            Some((l, kk)) => (
                l,
                Some(
                    kk.parse::<usize>()
                        .map_err(|_| Error::Parse(format!("bad k in label `{tok}`")))?,
                ),
            ),
            None => (t, None),
        };
        let k = explicit_k.unwrap_or(k);
        use Label::*;
        Ok(match t {
            "1" => E1,
            "2" => E2,
            "3" => E3,
            "4" => E4,
            "3M" => E3M,
            "4N" => E4N,
            "5" => E5,
            "1k" => E1k(k),
            "6" => E6,
            "7" => E7,
            "8" => E8,
            "9" => E9,
            "1W" => E1W,
            "1WAW" => E1WAW,
            "2W" => E2W,
            "3W" => E3W,
            "4W" => E4W,
            "5W" => E5W,
            "6W" => E6W,
            "1kW" => E1kW(k),
            "kW1" => EkW1(k),
            _ => return Err(Error::Parse(format!("unknown equation label `{tok}`"))),
        })
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use Label::*;
        match self {
            E1 => f.write_str("1"),
            E2 => f.write_str("2"),
            E3 => f.write_str("3"),
            E4 => f.write_str("4"),
            E3M => f.write_str("3M"),
            E4N => f.write_str("4N"),
            E5 => f.write_str("5"),
            E1k(k) => write!(f, "1k@{k}"),
            E6 => f.write_str("6"),
            E7 => f.write_str("7"),
            E8 => f.write_str("8"),
            E9 => f.write_str("9"),
            E1W => f.write_str("1W"),
            E1WAW => f.write_str("1WAW"),
            E2W => f.write_str("2W"),
            E3W => f.write_str("3W"),
            E4W => f.write_str("4W"),
            E5W => f.write_str("5W"),
            E6W => f.write_str("6W"),
            E1kW(k) => write!(f, "1kW@{k}"),
            EkW1(k) => write!(f, "kW1@{k}"),
        }
    }
}

impl FromStr for Label {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Label::parse_one(s, 0)
    }
}

/// Conditions defining the `{1,2,3,1ᵏ}^W` class.
pub fn w1231k_labels(k: usize) -> Vec<Label> {
    vec![Label::E1WAW, Label::E2W, Label::E3W, Label::E1kW(k)]
}

/// Conditions defining the `{1,2,4,ᵏ1}^W` class.
pub fn w124k1_labels(k: usize) -> Vec<Label> {
    vec![Label::E1WAW, Label::E2W, Label::E4W, Label::EkW1(k)]
}

/// The auxiliary matrices a label may need.
#[derive(Clone, Copy, Debug)]
pub struct Env<'a, T> {
    pub w: Option<&'a Matrix<T>>,
    pub m: Option<&'a MetricMatrix<T>>,
    pub n: Option<&'a MetricMatrix<T>>,
    pub tol: Tolerance,
}

impl<'a, T: Scalar> Env<'a, T> {
    pub fn plain(tol: Tolerance) -> Self {
        Env {
            w: None,
            m: None,
            n: None,
            tol,
        }
    }

    pub fn weighted(ctx: &'a WeightedContext<T>) -> Self {
        Env {
            w: Some(&ctx.w),
            m: None,
            n: None,
            tol: ctx.tol,
        }
    }

    pub fn with_m(mut self, m: &'a MetricMatrix<T>) -> Self {
        self.m = Some(m);
        self
    }

    pub fn with_n(mut self, n: &'a MetricMatrix<T>) -> Self {
        self.n = Some(n);
        self
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct Entry {
    pub label: Label,
    pub holds: bool,
    pub residual: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct VerificationReport {
    pub entries: Vec<Entry>,
    pub skipped: Vec<Label>,
    pub overall: bool,
}

impl VerificationReport {
    pub fn from_entries(entries: Vec<Entry>, skipped: Vec<Label>) -> Self {
        let overall = entries.iter().all(|e| e.holds);
        VerificationReport {
            entries,
            skipped,
            overall,
        }
    }

    pub fn holding(&self) -> Vec<Label> {
        self.entries.iter().filter(|e| e.holds).map(|e| e.label).collect()
    }

    pub fn failing(&self) -> Vec<Label> {
        self.entries.iter().filter(|e| !e.holds).map(|e| e.label).collect()
    }

    pub fn holds(&self, label: Label) -> bool {
        self.entries.iter().any(|e| e.label == label && e.holds)
    }
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for e in &self.entries {
            writeln!(
                f,
                "label.{}={} residual={:.3e}",
                e.label,
                if e.holds { "pass" } else { "fail" },
                e.residual
            )?;
        }
        for s in &self.skipped {
            writeln!(f, "label.{s}=skipped")?;
        }
        write!(f, "overall={}", if self.overall { "pass" } else { "fail" })
    }
}

fn shape_err(label: Label, detail: String) -> Error {
    Error::ShapeMismatch {
        op: "check",
        detail: format!("label {label}: {detail}"),
    }
}

fn need<'a, X>(x: Option<&'a X>, label: Label, what: &'static str) -> Result<&'a X> {
    x.ok_or_else(|| Error::MissingInput {
        label: label.to_string(),
        what,
    })
}

/// Evaluate one label for the pair `(a, x)`.
pub fn check<T: Scalar>(label: Label, a: &Matrix<T>, x: &Matrix<T>, env: &Env<'_, T>) -> Result<Entry> {
    use Label::*;
    let (m, n) = a.shape();
    let tol = &env.tol;
    let (lhs, rhs) = if label.is_weighted() {
        let w = need(env.w, label, "weight W")?;
        if w.shape() != (n, m) {
            return Err(shape_err(label, format!("W is {:?}, A is {:?}", w.shape(), a.shape())));
        }
        if x.shape() != (m, n) {
            return Err(shape_err(label, format!("candidate is {:?}, expected {:?}", x.shape(), (m, n))));
        }
        let aw = a * w;
        let wa = w * a;
        match label {
            E1W => (&(&aw * x) * &wa, a.clone()),
            E1WAW => {
                let waw = &wa * w;
                (&(&waw * x) * &waw, waw)
            }
            E2W => {
                let l = &(x * &wa) * &(w * x);
                (l, x.clone())
            }
            E3W => {
                let p = &(&wa * w) * x;
                (p.adjoint(), p)
            }
            E4W => {
                let p = &(x * &wa) * w;
                (p.adjoint(), p)
            }
            E5W => (&aw * x, x * &wa),
            E6W => {
                let wx = w * x;
                (&(a * &wx) * &wx, x.clone())
            }
            E1kW(k) => (&(x * w) * &aw.pow(k + 1), aw.pow(k)),
            EkW1(k) => (&(&wa.pow(k + 1) * w) * x, wa.pow(k)),
            _ => unreachable!(),
        }
    } else {
        if x.shape() != (n, m) {
            return Err(shape_err(label, format!("candidate is {:?}, expected {:?}", x.shape(), (n, m))));
        }
        let square_only = matches!(label, E5 | E1k(_) | E6 | E7 | E8 | E9);
        if square_only && m != n {
            return Err(shape_err(label, "requires square A".into()));
        }
        match label {
            E1 => (&(a * x) * a, a.clone()),
            E2 => (&(x * a) * x, x.clone()),
            E3 => {
                let p = a * x;
                (p.adjoint(), p)
            }
            E4 => {
                let p = x * a;
                (p.adjoint(), p)
            }
            E3M => {
                let mm = need(env.m, label, "metric M")?;
                if mm.dim() != m {
                    return Err(shape_err(label, format!("M has dimension {}, need {m}", mm.dim())));
                }
                let p = &(mm.matrix() * a) * x;
                (p.adjoint(), p)
            }
            E4N => {
                let nn = need(env.n, label, "metric N")?;
                if nn.dim() != n {
                    return Err(shape_err(label, format!("N has dimension {}, need {n}", nn.dim())));
                }
                let p = &(nn.matrix() * x) * a;
                (p.adjoint(), p)
            }
            E5 => (a * x, x * a),
            E1k(k) => (x * &a.pow(k + 1), a.pow(k)),
            E6 => (&(x * a) * a, a.clone()),
            E7 => (&(a * x) * x, x.clone()),
            E8 => (&(a * a) * x, a.clone()),
            E9 => (&(x * x) * a, x.clone()),
            _ => unreachable!(),
        }
    };
    Ok(Entry {
        label,
        holds: mat_eq(&lhs, &rhs, tol),
        residual: residual(&lhs, &rhs),
    })
}

/// Check a list of labels; any error aborts.
pub fn check_all<T: Scalar>(
    labels: &[Label],
    a: &Matrix<T>,
    x: &Matrix<T>,
    env: &Env<'_, T>,
) -> Result<VerificationReport> {
    let entries = labels
        .iter()
        .map(|&l| check(l, a, x, env))
        .collect::<Result<Vec<_>>>()?;
    Ok(VerificationReport::from_entries(entries, Vec::new()))
}

/// Check every label that is meaningful for the given shapes and inputs,
/// listing the others as skipped.
pub fn classify<T: Scalar>(a: &Matrix<T>, x: &Matrix<T>, env: &Env<'_, T>, k: usize) -> VerificationReport {
    let mut entries = Vec::new();
    let mut skipped = Vec::new();
    for label in Label::all(k) {
        match check(label, a, x, env) {
            Ok(e) => entries.push(e),
            Err(_) => skipped.push(label),
        }
    }
    VerificationReport::from_entries(entries, skipped)
}

/// Shorthand returning `Error::Verification` unless every label holds.
pub(crate) fn require<T: Scalar>(
    what: &'static str,
    labels: &[Label],
    a: &Matrix<T>,
    x: &Matrix<T>,
    env: &Env<'_, T>,
) -> Result<()> {
    let report = check_all(labels, a, x, env)?;
    if report.overall {
        Ok(())
    } else {
        let failing: Vec<String> = report.failing().iter().map(Label::to_string).collect();
        Err(Error::verification(what, format!("labels {} do not hold", failing.join(","))))
    }
}
