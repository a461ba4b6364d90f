//! Command-line front end.
//!
//! Exit codes: 0 on success, 1 on malformed input or a violated
//! precondition, 2 when the requested inverse does not exist (or, for
//! `verify`, when a requested label fails).

use std::fmt::{self, Write as _};
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use serde_json::{json, Map, Value};

use crate::axioms::{check_all, classify, w124k1_labels, w1231k_labels, Env, Label, VerificationReport};
use crate::bilateral::{bilateral, solve_bilateral_system, BilateralSpec};
use crate::classical::{core, core_ep, drazin, dual_core, group_inverse, moore_penrose, weighted_mp};
use crate::decomposition::wcep_decompose;
use crate::error::{Error, Result};
use crate::indexmp::{check_characterizations, w_k_mp, w_mp_k, w_mp_k_mp, CharacterizationReport, IndexMpKind};
use crate::io::{float_text, matrix_to_string, matrix_to_value, read_matrix, read_named};
use crate::matcore::{index, make_context, MetricMatrix, Tolerance, WeightedContext};
use crate::matrix::Matrix;
use crate::scalar::{Backend, Scalar, Q};
use crate::selftest::run_selftest;
use crate::wcore::{check_rol_m_core, check_rol_n_dual, m_weighted_core, n_weighted_dual_core, CoreVariant};
use crate::wfamily::{canonical_w124k1, canonical_w1231k, family_member_w124k1, family_member_w1231k, w_core_ep, w_drazin};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, ValueEnum)]
pub enum InverseKind {
    Mp,
    Wmp,
    Group,
    Drazin,
    Core,
    DualCore,
    CoreEp,
    MCore,
    NDualCore,
    WDrazin,
    WCoreEp,
    #[value(name = "w-1231k")]
    W1231k,
    #[value(name = "w-124k1")]
    W124k1,
    #[value(name = "w-k-mp")]
    WKMp,
    WMpK,
    WMpKMp,
    Bilateral,
}

impl InverseKind {
    pub const ALL: [InverseKind; 17] = [
        InverseKind::Mp,
        InverseKind::Wmp,
        InverseKind::Group,
        InverseKind::Drazin,
        InverseKind::Core,
        InverseKind::DualCore,
        InverseKind::CoreEp,
        InverseKind::MCore,
        InverseKind::NDualCore,
        InverseKind::WDrazin,
        InverseKind::WCoreEp,
        InverseKind::W1231k,
        InverseKind::W124k1,
        InverseKind::WKMp,
        InverseKind::WMpK,
        InverseKind::WMpKMp,
        InverseKind::Bilateral,
    ];

    pub fn name(self) -> &'static str {
        match self {
            InverseKind::Mp => "mp",
            InverseKind::Wmp => "wmp",
            InverseKind::Group => "group",
            InverseKind::Drazin => "drazin",
            InverseKind::Core => "core",
            InverseKind::DualCore => "dual-core",
            InverseKind::CoreEp => "core-ep",
            InverseKind::MCore => "m-core",
            InverseKind::NDualCore => "n-dual-core",
            InverseKind::WDrazin => "w-drazin",
            InverseKind::WCoreEp => "w-core-ep",
            InverseKind::W1231k => "w-1231k",
            InverseKind::W124k1 => "w-124k1",
            InverseKind::WKMp => "w-k-mp",
            InverseKind::WMpK => "w-mp-k",
            InverseKind::WMpKMp => "w-mp-k-mp",
            InverseKind::Bilateral => "bilateral",
        }
    }

    pub fn weighted(self) -> bool {
        matches!(
            self,
            InverseKind::WDrazin
                | InverseKind::WCoreEp
                | InverseKind::W1231k
                | InverseKind::W124k1
                | InverseKind::WKMp
                | InverseKind::WMpK
                | InverseKind::WMpKMp
                | InverseKind::Bilateral
        )
    }
}

impl fmt::Display for InverseKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Matrices a computation may draw on. `param` is the family parameter
/// (`M` or `N`) for the weighted {1,2,3,1ᵏ}/{1,2,4,ᵏ1} families, the free
/// block `L` for `m-core`, and `params` holds `X₁`, `X₂` for `bilateral`.
#[derive(Clone, Debug)]
pub struct Inputs<T> {
    pub a: Matrix<T>,
    pub w: Option<Matrix<T>>,
    pub metric_m: Option<MetricMatrix<T>>,
    pub metric_n: Option<MetricMatrix<T>>,
    pub param: Option<Matrix<T>>,
    pub params: Option<(Matrix<T>, Matrix<T>)>,
    pub tol: Tolerance,
}

impl<T: Scalar> Inputs<T> {
    pub fn new(a: Matrix<T>, tol: Tolerance) -> Self {
        Inputs {
            a,
            w: None,
            metric_m: None,
            metric_n: None,
            param: None,
            params: None,
            tol,
        }
    }

    fn context(&self, kind: InverseKind) -> Result<WeightedContext<T>> {
        let w = self.w.clone().ok_or_else(|| Error::MissingInput {
            label: kind.to_string(),
            what: "weight W (--weight)",
        })?;
        make_context(self.a.clone(), w, &self.tol)
    }

    fn metric_m(&self, kind: InverseKind) -> Result<&MetricMatrix<T>> {
        self.metric_m.as_ref().ok_or_else(|| Error::MissingInput {
            label: kind.to_string(),
            what: "metric M (--metric-m)",
        })
    }

    fn metric_n(&self, kind: InverseKind) -> Result<&MetricMatrix<T>> {
        self.metric_n.as_ref().ok_or_else(|| Error::MissingInput {
            label: kind.to_string(),
            what: "metric N (--metric-n)",
        })
    }
}

#[derive(Clone, Debug)]
pub enum ComputeReport {
    Labels(VerificationReport),
    Systems(CharacterizationReport),
}

impl ComputeReport {
    pub fn overall(&self) -> bool {
        match self {
            ComputeReport::Labels(r) => r.overall,
            ComputeReport::Systems(r) => r.definition && r.consistent(),
        }
    }

    pub fn to_json(&self) -> Value {
        match self {
            ComputeReport::Labels(r) => {
                let mut labels = Map::new();
                for e in &r.entries {
                    labels.insert(e.label.to_string(), json!({"holds": e.holds, "residual": e.residual}));
                }
                json!({"labels": labels, "overall": r.overall})
            }
            ComputeReport::Systems(r) => {
                let mut systems = Map::new();
                for (name, b) in &r.systems {
                    systems.insert(name.to_string(), json!(b));
                }
                json!({"definition": r.definition, "systems": systems, "overall": self.overall()})
            }
        }
    }
}

impl fmt::Display for ComputeReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ComputeReport::Labels(r) => write!(f, "{r}"),
            ComputeReport::Systems(r) => {
                write!(f, "{r}")?;
                write!(f, "\noverall={}", if self.overall() { "pass" } else { "fail" })
            }
        }
    }
}

fn index_of_square<T: Scalar>(a: &Matrix<T>, tol: &Tolerance) -> Result<usize> {
    if a.is_square() {
        index(a, tol)
    } else {
        Ok(0)
    }
}

/// Compute one inverse and re-check the equations that define it.
pub fn compute<T: Scalar>(kind: InverseKind, inp: &Inputs<T>) -> Result<(Matrix<T>, ComputeReport)> {
    use InverseKind::*;
    let a = &inp.a;
    let tol = &inp.tol;
    let plain = Env::plain(*tol);
    let labels = |x: &Matrix<T>, ls: &[Label], env: &Env<'_, T>| check_all(ls, a, x, env).map(ComputeReport::Labels);
    match kind {
        Mp => {
            let x = moore_penrose(a, tol);
            let r = labels(&x, &[Label::E1, Label::E2, Label::E3, Label::E4], &plain)?;
            Ok((x, r))
        }
        Wmp => {
            let (m, n) = (inp.metric_m(kind)?, inp.metric_n(kind)?);
            let x = weighted_mp(a, m, n, tol)?;
            let env = plain.with_m(m).with_n(n);
            let r = labels(&x, &[Label::E1, Label::E2, Label::E3M, Label::E4N], &env)?;
            Ok((x, r))
        }
        Group => {
            let x = group_inverse(a, tol)?;
            let r = labels(&x, &[Label::E1, Label::E2, Label::E5], &plain)?;
            Ok((x, r))
        }
        Drazin => {
            let x = drazin(a, tol)?;
            let k = index_of_square(a, tol)?;
            let r = labels(&x, &[Label::E1k(k), Label::E2, Label::E5], &plain)?;
            Ok((x, r))
        }
        Core => {
            let x = core(a, tol)?;
            let r = labels(&x, &[Label::E1, Label::E2, Label::E3, Label::E6, Label::E7], &plain)?;
            Ok((x, r))
        }
        DualCore => {
            let x = dual_core(a, tol)?;
            let r = labels(&x, &[Label::E1, Label::E2, Label::E4, Label::E8, Label::E9], &plain)?;
            Ok((x, r))
        }
        CoreEp => {
            let x = core_ep(a, tol)?;
            let k = index_of_square(a, tol)?;
            let r = labels(&x, &[Label::E1k(k), Label::E2, Label::E7], &plain)?;
            Ok((x, r))
        }
        MCore => {
            let m = inp.metric_m(kind)?;
            let variant = match &inp.param {
                Some(l) => CoreVariant::Algorithm1(Some(l)),
                None => CoreVariant::ClosedForm,
            };
            let x = m_weighted_core(a, m, variant, tol)?;
            let r = labels(&x, &[Label::E3M, Label::E6, Label::E7], &plain.with_m(m))?;
            Ok((x, r))
        }
        NDualCore => {
            let n = inp.metric_n(kind)?;
            let x = n_weighted_dual_core(a, n, tol)?;
            let r = labels(&x, &[Label::E4N, Label::E8, Label::E9], &plain.with_n(n))?;
            Ok((x, r))
        }
        WDrazin | WCoreEp | W1231k | W124k1 => {
            let ctx = inp.context(kind)?;
            let k = ctx.kappa;
            let (x, ls) = match kind {
                WDrazin => (w_drazin(&ctx)?, vec![Label::E2W, Label::E5W, Label::E1kW(k)]),
                WCoreEp => (w_core_ep(&ctx)?, vec![Label::E3W, Label::E6W, Label::E1kW(k)]),
                W1231k => {
                    let x = match &inp.param {
                        Some(p) => family_member_w1231k(&ctx, p)?,
                        None => canonical_w1231k(&ctx)?,
                    };
                    (x, w1231k_labels(k))
                }
                _ => {
                    let x = match &inp.param {
                        Some(p) => family_member_w124k1(&ctx, p)?,
                        None => canonical_w124k1(&ctx)?,
                    };
                    (x, w124k1_labels(k))
                }
            };
            let r = check_all(&ls, a, &x, &Env::weighted(&ctx))?;
            Ok((x, ComputeReport::Labels(r)))
        }
        WKMp | WMpK | WMpKMp => {
            let ctx = inp.context(kind)?;
            let (x, which) = match kind {
                WKMp => (w_k_mp(&ctx)?, IndexMpKind::KMp),
                WMpK => (w_mp_k(&ctx)?, IndexMpKind::MpK),
                _ => (w_mp_k_mp(&ctx)?, IndexMpKind::MpKMp),
            };
            let r = check_characterizations(&ctx, which, &x)?;
            Ok((x, ComputeReport::Systems(r)))
        }
        Bilateral => {
            let ctx = inp.context(kind)?;
            let (x1, x2) = inp.params.clone().ok_or_else(|| Error::MissingInput {
                label: kind.to_string(),
                what: "X1 and X2 (--param file with fields x1, x2)",
            })?;
            let env = Env::weighted(&ctx);
            let classes = |x: &Matrix<T>| -> Result<Vec<Label>> {
                let r = check_all(&[Label::E1W, Label::E2W], a, x, &env)?;
                Ok(r.holding())
            };
            let (c1, c2) = (classes(&x1)?, classes(&x2)?);
            let spec = BilateralSpec::new(&ctx, x1, x2, c1.clone(), c2.clone())?;
            let x = if c1.contains(&Label::E2W) && c2.contains(&Label::E1W) {
                solve_bilateral_system(&ctx, &spec)?
            } else {
                bilateral(&ctx, &spec)
            };
            let both = |l| c1.contains(&l) && c2.contains(&l);
            let mixed = (c1.contains(&Label::E2W) && c2.contains(&Label::E1W))
                || (c1.contains(&Label::E1W) && c2.contains(&Label::E2W));
            let mut ls = Vec::new();
            if both(Label::E1W) {
                ls.push(Label::E1W);
            }
            if (both(Label::E1W) && both(Label::E2W)) || mixed {
                ls.push(Label::E2W);
            }
            let r = check_all(&ls, a, &x, &env)?;
            Ok((x, ComputeReport::Labels(r)))
        }
    }
}

#[derive(Parser, Debug)]
#[command(name = "wginv", version, about = "Weighted generalized matrix inverses")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct Common {
    #[arg(long, value_enum, default_value = "exact")]
    pub backend: BackendArg,
    /// Relative tolerance for matrix equality on the float backend.
    #[arg(long)]
    pub tol: Option<f64>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
pub enum BackendArg {
    Exact,
    Float,
}

impl Common {
    fn tolerance(&self) -> Result<Tolerance> {
        match self.tol {
            Some(t) if !(t.is_finite() && t > 0.0) => Err(Error::Parse(format!("--tol must be positive, got {t}"))),
            Some(t) => Ok(Tolerance::with_eq(t)),
            None => Ok(Tolerance::default()),
        }
    }

    fn backend(&self) -> Backend {
        match self.backend {
            BackendArg::Exact => Backend::Exact,
            BackendArg::Float => Backend::Float,
        }
    }
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Compute an inverse and verify its defining equations.
    Compute(ComputeArgs),
    /// Check a candidate against equation labels.
    Verify(VerifyArgs),
    /// Reverse-order-law diagnostics for M-weighted core (or N-weighted dual core) inverses.
    Rol(RolArgs),
    /// Weighted core-EP decomposition (float backend).
    Decompose(DecomposeArgs),
    /// Run the seeded property-suite catalogue.
    Selftest(SelftestArgs),
}

#[derive(Args, Debug)]
pub struct ComputeArgs {
    #[arg(long, value_enum)]
    pub inverse: InverseKind,
    #[arg(long)]
    pub matrix: PathBuf,
    #[arg(long)]
    pub weight: Option<PathBuf>,
    #[arg(long)]
    pub metric_m: Option<PathBuf>,
    #[arg(long)]
    pub metric_n: Option<PathBuf>,
    #[arg(long)]
    pub param: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[arg(long)]
    pub matrix: PathBuf,
    #[arg(long)]
    pub candidate: PathBuf,
    #[arg(long)]
    pub weight: Option<PathBuf>,
    #[arg(long)]
    pub metric_m: Option<PathBuf>,
    #[arg(long)]
    pub metric_n: Option<PathBuf>,
    /// Comma-separated labels or groups, or `all`.
    #[arg(long, default_value = "all")]
    pub labels: String,
    /// Exponent for the indexed labels; defaults to κ (weighted) or ind(A).
    #[arg(long)]
    pub k: Option<usize>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug)]
pub struct RolArgs {
    #[arg(long)]
    pub a: PathBuf,
    #[arg(long)]
    pub b: PathBuf,
    #[arg(long)]
    pub metric_m: Option<PathBuf>,
    /// Check `(AB)^{N} = B^{N}A^{N}` for N-weighted dual core inverses instead.
    #[arg(long)]
    pub metric_n: Option<PathBuf>,
    #[command(flatten)]
    pub common: Common,
}

#[derive(Args, Debug)]
pub struct DecomposeArgs {
    #[arg(long)]
    pub matrix: PathBuf,
    #[arg(long)]
    pub weight: PathBuf,
    #[arg(long, value_enum, default_value = "float")]
    pub backend: BackendArg,
    #[arg(long)]
    pub tol: Option<f64>,
}

#[derive(Args, Debug)]
pub struct SelftestArgs {
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    #[arg(long, default_value_t = 10)]
    pub instances: usize,
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::NonExistent { .. } | Error::Verification { .. } => 2,
        _ => 1,
    }
}

/// Parse `args` (including the program name) and run; output goes to `out`,
/// diagnostics to `err`.
pub fn run<I, S>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = if code == 0 { write!(out, "{e}") } else { write!(err, "{e}") };
            return code;
        }
    };
    match dispatch(&cli.command) {
        Ok((text, code)) => {
            let _ = out.write_all(text.as_bytes());
            code
        }
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

fn dispatch(cmd: &Command) -> Result<(String, i32)> {
    match cmd {
        Command::Compute(a) => match a.common.backend() {
            Backend::Exact => cmd_compute::<Q>(a),
            Backend::Float => cmd_compute::<Complex64>(a),
        },
        Command::Verify(a) => match a.common.backend() {
            Backend::Exact => cmd_verify::<Q>(a),
            Backend::Float => cmd_verify::<Complex64>(a),
        },
        Command::Rol(a) => match a.common.backend() {
            Backend::Exact => cmd_rol::<Q>(a),
            Backend::Float => cmd_rol::<Complex64>(a),
        },
        Command::Decompose(a) => match a.backend {
            BackendArg::Exact => Err(Error::FloatOnly("weighted core-EP decomposition")),
            BackendArg::Float => cmd_decompose(a),
        },
        Command::Selftest(a) => {
            let report = run_selftest(a.seed, a.instances);
            let code = if report.all_passed() { 0 } else { 2 };
            Ok((format!("{report}\n"), code))
        }
    }
}

fn opt_matrix<T: Scalar>(p: &Option<PathBuf>) -> Result<Option<Matrix<T>>> {
    p.as_deref().map(read_matrix).transpose()
}

fn opt_metric<T: Scalar>(p: &Option<PathBuf>, tol: &Tolerance) -> Result<Option<MetricMatrix<T>>> {
    opt_matrix(p)?.map(|m| MetricMatrix::new(m, tol)).transpose()
}

fn cmd_compute<T: Scalar>(args: &ComputeArgs) -> Result<(String, i32)> {
    let tol = args.common.tolerance()?;
    let mut inp = Inputs::new(read_matrix::<T>(&args.matrix)?, tol);
    inp.w = opt_matrix(&args.weight)?;
    inp.metric_m = opt_metric(&args.metric_m, &tol)?;
    inp.metric_n = opt_metric(&args.metric_n, &tol)?;
    if let Some(p) = &args.param {
        if args.inverse == InverseKind::Bilateral {
            let v = read_named::<T>(p, &["x1", "x2"])?;
            inp.params = Some((v[0].clone(), v[1].clone()));
        } else {
            inp.param = Some(read_matrix(p)?);
        }
    }
    let (x, report) = compute(args.inverse, &inp)?;
    let mut text = String::new();
    let _ = writeln!(text, "inverse={}", args.inverse);
    let _ = writeln!(text, "backend={}", T::BACKEND);
    let _ = writeln!(text, "shape={}x{}", x.rows(), x.cols());
    let _ = writeln!(text, "{report}");
    let _ = writeln!(text, "result={}", matrix_to_string(&x)?);
    if let Some(path) = &args.out {
        write_document(path, args.inverse, &x, &report)?;
    }
    Ok((text, 0))
}

fn write_document<T: Scalar>(path: &Path, kind: InverseKind, x: &Matrix<T>, report: &ComputeReport) -> Result<()> {
    let doc = json!({
        "inverse": kind.name(),
        "backend": T::BACKEND.to_string(),
        "matrix": matrix_to_value(x)?,
        "report": report.to_json(),
    });
    let mut s = serde_json::to_string_pretty(&doc)?;
    s.push('\n');
    fs::write(path, s)?;
    Ok(())
}

fn cmd_verify<T: Scalar>(args: &VerifyArgs) -> Result<(String, i32)> {
    let tol = args.common.tolerance()?;
    let a = read_matrix::<T>(&args.matrix)?;
    let x = read_matrix::<T>(&args.candidate)?;
    let w = opt_matrix::<T>(&args.weight)?;
    let m = opt_metric::<T>(&args.metric_m, &tol)?;
    let n = opt_metric::<T>(&args.metric_n, &tol)?;
    let ctx = w.map(|w| make_context(a.clone(), w, &tol)).transpose()?;
    let expected = if ctx.is_some() { a.shape() } else { (a.cols(), a.rows()) };
    if x.shape() != expected {
        return Err(Error::shape(
            "verify",
            format!("candidate is {}x{}, expected {}x{}", x.rows(), x.cols(), expected.0, expected.1),
        ));
    }
    let k = match (args.k, &ctx) {
        (Some(k), _) => k,
        (None, Some(c)) => c.kappa,
        (None, None) => index_of_square(&a, &tol)?,
    };
    let mut env = match &ctx {
        Some(c) => Env::weighted(c),
        None => Env::plain(tol),
    };
    env.m = m.as_ref();
    env.n = n.as_ref();
    let report = if args.labels.trim() == "all" {
        classify(&a, &x, &env, k)
    } else {
        check_all(&Label::parse_list(&args.labels, k)?, &a, &x, &env)?
    };
    let code = if report.overall { 0 } else { 2 };
    Ok((format!("k={k}\n{report}\n"), code))
}

fn cmd_rol<T: Scalar>(args: &RolArgs) -> Result<(String, i32)> {
    let tol = args.common.tolerance()?;
    let a = read_matrix::<T>(&args.a)?;
    let b = read_matrix::<T>(&args.b)?;
    let (variant, report) = match (&args.metric_m, &args.metric_n) {
        (Some(_), Some(_)) => {
            return Err(Error::Parse("give either --metric-m or --metric-n, not both".into()));
        }
        (_, Some(p)) => ("n-dual-core", check_rol_n_dual(&a, &b, &MetricMatrix::new(read_matrix(p)?, &tol)?, &tol)?),
        (Some(p), None) => ("m-core", check_rol_m_core(&a, &b, &MetricMatrix::new(read_matrix(p)?, &tol)?, &tol)?),
        (None, None) => ("m-core", check_rol_m_core(&a, &b, &MetricMatrix::identity(a.rows()), &tol)?),
    };
    Ok((format!("variant={variant}\n{report}\n"), 0))
}

fn cmd_decompose(args: &DecomposeArgs) -> Result<(String, i32)> {
    let tol = match args.tol {
        Some(t) => Tolerance::with_eq(t),
        None => Tolerance::default(),
    };
    let a = read_matrix::<Complex64>(&args.matrix)?;
    let w = read_matrix::<Complex64>(&args.weight)?;
    let ctx = make_context(a.clone(), w.clone(), &tol)?;
    let d = wcep_decompose(&ctx)?;
    let res = d.residuals(&a, &w);
    let mut text = String::new();
    let _ = writeln!(text, "r={}", d.r);
    let _ = writeln!(text, "kappa={}", d.kappa);
    for (name, m) in [
        ("u", &d.u),
        ("v", &d.v),
        ("a1", &d.a1),
        ("a2", &d.a2),
        ("a3", &d.a3),
        ("w1", &d.w1),
        ("w2", &d.w2),
        ("w3", &d.w3),
    ] {
        let _ = writeln!(text, "block.{name}={}", matrix_to_string(m)?);
    }
    let _ = writeln!(text, "residual.a={}", float_text(res.a_reconstruction));
    let _ = writeln!(text, "residual.w={}", float_text(res.w_reconstruction));
    let _ = writeln!(text, "residual.u_unitarity={}", float_text(res.u_unitarity));
    let _ = writeln!(text, "residual.v_unitarity={}", float_text(res.v_unitarity));
    let _ = writeln!(text, "residual.lower_left={}", float_text(res.lower_left));
    let _ = writeln!(text, "residual.nilpotency={}", float_text(res.nilpotency));
    let _ = writeln!(text, "residual.max={}", float_text(res.max()));
    Ok((text, 0))
}
