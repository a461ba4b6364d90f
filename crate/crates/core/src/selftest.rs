//! Seeded property suites over random instances, run on both backends.
//!
//! Every instance draws its own generator from `(seed, suite, backend,
//! instance)`, so results do not depend on the thread schedule.

use std::fmt;
use std::thread;

use num_complex::Complex64;

use crate::axioms::Label;
use crate::bilateral::{bilateral_system, self_duality, solve_bilateral_system, BilateralSpec};
use crate::cli::{compute, InverseKind, Inputs};
use crate::decomposition::wcep_decompose;
use crate::error::Result;
use crate::generate::Generator;
use crate::indexmp::{
    check_characterizations, composition_identities, solve_projector_system, via_decomposition_corrected, w_k_mp,
    w_mp_k, w_mp_k_mp, CharacterizationReport, IndexMpKind,
};
use crate::matcore::{mat_eq, outer_from_full_rank, rank, srank, Tolerance, WeightedContext};
use crate::scalar::{Backend, Scalar, Q};
use crate::wcore::{check_rol_m_core, check_rol_n_dual, m_weighted_core, CoreVariant, RolReport};
use crate::wfamily::{canonical_w1231k, family_member_w1231k, recover_from_member, w_core_condition_sets, w_core_ep};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Suite {
    /// Computed inverse satisfies its defining equations.
    Inverse(InverseKind),
    /// M-core closed form vs row-reduction variants; index-MP definition vs projector solve.
    Uniqueness,
    /// Equivalent systems agree on solutions and on perturbed non-solutions.
    IndexMpSystems,
    /// The four W-weighted core condition sets agree at κ ≤ 1.
    WCoreConditions,
    ReverseOrderLaw,
    Recovery,
    SelfDuality,
    /// Float only: round trip, block invariants and block representation.
    Decomposition,
}

impl Suite {
    pub fn catalogue() -> Vec<Suite> {
        let mut v: Vec<Suite> = InverseKind::ALL.iter().map(|&k| Suite::Inverse(k)).collect();
        v.extend([
            Suite::Uniqueness,
            Suite::IndexMpSystems,
            Suite::WCoreConditions,
            Suite::ReverseOrderLaw,
            Suite::Recovery,
            Suite::SelfDuality,
            Suite::Decomposition,
        ]);
        v
    }

    pub fn name(self) -> &'static str {
        match self {
            Suite::Inverse(k) => k.name(),
            Suite::Uniqueness => "uniqueness",
            Suite::IndexMpSystems => "index-mp-systems",
            Suite::WCoreConditions => "w-core-conditions",
            Suite::ReverseOrderLaw => "reverse-order-law",
            Suite::Recovery => "recovery",
            Suite::SelfDuality => "self-duality",
            Suite::Decomposition => "decomposition",
        }
    }

    pub fn supports(self, backend: Backend) -> bool {
        !(self == Suite::Decomposition && backend == Backend::Exact)
    }

    fn id(self) -> u64 {
        match self {
            Suite::Inverse(k) => InverseKind::ALL.iter().position(|&x| x == k).unwrap_or(0) as u64,
            Suite::Uniqueness => 100,
            Suite::IndexMpSystems => 101,
            Suite::WCoreConditions => 102,
            Suite::ReverseOrderLaw => 103,
            Suite::Recovery => 104,
            Suite::SelfDuality => 105,
            Suite::Decomposition => 106,
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug)]
pub struct SuiteConfig {
    pub max_size: usize,
    pub kmax: usize,
    pub threads: usize,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        SuiteConfig {
            max_size: 5,
            kmax: 3,
            threads: thread::available_parallelism().map(|n| n.get()).unwrap_or(1),
        }
    }
}

#[derive(Clone, Debug)]
pub struct SuiteOutcome {
    pub suite: Suite,
    pub backend: Backend,
    pub total: usize,
    pub passed: usize,
    /// `(instance, reason)` for each failure, in instance order.
    pub failures: Vec<(usize, String)>,
}

impl SuiteOutcome {
    pub fn ok(&self) -> bool {
        self.passed == self.total
    }
}

impl fmt::Display for SuiteOutcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let verdict = if self.ok() { "pass" } else { "FAIL" };
        write!(f, "{verdict} {}/{}", self.passed, self.total)
    }
}

fn instance_seed(seed: u64, suite: Suite, backend: Backend, i: usize) -> u64 {
    let b = match backend {
        Backend::Exact => 1,
        Backend::Float => 2,
    };
    let mut z = seed ^ (suite.id() << 40) ^ (b << 56) ^ (i as u64);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Run `instances` seeded instances of one suite on one backend.
pub fn run_suite(suite: Suite, backend: Backend, seed: u64, instances: usize, cfg: &SuiteConfig) -> SuiteOutcome {
    let threads = cfg.threads.clamp(1, instances.max(1));
    let mut results: Vec<(usize, std::result::Result<(), String>)> = thread::scope(|s| {
        let handles: Vec<_> = (0..threads)
            .map(|t| {
                s.spawn(move || {
                    (t..instances)
                        .step_by(threads)
                        .map(|i| {
                            let mut g = Generator::new(instance_seed(seed, suite, backend, i));
                            (i, run_instance(suite, backend, &mut g, cfg))
                        })
                        .collect::<Vec<_>>()
                })
            })
            .collect();
        handles.into_iter().flat_map(|h| h.join().expect("selftest worker panicked")).collect()
    });
    results.sort_by_key(|r| r.0);
    let failures: Vec<(usize, String)> = results
        .into_iter()
        .filter_map(|(i, r)| r.err().map(|e| (i, e)))
        .collect();
    SuiteOutcome {
        suite,
        backend,
        total: instances,
        passed: instances - failures.len(),
        failures,
    }
}

fn run_instance(suite: Suite, backend: Backend, g: &mut Generator, cfg: &SuiteConfig) -> std::result::Result<(), String> {
    let r = match backend {
        Backend::Exact => instance::<Q>(suite, g, cfg),
        Backend::Float => instance::<Complex64>(suite, g, cfg),
    };
    match r {
        Ok(Ok(())) => Ok(()),
        Ok(Err(msg)) => Err(msg),
        Err(e) => Err(format!("error: {e}")),
    }
}

type Verdict = std::result::Result<(), String>;

fn expect(cond: bool, msg: impl FnOnce() -> String) -> Verdict {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn instance<T: Scalar>(suite: Suite, g: &mut Generator, cfg: &SuiteConfig) -> Result<Verdict> {
    let tol = Tolerance::default();
    match suite {
        Suite::Inverse(kind) => {
            let inp = inverse_inputs::<T>(kind, g, cfg, &tol)?;
            let (_, report) = compute(kind, &inp)?;
            Ok(expect(report.overall(), || format!("{} {}x{}: {report}", kind, inp.a.rows(), inp.a.cols())))
        }
        Suite::Uniqueness => uniqueness::<T>(g, cfg, &tol),
        Suite::IndexMpSystems => index_mp_systems::<T>(g, cfg, &tol),
        Suite::WCoreConditions => w_core_conditions::<T>(g, cfg, &tol),
        Suite::ReverseOrderLaw => reverse_order_law::<T>(g, cfg, &tol),
        Suite::Recovery => recovery::<T>(g, cfg, &tol),
        Suite::SelfDuality => self_duality_instance::<T>(g, cfg, &tol),
        Suite::Decomposition => decomposition(g, cfg, &tol),
    }
}

fn context<T: Scalar>(g: &mut Generator, cfg: &SuiteConfig, tol: &Tolerance) -> WeightedContext<T> {
    g.random_context::<T>(1, cfg.max_size, cfg.kmax, tol)
}

/// `rank(WAW)`, with roundoff judged against `‖A‖‖W‖²`.
fn waw_rank<T: Scalar>(ctx: &WeightedContext<T>) -> usize {
    srank(&ctx.waw(), ctx.scale() * ctx.w.frobenius(), &ctx.tol)
}

/// A context with `rank(WAW) = rank(A) > 0`, so that `{1^W}` is nonempty.
fn inner_context<T: Scalar>(g: &mut Generator, cfg: &SuiteConfig, tol: &Tolerance) -> WeightedContext<T> {
    loop {
        let ctx = context::<T>(g, cfg, tol);
        let r = waw_rank(&ctx);
        if r > 0 && r == rank(&ctx.a, &ctx.tol) {
            return ctx;
        }
    }
}

/// Inputs for which the inverse exists.
pub fn inverse_inputs<T: Scalar>(kind: InverseKind, g: &mut Generator, cfg: &SuiteConfig, tol: &Tolerance) -> Result<Inputs<T>> {
    use InverseKind::*;
    let hi = cfg.max_size;
    let square_index_one = |g: &mut Generator| {
        let n = g.usize_in(1, hi);
        let r = g.usize_in(0, n);
        g.index_one::<T>(n, r)
    };
    let inp = match kind {
        Mp | Wmp => {
            let (m, n) = (g.usize_in(1, hi), g.usize_in(1, hi));
            let r = g.usize_in(0, m.min(n));
            let mut inp = Inputs::new(g.matrix_of_rank::<T>(m, n, r, tol), *tol);
            if kind == Wmp {
                inp.metric_m = Some(g.pd_metric(m, tol));
                inp.metric_n = Some(g.pd_metric(n, tol));
            }
            inp
        }
        Group | Core | DualCore => Inputs::new(square_index_one(g), *tol),
        Drazin | CoreEp => {
            let n = g.usize_in(1, hi);
            let k = g.usize_in(0, cfg.kmax.min(n));
            Inputs::new(g.of_index::<T>(n, k), *tol)
        }
        MCore | NDualCore => {
            let a = square_index_one(g);
            let n = a.rows();
            let mut inp = Inputs::new(a, *tol);
            if kind == MCore {
                inp.metric_m = Some(g.pd_metric(n, tol));
                if g.coin(0.5) {
                    let r = rank(&inp.a, tol);
                    inp.param = Some(g.matrix::<T>(n - r, n - r));
                }
            } else {
                inp.metric_n = Some(g.pd_metric(n, tol));
            }
            inp
        }
        WDrazin | WCoreEp | W1231k | W124k1 | WKMp | WMpK | WMpKMp => {
            let ctx = context::<T>(g, cfg, tol);
            let mut inp = Inputs::new(ctx.a.clone(), *tol);
            if kind == W1231k && g.coin(0.5) {
                inp.param = Some(g.matrix::<T>(ctx.m(), ctx.m()));
            }
            if kind == W124k1 && g.coin(0.5) {
                inp.param = Some(g.matrix::<T>(ctx.n(), ctx.n()));
            }
            inp.w = Some(ctx.w);
            inp
        }
        Bilateral => {
            let ctx = inner_context::<T>(g, cfg, tol);
            let s = g.usize_in(1, waw_rank(&ctx));
            let outer = g.w_outer(&ctx, s)?;
            let inner = g.w_inner(&ctx)?;
            let mut inp = Inputs::new(ctx.a.clone(), *tol);
            inp.params = Some(if g.coin(0.75) { (outer, inner) } else { (inner, outer) });
            inp.w = Some(ctx.w);
            inp
        }
    };
    Ok(inp)
}

fn uniqueness<T: Scalar>(g: &mut Generator, cfg: &SuiteConfig, tol: &Tolerance) -> Result<Verdict> {
    let n = g.usize_in(1, cfg.max_size);
    let r = g.usize_in(0, n);
    let a = g.index_one::<T>(n, r);
    let m = g.pd_metric::<T>(n, tol);
    let closed = m_weighted_core(&a, &m, CoreVariant::ClosedForm, tol)?;
    for _ in 0..3 {
        let l = g.matrix::<T>(n - r, n - r);
        let alt = m_weighted_core(&a, &m, CoreVariant::Algorithm1(Some(&l)), tol)?;
        if !mat_eq(&closed, &alt, tol) {
            return Ok(Err(format!("m-core {n}x{n}: row-reduction variant differs from the closed form")));
        }
    }
    let ctx = context::<T>(g, cfg, tol);
    for which in [IndexMpKind::KMp, IndexMpKind::MpK] {
        let def = match which {
            IndexMpKind::KMp => w_k_mp(&ctx)?,
            _ => w_mp_k(&ctx)?,
        };
        let solved = solve_projector_system(&ctx, which)?;
        if !mat_eq(&def, &solved, tol) {
            return Ok(Err(format!("{which}: projector solve differs from the definition")));
        }
    }
    Ok(Ok(()))
}

/// The second mp-k-mp system also holds for `X + N` with `AN = 0` and
/// `N·(AW)^D·AWAA† = N`, so it is left out on perturbed matrices.
fn agree_off_solution(r: &CharacterizationReport) -> bool {
    r.systems
        .iter()
        .filter(|s| !(r.which == IndexMpKind::MpKMp && s.0 == "theorem (ii)"))
        .all(|s| s.1 == r.definition)
}

fn index_mp_systems<T: Scalar>(g: &mut Generator, cfg: &SuiteConfig, tol: &Tolerance) -> Result<Verdict> {
    let ctx = context::<T>(g, cfg, tol);
    for which in [IndexMpKind::KMp, IndexMpKind::MpK, IndexMpKind::MpKMp] {
        let x = match which {
            IndexMpKind::KMp => w_k_mp(&ctx)?,
            IndexMpKind::MpK => w_mp_k(&ctx)?,
            IndexMpKind::MpKMp => w_mp_k_mp(&ctx)?,
        };
        let on = check_characterizations(&ctx, which, &x)?;
        if !(on.definition && on.consistent()) {
            return Ok(Err(format!("{which} on the solution: {on}")));
        }
        let y = g.perturb(&x, T::one());
        let off = check_characterizations(&ctx, which, &y)?;
        if off.definition || !agree_off_solution(&off) {
            return Ok(Err(format!("{which} on a perturbed matrix: {off}")));
        }
    }
    let comp = composition_identities(&ctx)?;
    Ok(expect(comp.iter().all(|c| c.1), || format!("composition identities: {comp:?}")))
}

fn w_core_conditions<T: Scalar>(g: &mut Generator, cfg: &SuiteConfig, tol: &Tolerance) -> Result<Verdict> {
    let ctx = g.random_context::<T>(1, cfg.max_size, 1, tol);
    let x = w_core_ep(&ctx)?;
    let mut candidates = vec![x.clone(), g.perturb(&x, T::one()), g.matrix::<T>(x.rows(), x.cols())];
    if let Ok(h) = g.w_inner(&ctx) {
        candidates.push(h);
    }
    for (i, y) in candidates.iter().enumerate() {
        let sets = w_core_condition_sets(&ctx, y)?;
        if sets.iter().any(|&s| s != sets[0]) || (i == 0 && !sets[0]) {
            return Ok(Err(format!("candidate {i}: condition sets {sets:?}")));
        }
    }
    Ok(Ok(()))
}

fn rol_verdict(r: &RolReport, constructed: bool) -> Verdict {
    if constructed && !(r.rol_holds && r.ind_ab <= 1) {
        return Err(format!("constructed pair: reverse order law fails\n{r}"));
    }
    if r.rol_holds && !r.necessary_conditions() {
        return Err(format!("necessary conditions fail\n{r}"));
    }
    let (a, b, c) = r.iff_triple();
    if r.iff_hypotheses() && !(a == b && b == c) {
        return Err(format!("characterization disagrees\n{r}"));
    }
    Ok(())
}

fn reverse_order_law<T: Scalar>(g: &mut Generator, cfg: &SuiteConfig, tol: &Tolerance) -> Result<Verdict> {
    let n = g.usize_in(1, cfg.max_size);
    let m = g.pd_metric::<T>(n, tol);
    let (a, b) = g.rol_pair_m::<T>(n, tol);
    if let Err(e) = rol_verdict(&check_rol_m_core(&a, &b, &m, tol)?, true) {
        return Ok(Err(format!("M-core: {e}")));
    }
    let (a, b) = g.rol_pair_n::<T>(n, tol);
    if let Err(e) = rol_verdict(&check_rol_n_dual(&a, &b, &m, tol)?, true) {
        return Ok(Err(format!("N-dual core: {e}")));
    }
    let (ra, rb) = (g.usize_in(0, n), g.usize_in(0, n));
    let (a, b) = (g.index_one::<T>(n, ra), g.index_one::<T>(n, rb));
    if let Err(e) = rol_verdict(&check_rol_m_core(&a, &b, &m, tol)?, false) {
        return Ok(Err(format!("M-core, free pair: {e}")));
    }
    Ok(Ok(()))
}

fn recovery<T: Scalar>(g: &mut Generator, cfg: &SuiteConfig, tol: &Tolerance) -> Result<Verdict> {
    let ctx = context::<T>(g, cfg, tol);
    let mut members = vec![canonical_w1231k(&ctx)?];
    for _ in 0..2 {
        members.push(family_member_w1231k(&ctx, &g.matrix::<T>(ctx.m(), ctx.m()))?);
    }
    let first = recover_from_member(&ctx, &members[0], ctx.kappa)?;
    for x in &members[1..] {
        let r = recover_from_member(&ctx, x, ctx.kappa)?;
        let same = mat_eq(&r.w_drazin, &first.w_drazin, tol) && mat_eq(&r.wdmp, &first.wdmp, tol) && mat_eq(&r.wcmp, &first.wcmp, tol);
        if !same {
            return Ok(Err(format!("{}x{} κ={}: recovered matrices depend on the member", ctx.m(), ctx.n(), ctx.kappa)));
        }
    }
    Ok(Ok(()))
}

fn self_duality_instance<T: Scalar>(g: &mut Generator, cfg: &SuiteConfig, tol: &Tolerance) -> Result<Verdict> {
    let ctx = inner_context::<T>(g, cfg, tol);
    let waw = ctx.waw();
    let x2 = g.w_inner(&ctx)?;
    let s = g.usize_in(1, waw_rank(&ctx));
    let aligned = g.coin(0.5);
    let x1 = loop {
        let (mut f, mut h) = (g.matrix::<T>(ctx.m(), s), g.matrix::<T>(s, ctx.n()));
        if aligned {
            f = &(&x2 * &waw) * &f;
            h = &(&h * &waw) * &x2;
        }
        if let Ok(x) = outer_from_full_rank(&f, &h, &waw, tol) {
            break x;
        }
    };
    let spec = BilateralSpec::new(&ctx, x1, x2, vec![Label::E2W], vec![Label::E1W])?;
    let x = solve_bilateral_system(&ctx, &spec)?;
    if bilateral_system(&ctx, &spec, &x) != [true; 3] {
        return Ok(Err("bilateral system fails on its solution".into()));
    }
    let sd = self_duality(&ctx, &spec)?;
    if !sd.consistent() {
        return Ok(Err(format!("outer-inner: {sd}")));
    }
    let sd = self_duality(&ctx, &spec.swapped())?;
    Ok(expect(sd.consistent(), || format!("swapped: {sd}")))
}

fn decomposition(g: &mut Generator, cfg: &SuiteConfig, tol: &Tolerance) -> Result<Verdict> {
    let ctx = context::<Complex64>(g, cfg, tol);
    let dec = wcep_decompose(&ctx)?;
    let res = dec.residuals(&ctx.a, &ctx.w);
    let within = res.a_reconstruction <= 1e-8
        && res.w_reconstruction <= 1e-8
        && res.u_unitarity <= 1e-10
        && res.v_unitarity <= 1e-10
        && res.nilpotency <= 1e-9
        && res.lower_left <= 1e-9;
    if !within {
        return Ok(Err(format!("{}x{} κ={}: residuals {res:?}", ctx.m(), ctx.n(), ctx.kappa)));
    }
    for which in [IndexMpKind::KMp, IndexMpKind::MpK, IndexMpKind::MpKMp] {
        let direct = match which {
            IndexMpKind::KMp => w_k_mp(&ctx)?,
            IndexMpKind::MpK => w_mp_k(&ctx)?,
            IndexMpKind::MpKMp => w_mp_k_mp(&ctx)?,
        };
        let blocks = via_decomposition_corrected(&dec, which)?;
        let err = (&blocks - &direct).frobenius() / direct.frobenius().max(1.0);
        if err > 1e-8 {
            return Ok(Err(format!("{which}: block representation off by {err:.3e}")));
        }
    }
    Ok(Ok(()))
}

#[derive(Clone, Debug)]
pub struct SelftestReport {
    pub seed: u64,
    pub instances: usize,
    /// One row per suite: exact then float outcome (`None` when unsupported).
    pub rows: Vec<(Suite, [Option<SuiteOutcome>; 2])>,
}

impl SelftestReport {
    pub fn all_passed(&self) -> bool {
        self.rows.iter().flat_map(|r| r.1.iter().flatten()).all(SuiteOutcome::ok)
    }
}

impl fmt::Display for SelftestReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "seed={} instances={}", self.seed, self.instances)?;
        writeln!(f, "{:<20} {:<12} {:<12}", "suite", "exact", "float")?;
        for (suite, cells) in &self.rows {
            let cell = |c: &Option<SuiteOutcome>| c.as_ref().map_or_else(|| "n/a".to_string(), |o| o.to_string());
            writeln!(f, "{:<20} {:<12} {:<12}", suite.name(), cell(&cells[0]), cell(&cells[1]))?;
        }
        for o in self.rows.iter().flat_map(|r| r.1.iter().flatten()) {
            for (i, why) in &o.failures {
                writeln!(f, "failure.{}.{}.{i}={}", o.suite, o.backend, why.replace('\n', "; "))?;
            }
        }
        write!(f, "overall={}", if self.all_passed() { "pass" } else { "fail" })
    }
}

/// Run the whole catalogue on both backends.
pub fn run_selftest(seed: u64, instances: usize) -> SelftestReport {
    let cfg = SuiteConfig::default();
    let rows = Suite::catalogue()
        .into_iter()
        .map(|suite| {
            let cell = |b| suite.supports(b).then(|| run_suite(suite, b, seed, instances, &cfg));
            (suite, [cell(Backend::Exact), cell(Backend::Float)])
        })
        .collect();
    SelftestReport { seed, instances, rows }
}
