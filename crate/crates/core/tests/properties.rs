//! Property tests over random exact and float inputs.

use proptest::prelude::*;
use wginv::axioms::{check, classify, Env, Label};
use wginv::bilateral::{bilateral, range_null_relations, solve_bilateral_system, BilateralSpec};
use wginv::classical::{core, drazin, dual_core, group_inverse, moore_penrose, weighted_mp};
use wginv::generate::Generator;
use wginv::indexmp::{check_characterizations, w_k_mp, w_mp_k, w_mp_k_mp, IndexMpKind};
use wginv::io::{matrix_from_str, matrix_to_string};
use wginv::matcore::{index, null_subset, one_inverse, outer_from_full_rank, rank, range_subset};
use wginv::wcore::{m_weighted_core, n_weighted_dual_core, CoreVariant};
use wginv::wfamily::{
    canonical_w124k1, canonical_w1231k, family_member_w124k1, family_member_w1231k, is_w124k1, is_w1231k, w_drazin,
};
use wginv::{make_context, Complex64, Matrix, MetricMatrix, Scalar, Tolerance, Q};

fn tol() -> Tolerance {
    Tolerance::default()
}

fn entry() -> impl Strategy<Value = Q> {
    prop_oneof![
        4 => (-2i64..=2).prop_map(|re| Q::from_i64(re, 0)),
        1 => (-1i64..=1, -1i64..=1).prop_map(|(re, im)| Q::from_i64(re, im)),
    ]
}

fn exact_matrix(max: usize) -> impl Strategy<Value = Matrix<Q>> {
    (1..=max, 1..=max).prop_flat_map(|(r, c)| {
        prop::collection::vec(entry(), r * c).prop_map(move |d| Matrix::new(r, c, d).unwrap())
    })
}

fn square_exact(max: usize) -> impl Strategy<Value = Matrix<Q>> {
    (1..=max).prop_flat_map(|n| prop::collection::vec(entry(), n * n).prop_map(move |d| Matrix::new(n, n, d).unwrap()))
}

/// Reduced row echelon form by plain elimination, for the oracles below.
fn oracle_rref(a: &Matrix<Q>) -> (Vec<Vec<Q>>, Vec<usize>) {
    let mut rows: Vec<Vec<Q>> = (0..a.rows()).map(|i| a.row(i).to_vec()).collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..a.cols() {
        let Some(p) = (r..rows.len()).find(|&i| !rows[i][c].is_zero()) else {
            continue;
        };
        rows.swap(r, p);
        let inv = Q::one().div(&rows[r][c]);
        rows[r] = rows[r].iter().map(|x| x.mul(&inv)).collect();
        for i in 0..rows.len() {
            if i != r && !rows[i][c].is_zero() {
                let f = rows[i][c].clone();
                rows[i] = rows[i].iter().zip(&rows[r]).map(|(x, y)| x.sub(&f.mul(y))).collect();
            }
        }
        pivots.push(c);
        r += 1;
    }
    (rows, pivots)
}

fn oracle_solvable(b: &Matrix<Q>, col: &Matrix<Q>) -> bool {
    let (_, pivots) = oracle_rref(&b.hstack(col));
    !pivots.contains(&b.cols())
}

fn oracle_null_basis(a: &Matrix<Q>) -> Vec<Matrix<Q>> {
    let (rows, pivots) = oracle_rref(a);
    (0..a.cols())
        .filter(|c| !pivots.contains(c))
        .map(|free| {
            let mut v = Matrix::<Q>::zeros(a.cols(), 1);
            v[(free, 0)] = Q::one();
            for (i, &p) in pivots.iter().enumerate() {
                v[(p, 0)] = rows[i][free].neg();
            }
            v
        })
        .collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn one_inverse_is_inner(b in exact_matrix(5), seed in any::<u64>()) {
        let r = rank(&b, &tol());
        let mut g = Generator::new(seed);
        let l = g.matrix::<Q>(b.cols() - r, b.rows() - r);
        for free in [None, Some(&l)] {
            let q = one_inverse(&b, free, &tol()).unwrap();
            prop_assert_eq!(&(&b * &q) * &b, b.clone());
        }
    }

    #[test]
    fn index_stabilizes(a in square_exact(5)) {
        let k = index(&a, &tol()).unwrap();
        prop_assert_eq!(rank(&a.pow(k), &tol()), rank(&a.pow(k + 1), &tol()));
        if k > 0 {
            prop_assert!(rank(&a.pow(k - 1), &tol()) > rank(&a.pow(k), &tol()));
        }
    }

    #[test]
    fn subspace_tests_match_oracle(a in exact_matrix(4), seed in any::<u64>()) {
        let mut g = Generator::new(seed);
        let w = g.usize_in(1, 4);
        let b = if g.coin(0.5) { &a * &g.matrix::<Q>(a.cols(), w) } else { g.matrix::<Q>(a.rows(), w) };
        let range = (0..b.cols()).all(|j| oracle_solvable(&a, &b.select_cols(&[j])));
        prop_assert_eq!(range_subset(&b, &a, &tol()).unwrap().holds, range);

        let h = g.usize_in(1, 4);
        let c = if g.coin(0.5) { &g.matrix::<Q>(h, a.rows()) * &a } else { g.matrix::<Q>(h, a.cols()) };
        let null = oracle_null_basis(&a).iter().all(|v| (&c * v).is_zero());
        prop_assert_eq!(null_subset(&a, &c, &tol()).unwrap().holds, null);
    }

    #[test]
    fn context_ranks_agree(seed in any::<u64>()) {
        let mut g = Generator::new(seed);
        let ctx = g.random_context::<Q>(1, 5, 3, &tol());
        let k = ctx.kappa;
        prop_assert_eq!(rank(&ctx.aw().pow(k), &tol()), rank(&ctx.wa().pow(k), &tol()));
        prop_assert_eq!(ctx.kappa, ctx.ind_aw.max(ctx.ind_wa));
    }

    #[test]
    fn outer_from_full_rank_is_outer(core_m in exact_matrix(5), seed in any::<u64>()) {
        let mut g = Generator::new(seed);
        let s = g.usize_in(1, 3);
        let f = g.matrix::<Q>(core_m.cols(), s);
        let h = g.matrix::<Q>(s, core_m.rows());
        if let Ok(x) = outer_from_full_rank(&f, &h, &core_m, &tol()) {
            prop_assert_eq!(&(&x * &core_m) * &x, x);
        }
    }

    #[test]
    fn membership_implications(a in square_exact(4), seed in any::<u64>()) {
        let mut g = Generator::new(seed);
        let mut candidates = vec![g.matrix::<Q>(a.rows(), a.rows()), moore_penrose(&a, &tol())];
        candidates.extend(core(&a, &tol()).ok());
        candidates.extend(dual_core(&a, &tol()).ok());
        let env = Env::plain(tol());
        let k = index(&a, &tol()).unwrap();
        for x in &candidates {
            let r = classify(&a, x, &env, k);
            prop_assert!(r.entries.iter().all(|e| e.residual == 0.0));
            let inner = r.holds(Label::E1) && r.holds(Label::E2);
            if r.holds(Label::E6) && r.holds(Label::E7) {
                prop_assert!(inner);
            }
            if r.holds(Label::E8) && r.holds(Label::E9) {
                prop_assert!(inner);
            }
            let again = classify(&a, x, &env, k);
            prop_assert_eq!(r.to_string(), again.to_string());
        }
    }

    #[test]
    fn classical_relations(a in square_exact(5)) {
        let n = a.rows();
        let id = MetricMatrix::identity(n);
        let ap = moore_penrose(&a, &tol());
        prop_assert_eq!(weighted_mp(&a, &id, &id, &tol()).unwrap(), ap.clone());
        let d = drazin(&a, &tol()).unwrap();
        let k = index(&a, &tol()).unwrap();
        let env = Env::plain(tol());
        for l in [Label::E1k(k), Label::E2, Label::E5] {
            prop_assert!(check(l, &a, &d, &env).unwrap().holds);
        }
        if k <= 1 {
            prop_assert_eq!(group_inverse(&a, &tol()).unwrap(), d);
        }
    }

    #[test]
    fn penrose_equations_on_float(seed in any::<u64>()) {
        let mut g = Generator::new(seed);
        let (m, n) = (g.usize_in(1, 8), g.usize_in(1, 8));
        let r = g.usize_in(0, m.min(n));
        let a = g.matrix_of_rank::<Complex64>(m, n, r, &tol());
        let x = moore_penrose(&a, &tol());
        let env = Env::plain(tol());
        for l in [Label::E1, Label::E2, Label::E3, Label::E4] {
            let e = check(l, &a, &x, &env).unwrap();
            prop_assert!(e.holds, "{} residual {}", l, e.residual);
        }
    }

    #[test]
    fn weighted_cores_are_unique_and_inner(seed in any::<u64>()) {
        let mut g = Generator::new(seed);
        let n = g.usize_in(1, 5);
        let r = g.usize_in(0, n);
        let a = g.index_one::<Q>(n, r);
        let m = g.pd_metric::<Q>(n, &tol());
        let x = m_weighted_core(&a, &m, CoreVariant::ClosedForm, &tol()).unwrap();
        for _ in 0..3 {
            let l = g.matrix::<Q>(n - r, n - r);
            prop_assert_eq!(m_weighted_core(&a, &m, CoreVariant::Algorithm1(Some(&l)), &tol()).unwrap(), x.clone());
        }
        let y = n_weighted_dual_core(&a, &m, &tol()).unwrap();
        let env = Env::plain(tol()).with_m(&m).with_n(&m);
        for (z, ls) in [(&x, [Label::E3M, Label::E6, Label::E7]), (&y, [Label::E4N, Label::E8, Label::E9])] {
            for l in ls.into_iter().chain([Label::E1, Label::E2]) {
                prop_assert!(check(l, &a, z, &env).unwrap().holds, "{}", l);
            }
        }
    }

    #[test]
    fn w_drazin_closed_forms_agree(seed in any::<u64>()) {
        let mut g = Generator::new(seed);
        let ctx = g.random_context::<Q>(1, 5, 3, &tol());
        let d_wa = drazin(&ctx.wa(), &tol()).unwrap();
        let d_aw = drazin(&ctx.aw(), &tol()).unwrap();
        let left = &ctx.a * &d_wa.pow(2);
        let right = &d_aw.pow(2) * &ctx.a;
        prop_assert_eq!(&left, &right);
        prop_assert_eq!(w_drazin(&ctx).unwrap(), left);
    }

    #[test]
    fn family_members_are_sound(seed in any::<u64>()) {
        let mut g = Generator::new(seed);
        let ctx = g.random_context::<Q>(1, 5, 3, &tol());
        let k = ctx.kappa;
        let upper = [canonical_w1231k(&ctx).unwrap(), family_member_w1231k(&ctx, &g.matrix(ctx.m(), ctx.m())).unwrap()];
        for x in &upper {
            prop_assert!(is_w1231k(&ctx, x, k).unwrap().overall);
        }
        let lower = [canonical_w124k1(&ctx).unwrap(), family_member_w124k1(&ctx, &g.matrix(ctx.n(), ctx.n())).unwrap()];
        for x in &lower {
            prop_assert!(is_w124k1(&ctx, x, k).unwrap().overall);
        }
    }

    #[test]
    fn index_mp_systems_agree(seed in any::<u64>()) {
        let mut g = Generator::new(seed);
        let ctx = g.random_context::<Q>(1, 5, 3, &tol());
        for (which, x) in [
            (IndexMpKind::KMp, w_k_mp(&ctx).unwrap()),
            (IndexMpKind::MpK, w_mp_k(&ctx).unwrap()),
            (IndexMpKind::MpKMp, w_mp_k_mp(&ctx).unwrap()),
        ] {
            let on = check_characterizations(&ctx, which, &x).unwrap();
            prop_assert!(on.definition && on.consistent(), "{}", on);
            let off = check_characterizations(&ctx, which, &g.perturb(&x, Q::one())).unwrap();
            prop_assert!(!off.definition && off.consistent(), "{}", off);
        }
    }

    #[test]
    fn bilateral_solution_and_outer_subspaces(seed in any::<u64>()) {
        let mut g = Generator::new(seed);
        let ctx = loop {
            let ctx = g.random_context::<Q>(1, 5, 3, &tol());
            let r = rank(&ctx.waw(), &tol());
            if r > 0 && r == rank(&ctx.a, &tol()) {
                break ctx;
            }
        };
        let s = g.usize_in(1, rank(&ctx.waw(), &tol()));
        let x1 = g.w_outer(&ctx, s).unwrap();
        let x2 = g.w_inner(&ctx).unwrap();
        for rel in range_null_relations(&ctx, &x1).unwrap() {
            prop_assert!(rel.holds, "{}", rel);
        }
        let spec = BilateralSpec::new(&ctx, x1, x2, vec![Label::E2W], vec![Label::E1W]).unwrap();
        prop_assert_eq!(solve_bilateral_system(&ctx, &spec).unwrap(), bilateral(&ctx, &spec));
    }

    #[test]
    fn exact_documents_round_trip(a in exact_matrix(6)) {
        let b = matrix_from_str::<Q>(&matrix_to_string(&a).unwrap()).unwrap();
        prop_assert_eq!(b, a);
    }

    #[test]
    fn float_documents_round_trip(
        dims in (1usize..5, 1usize..5),
        parts in prop::collection::vec((prop::num::f64::NORMAL | prop::num::f64::SUBNORMAL | prop::num::f64::ZERO, prop::num::f64::NORMAL), 16),
    ) {
        let (r, c) = dims;
        let data: Vec<Complex64> = parts.iter().take(r * c).map(|&(re, im)| Complex64::new(re, im)).collect();
        prop_assume!(data.len() == r * c);
        let a = Matrix::new(r, c, data).unwrap();
        let b = matrix_from_str::<Complex64>(&matrix_to_string(&a).unwrap()).unwrap();
        for (x, y) in a.data().iter().zip(b.data()) {
            prop_assert_eq!(x.re.to_bits(), y.re.to_bits());
            prop_assert_eq!(x.im.to_bits(), y.im.to_bits());
        }
    }
}

#[test]
fn make_context_rejects_zero_weight() {
    let a = Matrix::<Q>::identity(2);
    assert!(make_context(a, Matrix::zeros(2, 2), &tol()).is_err());
}
