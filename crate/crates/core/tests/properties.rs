use proptest::prelude::*;
use proptest::test_runner::Config;

use twistlab::ackermann::{alpha, g};
use twistlab::centralizer::{centralizer_defect, twisted_quasinorm, CentralizerSpec, TwistedVector};
use twistlab::harness::{render_json, run_scenario, Params};
use twistlab::estimates::{bm_distance_lp, rademacher_average, type2_ratio, type2_search, Method};
use twistlab::spaces::{
    convexify2_norm, dual_norm, enumerate_admissible, is_admissible, norm, schreier_norm, SpaceSpec, DEFAULT_TOL,
};
use twistlab::RealVector;

/// `(name, largest support evaluated)`.
const VARIANTS: [(&str, usize); 17] = [
    ("l1", 16),
    ("l2", 16),
    ("lp:3", 16),
    ("lp:1.5:16", 16),
    ("linf", 16),
    ("schreier", 16),
    ("tsirelson", 12),
    ("s2", 16),
    ("t2", 12),
    ("ts2", 5),
    ("conv2:lp:3", 16),
    ("blocks:1x3,3x4,2x5,1.5x4", 16),
    ("dual:lp:3", 16),
    ("dual:schreier", 10),
    ("dual:tsirelson", 8),
    ("dual:s2", 12),
    ("dual:t2", 8),
];

fn cases(n: u32) -> Config {
    Config { cases: n, failure_persistence: None, ..Config::default() }
}

fn space(name: &str) -> SpaceSpec {
    name.parse().expect("registered name")
}

fn vector(max_index: usize) -> impl Strategy<Value = RealVector> {
    prop::collection::btree_map(1..=max_index, -10.0f64..10.0, 0..=max_index)
        .prop_map(|m| RealVector::from_entries(m).expect("distinct indices"))
}

fn nonzero(max_index: usize) -> impl Strategy<Value = RealVector> {
    vector(max_index).prop_filter("nonzero", |v| !v.is_zero())
}

fn admissible_vector() -> impl Strategy<Value = RealVector> {
    (1usize..=24, prop::collection::vec(-5.0f64..5.0, 24)).prop_map(|(start, vals)| {
        let len = start.min(24);
        RealVector::from_entries((start..start + len).zip(vals).filter(|e| e.1 != 0.0)).expect("distinct indices")
    })
}

fn cut(x: &RealVector, cap: usize) -> RealVector {
    x.restrict(|j| j <= cap)
}

proptest! {
    #![proptest_config(cases(64))]

    #[test]
    fn homogeneity(x in vector(16), lambda in -8.0f64..8.0) {
        for (name, cap) in VARIANTS {
            let s = space(name);
            let x = cut(&x, cap);
            let lhs = norm(&s, &x.scale(lambda)).unwrap();
            let rhs = lambda.abs() * norm(&s, &x).unwrap();
            prop_assert!((lhs - rhs).abs() <= 1e-12 * rhs, "{name}: {lhs} vs {rhs}");
        }
    }

    #[test]
    fn lattice_monotonicity(y in vector(16), shrink in prop::collection::vec(0.0f64..=1.0, 16)) {
        for (name, cap) in VARIANTS {
            let s = space(name);
            let y = cut(&y, cap);
            let x = y.map_indexed(|j, v| v * shrink[j - 1]);
            let (nx, ny) = (norm(&s, &x).unwrap(), norm(&s, &y).unwrap());
            prop_assert!(nx <= ny + 1e-12, "{name}: {nx} > {ny}");
        }
    }

    #[test]
    fn sandwiches(x in vector(20)) {
        let s = schreier_norm(&x);
        prop_assert!(x.linf_norm() <= s + 1e-12 && s <= x.l1_norm() + 1e-12);
        prop_assert!(norm(&SpaceSpec::schreier2(), &x).unwrap() <= x.l2_norm() * (1.0 + 1e-12));
        let short = cut(&x, 12);
        prop_assert!(norm(&SpaceSpec::tsirelson2(), &short).unwrap() <= short.l2_norm() * (1.0 + 1e-12));
        let tiny = cut(&x, 6);
        prop_assert!(norm(&SpaceSpec::SymTsirelson2, &tiny).unwrap() <= tiny.l2_norm() * (1.0 + 1e-12));
    }

    #[test]
    fn admissible_isometry(y in admissible_vector()) {
        let l2 = y.l2_norm();
        prop_assert!((convexify2_norm(&SpaceSpec::Schreier, &y).unwrap() - l2).abs() <= 1e-12 * l2.max(1.0));
        let d = dual_norm(&SpaceSpec::schreier2(), &y, DEFAULT_TOL).unwrap();
        prop_assert!((d.value - l2).abs() <= DEFAULT_TOL * l2.max(1.0));
    }

    #[test]
    fn weak_duality(y in nonzero(10), xs in prop::collection::vec(vector(10), 1..6)) {
        for base in ["schreier", "tsirelson", "s2", "t2", "lp:3"] {
            let b = space(base);
            let d = dual_norm(&b, &y, DEFAULT_TOL).unwrap();
            prop_assert!(d.lower <= d.upper * (1.0 + 1e-12));
            for x in &xs {
                let nx = norm(&b, x).unwrap();
                if nx > 0.0 {
                    prop_assert!(x.dot(&y) / nx <= d.value * (1.0 + DEFAULT_TOL), "{base}");
                }
            }
        }
    }

    #[test]
    fn unimodular_multipliers(y in nonzero(12), signs in prop::collection::vec(any::<bool>(), 12)) {
        let a = RealVector::from_dense(&signs.iter().map(|&s| if s { 1.0 } else { -1.0 }).collect::<Vec<_>>());
        for omega in [CentralizerSpec::KaltonPeck, CentralizerSpec::scaled_n(16).unwrap()] {
            prop_assert!(centralizer_defect(&omega, &a, &y).unwrap() <= 1e-12);
        }
        let couple = CentralizerSpec::couple(SpaceSpec::lp(1.5));
        prop_assert!(centralizer_defect(&couple, &a, &y).unwrap() <= 1e-6);
    }

    #[test]
    fn fiber_isometry(x in vector(16)) {
        for omega in [CentralizerSpec::KaltonPeck, CentralizerSpec::couple(SpaceSpec::schreier2())] {
            let q = twisted_quasinorm(&omega, &TwistedVector::new(x.clone(), RealVector::zero())).unwrap();
            prop_assert_eq!(q, x.l2_norm());
        }
    }

    #[test]
    fn monte_carlo_matches_exact(family in prop::collection::vec(nonzero(8), 1..=8), seed in any::<u64>()) {
        for name in ["lp:3", "schreier", "s2"] {
            let s = space(name);
            let exact = rademacher_average(&s, &family, Method::Exact).unwrap();
            let mc = rademacher_average(&s, &family, Method::MonteCarlo { samples: 20_000, seed }).unwrap();
            prop_assert_eq!(exact.half_width, 0.0);
            prop_assert_eq!(exact.samples, 1u64 << family.len());
            prop_assert!((mc.mean - exact.mean).abs() <= 3.0 * mc.half_width + 1e-12 * exact.mean);
        }
    }

    #[test]
    fn hilbert_type_ratio(family in prop::collection::vec(nonzero(10), 1..=8)) {
        prop_assert!(type2_ratio(&SpaceSpec::Ell2, &family, Method::Exact).unwrap() <= 1.0 + 1e-12);
    }

    #[test]
    fn bm_conjugate_symmetry(p in 1.0f64..8.0, k in 1u64..100_000) {
        let q = if p == 1.0 { f64::INFINITY } else { p / (p - 1.0) };
        let lhs = bm_distance_lp(p, k) * bm_distance_lp(q, k);
        let rhs = (k as f64).powf(2.0 * (1.0 / p - 0.5).abs());
        prop_assert!((lhs - rhs).abs() <= 1e-10 * rhs);
    }

    #[test]
    fn alpha_nondecreasing(n in 1u64..u64::MAX - 1) {
        prop_assert!(alpha(n) <= alpha(n + 1));
        prop_assert!(alpha(n) <= 3);
    }
}

proptest! {
    #![proptest_config(cases(1000))]

    #[test]
    fn centralizer_homogeneity(y in vector(16), lambda in -8.0f64..8.0) {
        let specs = [
            CentralizerSpec::KaltonPeck,
            CentralizerSpec::scaled_n(9).unwrap(),
            CentralizerSpec::couple(SpaceSpec::lp(1.5)),
            CentralizerSpec::couple(SpaceSpec::schreier2()),
            CentralizerSpec::couple(SpaceSpec::tsirelson2()),
        ];
        for omega in specs {
            let lhs = omega.apply(&y.scale(lambda)).unwrap();
            let rhs = omega.apply(&y).unwrap().scale(lambda);
            let scale = rhs.l2_norm().max(lambda.abs() * y.l2_norm()).max(1e-300);
            prop_assert!(lhs.sub(&rhs).l2_norm() <= 1e-12 * scale, "{omega}");
        }
    }

    #[test]
    fn triangle_inequality(x in vector(16), y in vector(16)) {
        for (name, cap) in VARIANTS {
            let s = space(name);
            let (x, y) = (cut(&x, cap), cut(&y, cap));
            let lhs = norm(&s, &x.add(&y)).unwrap();
            let rhs = norm(&s, &x).unwrap() + norm(&s, &y).unwrap();
            prop_assert!(lhs <= rhs + 1e-10, "{name}: {lhs} > {rhs}");
        }
    }
}

proptest! {
    #![proptest_config(cases(10_000))]

    #[test]
    fn kalton_peck_quasi_triangle(
        v in (vector(12), vector(12)),
        w in (vector(12), vector(12)),
    ) {
        let kp = CentralizerSpec::KaltonPeck;
        let v = TwistedVector::new(v.0, v.1);
        let w = TwistedVector::new(w.0, w.1);
        let sum = twisted_quasinorm(&kp, &v).unwrap() + twisted_quasinorm(&kp, &w).unwrap();
        prop_assert!(twisted_quasinorm(&kp, &v.add(&w)).unwrap() <= 4.0 * sum + 1e-12);
    }
}

#[test]
fn enumeration_matches_subset_scan() {
    for n in 0..=12usize {
        let listed = enumerate_admissible(n).unwrap();
        assert!(listed.iter().all(|a| is_admissible(a.indices())));
        let scanned = (1u32..1 << n)
            .filter(|mask| is_admissible(&(0..n).filter(|b| mask >> b & 1 == 1).map(|b| b + 1).collect::<Vec<_>>()))
            .count();
        assert_eq!(listed.len(), scanned, "n = {n}");
    }
}

#[test]
fn type2_search_grows_with_budget() {
    for name in ["lp:1.5:12", "schreier", "blocks:1x4,3x4"] {
        let s = space(name);
        let mut last = 0.0;
        for budget in [1, 2, 4, 8, 16] {
            let found = type2_search(&s, 6, budget, 11).unwrap();
            assert!(found >= last, "{name}: {found} < {last}");
            last = found;
        }
    }
}

#[test]
fn g_increasing_and_closed_forms() {
    for n in 0..=3u32 {
        let mut prev = g(n, 1);
        for k in 2..=20 {
            let cur = g(n, k);
            if cur.is_huge() {
                break;
            }
            assert!(cur > prev);
            prev = cur;
        }
    }
    assert_eq!(alpha(g(4, 1).finite().unwrap()), 0);
}

proptest! {
    #![proptest_config(cases(4))]

    #[test]
    fn scenario_reports_depend_only_on_seed(seed in any::<u64>()) {
        let params = Params { seed, ..Params::default() };
        for name in ["claimC", "kp_spread", "centralizer_axioms"] {
            let a = render_json(&run_scenario(name, &params).unwrap());
            let b = render_json(&run_scenario(name, &params).unwrap());
            prop_assert_eq!(a, b);
        }
    }
}
