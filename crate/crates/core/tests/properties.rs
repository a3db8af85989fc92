use proptest::prelude::*;

use seqshare::analytic::{self, ChainParams};
use seqshare::mub::{self, BasisLabel};
use seqshare::oracle;
use seqshare::pointer::TRADE_OFF_TOL;
use seqshare::solver::{self, ScenarioConfig, SolverOptions, CERTIFICATE_TOL};
use seqshare::{PointerKind, PointerModel, Scenario};

fn opts() -> SolverOptions {
    SolverOptions::default()
}

fn scenario() -> impl Strategy<Value = Scenario> {
    prop::sample::select(Scenario::ALL.to_vec())
}

fn builtin() -> impl Strategy<Value = PointerModel> {
    prop::sample::select(vec![PointerKind::Unsharp, PointerKind::Optimal, PointerKind::Square])
        .prop_map(|k| PointerModel::from_kind(k, None).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn uncertainty_decreases_with_correlation(d in 2u64..10_000, a in 0.0..1.0f64, b in 0.0..1.0f64) {
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        let u_lo = analytic::uncertainty_os1(d, lo).unwrap();
        let u_hi = analytic::uncertainty_os1(d, hi).unwrap();
        let cap = 2.0 * (d as f64).log2();
        prop_assert!(u_hi <= u_lo + 1e-12);
        prop_assert!(u_hi >= -1e-12 && u_lo <= cap + 1e-9);
    }

    #[test]
    fn two_sided_root_identity(d in 2u64..1_000_000) {
        let os = solver::critical_g1(&ScenarioConfig::new(Scenario::Os1, d, PointerModel::optimal()), &opts()).unwrap();
        let ts = solver::critical_g1(&ScenarioConfig::new(Scenario::Ts1, d, PointerModel::optimal()), &opts()).unwrap();
        prop_assert!((ts.g_crit.unwrap().powi(2) - os.g_crit.unwrap()).abs() <= 1e-8);
    }

    #[test]
    fn pointer_trade_off_and_monotonicity(pointer in builtin(), d in 2u64..500, a in 0.0..=1.0f64, b in 0.0..=1.0f64) {
        let (lo, hi) = if a < b { (a, b) } else { (b, a) };
        let f_lo = pointer.quality(d, lo).unwrap();
        let f_hi = pointer.quality(d, hi).unwrap();
        prop_assert!(f_hi <= f_lo + 1e-12);
        for (g, f) in [(lo, f_lo), (hi, f_hi)] {
            prop_assert!((0.0..=1.0).contains(&f));
            prop_assert!(f * f + g * g <= 1.0 + TRADE_OFF_TOL);
        }
    }

    #[test]
    fn critical_roots_are_certified(s in scenario(), pointer in builtin(), d in 2u64..100_000, p in 0.3..=1.0f64) {
        let config = ScenarioConfig::new(s, d, pointer).with_weight(p);
        for level in solver::observer_chain(&config, 3, &opts()).unwrap() {
            if let Some(g) = level.g_crit {
                prop_assert!((0.0..=1.0).contains(&g));
                prop_assert!(level.certificate.unwrap().abs() <= CERTIFICATE_TOL);
            }
        }
    }

    #[test]
    fn greedy_first_observer_is_optimal(pointer in builtin(), d in 34u64..5000, t in 0.0..=1.0f64) {
        let config = ScenarioConfig::new(Scenario::Os1, d, pointer);
        let g1c = solver::critical_g1(&config, &opts()).unwrap().g_crit.unwrap();
        let greedy = solver::critical_gn(&config, 2, &opts()).unwrap().g_crit;
        let g1 = g1c + t * (1.0 - g1c);
        let raised = solver::chained_critical(&config, 2, &[g1], &opts()).unwrap().g_crit;
        match (greedy, raised) {
            (Some(a), Some(b)) => prop_assert!(b >= a - 1e-9),
            (None, Some(_)) => prop_assert!(false, "raising G1 made observer 2 feasible"),
            _ => {}
        }
    }

    #[test]
    fn first_critical_decreases_with_dimension(d in 2u64..1000) {
        let a = solver::critical_mu(d, &opts()).unwrap().0;
        let b = solver::critical_mu(d + 1, &opts()).unwrap().0;
        prop_assert!(b < a);
    }

    #[test]
    fn solves_are_deterministic(s in scenario(), pointer in builtin(), d in 2u64..10_000) {
        let config = ScenarioConfig::new(s, d, pointer);
        let a = solver::observer_chain(&config, 3, &opts()).unwrap();
        let b = solver::observer_chain(&config, 3, &opts()).unwrap();
        prop_assert_eq!(a, b);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn oracle_matches_closed_forms(
        s in scenario(),
        pointer in builtin(),
        d in 2usize..=4,
        p in 0.0..=1.0f64,
        g in 0.0..=1.0f64,
        g_prev in prop::collection::vec(0.0..=1.0f64, 0..=2),
    ) {
        let f_prev: Vec<f64> = g_prev.iter().map(|&x| pointer.quality(d as u64, x).unwrap()).collect();
        let params = ChainParams::new(d as u64, g, f_prev.clone()).with_weight(p);
        let closed = analytic::scenario_uncertainty(s, &params).unwrap();
        let pairs: Vec<_> = g_prev.into_iter().zip(f_prev).collect();
        let brute = oracle::canonical_uncertainty(s, d, p, g, &pairs).unwrap();
        prop_assert!((closed - brute).abs() <= 1e-9, "closed {} oracle {}", closed, brute);
    }

    #[test]
    fn bases_are_mutually_unbiased(d in prop::sample::select(vec![3usize, 5, 7, 11])) {
        let labels = [
            BasisLabel::Computational,
            BasisLabel::Fourier,
            BasisLabel::Quadratic(1),
            BasisLabel::Quadratic(2),
        ];
        let bases: Vec<_> = labels.iter().map(|&l| mub::basis(d, l).unwrap()).collect();
        for (i, a) in bases.iter().enumerate() {
            prop_assert!(a.orthonormality_defect() < 1e-12);
            for b in &bases[i + 1..] {
                for row in a.overlaps(b) {
                    for x in row {
                        prop_assert!((x - 1.0 / d as f64).abs() < 1e-12);
                    }
                }
            }
        }
    }
}
