use logsob::experiments::ExperimentOptions;
use logsob::grid::{Domain, SampledFunction};
use logsob::quadrature::{SchemeOptions, SEMINORM_RADIUS};
use logsob::seminorms::{x_seminorm, SeminormParams};
use proptest::prelude::*;

const N: usize = 64;

fn dom() -> Domain {
    Domain::new(1, 1.0, N).unwrap()
}

fn function(values: Vec<f64>) -> SampledFunction {
    SampledFunction::new(dom(), values).unwrap()
}

/// Values supported in the middle eighth of the box.
fn centered(inner: Vec<f64>) -> SampledFunction {
    let mut v = vec![0.0; N];
    let start = (N - inner.len()) / 2;
    v[start..start + inner.len()].copy_from_slice(&inner);
    function(v)
}

fn values() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-2.0..2.0f64, N)
}

fn params() -> impl Strategy<Value = SeminormParams> {
    (0.1..2.0f64, 1.0..3.0f64).prop_map(|(g, p)| SeminormParams::log(g, p))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn seminorm_satisfies_triangle_inequality(a in values(), b in values(), params in params()) {
        let scheme = SchemeOptions::default().log_scheme(&dom(), SEMINORM_RADIUS).unwrap();
        let sum: Vec<f64> = a.iter().zip(&b).map(|(x, y)| x + y).collect();
        let lhs = x_seminorm(&function(sum), &params, &scheme).unwrap();
        let rhs = x_seminorm(&function(a), &params, &scheme).unwrap()
            + x_seminorm(&function(b), &params, &scheme).unwrap();
        prop_assert!(lhs <= rhs * (1.0 + 1e-12) + 1e-300);
    }

    #[test]
    fn seminorm_is_positively_homogeneous(a in values(), c in -5.0..5.0f64, params in params()) {
        let scheme = SchemeOptions::default().log_scheme(&dom(), SEMINORM_RADIUS).unwrap();
        let scaled: Vec<f64> = a.iter().map(|x| c * x).collect();
        let lhs = x_seminorm(&function(scaled), &params, &scheme).unwrap();
        let rhs = c.abs() * x_seminorm(&function(a), &params, &scheme).unwrap();
        prop_assert!((lhs - rhs).abs() <= 1e-10 * rhs.max(1e-300));
    }

    #[test]
    fn weak_quasinorm_is_bounded_by_strong_norm(a in values(), p in 0.5..4.0f64) {
        let f = function(a);
        prop_assert!(f.weak_lp_quasinorm(p).unwrap() <= f.lp_norm(p).unwrap() * (1.0 + 1e-12));
    }

    #[test]
    fn seminorm_is_translation_invariant(
        inner in prop::collection::vec(-1.0..1.0f64, N / 8),
        shift in -4i64..=4,
        params in params(),
    ) {
        let scheme = SchemeOptions::default().log_scheme(&dom(), SEMINORM_RADIUS).unwrap();
        let f = centered(inner);
        let a = x_seminorm(&f, &params, &scheme).unwrap();
        let b = x_seminorm(&f.translated([shift, 0]), &params, &scheme).unwrap();
        prop_assert!((a - b).abs() <= 1e-9 * a.max(1e-300));
    }

    #[test]
    fn options_round_trip_through_json(
        r_min in prop::option::of(1e-8..1e-1f64),
        n_r in 1usize..4096,
        n_theta in 1usize..512,
        refine: bool,
        seed: u64,
        pair_count in 1usize..1_000_000,
    ) {
        let opts = ExperimentOptions {
            scheme: SchemeOptions { r_min, n_r, n_theta },
            refine,
            seed,
            pair_count,
        };
        let json = serde_json::to_string(&opts).unwrap();
        prop_assert_eq!(serde_json::from_str::<ExperimentOptions>(&json).unwrap(), opts);
        let params = SeminormParams::log(0.5, 2.0);
        let json = serde_json::to_string(&params).unwrap();
        prop_assert_eq!(serde_json::from_str::<SeminormParams>(&json).unwrap(), params);
    }
}
