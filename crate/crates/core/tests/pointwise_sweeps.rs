use sobolev_core::pointwise::{estimate_c1_with, estimate_gamma_p_with, sweep, Inequality};

const SAMPLES: usize = 100_000;

#[test]
fn quadratic_limits_of_the_constants() {
    let g = estimate_gamma_p_with(1.999f64, SAMPLES, 3).unwrap();
    assert!((g.value - 1.0).abs() < 0.01, "{}", g.value);
    for kappa in [0.1f64, 0.5, 0.9] {
        let c = estimate_c1_with(2.0, kappa, SAMPLES, 3).unwrap();
        assert!((c.value / kappa - 1.0).abs() < 0.01, "κ={kappa}: {}", c.value);
    }
}

#[test]
fn sweeps_find_no_violations() {
    for p in [2.0f64, 2.5, 4.0] {
        assert_eq!(sweep(Inequality::Upper311 { p }, 3, SAMPLES, 11).unwrap().violations, 0);
    }
    for r in [1.3f64, 2.0, 3.0] {
        assert_eq!(sweep(Inequality::Scalar33 { r }, 1, SAMPLES, 11).unwrap().violations, 0);
    }
    let g = estimate_gamma_p_with(1.5f64, SAMPLES, 5).unwrap();
    let rep = sweep(Inequality::Upper312 { p: 1.5, gamma: g.value }, 3, SAMPLES, 12).unwrap();
    assert_eq!(rep.violations, 0);
    for (r, kappa) in [(3.0f64, 0.5f64), (1.5, 0.1), (1.5, 0.9)] {
        let c1 = estimate_c1_with(r, kappa, SAMPLES, 5).unwrap().value;
        let rep = sweep(Inequality::Lower { r, kappa, c1 }, 3, SAMPLES, 13).unwrap();
        assert_eq!(rep.violations, 0, "r={r} κ={kappa}: {rep:?}");
    }
}
