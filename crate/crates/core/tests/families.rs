use sobolev_core::bubble::BubbleSpec;
use sobolev_core::experiments::{
    constant_scan, generate_family, log_grid, sharpness_experiment, FamilySpec, ScanTheorem,
};
use sobolev_core::norms::lq_norm;
use sobolev_core::params::derive_params;
use sobolev_core::projection::project;
use sobolev_core::quadrature::QuadConfig;
use sobolev_core::Lab64;

fn lab(n: usize, p: f64) -> Lab64 {
    Lab64::new(derive_params(n, p).unwrap(), QuadConfig::default()).unwrap()
}

#[test]
fn truncated_member_is_normalized_in_its_ball() {
    let l = lab(3, 2.0);
    let fam = generate_family(&l, &FamilySpec::truncated(l.params, &[10.0], &[1.0])).unwrap();
    let m = &fam.members[0];
    assert!(m.profile.support_radius() <= 1.0);
    let k = lq_norm(&l.params, &m.profile, l.params.pstar, &m.domain, &l.cfg).unwrap();
    assert!((k - 1.0).abs() < 1e-8);
}

#[test]
fn perturbed_members() {
    let l = lab(3, 2.0);
    let fam = generate_family(&l, &FamilySpec::perturbed(l.params, &[0.0, 1e-2], 0)).unwrap();
    let u = l.bubble.profile(BubbleSpec::unit());
    for k in 0..40 {
        let r = 10f64.powf(-2.0 + 4.0 * k as f64 / 39.0);
        assert_eq!(fam.members[0].profile.value(r), u.value(r));
    }
    let d = project(&l.bubble, &fam.members[1].profile, &l.cfg).unwrap().distance;
    assert!(d > 0.0 && d <= 2e-2, "{d}");
}

#[test]
fn weak_remainder_scan_is_positive() {
    let l = lab(3, 2.0);
    let spec = FamilySpec::truncated(l.params, &[2.0, 5.0, 10.0, 50.0], &[0.5, 1.0, 2.0, 4.0]);
    let fam = generate_family(&l, &spec).unwrap();
    let out = constant_scan(&l, ScanTheorem::Thm11, &fam).unwrap();
    assert_eq!(out.summary.admissible, 16);
    assert_eq!(out.summary.violations, 0);
    assert!(out.rows.iter().all(|r| r.ratio > 0.0));
    assert!(out.summary.extremum.unwrap() > 0.0);
    assert_eq!(out.summary.by_radius.len(), 4);
    assert!(out.summary.radius_spread.unwrap().is_finite());
}

#[test]
fn upper_constant_is_stable_under_tolerance_halving() {
    let l = lab(3, 2.0);
    let mut finer = l.cfg;
    finer.rel_tol *= 0.5;
    let l2 = l.with_cfg(finer).unwrap();
    let eps = log_grid(1e-3, 1e-1, 5).unwrap();
    let spec = FamilySpec::perturbed(l.params, &eps, 0);
    let a = constant_scan(&l, ScanTheorem::Thm13, &generate_family(&l, &spec).unwrap()).unwrap();
    let b = constant_scan(&l2, ScanTheorem::Thm13, &generate_family(&l2, &spec).unwrap()).unwrap();
    let (x, y) = (a.summary.extremum.unwrap(), b.summary.extremum.unwrap());
    assert!(x.is_finite() && x > 0.0);
    assert!((x / y - 1.0).abs() < 0.05, "{x} vs {y}");
}

#[test]
fn sharpness_slopes() {
    let eps = log_grid(1e-3, 1e-1, 9).unwrap();
    for (n, p, lo, hi) in [(3usize, 2.0f64, 1.95, 2.05), (4, 3.0, 1.9, 3.1), (3, 1.5, 1.4, 2.1)] {
        let fit = sharpness_experiment(&lab(n, p), &eps, 0).unwrap();
        assert!(fit.points.len() >= 5);
        assert!(fit.slope > lo && fit.slope < hi, "N={n} p={p}: slope {}", fit.slope);
    }
}
