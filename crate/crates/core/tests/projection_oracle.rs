use sobolev_core::bubble::{Bubble, BubbleSpec};
use sobolev_core::experiments::{bump_profile, generate_family, FamilySpec};
use sobolev_core::params::derive_params;
use sobolev_core::profile::{ProfileKind, RadialProfile};
use sobolev_core::projection::{
    gradient_distance, make_orthogonal_perturbation_with, project, OrthogonalityPairing,
};
use sobolev_core::quadrature::QuadConfig;
use sobolev_core::Lab64;

/// `min_c E(c, λ)` over a log grid of `λ`; `E` is convex in `c`, so a
/// golden-section search per node is exact up to its bracket.
fn grid_minimum(b: &Bubble<f64>, u: &RadialProfile<f64>, lo: f64, hi: f64, nodes: usize) -> f64 {
    let cfg = QuadConfig::default();
    let mut best = f64::INFINITY;
    for k in 0..nodes {
        let lambda = (lo.ln() + (hi.ln() - lo.ln()) * k as f64 / (nodes - 1) as f64).exp();
        let e = |c: f64| gradient_distance(b, u, c, lambda, &cfg).unwrap();
        let (mut a, mut z) = (-3.0f64, 3.0f64);
        let g = (5f64.sqrt() - 1.0) / 2.0;
        let (mut x1, mut x2) = (z - g * (z - a), a + g * (z - a));
        let (mut f1, mut f2) = (e(x1), e(x2));
        while z - a > 1e-7 {
            if f1 < f2 {
                z = x2;
                x2 = x1;
                f2 = f1;
                x1 = z - g * (z - a);
                f1 = e(x1);
            } else {
                a = x1;
                x1 = x2;
                f1 = f2;
                x2 = a + g * (z - a);
                f2 = e(x2);
            }
        }
        best = best.min(f1.min(f2));
    }
    best
}

#[test]
fn manifold_points_have_zero_distance() {
    for (n, p) in [(3usize, 2.0f64), (4, 3.0), (3, 1.5)] {
        let b = Bubble::new(derive_params(n, p).unwrap());
        for c in [0.5, 1.0, 2.0] {
            for lambda in [0.3, 1.0, 4.0] {
                let u = b.profile(BubbleSpec::new(c, lambda).unwrap());
                let r = project(&b, &u, &QuadConfig::default()).unwrap();
                assert!(r.distance < 1e-6, "N={n} p={p} c={c} λ={lambda}: {r:?}");
                assert!((r.c_opt / c - 1.0).abs() < 1e-6 && (r.lambda_opt / lambda - 1.0).abs() < 1e-6);
            }
        }
    }
}

#[test]
fn small_stationary_perturbations_keep_the_parameters() {
    let cfg = QuadConfig::default();
    for (n, p) in [(3usize, 2.0f64), (4, 3.0), (3, 1.5)] {
        let b = Bubble::new(derive_params(n, p).unwrap());
        for (c, lambda) in [(1.0, 1.0), (2.0, 0.5)] {
            let spec = BubbleSpec::new(c, lambda).unwrap();
            let seed = bump_profile(0.5, 2.0).dilated(b.params(), 1.0 / lambda);
            let w = make_orthogonal_perturbation_with(&b, &seed, &spec, OrthogonalityPairing::Dual, &cfg).unwrap();
            let u = RadialProfile::combine(1.0, &b.profile(spec), 1e-3, &w, ProfileKind::BubblePlusPerturbation);
            let r = project(&b, &u, &cfg).unwrap();
            assert!((r.c_opt / c - 1.0).abs() < 1e-4, "N={n} p={p}: {r:?}");
            assert!((r.lambda_opt / lambda - 1.0).abs() < 1e-4, "N={n} p={p}: {r:?}");
            assert!(r.distance > 0.0 && r.distance <= 1e-3 * (1.0 + 1e-6));
        }
    }
}

#[test]
fn optimizer_is_not_beaten_by_a_parameter_grid() {
    let lab = Lab64::new(derive_params(3, 2.0).unwrap(), QuadConfig::default()).unwrap();
    let spec = FamilySpec::truncated(lab.params, &[2.0, 50.0], &[0.5, 4.0]);
    let fam = generate_family(&lab, &spec).unwrap();
    for m in &fam.members {
        let r = project(&lab.bubble, &m.profile, &lab.cfg).unwrap();
        let grid = grid_minimum(&lab.bubble, &m.profile, 1e-2, 1e4, 61);
        assert!(r.distance <= grid + 1e-4, "member {}: {} > grid {grid}", m.index, r.distance);
    }
}
