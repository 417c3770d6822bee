mod common;

use common::profiles::decreasing_profiles;
use sobolev_core::params::derive_params;
use sobolev_core::profile::{DomainBall, RadialProfile};
use sobolev_core::quadrature::QuadConfig;
use sobolev_core::weak::{weak_norm, weak_norm_holder_bound};

#[test]
fn optimizer_matches_brute_force_grid() {
    let cfg = QuadConfig::default();
    for (i, (pr, u, radius)) in decreasing_profiles().into_iter().enumerate() {
        let dom = DomainBall::new(pr.n, radius).unwrap();
        let got = weak_norm(&pr, &u, pr.pbar, &dom, &cfg).unwrap().value();
        // profiles vanish at r >= support; the grid samples the closed ball
        let inner = radius * (1.0 - 1e-14);
        let grid = common::weak_norm_grid(pr.n, |r| u.value(r.min(inner)), pr.pbar, radius, 10_000);
        // the grid maximum can only undershoot
        assert!(got >= grid * (1.0 - 1e-9), "profile {i}: {got} < grid {grid}");
        assert!((got / grid - 1.0).abs() < 1e-6, "profile {i}: {got} vs grid {grid}");
    }
}

#[test]
fn holder_bound_is_attained_by_constants() {
    let cfg = QuadConfig::default();
    for (n, p, c, radius) in [(3usize, 2.0f64, 1.0f64, 1.0f64), (4, 3.0, 0.3, 2.0), (5, 2.5, 5.0, 0.7)] {
        let pr = derive_params(n, p).unwrap();
        let dom = DomainBall::new(n, radius).unwrap();
        let (lhs, rhs) = weak_norm_holder_bound(&pr, &RadialProfile::constant(c, radius), &dom, &cfg).unwrap();
        assert!((lhs / rhs - 1.0).abs() < 1e-8, "{lhs} vs {rhs}");
    }
}
