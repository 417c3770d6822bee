//! Profile collections shared by the oracle tests.

use sobolev_core::bubble::{Bubble, BubbleSpec};
use sobolev_core::experiments::{bump_profile, plateau_profile};
use sobolev_core::params::derive_params;
use sobolev_core::profile::{ProfileKind, RadialProfile};
use sobolev_core::Params64;

/// Twenty nonnegative radially decreasing profiles on balls.
pub fn decreasing_profiles() -> Vec<(Params64, RadialProfile<f64>, f64)> {
    let mut out = Vec::new();
    for (n, p) in [(3usize, 2.0f64), (4, 3.0)] {
        let pr = derive_params(n, p).unwrap();
        let b = Bubble::new(pr);
        for (lambda, radius) in [(1.0, 1.0), (5.0, 0.5), (10.0, 1.0), (20.0, 2.0), (2.0, 4.0)] {
            let u = b.truncated(BubbleSpec::new(1.0, lambda).unwrap(), radius).unwrap();
            out.push((pr, u, radius));
        }
    }
    let pr = derive_params(3, 2.0).unwrap();
    for (radius, width) in [(1.0, 0.3), (2.0, 1.0), (0.5, 0.5)] {
        out.push((pr, plateau_profile(radius, radius * width), radius));
    }
    let pr5 = derive_params(5, 2.5).unwrap();
    for k in [1.0, 2.0, 3.5] {
        let u = RadialProfile::from_fns(
            move |r: f64| if r < 1.0 { (1.0 - r * r).powf(k) } else { 0.0 },
            move |r: f64| if r < 1.0 { -2.0 * k * r * (1.0 - r * r).powf(k - 1.0) } else { 0.0 },
            1.0,
            ProfileKind::Smooth,
        );
        out.push((pr5, u, 1.0));
    }
    let pr16 = derive_params(3, 1.6).unwrap();
    for a in [3.0, 30.0] {
        let u = RadialProfile::from_fns(
            move |r: f64| if r < 1.0 { (-a * r * r).exp() - (-a).exp() } else { 0.0 },
            move |r: f64| if r < 1.0 { -2.0 * a * r * (-a * r * r).exp() } else { 0.0 },
            1.0,
            ProfileKind::Smooth,
        );
        out.push((pr16, u, 1.0));
    }
    out.push((pr, RadialProfile::constant(0.7, 1.5), 1.5));
    out.push((pr, RadialProfile::constant(2.0, 0.25), 0.25));
    assert_eq!(out.len(), 20);
    out
}

/// Twenty smooth nonnegative profiles supported in `B_2`, most of them
/// not radially decreasing.
pub fn smooth_profiles() -> Vec<RadialProfile<f64>> {
    let mut out = Vec::new();
    for (a, b) in [(0.0, 1.0), (0.2, 1.2), (0.5, 2.0), (1.0, 1.8), (0.1, 0.4), (1.5, 2.0)] {
        out.push(bump_profile(a, b));
    }
    for (a, b, c, d, w) in [
        (0.0, 0.6, 1.0, 1.9, 0.5),
        (0.3, 0.9, 1.1, 1.6, 2.0),
        (0.0, 1.5, 0.5, 2.0, 1.0),
        (0.2, 0.5, 0.6, 0.9, 3.0),
    ] {
        out.push(RadialProfile::combine(1.0, &bump_profile(a, b), w, &bump_profile(c, d), ProfileKind::Smooth));
    }
    for (radius, width) in [(1.0, 0.5), (2.0, 0.4), (1.5, 1.0)] {
        out.push(plateau_profile(radius, width));
    }
    for k in [2.0f64, 5.0, 9.0] {
        out.push(RadialProfile::from_fns(
            move |r: f64| if r < 2.0 { (1.0 + 0.5 * (k * r).sin()) * (1.0 - r * r / 4.0).powi(3) } else { 0.0 },
            move |r: f64| {
                if r < 2.0 {
                    let g = (1.0 - r * r / 4.0).powi(3);
                    let dg = -1.5 * r * (1.0 - r * r / 4.0).powi(2);
                    0.5 * k * (k * r).cos() * g + (1.0 + 0.5 * (k * r).sin()) * dg
                } else {
                    0.0
                }
            },
            2.0,
            ProfileKind::Smooth,
        ));
    }
    for c in [0.3f64, 1.0, 1.7, 0.8] {
        out.push(RadialProfile::from_fns(
            move |r: f64| if r < 2.0 { (-(r - c).powi(2) * 8.0).exp() * (1.0 - r / 2.0).powi(3) } else { 0.0 },
            move |r: f64| {
                if r < 2.0 {
                    let e = (-(r - c).powi(2) * 8.0).exp();
                    let g = (1.0 - r / 2.0).powi(3);
                    -16.0 * (r - c) * e * g - 1.5 * e * (1.0 - r / 2.0).powi(2)
                } else {
                    0.0
                }
            },
            2.0,
            ProfileKind::Smooth,
        ));
    }
    assert_eq!(out.len(), 20);
    out
}
