//! Reference computations that share no code with the library: closed
//! forms and dense composite Simpson rules.
#![allow(dead_code)]

use statrs::function::gamma::gamma;

pub mod profiles;

/// Composite Simpson on `[a, b]` with `2m` panels.
pub fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, m: usize) -> f64 {
    let n = 2 * m;
    let h = (b - a) / n as f64;
    let mut s = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        s += w * f(a + h * i as f64);
    }
    s * h / 3.0
}

pub fn sphere(n: usize) -> f64 {
    let h = n as f64 / 2.0;
    2.0 * std::f64::consts::PI.powf(h) / gamma(h)
}

pub fn pstar(n: usize, p: f64) -> f64 {
    p * n as f64 / (n as f64 - p)
}

/// Amplitude making `γ(1 + r^{p/(p-1)})^{-(N-p)/p}` solve `-Δ_p U = U^{p*-1}`.
pub fn bubble_gamma(n: usize, p: f64) -> f64 {
    let nf = n as f64;
    (nf * ((nf - p) / (p - 1.0)).powf(p - 1.0)).powf((nf - p) / (p * p))
}

pub fn bubble(n: usize, p: f64, lambda: f64, r: f64) -> f64 {
    let q = p / (p - 1.0);
    let a = (n as f64 - p) / p;
    bubble_gamma(n, p) * lambda.powf(a) * (1.0 + (lambda * r).powf(q)).powf(-a)
}

pub fn bubble_slope(n: usize, p: f64, lambda: f64, r: f64) -> f64 {
    let q = p / (p - 1.0);
    let a = (n as f64 - p) / p;
    let s = lambda * r;
    -bubble_gamma(n, p) * lambda.powf(a + 1.0) * a * q * s.powf(q - 1.0) * (1.0 + s.powf(q)).powf(-a - 1.0)
}

/// Sharp Sobolev constant in closed form.
pub fn talenti_s(n: usize, p: f64) -> f64 {
    let nf = n as f64;
    let ratio = gamma(nf / p) * gamma(1.0 + nf - nf / p) / (gamma(1.0 + nf / 2.0) * gamma(nf));
    std::f64::consts::PI.sqrt() * nf.powf(1.0 / p) * ((nf - p) / (p - 1.0)).powf((p - 1.0) / p) * ratio.powf(1.0 / nf)
}

/// `∫_0^∞ f(r) r^{N-1} dr` through `r = e^x` on `[-40, 160]`. Gradient
/// tails can decay as slowly as `e^{-x/2}` in this variable.
pub fn radial_integral_whole<F: Fn(f64) -> f64>(n: usize, f: F) -> f64 {
    let nf = n as f64;
    // log form: r^N alone overflows for large N
    let g = |x: f64| {
        let v = f(x.exp());
        if v > 0.0 {
            (v.ln() + nf * x).exp()
        } else {
            0.0
        }
    };
    simpson(g, -40.0, 160.0, 500_000)
}

/// `∫_a^b f(r) r^{N-1} dr`.
pub fn radial_integral<F: Fn(f64) -> f64>(n: usize, f: F, a: f64, b: f64, m: usize) -> f64 {
    let n1 = n as f64 - 1.0;
    simpson(|r| f(r) * r.powf(n1), a, b, m)
}

/// `(‖∇U‖_p, ‖U‖_{p*}, S)` of the unit bubble by log-variable Simpson.
pub fn bubble_norms(n: usize, p: f64) -> (f64, f64, f64) {
    let om = sphere(n);
    let ps = pstar(n, p);
    let g = (om * radial_integral_whole(n, |r| bubble_slope(n, p, 1.0, r).abs().powf(p))).powf(1.0 / p);
    let c = (om * radial_integral_whole(n, |r| bubble(n, p, 1.0, r).powf(ps))).powf(1.0 / ps);
    (g, c, g / c)
}

/// Weak `L^s` norm of a nonnegative radially decreasing profile on `B_R`:
/// the largest `M(ρ) |B_ρ|^{-(s-1)/s}` over `points` log-spaced ball radii
/// in `[R·1e-4, R]`, with `M` accumulated cell by cell.
pub fn weak_norm_grid<F: Fn(f64) -> f64>(n: usize, u: F, s: f64, radius: f64, points: usize) -> f64 {
    let om = sphere(n);
    let nf = n as f64;
    let lo = (radius * 1e-4).ln();
    let hi = radius.ln();
    let rho = |k: usize| {
        if k + 1 == points {
            radius
        } else {
            (lo + (hi - lo) * k as f64 / (points - 1) as f64).exp()
        }
    };
    let mut prev = rho(0);
    let mut mass = om * radial_integral(n, &u, 0.0, prev, 64);
    let objective = |m: f64, r: f64| m * (om / nf * r.powf(nf)).powf(-(s - 1.0) / s);
    let mut best = objective(mass, prev);
    for k in 1..points {
        let r = rho(k);
        mass += om * radial_integral(n, &u, prev, r, 8);
        best = best.max(objective(mass, r));
        prev = r;
    }
    best
}
