//! Lebesgue and gradient norms of radial profiles by adaptive quadrature.

use crate::error::{LabError, Result};
use crate::params::Params;
use crate::profile::{DomainBall, RadialProfile};
use crate::quadrature::{Integral, QuadConfig};
use crate::scalar::Real;

/// Breakpoints for `∫_0^top`: the origin, interior breaks, and `top` (possibly `∞`).
pub(crate) fn radial_points<T: Real>(top: T, breaks: &[T]) -> Vec<T> {
    let mut pts = Vec::with_capacity(breaks.len() + 2);
    pts.push(T::zero());
    let mut inner: Vec<T> = breaks
        .iter()
        .copied()
        .filter(|b| b.is_finite() && *b > T::zero() && *b < top)
        .collect();
    inner.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    inner.dedup();
    pts.extend(inner);
    pts.push(top);
    pts
}

/// `∫_0^top f(r) r^{N-1} dr` (no sphere factor), split at `breaks`.
pub fn radial_integral<T, F>(params: &Params<T>, f: F, top: T, breaks: &[T], cfg: &QuadConfig<T>) -> Result<Integral<T>>
where
    T: Real,
    F: Fn(T) -> T,
{
    let n1 = params.dim() - T::one();
    let pts = radial_points(top, breaks);
    cfg.integrate_pieces(
        |r| {
            let v = f(r);
            if v == T::zero() {
                T::zero()
            } else {
                v * r.powf(n1)
            }
        },
        &pts,
    )
}

/// Upper integration radius for `u` on `dom`.
pub(crate) fn top_radius<T: Real>(u: &RadialProfile<T>, dom: &DomainBall<T>) -> T {
    dom.radius.min(u.support_radius())
}

/// `|𝕊^{N-1}| ∫_0^R |u|^q r^{N-1} dr` for any `q > 0`.
pub fn power_integral<T: Real>(
    params: &Params<T>,
    u: &RadialProfile<T>,
    q: T,
    dom: &DomainBall<T>,
    cfg: &QuadConfig<T>,
) -> Result<T> {
    if !(q > T::zero()) {
        return Err(LabError::domain(format!("integrability exponent must be positive (got {q})")));
    }
    let top = top_radius(u, dom);
    let i = radial_integral(params, |r| u.value(r).abs().powf(q), top, u.breakpoints(), cfg)?;
    Ok(params.sphere() * i.value)
}

/// `‖u‖_{L^q(B_R)}` for `q >= 1`.
pub fn lq_norm<T: Real>(
    params: &Params<T>,
    u: &RadialProfile<T>,
    q: T,
    dom: &DomainBall<T>,
    cfg: &QuadConfig<T>,
) -> Result<T> {
    if !(q >= T::one()) {
        return Err(LabError::domain(format!("L^q norm needs q >= 1 (got {q})")));
    }
    Ok(power_integral(params, u, q, dom, cfg)?.powf(q.recip()))
}

/// `(∫|u|^t)^{1/t}` for any `t > 0`; a quasi-norm when `t < 1`.
pub fn lt_quasi_norm<T: Real>(
    params: &Params<T>,
    u: &RadialProfile<T>,
    t: T,
    dom: &DomainBall<T>,
    cfg: &QuadConfig<T>,
) -> Result<T> {
    Ok(power_integral(params, u, t, dom, cfg)?.powf(t.recip()))
}

/// `|𝕊^{N-1}| ∫_0^R |u'|^e r^{N-1} dr`.
pub fn grad_power_integral<T: Real>(
    params: &Params<T>,
    u: &RadialProfile<T>,
    e: T,
    dom: &DomainBall<T>,
    cfg: &QuadConfig<T>,
) -> Result<T> {
    let top = top_radius(u, dom);
    let i = radial_integral(params, |r| u.derivative(r).abs().powf(e), top, u.breakpoints(), cfg)?;
    Ok(params.sphere() * i.value)
}

/// `‖∇u‖_{L^p(B_R)}`.
pub fn grad_lp_norm<T: Real>(
    params: &Params<T>,
    u: &RadialProfile<T>,
    dom: &DomainBall<T>,
    cfg: &QuadConfig<T>,
) -> Result<T> {
    Ok(grad_power_integral(params, u, params.p, dom, cfg)?.powf(params.p.recip()))
}

/// `|𝕊^{N-1}| ∫_0^R u r^{N-1} dr` (signed).
pub fn mass<T: Real>(params: &Params<T>, u: &RadialProfile<T>, radius: T, cfg: &QuadConfig<T>) -> Result<T> {
    let top = radius.min(u.support_radius());
    let i = radial_integral(params, |r| u.value(r), top, u.breakpoints(), cfg)?;
    Ok(params.sphere() * i.value)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bubble::{Bubble, BubbleSpec};
    use crate::params::derive_params;
    use approx::assert_relative_eq;

    /// Composite Simpson on a uniform grid of `[0, R]`, independent of the
    /// adaptive integrator.
    pub(crate) fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, m: usize) -> f64 {
        let m = if m % 2 == 1 { m + 1 } else { m };
        let h = (b - a) / m as f64;
        let mut s = f(a) + f(b);
        for i in 1..m {
            s += if i % 2 == 1 { 4.0 } else { 2.0 } * f(a + i as f64 * h);
        }
        s * h / 3.0
    }

    #[test]
    fn constant_on_ball() {
        let pr = derive_params(3, 2.0f64).unwrap();
        let dom = DomainBall::new(3, 1.5).unwrap();
        let u = RadialProfile::constant(1.0, 1.5);
        let cfg = QuadConfig::default();
        assert_relative_eq!(lq_norm(&pr, &u, 2.0, &dom, &cfg).unwrap(), dom.measure.sqrt(), max_relative = 1e-12);
        assert_eq!(grad_lp_norm(&pr, &u, &dom, &cfg).unwrap(), 0.0);
        assert!(lq_norm(&pr, &u, 0.5, &dom, &cfg).is_err());
    }

    #[test]
    fn truncated_bubble_against_dense_simpson() {
        for (n, p) in [(3usize, 2.0f64), (4, 3.0), (3, 1.5)] {
            let pr = derive_params(n, p).unwrap();
            let b = Bubble::new(pr);
            let spec = BubbleSpec::new(1.0, 3.0).unwrap();
            let radius = 1.0;
            let u = b.truncated(spec, radius).unwrap();
            let dom = DomainBall::new(n, radius).unwrap();
            let cfg = QuadConfig::default();
            let w = pr.sphere();
            let n1 = (n - 1) as f64;
            let crit = lq_norm(&pr, &u, pr.pstar, &dom, &cfg).unwrap();
            let edge = b.value(&spec, radius);
            let oracle_crit = (w * simpson(|r| (b.value(&spec, r) - edge).powf(pr.pstar) * r.powf(n1), 0.0, radius, 400_000))
                .powf(1.0 / pr.pstar);
            assert_relative_eq!(crit, oracle_crit, max_relative = 1e-6);
            let grad = grad_lp_norm(&pr, &u, &dom, &cfg).unwrap();
            let oracle_grad =
                (w * simpson(|r| b.derivative(&spec, r).abs().powf(p) * r.powf(n1), 0.0, radius, 400_000)).powf(1.0 / p);
            assert_relative_eq!(grad, oracle_grad, max_relative = 1e-6);
        }
    }

    #[test]
    fn dilation_invariance_of_bubble_norms() {
        for (n, p) in [(3usize, 2.0f64), (4, 3.0), (3, 1.5), (5, 2.5)] {
            let pr = derive_params(n, p).unwrap();
            let b = Bubble::new(pr);
            let whole = DomainBall::whole_space();
            let cfg = QuadConfig::default();
            let g1 = grad_lp_norm(&pr, &b.profile(BubbleSpec::unit()), &whole, &cfg).unwrap();
            let c1 = lq_norm(&pr, &b.profile(BubbleSpec::unit()), pr.pstar, &whole, &cfg).unwrap();
            for lambda in [0.1, 10.0] {
                let u = b.profile(BubbleSpec::new(1.0, lambda).unwrap());
                assert_relative_eq!(grad_lp_norm(&pr, &u, &whole, &cfg).unwrap(), g1, max_relative = 1e-8);
                assert_relative_eq!(lq_norm(&pr, &u, pr.pstar, &whole, &cfg).unwrap(), c1, max_relative = 1e-8);
            }
            for (c, lambda) in [(2.5, 0.5), (-0.5, 2.0)] {
                let u = b.profile(BubbleSpec::new(c, lambda).unwrap());
                let g: f64 = grad_lp_norm(&pr, &u, &whole, &cfg).unwrap();
                assert_relative_eq!(g, c.abs() * g1, max_relative = 1e-8);
            }
        }
    }

    #[test]
    fn crit_norm_matches_tail_integral_identity() {
        let pr = derive_params(3, 2.0f64).unwrap();
        let b = Bubble::new(pr);
        let cfg = QuadConfig::default();
        let crit = lq_norm(&pr, &b.profile(BubbleSpec::unit()), 6.0, &DomainBall::whole_space(), &cfg).unwrap();
        let t0 = crate::bubble::tail_integral(&pr, 0.0, &cfg).unwrap();
        assert_relative_eq!(t0, crit.powi(6) / (pr.sphere() * b.gamma().powi(6)), max_relative = 1e-10);
    }
}
