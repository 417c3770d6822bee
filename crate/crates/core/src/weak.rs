//! The weak Lebesgue norm `sup_D |D|^{-(s-1)/s} ∫_D |u|` and the inequalities
//! relating it to strong norms.
//!
//! For a nonnegative radially decreasing `u` the supremum over sets of given
//! measure is attained on the centered ball (bathtub principle), so the norm
//! reduces to a one-dimensional maximization over the ball radius.
//! Non-monotone profiles are rearranged first; both sides of the reduction
//! have the same weak norm because the functional only sees the distribution
//! function.

use serde::{Serialize, Serializer};

use crate::error::{LabError, Result};
use crate::norms::{lq_norm, lt_quasi_norm, radial_points};
use crate::optimize::golden_max;
use crate::params::Params;
use crate::profile::{DomainBall, RadialProfile};
use crate::quadrature::QuadConfig;
use crate::rearrange::{rearrange, RearrangeOptions};
use crate::scalar::Real;

/// A weak norm value: finite, or flagged unbounded.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WeakNorm<T> {
    Finite(T),
    Unbounded,
}

impl<T: Real> WeakNorm<T> {
    /// The value, `+∞` when unbounded.
    pub fn value(&self) -> T {
        match self {
            Self::Finite(v) => *v,
            Self::Unbounded => T::infinity(),
        }
    }

    pub fn finite(&self) -> Option<T> {
        match self {
            Self::Finite(v) => Some(*v),
            Self::Unbounded => None,
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, Self::Finite(_))
    }
}

impl<T: Real> Serialize for WeakNorm<T> {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            Self::Finite(v) => s.serialize_f64(v.as_f64()),
            Self::Unbounded => s.serialize_str("inf"),
        }
    }
}

/// Scan resolution and unboundedness detection.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeakNormOptions<T> {
    /// Log-radius scan points per decade.
    pub points_per_decade: usize,
    /// Decades scanned below the domain radius on bounded balls.
    pub decades_bounded: usize,
    /// Decades scanned on either side of the profile scale over the whole space.
    pub decades_below: usize,
    pub decades_above: usize,
    /// Consecutive decades of growth by more than `growth_factor` that flag
    /// an unbounded objective.
    pub growth_decades: usize,
    pub growth_factor: T,
    /// Bracket tolerance of the golden-section refinement in `log r`.
    pub refine_tol: T,
}

impl<T: Real> Default for WeakNormOptions<T> {
    fn default() -> Self {
        Self {
            points_per_decade: 8,
            decades_bounded: 8,
            decades_below: 6,
            decades_above: 30,
            growth_decades: 6,
            growth_factor: T::lit(1e-3),
            refine_tol: T::lit(1e-10),
        }
    }
}

/// `‖u‖_{L^s_w(B_R)}` with default options.
pub fn weak_norm<T: Real>(
    params: &Params<T>,
    u: &RadialProfile<T>,
    s: T,
    dom: &DomainBall<T>,
    cfg: &QuadConfig<T>,
) -> Result<WeakNorm<T>> {
    weak_norm_with(params, u, s, dom, cfg, &WeakNormOptions::default())
}

/// Incremental ball masses `M(ρ) = |𝕊^{N-1}| ∫_0^ρ u r^{N-1} dr`.
struct BallMass<'a, T> {
    params: &'a Params<T>,
    u: &'a RadialProfile<T>,
    cfg: &'a QuadConfig<T>,
    n1: T,
}

impl<'a, T: Real> BallMass<'a, T> {
    fn piece(&self, a: T, b: T) -> Result<T> {
        let mut pts = radial_points(b, self.u.breakpoints());
        pts.retain(|x| *x >= a);
        if pts.first().is_none_or(|x| *x > a) {
            pts.insert(0, a);
        }
        let n1 = self.n1;
        let u = self.u;
        let i = self.cfg.integrate_pieces(|r| u.value(r) * r.powf(n1), &pts)?;
        Ok(self.params.sphere() * i.value)
    }

    fn objective(&self, s: T, rho: T, mass: T) -> T {
        let n = self.params.n;
        mass * DomainBall::<T>::ball_measure(n, rho).powf(-(s - T::one()) / s)
    }
}

/// `‖u‖_{L^s_w(B_R)}` for `s > 1`.
///
/// On bounded balls the supremum is searched over ball radii in
/// `[R·10^{-d}, R]`; over the whole space the scan extends `decades_above`
/// decades past the profile scale and the result is flagged
/// [`WeakNorm::Unbounded`] when the objective keeps growing by more than
/// `growth_factor` per decade over the last `growth_decades` decades.
pub fn weak_norm_with<T: Real>(
    params: &Params<T>,
    u: &RadialProfile<T>,
    s: T,
    dom: &DomainBall<T>,
    cfg: &QuadConfig<T>,
    opts: &WeakNormOptions<T>,
) -> Result<WeakNorm<T>> {
    if !(s > T::one()) {
        return Err(LabError::domain(format!(
            "weak L^s norm needs s > 1 (got s = {s}); the functional makes no sense for s <= 1"
        )));
    }
    let top = dom.radius.min(u.support_radius());
    let scan_top = if top.is_finite() { top } else { profile_scale(u) * T::lit(1e3) };
    if u.min_on_grid(scan_top) < T::zero() {
        return Err(LabError::domain("weak norm expects a nonnegative profile"));
    }
    if !u.is_radially_decreasing(scan_top, T::lit(1e-12)) {
        if !top.is_finite() {
            return Err(LabError::domain(
                "non-monotone profile on the whole space: rearrangement needs a bounded ball",
            ));
        }
        let ball = DomainBall::new(params.n, top)?;
        let star = rearrange(params, u, &ball, &RearrangeOptions::default())?;
        return weak_norm_with(params, &star, s, &ball, cfg, opts);
    }

    let mass = BallMass {
        params,
        u,
        cfg,
        n1: params.dim() - T::one(),
    };
    let ten = T::lit(10.0);
    let ppd = opts.points_per_decade.max(1);
    let step = ten.powf(T::one() / T::from_usize_lossy(ppd));

    // log-spaced scan radii
    let radii: Vec<T> = if top.is_finite() {
        let count = opts.decades_bounded * ppd;
        (0..=count)
            .rev()
            .map(|k| top / step.powi(k as i32))
            .collect()
    } else {
        let scale = profile_scale(u);
        let max_decades = max_safe_decades::<T>(params.n, opts.decades_above);
        let lo = scale * ten.powi(-(opts.decades_below as i32));
        (0..=(opts.decades_below + max_decades) * ppd)
            .map(|k| lo * step.powi(k as i32))
            .collect()
    };

    let mut masses = Vec::with_capacity(radii.len());
    let mut acc = mass.piece(T::zero(), radii[0])?;
    masses.push(acc);
    for w in radii.windows(2) {
        acc = acc + mass.piece(w[0], w[1])?;
        masses.push(acc);
    }
    let phis: Vec<T> = radii
        .iter()
        .zip(&masses)
        .map(|(&r, &m)| mass.objective(s, r, m))
        .collect();

    if !top.is_finite() {
        let needed = opts.growth_decades * ppd;
        if phis.len() > needed {
            let tail = &phis[phis.len() - 1 - needed..];
            let growing = tail
                .iter()
                .step_by(ppd)
                .collect::<Vec<_>>()
                .windows(2)
                .all(|w| *w[1] > *w[0] * (T::one() + opts.growth_factor));
            if growing {
                return Ok(WeakNorm::Unbounded);
            }
        }
    }

    let (best, best_phi) = phis
        .iter()
        .enumerate()
        .fold((0usize, T::neg_infinity()), |acc, (i, &v)| if v > acc.1 { (i, v) } else { acc });

    // refine in log radius between the scan neighbours of the best point
    let lo_idx = best.saturating_sub(1);
    let hi_idx = (best + 1).min(radii.len() - 1);
    let base_r = radii[lo_idx];
    let base_m = masses[lo_idx];
    let mut failure = None;
    let refined = golden_max(
        |x: T| {
            let rho = x.exp();
            match mass.piece(base_r, rho) {
                Ok(m) => mass.objective(s, rho, base_m + m),
                Err(e) => {
                    failure = Some(e);
                    T::neg_infinity()
                }
            }
        },
        base_r.ln(),
        radii[hi_idx].ln(),
        opts.refine_tol,
        200,
    );
    if let Some(e) = failure {
        return Err(e);
    }
    Ok(WeakNorm::Finite(best_phi.max(refined.value)))
}

/// Characteristic length of a profile: its largest breakpoint, or 1.
fn profile_scale<T: Real>(u: &RadialProfile<T>) -> T {
    u.breakpoints()
        .iter()
        .copied()
        .fold(T::zero(), T::max)
        .max(if u.support_radius().is_finite() { u.support_radius() } else { T::zero() })
        .max(T::lit(1e-300).max(T::min_positive_value()))
        .max(if u.breakpoints().is_empty() { T::one() } else { T::zero() })
}

/// Number of decades above the profile scale that keep `ρ^{N+1}` finite.
fn max_safe_decades<T: Real>(n: usize, wanted: usize) -> usize {
    let limit = T::max_value().log10().as_f64() / (n as f64 + 2.0);
    wanted.min(limit.floor().max(1.0) as usize)
}

/// Classical Marcinkiewicz quasi-norm `sup_t t·|{u > t}|^{1/s}` of a nonnegative
/// radially decreasing profile (cross-check only; no equivalence constant is claimed).
pub fn classical_weak_norm<T: Real>(params: &Params<T>, u: &RadialProfile<T>, s: T, dom: &DomainBall<T>) -> Result<T> {
    if !(s > T::one()) {
        return Err(LabError::domain("classical weak norm needs s > 1"));
    }
    let top = dom.radius.min(u.support_radius());
    if !top.is_finite() {
        return Err(LabError::domain("classical weak norm cross-check needs a bounded ball"));
    }
    let ball = DomainBall::new(params.n, top)?;
    let star;
    let v = if u.is_radially_decreasing(top, T::lit(1e-12)) {
        u
    } else {
        star = rearrange(params, u, &ball, &RearrangeOptions::default())?;
        &star
    };
    // for decreasing v: {v > v(r)} is B_r, so the sup runs over r
    let n = params.n;
    let obj = |r: T| v.value(r) * DomainBall::<T>::ball_measure(n, r).powf(s.recip());
    let count = 4096usize;
    let radii: Vec<T> = (1..=count)
        .map(|k| top * T::from_usize_lossy(k) / T::from_usize_lossy(count))
        .collect();
    let (best, _) = radii
        .iter()
        .enumerate()
        .fold((0, T::neg_infinity()), |acc, (i, &r)| {
            let v = obj(r);
            if v > acc.1 {
                (i, v)
            } else {
                acc
            }
        });
    let a = radii[best.saturating_sub(1)];
    let b = radii[(best + 1).min(count - 1)];
    Ok(golden_max(obj, a, b, T::lit(1e-12), 200).value)
}

/// Both sides of `‖u‖_{L^{p̄}_w} <= ‖u‖_{L^{p*}} |Ω|^{1/(p·p̄)}`.
pub fn weak_norm_holder_bound<T: Real>(
    params: &Params<T>,
    u: &RadialProfile<T>,
    dom: &DomainBall<T>,
    cfg: &QuadConfig<T>,
) -> Result<(T, T)> {
    params.require_weak_valid()?;
    if !dom.is_bounded() {
        return Err(LabError::domain("Hölder bound needs a ball of finite measure"));
    }
    let lhs = weak_norm(params, u, params.pbar, dom, cfg)?.value();
    let crit = lq_norm(params, u, params.pstar, dom, cfg)?;
    let rhs = crit * dom.measure.powf(T::one() / (params.p * params.pbar));
    Ok((lhs, rhs))
}

/// Both sides of `‖u‖_{L^t} <= (s/(s-t))^{1/t} |Ω|^{(s-t)/(st)} ‖u‖_{L^s_w}`.
pub fn weak_to_strong<T: Real>(
    params: &Params<T>,
    u: &RadialProfile<T>,
    t: T,
    s: T,
    dom: &DomainBall<T>,
    cfg: &QuadConfig<T>,
) -> Result<(T, T)> {
    if !(s > T::one()) {
        return Err(LabError::domain(format!("weak-to-strong bound needs s > 1 (got {s})")));
    }
    if !(t > T::zero()) || t >= s {
        return Err(LabError::domain(format!("weak-to-strong bound needs 0 < t < s (got t={t}, s={s})")));
    }
    if !dom.is_bounded() {
        return Err(LabError::domain("weak-to-strong bound needs |Ω| < ∞"));
    }
    let lhs = lt_quasi_norm(params, u, t, dom, cfg)?;
    let weak = weak_norm(params, u, s, dom, cfg)?.value();
    Ok((lhs, weak_to_strong_constant(t, s, dom.measure) * weak))
}

/// `(s/(s-t))^{1/t} |Ω|^{(s-t)/(st)}`.
pub fn weak_to_strong_constant<T: Real>(t: T, s: T, measure: T) -> T {
    (s / (s - t)).powf(t.recip()) * measure.powf((s - t) / (s * t))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bubble::{Bubble, BubbleSpec};
    use crate::params::derive_params;
    use approx::assert_relative_eq;

    #[test]
    fn constant_profile_attains_at_full_ball() {
        let pr = derive_params(3, 2.0f64).unwrap();
        let cfg = QuadConfig::default();
        for (c, radius, s) in [(1.0, 1.0, 3.0), (2.5, 0.7, 1.5), (0.3, 4.0, 6.0)] {
            let dom = DomainBall::new(3, radius).unwrap();
            let u = RadialProfile::constant(c, radius);
            let w = weak_norm(&pr, &u, s, &dom, &cfg).unwrap().value();
            assert_relative_eq!(w, c * dom.measure.powf(1.0 / s), max_relative = 1e-12);
        }
    }

    #[test]
    fn rejects_s_at_most_one() {
        let pr = derive_params(3, 2.0f64).unwrap();
        let dom = DomainBall::new(3, 1.0).unwrap();
        let u = RadialProfile::constant(1.0, 1.0);
        let e = weak_norm(&pr, &u, 1.0, &dom, &QuadConfig::default()).unwrap_err();
        assert!(e.to_string().contains("s > 1"));
    }

    #[test]
    fn bubble_weak_norm_finite_above_threshold() {
        let pr = derive_params(3, 2.0f64).unwrap();
        let b = Bubble::new(pr);
        let u = b.profile(BubbleSpec::unit());
        let w = weak_norm(&pr, &u, pr.pbar, &DomainBall::whole_space(), &QuadConfig::default()).unwrap();
        // N=3, p=2: the objective increases to 4π·3^{1/4}/2·(4π/3)^{-2/3}
        let limit = 4.0 * std::f64::consts::PI * 3f64.powf(0.25) / 2.0 * (4.0 * std::f64::consts::PI / 3.0).powf(-2.0 / 3.0);
        assert_relative_eq!(w.finite().unwrap(), limit, max_relative = 1e-9);
    }

    #[test]
    fn subcritical_exponent_is_unbounded_on_whole_space() {
        // s < p̄: |B_ρ|^{1/s} avg(U) grows like ρ^{N/s-(N-p)/(p-1)}
        let pr = derive_params(3, 2.0f64).unwrap();
        let b = Bubble::new(pr);
        let u = b.profile(BubbleSpec::unit());
        let w = weak_norm(&pr, &u, 2.0, &DomainBall::whole_space(), &QuadConfig::default()).unwrap();
        assert_eq!(w, WeakNorm::Unbounded);
    }

    #[test]
    fn homogeneity() {
        let pr = derive_params(4, 3.0f64).unwrap();
        let b = Bubble::new(pr);
        let u = b.truncated(BubbleSpec::new(1.0, 5.0).unwrap(), 1.0).unwrap();
        let dom = DomainBall::new(4, 1.0).unwrap();
        let cfg = QuadConfig::default();
        let w1 = weak_norm(&pr, &u, pr.pbar, &dom, &cfg).unwrap().value();
        let w3 = weak_norm(&pr, &u.scaled(3.0), pr.pbar, &dom, &cfg).unwrap().value();
        assert_relative_eq!(w3, 3.0 * w1, max_relative = 1e-10);
    }

    #[test]
    fn weak_below_strong() {
        let pr = derive_params(3, 2.0f64).unwrap();
        let b = Bubble::new(pr);
        let dom = DomainBall::new(3, 1.0).unwrap();
        let cfg = QuadConfig::default();
        for lambda in [1.0, 5.0, 50.0] {
            let u = b.truncated(BubbleSpec::new(1.0, lambda).unwrap(), 1.0).unwrap();
            for s in [1.5, 3.0, 5.0] {
                let w = weak_norm(&pr, &u, s, &dom, &cfg).unwrap().value();
                let l = lq_norm(&pr, &u, s, &dom, &cfg).unwrap();
                assert!(w <= l * (1.0 + 1e-8), "λ={lambda} s={s}: {w} > {l}");
            }
        }
    }

    #[test]
    fn holder_bound_is_equality_for_constants() {
        let pr = derive_params(3, 2.0f64).unwrap();
        let dom = DomainBall::new(3, 1.3).unwrap();
        let u = RadialProfile::constant(0.8, 1.3);
        let (lhs, rhs) = weak_norm_holder_bound(&pr, &u, &dom, &QuadConfig::default()).unwrap();
        assert_relative_eq!(lhs, rhs, max_relative = 1e-8);
    }

    #[test]
    fn holder_bound_strict_for_truncated_bubbles() {
        let pr = derive_params(3, 2.0f64).unwrap();
        let b = Bubble::new(pr);
        let dom = DomainBall::new(3, 1.0).unwrap();
        let cfg = QuadConfig::default();
        let (l1, r1) = weak_norm_holder_bound(&pr, &b.truncated(BubbleSpec::unit(), 1.0).unwrap(), &dom, &cfg).unwrap();
        assert!(l1 < r1);
        let (l2, r2) =
            weak_norm_holder_bound(&pr, &b.truncated(BubbleSpec::new(1.0, 50.0).unwrap(), 1.0).unwrap(), &dom, &cfg).unwrap();
        assert!(l2 / r2 < l1 / r1);
        assert!(l2 / r2 < 0.5, "ratio {}", l2 / r2);
    }

    #[test]
    fn weak_to_strong_constant_case() {
        let pr = derive_params(3, 2.0f64).unwrap();
        let dom = DomainBall::new(3, 1.0).unwrap();
        let u = RadialProfile::constant(1.0, 1.0);
        let (lhs, rhs) = weak_to_strong(&pr, &u, 1.0, 2.0, &dom, &QuadConfig::default()).unwrap();
        assert_relative_eq!(lhs, dom.measure, max_relative = 1e-12);
        assert_relative_eq!(rhs, 2.0 * dom.measure, max_relative = 1e-10);
    }

    #[test]
    fn weak_to_strong_errors_and_blowup() {
        let pr = derive_params(3, 2.0f64).unwrap();
        let dom = DomainBall::new(3, 1.0).unwrap();
        let u = RadialProfile::constant(1.0, 1.0);
        let cfg = QuadConfig::default();
        assert!(weak_to_strong(&pr, &u, 2.0, 2.0, &dom, &cfg).is_err());
        assert!(weak_to_strong(&pr, &u, 0.0, 2.0, &dom, &cfg).is_err());
        let c1 = weak_to_strong_constant(1.9, 2.0, 1.0);
        let c2 = weak_to_strong_constant(1.9999, 2.0, 1.0);
        assert!(c2 > c1 && c2 > 50.0);
    }

    #[test]
    fn classical_norm_is_below_weak_functional() {
        // t|{u>t}|^{1/s} <= |D|^{1/s - 1} ∫_D u for D = {u>t}
        let pr = derive_params(3, 2.0f64).unwrap();
        let b = Bubble::new(pr);
        let dom = DomainBall::new(3, 1.0).unwrap();
        let u = b.truncated(BubbleSpec::new(1.0, 5.0).unwrap(), 1.0).unwrap();
        let classical = classical_weak_norm(&pr, &u, 3.0, &dom).unwrap();
        let w = weak_norm(&pr, &u, 3.0, &dom, &QuadConfig::default()).unwrap().value();
        assert!(classical <= w * (1.0 + 1e-10));
        assert!(classical > 0.2 * w);
    }
}
