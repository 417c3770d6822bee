//! Symmetric decreasing rearrangement of radial profiles on a ball.
//!
//! For a radial `u` the superlevel set `{u > t}` is a union of shells
//! `a_j < |x| < b_j`, so the equivalent ball radius is
//! `ρ(t) = (Σ b_j^N - a_j^N)^{1/N}` and `u*(ρ(t)) = t`. Node slopes come from
//! the coarea formula, `u*'(ρ) = -ρ^{N-1} / Σ_j r_j^{N-1}/|u'(r_j)|` over the
//! crossings `r_j` of the level.

use rayon::prelude::*;

use crate::error::{LabError, Result};
use crate::optimize::golden_max;
use crate::params::Params;
use crate::profile::{DomainBall, ProfileKind, RadialProfile, SampledProfile};
use crate::scalar::Real;

/// Level and scan resolution of [`rearrange`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RearrangeOptions<T> {
    /// Geometric levels between `max·level_floor` and `max`.
    pub geometric_levels: usize,
    pub level_floor: T,
    /// Extra levels taken from the values of `u` on a uniform radial grid.
    pub uniform_levels: usize,
    /// Extra levels from a log-spaced radial grid reaching `R·level_floor`.
    pub log_levels: usize,
    /// Uniform scan points used to bracket level crossings.
    pub scan_points: usize,
}

impl<T: Real> Default for RearrangeOptions<T> {
    fn default() -> Self {
        Self {
            geometric_levels: 512,
            level_floor: T::lit(1e-6),
            uniform_levels: 1024,
            log_levels: 256,
            scan_points: 4096,
        }
    }
}

/// Crossings of one level: the shells of `{u > t}` and the crossing radii.
struct LevelSet<T> {
    shells: Vec<(T, T)>,
    /// `(r_j, |u'(r_j)|)` at interior crossings.
    crossings: Vec<(T, T)>,
}

struct Scanner<'a, T> {
    u: &'a RadialProfile<T>,
    grid: Vec<T>,
    values: Vec<T>,
    top: T,
}

impl<'a, T: Real> Scanner<'a, T> {
    fn new(u: &'a RadialProfile<T>, top: T, n: usize) -> Self {
        let grid = u.scan_grid(top, n);
        let values = grid.iter().map(|&r| u.value(r)).collect();
        Self { u, grid, values, top }
    }

    /// Bisection for `u(r) = t` in `[a, b]` with `u(a) > t >= u(b)` or the reverse.
    fn refine(&self, t: T, mut a: T, mut b: T) -> T {
        let above_a = self.u.value(a) > t;
        for _ in 0..100 {
            let m = (a + b) * T::lit(0.5);
            if m <= a || m >= b {
                break;
            }
            if (self.u.value(m) > t) == above_a {
                a = m;
            } else {
                b = m;
            }
        }
        (a + b) * T::lit(0.5)
    }

    fn level_set(&self, t: T) -> LevelSet<T> {
        let mut shells = Vec::new();
        let mut crossings = Vec::new();
        let nudge = self.top * T::epsilon() * T::lit(64.0);
        let mut start = if self.values[0] > t { Some(T::zero()) } else { None };
        for i in 0..self.grid.len() - 1 {
            let (inside_a, inside_b) = (self.values[i] > t, self.values[i + 1] > t);
            if inside_a == inside_b {
                continue;
            }
            let r = self.refine(t, self.grid[i], self.grid[i + 1]);
            // slope on the side where u > t
            let probe = if inside_a { r - nudge } else { r + nudge };
            crossings.push((r, self.u.derivative(probe.max(T::zero())).abs()));
            if inside_a {
                shells.push((start.take().unwrap_or(T::zero()), r));
            } else {
                start = Some(r);
            }
        }
        if let Some(a) = start {
            shells.push((a, self.top));
        }
        LevelSet { shells, crossings }
    }
}

impl<T: Real> LevelSet<T> {
    fn radius(&self, n: i32) -> T {
        let s = self
            .shells
            .iter()
            .fold(T::zero(), |acc, &(a, b)| acc + b.powi(n) - a.powi(n));
        s.max(T::zero()).powf(T::one() / T::lit(n as f64))
    }
}

/// `|{u > t}|` inside `dom`.
pub fn distribution_function<T: Real>(params: &Params<T>, u: &RadialProfile<T>, t: T, dom: &DomainBall<T>) -> Result<T> {
    let top = dom.radius.min(u.support_radius());
    if !top.is_finite() {
        return Err(LabError::domain("distribution function needs a bounded ball or compact support"));
    }
    let scan = Scanner::new(u, top, 4096);
    let rho = scan.level_set(t).radius(params.n as i32);
    Ok(DomainBall::<T>::ball_measure(params.n, rho))
}

/// The symmetric decreasing rearrangement `u*` on `dom` as a sampled profile.
pub fn rearrange<T: Real>(
    params: &Params<T>,
    u: &RadialProfile<T>,
    dom: &DomainBall<T>,
    opts: &RearrangeOptions<T>,
) -> Result<RadialProfile<T>> {
    let top = dom.radius.min(u.support_radius());
    if !top.is_finite() {
        return Err(LabError::domain("rearrangement needs a bounded ball or compact support"));
    }
    let n = params.n as i32;
    let n1 = params.dim() - T::one();
    let scan = Scanner::new(u, top, opts.scan_points);
    if scan.values.iter().any(|v| !v.is_finite()) {
        return Err(LabError::domain("rearrangement needs a bounded profile"));
    }
    let (imax, _) = scan
        .values
        .iter()
        .enumerate()
        .fold((0, T::neg_infinity()), |acc, (i, &v)| if v > acc.1 { (i, v) } else { acc });
    let vmin = scan.values.iter().copied().fold(T::infinity(), T::min);
    if vmin < T::zero() {
        return Err(LabError::domain(format!(
            "rearrangement needs a nonnegative profile (min on scan grid {vmin})"
        )));
    }
    let peak = if imax == 0 {
        (T::zero(), scan.values[0])
    } else {
        let lo = scan.grid[imax - 1];
        let hi = scan.grid[(imax + 1).min(scan.grid.len() - 1)];
        let g = golden_max(|r| u.value(r), lo, hi, T::epsilon().sqrt(), 200);
        if g.value >= scan.values[imax] {
            (g.x, g.value)
        } else {
            (scan.grid[imax], scan.values[imax])
        }
    };
    let vmax = peak.1;
    if vmax <= T::zero() {
        return Err(LabError::domain("rearrangement of the zero profile"));
    }

    let mut levels = Vec::new();
    let floor = vmax * opts.level_floor;
    let gl = opts.geometric_levels.max(2);
    for k in 0..gl {
        let frac = T::from_usize_lossy(k) / T::from_usize_lossy(gl - 1);
        levels.push(floor * (vmax / floor).powf(frac));
    }
    for k in 0..=opts.uniform_levels {
        let r = top * T::from_usize_lossy(k) / T::from_usize_lossy(opts.uniform_levels.max(1));
        levels.push(u.value(r));
    }
    for k in 0..opts.log_levels {
        let frac = T::from_usize_lossy(k) / T::from_usize_lossy(opts.log_levels.max(2) - 1);
        levels.push(u.value(top * opts.level_floor.powf(frac)));
    }
    levels.push(vmin);
    levels.retain(|&t| t >= vmin && t < vmax);
    levels.sort_by(|a, b| b.partial_cmp(a).unwrap_or(std::cmp::Ordering::Equal));
    levels.dedup_by(|a, b| (*a - *b).abs() <= T::epsilon() * vmax * T::lit(4.0));

    let nodes: Vec<(T, T, T)> = levels
        .par_iter()
        .map(|&t| {
            let set = scan.level_set(t);
            let rho = set.radius(n);
            let denom = set
                .crossings
                .iter()
                .fold(T::zero(), |acc, &(r, du)| acc + r.powf(n1) / du);
            let slope = if set.crossings.is_empty() || !denom.is_finite() {
                T::zero()
            } else {
                -rho.powf(n1) / denom
            };
            (rho, t, slope)
        })
        .collect();

    let start_slope = if peak.0 == T::zero() { u.derivative(T::zero()).min(T::zero()) } else { T::zero() };
    let mut rs = vec![T::zero()];
    let mut vs = vec![vmax];
    let mut ds = vec![start_slope];
    let min_gap = top * T::epsilon() * T::lit(16.0);
    for (rho, t, slope) in nodes {
        if rho > *rs.last().unwrap_or(&T::zero()) + min_gap {
            rs.push(rho);
            vs.push(t);
            ds.push(slope);
        }
    }
    if vmin == T::zero() && *vs.last().unwrap_or(&T::one()) > T::zero() {
        let last = *rs.last().unwrap_or(&T::zero());
        if last < top {
            rs.push(top.max(last + min_gap));
            vs.push(T::zero());
            ds.push(T::zero());
        }
    }
    let support = top.max(*rs.last().unwrap_or(&top));
    let samples = SampledProfile::with_slopes(rs, vs, ds, support)?;
    Ok(RadialProfile::from_samples(samples).with_kind(ProfileKind::Sampled))
}
