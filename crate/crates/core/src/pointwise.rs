//! Algebraic vector inequalities behind the upper and lower expansions:
//! margins, seeded sample sweeps and estimates of the constants `γ_p` and
//! `C₁(r, κ)`.

use std::collections::HashMap;
use std::io::Write;
use std::sync::Mutex;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{LabError, Result};
use crate::scalar::Real;

/// Number of independent generator substreams a sweep is split into. Fixed,
/// so results do not depend on the size of the thread pool.
pub const SWEEP_STREAMS: u64 = 32;

/// Relative tolerance below zero at which a margin counts as a violation.
pub const VIOLATION_TOL: f64 = 1e-12;

/// One drawn configuration.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VectorSample<T> {
    pub x: Vec<T>,
    pub y: Vec<T>,
    pub exponent: T,
    pub kappa: Option<T>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ConstantName {
    GammaP,
    C1,
}

impl std::fmt::Display for ConstantName {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::GammaP => "gamma_p",
            Self::C1 => "C1",
        })
    }
}

/// Sampled constant, with the safety factor already applied.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConstantEstimate<T> {
    pub name: ConstantName,
    pub exponent: T,
    pub kappa: Option<T>,
    pub value: T,
    /// Extremal sampled ratio before the safety factor.
    pub raw: T,
    pub samples: usize,
    pub worst_sample: VectorSample<T>,
}

/// Result of a sweep of one inequality over random samples.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepReport<T> {
    pub samples: usize,
    pub violations: usize,
    /// Smallest `margin / scale` seen.
    pub min_normalized_margin: T,
    pub worst_sample: Option<VectorSample<T>>,
}

fn dot<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).map(|(u, v)| *u * *v).sum()
}

fn norm<T: Real>(a: &[T]) -> T {
    dot(a, a).sqrt()
}

fn sum_norm<T: Real>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).map(|(u, v)| (*u + *v) * (*u + *v)).sum::<T>().sqrt()
}

/// `|x|^{p-2} x·y`, zero at `x = 0` when `p > 1`.
fn first_order<T: Real>(nx: T, xy: T, p: T) -> T {
    if nx == T::zero() {
        T::zero()
    } else {
        nx.powf(p - T::lit(2.0)) * xy
    }
}

fn require_same_dim<T>(x: &[T], y: &[T]) -> Result<()> {
    if x.len() != y.len() || x.is_empty() {
        return Err(LabError::domain(format!(
            "x and y need the same positive dimension (got {} and {})",
            x.len(),
            y.len()
        )));
    }
    Ok(())
}

/// `RHS - LHS` of `|x+y|^p ≤ |x|^p + p|x|^{p-2}x·y + p(p-1)/2 (|x|+|y|)^{p-2}|y|²`, `p ≥ 2`.
pub fn check_311<T: Real>(x: &[T], y: &[T], p: T) -> Result<T> {
    require_same_dim(x, y)?;
    if !(p >= T::lit(2.0)) {
        return Err(LabError::domain(format!("this upper bound needs p >= 2 (got {p})")));
    }
    let (nx, ny, nxy) = (norm(x), norm(y), sum_norm(x, y));
    let xy = dot(x, y);
    let quad = if p == T::lit(2.0) {
        ny * ny
    } else {
        p * (p - T::one()) / T::lit(2.0) * (nx + ny).powf(p - T::lit(2.0)) * ny * ny
    };
    let rhs = nx.powf(p) + p * first_order(nx, xy, p) + quad;
    Ok(rhs - nxy.powf(p))
}

/// `RHS - LHS` of `|x+y|^p ≤ |x|^p + p|x|^{p-2}x·y + γ|y|^p`, `1 < p < 2`.
pub fn check_312<T: Real>(x: &[T], y: &[T], p: T, gamma: T) -> Result<T> {
    require_same_dim(x, y)?;
    require_sub_quadratic(p)?;
    let (nx, ny, nxy) = (norm(x), norm(y), sum_norm(x, y));
    let rhs = nx.powf(p) + p * first_order(nx, dot(x, y), p) + gamma * ny.powf(p);
    Ok(rhs - nxy.powf(p))
}

fn require_sub_quadratic<T: Real>(p: T) -> Result<()> {
    if p > T::one() && p < T::lit(2.0) {
        Ok(())
    } else {
        Err(LabError::domain(format!("exponent must lie in (1, 2) (got {p})")))
    }
}

fn require_kappa<T: Real>(r: T, kappa: T) -> Result<()> {
    if !(r > T::one()) || !r.is_finite() {
        return Err(LabError::domain(format!("exponent must exceed 1 (got {r})")));
    }
    if !(kappa > T::zero() && kappa < T::one()) {
        return Err(LabError::domain(format!("kappa must lie in (0, 1) (got {kappa})")));
    }
    Ok(())
}

/// `|ω|^{r-2}` for the auxiliary point of the lower expansion, from the
/// norms `|x|`, `|x+y|`.
fn omega_pow<T: Real>(nx: T, nxy: T, r: T) -> T {
    let two = T::lit(2.0);
    if r >= two {
        // ω̄ = (|x+y|/|x|)^{1/(r-2)} (x+y) when |x+y| ≤ |x|
        if nxy <= nx {
            nxy.powf(r - T::one()) / nx
        } else {
            nx.powf(r - two)
        }
    } else if nx < nxy {
        // ω̃ = (|x+y|/((2-r)|x+y| + (r-1)|x|))^{1/(r-2)} x when |x| < |x+y|
        nxy / ((two - r) * nxy + (r - T::one()) * nx) * nx.powf(r - two)
    } else {
        nx.powf(r - two)
    }
}

/// Left side minus every term except the `C₁` term, and the quantity `C₁`
/// multiplies.
fn fz_parts<T: Real>(nx: T, ny: T, nxy: T, xy: T, r: T, kappa: T) -> (T, T) {
    let two = T::lit(2.0);
    if r == two {
        // |x+y|² - |x|² - 2x·y = |y|² exactly
        let y2 = ny * ny;
        return (y2 - (T::one() - kappa) * y2, y2);
    }
    let base = nxy.powf(r) - nx.powf(r) - r * first_order(nx, xy, r);
    let (quad, weight) = {
        let nx_r2 = if nx == T::zero() { T::zero() } else { nx.powf(r - two) };
        let gap = nx - nxy;
        let q = r * nx_r2 * ny * ny + r * (r - two) * omega_pow(nx, nxy, r) * gap * gap;
        let w = if r > two { ny.powf(r) } else { ny.powf(r).min(nx_r2 * ny * ny) };
        (q, w)
    };
    (base - (T::one() - kappa) / two * quad, weight)
}

/// `LHS - RHS` of the lower expansion with constant `c1`: branch (i) for
/// `r ≥ 2`, branch (ii) for `1 < r < 2`.
pub fn check_fz_lower<T: Real>(x: &[T], y: &[T], r: T, kappa: T, c1: T) -> Result<T> {
    require_same_dim(x, y)?;
    require_kappa(r, kappa)?;
    let nx = norm(x);
    if nx == T::zero() && r < T::lit(2.0) {
        return Err(LabError::Singular("|x|^(r-2) is undefined at x = 0 for r < 2".into()));
    }
    let (rest, weight) = fz_parts(nx, norm(y), sum_norm(x, y), dot(x, y), r, kappa);
    Ok(rest - c1 * weight)
}

/// `|x|^{r-2}|y|² + (r-2)|ω̃|^{r-2}(|x|-|x+y|)²`, nonnegative for `1 < r < 2`.
pub fn omega_tilde_quadratic<T: Real>(x: &[T], y: &[T], r: T) -> Result<T> {
    require_same_dim(x, y)?;
    require_sub_quadratic(r)?;
    let nx = norm(x);
    if nx == T::zero() {
        return Err(LabError::Singular("|x|^(r-2) is undefined at x = 0 for r < 2".into()));
    }
    let (ny, nxy) = (norm(y), sum_norm(x, y));
    let gap = nx - nxy;
    Ok(nx.powf(r - T::lit(2.0)) * ny * ny + (r - T::lit(2.0)) * omega_pow(nx, nxy, r) * gap * gap)
}

/// `|a+b|^r - |a|^r - r|a|^{r-2}ab`.
pub fn check_scalar_33<T: Real>(a: T, b: T, r: T) -> Result<T> {
    if !(r > T::one()) {
        return Err(LabError::domain(format!("exponent must exceed 1 (got {r})")));
    }
    if a == T::zero() && r < T::lit(2.0) {
        return Err(LabError::Singular("|a|^(r-2) is undefined at a = 0 for r < 2".into()));
    }
    let na = a.abs();
    if r == T::lit(2.0) {
        return Ok(b * b);
    }
    Ok((a + b).abs().powf(r) - na.powf(r) - r * first_order(na, a * b, r))
}

/// Reduced configuration `x = e₁`, `y = s(cos θ, sin θ)`.
#[derive(Debug, Clone, Copy)]
struct Reduced<T> {
    s: T,
    theta: T,
}

impl<T: Real> Reduced<T> {
    fn norms(&self) -> (T, T, T, T) {
        let c = self.theta.cos();
        let nxy = (T::one() + T::lit(2.0) * self.s * c + self.s * self.s).max(T::zero()).sqrt();
        (T::one(), self.s, nxy, self.s * c)
    }

    fn sample(&self, exponent: T, kappa: Option<T>) -> VectorSample<T> {
        VectorSample {
            x: vec![T::one(), T::zero()],
            y: vec![self.s * self.theta.cos(), self.s * self.theta.sin()],
            exponent,
            kappa,
        }
    }
}

const LOG_S_MIN: f64 = -4.0;
const LOG_S_MAX: f64 = 4.0;

/// Stratified grid over `|y|/|x| ∈ [1e-4, 1e4]` and the angle, plus
/// near-antipodal and collinear corners.
fn reduced_grid<T: Real>() -> Vec<Reduced<T>> {
    let pi = T::PI();
    let ns = 801;
    let nt = 181;
    let mut out = Vec::with_capacity(ns * (nt + 12) + 64);
    for i in 0..ns {
        let e = LOG_S_MIN + (LOG_S_MAX - LOG_S_MIN) * i as f64 / (ns - 1) as f64;
        let s = T::lit(10f64.powf(e));
        for j in 0..nt {
            out.push(Reduced {
                s,
                theta: pi * T::lit(j as f64 / (nt - 1) as f64),
            });
        }
        for k in 1..=12 {
            out.push(Reduced {
                s,
                theta: pi - T::lit(10f64.powi(-(k as i32) / 2) * if k % 2 == 0 { 1.0 } else { 3.0 }),
            });
        }
    }
    // y ≈ -x, y = -2x, y = -x/2 and tiny offsets around them
    for base in [0.5, 1.0, 2.0] {
        for k in 0..16 {
            let d = 10f64.powi(-(k as i32));
            for s in [base * (1.0 - d), base * (1.0 + d)] {
                out.push(Reduced { s: T::lit(s), theta: pi });
            }
        }
        out.push(Reduced { s: T::lit(base), theta: pi });
    }
    out
}

fn random_reduced<T: Real>(rng: &mut ChaCha8Rng) -> Reduced<T> {
    let e: f64 = rng.gen_range(LOG_S_MIN..=LOG_S_MAX);
    let theta = if rng.gen_bool(0.5) {
        rng.gen_range(0.0..=std::f64::consts::PI)
    } else {
        std::f64::consts::PI - 10f64.powf(rng.gen_range(-6.0..=0.0))
    };
    Reduced {
        s: T::lit(10f64.powf(e)),
        theta: T::lit(theta),
    }
}

fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn stream_len(total: usize, k: u64) -> usize {
    let w = SWEEP_STREAMS as usize;
    total / w + usize::from((k as usize) < total % w)
}

/// Extremum of `score` over the grid and `random` seeded samples.
/// `maximize` selects sup vs inf. Returns (value, arg, count).
fn extremum<T: Real, F>(score: F, random: usize, seed: u64, maximize: bool) -> (T, Reduced<T>, usize)
where
    F: Fn(&Reduced<T>) -> Option<T> + Sync,
{
    let better = |a: T, b: T| if maximize { a > b } else { a < b };
    let pick = |acc: Option<(T, Reduced<T>)>, z: Reduced<T>| -> Option<(T, Reduced<T>)> {
        match (score(&z), acc) {
            (Some(v), Some((bv, bz))) => Some(if better(v, bv) { (v, z) } else { (bv, bz) }),
            (Some(v), None) => Some((v, z)),
            (None, acc) => acc,
        }
    };
    let grid = reduced_grid::<T>();
    let from_grid = grid
        .par_chunks(4096)
        .map(|c| c.iter().fold(None, |acc, z| pick(acc, *z)))
        .collect::<Vec<_>>();
    let from_random = (0..SWEEP_STREAMS)
        .into_par_iter()
        .map(|k| {
            let mut rng = stream_rng(seed, k);
            (0..stream_len(random, k)).fold(None, |acc, _| pick(acc, random_reduced(&mut rng)))
        })
        .collect::<Vec<_>>();
    let (v, z) = from_grid
        .into_iter()
        .chain(from_random)
        .flatten()
        .fold(None, |acc: Option<(T, Reduced<T>)>, (v, z)| match acc {
            Some((bv, bz)) if !better(v, bv) => Some((bv, bz)),
            _ => Some((v, z)),
        })
        .expect("non-empty sample set");
    (v, z, grid.len() + random)
}

/// Default number of random samples added to the grid.
pub const DEFAULT_RANDOM_SAMPLES: usize = 1_000_000;

/// Least admissible `γ_p`, estimated as the sampled supremum times `1 + 1e-3`.
pub fn estimate_gamma_p<T: Real>(p: T, seed: u64) -> Result<ConstantEstimate<T>> {
    estimate_gamma_p_with(p, DEFAULT_RANDOM_SAMPLES, seed)
}

pub fn estimate_gamma_p_with<T: Real>(p: T, random: usize, seed: u64) -> Result<ConstantEstimate<T>> {
    require_sub_quadratic(p)?;
    let score = |z: &Reduced<T>| {
        let (_, ny, nxy, xy) = z.norms();
        Some((nxy.powf(p) - T::one() - p * xy) / ny.powf(p))
    };
    let (raw, arg, samples) = extremum(score, random, seed, true);
    // x = 0 gives ratio exactly 1
    let raw = raw.max(T::one());
    Ok(ConstantEstimate {
        name: ConstantName::GammaP,
        exponent: p,
        kappa: None,
        value: raw * T::lit(1.0 + 1e-3),
        raw,
        samples: samples + 1,
        worst_sample: arg.sample(p, None),
    })
}

/// Largest admissible `C₁(r, κ)`, estimated as the sampled infimum times `1 - 1e-3`.
pub fn estimate_c1<T: Real>(r: T, kappa: T, seed: u64) -> Result<ConstantEstimate<T>> {
    estimate_c1_with(r, kappa, DEFAULT_RANDOM_SAMPLES, seed)
}

pub fn estimate_c1_with<T: Real>(r: T, kappa: T, random: usize, seed: u64) -> Result<ConstantEstimate<T>> {
    require_kappa(r, kappa)?;
    let score = |z: &Reduced<T>| {
        let (nx, ny, nxy, xy) = z.norms();
        let (rest, weight) = fz_parts(nx, ny, nxy, xy, r, kappa);
        (weight > T::zero()).then(|| rest / weight)
    };
    let (mut raw, arg, mut samples) = extremum(score, random, seed, false);
    if r >= T::lit(2.0) {
        // x = 0: every correction term vanishes and the ratio is 1
        raw = raw.min(T::one());
        samples += 1;
    }
    if !(raw > T::zero()) {
        return Err(LabError::Estimation(format!(
            "sampled C1({r}, {kappa}) = {raw:e} is not positive at s = {:e}, theta = {:e}",
            arg.s, arg.theta
        )));
    }
    Ok(ConstantEstimate {
        name: ConstantName::C1,
        exponent: r,
        kappa: Some(kappa),
        value: raw * T::lit(1.0 - 1e-3),
        raw,
        samples,
        worst_sample: arg.sample(r, Some(kappa)),
    })
}

/// Per-`(exponent, κ)` cache of `f64` estimates at a fixed seed.
#[derive(Debug, Default)]
pub struct EstimateCache {
    entries: Mutex<HashMap<(ConstantName, u64, u64, u64), ConstantEstimate<f64>>>,
}

impl EstimateCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn gamma_p(&self, p: f64, seed: u64) -> Result<ConstantEstimate<f64>> {
        self.get_or(ConstantName::GammaP, p, 0.0, seed, || estimate_gamma_p(p, seed))
    }

    pub fn c1(&self, r: f64, kappa: f64, seed: u64) -> Result<ConstantEstimate<f64>> {
        self.get_or(ConstantName::C1, r, kappa, seed, || estimate_c1(r, kappa, seed))
    }

    fn get_or(
        &self,
        name: ConstantName,
        e: f64,
        k: f64,
        seed: u64,
        f: impl FnOnce() -> Result<ConstantEstimate<f64>>,
    ) -> Result<ConstantEstimate<f64>> {
        let key = (name, e.to_bits(), k.to_bits(), seed);
        if let Some(hit) = self.entries.lock().expect("estimate cache poisoned").get(&key) {
            return Ok(hit.clone());
        }
        let est = f()?;
        self.entries
            .lock()
            .expect("estimate cache poisoned")
            .insert(key, est.clone());
        Ok(est)
    }

    /// All cached estimates, ordered by name, exponent and `κ`.
    pub fn snapshot(&self) -> Vec<ConstantEstimate<f64>> {
        let map = self.entries.lock().expect("estimate cache poisoned");
        let mut v: Vec<_> = map.values().cloned().collect();
        v.sort_by(|a, b| {
            (a.name as u8, a.exponent, a.kappa.unwrap_or(0.0))
                .partial_cmp(&(b.name as u8, b.exponent, b.kappa.unwrap_or(0.0)))
                .unwrap_or(std::cmp::Ordering::Equal)
        });
        v
    }
}

/// Writes `name,exponent,kappa,value,samples` rows.
pub fn write_estimates_csv<T: Real, W: Write>(w: W, estimates: &[ConstantEstimate<T>]) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(["name", "exponent", "kappa", "value", "samples"])?;
    for e in estimates {
        out.write_record([
            e.name.to_string(),
            format!("{:.17e}", e.exponent),
            e.kappa.map(|k| format!("{k:.17e}")).unwrap_or_default(),
            format!("{:.17e}", e.value),
            e.samples.to_string(),
        ])?;
    }
    out.flush()?;
    Ok(())
}

/// Which inequality a sweep checks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Inequality<T> {
    /// Upper expansion for `p ≥ 2`.
    Upper311 { p: T },
    /// Upper expansion for `1 < p < 2` with constant `gamma`.
    Upper312 { p: T, gamma: T },
    /// Lower expansion with constant `c1`.
    Lower { r: T, kappa: T, c1: T },
    /// Scalar convexity bound.
    Scalar33 { r: T },
}

impl<T: Real> Inequality<T> {
    fn exponent(&self) -> T {
        match *self {
            Self::Upper311 { p } | Self::Upper312 { p, .. } => p,
            Self::Lower { r, .. } | Self::Scalar33 { r } => r,
        }
    }

    fn margin(&self, x: &[T], y: &[T]) -> Result<T> {
        match *self {
            Self::Upper311 { p } => check_311(x, y, p),
            Self::Upper312 { p, gamma } => check_312(x, y, p, gamma),
            Self::Lower { r, kappa, c1 } => check_fz_lower(x, y, r, kappa, c1),
            Self::Scalar33 { r } => check_scalar_33(x[0], y[0], r),
        }
    }

    fn kappa(&self) -> Option<T> {
        match *self {
            Self::Lower { kappa, .. } => Some(kappa),
            _ => None,
        }
    }
}

/// Draws Gaussian `x`, `y ∈ ℝ^dim` with `y` rescaled by `10^{U(-3,3)}`
/// and counts margins below `-1e-12 (|x|+|y|)^r`.
pub fn sweep<T: Real>(ineq: Inequality<T>, dim: usize, samples: usize, seed: u64) -> Result<SweepReport<T>> {
    let dim = if matches!(ineq, Inequality::Scalar33 { .. }) { 1 } else { dim };
    if dim == 0 {
        return Err(LabError::domain("sample dimension must be positive"));
    }
    let r = ineq.exponent();
    let tol = T::lit(VIOLATION_TOL);
    let parts = (0..SWEEP_STREAMS)
        .into_par_iter()
        .map(|k| -> Result<(usize, Option<(T, Vec<T>, Vec<T>)>)> {
            let mut rng = stream_rng(seed, k);
            let mut violations = 0;
            let mut worst: Option<(T, Vec<T>, Vec<T>)> = None;
            for _ in 0..stream_len(samples, k) {
                let x: Vec<T> = (0..dim).map(|_| T::lit(rng.sample::<f64, _>(StandardNormal))).collect();
                let scale = T::lit(10f64.powf(rng.gen_range(-3.0..=3.0)));
                let y: Vec<T> = (0..dim)
                    .map(|_| T::lit(rng.sample::<f64, _>(StandardNormal)) * scale)
                    .collect();
                let m = ineq.margin(&x, &y)? / (norm(&x) + norm(&y)).powf(r);
                if m < -tol {
                    violations += 1;
                }
                if worst.as_ref().map_or(true, |w| m < w.0) {
                    worst = Some((m, x, y));
                }
            }
            Ok((violations, worst))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut violations = 0;
    let mut worst: Option<(T, Vec<T>, Vec<T>)> = None;
    for (v, w) in parts {
        violations += v;
        if let Some(w) = w {
            if worst.as_ref().map_or(true, |b| w.0 < b.0) {
                worst = Some(w);
            }
        }
    }
    Ok(SweepReport {
        samples,
        violations,
        min_normalized_margin: worst.as_ref().map_or(T::infinity(), |w| w.0),
        worst_sample: worst.map(|(_, x, y)| VectorSample {
            x,
            y,
            exponent: r,
            kappa: ineq.kappa(),
        }),
    })
}
