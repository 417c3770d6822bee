//! Globally adaptive 21-point Gauss–Kronrod quadrature.
//!
//! Integration ranges are given as an ascending list of breakpoints. The last
//! breakpoint may be `+∞`; that piece is mapped onto `[0,1)` by
//! `r = a(1-t)^{-k}`. The exponent `k` is chosen from the observed algebraic
//! decay `f ~ r^{-α}` so that the mapped integrand vanishes linearly at
//! `t = 1`; slowly decaying radial tails would otherwise leave an endpoint
//! singularity.

use crate::error::{LabError, Result};
use crate::scalar::Real;

const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_208_745_780_490,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

// 10-point Gauss weights for the odd-indexed Kronrod nodes.
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

/// Tolerances and evaluation budget of the adaptive integrator.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadConfig<T> {
    /// Target error relative to `∫|f|`.
    pub rel_tol: T,
    /// Absolute error floor.
    pub abs_tol: T,
    /// Hard cap on integrand evaluations.
    pub max_evals: usize,
    /// Return the best estimate instead of an error once subdivision stops
    /// paying off (roundoff-limited integrands such as `|u' - v'|^p` with
    /// `u ≈ v`).
    pub accept_roundoff: bool,
}

impl<T: Real> Default for QuadConfig<T> {
    fn default() -> Self {
        Self {
            rel_tol: T::lit(T::QUAD_REL_TOL),
            abs_tol: T::lit(1e-300).max(T::min_positive_value()),
            max_evals: 1_000_000,
            accept_roundoff: false,
        }
    }
}

/// Value of an integral with its error estimate.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral<T> {
    pub value: T,
    pub error: T,
    /// `∫|f|` as estimated by the Kronrod rule.
    pub abs_value: T,
    pub evals: usize,
}

#[derive(Clone, Copy)]
struct Segment<T> {
    a: T,
    b: T,
    /// `true` for the piece living in the mapped variable `t`.
    mapped: bool,
    value: T,
    error: T,
    abs_value: T,
    frozen: bool,
}

impl<T: Real> QuadConfig<T> {
    pub fn with_rel_tol(rel_tol: T) -> Self {
        Self {
            rel_tol,
            ..Self::default()
        }
    }

    /// Same budget, tolerance scaled by `factor`.
    pub fn scaled(&self, factor: T) -> Self {
        Self {
            rel_tol: self.rel_tol * factor,
            ..*self
        }
    }

    /// `∫_a^b f`, `b` may be `+∞`.
    pub fn integrate<F>(&self, f: F, a: T, b: T) -> Result<Integral<T>>
    where
        F: Fn(T) -> T,
    {
        self.integrate_pieces(f, &[a, b])
    }

    /// Integral over `[points[0], points[last]]`, splitting at every interior
    /// point. Points must be ascending; only the last one may be infinite.
    pub fn integrate_pieces<F>(&self, f: F, points: &[T]) -> Result<Integral<T>>
    where
        F: Fn(T) -> T,
    {
        if points.len() < 2 {
            return Err(LabError::domain("integration needs at least two breakpoints"));
        }
        let mut pts: Vec<T> = Vec::with_capacity(points.len() + 1);
        for &x in points {
            if x.is_nan() {
                return Err(LabError::domain("NaN breakpoint"));
            }
            if let Some(&last) = pts.last() {
                if x < last {
                    return Err(LabError::domain("breakpoints must be ascending"));
                }
                if x == last {
                    continue;
                }
            }
            pts.push(x);
        }
        if pts.len() < 2 {
            return Ok(Integral {
                value: T::zero(),
                error: T::zero(),
                abs_value: T::zero(),
                evals: 0,
            });
        }
        if pts[..pts.len() - 1].iter().any(|x| x.is_infinite()) {
            return Err(LabError::domain("only the last breakpoint may be infinite"));
        }

        let infinite = pts.last().is_some_and(|x| x.is_infinite());
        // The mapped piece starts at a positive anchor so that r = a/(1-t) is valid.
        let anchor = if infinite {
            let start = pts[pts.len() - 2];
            if start > T::zero() {
                start
            } else {
                let anchor = T::one();
                let n = pts.len();
                pts.insert(n - 1, anchor);
                anchor
            }
        } else {
            T::zero()
        };

        let k = if infinite { tail_map_exponent(&f, anchor) } else { T::one() };
        let eval = |seg_mapped: bool, x: T| -> T {
            if seg_mapped {
                let one_minus = T::one() - x;
                let r = anchor * one_minus.powf(-k);
                let jac = k * r / one_minus;
                if !r.is_finite() || !jac.is_finite() {
                    return T::zero();
                }
                let v = f(r);
                if v == T::zero() {
                    T::zero()
                } else {
                    v * jac
                }
            } else {
                f(x)
            }
        };

        let mut segments: Vec<Segment<T>> = Vec::new();
        let mut evals = 0usize;
        let n_pieces = pts.len() - 1;
        for i in 0..n_pieces {
            let mapped = infinite && i == n_pieces - 1;
            let (a, b) = if mapped { (T::zero(), T::one()) } else { (pts[i], pts[i + 1]) };
            let (value, error, abs_value) = kronrod21(|x| eval(mapped, x), a, b);
            evals += 21;
            segments.push(Segment {
                a,
                b,
                mapped,
                value,
                error,
                abs_value,
                frozen: false,
            });
        }

        let mut roundoff_hits = 0usize;
        loop {
            let total: T = segments.iter().map(|s| s.value).sum();
            let total_err: T = segments.iter().map(|s| s.error).sum();
            let total_abs: T = segments.iter().map(|s| s.abs_value).sum();
            let target = self.abs_tol.max(self.rel_tol * total_abs);
            if !total.is_finite() {
                return Err(LabError::Numeric {
                    what: "integrand produced a non-finite value".into(),
                    achieved: f64::INFINITY,
                    target: self.rel_tol.as_f64(),
                });
            }
            if total_err <= target {
                return Ok(Integral {
                    value: total,
                    error: total_err,
                    abs_value: total_abs,
                    evals,
                });
            }
            let worst = segments
                .iter()
                .enumerate()
                .filter(|(_, s)| !s.frozen)
                .max_by(|x, y| x.1.error.partial_cmp(&y.1.error).unwrap_or(std::cmp::Ordering::Equal))
                .map(|(i, _)| i);
            let achieved = if total_abs > T::zero() { total_err / total_abs } else { total_err };
            let Some(idx) = worst else {
                // Every remaining segment is at the resolution limit: roundoff bound.
                log::debug!("quadrature stopped at resolution limit, rel err {achieved:e}");
                return Ok(Integral {
                    value: total,
                    error: total_err,
                    abs_value: total_abs,
                    evals,
                });
            };
            if self.accept_roundoff && (roundoff_hits >= 20 || evals + 42 > self.max_evals) {
                log::trace!("quadrature accepted at roundoff level, rel err {achieved:e}");
                return Ok(Integral {
                    value: total,
                    error: total_err,
                    abs_value: total_abs,
                    evals,
                });
            }
            if evals + 42 > self.max_evals {
                return Err(LabError::Numeric {
                    what: format!("adaptive quadrature hit the {} evaluation cap", self.max_evals),
                    achieved: achieved.as_f64(),
                    target: self.rel_tol.as_f64(),
                });
            }
            let seg = segments[idx];
            let mid = (seg.a + seg.b) * T::lit(0.5);
            let width = seg.b - seg.a;
            if width <= T::epsilon() * T::lit(64.0) * seg.a.abs().max(seg.b.abs()).max(T::min_positive_value())
                || mid <= seg.a
                || mid >= seg.b
            {
                segments[idx].frozen = true;
                continue;
            }
            let (v1, e1, a1) = kronrod21(|x| eval(seg.mapped, x), seg.a, mid);
            let (v2, e2, a2) = kronrod21(|x| eval(seg.mapped, x), mid, seg.b);
            evals += 42;
            if e1 + e2 >= T::lit(0.99) * seg.error && (v1 + v2 - seg.value).abs() <= T::lit(1e-5) * (v1 + v2).abs() {
                roundoff_hits += 1;
            }
            segments[idx] = Segment {
                b: mid,
                value: v1,
                error: e1,
                abs_value: a1,
                ..seg
            };
            segments.push(Segment {
                a: mid,
                value: v2,
                error: e2,
                abs_value: a2,
                ..seg
            });
        }
    }
}

/// `k = 2/(α-1)` clamped to `[1, 40]`, with `α` estimated from two far samples.
fn tail_map_exponent<T: Real, F: Fn(T) -> T>(f: &F, anchor: T) -> T {
    let (r1, r2) = (anchor * T::lit(1e3), anchor * T::lit(1e6));
    let (f1, f2) = (f(r1).abs(), f(r2).abs());
    if !(f1 > T::zero() && f2 > T::zero()) || !f1.is_finite() || !f2.is_finite() {
        return T::one();
    }
    let alpha = -(f2 / f1).ln() / (r2 / r1).ln();
    if !(alpha > T::one()) {
        return T::one();
    }
    (T::lit(2.0) / (alpha - T::one())).max(T::one()).min(T::lit(40.0))
}

/// One 21-point Kronrod panel: (integral, error estimate, ∫|f|).
fn kronrod21<T: Real, F: Fn(T) -> T>(f: F, a: T, b: T) -> (T, T, T) {
    let half = T::lit(0.5);
    let center = half * (a + b);
    let half_len = half * (b - a);
    let abs_half = half_len.abs();

    let fc = f(center);
    let mut res_k = fc * T::lit(WGK[10]);
    let mut res_g = T::zero();
    let mut res_abs = res_k.abs();
    let mut fv1 = [T::zero(); 10];
    let mut fv2 = [T::zero(); 10];

    for j in 0..10 {
        let dx = half_len * T::lit(XGK[j]);
        let f1 = f(center - dx);
        let f2 = f(center + dx);
        fv1[j] = f1;
        fv2[j] = f2;
        let wk = T::lit(WGK[j]);
        res_k = res_k + wk * (f1 + f2);
        res_abs = res_abs + wk * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g = res_g + T::lit(WG[j / 2]) * (f1 + f2);
        }
    }

    let mean = res_k * half;
    let mut res_asc = T::lit(WGK[10]) * (fc - mean).abs();
    for j in 0..10 {
        res_asc = res_asc + T::lit(WGK[j]) * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }

    let result = res_k * half_len;
    let res_abs = res_abs * abs_half;
    let res_asc = res_asc * abs_half;
    let mut err = ((res_k - res_g) * half_len).abs();

    if res_asc != T::zero() && err != T::zero() {
        let scale = (T::lit(200.0) * err / res_asc).powf(T::lit(1.5));
        err = if scale < T::one() { res_asc * scale } else { res_asc };
    }
    let floor = T::lit(50.0) * T::epsilon() * res_abs;
    if res_abs > T::min_positive_value() / (T::lit(50.0) * T::epsilon()) && floor > err {
        err = floor;
    }
    (result, err, res_abs)
}
