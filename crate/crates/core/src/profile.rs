//! Radial profiles: the single function representation every operation consumes.

use std::fmt;
use std::io::{BufRead, Write};
use std::sync::Arc;

use serde::Serialize;

use crate::error::{LabError, Result};
use crate::params::{sphere_measure, Params};
use crate::scalar::Real;

type RadialMap<T> = Arc<dyn Fn(T) -> T + Send + Sync>;

/// Provenance tag of a profile.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProfileKind {
    AnalyticBubble,
    TruncatedBubble,
    BubblePlusPerturbation,
    /// Closed-form profile that is not built from a bubble (bumps, plateaus).
    Smooth,
    Sampled,
}

impl fmt::Display for ProfileKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Self::AnalyticBubble => "analytic-bubble",
            Self::TruncatedBubble => "truncated-bubble",
            Self::BubblePlusPerturbation => "bubble-plus-perturbation",
            Self::Smooth => "smooth",
            Self::Sampled => "sampled",
        };
        f.write_str(s)
    }
}

/// An evaluable radial function `r ↦ u(r)` on `[0, ∞)` with its radial derivative.
///
/// Values and derivatives vanish for `r >= support_radius`. `breakpoints`
/// lists radii where the derivative may fail to be smooth, or where the
/// profile changes scale; quadrature splits there.
#[derive(Clone)]
pub struct RadialProfile<T> {
    value: RadialMap<T>,
    derivative: RadialMap<T>,
    support_radius: T,
    kind: ProfileKind,
    breakpoints: Vec<T>,
    grid: Option<Arc<SampledProfile<T>>>,
}

impl<T: Real> fmt::Debug for RadialProfile<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("RadialProfile")
            .field("kind", &self.kind)
            .field("support_radius", &self.support_radius)
            .field("breakpoints", &self.breakpoints.len())
            .finish()
    }
}

impl<T: Real> RadialProfile<T> {
    /// Builds a profile from closed-form value and derivative maps.
    pub fn from_fns<V, D>(value: V, derivative: D, support_radius: T, kind: ProfileKind) -> Self
    where
        V: Fn(T) -> T + Send + Sync + 'static,
        D: Fn(T) -> T + Send + Sync + 'static,
    {
        Self {
            value: Arc::new(value),
            derivative: Arc::new(derivative),
            support_radius,
            kind,
            breakpoints: Vec::new(),
            grid: None,
        }
    }

    pub fn with_breakpoints(mut self, points: impl IntoIterator<Item = T>) -> Self {
        self.breakpoints.extend(points);
        self.normalize_breakpoints();
        self
    }

    pub fn with_kind(mut self, kind: ProfileKind) -> Self {
        self.kind = kind;
        self
    }

    fn normalize_breakpoints(&mut self) {
        let support = self.support_radius;
        self.breakpoints
            .retain(|b| b.is_finite() && *b > T::zero() && *b < support);
        self.breakpoints
            .sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
        self.breakpoints.dedup();
    }

    /// Constant `c` on the ball `B_R`, zero outside.
    pub fn constant(c: T, radius: T) -> Self {
        Self::from_fns(move |_| c, |_| T::zero(), radius, ProfileKind::Smooth)
    }

    pub fn value(&self, r: T) -> T {
        if r >= self.support_radius {
            T::zero()
        } else {
            (self.value)(r)
        }
    }

    pub fn derivative(&self, r: T) -> T {
        if r >= self.support_radius {
            T::zero()
        } else {
            (self.derivative)(r)
        }
    }

    pub fn support_radius(&self) -> T {
        self.support_radius
    }

    pub fn kind(&self) -> ProfileKind {
        self.kind
    }

    pub fn breakpoints(&self) -> &[T] {
        &self.breakpoints
    }

    /// Node data of a sampled profile.
    pub fn sampled(&self) -> Option<&SampledProfile<T>> {
        self.grid.as_deref()
    }

    /// Radius grid of a sampled profile.
    pub fn grid(&self) -> Option<&[T]> {
        self.grid.as_deref().map(|g| g.radii())
    }

    /// `α u`.
    pub fn scaled(&self, alpha: T) -> Self {
        let v = self.value.clone();
        let d = self.derivative.clone();
        Self {
            value: Arc::new(move |r| alpha * v(r)),
            derivative: Arc::new(move |r| alpha * d(r)),
            support_radius: self.support_radius,
            kind: self.kind,
            breakpoints: self.breakpoints.clone(),
            grid: None,
        }
    }

    /// `a u + b v`.
    pub fn combine(a: T, u: &Self, b: T, v: &Self, kind: ProfileKind) -> Self {
        let (uv, ud, us) = (u.value.clone(), u.derivative.clone(), u.support_radius);
        let (vv, vd, vs) = (v.value.clone(), v.derivative.clone(), v.support_radius);
        let value = move |r: T| {
            let mut s = T::zero();
            if r < us {
                s = s + a * uv(r);
            }
            if r < vs {
                s = s + b * vv(r);
            }
            s
        };
        let derivative = move |r: T| {
            let mut s = T::zero();
            if r < us {
                s = s + a * ud(r);
            }
            if r < vs {
                s = s + b * vd(r);
            }
            s
        };
        let support = us.max(vs);
        let mut breaks: Vec<T> = u.breakpoints.iter().chain(v.breakpoints.iter()).copied().collect();
        if us < support {
            breaks.push(us);
        }
        if vs < support {
            breaks.push(vs);
        }
        Self::from_fns(value, derivative, support, kind).with_breakpoints(breaks)
    }

    /// `u(r/t)·t^{-(N-p)/p}` on `B_{tR}`: the dilation preserving both
    /// `‖∇u‖_p` and `‖u‖_{p*}`.
    pub fn dilated(&self, params: &Params<T>, t: T) -> Self {
        let a = params.scaling_exponent();
        let amp = t.powf(-a);
        let v = self.value.clone();
        let d = self.derivative.clone();
        let support = self.support_radius * t;
        Self::from_fns(
            move |r| amp * v(r / t),
            move |r| amp / t * d(r / t),
            support,
            self.kind,
        )
        .with_breakpoints(self.breakpoints.iter().map(|b| *b * t).collect::<Vec<_>>())
    }

    /// Profile backed by sampled nodes.
    pub fn from_samples(samples: SampledProfile<T>) -> Self {
        let s = Arc::new(samples);
        let (sv, sd) = (s.clone(), s.clone());
        let support = s.support_radius();
        let mut out = Self::from_fns(move |r| sv.eval(r), move |r| sv_deriv(&sd, r), support, ProfileKind::Sampled)
            .with_breakpoints(s.radii().to_vec());
        out.grid = Some(s);
        out
    }

    /// Samples the profile on `n` uniformly spaced radii in `[0, R]`.
    pub fn sample_uniform(&self, n: usize, radius: T) -> Result<SampledProfile<T>> {
        if n < 2 || !radius.is_finite() || radius <= T::zero() {
            return Err(LabError::domain("sampling needs n >= 2 and a finite positive radius"));
        }
        let h = radius / T::from_usize_lossy(n - 1);
        let r: Vec<T> = (0..n).map(|i| T::from_usize_lossy(i) * h).collect();
        let v = r.iter().map(|&x| self.value(x)).collect();
        let d = r.iter().map(|&x| self.derivative(x)).collect();
        SampledProfile::with_slopes(r, v, d, radius)
    }

    /// Grid used to scan the profile for sign and monotonicity checks:
    /// dense uniform nodes on the support plus every breakpoint.
    pub fn scan_grid(&self, radius: T, n: usize) -> Vec<T> {
        let top = radius.min(self.support_radius);
        let mut pts: Vec<T> = (0..=n)
            .map(|i| top * T::from_usize_lossy(i) / T::from_usize_lossy(n))
            .collect();
        pts.extend(self.breakpoints.iter().copied().filter(|b| *b <= top));
        if let Some(g) = self.grid() {
            pts.extend(g.iter().copied().filter(|b| *b <= top));
        }
        pts.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
        pts.dedup();
        pts
    }

    /// `true` if the profile is nonincreasing on the scan grid (with slack `tol·max|u|`).
    pub fn is_radially_decreasing(&self, radius: T, tol: T) -> bool {
        let grid = self.scan_grid(radius, 4096);
        let vals: Vec<T> = grid.iter().map(|&r| self.value(r)).collect();
        let scale = vals.iter().fold(T::zero(), |m, v| m.max(v.abs()));
        vals.windows(2).all(|w| w[1] <= w[0] + tol * scale)
    }

    /// Smallest value on the scan grid.
    pub fn min_on_grid(&self, radius: T) -> T {
        self.scan_grid(radius, 4096)
            .into_iter()
            .map(|r| self.value(r))
            .fold(T::infinity(), T::min)
    }
}

fn sv_deriv<T: Real>(s: &SampledProfile<T>, r: T) -> T {
    s.eval_derivative(r)
}

/// A centered ball `B_R` (or the whole space when `R = ∞`).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DomainBall<T> {
    pub radius: T,
    /// Lebesgue measure `|B_R|`.
    pub measure: T,
}

impl<T: Real> DomainBall<T> {
    pub fn new(n: usize, radius: T) -> Result<Self> {
        if radius.is_nan() || radius <= T::zero() {
            return Err(LabError::domain(format!("ball radius must be positive (got {radius})")));
        }
        let measure = sphere_measure::<T>(n) * radius.powi(n as i32) / T::from_usize_lossy(n);
        Ok(Self { radius, measure })
    }

    pub fn whole_space() -> Self {
        Self {
            radius: T::infinity(),
            measure: T::infinity(),
        }
    }

    pub fn is_bounded(&self) -> bool {
        self.radius.is_finite()
    }

    /// Measure of the ball of radius `r` in dimension `n`.
    pub fn ball_measure(n: usize, r: T) -> T {
        sphere_measure::<T>(n) * r.powi(n as i32) / T::from_usize_lossy(n)
    }
}

/// Piecewise cubic Hermite interpolant on a strictly increasing radius grid.
///
/// Slopes are either supplied or computed with the Fritsch–Carlson
/// construction; in both cases they are limited so that monotone data stay
/// monotone between nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct SampledProfile<T> {
    r: Vec<T>,
    v: Vec<T>,
    d: Vec<T>,
    support: T,
}

impl<T: Real> SampledProfile<T> {
    /// Interpolant with Fritsch–Carlson slopes.
    pub fn new(r: Vec<T>, v: Vec<T>, support: T) -> Result<Self> {
        Self::check_grid(&r, &v, support)?;
        let d = pchip_slopes(&r, &v);
        Ok(Self { r, v, d, support })
    }

    /// Interpolant with caller-supplied node slopes, limited for monotonicity.
    pub fn with_slopes(r: Vec<T>, v: Vec<T>, mut d: Vec<T>, support: T) -> Result<Self> {
        Self::check_grid(&r, &v, support)?;
        if d.len() != r.len() {
            return Err(LabError::domain("slope column length differs from radius column"));
        }
        limit_slopes(&r, &v, &mut d);
        Ok(Self { r, v, d, support })
    }

    fn check_grid(r: &[T], v: &[T], support: T) -> Result<()> {
        if r.len() < 2 || r.len() != v.len() {
            return Err(LabError::domain("sampled profile needs >= 2 nodes and matching columns"));
        }
        if r[0] < T::zero() {
            return Err(LabError::domain("radii must be nonnegative"));
        }
        if r.windows(2).any(|w| w[1] <= w[0]) {
            return Err(LabError::domain("radius grid must be strictly increasing"));
        }
        if r.iter().chain(v.iter()).any(|x| !x.is_finite()) {
            return Err(LabError::domain("sampled profile contains non-finite entries"));
        }
        if support < r[r.len() - 1] {
            return Err(LabError::domain("support radius smaller than the last node"));
        }
        Ok(())
    }

    pub fn radii(&self) -> &[T] {
        &self.r
    }

    pub fn values(&self) -> &[T] {
        &self.v
    }

    pub fn slopes(&self) -> &[T] {
        &self.d
    }

    pub fn support_radius(&self) -> T {
        self.support
    }

    fn locate(&self, r: T) -> Option<usize> {
        let n = self.r.len();
        if r < self.r[0] || r > self.r[n - 1] {
            return None;
        }
        let idx = self.r.partition_point(|&x| x <= r);
        Some(idx.saturating_sub(1).min(n - 2))
    }

    pub fn eval(&self, r: T) -> T {
        if r < self.r[0] {
            return self.v[0];
        }
        let Some(k) = self.locate(r) else {
            return T::zero();
        };
        let h = self.r[k + 1] - self.r[k];
        let t = (r - self.r[k]) / h;
        let t2 = t * t;
        let t3 = t2 * t;
        let two = T::lit(2.0);
        let three = T::lit(3.0);
        let h00 = two * t3 - three * t2 + T::one();
        let h10 = t3 - two * t2 + t;
        let h01 = three * t2 - two * t3;
        let h11 = t3 - t2;
        h00 * self.v[k] + h10 * h * self.d[k] + h01 * self.v[k + 1] + h11 * h * self.d[k + 1]
    }

    pub fn eval_derivative(&self, r: T) -> T {
        let Some(k) = self.locate(r) else {
            return T::zero();
        };
        let h = self.r[k + 1] - self.r[k];
        let t = (r - self.r[k]) / h;
        let t2 = t * t;
        let six = T::lit(6.0);
        let dh00 = six * t2 - six * t;
        let dh10 = T::lit(3.0) * t2 - T::lit(4.0) * t + T::one();
        let dh01 = six * t - six * t2;
        let dh11 = T::lit(3.0) * t2 - T::lit(2.0) * t;
        (dh00 * self.v[k] + dh01 * self.v[k + 1]) / h + dh10 * self.d[k] + dh11 * self.d[k + 1]
    }

    /// Reads a two- or three-column CSV (radius, value[, derivative]) whose
    /// first line is `# N=<n> p=<p> R=<r>`.
    pub fn read_csv<R: BufRead>(reader: R) -> Result<(CsvHeader<T>, Self)> {
        let mut lines = reader.lines();
        let header_line = loop {
            match lines.next() {
                Some(l) => {
                    let l = l?;
                    if !l.trim().is_empty() {
                        break l;
                    }
                }
                None => return Err(LabError::Parse("empty profile file".into())),
            }
        };
        let header = CsvHeader::<T>::parse(&header_line)?;
        let body: String = lines.collect::<std::result::Result<Vec<_>, _>>()?.join("\n");
        let mut rdr = csv::ReaderBuilder::new()
            .has_headers(false)
            .comment(Some(b'#'))
            .trim(csv::Trim::All)
            .flexible(true)
            .from_reader(body.as_bytes());
        let (mut r, mut v, mut d) = (Vec::new(), Vec::new(), Vec::new());
        let mut with_slopes: Option<bool> = None;
        for (i, rec) in rdr.records().enumerate() {
            let rec = rec?;
            let parse = |j: usize| -> Result<T> {
                let s = rec.get(j).ok_or_else(|| LabError::Parse(format!("row {i}: missing column {j}")))?;
                let x: f64 = s
                    .parse()
                    .map_err(|_| LabError::Parse(format!("row {i}: cannot parse '{s}'")))?;
                Ok(T::lit(x))
            };
            let cols = rec.len();
            if !(2..=3).contains(&cols) {
                return Err(LabError::Parse(format!("row {i}: expected 2 or 3 columns, got {cols}")));
            }
            let has = cols == 3;
            match with_slopes {
                None => with_slopes = Some(has),
                Some(prev) if prev != has => {
                    return Err(LabError::Parse(format!("row {i}: inconsistent column count")))
                }
                _ => {}
            }
            r.push(parse(0)?);
            v.push(parse(1)?);
            if has {
                d.push(parse(2)?);
            }
        }
        let last = r.last().copied().unwrap_or(T::zero());
        let support = header.radius.max(last);
        let s = if with_slopes == Some(true) {
            Self::with_slopes(r, v, d, support)?
        } else {
            Self::new(r, v, support)?
        };
        Ok((header, s))
    }

    /// Writes the profile as three-column CSV with a `# N= p= R=` header.
    pub fn write_csv<W: Write>(&self, mut w: W, n: usize, p: T) -> Result<()> {
        writeln!(w, "# N={} p={:e} R={:e}", n, p, self.support)?;
        for i in 0..self.r.len() {
            writeln!(w, "{:.17e},{:.17e},{:.17e}", self.r[i].as_f64(), self.v[i].as_f64(), self.d[i].as_f64())?;
        }
        Ok(())
    }
}

/// Header line of a profile CSV.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CsvHeader<T> {
    pub n: usize,
    pub p: T,
    pub radius: T,
}

impl<T: Real> CsvHeader<T> {
    pub fn parse(line: &str) -> Result<Self> {
        let body = line
            .trim()
            .strip_prefix('#')
            .ok_or_else(|| LabError::Parse("header must start with '#'".into()))?;
        let (mut n, mut p, mut radius) = (None, None, None);
        for tok in body.split_whitespace() {
            let (k, v) = tok
                .split_once('=')
                .ok_or_else(|| LabError::Parse(format!("malformed header token '{tok}'")))?;
            let bad = || LabError::Parse(format!("cannot parse header value '{v}'"));
            match k {
                "N" => n = Some(v.parse::<usize>().map_err(|_| bad())?),
                "p" => p = Some(T::lit(v.parse::<f64>().map_err(|_| bad())?)),
                "R" => radius = Some(T::lit(v.parse::<f64>().map_err(|_| bad())?)),
                _ => return Err(LabError::Parse(format!("unknown header key '{k}'"))),
            }
        }
        match (n, p, radius) {
            (Some(n), Some(p), Some(radius)) => Ok(Self { n, p, radius }),
            _ => Err(LabError::Parse("header needs N=, p= and R=".into())),
        }
    }
}

fn pchip_slopes<T: Real>(r: &[T], v: &[T]) -> Vec<T> {
    let n = r.len();
    let delta: Vec<T> = (0..n - 1).map(|k| (v[k + 1] - v[k]) / (r[k + 1] - r[k])).collect();
    let mut d = vec![T::zero(); n];
    if n == 2 {
        d[0] = delta[0];
        d[1] = delta[0];
        return d;
    }
    for k in 1..n - 1 {
        let (a, b) = (delta[k - 1], delta[k]);
        if a * b <= T::zero() {
            d[k] = T::zero();
        } else {
            let h0 = r[k] - r[k - 1];
            let h1 = r[k + 1] - r[k];
            let w1 = T::lit(2.0) * h1 + h0;
            let w2 = h1 + T::lit(2.0) * h0;
            d[k] = (w1 + w2) / (w1 / a + w2 / b);
        }
    }
    d[0] = end_slope(r[1] - r[0], r[2] - r[1], delta[0], delta[1]);
    d[n - 1] = end_slope(r[n - 1] - r[n - 2], r[n - 2] - r[n - 3], delta[n - 2], delta[n - 3]);
    d
}

fn end_slope<T: Real>(h0: T, h1: T, d0: T, d1: T) -> T {
    let s = ((T::lit(2.0) * h0 + h1) * d0 - h0 * d1) / (h0 + h1);
    if s.signum() != d0.signum() {
        T::zero()
    } else if d0.signum() != d1.signum() && s.abs() > (T::lit(3.0) * d0).abs() {
        T::lit(3.0) * d0
    } else {
        s
    }
}

/// Fritsch–Carlson limiter applied to given node slopes.
fn limit_slopes<T: Real>(r: &[T], v: &[T], d: &mut [T]) {
    for k in 0..r.len() - 1 {
        let delta = (v[k + 1] - v[k]) / (r[k + 1] - r[k]);
        if delta == T::zero() {
            d[k] = T::zero();
            d[k + 1] = T::zero();
            continue;
        }
        // slopes of the wrong sign would create an interior extremum
        if d[k] * delta < T::zero() {
            d[k] = T::zero();
        }
        if d[k + 1] * delta < T::zero() {
            d[k + 1] = T::zero();
        }
        let a = d[k] / delta;
        let b = d[k + 1] / delta;
        let s = a * a + b * b;
        let nine = T::lit(9.0);
        if s > nine {
            let tau = T::lit(3.0) / s.sqrt();
            d[k] = tau * a * delta;
            d[k + 1] = tau * b * delta;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn support_cuts_values() {
        let u = RadialProfile::<f64>::constant(2.0, 1.0);
        assert_eq!(u.value(0.5), 2.0);
        assert_eq!(u.value(1.0), 0.0);
        assert_eq!(u.value(3.0), 0.0);
    }

    #[test]
    fn ball_measure_matches_radius() {
        let b = DomainBall::<f64>::new(3, 2.0).unwrap();
        assert_relative_eq!(b.measure, 4.0 / 3.0 * std::f64::consts::PI * 8.0, max_relative = 1e-12);
        assert!(DomainBall::<f64>::new(3, -1.0).is_err());
        assert!(!DomainBall::<f64>::whole_space().is_bounded());
    }

    #[test]
    fn hermite_reproduces_cubics_with_exact_slopes() {
        let f = |x: f64| 1.0 - x * x * x;
        let df = |x: f64| -3.0 * x * x;
        let r: Vec<f64> = (0..11).map(|i| i as f64 * 0.1).collect();
        let s = SampledProfile::with_slopes(
            r.clone(),
            r.iter().map(|&x| f(x)).collect(),
            r.iter().map(|&x| df(x)).collect(),
            1.0,
        )
        .unwrap();
        for x in [0.03, 0.47, 0.999] {
            assert_relative_eq!(s.eval(x), f(x), epsilon = 1e-14);
            assert_relative_eq!(s.eval_derivative(x), df(x), epsilon = 1e-12);
        }
    }

    #[test]
    fn pchip_is_monotone_on_monotone_data() {
        let r = vec![0.0, 0.1, 0.2, 1.0, 1.05, 2.0];
        let v = vec![5.0, 4.9, 4.0, 3.99, 1.0, 0.0];
        let s = SampledProfile::new(r, v, 2.0).unwrap();
        let mut prev = f64::INFINITY;
        for i in 0..=2000 {
            let x = i as f64 * 1e-3;
            let y = s.eval(x);
            assert!(y <= prev + 1e-13, "non-monotone at {x}");
            prev = y;
        }
    }

    #[test]
    fn rejects_bad_grids() {
        assert!(SampledProfile::new(vec![0.0, 0.0], vec![1.0, 1.0], 1.0).is_err());
        assert!(SampledProfile::new(vec![0.0], vec![1.0], 1.0).is_err());
        assert!(SampledProfile::new(vec![0.0, 1.0], vec![1.0, f64::NAN], 1.0).is_err());
    }

    #[test]
    fn csv_round_trip_and_header() {
        let r: Vec<f64> = (0..5).map(|i| i as f64 * 0.25).collect();
        let v: Vec<f64> = r.iter().map(|x| 1.0 - x * x).collect();
        let s = SampledProfile::new(r, v, 1.0).unwrap();
        let mut buf = Vec::new();
        s.write_csv(&mut buf, 3, 2.0).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("# N=3 p=2e0 R=1e0"));
        let (h, back) = SampledProfile::<f64>::read_csv(&buf[..]).unwrap();
        assert_eq!(h.n, 3);
        assert_eq!(h.p, 2.0);
        assert_eq!(back.radii(), s.radii());
        assert_eq!(back.values(), s.values());
    }

    #[test]
    fn csv_two_columns_and_errors() {
        let ok = "# N=4 p=2.5 R=1\n0,1\n0.5,0.5\n1,0\n";
        let (h, s) = SampledProfile::<f64>::read_csv(ok.as_bytes()).unwrap();
        assert_eq!(h.n, 4);
        assert_eq!(s.radii().len(), 3);
        assert!(SampledProfile::<f64>::read_csv("0,1\n1,0\n".as_bytes()).is_err());
        assert!(SampledProfile::<f64>::read_csv("# N=3 p=2\n0,1\n1,0\n".as_bytes()).is_err());
        assert!(SampledProfile::<f64>::read_csv("# N=3 p=2 R=1\n0,1\n1,x\n".as_bytes()).is_err());
    }

    #[test]
    fn combine_tracks_supports() {
        let a = RadialProfile::<f64>::constant(1.0, 1.0);
        let b = RadialProfile::<f64>::constant(2.0, 2.0);
        let c = RadialProfile::combine(1.0, &a, 0.5, &b, ProfileKind::Smooth);
        assert_eq!(c.support_radius(), 2.0);
        assert_eq!(c.value(0.5), 2.0);
        assert_eq!(c.value(1.5), 1.0);
        assert_eq!(c.breakpoints(), &[1.0]);
    }
}
