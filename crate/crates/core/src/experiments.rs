//! Profile families, sharpness slope fits and empirical-constant scans.

use std::fs::File;
use std::io::BufReader;
use std::path::PathBuf;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

use crate::bubble::BubbleSpec;
use crate::deficit::{
    deficit_from_norms, lemma21_check, ON_MANIFOLD_TOL, proof_constants, remainder_cor12, thm13_cap_from, ProofConstants,
};
use crate::error::{LabError, Result};
use crate::lab::Lab;
use crate::norms::{grad_lp_norm, lq_norm};
use crate::params::Params;
use crate::profile::{DomainBall, ProfileKind, RadialProfile, SampledProfile};
use crate::projection::{make_orthogonal_perturbation, project};
use crate::report::ScanRow;
use crate::scalar::Real;
use crate::weak::weak_norm;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum FamilyKind {
    /// `(U_λ - U_λ(R))_+` on `B_R`, normalized to unit `L^{p*}` norm.
    TruncatedBubble,
    /// `U_λ + ε w` with `w` orthogonal to the manifold at `U_λ`.
    PerturbedBubble,
    /// `1` on `B_{R(1-ε)}`, smooth quintic decay to `0` at `R`, normalized.
    Plateau,
    /// Sampled profiles read from CSV files.
    CustomCsv,
}

impl std::fmt::Display for FamilyKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Self::TruncatedBubble => "truncated-bubble",
            Self::PerturbedBubble => "perturbed-bubble",
            Self::Plateau => "plateau",
            Self::CustomCsv => "custom-csv",
        })
    }
}

impl std::str::FromStr for FamilyKind {
    type Err = LabError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "truncated-bubble" => Ok(Self::TruncatedBubble),
            "perturbed-bubble" => Ok(Self::PerturbedBubble),
            "plateau" => Ok(Self::Plateau),
            "custom-csv" => Ok(Self::CustomCsv),
            _ => Err(LabError::Parse(format!(
                "unknown family '{s}' (expected truncated-bubble, perturbed-bubble, plateau or custom-csv)"
            ))),
        }
    }
}

/// One family member's parameters. Unused entries are ignored by a kind.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct GridPoint<T> {
    pub lambda: T,
    pub radius: T,
    pub eps: T,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(bound = "T: Real")]
pub struct FamilySpec<T> {
    pub kind: FamilyKind,
    pub grid: Vec<GridPoint<T>>,
    pub params: Params<T>,
    pub seed: u64,
    /// Input files for `CustomCsv`, one member per file.
    pub csv_paths: Vec<PathBuf>,
}

impl<T: Real> FamilySpec<T> {
    /// `λ × R` product grid.
    pub fn truncated(params: Params<T>, lambdas: &[T], radii: &[T]) -> Self {
        let grid = radii
            .iter()
            .flat_map(|&radius| {
                lambdas.iter().map(move |&lambda| GridPoint {
                    lambda,
                    radius,
                    eps: T::zero(),
                })
            })
            .collect();
        Self {
            kind: FamilyKind::TruncatedBubble,
            grid,
            params,
            seed: 0,
            csv_paths: Vec::new(),
        }
    }

    /// `U + ε w` at `λ = 1` for each `ε`.
    pub fn perturbed(params: Params<T>, eps: &[T], seed: u64) -> Self {
        let grid = eps
            .iter()
            .map(|&eps| GridPoint {
                lambda: T::one(),
                radius: T::infinity(),
                eps,
            })
            .collect();
        Self {
            kind: FamilyKind::PerturbedBubble,
            grid,
            params,
            seed,
            csv_paths: Vec::new(),
        }
    }

    pub fn plateau(params: Params<T>, radii: &[T], widths: &[T]) -> Self {
        let grid = radii
            .iter()
            .flat_map(|&radius| {
                widths.iter().map(move |&eps| GridPoint {
                    lambda: T::one(),
                    radius,
                    eps,
                })
            })
            .collect();
        Self {
            kind: FamilyKind::Plateau,
            grid,
            params,
            seed: 0,
            csv_paths: Vec::new(),
        }
    }

    pub fn custom_csv(params: Params<T>, paths: Vec<PathBuf>) -> Self {
        let grid = paths
            .iter()
            .map(|_| GridPoint {
                lambda: T::nan(),
                radius: T::nan(),
                eps: T::nan(),
            })
            .collect();
        Self {
            kind: FamilyKind::CustomCsv,
            grid,
            params,
            seed: 0,
            csv_paths: paths,
        }
    }
}

#[derive(Clone)]
pub struct FamilyMember<T> {
    pub index: usize,
    pub point: GridPoint<T>,
    pub profile: RadialProfile<T>,
    pub domain: DomainBall<T>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Filtered<T> {
    pub index: usize,
    pub point: GridPoint<T>,
    pub reason: String,
}

#[derive(Clone)]
pub struct Family<T> {
    pub kind: FamilyKind,
    pub members: Vec<FamilyMember<T>>,
    pub filtered: Vec<Filtered<T>>,
}

/// Smooth bump on `[a, b]` used to seed perturbations.
pub fn bump_profile<T: Real>(a: T, b: T) -> RadialProfile<T> {
    let mid = (a + b) * T::lit(0.5);
    let h = (b - a) * T::lit(0.5);
    let six = T::lit(6.0);
    RadialProfile::from_fns(
        move |r| {
            let s = (r - mid) / h;
            if s.abs() < T::one() {
                (T::one() - s * s).powi(3)
            } else {
                T::zero()
            }
        },
        move |r| {
            let s = (r - mid) / h;
            if s.abs() < T::one() {
                -six * s * (T::one() - s * s).powi(2) / h
            } else {
                T::zero()
            }
        },
        b,
        ProfileKind::Smooth,
    )
    .with_breakpoints([a, mid])
}

/// Seed bump whose support `[a, a + len]` is drawn from the seeded generator.
/// Seed 0 gives the fixed support `[0.5, 2]`.
pub fn seeded_bump<T: Real>(seed: u64) -> RadialProfile<T> {
    if seed == 0 {
        return bump_profile(T::lit(0.5), T::lit(2.0));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let a: f64 = rng.gen_range(0.2..0.8);
    let len: f64 = rng.gen_range(1.0..2.0);
    bump_profile(T::lit(a), T::lit(a + len))
}

/// `1` on `[0, R-w]`, quintic smoothstep to `0` on `[R-w, R]`.
pub fn plateau_profile<T: Real>(radius: T, width: T) -> RadialProfile<T> {
    let a = radius - width;
    let step = move |s: T| T::one() - s * s * s * (T::lit(10.0) - T::lit(15.0) * s + T::lit(6.0) * s * s);
    let dstep = move |s: T| -T::lit(30.0) * s * s * (T::one() - s) * (T::one() - s);
    RadialProfile::from_fns(
        move |r| {
            if r <= a {
                T::one()
            } else if r >= radius {
                T::zero()
            } else {
                step((r - a) / width)
            }
        },
        move |r| {
            if r <= a || r >= radius {
                T::zero()
            } else {
                dstep((r - a) / width) / width
            }
        },
        radius,
        ProfileKind::Smooth,
    )
    .with_breakpoints([a])
}

fn normalized<T: Real>(lab: &Lab<T>, u: RadialProfile<T>, dom: &DomainBall<T>) -> Result<RadialProfile<T>> {
    let k = lq_norm(&lab.params, &u, lab.params.pstar, dom, &lab.cfg)?;
    if !(k > T::zero()) || !k.is_finite() {
        return Err(LabError::hypothesis(format!("profile has L^p* norm {k}")));
    }
    Ok(u.scaled(k.recip()))
}

fn build_member<T: Real>(
    lab: &Lab<T>,
    spec: &FamilySpec<T>,
    index: usize,
    point: GridPoint<T>,
) -> Result<(RadialProfile<T>, DomainBall<T>)> {
    let n = lab.params.n;
    match spec.kind {
        FamilyKind::TruncatedBubble => {
            let dom = DomainBall::new(n, point.radius)?;
            let spec_b = BubbleSpec::new(T::one(), point.lambda)?;
            let u = lab.bubble.truncated(spec_b, point.radius)?;
            Ok((normalized(lab, u, &dom)?, dom))
        }
        FamilyKind::PerturbedBubble => {
            if !(point.eps >= T::zero()) {
                return Err(LabError::hypothesis(format!("eps must be >= 0 (got {})", point.eps)));
            }
            let spec_b = BubbleSpec::new(T::one(), point.lambda)?;
            let u = lab.bubble.profile(spec_b);
            if point.eps == T::zero() {
                return Ok((u, DomainBall::whole_space()));
            }
            let seed = seeded_bump::<T>(spec.seed).dilated(&lab.params, point.lambda.recip());
            let w = make_orthogonal_perturbation(&lab.bubble, &seed, &spec_b, &lab.cfg)?;
            let v = RadialProfile::combine(T::one(), &u, point.eps, &w, ProfileKind::BubblePlusPerturbation);
            Ok((v, DomainBall::whole_space()))
        }
        FamilyKind::Plateau => {
            if !(point.eps > T::zero() && point.eps <= T::one()) {
                return Err(LabError::hypothesis(format!(
                    "plateau width fraction must lie in (0, 1] (got {})",
                    point.eps
                )));
            }
            let dom = DomainBall::new(n, point.radius)?;
            let u = plateau_profile(point.radius, point.radius * point.eps);
            Ok((normalized(lab, u, &dom)?, dom))
        }
        FamilyKind::CustomCsv => {
            let path = spec
                .csv_paths
                .get(index)
                .ok_or_else(|| LabError::Experiment(format!("no csv path for member {index}")))?;
            let file = File::open(path).map_err(|e| LabError::Io(format!("{}: {e}", path.display())))?;
            let (header, samples) = SampledProfile::<T>::read_csv(BufReader::new(file))?;
            if header.n != n || (header.p - lab.params.p).abs() > T::lit(1e-12) {
                return Err(LabError::hypothesis(format!(
                    "{} was written for N={}, p={}",
                    path.display(),
                    header.n,
                    header.p
                )));
            }
            let dom = DomainBall::new(n, header.radius)?;
            Ok((RadialProfile::from_samples(samples), dom))
        }
    }
}

/// Builds every member of the family in parallel; members that cannot be
/// built or violate the family's hypotheses are returned in `filtered`.
pub fn generate_family<T: Real>(lab: &Lab<T>, spec: &FamilySpec<T>) -> Result<Family<T>> {
    if spec.grid.is_empty() {
        return Err(LabError::Experiment("family grid is empty".into()));
    }
    if spec.params != lab.params {
        return Err(LabError::domain("family parameters differ from the evaluation setting"));
    }
    let built: Vec<_> = spec
        .grid
        .par_iter()
        .enumerate()
        .map(|(i, &point)| (i, point, build_member(lab, spec, i, point)))
        .collect();
    let mut members = Vec::new();
    let mut filtered = Vec::new();
    for (index, point, res) in built {
        match res {
            Ok((profile, domain)) => members.push(FamilyMember {
                index,
                point,
                profile,
                domain,
            }),
            Err(e) => {
                log::info!("{} member {index} filtered: {e}", spec.kind);
                filtered.push(Filtered {
                    index,
                    point,
                    reason: e.to_string(),
                });
            }
        }
    }
    Ok(Family {
        kind: spec.kind,
        members,
        filtered,
    })
}

/// One `(ε, distance, deficit)` measurement of a sharpness experiment.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SharpnessPoint<T> {
    pub eps: T,
    pub distance: T,
    pub deficit: T,
    pub grad: T,
    /// `d^ζ ‖∇u‖^{p-ζ}`.
    pub cap: T,
    pub converged: bool,
    pub in_fit: bool,
}

/// Least-squares fit of `log deficit` against `log distance`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SlopeFit<T> {
    /// `(log distance, log deficit)` of the points used in the fit.
    pub points: Vec<(T, T)>,
    pub slope: T,
    pub intercept: T,
    /// Root-mean-square residual of the fit.
    pub residual: T,
    /// Distance range of the fitted points.
    pub window: (T, T),
    /// Largest `deficit / cap` over the fitted points: the empirical upper constant.
    pub c_upper: T,
    pub samples: Vec<SharpnessPoint<T>>,
}

/// Fit window upper edge, as a fraction of `‖∇U‖_p`.
const FIT_WINDOW: f64 = 0.1;
/// RMS residual above which the smallest decade is discarded.
const TRIM_RESIDUAL: f64 = 1e-2;

fn least_squares<T: Real>(pts: &[(T, T)]) -> (T, T, T) {
    let n = T::from_usize_lossy(pts.len());
    let mx = pts.iter().map(|p| p.0).sum::<T>() / n;
    let my = pts.iter().map(|p| p.1).sum::<T>() / n;
    let sxx = pts.iter().map(|p| (p.0 - mx) * (p.0 - mx)).sum::<T>();
    let sxy = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<T>();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss = pts
        .iter()
        .map(|p| {
            let e = p.1 - intercept - slope * p.0;
            e * e
        })
        .sum::<T>();
    (slope, intercept, (rss / n).sqrt())
}

/// Measures deficit against distance along `U + ε w` and fits the exponent.
///
/// `w` is the seeded bump made orthogonal to the manifold at `U`. Points
/// with non-converged projections or distance above `0.1‖∇U‖_p` are left
/// out; if the fit residual is large the smallest decade is dropped.
pub fn sharpness_experiment<T: Real>(lab: &Lab<T>, eps_grid: &[T], seed: u64) -> Result<SlopeFit<T>> {
    let params = &lab.params;
    let whole = DomainBall::whole_space();
    let unit = BubbleSpec::unit();
    let u = lab.bubble.profile(unit);
    let w = make_orthogonal_perturbation(&lab.bubble, &seeded_bump(seed), &unit, &lab.cfg)?;
    let mut samples = eps_grid
        .par_iter()
        .map(|&eps| -> Result<SharpnessPoint<T>> {
            let v = RadialProfile::combine(T::one(), &u, eps, &w, ProfileKind::BubblePlusPerturbation);
            let grad = grad_lp_norm(params, &v, &whole, &lab.cfg)?;
            let crit = lq_norm(params, &v, params.pstar, &whole, &lab.cfg)?;
            let proj = project(&lab.bubble, &v, &lab.cfg)?;
            Ok(SharpnessPoint {
                eps,
                distance: proj.distance,
                deficit: deficit_from_norms(lab, grad, crit),
                grad,
                cap: thm13_cap_from(params, proj.distance, grad),
                converged: proj.converged,
                in_fit: false,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    samples.sort_by(|a, b| a.eps.partial_cmp(&b.eps).unwrap_or(std::cmp::Ordering::Equal));

    let limit = T::lit(FIT_WINDOW) * lab.grad_norm_u();
    let mut keep: Vec<usize> = (0..samples.len())
        .filter(|&i| {
            let s = &samples[i];
            s.converged && s.distance > T::zero() && s.distance < limit && s.deficit > T::zero()
        })
        .collect();
    let logs = |idx: &[usize]| -> Vec<(T, T)> {
        idx.iter()
            .map(|&i| (samples[i].distance.ln(), samples[i].deficit.ln()))
            .collect()
    };
    if keep.len() < 5 {
        return Err(LabError::Experiment(format!(
            "only {} usable points for the slope fit (need 5)",
            keep.len()
        )));
    }
    let mut fit = least_squares(&logs(&keep));
    while fit.2 > T::lit(TRIM_RESIDUAL) {
        let dmin = keep.iter().map(|&i| samples[i].distance).fold(T::infinity(), T::min);
        let trimmed: Vec<usize> = keep
            .iter()
            .copied()
            .filter(|&i| samples[i].distance >= dmin * T::lit(10.0))
            .collect();
        if trimmed.len() < 5 {
            break;
        }
        let refit = least_squares(&logs(&trimmed));
        if refit.2 >= fit.2 {
            break;
        }
        log::info!("slope fit: dropped the smallest decade (residual {:e} -> {:e})", fit.2, refit.2);
        keep = trimmed;
        fit = refit;
    }
    let points = logs(&keep);
    for &i in &keep {
        samples[i].in_fit = true;
    }
    let dists = keep.iter().map(|&i| samples[i].distance);
    let window = (
        dists.clone().fold(T::infinity(), T::min),
        dists.fold(T::zero(), T::max),
    );
    let c_upper = keep
        .iter()
        .map(|&i| samples[i].deficit / samples[i].cap)
        .fold(T::zero(), T::max);
    if !fit.0.is_finite() {
        return Err(LabError::Experiment("slope fit is not finite".into()));
    }
    Ok(SlopeFit {
        points,
        slope: fit.0,
        intercept: fit.1,
        residual: fit.2,
        window,
        c_upper,
        samples,
    })
}

/// `ε` values log-spaced between `eps_min` and `eps_max`.
pub fn log_grid<T: Real>(eps_min: T, eps_max: T, steps: usize) -> Result<Vec<T>> {
    if !(eps_min > T::zero() && eps_max > eps_min) || steps < 2 {
        return Err(LabError::domain(format!(
            "need 0 < eps_min < eps_max and steps >= 2 (got {eps_min}, {eps_max}, {steps})"
        )));
    }
    let (a, b) = (eps_min.ln(), eps_max.ln());
    let last = T::from_usize_lossy(steps - 1);
    Ok((0..steps)
        .map(|i| (a + (b - a) * T::from_usize_lossy(i) / last).exp())
        .collect())
}

/// Inequality whose empirical constant a scan estimates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScanTheorem<T> {
    /// Lower bound by the weak-norm remainder on a bounded domain.
    Thm11,
    /// Lower bound by the `L^t` remainder.
    Cor12 { t: T },
    /// Upper bound `deficit ≤ C'' d^ζ ‖∇u‖^{p-ζ}`.
    Thm13,
    /// Lower bound `deficit ≥ c d^γ ‖∇u‖^{p-γ}`.
    Fz19,
    /// Weak norm against distance.
    Lemma21,
}

impl<T: Real> ScanTheorem<T> {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Thm11 => "thm11",
            Self::Cor12 { .. } => "cor12",
            Self::Thm13 => "thm13",
            Self::Fz19 => "fz19",
            Self::Lemma21 => "lemma21",
        }
    }

    /// Whether the scan reports a maximum (upper-bound statements).
    pub fn is_upper(&self) -> bool {
        matches!(self, Self::Thm13 | Self::Lemma21)
    }
}

/// Extremal ratio of the profiles with one domain radius.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RadiusExtremum<T> {
    pub radius: T,
    pub extremum: T,
    pub members: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(bound = "T: Real")]
pub struct ScanSummary<T> {
    pub theorem: String,
    pub family: FamilyKind,
    pub n: usize,
    pub p: T,
    pub admissible: usize,
    pub filtered: usize,
    /// Minimum ratio for lower bounds, maximum for upper bounds.
    pub extremum: Option<T>,
    pub extremum_point: Option<GridPoint<T>>,
    /// Per-radius extrema (bounded families only).
    pub by_radius: Vec<RadiusExtremum<T>>,
    /// `(max - min)/min` of the per-radius extrema.
    pub radius_spread: Option<T>,
    pub violations: usize,
    pub proof_constants: Option<ProofConstants<T>>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ScanOutcome<T> {
    pub summary: ScanSummary<T>,
    /// One row per grid point, in grid order; filtered points included.
    pub rows: Vec<ScanRow<T>>,
}

fn row_for<T: Real>(
    lab: &Lab<T>,
    theorem: ScanTheorem<T>,
    m: &FamilyMember<T>,
    consts: Option<&ProofConstants<T>>,
) -> Result<ScanRow<T>> {
    let params = &lab.params;
    let cfg = &lab.cfg;
    let u = &m.profile;
    let dom = &m.domain;
    let grad = grad_lp_norm(params, u, dom, cfg)?;
    let crit = lq_norm(params, u, params.pstar, dom, cfg)?;
    let def = deficit_from_norms(lab, grad, crit);
    let mut row = ScanRow::new(m.index, params, m.point, dom.radius);
    row.grad_p = grad;
    row.crit = crit;
    row.deficit = def;
    match theorem {
        ScanTheorem::Thm11 => {
            params.require_weak_valid().map_err(|e| LabError::hypothesis(e.to_string()))?;
            if !dom.is_bounded() {
                return Err(LabError::hypothesis("needs a bounded domain"));
            }
            let weak = weak_norm(params, u, params.pbar, dom, cfg)?.value();
            let g = params.gamma;
            let rem = dom.measure.powf(-g / (params.pstar * (params.p - T::one()))) * weak.powf(g) * crit.powf(params.p - g);
            row.weak = weak;
            row.remainder = rem;
            row.ratio = def / rem;
            row.holds = row.ratio > T::zero();
        }
        ScanTheorem::Cor12 { t } => {
            let rem = remainder_cor12(lab, u, t, dom)?;
            row.remainder = rem;
            row.ratio = def / rem;
            row.holds = row.ratio > T::zero();
        }
        ScanTheorem::Thm13 | ScanTheorem::Fz19 => {
            let whole = DomainBall::whole_space();
            if dom.is_bounded() {
                // distances and stability functionals live on the whole space
                let g2 = grad_lp_norm(params, u, &whole, cfg)?;
                if (g2 - grad).abs() > T::lit(1e-10) * grad {
                    return Err(LabError::hypothesis("profile is not supported in its domain"));
                }
            }
            let d = project(&lab.bubble, u, cfg)?.distance;
            if !(d > T::lit(ON_MANIFOLD_TOL) * grad) {
                return Err(LabError::hypothesis("profile lies on the manifold: ratio undefined"));
            }
            let e = if theorem == ScanTheorem::Thm13 { params.zeta } else { params.gamma };
            let rem = d.powf(e) * grad.powf(params.p - e);
            row.distance = d;
            row.remainder = rem;
            row.ratio = def / rem;
            row.holds = row.ratio.is_finite() && row.ratio >= T::zero();
        }
        ScanTheorem::Lemma21 => {
            let consts = consts.ok_or_else(|| LabError::Experiment("lemma scan needs proof constants".into()))?;
            let r = lemma21_check(lab, u, dom, consts)?;
            row.weak = r.lhs;
            row.distance = r.distance;
            row.remainder = r.rhs;
            row.ratio = r.lhs / r.rhs;
            row.holds = r.holds;
        }
    }
    Ok(row)
}

/// Evaluates the ratio of `theorem` on every member of `family`.
///
/// For the lemma, `c0`/`C0` are the min/max of `‖∇u‖_p` over the members.
pub fn constant_scan<T: Real>(lab: &Lab<T>, theorem: ScanTheorem<T>, family: &Family<T>) -> Result<ScanOutcome<T>> {
    let params = &lab.params;
    let consts = if theorem == ScanTheorem::Lemma21 {
        params.require_weak_valid().map_err(|e| LabError::hypothesis(e.to_string()))?;
        let grads = family
            .members
            .par_iter()
            .map(|m| grad_lp_norm(params, &m.profile, &m.domain, &lab.cfg))
            .collect::<Result<Vec<_>>>()?;
        if grads.is_empty() {
            return Err(LabError::Experiment("family has no members".into()));
        }
        let c0 = grads.iter().copied().fold(T::infinity(), T::min);
        let big = grads.iter().copied().fold(T::zero(), T::max);
        Some(proof_constants(lab, c0, big)?)
    } else {
        None
    };
    let evaluated: Vec<_> = family
        .members
        .par_iter()
        .map(|m| (m, row_for(lab, theorem, m, consts.as_ref())))
        .collect();
    let mut rows: Vec<ScanRow<T>> = family
        .filtered
        .iter()
        .map(|f| ScanRow::filtered(f.index, params, f.point, T::nan(), &f.reason))
        .collect();
    for (m, res) in evaluated {
        match res {
            Ok(r) => rows.push(r),
            Err(e @ (LabError::Hypothesis(_) | LabError::Domain(_))) => {
                log::info!("{} member {} filtered: {e}", theorem.name(), m.index);
                rows.push(ScanRow::filtered(m.index, params, m.point, m.domain.radius, &e.to_string()));
            }
            Err(e) => return Err(e),
        }
    }
    rows.sort_by_key(|r| r.index);
    for r in rows.iter_mut() {
        r.family = family.kind.to_string();
        r.theorem = theorem.name().to_string();
    }

    let admissible: Vec<&ScanRow<T>> = rows.iter().filter(|r| r.filter_reason.is_empty()).collect();
    if admissible.is_empty() {
        return Err(LabError::Experiment(format!(
            "no admissible profiles for {} ({} filtered)",
            theorem.name(),
            rows.len()
        )));
    }
    let upper = theorem.is_upper();
    let better = |a: T, b: T| if upper { a > b } else { a < b };
    let best = admissible
        .iter()
        .filter(|r| r.ratio.is_finite())
        .fold(None::<&ScanRow<T>>, |acc, r| match acc {
            Some(b) if !better(r.ratio, b.ratio) => Some(b),
            _ => Some(r),
        });
    let mut by_radius: Vec<RadiusExtremum<T>> = Vec::new();
    for r in admissible.iter().filter(|r| r.domain_radius.is_finite() && r.ratio.is_finite()) {
        match by_radius.iter_mut().find(|e| e.radius == r.domain_radius) {
            Some(e) => {
                e.members += 1;
                if better(r.ratio, e.extremum) {
                    e.extremum = r.ratio;
                }
            }
            None => by_radius.push(RadiusExtremum {
                radius: r.domain_radius,
                extremum: r.ratio,
                members: 1,
            }),
        }
    }
    by_radius.sort_by(|a, b| a.radius.partial_cmp(&b.radius).unwrap_or(std::cmp::Ordering::Equal));
    let radius_spread = (by_radius.len() > 1).then(|| {
        let lo = by_radius.iter().map(|e| e.extremum).fold(T::infinity(), T::min);
        let hi = by_radius.iter().map(|e| e.extremum).fold(T::neg_infinity(), T::max);
        (hi - lo) / lo.abs()
    });
    let summary = ScanSummary {
        theorem: theorem.name().to_string(),
        family: family.kind,
        n: params.n,
        p: params.p,
        admissible: admissible.len(),
        filtered: rows.len() - admissible.len(),
        extremum: best.map(|r| r.ratio),
        extremum_point: best.map(|r| GridPoint {
            lambda: r.lambda,
            radius: r.radius,
            eps: r.eps,
        }),
        by_radius,
        radius_spread,
        violations: admissible.iter().filter(|r| !r.holds).count(),
        proof_constants: consts,
    };
    Ok(ScanOutcome { summary, rows })
}
