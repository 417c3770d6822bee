//! Distance to the manifold of extremals `{c U_{λ,0}}` and the tangent-space
//! machinery used to build decompositions `u = c U_λ + d w`.

use rayon::prelude::*;
use serde::Serialize;

use crate::bubble::{Bubble, BubbleSpec};
use crate::error::{LabError, Result};
use crate::norms::{grad_lp_norm, radial_integral};
use crate::optimize::{golden_min, nelder_mead, NelderMeadOptions};
use crate::profile::{DomainBall, ProfileKind, RadialProfile};
use crate::quadrature::QuadConfig;
use crate::scalar::Real;

/// Minimizer of `E(c, λ) = ‖∇(u - c U_λ)‖_p`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProjectionResult<T> {
    pub c_opt: T,
    pub lambda_opt: T,
    pub distance: T,
    pub evaluations: usize,
    pub converged: bool,
}

impl<T: Real> ProjectionResult<T> {
    pub fn spec(&self) -> BubbleSpec<T> {
        BubbleSpec {
            c: self.c_opt,
            lambda: self.lambda_opt,
        }
    }
}

/// Search box and budget of [`project_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProjectionOptions<T> {
    pub lambda_min: T,
    pub lambda_max: T,
    pub lambda_grid: usize,
    /// Parameter tolerance of the simplex refinement in `(c, ln λ)`.
    pub x_tol: T,
    pub max_evals: usize,
}

impl<T: Real> Default for ProjectionOptions<T> {
    fn default() -> Self {
        Self {
            lambda_min: T::lit(1e-3),
            lambda_max: T::lit(1e3),
            lambda_grid: 25,
            x_tol: T::lit(T::OPT_TOL),
            max_evals: 4000,
        }
    }
}

/// `E(c, λ) = ‖∇(u - c U_λ)‖_{L^p(ℝ^N)}`.
pub fn gradient_distance<T: Real>(
    bubble: &Bubble<T>,
    u: &RadialProfile<T>,
    c: T,
    lambda: T,
    cfg: &QuadConfig<T>,
) -> Result<T> {
    Ok(gradient_distance_power(bubble, u, c, lambda, cfg)?.powf(bubble.params().p.recip()))
}

fn gradient_distance_power<T: Real>(
    bubble: &Bubble<T>,
    u: &RadialProfile<T>,
    c: T,
    lambda: T,
    cfg: &QuadConfig<T>,
) -> Result<T> {
    let params = bubble.params();
    let p = params.p;
    let spec = BubbleSpec { c, lambda };
    let cfg = &QuadConfig {
        accept_roundoff: true,
        ..*cfg
    };
    let mut breaks = u.breakpoints().to_vec();
    breaks.push(T::one() / lambda);
    if u.support_radius().is_finite() {
        breaks.push(u.support_radius());
    }
    let i = radial_integral(
        params,
        |r| (u.derivative(r) - bubble.derivative(&spec, r)).abs().powf(p),
        T::infinity(),
        &breaks,
        cfg,
    )?;
    Ok(params.sphere() * i.value)
}

/// Projection with default options. An optimum outside the `λ` box moves
/// that edge out by three decades (same node density), at most three times.
pub fn project<T: Real>(bubble: &Bubble<T>, u: &RadialProfile<T>, cfg: &QuadConfig<T>) -> Result<ProjectionResult<T>> {
    let mut opts = ProjectionOptions::default();
    let widen = T::lit(1e3);
    let slack = T::one() + T::lit(1e-9);
    for _ in 0..3 {
        let r = project_with(bubble, u, cfg, &opts)?;
        if r.lambda_opt > opts.lambda_max * slack {
            opts.lambda_max = opts.lambda_max * widen;
        } else if r.lambda_opt * slack < opts.lambda_min {
            opts.lambda_min = opts.lambda_min / widen;
        } else {
            return Ok(r);
        }
        opts.lambda_grid += 12;
    }
    let r = project_with(bubble, u, cfg, &opts)?;
    if !r.converged {
        log::warn!("projection did not converge (λ = {}, distance = {})", r.lambda_opt, r.distance);
    }
    Ok(r)
}

/// Minimizes `E(c, λ)` by a logarithmic `λ` grid with a golden-section search
/// over `c` at each node, then a Nelder–Mead refinement in `(c, ln λ)`.
///
/// An optimum leaving the `λ` box, or a simplex that hits the evaluation cap,
/// is reported with `converged = false`.
pub fn project_with<T: Real>(
    bubble: &Bubble<T>,
    u: &RadialProfile<T>,
    cfg: &QuadConfig<T>,
    opts: &ProjectionOptions<T>,
) -> Result<ProjectionResult<T>> {
    let params = bubble.params();
    let whole = DomainBall::whole_space();
    let grad_u = grad_lp_norm(params, u, &whole, cfg)?;
    if !(grad_u > T::zero()) || !grad_u.is_finite() {
        return Err(LabError::domain(format!(
            "projection needs 0 < ‖∇u‖_p < ∞ (got {grad_u})"
        )));
    }
    let grad_bubble = grad_lp_norm(params, &bubble.profile(BubbleSpec::unit()), &whole, cfg)?;
    let c_max = T::lit(2.0) * grad_u / grad_bubble;

    let (ln_lo, ln_hi) = (opts.lambda_min.ln(), opts.lambda_max.ln());
    let m = opts.lambda_grid.max(2);
    let nodes: Vec<T> = (0..m)
        .map(|k| ln_lo + (ln_hi - ln_lo) * T::from_usize_lossy(k) / T::from_usize_lossy(m - 1))
        .collect();

    let coarse: Vec<Result<(T, T, T, usize)>> = nodes
        .par_iter()
        .map(|&ln_l| {
            let lambda = ln_l.exp();
            let mut failure = None;
            let line = golden_min(
                |c| match gradient_distance_power(bubble, u, c, lambda, cfg) {
                    Ok(v) => v,
                    Err(e) => {
                        failure = Some(e);
                        T::infinity()
                    }
                },
                -c_max,
                c_max,
                T::lit(1e-6),
                200,
            );
            match failure {
                Some(e) => Err(e),
                None => Ok((line.value, line.x, ln_l, line.evaluations)),
            }
        })
        .collect();
    let mut evaluations = 0;
    let mut best = (T::infinity(), T::zero(), T::zero());
    for item in coarse {
        let (f, c, ln_l, ev) = item?;
        evaluations += ev;
        if f < best.0 {
            best = (f, c, ln_l);
        }
    }

    let spacing = (ln_hi - ln_lo) / T::from_usize_lossy(m - 1);
    let nm_opts = NelderMeadOptions {
        step: [T::lit(0.05) * best.1.abs().max(T::lit(0.1)), T::lit(0.5) * spacing],
        x_tol: opts.x_tol,
        f_tol: T::zero(),
        max_evals: opts.max_evals,
    };
    let mut failure = None;
    let nm = nelder_mead(
        |x: [T; 2]| match gradient_distance_power(bubble, u, x[0], x[1].exp(), cfg) {
            Ok(v) => v,
            Err(e) => {
                failure.get_or_insert(e);
                T::infinity()
            }
        },
        [best.1, best.2],
        &nm_opts,
    );
    if let Some(e) = failure {
        return Err(e);
    }
    evaluations += nm.evaluations;
    let (c_opt, lambda_opt) = if nm.value <= best.0 {
        (nm.x[0], nm.x[1].exp())
    } else {
        (best.1, best.2.exp())
    };
    let slack = T::lit(1e-9);
    let in_box = lambda_opt >= opts.lambda_min * (T::one() - slack) && lambda_opt <= opts.lambda_max * (T::one() + slack);
    if !in_box {
        log::debug!("projection optimum λ = {lambda_opt} left the search box");
    }
    if !nm.converged {
        log::warn!("projection simplex stopped after {} evaluations without converging", nm.evaluations);
    }
    let distance = gradient_distance(bubble, u, c_opt, lambda_opt, cfg)?;
    Ok(ProjectionResult {
        c_opt,
        lambda_opt,
        distance,
        evaluations: evaluations + 1,
        converged: nm.converged && in_box,
    })
}

/// For `p = 2` the optimal amplitude at fixed `λ` is
/// `∫∇u·∇U_λ / ∫|∇U_λ|²`.
pub fn optimal_c_p2<T: Real>(bubble: &Bubble<T>, u: &RadialProfile<T>, lambda: T, cfg: &QuadConfig<T>) -> Result<T> {
    let params = bubble.params();
    if (params.p - T::lit(2.0)).abs() > T::epsilon() {
        return Err(LabError::domain("closed-form amplitude exists only for p = 2"));
    }
    let spec = BubbleSpec { c: T::one(), lambda };
    let mut breaks = u.breakpoints().to_vec();
    breaks.push(T::one() / lambda);
    let num = radial_integral(
        params,
        |r| u.derivative(r) * bubble.derivative(&spec, r),
        T::infinity(),
        &breaks,
        cfg,
    )?;
    let den = radial_integral(params, |r| bubble.derivative(&spec, r).powi(2), T::infinity(), &breaks, cfg)?;
    Ok(num.value / den.value)
}

/// `u = c U_λ + d w` with `‖∇w‖_p = 1`.
#[derive(Clone)]
pub struct Decomposition<T> {
    pub bubble: BubbleSpec<T>,
    pub d: T,
    pub w: RadialProfile<T>,
}

impl<T: Real> std::fmt::Debug for Decomposition<T> {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Decomposition")
            .field("bubble", &self.bubble)
            .field("d", &self.d)
            .field("w", &self.w)
            .finish()
    }
}

impl<T: Real> Decomposition<T> {
    /// Checks `‖∇w‖_p = 1` to `1e-6`.
    pub fn new(bubble: &Bubble<T>, spec: BubbleSpec<T>, d: T, w: RadialProfile<T>, cfg: &QuadConfig<T>) -> Result<Self> {
        if !(d >= T::zero()) {
            return Err(LabError::domain(format!("decomposition distance must be >= 0 (got {d})")));
        }
        let g = grad_lp_norm(bubble.params(), &w, &DomainBall::whole_space(), cfg)?;
        if (g - T::one()).abs() > T::lit(1e-6) {
            return Err(LabError::domain(format!("perturbation must have unit gradient norm (got {g})")));
        }
        Ok(Self { bubble: spec, d, w })
    }

    /// `w = (u - c U_λ)/d` at the projection optimum.
    pub fn from_projection(bubble: &Bubble<T>, u: &RadialProfile<T>, proj: &ProjectionResult<T>) -> Result<Self> {
        if !(proj.distance > T::zero()) {
            return Err(LabError::Degenerate("profile lies on the manifold: no perturbation direction".into()));
        }
        let spec = proj.spec();
        let inv = proj.distance.recip();
        let w = RadialProfile::combine(
            inv,
            u,
            -inv,
            &bubble.profile(spec),
            ProfileKind::BubblePlusPerturbation,
        );
        Ok(Self {
            bubble: spec,
            d: proj.distance,
            w,
        })
    }

    /// `c U_λ + d w`.
    pub fn reconstruct(&self, bubble: &Bubble<T>) -> RadialProfile<T> {
        RadialProfile::combine(
            T::one(),
            &bubble.profile(self.bubble),
            self.d,
            &self.w,
            ProfileKind::BubblePlusPerturbation,
        )
    }
}

/// Radial tangent directions `{U_λ, ∂_λ U_λ}` at `spec`; the translation
/// directions are not radial and are left out.
pub fn tangent_basis<T: Real>(bubble: &Bubble<T>, spec: &BubbleSpec<T>) -> Vec<RadialProfile<T>> {
    vec![
        bubble.profile(BubbleSpec {
            c: T::one(),
            lambda: spec.lambda,
        }),
        bubble.lambda_tangent(spec.lambda),
    ]
}

/// `B(f, g) = ∫ |∇U_λ|^{p-2} ∇f·∇g`, the linearization of the `p`-Laplacian at `U_λ`.
fn linearized_pairing<T: Real>(
    bubble: &Bubble<T>,
    lambda: T,
    f: &RadialProfile<T>,
    g: &RadialProfile<T>,
    cfg: &QuadConfig<T>,
) -> Result<T> {
    let params = bubble.params();
    let unit = BubbleSpec { c: T::one(), lambda };
    let pm2 = params.p - T::lit(2.0);
    let mut breaks: Vec<T> = f.breakpoints().iter().chain(g.breakpoints()).copied().collect();
    breaks.push(T::one() / lambda);
    for s in [f.support_radius(), g.support_radius()] {
        if s.is_finite() {
            breaks.push(s);
        }
    }
    let top = f.support_radius().min(g.support_radius());
    let i = radial_integral(
        params,
        |r| {
            let prod = f.derivative(r) * g.derivative(r);
            if prod == T::zero() {
                return T::zero();
            }
            bubble.derivative(&unit, r).abs().powf(pm2) * prod
        },
        top,
        &breaks,
        cfg,
    )?;
    Ok(params.sphere() * i.value)
}

/// `(∫|∇U_λ|^{p-2}∇U_λ·∇w, ∫U_λ^{p*-1} w)` for the decomposition's `λ`.
pub fn orthogonality_residuals<T: Real>(bubble: &Bubble<T>, dec: &Decomposition<T>, cfg: &QuadConfig<T>) -> Result<(T, T)> {
    let params = bubble.params();
    let unit = BubbleSpec {
        c: T::one(),
        lambda: dec.bubble.lambda,
    };
    let first = linearized_pairing(bubble, dec.bubble.lambda, &bubble.profile(unit), &dec.w, cfg)?;
    let e = params.pstar - T::one();
    let mut breaks = dec.w.breakpoints().to_vec();
    breaks.push(T::one() / unit.lambda);
    let second = radial_integral(
        params,
        |r| {
            let w = dec.w.value(r);
            if w == T::zero() {
                T::zero()
            } else {
                bubble.value(&unit, r).powf(e) * w
            }
        },
        dec.w.support_radius(),
        &breaks,
        cfg,
    )?;
    Ok((first, params.sphere() * second.value))
}

/// Pairing used to remove tangent components in [`make_orthogonal_perturbation_with`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum OrthogonalityPairing {
    /// `B(f, g) = ∫|∇U_λ|^{p-2}∇f·∇g`: the integral conditions attached to
    /// the decomposition `u = c U_λ + d w`.
    #[default]
    Linearized,
    /// `∫|∇w|^{p-2}∇w·∇T = 0` for both tangent directions `T`: the
    /// stationarity condition of the gradient `L^p` distance. Coincides with
    /// `Linearized` for `p = 2`.
    Dual,
}

/// Removes the tangent components of `seed` at `spec` in the linearized
/// pairing and normalizes to unit gradient norm.
///
/// Orthogonality to `U_λ` in `B` is the first integral condition, which
/// equals the `U_λ^{p*-1}` condition by the critical equation; orthogonality
/// to `∂_λ U_λ` is the `λ`-direction analogue.
pub fn make_orthogonal_perturbation<T: Real>(
    bubble: &Bubble<T>,
    seed: &RadialProfile<T>,
    spec: &BubbleSpec<T>,
    cfg: &QuadConfig<T>,
) -> Result<RadialProfile<T>> {
    make_orthogonal_perturbation_with(bubble, seed, spec, OrthogonalityPairing::Linearized, cfg)
}

/// [`make_orthogonal_perturbation`] with a choice of pairing.
pub fn make_orthogonal_perturbation_with<T: Real>(
    bubble: &Bubble<T>,
    seed: &RadialProfile<T>,
    spec: &BubbleSpec<T>,
    pairing: OrthogonalityPairing,
    cfg: &QuadConfig<T>,
) -> Result<RadialProfile<T>> {
    let params = bubble.params();
    let whole = DomainBall::whole_space();
    let seed_norm = grad_lp_norm(params, seed, &whole, cfg)?;
    if !(seed_norm > T::zero()) || !seed_norm.is_finite() {
        return Err(LabError::domain(format!("seed needs a finite nonzero gradient norm (got {seed_norm})")));
    }
    let basis = tangent_basis(bubble, spec);
    let lambda = spec.lambda;
    let g11 = linearized_pairing(bubble, lambda, &basis[0], &basis[0], cfg)?;
    let g12 = linearized_pairing(bubble, lambda, &basis[0], &basis[1], cfg)?;
    let g22 = linearized_pairing(bubble, lambda, &basis[1], &basis[1], cfg)?;
    let b1 = linearized_pairing(bubble, lambda, &basis[0], seed, cfg)?;
    let b2 = linearized_pairing(bubble, lambda, &basis[1], seed, cfg)?;
    let det = g11 * g22 - g12 * g12;
    if !(det.abs() > T::epsilon() * g11 * g22) {
        return Err(LabError::Numeric {
            what: "tangent Gram matrix is singular".into(),
            achieved: det.as_f64(),
            target: 0.0,
        });
    }
    let mut alpha = [(b1 * g22 - b2 * g12) / det, (b2 * g11 - b1 * g12) / det];
    if pairing == OrthogonalityPairing::Dual {
        alpha = dual_coefficients(bubble, seed, &basis, alpha, cfg)?;
    }
    let kind = ProfileKind::Smooth;
    let partial = RadialProfile::combine(T::one(), seed, -alpha[0], &basis[0], kind);
    let residual = RadialProfile::combine(T::one(), &partial, -alpha[1], &basis[1], kind);
    let norm = grad_lp_norm(params, &residual, &whole, cfg)?;
    if norm <= T::lit(1e-8) * seed_norm {
        return Err(LabError::Degenerate(format!(
            "seed lies in the tangent span (residual gradient norm {norm:e})"
        )));
    }
    Ok(residual.scaled(norm.recip()))
}

/// `argmin_α ‖∇(seed - α₁T₁ - α₂T₂)‖_p`, started from the linearized coefficients.
fn dual_coefficients<T: Real>(
    bubble: &Bubble<T>,
    seed: &RadialProfile<T>,
    basis: &[RadialProfile<T>],
    start: [T; 2],
    cfg: &QuadConfig<T>,
) -> Result<[T; 2]> {
    let params = bubble.params();
    let p = params.p;
    let rcfg = QuadConfig {
        accept_roundoff: true,
        ..*cfg
    };
    let mut breaks: Vec<T> = seed.breakpoints().iter().chain(basis[0].breakpoints()).copied().collect();
    if seed.support_radius().is_finite() {
        breaks.push(seed.support_radius());
    }
    let mut failure = None;
    let scale = start[0].abs().max(start[1].abs()).max(T::lit(0.1));
    let opts = NelderMeadOptions {
        step: [T::lit(0.05) * scale, T::lit(0.05) * scale],
        x_tol: T::lit(T::OPT_TOL) * T::lit(1e-2) * scale,
        f_tol: T::zero(),
        max_evals: 4000,
    };
    let nm = nelder_mead(
        |a: [T; 2]| {
            let i = radial_integral(
                params,
                |r| (seed.derivative(r) - a[0] * basis[0].derivative(r) - a[1] * basis[1].derivative(r)).abs().powf(p),
                T::infinity(),
                &breaks,
                &rcfg,
            );
            match i {
                Ok(v) => v.value,
                Err(e) => {
                    failure.get_or_insert(e);
                    T::infinity()
                }
            }
        },
        start,
        &opts,
    );
    if let Some(e) = failure {
        return Err(e);
    }
    if !nm.converged {
        return Err(LabError::Numeric {
            what: "dual tangent projection did not converge".into(),
            achieved: nm.value.as_f64(),
            target: opts.x_tol.as_f64(),
        });
    }
    Ok(nm.x)
}

/// `(∫|∇w|^{p-2}∇w·∇U_λ, ∫|∇w|^{p-2}∇w·∇∂_λU_λ)`: the first-order
/// conditions of the gradient `L^p` distance in the direction `w`.
pub fn dual_orthogonality_residuals<T: Real>(
    bubble: &Bubble<T>,
    spec: &BubbleSpec<T>,
    w: &RadialProfile<T>,
    cfg: &QuadConfig<T>,
) -> Result<(T, T)> {
    let params = bubble.params();
    let basis = tangent_basis(bubble, spec);
    let mut breaks = w.breakpoints().to_vec();
    breaks.push(T::one() / spec.lambda);
    let mut out = [T::zero(); 2];
    for (k, t) in basis.iter().enumerate() {
        let i = radial_integral(
            params,
            |r| {
                let dw = w.derivative(r);
                if dw == T::zero() {
                    T::zero()
                } else {
                    dw.signed_pow(params.p) * t.derivative(r)
                }
            },
            w.support_radius(),
            &breaks,
            cfg,
        )?;
        out[k] = params.sphere() * i.value;
    }
    Ok((out[0], out[1]))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::params::derive_params;

    fn bump() -> RadialProfile<f64> {
        let v = |r: f64| {
            if r <= 1.0 || r >= 2.0 {
                0.0
            } else {
                (1.0 - ((r - 1.5) / 0.5).powi(2)).powi(4)
            }
        };
        let d = |r: f64| {
            if r <= 1.0 || r >= 2.0 {
                0.0
            } else {
                let s = (r - 1.5) / 0.5;
                -16.0 * s * (1.0 - s * s).powi(3)
            }
        };
        RadialProfile::from_fns(v, d, 2.0, ProfileKind::Smooth).with_breakpoints([1.0, 1.5])
    }

    #[test]
    fn recovers_manifold_points() {
        let b = Bubble::new(derive_params(3, 2.0f64).unwrap());
        let cfg = QuadConfig::default();
        for (c, lambda) in [(1.0, 1.0), (2.0, 3.0)] {
            let u = b.profile(BubbleSpec::new(c, lambda).unwrap());
            let r = project(&b, &u, &cfg).unwrap();
            assert!(r.converged);
            assert!(r.distance < 1e-7, "{r:?}");
            assert!((r.c_opt - c).abs() < 1e-6 && (r.lambda_opt - lambda).abs() < 1e-6, "{r:?}");
        }
    }

    #[test]
    fn tangent_at_origin() {
        let pr = derive_params(4, 3.0f64).unwrap();
        let b = Bubble::new(pr);
        let t = &tangent_basis(&b, &BubbleSpec::unit())[1];
        assert!((t.value(0.0) - pr.scaling_exponent() * b.gamma()).abs() < 1e-12);
    }

    #[test]
    fn orthogonal_perturbation_properties() {
        for p in [2.0, 1.5, 3.0] {
            let pr = derive_params(4, p).unwrap();
            let b = Bubble::new(pr);
            let cfg = QuadConfig::default();
            let spec = BubbleSpec::unit();
            let w = make_orthogonal_perturbation(&b, &bump(), &spec, &cfg).unwrap();
            let g = grad_lp_norm(&pr, &w, &DomainBall::whole_space(), &cfg).unwrap();
            assert!((g - 1.0).abs() < 1e-9);
            let dec = Decomposition::new(&b, spec, 0.01, w.clone(), &cfg).unwrap();
            let (i1, i2) = orthogonality_residuals(&b, &dec, &cfg).unwrap();
            assert!(i1.abs() < 1e-6 && i2.abs() < 1e-6, "p={p}: {i1} {i2}");
            let again = make_orthogonal_perturbation(&b, &w, &spec, &cfg).unwrap();
            for r in [0.0, 0.5, 1.2, 1.7, 3.0] {
                assert!((again.value(r) - w.value(r)).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn dual_pairing_makes_projection_stationary() {
        let pr = derive_params(4, 3.0f64).unwrap();
        let b = Bubble::new(pr);
        let cfg = QuadConfig::default();
        let spec = BubbleSpec::unit();
        let w = make_orthogonal_perturbation_with(&b, &bump(), &spec, OrthogonalityPairing::Dual, &cfg).unwrap();
        let (r1, r2) = dual_orthogonality_residuals(&b, &spec, &w, &cfg).unwrap();
        assert!(r1.abs() < 1e-6 && r2.abs() < 1e-6, "{r1} {r2}");
        let lin = make_orthogonal_perturbation(&b, &bump(), &spec, &cfg).unwrap();
        let (l1, _) = dual_orthogonality_residuals(&b, &spec, &lin, &cfg).unwrap();
        assert!(l1.abs() > 1e-4, "{l1}");
    }

    #[test]
    fn fully_tangent_seed_is_degenerate() {
        let b = Bubble::new(derive_params(3, 2.0f64).unwrap());
        let spec = BubbleSpec::new(1.0, 2.0).unwrap();
        let e = make_orthogonal_perturbation(&b, &b.profile(spec), &spec, &QuadConfig::default()).unwrap_err();
        assert!(matches!(e, LabError::Degenerate(_)));
    }

    #[test]
    fn non_orthogonal_direction_residual() {
        let pr = derive_params(3, 2.5f64).unwrap();
        let b = Bubble::new(pr);
        let cfg = QuadConfig::default();
        let u = b.profile(BubbleSpec::unit());
        let g = grad_lp_norm(&pr, &u, &DomainBall::whole_space(), &cfg).unwrap();
        let dec = Decomposition {
            bubble: BubbleSpec::unit(),
            d: 0.0,
            w: u,
        };
        let (i1, i2) = orthogonality_residuals(&b, &dec, &cfg).unwrap();
        assert!((i1 - g.powf(2.5)).abs() < 1e-8 * i1);
        assert!((i1 - i2).abs() < 1e-6 * i1);
    }

    #[test]
    fn closed_form_amplitude_for_p2() {
        let b = Bubble::new(derive_params(3, 2.0f64).unwrap());
        let cfg = QuadConfig::default();
        let u = b.truncated(BubbleSpec::new(1.3, 2.0).unwrap(), 1.0).unwrap();
        let c = optimal_c_p2(&b, &u, 2.0, &cfg).unwrap();
        let line = golden_min(|c| gradient_distance(&b, &u, c, 2.0, &cfg).unwrap(), -5.0, 5.0, 1e-12, 300);
        assert!((c - line.x).abs() < 1e-6, "{c} vs {}", line.x);
    }
}
