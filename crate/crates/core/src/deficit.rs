//! Sobolev deficit, remainder terms, stability functionals and the explicit
//! constants of the weak-norm lemma.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::bubble::tail_integral;
use crate::error::{LabError, Result};
use crate::lab::Lab;
use crate::norms::{grad_lp_norm, lq_norm, lt_quasi_norm};
use crate::params::Params;
use crate::profile::{DomainBall, RadialProfile};
use crate::projection::{orthogonality_residuals, project, Decomposition};
use crate::scalar::Real;
use crate::weak::{weak_norm, weak_to_strong_constant};

/// Relative slack below zero that is treated as quadrature noise.
const CLAMP_SLACK: f64 = 1e-10;

/// Default threshold `deficit < 0.1 S^p` for the small-deficit hypothesis.
pub const SMALL_DEFICIT_FRACTION: f64 = 0.1;

/// Distances below this fraction of `‖∇u‖_p` count as lying on the manifold,
/// where distance ratios are undefined.
pub const ON_MANIFOLD_TOL: f64 = 1e-6;

/// Every quantity entering the remainder inequalities for one profile.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(bound = "T: Real")]
pub struct DeficitReport<T> {
    pub grad_p: T,
    pub crit: T,
    /// Weak `L^{p̄}` norm over the domain; NaN when not defined.
    pub weak: T,
    pub deficit: T,
    /// NaN when the domain is unbounded or `p ≤ 2N/(N+1)`.
    pub remainder_thm11: T,
    pub remainder_thm13_cap: T,
    pub distance: T,
    pub ratios: BTreeMap<String, T>,
}

/// `ρ`, `C̲` and `ℬ` of the weak-norm lemma.
///
/// `C_under` and `B` follow the displayed formulas. The `_corrected`
/// variants use the evaluated tail integral `(p-1)/N` in place of `N/(p-1)`
/// and `|B_1| = |𝕊^{N-1}|/N` in place of `|𝕊^{N-1}|` when passing from
/// `R^{(N-p)/(p(p-1))}` to `|B_R|^{1/(p*(p-1))}`.
#[allow(non_snake_case)]
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ProofConstants<T> {
    pub c0: T,
    pub C0: T,
    pub rho: T,
    pub C_under: T,
    pub B: T,
    /// `ρ/(c0-ρ)`.
    pub K: T,
    pub C_under_corrected: T,
    pub B_corrected: T,
}

/// Outcome of [`lemma21_check`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Lemma21Check<T> {
    /// `‖u‖_{L^{p̄}_w(B_R)}`.
    pub lhs: T,
    /// `ℬ |B_R|^{1/(p*(p-1))} d` with the displayed `ℬ`.
    pub rhs: T,
    pub holds: bool,
    pub rhs_corrected: T,
    pub holds_corrected: bool,
    pub distance: T,
    pub c_opt: T,
    pub lambda_opt: T,
    /// Whether `d < ρ`, which the argument assumes after normalization.
    pub distance_below_rho: bool,
}

/// Outcome of [`tail_lower_bound_check`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TailCheck<T> {
    pub lambda_r: T,
    /// `‖U_λ‖^{p*}_{L^{p*}(ℝ^N∖B_R)}`.
    pub exact: T,
    /// `2^{-N} γ^{p*} |𝕊^{N-1}| (p-1)/N (λR)^{-N/(p-1)}`.
    pub bound: T,
    pub holds: bool,
    /// Same bound with the factor `N/(p-1)`.
    pub bound_displayed: T,
    pub holds_displayed: bool,
    pub lambda_r_ge_1: bool,
}

/// Stability functionals of the Figalli–Zhang inequalities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct FzFunctionals<T> {
    /// `‖∇u‖/‖u‖_{p*} - S`.
    pub lhs_1_8: T,
    /// `(d/‖∇u‖)^γ`.
    pub rhs_1_8: T,
    /// Deficit.
    pub lhs_1_9: T,
    /// `d^γ ‖∇u‖^{p-γ}`.
    pub rhs_1_9: T,
    pub distance: T,
    /// `None` on the manifold (`d ≤ 1e-6 ‖∇u‖_p`).
    pub ratio_1_8: Option<T>,
    pub ratio_1_9: Option<T>,
}

/// Exponent of `R` after raising the tail bound to `1/p*`, both ways.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ExponentCheck<T> {
    /// `N/(p-1) · 1/p*`.
    pub derived: T,
    /// `(N-p)/(p(p-1))`.
    pub displayed: T,
    pub matches: bool,
}

fn clamp_deficit<T: Real>(raw: T, grad_pow: T) -> T {
    if raw < T::zero() && raw >= -T::lit(CLAMP_SLACK) * grad_pow {
        log::debug!("clamping deficit {raw:e} to 0 (grad^p = {grad_pow:e})");
        T::zero()
    } else {
        if raw < T::zero() {
            log::warn!("negative deficit {raw:e} beyond noise level (grad^p = {grad_pow:e})");
        }
        raw
    }
}

/// `‖∇u‖^p - S^p ‖u‖^p_{p*}` over `dom`.
pub fn deficit<T: Real>(lab: &Lab<T>, u: &RadialProfile<T>, dom: &DomainBall<T>) -> Result<T> {
    let params = &lab.params;
    let grad = grad_lp_norm(params, u, dom, &lab.cfg)?;
    let crit = lq_norm(params, u, params.pstar, dom, &lab.cfg)?;
    Ok(deficit_from_norms(lab, grad, crit))
}

/// Deficit from precomputed `‖∇u‖_p` and `‖u‖_{p*}`.
pub fn deficit_from_norms<T: Real>(lab: &Lab<T>, grad: T, crit: T) -> T {
    let p = lab.params.p;
    let grad_pow = grad.powf(p);
    clamp_deficit(grad_pow - (lab.sharp_s() * crit).powf(p), grad_pow)
}

fn require_bounded<T: Real>(dom: &DomainBall<T>) -> Result<()> {
    if dom.is_bounded() {
        Ok(())
    } else {
        Err(LabError::hypothesis("remainder terms need a domain of finite measure"))
    }
}

fn require_weak_hypothesis<T: Real>(params: &Params<T>) -> Result<()> {
    if params.weak_norm_valid {
        Ok(())
    } else {
        Err(LabError::hypothesis(format!(
            "the weak remainder needs p > 2N/(N+1) = {:.6} (got N={}, p={})",
            params.weak_threshold(),
            params.n,
            params.p
        )))
    }
}

/// `|Ω|^{-γ/(p*(p-1))} ‖u‖^γ_{L^{p̄}_w(Ω)} ‖u‖^{p-γ}_{p*}`.
pub fn remainder_thm11<T: Real>(lab: &Lab<T>, u: &RadialProfile<T>, dom: &DomainBall<T>) -> Result<T> {
    let params = &lab.params;
    require_weak_hypothesis(params)?;
    require_bounded(dom)?;
    let weak = weak_norm(params, u, params.pbar, dom, &lab.cfg)?.value();
    let crit = lq_norm(params, u, params.pstar, dom, &lab.cfg)?;
    if !(crit > T::zero()) {
        return Err(LabError::hypothesis("remainder needs u != 0"));
    }
    Ok(thm11_from_norms(params, dom.measure, weak, crit))
}

fn thm11_from_norms<T: Real>(params: &Params<T>, measure: T, weak: T, crit: T) -> T {
    let g = params.gamma;
    let e = -g / (params.pstar * (params.p - T::one()));
    measure.powf(e) * weak.powf(g) * crit.powf(params.p - g)
}

/// `|Ω|^{-γ(p*-t)/(t p*)} ‖u‖^γ_t ‖u‖^{p-γ}_{p*}` for `0 < t < p̄`.
pub fn remainder_cor12<T: Real>(lab: &Lab<T>, u: &RadialProfile<T>, t: T, dom: &DomainBall<T>) -> Result<T> {
    let params = &lab.params;
    if !(t > T::zero() && t < params.pbar) {
        return Err(LabError::domain(format!("t must lie in (0, p̄) = (0, {}) (got {t})", params.pbar)));
    }
    require_bounded(dom)?;
    let lt = lt_quasi_norm(params, u, t, dom, &lab.cfg)?;
    let crit = lq_norm(params, u, params.pstar, dom, &lab.cfg)?;
    if !(crit > T::zero()) {
        return Err(LabError::hypothesis("remainder needs u != 0"));
    }
    let g = params.gamma;
    let e = -g * (params.pstar - t) / (t * params.pstar);
    Ok(dom.measure.powf(e) * lt.powf(g) * crit.powf(params.p - g))
}

/// Constant `K^γ` with `remainder_cor12 ≤ K^γ · remainder_thm11`, where `K`
/// is the weak-to-strong constant for `(t, p̄)` on a set of unit measure.
pub fn cor12_from_thm11_constant<T: Real>(params: &Params<T>, t: T) -> T {
    weak_to_strong_constant(t, params.pbar, T::one()).powf(params.gamma)
}

/// Evaluates both stability functionals of the Figalli–Zhang inequalities
/// on the whole space.
pub fn fz_lower_functionals<T: Real>(lab: &Lab<T>, u: &RadialProfile<T>) -> Result<FzFunctionals<T>> {
    let params = &lab.params;
    let whole = DomainBall::whole_space();
    let grad = grad_lp_norm(params, u, &whole, &lab.cfg)?;
    let crit = lq_norm(params, u, params.pstar, &whole, &lab.cfg)?;
    let d = project(&lab.bubble, u, &lab.cfg)?.distance;
    let g = params.gamma;
    let lhs_1_8 = grad / crit - lab.sharp_s();
    let rhs_1_8 = (d / grad).powf(g);
    let lhs_1_9 = deficit_from_norms(lab, grad, crit);
    let rhs_1_9 = d.powf(g) * grad.powf(params.p - g);
    let off = d > T::lit(ON_MANIFOLD_TOL) * grad;
    let ratio = |a: T, b: T| if off && b > T::zero() { Some(a / b) } else { None };
    Ok(FzFunctionals {
        lhs_1_8,
        rhs_1_8,
        lhs_1_9,
        rhs_1_9,
        distance: d,
        ratio_1_8: ratio(lhs_1_8, rhs_1_8),
        ratio_1_9: ratio(lhs_1_9, rhs_1_9),
    })
}

/// `d^ζ ‖∇u‖^{p-ζ}` with `d` the distance to the extremal manifold.
pub fn thm13_upper_cap<T: Real>(lab: &Lab<T>, u: &RadialProfile<T>) -> Result<T> {
    let grad = grad_lp_norm(&lab.params, u, &DomainBall::whole_space(), &lab.cfg)?;
    let d = project(&lab.bubble, u, &lab.cfg)?.distance;
    Ok(thm13_cap_from(&lab.params, d, grad))
}

pub fn thm13_cap_from<T: Real>(params: &Params<T>, distance: T, grad: T) -> T {
    distance.powf(params.zeta) * grad.powf(params.p - params.zeta)
}

/// Full report for one profile. Norms are taken over `dom`; the distance
/// is always the whole-space distance.
pub fn deficit_report<T: Real>(lab: &Lab<T>, u: &RadialProfile<T>, dom: &DomainBall<T>) -> Result<DeficitReport<T>> {
    let params = &lab.params;
    let cfg = &lab.cfg;
    let grad = grad_lp_norm(params, u, dom, cfg)?;
    let crit = lq_norm(params, u, params.pstar, dom, cfg)?;
    let def = deficit_from_norms(lab, grad, crit);
    let thm11_ok = params.weak_norm_valid && dom.is_bounded();
    let weak = if params.weak_norm_valid {
        weak_norm(params, u, params.pbar, dom, cfg)?.value()
    } else {
        T::nan()
    };
    let remainder = if thm11_ok {
        thm11_from_norms(params, dom.measure, weak, crit)
    } else {
        T::nan()
    };
    let distance = project(&lab.bubble, u, cfg)?.distance;
    let cap = thm13_cap_from(params, distance, grad);
    let mut ratios = BTreeMap::new();
    if thm11_ok && remainder > T::zero() {
        ratios.insert("deficit_over_thm11".to_string(), def / remainder);
    }
    if cap > T::zero() {
        ratios.insert("deficit_over_thm13_cap".to_string(), def / cap);
        let fz = distance.powf(params.gamma) * grad.powf(params.p - params.gamma);
        ratios.insert("deficit_over_fz19".to_string(), def / fz);
    }
    Ok(DeficitReport {
        grad_p: grad,
        crit,
        weak,
        deficit: def,
        remainder_thm11: remainder,
        remainder_thm13_cap: cap,
        distance,
        ratios,
    })
}

/// `ρ`, `C̲`, `ℬ` for given bounds `c0 ≤ ‖∇u‖_p ≤ C0`.
#[allow(non_snake_case)]
pub fn proof_constants<T: Real>(lab: &Lab<T>, c0: T, C0: T) -> Result<ProofConstants<T>> {
    let params = &lab.params;
    if !(c0 > T::zero() && c0 <= C0 && C0.is_finite()) {
        return Err(LabError::domain(format!("need 0 < c0 <= C0 < inf (got c0={c0}, C0={C0})")));
    }
    params.require_weak_valid()?;
    let s = lab.sharp_s();
    let grad_u = lab.grad_norm_u();
    let gamma = lab.bubble.gamma();
    let omega = params.sphere();
    let n = params.dim();
    let p = params.p;
    let ps = params.pstar;
    let one = T::one();
    let tail1 = tail_integral(params, one, &lab.cfg)?;
    let K = s * gamma * (omega * tail1).powf(ps.recip()) / grad_u;
    let rho = c0 * K / (one + K);
    let two_n = T::lit(2.0).powi(-(params.n as i32));
    let lead = (c0 - rho) * s * gamma / grad_u;
    let C_under = lead * (two_n * omega * n / (p - one)).powf(ps.recip());
    let C_under_corrected = lead * (two_n * omega * (p - one) / n).powf(ps.recip());
    let weak_u = lab.constants.weak_norm_u.value();
    let e = (ps * (p - one)).recip();
    let s_pow = s.powf(ps / (ps - p));
    let B = (C0 + rho) * weak_u / (C_under * omega.powf(e) * s_pow) + s.recip();
    let B_corrected = (C0 + rho) * weak_u / (C_under_corrected * (omega / n).powf(e) * s_pow) + s.recip();
    Ok(ProofConstants {
        c0,
        C0,
        rho,
        C_under,
        B,
        K,
        C_under_corrected,
        B_corrected,
    })
}

/// Verifies `‖u‖_{L^{p̄}_w(B_R)} ≤ ℬ |B_R|^{1/(p*(p-1))} d` after checking the
/// hypotheses on `u`.
pub fn lemma21_check<T: Real>(
    lab: &Lab<T>,
    u: &RadialProfile<T>,
    dom: &DomainBall<T>,
    consts: &ProofConstants<T>,
) -> Result<Lemma21Check<T>> {
    lemma21_check_with(lab, u, dom, consts, T::lit(SMALL_DEFICIT_FRACTION))
}

/// [`lemma21_check`] with an explicit small-deficit threshold `deficit < frac·S^p`.
pub fn lemma21_check_with<T: Real>(
    lab: &Lab<T>,
    u: &RadialProfile<T>,
    dom: &DomainBall<T>,
    consts: &ProofConstants<T>,
    frac: T,
) -> Result<Lemma21Check<T>> {
    let params = &lab.params;
    let cfg = &lab.cfg;
    require_weak_hypothesis(params)?;
    if !dom.is_bounded() {
        return Err(LabError::hypothesis("u must be supported in a ball B_R with R finite"));
    }
    let slack = T::lit(1e-9);
    if u.support_radius() > dom.radius * (T::one() + slack) {
        return Err(LabError::hypothesis(format!(
            "u must be supported in B_R (support {} > R = {})",
            u.support_radius(),
            dom.radius
        )));
    }
    if u.min_on_grid(dom.radius) < T::zero() {
        return Err(LabError::hypothesis("u must be nonnegative"));
    }
    if !u.is_radially_decreasing(dom.radius, T::lit(1e-12)) {
        return Err(LabError::hypothesis("u must be radially decreasing"));
    }
    let grad = grad_lp_norm(params, u, dom, cfg)?;
    let crit = lq_norm(params, u, params.pstar, dom, cfg)?;
    if (crit - T::one()).abs() > T::lit(1e-6) {
        return Err(LabError::hypothesis(format!("u must have unit L^p* norm (got {crit})")));
    }
    let def = deficit_from_norms(lab, grad, crit);
    let threshold = frac * lab.sharp_s().powf(params.p);
    if !(def < threshold) {
        return Err(LabError::hypothesis(format!(
            "deficit must be small: {def:e} >= {threshold:e}"
        )));
    }
    let lhs = weak_norm(params, u, params.pbar, dom, cfg)?.value();
    let proj = project(&lab.bubble, u, cfg)?;
    let d = proj.distance;
    let vol = dom.measure.powf((params.pstar * (params.p - T::one())).recip());
    let rhs = consts.B * vol * d;
    let rhs_corrected = consts.B_corrected * vol * d;
    Ok(Lemma21Check {
        lhs,
        rhs,
        holds: lhs <= rhs,
        rhs_corrected,
        holds_corrected: lhs <= rhs_corrected,
        distance: d,
        c_opt: proj.c_opt,
        lambda_opt: proj.lambda_opt,
        distance_below_rho: d < consts.rho,
    })
}

/// Compares the exact bubble mass outside `B_R` with its lower bound from
/// `(1 + r^{p/(p-1)})^{-N} ≥ 2^{-N} r^{-Np/(p-1)}` for `r ≥ 1`.
pub fn tail_lower_bound_check<T: Real>(lab: &Lab<T>, lambda: T, radius: T) -> Result<TailCheck<T>> {
    let params = &lab.params;
    let lr = lambda * radius;
    if !(lr >= T::one()) {
        return Err(LabError::hypothesis(format!("tail bound needs λR >= 1 (got {lr})")));
    }
    let gamma = lab.bubble.gamma();
    let omega = params.sphere();
    let n = params.dim();
    let pm1 = params.p - T::one();
    let exact = gamma.powf(params.pstar) * omega * tail_integral(params, lr, &lab.cfg)?;
    let front = T::lit(2.0).powi(-(params.n as i32)) * gamma.powf(params.pstar) * omega * lr.powf(-n / pm1);
    let bound = front * pm1 / n;
    let bound_displayed = front * n / pm1;
    Ok(TailCheck {
        lambda_r: lr,
        exact,
        bound,
        holds: exact >= bound,
        bound_displayed,
        holds_displayed: exact >= bound_displayed,
        lambda_r_ge_1: true,
    })
}

/// Re-derives the power of `R` in the lower bound on the distance.
pub fn exponent_check<T: Real>(params: &Params<T>) -> ExponentCheck<T> {
    let n = params.dim();
    let p = params.p;
    let derived = n / (p - T::one()) / params.pstar;
    let displayed = (n - p) / (p * (p - T::one()));
    ExponentCheck {
        derived,
        displayed,
        matches: (derived - displayed).abs() <= T::lit(64.0) * T::epsilon() * displayed.abs(),
    }
}

fn require_orthogonal<T: Real>(lab: &Lab<T>, dec: &Decomposition<T>) -> Result<()> {
    let (first, second) = orthogonality_residuals(&lab.bubble, dec, &lab.cfg)?;
    let tol = T::lit(1e-4);
    if first.abs() >= tol || second.abs() >= tol {
        return Err(LabError::hypothesis(format!(
            "perturbation is not orthogonal to the bubble (residuals {first:e}, {second:e})"
        )));
    }
    Ok(())
}

/// `(deficit(c U_λ + d w), bound)` where `bound` is the second-order upper
/// expansion: for `p ≥ 2`
/// `p(p-1)/2 · 2^{(p-1)(p-2)/p} (|c|^p‖∇U‖^p + d^p)^{(p-2)/p} d²`,
/// for `p < 2` `γ_p d^p` with `gamma_p` supplied by the caller.
pub fn upper_expansion_bound<T: Real>(lab: &Lab<T>, dec: &Decomposition<T>, gamma_p: Option<T>) -> Result<(T, T)> {
    let params = &lab.params;
    let p = params.p;
    let two = T::lit(2.0);
    let bound = if p >= two {
        let grad_pow = dec.bubble.c.abs().powf(p) * lab.grad_norm_u().powf(p);
        let d = dec.d;
        p * (p - T::one()) / two
            * two.powf((p - T::one()) * (p - two) / p)
            * (grad_pow + d.powf(p)).powf((p - two) / p)
            * d * d
    } else {
        let g = gamma_p.ok_or_else(|| LabError::domain("p < 2 needs an estimate of gamma_p"))?;
        g * dec.d.powf(p)
    };
    if dec.d == T::zero() {
        return Ok((T::zero(), T::zero()));
    }
    require_orthogonal(lab, dec)?;
    let u = dec.reconstruct(&lab.bubble);
    let value = deficit(lab, &u, &DomainBall::whole_space())?;
    Ok((value, bound))
}

/// `(‖u‖^p_{p*}, |c|^p ‖U‖^p_{p*})` for `u = c U_λ + d w`.
pub fn unit_lower_bound_crit<T: Real>(lab: &Lab<T>, dec: &Decomposition<T>) -> Result<(T, T)> {
    let params = &lab.params;
    let p = params.p;
    let u = dec.reconstruct(&lab.bubble);
    let lhs = lq_norm(params, &u, params.pstar, &DomainBall::whole_space(), &lab.cfg)?.powf(p);
    let rhs = dec.bubble.c.abs().powf(p) * lab.constants.crit_norm_u.powf(p);
    Ok((lhs, rhs))
}
