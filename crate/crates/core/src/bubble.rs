//! The Aubin–Talenti extremal family `c λ^{(N-p)/p} U(λ r)` with
//! `U(r) = γ_{N,p} (1 + r^{p/(p-1)})^{-(N-p)/p}`.

use std::collections::HashMap;
use std::sync::{Arc, OnceLock, RwLock};

use serde::Serialize;

use crate::error::{LabError, Result};
use crate::norms::{grad_lp_norm, lq_norm};
use crate::params::Params;
use crate::profile::{DomainBall, ProfileKind, RadialProfile};
use crate::quadrature::QuadConfig;
use crate::scalar::Real;
use crate::weak::{weak_norm, WeakNorm};

/// Amplitude and scale of a centered extremal `c U_{λ,0}`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BubbleSpec<T> {
    pub c: T,
    pub lambda: T,
}

impl<T: Real> BubbleSpec<T> {
    pub fn new(c: T, lambda: T) -> Result<Self> {
        if !(lambda > T::zero()) || !lambda.is_finite() || !c.is_finite() {
            return Err(LabError::domain(format!(
                "bubble needs finite c and lambda > 0 (got c={c}, lambda={lambda})"
            )));
        }
        Ok(Self { c, lambda })
    }

    /// `U` itself.
    pub fn unit() -> Self {
        Self {
            c: T::one(),
            lambda: T::one(),
        }
    }
}

/// Evaluator for the extremal family at fixed `(N, p)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bubble<T> {
    params: Params<T>,
    gamma: T,
    q: T,
    a: T,
}

impl<T: Real> Bubble<T> {
    pub fn new(params: Params<T>) -> Self {
        let gamma = normalization_gamma(&params);
        Self {
            params,
            gamma,
            q: params.conjugate(),
            a: params.scaling_exponent(),
        }
    }

    pub fn params(&self) -> &Params<T> {
        &self.params
    }

    /// `γ_{N,p} = U(0)`.
    pub fn gamma(&self) -> T {
        self.gamma
    }

    /// `U(s)`.
    pub fn unit_value(&self, s: T) -> T {
        self.gamma * (T::one() + s.powf(self.q)).powf(-self.a)
    }

    /// `U'(s)`.
    pub fn unit_derivative(&self, s: T) -> T {
        let base = T::one() + s.powf(self.q);
        -self.a * self.q * self.gamma * s.powf(self.q - T::one()) * base.powf(-self.a - T::one())
    }

    /// `s U''(s)`, finite at `s = 0` for every `p`.
    fn unit_s_second(&self, s: T) -> T {
        let sq = s.powf(self.q);
        let base = T::one() + sq;
        let (a, q) = (self.a, self.q);
        let first = (q - T::one()) * s.powf(q - T::one()) * base.powf(-a - T::one());
        let second = (a + T::one()) * q * s.powf(T::lit(2.0) * q - T::one()) * base.powf(-a - T::lit(2.0));
        -a * q * self.gamma * (first - second)
    }

    /// `c λ^{(N-p)/p} U(λ r)`.
    pub fn value(&self, spec: &BubbleSpec<T>, r: T) -> T {
        spec.c * spec.lambda.powf(self.a) * self.unit_value(spec.lambda * r)
    }

    /// Radial derivative of [`Bubble::value`].
    pub fn derivative(&self, spec: &BubbleSpec<T>, r: T) -> T {
        spec.c * spec.lambda.powf(self.a + T::one()) * self.unit_derivative(spec.lambda * r)
    }

    /// `∂_λ U_{λ,0}(r)` (amplitude excluded).
    pub fn lambda_derivative(&self, lambda: T, r: T) -> T {
        let s = lambda * r;
        lambda.powf(self.a - T::one()) * (self.a * self.unit_value(s) + s * self.unit_derivative(s))
    }

    /// Radial derivative of `∂_λ U_{λ,0}`.
    pub fn lambda_derivative_dr(&self, lambda: T, r: T) -> T {
        let s = lambda * r;
        lambda.powf(self.a) * ((self.a + T::one()) * self.unit_derivative(s) + self.unit_s_second(s))
    }

    /// The bubble as a radial profile on the whole space.
    pub fn profile(&self, spec: BubbleSpec<T>) -> RadialProfile<T> {
        let (b1, b2) = (*self, *self);
        RadialProfile::from_fns(
            move |r| b1.value(&spec, r),
            move |r| b2.derivative(&spec, r),
            T::infinity(),
            ProfileKind::AnalyticBubble,
        )
        .with_breakpoints([T::one() / spec.lambda])
    }

    /// `(c U_λ - c U_λ(R))_+` supported in `B_R`.
    pub fn truncated(&self, spec: BubbleSpec<T>, radius: T) -> Result<RadialProfile<T>> {
        if !(radius > T::zero()) || !radius.is_finite() {
            return Err(LabError::domain("truncation radius must be finite and positive"));
        }
        let (b1, b2) = (*self, *self);
        let edge = self.value(&spec, radius);
        Ok(RadialProfile::from_fns(
            move |r| (b1.value(&spec, r) - edge).max(T::zero()),
            move |r| {
                if b2.value(&spec, r) > edge {
                    b2.derivative(&spec, r)
                } else {
                    T::zero()
                }
            },
            radius,
            ProfileKind::TruncatedBubble,
        )
        .with_breakpoints([T::one() / spec.lambda]))
    }

    /// `∂_λ U_{λ,0}` as a profile.
    pub fn lambda_tangent(&self, lambda: T) -> RadialProfile<T> {
        let (b1, b2) = (*self, *self);
        RadialProfile::from_fns(
            move |r| b1.lambda_derivative(lambda, r),
            move |r| b2.lambda_derivative_dr(lambda, r),
            T::infinity(),
            ProfileKind::AnalyticBubble,
        )
        .with_breakpoints([T::one() / lambda])
    }

    /// Residual of the critical equation for `c U_{λ,0}` at radius `r`.
    pub fn residual(&self, spec: &BubbleSpec<T>, r: T) -> Result<T> {
        bubble_residual(self, spec, r)
    }
}

/// `γ_{N,p}`: the amplitude for which `γ V` with `V(r) = (1+r^{p/(p-1)})^{-(N-p)/p}`
/// solves `-Δ_p u = u^{p*-1}`.
///
/// `-Δ_p` is homogeneous of degree `p-1`, so `γ^{p*-p}` equals the ratio
/// `(-Δ_p V)/V^{p*-1}`; it is evaluated at `r = 1` with a Richardson
/// extrapolated flux derivative.
pub fn normalization_gamma<T: Real>(params: &Params<T>) -> T {
    let q = params.conjugate();
    let a = params.scaling_exponent();
    let v = move |r: T| (T::one() + r.powf(q)).powf(-a);
    let dv = move |r: T| -a * q * r.powf(q - T::one()) * (T::one() + r.powf(q)).powf(-a - T::one());
    let r0 = T::one();
    let lap = -radial_p_divergence(params, &dv, r0);
    let ratio = lap / v(r0).powf(params.pstar - T::one());
    ratio.powf(T::one() / (params.pstar - params.p))
}

/// `r^{1-N} d/dr (r^{N-1} |u'|^{p-2} u')` by Richardson-extrapolated central
/// differences of the flux.
pub(crate) fn radial_p_divergence<T: Real, D: Fn(T) -> T>(params: &Params<T>, du: &D, r: T) -> T {
    let n1 = params.dim() - T::one();
    let p = params.p;
    let flux = |x: T| x.powf(n1) * du(x).signed_pow(p);
    const LEVELS: usize = 5;
    let mut table = [[T::zero(); LEVELS]; LEVELS];
    let mut h = r * T::lit(0.1);
    for k in 0..LEVELS {
        table[k][0] = (flux(r + h) - flux(r - h)) / (T::lit(2.0) * h);
        let mut factor = T::one();
        for j in 1..=k {
            factor = factor * T::lit(4.0);
            table[k][j] = table[k][j - 1] + (table[k][j - 1] - table[k - 1][j - 1]) / (factor - T::one());
        }
        h = h * T::lit(0.5);
    }
    table[LEVELS - 1][LEVELS - 1] / r.powf(n1)
}

/// `-r^{1-N}(r^{N-1}|u'|^{p-2}u')' - |u|^{p*-2}u` for `u = c U_{λ,0}`.
pub fn bubble_residual<T: Real>(bubble: &Bubble<T>, spec: &BubbleSpec<T>, r: T) -> Result<T> {
    if !(r > T::zero()) || !r.is_finite() {
        return Err(LabError::domain(format!("residual needs r > 0 (got {r})")));
    }
    let params = bubble.params();
    let du = |x: T| bubble.derivative(spec, x);
    let lap = -radial_p_divergence(params, &du, r);
    let u = bubble.value(spec, r);
    Ok(lap - u.signed_pow(params.pstar))
}

/// `∫_a^∞ r^{N-1} (1 + r^{p/(p-1)})^{-N} dr`.
pub fn tail_integral<T: Real>(params: &Params<T>, a: T, cfg: &QuadConfig<T>) -> Result<T> {
    if !(a >= T::zero()) {
        return Err(LabError::domain(format!("tail integral needs a >= 0 (got {a})")));
    }
    if a.is_infinite() {
        return Ok(T::zero());
    }
    let q = params.conjugate();
    let n = params.dim();
    let n1 = n - T::one();
    let f = move |r: T| r.powf(n1) * (T::one() + r.powf(q)).powf(-n);
    let pts: Vec<T> = if a < T::one() {
        vec![a, T::one(), T::infinity()]
    } else {
        vec![a, T::infinity()]
    };
    Ok(cfg.integrate_pieces(f, &pts)?.value)
}

/// Norms and constants of the unit bubble at fixed `(N, p)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(bound = "T: Real")]
pub struct BubbleConstants<T> {
    pub gamma_np: T,
    /// `‖∇U‖_p`.
    pub grad_norm_u: T,
    /// `‖U‖_{p*}`.
    pub crit_norm_u: T,
    /// Sharp Sobolev constant `‖∇U‖_p / ‖U‖_{p*}`.
    pub sharp_s: T,
    /// `‖U‖` in weak `L^{p̄}` over the whole space.
    pub weak_norm_u: WeakNorm<T>,
    pub sphere_measure: T,
}

impl<T: Real> BubbleConstants<T> {
    /// `S` from the power identity `‖∇U‖_p = S^{p*/(p*-p)}`.
    pub fn sharp_s_from_power(&self, params: &Params<T>) -> T {
        self.grad_norm_u.powf((params.pstar - params.p) / params.pstar)
    }
}

/// Computes every bubble constant by radial quadrature.
pub fn bubble_constants<T: Real>(params: &Params<T>, cfg: &QuadConfig<T>) -> Result<BubbleConstants<T>> {
    let bubble = Bubble::new(*params);
    let u = bubble.profile(BubbleSpec::unit());
    let whole = DomainBall::whole_space();
    let grad_norm_u = grad_lp_norm(params, &u, &whole, cfg)?;
    let crit_norm_u = lq_norm(params, &u, params.pstar, &whole, cfg)?;
    let weak_norm_u = if params.weak_norm_valid {
        weak_norm(params, &u, params.pbar, &whole, cfg)?
    } else {
        WeakNorm::Unbounded
    };
    Ok(BubbleConstants {
        gamma_np: bubble.gamma(),
        grad_norm_u,
        crit_norm_u,
        sharp_s: grad_norm_u / crit_norm_u,
        weak_norm_u,
        sphere_measure: params.sphere(),
    })
}

/// Read-mostly table of bubble constants keyed by `(N, p)`.
#[derive(Debug, Default)]
pub struct BubbleTable<T> {
    entries: RwLock<HashMap<(usize, u64), Arc<BubbleConstants<T>>>>,
}

impl<T: Real> BubbleTable<T> {
    pub fn new() -> Self {
        Self {
            entries: RwLock::new(HashMap::new()),
        }
    }

    pub fn get_or_compute(&self, params: &Params<T>, cfg: &QuadConfig<T>) -> Result<Arc<BubbleConstants<T>>> {
        let key = (params.n, params.p.as_f64().to_bits());
        if let Some(hit) = self.entries.read().expect("bubble table poisoned").get(&key) {
            return Ok(hit.clone());
        }
        let computed = Arc::new(bubble_constants(params, cfg)?);
        let mut w = self.entries.write().expect("bubble table poisoned");
        Ok(w.entry(key).or_insert(computed).clone())
    }

    pub fn len(&self) -> usize {
        self.entries.read().expect("bubble table poisoned").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Process-wide `f64` table at default tolerances.
pub fn global_constants(params: &Params<f64>) -> Result<Arc<BubbleConstants<f64>>> {
    static TABLE: OnceLock<BubbleTable<f64>> = OnceLock::new();
    TABLE
        .get_or_init(BubbleTable::new)
        .get_or_compute(params, &QuadConfig::default())
}
