//! Problem parameters: dimension, Sobolev exponent and every derived exponent.

use serde::Serialize;

use crate::error::{LabError, Result};
use crate::scalar::Real;

/// Dimension `N`, exponent `p` and the exponents derived from them.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Params<T> {
    pub n: usize,
    pub p: T,
    /// Critical exponent `pN/(N-p)`.
    pub pstar: T,
    /// Critical remainder exponent `p*(p-1)/p`.
    pub pbar: T,
    /// Lower stability exponent `max{2,p}`.
    pub gamma: T,
    /// Upper stability exponent `min{2,p}`.
    pub zeta: T,
    /// `p > 2N/(N+1)`, equivalently `pbar > 1`.
    pub weak_norm_valid: bool,
}

impl<T: Real> Params<T> {
    pub fn new(n: usize, p: T) -> Result<Self> {
        derive_params(n, p)
    }

    pub fn dim(&self) -> T {
        T::from_usize_lossy(self.n)
    }

    /// Hölder conjugate `p/(p-1)`, the exponent of `|x|` inside the bubble.
    pub fn conjugate(&self) -> T {
        self.p / (self.p - T::one())
    }

    /// Scaling exponent `(N-p)/p` of the dilation `λ^{(N-p)/p} U(λx)`.
    pub fn scaling_exponent(&self) -> T {
        (self.dim() - self.p) / self.p
    }

    /// Far-field decay exponent `(N-p)/(p-1)`: `U(r) ~ r^{-(N-p)/(p-1)}`.
    pub fn decay_exponent(&self) -> T {
        (self.dim() - self.p) / (self.p - T::one())
    }

    /// Threshold `2N/(N+1)` for the weak remainder norm to make sense.
    pub fn weak_threshold(&self) -> T {
        T::lit(2.0) * self.dim() / (self.dim() + T::one())
    }

    /// Surface measure of the unit sphere in `R^N`.
    pub fn sphere(&self) -> T {
        sphere_measure(self.n)
    }

    pub fn require_weak_valid(&self) -> Result<()> {
        if self.weak_norm_valid {
            Ok(())
        } else {
            Err(LabError::domain(format!(
                "weak remainder norm requires p > 2N/(N+1) = {:.6} (got N={}, p={})",
                self.weak_threshold(),
                self.n,
                self.p
            )))
        }
    }
}

/// Validates `(N, p)` and derives `p*`, `p̄`, `γ`, `ζ`.
pub fn derive_params<T: Real>(n: usize, p: T) -> Result<Params<T>> {
    if n < 2 {
        return Err(LabError::domain(format!("dimension N must satisfy N >= 2 (got {n})")));
    }
    let dim = T::from_usize_lossy(n);
    if !p.is_finite() || p <= T::one() {
        return Err(LabError::domain(format!("exponent p must satisfy p > 1 (got {p})")));
    }
    if p >= dim {
        return Err(LabError::domain(format!("exponent p must satisfy p < N = {n} (got {p})")));
    }
    let two = T::lit(2.0);
    let pstar = p * dim / (dim - p);
    let pbar = pstar * (p - T::one()) / p;
    let threshold = two * dim / (dim + T::one());
    Ok(Params {
        n,
        p,
        pstar,
        pbar,
        gamma: two.max(p),
        zeta: two.min(p),
        weak_norm_valid: p > threshold,
    })
}

/// Surface measure `2 π^{N/2} / Γ(N/2)` of the unit sphere in `R^N`.
pub fn sphere_measure<T: Real>(n: usize) -> T {
    let half_n = T::from_usize_lossy(n) / T::lit(2.0);
    T::lit(2.0) * T::PI().powf(half_n) / gamma_half_integer::<T>(n)
}

/// `Γ(n/2)` for a positive integer `n`, by the recursion `Γ(x+1) = xΓ(x)`.
fn gamma_half_integer<T: Real>(n: usize) -> T {
    let half = T::lit(0.5);
    let (mut x, mut g) = if n % 2 == 0 {
        (T::one(), T::one())
    } else {
        (half, T::PI().sqrt())
    };
    let target = T::from_usize_lossy(n) * half;
    while x < target - T::lit(0.25) {
        g = g * x;
        x = x + T::one();
    }
    g
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use std::f64::consts::PI;

    #[test]
    fn n3_p2() {
        let pr = derive_params(3, 2.0f64).unwrap();
        assert_eq!(pr.pstar, 6.0);
        assert_eq!(pr.pbar, 3.0);
        assert_eq!(pr.gamma, 2.0);
        assert_eq!(pr.zeta, 2.0);
        assert!(pr.weak_norm_valid);
    }

    #[test]
    fn n3_p15_sits_on_threshold() {
        let pr = derive_params(3, 1.5f64).unwrap();
        assert_eq!(pr.pstar, 3.0);
        assert_relative_eq!(pr.pbar, 1.0, epsilon = 1e-15);
        assert!(!pr.weak_norm_valid);
    }

    #[test]
    fn n2_p15() {
        let pr = derive_params(2, 1.5f64).unwrap();
        assert_relative_eq!(pr.pstar, 6.0, epsilon = 1e-14);
        assert_relative_eq!(pr.pbar, 2.0, epsilon = 1e-14);
        assert_eq!(pr.gamma, 2.0);
        assert_eq!(pr.zeta, 1.5);
        assert!(pr.weak_norm_valid);
    }

    #[test]
    fn out_of_range_inputs_name_the_bound() {
        let e = derive_params(1, 1.5f64).unwrap_err();
        assert!(e.to_string().contains("N >= 2"));
        let e = derive_params(3, 1.0f64).unwrap_err();
        assert!(e.to_string().contains("p > 1"));
        let e = derive_params(3, 3.0f64).unwrap_err();
        assert!(e.to_string().contains("p < N"));
        assert!(derive_params(3, f64::NAN).is_err());
    }

    #[test]
    fn sphere_measures() {
        assert_relative_eq!(sphere_measure::<f64>(2), 2.0 * PI, max_relative = 1e-15);
        assert_relative_eq!(sphere_measure::<f64>(3), 4.0 * PI, max_relative = 1e-15);
        assert_relative_eq!(sphere_measure::<f64>(4), 2.0 * PI * PI, max_relative = 1e-15);
        // |S^4| = 8π²/3, |S^5| = π³
        assert_relative_eq!(sphere_measure::<f64>(5), 8.0 * PI * PI / 3.0, max_relative = 1e-14);
        assert_relative_eq!(sphere_measure::<f64>(6), PI.powi(3), max_relative = 1e-14);
        assert!((sphere_measure::<f32>(3) - 4.0 * std::f32::consts::PI).abs() < 1e-5);
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn exponent_invariants(n in 2usize..9, frac in 0.001f64..0.999) {
                let p = 1.0 + frac * (n as f64 - 1.0);
                let pr = derive_params(n, p).unwrap();
                prop_assert!(pr.pstar > pr.p);
                prop_assert!((pr.gamma * pr.zeta - 2.0 * p).abs() < 1e-12);
                prop_assert!(pr.gamma >= 2.0 && pr.zeta <= 2.0);
                let thr = 2.0 * n as f64 / (n as f64 + 1.0);
                if (p - thr).abs() > 1e-9 {
                    prop_assert_eq!(pr.weak_norm_valid, pr.pbar > 1.0);
                }
            }
        }
    }
}
