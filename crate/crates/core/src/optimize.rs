//! Derivative-free optimizers: golden-section search and Nelder–Mead.

use crate::scalar::Real;

/// Result of a one-dimensional search.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LineOptimum<T> {
    pub x: T,
    pub value: T,
    pub evaluations: usize,
}

/// Golden-section search for the minimum of `f` on `[a, b]`.
///
/// Stops when the bracket is narrower than `tol·(1+|x|)` or after `max_iter`
/// iterations. The returned value is the best one seen, endpoints included.
pub fn golden_min<T: Real, F: FnMut(T) -> T>(mut f: F, a: T, b: T, tol: T, max_iter: usize) -> LineOptimum<T> {
    let inv_phi = T::lit(0.618_033_988_749_894_8);
    let (mut lo, mut hi) = if a <= b { (a, b) } else { (b, a) };
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let mut f1 = f(x1);
    let mut f2 = f(x2);
    let mut evals = 2;
    for _ in 0..max_iter {
        if (hi - lo).abs() <= tol * (T::one() + x1.abs().max(x2.abs())) {
            break;
        }
        if f1 <= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = f(x1);
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = f(x2);
        }
        evals += 1;
    }
    let (mut x, mut v) = if f1 <= f2 { (x1, f1) } else { (x2, f2) };
    for end in [lo, hi] {
        let fe = f(end);
        evals += 1;
        if fe < v {
            x = end;
            v = fe;
        }
    }
    LineOptimum {
        x,
        value: v,
        evaluations: evals,
    }
}

/// Golden-section search for the maximum of `f` on `[a, b]`.
pub fn golden_max<T: Real, F: FnMut(T) -> T>(mut f: F, a: T, b: T, tol: T, max_iter: usize) -> LineOptimum<T> {
    let r = golden_min(|x| -f(x), a, b, tol, max_iter);
    LineOptimum { value: -r.value, ..r }
}

/// Options for [`nelder_mead`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NelderMeadOptions<T> {
    /// Initial simplex step per coordinate.
    pub step: [T; 2],
    /// Convergence threshold on the simplex diameter in parameter space.
    pub x_tol: T,
    /// Convergence threshold on the spread of objective values.
    pub f_tol: T,
    pub max_evals: usize,
}

impl<T: Real> Default for NelderMeadOptions<T> {
    fn default() -> Self {
        Self {
            step: [T::lit(0.05), T::lit(0.05)],
            x_tol: T::lit(T::OPT_TOL),
            f_tol: T::zero(),
            max_evals: 2000,
        }
    }
}

/// Outcome of a Nelder–Mead run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimplexOptimum<T> {
    pub x: [T; 2],
    pub value: T,
    pub evaluations: usize,
    pub converged: bool,
}

/// Two-dimensional Nelder–Mead with the standard coefficients (1, 2, ½, ½).
///
/// Deterministic: the initial simplex is `x0`, `x0 + step₀e₀`, `x0 + step₁e₁`
/// and ties are broken by vertex order.
pub fn nelder_mead<T: Real, F: FnMut([T; 2]) -> T>(mut f: F, x0: [T; 2], opts: &NelderMeadOptions<T>) -> SimplexOptimum<T> {
    let half = T::lit(0.5);
    let two = T::lit(2.0);
    let mut simplex = [x0, [x0[0] + opts.step[0], x0[1]], [x0[0], x0[1] + opts.step[1]]];
    let mut values = [f(simplex[0]), f(simplex[1]), f(simplex[2])];
    let mut evals = 3;
    let mut converged = false;

    let lin = |a: [T; 2], b: [T; 2], t: T| [a[0] + t * (b[0] - a[0]), a[1] + t * (b[1] - a[1])];

    while evals < opts.max_evals {
        // order vertices: best first
        let mut idx = [0usize, 1, 2];
        idx.sort_by(|&i, &j| values[i].partial_cmp(&values[j]).unwrap_or(std::cmp::Ordering::Equal));
        simplex = [simplex[idx[0]], simplex[idx[1]], simplex[idx[2]]];
        values = [values[idx[0]], values[idx[1]], values[idx[2]]];

        let diam = (1..3)
            .map(|k| (simplex[k][0] - simplex[0][0]).abs().max((simplex[k][1] - simplex[0][1]).abs()))
            .fold(T::zero(), T::max);
        let spread = (values[2] - values[0]).abs();
        if diam <= opts.x_tol && spread <= opts.f_tol.max(T::epsilon() * values[0].abs()) || diam <= opts.x_tol * T::lit(1e-3) {
            converged = true;
            break;
        }

        let centroid = [(simplex[0][0] + simplex[1][0]) * half, (simplex[0][1] + simplex[1][1]) * half];
        let worst = simplex[2];
        let reflected = lin(centroid, worst, -T::one());
        let fr = f(reflected);
        evals += 1;
        if fr < values[0] {
            let expanded = lin(centroid, worst, -two);
            let fe = f(expanded);
            evals += 1;
            if fe < fr {
                simplex[2] = expanded;
                values[2] = fe;
            } else {
                simplex[2] = reflected;
                values[2] = fr;
            }
            continue;
        }
        if fr < values[1] {
            simplex[2] = reflected;
            values[2] = fr;
            continue;
        }
        let (contracted, fc) = if fr < values[2] {
            let c = lin(centroid, worst, -half);
            (c, f(c))
        } else {
            let c = lin(centroid, worst, half);
            (c, f(c))
        };
        evals += 1;
        if fc < values[2].min(fr) {
            simplex[2] = contracted;
            values[2] = fc;
            continue;
        }
        // shrink towards the best vertex
        for k in 1..3 {
            simplex[k] = lin(simplex[0], simplex[k], half);
            values[k] = f(simplex[k]);
            evals += 1;
        }
    }

    let best = (0..3)
        .min_by(|&i, &j| values[i].partial_cmp(&values[j]).unwrap_or(std::cmp::Ordering::Equal))
        .unwrap_or(0);
    SimplexOptimum {
        x: simplex[best],
        value: values[best],
        evaluations: evals,
        converged,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn golden_finds_parabola_minimum() {
        let r = golden_min(|x: f64| (x - 0.3).powi(2) + 1.0, -2.0, 5.0, 1e-10, 200);
        assert!((r.x - 0.3).abs() < 1e-7);
        assert!((r.value - 1.0).abs() < 1e-15);
    }

    #[test]
    fn golden_max_handles_endpoint_maximum() {
        let r = golden_max(|x: f64| x, 0.0, 2.0, 1e-12, 200);
        assert_eq!(r.x, 2.0);
        assert_eq!(r.value, 2.0);
    }

    #[test]
    fn nelder_mead_rosenbrock() {
        let opts = NelderMeadOptions {
            step: [0.5, 0.5],
            x_tol: 1e-10,
            f_tol: 1e-20,
            max_evals: 10_000,
        };
        let r = nelder_mead(|x: [f64; 2]| (1.0 - x[0]).powi(2) + 100.0 * (x[1] - x[0] * x[0]).powi(2), [-1.2, 1.0], &opts);
        assert!(r.converged);
        assert!((r.x[0] - 1.0).abs() < 1e-6 && (r.x[1] - 1.0).abs() < 1e-6, "{:?}", r.x);
    }

    #[test]
    fn nelder_mead_cone_minimum() {
        // non-smooth at the minimizer, like a gradient distance at a manifold point
        let r = nelder_mead(
            |x: [f64; 2]| ((x[0] - 2.0).powi(2) + 4.0 * (x[1] + 1.0).powi(2)).sqrt(),
            [1.9, -0.8],
            &NelderMeadOptions::default(),
        );
        assert!(r.converged);
        assert!(r.value < 1e-8, "{}", r.value);
    }

    #[test]
    fn nelder_mead_is_deterministic() {
        let f = |x: [f64; 2]| (x[0].sin() + x[1] * x[1]).abs();
        let a = nelder_mead(f, [0.4, 0.2], &NelderMeadOptions::default());
        let b = nelder_mead(f, [0.4, 0.2], &NelderMeadOptions::default());
        assert_eq!(a, b);
    }
}
