//! Adaptive double-exponential quadrature on finite intervals.

use crate::error::{Error, Result};

const MAX_DEPTH: u32 = 30;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Integral {
    pub value: f64,
    pub error_estimate: f64,
}

/// Integrate `f` over `[a, b]`, bisecting panels whose tanh-sinh estimate misses
/// its share of `abs_tol`.
pub fn integrate<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, abs_tol: f64) -> Result<Integral> {
    if a == b {
        return Ok(Integral { value: 0.0, error_estimate: 0.0 });
    }
    let mut total = Integral { value: 0.0, error_estimate: 0.0 };
    let mut stack = vec![(a, b, abs_tol, 0u32)];
    while let Some((lo, hi, tol, depth)) = stack.pop() {
        let out = quadrature::double_exponential::integrate(f, lo, hi, tol);
        if out.error_estimate <= tol || depth >= MAX_DEPTH {
            if !out.integral.is_finite() || (depth >= MAX_DEPTH && out.error_estimate > tol) {
                return Err(Error::Quadrature {
                    target: abs_tol,
                    achieved: out.error_estimate,
                });
            }
            total.value += out.integral;
            total.error_estimate += out.error_estimate;
        } else {
            let mid = 0.5 * (lo + hi);
            stack.push((mid, hi, 0.5 * tol, depth + 1));
            stack.push((lo, mid, 0.5 * tol, depth + 1));
        }
    }
    Ok(total)
}
