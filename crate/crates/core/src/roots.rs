//! Simultaneous root iteration for univariate complex polynomials.

use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum RootError {
    #[error("root iteration did not converge in {0} steps")]
    NoConvergence(usize),
    #[error("polynomial is identically zero")]
    ZeroPolynomial,
}

/// Roots of `Σ c_k w^k` (ascending coefficients, nonzero leading and
/// constant terms expected).
///
/// Iteration stops once every root has backward error
/// `|p(w)| / Σ|c_k||w|^k ≤ tol`. `init`, when it has the right length, is
/// used as the starting approximation.
pub fn aberth(coeffs: &[Complex64], init: Option<&[Complex64]>, tol: f64, max_iter: usize) -> Result<Vec<Complex64>, RootError> {
    let d = coeffs.len().saturating_sub(1);
    if coeffs.iter().all(|c| *c == Complex64::new(0.0, 0.0)) {
        return Err(RootError::ZeroPolynomial);
    }
    if d == 0 {
        return Ok(vec![]);
    }
    if d == 1 {
        return Ok(vec![-coeffs[0] / coeffs[1]]);
    }
    let abs: Vec<f64> = coeffs.iter().map(|c| c.norm()).collect();
    let mut z: Vec<Complex64> = match init {
        Some(v) if v.len() == d && v.iter().all(|w| w.norm().is_finite() && w.norm() > 0.0) => v.to_vec(),
        _ => initial_guesses(&abs),
    };
    let mut done = vec![false; d];
    for _ in 0..max_iter {
        let mut all = true;
        for i in 0..d {
            if done[i] {
                continue;
            }
            let (ratio, berr) = newton_ratio(coeffs, &abs, z[i]);
            if berr <= tol {
                done[i] = true;
                continue;
            }
            all = false;
            let mut s = Complex64::new(0.0, 0.0);
            for j in 0..d {
                if j != i {
                    s += 1.0 / (z[i] - z[j]);
                }
            }
            let step = ratio / (1.0 - ratio * s);
            if step.re.is_finite() && step.im.is_finite() {
                z[i] -= step;
            } else {
                // coincident guesses: nudge off
                z[i] *= Complex64::from_polar(1.0 + 1e-3, 0.7);
            }
        }
        if all {
            return Ok(z);
        }
    }
    // final residual pass
    if z.iter().all(|&w| newton_ratio(coeffs, &abs, w).1 <= tol) {
        Ok(z)
    } else {
        Err(RootError::NoConvergence(max_iter))
    }
}

/// Returns `p(w)/p'(w)` and the backward error at `w`, evaluating in the
/// reversed variable when `|w| > 1`.
fn newton_ratio(c: &[Complex64], abs: &[f64], w: Complex64) -> (Complex64, f64) {
    let d = c.len() - 1;
    let r = w.norm();
    if r <= 1.0 {
        let mut p = c[d];
        let mut dp = Complex64::new(0.0, 0.0);
        let mut s = abs[d];
        for k in (0..d).rev() {
            dp = dp * w + p;
            p = p * w + c[k];
            s = s * r + abs[k];
        }
        (p / dp, p.norm() / s)
    } else {
        // q(y) = Σ c_k y^{d-k}, y = 1/w; p(w) = w^d q(y)
        let y = 1.0 / w;
        let ry = 1.0 / r;
        let mut q = c[0];
        let mut dq = Complex64::new(0.0, 0.0);
        let mut s = abs[0];
        for k in 1..=d {
            dq = dq * y + q;
            q = q * y + c[k];
            s = s * ry + abs[k];
        }
        // p'/p = (d - y q'/q) / w
        let ratio = w / (d as f64 - y * dq / q);
        (ratio, q.norm() / s)
    }
}

/// Starting points on circles read off the upper convex hull of
/// `(k, log|c_k|)`, as in Bini's method.
fn initial_guesses(abs: &[f64]) -> Vec<Complex64> {
    let d = abs.len() - 1;
    let pts: Vec<(f64, f64)> = abs
        .iter()
        .enumerate()
        .filter(|(_, a)| **a > 0.0)
        .map(|(k, a)| (k as f64, a.ln()))
        .collect();
    let mut hull: Vec<(f64, f64)> = Vec::new();
    for &p in &pts {
        while hull.len() >= 2 {
            let (a, b) = (hull[hull.len() - 2], hull[hull.len() - 1]);
            if (b.0 - a.0) * (p.1 - a.1) - (b.1 - a.1) * (p.0 - a.0) >= 0.0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push(p);
    }
    let mut out = Vec::with_capacity(d);
    for w in hull.windows(2) {
        let (k0, l0) = w[0];
        let (k1, l1) = w[1];
        let m = (k1 - k0) as usize;
        let radius = ((l0 - l1) / (k1 - k0)).exp();
        for j in 0..m {
            let ang = 2.0 * std::f64::consts::PI * j as f64 / m as f64 + 0.4 + k0;
            out.push(Complex64::from_polar(radius, ang));
        }
    }
    while out.len() < d {
        out.push(Complex64::from_polar(1.0, out.len() as f64));
    }
    out
}
