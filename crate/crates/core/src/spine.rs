//! Spine constants by torus quadrature, the piecewise-affine function ν and
//! the deformation family `f_t`.

use std::collections::BTreeMap;
use std::f64::consts::{E, PI};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::amoeba::{order_of_point, AmoebaError, ComponentReport, FiberSolveConfig};
use crate::lpoly::{ExponentVector, LaurentPolynomial, NewtonPolytope, PolyError};
use crate::trop::{
    tropicalize, DualSubdivision, SubdivisionOptions, TropError, TropicalCurve, TropicalPolynomial,
};

pub const DEFAULT_QUAD_N: usize = 256;
pub const RICHARDSON_TOLERANCE: f64 = 1e-6;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SpineError {
    #[error("quadrature size {0} is below 64")]
    QuadratureTooSmall(usize),
    #[error("point has order {found:?}, expected {expected:?}")]
    OrderMismatch { expected: [i64; 2], found: [i64; 2] },
    #[error("quadrature did not settle: |Q(n) - Q(2n)| = {0:.3e}")]
    NotConverged(f64),
    #[error("lattice point {0} lies in no cell of the subdivision")]
    Uncovered(String),
    #[error("t = {0} is outside (0, 1/e]")]
    TOutOfRange(f64),
    #[error("t schedule must be strictly decreasing inside (0, 1/e]")]
    BadSchedule,
    #[error("ν has no value at exponent {0}")]
    MissingNu(String),
    #[error(transparent)]
    Amoeba(#[from] AmoebaError),
    #[error(transparent)]
    Trop(#[from] TropError),
    #[error(transparent)]
    Poly(#[from] PolyError),
}

/// Torus mean of `log|f|` over `Log^{-1}(x)` on an `n × n` trapezoidal grid,
/// rows summed in parallel and combined pairwise.
pub fn ronkin_mean(f: &LaurentPolynomial, x: [f64; 2], n: usize) -> f64 {
    let terms: Vec<([f64; 2], Complex64)> = f
        .terms()
        .map(|(a, c)| ([a[0] as f64, a[1] as f64], c * (a[0] as f64 * x[0] + a[1] as f64 * x[1]).exp()))
        .collect();
    let h = 2.0 * PI / n as f64;
    let rows: Vec<f64> = (0..n)
        .into_par_iter()
        .map(|i| {
            let t1 = i as f64 * h;
            let vals: Vec<f64> = (0..n)
                .map(|j| {
                    let t2 = j as f64 * h;
                    let v: Complex64 =
                        terms.iter().map(|(a, b)| b * Complex64::from_polar(1.0, a[0] * t1 + a[1] * t2)).sum();
                    v.norm().ln()
                })
                .collect();
            pairwise_sum(&vals)
        })
        .collect();
    pairwise_sum(&rows) / (n * n) as f64
}

fn pairwise_sum(v: &[f64]) -> f64 {
    if v.len() <= 8 {
        return v.iter().sum();
    }
    let (a, b) = v.split_at(v.len() / 2);
    pairwise_sum(a) + pairwise_sum(b)
}

/// `c_α` from the torus mean at a point of the complement component of
/// order `alpha`, certified by comparing `quad_n` against `2·quad_n`.
pub fn c_alpha(f: &LaurentPolynomial, alpha: &ExponentVector, x: [f64; 2], quad_n: usize) -> Result<f64, SpineError> {
    if quad_n < 64 {
        return Err(SpineError::QuadratureTooSmall(quad_n));
    }
    let expected = [alpha[0], alpha[1]];
    let found = order_of_point(f, x, &FiberSolveConfig::default())?;
    if found != expected {
        return Err(SpineError::OrderMismatch { expected, found });
    }
    let shift = alpha[0] as f64 * x[0] + alpha[1] as f64 * x[1];
    let coarse = ronkin_mean(f, x, quad_n) - shift;
    let fine = ronkin_mean(f, x, 2 * quad_n) - shift;
    let gap = (coarse - fine).abs();
    if gap > RICHARDSON_TOLERANCE || !fine.is_finite() {
        return Err(SpineError::NotConverged(gap));
    }
    Ok(fine)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpineModel {
    pub orders_present: Vec<ExponentVector>,
    #[serde(with = "crate::io::pairs")]
    pub c: BTreeMap<ExponentVector, f64>,
    pub tropical: TropicalPolynomial,
    pub spine: TropicalCurve,
    pub subdivision: DualSubdivision,
}

pub fn build_spine(f: &LaurentPolynomial, report: &ComponentReport, quad_n: usize) -> Result<SpineModel, SpineError> {
    let values: Vec<Result<(ExponentVector, f64), SpineError>> = report
        .components
        .iter()
        .map(|comp| {
            let alpha = ExponentVector::from(comp.order);
            let c = c_alpha(f, &alpha, comp.witness, quad_n)?;
            Ok((alpha, c))
        })
        .collect();
    let c: BTreeMap<ExponentVector, f64> = values.into_iter().collect::<Result<_, _>>()?;
    spine_from_constants(c)
}

pub fn spine_from_constants(c: BTreeMap<ExponentVector, f64>) -> Result<SpineModel, SpineError> {
    let tropical = TropicalPolynomial::new(2, c.iter().map(|(a, v)| (a.clone(), *v)))?;
    let t = tropicalize(&tropical, SubdivisionOptions::default())?;
    Ok(SpineModel {
        orders_present: c.keys().cloned().collect(),
        c,
        tropical,
        spine: t.curve,
        subdivision: t.subdivision,
    })
}

/// Values of ν on the lattice points of the Newton polytope.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PRFunction {
    #[serde(with = "crate::io::pairs")]
    pub values: BTreeMap<ExponentVector, f64>,
}

impl PRFunction {
    pub fn zero(points: &[ExponentVector]) -> Self {
        PRFunction { values: points.iter().map(|a| (a.clone(), 0.0)).collect() }
    }

    pub fn get(&self, alpha: &ExponentVector) -> Option<f64> {
        self.values.get(alpha).copied()
    }
}

/// `ν = -c` on the vertices of the subdivision, affine on each cell elsewhere.
pub fn pr_function(spine: &SpineModel, p: &NewtonPolytope) -> Result<PRFunction, SpineError> {
    let verts = spine.subdivision.vertex_set();
    let mut values = BTreeMap::new();
    for alpha in &p.lattice_points {
        let v = if verts.contains(alpha) {
            -spine.c[alpha]
        } else {
            let cell = spine
                .subdivision
                .cell_containing(alpha)
                .ok_or_else(|| SpineError::Uncovered(alpha.to_string()))?;
            -spine.subdivision.cells[cell].height(alpha)
        };
        values.insert(alpha.clone(), v);
    }
    Ok(PRFunction { values })
}

pub fn default_t_schedule() -> Vec<f64> {
    (1..=4).map(|k| (-(k as f64)).exp()).collect()
}

/// `f_t = Σ ξ_α t^{ν(α)} z^α` with `ξ_α = a_α e^{ν(α)}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeformationFamily {
    pub base: Vec<crate::lpoly::JsonTerm>,
    pub nu: PRFunction,
    #[serde(with = "crate::io::pairs")]
    pub xi: BTreeMap<ExponentVector, Complex64>,
    pub t_schedule: Vec<f64>,
}

impl DeformationFamily {
    pub fn new(base: &LaurentPolynomial, nu: PRFunction, t_schedule: Vec<f64>) -> Result<Self, SpineError> {
        validate_schedule(&t_schedule)?;
        let mut xi = BTreeMap::new();
        for (alpha, a) in base.terms() {
            let v = nu.get(alpha).ok_or_else(|| SpineError::MissingNu(alpha.to_string()))?;
            xi.insert(alpha.clone(), a * v.exp());
        }
        Ok(DeformationFamily { base: base.to_json_terms(), nu, xi, t_schedule })
    }

    pub fn base_polynomial(&self) -> LaurentPolynomial {
        LaurentPolynomial::from_json_terms(&self.base).expect("validated at construction")
    }

    pub fn nu_at(&self, alpha: &ExponentVector) -> f64 {
        self.nu.get(alpha).expect("validated at construction")
    }

    /// Tropical polynomial with coefficients `-ν(α)` over the support.
    pub fn limit_tropical(&self) -> TropicalPolynomial {
        TropicalPolynomial::new(2, self.xi.keys().map(|a| (a.clone(), -self.nu_at(a)))).expect("nonempty support")
    }
}

fn validate_schedule(s: &[f64]) -> Result<(), SpineError> {
    let in_range = s.iter().all(|&t| t > 0.0 && t <= 1.0 / E + 1e-15);
    let decreasing = s.windows(2).all(|w| w[1] < w[0]);
    if s.is_empty() || !in_range || !decreasing {
        return Err(SpineError::BadSchedule);
    }
    Ok(())
}

pub fn instantiate_family(fam: &DeformationFamily, t: f64) -> Result<LaurentPolynomial, SpineError> {
    if !(t > 0.0 && t <= 1.0 / E + 1e-15) {
        return Err(SpineError::TOutOfRange(t));
    }
    let lt = t.ln();
    let terms = fam.xi.iter().map(|(a, xi)| (a.clone(), xi * (fam.nu_at(a) * lt).exp()));
    Ok(LaurentPolynomial::from_terms(2, terms)?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::amoeba::{component_report, Resolution};
    use crate::geom::Window;
    use crate::lpoly::{newton_polytope, parse_polynomial};

    fn ev(a: i64, b: i64) -> ExponentVector {
        ExponentVector(vec![a, b])
    }

    #[test]
    fn monomial_constant() {
        let f = parse_polynomial("5z").unwrap();
        let c = c_alpha(&f, &ev(1, 0), [0.7, -1.3], 64).unwrap();
        assert!((c - 5f64.ln()).abs() < 1e-12);
    }

    /// Mean-value oracle: for |ε| < 2, the circle mean of log|2 - ε e^{iθ}|
    /// is log 2. Evaluated independently with a 1-D midpoint rule.
    #[test]
    fn binomial_in_dominant_region() {
        let f = parse_polynomial("2 - z*w").unwrap();
        let c = c_alpha(&f, &ev(0, 0), [-2.0, -2.0], 256).unwrap();
        let eps = (-4.0f64).exp();
        let m = 4096;
        let oracle: f64 = (0..m)
            .map(|k| {
                let th = 2.0 * PI * (k as f64 + 0.5) / m as f64;
                (Complex64::new(2.0, 0.0) - eps * Complex64::from_polar(1.0, th)).norm().ln()
            })
            .sum::<f64>()
            / m as f64;
        assert!((oracle - 2f64.ln()).abs() < 1e-12);
        assert!((c - oracle).abs() < 1e-9);
    }

    #[test]
    fn line_far_corner() {
        let f = parse_polynomial("1 + z + w").unwrap();
        let c = c_alpha(&f, &ev(0, 0), [-10.0, -10.0], 256).unwrap();
        assert!(c.abs() < 1e-8);
    }

    #[test]
    fn order_mismatch_and_small_grid() {
        let f = parse_polynomial("1 + z + w").unwrap();
        assert!(matches!(c_alpha(&f, &ev(1, 0), [-10.0, -10.0], 256), Err(SpineError::OrderMismatch { .. })));
        assert_eq!(c_alpha(&f, &ev(0, 0), [-10.0, -10.0], 32), Err(SpineError::QuadratureTooSmall(32)));
    }

    #[test]
    fn line_spine_is_centered() {
        let f = parse_polynomial("1 + z + w").unwrap();
        let rep = component_report(&f, Window::square(6.0), Resolution::square(128), &FiberSolveConfig::default()).unwrap();
        let s = build_spine(&f, &rep, 256).unwrap();
        assert_eq!(s.c.len(), 3);
        for v in s.c.values() {
            assert!(v.abs() < 1e-6, "{v}");
        }
        assert_eq!(s.spine.vertices.len(), 1);
        let p = s.spine.vertices[0].pos;
        assert!(p[0].abs() < 1e-6 && p[1].abs() < 1e-6);
    }

    #[test]
    fn binomial_spine_is_diagonal() {
        let f = parse_polynomial("z - w").unwrap();
        let rep = component_report(&f, Window::square(3.0), Resolution::square(96), &FiberSolveConfig::default()).unwrap();
        let s = build_spine(&f, &rep, 128).unwrap();
        assert!((s.c[&ev(1, 0)] - s.c[&ev(0, 1)]).abs() < 1e-9);
        assert_eq!(s.spine.edges.len(), 1);
        assert_eq!(s.spine.edges[0].direction, [1, 1]);
    }

    #[test]
    fn c_constant_on_component() {
        let f = parse_polynomial("-z*w^2 + z^3*w - 7*z*w + 6*w + z").unwrap();
        let a = c_alpha(&f, &ev(1, 1), [0.3, 0.0], 256).unwrap();
        let b = c_alpha(&f, &ev(1, 1), [0.45, 0.02], 256).unwrap();
        assert!((a - b).abs() < 1e-5);
    }

    #[test]
    fn quadrilateral_spine_has_six_regions() {
        let f = parse_polynomial("-z*w^2 + z^3*w - 7*z*w + 6*w + z").unwrap();
        let rep = component_report(&f, Window::new(-4.0, 6.0, -5.0, 5.0), Resolution::square(256), &FiberSolveConfig::default()).unwrap();
        assert_eq!(rep.total, 6);
        let s = build_spine(&f, &rep, 256).unwrap();
        assert_eq!(s.subdivision.vertex_set().len(), 6);
        assert!(crate::trop::balancing_check(&s.spine).balanced);
        // both interior points dominate bounded regions
        let p = newton_polytope(&f).unwrap();
        assert!(!crate::trop::solid_tropical(&s.tropical, &p).unwrap());
        let nu = pr_function(&s, &p).unwrap();
        for (a, c) in &s.c {
            assert_eq!(nu.get(a), Some(-c));
        }
    }

    #[test]
    fn pr_function_on_square_is_continuous() {
        let mut c = BTreeMap::new();
        for (a, v) in [(ev(0, 0), 0.0), (ev(2, 0), 0.3), (ev(0, 2), -0.2), (ev(2, 2), 1.5)] {
            c.insert(a, v);
        }
        let s = spine_from_constants(c).unwrap();
        assert_eq!(s.subdivision.cells.len(), 2);
        let p = crate::lpoly::NewtonPolytope::from_points(2, &s.orders_present).unwrap();
        let nu = pr_function(&s, &p).unwrap();
        assert_eq!(nu.values.len(), 9);
        // each lattice point on the shared diagonal gets the same value from both cells
        for cell in &s.subdivision.cells {
            for a in [ev(1, 1)] {
                if cell.contains(&a) {
                    assert!((-cell.height(&a) - nu.get(&a).unwrap()).abs() < 1e-12);
                }
            }
        }
        // ν is -(upper hull), so it is convex along the diagonal
        let mid = nu.get(&ev(1, 1)).unwrap();
        assert!((mid - (0.0 - 1.5) / 2.0).abs() < 1e-12);
    }

    #[test]
    fn family_identity_at_one_over_e() {
        let f = parse_polynomial("-z*w^2 + z^3*w - 7*z*w + 6*w + z").unwrap();
        let p = newton_polytope(&f).unwrap();
        let nu = PRFunction {
            values: p.lattice_points.iter().enumerate().map(|(i, a)| (a.clone(), 0.37 * i as f64 - 1.1)).collect(),
        };
        let fam = DeformationFamily::new(&f, nu.clone(), default_t_schedule()).unwrap();
        let g = instantiate_family(&fam, 1.0 / E).unwrap();
        for (a, c) in f.terms() {
            let d = g.coefficient(a).unwrap();
            assert!((d - c).norm() <= 1e-12 * c.norm());
        }
        let h = instantiate_family(&fam, (-2.0f64).exp()).unwrap();
        for (a, c) in f.terms() {
            let expect = c * (-nu.get(a).unwrap()).exp();
            assert!((h.coefficient(a).unwrap() - expect).norm() <= 1e-12 * expect.norm());
        }
        assert!(matches!(instantiate_family(&fam, 0.5), Err(SpineError::TOutOfRange(_))));
        assert!(DeformationFamily::new(&f, nu, vec![0.1, 0.2]).is_err());
    }

    #[test]
    fn zero_nu_keeps_polynomial() {
        let f = parse_polynomial("1 + z + w").unwrap();
        let p = newton_polytope(&f).unwrap();
        let fam = DeformationFamily::new(&f, PRFunction::zero(&p.lattice_points), default_t_schedule()).unwrap();
        assert_eq!(instantiate_family(&fam, 0.01).unwrap(), f);
    }

    #[test]
    fn family_serializes() {
        let f = parse_polynomial("1 + z + w").unwrap();
        let p = newton_polytope(&f).unwrap();
        let fam = DeformationFamily::new(&f, PRFunction::zero(&p.lattice_points), default_t_schedule()).unwrap();
        let s = serde_json::to_string(&fam).unwrap();
        assert_eq!(serde_json::from_str::<DeformationFamily>(&s).unwrap(), fam);
    }
}
