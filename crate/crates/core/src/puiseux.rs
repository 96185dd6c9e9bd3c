//! Truncated Puiseux series with real exponents, the valuation
//! `val(a) = −min exponent` and its complexification `w(a)`.

use std::f64::consts::PI;
use std::ops::{Mul, Neg};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PuiseuxError {
    #[error("the zero scalar has no complexified valuation")]
    Zero,
    #[error("leading terms cancel and the truncation has no further terms")]
    Cancelled,
    #[error("exponents and coefficients must be finite")]
    NonFinite,
    #[error("root count must be at least 1")]
    Degree,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct PuiseuxTerm {
    pub exponent: f64,
    pub coefficient: Complex64,
}

/// `Σ c_j t^{e_j}` with strictly increasing exponents and nonzero
/// coefficients; no terms is zero.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "Vec<PuiseuxTerm>", into = "Vec<PuiseuxTerm>")]
pub struct PuiseuxScalar {
    terms: Vec<PuiseuxTerm>,
}

impl TryFrom<Vec<PuiseuxTerm>> for PuiseuxScalar {
    type Error = PuiseuxError;

    fn try_from(terms: Vec<PuiseuxTerm>) -> Result<Self, Self::Error> {
        PuiseuxScalar::new(terms.into_iter().map(|t| (t.exponent, t.coefficient)))
    }
}

impl From<PuiseuxScalar> for Vec<PuiseuxTerm> {
    fn from(a: PuiseuxScalar) -> Self {
        a.terms
    }
}

impl PuiseuxScalar {
    /// Sorts, merges equal exponents and drops zero coefficients.
    pub fn new(terms: impl IntoIterator<Item = (f64, Complex64)>) -> Result<Self, PuiseuxError> {
        let mut v: Vec<PuiseuxTerm> = Vec::new();
        for (exponent, coefficient) in terms {
            if !exponent.is_finite() || !coefficient.re.is_finite() || !coefficient.im.is_finite() {
                return Err(PuiseuxError::NonFinite);
            }
            v.push(PuiseuxTerm { exponent, coefficient });
        }
        v.sort_by(|a, b| a.exponent.total_cmp(&b.exponent));
        let mut out: Vec<PuiseuxTerm> = Vec::with_capacity(v.len());
        for t in v {
            match out.last_mut() {
                Some(last) if last.exponent == t.exponent => last.coefficient += t.coefficient,
                _ => out.push(t),
            }
        }
        out.retain(|t| t.coefficient != Complex64::new(0.0, 0.0));
        Ok(PuiseuxScalar { terms: out })
    }

    pub fn zero() -> Self {
        PuiseuxScalar::default()
    }

    pub fn monomial(coefficient: Complex64, exponent: f64) -> Result<Self, PuiseuxError> {
        Self::new([(exponent, coefficient)])
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> &[PuiseuxTerm] {
        &self.terms
    }

    pub fn leading(&self) -> Option<&PuiseuxTerm> {
        self.terms.first()
    }

    /// `−min exponent`, and `−∞` for zero.
    pub fn val(&self) -> f64 {
        self.leading().map_or(f64::NEG_INFINITY, |t| -t.exponent)
    }

    /// Sum of truncations. Coefficients that cancel to rounding level are
    /// dropped; if that empties a nonzero sum, the truncation was too short
    /// to decide the result and an error is returned.
    pub fn checked_add(&self, other: &PuiseuxScalar) -> Result<PuiseuxScalar, PuiseuxError> {
        if self.is_zero() {
            return Ok(other.clone());
        }
        if other.is_zero() {
            return Ok(self.clone());
        }
        let (mut i, mut j) = (0, 0);
        let (a, b) = (&self.terms, &other.terms);
        let mut out = Vec::with_capacity(a.len() + b.len());
        while i < a.len() || j < b.len() {
            let take_a = j >= b.len() || (i < a.len() && a[i].exponent < b[j].exponent);
            let take_b = i >= a.len() || (j < b.len() && b[j].exponent < a[i].exponent);
            if take_a {
                out.push(a[i]);
                i += 1;
            } else if take_b {
                out.push(b[j]);
                j += 1;
            } else {
                let c = a[i].coefficient + b[j].coefficient;
                let scale = a[i].coefficient.norm() + b[j].coefficient.norm();
                if c.norm() > 4.0 * f64::EPSILON * scale {
                    out.push(PuiseuxTerm { exponent: a[i].exponent, coefficient: c });
                }
                i += 1;
                j += 1;
            }
        }
        if out.is_empty() {
            return Err(PuiseuxError::Cancelled);
        }
        Ok(PuiseuxScalar { terms: out })
    }
}

impl Mul for &PuiseuxScalar {
    type Output = PuiseuxScalar;

    fn mul(self, rhs: &PuiseuxScalar) -> PuiseuxScalar {
        let prod = self
            .terms
            .iter()
            .flat_map(|a| rhs.terms.iter().map(move |b| (a.exponent + b.exponent, a.coefficient * b.coefficient)));
        PuiseuxScalar::new(prod).expect("finite inputs")
    }
}

impl Neg for &PuiseuxScalar {
    type Output = PuiseuxScalar;

    fn neg(self) -> PuiseuxScalar {
        PuiseuxScalar { terms: self.terms.iter().map(|t| PuiseuxTerm { exponent: t.exponent, coefficient: -t.coefficient }).collect() }
    }
}

/// `w(a) = e^{val(a) + i arg ξ}` with `ξ` the leading coefficient.
pub fn w_map(a: &PuiseuxScalar) -> Result<Complex64, PuiseuxError> {
    let lead = a.leading().ok_or(PuiseuxError::Zero)?;
    Ok(Complex64::from_polar(a.val().exp(), lead.coefficient.arg()))
}

/// Coordinatewise `W`.
pub fn w_map_point(point: &[PuiseuxScalar]) -> Result<Vec<Complex64>, PuiseuxError> {
    point.iter().map(w_map).collect()
}

/// `W` of the roots of `z^k + a₀` over the Puiseux field: the roots are
/// `(−ξ)^{1/k} t^{e/k} + …` for `a₀ = ξ t^e + …`, so their images are
/// `e^{val(a₀)/k} e^{i(arg ξ + (2l+1)π)/k}`, `l = 0, …, k−1`.
pub fn univariate_w_roots(k: u32, a0: &PuiseuxScalar) -> Result<Vec<Complex64>, PuiseuxError> {
    if k == 0 {
        return Err(PuiseuxError::Degree);
    }
    let lead = a0.leading().ok_or(PuiseuxError::Zero)?;
    let kf = k as f64;
    let modulus = (a0.val() / kf).exp();
    Ok((0..k)
        .map(|l| Complex64::from_polar(modulus, (lead.coefficient.arg() + (2 * l + 1) as f64 * PI) / kf))
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::roots::aberth;
    use proptest::prelude::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn s(terms: &[(f64, f64)]) -> PuiseuxScalar {
        PuiseuxScalar::new(terms.iter().map(|&(e, re)| (e, c(re, 0.0)))).unwrap()
    }

    fn close(a: Complex64, b: Complex64) -> bool {
        (a - b).norm() < 1e-12 * (1.0 + b.norm())
    }

    #[test]
    fn valuation_examples() {
        assert_eq!(s(&[(3.0, 1.0)]).val(), -3.0);
        assert_eq!(s(&[(-2.0, 3.0), (1.0, 1.0)]).val(), 2.0);
        assert_eq!(PuiseuxScalar::zero().val(), f64::NEG_INFINITY);
        assert!(s(&[(1.0, 1.0), (1.0, -1.0)]).is_zero());
    }

    #[test]
    fn w_examples() {
        assert!(close(w_map(&s(&[(1.0, -1.0)])).unwrap(), Complex64::from_polar((-1.0f64).exp(), PI)));
        assert!(close(w_map(&s(&[(-2.0, 3.0), (1.0, 1.0)])).unwrap(), c(2.0f64.exp(), 0.0)));
        assert!(close(w_map(&PuiseuxScalar::monomial(c(0.0, 1.0), 0.0).unwrap()).unwrap(), c(0.0, 1.0)));
        assert_eq!(w_map(&PuiseuxScalar::zero()), Err(PuiseuxError::Zero));
    }

    #[test]
    fn big_w_examples() {
        let inv_t = s(&[(-1.0, 1.0)]);
        let p = w_map_point(&[inv_t.clone(), inv_t.clone()]).unwrap();
        assert!(close(p[0], c(std::f64::consts::E, 0.0)) && close(p[1], c(std::f64::consts::E, 0.0)));
        assert_eq!(w_map_point(&[PuiseuxScalar::zero(), s(&[(1.0, 1.0)])]), Err(PuiseuxError::Zero));
    }

    #[test]
    fn univariate_root_examples() {
        let one = s(&[(0.0, 1.0)]);
        let r = univariate_w_roots(2, &one).unwrap();
        assert!(close(r[0], c(0.0, 1.0)) && close(r[1], c(0.0, -1.0)));
        let r = univariate_w_roots(1, &s(&[(-1.0, 1.0)])).unwrap();
        assert!(close(r[0], c(-std::f64::consts::E, 0.0)));
        for z in univariate_w_roots(3, &one).unwrap() {
            assert!(close(z * z * z, c(-1.0, 0.0)));
        }
        assert_eq!(univariate_w_roots(0, &one), Err(PuiseuxError::Degree));
    }

    #[test]
    fn cancellation_is_an_error() {
        let a = s(&[(0.0, 1.0)]);
        assert_eq!(a.checked_add(&-&a), Err(PuiseuxError::Cancelled));
        let b = s(&[(0.0, 1.0), (0.5, 2.0)]);
        let d = b.checked_add(&-&a).unwrap();
        assert_eq!(d.val(), -0.5);
        assert_eq!(d.leading().unwrap().coefficient, c(2.0, 0.0));
    }

    #[test]
    fn serde_round_trip_and_validation() {
        let a = s(&[(-0.5, 2.0), (1.25, -1.0)]);
        let j = serde_json::to_string(&a).unwrap();
        assert_eq!(serde_json::from_str::<PuiseuxScalar>(&j).unwrap(), a);
        assert_eq!(PuiseuxScalar::new([(f64::NAN, c(1.0, 0.0))]), Err(PuiseuxError::NonFinite));
    }

    fn scalar() -> impl Strategy<Value = PuiseuxScalar> {
        prop::collection::vec((-24i32..24, -3.0f64..3.0, -3.0f64..3.0), 1..5).prop_filter_map("nonzero", |ts| {
            let a = PuiseuxScalar::new(ts.into_iter().map(|(e, re, im)| (e as f64 / 6.0, c(re, im)))).ok()?;
            (!a.is_zero() && a.leading()?.coefficient.norm() > 1e-3).then_some(a)
        })
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(1000))]

        #[test]
        fn valuation_axioms(a in scalar(), b in scalar()) {
            let ab = &a * &b;
            prop_assert_eq!(ab.val(), a.val() + b.val());
            match a.checked_add(&b) {
                Ok(sum) => prop_assert!(sum.val() <= a.val().max(b.val())),
                Err(e) => prop_assert_eq!(e, PuiseuxError::Cancelled),
            }
            let wa = w_map(&a).unwrap();
            prop_assert!((wa.norm().ln() - a.val()).abs() <= 1e-12 * (1.0 + a.val().abs()));
            prop_assert!(close(w_map(&ab).unwrap(), wa * w_map(&b).unwrap()));
        }

        #[test]
        fn log_of_big_w_is_the_valuation(p in prop::collection::vec(scalar(), 1..4)) {
            let w = w_map_point(&p).unwrap();
            for (z, a) in w.iter().zip(&p) {
                prop_assert!((z.norm().ln() - a.val()).abs() <= 1e-12);
            }
        }

        #[test]
        fn univariate_roots_solve_the_image_equation(k in 1u32..7, a in scalar()) {
            // W(roots) are the roots of z^k + w(a0), found here numerically
            let roots = univariate_w_roots(k, &a).unwrap();
            let modulus = (a.val() / k as f64).exp();
            let wa = w_map(&a).unwrap();
            let mut coeffs = vec![c(0.0, 0.0); k as usize + 1];
            coeffs[0] = wa;
            coeffs[k as usize] = c(1.0, 0.0);
            let numeric = aberth(&coeffs, None, 1e-14, 500).unwrap();
            for z in &roots {
                prop_assert!((z.norm() - modulus).abs() <= 1e-12 * modulus);
                let nearest = numeric.iter().map(|r| (r - z).norm()).fold(f64::INFINITY, f64::min);
                prop_assert!(nearest <= 1e-9 * modulus, "{} {}", z, nearest);
            }
        }
    }
}
