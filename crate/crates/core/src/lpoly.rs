//! Laurent polynomials with complex coefficients, their supports and Newton
//! polytopes.
//!
//! Hull and membership predicates run in exact integer arithmetic; only the
//! coefficients are floating point.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

/// An integer exponent vector `α ∈ Z^n`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct ExponentVector(pub Vec<i64>);

impl ExponentVector {
    pub fn new(entries: Vec<i64>) -> Self {
        ExponentVector(entries)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[i64] {
        &self.0
    }

    pub fn dot(&self, x: &[f64]) -> f64 {
        self.0.iter().zip(x).map(|(&a, &b)| a as f64 * b).sum()
    }

    pub fn sub(&self, other: &ExponentVector) -> ExponentVector {
        ExponentVector(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }
}

impl From<[i64; 2]> for ExponentVector {
    fn from(v: [i64; 2]) -> Self {
        ExponentVector(v.to_vec())
    }
}

impl From<Vec<i64>> for ExponentVector {
    fn from(v: Vec<i64>) -> Self {
        ExponentVector(v)
    }
}

impl std::ops::Index<usize> for ExponentVector {
    type Output = i64;
    fn index(&self, i: usize) -> &i64 {
        &self.0[i]
    }
}

impl fmt::Display for ExponentVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, e) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{e}")?;
        }
        write!(f, ")")
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PolyError {
    #[error("syntax error at byte {pos}: {msg}")]
    Syntax { pos: usize, msg: String },
    #[error("negative exponent at byte {pos} (enable Laurent terms to allow it)")]
    NegativeExponent { pos: usize },
    #[error("empty polynomial: every term cancelled")]
    Empty,
    #[error("exponent vector {found} does not have dimension {expected}")]
    DimensionMismatch { expected: usize, found: String },
    #[error("coefficient of {0} is not finite")]
    NonFinite(String),
    #[error("dimension {0} is not supported by this operation")]
    Unsupported(usize),
}

/// A Laurent polynomial `f(z) = Σ a_α z^α` with nonzero complex coefficients.
#[derive(Clone, Debug, PartialEq)]
pub struct LaurentPolynomial {
    dim: usize,
    terms: BTreeMap<ExponentVector, Complex64>,
}

/// Canonical JSON term: `{re, im, exponents}`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct JsonTerm {
    pub re: f64,
    pub im: f64,
    pub exponents: Vec<i64>,
}

impl LaurentPolynomial {
    /// Builds a polynomial, summing repeated exponents and dropping zero sums.
    pub fn from_terms<I>(dim: usize, terms: I) -> Result<Self, PolyError>
    where
        I: IntoIterator<Item = (ExponentVector, Complex64)>,
    {
        let mut acc: BTreeMap<ExponentVector, Complex64> = BTreeMap::new();
        for (alpha, c) in terms {
            if alpha.dim() != dim {
                return Err(PolyError::DimensionMismatch { expected: dim, found: alpha.to_string() });
            }
            if !(c.re.is_finite() && c.im.is_finite()) {
                return Err(PolyError::NonFinite(alpha.to_string()));
            }
            *acc.entry(alpha).or_insert(Complex64::new(0.0, 0.0)) += c;
        }
        acc.retain(|_, c| c.norm() != 0.0);
        if acc.is_empty() {
            return Err(PolyError::Empty);
        }
        Ok(LaurentPolynomial { dim, terms: acc })
    }

    /// Convenience constructor for real coefficients on `n = 2`.
    pub fn from_real_2d(terms: &[([i64; 2], f64)]) -> Result<Self, PolyError> {
        Self::from_terms(
            2,
            terms.iter().map(|(e, c)| (ExponentVector::from(*e), Complex64::new(*c, 0.0))),
        )
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&ExponentVector, &Complex64)> {
        self.terms.iter()
    }

    pub fn coefficient(&self, alpha: &ExponentVector) -> Option<Complex64> {
        self.terms.get(alpha).copied()
    }

    pub fn support(&self) -> Vec<ExponentVector> {
        self.terms.keys().cloned().collect()
    }

    /// Evaluates at a point of `(C^*)^n`.
    pub fn eval(&self, z: &[Complex64]) -> Complex64 {
        self.terms
            .iter()
            .map(|(alpha, c)| {
                let mut m = *c;
                for (zi, &e) in z.iter().zip(alpha.as_slice()) {
                    m *= zi.powi(e as i32);
                }
                m
            })
            .sum()
    }

    /// Evaluates at `z = exp(x + iθ)` using exponentials of linear forms,
    /// which stays accurate for large `|x|`.
    pub fn eval_log(&self, x: &[f64], theta: &[f64]) -> Complex64 {
        self.terms
            .iter()
            .map(|(alpha, c)| {
                let re = alpha.dot(x);
                let im = alpha.dot(theta);
                c * Complex64::from_polar(re.exp(), im)
            })
            .sum()
    }

    /// For `n = 2`: substitutes `z_{fixed} = value` and returns the Laurent
    /// coefficients in the remaining variable as `(lowest exponent, coeffs)`.
    pub fn univariate(&self, var: usize, fixed_value: Complex64) -> (i64, Vec<Complex64>) {
        debug_assert_eq!(self.dim, 2);
        let other = 1 - var;
        let lo = self.terms.keys().map(|a| a[var]).min().unwrap_or(0);
        let hi = self.terms.keys().map(|a| a[var]).max().unwrap_or(0);
        let mut coeffs = vec![Complex64::new(0.0, 0.0); (hi - lo + 1) as usize];
        for (alpha, c) in &self.terms {
            coeffs[(alpha[var] - lo) as usize] += c * fixed_value.powi(alpha[other] as i32);
        }
        (lo, coeffs)
    }

    /// Same as [`univariate`](Self::univariate) with the fixed variable given
    /// in log-polar form `exp(x + iθ)`.
    pub fn univariate_log(&self, var: usize, x: f64, theta: f64) -> (i64, Vec<Complex64>) {
        debug_assert_eq!(self.dim, 2);
        let other = 1 - var;
        let lo = self.terms.keys().map(|a| a[var]).min().unwrap_or(0);
        let hi = self.terms.keys().map(|a| a[var]).max().unwrap_or(0);
        let mut coeffs = vec![Complex64::new(0.0, 0.0); (hi - lo + 1) as usize];
        for (alpha, c) in &self.terms {
            let e = alpha[other] as f64;
            coeffs[(alpha[var] - lo) as usize] += c * Complex64::from_polar((e * x).exp(), e * theta);
        }
        (lo, coeffs)
    }

    /// Exchanges the two variables of a bivariate polynomial.
    pub fn swap_variables(&self) -> LaurentPolynomial {
        let terms = self
            .terms
            .iter()
            .map(|(a, c)| (ExponentVector(vec![a[1], a[0]]), *c))
            .collect();
        LaurentPolynomial { dim: self.dim, terms }
    }

    pub fn map_coefficients<F>(&self, mut f: F) -> Result<LaurentPolynomial, PolyError>
    where
        F: FnMut(&ExponentVector, Complex64) -> Complex64,
    {
        Self::from_terms(self.dim, self.terms.iter().map(|(a, c)| (a.clone(), f(a, *c))))
    }

    /// Restriction of `f` to the given exponents.
    pub fn truncate(&self, keep: &[ExponentVector]) -> Result<LaurentPolynomial, PolyError> {
        let keep: BTreeSet<&ExponentVector> = keep.iter().collect();
        Self::from_terms(
            self.dim,
            self.terms.iter().filter(|(a, _)| keep.contains(a)).map(|(a, c)| (a.clone(), *c)),
        )
    }

    /// Divides out `z^m` where `m` is the coordinatewise minimum exponent,
    /// but only in coordinates where that minimum is positive.
    pub fn strip_common_monomial(&self) -> LaurentPolynomial {
        let shift: Vec<i64> = (0..self.dim)
            .map(|i| self.terms.keys().map(|a| a[i]).min().unwrap_or(0).max(0))
            .collect();
        let terms = self
            .terms
            .iter()
            .map(|(a, c)| (ExponentVector(a.0.iter().zip(&shift).map(|(x, s)| x - s).collect()), *c))
            .collect();
        LaurentPolynomial { dim: self.dim, terms }
    }

    pub fn to_json_terms(&self) -> Vec<JsonTerm> {
        self.terms
            .iter()
            .map(|(a, c)| JsonTerm { re: c.re, im: c.im, exponents: a.0.clone() })
            .collect()
    }

    pub fn from_json_terms(terms: &[JsonTerm]) -> Result<Self, PolyError> {
        let dim = terms.first().map(|t| t.exponents.len()).ok_or(PolyError::Empty)?;
        Self::from_terms(
            dim,
            terms.iter().map(|t| (ExponentVector(t.exponents.clone()), Complex64::new(t.re, t.im))),
        )
    }

    /// Hex SHA-256 of the canonical JSON form.
    pub fn content_hash(&self) -> String {
        let json = serde_json::to_string(&self.to_json_terms()).expect("terms serialize");
        hex::encode(Sha256::digest(json.as_bytes()))
    }
}

impl fmt::Display for LaurentPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = if self.dim == 2 {
            vec!["z".into(), "w".into()]
        } else {
            (1..=self.dim).map(|i| format!("z{i}")).collect()
        };
        for (k, (alpha, c)) in self.terms.iter().enumerate() {
            let mut mono = Vec::new();
            for (name, &e) in names.iter().zip(alpha.as_slice()) {
                match e {
                    0 => {}
                    1 => mono.push(name.clone()),
                    e => mono.push(format!("{name}^{e}")),
                }
            }
            let mono = mono.join("*");
            let coeff = if c.im == 0.0 {
                let (sign, mag) = if c.re < 0.0 { ("-", -c.re) } else { ("+", c.re) };
                match (k, sign) {
                    (0, "+") => {}
                    (0, _) => write!(f, "-")?,
                    _ => write!(f, " {sign} ")?,
                }
                if mag == 1.0 && !mono.is_empty() {
                    String::new()
                } else {
                    mag.to_string()
                }
            } else {
                if k > 0 {
                    write!(f, " + ")?;
                }
                format!("({}{:+}i)", c.re, c.im)
            };
            match (coeff.is_empty(), mono.is_empty()) {
                (true, _) => write!(f, "{mono}")?,
                (false, true) => write!(f, "{coeff}")?,
                (false, false) => write!(f, "{coeff}*{mono}")?,
            }
        }
        Ok(())
    }
}

// ---------------------------------------------------------------------------
// Parser
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug, Default)]
pub struct ParseOptions {
    /// Permit negative exponents.
    pub allow_laurent: bool,
    /// Force the dimension; otherwise `z,w` means 2 and `z1..zn` means `n`.
    pub dimension: Option<usize>,
}

/// Parses with the default options (no negative exponents).
pub fn parse_polynomial(text: &str) -> Result<LaurentPolynomial, PolyError> {
    parse_polynomial_with(text, ParseOptions::default())
}

pub fn parse_polynomial_with(text: &str, opts: ParseOptions) -> Result<LaurentPolynomial, PolyError> {
    let mut p = Parser { src: text.as_bytes(), pos: 0, opts, naming: None };
    let raw = p.terms()?;
    let dim = match (opts.dimension, p.naming) {
        (Some(d), _) => d,
        (None, Some(Naming::ZW)) | (None, None) => 2,
        (None, Some(Naming::Indexed(max))) => max,
    };
    let mut terms = Vec::with_capacity(raw.len());
    for (coeff, vars) in raw {
        let mut e = vec![0i64; dim];
        for (idx, pow, pos) in vars {
            if idx >= dim {
                return Err(PolyError::Syntax { pos, msg: format!("variable index {} exceeds dimension {dim}", idx + 1) });
            }
            e[idx] += pow;
        }
        terms.push((ExponentVector(e), coeff));
    }
    LaurentPolynomial::from_terms(dim, terms)
}

#[derive(Clone, Copy, PartialEq)]
enum Naming {
    ZW,
    Indexed(usize),
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    opts: ParseOptions,
    naming: Option<Naming>,
}

type RawTerm = (Complex64, Vec<(usize, i64, usize)>);

impl Parser<'_> {
    fn err<T>(&self, msg: impl Into<String>) -> Result<T, PolyError> {
        Err(PolyError::Syntax { pos: self.pos, msg: msg.into() })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn terms(&mut self) -> Result<Vec<RawTerm>, PolyError> {
        let mut out = Vec::new();
        let mut sign = 1.0;
        match self.peek() {
            Some(b'+') => self.pos += 1,
            Some(b'-') => {
                sign = -1.0;
                self.pos += 1
            }
            None => return self.err("empty input"),
            _ => {}
        }
        loop {
            let (c, vars) = self.term()?;
            out.push((c * sign, vars));
            match self.peek() {
                None => break,
                Some(b'+') => {
                    sign = 1.0;
                    self.pos += 1;
                }
                Some(b'-') => {
                    sign = -1.0;
                    self.pos += 1;
                }
                Some(ch) => return self.err(format!("unexpected '{}'", ch as char)),
            }
        }
        Ok(out)
    }

    fn term(&mut self) -> Result<RawTerm, PolyError> {
        let mut coeff = Complex64::new(1.0, 0.0);
        let mut vars = Vec::new();
        let mut any = false;
        loop {
            match self.peek() {
                Some(ch) if ch.is_ascii_digit() || ch == b'.' => {
                    coeff *= self.real_literal()?;
                }
                Some(b'(') => {
                    coeff *= self.paren_literal()?;
                }
                Some(b'i') => {
                    self.pos += 1;
                    coeff *= Complex64::new(0.0, 1.0);
                }
                Some(b'z') | Some(b'w') => {
                    vars.push(self.variable()?);
                }
                _ => break,
            }
            any = true;
            if self.peek() == Some(b'*') {
                self.pos += 1;
                if !matches!(self.peek(), Some(c) if c.is_ascii_alphanumeric() || c == b'(' || c == b'.') {
                    return self.err("dangling '*'");
                }
            }
        }
        if !any {
            return self.err("expected a term");
        }
        Ok((coeff, vars))
    }

    fn number(&mut self) -> Result<f64, PolyError> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.src.len() {
            let c = self.src[self.pos];
            let exp_sign = (c == b'+' || c == b'-')
                && self.pos > start
                && matches!(self.src[self.pos - 1], b'e' | b'E');
            if c.is_ascii_digit() || c == b'.' || c == b'e' || c == b'E' || exp_sign {
                self.pos += 1;
            } else {
                break;
            }
        }
        let s = std::str::from_utf8(&self.src[start..self.pos]).unwrap_or("");
        s.parse::<f64>().map_err(|_| PolyError::Syntax { pos: start, msg: format!("bad number '{s}'") })
    }

    /// `a` or `a/b`.
    fn real_literal(&mut self) -> Result<f64, PolyError> {
        let mut v = self.number()?;
        if self.peek() == Some(b'/') {
            self.pos += 1;
            let d = self.number()?;
            if d == 0.0 {
                return self.err("division by zero");
            }
            v /= d;
        }
        Ok(v)
    }

    /// `(a)`, `(a/b)`, `(a+bi)`, `(a-bi)`, `(bi)`.
    fn paren_literal(&mut self) -> Result<Complex64, PolyError> {
        self.pos += 1;
        let mut total = Complex64::new(0.0, 0.0);
        let mut sign = 1.0;
        let mut first = true;
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.pos += 1;
                    sign = 1.0;
                }
                Some(b'-') => {
                    self.pos += 1;
                    sign = -1.0;
                }
                _ if first => {}
                Some(b')') => break,
                _ => return self.err("expected '+', '-' or ')' in complex literal"),
            }
            first = false;
            let mut part = Complex64::new(1.0, 0.0);
            let mut got = false;
            if matches!(self.peek(), Some(c) if c.is_ascii_digit() || c == b'.') {
                part *= self.real_literal()?;
                got = true;
            }
            if self.peek() == Some(b'*') {
                self.pos += 1;
            }
            if self.peek() == Some(b'i') {
                self.pos += 1;
                part *= Complex64::new(0.0, 1.0);
                got = true;
            }
            if !got {
                return self.err("expected a number or 'i'");
            }
            total += part * sign;
            sign = 1.0;
            if self.peek() == Some(b')') {
                break;
            }
        }
        self.pos += 1;
        Ok(total)
    }

    fn variable(&mut self) -> Result<(usize, i64, usize), PolyError> {
        let start = self.pos;
        let ch = self.src[self.pos];
        self.pos += 1;
        let idx = if ch == b'w' {
            self.set_naming(Naming::ZW, start)?;
            1
        } else {
            let dstart = self.pos;
            while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
            if self.pos == dstart {
                self.set_naming(Naming::ZW, start)?;
                0
            } else {
                let k: usize = std::str::from_utf8(&self.src[dstart..self.pos]).unwrap().parse().map_err(|_| {
                    PolyError::Syntax { pos: dstart, msg: "bad variable index".into() }
                })?;
                if k == 0 {
                    return Err(PolyError::Syntax { pos: dstart, msg: "variables are numbered from 1".into() });
                }
                let max = match self.naming {
                    Some(Naming::Indexed(m)) => m.max(k),
                    _ => k,
                };
                self.set_naming(Naming::Indexed(max), start)?;
                k - 1
            }
        };
        let mut pow = 1i64;
        if self.peek() == Some(b'^') {
            self.pos += 1;
            let epos = self.pos;
            let paren = self.peek() == Some(b'(');
            if paren {
                self.pos += 1;
            }
            let neg = match self.peek() {
                Some(b'-') => {
                    self.pos += 1;
                    true
                }
                Some(b'+') => {
                    self.pos += 1;
                    false
                }
                _ => false,
            };
            self.skip_ws();
            let dstart = self.pos;
            while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                self.pos += 1;
            }
            if dstart == self.pos {
                return self.err("expected an integer exponent");
            }
            pow = std::str::from_utf8(&self.src[dstart..self.pos])
                .unwrap()
                .parse()
                .map_err(|_| PolyError::Syntax { pos: dstart, msg: "exponent out of range".into() })?;
            if neg {
                pow = -pow;
            }
            if paren {
                if self.peek() != Some(b')') {
                    return self.err("expected ')' after exponent");
                }
                self.pos += 1;
            }
            if pow < 0 && !self.opts.allow_laurent {
                return Err(PolyError::NegativeExponent { pos: epos });
            }
        }
        Ok((idx, pow, start))
    }

    fn set_naming(&mut self, n: Naming, pos: usize) -> Result<(), PolyError> {
        match (self.naming, n) {
            (None, _) | (Some(Naming::ZW), Naming::ZW) | (Some(Naming::Indexed(_)), Naming::Indexed(_)) => {
                self.naming = Some(n);
                Ok(())
            }
            _ => Err(PolyError::Syntax { pos, msg: "cannot mix z,w with z1..zn naming".into() }),
        }
    }
}

// ---------------------------------------------------------------------------
// Newton polytopes
// ---------------------------------------------------------------------------

/// Convex hull of a support in `Z^n`, `n ≤ 3`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NewtonPolytope {
    pub dim: usize,
    /// Extreme points; for `n = 2` counterclockwise from the lexicographic minimum.
    pub vertices: Vec<ExponentVector>,
    /// All integer points of the hull, sorted lexicographically.
    pub lattice_points: Vec<ExponentVector>,
}

pub fn newton_polytope(f: &LaurentPolynomial) -> Result<NewtonPolytope, PolyError> {
    NewtonPolytope::from_points(f.dim(), &f.support())
}

pub fn is_maximally_sparse(f: &LaurentPolynomial) -> bool {
    match newton_polytope(f) {
        Ok(p) => {
            let support: BTreeSet<ExponentVector> = f.support().into_iter().collect();
            let verts: BTreeSet<ExponentVector> = p.vertices.into_iter().collect();
            support == verts
        }
        Err(_) => false,
    }
}

pub fn lattice_points(p: &NewtonPolytope) -> &[ExponentVector] {
    &p.lattice_points
}

impl NewtonPolytope {
    pub fn from_points(dim: usize, points: &[ExponentVector]) -> Result<Self, PolyError> {
        if points.is_empty() {
            return Err(PolyError::Empty);
        }
        let pts: Vec<Vec<i64>> = {
            let set: BTreeSet<&ExponentVector> = points.iter().collect();
            set.into_iter().map(|p| p.0.clone()).collect()
        };
        let hull = Hull::new(dim, &pts)?;
        let vertices: Vec<ExponentVector> = hull.vertices().into_iter().map(ExponentVector).collect();
        let mut lattice = Vec::new();
        let lo: Vec<i64> = (0..dim).map(|i| pts.iter().map(|p| p[i]).min().unwrap()).collect();
        let hi: Vec<i64> = (0..dim).map(|i| pts.iter().map(|p| p[i]).max().unwrap()).collect();
        let mut cur = lo.clone();
        loop {
            if hull.contains(&cur) {
                lattice.push(ExponentVector(cur.clone()));
            }
            // odometer over the bounding box, last coordinate fastest
            let mut k = dim;
            loop {
                if k == 0 {
                    lattice.sort();
                    return Ok(NewtonPolytope { dim, vertices, lattice_points: lattice });
                }
                k -= 1;
                if cur[k] < hi[k] {
                    cur[k] += 1;
                    for j in k + 1..dim {
                        cur[j] = lo[j];
                    }
                    break;
                }
            }
        }
    }

    pub fn contains(&self, p: &ExponentVector) -> bool {
        self.lattice_points.binary_search(p).is_ok()
    }

    pub fn is_vertex(&self, p: &ExponentVector) -> bool {
        self.vertices.contains(p)
    }

    /// Largest Euclidean distance between two vertices.
    pub fn diameter(&self) -> f64 {
        let mut best = 0.0f64;
        for a in &self.vertices {
            for b in &self.vertices {
                let d: f64 = a.0.iter().zip(&b.0).map(|(x, y)| ((x - y) as f64).powi(2)).sum();
                best = best.max(d.sqrt());
            }
        }
        best
    }

    /// Twice the area for `n = 2` polygons (exact).
    pub fn twice_area(&self) -> i64 {
        if self.dim != 2 || self.vertices.len() < 3 {
            return 0;
        }
        let v = &self.vertices;
        let mut s = 0i64;
        for i in 0..v.len() {
            let (a, b) = (&v[i], &v[(i + 1) % v.len()]);
            s += a[0] * b[1] - a[1] * b[0];
        }
        s.abs()
    }
}

/// Exact 2-D orientation of `c` relative to the directed line `a → b`.
pub fn orient2d(a: &[i64], b: &[i64], c: &[i64]) -> i128 {
    let (ax, ay) = (a[0] as i128, a[1] as i128);
    (b[0] as i128 - ax) * (c[1] as i128 - ay) - (b[1] as i128 - ay) * (c[0] as i128 - ax)
}

/// Strict convex hull of integer points in the plane, counterclockwise from
/// the lexicographic minimum. Collinear boundary points are dropped.
pub fn convex_hull_2d(points: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let mut pts: Vec<Vec<i64>> = points.to_vec();
    pts.sort();
    pts.dedup();
    if pts.len() <= 2 {
        return pts;
    }
    let mut lower: Vec<Vec<i64>> = Vec::new();
    for p in &pts {
        while lower.len() >= 2 && orient2d(&lower[lower.len() - 2], &lower[lower.len() - 1], p) <= 0 {
            lower.pop();
        }
        lower.push(p.clone());
    }
    let mut upper: Vec<Vec<i64>> = Vec::new();
    for p in pts.iter().rev() {
        while upper.len() >= 2 && orient2d(&upper[upper.len() - 2], &upper[upper.len() - 1], p) <= 0 {
            upper.pop();
        }
        upper.push(p.clone());
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    if lower.len() == 2 && lower[0] == lower[1] {
        lower.truncate(1);
    }
    lower
}

/// Hull representation for membership tests in dimension ≤ 3.
enum Hull {
    /// Affine image of a lower-dimensional hull: points are `base + M·u`.
    Embedded { base: Vec<i64>, drop: Vec<usize>, inner: Box<Hull>, normals: Vec<Vec<i64>> },
    Point(Vec<i64>),
    Segment(Vec<i64>, Vec<i64>),
    Polygon(Vec<Vec<i64>>),
    Polytope { vertices: Vec<Vec<i64>>, facets: Vec<(Vec<i128>, i128)> },
}

fn gcd(a: i64, b: i64) -> i64 {
    num_integer::gcd(a, b)
}

fn cross3(a: &[i128], b: &[i128]) -> [i128; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

fn diff(a: &[i64], b: &[i64]) -> Vec<i128> {
    a.iter().zip(b).map(|(x, y)| *x as i128 - *y as i128).collect()
}

impl Hull {
    fn new(dim: usize, pts: &[Vec<i64>]) -> Result<Hull, PolyError> {
        if pts.len() == 1 {
            return Ok(Hull::Point(pts[0].clone()));
        }
        match dim {
            1 => {
                let lo = pts.iter().min().unwrap().clone();
                let hi = pts.iter().max().unwrap().clone();
                Ok(Hull::Segment(lo, hi))
            }
            2 => {
                let h = convex_hull_2d(pts);
                Ok(match h.len() {
                    1 => Hull::Point(h[0].clone()),
                    2 => Hull::Segment(h[0].clone(), h[1].clone()),
                    _ => Hull::Polygon(h),
                })
            }
            3 => Self::new3(pts),
            d => Err(PolyError::Unsupported(d)),
        }
    }

    fn new3(pts: &[Vec<i64>]) -> Result<Hull, PolyError> {
        let p0 = &pts[0];
        // affine rank
        let dirs: Vec<Vec<i128>> = pts.iter().skip(1).map(|p| diff(p, p0)).collect();
        let first = dirs.iter().find(|d| d.iter().any(|&x| x != 0)).cloned();
        let Some(u) = first else { return Ok(Hull::Point(p0.clone())) };
        let normal = dirs.iter().map(|d| cross3(&u, d)).find(|c| c.iter().any(|&x| x != 0));
        let full = normal.and_then(|n| dirs.iter().find(|d| n[0] * d[0] + n[1] * d[1] + n[2] * d[2] != 0));
        if full.is_some() {
            let mut facets = Vec::new();
            let n = pts.len();
            for i in 0..n {
                for j in i + 1..n {
                    for k in j + 1..n {
                        let nv = cross3(&diff(&pts[j], &pts[i]), &diff(&pts[k], &pts[i]));
                        if nv.iter().all(|&x| x == 0) {
                            continue;
                        }
                        let off: i128 = (0..3).map(|t| nv[t] * pts[i][t] as i128).sum();
                        let side: Vec<i128> =
                            pts.iter().map(|p| (0..3).map(|t| nv[t] * p[t] as i128).sum::<i128>() - off).collect();
                        let (pos, neg) = (side.iter().any(|&s| s > 0), side.iter().any(|&s| s < 0));
                        if pos && neg {
                            continue;
                        }
                        let (nv, off) = if pos { (nv.map(|x| -x), -off) } else { (nv, off) };
                        let g = nv.iter().chain(std::iter::once(&off)).fold(0i128, |a, &b| gcd128(a, b));
                        let key = (nv.iter().map(|x| x / g).collect::<Vec<_>>(), off / g);
                        if !facets.contains(&key) {
                            facets.push(key);
                        }
                    }
                }
            }
            // a vertex lies on facets whose normals span R^3
            let vertices = pts
                .iter()
                .filter(|p| {
                    let on: Vec<&Vec<i128>> = facets
                        .iter()
                        .filter(|(nv, off)| (0..3).map(|t| nv[t] * p[t] as i128).sum::<i128>() == *off)
                        .map(|(nv, _)| nv)
                        .collect();
                    rank3(&on) == 3
                })
                .cloned()
                .collect();
            return Ok(Hull::Polytope { vertices, facets });
        }
        // lower-dimensional: drop a coordinate along which the affine hull projects injectively
        let (drop, normals): (Vec<usize>, Vec<Vec<i64>>) = match normal {
            Some(n) => {
                let k = (0..3).find(|&k| n[k] != 0).unwrap();
                (vec![k], vec![n.iter().map(|&x| x as i64).collect()])
            }
            None => {
                let k = (0..3).find(|&k| u[k] != 0).unwrap();
                let others: Vec<usize> = (0..3).filter(|&t| t != k).collect();
                // two independent normals to the line direction u
                let mut ns = Vec::new();
                for &t in &others {
                    let mut e = [0i128; 3];
                    e[t] = 1;
                    let c = cross3(&u, &e);
                    ns.push(c.iter().map(|&x| x as i64).collect());
                }
                (others, ns)
            }
        };
        let keep: Vec<usize> = (0..3).filter(|t| !drop.contains(t)).collect();
        let proj: Vec<Vec<i64>> = pts.iter().map(|p| keep.iter().map(|&t| p[t]).collect()).collect();
        let inner = Hull::new(keep.len(), &proj)?;
        Ok(Hull::Embedded { base: p0.clone(), drop, inner: Box::new(inner), normals })
    }

    fn vertices(&self) -> Vec<Vec<i64>> {
        match self {
            Hull::Point(p) => vec![p.clone()],
            Hull::Segment(a, b) => vec![a.clone(), b.clone()],
            Hull::Polygon(v) => v.clone(),
            Hull::Polytope { vertices, .. } => vertices.clone(),
            Hull::Embedded { base, drop, inner, normals } => {
                // lift each projected vertex back onto the affine hull
                inner.vertices().into_iter().map(|v| lift(base, drop, normals, &v)).collect()
            }
        }
    }

    fn contains(&self, p: &[i64]) -> bool {
        match self {
            Hull::Point(q) => p == q.as_slice(),
            Hull::Segment(a, b) => {
                let d = diff(b, a);
                let e = diff(p, a);
                // collinear and between
                let collinear = (0..d.len()).all(|i| (0..d.len()).all(|j| d[i] * e[j] == d[j] * e[i]));
                let t: i128 = d.iter().zip(&e).map(|(x, y)| x * y).sum();
                let dd: i128 = d.iter().map(|x| x * x).sum();
                collinear && t >= 0 && t <= dd
            }
            Hull::Polygon(v) => (0..v.len()).all(|i| orient2d(&v[i], &v[(i + 1) % v.len()], p) >= 0),
            Hull::Polytope { facets, .. } => {
                facets.iter().all(|(nv, off)| (0..3).map(|t| nv[t] * p[t] as i128).sum::<i128>() <= *off)
            }
            Hull::Embedded { base, drop, inner, normals } => {
                let on_plane = normals
                    .iter()
                    .all(|n| (0..3).map(|t| n[t] as i128 * (p[t] as i128 - base[t] as i128)).sum::<i128>() == 0);
                if !on_plane {
                    return false;
                }
                let proj: Vec<i64> = (0..3).filter(|t| !drop.contains(t)).map(|t| p[t]).collect();
                inner.contains(&proj)
            }
        }
    }
}

fn gcd128(a: i128, b: i128) -> i128 {
    let (mut a, mut b) = (a.abs(), b.abs());
    while b != 0 {
        let t = a % b;
        a = b;
        b = t;
    }
    if a == 0 {
        1
    } else {
        a
    }
}

fn rank3(vs: &[&Vec<i128>]) -> usize {
    if vs.is_empty() {
        return 0;
    }
    for a in vs {
        for b in vs {
            let c = cross3(a, b);
            if c.iter().any(|&x| x != 0) {
                for d in vs {
                    if c[0] * d[0] + c[1] * d[1] + c[2] * d[2] != 0 {
                        return 3;
                    }
                }
                return 2;
            }
        }
    }
    1
}

/// Recovers the dropped coordinates of a point on the affine hull.
fn lift(base: &[i64], drop: &[usize], normals: &[Vec<i64>], v: &[i64]) -> Vec<i64> {
    let keep: Vec<usize> = (0..3).filter(|t| !drop.contains(t)).collect();
    let mut out = vec![0i64; 3];
    for (i, &t) in keep.iter().enumerate() {
        out[t] = v[i];
    }
    if drop.len() == 1 {
        let k = drop[0];
        let n = &normals[0];
        // n·(out - base) = 0 solved for out[k]
        let rest: i64 = keep.iter().map(|&t| n[t] * (out[t] - base[t])).sum();
        out[k] = base[k] - rest / n[k];
    } else {
        // line: out = base + s·u; the kept coordinate fixes s
        let t = keep[0];
        let n0 = &normals[0];
        let n1 = &normals[1];
        // direction u ⟂ both normals
        let u = cross3(
            &n0.iter().map(|&x| x as i128).collect::<Vec<_>>(),
            &n1.iter().map(|&x| x as i128).collect::<Vec<_>>(),
        );
        for &k in drop {
            out[k] = base[k] + ((u[k] * (out[t] - base[t]) as i128) / u[t]) as i64;
        }
    }
    out
}

/// Primitive lattice direction of an integer vector.
pub fn primitive(v: [i64; 2]) -> ([i64; 2], i64) {
    let g = gcd(v[0], v[1]);
    if g == 0 {
        return ([0, 0], 0);
    }
    ([v[0] / g, v[1] / g], g)
}

#[cfg(test)]
mod tests {
    use super::*;

    const QUADRILATERAL: &str = "-z*w^2 + z^3*w - 7*z*w + 6*w + z";

    fn ev(a: i64, b: i64) -> ExponentVector {
        ExponentVector(vec![a, b])
    }

    #[test]
    fn parse_quadrilateral() {
        let f = parse_polynomial(QUADRILATERAL).unwrap();
        assert_eq!(f.dim(), 2);
        assert_eq!(f.len(), 5);
        assert_eq!(f.coefficient(&ev(1, 1)), Some(Complex64::new(-7.0, 0.0)));
        assert_eq!(f.coefficient(&ev(1, 2)), Some(Complex64::new(-1.0, 0.0)));
    }

    #[test]
    fn parse_simple_and_cancellation() {
        let f = parse_polynomial("1 + z + w").unwrap();
        assert_eq!(f.len(), 3);
        assert!(f.terms().all(|(_, c)| *c == Complex64::new(1.0, 0.0)));
        assert_eq!(parse_polynomial("z - z"), Err(PolyError::Empty));
    }

    #[test]
    fn parse_complex_and_rational_literals() {
        let f = parse_polynomial("z + w + (1/2)zw + z^2w^2").unwrap();
        assert_eq!(f.coefficient(&ev(1, 1)), Some(Complex64::new(0.5, 0.0)));
        let g = parse_polynomial("(1+2i)*z - (0.5-i)w^3 + 2i").unwrap();
        assert_eq!(g.coefficient(&ev(1, 0)), Some(Complex64::new(1.0, 2.0)));
        assert_eq!(g.coefficient(&ev(0, 3)), Some(Complex64::new(-0.5, 1.0)));
        assert_eq!(g.coefficient(&ev(0, 0)), Some(Complex64::new(0.0, 2.0)));
    }

    #[test]
    fn parse_indexed_variables() {
        let f = parse_polynomial("1 + z1 + z2 + z3").unwrap();
        assert_eq!(f.dim(), 3);
        let g = parse_polynomial_with("z1*z4", ParseOptions { dimension: Some(5), ..Default::default() }).unwrap();
        assert_eq!(g.dim(), 5);
    }

    #[test]
    fn parse_rejects_negative_exponents_by_default() {
        assert!(matches!(parse_polynomial("z^-1 + w"), Err(PolyError::NegativeExponent { .. })));
        let f = parse_polynomial_with("z^-1 + w^(-2)", ParseOptions { allow_laurent: true, dimension: None }).unwrap();
        assert_eq!(f.coefficient(&ev(-1, 0)), Some(Complex64::new(1.0, 0.0)));
        assert_eq!(f.coefficient(&ev(0, -2)), Some(Complex64::new(1.0, 0.0)));
    }

    #[test]
    fn parse_reports_positions() {
        match parse_polynomial("1 + z + $") {
            Err(PolyError::Syntax { pos, .. }) => assert_eq!(pos, 8),
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(parse_polynomial("1 + "), Err(PolyError::Syntax { .. })));
        assert!(matches!(parse_polynomial("z*"), Err(PolyError::Syntax { .. })));
        assert!(matches!(parse_polynomial("z + z1"), Err(PolyError::Syntax { .. })));
        assert!(matches!(parse_polynomial(""), Err(PolyError::Syntax { .. })));
    }

    #[test]
    fn display_round_trips() {
        for text in ["(1+2i)*z - 3w^2 + 0.25", "-z*w^2 + z^3*w - 7*z*w + 6*w + z", "-1 - z", "2.5e-3*z1*z3^4"] {
            let f = parse_polynomial(text).unwrap();
            assert_eq!(parse_polynomial(&f.to_string()).unwrap(), f, "{f}");
        }
        assert_eq!(parse_polynomial("1 + z + w").unwrap().to_string(), "1 + w + z");
    }

    #[test]
    fn json_round_trips() {
        let f = parse_polynomial(QUADRILATERAL).unwrap();
        let json = serde_json::to_string(&f.to_json_terms()).unwrap();
        let back: Vec<JsonTerm> = serde_json::from_str(&json).unwrap();
        assert_eq!(LaurentPolynomial::from_json_terms(&back).unwrap(), f);
    }

    /// Brute-force extreme-point oracle: p is a vertex iff some direction
    /// from a small integer fan maximizes uniquely at p.
    fn brute_vertices(points: &[ExponentVector]) -> BTreeSet<ExponentVector> {
        let mut out = BTreeSet::new();
        for dx in -40i64..=40 {
            for dy in -40i64..=40 {
                if dx == 0 && dy == 0 {
                    continue;
                }
                let vals: Vec<i64> = points.iter().map(|p| p[0] * dx + p[1] * dy).collect();
                let m = *vals.iter().max().unwrap();
                let arg: Vec<_> = points.iter().zip(&vals).filter(|(_, &v)| v == m).collect();
                if arg.len() == 1 {
                    out.insert(arg[0].0.clone());
                }
            }
        }
        out
    }

    #[test]
    fn quadrilateral_newton_polygon() {
        let f = parse_polynomial(QUADRILATERAL).unwrap();
        let p = newton_polytope(&f).unwrap();
        let expected = brute_vertices(&f.support());
        let got: BTreeSet<_> = p.vertices.iter().cloned().collect();
        assert_eq!(got, expected);
        assert_eq!(p.vertices, vec![ev(0, 1), ev(1, 0), ev(3, 1), ev(1, 2)]);
        assert_eq!(
            p.lattice_points,
            vec![ev(0, 1), ev(1, 0), ev(1, 1), ev(1, 2), ev(2, 1), ev(3, 1)]
        );
        assert!(!is_maximally_sparse(&f));
    }

    #[test]
    fn simplex_and_point_polytopes() {
        let f = parse_polynomial("1 + z + w").unwrap();
        let p = newton_polytope(&f).unwrap();
        assert_eq!(p.vertices, vec![ev(0, 0), ev(1, 0), ev(0, 1)]);
        assert_eq!(p.lattice_points, vec![ev(0, 0), ev(0, 1), ev(1, 0)]);
        assert!(is_maximally_sparse(&f));

        let m = parse_polynomial("6*w").unwrap();
        let pm = newton_polytope(&m).unwrap();
        assert_eq!(pm.vertices, vec![ev(0, 1)]);
        assert_eq!(pm.lattice_points, vec![ev(0, 1)]);
    }

    #[test]
    fn segment_lattice_points_and_collinear_vertices() {
        let f = parse_polynomial("1 + z + z^2 + z^3").unwrap();
        let p = newton_polytope(&f).unwrap();
        assert_eq!(p.vertices, vec![ev(0, 0), ev(3, 0)]);
        assert_eq!(p.lattice_points.len(), 4);
        assert!(!is_maximally_sparse(&f));
    }

    #[test]
    fn interior_point_is_not_sparse() {
        // (1,1) = (1,0)/3 + (0,1)/3 + (2,2)/3
        let f = parse_polynomial("z + w + (1/2)z*w + z^2*w^2").unwrap();
        assert!(!is_maximally_sparse(&f));
        let p = newton_polytope(&f).unwrap();
        assert_eq!(p.vertices.len(), 3);
    }

    #[test]
    fn three_dimensional_hulls() {
        let f = parse_polynomial("1 + z1 + z2 + z3").unwrap();
        let p = newton_polytope(&f).unwrap();
        assert_eq!(p.vertices.len(), 4);
        assert_eq!(p.lattice_points.len(), 4);
        let cube = parse_polynomial("1 + z1 + z2 + z3 + z1*z2 + z1*z3 + z2*z3 + z1*z2*z3 + 5*z1^2*z2^2*z3^2").unwrap();
        let pc = newton_polytope(&cube).unwrap();
        assert_eq!(pc.vertices.len(), 8);
        assert!(!pc.is_vertex(&ExponentVector(vec![1, 1, 1])));
        // flat support embedded in 3-space
        let flat = parse_polynomial("z1 + z2 + z1*z2*z3^0 + z1^2*z2^2").unwrap();
        let pf = newton_polytope(&flat).unwrap();
        assert_eq!(pf.vertices.len(), 3);
        let line = parse_polynomial("z1*z2*z3 + z1^3*z2^3*z3^3").unwrap();
        let pl = newton_polytope(&line).unwrap();
        assert_eq!(pl.vertices.len(), 2);
        assert_eq!(pl.lattice_points.len(), 3);
    }

    #[test]
    fn strip_common_monomial_only_positive_offsets() {
        let f = parse_polynomial("z^2*w + z^3*w^2").unwrap();
        let g = f.strip_common_monomial();
        assert!(g.coefficient(&ev(0, 0)).is_some());
        assert!(g.coefficient(&ev(1, 1)).is_some());
        let h = parse_polynomial("1 + z").unwrap();
        assert_eq!(h.strip_common_monomial(), h);
    }

    #[test]
    fn univariate_substitution() {
        let f = parse_polynomial(QUADRILATERAL).unwrap();
        let (lo, c) = f.univariate(1, Complex64::new(1.0, 0.0));
        assert_eq!(lo, 0);
        // -w^2 + (1 - 7 + 6) w + 1
        assert_eq!(c, vec![Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0), Complex64::new(-1.0, 0.0)]);
        let (_, c2) = f.univariate_log(1, 0.0, 0.0);
        for (a, b) in c.iter().zip(&c2) {
            assert!((a - b).norm() < 1e-14);
        }
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn support() -> impl Strategy<Value = Vec<(i64, i64)>> {
            prop::collection::vec((0i64..7, 0i64..7), 1..9)
        }

        fn poly(s: &[(i64, i64)]) -> LaurentPolynomial {
            LaurentPolynomial::from_terms(
                2,
                s.iter().map(|&(a, b)| (ev(a, b), Complex64::new(1.0 + a as f64, 0.5))),
            )
            .unwrap()
        }

        proptest! {
            #[test]
            fn vertices_match_brute_force(s in support()) {
                let f = poly(&s);
                let p = newton_polytope(&f).unwrap();
                let got: BTreeSet<_> = p.vertices.iter().cloned().collect();
                if p.vertices.len() > 1 {
                    prop_assert_eq!(got, brute_vertices(&f.support()));
                }
            }

            #[test]
            fn support_inside_own_polytope(s in support()) {
                let f = poly(&s);
                let p = newton_polytope(&f).unwrap();
                for a in f.support() {
                    prop_assert!(p.contains(&a));
                }
                for v in &p.vertices {
                    prop_assert!(p.lattice_points.contains(v));
                }
            }

            #[test]
            fn hull_is_idempotent(s in support()) {
                let f = poly(&s);
                let p = newton_polytope(&f).unwrap();
                let g = LaurentPolynomial::from_terms(
                    2, p.vertices.iter().map(|v| (v.clone(), Complex64::new(1.0, 0.0)))).unwrap();
                let q = newton_polytope(&g).unwrap();
                prop_assert_eq!(&q.vertices, &p.vertices);
                prop_assert!(is_maximally_sparse(&g));
                prop_assert_eq!(g.len(), q.vertices.len());
            }
        }
    }
}
