//! Max-plus polynomials in the plane, their corner loci and dual regular
//! subdivisions.
//!
//! Coefficients are snapped to a dyadic grid (`2^-scale_bits`) and every
//! combinatorial decision is made on the snapped integers, so the output
//! depends only on the snapped values.

use std::collections::{BTreeMap, BTreeSet};
use std::io::Write;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geom::{sample_segment, Window};
use crate::lpoly::{convex_hull_2d, orient2d, primitive, ExponentVector, LaurentPolynomial, NewtonPolytope};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum TropError {
    #[error("tropical polynomial has no terms")]
    Empty,
    #[error("coefficient {0} is not finite")]
    NonFinite(f64),
    #[error("exponent dimension mismatch")]
    DimensionMismatch,
    #[error("dimension {0} is not supported (corner loci are planar)")]
    Unsupported(usize),
    #[error("coefficient {0} is too large for the snapping grid")]
    CoefficientRange(f64),
    #[error("integer overflow in exact hull arithmetic")]
    Overflow,
}

/// `g(x) = max_α (c_α + ⟨α, x⟩)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TropicalPolynomial {
    pub dim: usize,
    #[serde(with = "crate::io::pairs")]
    pub terms: BTreeMap<ExponentVector, f64>,
}

impl TropicalPolynomial {
    pub fn new<I>(dim: usize, terms: I) -> Result<Self, TropError>
    where
        I: IntoIterator<Item = (ExponentVector, f64)>,
    {
        let mut map = BTreeMap::new();
        for (a, c) in terms {
            if a.dim() != dim {
                return Err(TropError::DimensionMismatch);
            }
            if !c.is_finite() {
                return Err(TropError::NonFinite(c));
            }
            map.insert(a, c);
        }
        if map.is_empty() {
            return Err(TropError::Empty);
        }
        Ok(TropicalPolynomial { dim, terms: map })
    }

    pub fn from_pairs(terms: &[([i64; 2], f64)]) -> Result<Self, TropError> {
        Self::new(2, terms.iter().map(|(a, c)| (ExponentVector::from(*a), *c)))
    }

    /// Coefficients `log|a_α|`.
    pub fn log_abs(f: &LaurentPolynomial) -> Self {
        Self::new(f.dim(), f.terms().map(|(a, c)| (a.clone(), c.norm().ln()))).expect("nonzero coefficients")
    }

    pub fn support(&self) -> Vec<ExponentVector> {
        self.terms.keys().cloned().collect()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct TropEval {
    pub value: f64,
    pub argmax: Vec<ExponentVector>,
}

pub fn trop_eval(g: &TropicalPolynomial, x: &[f64]) -> TropEval {
    let vals: Vec<(f64, &ExponentVector)> = g.terms.iter().map(|(a, c)| (c + a.dot(x), a)).collect();
    let value = vals.iter().map(|v| v.0).fold(f64::NEG_INFINITY, f64::max);
    let tol = 1e-9 * (1.0 + value.abs());
    let argmax = vals.iter().filter(|v| value - v.0 <= tol).map(|v| v.1.clone()).collect();
    TropEval { value, argmax }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SubdivisionOptions {
    /// Coefficients are rounded to multiples of `2^-scale_bits`.
    pub scale_bits: u32,
    /// Refine to a triangulation by a generic infinitesimal lift.
    pub perturb: bool,
}

impl Default for SubdivisionOptions {
    fn default() -> Self {
        SubdivisionOptions { scale_bits: 40, perturb: false }
    }
}

/// Rational point `(nx/den, ny/den)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ExactPoint {
    pub nx: i128,
    pub ny: i128,
    pub den: i128,
}

impl ExactPoint {
    fn new(nx: i128, ny: i128, den: i128) -> Self {
        let s = den.signum();
        let g = gcd3(nx, ny, den);
        ExactPoint { nx: s * nx / g, ny: s * ny / g, den: s * den / g }
    }

    pub fn to_f64(self) -> [f64; 2] {
        [self.nx as f64 / self.den as f64, self.ny as f64 / self.den as f64]
    }
}

impl Serialize for ExactPoint {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        [format!("{}/{}", self.nx, self.den), format!("{}/{}", self.ny, self.den)].serialize(s)
    }
}

impl<'de> Deserialize<'de> for ExactPoint {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let [a, b] = <[String; 2]>::deserialize(d)?;
        let parse = |s: &str| -> Result<(i128, i128), D::Error> {
            let (n, m) = s.split_once('/').ok_or_else(|| D::Error::custom("expected p/q"))?;
            Ok((n.parse().map_err(D::Error::custom)?, m.parse().map_err(D::Error::custom)?))
        };
        let (nx, dx) = parse(&a)?;
        let (ny, dy) = parse(&b)?;
        let (nx, ny, den) = if dx == dy { (nx, ny, dx) } else { (nx * dy, ny * dx, dx * dy) };
        Ok(ExactPoint::new(nx, ny, den))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurveVertex {
    pub pos: [f64; 2],
    pub exact: ExactPoint,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum EdgeShape {
    Segment { from: usize, to: usize },
    Ray { from: usize },
    /// Whole line; only for supports lying on a line.
    Line { point: [f64; 2] },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurveEdge {
    pub shape: EdgeShape,
    /// Primitive direction, pointing away from `from` for segments and rays.
    pub direction: [i64; 2],
    pub weight: i64,
    pub dual_pair: [ExponentVector; 2],
}

#[derive(Clone, Debug, PartialEq, Default, Serialize, Deserialize)]
pub struct TropicalCurve {
    pub vertices: Vec<CurveVertex>,
    pub edges: Vec<CurveEdge>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Cell {
    /// Strict vertices, counterclockwise for polygons.
    pub vertices: Vec<ExponentVector>,
    /// Every support point lying on the cell's lifted face.
    pub points: Vec<ExponentVector>,
    /// Lifted face `h(α) = a·α + b` as `[a_x, a_y, b]`.
    pub affine: [f64; 3],
    pub curve_vertex: Option<usize>,
}

impl Cell {
    pub fn height(&self, alpha: &ExponentVector) -> f64 {
        self.affine[0] * alpha[0] as f64 + self.affine[1] * alpha[1] as f64 + self.affine[2]
    }

    /// Whether `alpha` lies in the closed cell.
    pub fn contains(&self, alpha: &ExponentVector) -> bool {
        let p = alpha.as_slice();
        match self.vertices.len() {
            1 => self.vertices[0].as_slice() == p,
            2 => {
                let (a, b) = (self.vertices[0].as_slice(), self.vertices[1].as_slice());
                orient2d(a, b, p) == 0
                    && (p[0] - a[0]) * (b[0] - a[0]) + (p[1] - a[1]) * (b[1] - a[1]) >= 0
                    && (p[0] - b[0]) * (a[0] - b[0]) + (p[1] - b[1]) * (a[1] - b[1]) >= 0
            }
            n => (0..n).all(|i| orient2d(self.vertices[i].as_slice(), self.vertices[(i + 1) % n].as_slice(), p) >= 0),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SubdivisionEdge {
    pub ends: [ExponentVector; 2],
    pub cells: Vec<usize>,
    pub curve_edge: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DualSubdivision {
    /// Affine dimension of the support (0, 1 or 2).
    pub support_dim: usize,
    pub cells: Vec<Cell>,
    pub edges: Vec<SubdivisionEdge>,
}

impl DualSubdivision {
    /// Exponents that are vertices of some cell, i.e. attain the maximum
    /// alone on an open set.
    pub fn vertex_set(&self) -> BTreeSet<ExponentVector> {
        self.cells.iter().flat_map(|c| c.vertices.iter().cloned()).collect()
    }

    pub fn cell_containing(&self, alpha: &ExponentVector) -> Option<usize> {
        self.cells.iter().position(|c| c.contains(alpha))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tropicalization {
    pub subdivision: DualSubdivision,
    pub curve: TropicalCurve,
}

pub fn corner_locus(g: &TropicalPolynomial) -> Result<TropicalCurve, TropError> {
    Ok(tropicalize(g, SubdivisionOptions::default())?.curve)
}

pub fn dual_subdivision(g: &TropicalPolynomial) -> Result<DualSubdivision, TropError> {
    Ok(tropicalize(g, SubdivisionOptions::default())?.subdivision)
}

/// Computes the regular subdivision and its dual curve together.
pub fn tropicalize(g: &TropicalPolynomial, opts: SubdivisionOptions) -> Result<Tropicalization, TropError> {
    if g.dim != 2 {
        return Err(TropError::Unsupported(g.dim));
    }
    let scale = (2.0f64).powi(opts.scale_bits as i32);
    let mut pts = Vec::with_capacity(g.terms.len());
    for (a, &c) in &g.terms {
        let v = (c * scale).round();
        if v.abs() > 2f64.powi(100) {
            return Err(TropError::CoefficientRange(c));
        }
        let w = if opts.perturb { generic_weight(a) } else { 0 };
        pts.push(Lifted { p: [a[0], a[1]], h: [v as i128, w] });
    }
    let rank = affine_rank(&pts);
    match rank {
        0 => {
            let a = ExponentVector::from(pts[0].p);
            let cell = Cell {
                vertices: vec![a.clone()],
                points: vec![a],
                affine: [0.0, 0.0, pts[0].h[0] as f64 / scale],
                curve_vertex: None,
            };
            Ok(Tropicalization {
                subdivision: DualSubdivision { support_dim: 0, cells: vec![cell], edges: vec![] },
                curve: TropicalCurve::default(),
            })
        }
        1 => collinear(&pts, scale),
        _ => planar(&pts, scale),
    }
}

struct Lifted {
    p: [i64; 2],
    /// `[snapped coefficient, perturbation]`, compared lexicographically.
    h: [i128; 2],
}

fn generic_weight(a: &ExponentVector) -> i128 {
    // splitmix64 of the packed exponents; 40 bits
    let mut z = (a[0] as u64).wrapping_mul(0x9E37_79B9_7F4A_7C15) ^ (a[1] as u64).wrapping_add(0x632B_E59B_D9B4_E019);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^= z >> 31;
    (z >> 24) as i128
}

fn affine_rank(pts: &[Lifted]) -> usize {
    let p0 = pts[0].p;
    let Some(p1) = pts.iter().map(|l| l.p).find(|&p| p != p0) else { return 0 };
    if pts.iter().any(|l| orient2d(&p0, &p1, &l.p) != 0) {
        2
    } else {
        1
    }
}

/// Sign of `Σ k_i h_i` under the lexicographic order on height pairs.
fn lin_sign(terms: &[(i128, &[i128; 2])]) -> Result<i32, TropError> {
    let mut acc = [0i128; 2];
    for (k, h) in terms {
        for t in 0..2 {
            let prod = k.checked_mul(h[t]).ok_or(TropError::Overflow)?;
            acc[t] = acc[t].checked_add(prod).ok_or(TropError::Overflow)?;
        }
    }
    Ok(if acc[0] != 0 { acc[0].signum() as i32 } else { acc[1].signum() as i32 })
}

fn planar(pts: &[Lifted], scale: f64) -> Result<Tropicalization, TropError> {
    let m = pts.len();
    let mut faces: BTreeSet<Vec<usize>> = BTreeSet::new();
    let mut planes: Vec<(Vec<usize>, [i128; 3], i128)> = Vec::new();
    for i in 0..m {
        for j in i + 1..m {
            for k in j + 1..m {
                let o = orient2d(&pts[i].p, &pts[j].p, &pts[k].p);
                if o == 0 {
                    continue;
                }
                let (j, k) = if o > 0 { (j, k) } else { (k, j) };
                let o = o.abs();
                let d = |a: usize| [(pts[a].p[0] - pts[i].p[0]) as i128, (pts[a].p[1] - pts[i].p[1]) as i128];
                let (dj, dk) = (d(j), d(k));
                let mut on = Vec::new();
                let mut upper = true;
                for l in 0..m {
                    let dl = d(l);
                    let a = dk[0] * dl[1] - dk[1] * dl[0];
                    let b = dj[0] * dl[1] - dj[1] * dl[0];
                    // det(dj, dk, dl) as a linear form in the heights
                    let s = lin_sign(&[(a, &pts[j].h), (-b, &pts[k].h), (o, &pts[l].h), (-(a - b + o), &pts[i].h)])?;
                    if s > 0 {
                        upper = false;
                        break;
                    }
                    if s == 0 {
                        on.push(l);
                    }
                }
                if !upper || faces.contains(&on) {
                    continue;
                }
                faces.insert(on.clone());
                let dh = |a: usize| pts[a].h[0] - pts[i].h[0];
                let (hj, hk) = (dh(j), dh(k));
                let nx = dj[1].checked_mul(hk).zip(hj.checked_mul(dk[1])).ok_or(TropError::Overflow)?;
                let ny = hj.checked_mul(dk[0]).zip(dj[0].checked_mul(hk)).ok_or(TropError::Overflow)?;
                let normal = [nx.0 - nx.1, ny.0 - ny.1, o];
                let off = normal[0] * pts[i].p[0] as i128 + normal[1] * pts[i].p[1] as i128 + o * pts[i].h[0];
                planes.push((on, normal, off));
            }
        }
    }
    let den_scale = scale as i128;
    let mut cells = Vec::with_capacity(planes.len());
    let mut vertices = Vec::with_capacity(planes.len());
    for (idx, (on, n, off)) in planes.iter().enumerate() {
        let exps: Vec<Vec<i64>> = on.iter().map(|&l| pts[l].p.to_vec()).collect();
        let hull = convex_hull_2d(&exps);
        let exact = ExactPoint::new(n[0], n[1], n[2].checked_mul(den_scale).ok_or(TropError::Overflow)?);
        let pos = [n[0] as f64 / (n[2] as f64 * scale), n[1] as f64 / (n[2] as f64 * scale)];
        vertices.push(CurveVertex { pos, exact });
        let mut points: Vec<ExponentVector> = exps.into_iter().map(ExponentVector).collect();
        points.sort();
        cells.push(Cell {
            vertices: hull.into_iter().map(ExponentVector).collect(),
            points,
            affine: [-pos[0], -pos[1], *off as f64 / (n[2] as f64 * scale)],
            curve_vertex: Some(idx),
        });
    }
    // pair up polygon edges
    let mut by_edge: BTreeMap<(ExponentVector, ExponentVector), Vec<(usize, ExponentVector, ExponentVector)>> =
        BTreeMap::new();
    for (ci, c) in cells.iter().enumerate() {
        let n = c.vertices.len();
        for t in 0..n {
            let (p, q) = (c.vertices[t].clone(), c.vertices[(t + 1) % n].clone());
            let key = if p < q { (p.clone(), q.clone()) } else { (q.clone(), p.clone()) };
            by_edge.entry(key).or_default().push((ci, p, q));
        }
    }
    let mut edges = Vec::new();
    let mut sub_edges = Vec::new();
    for (_, owners) in by_edge {
        let (ca, p, q) = owners[0].clone();
        let ([dx, dy], weight) = primitive([q[0] - p[0], q[1] - p[1]]);
        let direction = [dy, -dx];
        let shape = match owners.len() {
            1 => EdgeShape::Ray { from: ca },
            2 => EdgeShape::Segment { from: ca, to: owners[1].0 },
            k => unreachable!("edge shared by {k} cells"),
        };
        sub_edges.push(SubdivisionEdge {
            ends: [p.clone(), q.clone()],
            cells: owners.iter().map(|o| o.0).collect(),
            curve_edge: edges.len(),
        });
        edges.push(CurveEdge { shape, direction, weight, dual_pair: [p, q] });
    }
    Ok(Tropicalization {
        subdivision: DualSubdivision { support_dim: 2, cells, edges: sub_edges },
        curve: TropicalCurve { vertices, edges },
    })
}

fn collinear(pts: &[Lifted], scale: f64) -> Result<Tropicalization, TropError> {
    let base = pts.iter().map(|l| l.p).min().unwrap();
    let far = pts.iter().map(|l| l.p).find(|&p| p != base).unwrap();
    let (u, _) = primitive([far[0] - base[0], far[1] - base[1]]);
    let uu = u[0] * u[0] + u[1] * u[1];
    let mut order: Vec<(i64, usize)> = pts
        .iter()
        .enumerate()
        .map(|(i, l)| (((l.p[0] - base[0]) * u[0] + (l.p[1] - base[1]) * u[1]) / uu, i))
        .collect();
    order.sort();
    let mut hull: Vec<(i64, usize)> = Vec::new();
    for &(s, i) in &order {
        while hull.len() >= 2 {
            let (s1, i1) = hull[hull.len() - 2];
            let (s2, i2) = hull[hull.len() - 1];
            let (a, b) = ((s2 - s1) as i128, (s - s1) as i128);
            // cross((s1,h1),(s2,h2),(s,h)) ≥ 0 ⇒ middle point not above the chord
            let sign = lin_sign(&[(a, &pts[i].h), (b - a, &pts[i1].h), (-b, &pts[i2].h)])?;
            if sign >= 0 {
                hull.pop();
            } else {
                break;
            }
        }
        hull.push((s, i));
    }
    let mut cells = Vec::new();
    let mut edges = Vec::new();
    let mut sub_edges = Vec::new();
    for w in hull.windows(2) {
        let ((s0, i0), (s1, i1)) = (w[0], w[1]);
        let (p, q) = (pts[i0].p, pts[i1].p);
        let (c0, c1) = (pts[i0].h[0] as f64 / scale, pts[i1].h[0] as f64 / scale);
        let d = [(q[0] - p[0]) as f64, (q[1] - p[1]) as f64];
        let dd = d[0] * d[0] + d[1] * d[1];
        let t = (c0 - c1) / dd;
        let point = [t * d[0], t * d[1]];
        let ([ux, uy], weight) = primitive([q[0] - p[0], q[1] - p[1]]);
        let points: Vec<ExponentVector> =
            order.iter().filter(|(s, _)| *s >= s0 && *s <= s1).map(|(_, i)| ExponentVector::from(pts[*i].p)).collect();
        // the lifted segment, restricted to the line; the slope lives along d
        let slope = (c1 - c0) / dd;
        let affine = [
            slope * d[0],
            slope * d[1],
            c0 - slope * (d[0] * p[0] as f64 + d[1] * p[1] as f64),
        ];
        let (pe, qe) = (ExponentVector::from(p), ExponentVector::from(q));
        sub_edges.push(SubdivisionEdge { ends: [pe.clone(), qe.clone()], cells: vec![cells.len()], curve_edge: edges.len() });
        cells.push(Cell { vertices: vec![pe.clone(), qe.clone()], points, affine, curve_vertex: None });
        edges.push(CurveEdge { shape: EdgeShape::Line { point }, direction: [-uy, ux], weight, dual_pair: [pe, qe] });
    }
    Ok(Tropicalization {
        subdivision: DualSubdivision { support_dim: 1, cells, edges: sub_edges },
        curve: TropicalCurve { vertices: vec![], edges },
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BalancingViolation {
    pub vertex: usize,
    pub sum: [i64; 2],
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BalancingReport {
    pub balanced: bool,
    pub violations: Vec<BalancingViolation>,
}

pub fn balancing_check(c: &TropicalCurve) -> BalancingReport {
    let mut sums = vec![[0i64; 2]; c.vertices.len()];
    for e in &c.edges {
        let [dx, dy] = e.direction;
        match e.shape {
            EdgeShape::Segment { from, to } => {
                sums[from][0] += e.weight * dx;
                sums[from][1] += e.weight * dy;
                sums[to][0] -= e.weight * dx;
                sums[to][1] -= e.weight * dy;
            }
            EdgeShape::Ray { from } => {
                sums[from][0] += e.weight * dx;
                sums[from][1] += e.weight * dy;
            }
            EdgeShape::Line { .. } => {}
        }
    }
    let violations: Vec<BalancingViolation> = sums
        .into_iter()
        .enumerate()
        .filter(|(_, s)| *s != [0, 0])
        .map(|(vertex, sum)| BalancingViolation { vertex, sum })
        .collect();
    BalancingReport { balanced: violations.is_empty(), violations }
}

/// Whether the exponents that dominate somewhere are exactly the vertices of `p`.
pub fn solid_tropical(g: &TropicalPolynomial, p: &NewtonPolytope) -> Result<bool, TropError> {
    let sub = dual_subdivision(g)?;
    let verts: BTreeSet<ExponentVector> = p.vertices.iter().cloned().collect();
    Ok(sub.vertex_set() == verts)
}

impl TropicalCurve {
    /// Bounding box of the vertices, or `None` when there are none.
    pub fn vertex_bbox(&self) -> Option<Window> {
        let first = self.vertices.first()?.pos;
        let mut w = Window::new(first[0], first[0], first[1], first[1]);
        for v in &self.vertices {
            w.x_min = w.x_min.min(v.pos[0]);
            w.x_max = w.x_max.max(v.pos[0]);
            w.y_min = w.y_min.min(v.pos[1]);
            w.y_max = w.y_max.max(v.pos[1]);
        }
        Some(w)
    }

    /// Dense samples of the curve inside `window`.
    pub fn sample_in(&self, window: &Window, spacing: f64) -> Vec<[f64; 2]> {
        let mut out = Vec::new();
        for e in &self.edges {
            let d = [e.direction[0] as f64, e.direction[1] as f64];
            let (p, s0, s1) = match e.shape {
                EdgeShape::Segment { from, to } => {
                    let (a, b) = (self.vertices[from].pos, self.vertices[to].pos);
                    let len2 = d[0] * d[0] + d[1] * d[1];
                    let s = ((b[0] - a[0]) * d[0] + (b[1] - a[1]) * d[1]) / len2;
                    (a, 0.0, s)
                }
                EdgeShape::Ray { from } => (self.vertices[from].pos, 0.0, f64::INFINITY),
                EdgeShape::Line { point } => (point, f64::NEG_INFINITY, f64::INFINITY),
            };
            if let Some((a, b)) = window.clip(p, d, s0, s1) {
                sample_segment(p, d, a, b, spacing, &mut out);
            }
        }
        out
    }

    pub fn write_edges_csv<W: Write>(&self, out: W) -> Result<(), csv::Error> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["kind", "x0", "y0", "x1", "y1", "dx", "dy", "weight", "alpha", "beta"])?;
        for e in &self.edges {
            let (kind, a, b) = match e.shape {
                EdgeShape::Segment { from, to } => ("segment", self.vertices[from].pos, self.vertices[to].pos),
                EdgeShape::Ray { from } => ("ray", self.vertices[from].pos, [f64::NAN; 2]),
                EdgeShape::Line { point } => ("line", point, [f64::NAN; 2]),
            };
            let fmt = |v: f64| if v.is_nan() { String::new() } else { v.to_string() };
            w.write_record([
                kind.to_string(),
                fmt(a[0]),
                fmt(a[1]),
                fmt(b[0]),
                fmt(b[1]),
                e.direction[0].to_string(),
                e.direction[1].to_string(),
                e.weight.to_string(),
                e.dual_pair[0].to_string(),
                e.dual_pair[1].to_string(),
            ])?;
        }
        w.flush()?;
        Ok(())
    }
}

fn gcd3(a: i128, b: i128, c: i128) -> i128 {
    let g = |mut x: i128, mut y: i128| {
        x = x.abs();
        y = y.abs();
        while y != 0 {
            (x, y) = (y, x % y);
        }
        x
    };
    let r = g(g(a, b), c);
    if r == 0 {
        1
    } else {
        r
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lpoly::{newton_polytope, parse_polynomial};

    fn ev(a: i64, b: i64) -> ExponentVector {
        ExponentVector(vec![a, b])
    }

    fn line_trop() -> TropicalPolynomial {
        TropicalPolynomial::from_pairs(&[([0, 0], 0.0), ([1, 0], 0.0), ([0, 1], 0.0)]).unwrap()
    }

    #[test]
    fn eval_examples() {
        let g = line_trop();
        let e = trop_eval(&g, &[0.0, 0.0]);
        assert_eq!(e.value, 0.0);
        assert_eq!(e.argmax.len(), 3);
        let e = trop_eval(&g, &[3.0, 0.0]);
        assert_eq!(e.value, 3.0);
        assert_eq!(e.argmax, vec![ev(1, 0)]);
        let sq = TropicalPolynomial::from_pairs(&[([0, 0], 0.0), ([1, 0], 0.0), ([0, 1], 0.0), ([1, 1], 1.0)]).unwrap();
        let e = trop_eval(&sq, &[0.0, 0.0]);
        assert_eq!((e.value, e.argmax), (1.0, vec![ev(1, 1)]));
    }

    #[test]
    fn tropical_line() {
        let c = corner_locus(&line_trop()).unwrap();
        assert_eq!(c.vertices.len(), 1);
        assert_eq!(c.vertices[0].pos, [0.0, 0.0]);
        let mut dirs: Vec<[i64; 2]> = c.edges.iter().map(|e| e.direction).collect();
        dirs.sort();
        assert_eq!(dirs, vec![[-1, 0], [0, -1], [1, 1]]);
        assert!(c.edges.iter().all(|e| e.weight == 1 && matches!(e.shape, EdgeShape::Ray { from: 0 })));
        assert!(balancing_check(&c).balanced);
    }

    #[test]
    fn binomial_lines() {
        let g = TropicalPolynomial::from_pairs(&[([0, 0], 0.0), ([1, 0], 0.0)]).unwrap();
        let c = corner_locus(&g).unwrap();
        assert_eq!(c.edges.len(), 1);
        assert_eq!(c.edges[0].shape, EdgeShape::Line { point: [0.0, 0.0] });
        assert_eq!(c.edges[0].direction, [0, 1]);
        assert_eq!(c.edges[0].weight, 1);
        let g2 = TropicalPolynomial::from_pairs(&[([0, 0], 0.0), ([2, 0], 0.0)]).unwrap();
        let c2 = corner_locus(&g2).unwrap();
        assert_eq!(c2.edges.len(), 1);
        assert_eq!(c2.edges[0].weight, 2);
        // shifted tie: 1 = x + 0 ⇒ x = 1/2 for exponent 2
        let g3 = TropicalPolynomial::from_pairs(&[([0, 0], 1.0), ([2, 0], 0.0)]).unwrap();
        let c3 = corner_locus(&g3).unwrap();
        assert_eq!(c3.edges[0].shape, EdgeShape::Line { point: [0.5, 0.0] });
        assert!(solid_tropical(&g2, &newton_polytope(&parse_polynomial("1 + z^2").unwrap()).unwrap()).unwrap());
    }

    #[test]
    fn collinear_interior_point() {
        // 1 + 3z + z^2: the middle term dominates on (-log 3, log 3)
        let g = TropicalPolynomial::from_pairs(&[([0, 0], 0.0), ([1, 0], 3f64.ln()), ([2, 0], 0.0)]).unwrap();
        let c = corner_locus(&g).unwrap();
        assert_eq!(c.edges.len(), 2);
        let xs: Vec<f64> = c
            .edges
            .iter()
            .map(|e| match e.shape {
                EdgeShape::Line { point } => point[0],
                _ => panic!(),
            })
            .collect();
        assert!((xs[0] + 3f64.ln()).abs() < 1e-9 && (xs[1] - 3f64.ln()).abs() < 1e-9);
        let p = newton_polytope(&parse_polynomial("1 + 3z + z^2").unwrap()).unwrap();
        assert!(!solid_tropical(&g, &p).unwrap());
    }

    #[test]
    fn unit_square_subdivision() {
        let sq = TropicalPolynomial::from_pairs(&[([0, 0], 0.0), ([1, 0], 0.0), ([0, 1], 0.0), ([1, 1], 1.0)]).unwrap();
        let t = tropicalize(&sq, SubdivisionOptions::default()).unwrap();
        let mut cells: Vec<BTreeSet<ExponentVector>> =
            t.subdivision.cells.iter().map(|c| c.vertices.iter().cloned().collect()).collect();
        cells.sort();
        let a: BTreeSet<_> = [ev(0, 0), ev(0, 1), ev(1, 1)].into_iter().collect();
        let b: BTreeSet<_> = [ev(0, 0), ev(1, 0), ev(1, 1)].into_iter().collect();
        assert_eq!(cells, vec![a, b]);
        assert_eq!(t.curve.vertices.len(), 2);
        assert!(balancing_check(&t.curve).balanced);
        let bounded = t.curve.edges.iter().filter(|e| matches!(e.shape, EdgeShape::Segment { .. })).count();
        assert_eq!(bounded, 1);
    }

    #[test]
    fn single_cell_cases() {
        let t = dual_subdivision(&line_trop()).unwrap();
        assert_eq!(t.cells.len(), 1);
        assert_eq!(t.cells[0].vertices.len(), 3);
        let tri = TropicalPolynomial::from_pairs(&[([0, 1], 0.3), ([4, 0], -1.0), ([3, 5], 2.0)]).unwrap();
        assert_eq!(dual_subdivision(&tri).unwrap().cells.len(), 1);
        // a generic lift of a quadrilateral's vertices splits it along a diagonal
        let quad = TropicalPolynomial::from_pairs(&[([0, 1], 0.3), ([1, 0], -1.0), ([3, 1], 2.0), ([1, 2], 0.5)]).unwrap();
        let sub = dual_subdivision(&quad).unwrap();
        assert_eq!(sub.cells.len(), 2);
        assert_eq!(sub.vertex_set().len(), 4);
    }

    #[test]
    fn solidity_of_lifted_interior_point() {
        let p = newton_polytope(&parse_polynomial("1 + z^2 + w^2").unwrap()).unwrap();
        let g = TropicalPolynomial::from_pairs(&[([0, 0], 0.0), ([2, 0], 0.0), ([0, 2], 0.0), ([1, 1], 5.0)]).unwrap();
        assert!(!solid_tropical(&g, &p).unwrap());
        let low = TropicalPolynomial::from_pairs(&[([0, 0], 0.0), ([2, 0], 0.0), ([0, 2], 0.0), ([1, 1], -5.0)]).unwrap();
        assert!(solid_tropical(&low, &p).unwrap());
        assert!(solid_tropical(&line_trop(), &newton_polytope(&parse_polynomial("1+z+w").unwrap()).unwrap()).unwrap());
    }

    #[test]
    fn perturbed_weight_is_caught() {
        let mut c = corner_locus(&line_trop()).unwrap();
        c.edges[1].weight = 2;
        let r = balancing_check(&c);
        assert!(!r.balanced);
        assert_eq!(r.violations.len(), 1);
        assert_eq!(r.violations[0].vertex, 0);
    }

    #[test]
    fn perturbation_triangulates_flat_square() {
        let sq = TropicalPolynomial::from_pairs(&[([0, 0], 0.0), ([1, 0], 0.0), ([0, 1], 0.0), ([1, 1], 0.0)]).unwrap();
        let plain = tropicalize(&sq, SubdivisionOptions::default()).unwrap();
        assert_eq!(plain.subdivision.cells.len(), 1);
        assert_eq!(plain.subdivision.cells[0].vertices.len(), 4);
        let fine = tropicalize(&sq, SubdivisionOptions { perturb: true, ..Default::default() }).unwrap();
        assert_eq!(fine.subdivision.cells.len(), 2);
        assert!(fine.subdivision.cells.iter().all(|c| c.vertices.len() == 3));
        assert!(balancing_check(&fine.curve).balanced);
        for v in &fine.curve.vertices {
            assert_eq!(v.pos, [0.0, 0.0]);
        }
    }

    #[test]
    fn quadrilateral_log_abs_curve() {
        let f = parse_polynomial("-z*w^2 + z^3*w - 7*z*w + 6*w + z").unwrap();
        let g = TropicalPolynomial::log_abs(&f);
        let t = tropicalize(&g, SubdivisionOptions::default()).unwrap();
        assert!(balancing_check(&t.curve).balanced);
        assert_eq!(t.curve.vertices.len(), t.subdivision.cells.len());
        // (1,1) with |a| = 7 dominates a bounded region
        assert!(t.subdivision.vertex_set().contains(&ev(1, 1)));
    }

    #[test]
    fn json_round_trip() {
        let sq = TropicalPolynomial::from_pairs(&[([0, 0], 0.0), ([1, 0], 0.0), ([0, 1], 0.0), ([1, 1], 1.0)]).unwrap();
        let t = tropicalize(&sq, SubdivisionOptions::default()).unwrap();
        let js = serde_json::to_string(&sq).unwrap();
        assert_eq!(serde_json::from_str::<TropicalPolynomial>(&js).unwrap(), sq);
        let s = serde_json::to_string(&t).unwrap();
        let back: Tropicalization = serde_json::from_str(&s).unwrap();
        assert_eq!(back, t);
        let mut csv = Vec::new();
        t.curve.write_edges_csv(&mut csv).unwrap();
        assert_eq!(String::from_utf8(csv).unwrap().lines().count(), 1 + t.curve.edges.len());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        fn tpoly() -> impl Strategy<Value = TropicalPolynomial> {
            prop::collection::btree_map((0i64..5, 0i64..5), -3.0f64..3.0, 1..10).prop_map(|m| {
                TropicalPolynomial::new(2, m.into_iter().map(|((a, b), c)| (ev(a, b), c))).unwrap()
            })
        }

        fn boundary_lattice_length(g: &TropicalPolynomial) -> i64 {
            let pts: Vec<Vec<i64>> = g.support().into_iter().map(|a| a.0).collect();
            let h = convex_hull_2d(&pts);
            if h.len() < 3 {
                return 0;
            }
            (0..h.len()).map(|i| primitive([h[(i + 1) % h.len()][0] - h[i][0], h[(i + 1) % h.len()][1] - h[i][1]]).1).sum()
        }

        proptest! {
            #![proptest_config(ProptestConfig::with_cases(96))]

            #[test]
            fn balanced_and_dual(g in tpoly()) {
                let t = tropicalize(&g, SubdivisionOptions::default()).unwrap();
                prop_assert!(balancing_check(&t.curve).balanced);
                if t.subdivision.support_dim == 2 {
                    prop_assert_eq!(t.curve.vertices.len(), t.subdivision.cells.len());
                    let rays: i64 = t.curve.edges.iter()
                        .filter(|e| matches!(e.shape, EdgeShape::Ray { .. }))
                        .map(|e| e.weight).sum();
                    prop_assert_eq!(rays, boundary_lattice_length(&g));
                }
                for e in &t.curve.edges {
                    let [p, q] = &e.dual_pair;
                    let d = [q[0] - p[0], q[1] - p[1]];
                    // dual pair = weight × primitive perpendicular of the direction
                    prop_assert_eq!(d[0] * e.direction[0] + d[1] * e.direction[1], 0);
                    prop_assert_eq!(d[0].abs().max(d[1].abs()),
                        e.weight * e.direction[0].abs().max(e.direction[1].abs()));
                }
            }

            #[test]
            fn edges_are_ties(g in tpoly()) {
                let c = corner_locus(&g).unwrap();
                let w = Window::square(8.0);
                for x in c.sample_in(&w, 0.25) {
                    let e = trop_eval(&g, &x);
                    prop_assert!(e.argmax.len() >= 2, "{:?} {:?}", x, e);
                }
            }

            #[test]
            fn grid_changes_cross_curve(g in tpoly()) {
                // neighbouring grid points with different unique maximizers
                // must have a curve sample between them
                let c = corner_locus(&g).unwrap();
                let w = Window::square(6.0);
                let samples = c.sample_in(&w.scaled(1.5), 0.01);
                let step = 0.37;
                let n = (12.0 / step) as usize;
                for i in 0..n {
                    for j in 0..n {
                        let x = [-6.0 + i as f64 * step, -6.0 + j as f64 * step];
                        let y = [x[0] + step, x[1]];
                        let (ex, ey) = (trop_eval(&g, &x), trop_eval(&g, &y));
                        if ex.argmax.len() == 1 && ey.argmax.len() == 1 && ex.argmax != ey.argmax {
                            let near = samples.iter().any(|s| {
                                s[1] >= x[1] - 0.02 && s[1] <= x[1] + 0.02 && s[0] >= x[0] - 0.02 && s[0] <= y[0] + 0.02
                            });
                            prop_assert!(near, "no curve between {:?} and {:?}", x, y);
                        }
                    }
                }
            }

            #[test]
            fn eval_is_convex(g in tpoly(), x in prop::array::uniform2(-5.0f64..5.0),
                              y in prop::array::uniform2(-5.0f64..5.0), l in 0.0f64..1.0) {
                let m = [l * x[0] + (1.0 - l) * y[0], l * x[1] + (1.0 - l) * y[1]];
                let lhs = trop_eval(&g, &m).value;
                let rhs = l * trop_eval(&g, &x).value + (1.0 - l) * trop_eval(&g, &y).value;
                prop_assert!(lhs <= rhs + 1e-9);
            }

            #[test]
            fn perturbation_refines(g in tpoly()) {
                let a = tropicalize(&g, SubdivisionOptions::default()).unwrap();
                let b = tropicalize(&g, SubdivisionOptions { perturb: true, ..Default::default() }).unwrap();
                prop_assert!(balancing_check(&b.curve).balanced);
                if b.subdivision.support_dim == 2 {
                    prop_assert!(b.subdivision.cells.iter().all(|c| c.vertices.len() == 3));
                    // each refined cell sits inside a coarse cell
                    for c in &b.subdivision.cells {
                        prop_assert!(a.subdivision.cells.iter().any(|d| c.vertices.iter().all(|v| d.contains(v))));
                    }
                }
            }
        }
    }
}
