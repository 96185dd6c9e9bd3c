//! Amoebas of plane curves: fiber root solving, occupancy rasters, complement
//! components and the order map.

use std::collections::BTreeMap;
use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::geom::Window;
use crate::grid::{distance_transform_sq, label_components, Labels};
use crate::io::{encode_pgm, json_hash, Provenance};
use crate::lpoly::{newton_polytope, ExponentVector, LaurentPolynomial, NewtonPolytope, PolyError};
use crate::roots::{aberth, RootError};
use crate::trop::{tropicalize, EdgeShape, SubdivisionOptions, TropError, TropicalPolynomial};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AmoebaError {
    #[error("only bivariate polynomials are supported (got dimension {0})")]
    Unsupported(usize),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("substituted polynomial vanishes identically at x = {x}, theta = {theta}")]
    IdenticallyZero { x: f64, theta: f64 },
    #[error("root solver failed: {0}")]
    Roots(#[from] RootError),
    #[error("point ({}, {}) is within {distance:.3e} of the amoeba", point[0], point[1])]
    GuardBand { point: [f64; 2], distance: f64 },
    #[error("order at ({}, {}) is ambiguous: averaged count {average}", point[0], point[1])]
    Ambiguous { point: [f64; 2], average: f64 },
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error(transparent)]
    Trop(#[from] TropError),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct FiberSolveConfig {
    pub angle_samples: usize,
    pub root_tolerance: f64,
    pub max_iterations: usize,
    /// Sample lines per pixel row/column in the raster sweeps.
    pub line_subsamples: usize,
}

impl Default for FiberSolveConfig {
    fn default() -> Self {
        FiberSolveConfig { angle_samples: 256, root_tolerance: 1e-10, max_iterations: 200, line_subsamples: 1 }
    }
}

impl FiberSolveConfig {
    pub fn validate(&self) -> Result<(), AmoebaError> {
        if self.angle_samples < 16 {
            return Err(AmoebaError::InvalidConfig("angle_samples must be at least 16".into()));
        }
        if !(self.root_tolerance > 0.0 && self.root_tolerance <= 1e-6) {
            return Err(AmoebaError::InvalidConfig("root_tolerance must lie in (0, 1e-6]".into()));
        }
        if self.max_iterations == 0 || self.line_subsamples == 0 {
            return Err(AmoebaError::InvalidConfig("max_iterations and line_subsamples must be positive".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Resolution {
    pub rows: usize,
    pub cols: usize,
}

impl Resolution {
    pub fn square(n: usize) -> Self {
        Resolution { rows: n, cols: n }
    }
}

/// Roots of one fiber after substituting the other variable.
#[derive(Clone, Debug, PartialEq)]
pub struct Fiber {
    /// Lowest exponent of the solved variable.
    pub low: i64,
    /// Multiplicity of the root at zero (vanishing low-order coefficients).
    pub zero_roots: usize,
    pub roots: Vec<Complex64>,
}

impl Fiber {
    /// Argument-principle count of zeros minus poles in `|v| < e^x`.
    pub fn count_inside(&self, x: f64) -> i64 {
        self.low + self.zero_roots as i64 + self.roots.iter().filter(|r| r.norm().ln() < x).count() as i64
    }
}

/// Substitutes `z_other = exp(x + iθ)` and solves for variable `var`.
/// Returns `Ok(None)` when the substitution vanishes identically.
pub fn solve_fiber(
    f: &LaurentPolynomial,
    var: usize,
    x: f64,
    theta: f64,
    cfg: &FiberSolveConfig,
    init: Option<&[Complex64]>,
) -> Result<Option<Fiber>, AmoebaError> {
    let other = 1 - var;
    let lo = f.terms().map(|(a, _)| a[var]).min().unwrap();
    let hi = f.terms().map(|(a, _)| a[var]).max().unwrap();
    let n = (hi - lo + 1) as usize;
    let mut coeffs = vec![Complex64::new(0.0, 0.0); n];
    let mut scale = vec![0.0f64; n];
    for (alpha, c) in f.terms() {
        let e = alpha[other] as f64;
        let m = c * Complex64::from_polar((e * x).exp(), e * theta);
        let k = (alpha[var] - lo) as usize;
        coeffs[k] += m;
        scale[k] += m.norm();
    }
    // cancellation down to rounding level counts as an exact zero
    let is_zero = |k: usize| coeffs[k].norm() <= 64.0 * f64::EPSILON * scale[k];
    let Some(first) = (0..n).find(|&k| !is_zero(k)) else { return Ok(None) };
    let last = (0..n).rev().find(|&k| !is_zero(k)).unwrap();
    let trimmed = &coeffs[first..=last];
    let roots = match aberth(trimmed, init, cfg.root_tolerance, cfg.max_iterations) {
        Ok(r) => r,
        Err(RootError::NoConvergence(_)) if init.is_some() => {
            aberth(trimmed, None, cfg.root_tolerance, cfg.max_iterations)?
        }
        Err(e) => return Err(e.into()),
    };
    Ok(Some(Fiber { low: lo, zero_roots: first, roots }))
}

/// Roots in the second variable over `z = exp(x1 + iθ1)`; roots at zero are
/// discarded.
pub fn fiber_roots(f: &LaurentPolynomial, x1: f64, theta1: f64, cfg: &FiberSolveConfig) -> Result<Vec<Complex64>, AmoebaError> {
    require_plane(f)?;
    match solve_fiber(f, 1, x1, theta1, cfg, None)? {
        Some(fib) => Ok(fib.roots),
        None => Err(AmoebaError::IdenticallyZero { x: x1, theta: theta1 }),
    }
}

fn require_plane(f: &LaurentPolynomial) -> Result<(), AmoebaError> {
    if f.dim() == 2 {
        Ok(())
    } else {
        Err(AmoebaError::Unsupported(f.dim()))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AmoebaRaster {
    pub window: Window,
    pub resolution: Resolution,
    /// Row-major, row 0 at `y_max`.
    pub occupancy: Vec<bool>,
    pub provenance: Provenance,
    /// Fibers skipped because the substitution vanished identically.
    pub degenerate_fibers: usize,
    /// Fibers skipped because the root solver failed.
    pub failed_fibers: usize,
}

impl AmoebaRaster {
    pub fn pixel_size(&self) -> (f64, f64) {
        (self.window.width() / self.resolution.cols as f64, self.window.height() / self.resolution.rows as f64)
    }

    pub fn pixel_center(&self, r: usize, c: usize) -> [f64; 2] {
        let (dx, dy) = self.pixel_size();
        [self.window.x_min + (c as f64 + 0.5) * dx, self.window.y_max - (r as f64 + 0.5) * dy]
    }

    pub fn pixel_of(&self, p: [f64; 2]) -> Option<(usize, usize)> {
        if !self.window.contains(p) {
            return None;
        }
        let (dx, dy) = self.pixel_size();
        let c = (((p[0] - self.window.x_min) / dx) as usize).min(self.resolution.cols - 1);
        let r = (((self.window.y_max - p[1]) / dy) as usize).min(self.resolution.rows - 1);
        Some((r, c))
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        self.occupancy[r * self.resolution.cols + c]
    }

    pub fn contains_point(&self, p: [f64; 2]) -> bool {
        self.pixel_of(p).is_some_and(|(r, c)| self.get(r, c))
    }

    pub fn count(&self) -> usize {
        self.occupancy.iter().filter(|&&b| b).count()
    }

    /// P5 greymap: 0 on the amoeba, 255 on the complement.
    pub fn to_pgm(&self) -> Vec<u8> {
        let px: Vec<u8> = self.occupancy.iter().map(|&b| if b { 0 } else { 255 }).collect();
        encode_pgm(self.resolution.cols, self.resolution.rows, &px)
    }
}

/// Index range along one raster axis.
#[derive(Clone, Copy)]
struct Axis {
    min: f64,
    max: f64,
    n: usize,
    reversed: bool,
}

impl Axis {
    fn index(&self, v: f64) -> usize {
        let i = (((v - self.min) / (self.max - self.min)) * self.n as f64).floor();
        let i = (i.max(0.0) as usize).min(self.n - 1);
        if self.reversed {
            self.n - 1 - i
        } else {
            i
        }
    }

    fn span(&self, a: f64, b: f64) -> Option<(usize, usize)> {
        let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
        if hi < self.min || lo > self.max || !(lo.is_finite() || hi.is_finite()) {
            return None;
        }
        let (i, j) = (self.index(lo), self.index(hi));
        Some((i.min(j), i.max(j)))
    }
}

/// For one sweep line, returns covered index spans along the root axis.
/// Between consecutive angle samples, the k-th smallest log-modulus moves
/// continuously, so every value between its endpoints is attained.
fn sweep_line(
    f: &LaurentPolynomial,
    var: usize,
    x: f64,
    axis: Axis,
    cfg: &FiberSolveConfig,
) -> (Vec<(usize, usize)>, usize, usize) {
    let n = cfg.angle_samples;
    let mut spans = Vec::new();
    let (mut degenerate, mut failed) = (0, 0);
    let mut first: Option<Vec<f64>> = None;
    let mut prev: Option<Vec<f64>> = None;
    let mut warm: Option<Vec<Complex64>> = None;
    for k in 0..n {
        let theta = 2.0 * PI * k as f64 / n as f64;
        let logs = match solve_fiber(f, var, x, theta, cfg, warm.as_deref()) {
            Ok(Some(fib)) => {
                let mut l: Vec<f64> = fib.roots.iter().map(|r| r.norm().ln()).collect();
                l.sort_by(f64::total_cmp);
                warm = Some(fib.roots);
                Some(l)
            }
            Ok(None) => {
                degenerate += 1;
                warm = None;
                None
            }
            Err(_) => {
                failed += 1;
                warm = None;
                None
            }
        };
        if let Some(l) = &logs {
            for &v in l {
                spans.extend(axis.span(v, v));
            }
            if let Some(p) = &prev {
                if p.len() == l.len() {
                    for (a, b) in p.iter().zip(l) {
                        spans.extend(axis.span(*a, *b));
                    }
                }
            }
            if k == 0 {
                first = Some(l.clone());
            }
        }
        prev = logs;
    }
    if let (Some(p), Some(l)) = (&prev, &first) {
        if p.len() == l.len() {
            for (a, b) in p.iter().zip(l) {
                spans.extend(axis.span(*a, *b));
            }
        }
    }
    (spans, degenerate, failed)
}

pub fn rasterize_amoeba(
    f: &LaurentPolynomial,
    window: Window,
    resolution: Resolution,
    cfg: &FiberSolveConfig,
) -> Result<AmoebaRaster, AmoebaError> {
    require_plane(f)?;
    cfg.validate()?;
    if !window.is_valid() || resolution.rows == 0 || resolution.cols == 0 {
        return Err(AmoebaError::InvalidConfig("window must have positive area and resolution be nonzero".into()));
    }
    let (rows, cols) = (resolution.rows, resolution.cols);
    let dx = window.width() / cols as f64;
    let dy = window.height() / rows as f64;
    let s = cfg.line_subsamples;
    let row_axis = Axis { min: window.y_min, max: window.y_max, n: rows, reversed: true };
    let col_axis = Axis { min: window.x_min, max: window.x_max, n: cols, reversed: false };

    let columns: Vec<(usize, f64)> =
        (0..cols * s).map(|i| (i / s, window.x_min + (i as f64 + 0.5) * dx / s as f64)).collect();
    let col_hits: Vec<_> = columns.par_iter().map(|&(c, x1)| (c, sweep_line(f, 1, x1, row_axis, cfg))).collect();
    let rows_lines: Vec<(usize, f64)> =
        (0..rows * s).map(|i| (rows - 1 - i / s, window.y_min + (i as f64 + 0.5) * dy / s as f64)).collect();
    let row_hits: Vec<_> = rows_lines.par_iter().map(|&(r, x2)| (r, sweep_line(f, 0, x2, col_axis, cfg))).collect();

    let mut occupancy = vec![false; rows * cols];
    let (mut degenerate, mut failed) = (0, 0);
    for (c, (spans, d, e)) in col_hits {
        degenerate += d;
        failed += e;
        for (r0, r1) in spans {
            for r in r0..=r1 {
                occupancy[r * cols + c] = true;
            }
        }
    }
    for (r, (spans, d, e)) in row_hits {
        degenerate += d;
        failed += e;
        for (c0, c1) in spans {
            occupancy[r * cols + c0..=r * cols + c1].iter_mut().for_each(|b| *b = true);
        }
    }
    let config_hash = json_hash(&(window, resolution, cfg));
    Ok(AmoebaRaster {
        window,
        resolution,
        occupancy,
        provenance: Provenance::new(config_hash, f.content_hash()),
        degenerate_fibers: degenerate,
        failed_fibers: failed,
    })
}

/// Order of a complement point with the default guard band.
pub fn order_of_point(f: &LaurentPolynomial, x: [f64; 2], cfg: &FiberSolveConfig) -> Result<[i64; 2], AmoebaError> {
    order_of_point_guarded(f, x, cfg, 1e-9)
}

/// Order of a complement point: for each coordinate, the averaged number of
/// zeros minus poles inside `|v_j| < e^{x_j}` over the circle of the other
/// variable. Any root Logging within `guard` of `x_j` is an error.
pub fn order_of_point_guarded(
    f: &LaurentPolynomial,
    x: [f64; 2],
    cfg: &FiberSolveConfig,
    guard: f64,
) -> Result<[i64; 2], AmoebaError> {
    require_plane(f)?;
    cfg.validate()?;
    let mut out = [0i64; 2];
    for var in 0..2 {
        let other = 1 - var;
        let mut total = 0i64;
        let mut used = 0usize;
        let mut warm: Option<Vec<Complex64>> = None;
        for k in 0..cfg.angle_samples {
            let theta = 2.0 * PI * (k as f64 + 0.5) / cfg.angle_samples as f64;
            let Some(fib) = solve_fiber(f, var, x[other], theta, cfg, warm.as_deref())? else { continue };
            for r in &fib.roots {
                let d = (r.norm().ln() - x[var]).abs();
                if d < guard {
                    return Err(AmoebaError::GuardBand { point: x, distance: d });
                }
            }
            total += fib.count_inside(x[var]);
            used += 1;
            warm = Some(fib.roots);
        }
        if used == 0 {
            return Err(AmoebaError::IdenticallyZero { x: x[other], theta: 0.0 });
        }
        let avg = total as f64 / used as f64;
        if (avg - avg.round()).abs() >= 0.1 {
            return Err(AmoebaError::Ambiguous { point: x, average: avg });
        }
        out[var] = avg.round() as i64;
    }
    Ok(out)
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Component {
    pub order: [i64; 2],
    pub bounded: bool,
    pub witness: [f64; 2],
    pub pixel_count: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComponentReport {
    pub window: Window,
    pub resolution: Resolution,
    /// Sorted by order.
    pub components: Vec<Component>,
    pub total: usize,
    /// Raster regions before merging by order.
    pub raster_regions: usize,
    /// Regions too thin to host a witness at the guard distance.
    pub slivers: usize,
    pub provenance: Provenance,
}

impl ComponentReport {
    pub fn orders(&self) -> Vec<[i64; 2]> {
        self.components.iter().map(|c| c.order).collect()
    }

    pub fn bounded_count(&self) -> usize {
        self.components.iter().filter(|c| c.bounded).count()
    }

    pub fn component_of_order(&self, order: [i64; 2]) -> Option<&Component> {
        self.components.iter().find(|c| c.order == order)
    }

    /// Orders outside the lattice points of `p`.
    pub fn orders_outside(&self, p: &NewtonPolytope) -> Vec<[i64; 2]> {
        self.orders().into_iter().filter(|o| !p.contains(&ExponentVector::from(*o))).collect()
    }
}

/// Witness distance from the amoeba, in pixels.
pub const GUARD_PIXELS: f64 = 2.0;

/// Complement regions of a raster with their most interior pixel.
pub struct ComplementRegions {
    pub labels: Labels,
    /// Pixel index of the witness per region, `None` for slivers.
    pub witness: Vec<Option<usize>>,
}

pub fn complement_regions(raster: &AmoebaRaster) -> ComplementRegions {
    let (rows, cols) = (raster.resolution.rows, raster.resolution.cols);
    let complement: Vec<bool> = raster.occupancy.iter().map(|&b| !b).collect();
    let labels = label_components(&complement, rows, cols, false);
    let dist = distance_transform_sq(&raster.occupancy, rows, cols);
    let mut best: Vec<Option<(f64, usize)>> = vec![None; labels.regions.len()];
    for (p, l) in labels.label.iter().enumerate() {
        if let Some(l) = l {
            let b = &mut best[*l as usize];
            if b.is_none_or(|(d, _)| dist[p] > d) {
                *b = Some((dist[p], p));
            }
        }
    }
    let witness = best
        .into_iter()
        .map(|b| b.and_then(|(d, p)| (d >= GUARD_PIXELS * GUARD_PIXELS).then_some(p)))
        .collect();
    ComplementRegions { labels, witness }
}

pub fn component_report(
    f: &LaurentPolynomial,
    window: Window,
    resolution: Resolution,
    cfg: &FiberSolveConfig,
) -> Result<ComponentReport, AmoebaError> {
    let raster = rasterize_amoeba(f, window, resolution, cfg)?;
    report_from_raster(f, &raster, cfg)
}

pub fn report_from_raster(
    f: &LaurentPolynomial,
    raster: &AmoebaRaster,
    cfg: &FiberSolveConfig,
) -> Result<ComponentReport, AmoebaError> {
    let regions = complement_regions(raster);
    let cols = raster.resolution.cols;
    let (dx, dy) = raster.pixel_size();
    let guard = dx.min(dy);
    let candidates: Vec<(usize, usize)> =
        regions.witness.iter().enumerate().filter_map(|(i, w)| w.map(|p| (i, p))).collect();
    let orders: Vec<Result<[i64; 2], AmoebaError>> = candidates
        .par_iter()
        .map(|&(_, p)| order_of_point_guarded(f, raster.pixel_center(p / cols, p % cols), cfg, guard))
        .collect();
    let mut merged: BTreeMap<[i64; 2], Component> = BTreeMap::new();
    let mut largest: BTreeMap<[i64; 2], usize> = BTreeMap::new();
    for (&(i, p), order) in candidates.iter().zip(orders) {
        let order = order?;
        let region = &regions.labels.regions[i];
        let witness = raster.pixel_center(p / cols, p % cols);
        let e = merged.entry(order).or_insert(Component { order, bounded: true, witness, pixel_count: 0 });
        e.pixel_count += region.pixels;
        e.bounded &= !region.touches_border;
        let big = largest.entry(order).or_insert(0);
        if region.pixels > *big {
            *big = region.pixels;
            e.witness = witness;
        }
    }
    let components: Vec<Component> = merged.into_values().collect();
    Ok(ComponentReport {
        window: raster.window,
        resolution: raster.resolution,
        total: components.len(),
        components,
        raster_regions: regions.labels.regions.len(),
        slivers: regions.witness.iter().filter(|w| w.is_none()).count(),
        provenance: raster.provenance.clone(),
    })
}

/// Window around the corner locus of `log|a_α|`, padded by
/// `max(3, diameter of Δ)` on each side and made square.
pub fn auto_window(f: &LaurentPolynomial) -> Result<Window, AmoebaError> {
    require_plane(f)?;
    let p = newton_polytope(f)?;
    let t = tropicalize(&TropicalPolynomial::log_abs(f), SubdivisionOptions::default())?;
    let mut pts: Vec<[f64; 2]> = t.curve.vertices.iter().map(|v| v.pos).collect();
    for e in &t.curve.edges {
        if let EdgeShape::Line { point } = e.shape {
            pts.push(point);
        }
    }
    if pts.is_empty() {
        pts.push([0.0, 0.0]);
    }
    let x0 = pts.iter().map(|p| p[0]).fold(f64::INFINITY, f64::min);
    let x1 = pts.iter().map(|p| p[0]).fold(f64::NEG_INFINITY, f64::max);
    let y0 = pts.iter().map(|p| p[1]).fold(f64::INFINITY, f64::min);
    let y1 = pts.iter().map(|p| p[1]).fold(f64::NEG_INFINITY, f64::max);
    let margin = p.diameter().max(3.0);
    let half = ((x1 - x0).max(y1 - y0)) / 2.0 + margin;
    Ok(Window::centered([(x0 + x1) / 2.0, (y0 + y1) / 2.0], half))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolidityVerdict {
    pub solid: bool,
    pub maximally_sparse: bool,
    pub components: usize,
    pub vertices: usize,
    pub report: ComponentReport,
}

pub fn verify_solid(f: &LaurentPolynomial) -> Result<SolidityVerdict, AmoebaError> {
    verify_solid_with(f, None, Resolution::square(512), &FiberSolveConfig::default())
}

pub fn verify_solid_with(
    f: &LaurentPolynomial,
    window: Option<Window>,
    resolution: Resolution,
    cfg: &FiberSolveConfig,
) -> Result<SolidityVerdict, AmoebaError> {
    let window = match window {
        Some(w) => w,
        None => auto_window(f)?,
    };
    let p = newton_polytope(f)?;
    let report = component_report(f, window, resolution, cfg)?;
    Ok(SolidityVerdict {
        solid: report.total == p.vertices.len(),
        maximally_sparse: crate::lpoly::is_maximally_sparse(f),
        components: report.total,
        vertices: p.vertices.len(),
        report,
    })
}

/// Samples pixel pairs inside each raster region and counts segments that
/// leave the region by more than one pixel.
pub fn convexity_spot_check(raster: &AmoebaRaster, pairs: usize, seed: u64) -> Vec<(usize, usize)> {
    let regions = complement_regions(raster);
    let (rows, cols) = (raster.resolution.rows, raster.resolution.cols);
    let labels = &regions.labels;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::new();
    for (id, reg) in labels.regions.iter().enumerate() {
        if reg.pixels < 2 {
            continue;
        }
        let pix = labels.pixels_of(id);
        let inside_near = |r: i64, c: i64| -> bool {
            (-1..=1).any(|a| {
                (-1..=1).any(|b| {
                    let (rr, cc) = (r + a, c + b);
                    rr >= 0
                        && cc >= 0
                        && (rr as usize) < rows
                        && (cc as usize) < cols
                        && labels.label[rr as usize * cols + cc as usize] == Some(id as u32)
                })
            })
        };
        let mut failures = 0;
        for _ in 0..pairs {
            let p = pix[rng.gen_range(0..pix.len())];
            let q = pix[rng.gen_range(0..pix.len())];
            let (r0, c0) = ((p / cols) as f64, (p % cols) as f64);
            let (r1, c1) = ((q / cols) as f64, (q % cols) as f64);
            let steps = (((r1 - r0).abs().max((c1 - c0).abs())) * 2.0).ceil().max(1.0) as usize;
            let ok = (0..=steps).all(|s| {
                let t = s as f64 / steps as f64;
                inside_near((r0 + t * (r1 - r0)).round() as i64, (c0 + t * (c1 - c0)).round() as i64)
            });
            if !ok {
                failures += 1;
            }
        }
        out.push((id, failures));
    }
    out
}
