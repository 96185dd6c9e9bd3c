//! Degeneration experiments on the family `f_t`: rescaled amoebas against the
//! limiting tropical curve, solidity along `t`, and the localization check
//! near a vertex of the limit curve.

use std::f64::consts::PI;
use std::io::Write;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::amoeba::{rasterize_amoeba, report_from_raster, solve_fiber, AmoebaError, FiberSolveConfig, Resolution};
use crate::geom::Window;
use crate::lpoly::{newton_polytope, ExponentVector};
use crate::spine::{instantiate_family, DeformationFamily, SpineError};
use crate::trop::{tropicalize, SubdivisionOptions, TropError};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum DeformError {
    #[error("point cloud is empty")]
    Empty,
    #[error("scale factor must be positive, got {0}")]
    BadScale(f64),
    #[error("convergence study needs at least 4 values of t, got {0}")]
    ShortSchedule(usize),
    #[error("cell {0} is not a maximal cell of the limit subdivision")]
    NotMaximal(usize),
    #[error("no sample of the variety falls in the neighbourhood")]
    NoSamples,
    #[error(transparent)]
    Spine(#[from] SpineError),
    #[error(transparent)]
    Amoeba(#[from] AmoebaError),
    #[error(transparent)]
    Trop(#[from] TropError),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointCloud {
    pub points: Vec<[f64; 2]>,
    pub label: String,
}

impl PointCloud {
    pub fn new(points: Vec<[f64; 2]>, label: impl Into<String>) -> Self {
        PointCloud { points, label: label.into() }
    }
}

/// Log-coordinates of `H_h`: multiplication by `h`.
pub fn h_rescale(points: &PointCloud, h: f64) -> Result<PointCloud, DeformError> {
    if !(h > 0.0 && h.is_finite()) {
        return Err(DeformError::BadScale(h));
    }
    Ok(PointCloud {
        points: points.points.iter().map(|p| [p[0] * h, p[1] * h]).collect(),
        label: format!("{} (x{h})", points.label),
    })
}

/// Symmetric Hausdorff distance between finite point sets (Euclidean).
pub fn hausdorff(a: &PointCloud, b: &PointCloud) -> Result<f64, DeformError> {
    if a.points.is_empty() || b.points.is_empty() {
        return Err(DeformError::Empty);
    }
    Ok(directed(&a.points, &b.points).max(directed(&b.points, &a.points)))
}

/// `sup_{p∈a} min_{q∈b} |p - q|`, scanning `b` sorted by x outward from each
/// query and stopping once the x-gap alone exceeds the best distance.
fn directed(a: &[[f64; 2]], b: &[[f64; 2]]) -> f64 {
    let mut sorted = b.to_vec();
    sorted.sort_by(|p, q| p[0].total_cmp(&q[0]).then(p[1].total_cmp(&q[1])));
    let worst = a
        .par_iter()
        .map(|p| {
            let start = sorted.partition_point(|q| q[0] < p[0]);
            let mut best = f64::INFINITY;
            for q in &sorted[start..] {
                let dx = q[0] - p[0];
                if dx * dx >= best {
                    break;
                }
                best = best.min(dx * dx + (q[1] - p[1]).powi(2));
            }
            for q in sorted[..start].iter().rev() {
                let dx = p[0] - q[0];
                if dx * dx >= best {
                    break;
                }
                best = best.min(dx * dx + (q[1] - p[1]).powi(2));
            }
            best
        })
        .reduce(|| 0.0, f64::max);
    worst.sqrt()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceRow {
    pub t: f64,
    pub h: f64,
    pub d_h: f64,
    /// Rescaled area of the bounded complement components.
    pub bounded_cell_mass: f64,
    pub solid: bool,
    pub components: usize,
    pub error: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceTrace {
    pub window: Window,
    pub resolution: Resolution,
    pub rows: Vec<TraceRow>,
}

impl ConvergenceTrace {
    pub fn write_csv<W: Write>(&self, out: W) -> Result<(), csv::Error> {
        let mut w = csv::Writer::from_writer(out);
        w.write_record(["t", "h", "d_H", "bounded_cell_mass", "solid"])?;
        for r in &self.rows {
            w.write_record([r.t.to_string(), r.h.to_string(), r.d_h.to_string(), r.bounded_cell_mass.to_string(), r.solid.to_string()])?;
        }
        w.flush()?;
        Ok(())
    }

    /// Row-to-row non-increase of `d_H` allowing `slack` relative growth.
    pub fn d_h_non_increasing(&self, slack: f64) -> bool {
        self.rows.windows(2).all(|w| w[1].d_h <= w[0].d_h * (1.0 + slack))
    }

    pub fn mass_non_increasing(&self, slack: f64) -> bool {
        self.rows.windows(2).all(|w| w[1].bounded_cell_mass <= w[0].bounded_cell_mass * (1.0 + slack) + 1e-12)
    }
}

/// Samples of the limiting curve: corner locus of `-ν` over the support.
pub fn limit_curve_samples(fam: &DeformationFamily, window: &Window, spacing: f64) -> Result<PointCloud, DeformError> {
    let t = tropicalize(&fam.limit_tropical(), SubdivisionOptions::default())?;
    Ok(PointCloud::new(t.curve.sample_in(window, spacing), "limit curve"))
}

pub fn convergence_study(
    fam: &DeformationFamily,
    window: Window,
    resolution: Resolution,
    cfg: &FiberSolveConfig,
) -> Result<ConvergenceTrace, DeformError> {
    if fam.t_schedule.len() < 4 {
        return Err(DeformError::ShortSchedule(fam.t_schedule.len()));
    }
    let spacing = (window.width() / resolution.cols as f64).min(window.height() / resolution.rows as f64);
    let limit = limit_curve_samples(fam, &window, spacing)?;
    let vertices = newton_polytope(&fam.base_polynomial()).map_err(AmoebaError::from)?.vertices.len();
    let rows = fam
        .t_schedule
        .par_iter()
        .map(|&t| {
            let h = -1.0 / t.ln();
            match trace_row(fam, t, h, window, resolution, cfg, &limit, vertices) {
                Ok(row) => row,
                Err(e) => TraceRow {
                    t,
                    h,
                    d_h: f64::NAN,
                    bounded_cell_mass: f64::NAN,
                    solid: false,
                    components: 0,
                    error: Some(e.to_string()),
                },
            }
        })
        .collect();
    Ok(ConvergenceTrace { window, resolution, rows })
}

#[allow(clippy::too_many_arguments)]
fn trace_row(
    fam: &DeformationFamily,
    t: f64,
    h: f64,
    window: Window,
    resolution: Resolution,
    cfg: &FiberSolveConfig,
    limit: &PointCloud,
    vertices: usize,
) -> Result<TraceRow, DeformError> {
    let ft = instantiate_family(fam, t)?;
    let raster = rasterize_amoeba(&ft, window.scaled(1.0 / h), resolution, cfg)?;
    let mut pts = Vec::new();
    for r in 0..resolution.rows {
        for c in 0..resolution.cols {
            if raster.get(r, c) {
                pts.push(raster.pixel_center(r, c));
            }
        }
    }
    let cloud = h_rescale(&PointCloud::new(pts, format!("amoeba t={t}")), h)?;
    let d_h = if limit.points.is_empty() { 0.0 } else { hausdorff(&cloud, limit)? };
    let report = report_from_raster(&ft, &raster, cfg)?;
    let (dx, dy) = raster.pixel_size();
    let bounded: usize = report.components.iter().filter(|c| c.bounded).map(|c| c.pixel_count).sum();
    Ok(TraceRow {
        t,
        h,
        d_h,
        bounded_cell_mass: bounded as f64 * dx * dy * h * h,
        solid: report.total == vertices,
        components: report.total,
        error: None,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LocalizationResult {
    pub within: bool,
    pub max_distance: f64,
    pub samples: usize,
    pub vertex: [f64; 2],
    pub radius: f64,
}

fn torus_gap(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(2.0 * PI);
    d.min(2.0 * PI - d)
}

/// Checks that `V_{f_t}` over the ball around the limit-curve vertex dual to
/// `cell` stays within `epsilon` of the variety of the truncation to that
/// cell, in the product of the Log metric and the flat argument torus.
///
/// The ball has radius one third of the distance to the nearest other
/// vertex (1 when the vertex is alone), in rescaled coordinates.
pub fn localization_check(
    fam: &DeformationFamily,
    t: f64,
    cell: usize,
    epsilon: f64,
) -> Result<LocalizationResult, DeformError> {
    let trop = tropicalize(&fam.limit_tropical(), SubdivisionOptions::default())?;
    let c = trop.subdivision.cells.get(cell).ok_or(DeformError::NotMaximal(cell))?;
    let Some(vi) = c.curve_vertex else { return Err(DeformError::NotMaximal(cell)) };
    let v = trop.curve.vertices[vi].pos;
    let radius = trop
        .curve
        .vertices
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != vi)
        .map(|(_, u)| ((u.pos[0] - v[0]).powi(2) + (u.pos[1] - v[1]).powi(2)).sqrt())
        .fold(f64::INFINITY, f64::min);
    let radius = if radius.is_finite() { radius / 3.0 } else { 1.0 };
    let ft = instantiate_family(fam, t)?;
    let keep: Vec<ExponentVector> = c.points.clone();
    let trunc = ft.truncate(&keep).map_err(AmoebaError::from)?;
    let h = -1.0 / t.ln();
    let (center, rad) = ([v[0] / h, v[1] / h], radius / h);
    let cfg = FiberSolveConfig::default();
    let lines = 48;
    let angles = 64;
    let mut tasks = Vec::new();
    for var in 0..2 {
        for i in 0..lines {
            for k in 0..angles {
                let x = center[1 - var] - rad + 2.0 * rad * (i as f64 + 0.5) / lines as f64;
                let theta = 2.0 * PI * (k as f64 + 0.5) / angles as f64;
                tasks.push((var, x, theta));
            }
        }
    }
    let found: Vec<Result<Vec<f64>, DeformError>> = tasks
        .par_iter()
        .map(|&(var, x, theta)| {
            let Some(full) = solve_fiber(&ft, var, x, theta, &cfg, None)? else { return Ok(vec![]) };
            let local: Vec<Complex64> = full
                .roots
                .into_iter()
                .filter(|r| {
                    let lx = r.norm().ln();
                    (lx - center[var]).powi(2) + (x - center[1 - var]).powi(2) <= rad * rad
                })
                .collect();
            if local.is_empty() {
                return Ok(vec![]);
            }
            let tr = solve_fiber(&trunc, var, x, theta, &cfg, None)?.map(|f| f.roots).unwrap_or_default();
            Ok(local
                .iter()
                .map(|r| {
                    tr.iter()
                        .map(|s| ((r.norm().ln() - s.norm().ln()).powi(2) + torus_gap(r.arg(), s.arg()).powi(2)).sqrt())
                        .fold(f64::INFINITY, f64::min)
                })
                .collect())
        })
        .collect();
    let mut dists = Vec::new();
    for r in found {
        dists.extend(r?);
    }
    if dists.is_empty() {
        return Err(DeformError::NoSamples);
    }
    let max_distance = dists.iter().cloned().fold(0.0, f64::max);
    Ok(LocalizationResult { within: max_distance <= epsilon, max_distance, samples: dists.len(), vertex: v, radius })
}
