//! Coamoebas on the argument torus `[0,2π)²`: sampled rasters of plane
//! curves, the polyhedral coamoeba of the standard hyperplane, its images
//! under unimodular monomial changes of variables, and a detector for pieces
//! present in one coamoeba but absent in another.

use std::f64::consts::PI;

use num_complex::Complex64;
use num_integer::Integer;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::amoeba::{auto_window, solve_fiber, AmoebaError, FiberSolveConfig, Resolution};
use crate::grid::{dilate, distance_transform_sq, label_components};
use crate::io::encode_pgm;
use crate::lpoly::LaurentPolynomial;

const TAU: f64 = 2.0 * PI;

/// Extra log-modulus range swept beyond the auto window on each side.
pub const SWEEP_PADDING: f64 = 8.0;
/// Connected pieces below this many pixels are treated as noise.
pub const NOISE_FLOOR_PIXELS: usize = 10;
pub const DILATION_PIXELS: usize = 2;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CoamError {
    #[error("resolution must be at least 128x128, got {rows}x{cols}")]
    ResolutionTooSmall { rows: usize, cols: usize },
    #[error("resolutions differ: {0:?} vs {1:?}")]
    ResolutionMismatch(Resolution, Resolution),
    #[error("standard model is only built for n = 2 or 3, got {0}")]
    Dimension(usize),
    #[error("transform must have positive determinant, got {0}")]
    Determinant(i64),
    #[error("inverse transpose {0:?}/{1} does not invert to an integer matrix")]
    NotIntegral(Vec<Vec<i64>>, i64),
    #[error("matrix is {got}x{got} but the model has dimension {want}")]
    Shape { got: usize, want: usize },
    #[error("polynomial is not supported on the vertices of a simplex")]
    NotSimplex,
    #[error(transparent)]
    Amoeba(#[from] AmoebaError),
}

/// Occupancy of the argument torus. Column `c` covers
/// `θ₁ ∈ [2πc/cols, 2π(c+1)/cols)` and row `r` covers
/// `θ₂ ∈ [2πr/rows, 2π(r+1)/rows)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CoamoebaRaster {
    pub resolution: Resolution,
    pub occupancy: Vec<bool>,
    pub samples_used: usize,
}

impl CoamoebaRaster {
    pub fn empty(resolution: Resolution) -> Result<Self, CoamError> {
        if resolution.rows < 128 || resolution.cols < 128 {
            return Err(CoamError::ResolutionTooSmall { rows: resolution.rows, cols: resolution.cols });
        }
        Ok(CoamoebaRaster { resolution, occupancy: vec![false; resolution.rows * resolution.cols], samples_used: 0 })
    }

    pub fn from_predicate(resolution: Resolution, inside: impl Fn([f64; 2]) -> bool + Sync) -> Result<Self, CoamError> {
        let mut r = CoamoebaRaster::empty(resolution)?;
        let cols = resolution.cols;
        r.occupancy.par_chunks_mut(cols).enumerate().for_each(|(row, out)| {
            for (c, o) in out.iter_mut().enumerate() {
                *o = inside([
                    TAU * (c as f64 + 0.5) / cols as f64,
                    TAU * (row as f64 + 0.5) / resolution.rows as f64,
                ]);
            }
        });
        r.samples_used = resolution.rows * cols;
        Ok(r)
    }

    pub fn pixel_of(&self, theta: [f64; 2]) -> (usize, usize) {
        (angle_index(theta[1], self.resolution.rows), angle_index(theta[0], self.resolution.cols))
    }

    pub fn get(&self, r: usize, c: usize) -> bool {
        self.occupancy[r * self.resolution.cols + c]
    }

    pub fn count(&self) -> usize {
        self.occupancy.iter().filter(|&&b| b).count()
    }

    /// Greymap with `θ₂` increasing upward; occupied pixels are black.
    pub fn to_pgm(&self) -> Vec<u8> {
        let Resolution { rows, cols } = self.resolution;
        let mut px = Vec::with_capacity(rows * cols);
        for r in (0..rows).rev() {
            px.extend(self.occupancy[r * cols..(r + 1) * cols].iter().map(|&b| if b { 0u8 } else { 255 }));
        }
        encode_pgm(cols, rows, &px)
    }
}

fn angle_index(theta: f64, n: usize) -> usize {
    ((theta.rem_euclid(TAU) / TAU * n as f64) as usize).min(n - 1)
}

fn torus_gap(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(TAU);
    d.min(TAU - d)
}

/// Occupancy fraction times `4π²`.
pub fn raster_volume(r: &CoamoebaRaster) -> f64 {
    r.count() as f64 / r.occupancy.len() as f64 * TAU * TAU
}

/// Samples `Arg(V_f)` by sweeping the log-modulus of one coordinate at each
/// pixel-centre argument, solving for the other, and marking the arguments
/// of the roots. Steps are bisected until every root moves by at most half
/// a pixel in argument. The sweep with the roles of the coordinates swapped
/// is added to the same raster.
pub fn rasterize_coamoeba(f: &LaurentPolynomial, resolution: Resolution, cfg: &FiberSolveConfig) -> Result<CoamoebaRaster, CoamError> {
    cfg.validate()?;
    let mut raster = CoamoebaRaster::empty(resolution)?;
    let window = auto_window(f)?;
    let Resolution { rows, cols } = resolution;
    // var = 1: columns fixed, solve for w; var = 0: rows fixed, solve for z.
    let mut jobs = Vec::with_capacity(rows + cols);
    for c in 0..cols {
        jobs.push((1usize, c));
    }
    for r in 0..rows {
        jobs.push((0usize, r));
    }
    let results: Vec<Result<(Vec<usize>, usize), CoamError>> = jobs
        .par_iter()
        .map(|&(var, line)| {
            let (n_fixed, n_free) = if var == 1 { (cols, rows) } else { (rows, cols) };
            let theta = TAU * (line as f64 + 0.5) / n_fixed as f64;
            let (lo, hi) = if var == 1 { (window.x_min, window.x_max) } else { (window.y_min, window.y_max) };
            let mut hits = Vec::new();
            let solves = sweep_line(f, var, theta, lo - SWEEP_PADDING, hi + SWEEP_PADDING, TAU / n_free as f64, cfg, &mut |arg| {
                hits.push(angle_index(arg, n_free))
            })?;
            hits.sort_unstable();
            hits.dedup();
            Ok((hits.into_iter().map(|k| if var == 1 { k * cols + line } else { line * cols + k }).collect(), solves))
        })
        .collect();
    for r in results {
        let (pixels, solves) = r?;
        raster.samples_used += solves;
        for p in pixels {
            raster.occupancy[p] = true;
        }
    }
    Ok(raster)
}

#[allow(clippy::too_many_arguments)]
fn sweep_line(
    f: &LaurentPolynomial,
    var: usize,
    theta: f64,
    x0: f64,
    x1: f64,
    pixel: f64,
    cfg: &FiberSolveConfig,
    mark: &mut impl FnMut(f64),
) -> Result<usize, CoamError> {
    const MIN_STEP: f64 = 1e-9;
    const MAX_STEP: f64 = 0.25;
    let mut solves = 0;
    let mut solve = |x: f64, init: Option<&[Complex64]>| -> Result<Option<Vec<Complex64>>, CoamError> {
        solves += 1;
        Ok(solve_fiber(f, var, x, theta, cfg, init)?.map(|fib| fib.roots))
    };
    let mut x = x0;
    let mut prev = solve(x, None)?;
    if let Some(p) = &prev {
        p.iter().for_each(|r| mark(r.arg()));
    }
    let mut step = 0.02;
    while x < x1 {
        let xn = (x + step).min(x1);
        let cur = solve(xn, prev.as_deref())?;
        let (Some(p), Some(c)) = (&prev, &cur) else {
            if let Some(c) = &cur {
                c.iter().for_each(|r| mark(r.arg()));
            }
            prev = cur;
            x = xn;
            continue;
        };
        if p.len() != c.len() {
            c.iter().for_each(|r| mark(r.arg()));
            prev = cur;
            x = xn;
            continue;
        }
        let pairs = match_roots(p, c);
        let moved = pairs.iter().map(|&(i, j)| torus_gap(p[i].arg(), c[j].arg())).fold(0.0, f64::max);
        if moved > 0.5 * pixel && step > MIN_STEP {
            step /= 2.0;
            continue;
        }
        for &(i, j) in &pairs {
            let (a, b) = (p[i].arg(), c[j].arg());
            let d = (b - a + PI).rem_euclid(TAU) - PI;
            let n = (d.abs() / (0.5 * pixel)).ceil() as usize;
            for k in 1..=n {
                mark(a + d * k as f64 / n as f64);
            }
            mark(b);
        }
        if moved < 0.125 * pixel {
            step = (step * 2.0).min(MAX_STEP);
        }
        prev = cur;
        x = xn;
    }
    Ok(solves)
}

/// Greedy nearest pairing of two equally long root lists.
fn match_roots(a: &[Complex64], b: &[Complex64]) -> Vec<(usize, usize)> {
    let mut cand = Vec::with_capacity(a.len() * b.len());
    for (i, p) in a.iter().enumerate() {
        for (j, q) in b.iter().enumerate() {
            cand.push(((p - q).norm() / p.norm().max(q.norm()).max(f64::MIN_POSITIVE), i, j));
        }
    }
    cand.sort_by(|x, y| x.0.total_cmp(&y.0));
    let (mut ua, mut ub) = (vec![false; a.len()], vec![false; b.len()]);
    let mut out = Vec::with_capacity(a.len());
    for (_, i, j) in cand {
        if !ua[i] && !ub[j] {
            ua[i] = true;
            ub[j] = true;
            out.push((i, j));
        }
    }
    out
}

/// One piece `D_s = τ_s \ C_s`. Coordinates are integer multiples of π in
/// the lift `[0,2π]ⁿ`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Polyhedron {
    /// The `2ⁿ` vertices of the cube `τ_s`, side π.
    pub cube: Vec<Vec<i64>>,
    /// Apex of the cone `C_s`.
    pub apex: Vec<i64>,
    /// Vertices of the `(n−1)`-cube at the base of `C_s`.
    pub base: Vec<Vec<i64>>,
}

impl Polyhedron {
    fn lower(&self) -> Vec<i64> {
        (0..self.apex.len()).map(|k| self.cube.iter().map(|v| v[k]).min().unwrap()).collect()
    }

    fn base_axis(&self) -> usize {
        (0..self.apex.len()).find(|&k| self.base.iter().all(|v| v[k] == self.base[0][k])).unwrap()
    }

    /// Membership of a lift point (radians).
    pub fn contains(&self, theta: &[f64]) -> bool {
        let lo = self.lower();
        let in_cube = theta.iter().zip(&lo).all(|(&t, &l)| t >= l as f64 * PI && t <= (l + 1) as f64 * PI);
        in_cube && !self.in_cone(theta)
    }

    fn in_cone(&self, theta: &[f64]) -> bool {
        let k = self.base_axis();
        let apex: Vec<f64> = self.apex.iter().map(|&a| a as f64 * PI).collect();
        let lambda = (theta[k] - apex[k]) / (self.base[0][k] as f64 * PI - apex[k]);
        if !(0.0..=1.0).contains(&lambda) {
            return false;
        }
        if lambda == 0.0 {
            return theta.iter().zip(&apex).all(|(t, a)| t == a);
        }
        (0..theta.len()).filter(|&j| j != k).all(|j| {
            let y = apex[j] + (theta[j] - apex[j]) / lambda;
            let lo = self.base.iter().map(|v| v[j]).min().unwrap() as f64 * PI;
            let hi = self.base.iter().map(|v| v[j]).max().unwrap() as f64 * PI;
            y >= lo && y <= hi
        })
    }

    /// Volume as a rational multiple `(num, den)` of `πⁿ`.
    pub fn volume_over_pi_n(&self) -> (i64, i64) {
        let n = self.apex.len() as i64;
        // unit cube minus a cone over a unit (n-1)-cube with unit height
        reduce(n - 1, n)
    }

    /// For `n = 2`, the triangle `D_s` as apex, far cube corner, far base corner.
    pub fn triangle(&self) -> Option<[[i64; 2]; 3]> {
        if self.apex.len() != 2 {
            return None;
        }
        let in_cone = |v: &Vec<i64>| *v == self.apex || self.base.contains(v);
        let far = self.cube.iter().find(|v| !in_cone(v))?;
        let b = self.base.iter().find(|v| (0..2).filter(|&k| v[k] != far[k]).count() == 1)?;
        Some([[self.apex[0], self.apex[1]], [far[0], far[1]], [b[0], b[1]]])
    }
}

fn reduce(num: i64, den: i64) -> (i64, i64) {
    let g = num.gcd(&den).max(1);
    (num / g, den / g)
}

/// The coamoeba of `1 + z₁ + … + zₙ` as the union of `2ⁿ − 2` pieces.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StandardCoamoebaModel {
    pub n: usize,
    pub polyhedra: Vec<Polyhedron>,
}

/// Builds the pieces for every sign pattern `s ∈ {0,1}ⁿ` except all-zero and
/// all-one. Coordinates with `s_i = 0` lie in `[0,π]` (call them `a`), the
/// others in `[π,2π]` (call them `π + b`). The cone is `{max a ≤ min b}`,
/// a pyramid over a face of the cube when one group has a single coordinate.
pub fn standard_model(n: usize) -> Result<StandardCoamoebaModel, CoamError> {
    if !(2..=3).contains(&n) {
        return Err(CoamError::Dimension(n));
    }
    let mut polyhedra = Vec::new();
    for mask in 1..(1u32 << n) - 1 {
        let s: Vec<i64> = (0..n).map(|i| ((mask >> (n - 1 - i)) & 1) as i64).collect();
        let cube: Vec<Vec<i64>> = (0..1u32 << n)
            .map(|c| (0..n).map(|i| s[i] + ((c >> (n - 1 - i)) & 1) as i64).collect())
            .collect();
        let ones: Vec<usize> = (0..n).filter(|&i| s[i] == 1).collect();
        let zeros: Vec<usize> = (0..n).filter(|&i| s[i] == 0).collect();
        let (apex, axis, base_level) = if ones.len() == 1 {
            (s.clone(), ones[0], 2)
        } else {
            (s.iter().map(|&x| x + 1).collect::<Vec<_>>(), zeros[0], 0)
        };
        let base = cube.iter().filter(|v| v[axis] == base_level).cloned().collect();
        polyhedra.push(Polyhedron { cube, apex, base });
    }
    Ok(StandardCoamoebaModel { n, polyhedra })
}

impl StandardCoamoebaModel {
    /// Membership of a torus point (radians, any representative).
    pub fn contains(&self, theta: &[f64]) -> bool {
        let t: Vec<f64> = theta.iter().map(|x| x.rem_euclid(TAU)).collect();
        self.polyhedra.iter().any(|p| p.contains(&t))
    }

    /// Total volume as a rational multiple `(num, den)` of `πⁿ`.
    pub fn volume_over_pi_n(&self) -> (i64, i64) {
        self.polyhedra.iter().map(|p| p.volume_over_pi_n()).fold((0, 1), |(a, b), (c, d)| reduce(a * d + c * b, b * d))
    }

    pub fn volume(&self) -> f64 {
        let (p, q) = self.volume_over_pi_n();
        p as f64 / q as f64 * PI.powi(self.n as i32)
    }

    /// Seeded Monte Carlo estimate of the volume.
    pub fn monte_carlo_volume(&self, samples: usize, seed: u64) -> f64 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut theta = vec![0.0; self.n];
        let mut hits = 0usize;
        for _ in 0..samples {
            theta.iter_mut().for_each(|t| *t = rng.gen_range(0.0..TAU));
            if self.contains(&theta) {
                hits += 1;
            }
        }
        hits as f64 / samples as f64 * TAU.powi(self.n as i32)
    }

    pub fn raster(&self, resolution: Resolution) -> Result<CoamoebaRaster, CoamError> {
        if self.n != 2 {
            return Err(CoamError::Dimension(self.n));
        }
        CoamoebaRaster::from_predicate(resolution, |t| self.contains(&t))
    }

    /// Connected pieces on an `res`ⁿ voxel grid of the torus after removing
    /// voxels adjacent to the real hyperplanes `θ_i ∈ {0, π}`.
    pub fn piece_count(&self, res: usize) -> usize {
        let n = self.n;
        let total = res.pow(n as u32);
        let coords = |mut idx: usize| -> Vec<usize> {
            let mut c = vec![0; n];
            for k in (0..n).rev() {
                c[k] = idx % res;
                idx /= res;
            }
            c
        };
        let near_real = |k: usize| k == 0 || k + 1 == res || k + 1 == res / 2 || k == res / 2;
        let mask: Vec<bool> = (0..total)
            .into_par_iter()
            .map(|i| {
                let c = coords(i);
                if c.iter().any(|&k| near_real(k)) {
                    return false;
                }
                let t: Vec<f64> = c.iter().map(|&k| TAU * (k as f64 + 0.5) / res as f64).collect();
                self.contains(&t)
            })
            .collect();
        count_torus_components(&mask, n, res, NOISE_FLOOR_PIXELS)
    }
}

/// Components of an `n`-dimensional periodic voxel mask with at least
/// `min_size` voxels (face adjacency).
fn count_torus_components(mask: &[bool], n: usize, res: usize, min_size: usize) -> usize {
    let mut seen = vec![false; mask.len()];
    let mut count = 0;
    let strides: Vec<usize> = (0..n).map(|k| res.pow((n - 1 - k) as u32)).collect();
    let mut stack = Vec::new();
    for start in 0..mask.len() {
        if !mask[start] || seen[start] {
            continue;
        }
        seen[start] = true;
        stack.push(start);
        let mut size = 0;
        while let Some(p) = stack.pop() {
            size += 1;
            for &s in &strides {
                let k = (p / s) % res;
                for q in [p - k * s + ((k + 1) % res) * s, p - k * s + ((k + res - 1) % res) * s] {
                    if mask[q] && !seen[q] {
                        seen[q] = true;
                        stack.push(q);
                    }
                }
            }
        }
        if size >= min_size {
            count += 1;
        }
    }
    count
}

/// Monomial change of variables on the argument torus: `lt` is the
/// transpose `ᵗL` of the linear part of the affine map from the standard
/// simplex onto the Newton simplex. Images are `translation + ᵗL⁻¹(D_std)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UnimodularTransformData {
    pub lt: Vec<Vec<i64>>,
    /// Lift coordinates in `[0, 2π)`.
    pub translation: Vec<f64>,
}

fn det(m: &[Vec<i64>]) -> i64 {
    match m.len() {
        1 => m[0][0],
        2 => m[0][0] * m[1][1] - m[0][1] * m[1][0],
        3 => {
            m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1]) - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
                + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
        }
        _ => unreachable!("dimension checked by callers"),
    }
}

fn adjugate(m: &[Vec<i64>]) -> Vec<Vec<i64>> {
    let n = m.len();
    if n == 2 {
        return vec![vec![m[1][1], -m[0][1]], vec![-m[1][0], m[0][0]]];
    }
    let mut adj = vec![vec![0; n]; n];
    for i in 0..n {
        for j in 0..n {
            let minor: Vec<Vec<i64>> = (0..n)
                .filter(|&r| r != j)
                .map(|r| (0..n).filter(|&c| c != i).map(|c| m[r][c]).collect())
                .collect();
            adj[i][j] = if (i + j) % 2 == 0 { det(&minor) } else { -det(&minor) };
        }
    }
    adj
}

impl UnimodularTransformData {
    pub fn new(lt: Vec<Vec<i64>>, translation: Vec<f64>) -> Result<Self, CoamError> {
        let n = lt.len();
        if !(2..=3).contains(&n) || lt.iter().any(|r| r.len() != n) || translation.len() != n {
            return Err(CoamError::Shape { got: n, want: translation.len() });
        }
        let d = det(&lt);
        if d <= 0 {
            return Err(CoamError::Determinant(d));
        }
        Ok(UnimodularTransformData { lt, translation: translation.iter().map(|t| t.rem_euclid(TAU)).collect() })
    }

    pub fn identity(n: usize) -> Self {
        let lt = (0..n).map(|i| (0..n).map(|j| (i == j) as i64).collect()).collect();
        UnimodularTransformData { lt, translation: vec![0.0; n] }
    }

    /// From `ᵗL⁻¹ = num / den`.
    pub fn from_inverse_transpose(num: Vec<Vec<i64>>, den: i64, translation: Vec<f64>) -> Result<Self, CoamError> {
        let n = num.len();
        if !(2..=3).contains(&n) || num.iter().any(|r| r.len() != n) {
            return Err(CoamError::Shape { got: n, want: translation.len() });
        }
        let d = det(&num);
        if d == 0 {
            return Err(CoamError::Determinant(0));
        }
        // (num/den)^{-1} = den · adj(num) / det(num)
        let adj = adjugate(&num);
        let mut lt = vec![vec![0; n]; n];
        for i in 0..n {
            for j in 0..n {
                let v = den * adj[i][j];
                if v % d != 0 {
                    return Err(CoamError::NotIntegral(num, den));
                }
                lt[i][j] = v / d;
            }
        }
        Self::new(lt, translation)
    }

    /// Transform for a polynomial with `n + 1` terms on the vertices of an
    /// `n`-simplex: `f / (a₀ z^{α₀}) = 1 + Σ a'_j z^{α_j − α₀}`.
    pub fn for_simplex_polynomial(f: &LaurentPolynomial) -> Result<Self, CoamError> {
        let n = f.dim();
        let terms: Vec<(Vec<i64>, Complex64)> = f.terms().map(|(a, c)| (a.0.clone(), *c)).collect();
        if !(2..=3).contains(&n) || terms.len() != n + 1 {
            return Err(CoamError::NotSimplex);
        }
        let (a0, c0) = &terms[0];
        let mut cols: Vec<(Vec<i64>, f64)> =
            terms[1..].iter().map(|(a, c)| (a.iter().zip(a0).map(|(x, y)| x - y).collect(), (c / c0).arg())).collect();
        let build = |cols: &[(Vec<i64>, f64)]| -> Vec<Vec<i64>> {
            // row j of ᵗL is the j-th exponent difference
            cols.iter().map(|(v, _)| v.clone()).collect()
        };
        let mut lt = build(&cols);
        match det(&lt) {
            0 => return Err(CoamError::NotSimplex),
            d if d < 0 => {
                cols.swap(0, 1);
                lt = build(&cols);
            }
            _ => {}
        }
        // ᵗLθ + φ ∈ D_std  ⇔  ᵗL(θ − tr) ∈ D_std  with  tr = −ᵗL⁻¹φ
        let d = det(&lt) as f64;
        let adj = adjugate(&lt);
        let tr: Vec<f64> = (0..n).map(|i| -(0..n).map(|j| adj[i][j] as f64 * cols[j].1).sum::<f64>() / d).collect();
        Self::new(lt, tr)
    }

    pub fn det(&self) -> i64 {
        det(&self.lt)
    }

    /// `ᵗL(θ − translation)`, the point of the standard picture over `θ`.
    pub fn pull_back(&self, theta: &[f64]) -> Vec<f64> {
        self.lt
            .iter()
            .map(|row| row.iter().zip(theta).zip(&self.translation).map(|((&l, &t), &tr)| l as f64 * (t - tr)).sum())
            .collect()
    }
}

/// Raster of `translation + ᵗL⁻¹(D_std)` reduced mod 2π, i.e. the union of
/// the `det ᵗL` torus preimages, tested by pulling pixel centres back.
pub fn transform_coamoeba(
    model: &StandardCoamoebaModel,
    t: &UnimodularTransformData,
    resolution: Resolution,
) -> Result<CoamoebaRaster, CoamError> {
    if t.lt.len() != model.n {
        return Err(CoamError::Shape { got: t.lt.len(), want: model.n });
    }
    if model.n != 2 {
        return Err(CoamError::Dimension(model.n));
    }
    CoamoebaRaster::from_predicate(resolution, |theta| model.contains(&t.pull_back(&theta)))
}

/// Pieces of a transformed planar model after removing pixels whose pullback
/// lies within one (pulled back) pixel of a real hyperplane.
pub fn transformed_piece_count(
    model: &StandardCoamoebaModel,
    t: &UnimodularTransformData,
    resolution: Resolution,
) -> Result<usize, CoamError> {
    let raster = transform_coamoeba(model, t, resolution)?;
    let px = TAU / resolution.rows.min(resolution.cols) as f64;
    let widths: Vec<f64> = t.lt.iter().map(|r| r.iter().map(|x| x.abs() as f64).sum::<f64>() * px).collect();
    let mut mask = raster.occupancy.clone();
    let cols = resolution.cols;
    for (i, m) in mask.iter_mut().enumerate() {
        if !*m {
            continue;
        }
        let theta = [TAU * ((i % cols) as f64 + 0.5) / cols as f64, TAU * ((i / cols) as f64 + 0.5) / resolution.rows as f64];
        let p = t.pull_back(&theta);
        if p.iter().zip(&widths).any(|(x, w)| {
            let r = x.rem_euclid(PI);
            r.min(PI - r) < *w
        }) {
            *m = false;
        }
    }
    let labels = label_components(&mask, resolution.rows, cols, true);
    Ok(labels.regions.iter().filter(|r| r.pixels >= NOISE_FLOOR_PIXELS).count())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExtraPieceReport {
    pub extra_area: f64,
    pub piece_count: usize,
    pub piece_pixels: Vec<usize>,
}

/// Pieces of `deformed` outside `sparse` on the torus. A piece counts when
/// more than the noise floor of it lies outside the 2-pixel dilation of
/// `sparse`; its area is that of the whole undilated piece.
pub fn extra_piece_report(sparse: &CoamoebaRaster, deformed: &CoamoebaRaster) -> Result<ExtraPieceReport, CoamError> {
    if sparse.resolution != deformed.resolution {
        return Err(CoamError::ResolutionMismatch(sparse.resolution, deformed.resolution));
    }
    let Resolution { rows, cols } = sparse.resolution;
    let grown = dilate(&sparse.occupancy, rows, cols, DILATION_PIXELS, true);
    let diff: Vec<bool> = deformed.occupancy.iter().zip(&sparse.occupancy).map(|(&d, &s)| d && !s).collect();
    let labels = label_components(&diff, rows, cols, true);
    let mut core = vec![0usize; labels.regions.len()];
    for (l, _) in labels.label.iter().zip(&grown).filter(|(_, &g)| !g) {
        if let Some(l) = l {
            core[*l as usize] += 1;
        }
    }
    let mut piece_pixels: Vec<usize> =
        labels.regions.iter().zip(&core).filter(|(_, &c)| c > NOISE_FLOOR_PIXELS).map(|(r, _)| r.pixels).collect();
    piece_pixels.sort_unstable_by(|a, b| b.cmp(a));
    let pixel_area = TAU * TAU / (rows * cols) as f64;
    Ok(ExtraPieceReport {
        extra_area: piece_pixels.iter().sum::<usize>() as f64 * pixel_area,
        piece_count: piece_pixels.len(),
        piece_pixels,
    })
}

/// Hausdorff distance in pixels between the occupied sets on the torus;
/// infinite when exactly one of them is empty.
pub fn set_distance(a: &CoamoebaRaster, b: &CoamoebaRaster) -> Result<f64, CoamError> {
    if a.resolution != b.resolution {
        return Err(CoamError::ResolutionMismatch(a.resolution, b.resolution));
    }
    let (ca, cb) = (a.count(), b.count());
    if ca == 0 && cb == 0 {
        return Ok(0.0);
    }
    if ca == 0 || cb == 0 {
        return Ok(f64::INFINITY);
    }
    Ok(directed_torus(a, b).max(directed_torus(b, a)))
}

fn directed_torus(a: &CoamoebaRaster, b: &CoamoebaRaster) -> f64 {
    let Resolution { rows, cols } = a.resolution;
    // periodic distance via a 3x3 tiling of `b`
    let (tr, tc) = (3 * rows, 3 * cols);
    let mut tiled = vec![false; tr * tc];
    for r in 0..tr {
        for c in 0..tc {
            tiled[r * tc + c] = b.occupancy[(r % rows) * cols + c % cols];
        }
    }
    let d = distance_transform_sq(&tiled, tr, tc);
    let mut worst = 0.0f64;
    for r in 0..rows {
        for c in 0..cols {
            if a.occupancy[r * cols + c] {
                worst = worst.max(d[(r + rows) * tc + c + cols]);
            }
        }
    }
    worst.sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lpoly::parse_polynomial;
    use proptest::prelude::*;
    use rand::Rng;

    /// `θ ∈ Arg{1 + Σ z_i = 0}` iff `-1` is a positive combination of the
    /// `e^{iθ_j}`, i.e. the unit vectors `1, e^{iθ_j}` leave no open
    /// half-circle gap.
    fn hyperplane_oracle(theta: &[f64]) -> bool {
        let mut a: Vec<f64> = theta.iter().map(|t| t.rem_euclid(TAU)).collect();
        a.push(0.0);
        a.sort_by(f64::total_cmp);
        let mut gap = TAU - a[a.len() - 1] + a[0];
        for w in a.windows(2) {
            gap = gap.max(w[1] - w[0]);
        }
        gap < PI
    }

    fn res(n: usize) -> Resolution {
        Resolution::square(n)
    }

    #[test]
    fn standard_model_counts_and_volumes() {
        let m2 = standard_model(2).unwrap();
        assert_eq!(m2.polyhedra.len(), 2);
        assert_eq!(m2.volume_over_pi_n(), (1, 1));
        let m3 = standard_model(3).unwrap();
        assert_eq!(m3.polyhedra.len(), 6);
        assert_eq!(m3.volume_over_pi_n(), (4, 1));
        assert!(standard_model(4).is_err());
        assert!(standard_model(1).is_err());
    }

    #[test]
    fn planar_pieces_are_the_two_triangles() {
        let m = standard_model(2).unwrap();
        let mut tris: Vec<Vec<[i64; 2]>> = m
            .polyhedra
            .iter()
            .map(|p| {
                let mut t = p.triangle().unwrap().to_vec();
                t.sort();
                t
            })
            .collect();
        tris.sort();
        assert_eq!(tris, vec![vec![[0, 1], [1, 1], [1, 2]], vec![[1, 0], [1, 1], [2, 1]]]);
        assert_eq!(m.polyhedra[0].apex, vec![0, 1]);
        assert_eq!(m.polyhedra[0].base, vec![vec![0, 2], vec![1, 2]]);
    }

    #[test]
    fn model_raster_area() {
        let m = standard_model(2).unwrap();
        let v = raster_volume(&m.raster(res(512)).unwrap());
        assert!((v - PI * PI).abs() < 0.02 * PI * PI, "{v}");
    }

    #[test]
    fn monte_carlo_volume_in_three_dimensions() {
        let m = standard_model(3).unwrap();
        let v = m.monte_carlo_volume(200_000, 7);
        assert!((v - 4.0 * PI.powi(3)).abs() < 0.05 * 4.0 * PI.powi(3), "{v}");
    }

    #[test]
    fn piece_counts_after_removing_real_hyperplanes() {
        assert_eq!(standard_model(2).unwrap().piece_count(256), 2);
        assert_eq!(standard_model(3).unwrap().piece_count(64), 6);
    }

    proptest! {
        #[test]
        fn model_matches_half_circle_oracle(t in prop::collection::vec(0.0f64..TAU, 2..=3)) {
            let m = standard_model(t.len()).unwrap();
            // stay off the measure-zero boundaries
            let mut a = t.clone();
            a.push(0.0);
            let near_boundary = t.iter().any(|x| torus_gap(*x, 0.0) < 1e-9 || torus_gap(*x, PI) < 1e-9)
                || a.iter().enumerate().any(|(i, x)| a[i + 1..].iter().any(|y| {
                    let g = torus_gap(*x, *y);
                    g < 1e-9 || (g - PI).abs() < 1e-9
                }));
            prop_assume!(!near_boundary);
            prop_assert_eq!(m.contains(&t), hyperplane_oracle(&t));
        }
    }

    #[test]
    fn sampled_line_matches_model() {
        let f = parse_polynomial("1 + z + w").unwrap();
        let sampled = rasterize_coamoeba(&f, res(256), &FiberSolveConfig::default()).unwrap();
        let model = standard_model(2).unwrap().raster(res(256)).unwrap();
        assert!(set_distance(&sampled, &model).unwrap() <= 2.0);
        let v = raster_volume(&sampled);
        assert!((v - PI * PI).abs() < 0.05 * PI * PI, "{v}");
        assert!(sampled.samples_used > 512);
    }

    #[test]
    fn binomial_coamoeba_is_the_diagonal() {
        let f = parse_polynomial("z - w").unwrap();
        let r = rasterize_coamoeba(&f, res(256), &FiberSolveConfig::default()).unwrap();
        for row in 0..256 {
            for col in 0..256 {
                if r.get(row, col) {
                    let d = (row as i64 - col as i64).rem_euclid(256);
                    assert!(d <= 1 || d >= 255, "({row},{col})");
                }
            }
        }
        assert!(raster_volume(&r) < 0.05 * PI * PI);
    }

    #[test]
    fn raster_volume_extremes() {
        let mut r = CoamoebaRaster::empty(res(128)).unwrap();
        assert_eq!(raster_volume(&r), 0.0);
        r.occupancy.iter_mut().for_each(|b| *b = true);
        assert!((raster_volume(&r) - 4.0 * PI * PI).abs() < 1e-12);
        assert!(CoamoebaRaster::empty(res(64)).is_err());
    }

    #[test]
    fn identity_transform_is_the_model() {
        let m = standard_model(2).unwrap();
        let t = UnimodularTransformData::identity(2);
        assert_eq!(transform_coamoeba(&m, &t, res(256)).unwrap(), m.raster(res(256)).unwrap());
        assert_eq!(transformed_piece_count(&m, &t, res(256)).unwrap(), 2);
    }

    #[test]
    fn inverse_transpose_matrices() {
        let t1 = UnimodularTransformData::from_inverse_transpose(vec![vec![3, -1], vec![-2, 3]], 7, vec![0.0, 0.0]).unwrap();
        assert_eq!(t1.lt, vec![vec![3, 1], vec![2, 3]]);
        assert_eq!(t1.det(), 7);
        let t2 = UnimodularTransformData::from_inverse_transpose(vec![vec![1, 1], vec![-2, 1]], 3, vec![0.0, 0.0]).unwrap();
        assert_eq!(t2.lt, vec![vec![1, -1], vec![2, 1]]);
        assert_eq!(t2.det(), 3);
        assert!(UnimodularTransformData::from_inverse_transpose(vec![vec![1, 1], vec![0, 2]], 3, vec![0.0, 0.0]).is_err());
        assert_eq!(UnimodularTransformData::new(vec![vec![0, 1], vec![1, 0]], vec![0.0, 0.0]), Err(CoamError::Determinant(-1)));
    }

    #[test]
    fn transforms_preserve_volume_and_count_pieces() {
        let m = standard_model(2).unwrap();
        let base = raster_volume(&m.raster(res(512)).unwrap());
        for (num, den, pieces) in [(vec![vec![3, -1], vec![-2, 3]], 7, 14), (vec![vec![1, 1], vec![-2, 1]], 3, 6)] {
            let t = UnimodularTransformData::from_inverse_transpose(num, den, vec![0.0, 0.0]).unwrap();
            let v = raster_volume(&transform_coamoeba(&m, &t, res(512)).unwrap());
            assert!((v - base).abs() < 0.03 * base, "{v} vs {base}");
            assert_eq!(transformed_piece_count(&m, &t, res(512)).unwrap(), pieces);
        }
    }

    #[test]
    fn forward_images_land_in_pullback_raster() {
        let m = standard_model(2).unwrap();
        let t = UnimodularTransformData::from_inverse_transpose(vec![vec![3, -1], vec![-2, 3]], 7, vec![0.4, 1.1]).unwrap();
        let raster = transform_coamoeba(&m, &t, res(256)).unwrap();
        let grown = dilate(&raster.occupancy, 256, 256, 1, true);
        // coset representatives k of Z² / ᵗL Z²: ᵗL⁻¹k mod 1 distinct
        let inv = |v: [f64; 2]| [(3.0 * v[0] - v[1]) / 7.0, (-2.0 * v[0] + 3.0 * v[1]) / 7.0];
        let mut reps: Vec<[i64; 2]> = Vec::new();
        for a in 0..7 {
            for b in 0..7 {
                let p = inv([a as f64, b as f64]);
                let key = |p: [f64; 2]| [(p[0].rem_euclid(1.0) * 7.0).round() as i64 % 7, (p[1].rem_euclid(1.0) * 7.0).round() as i64 % 7];
                if !reps.iter().any(|r| key(inv([r[0] as f64, r[1] as f64])) == key(p)) {
                    reps.push([a, b]);
                }
            }
        }
        assert_eq!(reps.len(), 7);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let mut checked = 0;
        while checked < 2000 {
            let p = [rng.gen_range(0.0..TAU), rng.gen_range(0.0..TAU)];
            if !m.contains(&p) {
                continue;
            }
            checked += 1;
            for k in &reps {
                let q = inv([p[0] + TAU * k[0] as f64, p[1] + TAU * k[1] as f64]);
                let img = [q[0] + t.translation[0], q[1] + t.translation[1]];
                let (r, c) = raster.pixel_of(img);
                assert!(grown[r * 256 + c], "{img:?}");
            }
        }
    }

    #[test]
    fn trinomial_coamoebas_match_their_transform() {
        let m = standard_model(2).unwrap();
        for s in ["w*z^3 + z^2*w^3 + 1", "z + w + z^2*w^2", "2 - 3i*z^2*w + (1+i)*w^3"] {
            let f = parse_polynomial(s).unwrap();
            let t = UnimodularTransformData::for_simplex_polynomial(&f).unwrap();
            let model = transform_coamoeba(&m, &t, res(256)).unwrap();
            let sampled = rasterize_coamoeba(&f, res(256), &FiberSolveConfig::default()).unwrap();
            assert!(set_distance(&sampled, &model).unwrap() <= 3.0, "{s}");
            assert_eq!(extra_piece_report(&model, &sampled).unwrap().piece_count, 0, "{s}");
        }
    }

    #[test]
    fn extra_pieces_of_the_deformed_curve() {
        let cfg = FiberSolveConfig::default();
        let sparse = rasterize_coamoeba(&parse_polynomial("z + w + z^2*w^2").unwrap(), res(256), &cfg).unwrap();
        let deformed = rasterize_coamoeba(&parse_polynomial("z + w + 0.5*z*w + z^2*w^2").unwrap(), res(256), &cfg).unwrap();
        let self_report = extra_piece_report(&sparse, &sparse).unwrap();
        assert_eq!((self_report.piece_count, self_report.extra_area), (0, 0.0));
        let rep = extra_piece_report(&sparse, &deformed).unwrap();
        assert!(rep.piece_count >= 1, "{rep:?}");
        assert!(rep.extra_area > 0.01 * PI * PI, "{rep:?}");
        assert!(extra_piece_report(&sparse, &CoamoebaRaster::empty(res(128)).unwrap()).is_err());
    }

    #[test]
    fn set_distance_wraps() {
        let mut a = CoamoebaRaster::empty(res(128)).unwrap();
        let mut b = a.clone();
        a.occupancy[0] = true;
        b.occupancy[127] = true;
        assert_eq!(set_distance(&a, &b).unwrap(), 1.0);
        b.occupancy[127] = false;
        assert_eq!(set_distance(&a, &b).unwrap(), f64::INFINITY);
    }
}
