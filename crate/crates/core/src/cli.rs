//! Command implementations behind the `amoebakit` binary, the flat
//! `key = value` run configuration and the random maximally sparse generator.

use std::f64::consts::PI;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::json;
use thiserror::Error;

use crate::amoeba::{
    auto_window, rasterize_amoeba, report_from_raster, verify_solid_with, AmoebaError, FiberSolveConfig, Resolution,
};
use crate::coam::{
    extra_piece_report, rasterize_coamoeba, raster_volume, set_distance, standard_model, transform_coamoeba,
    transformed_piece_count, CoamError, UnimodularTransformData,
};
use crate::deform::{convergence_study, DeformError};
use crate::geom::Window;
use crate::io::{json_hash, write_atomic, Provenance};
use crate::lpoly::{convex_hull_2d, newton_polytope, parse_polynomial, ExponentVector, LaurentPolynomial, PolyError};
use crate::puiseux::{univariate_w_roots, w_map, PuiseuxError, PuiseuxScalar};
use crate::spine::{build_spine, default_t_schedule, pr_function, DeformationFamily, SpineError, DEFAULT_QUAD_N};
use crate::trop::{balancing_check, EdgeShape, tropicalize, SubdivisionOptions, TropError, TropicalCurve, TropicalPolynomial};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_UNBALANCED: i32 = 3;
pub const EXIT_AMBIGUOUS: i32 = 4;
pub const EXIT_FALSIFIED: i32 = 5;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Parse(String),
    #[error("{0}")]
    Ambiguous(String),
    #[error("{0}")]
    Failed(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse(_) => EXIT_PARSE,
            CliError::Ambiguous(_) => EXIT_AMBIGUOUS,
            CliError::Failed(_) => EXIT_FAILURE,
        }
    }
}

impl From<PolyError> for CliError {
    fn from(e: PolyError) -> Self {
        CliError::Parse(e.to_string())
    }
}

impl From<AmoebaError> for CliError {
    fn from(e: AmoebaError) -> Self {
        match e {
            AmoebaError::Ambiguous { .. } | AmoebaError::GuardBand { .. } => CliError::Ambiguous(e.to_string()),
            AmoebaError::Poly(p) => p.into(),
            other => CliError::Failed(other.to_string()),
        }
    }
}

impl From<SpineError> for CliError {
    fn from(e: SpineError) -> Self {
        match e {
            SpineError::Amoeba(a) => a.into(),
            SpineError::Poly(p) => p.into(),
            other => CliError::Failed(other.to_string()),
        }
    }
}

impl From<CoamError> for CliError {
    fn from(e: CoamError) -> Self {
        match e {
            CoamError::Amoeba(a) => a.into(),
            other => CliError::Failed(other.to_string()),
        }
    }
}

impl From<DeformError> for CliError {
    fn from(e: DeformError) -> Self {
        match e {
            DeformError::Spine(s) => s.into(),
            DeformError::Amoeba(a) => a.into(),
            other => CliError::Failed(other.to_string()),
        }
    }
}

impl From<TropError> for CliError {
    fn from(e: TropError) -> Self {
        CliError::Failed(e.to_string())
    }
}

impl From<PuiseuxError> for CliError {
    fn from(e: PuiseuxError) -> Self {
        CliError::Parse(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Failed(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Failed(e.to_string())
    }
}

/// Tolerances, resolutions and schedule shared by all commands. The output
/// directory does not enter the config hash.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub resolution: usize,
    /// `None` selects the automatic window.
    pub window: Option<Window>,
    pub angle_samples: usize,
    pub root_tolerance: f64,
    pub max_iterations: usize,
    pub quad_n: usize,
    pub t_schedule: Vec<f64>,
    pub seed: u64,
    #[serde(skip)]
    pub out: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        let fiber = FiberSolveConfig::default();
        RunConfig {
            resolution: 512,
            window: None,
            angle_samples: fiber.angle_samples,
            root_tolerance: fiber.root_tolerance,
            max_iterations: fiber.max_iterations,
            quad_n: DEFAULT_QUAD_N,
            t_schedule: default_t_schedule(),
            seed: 0,
            out: PathBuf::from("out"),
        }
    }
}

fn bad(key: &str, value: &str) -> CliError {
    CliError::Parse(format!("invalid value for {key}: {value:?}"))
}

pub fn parse_window(s: &str) -> Result<Option<Window>, CliError> {
    if s.trim() == "auto" {
        return Ok(None);
    }
    let v: Vec<f64> = s.split(',').map(|x| x.trim().parse::<f64>()).collect::<Result<_, _>>().map_err(|_| bad("window", s))?;
    match v[..] {
        [x0, x1, y0, y1] => {
            let w = Window::new(x0, x1, y0, y1);
            if w.is_valid() {
                Ok(Some(w))
            } else {
                Err(bad("window", s))
            }
        }
        _ => Err(bad("window", s)),
    }
}

/// Comma separated values of `t`, each a number or `e^k`.
pub fn parse_schedule(s: &str) -> Result<Vec<f64>, CliError> {
    s.split(',')
        .map(|x| {
            let x = x.trim();
            match x.strip_prefix("e^") {
                Some(k) => k.parse::<f64>().map(f64::exp),
                None => x.parse::<f64>(),
            }
            .map_err(|_| bad("t_schedule", s))
        })
        .collect()
}

impl RunConfig {
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), CliError> {
        let v = value.trim();
        match key.trim() {
            "resolution" => self.resolution = v.parse().map_err(|_| bad(key, v))?,
            "window" => self.window = parse_window(v)?,
            "angle_samples" => self.angle_samples = v.parse().map_err(|_| bad(key, v))?,
            "root_tolerance" => self.root_tolerance = v.parse().map_err(|_| bad(key, v))?,
            "max_iterations" => self.max_iterations = v.parse().map_err(|_| bad(key, v))?,
            "quad_n" => self.quad_n = v.parse().map_err(|_| bad(key, v))?,
            "t_schedule" => self.t_schedule = parse_schedule(v)?,
            "seed" => self.seed = v.parse().map_err(|_| bad(key, v))?,
            "out" => self.out = PathBuf::from(v),
            other => return Err(CliError::Parse(format!("unknown config key {other:?}"))),
        }
        Ok(())
    }

    /// Applies a `key = value` file; blank lines and `#` comments are skipped.
    pub fn apply_file_text(&mut self, text: &str) -> Result<(), CliError> {
        for (n, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (k, v) = line.split_once('=').ok_or_else(|| CliError::Parse(format!("config line {}: expected key = value", n + 1)))?;
            self.set(k, v)?;
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.resolution < 16 {
            return Err(bad("resolution", &self.resolution.to_string()));
        }
        if !(self.root_tolerance > 0.0) {
            return Err(bad("root_tolerance", &self.root_tolerance.to_string()));
        }
        if self.quad_n < 4 {
            return Err(bad("quad_n", &self.quad_n.to_string()));
        }
        let out_of_range = self.t_schedule.iter().any(|&t| !(t > 0.0 && t <= 1.0 / std::f64::consts::E + 1e-15));
        if out_of_range || self.t_schedule.windows(2).any(|w| w[1] >= w[0]) {
            return Err(bad("t_schedule", &format!("{:?}", self.t_schedule)));
        }
        self.fiber().validate().map_err(|e| CliError::Parse(e.to_string()))
    }

    pub fn fiber(&self) -> FiberSolveConfig {
        FiberSolveConfig {
            angle_samples: self.angle_samples,
            root_tolerance: self.root_tolerance,
            max_iterations: self.max_iterations,
            ..FiberSolveConfig::default()
        }
    }

    pub fn hash(&self) -> String {
        json_hash(self)
    }

    fn res(&self) -> Resolution {
        Resolution::square(self.resolution)
    }
}

/// Files written and a short human-readable summary.
#[derive(Clone, Debug, PartialEq)]
pub struct Outcome {
    pub exit: i32,
    pub files: Vec<PathBuf>,
    pub summary: String,
}

struct Writer<'a> {
    dir: &'a Path,
    files: Vec<PathBuf>,
}

impl<'a> Writer<'a> {
    fn new(dir: &'a Path) -> Self {
        Writer { dir, files: Vec::new() }
    }

    fn bytes(&mut self, name: &str, bytes: &[u8]) -> Result<(), CliError> {
        let p = self.dir.join(name);
        write_atomic(&p, bytes)?;
        self.files.push(p);
        Ok(())
    }

    fn json(&mut self, name: &str, prov: &Provenance, body: serde_json::Value) -> Result<(), CliError> {
        let v = json!({ "provenance": prov, "result": body });
        let mut s = serde_json::to_vec_pretty(&v).map_err(|e| CliError::Failed(e.to_string()))?;
        s.push(b'\n');
        self.bytes(name, &s)
    }

    fn finish(self, exit: i32, summary: String) -> Outcome {
        Outcome { exit, files: self.files, summary }
    }
}

fn to_value<T: Serialize>(v: &T) -> serde_json::Value {
    serde_json::to_value(v).expect("serializable")
}

fn window_for(cfg: &RunConfig, f: &LaurentPolynomial) -> Result<Window, CliError> {
    Ok(match cfg.window {
        Some(w) => w,
        None => auto_window(f)?,
    })
}

/// Corner locus of `log|a_α|`, with exponent overrides `coeffs`.
pub fn cmd_tropical(
    poly: &str,
    coeffs: &[(ExponentVector, f64)],
    perturb: bool,
    break_balancing: bool,
    cfg: &RunConfig,
) -> Result<Outcome, CliError> {
    cfg.validate()?;
    let f = parse_polynomial(poly)?;
    if f.dim() != 2 {
        return Err(CliError::Failed(format!("tropical curves need two variables, got {}", f.dim())));
    }
    let mut g = TropicalPolynomial::log_abs(&f);
    for (a, v) in coeffs {
        if a.dim() != 2 {
            return Err(CliError::Parse(format!("coefficient exponent {a} is not bivariate")));
        }
        g.terms.insert(a.clone(), *v);
    }
    let t = tropicalize(&g, SubdivisionOptions { perturb, ..SubdivisionOptions::default() })?;
    let mut curve: TropicalCurve = t.curve;
    if break_balancing {
        if let Some(e) = curve.edges.iter_mut().find(|e| !matches!(e.shape, EdgeShape::Line { .. })) {
            e.weight += 1;
        }
    }
    let balance = balancing_check(&curve);
    let prov = Provenance::new(cfg.hash(), json_hash(&g));
    let mut w = Writer::new(&cfg.out);
    w.json("curve.json", &prov, to_value(&curve))?;
    w.json("subdivision.json", &prov, to_value(&t.subdivision))?;
    w.json("balancing.json", &prov, to_value(&balance))?;
    let mut csv = Vec::new();
    curve.write_edges_csv(&mut csv)?;
    w.bytes("curve_edges.csv", &csv)?;
    let summary = format!(
        "{} vertices, {} edges, {} cells, balanced: {}",
        curve.vertices.len(),
        curve.edges.len(),
        t.subdivision.cells.len(),
        balance.balanced
    );
    Ok(w.finish(if balance.balanced { EXIT_OK } else { EXIT_UNBALANCED }, summary))
}

pub fn cmd_amoeba(poly: &str, cfg: &RunConfig) -> Result<Outcome, CliError> {
    cfg.validate()?;
    let f = parse_polynomial(poly)?;
    let window = window_for(cfg, &f)?;
    let fiber = cfg.fiber();
    let mut raster = rasterize_amoeba(&f, window, cfg.res(), &fiber)?;
    let prov = Provenance::new(cfg.hash(), f.content_hash());
    raster.provenance = prov.clone();
    let mut report = report_from_raster(&f, &raster, &fiber)?;
    report.provenance = prov.clone();
    let mut w = Writer::new(&cfg.out);
    w.bytes("amoeba.pgm", &raster.to_pgm())?;
    w.json("components.json", &prov, to_value(&report))?;
    let orders: Vec<String> = report.components.iter().map(|c| format!("{:?}{}", c.order, if c.bounded { "b" } else { "" })).collect();
    let summary = format!("{} complement components ({} bounded): {}", report.total, report.bounded_count(), orders.join(" "));
    Ok(w.finish(EXIT_OK, summary))
}

pub fn cmd_spine(poly: &str, cfg: &RunConfig) -> Result<Outcome, CliError> {
    cfg.validate()?;
    let f = parse_polynomial(poly)?;
    let window = window_for(cfg, &f)?;
    let fiber = cfg.fiber();
    let raster = rasterize_amoeba(&f, window, cfg.res(), &fiber)?;
    let report = report_from_raster(&f, &raster, &fiber)?;
    let spine = build_spine(&f, &report, cfg.quad_n)?;
    let prov = Provenance::new(cfg.hash(), f.content_hash());
    let mut w = Writer::new(&cfg.out);
    w.json("spine.json", &prov, to_value(&spine))?;
    let cs: Vec<String> = spine.c.iter().map(|(a, c)| format!("c{a} = {c:.9}")).collect();
    Ok(w.finish(EXIT_OK, cs.join(", ")))
}

/// Deformation family with `ν` taken from the spine of `f`.
pub fn spine_family(f: &LaurentPolynomial, cfg: &RunConfig) -> Result<DeformationFamily, CliError> {
    let window = window_for(cfg, f)?;
    let fiber = cfg.fiber();
    let raster = rasterize_amoeba(f, window, cfg.res(), &fiber)?;
    let report = report_from_raster(f, &raster, &fiber)?;
    let spine = build_spine(f, &report, cfg.quad_n)?;
    let nu = pr_function(&spine, &newton_polytope(f)?)?;
    Ok(DeformationFamily::new(f, nu, cfg.t_schedule.clone())?)
}

/// Square window around the vertices of the limit curve, padded by 2.
pub fn trace_window(fam: &DeformationFamily) -> Result<Window, CliError> {
    let t = tropicalize(&fam.limit_tropical(), SubdivisionOptions::default())?;
    Ok(match t.curve.vertex_bbox() {
        Some(b) => {
            let half = (b.width().max(b.height())) / 2.0 + 2.0;
            Window::centered([(b.x_min + b.x_max) / 2.0, (b.y_min + b.y_max) / 2.0], half)
        }
        None => Window::square(3.0),
    })
}

pub fn cmd_deform(poly: &str, cfg: &RunConfig) -> Result<Outcome, CliError> {
    cfg.validate()?;
    let f = parse_polynomial(poly)?;
    let fam = spine_family(&f, cfg)?;
    let window = trace_window(&fam)?;
    let trace = convergence_study(&fam, window, Resolution::square(cfg.resolution.min(256)), &cfg.fiber())?;
    let prov = Provenance::new(cfg.hash(), f.content_hash());
    let mut w = Writer::new(&cfg.out);
    let mut csv = Vec::new();
    trace.write_csv(&mut csv)?;
    w.bytes("trace.csv", &csv)?;
    w.json("trace.json", &prov, to_value(&trace))?;
    w.json("family.json", &prov, to_value(&fam))?;
    let d: Vec<String> = trace.rows.iter().map(|r| format!("{:.4}", r.d_h)).collect();
    let summary = format!("d_H by t: {}; non-increasing: {}", d.join(" "), trace.d_h_non_increasing(0.05));
    Ok(w.finish(EXIT_OK, summary))
}

pub fn cmd_coamoeba(poly: &str, cfg: &RunConfig) -> Result<Outcome, CliError> {
    cfg.validate()?;
    let f = parse_polynomial(poly)?;
    let raster = rasterize_coamoeba(&f, cfg.res(), &cfg.fiber())?;
    let volume = raster_volume(&raster);
    let prov = Provenance::new(cfg.hash(), f.content_hash());
    let mut w = Writer::new(&cfg.out);
    w.bytes("coamoeba.pgm", &raster.to_pgm())?;
    w.json(
        "coamoeba.json",
        &prov,
        json!({ "volume": volume, "volume_over_pi_squared": volume / (PI * PI), "samples_used": raster.samples_used, "resolution": raster.resolution }),
    )?;
    Ok(w.finish(EXIT_OK, format!("coamoeba volume {volume:.6} = {:.4} π²", volume / (PI * PI))))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolidityRecord {
    pub polynomial: String,
    pub maximally_sparse: bool,
    pub solid: bool,
    pub components: usize,
    pub vertices: usize,
    pub orders: Vec<[i64; 2]>,
}

/// Exit 5 when a maximally sparse input has fewer complement components
/// than its Newton polygon has vertices.
pub fn cmd_verify_solid(polys: &[String], cfg: &RunConfig) -> Result<Outcome, CliError> {
    cfg.validate()?;
    let parsed: Vec<LaurentPolynomial> = polys.iter().map(|s| parse_polynomial(s)).collect::<Result<_, _>>()?;
    verify_batch(&parsed, cfg)
}

pub fn cmd_verify_random(n: usize, cfg: &RunConfig) -> Result<Outcome, CliError> {
    cfg.validate()?;
    verify_batch(&random_batch(n, cfg.seed), cfg)
}

fn verify_batch(polys: &[LaurentPolynomial], cfg: &RunConfig) -> Result<Outcome, CliError> {
    let mut records = Vec::with_capacity(polys.len());
    for f in polys {
        let v = verify_solid_with(f, cfg.window, cfg.res(), &cfg.fiber())?;
        records.push(SolidityRecord {
            polynomial: f.to_string(),
            maximally_sparse: v.maximally_sparse,
            solid: v.solid,
            components: v.components,
            vertices: v.vertices,
            orders: v.report.orders(),
        });
    }
    let falsified = records.iter().filter(|r| r.maximally_sparse && !r.solid).count();
    let hashes: Vec<String> = polys.iter().map(|f| f.content_hash()).collect();
    let prov = Provenance::new(cfg.hash(), json_hash(&hashes));
    let mut w = Writer::new(&cfg.out);
    w.json("solidity.json", &prov, to_value(&records))?;
    let summary = records
        .iter()
        .map(|r| format!("{}: sparse {}, solid {} ({}/{})", r.polynomial, r.maximally_sparse, r.solid, r.components, r.vertices))
        .collect::<Vec<_>>()
        .join("\n");
    Ok(w.finish(if falsified > 0 { EXIT_FALSIFIED } else { EXIT_OK }, summary))
}

pub fn cmd_standard_coamoeba(n: usize, samples: usize, cfg: &RunConfig) -> Result<Outcome, CliError> {
    cfg.validate()?;
    let model = standard_model(n)?;
    let (p, q) = model.volume_over_pi_n();
    let prov = Provenance::new(cfg.hash(), json_hash(&("standard", n)));
    let mut w = Writer::new(&cfg.out);
    let mut body = json!({
        "model": model,
        "pieces": model.polyhedra.len(),
        "exact_volume_over_pi_n": [p, q],
        "exact_volume": model.volume(),
    });
    let summary = if n == 2 {
        let raster = model.raster(cfg.res())?;
        w.bytes("standard.pgm", &raster.to_pgm())?;
        let v = raster_volume(&raster);
        body["raster_volume"] = json!(v);
        body["piece_count"] = json!(model.piece_count(cfg.resolution));
        format!("n = 2: {} pieces, exact volume {p}/{q} π², raster {:.4} π²", model.polyhedra.len(), v / (PI * PI))
    } else {
        let v = model.monte_carlo_volume(samples, cfg.seed);
        body["monte_carlo_volume"] = json!(v);
        body["monte_carlo_samples"] = json!(samples);
        body["piece_count"] = json!(model.piece_count(64));
        format!("n = 3: {} pieces, exact volume {p}/{q} π³, Monte Carlo {:.4} π³", model.polyhedra.len(), v / PI.powi(3))
    };
    w.json("standard.json", &prov, body)?;
    Ok(w.finish(EXIT_OK, summary))
}

/// `"3,-1;-2,3"` → rows.
pub fn parse_matrix(s: &str) -> Result<Vec<Vec<i64>>, CliError> {
    let m: Vec<Vec<i64>> = s
        .split(';')
        .map(|row| row.split(',').map(|x| x.trim().parse::<i64>()).collect::<Result<Vec<_>, _>>())
        .collect::<Result<_, _>>()
        .map_err(|_| bad("matrix", s))?;
    if m.is_empty() || m.iter().any(|r| r.len() != m.len()) {
        return Err(bad("matrix", s));
    }
    Ok(m)
}

pub enum TransformSource {
    /// `ᵗL⁻¹ = numerator / denominator` with a translation.
    InverseTranspose { numerator: Vec<Vec<i64>>, denominator: i64, translation: Vec<f64> },
    /// Derived from a trinomial, which is also sampled for comparison.
    Polynomial(String),
}

pub fn cmd_transform_coamoeba(source: &TransformSource, cfg: &RunConfig) -> Result<Outcome, CliError> {
    cfg.validate()?;
    let model = standard_model(2)?;
    let (t, f) = match source {
        TransformSource::InverseTranspose { numerator, denominator, translation } => {
            (UnimodularTransformData::from_inverse_transpose(numerator.clone(), *denominator, translation.clone())?, None)
        }
        TransformSource::Polynomial(s) => {
            let f = parse_polynomial(s)?;
            (UnimodularTransformData::for_simplex_polynomial(&f)?, Some(f))
        }
    };
    let raster = transform_coamoeba(&model, &t, cfg.res())?;
    let volume = raster_volume(&raster);
    let pieces = transformed_piece_count(&model, &t, cfg.res())?;
    let mut body = json!({ "transform": t, "det": t.det(), "volume": volume, "volume_over_pi_squared": volume / (PI * PI), "pieces": pieces });
    let mut summary = format!("det {}, {} pieces, volume {:.4} π²", t.det(), pieces, volume / (PI * PI));
    let poly_hash = match &f {
        Some(f) => {
            let sampled = rasterize_coamoeba(f, cfg.res(), &cfg.fiber())?;
            let d = set_distance(&raster, &sampled)?;
            body["set_distance_to_sampled"] = json!(d);
            summary.push_str(&format!(", set distance to sampled coamoeba {d:.2} px"));
            f.content_hash()
        }
        None => json_hash(&t),
    };
    let prov = Provenance::new(cfg.hash(), poly_hash);
    let mut w = Writer::new(&cfg.out);
    w.bytes("transformed.pgm", &raster.to_pgm())?;
    w.json("transformed.json", &prov, body)?;
    Ok(w.finish(EXIT_OK, summary))
}

pub fn cmd_extra_pieces(sparse: &str, deformed: &str, cfg: &RunConfig) -> Result<Outcome, CliError> {
    cfg.validate()?;
    let (fs, fd) = (parse_polynomial(sparse)?, parse_polynomial(deformed)?);
    let rs = rasterize_coamoeba(&fs, cfg.res(), &cfg.fiber())?;
    let rd = rasterize_coamoeba(&fd, cfg.res(), &cfg.fiber())?;
    let report = extra_piece_report(&rs, &rd)?;
    let prov = Provenance::new(cfg.hash(), json_hash(&(fs.content_hash(), fd.content_hash())));
    let mut w = Writer::new(&cfg.out);
    w.bytes("sparse.pgm", &rs.to_pgm())?;
    w.bytes("deformed.pgm", &rd.to_pgm())?;
    w.json("extra_pieces.json", &prov, to_value(&report))?;
    let summary = format!("{} extra pieces, area {:.4} = {:.2}% of π²", report.piece_count, report.extra_area, 100.0 * report.extra_area / (PI * PI));
    Ok(w.finish(EXIT_OK, summary))
}

/// `"e:re[:im],…"`, e.g. `"-1:1"` for `t⁻¹`.
pub fn parse_puiseux(s: &str) -> Result<PuiseuxScalar, CliError> {
    let mut terms = Vec::new();
    for part in s.split(',').filter(|p| !p.trim().is_empty()) {
        let v: Vec<f64> = part.split(':').map(|x| x.trim().parse::<f64>()).collect::<Result<_, _>>().map_err(|_| bad("scalar", s))?;
        match v[..] {
            [e, re] => terms.push((e, Complex64::new(re, 0.0))),
            [e, re, im] => terms.push((e, Complex64::new(re, im))),
            _ => return Err(bad("scalar", s)),
        }
    }
    Ok(PuiseuxScalar::new(terms)?)
}

pub fn cmd_puiseux_demo(k: u32, a0: &str, cfg: &RunConfig) -> Result<Outcome, CliError> {
    let a = parse_puiseux(a0)?;
    let roots = univariate_w_roots(k, &a)?;
    let w = w_map(&a)?;
    let body = json!({
        "a0": a,
        "k": k,
        "val": a.val(),
        "w": w,
        "roots": roots,
        "root_log_moduli": roots.iter().map(|r| r.norm().ln()).collect::<Vec<_>>(),
    });
    let prov = Provenance::new(cfg.hash(), json_hash(&a));
    let mut wr = Writer::new(&cfg.out);
    wr.json("puiseux.json", &prov, body)?;
    let rs: Vec<String> = roots.iter().map(|r| format!("{:.6}{:+.6}i", r.re, r.im)).collect();
    let summary = format!("val(a0) = {}, w(a0) = {:.6}{:+.6}i, W-roots of z^{k} + a0: {}", a.val(), w.re, w.im, rs.join(", "));
    Ok(wr.finish(EXIT_OK, summary))
}

/// Support: the hull vertices of 3 to 6 random points of `[0,5]²` (resampled
/// until there are at least 3). Coefficients: modulus uniform in `[0.5, 2]`,
/// argument uniform.
pub fn random_maximally_sparse<R: Rng>(rng: &mut R) -> LaurentPolynomial {
    loop {
        let m = rng.gen_range(3..=6);
        let pts: Vec<Vec<i64>> = (0..m).map(|_| vec![rng.gen_range(0..=5), rng.gen_range(0..=5)]).collect();
        let hull = convex_hull_2d(&pts);
        if hull.len() < 3 {
            continue;
        }
        let terms = hull.into_iter().map(|a| {
            let c = Complex64::from_polar(rng.gen_range(0.5..=2.0), rng.gen_range(0.0..2.0 * PI));
            (ExponentVector::from(a), c)
        });
        return LaurentPolynomial::from_terms(2, terms).expect("nonempty support");
    }
}

pub fn random_batch(n: usize, seed: u64) -> Vec<LaurentPolynomial> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    (0..n).map(|_| random_maximally_sparse(&mut rng)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lpoly::is_maximally_sparse;

    #[test]
    fn config_file_and_overrides() {
        let mut c = RunConfig::default();
        c.apply_file_text("# comment\nresolution = 128\nwindow = -2,2,-1,3\nt_schedule = e^-1, e^-2, 0.01\nseed=9\n").unwrap();
        assert_eq!(c.resolution, 128);
        assert_eq!(c.window, Some(Window::new(-2.0, 2.0, -1.0, 3.0)));
        assert_eq!(c.t_schedule, vec![(-1.0f64).exp(), (-2.0f64).exp(), 0.01]);
        assert_eq!(c.seed, 9);
        c.set("window", "auto").unwrap();
        assert_eq!(c.window, None);
        assert!(matches!(c.apply_file_text("bogus = 1"), Err(CliError::Parse(_))));
        assert!(matches!(c.apply_file_text("resolution"), Err(CliError::Parse(_))));
        c.set("t_schedule", "0.5").unwrap();
        assert!(c.validate().is_err());
    }

    #[test]
    fn config_hash_ignores_output_directory() {
        let a = RunConfig::default();
        let mut b = a.clone();
        b.out = PathBuf::from("elsewhere");
        assert_eq!(a.hash(), b.hash());
        b.seed = 1;
        assert_ne!(a.hash(), b.hash());
    }

    #[test]
    fn generator_is_seeded_and_sparse() {
        let a = random_batch(40, 7);
        assert_eq!(a, random_batch(40, 7));
        assert_ne!(a, random_batch(40, 8));
        for f in &a {
            assert!(is_maximally_sparse(f), "{f}");
            assert!(f.len() >= 3 && f.len() <= 6);
            for (e, c) in f.terms() {
                assert!((0..=5).contains(&e[0]) && (0..=5).contains(&e[1]));
                assert!(c.norm() >= 0.5 - 1e-12 && c.norm() <= 2.0 + 1e-12);
            }
        }
    }

    #[test]
    fn parsers() {
        assert_eq!(parse_matrix("3,-1;-2,3").unwrap(), vec![vec![3, -1], vec![-2, 3]]);
        assert!(parse_matrix("1,2;3").is_err());
        let a = parse_puiseux("-1:1, 2:0:1").unwrap();
        assert_eq!(a.val(), 1.0);
        assert!(parse_puiseux("x").is_err());
        assert!(parse_window("1,0,0,1").is_err());
    }

    #[test]
    fn tropical_command_exit_codes() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = RunConfig { out: dir.path().to_path_buf(), ..RunConfig::default() };
        let ok = cmd_tropical("1+z+w", &[], false, false, &cfg).unwrap();
        assert_eq!(ok.exit, EXIT_OK);
        assert!(dir.path().join("curve.json").exists());
        let broken = cmd_tropical("1+z+w", &[], false, true, &cfg).unwrap();
        assert_eq!(broken.exit, EXIT_UNBALANCED);
        assert_eq!(cmd_tropical("1+*z", &[], false, false, &cfg).unwrap_err().exit_code(), EXIT_PARSE);
    }
}
