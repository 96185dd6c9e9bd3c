//! The coamoeba of the standard line as two triangles, its volume, the
//! three-dimensional model, and sampled coamoebas of curves.
//!
//! cargo run --release --example coamoeba_volume

use std::f64::consts::PI;

use amoebakit::amoeba::{FiberSolveConfig, Resolution};
use amoebakit::coam::{rasterize_coamoeba, raster_volume, set_distance, standard_model};
use amoebakit::lpoly::parse_polynomial;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let m2 = standard_model(2)?;
    for p in &m2.polyhedra {
        println!("piece with triangle {:?} (units of π)", p.triangle().unwrap());
    }
    let (num, den) = m2.volume_over_pi_n();
    let raster = m2.raster(Resolution::square(512))?;
    println!("n = 2: exact {num}/{den} π², raster {:.5} π², pieces {}", raster_volume(&raster) / (PI * PI), m2.piece_count(256));

    let m3 = standard_model(3)?;
    let (num, den) = m3.volume_over_pi_n();
    println!(
        "n = 3: exact {num}/{den} π³, Monte Carlo {:.5} π³, pieces {}",
        m3.monte_carlo_volume(400_000, 1) / PI.powi(3),
        m3.piece_count(64)
    );

    let cfg = FiberSolveConfig::default();
    for s in ["1 + z + w", "z - w", "w*z^3 + z^2*w^3 + 1", "1 + z + w + z*w"] {
        let f = parse_polynomial(s)?;
        let r = rasterize_coamoeba(&f, Resolution::square(512), &cfg)?;
        println!("{s:24} sampled volume {:.4} π²  ({} fiber solves)", raster_volume(&r) / (PI * PI), r.samples_used);
        if s == "1 + z + w" {
            println!("  set distance to the model: {:.2} px", set_distance(&r, &raster)?);
        }
    }
    Ok(())
}
