//! A non-sparse coefficient pattern adds pieces to the coamoeba that the
//! maximally sparse curve does not have.
//!
//! cargo run --release --example extra_pieces

use std::f64::consts::PI;

use amoebakit::amoeba::{FiberSolveConfig, Resolution};
use amoebakit::coam::{extra_piece_report, rasterize_coamoeba, raster_volume};
use amoebakit::lpoly::parse_polynomial;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cfg = FiberSolveConfig::default();
    let res = Resolution::square(512);
    let sparse = rasterize_coamoeba(&parse_polynomial("z + w + z^2*w^2")?, res, &cfg)?;
    println!("sparse volume {:.4} π²", raster_volume(&sparse) / (PI * PI));
    for c in ["0.5", "1", "3", "0.01"] {
        let s = format!("z + w + {c}*z*w + z^2*w^2");
        let deformed = rasterize_coamoeba(&parse_polynomial(&s)?, res, &cfg)?;
        let rep = extra_piece_report(&sparse, &deformed)?;
        println!(
            "{s:28} volume {:.4} π²  extra pieces {}  extra area {:.3}% of π²",
            raster_volume(&deformed) / (PI * PI),
            rep.piece_count,
            100.0 * rep.extra_area / (PI * PI)
        );
    }
    let control = extra_piece_report(&sparse, &sparse)?;
    println!("self comparison: {} pieces", control.piece_count);
    Ok(())
}
