//! Coamoebas of trinomials as images of the standard coamoeba under a
//! monomial change of variables, compared with sampled coamoebas.
//!
//! cargo run --release --example transformed_coamoeba

use std::f64::consts::PI;

use amoebakit::amoeba::{FiberSolveConfig, Resolution};
use amoebakit::coam::{
    rasterize_coamoeba, raster_volume, set_distance, standard_model, transform_coamoeba, transformed_piece_count,
    UnimodularTransformData,
};
use amoebakit::lpoly::parse_polynomial;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let res = Resolution::square(512);
    let model = standard_model(2)?;
    let cases = [("w*z^3 + z^2*w^3 + 1", vec![vec![3, -1], vec![-2, 3]], 7), ("z + w + z^2*w^2", vec![vec![1, 1], vec![-2, 1]], 3)];
    for (s, num, den) in cases {
        let t = UnimodularTransformData::from_inverse_transpose(num.clone(), den, vec![0.0, 0.0])?;
        let image = transform_coamoeba(&model, &t, res)?;
        let sampled = rasterize_coamoeba(&parse_polynomial(s)?, res, &FiberSolveConfig::default())?;
        println!("{s}: ᵗL⁻¹ = {num:?}/{den}, ᵗL = {:?}, det {}", t.lt, t.det());
        println!(
            "  image volume {:.4} π², {} pieces, sampled volume {:.4} π², set distance {:.2} px",
            raster_volume(&image) / (PI * PI),
            transformed_piece_count(&model, &t, res)?,
            raster_volume(&sampled) / (PI * PI),
            set_distance(&image, &sampled)?
        );
    }
    let f = parse_polynomial("2 - 3i*z^2*w + (1+i)*w^3")?;
    let t = UnimodularTransformData::for_simplex_polynomial(&f)?;
    let d = set_distance(&transform_coamoeba(&model, &t, res)?, &rasterize_coamoeba(&f, res, &FiberSolveConfig::default())?)?;
    println!("{f}: translation ({:.4}, {:.4}), set distance to sampled {d:.2} px", t.translation[0], t.translation[1]);
    Ok(())
}
