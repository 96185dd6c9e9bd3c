//! Complement components of a non-sparse quintic-support curve whose amoeba
//! has two bounded holes.
//!
//! cargo run --release --example amoeba_components

use amoebakit::amoeba::{auto_window, rasterize_amoeba, report_from_raster, FiberSolveConfig, Resolution};
use amoebakit::lpoly::{is_maximally_sparse, newton_polytope, parse_polynomial};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let f = parse_polynomial("-z*w^2 + z^3*w - 7*z*w + 6*w + z")?;
    let p = newton_polytope(&f)?;
    println!("f = {f}");
    println!("Newton polygon vertices: {}", p.vertices.len());
    println!("maximally sparse: {}", is_maximally_sparse(&f));

    let window = auto_window(&f)?;
    let started = std::time::Instant::now();
    let cfg = FiberSolveConfig::default();
    let raster = rasterize_amoeba(&f, window, Resolution::square(512), &cfg)?;
    let report = report_from_raster(&f, &raster, &cfg)?;
    println!(
        "window [{:.2}, {:.2}] x [{:.2}, {:.2}], {} ms",
        window.x_min,
        window.x_max,
        window.y_min,
        window.y_max,
        started.elapsed().as_millis()
    );
    for c in &report.components {
        println!(
            "  order {:?}  bounded {:5}  pixels {:7}  witness ({:.3}, {:.3})",
            c.order, c.bounded, c.pixel_count, c.witness[0], c.witness[1]
        );
    }
    for (name, x) in [("(0, 0)", 0.0f64), ("(log 2, 0)", 2f64.ln()), ("(log 3, 0)", 3f64.ln())] {
        println!("  {name} on the amoeba raster: {}", raster.contains_point([x, 0.0]));
    }
    println!("components: {}  bounded: {}  slivers dropped: {}", report.total, report.bounded_count(), report.slivers);
    Ok(())
}
