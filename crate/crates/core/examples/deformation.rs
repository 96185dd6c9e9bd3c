//! Rescaled amoebas of the family `f_t` built from the spine approach the
//! limiting tropical curve as `t → 0`.
//!
//! cargo run --release --example deformation

use amoebakit::amoeba::{auto_window, component_report, FiberSolveConfig, Resolution};
use amoebakit::deform::{convergence_study, localization_check};
use amoebakit::geom::Window;
use amoebakit::lpoly::{newton_polytope, parse_polynomial};
use amoebakit::spine::{build_spine, default_t_schedule, pr_function, DeformationFamily};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cfg = FiberSolveConfig::default();
    for s in ["1 + z + w", "1 + z + w + 2.718281828459045*z*w"] {
        let f = parse_polynomial(s)?;
        let report = component_report(&f, auto_window(&f)?, Resolution::square(512), &cfg)?;
        let spine = build_spine(&f, &report, 256)?;
        let nu = pr_function(&spine, &newton_polytope(&f)?)?;
        let fam = DeformationFamily::new(&f, nu, default_t_schedule())?;
        let trace = convergence_study(&fam, Window::square(3.0), Resolution::square(256), &cfg)?;
        println!("f = {f}");
        println!("  {:>10} {:>8} {:>8} {:>12} {:>6}", "t", "h", "d_H", "bounded", "solid");
        for r in &trace.rows {
            println!("  {:>10.6} {:>8.4} {:>8.4} {:>12.6} {:>6}", r.t, r.h, r.d_h, r.bounded_cell_mass, r.solid);
        }
        println!("  d_H non-increasing (5% slack): {}", trace.d_h_non_increasing(0.05));
        for (t, eps) in [((-4.0f64).exp(), 0.3), ((-1.0f64).exp(), 1e-4)] {
            let loc = localization_check(&fam, t, 0, eps)?;
            println!(
                "  near vertex ({:.3}, {:.3}) at t = {t:.4}: max distance to truncation {:.4} (ε = {eps}) → {}",
                loc.vertex[0], loc.vertex[1], loc.max_distance, loc.within
            );
        }
    }
    Ok(())
}
