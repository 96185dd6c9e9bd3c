//! Ronkin constants of the complement components and the spine they define.
//!
//! cargo run --release --example spine

use amoebakit::amoeba::{auto_window, component_report, FiberSolveConfig, Resolution};
use amoebakit::lpoly::{newton_polytope, parse_polynomial};
use amoebakit::spine::{build_spine, pr_function, ronkin_mean, DEFAULT_QUAD_N};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for s in ["1 + z + w", "1 + z + w + 2.718281828459045*z*w", "-z*w^2 + z^3*w - 7*z*w + 6*w + z"] {
        let f = parse_polynomial(s)?;
        let report = component_report(&f, auto_window(&f)?, Resolution::square(512), &FiberSolveConfig::default())?;
        let spine = build_spine(&f, &report, DEFAULT_QUAD_N)?;
        println!("f = {f}");
        for comp in &report.components {
            let n = DEFAULT_QUAD_N;
            let (q1, q2) = (ronkin_mean(&f, comp.witness, n), ronkin_mean(&f, comp.witness, 2 * n));
            println!(
                "  order {:?}: c = {:+.9}  (N_f at witness {:.6}, Richardson gap {:.1e})",
                comp.order,
                spine.c[&comp.order.into()],
                q2,
                (q1 - q2).abs()
            );
        }
        println!("  spine: {} vertices, {} edges", spine.spine.vertices.len(), spine.spine.edges.len());
        let nu = pr_function(&spine, &newton_polytope(&f)?)?;
        let vals: Vec<String> = nu.values.iter().map(|(a, v)| format!("ν{a} = {v:+.4}")).collect();
        println!("  {}", vals.join(", "));
    }
    Ok(())
}
