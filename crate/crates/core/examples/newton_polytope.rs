//! Newton polygons, lattice points and maximal sparseness.
//!
//! cargo run --release --example newton_polytope

use amoebakit::lpoly::{is_maximally_sparse, newton_polytope, parse_polynomial};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for s in [
        "1 + z + w",
        "1 + z + w + z*w",
        "1 + z^2 + w^2",
        "1 + z^2 + w^2 + z*w",
        "-z*w^2 + z^3*w - 7*z*w + 6*w + z",
        "1 + z1 + z2 + z3",
    ] {
        let f = parse_polynomial(s)?;
        let p = newton_polytope(&f)?;
        let verts: Vec<String> = p.vertices.iter().map(|v| v.to_string()).collect();
        println!(
            "{s:40} dim {}  vertices {}  lattice points {:3}  maximally sparse {}",
            f.dim(),
            verts.join(" "),
            p.lattice_points.len(),
            is_maximally_sparse(&f)
        );
    }
    Ok(())
}
