//! Corner loci of tropical polynomials with their dual subdivisions and the
//! balancing condition at every vertex.
//!
//! cargo run --release --example tropical_curve

use amoebakit::trop::{balancing_check, tropicalize, EdgeShape, SubdivisionOptions, TropicalPolynomial};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let examples = [
        ("tropical line", vec![([0, 0], 0.0), ([1, 0], 0.0), ([0, 1], 0.0)]),
        ("smooth conic", vec![([0, 0], 0.0), ([1, 0], 1.0), ([0, 1], 1.0), ([2, 0], 0.0), ([1, 1], 1.0), ([0, 2], 0.0)]),
        ("square, one diagonal", vec![([0, 0], 0.0), ([1, 0], 0.0), ([0, 1], 0.0), ([1, 1], 1.0)]),
        ("weight-2 edges", vec![([0, 0], 0.0), ([2, 0], 0.0), ([0, 2], 0.0)]),
    ];
    for (name, terms) in examples {
        let g = TropicalPolynomial::from_pairs(&terms)?;
        let t = tropicalize(&g, SubdivisionOptions::default())?;
        println!("{name}: {} vertices, {} edges, {} cells", t.curve.vertices.len(), t.curve.edges.len(), t.subdivision.cells.len());
        for v in &t.curve.vertices {
            println!("  vertex ({}/{}, {}/{}) ≈ ({:.3}, {:.3})", v.exact.nx, v.exact.den, v.exact.ny, v.exact.den, v.pos[0], v.pos[1]);
        }
        for e in &t.curve.edges {
            let kind = match e.shape {
                EdgeShape::Segment { from, to } => format!("segment {from}-{to}"),
                EdgeShape::Ray { from } => format!("ray from {from}"),
                EdgeShape::Line { point } => format!("line through ({:.2}, {:.2})", point[0], point[1]),
            };
            println!("  {kind:22} direction {:?} weight {} dual to {}-{}", e.direction, e.weight, e.dual_pair[0], e.dual_pair[1]);
        }
        println!("  balanced: {}", balancing_check(&t.curve).balanced);
    }
    Ok(())
}
