//! Random maximally sparse polynomials have as many complement components as
//! their Newton polygons have vertices.
//!
//! cargo run --release --example solid_random [count] [seed]

use amoebakit::amoeba::verify_solid;
use amoebakit::cli::random_batch;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let n: usize = args.next().map_or(Ok(10), |s| s.parse())?;
    let seed: u64 = args.next().map_or(Ok(7), |s| s.parse())?;
    let mut solid = 0;
    for (i, f) in random_batch(n, seed).iter().enumerate() {
        let v = verify_solid(f)?;
        solid += v.solid as usize;
        println!("{i:3}: {} vertices, {} components, solid {}", v.vertices, v.components, v.solid);
    }
    println!("{solid}/{n} solid");
    Ok(())
}
