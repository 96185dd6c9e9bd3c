//! Valuations of truncated Puiseux series and the complexified valuation.
//!
//! cargo run --release --example puiseux

use num_complex::Complex64;

use amoebakit::puiseux::{univariate_w_roots, w_map, w_map_point, PuiseuxScalar};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let c = |re: f64, im: f64| Complex64::new(re, im);
    let a = PuiseuxScalar::new([(-2.0, c(3.0, 0.0)), (1.0, c(1.0, 0.0))])?;
    let b = PuiseuxScalar::new([(0.5, c(0.0, -2.0)), (1.5, c(1.0, 1.0))])?;
    println!("val(a) = {}, val(b) = {}, val(ab) = {}", a.val(), b.val(), (&a * &b).val());
    println!("val(a + b) = {} ≤ max = {}", a.checked_add(&b)?.val(), a.val().max(b.val()));
    println!("w(a) = {}, w(b) = {}, w(ab) = {}", w_map(&a)?, w_map(&b)?, w_map(&(&a * &b))?);
    let p = w_map_point(&[a.clone(), b.clone()])?;
    println!("Log W(a, b) = ({:.12}, {:.12})", p[0].norm().ln(), p[1].norm().ln());
    println!("a - a: {:?}", a.checked_add(&-&a));
    for (k, a0) in [(2, PuiseuxScalar::monomial(c(1.0, 0.0), 0.0)?), (1, PuiseuxScalar::monomial(c(1.0, 0.0), -1.0)?), (3, b)] {
        let roots: Vec<String> = univariate_w_roots(k, &a0)?.iter().map(|r| format!("{:.4}{:+.4}i", r.re, r.im)).collect();
        println!("W-roots of z^{k} + a0 with val(a0) = {}: {}", a0.val(), roots.join(", "));
    }
    Ok(())
}
