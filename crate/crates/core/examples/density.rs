//! Densities of non-singular laws.

use conewishart::cone::preset;
use conewishart::linalg::dvec;
use conewishart::quadratic::VirtualQuadraticMap;
use conewishart::wishart::WishartLaw;

fn main() -> conewishart::Result<()> {
    let line = preset("sym(1)")?;
    let gamma_law = WishartLaw::gindikin(&line, &[2.5], dvec(&[-2.0]))?;
    for y in [0.5, 1.0, 2.0] {
        println!("Gamma(2.5, 1/2) density at {y}: {:.6}", gamma_law.density(&dvec(&[y]))?);
    }

    let cone = preset("vinberg")?;
    let law = WishartLaw::new(VirtualQuadraticMap::basic(&cone, &[4.0, 0.0, 0.0])?, -cone.identity_coords())?;
    let y = dvec(&[2.0, 1.5, 1.2, 0.3, -0.4]);
    println!("Vinberg, weights (4,0,0): f(y) = {:.6e}", law.density(&y)?);
    match law.density(&dvec(&[1.0, 1.0, 1.0, 1.0, 0.0])) {
        Err(e) => println!("boundary point: {e}"),
        Ok(v) => println!("unexpected value {v}"),
    }
    Ok(())
}
