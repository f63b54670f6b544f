//! Sampling q(X)/2 directly, for a map into a polyhedral cone.

use conewishart::linalg::dvec;
use conewishart::quadratic::{GenericCone, QuadraticMap};
use conewishart::wishart::{direct_sample, WishartLaw};

fn main() -> conewishart::Result<()> {
    let law = WishartLaw::new(QuadraticMap::polyhedral(), dvec(&[-1.0, -1.0, -1.0]))?;
    let batch = direct_sample(&law, 3, 50_000)?;
    let cone = GenericCone::polyhedral();
    let inside = batch.draws.iter().filter(|y| cone.contains(y)).count();
    println!("{inside} of {} draws in the closed cone", batch.len());
    println!("sample mean {:?}", batch.mean().as_slice());
    println!("closed form {:?}", law.mean_element().as_slice());
    Ok(())
}
