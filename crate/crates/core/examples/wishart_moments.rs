//! Laplace transform, mean, covariance and higher moments of a Wishart law.

use conewishart::cone::preset;
use conewishart::quadratic::VirtualQuadraticMap;
use conewishart::wishart::WishartLaw;

fn main() -> conewishart::Result<()> {
    let cone = preset("sym(3)")?;
    let law = WishartLaw::new(VirtualQuadraticMap::basic(&cone, &[5.0, 0.0, 0.0])?, -cone.identity_coords())?;
    let eta = cone.identity_coords() * 0.1;

    println!("L(η) = {:.6}", law.laplace(&eta)?);
    println!("E Y = {:?}", law.mean_element().as_slice());
    println!("E⟨Y,η⟩ = {:.6}", law.mean_form(&eta)?);
    println!("Var⟨Y,η⟩ = {:.6}", law.covariance_form(&eta, &eta)?);
    for n in 1..=6 {
        let etas = vec![eta.clone(); n];
        println!("N = {n}: permutation sum {:.8}, partition sum {:.8}", law.moment(&etas)?, law.univariate_moment(&eta, n)?);
    }
    Ok(())
}
