//! Singular laws live on orbit closures of lower rank.

use conewishart::cone::preset;
use conewishart::linalg::numerical_rank;
use conewishart::wishart::{bartlett_sample, WishartLaw, ORBIT_TOL};

fn main() -> conewishart::Result<()> {
    let cone = preset("sym(4)")?;
    let law = WishartLaw::from_epsilon_u(&cone, &[0, 1, 0, 1], &[0.0, 1.0, 0.0, 1.0], -cone.identity_coords())?;
    println!("σ = {:?}", law.sigma().unwrap());
    let batch = bartlett_sample(&law, 1, 10_000)?;
    let rank2 = batch.draws.iter().filter(|y| numerical_rank(&cone.to_matrix(y), 1e-8) == 2).count();
    let classes = batch.classify(&cone, ORBIT_TOL)?;
    let same = classes.iter().filter(|e| e.as_slice() == [0, 1, 0, 1]).count();
    println!("{rank2} draws of rank 2, {same} classified as ε = (0,1,0,1)");
    Ok(())
}
