//! Pushforward of a law by ρ(T) against transformed samples.

use conewishart::cone::preset;
use conewishart::quadratic::VirtualQuadraticMap;
use conewishart::wishart::{bartlett_sample, pushforward_law, transform_batch, WishartLaw};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> conewishart::Result<()> {
    let cone = preset("vinberg")?;
    let law = WishartLaw::new(VirtualQuadraticMap::basic(&cone, &[3.0, 1.5, 2.0])?, -cone.identity_coords())?;
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let g = cone.rho_matrix(&cone.random_triangular(&mut rng))?;

    let pushed = pushforward_law(&g, &law)?;
    let moved = transform_batch(&g, &bartlett_sample(&law, 11, 50_000)?)?;
    println!("θ' = {:?}", pushed.theta().as_slice());
    println!("closed form mean  {:?}", pushed.mean_element().as_slice());
    println!("transformed batch {:?}", moved.mean().as_slice());
    Ok(())
}
