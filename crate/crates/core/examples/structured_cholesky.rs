//! Triangular group action, structured Cholesky factors and power functions.

use conewishart::cone::{preset, ConeElement, TriangularElement};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> conewishart::Result<()> {
    let cone = preset("vinberg")?;
    let mut rng = ChaCha8Rng::seed_from_u64(1);

    let t = TriangularElement::random(&cone, &mut rng);
    let y = t.rho(&ConeElement::identity(&cone))?;
    println!("y = T Tᵀ: {:?}", y.coords().as_slice());
    let back = y.structured_cholesky()?;
    println!("recovered T: {:?}", back.coords().as_slice());

    let sigma = [1.5, 0.5, 2.0];
    println!("Δ_σ(y) = {:.6}, χ_σ(T) = {:.6}", y.delta(&sigma)?, t.chi(&sigma));

    let eta = t.dual_orbit_point();
    let sigma_star: Vec<f64> = sigma.iter().rev().copied().collect();
    println!("Δ*_σ(ρ*(T)I) = {:.6}, χ_σ*(T) = {:.6}", eta.delta_star(&sigma)?, t.chi(&sigma_star));
    println!("dual triangular solve: {:?}", eta.dual_triangular()?.coords().as_slice());
    Ok(())
}
