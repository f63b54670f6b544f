//! A homogeneous map that is not a sum of basic maps: Hermitian 2×2 matrices.

use conewishart::cone::preset;
use conewishart::quadratic::QuadraticMap;
use conewishart::wishart::{bartlett_sample, direct_sample, HomogeneousFit, WishartLaw};
use nalgebra::DMatrix;

fn main() -> conewishart::Result<()> {
    let q = QuadraticMap::herm2c()?;
    let cone = preset("herm2c")?;
    let g0 = DMatrix::identity(cone.dim(), cone.dim());
    let fit = HomogeneousFit::estimate(&q, &g0)?;
    println!("det φ_q(η) = {} · Δ*_m(η) with m = {:?}", fit.constant, fit.m);

    let law = WishartLaw::homogeneous(&q, 1.0, &g0, -cone.identity_coords())?;
    println!("σ = {:?}, ε = {:?}", law.sigma().unwrap(), law.epsilon().unwrap());
    let a = bartlett_sample(&law, 1, 50_000)?;
    let b = direct_sample(&law, 2, 50_000)?;
    println!("Bartlett mean {:?}", a.mean().as_slice());
    println!("direct mean   {:?}", b.mean().as_slice());
    println!("closed form   {:?}", law.mean_element().as_slice());
    Ok(())
}
