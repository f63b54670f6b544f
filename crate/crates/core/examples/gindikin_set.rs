//! Membership in the Gindikin set and Laplace transforms of Riesz measures.

use conewishart::cone::preset;
use conewishart::gindikin::{gindikin_decompose, sigma_of_weights, GindikinReport, RieszDescriptor};
use conewishart::linalg::dvec;

fn main() -> conewishart::Result<()> {
    let cone = preset("sym(4)")?;
    let accepted: Vec<f64> = (0..=24)
        .map(|k| k as f64 * 0.25)
        .filter(|&s| RieszDescriptor::from_weights(&cone, &[s, 0.0, 0.0, 0.0]).is_ok())
        .collect();
    println!("Sym(4), weights (s,0,0,0) accepted for s in {accepted:?}");

    let sigma = sigma_of_weights(&cone, &[2.0, 0.0, 0.0, 0.0])?;
    let p = gindikin_decompose(&cone, &sigma)?;
    println!("σ = {:?}: ε = {:?}, u = {:?}", p.sigma, p.epsilon, p.u);
    println!("{}", serde_json::to_string(&GindikinReport::for_sigma(&cone, &[0.75; 4])?)?);

    let herm = preset("herm2c")?;
    let desc = RieszDescriptor::from_weights(&herm, &[2.0, -2.0])?;
    let eta = dvec(&[1.3, 0.8, 0.2, -0.4]);
    println!(
        "herm2c weights (2,-2): L(−η) = {:.8}, π²/(η1η2−η3²−η4²) = {:.8}",
        desc.laplace(&-&eta)?,
        std::f64::consts::PI.powi(2) / (1.3 * 0.8 - 0.04 - 0.16)
    );
    Ok(())
}
