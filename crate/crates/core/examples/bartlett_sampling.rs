//! Bartlett sampling with CSV and JSON export.

use conewishart::cone::preset;
use conewishart::quadratic::VirtualQuadraticMap;
use conewishart::wishart::{bartlett_sample, WishartLaw};

fn main() -> conewishart::Result<()> {
    let cone = preset("sym(3)")?;
    let t = conewishart::linalg::dvec(&[1.0, 2.0, 0.5, 0.3, 0.0, -0.2]);
    let law = WishartLaw::with_triangular(VirtualQuadraticMap::basic(&cone, &[5.0, 0.0, 0.0])?, &t)?;
    let batch = bartlett_sample(&law, 7, 50_000)?;
    println!("sample mean  {:?}", batch.mean().as_slice());
    println!("closed form  {:?}", law.mean_element().as_slice());

    let dir = std::env::temp_dir().join("conewishart-example");
    std::fs::create_dir_all(&dir)?;
    let path = dir.join("sym3.csv");
    let sidecar = batch.export(&path)?;
    println!("wrote {} and {}", path.display(), sidecar.display());
    Ok(())
}
