//! φ-tensors of basic, standard and hand-written quadratic maps.

use conewishart::cone::preset;
use conewishart::linalg::dvec;
use conewishart::quadratic::{QuadraticMap, VirtualQuadraticMap};

fn main() -> conewishart::Result<()> {
    let cone = preset("vinberg")?;
    let eta = dvec(&[2.0, 1.0, 1.5, 0.3, -0.2]);
    for i in 0..cone.rank() {
        let q = QuadraticMap::basic(&cone, i)?;
        println!("basic map {}: m = {}, det φ(η) = {:.5}", i + 1, q.m(), q.phi(&eta).determinant());
    }

    let standard = QuadraticMap::standard(&cone, &[1, 0, 1])?;
    println!("standard map for ε = (1,0,1) acts on R^{}", standard.m());

    // A map into a polyhedral cone of R^3.
    let poly = QuadraticMap::polyhedral();
    println!("polyhedral: q(1,1,1,1) = {:?}", poly.evaluate(&dvec(&[1.0, 1.0, 1.0, 1.0]))?.as_slice());

    let herm = QuadraticMap::herm2c()?;
    let eta = dvec(&[1.2, 0.9, 0.1, 0.3]);
    println!("herm2c: det φ(η) = {:.6}", herm.phi(&eta).determinant());

    let vq = VirtualQuadraticMap::basic(&preset("herm2c")?, &[2.0, -2.0])?;
    println!("virtual weights over basic maps: {:?}", vq.basic_weights());
    println!("{}", serde_json::to_string(&poly.to_json())?);
    Ok(())
}
