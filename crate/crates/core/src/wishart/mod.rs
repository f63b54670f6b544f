//! Wishart laws: Laplace transforms, moments, densities, samplers and pushforwards.

mod density;
mod export;
mod law;
mod moments;
mod sampling;
pub mod stats;

pub use export::{sidecar_path, Sidecar};
pub use law::{theta_of_triangular, wishart_laplace, BartlettForm, HomogeneousFit, WishartLaw};
pub use moments::N_MAX;
pub use sampling::{
    bartlett_sample, direct_sample, orbit_classify, transform_batch, BatchInfo, SampleBatch, CHUNK, ORBIT_TOL,
    THREADS_ENV,
};

/// `pushforward_law(g, law)`.
pub fn pushforward_law(g: &nalgebra::DMatrix<f64>, law: &WishartLaw) -> crate::Result<WishartLaw> {
    law.pushforward(g)
}

#[cfg(test)]
mod tests;
