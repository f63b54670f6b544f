use nalgebra::DVector;

use super::law::WishartLaw;
use crate::error::{Error, Result};
use crate::gindikin::log_gamma_cone;

impl WishartLaw {
    /// Log-density with respect to Lebesgue measure in the codomain coordinates.
    ///
    /// `f(y) = e^{⟨y,θ⟩} Δ*_{σ*}(−θ) Δ_{σ−d}(y) / Γ_P(σ)` for the basic law, transported
    /// through the conjugator `G` when one is present.
    pub fn log_density(&self, y: &DVector<f64>) -> Result<f64> {
        let b = self.bartlett().ok_or(Error::MissingTriangularForm)?;
        if b.parameter().is_singular() {
            return Err(Error::SingularLaw);
        }
        let cone = b.cone();
        if y.len() != cone.dim() {
            return Err(Error::DimensionMismatch { expected: cone.dim(), found: y.len() });
        }
        let (y0, log_jac) = match b.outer() {
            Some(g) => {
                let lu = g.clone().lu();
                let y0 = lu.solve(y).ok_or(Error::SingularTransform)?;
                (y0, lu.determinant().abs().ln())
            }
            None => (y.clone(), 0.0),
        };
        let theta = b.base_theta();
        let sigma = &b.parameter().sigma;
        let sigma_star: Vec<f64> = sigma.iter().rev().copied().collect();
        let shifted: Vec<f64> = sigma.iter().zip(cone.d_vector()).map(|(s, d)| s - d).collect();
        let log_delta = cone.log_delta(&shifted, &y0)?;
        Ok(cone.coupling(&y0, theta) + cone.log_delta_star(&sigma_star, &(-theta))? + log_delta
            - log_gamma_cone(cone, sigma)?
            - log_jac)
    }

    pub fn density(&self, y: &DVector<f64>) -> Result<f64> {
        Ok(self.log_density(y)?.exp())
    }
}
