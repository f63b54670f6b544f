//! The Gindikin set `Ξ`, Riesz measures of virtual basic sums, and gamma constants.

use std::f64::consts::PI;
use std::sync::Arc;

use nalgebra::DVector;
use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

use crate::cone::ConeRealization;
use crate::error::{Error, Result};
use crate::quadratic::VirtualQuadraticMap;

/// Absolute tolerance for the equality `σ_k = p_k(ε)/2`.
pub const XI_TOL: f64 = 1e-12;

/// `σ ∈ Ξ` together with its unique decomposition `σ = u + p(ε)/2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GindikinParameter {
    pub sigma: Vec<f64>,
    pub epsilon: Vec<u8>,
    pub u: Vec<f64>,
    pub p: Vec<f64>,
}

impl GindikinParameter {
    /// True unless `ε = (1, …, 1)`.
    pub fn is_singular(&self) -> bool {
        self.epsilon.contains(&0)
    }

    pub fn is_dirac(&self) -> bool {
        self.epsilon.iter().all(|&e| e == 0)
    }

    pub fn total(&self) -> f64 {
        self.sigma.iter().sum()
    }
}

/// `σ = ½ Σ s_i m(i)`.
pub fn sigma_of_weights(cone: &ConeRealization, s: &[f64]) -> Result<Vec<f64>> {
    let r = cone.rank();
    if s.len() != r {
        return Err(Error::DimensionMismatch { expected: r, found: s.len() });
    }
    Ok((0..r)
        .map(|k| 0.5 * (0..r).map(|i| s[i] * cone.m_vector(i)[k] as f64).sum::<f64>())
        .collect())
}

/// Inverse of [`sigma_of_weights`].
pub fn weights_of_sigma(cone: &ConeRealization, sigma: &[f64]) -> Result<Vec<f64>> {
    if sigma.len() != cone.rank() {
        return Err(Error::DimensionMismatch { expected: cone.rank(), found: sigma.len() });
    }
    Ok(cone.basic_exponents(sigma).into_iter().map(|a| 2.0 * a).collect())
}

/// Decides `σ ∈ Ξ` by an ascending recursion: `p_k(ε)` only involves `ε_i`, `i < k`.
pub fn gindikin_decompose(cone: &ConeRealization, sigma: &[f64]) -> Result<GindikinParameter> {
    let r = cone.rank();
    if sigma.len() != r {
        return Err(Error::DimensionMismatch { expected: r, found: sigma.len() });
    }
    let mut epsilon = vec![0u8; r];
    let mut u = vec![0.0; r];
    let mut p = vec![0.0; r];
    for k in 0..r {
        p[k] = (0..k).filter(|&i| epsilon[i] == 1).map(|i| cone.n_lk(k, i) as f64).sum();
        let gap = sigma[k] - p[k] / 2.0;
        if gap.abs() <= XI_TOL {
            continue;
        }
        if gap > 0.0 {
            epsilon[k] = 1;
            u[k] = gap;
        } else {
            return Err(Error::NotInXi { index: k, sigma: sigma.to_vec() });
        }
    }
    Ok(GindikinParameter { sigma: sigma.to_vec(), epsilon, u, p })
}

/// `σ = u + p(ε)/2`, after checking `u ∈ R_+(ε)`.
pub fn sigma_of_epsilon_u(cone: &ConeRealization, epsilon: &[u8], u: &[f64]) -> Result<Vec<f64>> {
    check_u(cone, epsilon, u)?;
    let p = cone.p_vector(epsilon);
    Ok(u.iter().zip(&p).map(|(u, p)| u + p / 2.0).collect())
}

fn check_u(cone: &ConeRealization, epsilon: &[u8], u: &[f64]) -> Result<()> {
    let r = cone.rank();
    if epsilon.len() != r || u.len() != r {
        return Err(Error::DimensionMismatch { expected: r, found: epsilon.len().min(u.len()) });
    }
    for k in 0..r {
        let ok = if epsilon[k] == 0 { u[k] == 0.0 } else { u[k] > 0.0 && u[k].is_finite() };
        if !ok {
            return Err(Error::InvalidU { index: k });
        }
    }
    Ok(())
}

/// `Γ_ε(u) = π^{dim W^ε / 2} Π_{i ∈ I(ε)} Γ(u_i) / (2√π)`.
pub fn gamma_epsilon_u(cone: &ConeRealization, epsilon: &[u8], u: &[f64]) -> Result<f64> {
    check_u(cone, epsilon, u)?;
    let mut log = 0.0;
    for i in (0..cone.rank()).filter(|&i| epsilon[i] == 1) {
        log += cone.basic_dim(i) as f64 / 2.0 * PI.ln();
        log += ln_gamma(u[i]) - (2.0 * PI.sqrt()).ln();
    }
    Ok(log.exp())
}

/// `log Γ_P(σ) = ((dim Z − r)/2) log π + Σ log Γ(σ_i − p_i/2)`, with `p = p(1, …, 1)`.
pub fn log_gamma_cone(cone: &ConeRealization, sigma: &[f64]) -> Result<f64> {
    let r = cone.rank();
    if sigma.len() != r {
        return Err(Error::DimensionMismatch { expected: r, found: sigma.len() });
    }
    let p = cone.p_full();
    let mut log = (cone.dim() - r) as f64 / 2.0 * PI.ln();
    for i in 0..r {
        let a = sigma[i] - p[i] / 2.0;
        if !(a > 0.0) {
            return Err(Error::OutOfNonSingularRange { index: i });
        }
        log += ln_gamma(a);
    }
    Ok(log)
}

pub fn gamma_cone(cone: &ConeRealization, sigma: &[f64]) -> Result<f64> {
    Ok(log_gamma_cone(cone, sigma)?.exp())
}

/// A Riesz measure `μ = π^{|σ|} R_σ` of the virtual map `⊕ (q^i)^{⊕ s_i}`.
#[derive(Debug, Clone)]
pub struct RieszDescriptor {
    cone: Arc<ConeRealization>,
    weights: Vec<f64>,
    param: GindikinParameter,
}

impl RieszDescriptor {
    pub fn from_weights(cone: &Arc<ConeRealization>, weights: &[f64]) -> Result<Self> {
        let sigma = sigma_of_weights(cone, weights)?;
        let param = gindikin_decompose(cone, &sigma)?;
        Ok(Self { cone: Arc::clone(cone), weights: weights.to_vec(), param })
    }

    pub fn from_sigma(cone: &Arc<ConeRealization>, sigma: &[f64]) -> Result<Self> {
        let weights = weights_of_sigma(cone, sigma)?;
        let param = gindikin_decompose(cone, sigma)?;
        Ok(Self { cone: Arc::clone(cone), weights, param })
    }

    pub fn cone(&self) -> &Arc<ConeRealization> {
        &self.cone
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn parameter(&self) -> &GindikinParameter {
        &self.param
    }

    pub fn sigma(&self) -> &[f64] {
        &self.param.sigma
    }

    /// `|σ| = Σ σ_i`.
    pub fn total(&self) -> f64 {
        self.param.total()
    }

    /// `log L_μ(θ) = |σ| log π + log Δ*_{−σ*}(−θ)`.
    pub fn log_laplace(&self, theta: &DVector<f64>) -> Result<f64> {
        let neg_sigma_star: Vec<f64> = self.param.sigma.iter().rev().map(|s| -s).collect();
        Ok(self.total() * PI.ln() + self.cone.log_delta_star(&neg_sigma_star, &(-theta))?)
    }

    pub fn laplace(&self, theta: &DVector<f64>) -> Result<f64> {
        Ok(self.log_laplace(theta)?.exp())
    }

    pub fn report(&self) -> GindikinReport {
        GindikinReport::accepted(&self.param)
    }
}

/// Existence test for the Riesz measure of a virtual sum of basic maps.
pub fn riesz_exists(cone: &Arc<ConeRealization>, map: &VirtualQuadraticMap) -> Result<RieszDescriptor> {
    if !map.codomain().realization().is_some_and(|c| c.same_as(cone)) {
        return Err(Error::CodomainMismatch);
    }
    let weights = map.basic_weights().ok_or(Error::NotBasicSum)?;
    RieszDescriptor::from_weights(cone, &weights)
}

/// `riesz_laplace(desc, θ)`.
pub fn riesz_laplace(desc: &RieszDescriptor, theta: &DVector<f64>) -> Result<f64> {
    desc.laplace(theta)
}

/// Report emitted by the `gindikin` command.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GindikinReport {
    pub sigma: Vec<f64>,
    #[serde(rename = "in_Xi")]
    pub in_xi: bool,
    pub epsilon: Option<Vec<u8>>,
    pub u: Option<Vec<f64>>,
    pub singular: Option<bool>,
}

impl GindikinReport {
    fn accepted(param: &GindikinParameter) -> Self {
        Self {
            sigma: param.sigma.clone(),
            in_xi: true,
            epsilon: Some(param.epsilon.clone()),
            u: Some(param.u.clone()),
            singular: Some(param.is_singular()),
        }
    }

    pub fn for_sigma(cone: &ConeRealization, sigma: &[f64]) -> Result<Self> {
        match gindikin_decompose(cone, sigma) {
            Ok(p) => Ok(Self::accepted(&p)),
            Err(Error::NotInXi { .. }) => {
                Ok(Self { sigma: sigma.to_vec(), in_xi: false, epsilon: None, u: None, singular: None })
            }
            Err(e) => Err(e),
        }
    }
}
