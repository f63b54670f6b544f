use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use crate::cone::ConeRealization;
use crate::error::{Error, Result};
use crate::gindikin::{gindikin_decompose, sigma_of_epsilon_u, weights_of_sigma, GindikinParameter, RieszDescriptor};
use crate::linalg::{inverse_pd, is_pd, log_det_pd};
use crate::quadratic::{Codomain, QuadraticMap, VirtualQuadraticMap};

/// Probes used to verify relative invariance of a user-supplied conjugator.
const INVARIANCE_PROBES: usize = 32;
/// Relative tolerance for the relative-invariance identity.
const INVARIANCE_TOL: f64 = 1e-8;
/// Distance from an integer accepted when estimating multiplier exponents.
const INTEGRALITY_TOL: f64 = 1e-6;

#[derive(Debug, Clone)]
pub(crate) struct Component {
    pub map: QuadraticMap,
    pub weight: f64,
    /// `φ(−θ)⁻¹`.
    pub sigma: DMatrix<f64>,
}

/// Triangular data for sampling: `Y = G ρ(T)⁻¹ q_V^ε(X^u)/2`, where `ρ*(T) I_N = −θ'`
/// and `θ' = G* θ`.
#[derive(Debug, Clone)]
pub struct BartlettForm {
    cone: Arc<ConeRealization>,
    weights: Vec<f64>,
    param: GindikinParameter,
    base_theta: DVector<f64>,
    t_base: DVector<f64>,
    outer: Option<DMatrix<f64>>,
    transport: DMatrix<f64>,
}

impl BartlettForm {
    fn new(
        cone: &Arc<ConeRealization>,
        weights: Vec<f64>,
        param: GindikinParameter,
        base_theta: DVector<f64>,
        t_base: Option<DVector<f64>>,
        outer: Option<DMatrix<f64>>,
    ) -> Result<Self> {
        let t_base = match t_base {
            Some(t) => t,
            None => cone.dual_triangular(&(-&base_theta))?,
        };
        let t_inv = crate::cone::TriangularElement::new(cone, t_base.clone())?.inverse();
        let rho_inv = t_inv.rho_matrix();
        let transport = match &outer {
            Some(g) => g * rho_inv,
            None => rho_inv,
        };
        Ok(Self { cone: Arc::clone(cone), weights, param, base_theta, t_base, outer, transport })
    }

    pub fn cone(&self) -> &Arc<ConeRealization> {
        &self.cone
    }

    /// Basic-map weights `s` of the underlying virtual sum.
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    pub fn parameter(&self) -> &GindikinParameter {
        &self.param
    }

    pub fn base_theta(&self) -> &DVector<f64> {
        &self.base_theta
    }

    /// `T` with `ρ*(T) I_N = −θ'`.
    pub fn triangular(&self) -> &DVector<f64> {
        &self.t_base
    }

    /// The conjugating map `G`, when it is not the identity.
    pub fn outer(&self) -> Option<&DMatrix<f64>> {
        self.outer.as_ref()
    }

    /// The coordinate map `G ρ(T)⁻¹`.
    pub fn transport(&self) -> &DMatrix<f64> {
        &self.transport
    }

    pub fn riesz(&self) -> Result<RieszDescriptor> {
        RieszDescriptor::from_weights(&self.cone, &self.weights)
    }

    fn pushforward(&self, g: &DMatrix<f64>) -> Self {
        let outer = Some(match &self.outer {
            Some(h) => g * h,
            None => g.clone(),
        });
        Self {
            cone: Arc::clone(&self.cone),
            weights: self.weights.clone(),
            param: self.param.clone(),
            base_theta: self.base_theta.clone(),
            t_base: self.t_base.clone(),
            outer,
            transport: g * &self.transport,
        }
    }
}

/// The Wishart law `γ_{q,θ}` of a true or virtual quadratic map.
#[derive(Debug, Clone)]
pub struct WishartLaw {
    components: Vec<Component>,
    theta: DVector<f64>,
    bartlett: Option<BartlettForm>,
}

/// `θ = −ρ*(T) I_N`.
pub fn theta_of_triangular(cone: &ConeRealization, t: &DVector<f64>) -> Result<DVector<f64>> {
    Ok(-cone.dual_orbit_point(t)?)
}

fn is_true_weight(s: f64) -> bool {
    s >= 0.0 && s.fract() == 0.0
}

impl WishartLaw {
    /// `γ_{q,θ}`. A Bartlett form is attached when `q` is a weighted sum of basic maps.
    pub fn new(map: impl Into<VirtualQuadraticMap>, theta: DVector<f64>) -> Result<Self> {
        Self::build(map.into(), theta, None)
    }

    /// As [`WishartLaw::new`] with `θ = −ρ*(T) I_N` given by its triangular element.
    pub fn with_triangular(map: impl Into<VirtualQuadraticMap>, t: &DVector<f64>) -> Result<Self> {
        let vq = map.into();
        let cone = vq.codomain().realization().ok_or(Error::MissingTriangularForm)?.clone();
        let theta = theta_of_triangular(&cone, t)?;
        Self::build(vq, theta, Some(t.clone()))
    }

    fn build(vq: VirtualQuadraticMap, theta: DVector<f64>, t: Option<DVector<f64>>) -> Result<Self> {
        let codomain = vq.codomain().clone();
        if theta.len() != codomain.dim() {
            return Err(Error::DimensionMismatch { expected: codomain.dim(), found: theta.len() });
        }
        if !codomain.dual_membership(&-&theta) {
            return Err(Error::NotInDualCone);
        }
        let components = Self::components_for(&vq, &theta)?;
        let bartlett = match (codomain.realization(), vq.basic_weights()) {
            (Some(cone), Some(weights)) => {
                let sigma = crate::gindikin::sigma_of_weights(cone, &weights)?;
                let param = gindikin_decompose(cone, &sigma)?;
                Some(BartlettForm::new(cone, weights, param, theta.clone(), t, None)?)
            }
            _ => {
                if !vq.weights().iter().all(|&s| is_true_weight(s)) {
                    return Err(Error::NotBasicSum);
                }
                None
            }
        };
        Ok(Self { components, theta, bartlett })
    }

    fn components_for(vq: &VirtualQuadraticMap, theta: &DVector<f64>) -> Result<Vec<Component>> {
        let neg = -theta;
        vq.components()
            .iter()
            .map(|(q, s)| {
                let sigma = inverse_pd(&q.phi(&neg)).ok_or(Error::NotPD)?;
                Ok(Component { map: q.clone(), weight: *s, sigma })
            })
            .collect()
    }

    /// The basic virtual law with multiplier `σ ∈ Ξ`.
    pub fn gindikin(cone: &Arc<ConeRealization>, sigma: &[f64], theta: DVector<f64>) -> Result<Self> {
        gindikin_decompose(cone, sigma)?;
        let weights = weights_of_sigma(cone, sigma)?;
        Self::new(VirtualQuadraticMap::basic(cone, &weights)?, theta)
    }

    /// The basic virtual law with `σ = u + p(ε)/2`.
    pub fn from_epsilon_u(
        cone: &Arc<ConeRealization>,
        epsilon: &[u8],
        u: &[f64],
        theta: DVector<f64>,
    ) -> Result<Self> {
        let sigma = sigma_of_epsilon_u(cone, epsilon, u)?;
        let law = Self::gindikin(cone, &sigma, theta)?;
        if law.epsilon() != Some(epsilon) {
            return Err(Error::InvalidU { index: 0 });
        }
        Ok(law)
    }

    /// Law of `q^{⊕ s}` for a homogeneous map `q` with a user-supplied conjugator `g₀`.
    ///
    /// Estimates the integer vector `m` and constant `C` in
    /// `det φ_q((g₀⁻¹)* η) = C Δ*_m(η)` and verifies the identity on random probes.
    pub fn homogeneous(q: &QuadraticMap, s: f64, g0: &DMatrix<f64>, theta: DVector<f64>) -> Result<Self> {
        let cone = q.codomain().realization().ok_or(Error::MissingTriangularForm)?.clone();
        if !s.is_finite() {
            return Err(Error::InvalidWeight { index: 0 });
        }
        let fit = HomogeneousFit::estimate(q, g0)?;
        let sigma: Vec<f64> = fit.m.iter().rev().map(|m| s * m / 2.0).collect();
        let param = gindikin_decompose(&cone, &sigma)?;
        let weights = weights_of_sigma(&cone, &sigma)?;
        let vq = VirtualQuadraticMap::new(vec![(q.clone(), s)])?;
        if !q.codomain().dual_membership(&-&theta) {
            return Err(Error::NotInDualCone);
        }
        let components = Self::components_for(&vq, &theta)?;
        let base_theta = cone.adjoint(g0) * &theta;
        let outer = (g0 != &DMatrix::identity(cone.dim(), cone.dim())).then(|| g0.clone());
        let bartlett = BartlettForm::new(&cone, weights, param, base_theta, None, outer)?;
        Ok(Self { components, theta, bartlett: Some(bartlett) })
    }

    /// `γ_{g∘q, (g⁻¹)* θ}`, the law of `gY`.
    pub fn pushforward(&self, g: &DMatrix<f64>) -> Result<Self> {
        let g_inv = g.clone().lu().try_inverse().ok_or(Error::SingularTransform)?;
        let codomain = self.codomain().clone();
        let theta = codomain.adjoint(&g_inv) * &self.theta;
        let pairs = self
            .components
            .iter()
            .map(|c| Ok((c.map.pushforward(g)?, c.weight)))
            .collect::<Result<Vec<_>>>()?;
        let vq = VirtualQuadraticMap::new(pairs)?;
        let components = Self::components_for(&vq, &theta)?;
        let bartlett = self.bartlett.as_ref().map(|b| b.pushforward(g));
        Ok(Self { components, theta, bartlett })
    }

    pub(crate) fn components(&self) -> &[Component] {
        &self.components
    }

    pub fn maps(&self) -> impl Iterator<Item = (&QuadraticMap, f64)> {
        self.components.iter().map(|c| (&c.map, c.weight))
    }

    pub fn theta(&self) -> &DVector<f64> {
        &self.theta
    }

    pub fn codomain(&self) -> &Codomain {
        self.components[0].map.codomain()
    }

    pub fn dim(&self) -> usize {
        self.theta.len()
    }

    pub fn bartlett(&self) -> Option<&BartlettForm> {
        self.bartlett.as_ref()
    }

    pub fn sigma(&self) -> Option<&[f64]> {
        self.bartlett.as_ref().map(|b| b.param.sigma.as_slice())
    }

    pub fn epsilon(&self) -> Option<&[u8]> {
        self.bartlett.as_ref().map(|b| b.param.epsilon.as_slice())
    }

    /// Weights of the components of the map.
    pub fn weights(&self) -> Vec<f64> {
        self.components.iter().map(|c| c.weight).collect()
    }

    /// True when every component weight is a nonnegative integer.
    pub fn is_true_map(&self) -> bool {
        self.components.iter().all(|c| is_true_weight(c.weight))
    }

    /// `φ_i(−θ−η)` positive definite for every component.
    pub fn in_laplace_domain(&self, eta: &DVector<f64>) -> bool {
        let point = -(&self.theta + eta);
        self.components.iter().all(|c| c.weight == 0.0 || is_pd(&c.map.phi(&point)))
    }

    /// `log L(η) = −Σ s_i/2 (log det φ_i(−θ−η) − log det φ_i(−θ))`.
    pub fn log_laplace(&self, eta: &DVector<f64>) -> Result<f64> {
        if eta.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: eta.len() });
        }
        let at = -(&self.theta + eta);
        let base = -&self.theta;
        let mut log = 0.0;
        for c in &self.components {
            if c.weight == 0.0 {
                continue;
            }
            let num = log_det_pd(&c.map.phi(&at)).ok_or(Error::OutOfLaplaceDomain)?;
            let den = log_det_pd(&c.map.phi(&base)).ok_or(Error::NotPD)?;
            log -= c.weight / 2.0 * (num - den);
        }
        Ok(log)
    }

    pub fn laplace(&self, eta: &DVector<f64>) -> Result<f64> {
        Ok(self.log_laplace(eta)?.exp())
    }
}

/// `wishart_laplace(law, η)`.
pub fn wishart_laplace(law: &WishartLaw, eta: &DVector<f64>) -> Result<f64> {
    law.laplace(eta)
}

/// `det φ_q((g₀⁻¹)* η) = C Δ*_m(η)`.
#[derive(Debug, Clone, PartialEq)]
pub struct HomogeneousFit {
    pub m: Vec<f64>,
    pub constant: f64,
}

impl HomogeneousFit {
    pub fn estimate(q: &QuadraticMap, g0: &DMatrix<f64>) -> Result<Self> {
        let cone = q.codomain().realization().ok_or(Error::MissingTriangularForm)?;
        let g0_inv = g0.clone().lu().try_inverse().ok_or(Error::SingularTransform)?;
        let pull = cone.adjoint(&g0_inv);
        let log_det = |eta: &DVector<f64>| -> Result<f64> {
            let d = q.phi(&(&pull * eta)).determinant();
            if d > 0.0 {
                Ok(d.ln())
            } else {
                Err(Error::NotPD)
            }
        };
        let r = cone.rank();
        let base = log_det(&cone.identity_coords())?;
        let mut m = vec![0.0; r];
        for k in 0..r {
            let mut t = DVector::zeros(cone.dim());
            for j in 0..r {
                t[j] = if j == k { 2.0 } else { 1.0 };
            }
            let eta = cone.dual_orbit_point(&t)?;
            // χ_{m*}(T) = 2^{2 m*_k}
            let raw = (log_det(&eta)? - base) / (2.0 * std::f64::consts::LN_2);
            let rounded = raw.round();
            if (raw - rounded).abs() > INTEGRALITY_TOL {
                return Err(Error::NonIntegralExponent { index: r - 1 - k, value: raw });
            }
            m[r - 1 - k] = rounded;
        }
        let fit = Self { m, constant: base.exp() };
        let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(0x6730);
        for probe in 0..INVARIANCE_PROBES {
            let eta = cone.random_dual(&mut rng);
            let expected = fit.constant.ln() + cone.log_delta_star(&fit.m, &eta)?;
            let log_ratio = log_det(&eta)? - expected;
            if log_ratio.abs() > INVARIANCE_TOL {
                return Err(Error::RelativeInvarianceFailure { probe, ratio: log_ratio.exp() });
            }
        }
        Ok(fit)
    }
}
