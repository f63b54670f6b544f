//! Formal real-weighted sums of quadratic maps.

use std::sync::Arc;

use nalgebra::DMatrix;

use super::codomain::Codomain;
use super::map::QuadraticMap;
use crate::cone::ConeRealization;
use crate::error::{Error, Result};

/// `q = q_1^{⊕ s_1} ⊕ … ⊕ q_t^{⊕ s_t}` with real (possibly negative) weights.
#[derive(Debug, Clone)]
pub struct VirtualQuadraticMap {
    components: Vec<(QuadraticMap, f64)>,
}

impl VirtualQuadraticMap {
    pub fn new(pairs: Vec<(QuadraticMap, f64)>) -> Result<Self> {
        let first = pairs.first().ok_or(Error::EmptyIndexSet)?;
        if pairs.iter().any(|(q, _)| !q.codomain().same_as(first.0.codomain())) {
            return Err(Error::CodomainMismatch);
        }
        if let Some(i) = pairs.iter().position(|(_, s)| !s.is_finite()) {
            return Err(Error::InvalidWeight { index: i });
        }
        Ok(Self { components: pairs })
    }

    /// `⊕_i (q^i)^{⊕ s_i}` over the basic maps of a realized cone.
    pub fn basic(cone: &Arc<ConeRealization>, weights: &[f64]) -> Result<Self> {
        if weights.len() != cone.rank() {
            return Err(Error::DimensionMismatch { expected: cone.rank(), found: weights.len() });
        }
        let pairs = weights
            .iter()
            .enumerate()
            .map(|(i, &s)| Ok((QuadraticMap::basic(cone, i)?, s)))
            .collect::<Result<Vec<_>>>()?;
        Self::new(pairs)
    }

    pub fn single(q: QuadraticMap) -> Self {
        Self { components: vec![(q, 1.0)] }
    }

    pub fn components(&self) -> &[(QuadraticMap, f64)] {
        &self.components
    }

    pub fn codomain(&self) -> &Codomain {
        self.components[0].0.codomain()
    }

    pub fn weights(&self) -> Vec<f64> {
        self.components.iter().map(|(_, s)| *s).collect()
    }

    /// Weights `s` with `q ≅ ⊕_i (q^i)^{⊕ s_i}`, when every component is a sum of basic maps.
    pub fn basic_weights(&self) -> Option<Vec<f64>> {
        let cone = self.codomain().realization()?;
        let mut s = vec![0.0; cone.rank()];
        for (q, w) in &self.components {
            let counts = q.meta().basic_counts.as_ref()?;
            for (i, &c) in counts.iter().enumerate() {
                s[i] += w * c as f64;
            }
        }
        Some(s)
    }

    /// Concatenation as a true map, when all weights are positive integers.
    pub fn to_true_map(&self) -> Option<QuadraticMap> {
        let mut parts = Vec::new();
        for (q, s) in &self.components {
            if *s < 0.0 || s.fract() != 0.0 {
                return None;
            }
            parts.extend(std::iter::repeat_n(q.clone(), *s as usize));
        }
        QuadraticMap::direct_sum(&parts).ok()
    }

    /// `g ∘ q`, applied componentwise.
    pub fn pushforward(&self, g: &DMatrix<f64>) -> Result<Self> {
        let pairs = self
            .components
            .iter()
            .map(|(q, s)| Ok((q.pushforward(g)?, *s)))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { components: pairs })
    }
}

impl From<QuadraticMap> for VirtualQuadraticMap {
    fn from(q: QuadraticMap) -> Self {
        Self::single(q)
    }
}
