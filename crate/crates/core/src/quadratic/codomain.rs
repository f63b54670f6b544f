//! Target cones of quadratic maps: realized cones or polyhedral cones given by generators.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1};
use serde::{Deserialize, Serialize};

use crate::cone::{adjoint_with, preset, ConeRealization, ConeSpec};
use crate::error::{Error, Result};

/// Number of random dual probes used by positivity checks.
pub const PROBE_COUNT: usize = 64;
const PROBE_SEED: u64 = 0x005e_ed0f_c0e5;

/// An open polyhedral cone `Ω = {Σ t_i v_i : t_i > 0}` in `ℝ^n` with the standard pairing.
///
/// Dual membership is exact: `η ∈ Ω*` iff `⟨v_i, η⟩ > 0` for every generator.
/// Positivity probes are random positive combinations of the dual generators.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GenericCone {
    pub name: String,
    pub generators: Vec<Vec<f64>>,
    pub dual_generators: Vec<Vec<f64>>,
}

impl GenericCone {
    pub fn new(name: impl Into<String>, generators: Vec<Vec<f64>>, dual_generators: Vec<Vec<f64>>) -> Result<Self> {
        let dim = generators.first().map(Vec::len).unwrap_or(0);
        if dim == 0 || dual_generators.is_empty() {
            return Err(Error::SpecParse("generic cone needs generators and dual generators".into()));
        }
        for g in generators.iter().chain(&dual_generators) {
            if g.len() != dim {
                return Err(Error::DimensionMismatch { expected: dim, found: g.len() });
            }
        }
        let cone = Self { name: name.into(), generators, dual_generators };
        for (i, d) in cone.dual_generators.iter().enumerate() {
            if cone.generators.iter().any(|g| dot(g, d) < 0.0) {
                return Err(Error::SpecParse(format!("dual generator {i} is negative on a generator")));
            }
        }
        Ok(cone)
    }

    /// The four-generator cone in `ℝ³` spanned by `(0,0,1), (1,0,1), (1,1,1), (0,1,1)`.
    pub fn polyhedral() -> Self {
        Self::new(
            "polyhedral",
            vec![vec![0.0, 0.0, 1.0], vec![1.0, 0.0, 1.0], vec![1.0, 1.0, 1.0], vec![0.0, 1.0, 1.0]],
            vec![vec![1.0, 0.0, 0.0], vec![0.0, 1.0, 0.0], vec![-1.0, 0.0, 1.0], vec![0.0, -1.0, 1.0]],
        )
        .expect("valid generators")
    }

    pub fn dim(&self) -> usize {
        self.generators[0].len()
    }

    pub fn dual_membership(&self, eta: &DVector<f64>) -> bool {
        eta.len() == self.dim() && self.generators.iter().all(|g| dot(g, eta.as_slice()) > 0.0)
    }

    pub fn contains(&self, y: &DVector<f64>) -> bool {
        y.len() == self.dim() && self.dual_generators.iter().all(|g| dot(g, y.as_slice()) > 0.0)
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// The codomain of a quadratic map.
#[derive(Debug, Clone)]
pub enum Codomain {
    Realized(Arc<ConeRealization>),
    Generic(Arc<GenericCone>),
}

impl Codomain {
    pub fn dim(&self) -> usize {
        match self {
            Codomain::Realized(c) => c.dim(),
            Codomain::Generic(g) => g.dim(),
        }
    }

    pub fn name(&self) -> &str {
        match self {
            Codomain::Realized(c) => c.name(),
            Codomain::Generic(g) => &g.name,
        }
    }

    pub fn realization(&self) -> Option<&Arc<ConeRealization>> {
        match self {
            Codomain::Realized(c) => Some(c),
            Codomain::Generic(_) => None,
        }
    }

    /// Diagonal weights of the coupling `⟨y, η⟩ = Σ W_j y_j η_j`.
    pub fn weights(&self) -> DVector<f64> {
        match self {
            Codomain::Realized(c) => c.coupling_weights().clone(),
            Codomain::Generic(g) => DVector::from_element(g.dim(), 1.0),
        }
    }

    pub fn coupling(&self, y: &DVector<f64>, eta: &DVector<f64>) -> f64 {
        match self {
            Codomain::Realized(c) => c.coupling(y, eta),
            Codomain::Generic(_) => y.dot(eta),
        }
    }

    /// Coupling adjoint of a coordinate matrix.
    pub fn adjoint(&self, g: &DMatrix<f64>) -> DMatrix<f64> {
        adjoint_with(&self.weights(), g)
    }

    pub fn dual_membership(&self, eta: &DVector<f64>) -> bool {
        match self {
            Codomain::Realized(c) => c.dual_membership(eta),
            Codomain::Generic(g) => g.dual_membership(eta),
        }
    }

    /// `−I_N` for realized cones; minus the sum of the dual generators otherwise.
    pub fn default_theta(&self) -> DVector<f64> {
        match self {
            Codomain::Realized(c) => -c.identity_coords(),
            Codomain::Generic(g) => {
                let mut s = DVector::zeros(g.dim());
                for d in &g.dual_generators {
                    s += DVector::from_column_slice(d);
                }
                -s
            }
        }
    }

    /// Deterministic interior points of the dual cone, the first one being the default.
    pub fn probes(&self, count: usize) -> Vec<DVector<f64>> {
        let mut rng = ChaCha8Rng::seed_from_u64(PROBE_SEED);
        let mut out = vec![-self.default_theta()];
        match self {
            Codomain::Realized(c) => {
                out.extend((0..count).map(|_| c.random_dual(&mut rng)));
            }
            Codomain::Generic(g) => {
                for _ in 0..count {
                    let mut s = DVector::zeros(g.dim());
                    for d in &g.dual_generators {
                        let t: f64 = Exp1.sample(&mut rng);
                        s += DVector::from_column_slice(d) * (t + 1e-3);
                    }
                    out.push(s);
                }
            }
        }
        out
    }

    pub fn same_as(&self, other: &Codomain) -> bool {
        match (self, other) {
            (Codomain::Realized(a), Codomain::Realized(b)) => a.same_as(b),
            (Codomain::Generic(a), Codomain::Generic(b)) => Arc::ptr_eq(a, b) || a == b,
            _ => false,
        }
    }

    pub fn to_ref(&self) -> CodomainRef {
        match self {
            Codomain::Realized(c) => CodomainRef::Realized(ConeSpec::of(c)),
            Codomain::Generic(g) => CodomainRef::Generic((**g).clone()),
        }
    }
}

impl From<Arc<ConeRealization>> for Codomain {
    fn from(c: Arc<ConeRealization>) -> Self {
        Codomain::Realized(c)
    }
}

impl From<GenericCone> for Codomain {
    fn from(g: GenericCone) -> Self {
        Codomain::Generic(Arc::new(g))
    }
}

/// Serialized codomain: a preset name, a realized cone spec, or a generic cone.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub enum CodomainRef {
    Preset(String),
    Realized(ConeSpec),
    Generic(GenericCone),
}

impl CodomainRef {
    pub fn resolve(&self) -> Result<Codomain> {
        Ok(match self {
            CodomainRef::Preset(name) => Codomain::Realized(preset(name)?),
            CodomainRef::Realized(spec) => Codomain::Realized(spec.build()?),
            CodomainRef::Generic(g) => Codomain::Generic(Arc::new(GenericCone::new(
                g.name.clone(),
                g.generators.clone(),
                g.dual_generators.clone(),
            )?)),
        })
    }
}
