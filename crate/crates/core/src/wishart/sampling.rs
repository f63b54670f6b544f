use nalgebra::{DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::law::{BartlettForm, WishartLaw};
use crate::cone::ConeRealization;
use crate::error::{Error, Result};

/// Draws per random stream.
pub const CHUNK: usize = 1024;
/// Environment variable capping the sampler's worker count.
pub const THREADS_ENV: &str = "CONEWISHART_THREADS";
/// Zero-pivot tolerance for orbit classification of draws.
pub const ORBIT_TOL: f64 = 1e-8;

/// Metadata carried alongside a batch of draws.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BatchInfo {
    pub cone: String,
    pub names: Vec<String>,
    pub coupling_weights: Vec<f64>,
    pub weights: Vec<f64>,
    pub theta: Vec<f64>,
    pub sigma: Option<Vec<f64>>,
    pub epsilon: Option<Vec<u8>>,
    pub seed: u64,
    pub count: usize,
}

#[derive(Debug, Clone)]
pub struct SampleBatch {
    pub draws: Vec<DVector<f64>>,
    pub info: BatchInfo,
}

impl SampleBatch {
    fn for_law(law: &WishartLaw, seed: u64, draws: Vec<DVector<f64>>) -> Self {
        let codomain = law.codomain();
        let names = match codomain.realization() {
            Some(cone) => cone.coordinate_names().to_vec(),
            None => (1..=codomain.dim()).map(|j| format!("y{j}")).collect(),
        };
        let weights = match law.bartlett() {
            Some(b) => b.weights().to_vec(),
            None => law.weights(),
        };
        let info = BatchInfo {
            cone: codomain.name().to_string(),
            names,
            coupling_weights: codomain.weights().iter().copied().collect(),
            weights,
            theta: law.theta().iter().map(|x| x + 0.0).collect(),
            sigma: law.sigma().map(<[f64]>::to_vec),
            epsilon: law.epsilon().map(<[u8]>::to_vec),
            seed,
            count: draws.len(),
        };
        Self { draws, info }
    }

    pub fn len(&self) -> usize {
        self.draws.len()
    }

    pub fn is_empty(&self) -> bool {
        self.draws.is_empty()
    }

    /// `⟨y, η⟩` for every draw.
    pub fn pairings(&self, eta: &DVector<f64>) -> Vec<f64> {
        let w = DVector::from_column_slice(&self.info.coupling_weights);
        let we = w.component_mul(eta);
        self.draws.iter().map(|y| y.dot(&we)).collect()
    }

    pub fn mean(&self) -> DVector<f64> {
        let dim = self.info.names.len();
        let sum = self.draws.iter().fold(DVector::zeros(dim), |acc, y| acc + y);
        sum / self.draws.len().max(1) as f64
    }

    /// Sample covariance matrix of the coordinates (divisor `n − 1`).
    pub fn covariance(&self) -> DMatrix<f64> {
        let dim = self.info.names.len();
        let mean = self.mean();
        let mut acc = DMatrix::zeros(dim, dim);
        for y in &self.draws {
            let d = y - &mean;
            acc.ger(1.0, &d, &d, 1.0);
        }
        acc / (self.draws.len().saturating_sub(1).max(1)) as f64
    }

    /// `y ↦ g y` applied to every draw.
    pub fn transform(&self, g: &DMatrix<f64>) -> Result<Self> {
        let dim = self.info.names.len();
        if g.nrows() != dim || g.ncols() != dim {
            return Err(Error::DimensionMismatch { expected: dim, found: g.nrows() });
        }
        if g.clone().lu().try_inverse().is_none() {
            return Err(Error::SingularTransform);
        }
        Ok(Self { draws: self.draws.iter().map(|y| g * y).collect(), info: self.info.clone() })
    }

    /// Orbit type of every draw.
    pub fn classify(&self, cone: &ConeRealization, tol: f64) -> Result<Vec<Vec<u8>>> {
        self.draws.iter().map(|y| cone.orbit_classify(y, tol)).collect()
    }
}

/// `transform_batch(g, batch)`.
pub fn transform_batch(g: &DMatrix<f64>, batch: &SampleBatch) -> Result<SampleBatch> {
    batch.transform(g)
}

fn worker_count() -> Option<usize> {
    std::env::var(THREADS_ENV).ok()?.trim().parse().ok().filter(|&n| n > 0)
}

/// Runs `count` draws in chunks of [`CHUNK`]; chunk `c` uses stream `c` of the seeded generator.
fn sample_chunks<F>(seed: u64, count: usize, draw: F) -> Vec<DVector<f64>>
where
    F: Fn(&mut ChaCha8Rng) -> DVector<f64> + Sync,
{
    let chunks = count.div_ceil(CHUNK);
    let run = || {
        (0..chunks)
            .into_par_iter()
            .map(|c| {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                rng.set_stream(c as u64);
                let n = CHUNK.min(count - c * CHUNK);
                (0..n).map(|_| draw(&mut rng)).collect::<Vec<_>>()
            })
            .collect::<Vec<_>>()
    };
    let parts = match worker_count().and_then(|n| rayon::ThreadPoolBuilder::new().num_threads(n).build().ok()) {
        Some(pool) => pool.install(run),
        None => run(),
    };
    parts.into_iter().flatten().collect()
}

struct BartlettDraw<'a> {
    form: &'a BartlettForm,
    gammas: Vec<Option<Gamma<f64>>>,
}

impl<'a> BartlettDraw<'a> {
    fn new(form: &'a BartlettForm) -> Result<Self> {
        let p = form.parameter();
        let gammas = p
            .epsilon
            .iter()
            .zip(&p.u)
            .enumerate()
            .map(|(i, (&e, &u))| {
                if e == 1 {
                    Gamma::new(u, 2.0).map(Some).map_err(|_| Error::InvalidU { index: i })
                } else {
                    Ok(None)
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self { form, gammas })
    }

    /// `q_V^ε(X^u)/2` in coordinates, before transport.
    fn base<R: Rng + ?Sized>(&self, rng: &mut R) -> DVector<f64> {
        let cone = self.form.cone();
        let eps = &self.form.parameter().epsilon;
        let mut t = DVector::zeros(cone.dim());
        for (i, g) in self.gammas.iter().enumerate() {
            if let Some(g) = g {
                t[i] = g.sample(rng).sqrt();
            }
        }
        for slot in cone.slots() {
            if eps[slot.k] == 1 {
                for j in slot.range() {
                    t[j] = StandardNormal.sample(rng);
                }
            }
        }
        let m = cone.lower_matrix(&t);
        cone.coords_of_matrix(&(&m * m.transpose())) / 2.0
    }

    fn draw<R: Rng + ?Sized>(&self, rng: &mut R) -> DVector<f64> {
        self.form.transport() * self.base(rng)
    }
}

/// Samples through the triangular (Bartlett) representation of the law.
pub fn bartlett_sample(law: &WishartLaw, seed: u64, count: usize) -> Result<SampleBatch> {
    let form = law.bartlett().ok_or(Error::MissingTriangularForm)?;
    let sampler = BartlettDraw::new(form)?;
    let draws = sample_chunks(seed, count, |rng| sampler.draw(rng));
    Ok(SampleBatch::for_law(law, seed, draws))
}

/// Samples `q(X)/2` with `X ~ N(0, φ(−θ)⁻¹)`; needs nonnegative integer weights.
pub fn direct_sample(law: &WishartLaw, seed: u64, count: usize) -> Result<SampleBatch> {
    if !law.is_true_map() {
        return Err(Error::VirtualMapUnsupported);
    }
    let neg = -law.theta();
    let mut factors = Vec::new();
    for (q, w) in law.maps() {
        let chol = q.phi(&neg).cholesky().ok_or(Error::NotPD)?;
        // X = L⁻ᵀ Z
        let lt_inv = chol.l().transpose().try_inverse().ok_or(Error::NotPD)?;
        for _ in 0..w as usize {
            factors.push((q, lt_inv.clone()));
        }
    }
    let dim = law.dim();
    let draws = sample_chunks(seed, count, |rng| {
        let mut y = DVector::zeros(dim);
        for (q, f) in &factors {
            let z = DVector::from_fn(q.m(), |_, _| StandardNormal.sample(rng));
            y += q.evaluate(&(f * z)).expect("dimensions agree");
        }
        y / 2.0
    });
    Ok(SampleBatch::for_law(law, seed, draws))
}

/// `orbit_classify(cone, y)` with the sampler's zero-pivot tolerance.
pub fn orbit_classify(cone: &ConeRealization, y: &DVector<f64>) -> Result<Vec<u8>> {
    cone.orbit_classify(y, ORBIT_TOL)
}
