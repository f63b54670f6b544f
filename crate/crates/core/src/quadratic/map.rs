//! Quadratic maps represented by their φ-tensors.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use super::codomain::{Codomain, CodomainRef, GenericCone, PROBE_COUNT};
use crate::cone::{contract, preset, ConeRealization};
use crate::error::{Error, Result};
use crate::linalg::{block_diag, is_pd, max_asymmetry};

const SYMMETRY_TOL: f64 = 1e-12;

/// Structural information about the domain of a map.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct MapMeta {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
    /// `counts[i]` copies of the basic map `q^i`, concatenated in index order.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub basic_counts: Option<Vec<usize>>,
}

/// An Ω-positive quadratic map `q: ℝ^m → ℝ^n`, stored as the slices `S_j = φ(e_j)`.
///
/// `⟨q(x), η⟩ = xᵀ φ(η) x` with `φ(η) = Σ_j η_j S_j`.
#[derive(Debug, Clone)]
pub struct QuadraticMap {
    m: usize,
    codomain: Codomain,
    slices: Vec<DMatrix<f64>>,
    meta: MapMeta,
}

impl QuadraticMap {
    /// Checks slice shapes, symmetry and positivity of `φ` on the codomain probes.
    pub fn from_phi_tensor(slices: Vec<DMatrix<f64>>, codomain: impl Into<Codomain>) -> Result<Self> {
        let codomain = codomain.into();
        if slices.len() != codomain.dim() {
            return Err(Error::DimensionMismatch { expected: codomain.dim(), found: slices.len() });
        }
        let m = slices.first().map(|s| s.nrows()).unwrap_or(0);
        for (index, s) in slices.iter().enumerate() {
            if s.shape() != (m, m) {
                return Err(Error::DimensionMismatch { expected: m, found: s.nrows().max(s.ncols()) });
            }
            let scale = s.amax().max(1.0);
            let asymmetry = max_asymmetry(s);
            if asymmetry > SYMMETRY_TOL * scale {
                return Err(Error::AsymmetricSlice { index, asymmetry });
            }
        }
        let q = Self { m, codomain, slices, meta: MapMeta::default() };
        q.check_positivity()?;
        Ok(q)
    }

    pub(crate) fn trusted(slices: Vec<DMatrix<f64>>, codomain: Codomain, meta: MapMeta) -> Self {
        let m = slices.first().map(|s| s.nrows()).unwrap_or(0);
        Self { m, codomain, slices, meta }
    }

    /// `φ(η)` positive definite at every probe of the dual cone.
    pub fn check_positivity(&self) -> Result<()> {
        if self.m == 0 {
            return Err(Error::DimensionMismatch { expected: 1, found: 0 });
        }
        for (probe, eta) in self.codomain.probes(PROBE_COUNT).iter().enumerate() {
            if !is_pd(&self.phi(eta)) {
                return Err(Error::PositivityFailure { probe });
            }
        }
        Ok(())
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.meta.label = Some(label.into());
        self
    }

    /// Domain dimension `m`.
    pub fn m(&self) -> usize {
        self.m
    }

    /// Codomain dimension `n`.
    pub fn n(&self) -> usize {
        self.slices.len()
    }

    pub fn codomain(&self) -> &Codomain {
        &self.codomain
    }

    pub fn slices(&self) -> &[DMatrix<f64>] {
        &self.slices
    }

    pub fn meta(&self) -> &MapMeta {
        &self.meta
    }

    pub fn phi(&self, eta: &DVector<f64>) -> DMatrix<f64> {
        contract(&self.slices, eta)
    }

    /// `q(x)_j = xᵀ S_j x / W_j`.
    pub fn evaluate(&self, x: &DVector<f64>) -> Result<DVector<f64>> {
        if x.len() != self.m {
            return Err(Error::DimensionMismatch { expected: self.m, found: x.len() });
        }
        let w = self.codomain.weights();
        Ok(DVector::from_fn(self.n(), |j, _| (x.transpose() * &self.slices[j] * x)[(0, 0)] / w[j]))
    }

    /// Basic map `q^i(x) = x xᵀ` on the column space `W^i` (0-based `i`).
    pub fn basic(cone: &Arc<ConeRealization>, i: usize) -> Result<Self> {
        if i >= cone.rank() {
            return Err(Error::IndexOutOfRange { index: i, rank: cone.rank() });
        }
        let mut counts = vec![0; cone.rank()];
        counts[i] = 1;
        Ok(Self::trusted(
            cone.basic_slices(i).to_vec(),
            Codomain::Realized(Arc::clone(cone)),
            MapMeta { label: Some(format!("q^{}", i + 1)), basic_counts: Some(counts) },
        ))
    }

    /// Standard map `q^ε = ⊕_{i ∈ I(ε)} q^i`, with `q^ε(x) = T_x T_xᵀ`.
    pub fn standard(cone: &Arc<ConeRealization>, epsilon: &[u8]) -> Result<Self> {
        if epsilon.len() != cone.rank() {
            return Err(Error::DimensionMismatch { expected: cone.rank(), found: epsilon.len() });
        }
        if epsilon.iter().all(|&e| e == 0) {
            return Err(Error::ZeroEpsilon);
        }
        let counts: Vec<usize> = epsilon.iter().map(|&e| usize::from(e != 0)).collect();
        let eps: String = epsilon.iter().map(|e| if *e != 0 { '1' } else { '0' }).collect();
        Ok(Self::from_basic_counts(cone, &counts).with_label(format!("q^eps({eps})")))
    }

    /// `⊕_i (q^i)^{⊕ counts[i]}`; counts must not all vanish.
    pub fn from_basic_counts(cone: &Arc<ConeRealization>, counts: &[usize]) -> Self {
        let mut blocks: Vec<Vec<DMatrix<f64>>> = Vec::new();
        for (i, &c) in counts.iter().enumerate() {
            for _ in 0..c {
                blocks.push(cone.basic_slices(i).to_vec());
            }
        }
        let slices = (0..cone.dim())
            .map(|j| block_diag(&blocks.iter().map(|b| b[j].clone()).collect::<Vec<_>>()))
            .collect();
        Self::trusted(
            slices,
            Codomain::Realized(Arc::clone(cone)),
            MapMeta { label: None, basic_counts: Some(counts.to_vec()) },
        )
    }

    /// `q_{r,s}(x) = x xᵀ` for `x ∈ Mat(r, s)`, i.e. `s` copies of the first basic map of `Sym(r)`.
    pub fn q_rs(r: usize, s: usize) -> Result<Self> {
        if s == 0 {
            return Err(Error::DimensionMismatch { expected: 1, found: 0 });
        }
        let cone = preset(&format!("sym({r})"))?;
        let mut counts = vec![0; r];
        counts[0] = s;
        Ok(Self::from_basic_counts(&cone, &counts).with_label(format!("q_{{{r},{s}}}")))
    }

    /// Restriction `q^I(x) = x xᵀ` of `q_{r,1}` to the coordinates `I` (0-based, sorted).
    pub fn restriction(r: usize, index_set: &[usize]) -> Result<Self> {
        if index_set.is_empty() {
            return Err(Error::EmptyIndexSet);
        }
        if let Some(&i) = index_set.iter().find(|&&i| i >= r) {
            return Err(Error::IndexOutOfRange { index: i, rank: r });
        }
        let mut idx = index_set.to_vec();
        idx.sort_unstable();
        idx.dedup();
        let cone = preset(&format!("sym({r})"))?;
        let k = idx.len();
        let slices = (0..cone.dim())
            .map(|j| {
                let mut e = DVector::zeros(cone.dim());
                e[j] = 1.0;
                let hat = cone.dual_matrix(&e);
                DMatrix::from_fn(k, k, |a, b| hat[(idx[a], idx[b])])
            })
            .collect();
        let label = idx.iter().map(|i| (i + 1).to_string()).collect::<Vec<_>>().join(",");
        Ok(Self::trusted(
            slices,
            Codomain::Realized(cone),
            MapMeta { label: Some(format!("q^{{{label}}}")), basic_counts: None },
        ))
    }

    /// The map `x ↦ Σ x_i² v_i` into the four-generator cone of `ℝ³`.
    pub fn polyhedral() -> Self {
        let d = |v: [f64; 4]| DMatrix::from_diagonal(&DVector::from_column_slice(&v));
        let slices = vec![d([0.0, 1.0, 1.0, 0.0]), d([0.0, 0.0, 1.0, 1.0]), d([1.0; 4])];
        Self::trusted(slices, GenericCone::polyhedral().into(), MapMeta {
            label: Some("polyhedral".into()),
            basic_counts: None,
        })
    }

    /// `z ↦ z z*` for `z ∈ ℂ²`, valued in 2×2 Hermitian matrices realized as `herm2c`.
    pub fn herm2c() -> Result<Self> {
        let cone = preset("herm2c")?;
        let sparse = |entries: &[(usize, usize, f64)]| {
            let mut s = DMatrix::zeros(4, 4);
            for &(i, j, v) in entries {
                s[(i, j)] = v;
                s[(j, i)] = v;
            }
            s
        };
        let slices = vec![
            sparse(&[(0, 0, 1.0), (1, 1, 1.0)]),
            sparse(&[(2, 2, 1.0), (3, 3, 1.0)]),
            sparse(&[(0, 2, 1.0), (1, 3, 1.0)]),
            sparse(&[(0, 3, 1.0), (1, 2, -1.0)]),
        ];
        Ok(Self::trusted(slices, Codomain::Realized(cone), MapMeta {
            label: Some("herm2c".into()),
            basic_counts: None,
        }))
    }

    /// Block-diagonal concatenation of φ-tensors.
    pub fn direct_sum(maps: &[QuadraticMap]) -> Result<Self> {
        let first = maps.first().ok_or(Error::EmptyIndexSet)?;
        if maps.iter().any(|q| !q.codomain.same_as(&first.codomain)) {
            return Err(Error::CodomainMismatch);
        }
        let slices = (0..first.n())
            .map(|j| block_diag(&maps.iter().map(|q| q.slices[j].clone()).collect::<Vec<_>>()))
            .collect();
        let basic_counts = maps
            .iter()
            .map(|q| q.meta.basic_counts.as_ref())
            .collect::<Option<Vec<_>>>()
            .and_then(|parts| {
                let seq: Vec<usize> = parts
                    .iter()
                    .flat_map(|c| c.iter().enumerate().flat_map(|(i, &n)| std::iter::repeat_n(i, n)))
                    .collect();
                if !seq.windows(2).all(|w| w[0] <= w[1]) {
                    return None;
                }
                let mut counts = vec![0; parts[0].len()];
                for i in seq {
                    counts[i] += 1;
                }
                Some(counts)
            });
        Ok(Self::trusted(slices, first.codomain.clone(), MapMeta { label: None, basic_counts }))
    }

    /// `g ∘ q` for an invertible coordinate matrix `g` on the codomain: `φ_{g∘q}(η) = φ_q(g*η)`.
    pub fn pushforward(&self, g: &DMatrix<f64>) -> Result<Self> {
        let n = self.n();
        if g.shape() != (n, n) {
            return Err(Error::DimensionMismatch { expected: n, found: g.nrows() });
        }
        if g.clone().lu().try_inverse().is_none() {
            return Err(Error::SingularTransform);
        }
        let gs = self.codomain.adjoint(g);
        let slices = (0..n)
            .map(|j| {
                let mut s = DMatrix::zeros(self.m, self.m);
                for k in 0..n {
                    if gs[(k, j)] != 0.0 {
                        s += &self.slices[k] * gs[(k, j)];
                    }
                }
                s
            })
            .collect();
        let q = Self::trusted(slices, self.codomain.clone(), MapMeta {
            label: self.meta.label.as_ref().map(|l| format!("g∘{l}")),
            basic_counts: None,
        });
        q.check_positivity()?;
        Ok(q)
    }

    pub fn to_json(&self) -> MapJson {
        MapJson {
            m: self.m,
            codomain: self.codomain.to_ref(),
            phi: self
                .slices
                .iter()
                .map(|s| (0..s.nrows()).map(|i| s.row(i).iter().copied().collect()).collect())
                .collect(),
            meta: self.meta.clone(),
        }
    }

    pub fn from_json(json: &MapJson) -> Result<Self> {
        let slices = json
            .phi
            .iter()
            .map(|rows| {
                if rows.len() != json.m || rows.iter().any(|r| r.len() != json.m) {
                    return Err(Error::DimensionMismatch { expected: json.m, found: rows.len() });
                }
                Ok(DMatrix::from_fn(json.m, json.m, |i, j| rows[i][j]))
            })
            .collect::<Result<Vec<_>>>()?;
        let mut q = Self::from_phi_tensor(slices, json.codomain.resolve()?)?;
        q.meta = json.meta.clone();
        Ok(q)
    }
}

/// Serialized quadratic map.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MapJson {
    pub m: usize,
    pub codomain: CodomainRef,
    pub phi: Vec<Vec<Vec<f64>>>,
    #[serde(default)]
    pub meta: MapMeta,
}

/// `T_x` for a standard-map domain point, as lower triangular coordinates.
///
/// `x` lists, for each `i ∈ I(ε)` in increasing order, `x_ii` followed by the
/// coefficients of `X_li` for `l > i`. Columns outside `I(ε)` are zero.
pub fn standard_triangular(cone: &ConeRealization, epsilon: &[u8], x: &DVector<f64>) -> Result<DVector<f64>> {
    let expected: usize = (0..cone.rank()).filter(|&i| epsilon[i] != 0).map(|i| cone.basic_dim(i)).sum();
    if x.len() != expected {
        return Err(Error::DimensionMismatch { expected, found: x.len() });
    }
    let mut t = DVector::zeros(cone.dim());
    let mut pos = 0;
    for i in 0..cone.rank() {
        if epsilon[i] == 0 {
            continue;
        }
        t[i] = x[pos];
        pos += 1;
        for l in i + 1..cone.rank() {
            let s = cone.slot(l, i);
            for a in 0..s.len {
                t[s.offset + a] = x[pos];
                pos += 1;
            }
        }
    }
    Ok(t)
}
