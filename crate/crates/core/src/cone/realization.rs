//! The matrix realization `Z_V`, its cone `P_V`, the triangular group and the dual cone.

use std::ops::Range;
use std::sync::Arc;

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_distr::{Distribution, Normal, StandardNormal};

use super::vsystem::{AxiomCheck, VSystem};
use crate::error::{Error, Result};
use crate::linalg::{eig_range, frob, PD_REL_TOL};

/// Relative residual allowed when re-expressing a matrix in structured coordinates.
pub const PROJECTION_TOL: f64 = 1e-9;

/// Coordinate slot of an off-diagonal block `(l, k)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlockSlot {
    pub l: usize,
    pub k: usize,
    pub offset: usize,
    pub len: usize,
}

impl BlockSlot {
    pub fn range(&self) -> Range<usize> {
        self.offset..self.offset + self.len
    }
}

/// A homogeneous cone `P_V = Z_V ∩ Π_N` built from a validated V-system.
///
/// Structured coordinates list the diagonal scalars `y_11, …, y_rr` first, then the
/// coefficients of each block `Y_lk` in its basis, blocks ordered by `(l, k)`
/// lexicographically. The same layout is used for dual elements and for the
/// triangular group (where the first `r` entries are the `t_kk`).
#[derive(Debug)]
pub struct ConeRealization {
    name: String,
    vsys: VSystem,
    offsets: Vec<usize>,
    n_total: usize,
    slots: Vec<BlockSlot>,
    slot_of: Vec<Vec<usize>>,
    dim: usize,
    m_vectors: Vec<Vec<usize>>,
    d_vector: Vec<f64>,
    names: Vec<String>,
    weights: DVector<f64>,
    basic_slices: Vec<Vec<DMatrix<f64>>>,
}

impl ConeRealization {
    /// Validates the axioms and precomputes the multiplier data.
    pub fn new(vsys: VSystem) -> Result<Arc<Self>> {
        Self::named("custom", vsys)
    }

    pub fn named(name: impl Into<String>, vsys: VSystem) -> Result<Arc<Self>> {
        vsys.validate()?;
        let n = vsys.partition().to_vec();
        let r = n.len();
        let mut offsets = Vec::with_capacity(r);
        let mut acc = 0;
        for &nk in &n {
            offsets.push(acc);
            acc += nk;
        }

        let mut slots = Vec::new();
        let mut slot_of = vec![vec![usize::MAX; r]; r];
        let mut offset = r;
        for l in 0..r {
            for k in 0..l {
                let len = vsys.dim(l, k);
                slot_of[l][k] = slots.len();
                slots.push(BlockSlot { l, k, offset, len });
                offset += len;
            }
        }
        let dim = offset;

        let mut names: Vec<String> = (0..r).map(|k| format!("y{}{}", k + 1, k + 1)).collect();
        for s in &slots {
            for a in 0..s.len {
                if s.len == 1 {
                    names.push(format!("y{}{}", s.l + 1, s.k + 1));
                } else {
                    names.push(format!("y{}{}_{}", s.l + 1, s.k + 1, a + 1));
                }
            }
        }
        let mut weights = DVector::from_element(dim, 2.0);
        weights.rows_mut(0, r).fill(1.0);

        let m_vectors = (0..r)
            .map(|i| {
                (0..r)
                    .map(|k| match k.cmp(&i) {
                        std::cmp::Ordering::Less => 0,
                        std::cmp::Ordering::Equal => 1,
                        std::cmp::Ordering::Greater => vsys.dim(k, i),
                    })
                    .collect()
            })
            .collect();
        let d_vector = (0..r)
            .map(|k| {
                let below: usize = (k + 1..r).map(|l| vsys.dim(l, k)).sum();
                let left: usize = (0..k).map(|i| vsys.dim(k, i)).sum();
                1.0 + (below + left) as f64 / 2.0
            })
            .collect();

        let mut cone = Self {
            name: name.into(),
            vsys,
            offsets,
            n_total: acc,
            slots,
            slot_of,
            dim,
            m_vectors,
            d_vector,
            names,
            weights,
            basic_slices: Vec::new(),
        };
        cone.basic_slices = (0..r).map(|i| cone.compute_basic_slices(i)).collect();
        Ok(Arc::new(cone))
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn vsystem(&self) -> &VSystem {
        &self.vsys
    }

    pub fn axiom_report(&self) -> Vec<AxiomCheck> {
        self.vsys.axiom_report()
    }

    pub fn rank(&self) -> usize {
        self.vsys.rank()
    }

    pub fn partition(&self) -> &[usize] {
        self.vsys.partition()
    }

    /// Ambient matrix size `N = Σ n_k`.
    pub fn ambient_size(&self) -> usize {
        self.n_total
    }

    /// `dim Z_V = r + Σ n_lk`.
    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn n_lk(&self, l: usize, k: usize) -> usize {
        self.vsys.dim(l, k)
    }

    pub fn slots(&self) -> &[BlockSlot] {
        &self.slots
    }

    pub fn slot(&self, l: usize, k: usize) -> &BlockSlot {
        &self.slots[self.slot_of[l][k]]
    }

    pub fn coordinate_names(&self) -> &[String] {
        &self.names
    }

    /// Diagonal weights `W` with `⟨y, η⟩ = Σ_j W_j y_j η_j`.
    pub fn coupling_weights(&self) -> &DVector<f64> {
        &self.weights
    }

    /// `m(i) = (0, …, 0, 1, n_{i+1,i}, …, n_{ri})`.
    pub fn m_vector(&self, i: usize) -> &[usize] {
        &self.m_vectors[i]
    }

    /// Upper-unitriangular matrix whose rows are the `m(i)`.
    pub fn exponent_matrix(&self) -> DMatrix<f64> {
        let r = self.rank();
        DMatrix::from_fn(r, r, |i, k| self.m_vectors[i][k] as f64)
    }

    pub fn d_vector(&self) -> &[f64] {
        &self.d_vector
    }

    /// `p_k(ε) = Σ_{i<k} ε_i n_ki`.
    pub fn p_vector(&self, epsilon: &[u8]) -> Vec<f64> {
        (0..self.rank())
            .map(|k| {
                (0..k)
                    .filter(|&i| epsilon[i] != 0)
                    .map(|i| self.vsys.dim(k, i) as f64)
                    .sum::<f64>()
                    + 0.0
            })
            .collect()
    }

    /// `p(1, …, 1)`.
    pub fn p_full(&self) -> Vec<f64> {
        self.p_vector(&vec![1; self.rank()])
    }

    /// Dimension of the basic domain `W^i`, i.e. `1 + Σ_{l>i} n_li`.
    pub fn basic_dim(&self, i: usize) -> usize {
        self.m_vectors[i].iter().sum()
    }

    pub fn identity_coords(&self) -> DVector<f64> {
        let mut v = DVector::zeros(self.dim);
        v.rows_mut(0, self.rank()).fill(1.0);
        v
    }

    fn block_rows(&self, k: usize) -> (usize, usize) {
        (self.offsets[k], self.partition()[k])
    }

    fn check_len(&self, v: &DVector<f64>) -> Result<()> {
        if v.len() != self.dim {
            return Err(Error::DimensionMismatch { expected: self.dim, found: v.len() });
        }
        Ok(())
    }

    fn write_blocks(&self, coords: &DVector<f64>, symmetric: bool, off_scale: bool) -> DMatrix<f64> {
        let n = self.partition();
        let mut m = DMatrix::zeros(self.n_total, self.n_total);
        for k in 0..self.rank() {
            let (o, nk) = self.block_rows(k);
            let d = if off_scale { coords[k] / nk as f64 } else { coords[k] };
            for t in 0..nk {
                m[(o + t, o + t)] = d;
            }
        }
        for s in &self.slots {
            if s.len == 0 {
                continue;
            }
            let c: Vec<f64> = coords.rows(s.offset, s.len).iter().copied().collect();
            let mut blk = self.vsys.combine(s.l, s.k, &c);
            if off_scale {
                blk /= n[s.l] as f64;
            }
            let (ol, nl) = self.block_rows(s.l);
            let (ok, nk) = self.block_rows(s.k);
            m.view_mut((ol, ok), (nl, nk)).copy_from(&blk);
            if symmetric {
                m.view_mut((ok, ol), (nk, nl)).copy_from(&blk.transpose());
            }
        }
        m
    }

    /// Symmetric `N × N` matrix of a point of `Z_V`.
    pub fn to_matrix(&self, coords: &DVector<f64>) -> DMatrix<f64> {
        self.write_blocks(coords, true, false)
    }

    /// Lower-triangular `N × N` matrix of a triangular-group element.
    pub fn lower_matrix(&self, coords: &DVector<f64>) -> DMatrix<f64> {
        self.write_blocks(coords, false, false)
    }

    /// Trace representative `η̂ ∈ Z_V` with `tr(y η̂) = ⟨y, η⟩`.
    pub fn dual_matrix(&self, eta: &DVector<f64>) -> DMatrix<f64> {
        self.write_blocks(eta, true, true)
    }

    /// Reads structured coordinates from the diagonal and lower blocks without checking.
    pub fn coords_of_matrix(&self, m: &DMatrix<f64>) -> DVector<f64> {
        let mut v = DVector::zeros(self.dim);
        for k in 0..self.rank() {
            let (o, nk) = self.block_rows(k);
            v[k] = m.view((o, o), (nk, nk)).trace() / nk as f64;
        }
        for s in &self.slots {
            if s.len == 0 {
                continue;
            }
            let (ol, nl) = self.block_rows(s.l);
            let (ok, nk) = self.block_rows(s.k);
            let blk = m.view((ol, ok), (nl, nk)).clone_owned();
            for (a, c) in self.vsys.coefficients(s.l, s.k, &blk).into_iter().enumerate() {
                v[s.offset + a] = c;
            }
        }
        v
    }

    fn leak_check(&self, m: &DMatrix<f64>, rebuilt: &DMatrix<f64>, lower_only: bool) -> Result<()> {
        let scale = m.norm().max(1.0);
        let r = self.rank();
        let mut worst = (0.0, 0, 0);
        for l in 0..r {
            let hi = if lower_only { l + 1 } else { r };
            for k in 0..hi {
                let (ol, nl) = self.block_rows(l);
                let (ok, nk) = self.block_rows(k);
                let diff = (m.view((ol, ok), (nl, nk)) - rebuilt.view((ol, ok), (nl, nk))).norm();
                if diff > worst.0 {
                    worst = (diff, l.max(k), l.min(k));
                }
            }
        }
        if worst.0 / scale > PROJECTION_TOL {
            return Err(Error::StructureLeak { l: worst.1, k: worst.2, residual: worst.0 / scale });
        }
        Ok(())
    }

    /// Structured coordinates of a symmetric matrix that must lie in `Z_V`.
    pub fn from_matrix(&self, m: &DMatrix<f64>) -> Result<DVector<f64>> {
        if m.shape() != (self.n_total, self.n_total) {
            return Err(Error::DimensionMismatch { expected: self.n_total, found: m.nrows() });
        }
        let v = self.coords_of_matrix(m);
        self.leak_check(m, &self.to_matrix(&v), false)?;
        Ok(v)
    }

    /// `π(S)`: the dual coordinates with `⟨y, π(S)⟩ = tr(yS)` for all `y ∈ Z_V`.
    pub fn project_dual(&self, s: &DMatrix<f64>) -> DVector<f64> {
        let mut v = DVector::zeros(self.dim);
        for k in 0..self.rank() {
            let (o, nk) = self.block_rows(k);
            v[k] = s.view((o, o), (nk, nk)).trace();
        }
        for sl in &self.slots {
            let (ol, nl) = self.block_rows(sl.l);
            let (ok, nk) = self.block_rows(sl.k);
            let blk = s.view((ol, ok), (nl, nk)).clone_owned();
            let blk_t = s.view((ok, ol), (nk, nl)).transpose();
            for (a, b) in self.vsys.basis(sl.l, sl.k).iter().enumerate() {
                v[sl.offset + a] = 0.5 * (frob(b, &blk) + frob(b, &blk_t));
            }
        }
        v
    }

    pub fn coupling(&self, y: &DVector<f64>, eta: &DVector<f64>) -> f64 {
        y.iter().zip(eta.iter()).zip(self.weights.iter()).map(|((a, b), w)| a * b * w).sum()
    }

    /// `ρ(T)y = T y Tᵀ`.
    pub fn rho(&self, t: &DVector<f64>, y: &DVector<f64>) -> Result<DVector<f64>> {
        self.check_len(t)?;
        self.check_len(y)?;
        let tm = self.lower_matrix(t);
        let m = &tm * self.to_matrix(y) * tm.transpose();
        self.from_matrix(&m)
    }

    /// `ρ*(T)η = π(Tᵀ η̂ T)`, the coupling adjoint of `ρ(T)`.
    pub fn rho_star(&self, t: &DVector<f64>, eta: &DVector<f64>) -> Result<DVector<f64>> {
        self.check_len(t)?;
        self.check_len(eta)?;
        let tm = self.lower_matrix(t);
        Ok(self.project_dual(&(tm.transpose() * self.dual_matrix(eta) * tm)))
    }

    /// Coordinate matrix of `y ↦ M y Mᵀ`, failing if the congruence leaves `Z_V`.
    pub fn congruence_matrix(&self, m: &DMatrix<f64>) -> Result<DMatrix<f64>> {
        if m.shape() != (self.n_total, self.n_total) {
            return Err(Error::DimensionMismatch { expected: self.n_total, found: m.nrows() });
        }
        let mut g = DMatrix::zeros(self.dim, self.dim);
        for j in 0..self.dim {
            let mut e = DVector::zeros(self.dim);
            e[j] = 1.0;
            let img = m * self.to_matrix(&e) * m.transpose();
            g.set_column(j, &self.from_matrix(&img)?);
        }
        Ok(g)
    }

    /// Coordinate matrix of `ρ(T)`.
    pub fn rho_matrix(&self, t: &DVector<f64>) -> Result<DMatrix<f64>> {
        self.check_len(t)?;
        self.congruence_matrix(&self.lower_matrix(t))
    }

    /// Coupling adjoint `g* = W⁻¹ gᵀ W` of a coordinate matrix.
    pub fn adjoint(&self, g: &DMatrix<f64>) -> DMatrix<f64> {
        adjoint_with(&self.weights, g)
    }

    /// Scale-free interior test for `P_V`, returning the eigenvalue ratio on failure.
    pub fn interior_ratio(&self, y: &DVector<f64>) -> f64 {
        let (min, max) = eig_range(&self.to_matrix(y));
        if max <= 0.0 {
            f64::NEG_INFINITY
        } else {
            min / max
        }
    }

    pub fn is_interior(&self, y: &DVector<f64>) -> bool {
        self.dim == y.len() && self.interior_ratio(y) > PD_REL_TOL
    }

    /// The unique `T ∈ H_V` with `y = T Tᵀ`, in triangular coordinates.
    pub fn structured_cholesky(&self, y: &DVector<f64>) -> Result<DVector<f64>> {
        self.check_len(y)?;
        let ratio = self.interior_ratio(y);
        if !(ratio > PD_REL_TOL) {
            return Err(Error::NotInCone { ratio });
        }
        let m = self.to_matrix(y);
        let chol = m.clone().cholesky().ok_or(Error::NotInCone { ratio })?;
        let l = chol.l();
        let t = self.coords_of_matrix(&l);
        self.leak_check(&l, &self.lower_matrix(&t), true)?;
        Ok(t)
    }

    /// `ρ*(T) I_N`, a point of the open dual cone.
    pub fn dual_orbit_point(&self, t: &DVector<f64>) -> Result<DVector<f64>> {
        self.rho_star(t, &self.identity_coords())
    }

    /// Inverse of [`ConeRealization::dual_orbit_point`] by exact back-substitution.
    ///
    /// Columns are solved from the last to the first; within column `k` the blocks
    /// are solved from the bottom up. Fails when `η` is outside the open dual cone.
    pub fn dual_triangular(&self, eta: &DVector<f64>) -> Result<DVector<f64>> {
        self.check_len(eta)?;
        let r = self.rank();
        let n = self.partition();
        let mut diag = vec![0.0; r];
        let mut tb: Vec<Vec<DMatrix<f64>>> = (0..r)
            .map(|l| (0..r).map(|k| DMatrix::zeros(n[l], n[k])).collect())
            .collect();
        let mut out = DVector::zeros(self.dim);
        for k in (0..r).rev() {
            for l in (k + 1..r).rev() {
                let s = self.slot(l, k).clone();
                if s.len == 0 {
                    continue;
                }
                let mut coeffs = vec![0.0; s.len];
                for (a, b) in self.vsys.basis(l, k).iter().enumerate() {
                    let mut acc = 0.0;
                    for j in l + 1..r {
                        acc += frob(b, &(tb[j][l].transpose() * &tb[j][k])) / n[j] as f64;
                    }
                    coeffs[a] = (eta[s.offset + a] - acc) / diag[l];
                    out[s.offset + a] = coeffs[a];
                }
                tb[l][k] = self.vsys.combine(l, k, &coeffs);
            }
            let tail: f64 = (k + 1..r).map(|j| frob(&tb[j][k], &tb[j][k]) / n[j] as f64).sum();
            let sq = eta[k] - tail;
            if !(sq > 0.0) || !sq.is_finite() {
                return Err(Error::NotInDualCone);
            }
            diag[k] = sq.sqrt();
            out[k] = diag[k];
        }
        Ok(out)
    }

    fn basic_domain_basis(&self, i: usize) -> Vec<DMatrix<f64>> {
        let n = self.partition();
        let mut basis = Vec::with_capacity(self.basic_dim(i));
        let mut w0 = DMatrix::zeros(self.n_total, n[i]);
        let (oi, _) = self.block_rows(i);
        for t in 0..n[i] {
            w0[(oi + t, t)] = 1.0;
        }
        basis.push(w0);
        for l in i + 1..self.rank() {
            let (ol, nl) = self.block_rows(l);
            for b in self.vsys.basis(l, i) {
                let mut w = DMatrix::zeros(self.n_total, n[i]);
                w.view_mut((ol, 0), (nl, n[i])).copy_from(b);
                basis.push(w);
            }
        }
        basis
    }

    fn compute_basic_slices(&self, i: usize) -> Vec<DMatrix<f64>> {
        let w = self.basic_domain_basis(i);
        let m = w.len();
        (0..self.dim)
            .map(|j| {
                let mut e = DVector::zeros(self.dim);
                e[j] = 1.0;
                let hat = self.dual_matrix(&e);
                let mut s = DMatrix::zeros(m, m);
                for p in 0..m {
                    let hw = &hat * &w[p];
                    for q in p..m {
                        let v = frob(&w[q], &hw);
                        s[(p, q)] = v;
                        s[(q, p)] = v;
                    }
                }
                s
            })
            .collect()
    }

    /// Basis of the basic domain `W^i` as `N × n_i` matrices.
    pub fn basic_basis(&self, i: usize) -> Vec<DMatrix<f64>> {
        self.basic_domain_basis(i)
    }

    /// Slices of `φ^i` against the dual coordinate basis.
    pub fn basic_slices(&self, i: usize) -> &[DMatrix<f64>] {
        &self.basic_slices[i]
    }

    /// `φ^i(η)` with entries `tr(w_pᵀ η̂ w_q)`.
    pub fn basic_phi(&self, i: usize, eta: &DVector<f64>) -> DMatrix<f64> {
        contract(&self.basic_slices[i], eta)
    }

    /// `η ∈ P_V*` iff `det φ^i(η) > 0` for every `i`.
    pub fn dual_membership(&self, eta: &DVector<f64>) -> bool {
        eta.len() == self.dim
            && (0..self.rank()).all(|i| self.basic_phi(i, eta).determinant() > 0.0)
    }

    /// `χ_σ(T) = Π t_kk^{2σ_k}`.
    pub fn chi(&self, sigma: &[f64], t: &DVector<f64>) -> f64 {
        self.log_chi(sigma, t).exp()
    }

    pub fn log_chi(&self, sigma: &[f64], t: &DVector<f64>) -> f64 {
        sigma.iter().enumerate().map(|(k, s)| 2.0 * s * t[k].ln()).sum()
    }

    /// Solves `Σ a_i m(i) = target` (forward substitution).
    pub fn basic_exponents(&self, target: &[f64]) -> Vec<f64> {
        let r = self.rank();
        let mut a = vec![0.0; r];
        for k in 0..r {
            let acc: f64 = (0..k).map(|i| a[i] * self.m_vectors[i][k] as f64).sum();
            a[k] = target[k] - acc;
        }
        a
    }

    /// `Δ_σ(y) = χ_σ(T)` where `y = T Tᵀ`.
    pub fn delta(&self, sigma: &[f64], y: &DVector<f64>) -> Result<f64> {
        Ok(self.log_delta(sigma, y)?.exp())
    }

    pub fn log_delta(&self, sigma: &[f64], y: &DVector<f64>) -> Result<f64> {
        let t = self.structured_cholesky(y)?;
        Ok(self.log_chi(sigma, &t))
    }

    /// `Δ*_σ(η) = Π det φ^i(η)^{a_i}` with `Σ a_i m(i) = σ*`, so that `Δ*_σ(ρ*(T)I_N) = χ_{σ*}(T)`.
    pub fn delta_star(&self, sigma: &[f64], eta: &DVector<f64>) -> Result<f64> {
        Ok(self.log_delta_star(sigma, eta)?.exp())
    }

    pub fn log_delta_star(&self, sigma: &[f64], eta: &DVector<f64>) -> Result<f64> {
        self.check_len(eta)?;
        let dets: Vec<f64> = (0..self.rank()).map(|i| self.basic_phi(i, eta).determinant()).collect();
        if dets.iter().any(|d| !(*d > 0.0)) {
            return Err(Error::NotInDualCone);
        }
        let reversed: Vec<f64> = sigma.iter().rev().copied().collect();
        let a = self.basic_exponents(&reversed);
        Ok(a.iter().zip(&dets).map(|(a, d)| a * d.ln()).sum())
    }

    /// A random triangular element: `t_kk = exp(N(0, ½²))`, off-diagonal coefficients `N(0, 1)`.
    pub fn random_triangular<R: Rng + ?Sized>(&self, rng: &mut R) -> DVector<f64> {
        let diag = Normal::<f64>::new(0.0, 0.5).expect("valid normal");
        DVector::from_fn(self.dim, |j, _| {
            if j < self.rank() {
                diag.sample(rng).exp()
            } else {
                StandardNormal.sample(rng)
            }
        })
    }

    /// A random interior point `T Tᵀ`.
    pub fn random_interior<R: Rng + ?Sized>(&self, rng: &mut R) -> DVector<f64> {
        let t = self.random_triangular(rng);
        let tm = self.lower_matrix(&t);
        self.coords_of_matrix(&(&tm * tm.transpose()))
    }

    /// A random point of the open dual cone `ρ*(T) I_N`.
    pub fn random_dual<R: Rng + ?Sized>(&self, rng: &mut R) -> DVector<f64> {
        let t = self.random_triangular(rng);
        self.dual_orbit_point(&t).expect("dimensions agree")
    }

    /// Orbit type of a point in the closed cone.
    ///
    /// Runs a semidefinite block Cholesky; a pivot below `tol · scale` (scale = largest
    /// diagonal scalar) marks `ε_k = 0`.
    pub fn orbit_classify(&self, y: &DVector<f64>, tol: f64) -> Result<Vec<u8>> {
        self.check_len(y)?;
        let r = self.rank();
        let n = self.partition();
        let scale = (0..r).map(|k| y[k].abs()).fold(0.0, f64::max);
        let mut eps = vec![0u8; r];
        if scale == 0.0 {
            return Ok(eps);
        }
        let m = self.to_matrix(y);
        let mut lm = DMatrix::<f64>::zeros(self.n_total, self.n_total);
        for k in 0..r {
            let (ok, nk) = self.block_rows(k);
            let mut skk = m.view((ok, ok), (nk, nk)).clone_owned();
            for i in 0..k {
                let (oi, ni) = self.block_rows(i);
                let lki = lm.view((ok, oi), (nk, ni)).clone_owned();
                skk -= &lki * lki.transpose();
            }
            let pivot = skk.trace() / n[k] as f64;
            if pivot < -tol * scale {
                return Err(Error::NotInClosedCone { block: k, pivot });
            }
            if pivot <= tol * scale {
                for l in k + 1..r {
                    let (ol, nl) = self.block_rows(l);
                    let mut slk = m.view((ol, ok), (nl, nk)).clone_owned();
                    for i in 0..k {
                        let (oi, ni) = self.block_rows(i);
                        slk -= lm.view((ol, oi), (nl, ni)) * lm.view((ok, oi), (nk, ni)).transpose();
                    }
                    if slk.norm() > tol.sqrt() * scale {
                        return Err(Error::NotInClosedCone { block: k, pivot });
                    }
                }
                continue;
            }
            eps[k] = 1;
            let t = pivot.sqrt();
            for d in 0..nk {
                lm[(ok + d, ok + d)] = t;
            }
            for l in k + 1..r {
                let (ol, nl) = self.block_rows(l);
                let mut slk = m.view((ol, ok), (nl, nk)).clone_owned();
                for i in 0..k {
                    let (oi, ni) = self.block_rows(i);
                    slk -= lm.view((ol, oi), (nl, ni)) * lm.view((ok, oi), (nk, ni)).transpose();
                }
                lm.view_mut((ol, ok), (nl, nk)).copy_from(&(slk / t));
            }
        }
        Ok(eps)
    }

    /// Structural equality of the underlying V-systems.
    pub fn same_as(&self, other: &ConeRealization) -> bool {
        std::ptr::eq(self, other) || self.vsys == other.vsys
    }
}

/// `Σ_j η_j S_j`.
pub fn contract(slices: &[DMatrix<f64>], eta: &DVector<f64>) -> DMatrix<f64> {
    let m = slices.first().map(|s| s.nrows()).unwrap_or(0);
    let mut out = DMatrix::zeros(m, m);
    for (s, e) in slices.iter().zip(eta.iter()) {
        if *e != 0.0 {
            out += s * *e;
        }
    }
    out
}

/// `W⁻¹ gᵀ W` for diagonal coupling weights `W`.
pub fn adjoint_with(weights: &DVector<f64>, g: &DMatrix<f64>) -> DMatrix<f64> {
    DMatrix::from_fn(g.nrows(), g.ncols(), |i, j| g[(j, i)] * weights[j] / weights[i])
}
