use nalgebra::{DMatrix, DVector};

use super::law::WishartLaw;
use crate::error::{Error, Result};

/// Largest order evaluated by the exact permutation sum.
pub const N_MAX: usize = 8;

impl WishartLaw {
    /// `A_i(η) = φ_i(−θ)⁻¹ φ_i(η)` for every component.
    fn a_matrices(&self, eta: &DVector<f64>) -> Vec<DMatrix<f64>> {
        self.components().iter().map(|c| &c.sigma * c.map.phi(eta)).collect()
    }

    fn check_dim(&self, eta: &DVector<f64>) -> Result<()> {
        if eta.len() != self.dim() {
            return Err(Error::DimensionMismatch { expected: self.dim(), found: eta.len() });
        }
        Ok(())
    }

    /// `E⟨Y, η⟩ = Σ s_i tr A_i(η) / 2`.
    pub fn mean_form(&self, eta: &DVector<f64>) -> Result<f64> {
        self.check_dim(eta)?;
        Ok(self
            .components()
            .iter()
            .zip(self.a_matrices(eta))
            .map(|(c, a)| c.weight * a.trace() / 2.0)
            .sum())
    }

    /// `E Y` in codomain coordinates.
    pub fn mean_element(&self) -> DVector<f64> {
        let w = self.codomain().weights();
        DVector::from_fn(self.dim(), |j, _| {
            let mut e = DVector::zeros(self.dim());
            e[j] = 1.0;
            self.mean_form(&e).expect("dimensions agree") / w[j]
        })
    }

    /// `Cov(⟨Y, η⟩, ⟨Y, η'⟩) = Σ s_i tr(A_i(η) A_i(η')) / 2`.
    pub fn covariance_form(&self, eta: &DVector<f64>, eta2: &DVector<f64>) -> Result<f64> {
        self.check_dim(eta)?;
        self.check_dim(eta2)?;
        Ok(self
            .components()
            .iter()
            .zip(self.a_matrices(eta).iter().zip(self.a_matrices(eta2)))
            .map(|(c, (a, b))| c.weight * (a * b).trace() / 2.0)
            .sum())
    }

    /// `E Π_j ⟨Y, η_j⟩` by the cycle expansion over `S_N`.
    ///
    /// Orders above [`N_MAX`] are accepted only when all `η_j` coincide.
    pub fn moment(&self, etas: &[DVector<f64>]) -> Result<f64> {
        for eta in etas {
            self.check_dim(eta)?;
        }
        let n = etas.len();
        if n > N_MAX {
            if etas.iter().all(|e| e == &etas[0]) {
                return self.univariate_moment(&etas[0], n);
            }
            return Err(Error::OrderTooLarge { order: n, max: N_MAX });
        }
        if n == 0 {
            return Ok(1.0);
        }
        let a: Vec<Vec<DMatrix<f64>>> = etas.iter().map(|e| self.a_matrices(e)).collect();
        let weights = self.weights();
        let mut memo = vec![None; 1 << n];
        memo[0] = Some(1.0);
        Ok(cycle_sum(&a, &weights, (1usize << n) - 1, &mut memo))
    }

    /// `E⟨Y, η⟩^N` by the composition formula with cycle-power traces.
    pub fn univariate_moment(&self, eta: &DVector<f64>, order: usize) -> Result<f64> {
        self.check_dim(eta)?;
        if order == 0 {
            return Ok(1.0);
        }
        let a = self.a_matrices(eta);
        // c_k = ½ Σ_i s_i tr(A_i^k)
        let mut c = vec![0.0; order + 1];
        for (comp, ai) in self.components().iter().zip(&a) {
            let mut power = ai.clone();
            for ck in c.iter_mut().skip(1) {
                *ck += comp.weight * power.trace() / 2.0;
                power = &power * ai;
            }
        }
        // f[l][n]: sum over compositions of n into l parts of Π c_k / k
        let mut f = vec![vec![0.0; order + 1]; order + 1];
        f[0][0] = 1.0;
        for l in 1..=order {
            for n in l..=order {
                f[l][n] = (1..=n - (l - 1)).map(|k| f[l - 1][n - k] * c[k] / k as f64).sum();
            }
        }
        let mut total = 0.0;
        let mut l_fact = 1.0;
        for (l, row) in f.iter().enumerate().skip(1) {
            l_fact *= l as f64;
            total += row[order] / l_fact;
        }
        let n_fact: f64 = (1..=order).map(|k| k as f64).product();
        Ok(n_fact * total)
    }
}

/// `F(S) = Σ_{cycles c ∋ min S} ½ T(c) F(S ∖ c)` with `T(c) = Σ_i s_i tr Π_{j∈c} A_i(η_j)`.
fn cycle_sum(a: &[Vec<DMatrix<f64>>], weights: &[f64], set: usize, memo: &mut [Option<f64>]) -> f64 {
    if let Some(v) = memo[set] {
        return v;
    }
    let first = set.trailing_zeros() as usize;
    let mut total = 0.0;
    let mut stack: Vec<(usize, Vec<DMatrix<f64>>)> = vec![(1 << first, a[first].clone())];
    while let Some((used, prod)) = stack.pop() {
        let trace: f64 = prod.iter().zip(weights).map(|(p, s)| s * p.trace()).sum();
        total += 0.5 * trace * cycle_sum(a, weights, set & !used, memo);
        let mut rest = set & !used;
        while rest != 0 {
            let j = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            let next = prod.iter().zip(&a[j]).map(|(p, aj)| p * aj).collect();
            stack.push((used | (1 << j), next));
        }
    }
    memo[set] = Some(total);
    total
}
