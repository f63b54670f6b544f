//! Block subspaces `V_lk ⊂ Mat(n_l, n_k)` and their closure axioms.

use std::collections::BTreeMap;

use nalgebra::DMatrix;

use crate::error::{Axiom, Error, Result};
use crate::linalg::frob;

/// Tolerance for the closure and orthonormality checks.
pub const AXIOM_TOL: f64 = 1e-9;

/// A partition `(n_1, …, n_r)` together with orthonormal bases of the blocks `V_lk`, `l > k`.
///
/// Block indices are 0-based. Absent blocks are the zero subspace.
#[derive(Debug, Clone, PartialEq)]
pub struct VSystem {
    partition: Vec<usize>,
    blocks: BTreeMap<(usize, usize), Vec<DMatrix<f64>>>,
}

/// Outcome of one axiom family on a V-system.
#[derive(Debug, Clone, PartialEq)]
pub struct AxiomCheck {
    pub rule: Axiom,
    pub passed: bool,
    /// Largest relative residual seen, with the block triple where it occurred.
    pub worst_residual: f64,
    pub worst_at: Option<(usize, usize, usize)>,
    pub cases: usize,
}

impl VSystem {
    /// Builds a V-system after shape checks. Axioms are checked by [`VSystem::validate`].
    pub fn new(
        partition: Vec<usize>,
        blocks: BTreeMap<(usize, usize), Vec<DMatrix<f64>>>,
    ) -> Result<Self> {
        if partition.is_empty() {
            return Err(Error::InvalidVSystem("empty partition".into()));
        }
        if let Some(i) = partition.iter().position(|&n| n == 0) {
            return Err(Error::InvalidVSystem(format!("partition entry {i} is zero")));
        }
        let r = partition.len();
        for (&(l, k), basis) in &blocks {
            if l >= r || k >= l {
                return Err(Error::InvalidVSystem(format!(
                    "block ({l}, {k}) is not strictly below the diagonal of rank {r}"
                )));
            }
            for (a, b) in basis.iter().enumerate() {
                if b.shape() != (partition[l], partition[k]) {
                    return Err(Error::InvalidVSystem(format!(
                        "basis element {a} of block ({l}, {k}) has shape {:?}, expected {:?}",
                        b.shape(),
                        (partition[l], partition[k])
                    )));
                }
            }
        }
        let blocks = blocks.into_iter().filter(|(_, b)| !b.is_empty()).collect();
        Ok(Self { partition, blocks })
    }

    pub fn partition(&self) -> &[usize] {
        &self.partition
    }

    pub fn rank(&self) -> usize {
        self.partition.len()
    }

    pub fn basis(&self, l: usize, k: usize) -> &[DMatrix<f64>] {
        self.blocks.get(&(l, k)).map(Vec::as_slice).unwrap_or(&[])
    }

    /// `n_lk = dim V_lk`.
    pub fn dim(&self, l: usize, k: usize) -> usize {
        self.basis(l, k).len()
    }

    /// `(A|B) = tr(ABᵀ)/n_l` on `Mat(n_l, n_k)`.
    pub fn inner(&self, l: usize, a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
        frob(a, b) / self.partition[l] as f64
    }

    /// Orthogonal projection of `m` onto `V_lk`, returned as coefficients.
    pub fn coefficients(&self, l: usize, k: usize, m: &DMatrix<f64>) -> Vec<f64> {
        self.basis(l, k).iter().map(|b| self.inner(l, m, b)).collect()
    }

    pub fn combine(&self, l: usize, k: usize, coeffs: &[f64]) -> DMatrix<f64> {
        let mut out = DMatrix::zeros(self.partition[l], self.partition[k]);
        for (c, b) in coeffs.iter().zip(self.basis(l, k)) {
            out += b * *c;
        }
        out
    }

    /// Relative distance of `m` from `V_lk`.
    pub fn span_residual(&self, l: usize, k: usize, m: &DMatrix<f64>) -> f64 {
        let proj = self.combine(l, k, &self.coefficients(l, k, m));
        (m - proj).norm() / m.norm().max(1.0)
    }

    /// Runs every axiom family and reports each separately.
    pub fn axiom_report(&self) -> Vec<AxiomCheck> {
        let r = self.rank();
        let mut ortho = Tracker::new(Axiom::Orthonormal);
        let mut v1 = Tracker::new(Axiom::V1);
        let mut v2 = Tracker::new(Axiom::V2);
        let mut v3 = Tracker::new(Axiom::V3);

        for (&(l, k), basis) in &self.blocks {
            for (a, ba) in basis.iter().enumerate() {
                for (b, bb) in basis.iter().enumerate().skip(a) {
                    let target = if a == b { 1.0 } else { 0.0 };
                    ortho.record((self.inner(l, ba, bb) - target).abs(), (l, k, a));
                    let s = ba * bb.transpose() + bb * ba.transpose();
                    let scalar = s.trace() / self.partition[l] as f64;
                    let dev = &s - DMatrix::identity(s.nrows(), s.ncols()) * scalar;
                    v3.record(dev.norm() / s.norm().max(1.0), (l, k, a));
                }
            }
        }

        for l in 0..r {
            for k in 0..l {
                for j in 0..k {
                    for a in self.basis(l, k) {
                        for b in self.basis(k, j) {
                            v1.record(self.span_residual(l, j, &(a * b)), (l, k, j));
                        }
                    }
                    for a in self.basis(l, j) {
                        for b in self.basis(k, j) {
                            v2.record(self.span_residual(l, k, &(a * b.transpose())), (l, k, j));
                        }
                    }
                }
            }
        }
        vec![ortho.finish(), v1.finish(), v2.finish(), v3.finish()]
    }

    /// Fails with the first violated axiom family.
    pub fn validate(&self) -> Result<()> {
        for check in self.axiom_report() {
            if !check.passed {
                return Err(Error::AxiomViolation {
                    rule: check.rule,
                    indices: check.worst_at.unwrap_or((0, 0, 0)),
                    residual: check.worst_residual,
                });
            }
        }
        Ok(())
    }
}

struct Tracker {
    rule: Axiom,
    worst: f64,
    at: Option<(usize, usize, usize)>,
    cases: usize,
}

impl Tracker {
    fn new(rule: Axiom) -> Self {
        Self { rule, worst: 0.0, at: None, cases: 0 }
    }

    fn record(&mut self, residual: f64, at: (usize, usize, usize)) {
        self.cases += 1;
        if residual > self.worst || self.at.is_none() {
            self.worst = self.worst.max(residual);
            self.at = Some(at);
        }
    }

    fn finish(self) -> AxiomCheck {
        AxiomCheck {
            rule: self.rule,
            passed: self.worst < AXIOM_TOL,
            worst_residual: self.worst,
            worst_at: self.at,
            cases: self.cases,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(v: &[f64]) -> DMatrix<f64> {
        DMatrix::from_row_slice(1, v.len(), v)
    }

    #[test]
    fn rejects_zero_partition_entry() {
        assert!(VSystem::new(vec![1, 0], BTreeMap::new()).is_err());
    }

    #[test]
    fn rejects_wrong_block_shape() {
        let mut blocks = BTreeMap::new();
        blocks.insert((1, 0), vec![row(&[1.0, 0.0])]);
        assert!(VSystem::new(vec![1, 1], blocks).is_err());
    }

    #[test]
    fn non_scalar_gram_breaks_v3() {
        let mut blocks = BTreeMap::new();
        // 2×2 block with A Aᵀ = diag(1, 0)
        let a = DMatrix::from_row_slice(2, 2, &[2f64.sqrt(), 0.0, 0.0, 0.0]);
        blocks.insert((1, 0), vec![a]);
        let vs = VSystem::new(vec![2, 2], blocks).unwrap();
        match vs.validate() {
            Err(Error::AxiomViolation { rule, .. }) => assert_eq!(rule, Axiom::V3),
            other => panic!("expected V3 violation, got {other:?}"),
        }
    }

    #[test]
    fn missing_product_block_breaks_v1() {
        let mut blocks = BTreeMap::new();
        blocks.insert((1, 0), vec![row(&[1.0])]);
        blocks.insert((2, 1), vec![row(&[1.0])]);
        let vs = VSystem::new(vec![1, 1, 1], blocks).unwrap();
        let report = vs.axiom_report();
        let v1 = report.iter().find(|c| c.rule == Axiom::V1).unwrap();
        assert!(!v1.passed);
        assert_eq!(v1.worst_at, Some((2, 1, 0)));
    }

    #[test]
    fn unnormalized_basis_is_rejected() {
        let mut blocks = BTreeMap::new();
        blocks.insert((1, 0), vec![row(&[2.0])]);
        let vs = VSystem::new(vec![1, 1], blocks).unwrap();
        assert!(matches!(
            vs.validate(),
            Err(Error::AxiomViolation { rule: Axiom::Orthonormal, .. })
        ));
    }
}
