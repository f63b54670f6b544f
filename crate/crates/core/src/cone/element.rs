//! Typed points of `Z_V`, its dual, and the triangular group `H_V`.

use std::sync::Arc;

use nalgebra::{DMatrix, DVector};

use super::realization::ConeRealization;
use crate::error::{Error, Result};

fn same(a: &ConeRealization, b: &ConeRealization) -> Result<()> {
    if a.same_as(b) {
        Ok(())
    } else {
        Err(Error::RealizationMismatch)
    }
}

/// A point of `Z_V` (or of its dual space) in structured coordinates.
#[derive(Debug, Clone)]
pub struct ConeElement {
    cone: Arc<ConeRealization>,
    coords: DVector<f64>,
}

impl ConeElement {
    pub fn new(cone: &Arc<ConeRealization>, coords: DVector<f64>) -> Result<Self> {
        if coords.len() != cone.dim() {
            return Err(Error::DimensionMismatch { expected: cone.dim(), found: coords.len() });
        }
        Ok(Self { cone: Arc::clone(cone), coords })
    }

    pub fn from_slice(cone: &Arc<ConeRealization>, coords: &[f64]) -> Result<Self> {
        Self::new(cone, DVector::from_column_slice(coords))
    }

    /// The element with matrix `I_N`.
    pub fn identity(cone: &Arc<ConeRealization>) -> Self {
        Self { cone: Arc::clone(cone), coords: cone.identity_coords() }
    }

    pub fn zero(cone: &Arc<ConeRealization>) -> Self {
        Self { cone: Arc::clone(cone), coords: DVector::zeros(cone.dim()) }
    }

    pub fn from_matrix(cone: &Arc<ConeRealization>, m: &DMatrix<f64>) -> Result<Self> {
        Ok(Self { cone: Arc::clone(cone), coords: cone.from_matrix(m)? })
    }

    pub fn cone(&self) -> &Arc<ConeRealization> {
        &self.cone
    }

    pub fn coords(&self) -> &DVector<f64> {
        &self.coords
    }

    pub fn into_coords(self) -> DVector<f64> {
        self.coords
    }

    pub fn to_matrix(&self) -> DMatrix<f64> {
        self.cone.to_matrix(&self.coords)
    }

    pub fn coupling(&self, eta: &ConeElement) -> Result<f64> {
        same(&self.cone, &eta.cone)?;
        Ok(self.cone.coupling(&self.coords, &eta.coords))
    }

    pub fn is_interior(&self) -> bool {
        self.cone.is_interior(&self.coords)
    }

    pub fn in_dual(&self) -> bool {
        self.cone.dual_membership(&self.coords)
    }

    pub fn structured_cholesky(&self) -> Result<TriangularElement> {
        let t = self.cone.structured_cholesky(&self.coords)?;
        Ok(TriangularElement { cone: Arc::clone(&self.cone), coords: t })
    }

    pub fn delta(&self, sigma: &[f64]) -> Result<f64> {
        self.cone.delta(sigma, &self.coords)
    }

    pub fn delta_star(&self, sigma: &[f64]) -> Result<f64> {
        self.cone.delta_star(sigma, &self.coords)
    }

    /// Triangular element `T` with `ρ*(T) I_N = self`.
    pub fn dual_triangular(&self) -> Result<TriangularElement> {
        let t = self.cone.dual_triangular(&self.coords)?;
        Ok(TriangularElement { cone: Arc::clone(&self.cone), coords: t })
    }
}

/// An element of `H_V`: lower-triangular with diagonal blocks `t_kk I_{n_k}`, `t_kk > 0`.
#[derive(Debug, Clone)]
pub struct TriangularElement {
    cone: Arc<ConeRealization>,
    coords: DVector<f64>,
}

impl TriangularElement {
    /// Coordinates list `t_11, …, t_rr` first, then the block coefficients.
    pub fn new(cone: &Arc<ConeRealization>, coords: DVector<f64>) -> Result<Self> {
        if coords.len() != cone.dim() {
            return Err(Error::DimensionMismatch { expected: cone.dim(), found: coords.len() });
        }
        if let Some(k) = (0..cone.rank()).find(|&k| !(coords[k] > 0.0)) {
            return Err(Error::InvalidTriangular(format!(
                "diagonal entry t_{} = {} is not positive",
                k + 1,
                coords[k]
            )));
        }
        Ok(Self { cone: Arc::clone(cone), coords })
    }

    pub fn from_slice(cone: &Arc<ConeRealization>, coords: &[f64]) -> Result<Self> {
        Self::new(cone, DVector::from_column_slice(coords))
    }

    pub fn identity(cone: &Arc<ConeRealization>) -> Self {
        Self { cone: Arc::clone(cone), coords: cone.identity_coords() }
    }

    pub fn random<R: rand::Rng + ?Sized>(cone: &Arc<ConeRealization>, rng: &mut R) -> Self {
        Self { cone: Arc::clone(cone), coords: cone.random_triangular(rng) }
    }

    pub fn cone(&self) -> &Arc<ConeRealization> {
        &self.cone
    }

    pub fn coords(&self) -> &DVector<f64> {
        &self.coords
    }

    pub fn diag(&self) -> &[f64] {
        &self.coords.as_slice()[..self.cone.rank()]
    }

    pub fn to_matrix(&self) -> DMatrix<f64> {
        self.cone.lower_matrix(&self.coords)
    }

    /// Matrix product `self · other`, which stays in `H_V`.
    pub fn compose(&self, other: &TriangularElement) -> Result<TriangularElement> {
        same(&self.cone, &other.cone)?;
        let m = self.to_matrix() * other.to_matrix();
        Ok(Self { cone: Arc::clone(&self.cone), coords: self.cone.coords_of_matrix(&m) })
    }

    pub fn inverse(&self) -> TriangularElement {
        let inv = self
            .to_matrix()
            .solve_lower_triangular(&DMatrix::identity(self.cone.ambient_size(), self.cone.ambient_size()))
            .expect("positive diagonal");
        Self { cone: Arc::clone(&self.cone), coords: self.cone.coords_of_matrix(&inv) }
    }

    pub fn chi(&self, sigma: &[f64]) -> f64 {
        self.cone.chi(sigma, &self.coords)
    }

    /// `ρ(T)y = T y Tᵀ`.
    pub fn rho(&self, y: &ConeElement) -> Result<ConeElement> {
        same(&self.cone, &y.cone)?;
        Ok(ConeElement { cone: Arc::clone(&self.cone), coords: self.cone.rho(&self.coords, &y.coords)? })
    }

    /// `ρ*(T)η`, adjoint to `ρ(T)` under the coupling.
    pub fn rho_star(&self, eta: &ConeElement) -> Result<ConeElement> {
        same(&self.cone, &eta.cone)?;
        Ok(ConeElement {
            cone: Arc::clone(&self.cone),
            coords: self.cone.rho_star(&self.coords, &eta.coords)?,
        })
    }

    /// `ρ*(T) I_N`.
    pub fn dual_orbit_point(&self) -> ConeElement {
        ConeElement {
            cone: Arc::clone(&self.cone),
            coords: self.cone.dual_orbit_point(&self.coords).expect("dimensions agree"),
        }
    }

    /// Coordinate matrix of `ρ(T)` acting on `Z_V`.
    pub fn rho_matrix(&self) -> DMatrix<f64> {
        self.cone.rho_matrix(&self.coords).expect("H_V preserves Z_V")
    }
}
