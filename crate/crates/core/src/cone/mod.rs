//! Matrix-realized homogeneous cones.

mod element;
mod presets;
mod realization;
mod vsystem;

pub use element::{ConeElement, TriangularElement};
pub use presets::{load_cone, load_vsystem, preset, BlockSpec, ConeSpec, Preset};
pub use realization::{adjoint_with, contract, BlockSlot, ConeRealization, PROJECTION_TOL};
pub use vsystem::{AxiomCheck, VSystem, AXIOM_TOL};
