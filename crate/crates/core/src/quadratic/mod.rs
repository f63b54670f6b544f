//! Ω-positive quadratic maps, their φ-tensors, and virtual sums.

mod codomain;
mod map;
mod virtual_map;

pub use codomain::{Codomain, CodomainRef, GenericCone, PROBE_COUNT};
pub use map::{standard_triangular, MapJson, MapMeta, QuadraticMap};
pub use virtual_map::VirtualQuadraticMap;

#[cfg(test)]
mod tests;
