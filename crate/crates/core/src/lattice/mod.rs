//! Seeds in a lattice `N` with a map `ψ: N → Z²`: mutation, cyclic orderings,
//! the bilinear form on `Ker ψ`, q-Painlevé detection, T-polygons and roots.

mod angle;
mod form;
mod polygon;
mod roots;
mod seed;

pub use angle::{angle_cmp, cyclic_order, det2, is_cyclically_ordered, CyclicSeed};
pub use form::{
    delta_class, intersection_form, is_q_painleve, kernel_basis, kernel_gram, Certificate, Delta,
    KernelBasis, QPainleve,
};
pub use polygon::{
    canonical_polygon, canonical_polygon_with_transform, predicted_edges, t_polygon, EdgeData, Polygon,
};
pub(crate) use polygon::{apply as apply2, inv_sl2, mul2};
pub use roots::{find_roots, swap_parallel, Root};
pub use seed::{Ambient, Seed, Sign};

use thiserror::Error;

/// A point or vector of the plane `Z²`.
pub type V2<T> = [T; 2];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LatticeError {
    #[error("index {index} out of range 1..={n}")]
    Index { index: usize, n: usize },
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("ψ must have rank 2")]
    PsiRank,
    #[error("basis is not unimodular (det = {0})")]
    NotUnimodular(String),
    #[error("ψ(e_{0}) is zero or not primitive")]
    NotPrimitive(usize),
    #[error("vector is not in Ker ψ")]
    NotInKernel,
    #[error("not a valid cyclic ordering")]
    NotCyclic,
    #[error("seed is not of q-Painlevé type")]
    NotQPainleve,
    #[error("radical has rank {0}; expected 1")]
    RadicalRank(usize),
    #[error("no strictly positive radical vector")]
    NoPositiveRadical,
    #[error("half-plane intersection is not a lattice polygon: {0}")]
    NotLatticePolygon(String),
    #[error("invalid polygon: {0}")]
    InvalidPolygon(String),
    #[error("ψ(e_{0}) and ψ(e_{1}) are not equal")]
    NotParallel(usize, usize),
}

pub(crate) fn check_index(j: usize, n: usize) -> Result<usize, LatticeError> {
    if j == 0 || j > n {
        Err(LatticeError::Index { index: j, n })
    } else {
        Ok(j - 1)
    }
}
