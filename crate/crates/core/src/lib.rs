//! Exact computations around seeds of lattices with a map to the plane, their
//! T-polygons, the Grothendieck lattices of del Pezzo surfaces, and helices of
//! exceptional collections at the level of classes.
//!
//! All arithmetic is exact. The modules are generic over an integer [`Scalar`];
//! the aliases at the crate root fix it to `i64`.

pub mod connector;
pub mod corpus;
pub mod delpezzo;
pub mod helix;
pub mod lattice;
pub mod matrix;
pub mod scalar;
pub mod toric;

pub use scalar::{Scalar, Q};

/// The default integer type.
pub type Int = i64;

pub type Matrix = matrix::Matrix<Int>;
pub type Ambient = lattice::Ambient<Int>;
pub type Seed = lattice::Seed<Int>;
pub type CyclicSeed = lattice::CyclicSeed<Int>;
pub type Polygon = lattice::Polygon<Int>;
pub type Root = lattice::Root<Int>;
pub type KClass = delpezzo::KClass<Int>;
pub type WeylGroup = delpezzo::WeylGroup<Int>;
pub type WeylElement = delpezzo::WeylElement<Int>;
pub type OrthogonalElement = delpezzo::OrthogonalElement<Int>;
pub type Collection = helix::Collection<Int>;
pub type Trace = helix::Trace<Int>;
pub type Step = helix::Step<Int>;
pub type Fan = toric::Fan<Int>;

pub use delpezzo::Surface;
pub use lattice::Sign;
