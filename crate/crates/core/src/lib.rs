//! Numerical slice-hyperholomorphic functional calculus for commuting tuples
//! of real matrices, over real Clifford algebras of odd dimension and over the
//! quaternions.

pub mod algebra;
pub mod calculus;
pub mod contour;
pub mod error;
pub mod exact;
pub mod fixtures;
pub mod funcspec;
pub mod identities;
pub mod linalg;
pub mod operator;
pub mod projectors;
pub mod report;
pub mod slice;
pub mod spectrum;

pub use algebra::{
    embed_in_plane, mv_product, paravector_conjugate, paravector_inverse, sphere_of, Algebra,
    ImaginaryUnit, Multivector, Paravector, SpectralSphere,
};
pub use contour::{Circle, Contour, Node, Orientation};
pub use error::{Error, Result};
pub use operator::{ModuleRep, OperatorTuple, Resolvent};
pub use slice::{KernelForm, Side, SliceFunction};
pub use spectrum::{FSpectrum, SphereEntry};

pub use nalgebra;
