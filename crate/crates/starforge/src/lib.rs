//! Exact finite models of oblate n-stars and fragmented deformations.
//!
//! Everything is computed over the rationals: a star is presented by the
//! image of its local ring in a product of truncated series rings, and every
//! invariant (spectrum, unit constants, λ, ideals, fibers) comes out of exact
//! linear algebra on that image.

pub mod error;
pub mod kernel;

pub use error::{Error, Result};
pub mod build;
pub mod cli;
pub mod compare;
pub mod deform;
pub mod invariants;
pub mod io;
pub(crate) mod model;
pub mod star;

pub use invariants::{Check, SpectrumMatrix, UnitConstantTable, ValidationReport};
pub use kernel::{BiPoly, LinearSpace, MultiGerm, Scalar, TruncSeries};
pub use star::StarPresentation;
