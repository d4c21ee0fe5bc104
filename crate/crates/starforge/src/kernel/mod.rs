//! Exact scalars, truncated series rings and linear spaces.

pub mod bipoly;
pub mod germ;
pub mod linspace;
pub mod scalar;
pub mod series;
pub mod wire;

pub use bipoly::BiPoly;
pub use germ::{DeformGerm, MultiGerm};
pub use linspace::{kernel, solve, LinearSpace};
pub use scalar::{frac, int, Scalar};
pub use series::TruncSeries;
