//! Grids, extended-real grid functions, discrete conjugates and envelopes.

pub mod envelope;
pub mod extgrid;
pub mod grid;
pub mod grid2;
pub mod legendre;
pub mod primal;
pub mod pwaffine;

pub use envelope::{convex_envelope, convexity_defect, lower_hull};
pub use extgrid::{ExtGridFn, POS_INF};
pub use grid::Grid1D;
pub use legendre::{conjugate_of_samples, legendre, legendre_brute, legendre_inv};
pub use primal::{PrimalFunction, SlopeData, TOL_CONVEX};
pub use pwaffine::{difference_extrema, PwAffine};
