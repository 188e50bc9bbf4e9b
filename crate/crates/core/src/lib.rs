//! Weak geodesic rays, Aubin-Mabuchi energy and envelopes in the torus-invariant model.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod convex;
pub mod error;
pub mod geodesics;
pub mod rays;
pub mod report;
pub mod rwn;
pub mod scenario;
pub mod energy;
pub mod envelopes;
pub mod toric;
pub mod verify;

pub use error::{Error, Result};
