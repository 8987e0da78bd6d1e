//! Radial numerics for a family of borderline variational problems in even
//! dimension `2m`: sharp constants, the Liouville bubble and its derivative
//! ladder, polyharmonic Green functions on balls, capped test functions that
//! cross the compactness threshold, and a maximizer solver for the
//! subcritical functional.
//!
//! Everything radial lives on graded one-dimensional grids; smooth profiles
//! are differentiated through the squared-radius coordinate so that high
//! operator orders stay well conditioned.

pub mod bubble;
pub mod constants;
pub mod error;
pub mod extremal;
pub mod greens;
pub mod numerics;
pub mod testfn;
pub mod verify;

pub use constants::{build_context, DimensionContext, ExactConstant};
pub use error::{Error, Result};
