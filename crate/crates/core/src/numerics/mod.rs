//! Shared numerical infrastructure: graded radial grids, local-polynomial
//! differentiation in the squared-radius coordinate, adaptive quadrature,
//! small dense linear algebra, and decay-rate fitting.

pub mod decay;
pub mod diffops;
pub mod grid;
pub mod linalg;
pub mod quad;

pub use decay::{fit_decay, DecayFit, DecayModel};
pub use diffops::{radial_polyharmonic_at, RadialOperatorTable};
pub use grid::{RadialGrid, RadialProfile};
