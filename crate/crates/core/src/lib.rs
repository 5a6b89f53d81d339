//! Numerical laboratory for sign-changing Laplace operators with transmission
//! conditions on a two-phase disk.

pub mod acceptance;
pub mod analysis;
pub mod eigensolve;
pub mod error;
pub mod exec;
pub mod fem;
pub mod geometry;
pub mod interface;
pub mod numerics;
pub mod radial;
pub mod wkb;

pub use error::{Error, Result};
pub use exec::Exec;
pub use geometry::{RadialCoefficient, Transmission, TwoPhaseDiskConfig};
