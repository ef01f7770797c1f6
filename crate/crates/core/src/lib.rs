//! Spin-1/2 Wigner rotation of a particle falling radially into a
//! Schwarzschild black hole, and the quantum channel it induces.

#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod channel;
pub mod error;
pub mod geometry;
pub mod kinematics;
pub mod spinor;
pub mod wigner;

pub use error::{Error, Result};
pub use spinor::SpinorMap;
