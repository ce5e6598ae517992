//! Simulation and optimization toolkit for ambient backscatter links read by
//! a pixel-based fluid antenna.
//!
//! * [`numerics`]: Bessel J0, Cholesky factors, seeded random streams.
//! * [`channel`]: Jakes-correlated Rician channels and noisy gain observations.
//! * [`ambc`]: rate, harvested power, EH margin and the closed-form level.
//! * [`optimizer`]: particle swarm over port and reflection level, plus an
//!   exact oracle.
//! * [`harness`]: optimize-then-average Monte Carlo, sweeps and CSV output.

pub mod ambc;
pub mod channel;
pub mod error;
pub mod harness;
pub mod numerics;
pub mod optimizer;
pub mod selftest;

pub use error::{Error, Result};
