//! Optimal-transport distributionally robust optimization primitives.

pub mod ctransform;
pub mod domain;
pub mod envelopes;
pub mod nash_svm;
pub mod portfolio;
pub mod error;
pub mod io;
pub mod regbounds;
pub mod registry;
pub mod solvers;
pub mod tolerances;

pub use error::{Error, Result};
pub use tolerances::Tolerances;
