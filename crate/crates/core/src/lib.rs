//! Exact Stokes eigenfunction algebra on a periodic cylinder, symmetrized
//! convection brackets, span generation and a small Galerkin model.

pub mod bracket;
pub mod cli;
pub mod eigen;
pub mod galerkin;
pub mod pipoly;
pub mod projector;
pub mod rational;
pub mod replay;
pub mod span;
pub mod trig;

#[cfg(test)]
mod properties;
