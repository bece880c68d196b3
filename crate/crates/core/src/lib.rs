//! Coupled-mode simulation of light switching between evanescently coupled
//! waveguides whose propagation-constant mismatch flips sign halfway.

pub mod adiabatic;
pub mod analytic;
pub mod cli;
pub mod model;
pub mod numkernel;
pub mod ode;
pub mod propagate;
pub(crate) mod quad;
pub mod splitter;
