//! Reference computations for the gravmetro test suites.
//!
//! Everything here is written from first principles and shares no code with
//! the main crate: brute-force quadrature, series evaluation of the metric
//! ratios, and a truncated Fock-space model of Gaussian states.

pub mod fock;
pub mod quadrature;
pub mod spacetime;
