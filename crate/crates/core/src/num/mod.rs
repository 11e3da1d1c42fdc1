//! Numerical building blocks: normal tails, the exponential integral,
//! adaptive quadrature, Gauss–Legendre rules, compensated summation and
//! deterministic RNG substreams.

pub mod expint;
pub mod gauss;
pub mod kahan;
pub mod normal;
pub mod quad;
pub mod streams;
