//! Projection estimation of Lévy densities from high-frequency increments,
//! with the distribution theory of the associated maximal deviation: exact
//! and asymptotic tails of cell-level Gaussian suprema, Gumbel limits with
//! explicit normalization, accompanying laws, and uniform confidence bands.
//!
//! Modules map onto the pipeline:
//!
//! - [`basis`] — piecewise orthonormal systems (trigonometric, Legendre, Haar)
//! - [`levy`] — simulatable Lévy models with known jump densities
//! - [`estimator`] — the projection estimator and deviation statistics
//! - [`gausssup`] — suprema of the cell Gaussian processes: sampling, exact
//!   laws, tail asymptotics
//! - [`limits`] — normalizing sequences, Gumbel limit, accompanying laws,
//!   CDF distances
//! - [`bands`] — uniform confidence bands and coverage experiments

pub mod bands;
pub mod basis;
pub mod error;
pub mod estimator;
pub mod gausssup;
pub mod levy;
pub mod limits;
pub mod num;

pub use bands::ConfidenceBand;
pub use basis::{BasisFamily, BasisSystem, Window};
pub use error::{Error, Result};
pub use estimator::{DeviationMode, DeviationReport, ProjectionEstimate};
pub use gausssup::{SupMode, SupSampleConfig, TailAsymptotic};
pub use levy::{IncrementSample, LevyModel};
pub use limits::{BiasConstants, LimitLawParams};
