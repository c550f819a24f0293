//! Exact laboratory for infinite-measure rank-one transformations built by
//! cutting and stacking.
//!
//! Everything that touches measure is computed in exact rational arithmetic
//! over big integers: tower heights, level widths, intersection measures
//! `μ(Tⁿ A ∩ B)` and joining values. Floating point appears only in the
//! spectral reporting layer ([`spectral`]), which is generic over any
//! [`num_traits::Float`].
//!
//! The modules follow the life of an experiment:
//!
//! * [`construction`]: parameters, stage geometry and the preset families.
//! * [`tower`]: level sets, refinement and rational bounds on `μ(Tⁿ A ∩ B)`.
//! * [`oracle`]: an independent interval-level model used for validation.
//! * [`limits`]: weak-limit candidates, window scans and the `T^{-n h_j}` limits.
//! * [`joinings`]: off-diagonal joinings `Δᵏ` and their partial versions.
//! * [`products`]: rectangle returns for product systems.
//! * [`spectral`]: correlation sequences, Fejér densities, suspensions.
//! * [`acceptance`]: the named end-to-end checks shared by tests and the CLI.

pub mod acceptance;
pub mod construction;
mod error;
pub mod joinings;
pub mod limits;
pub mod oracle;
pub mod products;
pub mod rational;
pub mod report;
pub mod spectral;
pub mod tower;

pub use error::{Error, Result};

/// Exact rational used for every measure value.
pub type Rational = num_rational::BigRational;
/// Heights, level indices and shifts. Heights grow factorially, so they are
/// never stored in fixed-width integers.
pub type Int = num_bigint::BigInt;

/// Fejér density estimate in double precision.
pub type DensityEstimate = spectral::SpectralDensityEstimate<f64>;
/// Fejér density estimate in single precision.
pub type DensityEstimate32 = spectral::SpectralDensityEstimate<f32>;

pub use construction::{Construction, ConstructionParams, FamilyPreset, SpacerRule, StageGeometry};
pub use limits::{CandidateSequence, OperatorPolynomial};
pub use report::Status;
pub use tower::{LevelSet, MeasureBound};
