//! Rank-one construction parameters, exact stage geometry and the named
//! families used throughout the crate.
//!
//! A construction starts from a tower of `h₁` intervals of width
//! `base_width`. At stage `j` the tower is cut into `r` columns, column `i`
//! receives `s_j(i)` spacer levels on top, and the columns are stacked left to
//! right into the stage `j + 1` tower, so that
//! `h_{j+1} = r·h_j + Σᵢ s_j(i)`.

mod checks;
mod config;
mod geometry;
mod params;

pub use checks::{
    condition_star_check, infinite_measure_partial_sum, ConditionStarReport, MeasureSeriesReport,
    StarRow,
};
pub use config::{ConstructionConfig, ExplicitConfig, StagesConfig};
pub use geometry::{stage_geometry, Construction, StageGeometry};
pub use params::{sigma, ConstructionParams, FamilyPreset, SpacerRule};
