//! Exact calculus on finite unions of tower levels.
//!
//! A [`LevelSet`] is a union of levels of a single stage tower. Refining a set
//! to a later stage replaces each level by its copies in every column; on all
//! but the top level of a tower `T` just moves a level one step up, so `Tⁿ`
//! acts on a stage-`J` set by shifting level indices as long as they stay
//! below `h_J`. [`apply_power_bounds`] pushes the levels that would leave the
//! tower to later stages until they resolve or the stage budget runs out.

mod bound;
mod level_set;
mod power;

pub use bound::MeasureBound;
pub use level_set::LevelSet;
pub use power::{apply_power_bounds, DEFAULT_EXTRA_STAGES};
