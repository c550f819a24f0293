use thiserror::Error;

use crate::Int;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid construction parameters: {0}")]
    InvalidParams(String),

    #[error("stage index must be at least 1, got {0}")]
    StageIndex(usize),

    #[error("level {level} is outside the stage-{stage} tower of height {height}")]
    LevelOutOfRange { stage: usize, level: Int, height: Int },

    #[error("cannot refine a stage-{from} set down to stage {to}")]
    RefineDown { from: usize, to: usize },

    #[error("level sets belong to different constructions")]
    ConstructionMismatch,

    #[error("shift {shift} needs a tower taller than stage {stage} (height {height})")]
    ShiftTooLarge { shift: Int, stage: usize, height: Int },

    #[error("joining shift {k} exceeds the stage-{stage} height {height}")]
    JoiningShift { k: Int, stage: usize, height: Int },

    #[error("joining weights must be nonnegative and sum to 1, got sum {0}")]
    WeightSum(String),

    #[error("sequence error: {0}")]
    Sequence(String),

    #[error("σ-preimage empty: no stage below the cutoff has spacer value {0}")]
    EmptySigmaPreimage(i64),

    #[error("correlation index {0} is not available")]
    MissingCorrelation(Int),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("precondition violated: {0}")]
    Precondition(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
