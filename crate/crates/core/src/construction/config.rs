//! JSON form of a construction:
//!
//! ```json
//! {"family": "thm2", "N": 2}
//! {"h1": 1, "base_width": "1/1", "stages": {"r": 2, "spacers": ["zero", {"rule": "j_times_h"}]}}
//! ```
//!
//! Rationals are `"p/q"` strings and big integers decimal strings (small
//! integers may also be given as JSON numbers).

use num_traits::One;
use serde::{Deserialize, Serialize};

use super::{ConstructionParams, FamilyPreset, SpacerRule};
use crate::rational::{serde_int, serde_rational};
use crate::{Error, Int, Rational};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ConstructionConfig {
    Family(FamilyConfig),
    Explicit(ExplicitConfig),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "lowercase", deny_unknown_fields)]
pub enum FamilyConfig {
    Toy {},
    Utv1 {},
    Thm2 {
        #[serde(rename = "N")]
        n: usize,
    },
    Scaled {
        #[serde(with = "serde_rational")]
        a: Rational,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExplicitConfig {
    #[serde(with = "serde_int")]
    pub h1: Int,
    #[serde(with = "serde_rational", default = "one")]
    pub base_width: Rational,
    pub stages: StagesConfig,
}

fn one() -> Rational {
    Rational::one()
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StagesConfig {
    pub r: usize,
    pub spacers: Vec<SpacerRuleConfig>,
}

/// A spacer rule is either a bare name (`"zero"`, `"sigma"`, `"j_times_h"`)
/// or an object tagged by `"rule"`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SpacerRuleConfig {
    Name(SpacerName),
    Object(SpacerObject),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SpacerName {
    Zero,
    JTimesH,
    Sigma,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case", deny_unknown_fields)]
pub enum SpacerObject {
    Zero,
    Constant {
        #[serde(with = "serde_int")]
        c: Int,
    },
    CTimesJ {
        #[serde(with = "serde_int")]
        c: Int,
    },
    CTimesH {
        #[serde(with = "serde_int")]
        c: Int,
    },
    JTimesH,
    Sigma,
    ScaledTarget {
        #[serde(with = "serde_rational")]
        a: Rational,
    },
}

impl From<&SpacerRuleConfig> for SpacerRule {
    fn from(config: &SpacerRuleConfig) -> Self {
        match config {
            SpacerRuleConfig::Name(SpacerName::Zero) => SpacerRule::Zero,
            SpacerRuleConfig::Name(SpacerName::JTimesH) => SpacerRule::StageTimesHeight,
            SpacerRuleConfig::Name(SpacerName::Sigma) => SpacerRule::Sigma,
            SpacerRuleConfig::Object(object) => match object {
                SpacerObject::Zero => SpacerRule::Zero,
                SpacerObject::Constant { c } => SpacerRule::Constant(c.clone()),
                SpacerObject::CTimesJ { c } => SpacerRule::StageMultiple(c.clone()),
                SpacerObject::CTimesH { c } => SpacerRule::HeightMultiple(c.clone()),
                SpacerObject::JTimesH => SpacerRule::StageTimesHeight,
                SpacerObject::Sigma => SpacerRule::Sigma,
                SpacerObject::ScaledTarget { a } => SpacerRule::ScaledTarget(a.clone()),
            },
        }
    }
}

impl From<&SpacerRule> for SpacerRuleConfig {
    fn from(rule: &SpacerRule) -> Self {
        match rule {
            SpacerRule::Zero => SpacerRuleConfig::Name(SpacerName::Zero),
            SpacerRule::StageTimesHeight => SpacerRuleConfig::Name(SpacerName::JTimesH),
            SpacerRule::Sigma => SpacerRuleConfig::Name(SpacerName::Sigma),
            SpacerRule::Constant(c) => SpacerRuleConfig::Object(SpacerObject::Constant { c: c.clone() }),
            SpacerRule::StageMultiple(c) => {
                SpacerRuleConfig::Object(SpacerObject::CTimesJ { c: c.clone() })
            }
            SpacerRule::HeightMultiple(c) => {
                SpacerRuleConfig::Object(SpacerObject::CTimesH { c: c.clone() })
            }
            SpacerRule::ScaledTarget(a) => {
                SpacerRuleConfig::Object(SpacerObject::ScaledTarget { a: a.clone() })
            }
        }
    }
}

impl From<&FamilyPreset> for ConstructionConfig {
    fn from(preset: &FamilyPreset) -> Self {
        ConstructionConfig::Family(match preset {
            FamilyPreset::Toy => FamilyConfig::Toy {},
            FamilyPreset::Utv1 => FamilyConfig::Utv1 {},
            FamilyPreset::Thm2 { n } => FamilyConfig::Thm2 { n: *n },
            FamilyPreset::Scaled { a } => FamilyConfig::Scaled { a: a.clone() },
        })
    }
}

impl From<&ConstructionParams> for ConstructionConfig {
    fn from(params: &ConstructionParams) -> Self {
        ConstructionConfig::Explicit(ExplicitConfig {
            h1: params.h1.clone(),
            base_width: params.base_width.clone(),
            stages: StagesConfig {
                r: params.cuts,
                spacers: params.spacers.iter().map(SpacerRuleConfig::from).collect(),
            },
        })
    }
}

impl ConstructionConfig {
    pub fn from_json(text: &str) -> Result<Self, Error> {
        serde_json::from_str(text).map_err(|e| Error::Parse(format!("construction config: {e}")))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("construction config serializes")
    }

    pub fn params(&self) -> Result<ConstructionParams, Error> {
        match self {
            ConstructionConfig::Family(family) => self::FamilyConfig::preset(family).params(),
            ConstructionConfig::Explicit(explicit) => {
                if explicit.stages.spacers.len() != explicit.stages.r {
                    return Err(Error::InvalidParams(format!(
                        "r = {} but {} spacer rules given",
                        explicit.stages.r,
                        explicit.stages.spacers.len()
                    )));
                }
                ConstructionParams::new(
                    explicit.h1.clone(),
                    explicit.stages.spacers.iter().map(SpacerRule::from).collect(),
                    explicit.base_width.clone(),
                )
            }
        }
    }
}

impl FamilyConfig {
    pub fn preset(&self) -> FamilyPreset {
        match self {
            FamilyConfig::Toy {} => FamilyPreset::Toy,
            FamilyConfig::Utv1 {} => FamilyPreset::Utv1,
            FamilyConfig::Thm2 { n } => FamilyPreset::Thm2 { n: *n },
            FamilyConfig::Scaled { a } => FamilyPreset::Scaled { a: a.clone() },
        }
    }
}
