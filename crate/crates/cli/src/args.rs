//! Argument types shared by the command line and the JSON experiment config.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use rankone::construction::{Construction, ConstructionConfig};
use rankone::rational::{format_rational, parse_rational};
use rankone::{FamilyPreset, Int, LevelSet, Rational};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

/// A construction: a preset name (`utv1`, `thm2(2)`, `scaled(3/2)`), inline
/// JSON, or `@path` to a JSON file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Family(pub ConstructionConfig);

impl Family {
    pub fn build(&self) -> anyhow::Result<Arc<Construction>> {
        Ok(Construction::new(self.0.params()?)?)
    }

    pub fn preset(preset: &FamilyPreset) -> Self {
        Family(ConstructionConfig::from(preset))
    }
}

impl Default for Family {
    fn default() -> Self {
        Family::preset(&FamilyPreset::Utv1)
    }
}

impl FromStr for Family {
    type Err = String;

    fn from_str(text: &str) -> Result<Self, String> {
        let text = text.trim();
        let config = if let Some(path) = text.strip_prefix('@') {
            let body = std::fs::read_to_string(path).map_err(|e| format!("{path}: {e}"))?;
            ConstructionConfig::from_json(&body)
        } else if text.starts_with('{') {
            ConstructionConfig::from_json(text)
        } else {
            FamilyPreset::parse(text).map(|p| ConstructionConfig::from(&p))
        };
        config.map(Family).map_err(|e| e.to_string())
    }
}

impl fmt::Display for Family {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0.to_json())
    }
}

impl Serialize for Family {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        self.0.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Family {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Form {
            Name(String),
            Config(ConstructionConfig),
        }
        match Form::deserialize(d)? {
            Form::Name(name) => name.parse().map_err(serde::de::Error::custom),
            Form::Config(config) => Ok(Family(config)),
        }
    }
}

/// A value parsed from text that keeps its canonical text form for reports.
/// JSON accepts the text form or a plain integer.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Text<T>(pub T);

pub trait TextForm: Sized {
    fn parse_text(text: &str) -> Result<Self, String>;
    fn to_text(&self) -> String;
}

impl TextForm for Int {
    fn parse_text(text: &str) -> Result<Self, String> {
        text.trim().parse().map_err(|_| format!("not an integer: {text:?}"))
    }

    fn to_text(&self) -> String {
        self.to_string()
    }
}

impl TextForm for Rational {
    fn parse_text(text: &str) -> Result<Self, String> {
        parse_rational(text).map_err(|e| e.to_string())
    }

    fn to_text(&self) -> String {
        format_rational(self)
    }
}

/// Inclusive range `a..b` (or a single value `a`).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Span {
    pub lo: Int,
    pub hi: Int,
}

impl Span {
    #[cfg(test)]
    pub fn new(lo: impl Into<Int>, hi: impl Into<Int>) -> Self {
        Span { lo: lo.into(), hi: hi.into() }
    }

    pub fn usize_bounds(&self) -> Result<(usize, usize), String> {
        let conv = |v: &Int| usize::try_from(v).map_err(|_| format!("{v} is not a stage index"));
        Ok((conv(&self.lo)?, conv(&self.hi)?))
    }

    pub fn ints(&self) -> Vec<Int> {
        let mut out = Vec::new();
        let mut v = self.lo.clone();
        while v <= self.hi {
            out.push(v.clone());
            v += 1;
        }
        out
    }
}

impl TextForm for Span {
    fn parse_text(text: &str) -> Result<Self, String> {
        let text = text.trim();
        let (lo, hi) = match text.split_once("..") {
            Some((lo, hi)) => (lo, hi.strip_prefix('=').unwrap_or(hi)),
            None => (text, text),
        };
        let span = Span { lo: Int::parse_text(lo)?, hi: Int::parse_text(hi)? };
        if span.lo > span.hi {
            return Err(format!("empty range {text:?}"));
        }
        Ok(span)
    }

    fn to_text(&self) -> String {
        if self.lo == self.hi {
            self.lo.to_string()
        } else {
            format!("{}..{}", self.lo, self.hi)
        }
    }
}

impl<T: TextForm> FromStr for Text<T> {
    type Err = String;

    fn from_str(text: &str) -> Result<Self, String> {
        T::parse_text(text).map(Text)
    }
}

impl<T: TextForm> fmt::Display for Text<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0.to_text())
    }
}

impl<T: TextForm> Serialize for Text<T> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.0.to_text())
    }
}

impl<'de, T: TextForm> Deserialize<'de> for Text<T> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Form {
            Str(String),
            Num(i64),
        }
        let text = match Form::deserialize(d)? {
            Form::Str(s) => s,
            Form::Num(n) => n.to_string(),
        };
        T::parse_text(&text).map(Text).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
pub fn text<T: TextForm>(s: &str) -> Text<T> {
    T::parse_text(s).map(Text).expect("valid default")
}

pub fn level_set(c: &Arc<Construction>, text: &str) -> anyhow::Result<LevelSet> {
    Ok(LevelSet::parse(c, text)?)
}
