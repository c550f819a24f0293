use std::fmt;

use num_traits::Zero;

use crate::construction::Construction;
use crate::rational::parse_int;
use crate::{Error, Int};

/// One summand `α·h_{k+shift}`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SequenceTerm {
    pub coefficient: i64,
    /// Stage selector `j(k) = k + shift`.
    pub shift: isize,
}

/// `n(k) = s + Σ α_i h_{k + shift_i}` with strictly decreasing selectors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CandidateSequence {
    pub offset: Int,
    pub terms: Vec<SequenceTerm>,
}

impl CandidateSequence {
    pub fn new(offset: impl Into<Int>, mut terms: Vec<SequenceTerm>) -> Result<Self, Error> {
        terms.retain(|t| t.coefficient != 0);
        terms.sort_by(|a, b| b.shift.cmp(&a.shift));
        if terms.windows(2).any(|w| w[0].shift == w[1].shift) {
            return Err(Error::Sequence("two terms share a stage selector".into()));
        }
        Ok(CandidateSequence { offset: offset.into(), terms })
    }

    /// `n(k) = h_k`.
    pub fn heights() -> Self {
        CandidateSequence::new(0, vec![SequenceTerm { coefficient: 1, shift: 0 }]).expect("valid")
    }

    /// Stages `j_1(k) > j_2(k) > …` used at index `k`.
    pub fn stages(&self, k: usize) -> Result<Vec<usize>, Error> {
        self.terms
            .iter()
            .map(|t| {
                let stage = k as isize + t.shift;
                if stage < 2 {
                    Err(Error::Sequence(format!("stage selector k{:+} = {stage} is below 2", t.shift)))
                } else {
                    Ok(stage as usize)
                }
            })
            .collect()
    }

    pub fn min_stage(&self, k: usize) -> Result<usize, Error> {
        Ok(self.stages(k)?.into_iter().min().unwrap_or(usize::MAX))
    }

    pub fn eval(&self, construction: &Construction, k: usize) -> Result<Int, Error> {
        let mut n = self.offset.clone();
        for (term, stage) in self.terms.iter().zip(self.stages(k)?) {
            n += construction.height(stage) * Int::from(term.coefficient);
        }
        Ok(n)
    }

    /// Parses expressions such as `h_j`, `h_k + h_{k-1} + 1`, `2h_{j-1} - 3`.
    /// Any single letter may serve as the index variable.
    pub fn parse(text: &str) -> Result<Self, Error> {
        let mut offset = Int::zero();
        let mut terms = Vec::new();
        for (sign, term) in split_signed(text)? {
            if let Some(at) = term.find("h_") {
                let coefficient = match term[..at].trim().trim_end_matches('*').trim() {
                    "" => 1,
                    c => c
                        .parse::<i64>()
                        .map_err(|_| Error::Parse(format!("bad coefficient in {term:?}")))?,
                };
                let shift = parse_subscript(term[at + 2..].trim())?;
                terms.push(SequenceTerm { coefficient: sign * coefficient, shift });
            } else {
                offset += parse_int(&term)? * Int::from(sign);
            }
        }
        CandidateSequence::new(offset, terms)
    }
}

fn split_signed(text: &str) -> Result<Vec<(i64, String)>, Error> {
    let mut out = Vec::new();
    let mut depth = 0;
    let mut sign = 1;
    let mut sign_seen = false;
    let mut current = String::new();
    for ch in text.chars() {
        match ch {
            '{' | '}' => {
                depth += if ch == '{' { 1 } else { -1 };
                current.push(ch);
            }
            '+' | '-' if depth == 0 => {
                if current.is_empty() {
                    if sign_seen {
                        return Err(Error::Parse(format!("double sign in {text:?}")));
                    }
                } else {
                    out.push((sign, std::mem::take(&mut current)));
                }
                sign = if ch == '-' { -1 } else { 1 };
                sign_seen = true;
            }
            c if c.is_whitespace() => {}
            c => {
                current.push(c);
                sign_seen = false;
            }
        }
    }
    if depth != 0 {
        return Err(Error::Parse(format!("unbalanced braces in {text:?}")));
    }
    if current.is_empty() {
        return Err(Error::Parse(format!("dangling operator in {text:?}")));
    }
    out.push((sign, current));
    Ok(out)
}

fn parse_subscript(text: &str) -> Result<isize, Error> {
    let inner = text.strip_prefix('{').and_then(|t| t.strip_suffix('}')).unwrap_or(text);
    let mut chars = inner.chars();
    let var = chars.next().ok_or_else(|| Error::Parse("empty subscript".into()))?;
    if !var.is_ascii_alphabetic() {
        return Err(Error::Parse(format!("subscript must start with the index variable: {text:?}")));
    }
    let rest: String = chars.collect();
    if rest.is_empty() {
        return Ok(0);
    }
    rest.parse::<isize>()
        .map_err(|_| Error::Parse(format!("bad subscript offset {text:?}")))
}

impl fmt::Display for CandidateSequence {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut out = String::new();
        for t in &self.terms {
            let magnitude = t.coefficient.unsigned_abs();
            let coefficient = if magnitude == 1 { String::new() } else { magnitude.to_string() };
            let subscript = match t.shift {
                0 => "k".to_string(),
                s => format!("{{k{s:+}}}"),
            };
            let negative = t.coefficient < 0;
            if out.is_empty() {
                out.push_str(if negative { "-" } else { "" });
            } else {
                out.push_str(if negative { " - " } else { " + " });
            }
            out.push_str(&format!("{coefficient}h_{subscript}"));
        }
        if out.is_empty() {
            out = self.offset.to_string();
        } else if self.offset < Int::zero() {
            out.push_str(&format!(" - {}", -&self.offset));
        } else if !self.offset.is_zero() {
            out.push_str(&format!(" + {}", self.offset));
        }
        f.write_str(&out)
    }
}
