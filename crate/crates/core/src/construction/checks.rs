use num_traits::Zero;
use serde::Serialize;

use super::{Construction, ConstructionParams};
use crate::rational::serde_rational;
use crate::{Error, Int, Rational};

/// Partial sums of `Σ_j Σ_i s_j(i) / (h_j r_j)`; the space has infinite
/// measure iff the full series diverges.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MeasureSeriesReport {
    #[serde(with = "serde_rational")]
    pub sum: Rational,
    #[serde(serialize_with = "serialize_rationals")]
    pub terms: Vec<Rational>,
    /// Heuristic: the last term has not decayed below `term₁ / J`, i.e. the
    /// terms fall no faster than the harmonic series.
    pub diverging: bool,
}

fn serialize_rationals<S: serde::Serializer>(v: &[Rational], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(crate::rational::format_rational))
}

pub fn infinite_measure_partial_sum(
    params: &ConstructionParams,
    stages: usize,
) -> Result<MeasureSeriesReport, Error> {
    if stages == 0 {
        return Err(Error::StageIndex(0));
    }
    let construction = Construction::new(params.clone())?;
    let terms: Vec<Rational> = (1..=stages)
        .map(|j| {
            let g = construction.stage(j);
            let spacer_total: Int = g.spacers.iter().sum();
            Rational::new(spacer_total, &g.h * Int::from(g.cuts()))
        })
        .collect();
    let sum = terms.iter().fold(Rational::zero(), |acc, t| acc + t);
    let first = &terms[0];
    let last = &terms[stages - 1];
    let diverging =
        !last.is_zero() && last * Rational::from_integer(Int::from(stages)) >= *first;
    Ok(MeasureSeriesReport { sum, terms, diverging })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct StarRow {
    pub j: usize,
    /// `h_j/s_j(2), s_j(2)/s_j(3), …, s_j(r−1)/s_j(r)`; `None` where the
    /// denominator is zero.
    #[serde(serialize_with = "serialize_ratios")]
    pub ratios: Vec<Option<Rational>>,
}

fn serialize_ratios<S: serde::Serializer>(v: &[Option<Rational>], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|r| r.as_ref().map(crate::rational::format_rational)))
}

/// Outcome of checking `s_j(1) = 0, h_j ≪ s_j(2) ≪ … ≪ s_j(r)` on a finite
/// prefix: every ratio in the chain must shrink strictly with `j`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConditionStarReport {
    pub rows: Vec<StarRow>,
    /// One flag per position in the ratio chain.
    pub shrinking: Vec<bool>,
    pub violations: Vec<String>,
    pub pass: bool,
}

pub fn condition_star_check(
    params: &ConstructionParams,
    stages: usize,
) -> Result<ConditionStarReport, Error> {
    if stages == 0 {
        return Err(Error::StageIndex(0));
    }
    let construction = Construction::new(params.clone())?;
    let mut violations = Vec::new();
    let mut rows = Vec::with_capacity(stages);
    for j in 1..=stages {
        let g = construction.stage(j);
        if !g.spacers[0].is_zero() {
            violations.push(format!("stage {j}: s_j(1) ≠ 0"));
        }
        let mut chain = Vec::with_capacity(g.cuts() - 1);
        let mut numerator = g.h.clone();
        for (i, s) in g.spacers.iter().enumerate().skip(1) {
            if s.is_zero() {
                violations.push(format!("stage {j}: s_j({}) = 0 in the ratio chain", i + 1));
                chain.push(None);
            } else {
                chain.push(Some(Rational::new(numerator.clone(), s.clone())));
            }
            numerator = s.clone();
        }
        rows.push(StarRow { j, ratios: chain });
    }
    let width = rows[0].ratios.len();
    let shrinking: Vec<bool> = (0..width)
        .map(|pos| {
            rows.windows(2).all(|pair| match (&pair[0].ratios[pos], &pair[1].ratios[pos]) {
                (Some(a), Some(b)) => b < a,
                _ => false,
            })
        })
        .collect();
    let pass = violations.is_empty() && shrinking.iter().all(|&s| s);
    Ok(ConditionStarReport { rows, shrinking, violations, pass })
}

#[cfg(test)]
mod tests {
    use num_traits::One;

    use super::*;
    use crate::construction::{FamilyPreset, SpacerRule};

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    #[test]
    fn toy_partial_sum() {
        let report = infinite_measure_partial_sum(&FamilyPreset::Toy.params().unwrap(), 3).unwrap();
        assert_eq!(report.sum, q(31, 42));
        assert_eq!(report.terms, vec![q(1, 2), q(1, 6), q(1, 14)]);
        let longer = infinite_measure_partial_sum(&FamilyPreset::Toy.params().unwrap(), 8).unwrap();
        assert!(!longer.diverging);
    }

    #[test]
    fn utv1_partial_sum() {
        let report = infinite_measure_partial_sum(&FamilyPreset::Utv1.params().unwrap(), 3).unwrap();
        assert_eq!(report.sum, q(3, 1));
        assert!(report.diverging);
    }

    #[test]
    fn zero_spacers_sum_to_zero() {
        let params = ConstructionParams::new(3, vec![SpacerRule::Zero; 4], Rational::one()).unwrap();
        let report = infinite_measure_partial_sum(&params, 6).unwrap();
        assert_eq!(report.sum, Rational::zero());
        assert!(!report.diverging);
    }

    #[test]
    fn star_utv1_passes() {
        let report = condition_star_check(&FamilyPreset::Utv1.params().unwrap(), 6).unwrap();
        assert!(report.pass, "{report:?}");
        for row in &report.rows {
            assert_eq!(row.ratios, vec![Some(q(1, row.j as i64))]);
        }
    }

    #[test]
    fn star_toy_fails() {
        let report = condition_star_check(&FamilyPreset::Toy.params().unwrap(), 6).unwrap();
        assert!(!report.pass);
        assert!(report.violations.is_empty());
        assert_eq!(report.shrinking, vec![false]);
        assert_eq!(report.rows[3].ratios, vec![Some(q(15, 1))]);
    }

    #[test]
    fn star_nonzero_first_spacer() {
        let params = ConstructionParams::new(
            1,
            vec![SpacerRule::Constant(Int::one()), SpacerRule::StageTimesHeight],
            Rational::one(),
        )
        .unwrap();
        let report = condition_star_check(&params, 3).unwrap();
        assert!(!report.pass);
        assert!(report.violations[0].contains("s_j(1) ≠ 0"));
    }

    #[test]
    fn star_interior_zero_is_reported() {
        let params = ConstructionParams::new(
            1,
            vec![SpacerRule::Zero, SpacerRule::Zero, SpacerRule::StageTimesHeight],
            Rational::one(),
        )
        .unwrap();
        let report = condition_star_check(&params, 3).unwrap();
        assert!(!report.pass);
        assert_eq!(report.rows[0].ratios[0], None);
    }
}
