//! Off-diagonal joinings `Δᵏ = (Id × Tᵏ)Δ`, evaluated on rectangles as
//! `Δᵏ(A×B) = μ(A ∩ T⁻ᵏB)`, and their restrictions `Δᵏ_j` to the part of the
//! graph of `Tᵏ` that stays inside the stage-`j` tower.
//!
//! Only the graph joinings are represented; the rectangle pairing is the whole
//! interface to them.

use std::collections::BTreeMap;
use std::ops::RangeInclusive;

use num_traits::{One, Signed, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::rational::{format_rational, serde_int, serde_rational};
use crate::tower::{apply_power_bounds, LevelSet, MeasureBound};
use crate::{Error, Int, Rational, Status};

/// `Δᵏ(A×B) = μ(A ∩ T⁻ᵏB) = μ(Tᵏ A ∩ B)`.
pub fn delta_shift(a: &LevelSet, b: &LevelSet, k: &Int, max_stage: Option<usize>) -> Result<MeasureBound, Error> {
    apply_power_bounds(a, b, k, max_stage)
}

/// `Δᵏ_j(A×B)`: the mass of points `x ∈ A` with `Tᵏx ∈ B` such that `x` sits
/// on a stage-`j` level `i` with `0 ≤ i + k < h_j`, so `Tᵏ` moves it
/// within the stage-`j` tower. Always exact.
pub fn partial_joining(a: &LevelSet, b: &LevelSet, k: &Int, j: usize) -> Result<MeasureBound, Error> {
    if !a.construction().same_as(b.construction()) {
        return Err(Error::ConstructionMismatch);
    }
    if j == 0 {
        return Err(Error::StageIndex(0));
    }
    let c = a.construction();
    let height = c.height(j);
    if k.abs() > height {
        return Err(Error::JoiningShift { k: k.clone(), stage: j, height });
    }
    let stage = j.max(a.stage()).max(b.stage());
    let a_fine = a.refine(stage)?;
    let mut hits = 0usize;
    for level in a_fine.levels() {
        let Some(coarse) = c.ancestor(level, stage, j) else {
            continue;
        };
        let moved = &coarse + k;
        if moved.is_negative() || moved >= height {
            continue;
        }
        if b.contains_fine_level(&(level + k), stage) {
            hits += 1;
        }
    }
    let value = c.level_width(stage) * Rational::from_integer(Int::from(hits));
    Ok(MeasureBound::exact(value, stage))
}

/// Convex weights `c_j^k` on shifts `|k| ≤ h_j`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct JoiningCombination {
    pub stage: usize,
    weights: BTreeMap<Int, Rational>,
}

impl JoiningCombination {
    pub fn new(stage: usize, weights: impl IntoIterator<Item = (Int, Rational)>) -> Result<Self, Error> {
        let mut map = BTreeMap::new();
        for (k, w) in weights {
            if w.is_negative() {
                return Err(Error::WeightSum(format!("negative weight on k = {k}")));
            }
            *map.entry(k).or_insert_with(Rational::zero) += w;
        }
        let total = map.values().fold(Rational::zero(), |acc, w| acc + w);
        if total != Rational::one() {
            return Err(Error::WeightSum(format_rational(&total)));
        }
        Ok(JoiningCombination { stage, weights: map })
    }

    pub fn point_mass(stage: usize, k: impl Into<Int>) -> Self {
        JoiningCombination::new(stage, [(k.into(), Rational::one())]).expect("unit weight")
    }

    pub fn weights(&self) -> &BTreeMap<Int, Rational> {
        &self.weights
    }
}

/// `Σ_k c_j^k Δᵏ_j(A×B)`.
pub fn combination_value(comb: &JoiningCombination, a: &LevelSet, b: &LevelSet) -> Result<MeasureBound, Error> {
    let mut total = MeasureBound::exact(Rational::zero(), comb.stage);
    for (k, w) in &comb.weights {
        total = &total + &partial_joining(a, b, k, comb.stage)?.scale(w);
    }
    Ok(total)
}

#[derive(Debug, Clone, Serialize)]
pub struct WitnessRow {
    pub j: usize,
    #[serde(with = "serde_int")]
    pub k_chosen: Int,
    #[serde(with = "serde_rational")]
    pub margin_lo: Rational,
    #[serde(with = "serde_rational")]
    pub margin_hi: Rational,
    pub status: Status,
}

#[derive(Debug, Clone, Serialize)]
pub struct WitnessReport {
    #[serde(with = "serde_int")]
    pub m: Int,
    pub rows: Vec<WitnessRow>,
    /// The grid was empty, so the pass carries no information.
    pub vacuous: bool,
    pub status: Status,
}

/// Shifts tried as `k(j)`: `±h_j + m` and `±h_j ± h_{j−1} + m`, in that order.
pub fn witness_candidates(a: &LevelSet, m: &Int, j: usize) -> Vec<Int> {
    let c = a.construction();
    let h = c.height(j);
    let h_prev = c.height(j - 1);
    vec![
        &h + m,
        -&h + m,
        &h + &h_prev + m,
        &h - &h_prev + m,
        -&h + &h_prev + m,
        -&h - &h_prev + m,
    ]
}

/// For each `j`, picks the candidate `k(j)` maximizing
/// `min over the grid of Δ^{k(j)}(A×B) − ½Δᵐ(A×B)` and passes when that
/// margin is at least `−eps`.
pub fn theorem1_witness(
    m: &Int,
    grid: &[(LevelSet, LevelSet)],
    js: RangeInclusive<usize>,
    eps: &Rational,
    max_stage: Option<usize>,
) -> Result<WitnessReport, Error> {
    if *js.start() < 2 {
        return Err(Error::Precondition("witness stages start at 2".into()));
    }
    if grid.is_empty() {
        let rows = js
            .map(|j| WitnessRow {
                j,
                k_chosen: m.clone(),
                margin_lo: Rational::zero(),
                margin_hi: Rational::zero(),
                status: Status::Pass,
            })
            .collect();
        return Ok(WitnessReport { m: m.clone(), rows, vacuous: true, status: Status::Pass });
    }
    let half = Rational::new(Int::one(), Int::from(2));
    let targets: Vec<MeasureBound> = grid
        .par_iter()
        .map(|(a, b)| Ok(delta_shift(a, b, m, max_stage)?.scale(&half)))
        .collect::<Result<_, Error>>()?;
    let rows: Vec<WitnessRow> = js
        .collect::<Vec<_>>()
        .par_iter()
        .map(|&j| {
            let mut best: Option<(Int, Rational, Rational)> = None;
            for k in witness_candidates(&grid[0].0, m, j) {
                let mut lo: Option<Rational> = None;
                let mut hi: Option<Rational> = None;
                for ((a, b), target) in grid.iter().zip(&targets) {
                    let (dlo, dhi) = delta_shift(a, b, &k, max_stage)?.minus(target);
                    lo = Some(lo.map_or(dlo.clone(), |x| x.min(dlo)));
                    hi = Some(hi.map_or(dhi.clone(), |x| x.min(dhi)));
                }
                let (lo, hi) = (lo.expect("nonempty grid"), hi.expect("nonempty grid"));
                if best.as_ref().is_none_or(|(_, best_lo, _)| lo > *best_lo) {
                    best = Some((k, lo, hi));
                }
            }
            let (k_chosen, margin_lo, margin_hi) = best.expect("six candidates");
            let status = if margin_lo >= -eps.clone() {
                Status::Pass
            } else if margin_hi < -eps.clone() {
                Status::Fail
            } else {
                Status::Inconclusive
            };
            Ok(WitnessRow { j, k_chosen, margin_lo, margin_hi, status })
        })
        .collect::<Result<_, Error>>()?;
    let status = Status::all(rows.iter().map(|r| r.status));
    Ok(WitnessReport { m: m.clone(), rows, vacuous: false, status })
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::construction::{Construction, FamilyPreset};

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    fn utv1() -> Arc<Construction> {
        Construction::from_preset(&FamilyPreset::Utv1).unwrap()
    }

    #[test]
    fn delta_shift_cases() {
        let toy = Construction::from_preset(&FamilyPreset::Toy).unwrap();
        let e1 = LevelSet::base(&toy, 1).unwrap();
        assert_eq!(delta_shift(&e1, &e1, &Int::zero(), None).unwrap().value(), Some(&q(1, 1)));
        assert_eq!(delta_shift(&e1, &e1, &Int::from(-1), None).unwrap().value(), Some(&q(1, 2)));
        let a = LevelSet::level(&toy, 2, 0).unwrap();
        let b = LevelSet::level(&toy, 2, 2).unwrap();
        assert_eq!(delta_shift(&a, &b, &Int::zero(), None).unwrap().value(), Some(&q(0, 1)));
    }

    #[test]
    fn partial_joining_cases() {
        let toy = Construction::from_preset(&FamilyPreset::Toy).unwrap();
        let e1 = LevelSet::base(&toy, 1).unwrap();
        assert_eq!(partial_joining(&e1, &e1, &Int::one(), 2).unwrap().value(), Some(&q(1, 2)));
        assert_eq!(partial_joining(&e1, &e1, &Int::zero(), 3).unwrap().value(), Some(&q(1, 1)));
        assert!(matches!(
            partial_joining(&e1, &e1, &Int::from(4), 2),
            Err(Error::JoiningShift { .. })
        ));
        // Δ^1(E_2×E_2) = 0 in utv1 forces every partial value to 0.
        let c = utv1();
        let e2 = LevelSet::base(&c, 2).unwrap();
        assert!(delta_shift(&e2, &e2, &Int::one(), None).unwrap().is_zero());
        for j in 2..=6 {
            assert!(partial_joining(&e2, &e2, &Int::one(), j).unwrap().is_zero());
        }
    }

    #[test]
    fn combinations() {
        let c = utv1();
        let a = LevelSet::base(&c, 2).unwrap();
        let b = LevelSet::level(&c, 2, 1).unwrap();
        let point = combination_value(&JoiningCombination::point_mass(4, 1), &a, &b).unwrap();
        assert_eq!(point, partial_joining(&a, &b, &Int::one(), 4).unwrap());
        let third = q(1, 3);
        let uniform = JoiningCombination::new(
            4,
            [(Int::from(-1), third.clone()), (Int::zero(), third.clone()), (Int::one(), third.clone())],
        )
        .unwrap();
        let mean = (-1..=1)
            .map(|k| partial_joining(&a, &b, &Int::from(k), 4).unwrap().lo)
            .fold(Rational::zero(), |acc, v| acc + v)
            * third;
        assert_eq!(combination_value(&uniform, &a, &b).unwrap().value(), Some(&mean));
        assert!(JoiningCombination::new(4, [(Int::zero(), q(1, 2))]).is_err());
        assert!(JoiningCombination::new(4, [(Int::zero(), q(3, 2)), (Int::one(), q(-1, 2))]).is_err());
    }

    #[test]
    fn combination_against_direct_sum() {
        let c = utv1();
        let a = LevelSet::base(&c, 2).unwrap();
        let h5 = c.height(5);
        let comb = JoiningCombination::new(6, [(Int::zero(), q(1, 2)), (h5.clone(), q(1, 2))]).unwrap();
        let direct = partial_joining(&a, &a, &Int::zero(), 6).unwrap().lo * q(1, 2)
            + partial_joining(&a, &a, &h5, 6).unwrap().lo * q(1, 2);
        assert_eq!(combination_value(&comb, &a, &a).unwrap().value(), Some(&direct));
        // Δ^{h_5} restricted to stage 6 sees the whole halving.
        assert_eq!(direct, a.measure() * q(3, 4));
    }

    #[test]
    fn witness_halving() {
        let c = utv1();
        let e2 = LevelSet::base(&c, 2).unwrap();
        let grid = vec![(e2.clone(), e2.clone())];
        let report = theorem1_witness(&Int::zero(), &grid, 3..=6, &Rational::zero(), None).unwrap();
        assert_eq!(report.status, Status::Pass);
        for row in &report.rows {
            assert_eq!(row.k_chosen, c.height(row.j));
            assert_eq!(row.margin_lo, Rational::zero());
        }
        let shifted = theorem1_witness(&Int::one(), &grid, 3..=6, &Rational::zero(), None).unwrap();
        assert_eq!(shifted.status, Status::Pass);
        assert_eq!(shifted.rows[0].k_chosen, c.height(3) + 1);
    }

    #[test]
    fn witness_vacuous_and_null_rectangles() {
        let c = utv1();
        let report = theorem1_witness(&Int::from(3), &[], 3..=4, &Rational::zero(), None).unwrap();
        assert!(report.vacuous);
        assert_eq!(report.status, Status::Pass);
        // Δ^1(E_2 × E_2) = 0, so every candidate clears the bar.
        let e2 = LevelSet::base(&c, 2).unwrap();
        let report = theorem1_witness(&Int::one(), &[(e2.clone(), e2)], 3..=4, &Rational::zero(), None).unwrap();
        assert_eq!(report.status, Status::Pass);
    }
}
