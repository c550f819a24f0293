use num_traits::{Signed, Zero};

use super::level_set::refine_levels;
use super::{LevelSet, MeasureBound};
use crate::{Error, Int, Rational};

/// Stages searched past the first stage whose tower is taller than `|n|`
/// when no explicit budget is given.
pub const DEFAULT_EXTRA_STAGES: usize = 8;

/// Bracket on `μ(Tⁿ A ∩ B)`.
///
/// `A` is written at the first stage `J` whose tower is taller than `|n|`;
/// every level `ℓ` with `ℓ + n < h_J` moves to level `ℓ + n` and is checked
/// against `B`. The remaining top levels are refined wholesale to stage
/// `J + 1` and the step repeats until nothing is left or `max_stage` is
/// reached, in which case their mass is reported as the width of the bracket.
///
/// Negative powers use `μ(Tⁿ A ∩ B) = μ(A ∩ T⁻ⁿ B) = μ(T⁻ⁿ B ∩ A)`.
pub fn apply_power_bounds(
    a: &LevelSet,
    b: &LevelSet,
    n: &Int,
    max_stage: Option<usize>,
) -> Result<MeasureBound, Error> {
    if !a.construction().same_as(b.construction()) {
        return Err(Error::ConstructionMismatch);
    }
    if n.is_negative() {
        return apply_power_bounds(b, a, &-n, max_stage);
    }
    let construction = a.construction();
    let floor = a.stage().max(b.stage());
    let start = construction.first_stage_taller_than(n, floor);
    let max_stage = max_stage.unwrap_or(start + DEFAULT_EXTRA_STAGES).max(floor);
    if a.is_empty() || b.is_empty() {
        return Ok(MeasureBound::exact(Rational::zero(), floor));
    }

    let mut stage = start.min(max_stage);
    let mut pending = refine_levels(construction, a.levels().to_vec(), a.stage(), stage);
    let mut lo = Rational::zero();
    loop {
        let geometry = construction.stage(stage);
        let mut hits = 0usize;
        let mut deferred = Vec::new();
        for level in pending {
            let target = &level + n;
            if target < geometry.h {
                if b.contains_fine_level(&target, stage) {
                    hits += 1;
                }
            } else {
                deferred.push(level);
            }
        }
        lo += &geometry.level_width * Rational::from_integer(Int::from(hits));
        if deferred.is_empty() {
            return Ok(MeasureBound::exact(lo, stage));
        }
        if stage >= max_stage {
            let unresolved = &geometry.level_width * Rational::from_integer(Int::from(deferred.len()));
            let hi = &lo + unresolved;
            return Ok(MeasureBound::new(lo, hi, stage));
        }
        pending = refine_levels(construction, deferred, stage, stage + 1);
        stage += 1;
    }
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::construction::{Construction, FamilyPreset};

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    fn toy() -> Arc<Construction> {
        Construction::from_preset(&FamilyPreset::Toy).unwrap()
    }

    #[test]
    fn toy_unit_shift() {
        let c = toy();
        let e1 = LevelSet::base(&c, 1).unwrap();
        let bound = apply_power_bounds(&e1, &e1, &Int::from(1), None).unwrap();
        assert_eq!(bound.value(), Some(&q(1, 2)));
    }

    #[test]
    fn toy_shift_by_h2() {
        let c = toy();
        let e1 = LevelSet::base(&c, 1).unwrap();
        let bound = apply_power_bounds(&e1, &e1, &Int::from(3), None).unwrap();
        assert_eq!(bound.value(), Some(&q(5, 8)));
    }

    #[test]
    fn zero_power_is_intersection() {
        let c = toy();
        let a = LevelSet::parse(&c, "stage=3; levels=0,2,5").unwrap();
        let b = LevelSet::parse(&c, "stage=2; levels=0,2").unwrap();
        let bound = apply_power_bounds(&a, &b, &Int::zero(), None).unwrap();
        assert_eq!(bound.value(), Some(&a.intersect(&b).unwrap().measure()));
    }

    #[test]
    fn negative_power_swaps_roles() {
        let c = toy();
        let e1 = LevelSet::base(&c, 1).unwrap();
        let bound = apply_power_bounds(&e1, &e1, &Int::from(-1), None).unwrap();
        assert_eq!(bound.value(), Some(&q(1, 2)));
    }

    #[test]
    fn budget_exhaustion_gives_strict_interval() {
        let c = toy();
        let e1 = LevelSet::base(&c, 1).unwrap();
        // Start at stage 2 (h = 3 > 1) and allow no refinement.
        let tight = apply_power_bounds(&e1, &e1, &Int::from(1), Some(2)).unwrap();
        assert_eq!(tight.value(), Some(&q(1, 2)));
        let coarse = apply_power_bounds(&e1, &e1, &Int::from(5), Some(3)).unwrap();
        assert!(!coarse.is_exact());
        assert!(coarse.lo <= coarse.hi);
        let finer = apply_power_bounds(&e1, &e1, &Int::from(5), Some(12)).unwrap();
        assert!(coarse.lo <= finer.lo && finer.hi <= coarse.hi);
    }

    #[test]
    fn empty_sets_vanish() {
        let c = toy();
        let e1 = LevelSet::base(&c, 1).unwrap();
        let empty = LevelSet::empty(&c, 2);
        let bound = apply_power_bounds(&empty, &e1, &Int::from(5), None).unwrap();
        assert_eq!(bound.value(), Some(&Rational::zero()));
    }
}
