use std::sync::{Arc, RwLock};

use num_traits::Zero;

use super::ConstructionParams;
use crate::{Error, Int, Rational};

/// Exact geometry of the stage-`j` tower and of how it is cut and restacked
/// into stage `j + 1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StageGeometry {
    pub j: usize,
    /// `h_j`.
    pub h: Int,
    /// `w_j = base_width / r^{j-1}`.
    pub level_width: Rational,
    /// `s̄_j`.
    pub spacers: Vec<Int>,
    /// `pos_j(i)`: where the base of column `i` sits inside the stage `j+1`
    /// tower.
    pub column_offsets: Vec<Int>,
    /// `h_{j+1}`.
    pub next_height: Int,
    /// `h_j·w_j`: measure of the stage-`j` tower, i.e. the base plus every
    /// spacer added before stage `j`.
    pub space_measure: Rational,
}

impl StageGeometry {
    fn first(params: &ConstructionParams) -> Self {
        Self::build(params, 1, params.h1.clone(), params.base_width.clone())
    }

    fn build(params: &ConstructionParams, j: usize, h: Int, level_width: Rational) -> Self {
        let spacers = params.spacers_at(j, &h);
        let mut column_offsets = Vec::with_capacity(spacers.len());
        let mut cursor = Int::zero();
        for s in &spacers {
            column_offsets.push(cursor.clone());
            cursor += &h + s;
        }
        let space_measure = Rational::from_integer(h.clone()) * &level_width;
        StageGeometry {
            j,
            h,
            level_width,
            spacers,
            column_offsets,
            next_height: cursor,
            space_measure,
        }
    }

    fn next(&self, params: &ConstructionParams) -> Self {
        let r = Int::from(self.cuts());
        Self::build(
            params,
            self.j + 1,
            self.next_height.clone(),
            &self.level_width / Rational::from_integer(r),
        )
    }

    pub fn cuts(&self) -> usize {
        self.spacers.len()
    }

    /// Maps level `m` of the stage `j+1` tower to `(column, level)` of the
    /// stage-`j` tower, or `None` when `m` is a spacer added at stage `j`.
    pub fn locate(&self, m: &Int) -> Option<(usize, Int)> {
        // Last column whose base is at or below m.
        let column = self.column_offsets.partition_point(|pos| pos <= m);
        if column == 0 {
            return None;
        }
        let column = column - 1;
        let level = m - &self.column_offsets[column];
        (level < self.h).then_some((column, level))
    }
}

/// Stage geometry computed from scratch by running the height recursion.
pub fn stage_geometry(params: &ConstructionParams, j: usize) -> Result<StageGeometry, Error> {
    if j == 0 {
        return Err(Error::StageIndex(j));
    }
    params.validate()?;
    let mut stage = StageGeometry::first(params);
    while stage.j < j {
        stage = stage.next(params);
    }
    Ok(stage)
}

/// Validated parameters plus a memo of stage geometries.
///
/// The memo grows on demand behind a lock; callers only ever observe
/// immutable [`StageGeometry`] values, so sharing a `Construction` between
/// threads is safe.
#[derive(Debug)]
pub struct Construction {
    params: ConstructionParams,
    stages: RwLock<Vec<Arc<StageGeometry>>>,
}

impl Construction {
    pub fn new(params: ConstructionParams) -> Result<Arc<Self>, Error> {
        params.validate()?;
        let first = Arc::new(StageGeometry::first(&params));
        Ok(Arc::new(Construction {
            params,
            stages: RwLock::new(vec![first]),
        }))
    }

    pub fn from_preset(preset: &super::FamilyPreset) -> Result<Arc<Self>, Error> {
        Construction::new(preset.params()?)
    }

    pub fn params(&self) -> &ConstructionParams {
        &self.params
    }

    /// Geometry of stage `j ≥ 1`.
    ///
    /// # Panics
    ///
    /// If `j == 0`.
    pub fn stage(&self, j: usize) -> Arc<StageGeometry> {
        assert!(j >= 1, "stages are 1-indexed");
        {
            let stages = self.stages.read().expect("stage memo poisoned");
            if let Some(stage) = stages.get(j - 1) {
                return Arc::clone(stage);
            }
        }
        let mut stages = self.stages.write().expect("stage memo poisoned");
        while stages.len() < j {
            let next = stages.last().expect("memo starts at stage 1").next(&self.params);
            stages.push(Arc::new(next));
        }
        Arc::clone(&stages[j - 1])
    }

    pub fn height(&self, j: usize) -> Int {
        self.stage(j).h.clone()
    }

    pub fn level_width(&self, j: usize) -> Rational {
        self.stage(j).level_width.clone()
    }

    /// Smallest stage `j ≥ from` with `h_j > bound`.
    pub fn first_stage_taller_than(&self, bound: &Int, from: usize) -> usize {
        let mut j = from.max(1);
        while self.stage(j).h <= *bound {
            j += 1;
        }
        j
    }

    /// Level of the stage-`coarse` tower containing level `level` of the
    /// stage-`fine` tower, or `None` if it is a spacer added in between.
    pub fn ancestor(&self, level: &Int, fine: usize, coarse: usize) -> Option<Int> {
        debug_assert!(coarse <= fine);
        let mut level = level.clone();
        for j in (coarse..fine).rev() {
            level = self.stage(j).locate(&level)?.1;
        }
        Some(level)
    }

    /// Whether two handles describe the same transformation.
    pub fn same_as(&self, other: &Construction) -> bool {
        std::ptr::eq(self, other) || self.params == other.params
    }
}

#[cfg(test)]
mod tests {
    use num_traits::One;

    use super::*;
    use crate::construction::FamilyPreset;

    fn ints(values: &[i64]) -> Vec<Int> {
        values.iter().map(|&v| Int::from(v)).collect()
    }

    #[test]
    fn toy_stage_four() {
        let params = FamilyPreset::Toy.params().unwrap();
        let g = stage_geometry(&params, 4).unwrap();
        assert_eq!(g.h, Int::from(15));
        assert_eq!(g.level_width, Rational::new(1.into(), 8.into()));
        let heights: Vec<Int> = (1..=4).map(|j| stage_geometry(&params, j).unwrap().h).collect();
        assert_eq!(heights, ints(&[1, 3, 7, 15]));
    }

    #[test]
    fn utv1_stage_five() {
        let params = FamilyPreset::Utv1.params().unwrap();
        assert_eq!(stage_geometry(&params, 5).unwrap().h, Int::from(720));
    }

    #[test]
    fn base_case() {
        let params = FamilyPreset::Utv1.params().unwrap();
        let g = stage_geometry(&params, 1).unwrap();
        assert_eq!(g.h, params.h1);
        assert_eq!(g.level_width, params.base_width);
        // s̄_1 = (0, 1·2): columns at 0 and h_1 + 0.
        assert_eq!(g.column_offsets, ints(&[0, 2]));
        assert_eq!(g.next_height, Int::from(6));
    }

    #[test]
    fn stage_zero_rejected() {
        let params = FamilyPreset::Toy.params().unwrap();
        assert_eq!(stage_geometry(&params, 0), Err(Error::StageIndex(0)));
    }

    #[test]
    fn thm2_heights() {
        let c = Construction::from_preset(&FamilyPreset::Thm2 { n: 2 }).unwrap();
        let heights: Vec<Int> = (1..=6).map(|j| c.height(j)).collect();
        assert_eq!(heights, ints(&[2, 9, 47, 283, 1983, 15867]));
        // s̄_2 = (0, σ(2) = 2, 2·9): offsets 0, 9, 20.
        assert_eq!(c.stage(2).column_offsets, ints(&[0, 9, 20]));
    }

    #[test]
    fn memo_matches_recursion() {
        let c = Construction::from_preset(&FamilyPreset::Thm2 { n: 3 }).unwrap();
        for j in (1..=8).rev() {
            assert_eq!(*c.stage(j), stage_geometry(c.params(), j).unwrap());
        }
    }

    #[test]
    fn locate_columns_and_spacers() {
        let c = Construction::from_preset(&FamilyPreset::Toy).unwrap();
        // Stage 2 → 3: columns at 0 and 3, height 3, one spacer at level 6.
        let g = c.stage(2);
        assert_eq!(g.locate(&Int::from(4)), Some((1, Int::one())));
        assert_eq!(g.locate(&Int::from(2)), Some((0, Int::from(2))));
        assert_eq!(g.locate(&Int::from(6)), None);
        assert_eq!(c.ancestor(&Int::from(4), 3, 1), Some(Int::zero()));
        assert_eq!(c.ancestor(&Int::from(5), 3, 1), None);
    }
}
