use std::fmt;
use std::sync::Arc;

use num_traits::{Signed, Zero};

use crate::construction::Construction;
use crate::{Error, Int, Rational};

/// A finite-measure set given as a union of levels of the stage-`j` tower,
/// i.e. a `ξ_j`-measurable set. Levels are kept sorted and distinct.
#[derive(Clone)]
pub struct LevelSet {
    construction: Arc<Construction>,
    stage: usize,
    levels: Vec<Int>,
}

impl LevelSet {
    pub fn new(
        construction: &Arc<Construction>,
        stage: usize,
        levels: impl IntoIterator<Item = Int>,
    ) -> Result<Self, Error> {
        if stage == 0 {
            return Err(Error::StageIndex(0));
        }
        let height = construction.height(stage);
        let mut levels: Vec<Int> = levels.into_iter().collect();
        levels.sort();
        levels.dedup();
        if let Some(bad) = levels.iter().find(|l| l.is_negative() || **l >= height) {
            return Err(Error::LevelOutOfRange { stage, level: bad.clone(), height });
        }
        Ok(LevelSet { construction: Arc::clone(construction), stage, levels })
    }

    pub(crate) fn from_sorted(construction: &Arc<Construction>, stage: usize, levels: Vec<Int>) -> Self {
        debug_assert!(levels.windows(2).all(|w| w[0] < w[1]));
        LevelSet { construction: Arc::clone(construction), stage, levels }
    }

    pub fn empty(construction: &Arc<Construction>, stage: usize) -> Self {
        LevelSet::from_sorted(construction, stage, Vec::new())
    }

    /// `T^i E_j`: the single level `i` of the stage-`j` tower.
    pub fn level(construction: &Arc<Construction>, stage: usize, i: impl Into<Int>) -> Result<Self, Error> {
        LevelSet::new(construction, stage, [i.into()])
    }

    /// `E_j`.
    pub fn base(construction: &Arc<Construction>, stage: usize) -> Result<Self, Error> {
        LevelSet::level(construction, stage, 0)
    }

    /// The whole stage-`j` tower.
    pub fn tower(construction: &Arc<Construction>, stage: usize) -> Result<Self, Error> {
        if stage == 0 {
            return Err(Error::StageIndex(0));
        }
        let height = construction.height(stage);
        let mut levels = Vec::new();
        let mut l = Int::zero();
        while l < height {
            levels.push(l.clone());
            l += 1;
        }
        Ok(LevelSet::from_sorted(construction, stage, levels))
    }

    /// Parses `"stage=J; levels=0,1,3,4"`.
    pub fn parse(construction: &Arc<Construction>, text: &str) -> Result<Self, Error> {
        let mut stage = None;
        let mut levels = None;
        for part in text.split(';').map(str::trim).filter(|p| !p.is_empty()) {
            let (key, value) = part
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("expected key=value in {part:?}")))?;
            match key.trim() {
                "stage" => {
                    stage = Some(
                        value
                            .trim()
                            .parse::<usize>()
                            .map_err(|_| Error::Parse(format!("bad stage {value:?}")))?,
                    )
                }
                "levels" => {
                    let parsed: Result<Vec<Int>, Error> = value
                        .split(',')
                        .map(str::trim)
                        .filter(|v| !v.is_empty())
                        .map(crate::rational::parse_int)
                        .collect();
                    levels = Some(parsed?);
                }
                other => return Err(Error::Parse(format!("unknown key {other:?}"))),
            }
        }
        let stage = stage.ok_or_else(|| Error::Parse("missing stage=".into()))?;
        let levels = levels.ok_or_else(|| Error::Parse("missing levels=".into()))?;
        LevelSet::new(construction, stage, levels)
    }

    pub fn construction(&self) -> &Arc<Construction> {
        &self.construction
    }

    pub fn stage(&self) -> usize {
        self.stage
    }

    pub fn levels(&self) -> &[Int] {
        &self.levels
    }

    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    pub fn width(&self) -> Rational {
        self.construction.level_width(self.stage)
    }

    pub fn measure(&self) -> Rational {
        self.width() * Rational::from_integer(Int::from(self.levels.len()))
    }

    pub fn contains_level(&self, level: &Int) -> bool {
        self.levels.binary_search(level).is_ok()
    }

    /// Whether level `level` of the stage-`stage` tower lies in this set;
    /// `stage` must not be coarser than the set's own stage.
    pub(crate) fn contains_fine_level(&self, level: &Int, stage: usize) -> bool {
        self.construction
            .ancestor(level, stage, self.stage)
            .is_some_and(|l| self.contains_level(&l))
    }

    /// The same set written with stage-`to` levels.
    pub fn refine(&self, to: usize) -> Result<LevelSet, Error> {
        if to < self.stage {
            return Err(Error::RefineDown { from: self.stage, to });
        }
        let levels = refine_levels(&self.construction, self.levels.clone(), self.stage, to);
        Ok(LevelSet::from_sorted(&self.construction, to, levels))
    }

    fn check_same(&self, other: &LevelSet) -> Result<(), Error> {
        if self.construction.same_as(&other.construction) {
            Ok(())
        } else {
            Err(Error::ConstructionMismatch)
        }
    }

    fn common(&self, other: &LevelSet) -> Result<(LevelSet, LevelSet), Error> {
        self.check_same(other)?;
        let stage = self.stage.max(other.stage);
        Ok((self.refine(stage)?, other.refine(stage)?))
    }

    fn merge(&self, other: &LevelSet, keep: impl Fn(bool, bool) -> bool) -> Result<LevelSet, Error> {
        let (a, b) = self.common(other)?;
        let mut out = Vec::new();
        let (mut i, mut k) = (0, 0);
        while i < a.levels.len() || k < b.levels.len() {
            let (take, in_a, in_b) = match (a.levels.get(i), b.levels.get(k)) {
                (Some(x), Some(y)) if x == y => {
                    i += 1;
                    k += 1;
                    (x, true, true)
                }
                (Some(x), Some(y)) if x < y => {
                    i += 1;
                    (x, true, false)
                }
                (Some(x), None) => {
                    i += 1;
                    (x, true, false)
                }
                (_, Some(y)) => {
                    k += 1;
                    (y, false, true)
                }
                (None, None) => unreachable!(),
            };
            if keep(in_a, in_b) {
                out.push(take.clone());
            }
        }
        Ok(LevelSet::from_sorted(&a.construction, a.stage, out))
    }

    /// `A ∩ B`, written at the finer of the two stages.
    pub fn intersect(&self, other: &LevelSet) -> Result<LevelSet, Error> {
        self.merge(other, |a, b| a && b)
    }

    pub fn union(&self, other: &LevelSet) -> Result<LevelSet, Error> {
        self.merge(other, |a, b| a || b)
    }

    pub fn difference(&self, other: &LevelSet) -> Result<LevelSet, Error> {
        self.merge(other, |a, b| a && !b)
    }
}

/// Copies of sorted stage-`from` levels inside the stage-`to` tower, sorted.
pub(crate) fn refine_levels(
    construction: &Construction,
    mut levels: Vec<Int>,
    from: usize,
    to: usize,
) -> Vec<Int> {
    for j in from..to {
        let stage = construction.stage(j);
        let mut next = Vec::with_capacity(levels.len() * stage.cuts());
        for offset in &stage.column_offsets {
            next.extend(levels.iter().map(|l| offset + l));
        }
        levels = next;
    }
    levels
}

impl PartialEq for LevelSet {
    /// Equality of the underlying point sets.
    fn eq(&self, other: &Self) -> bool {
        match self.common(other) {
            Ok((a, b)) => a.levels == b.levels,
            Err(_) => false,
        }
    }
}

impl fmt::Display for LevelSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "stage={}; levels=", self.stage)?;
        for (i, l) in self.levels.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "{l}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for LevelSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "LevelSet({self})")
    }
}
