//! Brute-force model of a truncated construction: every level of the stage-`J`
//! tower is an explicit half-open interval of the line, and `T` is the partial
//! translation carrying level `ℓ` onto level `ℓ + 1`.
//!
//! The layout is produced by literally cutting each interval into `r` equal
//! pieces and appending fresh spacer intervals to the right of everything laid
//! out so far. Sets are measured by interval overlap on the line, so nothing
//! here shares code with [`crate::tower`].

use num_traits::{Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::construction::ConstructionParams;
use crate::rational::serde_rational;
use crate::tower::LevelSet;
use crate::{Error, Int, Rational};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Interval {
    pub left: Rational,
    pub right: Rational,
}

impl Interval {
    pub fn length(&self) -> Rational {
        &self.right - &self.left
    }

    fn overlap(&self, other: &Interval) -> Rational {
        let left = (&self.left).max(&other.left);
        let right = (&self.right).min(&other.right);
        if left < right {
            right - left
        } else {
            Rational::zero()
        }
    }
}

/// Every stage tower from 1 to `J`, as intervals in level order.
#[derive(Debug, Clone)]
pub struct IntervalSystem {
    towers: Vec<Vec<Interval>>,
    /// Per stage: indices of the tower's intervals sorted by left endpoint.
    by_left: Vec<Vec<usize>>,
}

/// `μ(Tⁿ A ∩ B)` restricted to the points whose orbit stays in the stage-`J`
/// tower, plus the mass of the points where `Tⁿ` is undefined at that stage.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OracleValue {
    #[serde(with = "serde_rational")]
    pub value: Rational,
    #[serde(with = "serde_rational")]
    pub undefined: Rational,
    pub stage: usize,
}

impl OracleValue {
    pub fn is_defined(&self) -> bool {
        self.undefined.is_zero()
    }
}

impl IntervalSystem {
    pub fn build(params: &ConstructionParams, stage: usize) -> Result<Self, Error> {
        if stage == 0 {
            return Err(Error::StageIndex(0));
        }
        params.validate()?;
        let h1 = params
            .h1
            .to_usize()
            .ok_or_else(|| Error::Precondition("h1 too large for the oracle".into()))?;
        let width = params.base_width.clone();
        let mut tower: Vec<Interval> = (0..h1)
            .map(|i| {
                let left = &width * Rational::from_integer(Int::from(i));
                Interval { right: &left + &width, left }
            })
            .collect();
        let mut frontier = &width * Rational::from_integer(Int::from(h1));
        let mut width = width;
        let mut towers = vec![tower.clone()];
        for j in 1..stage {
            let r = params.cuts_at(j);
            let spacers = params.spacers_at(j, &Int::from(tower.len()));
            let piece = &width / Rational::from_integer(Int::from(r));
            let mut next = Vec::new();
            for (column, spacer_count) in spacers.iter().enumerate() {
                let shift = &piece * Rational::from_integer(Int::from(column));
                for interval in &tower {
                    let left = &interval.left + &shift;
                    next.push(Interval { right: &left + &piece, left });
                }
                let count = spacer_count
                    .to_usize()
                    .ok_or_else(|| Error::Precondition("spacer count too large for the oracle".into()))?;
                for _ in 0..count {
                    let left = frontier.clone();
                    frontier += &piece;
                    next.push(Interval { left, right: frontier.clone() });
                }
            }
            tower = next;
            width = piece;
            towers.push(tower.clone());
        }
        let by_left = towers
            .iter()
            .map(|t| {
                let mut order: Vec<usize> = (0..t.len()).collect();
                order.sort_by(|&x, &y| t[x].left.cmp(&t[y].left));
                order
            })
            .collect();
        Ok(IntervalSystem { towers, by_left })
    }

    pub fn max_stage(&self) -> usize {
        self.towers.len()
    }

    pub fn height(&self, stage: usize) -> usize {
        self.towers[stage - 1].len()
    }

    pub fn tower(&self, stage: usize) -> &[Interval] {
        &self.towers[stage - 1]
    }

    /// The partial map `T` on stage-`J` level indices.
    pub fn step(&self, stage: usize, level: usize) -> Option<usize> {
        (level + 1 < self.height(stage)).then_some(level + 1)
    }

    /// A stage-`s` level set as disjoint intervals sorted by left endpoint.
    fn to_intervals(&self, set: &LevelSet) -> Result<Vec<Interval>, Error> {
        let tower = self.tower(set.stage());
        let mut out: Vec<Interval> = set
            .levels()
            .iter()
            .map(|l| {
                l.to_usize()
                    .and_then(|i| tower.get(i))
                    .cloned()
                    .ok_or_else(|| Error::Precondition(format!("level {l} outside the oracle")))
            })
            .collect::<Result<_, _>>()?;
        out.sort_by(|x, y| x.left.cmp(&y.left));
        Ok(out)
    }

    /// Stage-`J` level indices whose interval lies inside `pieces`.
    fn levels_inside(&self, stage: usize, pieces: &[Interval]) -> Vec<usize> {
        let tower = self.tower(stage);
        let order = &self.by_left[stage - 1];
        let mut out = Vec::new();
        for piece in pieces {
            let start = order.partition_point(|&i| tower[i].left < piece.left);
            for &i in &order[start..] {
                if tower[i].left >= piece.right {
                    break;
                }
                if tower[i].right <= piece.right {
                    out.push(i);
                }
            }
        }
        out
    }

    fn covered_length(target: &Interval, pieces: &[Interval]) -> Rational {
        let end = pieces.partition_point(|p| p.left < target.right);
        pieces[..end]
            .iter()
            .rev()
            .take_while(|p| p.right > target.left)
            .map(|p| target.overlap(p))
            .fold(Rational::zero(), |acc, x| acc + x)
    }

    /// `μ(Tⁿ A ∩ B)` on the explicit stage-`J` intervals.
    pub fn intersection(&self, a: &LevelSet, b: &LevelSet, n: i64, stage: usize) -> Result<OracleValue, Error> {
        if stage == 0 || stage > self.max_stage() {
            return Err(Error::Precondition(format!(
                "oracle stage {stage} outside 1..={}",
                self.max_stage()
            )));
        }
        if a.stage() > stage || b.stage() > stage {
            return Err(Error::Precondition(format!(
                "sets at stages {} and {} are finer than oracle stage {stage}",
                a.stage(),
                b.stage()
            )));
        }
        let height = self.height(stage);
        if n.unsigned_abs() as usize >= height {
            return Err(Error::ShiftTooLarge {
                shift: Int::from(n),
                stage,
                height: Int::from(height),
            });
        }
        let a_pieces = self.to_intervals(a)?;
        let b_pieces = self.to_intervals(b)?;
        let tower = self.tower(stage);
        let mut value = Rational::zero();
        let mut undefined = Rational::zero();
        for level in self.levels_inside(stage, &a_pieces) {
            let target = level as i64 + n;
            if target < 0 || target >= height as i64 {
                undefined += tower[level].length();
            } else {
                value += Self::covered_length(&tower[target as usize], &b_pieces);
            }
        }
        Ok(OracleValue { value, undefined, stage })
    }

    /// Tries stages from the coarsest admissible one up to the system's
    /// deepest stage and returns the first fully defined value, or the deepest
    /// attempt.
    pub fn resolve(&self, a: &LevelSet, b: &LevelSet, n: i64) -> Result<OracleValue, Error> {
        let floor = a.stage().max(b.stage());
        let mut last = None;
        for stage in floor..=self.max_stage() {
            if n.unsigned_abs() as usize >= self.height(stage) {
                continue;
            }
            let value = self.intersection(a, b, n, stage)?;
            if value.is_defined() {
                return Ok(value);
            }
            last = Some(value);
        }
        last.ok_or_else(|| Error::ShiftTooLarge {
            shift: Int::from(n),
            stage: self.max_stage(),
            height: Int::from(self.height(self.max_stage())),
        })
    }
}

/// One-shot oracle evaluation at stage `J`.
pub fn oracle_intersection(a: &LevelSet, b: &LevelSet, n: &Int, stage: usize) -> Result<OracleValue, Error> {
    if !a.construction().same_as(b.construction()) {
        return Err(Error::ConstructionMismatch);
    }
    let height = a.construction().height(stage.max(1));
    if n.abs() >= height {
        return Err(Error::ShiftTooLarge { shift: n.clone(), stage, height });
    }
    let n = n.to_i64().expect("shift below an oracle-sized height");
    IntervalSystem::build(a.construction().params(), stage)?.intersection(a, b, n, stage)
}
