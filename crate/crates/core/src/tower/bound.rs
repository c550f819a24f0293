use std::ops::{Add, Mul};

use num_traits::{Signed, Zero};
use serde::Serialize;

use crate::rational::serde_rational;
use crate::Rational;

/// Exact bracket `[lo, hi]` around a measure value.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct MeasureBound {
    #[serde(with = "serde_rational")]
    pub lo: Rational,
    #[serde(with = "serde_rational")]
    pub hi: Rational,
    /// Deepest stage the computation reached.
    pub resolved_stage: usize,
}

impl MeasureBound {
    pub fn exact(value: Rational, stage: usize) -> Self {
        MeasureBound { lo: value.clone(), hi: value, resolved_stage: stage }
    }

    pub fn zero() -> Self {
        MeasureBound::exact(Rational::zero(), 0)
    }

    pub fn new(lo: Rational, hi: Rational, stage: usize) -> Self {
        debug_assert!(lo <= hi, "inverted bound");
        MeasureBound { lo, hi, resolved_stage: stage }
    }

    pub fn is_exact(&self) -> bool {
        self.lo == self.hi
    }

    pub fn value(&self) -> Option<&Rational> {
        self.is_exact().then_some(&self.lo)
    }

    pub fn unresolved_mass(&self) -> Rational {
        &self.hi - &self.lo
    }

    pub fn contains(&self, value: &Rational) -> bool {
        self.lo <= *value && *value <= self.hi
    }

    pub fn is_zero(&self) -> bool {
        self.hi.is_zero()
    }

    /// `c·[lo, hi]` for `c ≥ 0`.
    pub fn scale(&self, factor: &Rational) -> Self {
        debug_assert!(!factor.is_negative());
        MeasureBound::new(&self.lo * factor, &self.hi * factor, self.resolved_stage)
    }

    /// Interval of `x − y` for `x ∈ self`, `y ∈ other`.
    pub fn minus(&self, other: &MeasureBound) -> (Rational, Rational) {
        (&self.lo - &other.hi, &self.hi - &other.lo)
    }

    /// Bracket on `|x − y|`.
    pub fn abs_difference(&self, other: &MeasureBound) -> (Rational, Rational) {
        let (lo, hi) = self.minus(other);
        if lo.is_positive() {
            (lo, hi)
        } else if hi.is_negative() {
            (-hi, -lo)
        } else {
            (Rational::zero(), hi.max(-lo))
        }
    }
}

impl Add for &MeasureBound {
    type Output = MeasureBound;

    fn add(self, other: &MeasureBound) -> MeasureBound {
        MeasureBound::new(
            &self.lo + &other.lo,
            &self.hi + &other.hi,
            self.resolved_stage.max(other.resolved_stage),
        )
    }
}

/// Product of two nonnegative brackets.
impl Mul for &MeasureBound {
    type Output = MeasureBound;

    fn mul(self, other: &MeasureBound) -> MeasureBound {
        MeasureBound::new(
            &self.lo * &other.lo,
            &self.hi * &other.hi,
            self.resolved_stage.max(other.resolved_stage),
        )
    }
}

impl std::fmt::Display for MeasureBound {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        if self.is_exact() {
            write!(f, "{}", self.lo)
        } else {
            write!(f, "[{}, {}]", self.lo, self.hi)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    #[test]
    fn arithmetic() {
        let a = MeasureBound::new(q(1, 4), q(1, 2), 3);
        let b = MeasureBound::exact(q(1, 2), 5);
        assert_eq!((&a + &b), MeasureBound::new(q(3, 4), q(1, 1), 5));
        assert_eq!((&a * &b), MeasureBound::new(q(1, 8), q(1, 4), 5));
        assert_eq!(a.scale(&q(2, 1)).hi, q(1, 1));
        assert_eq!(a.unresolved_mass(), q(1, 4));
        assert!(b.is_exact() && !a.is_exact());
    }

    #[test]
    fn abs_difference_cases() {
        let a = MeasureBound::new(q(1, 4), q(1, 2), 0);
        assert_eq!(a.abs_difference(&MeasureBound::exact(q(1, 8), 0)), (q(1, 8), q(3, 8)));
        assert_eq!(a.abs_difference(&MeasureBound::exact(q(1, 1), 0)), (q(1, 2), q(3, 4)));
        assert_eq!(a.abs_difference(&MeasureBound::exact(q(1, 3), 0)), (q(0, 1), q(1, 6)));
    }
}
