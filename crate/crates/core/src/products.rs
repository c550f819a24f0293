//! Product systems `T_left^m × T_right^n` measured on rectangles, where the
//! measure factorizes.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use num_traits::{Signed, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::construction::{Construction, ConstructionParams};
use crate::rational::{serde_int, serde_rational};
use crate::tower::{apply_power_bounds, LevelSet, MeasureBound};
use crate::{Error, Int, Rational};

#[derive(Debug, Clone)]
pub struct ProductSystem {
    pub left: Arc<Construction>,
    pub m: Int,
    pub right: Arc<Construction>,
    pub n: Int,
}

impl ProductSystem {
    pub fn new(left: Arc<Construction>, m: impl Into<Int>, right: Arc<Construction>, n: impl Into<Int>) -> Result<Self, Error> {
        let (m, n) = (m.into(), n.into());
        if m.is_zero() || n.is_zero() {
            return Err(Error::InvalidParams("product exponents must be nonzero".into()));
        }
        Ok(ProductSystem { left, m, right, n })
    }

    /// `T^m × T^n` over a single construction.
    pub fn power_pair(c: &Arc<Construction>, m: impl Into<Int>, n: impl Into<Int>) -> Result<Self, Error> {
        ProductSystem::new(Arc::clone(c), m, Arc::clone(c), n)
    }

    fn check(&self, a: &LevelSet, a2: &LevelSet) -> Result<(), Error> {
        if !a.construction().same_as(&self.left) || !a2.construction().same_as(&self.right) {
            return Err(Error::ConstructionMismatch);
        }
        Ok(())
    }
}

/// `μ(T_left^{mk}A ∩ A) · μ(T_right^{nk}A′ ∩ A′)`.
pub fn product_return(
    sys: &ProductSystem,
    a: &LevelSet,
    a2: &LevelSet,
    k: &Int,
    max_stage: Option<usize>,
) -> Result<MeasureBound, Error> {
    sys.check(a, a2)?;
    let left = apply_power_bounds(a, a, &(&sys.m * k), max_stage)?;
    let right = apply_power_bounds(a2, a2, &(&sys.n * k), max_stage)?;
    Ok(&left * &right)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum ReturnVerdict {
    /// Every scanned return has upper bound 0.
    ProvenZero,
    /// Some return is bracketed around 0 without being pinned.
    Unresolved,
    /// Some return is certainly positive.
    Nonzero,
}

impl std::fmt::Display for ReturnVerdict {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ReturnVerdict::ProvenZero => "PROVEN-ZERO",
            ReturnVerdict::Unresolved => "UNRESOLVED",
            ReturnVerdict::Nonzero => "NONZERO",
        })
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct ReturnRow {
    #[serde(with = "serde_int")]
    pub k: Int,
    pub left: MeasureBound,
    /// Skipped when the left factor is already 0.
    pub right: Option<MeasureBound>,
    pub product: MeasureBound,
}

#[derive(Debug, Clone, Serialize)]
pub struct RectangleReturnReport {
    pub left_set: String,
    pub right_set: String,
    pub scanned: usize,
    pub rows: Vec<ReturnRow>,
    /// Rows whose return is not certified zero.
    pub nonzero: Vec<ReturnRow>,
    pub verdict: ReturnVerdict,
    /// Finite scans are evidence; the infinite tail is not computed.
    pub note: &'static str,
}

const SCAN_NOTE: &str = "finite scan only: zero returns on the sampled shifts are evidence, not a proof of dissipativity";

/// `count` shifts spread evenly over `(lo, hi]`, always including `hi`.
pub fn sample_shifts(lo: &Int, hi: &Int, count: usize) -> Vec<Int> {
    let span = hi - lo;
    if !span.is_positive() || count == 0 {
        return Vec::new();
    }
    let count_int = Int::from(count);
    if span <= count_int {
        return num_iter(lo + 1, hi);
    }
    let mut out: Vec<Int> = (1..=count).map(|i| lo + (&span * Int::from(i)) / &count_int).collect();
    out.dedup();
    out
}

fn num_iter(from: Int, to: &Int) -> Vec<Int> {
    let mut out = Vec::new();
    let mut k = from;
    while k <= *to {
        out.push(k.clone());
        k += 1;
    }
    out
}

/// Read-through cache of one-dimensional returns `μ(T^s A ∩ A)`, keyed by
/// the set's text form and the shift.
#[derive(Default)]
pub struct ReturnCache {
    map: Mutex<HashMap<(String, Int), MeasureBound>>,
}

impl ReturnCache {
    pub fn new() -> Self {
        ReturnCache::default()
    }

    pub fn get(&self, a: &LevelSet, shift: &Int, max_stage: Option<usize>) -> Result<MeasureBound, Error> {
        let key = (a.to_string(), shift.clone());
        if let Some(hit) = self.map.lock().expect("cache poisoned").get(&key) {
            return Ok(hit.clone());
        }
        let value = apply_power_bounds(a, a, shift, max_stage)?;
        self.map.lock().expect("cache poisoned").insert(key, value.clone());
        Ok(value)
    }

    pub fn len(&self) -> usize {
        self.map.lock().expect("cache poisoned").len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

/// Product returns of the rectangle `A × A′` over the given shifts.
pub fn dissipativity_scan(
    sys: &ProductSystem,
    a: &LevelSet,
    a2: &LevelSet,
    ks: &[Int],
    cache: &ReturnCache,
    max_stage: Option<usize>,
) -> Result<RectangleReturnReport, Error> {
    sys.check(a, a2)?;
    if ks.iter().any(|k| !k.is_positive()) {
        return Err(Error::Precondition("scanned shifts must be at least 1".into()));
    }
    let rows: Vec<ReturnRow> = ks
        .par_iter()
        .map(|k| {
            let left = cache.get(a, &(&sys.m * k), max_stage)?;
            if left.is_zero() {
                let product = MeasureBound::exact(Rational::zero(), left.resolved_stage);
                return Ok(ReturnRow { k: k.clone(), left, right: None, product });
            }
            let right = cache.get(a2, &(&sys.n * k), max_stage)?;
            let product = &left * &right;
            Ok(ReturnRow { k: k.clone(), left, right: Some(right), product })
        })
        .collect::<Result<_, Error>>()?;
    let nonzero: Vec<ReturnRow> = rows.iter().filter(|r| !r.product.is_zero()).cloned().collect();
    let verdict = if nonzero.is_empty() {
        ReturnVerdict::ProvenZero
    } else if nonzero.iter().any(|r| r.product.lo.is_positive()) {
        ReturnVerdict::Nonzero
    } else {
        ReturnVerdict::Unresolved
    };
    Ok(RectangleReturnReport {
        left_set: a.to_string(),
        right_set: a2.to_string(),
        scanned: rows.len(),
        rows,
        nonzero,
        verdict,
        note: SCAN_NOTE,
    })
}

#[derive(Debug, Clone, Serialize)]
pub struct RatioRow {
    pub i: usize,
    #[serde(with = "serde_int")]
    pub h: Int,
    #[serde(with = "serde_int")]
    pub h_prime: Int,
    #[serde(with = "serde_rational")]
    pub ratio: Rational,
    #[serde(with = "serde_rational")]
    pub deviation: Rational,
}

/// `h_i / h′_i` and `|h_i / h′_i − target|` for `i ≤ J`.
pub fn ratio_condition(
    left: &ConstructionParams,
    right: &ConstructionParams,
    stages: usize,
    target: &Rational,
) -> Result<Vec<RatioRow>, Error> {
    let a = Construction::new(left.clone())?;
    let b = Construction::new(right.clone())?;
    Ok((1..=stages)
        .map(|i| {
            let (h, h_prime) = (a.height(i), b.height(i));
            let ratio = Rational::new(h.clone(), h_prime.clone());
            let deviation = (&ratio - target).abs();
            RatioRow { i, h, h_prime, ratio, deviation }
        })
        .collect())
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
    fn product_return_cases() {
        let c = Construction::from_preset(&FamilyPreset::Utv1).unwrap();
        let sys = ProductSystem::power_pair(&c, 1, 1).unwrap();
        let e2 = LevelSet::base(&c, 2).unwrap();
        let mu = e2.measure();
        let at_zero = product_return(&sys, &e2, &e2, &Int::zero(), None).unwrap();
        assert_eq!(at_zero.value(), Some(&(&mu * &mu)));
        for j in 3..=6 {
            let v = product_return(&sys, &e2, &e2, &c.height(j), None).unwrap();
            let half = &mu * q(1, 2);
            assert_eq!(v.value(), Some(&(&half * &half)));
        }
        assert!(product_return(&sys, &e2, &e2, &Int::one(), None).unwrap().is_zero());
        assert!(ProductSystem::power_pair(&c, 0, 1).is_err());
    }

    fn thm2_with_top_spacer(multiple: i64) -> Arc<Construction> {
        let spacers = vec![SpacerRule::Zero, SpacerRule::Sigma, SpacerRule::HeightMultiple(Int::from(multiple))];
        Construction::new(ConstructionParams::new(2, spacers, Rational::one()).unwrap()).unwrap()
    }

    #[test]
    fn scan_cross_power_needs_a_tall_top_spacer() {
        // With s_j(3) = j·h_j the stage-4 top spacer is only 4h_4 and
        // T^{3k} brings E_2 back for k = 453.
        let c = Construction::from_preset(&FamilyPreset::Thm2 { n: 2 }).unwrap();
        let sys = ProductSystem::power_pair(&c, 1, 3).unwrap();
        let e2 = LevelSet::base(&c, 2).unwrap();
        let h4 = c.height(4);
        let ks = sample_shifts(&h4, &(&h4 + 2000), 2000);
        assert_eq!(ks.len(), 2000);
        let report = dissipativity_scan(&sys, &e2, &e2, &ks, &ReturnCache::new(), None).unwrap();
        assert_eq!(report.verdict, ReturnVerdict::Nonzero);
        assert_eq!(report.nonzero[0].k, Int::from(453));
        let brute_left = crate::oracle::oracle_intersection(&e2, &e2, &Int::from(453), 5).unwrap();
        let brute_right = crate::oracle::oracle_intersection(&e2, &e2, &Int::from(1359), 6).unwrap();
        assert!(brute_left.is_defined() && brute_right.is_defined());
        assert_eq!(brute_left.value * brute_right.value, q(2, 19683));

        let tall = thm2_with_top_spacer(8);
        let sys = ProductSystem::power_pair(&tall, 1, 3).unwrap();
        let e2 = LevelSet::base(&tall, 2).unwrap();
        let h4 = tall.height(4);
        let ks = sample_shifts(&h4, &(&h4 + 2000), 2000);
        let report = dissipativity_scan(&sys, &e2, &e2, &ks, &ReturnCache::new(), None).unwrap();
        assert_eq!(report.verdict, ReturnVerdict::ProvenZero);
    }

    #[test]
    fn scan_square_is_not_dissipative() {
        let c = Construction::from_preset(&FamilyPreset::Utv1).unwrap();
        let sys = ProductSystem::power_pair(&c, 1, 1).unwrap();
        let e2 = LevelSet::base(&c, 2).unwrap();
        let cache = ReturnCache::new();
        let report = dissipativity_scan(&sys, &e2, &e2, &[c.height(4)], &cache, None).unwrap();
        assert_eq!(report.verdict, ReturnVerdict::Nonzero);
        let empty = LevelSet::empty(&c, 2);
        let report = dissipativity_scan(&sys, &empty, &empty, &[Int::one(), c.height(4)], &cache, None).unwrap();
        assert_eq!(report.verdict, ReturnVerdict::ProvenZero);
        assert!(dissipativity_scan(&sys, &e2, &e2, &[Int::zero()], &cache, None).is_err());
    }

    #[test]
    fn sampling() {
        let s = sample_shifts(&Int::from(10), &Int::from(14), 256);
        assert_eq!(s, (11..=14).map(Int::from).collect::<Vec<_>>());
        let s = sample_shifts(&Int::from(0), &Int::from(1000), 4);
        assert_eq!(s, [250, 500, 750, 1000].map(Int::from));
        assert!(sample_shifts(&Int::from(5), &Int::from(5), 3).is_empty());
    }

    #[test]
    fn ratios() {
        let utv1 = FamilyPreset::Utv1.params().unwrap();
        let scaled = FamilyPreset::Scaled { a: q(2, 1) }.params().unwrap();
        let rows = ratio_condition(&scaled, &utv1, 8, &q(2, 1)).unwrap();
        let last = &rows[7];
        assert!(last.deviation <= Rational::new(Int::one(), last.h_prime.clone()));
        let same = ratio_condition(&utv1, &utv1, 6, &q(1, 1)).unwrap();
        assert!(same.iter().all(|r| r.ratio == q(1, 1)));
        let off = ratio_condition(&FamilyPreset::Scaled { a: q(3, 2) }.params().unwrap(), &utv1, 8, &q(1, 1)).unwrap();
        assert!(off[4..].iter().all(|r| r.deviation > q(2, 5)));
    }
}
