//! Correlation sequences `c(n) = μ(TⁿA ∩ A)/μ(A)` and the floating-point
//! reporting built on them: Fejér density estimates, Toeplitz checks and
//! suspension correlations.
//!
//! Correlations are exact rationals. Floats appear only in the density grid,
//! the eigenvalue check and `exp`.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, RealField};
use num_traits::{Float, FloatConst, Signed, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::rational::{serde_int, serde_rational, to_f64};
use crate::tower::{apply_power_bounds, LevelSet, MeasureBound};
use crate::{Error, Int, Rational};

#[derive(Debug, Clone, Serialize)]
pub struct UnresolvedCorrelation {
    #[serde(with = "serde_int")]
    pub n: Int,
    /// `μ(TⁿA ∩ A)/μ(A)` bracket.
    pub bound: MeasureBound,
}

#[derive(Debug, Clone)]
pub struct CorrelationSequence {
    values: BTreeMap<Int, Rational>,
    unresolved: Vec<UnresolvedCorrelation>,
}

impl CorrelationSequence {
    pub fn from_values(values: impl IntoIterator<Item = (Int, Rational)>) -> Self {
        CorrelationSequence { values: values.into_iter().collect(), unresolved: Vec::new() }
    }

    pub fn get(&self, n: &Int) -> Result<&Rational, Error> {
        self.values.get(n).ok_or_else(|| Error::MissingCorrelation(n.clone()))
    }

    pub fn values(&self) -> &BTreeMap<Int, Rational> {
        &self.values
    }

    pub fn unresolved(&self) -> &[UnresolvedCorrelation] {
        &self.unresolved
    }

    /// `c(0), …, c(N−1)` as floats; every index must be resolved.
    pub fn prefix<F: Float>(&self, order: usize) -> Result<Vec<F>, Error> {
        (0..order)
            .map(|n| {
                let c = self.get(&Int::from(n))?;
                Ok(F::from(to_f64(c)).expect("f64 fits"))
            })
            .collect()
    }

    /// Pairs `n` with `c(n) ≠ c(−n)` among indices present with both signs.
    pub fn asymmetries(&self) -> Vec<Int> {
        self.values
            .iter()
            .filter(|(n, _)| n.is_positive())
            .filter(|(n, c)| self.values.get(&-(*n).clone()).is_some_and(|m| m != *c))
            .map(|(n, _)| n.clone())
            .collect()
    }
}

/// Exact `c(n)` for each requested shift. Shifts whose bound stays open are
/// kept aside as intervals.
pub fn correlations(a: &LevelSet, shifts: &[Int], max_stage: Option<usize>) -> Result<CorrelationSequence, Error> {
    let mass = a.measure();
    if !mass.is_positive() {
        return Err(Error::Precondition("correlations need a base set of positive measure".into()));
    }
    let bounds: Vec<(Int, MeasureBound)> = shifts
        .par_iter()
        .map(|n| Ok((n.clone(), apply_power_bounds(a, a, n, max_stage)?)))
        .collect::<Result<_, Error>>()?;
    let inv = mass.recip();
    let mut values = BTreeMap::new();
    let mut unresolved = Vec::new();
    for (n, bound) in bounds {
        let bound = bound.scale(&inv);
        match bound.value() {
            Some(v) => {
                values.insert(n, v.clone());
            }
            None => unresolved.push(UnresolvedCorrelation { n, bound }),
        }
    }
    Ok(CorrelationSequence { values, unresolved })
}

/// `c₁(mk)·c₂(nk)`: the correlation of `1_A ⊗ 1_A′` under `Tᵐ ⊗ Tⁿ`.
pub fn product_correlation(
    c1: &CorrelationSequence,
    c2: &CorrelationSequence,
    m: &Int,
    n: &Int,
    k: &Int,
) -> Result<Rational, Error> {
    let left = c1.get(&(m * k))?;
    if left.is_zero() {
        // Still demand the right factor so out-of-range shifts are caught.
        c2.get(&(n * k))?;
        return Ok(Rational::zero());
    }
    Ok(left * c2.get(&(n * k))?)
}

/// `(e^c − 1)/(e − 1)`.
pub fn suspension_correlation<F: Float>(c: F) -> F {
    let one = F::one();
    c.exp_m1() / (one.exp() - one)
}

/// Bracket on the suspension correlation from a bracket on `c`.
pub fn suspension_interval<F: Float>(lo: F, hi: F) -> (F, F) {
    (suspension_correlation(lo), suspension_correlation(hi))
}

#[derive(Debug, Clone, Serialize)]
pub struct SpectralDensityEstimate<F> {
    pub order: usize,
    pub grid: Vec<F>,
    pub density: Vec<F>,
    pub max_over_mean: F,
    /// Share of the total mass carried by the top 5% of grid points.
    pub top5_share: F,
}

impl<F: Float> SpectralDensityEstimate<F> {
    pub fn mean(&self) -> F {
        let sum = self.density.iter().fold(F::zero(), |acc, &d| acc + d);
        sum / F::from(self.density.len()).expect("grid size fits")
    }

    pub fn min(&self) -> F {
        self.density.iter().fold(F::infinity(), |acc, &d| acc.min(d))
    }

    /// Largest pointwise gap to another estimate on the same grid.
    pub fn max_abs_difference(&self, other: &Self) -> F {
        self.density
            .iter()
            .zip(&other.density)
            .fold(F::zero(), |acc, (&x, &y)| acc.max((x - y).abs()))
    }
}

/// `F_N(θ) = c(0) + 2 Σ_{n=1}^{N−1} (1 − n/N) c(n) cos nθ` on `M` equally
/// spaced points of `[0, 2π)`, for a symmetric sequence given by `c[0..N]`.
pub fn fejer_density<F>(c: &[F], order: usize, points: usize) -> Result<SpectralDensityEstimate<F>, Error>
where
    F: Float + FloatConst + Send + Sync,
{
    if order == 0 || points == 0 {
        return Err(Error::Precondition("Fejér order and grid size must be positive".into()));
    }
    if c.len() < order {
        return Err(Error::Precondition(format!("need {order} correlations, have {}", c.len())));
    }
    let two = F::one() + F::one();
    let n_f = F::from(order).expect("order fits");
    let step = two * F::PI() / F::from(points).expect("grid size fits");
    let grid: Vec<F> = (0..points).map(|i| F::from(i).expect("index fits") * step).collect();
    let weighted: Vec<(F, F)> = (1..order)
        .filter(|&n| !c[n].is_zero())
        .map(|n| {
            let nf = F::from(n).expect("index fits");
            (nf, two * (F::one() - nf / n_f) * c[n])
        })
        .collect();
    let density: Vec<F> = grid
        .par_iter()
        .map(|&theta| weighted.iter().fold(c[0], |acc, &(nf, w)| acc + w * (nf * theta).cos()))
        .collect();
    let mean = density.iter().fold(F::zero(), |acc, &d| acc + d) / F::from(points).expect("grid size fits");
    let max = density.iter().fold(F::neg_infinity(), |acc, &d| acc.max(d));
    let mut sorted: Vec<F> = density.iter().map(|&d| d.max(F::zero())).collect();
    sorted.sort_by(|x, y| y.partial_cmp(x).expect("finite density"));
    let top = points.div_ceil(20);
    let total = sorted.iter().fold(F::zero(), |acc, &d| acc + d);
    let top_sum = sorted[..top].iter().fold(F::zero(), |acc, &d| acc + d);
    let top5_share = if total > F::zero() { top_sum / total } else { F::zero() };
    Ok(SpectralDensityEstimate { order, grid, density, max_over_mean: max / mean, top5_share })
}

/// Smallest eigenvalue of the Toeplitz section `[c(i − j)]_{i,j < order}`.
pub fn toeplitz_min_eigenvalue<F: RealField + Copy>(c: &[F], order: usize) -> Result<F, Error> {
    if order == 0 || c.len() < order {
        return Err(Error::Precondition(format!("Toeplitz order {order} needs that many correlations")));
    }
    let m = DMatrix::from_fn(order, order, |i, j| c[i.abs_diff(j)]);
    let eig = m.symmetric_eigen();
    Ok(eig.eigenvalues.iter().copied().fold(c[0], |acc, x| if x < acc { x } else { acc }))
}

#[derive(Debug, Clone, Serialize)]
pub struct CorrelationRow {
    #[serde(with = "serde_int")]
    pub n: Int,
    #[serde(with = "serde_rational")]
    pub c: Rational,
}

impl CorrelationSequence {
    pub fn rows(&self) -> Vec<CorrelationRow> {
        self.values.iter().map(|(n, c)| CorrelationRow { n: n.clone(), c: c.clone() }).collect()
    }
}

#[cfg(test)]
mod tests {
    use num_traits::One;

    use super::*;
    use crate::construction::{Construction, FamilyPreset};

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    fn ints(range: std::ops::RangeInclusive<i64>) -> Vec<Int> {
        range.map(Int::from).collect()
    }

    #[test]
    fn utv1_correlations() {
        let c = Construction::from_preset(&FamilyPreset::Utv1).unwrap();
        let e2 = LevelSet::base(&c, 2).unwrap();
        let mut shifts = ints(-10..=10);
        shifts.extend((3..=7).map(|j| c.height(j)));
        let seq = correlations(&e2, &shifts, None).unwrap();
        assert!(seq.unresolved().is_empty());
        assert_eq!(seq.get(&Int::zero()).unwrap(), &q(1, 1));
        assert!(seq.asymmetries().is_empty());
        for j in 3..=7 {
            assert_eq!(seq.get(&c.height(j)).unwrap(), &q(1, 2));
        }
        // 170 lies in the stage-4 dead zone [h_4 + 2h_3, h_5 − 2h_4].
        let dead = correlations(&e2, &[Int::from(170)], None).unwrap();
        assert_eq!(dead.get(&Int::from(170)).unwrap(), &q(0, 1));
        assert!(matches!(seq.get(&Int::from(11)), Err(Error::MissingCorrelation(_))));
    }

    #[test]
    fn product_correlations() {
        let c = Construction::from_preset(&FamilyPreset::Utv1).unwrap();
        let e2 = LevelSet::base(&c, 2).unwrap();
        let h5 = c.height(5);
        let seq = correlations(&e2, &[Int::zero(), h5.clone()], None).unwrap();
        let one = Int::one();
        assert_eq!(product_correlation(&seq, &seq, &one, &one, &Int::zero()).unwrap(), q(1, 1));
        assert_eq!(product_correlation(&seq, &seq, &one, &one, &h5).unwrap(), q(1, 4));
        assert!(product_correlation(&seq, &seq, &one, &Int::from(3), &h5).is_err());

        // T × T³ over thm2(2) with base E_4: the stage-4 top spacer 4h_4 is
        // short enough that k = 5h_4 + 3 returns in both factors.
        let t = Construction::from_preset(&FamilyPreset::Thm2 { n: 2 }).unwrap();
        let e4 = LevelSet::base(&t, 4).unwrap();
        let k: Int = t.height(4) * 5 + 3;
        let seq = correlations(&e4, &[k.clone(), &k * 3], None).unwrap();
        assert_eq!(product_correlation(&seq, &seq, &one, &Int::from(3), &k).unwrap(), q(1, 81));
    }

    #[test]
    fn suspension() {
        assert_eq!(suspension_correlation(0.0_f64), 0.0);
        assert!((suspension_correlation(1.0_f64) - 1.0).abs() < 1e-15);
        let half = suspension_correlation(0.5_f64);
        let closed = (0.5_f64.exp() - 1.0) / (1.0_f64.exp() - 1.0);
        assert!((half - closed).abs() < 1e-15);
        assert!((half - 0.3775).abs() < 1e-4);
        let (lo, hi) = suspension_interval(0.25_f32, 0.5_f32);
        assert!(lo < hi);
    }

    #[test]
    fn fejer_flat_and_dirac() {
        let mut delta = vec![0.0_f64; 16];
        delta[0] = 1.0;
        let flat = fejer_density(&delta, 16, 64).unwrap();
        assert!(flat.density.iter().all(|&d| (d - 1.0).abs() < 1e-12));
        assert!((flat.max_over_mean - 1.0).abs() < 1e-12);

        let ones = vec![1.0_f64; 64];
        let small = fejer_density(&ones, 8, 256).unwrap();
        let large = fejer_density(&ones, 64, 256).unwrap();
        assert!((large.density[0] - 64.0).abs() < 1e-9);
        assert!(large.max_over_mean > 4.0 * small.max_over_mean);
        assert!(large.min() > -1e-9);
        assert!((large.mean() - 1.0).abs() < 1e-9);
        assert!(fejer_density(&ones, 65, 8).is_err());
    }

    #[test]
    fn fejer_utv1_concentrates() {
        let c = Construction::from_preset(&FamilyPreset::Utv1).unwrap();
        let e2 = LevelSet::base(&c, 2).unwrap();
        let n5 = 721usize;
        let shifts: Vec<Int> = (0..n5 as i64).map(Int::from).collect();
        let seq = correlations(&e2, &shifts, None).unwrap();
        let values: Vec<f64> = seq.prefix(n5).unwrap();
        let at4 = fejer_density(&values, 121, 2048).unwrap();
        let at5 = fejer_density(&values, n5, 2048).unwrap();
        assert!(at5.max_over_mean > at4.max_over_mean);
        assert!(at5.min() > -1e-9);
        let single: DensityCheck = fejer_density(&values.iter().map(|&x| x as f32).collect::<Vec<_>>(), 121, 256).unwrap();
        assert!(single.min() > -1e-3);
    }

    type DensityCheck = SpectralDensityEstimate<f32>;

    #[test]
    fn toeplitz() {
        let c = [1.0_f64, 0.5, 0.25, 0.125];
        assert!(toeplitz_min_eigenvalue(&c, 4).unwrap() > 0.0);
        let bad = [1.0_f64, 1.0, -1.0];
        assert!(toeplitz_min_eigenvalue(&bad, 3).unwrap() < -0.5);
        assert!(toeplitz_min_eigenvalue(&c, 5).is_err());
    }
}
