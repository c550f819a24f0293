use std::ops::RangeInclusive;

use num_traits::{One, Signed, ToPrimitive, Zero};
use rayon::prelude::*;
use serde::Serialize;

use super::{CandidateSequence, OperatorPolynomial};
use crate::construction::{sigma, FamilyPreset};
use crate::rational::{serde_int, serde_rational};
use crate::tower::{apply_power_bounds, LevelSet, MeasureBound};
use crate::{Error, Int, Rational, Status};

/// Evenly spaced interior samples of a dead zone, on top of its endpoints.
pub const DEFAULT_DEAD_ZONE_SAMPLES: usize = 64;

/// `Σ_p c_p μ(T^p A ∩ B)`.
pub fn predict(
    poly: &OperatorPolynomial,
    a: &LevelSet,
    b: &LevelSet,
    max_stage: Option<usize>,
) -> Result<MeasureBound, Error> {
    let mut total = MeasureBound::exact(Rational::zero(), a.stage().max(b.stage()));
    for (power, c) in poly.coeffs() {
        let term = apply_power_bounds(a, b, power, max_stage)?.scale(c);
        total = &total + &term;
    }
    Ok(total)
}

fn status_for(deviation: &(Rational, Rational), tol: &Rational) -> Status {
    if deviation.1 <= *tol {
        Status::Pass
    } else if deviation.0 > *tol {
        Status::Fail
    } else {
        Status::Inconclusive
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct LimitRow {
    pub k: usize,
    #[serde(with = "serde_int")]
    pub n: Int,
    pub pair: usize,
    pub value: MeasureBound,
    pub prediction: MeasureBound,
    #[serde(with = "serde_rational")]
    pub deviation_lo: Rational,
    #[serde(with = "serde_rational")]
    pub deviation_hi: Rational,
    pub status: Status,
}

#[derive(Debug, Clone, Serialize)]
pub struct LimitReport {
    pub sequence: String,
    pub polynomial: String,
    pub rows: Vec<LimitRow>,
    #[serde(with = "serde_rational")]
    pub max_deviation: Rational,
    pub status: Status,
}

/// Checks `|μ(T^{n(k)} A ∩ B) − Σ c_p μ(T^p A ∩ B)| ≤ tol` for every test
/// pair and every `k` in range.
pub fn verify_limit(
    seq: &CandidateSequence,
    poly: &OperatorPolynomial,
    pairs: &[(LevelSet, LevelSet)],
    ks: RangeInclusive<usize>,
    tol: &Rational,
    max_stage: Option<usize>,
) -> Result<LimitReport, Error> {
    let ks: Vec<usize> = ks.collect();
    for &k in &ks {
        let lowest = seq.min_stage(k)?;
        if let Some((a, b)) = pairs.iter().find(|(a, b)| a.stage().max(b.stage()) >= lowest) {
            return Err(Error::Precondition(format!(
                "test pair at stages {}/{} is not below stage {lowest} used at k = {k}",
                a.stage(),
                b.stage()
            )));
        }
    }
    let predictions: Vec<MeasureBound> = pairs
        .iter()
        .map(|(a, b)| predict(poly, a, b, max_stage))
        .collect::<Result<_, _>>()?;
    let jobs: Vec<(usize, usize)> = ks
        .iter()
        .flat_map(|&k| (0..pairs.len()).map(move |p| (k, p)))
        .collect();
    let rows: Vec<LimitRow> = jobs
        .par_iter()
        .map(|&(k, p)| {
            let (a, b) = &pairs[p];
            let n = seq.eval(a.construction(), k)?;
            let value = apply_power_bounds(a, b, &n, max_stage)?;
            let prediction = predictions[p].clone();
            let deviation = value.abs_difference(&prediction);
            let status = status_for(&deviation, tol);
            Ok(LimitRow {
                k,
                n,
                pair: p,
                value,
                prediction,
                deviation_lo: deviation.0,
                deviation_hi: deviation.1,
                status,
            })
        })
        .collect::<Result<_, Error>>()?;
    let max_deviation = rows
        .iter()
        .map(|r| r.deviation_hi.clone())
        .max()
        .unwrap_or_else(Rational::zero);
    let status = Status::all(rows.iter().map(|r| r.status));
    Ok(LimitReport {
        sequence: seq.to_string(),
        polynomial: poly.to_string(),
        rows,
        max_deviation,
        status,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Zone {
    Window,
    DeadZone,
}

#[derive(Debug, Clone, Serialize)]
pub struct ScanRow {
    #[serde(with = "serde_int")]
    pub n: Int,
    pub zone: Zone,
    pub value: MeasureBound,
}

#[derive(Debug, Clone, Serialize)]
pub struct WindowScan {
    pub stage: usize,
    pub rows: Vec<ScanRow>,
    /// Whether every dead-zone value is exactly zero.
    pub dead_zone: Status,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DeadZoneSampling {
    /// Endpoints plus this many evenly spaced interior points.
    Even(usize),
    /// Every `n` in the zone; refused for zones longer than a million.
    Exhaustive,
}

impl Default for DeadZoneSampling {
    fn default() -> Self {
        DeadZoneSampling::Even(DEFAULT_DEAD_ZONE_SAMPLES)
    }
}

fn even_samples(lo: &Int, hi: &Int, interior: usize) -> Vec<Int> {
    if lo > hi {
        return Vec::new();
    }
    let span = hi - lo;
    let parts = Int::from(interior + 1);
    let mut out: Vec<Int> = (0..=interior + 1).map(|i| lo + &span * Int::from(i) / &parts).collect();
    out.dedup();
    out
}

/// `μ(Tⁿ A ∩ B)` across the window `h_j − 2h_{j−1} ≤ n ≤ h_j + 2h_{j−1}` and a
/// sample of the gap `h_j + 2h_{j−1} ≤ n ≤ h_{j+1} − 2h_j` that follows it.
pub fn scan_window(
    j: usize,
    a: &LevelSet,
    b: &LevelSet,
    step: &Int,
    sampling: DeadZoneSampling,
    max_stage: Option<usize>,
) -> Result<WindowScan, Error> {
    if j < 2 {
        return Err(Error::Precondition("window scans need j ≥ 2".into()));
    }
    if a.stage().max(b.stage()) + 1 >= j {
        return Err(Error::Precondition(format!(
            "sets at stages {}/{} must lie below stage {}",
            a.stage(),
            b.stage(),
            j - 1
        )));
    }
    if !step.is_positive() {
        return Err(Error::Precondition("scan step must be positive".into()));
    }
    let c = a.construction();
    let (h_prev, h, h_next) = (c.height(j - 1), c.height(j), c.height(j + 1));
    let window_lo: Int = &h - &h_prev * 2;
    let window_hi: Int = &h + &h_prev * 2;
    let mut jobs: Vec<(Int, Zone)> = Vec::new();
    let mut n = window_lo.clone();
    while n <= window_hi {
        jobs.push((n.clone(), Zone::Window));
        n += step;
    }
    let dead_lo = window_hi.clone();
    let dead_hi: Int = &h_next - &h * 2;
    let dead: Vec<Int> = match sampling {
        DeadZoneSampling::Even(interior) => even_samples(&dead_lo, &dead_hi, interior),
        DeadZoneSampling::Exhaustive => {
            let len = (&dead_hi - &dead_lo).to_i64().unwrap_or(i64::MAX);
            if len > 1_000_000 {
                return Err(Error::Precondition(format!("dead zone of length {len} is too long to scan exhaustively")));
            }
            let mut all = Vec::new();
            let mut n = dead_lo.clone();
            while n <= dead_hi {
                all.push(n.clone());
                n += 1;
            }
            all
        }
    };
    jobs.extend(dead.into_iter().map(|n| (n, Zone::DeadZone)));
    let rows: Vec<ScanRow> = jobs
        .into_par_iter()
        .map(|(n, zone)| {
            let value = apply_power_bounds(a, b, &n, max_stage)?;
            Ok(ScanRow { n, zone, value })
        })
        .collect::<Result<_, Error>>()?;
    let dead_zone = Status::all(rows.iter().filter(|r| r.zone == Zone::DeadZone).map(|r| {
        if r.value.is_zero() {
            Status::Pass
        } else if r.value.lo.is_positive() {
            Status::Fail
        } else {
            Status::Inconclusive
        }
    }));
    Ok(WindowScan { stage: j, rows, dead_zone })
}

/// `((N−n)/(N+1), 1/(N+1))`.
pub fn eq4_coefficients(columns: usize, n: usize) -> (Rational, Rational) {
    let denom = Int::from(columns + 1);
    (
        Rational::new(Int::from(columns) - Int::from(n), denom.clone()),
        Rational::new(Int::one(), denom),
    )
}

/// `((N−n)/(N+1))·I + (1/(N+1))·T^p`.
pub fn eq4_polynomial(columns: usize, n: usize, p: i64) -> OperatorPolynomial {
    let (identity, shifted) = eq4_coefficients(columns, n);
    OperatorPolynomial::new([(Int::zero(), identity), (Int::from(p), shifted)])
        .expect("the T^{-n h_j} limit coefficients are a sub-probability vector")
}

/// Stages `j ≤ max_stage` with `σ(j) = value`.
pub fn sigma_preimage(value: usize, max_stage: usize) -> Vec<usize> {
    (1..=max_stage).filter(|&j| sigma(j) == value).collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct Eq4Row {
    pub stage: usize,
    pub n: usize,
    #[serde(with = "serde_int")]
    pub power: Int,
    pub value: MeasureBound,
    pub prediction: MeasureBound,
    #[serde(with = "serde_rational")]
    pub deviation_lo: Rational,
    #[serde(with = "serde_rational")]
    pub deviation_hi: Rational,
    pub status: Status,
}

#[derive(Debug, Clone, Serialize)]
pub struct Eq4Report {
    pub columns: usize,
    pub p: i64,
    pub rows: Vec<Eq4Row>,
    pub status: Status,
}

/// Checks `T^{−n h_{j'}} → ((N−n)/(N+1)) I + (1/(N+1)) T^p` along the stages
/// `j'` with `σ(j') = p`, for every `1 ≤ n ≤ N`. For negative `p` the
/// sequence `T^{+n h_{j'}}` over `σ(j') = |p|` is used instead.
pub fn verify_eq4(
    columns: usize,
    p: i64,
    a: &LevelSet,
    b: &LevelSet,
    stages: &[usize],
    tol: &Rational,
    max_stage: Option<usize>,
) -> Result<Eq4Report, Error> {
    let expected = FamilyPreset::Thm2 { n: columns }.params()?;
    if *a.construction().params() != expected {
        return Err(Error::Precondition(format!("the T^{{-n h_j}} limits need the thm2({columns}) construction")));
    }
    if p == 0 {
        return Err(Error::EmptySigmaPreimage(0));
    }
    if stages.is_empty() {
        return Err(Error::EmptySigmaPreimage(p));
    }
    let target = p.unsigned_abs() as usize;
    if let Some(&bad) = stages.iter().find(|&&j| sigma(j) != target) {
        return Err(Error::Precondition(format!("σ({bad}) = {} ≠ {target}", sigma(bad))));
    }
    let c = a.construction();
    let jobs: Vec<(usize, usize)> = stages
        .iter()
        .flat_map(|&j| (1..=columns).map(move |n| (j, n)))
        .collect();
    let rows: Vec<Eq4Row> = jobs
        .par_iter()
        .map(|&(stage, n)| {
            let magnitude = c.height(stage) * Int::from(n);
            let power = if p > 0 { -magnitude } else { magnitude };
            let value = apply_power_bounds(a, b, &power, max_stage)?;
            let prediction = predict(&eq4_polynomial(columns, n, p), a, b, max_stage)?;
            let deviation = value.abs_difference(&prediction);
            let status = status_for(&deviation, tol);
            Ok(Eq4Row {
                stage,
                n,
                power,
                value,
                prediction,
                deviation_lo: deviation.0,
                deviation_hi: deviation.1,
                status,
            })
        })
        .collect::<Result<_, Error>>()?;
    let status = Status::all(rows.iter().map(|r| r.status));
    Ok(Eq4Report { columns, p, rows, status })
}

#[cfg(test)]
mod tests {
    use std::sync::Arc;

    use super::*;
    use crate::construction::Construction;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    fn utv1() -> Arc<Construction> {
        Construction::from_preset(&FamilyPreset::Utv1).unwrap()
    }

    #[test]
    fn predict_identity_and_zero() {
        let c = utv1();
        let a = LevelSet::parse(&c, "stage=2; levels=0,3").unwrap();
        let identity = OperatorPolynomial::parse("T^0").unwrap();
        assert_eq!(predict(&identity, &a, &a, None).unwrap().value(), Some(&a.measure()));
        let zero = OperatorPolynomial::zero();
        assert_eq!(predict(&zero, &a, &a, None).unwrap().value(), Some(&Rational::zero()));
    }

    #[test]
    fn predict_half_unit_shift() {
        let c = utv1();
        let e2 = LevelSet::base(&c, 2).unwrap();
        let poly = OperatorPolynomial::parse("1/2*T^1").unwrap();
        let direct = apply_power_bounds(&e2, &e2, &Int::one(), None).unwrap();
        assert_eq!(predict(&poly, &e2, &e2, None).unwrap(), direct.scale(&q(1, 2)));
    }

    #[test]
    fn halving_along_heights() {
        let c = utv1();
        let e2 = LevelSet::base(&c, 2).unwrap();
        let pairs = vec![(e2.clone(), e2.clone())];
        let report = verify_limit(
            &CandidateSequence::heights(),
            &OperatorPolynomial::parse("1/2*T^0").unwrap(),
            &pairs,
            3..=8,
            &Rational::zero(),
            None,
        )
        .unwrap();
        assert_eq!(report.status, Status::Pass);
        assert_eq!(report.max_deviation, Rational::zero());
        assert_eq!(report.rows.len(), 6);
    }

    #[test]
    fn quarter_and_shifted_half() {
        let c = utv1();
        let e2 = LevelSet::base(&c, 2).unwrap();
        let pairs = vec![(e2.clone(), e2.clone())];
        let quarter = verify_limit(
            &CandidateSequence::parse("h_k + h_{k-1}").unwrap(),
            &OperatorPolynomial::parse("1/4*T^0").unwrap(),
            &pairs,
            4..=8,
            &Rational::zero(),
            None,
        )
        .unwrap();
        assert_eq!(quarter.status, Status::Pass);
        let shifted = verify_limit(
            &CandidateSequence::parse("h_k + 1").unwrap(),
            &OperatorPolynomial::parse("1/2*T^1").unwrap(),
            &pairs,
            3..=8,
            &Rational::zero(),
            None,
        )
        .unwrap();
        assert_eq!(shifted.status, Status::Pass);
    }

    #[test]
    fn wrong_prediction_fails() {
        let c = utv1();
        let e2 = LevelSet::base(&c, 2).unwrap();
        let report = verify_limit(
            &CandidateSequence::heights(),
            &OperatorPolynomial::parse("1/4*T^0").unwrap(),
            &[(e2.clone(), e2)],
            3..=5,
            &Rational::zero(),
            None,
        )
        .unwrap();
        assert_eq!(report.status, Status::Fail);
    }

    #[test]
    fn limit_precondition() {
        let c = utv1();
        let deep = LevelSet::base(&c, 4).unwrap();
        let err = verify_limit(
            &CandidateSequence::heights(),
            &OperatorPolynomial::zero(),
            &[(deep.clone(), deep)],
            3..=5,
            &Rational::zero(),
            None,
        );
        assert!(matches!(err, Err(Error::Precondition(_))));
    }

    #[test]
    fn window_and_dead_zone() {
        let c = utv1();
        let e2 = LevelSet::base(&c, 2).unwrap();
        let scan = scan_window(5, &e2, &e2, &Int::from(60), DeadZoneSampling::default(), None).unwrap();
        assert_eq!(scan.dead_zone, Status::Pass);
        let at_height = scan.rows.iter().find(|r| r.n == Int::from(720)).unwrap();
        assert_eq!(at_height.value.value(), Some(&(e2.measure() * q(1, 2))));
        let dead = scan.rows.iter().filter(|r| r.zone == Zone::DeadZone).count();
        assert_eq!(dead, 66);
        // A point inside the gap, 17 past its start.
        let n = Int::from(720 + 2 * 120 + 17);
        assert!(apply_power_bounds(&e2, &e2, &n, None).unwrap().is_zero());
    }

    #[test]
    fn window_with_empty_set() {
        let c = utv1();
        let e2 = LevelSet::base(&c, 2).unwrap();
        let empty = LevelSet::empty(&c, 2);
        let scan = scan_window(5, &empty, &e2, &Int::from(100), DeadZoneSampling::Even(4), None).unwrap();
        assert!(scan.rows.iter().all(|r| r.value.is_zero()));
    }

    #[test]
    fn window_preconditions() {
        let c = utv1();
        let e3 = LevelSet::base(&c, 3).unwrap();
        assert!(scan_window(4, &e3, &e3, &Int::one(), DeadZoneSampling::default(), None).is_err());
        let toy = Construction::from_preset(&FamilyPreset::Toy).unwrap();
        let e1 = LevelSet::base(&toy, 1).unwrap();
        // Toy gaps are empty: h_{j+1} − 2h_j = 1.
        let scan = scan_window(4, &e1, &e1, &Int::one(), DeadZoneSampling::Exhaustive, None).unwrap();
        assert!(scan.rows.iter().all(|r| r.zone == Zone::Window));
    }

    #[test]
    fn eq4_coefficient_pairs() {
        assert_eq!(eq4_coefficients(2, 2), (q(0, 1), q(1, 3)));
        assert_eq!(eq4_coefficients(2, 1), (q(1, 3), q(1, 3)));
    }

    #[test]
    fn eq4_empty_sets_and_preimage() {
        let c = Construction::from_preset(&FamilyPreset::Thm2 { n: 2 }).unwrap();
        let empty = LevelSet::empty(&c, 2);
        let stages = sigma_preimage(1, 9);
        assert_eq!(stages, vec![1, 3, 6]);
        let report = verify_eq4(2, 1, &empty, &empty, &stages[1..], &Rational::zero(), None).unwrap();
        assert!(report.rows.iter().all(|r| r.deviation_hi.is_zero()));
        assert!(matches!(
            verify_eq4(2, 1, &empty, &empty, &[], &Rational::zero(), None),
            Err(Error::EmptySigmaPreimage(1))
        ));
        assert!(verify_eq4(2, 1, &empty, &empty, &[2], &Rational::zero(), None).is_err());
    }

    #[test]
    fn eq4_on_base_set() {
        let c = Construction::from_preset(&FamilyPreset::Thm2 { n: 2 }).unwrap();
        let e2 = LevelSet::base(&c, 2).unwrap();
        let report = verify_eq4(2, 1, &e2, &e2, &[3, 6], &Rational::zero(), None).unwrap();
        assert_eq!(report.status, Status::Pass, "{report:?}");
    }
}
