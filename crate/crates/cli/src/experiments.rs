//! Experiments: argument structs (shared by clap and the JSON config) and
//! the code that runs them.

use std::sync::Arc;

use anyhow::{bail, ensure, Context};
use clap::{Args, FromArgMatches};
use num_traits::Signed;
use rankone::construction::{condition_star_check, infinite_measure_partial_sum, Construction};
use rankone::joinings::theorem1_witness;
use rankone::limits::{
    scan_window, sigma_preimage, verify_eq4, verify_limit, CandidateSequence, DeadZoneSampling, OperatorPolynomial,
};
use rankone::oracle::oracle_intersection;
use rankone::products::{dissipativity_scan, ratio_condition, sample_shifts, ProductSystem, ReturnCache, ReturnVerdict};
use rankone::rational::{format_rational, to_f64};
use rankone::spectral::{correlations, fejer_density, product_correlation, suspension_correlation, suspension_interval};
use rankone::tower::apply_power_bounds;
use rankone::{FamilyPreset, Int, LevelSet, MeasureBound, Rational, Status};
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::args::{level_set, Family, Span, Text};

/// Result of one experiment: an overall status, a JSON body and a table for
/// CSV output.
pub struct Outcome {
    pub status: Status,
    pub result: Value,
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

fn bound_cells(b: &MeasureBound) -> [String; 2] {
    [format_rational(&b.lo), format_rational(&b.hi)]
}

fn exact_or_open(b: &MeasureBound) -> Status {
    if b.is_exact() {
        Status::Pass
    } else {
        Status::Inconclusive
    }
}

fn clap_defaults<T: Args + FromArgMatches>() -> T {
    let matches = T::augment_args(clap::Command::new("defaults"))
        .try_get_matches_from(["defaults"])
        .expect("every experiment argument has a default");
    T::from_arg_matches(&matches).expect("defaults parse")
}

macro_rules! defaults_from_clap {
    ($($t:ty),*) => {$(
        impl Default for $t {
            fn default() -> Self {
                clap_defaults()
            }
        }
    )*};
}

defaults_from_clap!(
    GeometryArgs,
    MeasureArgs,
    OracleArgs,
    LimitsVerifyArgs,
    LimitsScanArgs,
    Eq4Args,
    WitnessArgs,
    ProductsScanArgs,
    RatioArgs,
    CorrArgs,
    DensityArgs,
    SuspendArgs,
    AcceptanceArgs
);

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GeometryArgs {
    #[arg(long, default_value = "utv1")]
    pub family: Family,
    /// Stage or inclusive stage range.
    #[arg(long = "j", visible_alias = "j-range", default_value = "1..6")]
    pub j: Text<Span>,
}

pub fn geometry(args: &GeometryArgs) -> anyhow::Result<Outcome> {
    let c = args.family.build()?;
    let (lo, hi) = args.j.0.usize_bounds().map_err(anyhow::Error::msg)?;
    ensure!(lo >= 1, "stages start at 1");
    let mut rows = Vec::new();
    let mut stages = Vec::new();
    for j in lo..=hi {
        let g = c.stage(j);
        let join = |v: &[Int]| v.iter().map(Int::to_string).collect::<Vec<_>>().join(" ");
        rows.push(vec![
            j.to_string(),
            g.h.to_string(),
            format_rational(&g.level_width),
            join(&g.spacers),
            join(&g.column_offsets),
            g.next_height.to_string(),
            format_rational(&g.space_measure),
        ]);
        stages.push(json!({
            "j": j,
            "h": g.h.to_string(),
            "level_width": format_rational(&g.level_width),
            "spacers": g.spacers.iter().map(Int::to_string).collect::<Vec<_>>(),
            "column_offsets": g.column_offsets.iter().map(Int::to_string).collect::<Vec<_>>(),
            "next_height": g.next_height.to_string(),
            "space_measure": format_rational(&g.space_measure),
        }));
    }
    let star = condition_star_check(c.params(), hi)?;
    let series = infinite_measure_partial_sum(c.params(), hi)?;
    Ok(Outcome {
        status: Status::Pass,
        result: json!({ "stages": stages, "condition_star": star, "measure_series": series }),
        header: vec!["j", "h", "level_width", "spacers", "column_offsets", "next_height", "space_measure"],
        rows,
    })
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MeasureArgs {
    #[arg(long, default_value = "utv1")]
    pub family: Family,
    /// Level set `A`, e.g. "stage=2; levels=0,3".
    #[arg(long, default_value = "stage=2; levels=0")]
    pub a: String,
    /// Level set `B`; defaults to `A`.
    #[arg(long)]
    pub b: Option<String>,
    /// Powers `n`: a single value or an inclusive range.
    #[arg(long = "n", visible_alias = "n-range", default_value = "0", allow_hyphen_values = true)]
    pub n: Text<Span>,
}

/// `μ(Tⁿ A ∩ B)` for each requested `n`.
pub fn measure(args: &MeasureArgs, max_stage: Option<usize>) -> anyhow::Result<Outcome> {
    let c = args.family.build()?;
    let a = level_set(&c, &args.a)?;
    let b = level_set(&c, args.b.as_deref().unwrap_or(&args.a))?;
    let mut rows = Vec::new();
    let mut values = Vec::new();
    let mut status = Status::Pass;
    for n in args.n.0.ints() {
        let v = apply_power_bounds(&a, &b, &n, max_stage)?;
        status = status.and(exact_or_open(&v));
        let [lo, hi] = bound_cells(&v);
        rows.push(vec![n.to_string(), lo, hi, v.resolved_stage.to_string()]);
        values.push(json!({ "n": n.to_string(), "value": v }));
    }
    Ok(Outcome {
        status,
        result: json!({ "a": a.to_string(), "b": b.to_string(), "values": values }),
        header: vec!["n", "lo", "hi", "resolved_stage"],
        rows,
    })
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OracleArgs {
    #[arg(long, default_value = "utv1")]
    pub family: Family,
    #[arg(long, default_value = "stage=2; levels=0")]
    pub a: String,
    #[arg(long)]
    pub b: Option<String>,
    #[arg(long = "n", visible_alias = "n-range", default_value = "0", allow_hyphen_values = true)]
    pub n: Text<Span>,
    /// Stage of the explicit interval layout.
    #[arg(long, default_value_t = 5)]
    pub stage: usize,
}

/// Brute-force interval values next to the calculus bracket at the same stage.
pub fn oracle(args: &OracleArgs, max_stage: Option<usize>) -> anyhow::Result<Outcome> {
    let c = args.family.build()?;
    let a = level_set(&c, &args.a)?;
    let b = level_set(&c, args.b.as_deref().unwrap_or(&args.a))?;
    let mut rows = Vec::new();
    let mut values = Vec::new();
    let mut status = Status::Pass;
    for n in args.n.0.ints() {
        let brute = oracle_intersection(&a, &b, &n, args.stage)?;
        let calc = apply_power_bounds(&a, &b, &n, max_stage)?;
        let agrees = if brute.is_defined() && calc.is_exact() {
            Some(brute.value == calc.lo)
        } else {
            None
        };
        status = status.and(match agrees {
            Some(true) => Status::Pass,
            Some(false) => Status::Fail,
            None => Status::Inconclusive,
        });
        rows.push(vec![
            n.to_string(),
            format_rational(&brute.value),
            format_rational(&brute.undefined),
            format_rational(&calc.lo),
            format_rational(&calc.hi),
        ]);
        values.push(json!({ "n": n.to_string(), "oracle": brute, "calculus": calc, "agrees": agrees }));
    }
    Ok(Outcome {
        status,
        result: json!({ "stage": args.stage, "values": values }),
        header: vec!["n", "oracle_value", "oracle_undefined", "calculus_lo", "calculus_hi"],
        rows,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, clap::ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Pairing {
    /// Each set with itself.
    #[default]
    Diagonal,
    /// Every ordered pair.
    All,
}

fn pairs(sets: &[LevelSet], pairing: Pairing) -> Vec<(LevelSet, LevelSet)> {
    match pairing {
        Pairing::Diagonal => sets.iter().map(|a| (a.clone(), a.clone())).collect(),
        Pairing::All => sets.iter().flat_map(|a| sets.iter().map(move |b| (a.clone(), b.clone()))).collect(),
    }
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LimitsVerifyArgs {
    #[arg(long, default_value = "utv1")]
    pub family: Family,
    /// Candidate sequence, e.g. "h_k + h_{k-1} + 1".
    #[arg(long, default_value = "h_k")]
    pub seq: String,
    /// Predicted limit, e.g. "1/2*T^0".
    #[arg(long, default_value = "1/2*T^0")]
    pub poly: String,
    /// Indices `k` of the sequence.
    #[arg(long = "j", visible_alias = "k-range", default_value = "3..8")]
    pub k: Text<Span>,
    /// Test sets (repeatable).
    #[arg(long = "set", default_values = ["stage=2; levels=0", "stage=2; levels=1", "stage=2; levels=3"])]
    pub sets: Vec<String>,
    #[arg(long, value_enum, default_value_t = Pairing::Diagonal)]
    pub pairs: Pairing,
    #[arg(long, default_value = "0")]
    pub tol: Text<Rational>,
}

pub fn limits_verify(args: &LimitsVerifyArgs, max_stage: Option<usize>) -> anyhow::Result<Outcome> {
    let c = args.family.build()?;
    let seq = CandidateSequence::parse(&args.seq)?;
    let poly = OperatorPolynomial::parse(&args.poly)?;
    let sets: Vec<LevelSet> = args.sets.iter().map(|s| level_set(&c, s)).collect::<anyhow::Result<_>>()?;
    let pairs = pairs(&sets, args.pairs);
    let (lo, hi) = args.k.0.usize_bounds().map_err(anyhow::Error::msg)?;
    let report = verify_limit(&seq, &poly, &pairs, lo..=hi, &args.tol.0, max_stage)?;
    let rows = report
        .rows
        .iter()
        .map(|r| {
            let [vlo, vhi] = bound_cells(&r.value);
            vec![
                r.k.to_string(),
                r.n.to_string(),
                r.pair.to_string(),
                vlo,
                vhi,
                format_rational(&r.prediction.lo),
                format_rational(&r.deviation_hi),
                r.status.to_string(),
            ]
        })
        .collect();
    Ok(Outcome {
        status: report.status,
        result: serde_json::to_value(&report)?,
        header: vec!["k", "n", "pair", "value_lo", "value_hi", "prediction", "deviation_hi", "status"],
        rows,
    })
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LimitsScanArgs {
    #[arg(long, default_value = "utv1")]
    pub family: Family,
    #[arg(long = "j", default_value_t = 5)]
    pub j: usize,
    #[arg(long, default_value = "stage=2; levels=0")]
    pub a: String,
    #[arg(long)]
    pub b: Option<String>,
    /// Step through the window `[h_j − 2h_{j−1}, h_j + 2h_{j−1}]`.
    #[arg(long, default_value = "1")]
    pub step: Text<Int>,
    /// Shifts sampled evenly across the dead zone, endpoints included.
    #[arg(long, default_value_t = 66)]
    pub samples: usize,
    /// Scan every shift of the dead zone instead of sampling.
    #[arg(long)]
    pub exhaustive: bool,
}

pub fn limits_scan(args: &LimitsScanArgs, max_stage: Option<usize>) -> anyhow::Result<Outcome> {
    let c = args.family.build()?;
    let a = level_set(&c, &args.a)?;
    let b = level_set(&c, args.b.as_deref().unwrap_or(&args.a))?;
    let sampling = if args.exhaustive {
        DeadZoneSampling::Exhaustive
    } else {
        ensure!(args.samples >= 2, "dead-zone sampling needs at least the two endpoints");
        DeadZoneSampling::Even(args.samples - 2)
    };
    let scan = scan_window(args.j, &a, &b, &args.step.0, sampling, max_stage)?;
    let rows = scan
        .rows
        .iter()
        .map(|r| {
            let [lo, hi] = bound_cells(&r.value);
            let zone = serde_json::to_value(r.zone).ok().and_then(|v| v.as_str().map(str::to_owned)).unwrap_or_default();
            vec![r.n.to_string(), zone, lo, hi]
        })
        .collect();
    Ok(Outcome {
        status: scan.dead_zone,
        result: serde_json::to_value(&scan)?,
        header: vec!["n", "zone", "lo", "hi"],
        rows,
    })
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Eq4Args {
    /// `N` of the `thm2(N)` construction.
    #[arg(long = "columns", default_value_t = 2)]
    pub columns: usize,
    /// Spacer value `p = σ(j′)` selecting the stages.
    #[arg(long, default_value_t = 1, allow_hyphen_values = true)]
    pub p: i64,
    #[arg(long, default_value = "stage=2; levels=0")]
    pub a: String,
    #[arg(long)]
    pub b: Option<String>,
    /// Explicit stages `j′`; by default the largest ones up to `--max-j`.
    #[arg(long = "stage", value_delimiter = ',')]
    pub stages: Vec<usize>,
    #[arg(long = "max-j", default_value_t = 9)]
    pub max_j: usize,
    /// How many of the largest admissible stages to use.
    #[arg(long, default_value_t = 2)]
    pub take: usize,
    /// Tolerance as a fraction of `μ(A)`.
    #[arg(long, default_value = "1/50")]
    pub tol: Text<Rational>,
}

pub fn eq4(args: &Eq4Args, max_stage: Option<usize>) -> anyhow::Result<Outcome> {
    let c = Construction::from_preset(&FamilyPreset::Thm2 { n: args.columns })?;
    let a = level_set(&c, &args.a)?;
    let b = level_set(&c, args.b.as_deref().unwrap_or(&args.a))?;
    let stages = if args.stages.is_empty() {
        let all = sigma_preimage(args.p.unsigned_abs() as usize, args.max_j);
        all[all.len().saturating_sub(args.take)..].to_vec()
    } else {
        args.stages.clone()
    };
    let tol = &args.tol.0 * a.measure();
    let report = verify_eq4(args.columns, args.p, &a, &b, &stages, &tol, max_stage)?;
    let rows = report
        .rows
        .iter()
        .map(|r| {
            vec![
                r.stage.to_string(),
                r.n.to_string(),
                r.power.to_string(),
                format_rational(&r.value.lo),
                format_rational(&r.prediction.lo),
                format_rational(&r.deviation_hi),
                r.status.to_string(),
            ]
        })
        .collect();
    Ok(Outcome {
        status: report.status,
        result: json!({ "stages": stages, "tolerance": format_rational(&tol), "report": report }),
        header: vec!["stage", "n", "power", "value", "prediction", "deviation_hi", "status"],
        rows,
    })
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WitnessArgs {
    #[arg(long, default_value = "utv1")]
    pub family: Family,
    /// The target joining `Δᵐ`.
    #[arg(long, default_value = "0", allow_hyphen_values = true)]
    pub m: Text<Int>,
    /// Sets whose ordered pairs form the rectangle grid (repeatable).
    #[arg(long = "set", default_values = [
        "stage=2; levels=0", "stage=2; levels=1", "stage=2; levels=2", "stage=2; levels=3", "stage=2; levels=4",
    ])]
    pub sets: Vec<String>,
    #[arg(long = "j", visible_alias = "j-range", default_value = "4..8")]
    pub j: Text<Span>,
    #[arg(long, default_value = "0")]
    pub eps: Text<Rational>,
}

pub fn witness(args: &WitnessArgs, max_stage: Option<usize>) -> anyhow::Result<Outcome> {
    let c = args.family.build()?;
    let sets: Vec<LevelSet> = args.sets.iter().map(|s| level_set(&c, s)).collect::<anyhow::Result<_>>()?;
    let grid = pairs(&sets, Pairing::All);
    let (lo, hi) = args.j.0.usize_bounds().map_err(anyhow::Error::msg)?;
    let report = theorem1_witness(&args.m.0, &grid, lo..=hi, &args.eps.0, max_stage)?;
    let rows = report
        .rows
        .iter()
        .map(|r| {
            vec![
                r.j.to_string(),
                r.k_chosen.to_string(),
                format_rational(&r.margin_lo),
                format_rational(&r.margin_hi),
                r.status.to_string(),
            ]
        })
        .collect();
    Ok(Outcome {
        status: report.status,
        result: serde_json::to_value(&report)?,
        header: vec!["j", "k_chosen", "margin_lo", "margin_hi", "status"],
        rows,
    })
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ProductsScanArgs {
    /// Left factor construction.
    #[arg(long, default_value = "thm2(2)")]
    pub family: Family,
    /// Right factor construction; defaults to the left one.
    #[arg(long = "right-family")]
    pub right_family: Option<Family>,
    /// Exponent of the left factor.
    #[arg(long, default_value_t = 1, allow_hyphen_values = true)]
    pub m: i64,
    /// Exponent of the right factor.
    #[arg(long = "n", default_value_t = 3, allow_hyphen_values = true)]
    pub n: i64,
    #[arg(long, default_value = "stage=2; levels=0")]
    pub a: String,
    /// Right rectangle side; defaults to `A`.
    #[arg(long = "a2")]
    pub a2: Option<String>,
    /// Shifts `k` to scan, as an inclusive range.
    #[arg(long = "k-range")]
    pub k_range: Option<Text<Span>>,
    /// Without `--k-range`, scan `(h_j, 8h_j]` of the left construction.
    #[arg(long = "j", default_value_t = 4)]
    pub j: usize,
    /// Shifts sampled from the range.
    #[arg(long, default_value_t = 256)]
    pub samples: usize,
}

pub fn products_scan(args: &ProductsScanArgs, max_stage: Option<usize>) -> anyhow::Result<Outcome> {
    let left = args.family.build()?;
    let right = match &args.right_family {
        Some(f) => f.build()?,
        None => Arc::clone(&left),
    };
    let sys = ProductSystem::new(Arc::clone(&left), args.m, Arc::clone(&right), args.n)?;
    let a = level_set(&left, &args.a)?;
    let a2 = level_set(&right, args.a2.as_deref().unwrap_or(&args.a))?;
    let (lo, hi) = match &args.k_range {
        Some(span) => (&span.0.lo - 1, span.0.hi.clone()),
        None => {
            let h = left.height(args.j);
            (h.clone(), h * 8)
        }
    };
    ensure!(!lo.is_negative(), "scanned shifts must be at least 1");
    let ks = sample_shifts(&lo, &hi, args.samples);
    let report = dissipativity_scan(&sys, &a, &a2, &ks, &ReturnCache::new(), max_stage)?;
    let rows = report
        .rows
        .iter()
        .map(|r| {
            let right_value = r.right.as_ref().map(|v| v.to_string()).unwrap_or_default();
            let [plo, phi] = bound_cells(&r.product);
            vec![r.k.to_string(), r.left.to_string(), right_value, plo, phi]
        })
        .collect();
    let status = match report.verdict {
        ReturnVerdict::ProvenZero => Status::Pass,
        ReturnVerdict::Unresolved => Status::Inconclusive,
        ReturnVerdict::Nonzero => Status::Fail,
    };
    Ok(Outcome {
        status,
        result: json!({ "scanned_range": [lo.to_string(), hi.to_string()], "report": report }),
        header: vec!["k", "left_value", "right_value", "product_lo", "product_hi"],
        rows,
    })
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RatioArgs {
    #[arg(long, default_value = "scaled(2)")]
    pub family: Family,
    #[arg(long = "right-family", default_value = "utv1")]
    pub right_family: Family,
    #[arg(long = "j", default_value_t = 8)]
    pub stages: usize,
    /// Target ratio `a/b`.
    #[arg(long, default_value = "2")]
    pub target: Text<Rational>,
}

pub fn ratio(args: &RatioArgs) -> anyhow::Result<Outcome> {
    let rows = ratio_condition(&args.family.0.params()?, &args.right_family.0.params()?, args.stages, &args.target.0)?;
    let table = rows
        .iter()
        .map(|r| {
            vec![
                r.i.to_string(),
                r.h.to_string(),
                r.h_prime.to_string(),
                format_rational(&r.ratio),
                format_rational(&r.deviation),
            ]
        })
        .collect();
    Ok(Outcome {
        status: Status::Pass,
        result: serde_json::to_value(&rows)?,
        header: vec!["i", "h", "h_prime", "ratio", "deviation"],
        rows: table,
    })
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CorrArgs {
    #[arg(long, default_value = "utv1")]
    pub family: Family,
    /// Base set `A`.
    #[arg(long, default_value = "stage=2; levels=0")]
    pub a: String,
    #[arg(long = "n", visible_alias = "n-range", default_value = "-10..10", allow_hyphen_values = true)]
    pub n: Text<Span>,
    /// Also evaluate at `±h_j` for these stages.
    #[arg(long = "heights")]
    pub heights: Option<Text<Span>>,
}

fn corr_shifts(c: &Construction, n: &Span, heights: Option<&Span>) -> anyhow::Result<Vec<Int>> {
    let mut shifts = n.ints();
    if let Some(span) = heights {
        let (lo, hi) = span.usize_bounds().map_err(anyhow::Error::msg)?;
        ensure!(lo >= 1, "stages start at 1");
        for j in lo..=hi {
            shifts.push(c.height(j));
            shifts.push(-c.height(j));
        }
    }
    shifts.sort();
    shifts.dedup();
    Ok(shifts)
}

pub fn corr(args: &CorrArgs, max_stage: Option<usize>) -> anyhow::Result<Outcome> {
    let c = args.family.build()?;
    let a = level_set(&c, &args.a)?;
    let shifts = corr_shifts(&c, &args.n.0, args.heights.as_ref().map(|t| &t.0))?;
    let seq = correlations(&a, &shifts, max_stage)?;
    let status = if seq.unresolved().is_empty() { Status::Pass } else { Status::Inconclusive };
    let rows = seq.rows().iter().map(|r| vec![r.n.to_string(), format_rational(&r.c)]).collect();
    Ok(Outcome {
        status,
        result: json!({
            "base": a.to_string(),
            "values": seq.rows(),
            "unresolved": seq.unresolved(),
            "asymmetric": seq.asymmetries().iter().map(Int::to_string).collect::<Vec<_>>(),
        }),
        header: vec!["n", "c"],
        rows,
    })
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DensityArgs {
    #[arg(long, default_value = "utv1")]
    pub family: Family,
    #[arg(long, default_value = "stage=2; levels=0")]
    pub a: String,
    /// Fejér order `N`.
    #[arg(long, default_value_t = 121)]
    pub order: usize,
    /// Grid size `M`.
    #[arg(long, default_value_t = 1024)]
    pub points: usize,
    /// Use the correlations `c(mk)c(nk)` of `Tᵐ ⊗ Tⁿ`, given as `m:n`.
    #[arg(long)]
    pub tensor: Option<String>,
}

pub fn density(args: &DensityArgs, max_stage: Option<usize>) -> anyhow::Result<Outcome> {
    let c = args.family.build()?;
    let a = level_set(&c, &args.a)?;
    let ks: Vec<Int> = (0..args.order as i64).map(Int::from).collect();
    let coefficients: Vec<Rational> = match &args.tensor {
        None => {
            let seq = correlations(&a, &ks, max_stage)?;
            ensure!(seq.unresolved().is_empty(), "{} correlations unresolved", seq.unresolved().len());
            ks.iter().map(|k| seq.get(k).cloned()).collect::<Result<_, _>>()?
        }
        Some(spec) => {
            let (m, n) = spec.split_once(':').context("--tensor takes m:n")?;
            let (m, n): (Int, Int) = (m.trim().parse()?, n.trim().parse()?);
            let mut needed: Vec<Int> = ks.iter().flat_map(|k| [k * &m, k * &n]).collect();
            needed.sort();
            needed.dedup();
            let seq = correlations(&a, &needed, max_stage)?;
            ensure!(seq.unresolved().is_empty(), "{} correlations unresolved", seq.unresolved().len());
            ks.iter().map(|k| product_correlation(&seq, &seq, &m, &n, k)).collect::<Result<_, _>>()?
        }
    };
    let floats: Vec<f64> = coefficients.iter().map(to_f64).collect();
    let estimate = fejer_density(&floats, args.order, args.points)?;
    let rows = estimate
        .grid
        .iter()
        .zip(&estimate.density)
        .map(|(t, d)| vec![format!("{t:.12}"), format!("{d:.12e}")])
        .collect();
    let status = if estimate.min() >= -1e-9 { Status::Pass } else { Status::Fail };
    Ok(Outcome {
        status,
        result: json!({
            "order": estimate.order,
            "points": args.points,
            "max_over_mean": estimate.max_over_mean,
            "top5_share": estimate.top5_share,
            "mean": estimate.mean(),
            "min": estimate.min(),
            "density": estimate.density,
        }),
        header: vec!["theta", "density"],
        rows,
    })
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SuspendArgs {
    #[arg(long, default_value = "utv1")]
    pub family: Family,
    #[arg(long, default_value = "stage=2; levels=0")]
    pub a: String,
    #[arg(long = "n", visible_alias = "n-range", default_value = "0..3", allow_hyphen_values = true)]
    pub n: Text<Span>,
    #[arg(long = "heights", default_value = "3..8")]
    pub heights: Option<Text<Span>>,
}

pub fn suspend(args: &SuspendArgs, max_stage: Option<usize>) -> anyhow::Result<Outcome> {
    let c = args.family.build()?;
    let a = level_set(&c, &args.a)?;
    let shifts = corr_shifts(&c, &args.n.0, args.heights.as_ref().map(|t| &t.0))?;
    let seq = correlations(&a, &shifts, max_stage)?;
    let mut rows = Vec::new();
    let mut values = Vec::new();
    for (n, v) in seq.values() {
        let s = suspension_correlation(to_f64(v));
        rows.push(vec![n.to_string(), format_rational(v), format!("{s:.15}")]);
        values.push(json!({ "n": n.to_string(), "c": format_rational(v), "suspension": s }));
    }
    for open in seq.unresolved() {
        let (lo, hi) = suspension_interval(to_f64(&open.bound.lo), to_f64(&open.bound.hi));
        values.push(json!({ "n": open.n.to_string(), "bound": open.bound, "suspension": [lo, hi] }));
    }
    let status = if seq.unresolved().is_empty() { Status::Pass } else { Status::Inconclusive };
    Ok(Outcome { status, result: json!({ "values": values }), header: vec!["n", "c", "suspension"], rows })
}

#[derive(Debug, Clone, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AcceptanceArgs {
    /// Run only these criteria (comma separated).
    #[arg(long, value_delimiter = ',')]
    pub only: Vec<u8>,
}

pub fn acceptance(args: &AcceptanceArgs) -> anyhow::Result<Outcome> {
    let ids: Vec<u8> = if args.only.is_empty() { (1..=9).collect() } else { args.only.clone() };
    let mut outcomes = Vec::new();
    for id in ids {
        let Some(o) = rankone::acceptance::criterion(id) else {
            bail!("no acceptance criterion {id}");
        };
        eprintln!("{o}");
        outcomes.push(o);
    }
    let status = Status::all(outcomes.iter().map(|o| o.status));
    let rows = outcomes
        .iter()
        .map(|o| vec![o.id.to_string(), o.name.to_string(), o.status.to_string(), o.detail.clone()])
        .collect();
    Ok(Outcome {
        status,
        result: serde_json::to_value(&outcomes)?,
        header: vec!["id", "name", "status", "detail"],
        rows,
    })
}

/// Every experiment, as named in JSON configs.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", deny_unknown_fields)]
pub enum Experiment {
    Geometry(GeometryArgs),
    Measure(MeasureArgs),
    Oracle(OracleArgs),
    #[serde(alias = "limits")]
    LimitsVerify(LimitsVerifyArgs),
    #[serde(alias = "scan")]
    LimitsScan(LimitsScanArgs),
    #[serde(alias = "limits_eq4")]
    Eq4(Eq4Args),
    #[serde(alias = "joinings")]
    JoiningsWitness(WitnessArgs),
    #[serde(alias = "products")]
    ProductsScan(ProductsScanArgs),
    ProductsRatio(RatioArgs),
    #[serde(alias = "spectral")]
    SpectralCorr(CorrArgs),
    SpectralDensity(DensityArgs),
    SpectralSuspend(SuspendArgs),
    Acceptance(AcceptanceArgs),
}

impl Experiment {
    pub fn run(&self, max_stage: Option<usize>) -> anyhow::Result<Outcome> {
        match self {
            Experiment::Geometry(a) => geometry(a),
            Experiment::Measure(a) => measure(a, max_stage),
            Experiment::Oracle(a) => oracle(a, max_stage),
            Experiment::LimitsVerify(a) => limits_verify(a, max_stage),
            Experiment::LimitsScan(a) => limits_scan(a, max_stage),
            Experiment::Eq4(a) => eq4(a, max_stage),
            Experiment::JoiningsWitness(a) => witness(a, max_stage),
            Experiment::ProductsScan(a) => products_scan(a, max_stage),
            Experiment::ProductsRatio(a) => ratio(a),
            Experiment::SpectralCorr(a) => corr(a, max_stage),
            Experiment::SpectralDensity(a) => density(a, max_stage),
            Experiment::SpectralSuspend(a) => suspend(a, max_stage),
            Experiment::Acceptance(a) => acceptance(a),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_match_between_clap_and_json() {
        let from_json: Experiment = serde_json::from_str(r#"{"limits_verify": {}}"#).unwrap();
        let Experiment::LimitsVerify(args) = from_json else { panic!() };
        assert_eq!(args.seq, "h_k");
        assert_eq!(args.sets.len(), 3);
        assert_eq!(args.k.0, Span::new(3, 8));
    }

    #[test]
    fn unknown_keys_are_rejected() {
        assert!(serde_json::from_str::<Experiment>(r#"{"geometry": {"family": "utv1", "jj": 3}}"#).is_err());
        assert!(serde_json::from_str::<Experiment>(r#"{"astrology": {}}"#).is_err());
    }

    #[test]
    fn geometry_of_utv1() {
        let args = GeometryArgs { j: crate::args::text("5"), ..Default::default() };
        let out = geometry(&args).unwrap();
        assert_eq!(out.rows[0][1], "720");
    }

    #[test]
    fn witness_grid_default() {
        let out = witness(&WitnessArgs::default(), None).unwrap();
        assert_eq!(out.status, Status::Pass);
        assert_eq!(out.rows.len(), 5);
    }
}
