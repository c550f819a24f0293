use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::rational::{ceil, format_rational};
use crate::{Error, Int, Rational};

/// How many spacer levels a column receives at stage `j`, as a function of the
/// stage index and the current height `h_j` only.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SpacerRule {
    Zero,
    /// `c`
    Constant(Int),
    /// `c·j`
    StageMultiple(Int),
    /// `c·h_j`
    HeightMultiple(Int),
    /// `j·h_j`
    StageTimesHeight,
    /// The block sequence `1,2, 1,2,3, 1,2,3,4, …` evaluated at `j`.
    Sigma,
    /// Spacers that make the heights track `⌈a·(j+1)!⌉`, i.e. `a` times the
    /// heights of the `utv1` family. Only meaningful as the second spacer of a
    /// two-column construction starting at `h₁ = ⌈2a⌉`.
    ScaledTarget(Rational),
}

impl SpacerRule {
    pub fn eval(&self, j: usize, height: &Int) -> Int {
        match self {
            SpacerRule::Zero => Int::zero(),
            SpacerRule::Constant(c) => c.clone(),
            SpacerRule::StageMultiple(c) => c * Int::from(j),
            SpacerRule::HeightMultiple(c) => c * height,
            SpacerRule::StageTimesHeight => height * Int::from(j),
            SpacerRule::Sigma => Int::from(sigma(j)),
            SpacerRule::ScaledTarget(a) => scaled_height(a, j + 1) - scaled_height(a, j) * 2,
        }
    }
}

impl fmt::Display for SpacerRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SpacerRule::Zero => write!(f, "0"),
            SpacerRule::Constant(c) => write!(f, "{c}"),
            SpacerRule::StageMultiple(c) => write!(f, "{c}·j"),
            SpacerRule::HeightMultiple(c) => write!(f, "{c}·h_j"),
            SpacerRule::StageTimesHeight => write!(f, "j·h_j"),
            SpacerRule::Sigma => write!(f, "σ(j)"),
            SpacerRule::ScaledTarget(a) => write!(f, "target({})", format_rational(a)),
        }
    }
}

/// `⌈a·(j+1)!⌉`, the target height of the scaled family at stage `j`.
pub(crate) fn scaled_height(a: &Rational, j: usize) -> Int {
    let factorial = (2..=j + 1).fold(BigInt::one(), |acc, k| acc * BigInt::from(k));
    ceil(&(a * Rational::from_integer(factorial)))
}

/// The block sequence `1,2, 1,2,3, 1,2,3,4, …` (1-indexed): block `b ≥ 2` is
/// `1..=b`. Every positive value appears infinitely often.
pub fn sigma(j: usize) -> usize {
    assert!(j >= 1, "σ is 1-indexed");
    let mut rest = j;
    let mut block = 2;
    while rest > block {
        rest -= block;
        block += 1;
    }
    rest
}

/// The full recipe of a rank-one construction.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConstructionParams {
    /// Initial tower height `h₁ ≥ 1`.
    pub h1: Int,
    /// Cut count `r ≥ 2`, constant across stages.
    pub cuts: usize,
    /// One rule per column; `spacers.len() == cuts`.
    pub spacers: Vec<SpacerRule>,
    /// Length of the base interval `E₁`.
    pub base_width: Rational,
}

impl ConstructionParams {
    pub fn new(
        h1: impl Into<Int>,
        spacers: Vec<SpacerRule>,
        base_width: Rational,
    ) -> Result<Self, Error> {
        let params = ConstructionParams {
            h1: h1.into(),
            cuts: spacers.len(),
            spacers,
            base_width,
        };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<(), Error> {
        let bad = |msg: String| Err(Error::InvalidParams(msg));
        if self.h1 < Int::one() {
            return bad(format!("h1 must be positive, got {}", self.h1));
        }
        if self.cuts < 2 {
            return bad(format!("cut count must be at least 2, got {}", self.cuts));
        }
        if self.spacers.len() != self.cuts {
            return bad(format!(
                "{} spacer rules for {} columns",
                self.spacers.len(),
                self.cuts
            ));
        }
        if !self.base_width.is_positive() {
            return bad("base width must be positive".into());
        }
        for rule in &self.spacers {
            match rule {
                SpacerRule::Constant(c)
                | SpacerRule::StageMultiple(c)
                | SpacerRule::HeightMultiple(c)
                    if c.is_negative() =>
                {
                    return bad(format!("negative spacer coefficient in rule {rule}"));
                }
                SpacerRule::ScaledTarget(a) if *a <= Rational::one() => {
                    return bad(format!("scale factor must exceed 1, got {}", format_rational(a)));
                }
                _ => {}
            }
        }
        if self.spacers.iter().any(|r| matches!(r, SpacerRule::ScaledTarget(_))) {
            self.validate_scaled()?;
        }
        Ok(())
    }

    /// Scaled targets must keep `s_j(i) ≥ h_j`. Past stage 2 this holds for
    /// every `a > 1`, so checking a short prefix settles it.
    fn validate_scaled(&self) -> Result<(), Error> {
        let mut h = self.h1.clone();
        for j in 1..=12 {
            let spacers = self.spacers_at(j, &h);
            for (rule, s) in self.spacers.iter().zip(&spacers) {
                if matches!(rule, SpacerRule::ScaledTarget(_)) && *s < h {
                    return Err(Error::InvalidParams(format!(
                        "scaled spacer s_{j} = {s} is below h_{j} = {h}"
                    )));
                }
            }
            h = &h * Int::from(self.cuts) + spacers.iter().sum::<Int>();
        }
        Ok(())
    }

    /// `s̄_j = (s_j(1), …, s_j(r))` given `h_j`.
    pub fn spacers_at(&self, j: usize, height: &Int) -> Vec<Int> {
        self.spacers.iter().map(|rule| rule.eval(j, height)).collect()
    }

    pub fn cuts_at(&self, _j: usize) -> usize {
        self.cuts
    }
}

/// The named construction families.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum FamilyPreset {
    /// `r = 2`, `s̄ = (0, 1)`, `h₁ = 1`: a small fixture with finite measure.
    Toy,
    /// `r = 2`, `s̄_j = (0, j·h_j)`, `h₁ = 2`, so `h_j = (j+1)!`.
    Utv1,
    /// `r = N + 1`, `s̄_j = (0, …, 0, σ(j), j·h_j)`, `h₁ = 2`.
    Thm2 { n: usize },
    /// Heights `⌈a·(j+1)!⌉`, i.e. `a` times the `utv1` heights.
    Scaled { a: Rational },
}

impl FamilyPreset {
    pub fn params(&self) -> Result<ConstructionParams, Error> {
        let one = Rational::one();
        match self {
            FamilyPreset::Toy => ConstructionParams::new(
                1,
                vec![SpacerRule::Zero, SpacerRule::Constant(Int::one())],
                one,
            ),
            FamilyPreset::Utv1 => {
                ConstructionParams::new(2, vec![SpacerRule::Zero, SpacerRule::StageTimesHeight], one)
            }
            FamilyPreset::Thm2 { n } => {
                if *n < 2 {
                    return Err(Error::InvalidParams(format!("thm2 needs N ≥ 2, got {n}")));
                }
                let mut spacers = vec![SpacerRule::Zero; n - 1];
                spacers.push(SpacerRule::Sigma);
                spacers.push(SpacerRule::StageTimesHeight);
                ConstructionParams::new(2, spacers, one)
            }
            FamilyPreset::Scaled { a } => {
                if *a <= one {
                    return Err(Error::InvalidParams(format!(
                        "scale factor must exceed 1, got {}",
                        format_rational(a)
                    )));
                }
                ConstructionParams::new(
                    scaled_height(a, 1),
                    vec![SpacerRule::Zero, SpacerRule::ScaledTarget(a.clone())],
                    one,
                )
            }
        }
    }

    pub fn name(&self) -> String {
        match self {
            FamilyPreset::Toy => "toy".into(),
            FamilyPreset::Utv1 => "utv1".into(),
            FamilyPreset::Thm2 { n } => format!("thm2({n})"),
            FamilyPreset::Scaled { a } => format!("scaled({})", format_rational(a)),
        }
    }

    /// Accepts `toy`, `utv1`, `thm2(N)` / `thm2:N` and `scaled(a)` / `scaled:a`.
    pub fn parse(text: &str) -> Result<Self, Error> {
        let text = text.trim();
        let (name, arg) = if let Some(open) = text.find('(') {
            let inner = text[open + 1..]
                .strip_suffix(')')
                .ok_or_else(|| Error::Parse(format!("unbalanced family {text:?}")))?;
            (&text[..open], Some(inner))
        } else if let Some((name, arg)) = text.split_once(':') {
            (name, Some(arg))
        } else {
            (text, None)
        };
        match (name.trim(), arg) {
            ("toy", None) => Ok(FamilyPreset::Toy),
            ("utv1", None) => Ok(FamilyPreset::Utv1),
            ("thm2", Some(n)) => n
                .trim()
                .parse()
                .map(|n| FamilyPreset::Thm2 { n })
                .map_err(|_| Error::Parse(format!("bad N in {text:?}"))),
            ("scaled", Some(a)) => Ok(FamilyPreset::Scaled {
                a: crate::rational::parse_rational(a)?,
            }),
            _ => Err(Error::Parse(format!("unknown family {text:?}"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sigma_prefix() {
        let prefix: Vec<usize> = (1..=14).map(sigma).collect();
        assert_eq!(prefix, [1, 2, 1, 2, 3, 1, 2, 3, 4, 1, 2, 3, 4, 5]);
    }

    #[test]
    fn presets_validate() {
        for preset in [
            FamilyPreset::Toy,
            FamilyPreset::Utv1,
            FamilyPreset::Thm2 { n: 2 },
            FamilyPreset::Thm2 { n: 5 },
            FamilyPreset::Scaled { a: Rational::from_integer(2.into()) },
            FamilyPreset::Scaled { a: Rational::new(3.into(), 2.into()) },
        ] {
            let params = preset.params().unwrap();
            assert_eq!(params.spacers.len(), params.cuts);
        }
    }

    #[test]
    fn invalid_params_rejected() {
        assert!(FamilyPreset::Thm2 { n: 1 }.params().is_err());
        assert!(FamilyPreset::Scaled { a: Rational::one() }.params().is_err());
        assert!(ConstructionParams::new(1, vec![SpacerRule::Zero], Rational::one()).is_err());
        assert!(ConstructionParams::new(0, vec![SpacerRule::Zero; 2], Rational::one()).is_err());
        assert!(ConstructionParams::new(
            1,
            vec![SpacerRule::Zero, SpacerRule::Constant((-1).into())],
            Rational::one()
        )
        .is_err());
        assert!(ConstructionParams::new(1, vec![SpacerRule::Zero; 2], Rational::zero()).is_err());
    }

    #[test]
    fn scaled_rejects_thin_spacers() {
        // a = 1.05: s_1 = ⌈6.3⌉ − 2⌈2.1⌉ = 1 < h_1 = 3.
        let a = Rational::new(21.into(), 20.into());
        assert!(FamilyPreset::Scaled { a }.params().is_err());
    }

    #[test]
    fn family_parsing() {
        assert_eq!(FamilyPreset::parse("utv1").unwrap(), FamilyPreset::Utv1);
        assert_eq!(FamilyPreset::parse("thm2(3)").unwrap(), FamilyPreset::Thm2 { n: 3 });
        assert_eq!(FamilyPreset::parse("thm2:2").unwrap(), FamilyPreset::Thm2 { n: 2 });
        assert_eq!(
            FamilyPreset::parse("scaled(3/2)").unwrap(),
            FamilyPreset::Scaled { a: Rational::new(3.into(), 2.into()) }
        );
        assert!(FamilyPreset::parse("chacon").is_err());
    }
}
