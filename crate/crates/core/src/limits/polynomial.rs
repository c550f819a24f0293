use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Signed, Zero};

use crate::rational::{format_rational, parse_int, parse_rational};
use crate::{Error, Int, Rational};

/// A nonnegative combination `Σ c_p T^p` with `Σ c_p ≤ 1`; the deficit
/// `1 − Σ c_p` is the mass that escapes to infinity.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct OperatorPolynomial {
    coeffs: BTreeMap<Int, Rational>,
}

impl OperatorPolynomial {
    pub fn new(coeffs: impl IntoIterator<Item = (Int, Rational)>) -> Result<Self, Error> {
        let mut map: BTreeMap<Int, Rational> = BTreeMap::new();
        for (power, c) in coeffs {
            if c.is_negative() {
                return Err(Error::Parse(format!("negative coefficient {} on T^{power}", format_rational(&c))));
            }
            *map.entry(power).or_insert_with(Rational::zero) += c;
        }
        map.retain(|_, c| !c.is_zero());
        let poly = OperatorPolynomial { coeffs: map };
        if poly.total() > Rational::one() {
            return Err(Error::Parse(format!(
                "coefficients sum to {} > 1",
                format_rational(&poly.total())
            )));
        }
        Ok(poly)
    }

    /// The zero operator (the limit of a mixing sequence).
    pub fn zero() -> Self {
        OperatorPolynomial::default()
    }

    pub fn monomial(coefficient: Rational, power: impl Into<Int>) -> Result<Self, Error> {
        OperatorPolynomial::new([(power.into(), coefficient)])
    }

    pub fn coeffs(&self) -> &BTreeMap<Int, Rational> {
        &self.coeffs
    }

    pub fn total(&self) -> Rational {
        self.coeffs.values().fold(Rational::zero(), |acc, c| acc + c)
    }

    pub fn deficit(&self) -> Rational {
        Rational::one() - self.total()
    }

    /// Parses sums like `"1/2*T^0 + 1/4*T^-3"`, `"T^1"` or `"0"`.
    pub fn parse(text: &str) -> Result<Self, Error> {
        let text = text.trim();
        if text.is_empty() || text == "0" {
            return Ok(OperatorPolynomial::zero());
        }
        let mut terms = Vec::new();
        for term in text.split('+').map(str::trim) {
            let (coefficient, power) = match term.split_once('T') {
                Some((c, p)) => {
                    let c = c.trim().trim_end_matches('*').trim();
                    let c = if c.is_empty() { Rational::one() } else { parse_rational(c)? };
                    let p = p.trim();
                    let p = match p.strip_prefix('^') {
                        Some(rest) => parse_int(rest.trim().trim_matches(|ch| ch == '{' || ch == '}'))?,
                        None if p.is_empty() => Int::one(),
                        None => return Err(Error::Parse(format!("bad term {term:?}"))),
                    };
                    (c, p)
                }
                None => (parse_rational(term)?, Int::zero()),
            };
            terms.push((power, coefficient));
        }
        OperatorPolynomial::new(terms)
    }
}

impl fmt::Display for OperatorPolynomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.coeffs.is_empty() {
            return f.write_str("0");
        }
        for (i, (p, c)) in self.coeffs.iter().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            write!(f, "{}*T^{p}", format_rational(c))?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::new(n.into(), d.into())
    }

    #[test]
    fn parsing() {
        let p = OperatorPolynomial::parse("1/2*T^0").unwrap();
        assert_eq!(p.coeffs().get(&Int::zero()), Some(&q(1, 2)));
        let p = OperatorPolynomial::parse("1/3*T^0 + 1/3*T^-2").unwrap();
        assert_eq!(p.coeffs().get(&Int::from(-2)), Some(&q(1, 3)));
        assert_eq!(p.deficit(), q(1, 3));
        assert_eq!(OperatorPolynomial::parse("T").unwrap().total(), q(1, 1));
        assert_eq!(OperatorPolynomial::parse("0").unwrap(), OperatorPolynomial::zero());
        assert_eq!(OperatorPolynomial::parse("1/4").unwrap().coeffs().get(&Int::zero()), Some(&q(1, 4)));
    }

    #[test]
    fn invalid_polynomials() {
        assert!(OperatorPolynomial::parse("3/4*T^0 + 1/2*T^1").is_err());
        assert!(OperatorPolynomial::parse("-1/2*T^0").is_err());
        assert!(OperatorPolynomial::parse("1/2*T^x").is_err());
    }

    #[test]
    fn display_round_trip() {
        let p = OperatorPolynomial::parse("1/4*T^1 + 1/2*T^-1").unwrap();
        assert_eq!(OperatorPolynomial::parse(&p.to_string()).unwrap(), p);
    }
}
