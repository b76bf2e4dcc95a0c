//! Exact Laurent polynomials in `q` with rational coefficients.
//!
//! Every coefficient the engine manipulates lives here: the `q^{-|η|}`
//! gluing factors of the degeneration formula, the closed leaf values and
//! the final blow-up factors. Values are finite sums; there is no series
//! truncation and no floating point.
//!
//! The canonical text form lists terms with ascending exponents as
//! `c*q^k`, joined by ` + ` or ` - `, with rationals written `p` or `p/r`:
//!
//! ```text
//! 1/2*q^1 - 1/2*q^3
//! ```
//!
//! The zero polynomial renders as `0`. [`QLaurent::from_str`] accepts the
//! canonical form back bit-exactly, and also the looser hand-written forms
//! `q`, `1 + 2q^2`, `-q^-1`.

use std::collections::BTreeMap;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum LaurentError {
    #[error("division by the zero polynomial")]
    DivisionByZero,
    #[error("{dividend} is not divisible by {divisor}")]
    NonExactDivision { dividend: String, divisor: String },
    #[error("cannot parse Laurent polynomial {input:?}: {reason}")]
    Parse { input: String, reason: String },
}

/// A finite Laurent polynomial `Σ c_k q^k` with `c_k ∈ ℚ`.
///
/// Stored coefficients are never zero, so structural equality is
/// coefficient-wise equality.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct QLaurent {
    terms: BTreeMap<i64, BigRational>,
}

impl QLaurent {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::monomial(BigRational::one(), 0)
    }

    /// The variable `q` itself.
    pub fn q() -> Self {
        Self::monomial(BigRational::one(), 1)
    }

    pub fn constant(c: BigRational) -> Self {
        Self::monomial(c, 0)
    }

    pub fn monomial(c: BigRational, exponent: i64) -> Self {
        let mut terms = BTreeMap::new();
        if !c.is_zero() {
            terms.insert(exponent, c);
        }
        Self { terms }
    }

    /// Builds a polynomial from `(exponent, coefficient)` pairs, summing
    /// repeated exponents.
    pub fn from_terms<I>(terms: I) -> Self
    where
        I: IntoIterator<Item = (i64, BigRational)>,
    {
        let mut out = Self::zero();
        for (k, c) in terms {
            out.add_term(k, c);
        }
        out
    }

    /// Shorthand for integer coefficients, mostly for tests and tables.
    pub fn from_ints(terms: &[(i64, i64)]) -> Self {
        Self::from_terms(
            terms
                .iter()
                .map(|&(k, c)| (k, BigRational::from_integer(c.into()))),
        )
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, exponent: i64) -> BigRational {
        self.terms
            .get(&exponent)
            .cloned()
            .unwrap_or_else(BigRational::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (i64, &BigRational)> {
        self.terms.iter().map(|(k, c)| (*k, c))
    }

    pub fn min_exponent(&self) -> Option<i64> {
        self.terms.keys().next().copied()
    }

    pub fn max_exponent(&self) -> Option<i64> {
        self.terms.keys().next_back().copied()
    }

    fn add_term(&mut self, exponent: i64, c: BigRational) {
        if c.is_zero() {
            return;
        }
        let slot = self.terms.entry(exponent).or_insert_with(BigRational::zero);
        *slot += c;
        if slot.is_zero() {
            self.terms.remove(&exponent);
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (k, c) in &other.terms {
            out.add_term(*k, c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&-BigRational::one()))
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for (ka, ca) in &self.terms {
            for (kb, cb) in &other.terms {
                out.add_term(ka + kb, ca * cb);
            }
        }
        out
    }

    pub fn scale(&self, c: &BigRational) -> Self {
        if c.is_zero() {
            return Self::zero();
        }
        Self {
            terms: self.terms.iter().map(|(k, v)| (*k, v * c)).collect(),
        }
    }

    /// Multiplies by `q^shift`.
    pub fn shift(&self, shift: i64) -> Self {
        Self {
            terms: self
                .terms
                .iter()
                .map(|(k, v)| (k + shift, v.clone()))
                .collect(),
        }
    }

    pub fn pow(&self, exp: u32) -> Self {
        (0..exp).fold(Self::one(), |acc, _| acc.mul(self))
    }

    /// Exact quotient `self / divisor` in `ℚ[q, q^{-1}]`.
    ///
    /// Both operands are normalised to ordinary polynomials by pulling out
    /// their lowest power of `q`, then long division runs from the leading
    /// term. Any nonzero remainder is an error, never a truncation.
    pub fn divide_exact(&self, divisor: &Self) -> Result<Self, LaurentError> {
        let (Some(dlo), Some(dhi)) = (divisor.min_exponent(), divisor.max_exponent()) else {
            return Err(LaurentError::DivisionByZero);
        };
        if self.is_zero() {
            return Ok(Self::zero());
        }
        let lead = divisor.terms[&dhi].clone();
        let mut rem = self.clone();
        let mut quot = Self::zero();
        // Units q^k are invertible, so only the span between the lowest and
        // highest exponents of the divisor matters.
        let span = dhi - dlo;
        while let Some(rhi) = rem.max_exponent() {
            let rlo = rem.min_exponent().unwrap_or(rhi);
            if rhi - rlo < span {
                return Err(LaurentError::NonExactDivision {
                    dividend: self.to_string(),
                    divisor: divisor.to_string(),
                });
            }
            let step = Self::monomial(&rem.terms[&rhi] / &lead, rhi - dhi);
            rem = rem.sub(&step.mul(divisor));
            quot = quot.add(&step);
        }
        Ok(quot)
    }
}

impl Add for &QLaurent {
    type Output = QLaurent;
    fn add(self, rhs: &QLaurent) -> QLaurent {
        QLaurent::add(self, rhs)
    }
}

impl Sub for &QLaurent {
    type Output = QLaurent;
    fn sub(self, rhs: &QLaurent) -> QLaurent {
        QLaurent::sub(self, rhs)
    }
}

impl Mul for &QLaurent {
    type Output = QLaurent;
    fn mul(self, rhs: &QLaurent) -> QLaurent {
        QLaurent::mul(self, rhs)
    }
}

impl Neg for &QLaurent {
    type Output = QLaurent;
    fn neg(self) -> QLaurent {
        self.scale(&-BigRational::one())
    }
}

fn write_rational(f: &mut fmt::Formatter<'_>, c: &BigRational) -> fmt::Result {
    if c.denom().is_one() {
        write!(f, "{}", c.numer())
    } else {
        write!(f, "{}/{}", c.numer(), c.denom())
    }
}

impl fmt::Display for QLaurent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        for (i, (k, c)) in self.terms.iter().enumerate() {
            if i == 0 {
                if c.is_negative() {
                    f.write_str("-")?;
                }
            } else if c.is_negative() {
                f.write_str(" - ")?;
            } else {
                f.write_str(" + ")?;
            }
            write_rational(f, &c.abs())?;
            write!(f, "*q^{k}")?;
        }
        Ok(())
    }
}

impl fmt::Debug for QLaurent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "QLaurent({self})")
    }
}

struct Parser<'a> {
    input: &'a str,
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn new(input: &'a str) -> Self {
        Self {
            input,
            bytes: input.as_bytes(),
            pos: 0,
        }
    }

    fn fail<T>(&self, reason: impl Into<String>) -> Result<T, LaurentError> {
        Err(LaurentError::Parse {
            input: self.input.to_string(),
            reason: format!("{} at byte {}", reason.into(), self.pos),
        })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&self) -> Option<u8> {
        self.bytes.get(self.pos).copied()
    }

    fn eat(&mut self, b: u8) -> bool {
        self.skip_ws();
        if self.peek() == Some(b) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn digits(&mut self) -> Option<&'a str> {
        self.skip_ws();
        let start = self.pos;
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_digit() {
            self.pos += 1;
        }
        (self.pos > start).then(|| &self.input[start..self.pos])
    }

    fn signed_int(&mut self) -> Result<i64, LaurentError> {
        let neg = if self.eat(b'-') {
            true
        } else {
            self.eat(b'+');
            false
        };
        let Some(d) = self.digits() else {
            return self.fail("expected exponent");
        };
        let v: i64 = match d.parse() {
            Ok(v) => v,
            Err(_) => return self.fail("exponent out of range"),
        };
        Ok(if neg { -v } else { v })
    }

    fn term(&mut self, negative: bool) -> Result<(i64, BigRational), LaurentError> {
        let mut coeff = match self.digits() {
            Some(num) => {
                let num: BigInt = num.parse().expect("ascii digits");
                let den: BigInt = if self.eat(b'/') {
                    match self.digits() {
                        Some(d) => d.parse().expect("ascii digits"),
                        None => return self.fail("expected denominator"),
                    }
                } else {
                    BigInt::one()
                };
                if den.is_zero() {
                    return self.fail("zero denominator");
                }
                Some(BigRational::new(num, den))
            }
            None => None,
        };
        let has_star = self.eat(b'*');
        let mut exponent = 0;
        if self.eat(b'q') {
            exponent = if self.eat(b'^') {
                self.signed_int()?
            } else {
                1
            };
        } else if has_star || coeff.is_none() {
            return self.fail("expected q");
        }
        let c = coeff.take().unwrap_or_else(BigRational::one);
        Ok((exponent, if negative { -c } else { c }))
    }

    fn parse(mut self) -> Result<QLaurent, LaurentError> {
        let mut out = QLaurent::zero();
        let mut negative = self.eat(b'-');
        if !negative {
            self.eat(b'+');
        }
        loop {
            let (k, c) = self.term(negative)?;
            out.add_term(k, c);
            if self.eat(b'+') {
                negative = false;
            } else if self.eat(b'-') {
                negative = true;
            } else {
                break;
            }
        }
        self.skip_ws();
        if self.pos != self.bytes.len() {
            return self.fail("trailing input");
        }
        Ok(out)
    }
}

impl FromStr for QLaurent {
    type Err = LaurentError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Parser::new(s).parse()
    }
}

impl Serialize for QLaurent {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for QLaurent {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(s: &str) -> QLaurent {
        s.parse().unwrap()
    }

    fn half() -> BigRational {
        BigRational::new(1.into(), 2.into())
    }

    #[test]
    fn add_examples() {
        assert!(p("1+q").add(&p("-1-q")).is_zero());
        assert_eq!(p("q^-1").add(&p("q")), p("q^-1 + q"));
        assert_eq!(p("q").mul(&p("1+q")).add(&p("q^2")), p("q + 2q^2"));
    }

    #[test]
    fn mul_examples() {
        assert_eq!(p("q").mul(&p("1+q").pow(2)), p("q + 2q^2 + q^3"));
        assert_eq!(p("q^-1").mul(&p("q")), QLaurent::one());
        assert_eq!(p("1/2 - 1/2q^2").mul(&p("q")), p("1/2q - 1/2q^3"));
    }

    #[test]
    fn scale_examples() {
        assert_eq!(
            p("1/2q").scale(&BigRational::from_integer(2.into())),
            p("q")
        );
        assert!(p("1+q").scale(&BigRational::zero()).is_zero());
        assert_eq!(p("q - q^3").scale(&-BigRational::one()), p("-q + q^3"));
    }

    #[test]
    fn divide_examples() {
        let q = QLaurent::q();
        let one_plus_q = p("1+q");
        let lhs = q.mul(&one_plus_q.pow(2));
        assert_eq!(lhs.divide_exact(&q).unwrap(), one_plus_q.pow(2));

        let half_factor = p("1 - q^2").scale(&half());
        assert_eq!(half_factor.mul(&q).divide_exact(&q).unwrap(), half_factor);

        assert_eq!(
            one_plus_q.divide_exact(&one_plus_q).unwrap(),
            QLaurent::one()
        );
    }

    #[test]
    fn divide_errors() {
        assert_eq!(
            p("1+q").divide_exact(&QLaurent::zero()),
            Err(LaurentError::DivisionByZero)
        );
        assert!(matches!(
            p("1+q^2").divide_exact(&p("1+q")),
            Err(LaurentError::NonExactDivision { .. })
        ));
        // Laurent units divide everything.
        assert_eq!(p("1+q").divide_exact(&p("q^3")).unwrap(), p("q^-3 + q^-2"));
        assert!(QLaurent::zero().divide_exact(&p("1+q")).unwrap().is_zero());
    }

    #[test]
    fn canonical_rendering() {
        assert_eq!(QLaurent::zero().to_string(), "0");
        assert_eq!(p("q - 1/2q^3").to_string(), "1*q^1 - 1/2*q^3");
        assert_eq!(p("-q^-1 + 3").to_string(), "-1*q^-1 + 3*q^0");
        let s = "-2/3*q^-2 + 1*q^0 - 5*q^7";
        assert_eq!(p(s).to_string(), s);
    }

    #[test]
    fn parse_rejects_garbage() {
        for bad in ["", "q^", "1/0", "1 +", "x", "2*", "q q"] {
            assert!(bad.parse::<QLaurent>().is_err(), "{bad:?} parsed");
        }
    }

    #[test]
    fn serde_uses_canonical_string() {
        let v = p("1/2q - 1/2q^3");
        let json = serde_json::to_string(&v).unwrap();
        assert_eq!(json, "\"1/2*q^1 - 1/2*q^3\"");
        assert_eq!(serde_json::from_str::<QLaurent>(&json).unwrap(), v);
    }
}
