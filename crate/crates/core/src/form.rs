//! Integer polynomial forms over the handful of bookkeeping variables that
//! appear in dimension constraints and curve-class families.
//!
//! Forms are sparse maps from monomials to integer coefficients. In JSON a
//! form is an object keyed by monomial (`"1"` for the constant, `"d*c"` for
//! a product), e.g. `{"S": 1, "n": 3, "k": 2}`.

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// Bookkeeping variables.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Var {
    /// `Σ codim δ^{j_i}` over the dual weights of η.
    DualCodim,
    /// `|η|`
    Size,
    /// `ℓ(η)`
    Len,
    /// Degree of the pushforward of the bubble class to the blown-up curve.
    Degree,
    /// Multiplicity of the exceptional line class.
    K,
    /// `∫_C c₁(X)`.
    C,
}

impl Var {
    pub const ALL: [Var; 6] = [
        Var::DualCodim,
        Var::Size,
        Var::Len,
        Var::Degree,
        Var::K,
        Var::C,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Var::DualCodim => "S",
            Var::Size => "n",
            Var::Len => "l",
            Var::Degree => "d",
            Var::K => "k",
            Var::C => "c",
        }
    }
}

impl fmt::Display for Var {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Var {
    type Err = FormError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Var::ALL
            .into_iter()
            .find(|v| v.name() == s)
            .ok_or_else(|| FormError::UnknownVariable(s.to_string()))
    }
}

impl Serialize for Var {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(self.name())
    }
}

impl<'de> Deserialize<'de> for Var {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FormError {
    #[error("unknown variable {0:?}")]
    UnknownVariable(String),
    #[error("unbound variable {0} during evaluation")]
    Unbound(Var),
    #[error("integer overflow while evaluating a form")]
    Overflow,
}

/// A monomial as a sorted list of variables with multiplicity.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Monomial(Vec<Var>);

impl Monomial {
    pub fn one() -> Self {
        Self(Vec::new())
    }

    pub fn var(v: Var) -> Self {
        Self(vec![v])
    }

    pub fn product(vars: &[Var]) -> Self {
        let mut v = vars.to_vec();
        v.sort();
        Self(v)
    }

    pub fn vars(&self) -> &[Var] {
        &self.0
    }

    pub fn degree(&self) -> usize {
        self.0.len()
    }

    pub fn contains(&self, v: Var) -> bool {
        self.0.contains(&v)
    }

    fn times(&self, other: &Self) -> Self {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        v.sort();
        Self(v)
    }

    fn key(&self) -> String {
        if self.0.is_empty() {
            "1".to_string()
        } else {
            self.0
                .iter()
                .map(|v| v.name())
                .collect::<Vec<_>>()
                .join("*")
        }
    }

    fn parse_key(s: &str) -> Result<Self, FormError> {
        if s == "1" {
            return Ok(Self::one());
        }
        let vars = s
            .split('*')
            .map(|t| t.trim().parse())
            .collect::<Result<Vec<Var>, _>>()?;
        Ok(Self::product(&vars))
    }
}

/// Sparse integer polynomial; zero coefficients are never stored.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Form {
    terms: BTreeMap<Monomial, i64>,
}

impl Form {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn constant(c: i64) -> Self {
        Self::term(Monomial::one(), c)
    }

    pub fn var(v: Var) -> Self {
        Self::term(Monomial::var(v), 1)
    }

    pub fn term(m: Monomial, c: i64) -> Self {
        let mut terms = BTreeMap::new();
        if c != 0 {
            terms.insert(m, c);
        }
        Self { terms }
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, i64)> {
        self.terms.iter().map(|(m, c)| (m, *c))
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coeff(&self, m: &Monomial) -> i64 {
        self.terms.get(m).copied().unwrap_or(0)
    }

    pub fn linear_coeff(&self, v: Var) -> i64 {
        self.coeff(&Monomial::var(v))
    }

    pub fn constant_term(&self) -> i64 {
        self.coeff(&Monomial::one())
    }

    /// The constant value if the form has no variables.
    pub fn as_constant(&self) -> Option<i64> {
        self.terms
            .keys()
            .all(|m| m.degree() == 0)
            .then(|| self.constant_term())
    }

    pub fn mentions(&self, v: Var) -> bool {
        self.terms.keys().any(|m| m.contains(v))
    }

    fn add_term(&mut self, m: Monomial, c: i64) {
        if c == 0 {
            return;
        }
        let slot = self.terms.entry(m.clone()).or_insert(0);
        *slot += c;
        if *slot == 0 {
            self.terms.remove(&m);
        }
    }

    pub fn plus(&self, other: &Form) -> Form {
        let mut out = self.clone();
        for (m, c) in &other.terms {
            out.add_term(m.clone(), *c);
        }
        out
    }

    pub fn minus(&self, other: &Form) -> Form {
        self.plus(&other.scaled(-1))
    }

    pub fn scaled(&self, k: i64) -> Form {
        let mut out = Form::zero();
        for (m, c) in &self.terms {
            out.add_term(m.clone(), c * k);
        }
        out
    }

    pub fn times(&self, other: &Form) -> Form {
        let mut out = Form::zero();
        for (ma, ca) in &self.terms {
            for (mb, cb) in &other.terms {
                out.add_term(ma.times(mb), ca * cb);
            }
        }
        out
    }

    /// Replaces every occurrence of `v` by `by`.
    pub fn substitute(&self, v: Var, by: &Form) -> Form {
        let mut out = Form::zero();
        for (m, c) in &self.terms {
            let mut acc = Form::constant(*c);
            let mut rest = Vec::new();
            for &w in m.vars() {
                if w == v {
                    acc = acc.times(by);
                } else {
                    rest.push(w);
                }
            }
            out = out.plus(&acc.times(&Form::term(Monomial::product(&rest), 1)));
        }
        out
    }

    pub fn eval(&self, env: &BTreeMap<Var, i64>) -> Result<i64, FormError> {
        let mut total: i64 = 0;
        for (m, c) in &self.terms {
            let mut t = *c;
            for v in m.vars() {
                let x = *env.get(v).ok_or(FormError::Unbound(*v))?;
                t = t.checked_mul(x).ok_or(FormError::Overflow)?;
            }
            total = total.checked_add(t).ok_or(FormError::Overflow)?;
        }
        Ok(total)
    }

    /// Canonical key/coefficient pairs, the JSON shape.
    pub fn to_map(&self) -> BTreeMap<String, i64> {
        self.terms.iter().map(|(m, c)| (m.key(), *c)).collect()
    }

    pub fn from_map(map: &BTreeMap<String, i64>) -> Result<Self, FormError> {
        let mut out = Form::zero();
        for (k, c) in map {
            out.add_term(Monomial::parse_key(k)?, *c);
        }
        Ok(out)
    }
}

impl fmt::Display for Form {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return f.write_str("0");
        }
        // Constant last reads more naturally: "S + 3n + 2".
        let mut ordered: Vec<_> = self.terms.iter().filter(|(m, _)| m.degree() > 0).collect();
        ordered.extend(self.terms.iter().filter(|(m, _)| m.degree() == 0));
        for (i, (m, c)) in ordered.into_iter().enumerate() {
            let mag = c.abs();
            match (i, *c < 0) {
                (0, true) => f.write_str("-")?,
                (0, false) => {}
                (_, true) => f.write_str(" - ")?,
                (_, false) => f.write_str(" + ")?,
            }
            if m.degree() == 0 {
                write!(f, "{mag}")?;
            } else {
                if mag != 1 {
                    write!(f, "{mag}")?;
                }
                f.write_str(&m.key())?;
            }
        }
        Ok(())
    }
}

impl Serialize for Form {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.to_map().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Form {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let map = BTreeMap::<String, i64>::deserialize(deserializer)?;
        Form::from_map(&map).map_err(serde::de::Error::custom)
    }
}

/// `Σ coeff·var + constant` convenience constructor.
pub fn affine(parts: &[(i64, Var)], constant: i64) -> Form {
    parts.iter().fold(Form::constant(constant), |acc, &(c, v)| {
        acc.plus(&Form::var(v).scaled(c))
    })
}
