use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::cohpart::{Insertion, WeightedPartition};
use crate::form::{Form, Monomial, Var};
use crate::geomcat::{ClassFamily, Degeneration};

use super::GateError;

/// Inclusive integer range; `max = None` is unbounded above.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct ParamRange {
    pub min: i64,
    #[serde(default)]
    pub max: Option<i64>,
}

impl ParamRange {
    pub fn at_least(min: i64) -> Self {
        Self { min, max: None }
    }

    pub fn fixed(v: i64) -> Self {
        Self {
            min: v,
            max: Some(v),
        }
    }

    pub fn contains(&self, v: i64) -> bool {
        v >= self.min && self.max.is_none_or(|m| v <= m)
    }
}

impl fmt::Display for ParamRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.max {
            Some(m) if m == self.min => write!(f, "= {m}"),
            Some(m) => write!(f, "in [{}, {m}]", self.min),
            None => write!(f, ">= {}", self.min),
        }
    }
}

/// A reduced dimension constraint `lhs = rhs`.
///
/// Variables: `S` (dual-weight codimension sum), `n = |η|`, `l = ℓ(η)`,
/// `d` (bubble `C`-degree, `≥ 0`), and the parameters `k`, `c` whose ranges
/// are listed in `bounds`. The side conditions `0 ≤ S ≤ max_codim·l`,
/// `l ≤ n` and `n = 0 ⇔ l = 0` are implicit.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GateProblem {
    pub label: String,
    pub lhs: Form,
    pub rhs: Form,
    #[serde(default)]
    pub bounds: BTreeMap<Var, ParamRange>,
    /// Largest codimension of a surface class (2 for surfaces).
    #[serde(default = "default_max_codim")]
    pub max_codim: u32,
    /// Surface model used to realise solution shapes as partitions.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub surface: Option<String>,
}

fn default_max_codim() -> u32 {
    2
}

impl fmt::Display for GateProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} = {}", self.lhs, self.rhs)?;
        for (v, r) in &self.bounds {
            write!(f, ", {v} {r}")?;
        }
        Ok(())
    }
}

/// Coefficients of a gate in the supported shape
/// `a_S·S + a_n·n + a_l·l + a_k·k + a_c·c + a_d·d + a_dc·d·c + b = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) struct GateCoeffs {
    pub s: i64,
    pub n: i64,
    pub l: i64,
    pub k: i64,
    pub c: i64,
    pub d: i64,
    pub dc: i64,
    pub b: i64,
}

impl GateProblem {
    /// `lhs - rhs`.
    pub fn residual(&self) -> Form {
        self.lhs.minus(&self.rhs)
    }

    pub fn mentions(&self, v: Var) -> bool {
        self.lhs.mentions(v) || self.rhs.mentions(v)
    }

    pub fn range(&self, v: Var) -> Option<ParamRange> {
        match v {
            Var::Degree if self.mentions(v) => Some(ParamRange::at_least(0)),
            Var::K | Var::C if self.mentions(v) => self.bounds.get(&v).copied(),
            _ => None,
        }
    }

    pub(crate) fn coeffs(&self) -> Result<GateCoeffs, GateError> {
        let g = self.residual();
        let dc = Monomial::product(&[Var::Degree, Var::C]);
        for (m, _) in g.terms() {
            let ok = m.degree() <= 1 || *m == dc;
            if !ok {
                return Err(GateError::UnsupportedGate(format!(
                    "monomial {m:?} is not supported"
                )));
            }
        }
        let co = GateCoeffs {
            s: g.linear_coeff(Var::DualCodim),
            n: g.linear_coeff(Var::Size),
            l: g.linear_coeff(Var::Len),
            k: g.linear_coeff(Var::K),
            c: g.linear_coeff(Var::C),
            d: g.linear_coeff(Var::Degree),
            dc: g.coeff(&dc),
            b: g.constant_term(),
        };
        for (name, v) in [
            ("S", co.s),
            ("k", co.k),
            ("c", co.c),
            ("d", co.d),
            ("d*c", co.dc),
        ] {
            if v < 0 {
                return Err(GateError::UnsupportedGate(format!(
                    "coefficient of {name} is {v}; the solver needs it nonnegative"
                )));
            }
        }
        for v in [Var::K, Var::C] {
            if self.mentions(v) {
                let r = self.bounds.get(&v).ok_or(GateError::MissingBound(v))?;
                if r.max.is_some_and(|m| m < r.min) {
                    return Err(GateError::InvalidBound(v));
                }
            }
        }
        if co.dc != 0 && self.bounds[&Var::C].min < 0 {
            return Err(GateError::InvalidBound(Var::C));
        }
        Ok(co)
    }
}

/// `Σ (codim γ_i + d_i - 1)` over descendent insertions.
pub fn insertion_codim_sum(insertions: &[Insertion]) -> i64 {
    insertions.iter().map(Insertion::codim).sum()
}

/// The η-dependent part of the relative virtual dimension of the side
/// carrying `η^∨`: `Σ codim δ^{j_i} - ℓ(η) + |η|`.
pub fn vdim_relative_gap(eta: &WeightedPartition) -> i64 {
    eta.nakajima_codim()
}

/// Everything [`build_gate`] needs about one degeneration step.
#[derive(Debug, Clone)]
pub struct GateSetup<'a> {
    pub label: String,
    pub degeneration: &'a Degeneration,
    /// Required `β₁·E` on the bubble, for degenerations of `X̃`.
    pub e_value: Option<Form>,
    /// Insertions supported near the centre, which land on the bubble.
    pub small_insertions: &'a [Insertion],
    pub k_range: Option<ParamRange>,
    pub c_range: Option<ParamRange>,
}

/// The bubble class family a setup constrains, `β₁·S = n` (and `β₁·E`).
pub fn bubble_family(setup: &GateSetup<'_>) -> Result<ClassFamily, GateError> {
    let deg = setup.degeneration;
    let mut cons = vec![(deg.small_divisor, Form::var(Var::Size))];
    if let Some(e) = &setup.e_value {
        cons.push(("E", e.clone()));
    }
    Ok(deg.small.geometry().solve_class_constraints(&cons)?)
}

/// Reduces the dimension constraint
/// `vdim(X₁/S, β₁) + vdim(X₂/S, β₂) = vdim(X, β) + 2|η|` to a gate.
///
/// The bubble contributes `∫_{β₁} c₁`, the large side its matching
/// insertions plus `codim C_{η^∨} = S - l + n`, and the absolute side the same
/// insertions plus those on the bubble. Insertions common to both sides
/// cancel, leaving `S + ∫_{β₁} c₁ - n = l + Σ_bubble (codim γ + d - 1)`.
pub fn build_gate(setup: &GateSetup<'_>) -> Result<GateProblem, GateError> {
    let deg = setup.degeneration;
    let family = bubble_family(setup)?;
    let c1 = deg.small.geometry().c1_pair(&family.class)?;
    let raw = Form::var(Var::DualCodim)
        .plus(&c1)
        .minus(&Form::var(Var::Size));
    let extra = insertion_codim_sum(setup.small_insertions);
    let constant = raw.constant_term();
    let lhs = raw.minus(&Form::constant(constant));
    let rhs = Form::var(Var::Len).plus(&Form::constant(extra - constant));

    let mut bounds = BTreeMap::new();
    if lhs.mentions(Var::K) {
        bounds.insert(
            Var::K,
            setup.k_range.ok_or(GateError::MissingBound(Var::K))?,
        );
    }
    if lhs.mentions(Var::C) {
        bounds.insert(
            Var::C,
            setup.c_range.ok_or(GateError::MissingBound(Var::C))?,
        );
    }
    Ok(GateProblem {
        label: setup.label.clone(),
        lhs,
        rhs,
        bounds,
        max_codim: deg.surface.dim(),
        surface: Some(deg.surface.name().to_string()),
    })
}
