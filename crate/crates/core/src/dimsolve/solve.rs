use std::fmt;

use serde::{Deserialize, Serialize};

use crate::cohpart::{realize_shape, CohModel, PartShape, Shape};
use crate::form::{affine, Var};

use super::gate::{GateCoeffs, GateProblem, ParamRange};
use super::GateError;

/// Value of a parameter in a solution: a single forced value, or a whole
/// range on which the equation holds identically.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ParamValue {
    Fixed(i64),
    Range(ParamRange),
}

impl ParamValue {
    fn of_range(r: ParamRange) -> Self {
        match r.max {
            Some(m) if m == r.min => ParamValue::Fixed(m),
            _ => ParamValue::Range(r),
        }
    }

    pub fn min(&self) -> i64 {
        match self {
            ParamValue::Fixed(v) => *v,
            ParamValue::Range(r) => r.min,
        }
    }

    pub fn contains(&self, v: i64) -> bool {
        match self {
            ParamValue::Fixed(x) => *x == v,
            ParamValue::Range(r) => r.contains(v),
        }
    }
}

impl fmt::Display for ParamValue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParamValue::Fixed(v) => write!(f, "= {v}"),
            ParamValue::Range(r) => write!(f, "{r}"),
        }
    }
}

/// One admissible aggregate `(ℓ, |η|, S)` with its parameter values and the
/// part shapes realising it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GateSolution {
    pub len: u32,
    pub size: u32,
    pub dual_codim: u32,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d: Option<ParamValue>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<ParamValue>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<ParamValue>,
    pub shapes: Vec<Shape>,
}

impl GateSolution {
    pub fn param(&self, v: Var) -> Option<ParamValue> {
        match v {
            Var::Degree => self.d,
            Var::K => self.k,
            Var::C => self.c,
            _ => None,
        }
    }

    fn sort_key(&self) -> (u32, u32, u32, i64, i64, i64) {
        let m = |p: Option<ParamValue>| p.map_or(i64::MIN, |v| v.min());
        (
            self.len,
            self.size,
            self.dual_codim,
            m(self.d),
            m(self.k),
            m(self.c),
        )
    }
}

impl fmt::Display for GateSolution {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let shapes: Vec<String> = self.shapes.iter().map(ToString::to_string).collect();
        write!(
            f,
            "l = {}, n = {}, S = {}: {}",
            self.len,
            self.size,
            self.dual_codim,
            shapes.join(" | ")
        )?;
        for (name, p) in [("d", self.d), ("k", self.k), ("c", self.c)] {
            if let Some(p) = p {
                write!(f, ", {name} {p}")?;
            }
        }
        Ok(())
    }
}

/// For every `|η| ≥ from_size`, `lhs - rhs ≥ slope·|η| + offset > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct TailBound {
    pub from_size: u32,
    pub slope: i64,
    pub offset: i64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Verdict {
    Empty,
    SolutionSet(Vec<GateSolution>),
}

impl Verdict {
    pub fn solutions(&self) -> &[GateSolution] {
        match self {
            Verdict::Empty => &[],
            Verdict::SolutionSet(s) => s,
        }
    }

    pub fn is_empty(&self) -> bool {
        matches!(self, Verdict::Empty)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GateCertificate {
    pub problem: GateProblem,
    pub verdict: Verdict,
    /// Every `|η|` up to this bound was checked exhaustively.
    pub enumerated_up_to: u32,
    pub tail: TailBound,
    pub reasoning: Vec<String>,
}

#[derive(Debug, Clone, Copy)]
struct Params {
    k: Option<ParamRange>,
    c: Option<ParamRange>,
    d: bool,
}

type Assignment = (Option<ParamValue>, Option<ParamValue>, Option<ParamValue>);

impl Params {
    fn of(p: &GateProblem, co: &GateCoeffs) -> Self {
        let k = (co.k != 0).then(|| p.bounds[&Var::K]);
        let c = (co.c != 0 || co.dc != 0).then(|| p.bounds[&Var::C]);
        Params {
            k,
            c,
            d: co.d != 0 || co.dc != 0,
        }
    }

    fn k_floor(&self, co: &GateCoeffs) -> i64 {
        self.k.map_or(0, |r| co.k * r.min)
    }

    /// Smallest value the parameter terms can take (at `d = 0`).
    fn floor(&self, co: &GateCoeffs) -> i64 {
        self.k_floor(co) + self.c.map_or(0, |r| co.c * r.min)
    }
}

fn solve_k(co: &GateCoeffs, p: &Params, rem: i64) -> Option<Option<ParamValue>> {
    match p.k {
        None => (rem == 0).then_some(None),
        Some(r) => (rem % co.k == 0 && r.contains(rem / co.k))
            .then_some(Some(ParamValue::Fixed(rem / co.k))),
    }
}

/// Solutions of `a_k·k + gamma·c = t` over the declared ranges.
fn solve_kc(
    co: &GateCoeffs,
    p: &Params,
    c_range: Option<ParamRange>,
    t: i64,
    gamma: i64,
) -> Vec<(Option<ParamValue>, Option<ParamValue>)> {
    let mut out = Vec::new();
    match c_range {
        None => {
            if let Some(k) = solve_k(co, p, t) {
                out.push((k, None));
            }
        }
        Some(cr) if gamma == 0 => {
            if let Some(k) = solve_k(co, p, t) {
                out.push((k, Some(ParamValue::of_range(cr))));
            }
        }
        Some(cr) => {
            let top = (t - p.k_floor(co)).div_euclid(gamma);
            let top = cr.max.map_or(top, |m| m.min(top));
            for c in cr.min..=top {
                if let Some(k) = solve_k(co, p, t - gamma * c) {
                    out.push((k, Some(ParamValue::Fixed(c))));
                }
            }
        }
    }
    out
}

/// All parameter assignments with `Σ parameter terms = t`.
fn solve_params(co: &GateCoeffs, p: &Params, t: i64) -> Vec<Assignment> {
    let with_d = |d: Option<ParamValue>, v: Vec<(Option<ParamValue>, Option<ParamValue>)>| {
        v.into_iter().map(move |(k, c)| (d, k, c))
    };
    if !p.d {
        return with_d(None, solve_kc(co, p, p.c, t, co.c)).collect();
    }
    let mut out: Vec<Assignment> =
        with_d(Some(ParamValue::Fixed(0)), solve_kc(co, p, p.c, t, co.c)).collect();
    let cmin = p.c.map_or(0, |r| r.min);
    let step = co.d + co.dc * cmin;
    if step > 0 {
        let mut d = 1;
        while step * d + p.floor(co) <= t {
            out.extend(with_d(
                Some(ParamValue::Fixed(d)),
                solve_kc(co, p, p.c, t - co.d * d, co.c + co.dc * d),
            ));
            d += 1;
        }
    } else {
        // Only `d·c` carries `d` and `c` may vanish: `c ≥ 1` bounds `d`,
        // while `c = 0` leaves `d ≥ 1` free.
        let cr = p.c.expect("d·c present");
        let positive = ParamRange {
            min: 1,
            max: cr.max,
        };
        if positive.max.is_none_or(|m| m >= 1) {
            let mut d = 1;
            while co.dc * d + co.c + p.k_floor(co) <= t {
                out.extend(with_d(
                    Some(ParamValue::Fixed(d)),
                    solve_kc(co, p, Some(positive), t, co.c + co.dc * d),
                ));
                d += 1;
            }
        }
        if cr.contains(0) {
            if let Some(k) = solve_k(co, p, t) {
                out.push((
                    Some(ParamValue::Range(ParamRange::at_least(1))),
                    k,
                    Some(ParamValue::Fixed(0)),
                ));
            }
        }
    }
    out
}

/// Multisets of `len` part shapes with total size `size` and total dual
/// codimension `codim`, each codimension at most `max_codim`.
pub(crate) fn shapes_for(len: u32, size: u32, codim: u32, max_codim: u32) -> Vec<Shape> {
    fn go(
        left: u32,
        size: u32,
        codim: u32,
        cap: PartShape,
        max_codim: u32,
        acc: &mut Vec<PartShape>,
        out: &mut Vec<Shape>,
    ) {
        if left == 0 {
            if size == 0 && codim == 0 {
                out.push(Shape::new(acc.clone()));
            }
            return;
        }
        if size < left || codim > left * max_codim {
            return;
        }
        for s in (1..=cap.size.min(size - (left - 1))).rev() {
            let top = if s == cap.size {
                cap.dual_codim
            } else {
                max_codim
            };
            for dc in (0..=top.min(codim)).rev() {
                let part = PartShape {
                    size: s,
                    dual_codim: dc,
                };
                acc.push(part);
                go(left - 1, size - s, codim - dc, part, max_codim, acc, out);
                acc.pop();
            }
        }
    }
    let mut out = Vec::new();
    let cap = PartShape {
        size,
        dual_codim: max_codim,
    };
    go(len, size, codim, cap, max_codim, &mut Vec::new(), &mut out);
    out.sort();
    out
}

fn tail_bound(label: &str, co: &GateCoeffs, floor: i64) -> Result<TailBound, GateError> {
    let slope = co.n + co.l.min(0);
    if slope <= 0 {
        return Err(GateError::DominanceFails {
            label: label.to_string(),
            slope,
        });
    }
    let offset = co.b + floor;
    let from_size = if offset > 0 { 0 } else { (-offset) / slope + 1 };
    Ok(TailBound {
        from_size: from_size as u32,
        slope,
        offset,
    })
}

/// Solves a gate: exhaustive enumeration of `|η| ≤ enum_bound` (extended if
/// the tail bound needs more) plus a dominance proof for larger `|η|`.
pub fn solve_gate(p: &GateProblem, enum_bound: u32) -> Result<GateCertificate, GateError> {
    if enum_bound == 0 {
        return Err(GateError::ZeroEnumBound);
    }
    let co = p.coeffs()?;
    let params = Params::of(p, &co);
    let tail = tail_bound(&p.label, &co, params.floor(&co))?;
    let model = match &p.surface {
        Some(name) => {
            Some(CohModel::by_name(name).ok_or_else(|| GateError::UnknownSurface(name.clone()))?)
        }
        None => None,
    };
    let upto = enum_bound.max(tail.from_size.saturating_sub(1));

    let mut solutions = Vec::new();
    for n in 0..=upto {
        let lens = if n == 0 { 0..=0 } else { 1..=n };
        for l in lens {
            for s in 0..=p.max_codim * l {
                let agg = co.s * i64::from(s) + co.n * i64::from(n) + co.l * i64::from(l) + co.b;
                let assignments = solve_params(&co, &params, -agg);
                if assignments.is_empty() {
                    continue;
                }
                let shapes: Vec<Shape> = shapes_for(l, n, s, p.max_codim)
                    .into_iter()
                    .filter(|sh| {
                        model
                            .as_ref()
                            .is_none_or(|m| !realize_shape(m, sh).is_empty())
                    })
                    .collect();
                if shapes.is_empty() {
                    continue;
                }
                for (d, k, c) in assignments {
                    solutions.push(GateSolution {
                        len: l,
                        size: n,
                        dual_codim: s,
                        d,
                        k,
                        c,
                        shapes: shapes.clone(),
                    });
                }
            }
        }
    }
    solutions.sort_by_key(GateSolution::sort_key);

    let reasoning = reasoning(p, &co, &params, &tail, upto, &solutions);
    let verdict = if solutions.is_empty() {
        Verdict::Empty
    } else {
        Verdict::SolutionSet(solutions)
    };
    Ok(GateCertificate {
        problem: p.clone(),
        verdict,
        enumerated_up_to: upto,
        tail,
        reasoning,
    })
}

fn reasoning(
    p: &GateProblem,
    co: &GateCoeffs,
    params: &Params,
    tail: &TailBound,
    upto: u32,
    sols: &[GateSolution],
) -> Vec<String> {
    let mut steps = vec![
        format!("gate: {p}"),
        format!("lhs - rhs = {}", p.residual()),
    ];
    let mut facts = vec!["S >= 0".to_string()];
    if co.l < 0 {
        facts.push("l <= n".into());
    } else if co.l > 0 {
        facts.push("l >= 0".into());
    }
    if params.d {
        facts.push("d >= 0".into());
    }
    if let Some(r) = params.k {
        facts.push(format!("k >= {}", r.min));
    }
    if let Some(r) = params.c {
        facts.push(format!("c >= {}", r.min));
    }
    let bound = affine(&[(tail.slope, Var::Size)], tail.offset);
    steps.push(format!("{} give lhs - rhs >= {bound}", facts.join(", ")));
    steps.push(format!("{bound} > 0 for n >= {}", tail.from_size));
    if tail.from_size == 0 {
        steps.push("hence lhs - rhs > 0 everywhere: no solution".into());
    } else {
        steps.push(format!(
            "n <= {upto} checked exhaustively over l <= n, 0 <= S <= {}l: {} solution(s)",
            p.max_codim,
            sols.len()
        ));
    }
    for s in sols {
        steps.push(format!("solution: {s}"));
    }
    steps
}
