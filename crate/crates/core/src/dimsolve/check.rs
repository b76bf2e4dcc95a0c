//! Independent re-validation of gate certificates.
//!
//! Nothing here calls the solver. The tail claim is checked by interval
//! arithmetic on the residual form, the finite window by direct search.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::form::{Form, Monomial, Var};

use super::gate::ParamRange;
use super::solve::{GateCertificate, ParamValue};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CheckError {
    #[error("residual has a term the checker cannot bound: {0}")]
    UnsupportedTerm(String),
    #[error("tail bound fails: lower bound {lower} on n >= {from_size}")]
    TailNotPositive { lower: String, from_size: u32 },
    #[error("enumeration stops at {upto} but the tail only starts at {from_size}")]
    Gap { upto: u32, from_size: u32 },
    #[error("solution at (l, n, S) = {0:?} does not satisfy the gate")]
    Unsound((u32, u32, u32)),
    #[error("solution at (l, n, S) = {0:?} is missing from the certificate")]
    Missing((u32, u32, u32)),
    #[error("certificate lists (l, n, S) = {0:?} but no parameters solve it")]
    Spurious((u32, u32, u32)),
    #[error("shape {shape} does not match (l, n, S) = {agg:?}")]
    ShapeMismatch { shape: String, agg: (u32, u32, u32) },
    #[error("parameter {0} is missing a declared range")]
    MissingBound(Var),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckReport {
    /// Interval lower bound of `lhs - rhs` over the tail region.
    pub tail_lower_bound: String,
    pub points_checked: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Ext {
    NegInf,
    Fin(i128),
    PosInf,
}

impl Ext {
    fn add(self, o: Ext) -> Ext {
        match (self, o) {
            (Ext::Fin(a), Ext::Fin(b)) => Ext::Fin(a + b),
            (Ext::NegInf, Ext::PosInf) | (Ext::PosInf, Ext::NegInf) => {
                unreachable!("interval endpoints never sum opposite infinities")
            }
            (Ext::NegInf, _) | (_, Ext::NegInf) => Ext::NegInf,
            _ => Ext::PosInf,
        }
    }

    /// Product with `0·∞ = 0`, the convention for endpoint arithmetic.
    fn mul(self, o: Ext) -> Ext {
        let sign = |e: Ext| match e {
            Ext::NegInf => -1,
            Ext::PosInf => 1,
            Ext::Fin(v) => v.signum() as i32,
        };
        match (self, o) {
            (Ext::Fin(a), Ext::Fin(b)) => Ext::Fin(a * b),
            _ => match sign(self) * sign(o) {
                0 => Ext::Fin(0),
                1 => Ext::PosInf,
                _ => Ext::NegInf,
            },
        }
    }
}

impl std::fmt::Display for Ext {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Ext::NegInf => f.write_str("-inf"),
            Ext::PosInf => f.write_str("+inf"),
            Ext::Fin(v) => write!(f, "{v}"),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
struct Interval {
    lo: Ext,
    hi: Ext,
}

impl Interval {
    fn point(v: i64) -> Self {
        Self {
            lo: Ext::Fin(v.into()),
            hi: Ext::Fin(v.into()),
        }
    }

    fn of(r: ParamRange) -> Self {
        Self {
            lo: Ext::Fin(r.min.into()),
            hi: r.max.map_or(Ext::PosInf, |m| Ext::Fin(m.into())),
        }
    }

    fn add(self, o: Self) -> Self {
        Self {
            lo: self.lo.add(o.lo),
            hi: self.hi.add(o.hi),
        }
    }

    fn mul(self, o: Self) -> Self {
        let c = [
            self.lo.mul(o.lo),
            self.lo.mul(o.hi),
            self.hi.mul(o.lo),
            self.hi.mul(o.hi),
        ];
        Self {
            lo: *c.iter().min().expect("four candidates"),
            hi: *c.iter().max().expect("four candidates"),
        }
    }

    fn scale(self, k: i64) -> Self {
        let k = Ext::Fin(k.into());
        if k >= Ext::Fin(0) {
            Self {
                lo: self.lo.mul(k),
                hi: self.hi.mul(k),
            }
        } else {
            Self {
                lo: self.hi.mul(k),
                hi: self.lo.mul(k),
            }
        }
    }
}

fn eval_interval(f: &Form, env: &BTreeMap<Var, Interval>) -> Result<Interval, CheckError> {
    let mut acc = Interval::point(0);
    for (m, c) in f.terms() {
        let mut t = Interval::point(1);
        for v in m.vars() {
            let x = env
                .get(v)
                .ok_or_else(|| CheckError::UnsupportedTerm(format!("unbound {v}")))?;
            t = t.mul(*x);
        }
        acc = acc.add(t.scale(c));
    }
    Ok(acc)
}

/// Every variable other than `l` and `S` with a declared or implied range.
fn param_ranges(cert: &GateCertificate, g: &Form) -> Result<BTreeMap<Var, ParamRange>, CheckError> {
    let mut out = BTreeMap::new();
    for v in [Var::K, Var::C] {
        if g.mentions(v) {
            let r = cert
                .problem
                .bounds
                .get(&v)
                .ok_or(CheckError::MissingBound(v))?;
            out.insert(v, *r);
        }
    }
    if g.mentions(Var::Degree) {
        out.insert(Var::Degree, ParamRange::at_least(0));
    }
    Ok(out)
}

/// `lhs - rhs` at `(l, n, S)` restricted to the parameters.
fn at_point(g: &Form, l: u32, n: u32, s: u32) -> Form {
    g.substitute(Var::Len, &Form::constant(l.into()))
        .substitute(Var::Size, &Form::constant(n.into()))
        .substitute(Var::DualCodim, &Form::constant(s.into()))
}

/// Whether some parameter point solves `h = 0`. Every coefficient is
/// nonnegative, so a solution exists below `min + excess` in every
/// coordinate, where `-excess` is the value at the minimum.
fn solvable(h: &Form, ranges: &BTreeMap<Var, ParamRange>) -> bool {
    let mins: BTreeMap<Var, i64> = ranges.iter().map(|(v, r)| (*v, r.min)).collect();
    let h0 = h.eval(&mins).expect("all parameters bound");
    if h0 > 0 {
        return false;
    }
    if h0 == 0 {
        return true;
    }
    let excess = -h0;
    let vars: Vec<Var> = ranges.keys().copied().collect();
    let mut env = mins.clone();
    fn search(
        i: usize,
        vars: &[Var],
        ranges: &BTreeMap<Var, ParamRange>,
        excess: i64,
        env: &mut BTreeMap<Var, i64>,
        h: &Form,
    ) -> bool {
        if i == vars.len() {
            return h.eval(env) == Ok(0);
        }
        let r = ranges[&vars[i]];
        let top = r.max.map_or(r.min + excess, |m| m.min(r.min + excess));
        for x in r.min..=top {
            env.insert(vars[i], x);
            if search(i + 1, vars, ranges, excess, env, h) {
                return true;
            }
        }
        false
    }
    search(0, &vars, ranges, excess, &mut env, h)
}

fn sample(p: ParamValue) -> Vec<i64> {
    match p {
        ParamValue::Fixed(v) => vec![v],
        ParamValue::Range(r) if r.max == Some(r.min) => vec![r.min],
        ParamValue::Range(r) => vec![r.min, r.min + 1],
    }
}

/// Re-validates a certificate without consulting the solver.
pub fn check_certificate(cert: &GateCertificate) -> Result<CheckReport, CheckError> {
    let g = cert.problem.residual();
    let dc = Monomial::product(&[Var::Degree, Var::C]);
    for (m, c) in g.terms() {
        let linear = m.degree() <= 1;
        if !(linear || *m == dc) {
            return Err(CheckError::UnsupportedTerm(format!("{m:?}")));
        }
        let is_param = m.contains(Var::K)
            || m.contains(Var::C)
            || m.contains(Var::Degree)
            || m.contains(Var::DualCodim);
        if is_param && c < 0 {
            return Err(CheckError::UnsupportedTerm(format!(
                "negative coefficient on {m:?}"
            )));
        }
    }
    let ranges = param_ranges(cert, &g)?;
    if ranges.get(&Var::C).is_some_and(|r| r.min < 0) && g.coeff(&dc) != 0 {
        return Err(CheckError::UnsupportedTerm(
            "d*c with c possibly negative".into(),
        ));
    }

    // Tail: n ≥ from_size. Where l enters negatively, write l = n - u with
    // u ≥ 0; the u term then has a nonnegative coefficient.
    let from = cert.tail.from_size;
    let a_l = g.linear_coeff(Var::Len);
    let mut env: BTreeMap<Var, Interval> =
        ranges.iter().map(|(v, r)| (*v, Interval::of(*r))).collect();
    env.insert(
        Var::Size,
        Interval {
            lo: Ext::Fin(from.into()),
            hi: Ext::PosInf,
        },
    );
    env.insert(Var::DualCodim, Interval::of(ParamRange::at_least(0)));
    let tail_form = if a_l < 0 {
        g.substitute(Var::Len, &Form::var(Var::Size))
    } else {
        env.insert(Var::Len, Interval::of(ParamRange::at_least(0)));
        g.clone()
    };
    let bound = eval_interval(&tail_form, &env)?;
    if bound.lo <= Ext::Fin(0) {
        return Err(CheckError::TailNotPositive {
            lower: bound.lo.to_string(),
            from_size: from,
        });
    }
    if from > 0 && cert.enumerated_up_to + 1 < from {
        return Err(CheckError::Gap {
            upto: cert.enumerated_up_to,
            from_size: from,
        });
    }

    let sols = cert.verdict.solutions();
    let listed: BTreeSet<(u32, u32, u32)> =
        sols.iter().map(|s| (s.len, s.size, s.dual_codim)).collect();
    for s in sols {
        let agg = (s.len, s.size, s.dual_codim);
        for shape in &s.shapes {
            let ok = shape.len() == s.len
                && shape.size() == s.size
                && shape.dual_codim_sum() == s.dual_codim
                && shape
                    .0
                    .iter()
                    .all(|p| p.size >= 1 && p.dual_codim <= cert.problem.max_codim);
            if !ok {
                return Err(CheckError::ShapeMismatch {
                    shape: shape.to_string(),
                    agg,
                });
            }
        }
        let h = at_point(&g, s.len, s.size, s.dual_codim);
        let mut grid: Vec<BTreeMap<Var, i64>> = vec![BTreeMap::new()];
        for v in [Var::Degree, Var::K, Var::C] {
            if !h.mentions(v) {
                continue;
            }
            let Some(p) = s.param(v) else {
                return Err(CheckError::Unsound(agg));
            };
            if !sample(p).iter().all(|x| ranges[&v].contains(*x)) {
                return Err(CheckError::Unsound(agg));
            }
            grid = grid
                .into_iter()
                .flat_map(|env| {
                    sample(p).into_iter().map(move |x| {
                        let mut e = env.clone();
                        e.insert(v, x);
                        e
                    })
                })
                .collect();
        }
        if !grid.iter().all(|e| h.eval(e) == Ok(0)) {
            return Err(CheckError::Unsound(agg));
        }
    }

    let mut points = 0;
    for n in 0..from {
        let lens = if n == 0 { 0..=0 } else { 1..=n };
        for l in lens {
            for s in 0..=cert.problem.max_codim * l {
                points += 1;
                let h = at_point(&g, l, n, s);
                let iv = eval_interval(&h, &env)?;
                let possible =
                    iv.lo <= Ext::Fin(0) && iv.hi >= Ext::Fin(0) && solvable(&h, &ranges);
                match (possible, listed.contains(&(l, n, s))) {
                    (true, false) => return Err(CheckError::Missing((l, n, s))),
                    (false, true) => return Err(CheckError::Spurious((l, n, s))),
                    _ => {}
                }
            }
        }
    }
    if let Some(&agg) = listed.iter().find(|a| a.1 >= from) {
        return Err(CheckError::Spurious(agg));
    }
    Ok(CheckReport {
        tail_lower_bound: bound.lo.to_string(),
        points_checked: points,
    })
}
