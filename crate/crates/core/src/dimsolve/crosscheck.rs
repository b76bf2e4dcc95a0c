//! Brute-force comparison of a certificate against every weighted
//! partition up to a size bound.

use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};

use crate::cohpart::{enumerate_partitions, realize_shape, CohModel, Part};
use crate::form::Var;

use super::solve::GateCertificate;
use super::GateError;

/// How far each parameter is expanded above its lower bound.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CrossCheckCaps {
    pub k_span: i64,
    pub c_span: i64,
    pub d_max: i64,
}

impl Default for CrossCheckCaps {
    fn default() -> Self {
        Self {
            k_span: 6,
            c_span: 6,
            d_max: 6,
        }
    }
}

/// Result of one comparison; `missing` and `spurious` are rendered
/// `(partition, parameters)` pairs and both empty on agreement.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CrossCheck {
    pub enum_bound: u32,
    pub partitions_checked: usize,
    pub solutions_found: usize,
    pub missing: Vec<String>,
    pub spurious: Vec<String>,
}

impl CrossCheck {
    pub fn agrees(&self) -> bool {
        self.missing.is_empty() && self.spurious.is_empty()
    }
}

type Point = (Vec<Part>, BTreeMap<Var, i64>);

fn values(v: Var, cert: &GateCertificate, caps: &CrossCheckCaps) -> Vec<i64> {
    match v {
        Var::Degree => (0..=caps.d_max).collect(),
        Var::K | Var::C => {
            let r = cert.problem.bounds[&v];
            let span = if v == Var::K {
                caps.k_span
            } else {
                caps.c_span
            };
            let top = r.max.map_or(r.min + span, |m| m.min(r.min + span));
            (r.min..=top).collect()
        }
        _ => Vec::new(),
    }
}

fn grid(vars: &[Var], cert: &GateCertificate, caps: &CrossCheckCaps) -> Vec<BTreeMap<Var, i64>> {
    let mut out = vec![BTreeMap::new()];
    for &v in vars {
        out = out
            .into_iter()
            .flat_map(|env| {
                values(v, cert, caps).into_iter().map(move |x| {
                    let mut e = env.clone();
                    e.insert(v, x);
                    e
                })
            })
            .collect();
    }
    out
}

/// Evaluates the gate on every partition of size `≤ enum_bound` and every
/// parameter point within `caps`, and compares with the certificate's
/// families expanded to the same window.
pub fn brute_force_crosscheck(
    cert: &GateCertificate,
    enum_bound: u32,
    caps: CrossCheckCaps,
) -> Result<CrossCheck, GateError> {
    let name = cert.problem.surface.clone().unwrap_or_default();
    let model = CohModel::by_name(&name).ok_or(GateError::UnknownSurface(name))?;
    let g = cert.problem.residual();
    let vars: Vec<Var> = [Var::Degree, Var::K, Var::C]
        .into_iter()
        .filter(|v| g.mentions(*v))
        .collect();
    for v in &vars {
        if *v != Var::Degree && !cert.problem.bounds.contains_key(v) {
            return Err(GateError::MissingBound(*v));
        }
    }
    let params = grid(&vars, cert, &caps);

    let partitions = enumerate_partitions(&model, enum_bound);
    let mut brute: BTreeSet<Point> = BTreeSet::new();
    for eta in &partitions {
        for p in &params {
            let mut env = p.clone();
            env.insert(Var::Len, eta.len().into());
            env.insert(Var::Size, eta.size().into());
            env.insert(Var::DualCodim, eta.dual_codim_sum().into());
            if g.eval(&env) == Ok(0) {
                brute.insert((eta.parts().to_vec(), p.clone()));
            }
        }
    }

    let mut claimed: BTreeSet<Point> = BTreeSet::new();
    for s in cert.verdict.solutions() {
        if s.size > enum_bound {
            continue;
        }
        let fits = |env: &BTreeMap<Var, i64>| {
            vars.iter().all(|v| match s.param(*v) {
                Some(pv) => pv.contains(env[v]),
                None => false,
            })
        };
        for shape in &s.shapes {
            for eta in realize_shape(&model, shape) {
                for p in params.iter().filter(|p| fits(p)) {
                    claimed.insert((eta.parts().to_vec(), p.clone()));
                }
            }
        }
    }

    let render = |(parts, env): &Point| {
        let labels: Vec<String> = parts
            .iter()
            .map(|p| format!("({},{})", p.size, model.label(p.weight)))
            .collect();
        let ps: Vec<String> = env.iter().map(|(v, x)| format!("{v}={x}")).collect();
        format!("[{}] {}", labels.join(","), ps.join(" "))
    };
    Ok(CrossCheck {
        enum_bound,
        partitions_checked: partitions.len(),
        solutions_found: brute.len(),
        missing: brute.difference(&claimed).map(render).collect(),
        spurious: claimed.difference(&brute).map(render).collect(),
    })
}
