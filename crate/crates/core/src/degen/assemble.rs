use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::cohpart::{realize_shape, Insertion, Support, WeightedPartition};
use crate::dimsolve::{
    bubble_family, build_gate, solve_gate, GateCertificate, GateSetup, ParamRange, ParamValue,
};
use crate::form::{Form, Var};
use crate::geomcat::{build_degeneration, Center, CurveClass, GeometryName};
use crate::qlaurent::QLaurent;

use super::catalogue::ClassShift;
use super::symbol::{AbsSymbol, RelPfSymbol, GENERIC_PRODUCT, GENERIC_PULLBACK};
use super::DegenError;

/// Which half of the degeneration an insertion is specialised to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Side {
    Small,
    Large,
}

/// The flags that move an insertion off the bubble for each degeneration.
fn relevant_flags(source: GeometryName, center: Center) -> &'static [Support] {
    use GeometryName::*;
    match (source, center) {
        (AbstractX, Center::Point) => &[Support::AwayFromP],
        (XBlownPoint, Center::ExceptionalDivisor) => &[Support::AwayFromE, Support::AwayFromP],
        (AbstractX, Center::Curve) => &[Support::AwayFromC],
        (XBlownCurve, Center::ExceptionalDivisor) => &[Support::AwayFromE, Support::AwayFromC],
        _ => &[],
    }
}

/// Splits insertions into the marking partition `P₁ ⊔ P₂`.
///
/// A class supported away from the centre specialises to the large side.
/// An unflagged class is supported near the centre and goes to the bubble.
pub fn place_insertions(
    source: GeometryName,
    center: Center,
    insertions: &[Insertion],
) -> Result<(Vec<Insertion>, Vec<Insertion>), DegenError> {
    let relevant = relevant_flags(source, center);
    let mut small = Vec::new();
    let mut large = Vec::new();
    for ins in insertions {
        let flags = ins.class.support();
        if flags.is_empty() {
            small.push(ins.clone());
        } else if flags.iter().any(|f| relevant.contains(f)) {
            large.push(ins.clone());
        } else {
            return Err(DegenError::UnsupportedInsertionSide {
                insertion: ins.to_string(),
                center: center.to_string(),
            });
        }
    }
    Ok((small, large))
}

/// `(-1)^{|η|-ℓ(η)} 𝔷(η) q^{-|η|}`.
pub fn degeneration_coefficient(eta: &WeightedPartition) -> QLaurent {
    let sign = if (eta.size() - eta.len()).is_multiple_of(2) {
        1
    } else {
        -1
    };
    let z = BigInt::from(eta.zeta()) * sign;
    QLaurent::monomial(BigRational::from_integer(z), -i64::from(eta.size()))
}

#[derive(Debug, Clone)]
pub struct AssembleInput {
    pub label: String,
    pub source: GeometryName,
    pub center: Center,
    pub shift: ClassShift,
    pub insertions: Vec<Insertion>,
    pub k_range: Option<ParamRange>,
    pub c_range: Option<ParamRange>,
    pub enum_bound: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct IdentityTerm {
    pub eta: Vec<(u32, String)>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub d: Option<ParamValue>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<ParamValue>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c: Option<ParamValue>,
    pub coefficient: QLaurent,
    pub small: RelPfSymbol,
    pub large: RelPfSymbol,
}

impl IdentityTerm {
    pub fn describe(&self) -> String {
        let eta: Vec<String> = self.eta.iter().map(|(s, l)| format!("({s},{l})")).collect();
        let mut out = format!("eta=[{}]", eta.join(","));
        for (name, p) in [("d", self.d), ("k", self.k), ("c", self.c)] {
            if let Some(p) = p {
                out.push_str(&format!(" {name} {p}"));
            }
        }
        out
    }
}

/// `Z_P(X; …)_β = Σ_η coefficient · Z_small · Z_large`, over the
/// gate-admissible η only.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SymbolicIdentity {
    pub label: String,
    pub source: GeometryName,
    pub center: Center,
    pub lhs: AbsSymbol,
    pub terms: Vec<IdentityTerm>,
    pub certificate: GateCertificate,
}

impl SymbolicIdentity {
    pub fn render(&self) -> String {
        if self.terms.is_empty() {
            return format!("{} = 0", self.lhs);
        }
        let rhs: Vec<String> = self
            .terms
            .iter()
            .map(|t| format!("({}) {} {}", t.coefficient, t.small, t.large))
            .collect();
        format!("{} = {}", self.lhs, rhs.join(" + "))
    }
}

fn e_value(shift: ClassShift) -> Option<Form> {
    match shift {
        ClassShift::Base => None,
        ClassShift::Fixed(j) => Some(Form::constant(-j)),
        ClassShift::K => Some(Form::var(Var::K).scaled(-1)),
    }
}

fn lhs_class(shift: ClassShift) -> String {
    match shift {
        ClassShift::Base => "beta".into(),
        ClassShift::Fixed(0) => "p!beta".into(),
        ClassShift::Fixed(1) => "p!beta + e".into(),
        ClassShift::Fixed(-1) => "p!beta - e".into(),
        ClassShift::Fixed(j) if j < 0 => format!("p!beta - {}e", -j),
        ClassShift::Fixed(j) => format!("p!beta + {j}e"),
        ClassShift::K => "p!beta + ke".into(),
    }
}

fn fix(class: &CurveClass, v: Var, p: Option<ParamValue>) -> CurveClass {
    match p {
        Some(ParamValue::Fixed(x)) => class.substitute(v, &Form::constant(x)),
        _ => class.clone(),
    }
}

fn strings(ins: &[Insertion]) -> Vec<String> {
    ins.iter().map(ToString::to_string).collect()
}

/// Builds and solves the gate for one degeneration, then writes one term
/// per admissible boundary.
pub fn assemble(input: &AssembleInput) -> Result<SymbolicIdentity, DegenError> {
    let deg = build_degeneration(input.source, input.center)?;
    let (small_ins, large_ins) = place_insertions(input.source, input.center, &input.insertions)?;
    let setup = GateSetup {
        label: input.label.clone(),
        degeneration: &deg,
        e_value: e_value(input.shift),
        small_insertions: &small_ins,
        k_range: input.k_range,
        c_range: input.c_range,
    };
    let problem = build_gate(&setup)?;
    let certificate = solve_gate(&problem, input.enum_bound)?;
    let family = bubble_family(&setup)?;

    let generic = if deg.of_blow_up() {
        GENERIC_PULLBACK
    } else {
        GENERIC_PRODUCT
    };
    let mut lhs_ins = strings(&input.insertions);
    lhs_ins.push(generic.to_string());
    let lhs = AbsSymbol::new(input.source.short(), lhs_ins, lhs_class(input.shift));

    let mut large_names = strings(&large_ins);
    large_names.push(GENERIC_PULLBACK.to_string());

    let mut terms = Vec::new();
    for sol in certificate.verdict.solutions() {
        for shape in &sol.shapes {
            for eta in realize_shape(&deg.surface, shape) {
                let n = Form::constant(i64::from(eta.size()));
                let mut small_class = family.class.substitute(Var::Size, &n);
                small_class = fix(&small_class, Var::Degree, sol.d);
                small_class = fix(&small_class, Var::K, sol.k);
                let d_form = match sol.d {
                    Some(ParamValue::Fixed(x)) => Form::constant(x),
                    Some(ParamValue::Range(_)) => Form::var(Var::Degree),
                    None => Form::zero(),
                };
                let large_class = deg.large_class(&n, &d_form);
                terms.push(IdentityTerm {
                    eta: eta.to_labels(),
                    d: sol.d,
                    k: sol.k,
                    c: sol.c,
                    coefficient: degeneration_coefficient(&eta),
                    small: RelPfSymbol::new(
                        deg.small,
                        deg.small_divisor,
                        strings(&small_ins),
                        &eta,
                        small_class,
                    ),
                    large: RelPfSymbol::new(
                        deg.large,
                        deg.large_divisor,
                        large_names.clone(),
                        &eta.dual(),
                        large_class,
                    ),
                });
            }
        }
    }
    Ok(SymbolicIdentity {
        label: input.label.clone(),
        source: input.source,
        center: input.center,
        lhs,
        terms,
        certificate,
    })
}

/// Outcome of one per-term audit; `problems` is empty when it passes.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TermAudit {
    pub identity: String,
    pub term: String,
    pub problems: Vec<String>,
}

/// Re-derives every coefficient from the boundary labels alone.
pub fn audit_coefficients(id: &SymbolicIdentity) -> Vec<TermAudit> {
    id.terms
        .iter()
        .map(|t| {
            let mut problems = Vec::new();
            match t.small.boundary_partition() {
                Ok(eta) => {
                    let expected = degeneration_coefficient(&eta);
                    if expected != t.coefficient {
                        problems.push(format!(
                            "coefficient {} but the boundary gives {expected}",
                            t.coefficient
                        ));
                    }
                }
                Err(e) => problems.push(e.to_string()),
            }
            TermAudit {
                identity: id.label.clone(),
                term: t.describe(),
                problems,
            }
        })
        .collect()
}

/// The large factor must carry exactly the dual of the small boundary.
pub fn audit_duality(id: &SymbolicIdentity) -> Vec<TermAudit> {
    id.terms
        .iter()
        .map(|t| {
            let mut problems = Vec::new();
            match (t.small.boundary_partition(), t.large.boundary_partition()) {
                (Ok(small), Ok(large)) => {
                    if large != small.dual() {
                        problems.push(format!("large boundary {large} is not the dual of {small}"));
                    }
                    if small.to_labels() != t.eta {
                        problems.push("small factor does not carry the term's boundary".into());
                    }
                }
                (Err(e), _) | (_, Err(e)) => problems.push(e.to_string()),
            }
            TermAudit {
                identity: id.label.clone(),
                term: t.describe(),
                problems,
            }
        })
        .collect()
}

fn samples(p: Option<ParamValue>) -> Vec<i64> {
    match p {
        None => vec![0],
        Some(ParamValue::Fixed(v)) => vec![v],
        Some(ParamValue::Range(r)) => {
            let top = r.max.map_or(r.min + 2, |m| m.min(r.min + 2));
            (r.min..=top).collect()
        }
    }
}

/// Checks `∫_{β₁} c₁ + S - |η| = ℓ(η) + Σ_small codim` for each term from
/// the bubble's class and the boundary itself, without the gate.
pub fn recheck_dimension(id: &SymbolicIdentity, small_insertions: &[Insertion]) -> Vec<TermAudit> {
    let codims: i64 = small_insertions.iter().map(Insertion::codim).sum();
    id.terms
        .iter()
        .map(|t| {
            let mut problems = Vec::new();
            let geo = t.small.geometry.geometry();
            let eta = match t.small.boundary_partition() {
                Ok(eta) => eta,
                Err(e) => {
                    return TermAudit {
                        identity: id.label.clone(),
                        term: t.describe(),
                        problems: vec![e.to_string()],
                    }
                }
            };
            let s = i64::from(eta.dual_codim_sum());
            let (n, l) = (i64::from(eta.size()), i64::from(eta.len()));
            for d in samples(t.d) {
                for k in samples(t.k) {
                    for c in samples(t.c) {
                        let env = BTreeMap::from([(Var::Degree, d), (Var::K, k), (Var::C, c)]);
                        let c1 = geo
                            .c1_pair(&t.small.curve_class)
                            .map_err(|e| e.to_string())
                            .and_then(|f| f.eval(&env).map_err(|e| e.to_string()));
                        let meets = geo
                            .intersect(&t.small.divisor, &t.small.curve_class)
                            .map_err(|e| e.to_string())
                            .and_then(|f| f.eval(&env).map_err(|e| e.to_string()));
                        match (c1, meets) {
                            (Ok(c1), Ok(m)) => {
                                if c1 + s - n != l + codims {
                                    problems.push(format!(
                                        "d={d} k={k} c={c}: {c1} + {s} - {n} != {l} + {codims}"
                                    ));
                                }
                                if m != n {
                                    problems.push(format!(
                                        "bubble class meets the divisor {m} times, |eta| = {n}"
                                    ));
                                }
                            }
                            (Err(e), _) | (_, Err(e)) => problems.push(e),
                        }
                    }
                }
            }
            problems.dedup();
            TermAudit {
                identity: id.label.clone(),
                term: t.describe(),
                problems,
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cohpart::{CohElement, CohModel};

    fn ins(
        model: std::sync::Arc<CohModel>,
        level: u32,
        label: &str,
        flags: &[Support],
    ) -> Insertion {
        Insertion::new(
            level,
            CohElement::new(model, label)
                .unwrap()
                .with_support(flags.iter().copied()),
        )
    }

    fn input(
        source: GeometryName,
        center: Center,
        shift: ClassShift,
        insertions: Vec<Insertion>,
    ) -> AssembleInput {
        AssembleInput {
            label: "t".into(),
            source,
            center,
            shift,
            insertions,
            k_range: None,
            c_range: Some(ParamRange::at_least(2)),
            enum_bound: 6,
        }
    }

    #[test]
    fn point_insertion_gives_one_over_q() {
        let pt = ins(CohModel::p3(), 0, "pt", &[]);
        let id = assemble(&input(
            GeometryName::AbstractX,
            Center::Point,
            ClassShift::Base,
            vec![pt],
        ))
        .unwrap();
        assert_eq!(id.terms.len(), 1);
        let t = &id.terms[0];
        assert_eq!(t.eta, vec![(1, "pt".to_string())]);
        assert_eq!(t.coefficient, "q^-1".parse().unwrap());
        assert_eq!(t.small.canonical(), "Z(P3/H; tau0(pt) | [(1,pt)])_L");
        assert_eq!(
            t.large.canonical(),
            "Z(X~/E; prod tau_di(p*gamma_i) | [(1,1)])_p!beta - e"
        );
        assert_eq!(
            id.lhs.canonical(),
            "Z(X; tau0(pt) prod tau_di(gamma_i))_beta"
        );
    }

    #[test]
    fn empty_boundary_has_unit_coefficient() {
        let id = assemble(&input(
            GeometryName::AbstractX,
            Center::Point,
            ClassShift::Base,
            vec![],
        ))
        .unwrap();
        assert_eq!(id.terms.len(), 1);
        assert_eq!(id.terms[0].coefficient, QLaurent::one());
        assert!(id.terms[0].small.is_trivial());
        assert_eq!(
            id.terms[0].large.canonical(),
            "Z(X~/E; prod tau_di(p*gamma_i) | [])_p!beta"
        );
    }

    #[test]
    fn two_sided_marking() {
        let model = CohModel::blown_point_local();
        let near = ins(model.clone(), 0, "-E^2", &[]);
        let away = ins(model.clone(), 0, "H", &[Support::AwayFromE]);
        let (small, large) = place_insertions(
            GeometryName::XBlownPoint,
            Center::ExceptionalDivisor,
            &[near.clone(), away.clone()],
        )
        .unwrap();
        assert_eq!(small, vec![near.clone()]);
        assert_eq!(large, vec![away.clone()]);

        let id = assemble(&input(
            GeometryName::XBlownPoint,
            Center::ExceptionalDivisor,
            ClassShift::Fixed(-1),
            vec![near, away],
        ))
        .unwrap();
        assert_eq!(id.terms.len(), 1);
        assert_eq!(id.terms[0].small.insertions, vec!["tau0(-E^2)".to_string()]);
        assert_eq!(id.terms[0].large.insertions[0], "tau0(H)");
        assert!(recheck_dimension(&id, &small)
            .iter()
            .all(|a| a.problems.is_empty()));
    }

    #[test]
    fn irrelevant_flag_is_rejected() {
        let stray = ins(CohModel::p3(), 0, "H", &[Support::AwayFromC]);
        let err = place_insertions(GeometryName::AbstractX, Center::Point, &[stray]).unwrap_err();
        assert!(matches!(err, DegenError::UnsupportedInsertionSide { .. }));
    }

    #[test]
    fn coefficient_signs() {
        let eta =
            WeightedPartition::from_labels(CohModel::projective_plane(), &[(2, "L")]).unwrap();
        assert_eq!(degeneration_coefficient(&eta), "-2q^-2".parse().unwrap());
        let eta =
            WeightedPartition::from_labels(CohModel::projective_plane(), &[(1, "pt"), (1, "pt")])
                .unwrap();
        assert_eq!(degeneration_coefficient(&eta), "2q^-2".parse().unwrap());
    }
}
