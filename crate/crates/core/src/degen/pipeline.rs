use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::cohpart::{CohElement, Insertion};
use crate::dimsolve::{
    brute_force_crosscheck, check_certificate, CheckReport, CrossCheck, CrossCheckCaps, ParamRange,
    ParamValue,
};
use crate::geomcat::{BlowUp, CurveClass, GeometryName};
use crate::qlaurent::QLaurent;

use super::assemble::{
    assemble, audit_coefficients, audit_duality, place_insertions, recheck_dimension,
    AssembleInput, TermAudit,
};
use super::catalogue::{lemma, theorem, ClassShift, LemmaDef, Specialization, TheoremKind};
use super::oracle::OracleTable;
use super::symbol::{AbsSymbol, RelPfSymbol};
use super::{DegenError, SymbolicIdentity};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerifyOptions {
    pub k_min: i64,
    pub k_max: i64,
    /// Overrides the lower bound on `c = ∫_C c₁(X)`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub c_bound: Option<i64>,
    pub enum_bound: u32,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        Self {
            k_min: 1,
            k_max: 5,
            c_bound: None,
            enum_bound: 6,
        }
    }
}

impl VerifyOptions {
    pub fn validate(&self) -> Result<(), DegenError> {
        if self.enum_bound == 0 {
            return Err(DegenError::InvalidOptions(
                "enum bound must be at least 1".into(),
            ));
        }
        if self.k_min < 1 || self.k_max < self.k_min {
            return Err(DegenError::InvalidOptions(format!(
                "k range {}..{} must be nonempty and start at 1 or above",
                self.k_min, self.k_max
            )));
        }
        if self.c_bound.is_some_and(|c| c < 0) {
            return Err(DegenError::InvalidOptions(
                "c bound must be nonnegative".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Verified,
    Mismatch,
}

/// Independent checks of one gate certificate.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GateAudit {
    pub label: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub checker: Option<CheckReport>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub checker_error: Option<String>,
    pub crosscheck: CrossCheck,
}

impl GateAudit {
    pub fn passes(&self) -> bool {
        self.checker_error.is_none() && self.crosscheck.agrees()
    }
}

/// `Z_P(X; …)_β = R(q) · Z_P(X̃; …)` with
/// `R = coefficient · Z(numerator) / Z(denominator)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RatioResult {
    pub x_identity: String,
    pub xt_identity: String,
    pub numerator: RelPfSymbol,
    pub denominator: RelPfSymbol,
    pub coefficient: QLaurent,
    pub common_factor: RelPfSymbol,
    pub relation: String,
}

/// The two absolute invariants a ratio is evaluated through.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpecializedPair {
    pub x: AbsSymbol,
    pub xt: AbsSymbol,
    pub x_value: QLaurent,
    pub xt_value: QLaurent,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Evaluation {
    pub route: String,
    pub value: QLaurent,
    pub steps: Vec<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub specialized: Option<SpecializedPair>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DerivationTrace {
    pub theorem: String,
    pub statement: String,
    pub options: VerifyOptions,
    pub gates: Vec<GateAudit>,
    pub identities: Vec<SymbolicIdentity>,
    pub audits: Vec<TermAudit>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub ratio: Option<RatioResult>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub evaluation: Option<Evaluation>,
    pub result: String,
    pub expected: String,
    pub status: Status,
    pub messages: Vec<String>,
}

impl DerivationTrace {
    pub fn exit_code(&self) -> i32 {
        match self.status {
            Status::Verified => 0,
            Status::Mismatch => 1,
        }
    }

    pub fn render_text(&self) -> String {
        let mut out = String::new();
        let status = match self.status {
            Status::Verified => "VERIFIED",
            Status::Mismatch => "MISMATCH",
        };
        let _ = writeln!(out, "{}: {status}", self.theorem);
        let _ = writeln!(out, "  statement: {}", self.statement);
        for id in &self.identities {
            let cert = &id.certificate;
            let verdict = if cert.verdict.is_empty() {
                "Empty".to_string()
            } else {
                format!("{} solution(s)", cert.verdict.solutions().len())
            };
            let _ = writeln!(out, "  gate {}: {} -> {verdict}", id.label, cert.problem);
            for s in cert.verdict.solutions() {
                let _ = writeln!(out, "    {s}");
            }
            let _ = writeln!(out, "    identity: {}", id.render());
        }
        for g in &self.gates {
            let checker = match (&g.checker, &g.checker_error) {
                (_, Some(e)) => format!("checker FAILED ({e})"),
                (Some(r), None) => format!("checker ok ({} points)", r.points_checked),
                (None, None) => "checker skipped".into(),
            };
            let cc = &g.crosscheck;
            let _ = writeln!(
                out,
                "  check {}: {checker}; brute force |eta| <= {}: {} partitions, {} missing, {} spurious",
                g.label,
                cc.enum_bound,
                cc.partitions_checked,
                cc.missing.len(),
                cc.spurious.len()
            );
        }
        for a in self.audits.iter().filter(|a| !a.problems.is_empty()) {
            let _ = writeln!(
                out,
                "  audit {} {}: {}",
                a.identity,
                a.term,
                a.problems.join("; ")
            );
        }
        if let Some(r) = &self.ratio {
            let _ = writeln!(out, "  ratio: {}", r.relation);
        }
        if let Some(e) = &self.evaluation {
            let _ = writeln!(out, "  evaluation ({}):", e.route);
            for s in &e.steps {
                let _ = writeln!(out, "    {s}");
            }
        }
        for m in &self.messages {
            let _ = writeln!(out, "  note: {m}");
        }
        let _ = writeln!(out, "  result: {}", self.result);
        let _ = writeln!(out, "  expected: {}", self.expected);
        out
    }
}

/// Divides the two single-term identities through their shared large factor.
pub fn cancel_pair(x: &SymbolicIdentity, xt: &SymbolicIdentity) -> Result<RatioResult, DegenError> {
    for id in [x, xt] {
        if id.terms.len() != 1 {
            let terms: Vec<String> = id.terms.iter().map(|t| t.describe()).collect();
            return Err(DegenError::NotSingleTerm {
                label: id.label.clone(),
                count: id.terms.len(),
                terms: terms.join("; "),
            });
        }
    }
    let (tx, txt) = (&x.terms[0], &xt.terms[0]);
    if tx.large.canonical() != txt.large.canonical() {
        return Err(DegenError::NoCommonFactor {
            x: x.label.clone(),
            xt: xt.label.clone(),
            left: tx.large.canonical(),
            right: txt.large.canonical(),
        });
    }
    let coefficient = tx.coefficient.divide_exact(&txt.coefficient)?;
    let relation = format!(
        "{} = R(q) * {}, R = ({coefficient}) * {} / {}",
        x.lhs, xt.lhs, tx.small, txt.small
    );
    Ok(RatioResult {
        x_identity: x.label.clone(),
        xt_identity: xt.label.clone(),
        numerator: tx.small.clone(),
        denominator: txt.small.clone(),
        coefficient,
        common_factor: tx.large.clone(),
        relation,
    })
}

fn lemma_insertions(def: &LemmaDef, geometry: GeometryName) -> Result<Vec<Insertion>, DegenError> {
    let model = geometry.geometry().local_model.clone();
    def.small_insertions
        .iter()
        .map(|&(level, label)| {
            Ok(Insertion::new(
                level,
                CohElement::new(model.clone(), label)?,
            ))
        })
        .collect()
}

fn specialized_insertions(
    def: &LemmaDef,
    geometry: GeometryName,
    generic: &[(u32, &str)],
) -> Result<Vec<Insertion>, DegenError> {
    let model = geometry.geometry().local_model.clone();
    def.small_insertions
        .iter()
        .chain(generic)
        .map(|&(level, label)| {
            Ok(Insertion::new(
                level,
                CohElement::new(model.clone(), label)?,
            ))
        })
        .collect()
}

fn dimension_matches(
    geometry: GeometryName,
    class: &CurveClass,
    ins: &[Insertion],
) -> Result<String, DegenError> {
    let c1 = geometry
        .geometry()
        .c1_pair(class)?
        .as_constant()
        .ok_or_else(|| DegenError::DimensionMismatch(format!("c1 on {class} is not a number")))?;
    let codims: i64 = ins.iter().map(Insertion::codim).sum();
    let line =
        format!("vdim {geometry}, {class}: c1 = {c1}, insertion codimensions sum to {codims}");
    if c1 != codims {
        return Err(DegenError::DimensionMismatch(line));
    }
    Ok(line)
}

fn strings(ins: &[Insertion]) -> Vec<String> {
    ins.iter().map(ToString::to_string).collect()
}

/// Evaluates `R` from oracle leaves.
///
/// Trivial small factors give `R = coefficient`. With a specialisation the
/// two lemmas are applied to `X = base`, where the common large factor
/// cancels between two absolute invariants. Otherwise both relative factors
/// are looked up directly.
pub fn substitute_oracle(
    ratio: &RatioResult,
    table: &OracleTable,
    spec: Option<(&Specialization, &LemmaDef, &LemmaDef)>,
) -> Result<Evaluation, DegenError> {
    if ratio.numerator.is_trivial() && ratio.denominator.is_trivial() {
        return Ok(Evaluation {
            route: "trivial".into(),
            value: ratio.coefficient.clone(),
            steps: vec![
                format!("{} = 1 and {} = 1", ratio.numerator, ratio.denominator),
                format!("R = {}", ratio.coefficient),
            ],
            specialized: None,
        });
    }
    if let Some((s, x_def, xt_def)) = spec {
        let blow = BlowUp::between(s.base, s.blown)?;
        let beta = CurveClass::new(s.base, s.class);
        let j = match xt_def.shift {
            ClassShift::Fixed(j) => j,
            other => {
                return Err(DegenError::InvalidOptions(format!(
                    "cannot specialise shift {other:?}"
                )))
            }
        };
        let xt_class = blow.pbang(&beta)?.plus(&blow.exceptional_line().scaled(j));
        let x_ins = specialized_insertions(x_def, s.base, s.generic)?;
        let xt_ins = specialized_insertions(xt_def, s.blown, s.generic)?;
        let mut steps = vec![
            format!(
                "specialise X = {}, beta = {beta}, so p!beta {} e = {xt_class}",
                s.base,
                if j < 0 { "-" } else { "+" }
            ),
            dimension_matches(s.base, &beta, &x_ins)?,
            dimension_matches(s.blown, &xt_class, &xt_ins)?,
        ];
        let x = AbsSymbol::new(s.base.short(), strings(&x_ins), beta.to_string());
        let xt = AbsSymbol::new(s.blown.short(), strings(&xt_ins), xt_class.to_string());
        let x_value = table.lookup(&x.canonical())?.clone();
        let xt_value = table.lookup(&xt.canonical())?.clone();
        let value = x_value.divide_exact(&xt_value)?;
        steps.push(format!("{x} = {x_value}"));
        steps.push(format!("{xt} = {xt_value}"));
        steps.push(format!("R = ({x_value}) / ({xt_value}) = {value}"));
        return Ok(Evaluation {
            route: "specialization".into(),
            value,
            steps,
            specialized: Some(SpecializedPair {
                x,
                xt,
                x_value,
                xt_value,
            }),
        });
    }
    let num = table.lookup(&ratio.numerator.canonical())?;
    let den = table.lookup(&ratio.denominator.canonical())?;
    let value = ratio.coefficient.mul(num).divide_exact(den)?;
    Ok(Evaluation {
        route: "direct".into(),
        value: value.clone(),
        steps: vec![
            format!("{} = {num}", ratio.numerator),
            format!("{} = {den}", ratio.denominator),
            format!("R = ({}) * ({num}) / ({den}) = {value}", ratio.coefficient),
        ],
        specialized: None,
    })
}

fn audit_gate(id: &SymbolicIdentity, enum_bound: u32) -> Result<GateAudit, DegenError> {
    let (checker, checker_error) = match check_certificate(&id.certificate) {
        Ok(r) => (Some(r), None),
        Err(e) => (None, Some(e.to_string())),
    };
    let crosscheck =
        brute_force_crosscheck(&id.certificate, enum_bound, CrossCheckCaps::default())?;
    Ok(GateAudit {
        label: id.label.clone(),
        checker,
        checker_error,
        crosscheck,
    })
}

fn c_range(default: Option<i64>, opts: &VerifyOptions) -> Option<ParamRange> {
    default.map(|c0| ParamRange::at_least(opts.c_bound.unwrap_or(c0)))
}

fn assemble_lemma(
    def: &LemmaDef,
    opts: &VerifyOptions,
) -> Result<(SymbolicIdentity, Vec<Insertion>), DegenError> {
    let small = crate::geomcat::build_degeneration(def.source, def.center)?.small;
    let insertions = lemma_insertions(def, small)?;
    let id = assemble(&AssembleInput {
        label: def.id.to_string(),
        source: def.source,
        center: def.center,
        shift: def.shift,
        insertions: insertions.clone(),
        k_range: None,
        c_range: c_range(def.default_c0, opts),
        enum_bound: opts.enum_bound,
    })?;
    let (small_ins, _) = place_insertions(def.source, def.center, &insertions)?;
    Ok((id, small_ins))
}

fn render_boundaries(etas: &[Vec<(u32, String)>]) -> String {
    let items: Vec<String> = etas
        .iter()
        .map(|eta| {
            let parts: Vec<String> = eta.iter().map(|(s, l)| format!("({s},{l})")).collect();
            format!("[{}]", parts.join(","))
        })
        .collect();
    format!("{{{}}}", items.join(", "))
}

struct Builder {
    identities: Vec<SymbolicIdentity>,
    gates: Vec<GateAudit>,
    audits: Vec<TermAudit>,
    messages: Vec<String>,
    ok: bool,
}

impl Builder {
    fn push(
        &mut self,
        id: SymbolicIdentity,
        small_ins: &[Insertion],
        enum_bound: u32,
    ) -> Result<(), DegenError> {
        let gate = audit_gate(&id, enum_bound)?;
        if !gate.passes() {
            self.ok = false;
            self.messages
                .push(format!("gate {} failed an independent check", id.label));
        }
        let mut audits = audit_coefficients(&id);
        audits.extend(audit_duality(&id));
        audits.extend(recheck_dimension(&id, small_ins));
        if audits.iter().any(|a| !a.problems.is_empty()) {
            self.ok = false;
            self.messages
                .push(format!("identity {} failed a term audit", id.label));
        }
        self.gates.push(gate);
        self.audits.extend(audits);
        self.identities.push(id);
        Ok(())
    }
}

/// Runs one theorem or lemma end to end.
///
/// Input problems are errors. A derivation that goes through but disagrees
/// with the stated formula, or cannot be completed, yields a trace with
/// [`Status::Mismatch`].
pub fn verify(
    id: &str,
    opts: &VerifyOptions,
    table: &OracleTable,
) -> Result<DerivationTrace, DegenError> {
    opts.validate()?;
    let def = theorem(id).ok_or_else(|| DegenError::UnknownTheorem(id.to_string()))?;
    let mut b = Builder {
        identities: Vec::new(),
        gates: Vec::new(),
        audits: Vec::new(),
        messages: Vec::new(),
        ok: true,
    };
    let mut ratio = None;
    let mut evaluation = None;
    let (result, expected);

    match def.kind {
        TheoremKind::Vanishing { source, default_c0 } => {
            let center = crate::geomcat::Center::ExceptionalDivisor;
            let mut runs: Vec<(String, ClassShift, Option<ParamRange>)> = (opts.k_min..=opts.k_max)
                .map(|k| (format!("{id}[k={k}]"), ClassShift::Fixed(k), None))
                .collect();
            runs.push((
                format!("{id}[k>=1]"),
                ClassShift::K,
                Some(ParamRange::at_least(1)),
            ));
            for (label, shift, k_range) in runs {
                let ident = assemble(&AssembleInput {
                    label,
                    source,
                    center,
                    shift,
                    insertions: Vec::new(),
                    k_range,
                    c_range: c_range(default_c0, opts),
                    enum_bound: opts.enum_bound,
                })?;
                if !ident.terms.is_empty() {
                    b.ok = false;
                    let terms: Vec<String> = ident.terms.iter().map(|t| t.describe()).collect();
                    b.messages
                        .push(format!("{} admits {}", ident.label, terms.join("; ")));
                }
                b.push(ident, &[], opts.enum_bound)?;
            }
            let nonzero = b.identities.iter().any(|i| !i.terms.is_empty());
            result = if nonzero {
                "nonzero terms".to_string()
            } else {
                "0".to_string()
            };
            expected = "0".to_string();
        }
        TheoremKind::Lemma(lid) => {
            let l = lemma(lid).ok_or_else(|| DegenError::UnknownTheorem(lid.to_string()))?;
            let (ident, small_ins) = assemble_lemma(l, opts)?;
            let got: Vec<Vec<(u32, String)>> = ident.terms.iter().map(|t| t.eta.clone()).collect();
            let want = vec![l
                .expected_boundary
                .iter()
                .map(|(s, lab)| (*s, lab.to_string()))
                .collect::<Vec<_>>()];
            let d_zero = ident
                .terms
                .iter()
                .all(|t| matches!(t.d, None | Some(ParamValue::Fixed(0))));
            if got != want || !d_zero {
                b.ok = false;
                let terms: Vec<String> = ident.terms.iter().map(|t| t.describe()).collect();
                b.messages
                    .push(format!("admissible set: {}", terms.join("; ")));
            }
            result = render_boundaries(&got);
            expected = render_boundaries(&want);
            b.push(ident, &small_ins, opts.enum_bound)?;
        }
        TheoremKind::Comparison {
            x_lemma,
            xt_lemma,
            expected: want,
            expected_text,
            specialization,
        } => {
            let x_def =
                lemma(x_lemma).ok_or_else(|| DegenError::UnknownTheorem(x_lemma.to_string()))?;
            let xt_def =
                lemma(xt_lemma).ok_or_else(|| DegenError::UnknownTheorem(xt_lemma.to_string()))?;
            let (x, x_small) = assemble_lemma(x_def, opts)?;
            let (xt, xt_small) = assemble_lemma(xt_def, opts)?;
            let want: QLaurent = want.parse()?;
            expected = format!("{want} = {expected_text}");
            let outcome = cancel_pair(&x, &xt).and_then(|r| {
                let spec = specialization.as_ref().map(|s| (s, x_def, xt_def));
                let e = substitute_oracle(&r, table, spec)?;
                Ok((r, e))
            });
            b.push(x, &x_small, opts.enum_bound)?;
            b.push(xt, &xt_small, opts.enum_bound)?;
            match outcome {
                Ok((r, e)) => {
                    if e.value != want {
                        b.ok = false;
                        b.messages.push(format!(
                            "derived {} but the stated factor is {want}",
                            e.value
                        ));
                    }
                    result = e.value.to_string();
                    ratio = Some(r);
                    evaluation = Some(e);
                }
                Err(
                    e @ (DegenError::NotSingleTerm { .. }
                    | DegenError::NoCommonFactor { .. }
                    | DegenError::MissingOracle(_)
                    | DegenError::NonExactDivision(_)
                    | DegenError::DimensionMismatch(_)),
                ) => {
                    b.ok = false;
                    b.messages.push(e.to_string());
                    result = "underived".to_string();
                }
                Err(e) => return Err(e),
            }
        }
    }

    Ok(DerivationTrace {
        theorem: def.id.to_string(),
        statement: def.statement.to_string(),
        options: *opts,
        gates: b.gates,
        identities: b.identities,
        audits: b.audits,
        ratio,
        evaluation,
        result,
        expected,
        status: if b.ok {
            Status::Verified
        } else {
            Status::Mismatch
        },
        messages: b.messages,
    })
}
