use pairblow_core::cohpart::{CohElement, CohModel, Insertion};
use pairblow_core::degen::{
    assemble, cancel_pair, substitute_oracle, AssembleInput, ClassShift, DegenError, OracleTable,
    Status, VerifyOptions,
};
use pairblow_core::dimsolve::ParamRange;
use pairblow_core::geomcat::{Center, GeometryName};
use pairblow_core::qlaurent::QLaurent;

fn input(
    source: GeometryName,
    center: Center,
    shift: ClassShift,
    insertions: Vec<Insertion>,
) -> AssembleInput {
    AssembleInput {
        label: format!("{source:?}/{shift:?}"),
        source,
        center,
        shift,
        insertions,
        k_range: Some(ParamRange::at_least(1)),
        c_range: Some(ParamRange::at_least(2)),
        enum_bound: 6,
    }
}

fn point() -> Vec<Insertion> {
    vec![Insertion::new(
        0,
        CohElement::new(CohModel::p3(), "pt").unwrap(),
    )]
}

#[test]
fn empty_boundary_identity() {
    let id = assemble(&input(
        GeometryName::AbstractX,
        Center::Point,
        ClassShift::Base,
        vec![],
    ))
    .unwrap();
    assert_eq!(id.terms.len(), 1);
    assert!(id.terms[0].eta.is_empty());
    assert_eq!(id.terms[0].coefficient, QLaurent::one());
    assert_eq!(
        id.terms[0].large.to_string(),
        "Z(X~/E; prod tau_di(p*gamma_i) | [])_p!beta"
    );
}

#[test]
fn vanishing_identity_has_no_terms() {
    let id = assemble(&input(
        GeometryName::XBlownPoint,
        Center::ExceptionalDivisor,
        ClassShift::K,
        vec![],
    ))
    .unwrap();
    assert!(id.terms.is_empty());
    assert_eq!(id.render(), "Z(X~; prod tau_di(p*gamma_i))_p!beta + ke = 0");
}

#[test]
fn trivial_ratio_is_one() {
    let x = assemble(&input(
        GeometryName::AbstractX,
        Center::Point,
        ClassShift::Base,
        vec![],
    ))
    .unwrap();
    let xt = assemble(&input(
        GeometryName::XBlownPoint,
        Center::ExceptionalDivisor,
        ClassShift::Fixed(0),
        vec![],
    ))
    .unwrap();
    let r = cancel_pair(&x, &xt).unwrap();
    let e = substitute_oracle(&r, &OracleTable::builtin(), None).unwrap();
    assert_eq!(e.route, "trivial");
    assert_eq!(e.value, QLaurent::one());
}

#[test]
fn mismatched_large_factors_do_not_cancel() {
    let x = assemble(&input(
        GeometryName::AbstractX,
        Center::Point,
        ClassShift::Base,
        point(),
    ))
    .unwrap();
    let xt = assemble(&input(
        GeometryName::XBlownPoint,
        Center::ExceptionalDivisor,
        ClassShift::Fixed(0),
        vec![],
    ))
    .unwrap();
    assert!(matches!(
        cancel_pair(&x, &xt),
        Err(DegenError::NoCommonFactor { .. })
    ));
}

#[test]
fn direct_lookup_needs_both_leaves() {
    let x = assemble(&input(
        GeometryName::AbstractX,
        Center::Point,
        ClassShift::Base,
        point(),
    ))
    .unwrap();
    let xt = assemble(&input(
        GeometryName::XBlownPoint,
        Center::ExceptionalDivisor,
        ClassShift::Fixed(-1),
        vec![],
    ))
    .unwrap();
    let r = cancel_pair(&x, &xt).unwrap();
    let err = substitute_oracle(&r, &OracleTable::builtin(), None).unwrap_err();
    assert_eq!(
        err,
        DegenError::MissingOracle("Z(P3/H; tau0(pt) | [(1,pt)])_L".into())
    );
}

#[test]
fn non_exact_division_is_reported() {
    let table = OracleTable::from_json(
        r#"[
        {"symbol": "Z(P_C(N_C+O_C)/Dinf; tau0(C) | [(1,pt)])_F", "value": "1 + q", "provenance": "test"},
        {"symbol": "Z(P_E(N_E+O_E)/Dinf; tau0(E) | [(1,pt)])_F", "value": "1 + q^2", "provenance": "test"}
    ]"#,
    )
    .unwrap();
    let t = pairblow_core::degen::verify("curve2", &VerifyOptions::default(), &table).unwrap();
    assert_eq!(t.status, Status::Mismatch);
    assert!(
        t.messages
            .iter()
            .any(|m| m.contains("not a Laurent polynomial")),
        "{:?}",
        t.messages
    );
}
