//! The statements the engine verifies, as data.

use crate::geomcat::{Center, GeometryName};

/// How the absolute class of an `X̃`-side identity differs from `p^!β`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ClassShift {
    /// A degeneration of `X` itself, class `β`.
    Base,
    /// `p^!β + j·e`.
    Fixed(i64),
    /// `p^!β + k·e` for the parameter `k`.
    K,
}

/// One comparison lemma: a single degeneration with its expected boundary.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LemmaDef {
    pub id: &'static str,
    pub source: GeometryName,
    pub center: Center,
    pub shift: ClassShift,
    /// Insertions supported near the centre, as `(level, label)` on the
    /// bubble's model.
    pub small_insertions: &'static [(u32, &'static str)],
    /// Default lower bound on `c`; `None` for point blow-ups.
    pub default_c0: Option<i64>,
    /// The admissible boundary, on the small side.
    pub expected_boundary: &'static [(u32, &'static str)],
}

/// Evaluating a relative ratio through an absolute one: the lemmas applied
/// to `X = base`, `β = class` with the descendent product specialised to
/// `generic`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Specialization {
    pub base: GeometryName,
    pub blown: GeometryName,
    pub class: &'static [i64],
    pub generic: &'static [(u32, &'static str)],
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TheoremKind {
    /// `Z_P(X̃; …)_{p^!β+ke} = 0` for every `k ≥ 1`.
    Vanishing {
        source: GeometryName,
        default_c0: Option<i64>,
    },
    /// `Z_P(X; …)_β = R(q)·Z_P(X̃; …)_{p^!β+je}`.
    Comparison {
        x_lemma: &'static str,
        xt_lemma: &'static str,
        expected: &'static str,
        expected_text: &'static str,
        specialization: Option<Specialization>,
    },
    /// A single lemma's admissible set.
    Lemma(&'static str),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TheoremDef {
    pub id: &'static str,
    pub statement: &'static str,
    pub kind: TheoremKind,
}

pub const ALL_IDS: [&str; 17] = [
    "pt0", "pt1", "pt2", "pt3", "curve0", "curve1", "curve2", "lemma3.1", "lemma3.2", "lemma3.3",
    "lemma3.4", "lemma3.5", "lemma3.6", "lemma4.1", "lemma4.2", "lemma4.3", "lemma4.4",
];

const EMPTY: &[(u32, &str)] = &[];
const PT: &[(u32, &str)] = &[(1, "pt")];
const LINE: &[(u32, &str)] = &[(1, "L")];

const LEMMAS: [LemmaDef; 10] = [
    LemmaDef {
        id: "lemma3.1",
        source: GeometryName::AbstractX,
        center: Center::Point,
        shift: ClassShift::Base,
        small_insertions: EMPTY,
        default_c0: None,
        expected_boundary: EMPTY,
    },
    LemmaDef {
        id: "lemma3.2",
        source: GeometryName::XBlownPoint,
        center: Center::ExceptionalDivisor,
        shift: ClassShift::Fixed(0),
        small_insertions: EMPTY,
        default_c0: None,
        expected_boundary: EMPTY,
    },
    LemmaDef {
        id: "lemma3.3",
        source: GeometryName::AbstractX,
        center: Center::Point,
        shift: ClassShift::Base,
        small_insertions: &[(0, "pt")],
        default_c0: None,
        expected_boundary: PT,
    },
    LemmaDef {
        id: "lemma3.4",
        source: GeometryName::XBlownPoint,
        center: Center::ExceptionalDivisor,
        shift: ClassShift::Fixed(-1),
        small_insertions: EMPTY,
        default_c0: None,
        expected_boundary: PT,
    },
    LemmaDef {
        id: "lemma3.5",
        source: GeometryName::AbstractX,
        center: Center::Point,
        shift: ClassShift::Base,
        small_insertions: &[(1, "pt")],
        default_c0: None,
        expected_boundary: LINE,
    },
    LemmaDef {
        id: "lemma3.6",
        source: GeometryName::XBlownPoint,
        center: Center::ExceptionalDivisor,
        shift: ClassShift::Fixed(-1),
        small_insertions: &[(0, "-E^2")],
        default_c0: None,
        expected_boundary: LINE,
    },
    LemmaDef {
        id: "lemma4.1",
        source: GeometryName::AbstractX,
        center: Center::Curve,
        shift: ClassShift::Base,
        small_insertions: EMPTY,
        default_c0: Some(1),
        expected_boundary: EMPTY,
    },
    LemmaDef {
        id: "lemma4.2",
        source: GeometryName::XBlownCurve,
        center: Center::ExceptionalDivisor,
        shift: ClassShift::Fixed(0),
        small_insertions: EMPTY,
        default_c0: Some(1),
        expected_boundary: EMPTY,
    },
    LemmaDef {
        id: "lemma4.3",
        source: GeometryName::AbstractX,
        center: Center::Curve,
        shift: ClassShift::Base,
        small_insertions: &[(0, "C")],
        default_c0: Some(2),
        expected_boundary: PT,
    },
    LemmaDef {
        id: "lemma4.4",
        source: GeometryName::XBlownCurve,
        center: Center::ExceptionalDivisor,
        shift: ClassShift::Fixed(-1),
        small_insertions: &[(0, "E")],
        default_c0: Some(2),
        expected_boundary: PT,
    },
];

const THEOREMS: [TheoremDef; 7] = [
    TheoremDef {
        id: "pt0",
        statement: "Z(X~; prod tau_di(p*gamma_i))_{p!beta + ke} = 0 for k >= 1 (point blow-up)",
        kind: TheoremKind::Vanishing {
            source: GeometryName::XBlownPoint,
            default_c0: None,
        },
    },
    TheoremDef {
        id: "pt1",
        statement: "Z(X; prod tau_di(gamma_i))_beta = Z(X~; prod tau_di(p*gamma_i))_{p!beta} (point blow-up)",
        kind: TheoremKind::Comparison {
            x_lemma: "lemma3.1",
            xt_lemma: "lemma3.2",
            expected: "1",
            expected_text: "1",
            specialization: None,
        },
    },
    TheoremDef {
        id: "pt2",
        statement: "Z(X; tau0(pt) prod tau_di(gamma_i))_beta = (1+q)^2 Z(X~; prod tau_di(p*gamma_i))_{p!beta - e}",
        kind: TheoremKind::Comparison {
            x_lemma: "lemma3.3",
            xt_lemma: "lemma3.4",
            expected: "1 + 2q + q^2",
            expected_text: "(1+q)^2",
            specialization: Some(Specialization {
                base: GeometryName::P3,
                blown: GeometryName::P3Blown,
                class: &[1],
                generic: &[(0, "pt")],
            }),
        },
    },
    TheoremDef {
        id: "pt3",
        statement: "Z(X; tau1(pt) prod tau_di(gamma_i))_beta = 1/2(1-q^2) Z(X~; tau0(-E^2) prod tau_di(p*gamma_i))_{p!beta - e}",
        kind: TheoremKind::Comparison {
            x_lemma: "lemma3.5",
            xt_lemma: "lemma3.6",
            expected: "1/2 - 1/2q^2",
            expected_text: "1/2(1-q^2)",
            specialization: Some(Specialization {
                base: GeometryName::P3,
                blown: GeometryName::P3Blown,
                class: &[1],
                generic: &[(0, "L")],
            }),
        },
    },
    TheoremDef {
        id: "curve0",
        statement: "Z(X~; prod tau_di(p*gamma_i))_{p!beta + ke} = 0 for k >= 1 (curve blow-up, c >= 0)",
        kind: TheoremKind::Vanishing {
            source: GeometryName::XBlownCurve,
            default_c0: Some(0),
        },
    },
    TheoremDef {
        id: "curve1",
        statement: "Z(X; prod tau_di(gamma_i))_beta = Z(X~; prod tau_di(p*gamma_i))_{p!beta} (curve blow-up, c > 0)",
        kind: TheoremKind::Comparison {
            x_lemma: "lemma4.1",
            xt_lemma: "lemma4.2",
            expected: "1",
            expected_text: "1",
            specialization: None,
        },
    },
    TheoremDef {
        id: "curve2",
        statement: "Z(X; tau0(C) prod tau_di(gamma_i))_beta = (1+q) Z(X~; prod tau_di(p*gamma_i))_{p!beta - e} (c > 1)",
        kind: TheoremKind::Comparison {
            x_lemma: "lemma4.3",
            xt_lemma: "lemma4.4",
            expected: "1 + q",
            expected_text: "(1+q)",
            specialization: None,
        },
    },
];

pub fn lemma(id: &str) -> Option<&'static LemmaDef> {
    LEMMAS.iter().find(|l| l.id == id)
}

/// Theorems and lemmas share one id space.
pub fn theorem(id: &str) -> Option<TheoremDef> {
    if let Some(t) = THEOREMS.iter().find(|t| t.id == id) {
        return Some(*t);
    }
    lemma(id).map(|l| TheoremDef {
        id: l.id,
        statement: "admissible boundary set of one degeneration",
        kind: TheoremKind::Lemma(l.id),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_id_resolves() {
        for id in ALL_IDS {
            let t = theorem(id).unwrap();
            assert_eq!(t.id, id);
            if let TheoremKind::Comparison {
                x_lemma, xt_lemma, ..
            } = t.kind
            {
                let (x, xt) = (lemma(x_lemma).unwrap(), lemma(xt_lemma).unwrap());
                assert_eq!(x.shift, ClassShift::Base);
                assert_ne!(xt.shift, ClassShift::Base);
                assert_eq!(x.expected_boundary, xt.expected_boundary);
            }
        }
        assert!(theorem("pt9").is_none());
    }
}
