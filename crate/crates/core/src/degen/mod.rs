//! Degeneration identities over opaque relative partition functions, the
//! cancellation of common factors between an `X`-side and an `X̃`-side
//! identity, and evaluation of the surviving ratio from oracle leaf values.

mod assemble;
mod catalogue;
mod oracle;
mod pipeline;
mod symbol;

use thiserror::Error;

use crate::cohpart::CohError;
use crate::dimsolve::GateError;
use crate::geomcat::GeomError;
use crate::qlaurent::LaurentError;

pub use assemble::{
    assemble, audit_coefficients, audit_duality, degeneration_coefficient, place_insertions,
    recheck_dimension, AssembleInput, IdentityTerm, Side, SymbolicIdentity, TermAudit,
};
pub use catalogue::{
    lemma, theorem, ClassShift, LemmaDef, Specialization, TheoremDef, TheoremKind, ALL_IDS,
};
pub use oracle::{rational_fibre_closed_form, OracleCheck, OracleEntry, OracleTable};
pub use pipeline::{
    cancel_pair, substitute_oracle, verify, DerivationTrace, Evaluation, GateAudit, RatioResult,
    SpecializedPair, Status, VerifyOptions,
};
pub use symbol::{AbsSymbol, RelPfSymbol, GENERIC_PRODUCT, GENERIC_PULLBACK};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum DegenError {
    #[error(transparent)]
    Gate(#[from] GateError),
    #[error(transparent)]
    Geom(#[from] GeomError),
    #[error(transparent)]
    Coh(#[from] CohError),
    #[error("insertion {insertion} has support flags that do not decide its side for a degeneration at {center}")]
    UnsupportedInsertionSide { insertion: String, center: String },
    #[error("identities {x} and {xt} do not share a large factor: {left} vs {right}")]
    NoCommonFactor {
        x: String,
        xt: String,
        left: String,
        right: String,
    },
    #[error("identity {label} has {count} terms, expected exactly one: {terms}")]
    NotSingleTerm {
        label: String,
        count: usize,
        terms: String,
    },
    #[error("no oracle value for {0}")]
    MissingOracle(String),
    #[error("oracle ratio is not a Laurent polynomial: {0}")]
    NonExactDivision(String),
    #[error("dimension check failed: {0}")]
    DimensionMismatch(String),
    #[error("oracle table: {0}")]
    OracleFormat(String),
    #[error("unknown theorem or lemma id {0:?}")]
    UnknownTheorem(String),
    #[error("invalid options: {0}")]
    InvalidOptions(String),
}

impl From<LaurentError> for DegenError {
    fn from(e: LaurentError) -> Self {
        match e {
            LaurentError::Parse { .. } => DegenError::OracleFormat(e.to_string()),
            other => DegenError::NonExactDivision(other.to_string()),
        }
    }
}
