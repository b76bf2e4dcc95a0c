//! Dimension constraints ("gates") and their solution certificates.
//!
//! A gate is the integer equation left over after every geometric
//! substitution in the virtual-dimension bookkeeping of one degeneration.
//! [`solve_gate`] lists every admissible boundary shape and proves there are
//! no others; [`check_certificate`] re-validates a certificate without
//! trusting the solver, and [`brute_force_crosscheck`] compares it against
//! plain enumeration of weighted partitions.

mod check;
mod crosscheck;
mod gate;
mod solve;

use thiserror::Error;

use crate::form::Var;
use crate::geomcat::GeomError;

pub use check::{check_certificate, CheckError, CheckReport};
pub use crosscheck::{brute_force_crosscheck, CrossCheck, CrossCheckCaps};
pub use gate::{
    bubble_family, build_gate, insertion_codim_sum, vdim_relative_gap, GateProblem, GateSetup,
    ParamRange,
};
pub use solve::{solve_gate, GateCertificate, GateSolution, ParamValue, TailBound, Verdict};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GateError {
    #[error(transparent)]
    Geom(#[from] GeomError),
    #[error("unsupported gate: {0}")]
    UnsupportedGate(String),
    #[error(
        "gate {label}: lhs - rhs grows like {slope}·|η| after using ℓ ≤ |η|; \
         the size coefficient must beat the length coefficient to bound |η|"
    )]
    DominanceFails { label: String, slope: i64 },
    #[error("parameter {0} appears in the gate without a declared range")]
    MissingBound(Var),
    #[error("declared range for {0} is empty or unsupported")]
    InvalidBound(Var),
    #[error("enumeration bound must be at least 1")]
    ZeroEnumBound,
    #[error("unknown surface model {0:?}")]
    UnknownSurface(String),
}
