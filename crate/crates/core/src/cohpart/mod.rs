//! Graded cohomology models and cohomology-weighted partitions.
//!
//! A weighted partition `η` stores the primal weights `δ_{j_i}`; every
//! dimension constraint instead consumes the codimensions of the dual
//! weights `δ^{j_i}`. [`WeightedPartition::dual_codim_sum`] is the only
//! accessor the constraint code uses, so the two are never confused.

mod enumerate;
mod model;
mod partition;

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use enumerate::{count_partitions, enumerate_partitions, realize_shape, PartShape, Shape};
pub use model::{BasisClass, CohModel, CohModelSpec};
pub use partition::{Part, WeightedPartition};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CohError {
    #[error("duplicate label {0:?}")]
    DuplicateLabel(String),
    #[error("unknown label {0:?}")]
    UnknownLabel(String),
    #[error("class {label:?} has codimension {codim} beyond dimension {dim}")]
    CodimOutOfRange { label: String, codim: u32, dim: u32 },
    #[error("pairing is not an involution at {0}")]
    PairingNotInvolution(String),
    #[error("class {0:?} has no Poincaré dual")]
    Unpaired(String),
    #[error("{a:?} and {b:?} are paired but their codimensions do not sum to {dim}")]
    PairingDegree { a: String, b: String, dim: u32 },
    #[error("expected exactly one codimension-0 class, found {0}")]
    IdentityCount(usize),
    #[error("part sizes must be positive")]
    ZeroPart,
    #[error("partitions live on different models ({0} vs {1})")]
    ModelMismatch(String, String),
}

/// Support markers: which loci an insertion class is known to avoid.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Support {
    AwayFromC,
    AwayFromE,
    AwayFromP,
}

/// A basis class of a model, with support markers.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CohElement {
    model: Arc<CohModel>,
    index: usize,
    support: BTreeSet<Support>,
}

impl CohElement {
    pub fn new(model: Arc<CohModel>, label: &str) -> Result<Self, CohError> {
        let index = model.index_of(label)?;
        Ok(Self {
            model,
            index,
            support: BTreeSet::new(),
        })
    }

    pub fn with_support(mut self, flags: impl IntoIterator<Item = Support>) -> Self {
        self.support.extend(flags);
        self
    }

    pub fn model(&self) -> &Arc<CohModel> {
        &self.model
    }

    pub fn label(&self) -> &str {
        self.model.label(self.index)
    }

    pub fn codim(&self) -> u32 {
        self.model.codim(self.index)
    }

    pub fn support(&self) -> &BTreeSet<Support> {
        &self.support
    }

    pub fn dual(&self) -> CohElement {
        Self {
            model: self.model.clone(),
            index: self.model.dual_index(self.index),
            support: self.support.clone(),
        }
    }
}

/// A descendent insertion `τ_d(γ)`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Insertion {
    pub level: u32,
    pub class: CohElement,
}

impl Insertion {
    pub fn new(level: u32, class: CohElement) -> Self {
        Self { level, class }
    }

    /// Complex codimension `codim γ + d - 1` this insertion imposes.
    pub fn codim(&self) -> i64 {
        i64::from(self.class.codim()) + i64::from(self.level) - 1
    }
}

impl fmt::Display for Insertion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "tau{}({})", self.level, self.class.label())
    }
}
