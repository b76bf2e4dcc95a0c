use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::sync::{Arc, OnceLock};

use serde::{Deserialize, Serialize};

use super::CohError;

/// One basis class of a graded cohomology model.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct BasisClass {
    pub label: String,
    /// Complex codimension; real degree is twice this.
    pub codim: u32,
}

/// A graded basis with a Poincaré-duality involution.
///
/// Only degrees and the duality bijection are modelled. Classes whose
/// Poincaré dual is not a basis element up to sign are absent, and
/// odd-degree classes are never included.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CohModel {
    name: String,
    dim: u32,
    classes: Vec<BasisClass>,
    dual: Vec<usize>,
}

/// JSON shape: `{dim, elements: [{label, codim}], pairing: [[a, b]]}`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CohModelSpec {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub dim: u32,
    pub elements: Vec<BasisClass>,
    pub pairing: Vec<[String; 2]>,
}

impl CohModel {
    pub fn new(
        name: impl Into<String>,
        dim: u32,
        classes: Vec<BasisClass>,
        pairing: &[(&str, &str)],
    ) -> Result<Self, CohError> {
        let name = name.into();
        let mut index = BTreeMap::new();
        for (i, c) in classes.iter().enumerate() {
            if index.insert(c.label.clone(), i).is_some() {
                return Err(CohError::DuplicateLabel(c.label.clone()));
            }
            if c.codim > dim {
                return Err(CohError::CodimOutOfRange {
                    label: c.label.clone(),
                    codim: c.codim,
                    dim,
                });
            }
        }
        let lookup = |l: &str| {
            index
                .get(l)
                .copied()
                .ok_or_else(|| CohError::UnknownLabel(l.to_string()))
        };
        let mut dual = vec![usize::MAX; classes.len()];
        for &(a, b) in pairing {
            let (ia, ib) = (lookup(a)?, lookup(b)?);
            if dual[ia] != usize::MAX || (ia != ib && dual[ib] != usize::MAX) {
                return Err(CohError::PairingNotInvolution(format!("{a} <-> {b}")));
            }
            dual[ia] = ib;
            dual[ib] = ia;
        }
        if let Some(i) = dual.iter().position(|&j| j == usize::MAX) {
            return Err(CohError::Unpaired(classes[i].label.clone()));
        }
        for (i, &j) in dual.iter().enumerate() {
            if classes[i].codim + classes[j].codim != dim {
                return Err(CohError::PairingDegree {
                    a: classes[i].label.clone(),
                    b: classes[j].label.clone(),
                    dim,
                });
            }
        }
        let units: Vec<_> = classes.iter().filter(|c| c.codim == 0).collect();
        if units.len() != 1 {
            return Err(CohError::IdentityCount(units.len()));
        }
        Ok(Self {
            name,
            dim,
            classes,
            dual,
        })
    }

    pub fn from_spec(spec: &CohModelSpec) -> Result<Self, CohError> {
        let pairs: Vec<(&str, &str)> = spec
            .pairing
            .iter()
            .map(|[a, b]| (a.as_str(), b.as_str()))
            .collect();
        let name = spec.name.clone().unwrap_or_else(|| "custom".to_string());
        Self::new(name, spec.dim, spec.elements.clone(), &pairs)
    }

    pub fn to_spec(&self) -> CohModelSpec {
        let mut seen = BTreeSet::new();
        let mut pairing = Vec::new();
        for (i, &j) in self.dual.iter().enumerate() {
            if seen.insert(i.min(j)) {
                pairing.push([self.classes[i].label.clone(), self.classes[j].label.clone()]);
            }
        }
        CohModelSpec {
            name: Some(self.name.clone()),
            dim: self.dim,
            elements: self.classes.clone(),
            pairing,
        }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn dim(&self) -> u32 {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    pub fn classes(&self) -> &[BasisClass] {
        &self.classes
    }

    pub fn index_of(&self, label: &str) -> Result<usize, CohError> {
        self.classes
            .iter()
            .position(|c| c.label == label)
            .ok_or_else(|| CohError::UnknownLabel(label.to_string()))
    }

    pub fn label(&self, i: usize) -> &str {
        &self.classes[i].label
    }

    pub fn codim(&self, i: usize) -> u32 {
        self.classes[i].codim
    }

    pub fn dual_index(&self, i: usize) -> usize {
        self.dual[i]
    }

    /// The codim-0 class `𝟙`.
    pub fn identity(&self) -> usize {
        self.classes
            .iter()
            .position(|c| c.codim == 0)
            .expect("validated")
    }

    /// The point class, dual to the identity.
    pub fn point(&self) -> usize {
        self.dual[self.identity()]
    }

    // Catalogue of the models the blow-up geometries need.

    /// `ℙ²`: the hyperplane at infinity of `ℙ³` and the exceptional plane of a
    /// point blow-up.
    pub fn projective_plane() -> Arc<Self> {
        static CELL: OnceLock<Arc<CohModel>> = OnceLock::new();
        CELL.get_or_init(|| {
            Arc::new(
                Self::new(
                    "P2",
                    2,
                    vec![class("1", 0), class("L", 1), class("pt", 2)],
                    &[("1", "pt"), ("L", "L")],
                )
                .expect("static model"),
            )
        })
        .clone()
    }

    /// Even cohomology of a ruled surface `ℙ_C(N_C)`: `f` is the fibre and
    /// `s` the rational section class with `s² = 0`, so `f·s = 1` makes
    /// them mutually dual.
    pub fn ruled_surface() -> Arc<Self> {
        static CELL: OnceLock<Arc<CohModel>> = OnceLock::new();
        CELL.get_or_init(|| {
            Arc::new(
                Self::new(
                    "ruled",
                    2,
                    vec![class("1", 0), class("f", 1), class("s", 1), class("pt", 2)],
                    &[("1", "pt"), ("f", "s")],
                )
                .expect("static model"),
            )
        })
        .clone()
    }

    pub fn p3() -> Arc<Self> {
        static CELL: OnceLock<Arc<CohModel>> = OnceLock::new();
        CELL.get_or_init(|| {
            Arc::new(
                Self::new(
                    "P3",
                    3,
                    vec![class("1", 0), class("H", 1), class("L", 2), class("pt", 3)],
                    &[("1", "pt"), ("H", "L")],
                )
                .expect("static model"),
            )
        })
        .clone()
    }

    /// Local model of a point blow-up near `E` (also `ℙ̃³`). `-E^2` is the
    /// class of a line in `E`.
    pub fn blown_point_local() -> Arc<Self> {
        static CELL: OnceLock<Arc<CohModel>> = OnceLock::new();
        CELL.get_or_init(|| {
            Arc::new(
                Self::new(
                    "P3~",
                    3,
                    vec![
                        class("1", 0),
                        class("H", 1),
                        class("E", 1),
                        class("L", 2),
                        class("-E^2", 2),
                        class("pt", 3),
                    ],
                    &[("1", "pt"), ("H", "L"), ("E", "-E^2")],
                )
                .expect("static model"),
            )
        })
        .clone()
    }

    /// Local model of `X` near a curve `C`, equivalently `ℙ_C(N_C⊕O_C)`.
    /// `Fib` is the fibre plane over a point of `C`, `F` the fibre line.
    pub fn curve_local() -> Arc<Self> {
        static CELL: OnceLock<Arc<CohModel>> = OnceLock::new();
        CELL.get_or_init(|| {
            Arc::new(
                Self::new(
                    "P_C",
                    3,
                    vec![
                        class("1", 0),
                        class("Dinf", 1),
                        class("Fib", 1),
                        class("F", 2),
                        class("C", 2),
                        class("pt", 3),
                    ],
                    &[("1", "pt"), ("Dinf", "F"), ("Fib", "C")],
                )
                .expect("static model"),
            )
        })
        .clone()
    }

    /// Local model of the curve blow-up near `E`, truncated to the classes
    /// the engine inserts (`E` and its dual fibre line).
    pub fn blown_curve_local() -> Arc<Self> {
        static CELL: OnceLock<Arc<CohModel>> = OnceLock::new();
        CELL.get_or_init(|| {
            Arc::new(
                Self::new(
                    "P_E",
                    3,
                    vec![class("1", 0), class("E", 1), class("F", 2), class("pt", 3)],
                    &[("1", "pt"), ("E", "F")],
                )
                .expect("static model"),
            )
        })
        .clone()
    }

    /// Look up a catalogued model by name.
    pub fn by_name(name: &str) -> Option<Arc<Self>> {
        Some(match name {
            "P2" => Self::projective_plane(),
            "ruled" => Self::ruled_surface(),
            "P3" => Self::p3(),
            "P3~" => Self::blown_point_local(),
            "P_C" => Self::curve_local(),
            "P_E" => Self::blown_curve_local(),
            _ => return None,
        })
    }
}

fn class(label: &str, codim: u32) -> BasisClass {
    BasisClass {
        label: label.to_string(),
        codim,
    }
}

impl fmt::Display for CohModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name)
    }
}
