use std::fmt;

use serde::{Deserialize, Serialize};

use crate::cohpart::{CohError, CohModel, WeightedPartition};
use crate::geomcat::{CurveClass, GeometryName};

/// Stand-in for the arbitrary descendent product `∏ τ_{d_i}(γ_i)` carried
/// through every identity unchanged.
pub const GENERIC_PRODUCT: &str = "prod tau_di(gamma_i)";
/// The same product pulled back to a blow-up, `∏ τ_{d_i}(p^*γ_i)`.
pub const GENERIC_PULLBACK: &str = "prod tau_di(p*gamma_i)";

fn join(insertions: &[String]) -> String {
    insertions.join(" ")
}

/// An absolute partition function `Z_P(X; q | insertions)_β`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct AbsSymbol {
    pub geometry: String,
    pub insertions: Vec<String>,
    pub class: String,
}

impl AbsSymbol {
    pub fn new(
        geometry: impl Into<String>,
        insertions: Vec<String>,
        class: impl Into<String>,
    ) -> Self {
        Self {
            geometry: geometry.into(),
            insertions,
            class: class.into(),
        }
    }

    pub fn canonical(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for AbsSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.insertions.is_empty() {
            write!(f, "Z({};)_{}", self.geometry, self.class)
        } else {
            write!(
                f,
                "Z({}; {})_{}",
                self.geometry,
                join(&self.insertions),
                self.class
            )
        }
    }
}

/// A relative partition function `Z_P(X/S; q | insertions | η)_β`, kept
/// opaque.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RelPfSymbol {
    pub geometry: GeometryName,
    pub divisor: String,
    pub insertions: Vec<String>,
    /// Name of the surface model the boundary weights live on.
    pub surface: String,
    pub boundary: Vec<(u32, String)>,
    pub curve_class: CurveClass,
}

impl RelPfSymbol {
    pub fn new(
        geometry: GeometryName,
        divisor: &str,
        insertions: Vec<String>,
        boundary: &WeightedPartition,
        curve_class: CurveClass,
    ) -> Self {
        Self {
            geometry,
            divisor: divisor.to_string(),
            insertions,
            surface: boundary.model().name().to_string(),
            boundary: boundary.to_labels(),
            curve_class,
        }
    }

    pub fn boundary_partition(&self) -> Result<WeightedPartition, CohError> {
        let model = CohModel::by_name(&self.surface)
            .ok_or_else(|| CohError::UnknownLabel(self.surface.clone()))?;
        let parts: Vec<(u32, &str)> = self
            .boundary
            .iter()
            .map(|(s, l)| (*s, l.as_str()))
            .collect();
        WeightedPartition::from_labels(model, &parts)
    }

    /// Empty boundary, zero class and no insertions: the factor is `1`.
    pub fn is_trivial(&self) -> bool {
        self.boundary.is_empty() && self.curve_class.is_zero() && self.insertions.is_empty()
    }

    pub fn canonical(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for RelPfSymbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let boundary: Vec<String> = self
            .boundary
            .iter()
            .map(|(s, l)| format!("({s},{l})"))
            .collect();
        let ins = if self.insertions.is_empty() {
            String::new()
        } else {
            format!("{} ", join(&self.insertions))
        };
        write!(
            f,
            "Z({}/{}; {ins}| [{}])_{}",
            self.geometry.short(),
            self.divisor,
            boundary.join(","),
            self.curve_class
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn canonical_strings() {
        let s = AbsSymbol::new("P3", vec!["tau0(pt)".into(), "tau0(pt)".into()], "L");
        assert_eq!(s.canonical(), "Z(P3; tau0(pt) tau0(pt))_L");

        let eta = WeightedPartition::from_labels(CohModel::ruled_surface(), &[(1, "pt")]).unwrap();
        let r = RelPfSymbol::new(
            GeometryName::BundleOverC,
            "Dinf",
            vec!["tau0(C)".into()],
            &eta,
            CurveClass::new(GeometryName::BundleOverC, &[1, 0]),
        );
        assert_eq!(r.canonical(), "Z(P_C(N_C+O_C)/Dinf; tau0(C) | [(1,pt)])_F");
        assert_eq!(r.boundary_partition().unwrap(), eta);
        assert!(!r.is_trivial());

        let empty = WeightedPartition::empty(CohModel::projective_plane());
        let t = RelPfSymbol::new(
            GeometryName::P3,
            "H",
            vec![],
            &empty,
            CurveClass::zero(GeometryName::P3),
        );
        assert_eq!(t.canonical(), "Z(P3/H; | [])_0");
        assert!(t.is_trivial());
    }
}
