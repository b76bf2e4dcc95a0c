use std::path::Path;

use num_bigint::BigInt;
use num_rational::BigRational;
use serde::{Deserialize, Serialize};

use crate::qlaurent::QLaurent;

use super::DegenError;

const BUILTIN: &str = include_str!("../../data/oracle.json");

/// A cited closed-form partition function.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleEntry {
    pub symbol: String,
    pub value: QLaurent,
    pub provenance: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

/// Immutable after load; lookups are by canonical symbol string.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct OracleTable {
    entries: Vec<OracleEntry>,
}

/// One re-derivation of a stored value.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct OracleCheck {
    pub symbol: String,
    pub derivation: String,
    pub derived: QLaurent,
    pub stored: Option<QLaurent>,
    /// Secondary evidence only: the stored value stays authoritative.
    pub secondary: bool,
}

impl OracleCheck {
    pub fn agrees(&self) -> bool {
        self.stored.as_ref() == Some(&self.derived)
    }
}

/// Contribution `N · q^{1-g}` of `N` rigid smooth curves of genus `g` in a
/// fixed class with every insertion met once, from the degenerate
/// contribution formula.
pub fn rational_fibre_closed_form(incidence: i64, genus: i64) -> QLaurent {
    QLaurent::monomial(
        BigRational::from_integer(BigInt::from(incidence)),
        1 - genus,
    )
}

impl OracleTable {
    pub fn builtin() -> Self {
        Self::from_json(BUILTIN).expect("bundled oracle table parses")
    }

    pub fn from_json(text: &str) -> Result<Self, DegenError> {
        let entries: Vec<OracleEntry> =
            serde_json::from_str(text).map_err(|e| DegenError::OracleFormat(e.to_string()))?;
        let mut seen = std::collections::BTreeSet::new();
        for e in &entries {
            if !seen.insert(e.symbol.as_str()) {
                return Err(DegenError::OracleFormat(format!(
                    "duplicate symbol {}",
                    e.symbol
                )));
            }
        }
        Ok(Self { entries })
    }

    pub fn from_path(path: &Path) -> Result<Self, DegenError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| DegenError::OracleFormat(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn entries(&self) -> &[OracleEntry] {
        &self.entries
    }

    pub fn get(&self, symbol: &str) -> Option<&OracleEntry> {
        self.entries.iter().find(|e| e.symbol == symbol)
    }

    pub fn lookup(&self, symbol: &str) -> Result<&QLaurent, DegenError> {
        self.get(symbol)
            .map(|e| &e.value)
            .ok_or_else(|| DegenError::MissingOracle(symbol.to_string()))
    }

    /// Independent derivations of the entries that admit one. The fibre
    /// class `F` of the point blow-up is represented by a single smooth
    /// rational line through a generic point.
    pub fn cross_checks(&self) -> Vec<OracleCheck> {
        let symbol = "Z(P3~; tau0(pt))_F";
        vec![OracleCheck {
            symbol: symbol.to_string(),
            derivation: "one rigid rational fibre line through the point: 1 * q^(1-0)".into(),
            derived: rational_fibre_closed_form(1, 0),
            stored: self.get(symbol).map(|e| e.value.clone()),
            secondary: true,
        }]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtin_has_six_cited_entries() {
        let t = OracleTable::builtin();
        assert_eq!(t.entries().len(), 6);
        assert!(t
            .entries()
            .iter()
            .all(|e| !e.provenance.is_empty() && !e.value.is_zero()));
        assert_eq!(t.lookup("Z(P3~; tau0(pt))_F").unwrap(), &QLaurent::q());
        assert!(matches!(
            t.lookup("Z(P9;)_L"),
            Err(DegenError::MissingOracle(_))
        ));
    }

    #[test]
    fn cross_check_agrees_and_detects_tampering() {
        assert!(OracleTable::builtin()
            .cross_checks()
            .iter()
            .all(OracleCheck::agrees));
        let tampered = BUILTIN.replacen(
            r#""symbol": "Z(P3~; tau0(pt))_F",
    "value": "q""#,
            r#""symbol": "Z(P3~; tau0(pt))_F",
    "value": "2q""#,
            1,
        );
        assert_ne!(tampered, BUILTIN);
        let t = OracleTable::from_json(&tampered).unwrap();
        assert!(!t.cross_checks()[0].agrees());
    }

    #[test]
    fn rejects_bad_json() {
        assert!(matches!(
            OracleTable::from_json("[{\"symbol\": 1}]"),
            Err(DegenError::OracleFormat(_))
        ));
        assert!(matches!(
            OracleTable::from_json(r#"[{"symbol":"a","value":"q^","provenance":"x"}]"#),
            Err(DegenError::OracleFormat(_))
        ));
    }
}
