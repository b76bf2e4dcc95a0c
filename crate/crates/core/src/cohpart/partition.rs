use std::fmt;
use std::sync::Arc;

use num_bigint::BigUint;
use num_traits::One;

use super::{CohError, CohModel};

/// One part `(η_i, δ_{j_i})`; `weight` indexes the model's basis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Part {
    pub size: u32,
    pub weight: usize,
}

/// A cohomology-weighted partition over a surface model.
///
/// Parts are kept sorted (size descending, then weight index ascending) so
/// equal multisets compare equal.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct WeightedPartition {
    model: Arc<CohModel>,
    parts: Vec<Part>,
}

fn canonical(parts: &mut [Part]) {
    parts.sort_by(|a, b| b.size.cmp(&a.size).then(a.weight.cmp(&b.weight)));
}

impl WeightedPartition {
    pub fn empty(model: Arc<CohModel>) -> Self {
        Self {
            model,
            parts: Vec::new(),
        }
    }

    pub fn new(model: Arc<CohModel>, mut parts: Vec<Part>) -> Result<Self, CohError> {
        if parts.iter().any(|p| p.size == 0) {
            return Err(CohError::ZeroPart);
        }
        if let Some(p) = parts.iter().find(|p| p.weight >= model.len()) {
            return Err(CohError::UnknownLabel(format!("#{}", p.weight)));
        }
        canonical(&mut parts);
        Ok(Self { model, parts })
    }

    /// Builds from `(size, label)` pairs, the JSON shape `[[size, label], ...]`.
    pub fn from_labels(model: Arc<CohModel>, parts: &[(u32, &str)]) -> Result<Self, CohError> {
        let parts = parts
            .iter()
            .map(|&(size, label)| {
                Ok(Part {
                    size,
                    weight: model.index_of(label)?,
                })
            })
            .collect::<Result<Vec<_>, CohError>>()?;
        Self::new(model, parts)
    }

    pub fn to_labels(&self) -> Vec<(u32, String)> {
        self.parts
            .iter()
            .map(|p| (p.size, self.model.label(p.weight).to_string()))
            .collect()
    }

    pub fn model(&self) -> &Arc<CohModel> {
        &self.model
    }

    pub fn parts(&self) -> &[Part] {
        &self.parts
    }

    pub fn is_empty(&self) -> bool {
        self.parts.is_empty()
    }

    /// `|η|`
    pub fn size(&self) -> u32 {
        self.parts.iter().map(|p| p.size).sum()
    }

    /// `ℓ(η)`
    pub fn len(&self) -> u32 {
        self.parts.len() as u32
    }

    /// `|Aut(η)|`: product of factorials of the multiplicities of identical
    /// parts.
    pub fn aut_order(&self) -> BigUint {
        let mut out = BigUint::one();
        let mut run = 0u32;
        for (i, p) in self.parts.iter().enumerate() {
            run = if i > 0 && self.parts[i - 1] == *p {
                run + 1
            } else {
                1
            };
            out *= BigUint::from(run);
        }
        out
    }

    /// `𝔷(η) = |Aut(η)| · ∏ η_i`.
    pub fn zeta(&self) -> BigUint {
        self.parts
            .iter()
            .fold(self.aut_order(), |acc, p| acc * BigUint::from(p.size))
    }

    /// `η^∨`: same sizes, Poincaré-dual weights.
    pub fn dual(&self) -> Self {
        let mut parts: Vec<Part> = self
            .parts
            .iter()
            .map(|p| Part {
                size: p.size,
                weight: self.model.dual_index(p.weight),
            })
            .collect();
        canonical(&mut parts);
        Self {
            model: self.model.clone(),
            parts,
        }
    }

    /// `Σ codim δ_{j_i}` over the stored weights.
    pub fn primal_codim_sum(&self) -> u32 {
        self.parts.iter().map(|p| self.model.codim(p.weight)).sum()
    }

    /// `Σ codim δ^{j_i}` over the dual weights: the `S` of every gate.
    pub fn dual_codim_sum(&self) -> u32 {
        self.parts
            .iter()
            .map(|p| self.model.codim(self.model.dual_index(p.weight)))
            .sum()
    }

    /// Complex codimension of the Nakajima class `C_{η^∨}` on the side
    /// carrying the dual boundary: `|η| - ℓ(η) + Σ codim δ^{j_i}`.
    pub fn nakajima_codim(&self) -> i64 {
        i64::from(self.size()) - i64::from(self.len()) + i64::from(self.dual_codim_sum())
    }
}

impl fmt::Display for WeightedPartition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, p) in self.parts.iter().enumerate() {
            if i > 0 {
                f.write_str(",")?;
            }
            write!(f, "({},{})", p.size, self.model.label(p.weight))?;
        }
        f.write_str("]")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p2(parts: &[(u32, &str)]) -> WeightedPartition {
        WeightedPartition::from_labels(CohModel::projective_plane(), parts).unwrap()
    }

    #[test]
    fn aut_and_zeta_examples() {
        assert_eq!(p2(&[(1, "pt")]).aut_order(), 1u32.into());
        assert_eq!(p2(&[(2, "L"), (2, "L")]).aut_order(), 2u32.into());
        assert_eq!(p2(&[(1, "L"), (2, "L")]).aut_order(), 1u32.into());
        assert_eq!(p2(&[(2, "L"), (2, "pt")]).aut_order(), 1u32.into());

        assert_eq!(p2(&[(1, "pt")]).zeta(), 1u32.into());
        assert_eq!(p2(&[(2, "L"), (2, "L")]).zeta(), 8u32.into());
        assert_eq!(p2(&[]).zeta(), 1u32.into());
        // 3! · 2! · (1·1·1·2·2)
        assert_eq!(
            p2(&[(1, "pt"), (1, "pt"), (1, "pt"), (2, "1"), (2, "1")]).zeta(),
            48u32.into()
        );
    }

    #[test]
    fn dual_examples() {
        assert_eq!(p2(&[(1, "pt")]).dual(), p2(&[(1, "1")]));
        assert_eq!(p2(&[(1, "L")]).dual(), p2(&[(1, "L")]));
        let eta = p2(&[(3, "1"), (1, "L"), (1, "pt")]);
        assert_eq!(eta.dual().dual(), eta);
    }

    #[test]
    fn nakajima_codim_examples() {
        assert_eq!(p2(&[(1, "pt")]).nakajima_codim(), 0);
        assert_eq!(p2(&[]).nakajima_codim(), 0);
        assert_eq!(p2(&[(2, "1")]).nakajima_codim(), 3);
        assert_eq!(p2(&[(1, "1")]).nakajima_codim(), 2);
    }

    #[test]
    fn construction_rejects_bad_parts() {
        let m = CohModel::projective_plane();
        assert_eq!(
            WeightedPartition::from_labels(m.clone(), &[(0, "pt")]),
            Err(CohError::ZeroPart)
        );
        assert!(WeightedPartition::from_labels(m.clone(), &[(1, "f")]).is_err());
        assert!(WeightedPartition::new(m, vec![Part { size: 1, weight: 7 }]).is_err());
    }

    #[test]
    fn display_and_labels() {
        let eta = p2(&[(1, "pt"), (2, "L")]);
        assert_eq!(eta.to_string(), "[(2,L),(1,pt)]");
        assert_eq!(eta.to_labels(), vec![(2, "L".into()), (1, "pt".into())]);
        assert_eq!(p2(&[]).to_string(), "[]");
    }
}
