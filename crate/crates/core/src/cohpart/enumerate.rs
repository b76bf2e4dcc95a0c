use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use num_bigint::BigUint;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use super::{CohModel, Part, WeightedPartition};

/// All weighted partitions over `model` with `|η| ≤ max_size`, including
/// `∅`, in a deterministic order (by size, then lexicographic on parts).
pub fn enumerate_partitions(model: &Arc<CohModel>, max_size: u32) -> Vec<WeightedPartition> {
    // Part types ordered (size desc, weight asc); a multiset is a
    // non-decreasing sequence of type indices.
    let types: Vec<Part> = (1..=max_size)
        .rev()
        .flat_map(|size| (0..model.len()).map(move |weight| Part { size, weight }))
        .collect();
    let mut out = Vec::new();
    let mut stack = Vec::new();
    extend(&types, 0, max_size, &mut stack, &mut |parts| {
        out.push(WeightedPartition::new(model.clone(), parts.to_vec()).expect("valid parts"));
    });
    out.sort_by(|a, b| {
        a.size()
            .cmp(&b.size())
            .then_with(|| a.parts().cmp(b.parts()))
    });
    out
}

fn extend(
    types: &[Part],
    from: usize,
    budget: u32,
    stack: &mut Vec<Part>,
    emit: &mut impl FnMut(&[Part]),
) {
    emit(stack);
    for (i, t) in types.iter().enumerate().skip(from) {
        if t.size <= budget {
            stack.push(*t);
            extend(types, i, budget - t.size, stack, emit);
            stack.pop();
        }
    }
}

/// Number of weighted partitions with `|η| ≤ max_size` over a model with
/// `labels` basis classes: partial sums of the coefficients of
/// `∏_{n≥1} (1 - x^n)^{-labels}`.
pub fn count_partitions(labels: usize, max_size: u32) -> BigUint {
    let b = max_size as usize;
    let mut coeffs = vec![BigUint::zero(); b + 1];
    coeffs[0] = BigUint::from(1u32);
    for n in 1..=b {
        // Multiply by 1/(1 - x^n) once per label.
        for _ in 0..labels {
            for i in n..=b {
                let add = coeffs[i - n].clone();
                coeffs[i] += add;
            }
        }
    }
    coeffs.into_iter().sum()
}

/// A part constraint produced by a gate: its size and the codimension its
/// dual weight must have.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct PartShape {
    pub size: u32,
    pub dual_codim: u32,
}

/// A multiset of part constraints, sorted descending.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Shape(pub Vec<PartShape>);

impl Shape {
    pub fn new(mut parts: Vec<PartShape>) -> Self {
        parts.sort_by(|a, b| b.cmp(a));
        Self(parts)
    }

    pub fn size(&self) -> u32 {
        self.0.iter().map(|p| p.size).sum()
    }

    pub fn len(&self) -> u32 {
        self.0.len() as u32
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn dual_codim_sum(&self) -> u32 {
        self.0.iter().map(|p| p.dual_codim).sum()
    }

    pub fn of(eta: &WeightedPartition) -> Self {
        let m = eta.model();
        Self::new(
            eta.parts()
                .iter()
                .map(|p| PartShape {
                    size: p.size,
                    dual_codim: m.codim(m.dual_index(p.weight)),
                })
                .collect(),
        )
    }
}

impl fmt::Display for Shape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("empty");
        }
        let parts: Vec<String> = self
            .0
            .iter()
            .map(|p| format!("(size {}, dual codim {})", p.size, p.dual_codim))
            .collect();
        f.write_str(&parts.join(" + "))
    }
}

/// Every weighted partition over `model` matching `shape`.
pub fn realize_shape(model: &Arc<CohModel>, shape: &Shape) -> Vec<WeightedPartition> {
    let options: Vec<Vec<usize>> = shape
        .0
        .iter()
        .map(|p| {
            (0..model.len())
                .filter(|&w| model.codim(model.dual_index(w)) == p.dual_codim)
                .collect()
        })
        .collect();
    let mut found = BTreeSet::new();
    let mut pick = Vec::with_capacity(options.len());
    choose(shape, &options, &mut pick, &mut |weights| {
        let parts = shape
            .0
            .iter()
            .zip(weights)
            .map(|(p, &weight)| Part {
                size: p.size,
                weight,
            })
            .collect::<Vec<_>>();
        let eta = WeightedPartition::new(model.clone(), parts).expect("valid parts");
        found.insert(eta.parts().to_vec());
    });
    found
        .into_iter()
        .map(|parts| WeightedPartition::new(model.clone(), parts).expect("valid parts"))
        .collect()
}

fn choose(
    shape: &Shape,
    options: &[Vec<usize>],
    pick: &mut Vec<usize>,
    emit: &mut impl FnMut(&[usize]),
) {
    let i = pick.len();
    if i == options.len() {
        emit(pick);
        return;
    }
    for &w in &options[i] {
        // Identical part shapes take non-decreasing weights; avoids
        // generating each multiset factorially many times.
        if i > 0 && shape.0[i - 1] == shape.0[i] && pick[i - 1] > w {
            continue;
        }
        pick.push(w);
        choose(shape, options, pick, emit);
        pick.pop();
    }
}
