//! Catalogue of the 3-fold models that appear in the blow-up degenerations.
//!
//! Each model is finite data: an `H₂` basis, integer divisor functionals on
//! it, and a `c₁` functional whose entries are integers, the symbol `c`
//! (standing for `∫_C c₁(X)`), or unknown. The Euler-sequence computations
//! for the projective bundles are pre-reduced into these vectors:
//!
//! | model | basis | `c₁` |
//! |---|---|---|
//! | `ℙ³` | `L` | `4` |
//! | `ℙ̃³` | `F = L - e`, `L` | `2, 4` |
//! | `ℙ_C(N_C⊕O_C)` | fibre line `F`, zero section `C0` | `3, c` |
//! | `ℙ_E(N_E⊕O_E)` | fibre `F`, section `s0` of `E` with `N_E·s0 = 0`, ruling `f` of `E` | `2, c, 1` |
//! | `X̃` | `p^!β`, `p^!C`, `e` | `?, ?, 2` (point) / `?, c, 1` (curve) |

use std::collections::BTreeMap;
use std::fmt;
use std::sync::{Arc, OnceLock};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cohpart::CohModel;
use crate::form::{Form, Var};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GeomError {
    #[error("geometry {0} has no c1 data on generator {1}")]
    UnknownGeometry(String, String),
    #[error("geometry {geometry} has no divisor {divisor:?}")]
    UnknownDivisor { geometry: String, divisor: String },
    #[error("class constraints on {0} are inconsistent")]
    Inconsistent(String),
    #[error("class constraints on {0} have no integral solution")]
    NonIntegral(String),
    #[error("generator {generator} of {geometry} is left free but carries no parameter")]
    Underdetermined { geometry: String, generator: String },
    #[error("cannot degenerate {geometry} along {center}")]
    UnsupportedCenter { geometry: String, center: String },
    #[error("class has {got} coordinates, geometry {geometry} has rank {rank}")]
    RankMismatch {
        geometry: String,
        got: usize,
        rank: usize,
    },
    #[error("no blow-up relation between {0} and {1}")]
    NotABlowUp(String, String),
    #[error("unknown geometry {0:?}")]
    UnknownName(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GeometryName {
    AbstractX,
    P3,
    P3Blown,
    XBlownPoint,
    XBlownCurve,
    BundleOverC,
    BundleOverE,
}

impl GeometryName {
    pub const ALL: [GeometryName; 7] = [
        GeometryName::AbstractX,
        GeometryName::P3,
        GeometryName::P3Blown,
        GeometryName::XBlownPoint,
        GeometryName::XBlownCurve,
        GeometryName::BundleOverC,
        GeometryName::BundleOverE,
    ];

    /// Short ASCII name used in symbols and JSON.
    pub fn short(self) -> &'static str {
        match self {
            GeometryName::AbstractX => "X",
            GeometryName::P3 => "P3",
            GeometryName::P3Blown => "P3~",
            GeometryName::XBlownPoint => "X~",
            GeometryName::XBlownCurve => "X~",
            GeometryName::BundleOverC => "P_C(N_C+O_C)",
            GeometryName::BundleOverE => "P_E(N_E+O_E)",
        }
    }

    pub fn geometry(self) -> Arc<ThreeFoldGeometry> {
        ThreeFoldGeometry::catalogue()
            .into_iter()
            .find(|g| g.name == self)
            .expect("catalogue covers every name")
    }
}

impl fmt::Display for GeometryName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.short())
    }
}

/// A finite model of a smooth projective 3-fold.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ThreeFoldGeometry {
    pub name: GeometryName,
    pub h2_basis: Vec<String>,
    /// Named integer functionals on `H₂`: divisors, plus auxiliary
    /// pairings such as the `C`-degree of the pushforward.
    pub divisors: BTreeMap<String, Vec<i64>>,
    /// `∫ c₁` on each generator; `None` where the model does not know it.
    pub c1: Vec<Option<Form>>,
    /// Parameter assigned to a generator left free by a constraint system.
    pub free_params: BTreeMap<usize, Var>,
    /// Lower bound on `c` from the theorem hypothesis, when `c` appears.
    pub c_lower_bound: Option<i64>,
    /// Cohomology classes available for insertions on this model.
    pub local_model: Arc<CohModel>,
}

/// JSON shape of a catalogue entry.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeometryRecord {
    pub name: GeometryName,
    pub h2_basis: Vec<String>,
    pub divisor_matrix: BTreeMap<String, Vec<i64>>,
    pub c1_vector: Vec<Option<Form>>,
    pub symbolic_params: BTreeMap<String, i64>,
}

fn divs(entries: &[(&str, &[i64])]) -> BTreeMap<String, Vec<i64>> {
    entries
        .iter()
        .map(|(k, v)| (k.to_string(), v.to_vec()))
        .collect()
}

fn basis(names: &[&str]) -> Vec<String> {
    names.iter().map(|s| s.to_string()).collect()
}

impl ThreeFoldGeometry {
    /// The immutable catalogue, built once.
    pub fn catalogue() -> Vec<Arc<ThreeFoldGeometry>> {
        static CELL: OnceLock<Vec<Arc<ThreeFoldGeometry>>> = OnceLock::new();
        CELL.get_or_init(Self::build_catalogue).clone()
    }

    fn build_catalogue() -> Vec<Arc<ThreeFoldGeometry>> {
        let k = |v: i64| Some(Form::constant(v));
        let c = || Some(Form::var(Var::C));
        vec![
            Self {
                name: GeometryName::AbstractX,
                h2_basis: basis(&["beta", "C"]),
                divisors: BTreeMap::new(),
                c1: vec![None, c()],
                free_params: BTreeMap::new(),
                c_lower_bound: Some(0),
                local_model: CohModel::curve_local(),
            },
            Self {
                name: GeometryName::P3,
                h2_basis: basis(&["L"]),
                divisors: divs(&[("H", &[1])]),
                c1: vec![k(4)],
                free_params: BTreeMap::new(),
                c_lower_bound: None,
                local_model: CohModel::p3(),
            },
            Self {
                name: GeometryName::P3Blown,
                h2_basis: basis(&["F", "L"]),
                divisors: divs(&[("H", &[1, 1]), ("E", &[1, 0])]),
                c1: vec![k(2), k(4)],
                free_params: BTreeMap::new(),
                c_lower_bound: None,
                local_model: CohModel::blown_point_local(),
            },
            Self {
                name: GeometryName::XBlownPoint,
                h2_basis: basis(&["p!beta", "p!C", "e"]),
                divisors: divs(&[("E", &[0, 0, -1])]),
                c1: vec![None, None, k(2)],
                free_params: BTreeMap::new(),
                c_lower_bound: None,
                local_model: CohModel::blown_point_local(),
            },
            Self {
                name: GeometryName::XBlownCurve,
                h2_basis: basis(&["p!beta", "p!C", "e"]),
                divisors: divs(&[("E", &[0, 0, -1])]),
                c1: vec![None, c(), k(1)],
                free_params: BTreeMap::new(),
                c_lower_bound: Some(0),
                local_model: CohModel::blown_curve_local(),
            },
            Self {
                name: GeometryName::BundleOverC,
                h2_basis: basis(&["F", "C0"]),
                divisors: divs(&[("Dinf", &[1, 0]), ("degC", &[0, 1])]),
                c1: vec![k(3), c()],
                free_params: BTreeMap::from([(1, Var::Degree)]),
                c_lower_bound: Some(0),
                local_model: CohModel::curve_local(),
            },
            Self {
                name: GeometryName::BundleOverE,
                h2_basis: basis(&["F", "s0", "f"]),
                divisors: divs(&[
                    ("Dinf", &[1, 0, 0]),
                    ("E", &[1, 0, -1]),
                    ("degC", &[0, 1, 0]),
                    ("piE", &[0, 0, -1]),
                ]),
                c1: vec![k(2), c(), k(1)],
                free_params: BTreeMap::from([(1, Var::Degree)]),
                c_lower_bound: Some(0),
                local_model: CohModel::blown_curve_local(),
            },
        ]
        .into_iter()
        .map(Arc::new)
        .collect()
    }

    pub fn rank(&self) -> usize {
        self.h2_basis.len()
    }

    pub fn to_record(&self) -> GeometryRecord {
        let mut symbolic_params = BTreeMap::new();
        if let Some(lb) = self.c_lower_bound {
            symbolic_params.insert("c".to_string(), lb);
        }
        GeometryRecord {
            name: self.name,
            h2_basis: self.h2_basis.clone(),
            divisor_matrix: self.divisors.clone(),
            c1_vector: self.c1.clone(),
            symbolic_params,
        }
    }

    fn check_rank(&self, beta: &CurveClass) -> Result<(), GeomError> {
        if beta.coords.len() != self.rank() {
            return Err(GeomError::RankMismatch {
                geometry: self.name.to_string(),
                got: beta.coords.len(),
                rank: self.rank(),
            });
        }
        Ok(())
    }

    pub fn divisor(&self, name: &str) -> Result<&[i64], GeomError> {
        self.divisors
            .get(name)
            .map(Vec::as_slice)
            .ok_or_else(|| GeomError::UnknownDivisor {
                geometry: self.name.to_string(),
                divisor: name.to_string(),
            })
    }

    /// `β·D` for a named functional.
    pub fn intersect(&self, divisor: &str, beta: &CurveClass) -> Result<Form, GeomError> {
        self.check_rank(beta)?;
        let row = self.divisor(divisor)?;
        Ok(row
            .iter()
            .zip(&beta.coords)
            .fold(Form::zero(), |acc, (a, x)| acc.plus(&x.scaled(*a))))
    }

    /// `∫_β c₁`, as an integer form in the class parameters and `c`.
    pub fn c1_pair(&self, beta: &CurveClass) -> Result<Form, GeomError> {
        self.check_rank(beta)?;
        let mut total = Form::zero();
        for (i, x) in beta.coords.iter().enumerate() {
            if x.is_zero() {
                continue;
            }
            let c1 = self.c1[i].as_ref().ok_or_else(|| {
                GeomError::UnknownGeometry(self.name.to_string(), self.h2_basis[i].clone())
            })?;
            total = total.plus(&x.times(c1));
        }
        Ok(total)
    }

    /// Solves `β·D_i = rhs_i` over the `H₂` basis.
    ///
    /// Generators not pinned by the system become parameters (the
    /// `C`-degree `d` on the bundle models); every parameter is constrained
    /// to be `≥ 0` by the effectivity axiom recorded on the family.
    pub fn solve_class_constraints(
        &self,
        constraints: &[(&str, Form)],
    ) -> Result<ClassFamily, GeomError> {
        let r = self.rank();
        let mut rows: Vec<(Vec<i64>, Form)> = constraints
            .iter()
            .map(|(d, rhs)| Ok((self.divisor(d)?.to_vec(), rhs.clone())))
            .collect::<Result<_, GeomError>>()?;

        // Integer row reduction with Euclidean pivoting keeps every row
        // integral.
        let mut pivots = Vec::new();
        let mut top = 0;
        for col in 0..r {
            loop {
                let Some(best) = (top..rows.len())
                    .filter(|&i| rows[i].0[col] != 0)
                    .min_by_key(|&i| rows[i].0[col].abs())
                else {
                    break;
                };
                rows.swap(top, best);
                let p = rows[top].0[col];
                let mut done = true;
                for i in top + 1..rows.len() {
                    let q = rows[i].0[col] / p;
                    if q != 0 {
                        let (prow, prhs) = rows[top].clone();
                        for (a, b) in rows[i].0.iter_mut().zip(&prow) {
                            *a -= q * b;
                        }
                        rows[i].1 = rows[i].1.minus(&prhs.scaled(q));
                    }
                    if rows[i].0[col] != 0 {
                        done = false;
                    }
                }
                if done {
                    pivots.push((top, col));
                    top += 1;
                    break;
                }
            }
            if top == rows.len() {
                break;
            }
        }
        for (coeffs, rhs) in &rows[top..] {
            if coeffs.iter().all(|&a| a == 0) && !rhs.is_zero() {
                return Err(GeomError::Inconsistent(self.name.to_string()));
            }
        }

        let mut coords: Vec<Option<Form>> = vec![None; r];
        let mut free = Vec::new();
        for col in 0..r {
            if !pivots.iter().any(|&(_, c)| c == col) {
                let var =
                    *self
                        .free_params
                        .get(&col)
                        .ok_or_else(|| GeomError::Underdetermined {
                            geometry: self.name.to_string(),
                            generator: self.h2_basis[col].clone(),
                        })?;
                coords[col] = Some(Form::var(var));
                free.push(var);
            }
        }
        for &(row, col) in pivots.iter().rev() {
            let (coeffs, rhs) = &rows[row];
            let mut acc = rhs.clone();
            for (j, &a) in coeffs.iter().enumerate().skip(col + 1) {
                if a != 0 {
                    let xj = coords[j].as_ref().expect("solved right to left");
                    acc = acc.minus(&xj.scaled(a));
                }
            }
            let p = coeffs[col];
            if acc.terms().any(|(_, c)| c % p != 0) {
                return Err(GeomError::NonIntegral(self.name.to_string()));
            }
            let mut q = Form::zero();
            for (m, c) in acc.terms() {
                q = q.plus(&Form::term(m.clone(), c / p));
            }
            coords[col] = Some(q);
        }
        Ok(ClassFamily {
            class: CurveClass {
                geometry: self.name,
                coords: coords
                    .into_iter()
                    .map(|c| c.expect("every column solved"))
                    .collect(),
            },
            free_params: free,
            effectivity_axiom: true,
        })
    }
}

/// A curve class, possibly depending on parameters (`n`, `k`, `d`).
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct CurveClass {
    pub geometry: GeometryName,
    pub coords: Vec<Form>,
}

impl CurveClass {
    pub fn new(geometry: GeometryName, coords: &[i64]) -> Self {
        Self {
            geometry,
            coords: coords.iter().map(|&c| Form::constant(c)).collect(),
        }
    }

    pub fn zero(geometry: GeometryName) -> Self {
        let rank = geometry.geometry().rank();
        Self::new(geometry, &vec![0; rank])
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(Form::is_zero)
    }

    pub fn plus(&self, other: &CurveClass) -> CurveClass {
        debug_assert_eq!(self.geometry, other.geometry);
        CurveClass {
            geometry: self.geometry,
            coords: self
                .coords
                .iter()
                .zip(&other.coords)
                .map(|(a, b)| a.plus(b))
                .collect(),
        }
    }

    pub fn scaled(&self, k: i64) -> CurveClass {
        CurveClass {
            geometry: self.geometry,
            coords: self.coords.iter().map(|a| a.scaled(k)).collect(),
        }
    }

    pub fn substitute(&self, v: Var, by: &Form) -> CurveClass {
        CurveClass {
            geometry: self.geometry,
            coords: self.coords.iter().map(|a| a.substitute(v, by)).collect(),
        }
    }
}

impl fmt::Display for CurveClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let g = self.geometry.geometry();
        let mut first = true;
        for (x, name) in self.coords.iter().zip(&g.h2_basis) {
            if x.is_zero() {
                continue;
            }
            let text = match x.as_constant() {
                Some(1) => name.clone(),
                Some(-1) => format!("-{name}"),
                Some(v) => format!("{v}{name}"),
                None => format!("({x}){name}"),
            };
            match (first, text.strip_prefix('-')) {
                (true, _) => f.write_str(&text)?,
                (false, Some(rest)) => write!(f, " - {rest}")?,
                (false, None) => write!(f, " + {text}")?,
            }
            first = false;
        }
        if first {
            f.write_str("0")?;
        }
        Ok(())
    }
}

/// Solution family of a class-constraint system.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassFamily {
    pub class: CurveClass,
    /// Parameters introduced for unconstrained generators.
    pub free_params: Vec<Var>,
    /// All free parameters are assumed `≥ 0` (effective classes only).
    pub effectivity_axiom: bool,
}

/// A blow-up `p: X̃ → X` at the level of `H₂`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BlowUp {
    pub base: GeometryName,
    pub blown: GeometryName,
    /// Image of each base generator under `p^!`.
    pullback: Vec<Vec<i64>>,
    /// Image of each blown generator under `p_*`.
    pushforward: Vec<Vec<i64>>,
    /// Coordinates of the exceptional line class `e`.
    exceptional_line: Vec<i64>,
}

impl BlowUp {
    pub fn between(base: GeometryName, blown: GeometryName) -> Result<Self, GeomError> {
        use GeometryName::*;
        let (pullback, pushforward, exceptional_line) = match (base, blown) {
            // H₂(ℙ̃³) = ZF ⊕ ZL with L the total transform and e = L - F.
            (P3, P3Blown) => (vec![vec![0, 1]], vec![vec![1], vec![1]], vec![-1, 1]),
            (AbstractX, XBlownPoint) | (AbstractX, XBlownCurve) => (
                vec![vec![1, 0, 0], vec![0, 1, 0]],
                vec![vec![1, 0], vec![0, 1], vec![0, 0]],
                vec![0, 0, 1],
            ),
            _ => return Err(GeomError::NotABlowUp(base.to_string(), blown.to_string())),
        };
        Ok(Self {
            base,
            blown,
            pullback,
            pushforward,
            exceptional_line,
        })
    }

    fn apply(images: &[Vec<i64>], target: GeometryName, beta: &CurveClass) -> CurveClass {
        let rank = target.geometry().rank();
        let mut coords = vec![Form::zero(); rank];
        for (x, image) in beta.coords.iter().zip(images) {
            for (slot, &a) in coords.iter_mut().zip(image) {
                *slot = slot.plus(&x.scaled(a));
            }
        }
        CurveClass {
            geometry: target,
            coords,
        }
    }

    /// `p^! = PD ∘ p^* ∘ PD`.
    pub fn pbang(&self, beta: &CurveClass) -> Result<CurveClass, GeomError> {
        self.base.geometry().check_rank(beta)?;
        Ok(Self::apply(&self.pullback, self.blown, beta))
    }

    pub fn push(&self, beta: &CurveClass) -> Result<CurveClass, GeomError> {
        self.blown.geometry().check_rank(beta)?;
        Ok(Self::apply(&self.pushforward, self.base, beta))
    }

    pub fn exceptional_line(&self) -> CurveClass {
        CurveClass::new(self.blown, &self.exceptional_line)
    }
}

/// Where a degeneration is centred.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Center {
    Point,
    Curve,
    ExceptionalDivisor,
}

impl fmt::Display for Center {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Center::Point => "a point",
            Center::Curve => "a curve",
            Center::ExceptionalDivisor => "the exceptional divisor",
        })
    }
}

/// The two halves of a semistable degeneration glued along a surface.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Degeneration {
    pub source: GeometryName,
    pub center: Center,
    /// The bubble side (`ℙ³`, `ℙ̃³` or a projective bundle).
    pub small: GeometryName,
    pub small_divisor: &'static str,
    /// The side `X̃` relative to `E`.
    pub large: GeometryName,
    pub large_divisor: &'static str,
    /// Cohomology model of the gluing surface.
    pub surface: Arc<CohModel>,
}

impl Degeneration {
    /// Whether the surface is the exceptional divisor of a curve blow-up.
    pub fn along_curve(&self) -> bool {
        matches!(self.large, GeometryName::XBlownCurve)
    }

    /// Whether the small side is glued to `E` through a divisor also called
    /// `E` (the degenerations of `X̃`), as opposed to a degeneration of `X`.
    pub fn of_blow_up(&self) -> bool {
        self.center == Center::ExceptionalDivisor
    }

    /// Class `β₂` carried by the large side for a boundary of size `n` and
    /// bubble `C`-degree `d`: `p^!β - d·p^!C - n·e`.
    pub fn large_class(&self, n: &Form, d: &Form) -> CurveClass {
        CurveClass {
            geometry: self.large,
            coords: vec![Form::constant(1), d.scaled(-1), n.scaled(-1)],
        }
    }
}

pub fn build_degeneration(g: GeometryName, center: Center) -> Result<Degeneration, GeomError> {
    use GeometryName::*;
    let (small, small_divisor, large, surface) = match (g, center) {
        (AbstractX, Center::Point) => (P3, "H", XBlownPoint, CohModel::projective_plane()),
        (XBlownPoint, Center::ExceptionalDivisor) => {
            (P3Blown, "H", XBlownPoint, CohModel::projective_plane())
        }
        (AbstractX, Center::Curve) => (BundleOverC, "Dinf", XBlownCurve, CohModel::ruled_surface()),
        (XBlownCurve, Center::ExceptionalDivisor) => {
            (BundleOverE, "Dinf", XBlownCurve, CohModel::ruled_surface())
        }
        _ => {
            return Err(GeomError::UnsupportedCenter {
                geometry: g.to_string(),
                center: center.to_string(),
            })
        }
    };
    Ok(Degeneration {
        source: g,
        center,
        small,
        small_divisor,
        large,
        large_divisor: "E",
        surface,
    })
}
