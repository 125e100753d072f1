//! Outer approximations of the cone of proper deformations by the
//! half-spaces `⟨f_γ, x⟩ > 0`, `f_γ` the functional `[u] ↦ α_u(γ)/ℓ(γ)` in
//! cohomology coordinates, over all classes of length `≤ L`.
//!
//! A sign found at finite `L` is necessary for properness, never
//! sufficient.

pub mod section;
pub mod simplex;

use nalgebra::{DVector, Vector3};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::freegrp::{conj_class, enumerate_classes, ConjClass};
use crate::margulis::{Cocycle, DeformationSpace, ALPHA_ZERO_TOL};
use section::{PlaneChart, Polygon};
use simplex::LpOutcome;

/// Functionals closer than this are merged when folding.
pub const DEDUP_TOL: f64 = 1e-9;
/// A margin at or below this does not count as an interior point.
pub const MARGIN_TOL: f64 = 1e-9;
/// Largest grading accepted by [`convergence_report`].
pub const MAX_GRADING: usize = 12;
/// Largest number of classes any single run may enumerate.
pub const MAX_ENTRIES: usize = 1_000_000;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct HalfSpace {
    pub class: ConjClass,
    pub length: f64,
    pub f: DVector<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct HalfSpaceSet {
    pub entries: Vec<HalfSpace>,
    pub max_len: usize,
    /// Rank of the free group.
    pub rank: usize,
    pub dim: usize,
    /// Number of classes before merging.
    pub raw_count: usize,
    pub folded: bool,
}

impl HalfSpaceSet {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    /// Entries whose class has length `≤ max_len`.
    pub fn truncated(&self, max_len: usize) -> HalfSpaceSet {
        let entries: Vec<HalfSpace> = self
            .entries
            .iter()
            .filter(|e| e.class.len() <= max_len)
            .cloned()
            .collect();
        let raw_count = if max_len >= self.max_len {
            self.raw_count
        } else if self.folded {
            enumerate_classes(self.rank, max_len).len()
        } else {
            entries.len()
        };
        HalfSpaceSet {
            entries,
            max_len: max_len.min(self.max_len),
            rank: self.rank,
            dim: self.dim,
            raw_count,
            folded: self.folded,
        }
    }

    /// Values `⟨f, x⟩` on coordinates `x`.
    pub fn evaluate(&self, x: &DVector<f64>) -> Result<Vec<f64>> {
        if x.len() != self.dim {
            return Err(Error::DimMismatch {
                expected: self.dim,
                got: x.len(),
            });
        }
        Ok(self.entries.iter().map(|e| e.f.dot(x)).collect())
    }
}

/// Rough count `Σ_{n ≤ L} (2k-1)^n / n` of classes, for budgeting.
pub fn estimated_class_count(rank: usize, max_len: usize) -> f64 {
    let base = (2 * rank).saturating_sub(1) as f64;
    (1..=max_len)
        .map(|n| (base.powi(n as i32) + 1.0) / n as f64)
        .sum()
}

/// Normalized functionals of every class of length `≤ max_len`, in graded
/// order. With `fold_inverses`, functionals equal within [`DEDUP_TOL`] are
/// merged onto the earliest class (for odd `r`, `f_{γ⁻¹} = f_γ`).
pub fn build_halfspaces(
    space: &DeformationSpace,
    max_len: usize,
    fold_inverses: bool,
) -> Result<HalfSpaceSet> {
    if max_len == 0 {
        return Err(Error::InvalidArgument(
            "grading L must be at least 1".into(),
        ));
    }
    let estimate = estimated_class_count(space.rank(), max_len);
    if estimate > 2.0 * MAX_ENTRIES as f64 {
        return Err(Error::BudgetExceeded(format!(
            "about {estimate:.0} classes up to length {max_len}, limit {MAX_ENTRIES}"
        )));
    }
    let classes = enumerate_classes(space.rank(), max_len);
    if classes.len() > MAX_ENTRIES {
        return Err(Error::BudgetExceeded(format!(
            "{} classes, limit {MAX_ENTRIES}",
            classes.len()
        )));
    }
    let raw_count = classes.len();
    let mut entries: Vec<HalfSpace> = classes
        .into_par_iter()
        .map(|class| {
            let (length, f) = space.normalized_functional(class.rep())?;
            Ok(HalfSpace { class, length, f })
        })
        .collect::<Result<_>>()?;
    if fold_inverses {
        entries = merge_duplicates(entries);
    }
    Ok(HalfSpaceSet {
        entries,
        max_len,
        rank: space.rank(),
        dim: space.cohomology_dim(),
        raw_count,
        folded: fold_inverses,
    })
}

fn merge_duplicates(entries: Vec<HalfSpace>) -> Vec<HalfSpace> {
    let mut order: Vec<usize> = (0..entries.len()).collect();
    order.sort_by(|&i, &j| entries[i].f[0].total_cmp(&entries[j].f[0]).then(i.cmp(&j)));
    let mut removed = vec![false; entries.len()];
    for (pos, &i) in order.iter().enumerate() {
        if removed[i] {
            continue;
        }
        for &j in &order[pos + 1..] {
            if entries[j].f[0] - entries[i].f[0] > DEDUP_TOL {
                break;
            }
            if !removed[j] && (&entries[i].f - &entries[j].f).norm() <= DEDUP_TOL {
                removed[i.max(j)] = true;
                if removed[i] {
                    break;
                }
            }
        }
    }
    entries
        .into_iter()
        .zip(removed)
        .filter(|(_, r)| !r)
        .map(|(e, _)| e)
        .collect()
}

/// Optimum of `max t` subject to `sign·⟨f_i, x⟩ ≥ t`, `‖x‖_∞ ≤ 1`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LpSolution {
    pub sign: i8,
    pub margin: f64,
    pub witness: DVector<f64>,
}

impl LpSolution {
    pub fn feasible(&self) -> bool {
        self.margin > MARGIN_TOL
    }
}

/// Solves the margin LP on the shifted variables `y = x + 1 ∈ [0, 2]`,
/// `s = t + T₀` with `T₀ > max ‖f‖₁`, so the origin is feasible.
pub fn margin_lp(h: &HalfSpaceSet, sign: i8) -> Result<LpSolution> {
    if h.is_empty() {
        return Err(Error::InvalidArgument("empty half-space set".into()));
    }
    if sign != 1 && sign != -1 {
        return Err(Error::InvalidArgument(format!(
            "sign must be ±1, got {sign}"
        )));
    }
    let sg = f64::from(sign);
    let d = h.dim;
    let t0 = h.entries.iter().map(|e| e.f.lp_norm(1)).fold(0.0, f64::max) + 1.0;

    let mut a = Vec::with_capacity(h.len() + d);
    let mut b = Vec::with_capacity(h.len() + d);
    for e in &h.entries {
        let mut row: Vec<f64> = e.f.iter().map(|v| -sg * v).collect();
        row.push(1.0);
        a.push(row);
        b.push(t0 - sg * e.f.sum());
    }
    for j in 0..d {
        let mut row = vec![0.0; d + 1];
        row[j] = 1.0;
        a.push(row);
        b.push(2.0);
    }
    let mut c = vec![0.0; d + 1];
    c[d] = 1.0;

    let (y, _) = match simplex::maximize(&a, &b, &c)? {
        LpOutcome::Optimal { x, value } => (x, value),
        other => {
            return Err(Error::LpNumericalFailure(format!(
                "margin LP reported {other:?}"
            )))
        }
    };
    let witness = DVector::from_iterator(d, y[..d].iter().map(|v| (v - 1.0).clamp(-1.0, 1.0)));
    let lp_margin = y[d] - t0;
    let margin = h
        .entries
        .iter()
        .map(|e| sg * e.f.dot(&witness))
        .fold(f64::INFINITY, f64::min);
    if (margin - lp_margin).abs() > 1e-9 * (1.0 + t0) {
        return Err(Error::LpNumericalFailure(format!(
            "post-hoc margin {margin:.3e} disagrees with LP value {lp_margin:.3e}"
        )));
    }
    Ok(LpSolution {
        sign,
        margin,
        witness,
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum ConeStatus {
    PositiveFeasible,
    NegativeFeasible,
    BothFeasible,
    MixedOnly,
}

#[derive(Clone, Debug, Serialize)]
pub struct ConeReport {
    pub max_len: usize,
    pub entries: usize,
    pub plus: LpSolution,
    pub minus: LpSolution,
    pub status: ConeStatus,
}

/// Margin LPs for both signs.
pub fn cone_report(h: &HalfSpaceSet) -> Result<ConeReport> {
    let plus = margin_lp(h, 1)?;
    let minus = margin_lp(h, -1)?;
    let status = match (plus.feasible(), minus.feasible()) {
        (true, true) => ConeStatus::BothFeasible,
        (true, false) => ConeStatus::PositiveFeasible,
        (false, true) => ConeStatus::NegativeFeasible,
        (false, false) => ConeStatus::MixedOnly,
    };
    Ok(ConeReport {
        max_len: h.max_len,
        entries: h.len(),
        plus,
        minus,
        status,
    })
}

/// Sign pattern of `α_u/ℓ` over the classes of a half-space set.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub enum Membership {
    AllPositive {
        min_margin: f64,
    },
    AllNegative {
        min_margin: f64,
    },
    /// Opposite signs: a certificate that the deformation is not proper.
    Mixed {
        negative: ConjClass,
        positive: ConjClass,
    },
    /// Some `α_u` is zero up to tolerance while no opposite signs occur.
    Vanishing {
        class: ConjClass,
    },
}

pub fn membership(space: &DeformationSpace, u: &Cocycle, h: &HalfSpaceSet) -> Result<Membership> {
    let coords = space.cohomology_coords(u)?.coords;
    membership_of_coords(h, &coords)
}

pub fn membership_of_coords(h: &HalfSpaceSet, x: &DVector<f64>) -> Result<Membership> {
    let values = h.evaluate(x)?;
    let neg = values.iter().position(|&v| v < -ALPHA_ZERO_TOL);
    let pos = values.iter().position(|&v| v > ALPHA_ZERO_TOL);
    if let (Some(n), Some(p)) = (neg, pos) {
        return Ok(Membership::Mixed {
            negative: h.entries[n].class.clone(),
            positive: h.entries[p].class.clone(),
        });
    }
    if let Some(z) = values.iter().position(|v| v.abs() <= ALPHA_ZERO_TOL) {
        return Ok(Membership::Vanishing {
            class: h.entries[z].class.clone(),
        });
    }
    let min_margin = values.iter().map(|v| v.abs()).fold(f64::INFINITY, f64::min);
    Ok(if pos.is_some() {
        Membership::AllPositive { min_margin }
    } else {
        Membership::AllNegative { min_margin }
    })
}

/// A slice of the cone `{⟨f_i, x⟩ ≥ 0}` by the plane `⟨f_j, x⟩ = 1`,
/// `j = plane_index`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CrossSection {
    #[serde(rename = "L")]
    pub max_len: usize,
    pub plane_index: usize,
    pub vertices: Vec<[f64; 2]>,
    pub area: f64,
    #[serde(skip)]
    pub chart: PlaneChart,
}

pub fn cross_section(h: &HalfSpaceSet, plane_index: usize) -> Result<CrossSection> {
    if h.dim != 3 {
        return Err(Error::DimMismatch {
            expected: 3,
            got: h.dim,
        });
    }
    let f0 = h.entries.get(plane_index).ok_or_else(|| {
        Error::InvalidArgument(format!(
            "plane index {plane_index} out of range ({} entries)",
            h.len()
        ))
    })?;
    let to3 = |f: &DVector<f64>| Vector3::new(f[0], f[1], f[2]);
    let others: Vec<Vector3<f64>> = h
        .entries
        .iter()
        .enumerate()
        .filter(|(i, _)| *i != plane_index)
        .map(|(_, e)| to3(&e.f))
        .collect();
    let (chart, poly): (PlaneChart, Polygon) = section::slice(&to3(&f0.f), &others);
    Ok(CrossSection {
        max_len: h.max_len,
        plane_index,
        area: poly.area(),
        vertices: poly.vertices,
        chart,
    })
}

/// One row of [`convergence_report`].
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConvergenceRow {
    #[serde(rename = "L")]
    pub max_len: usize,
    pub count: usize,
    pub t_plus: f64,
    pub t_minus: f64,
    /// Cross-section area through the first entry, when `dim = 3`.
    pub area: Option<f64>,
}

/// Runs the pipeline for `L = 1..=max_len`.
pub fn convergence_report(
    space: &DeformationSpace,
    max_len: usize,
    fold_inverses: bool,
) -> Result<Vec<ConvergenceRow>> {
    if max_len > MAX_GRADING {
        return Err(Error::BudgetExceeded(format!(
            "L = {max_len} exceeds the limit {MAX_GRADING}"
        )));
    }
    let full = build_halfspaces(space, max_len, fold_inverses)?;
    (1..=max_len)
        .map(|l| {
            let h = full.truncated(l);
            let report = cone_report(&h)?;
            let area = if h.dim == 3 {
                Some(cross_section(&h, 0)?.area)
            } else {
                None
            };
            Ok(ConvergenceRow {
                max_len: l,
                count: h.len(),
                t_plus: report.plus.margin,
                t_minus: report.minus.margin,
                area,
            })
        })
        .collect()
}

/// `true` when `γ` and `γ⁻¹` give the same constraint.
pub fn inverse_pairs_coincide(space: &DeformationSpace, class: &ConjClass) -> Result<bool> {
    let (_, f) = space.normalized_functional(class.rep())?;
    let inv = conj_class(&class.rep().inverse())?;
    let (_, g) = space.normalized_functional(inv.rep())?;
    Ok((f - g).norm() <= DEDUP_TOL)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schottky::SchottkyGroup;

    fn space() -> DeformationSpace {
        DeformationSpace::new(SchottkyGroup::three_holed_sphere(4.0, 4.0).unwrap(), 1).unwrap()
    }

    fn set(fs: Vec<Vec<f64>>) -> HalfSpaceSet {
        let dim = fs[0].len();
        let entries = fs
            .into_iter()
            .enumerate()
            .map(|(i, f)| HalfSpace {
                class: conj_class(&"a".repeat(i + 1).parse().unwrap()).unwrap(),
                length: 1.0,
                f: DVector::from_vec(f),
            })
            .collect::<Vec<_>>();
        HalfSpaceSet {
            raw_count: entries.len(),
            entries,
            max_len: 1,
            rank: 1,
            dim,
            folded: false,
        }
    }

    #[test]
    fn length_one_entries() {
        let s = space();
        assert_eq!(build_halfspaces(&s, 1, false).unwrap().len(), 4);
        let folded = build_halfspaces(&s, 1, true).unwrap();
        assert_eq!(folded.len(), 2);
        assert_eq!(folded.raw_count, 4);
        assert!(inverse_pairs_coincide(&s, &folded.entries[0].class).unwrap());
    }

    #[test]
    fn antipodal_pair_has_zero_margin() {
        let h = set(vec![vec![1.0, 0.5, 0.0], vec![-1.0, -0.5, 0.0]]);
        let sol = margin_lp(&h, 1).unwrap();
        assert!(sol.margin.abs() < 1e-12);
        assert!(!sol.feasible());
    }

    #[test]
    fn single_entry_margin_one() {
        let h = set(vec![vec![1.0, 0.0, 0.0]]);
        let sol = margin_lp(&h, 1).unwrap();
        assert!((sol.margin - 1.0).abs() < 1e-12);
        assert!((sol.witness[0] - 1.0).abs() < 1e-12);
        let neg = margin_lp(&h, -1).unwrap();
        assert!((neg.margin - 1.0).abs() < 1e-12);
        assert!((neg.witness[0] + 1.0).abs() < 1e-12);
    }

    #[test]
    fn membership_sign_patterns() {
        let h = set(vec![vec![1.0, 0.0], vec![0.0, 1.0]]);
        let x = DVector::from_vec(vec![0.5, 0.25]);
        assert_eq!(
            membership_of_coords(&h, &x).unwrap(),
            Membership::AllPositive { min_margin: 0.25 }
        );
        assert_eq!(
            membership_of_coords(&h, &-x).unwrap(),
            Membership::AllNegative { min_margin: 0.25 }
        );
        let m = membership_of_coords(&h, &DVector::from_vec(vec![1.0, -1.0])).unwrap();
        assert!(matches!(m, Membership::Mixed { .. }));
        let z = membership_of_coords(&h, &DVector::from_vec(vec![1.0, 0.0])).unwrap();
        assert!(matches!(z, Membership::Vanishing { .. }));
        assert!(membership_of_coords(&h, &DVector::zeros(3)).is_err());
    }

    #[test]
    fn cross_section_needs_three_dims() {
        let h = set(vec![vec![1.0, 0.0]]);
        assert_eq!(
            cross_section(&h, 0).unwrap_err(),
            Error::DimMismatch {
                expected: 3,
                got: 2
            }
        );
    }

    #[test]
    fn budget_guard() {
        let s = space();
        assert!(matches!(
            convergence_report(&s, 13, false),
            Err(Error::BudgetExceeded(_))
        ));
    }
}
