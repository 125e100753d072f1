//! Geodesic currents supported on finitely many closed orbits, the diffused
//! invariant `Ψ` on them, a quadrature check of `α(γ) = ∫_0^ℓ F dt` along a
//! lifted closed orbit, and opposite-sign certificates of non-properness.

use std::cmp::Ordering;
use std::collections::HashSet;

use nalgebra::{DMatrix, DVector};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::freegrp::{conj_class, enumerate_classes, ConjClass, Word};
use crate::lie::Mobius;
use crate::margulis::{Cocycle, DeformationSpace, ALPHA_ZERO_TOL};
use crate::symrep::sym_power;

/// Tolerance on the total mass of a current.
pub const WEIGHT_SUM_TOL: f64 = 1e-12;
/// Fewest midpoint steps accepted by [`quadrature_check`].
pub const MIN_STEPS: usize = 100;

/// A convex combination of closed-orbit currents `Σ w_i μ_{γ_i}`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FiniteCurrent {
    atoms: Vec<(ConjClass, f64)>,
}

impl FiniteCurrent {
    pub fn new(atoms: Vec<(ConjClass, f64)>) -> Result<Self> {
        if atoms.is_empty() {
            return Err(Error::InvalidArgument(
                "a current needs at least one atom".into(),
            ));
        }
        if let Some((c, w)) = atoms.iter().find(|(_, w)| !w.is_finite() || *w < 0.0) {
            return Err(Error::InvalidArgument(format!(
                "negative weight {w} on {c}"
            )));
        }
        let total: f64 = atoms.iter().map(|(_, w)| w).sum();
        if (total - 1.0).abs() > WEIGHT_SUM_TOL {
            return Err(Error::InvalidArgument(format!(
                "weights sum to {total}, expected 1"
            )));
        }
        let mut seen = HashSet::new();
        if let Some((c, _)) = atoms.iter().find(|(c, _)| !seen.insert(c.clone())) {
            return Err(Error::InvalidArgument(format!("atom {c} listed twice")));
        }
        Ok(Self { atoms })
    }

    /// Builds a current from words, reducing each to its conjugacy class.
    pub fn from_words(atoms: Vec<(Word, f64)>) -> Result<Self> {
        let atoms = atoms
            .into_iter()
            .map(|(w, weight)| Ok((conj_class(&w)?, weight)))
            .collect::<Result<Vec<_>>>()?;
        Self::new(atoms)
    }

    pub fn singleton(class: ConjClass) -> Self {
        Self {
            atoms: vec![(class, 1.0)],
        }
    }

    /// `t μ₁ + (1 - t) μ₂` for two distinct classes.
    pub fn mix(c1: ConjClass, c2: ConjClass, t: f64) -> Result<Self> {
        if !(0.0..=1.0).contains(&t) {
            return Err(Error::InvalidArgument(format!(
                "mixing weight {t} outside [0, 1]"
            )));
        }
        Self::new(vec![(c1, t), (c2, 1.0 - t)])
    }

    pub fn atoms(&self) -> &[(ConjClass, f64)] {
        &self.atoms
    }
}

/// On-disk form: `{ "atoms": [{"word": "ab", "weight": 0.5}, …] }`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CurrentFile {
    pub atoms: Vec<AtomRecord>,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct AtomRecord {
    pub word: Word,
    pub weight: f64,
}

impl TryFrom<CurrentFile> for FiniteCurrent {
    type Error = Error;

    fn try_from(f: CurrentFile) -> Result<Self> {
        Self::from_words(f.atoms.into_iter().map(|a| (a.word, a.weight)).collect())
    }
}

impl From<&FiniteCurrent> for CurrentFile {
    fn from(c: &FiniteCurrent) -> Self {
        CurrentFile {
            atoms: c
                .atoms
                .iter()
                .map(|(c, w)| AtomRecord {
                    word: c.rep().clone(),
                    weight: *w,
                })
                .collect(),
        }
    }
}

/// `Ψ_u(μ) = Σ w_i α_u(γ_i)/ℓ(γ_i)`.
pub fn psi(space: &DeformationSpace, u: &Cocycle, mu: &FiniteCurrent) -> Result<f64> {
    mu.atoms.iter().try_fold(0.0, |acc, (c, w)| {
        let alpha = space.alpha(u, c.rep())?;
        Ok(acc + w * alpha / space.length(c.rep())?)
    })
}

/// A lift `ṽ : [0, T] → V` of a section along the closed orbit of `γ`,
/// interpolating from `p` to `ρ(γ)p + u(γ)` with a smoothstep profile.
///
/// Values are stored in the frame `ρ(g)` adapted to the axis of `γ`
/// (`g⁻¹γg` diagonal, `ρ(g)e_r = x⁰(γ)`), where the holonomy is diagonal and
/// the neutral section is the constant `e_r`. In the ambient basis the
/// expanding part of `ρ(γ)p` is of size `e^ℓ|p|`, which would swamp `F` with
/// rounding. The neutral coordinate of `u(γ)` is taken from the stable
/// rotation sum for the same reason.
#[derive(Clone, Debug)]
pub struct OrbitSegment {
    pub word: Word,
    pub period: f64,
    frame: DMatrix<f64>,
    holonomy: DVector<f64>,
    start: DVector<f64>,
    end: DVector<f64>,
}

fn smoothstep(tau: f64) -> f64 {
    tau * tau * (3.0 - 2.0 * tau)
}

fn smoothstep_slope(tau: f64) -> f64 {
    6.0 * tau * (1.0 - tau)
}

impl OrbitSegment {
    /// `p` is the starting value in the adapted frame.
    pub fn new(space: &DeformationSpace, u: &Cocycle, w: &Word, p: &DVector<f64>) -> Result<Self> {
        if p.len() != space.dim() {
            return Err(Error::DimMismatch {
                expected: space.dim(),
                got: p.len(),
            });
        }
        let gamma = space.element(w)?;
        let h = gamma.hyperbolic_data()?;
        let s = h.orientation().sqrt();
        let (vm, vp) = (h.v_minus, h.v_plus);
        let g = Mobius::new(vm[0] / s, vp[0] / s, vm[1] / s, vp[1] / s)?;
        let [a, ..] = (g.inverse() * gamma * g).entries();
        let r = space.rep().r();
        let holonomy = sym_power(&Mobius::diagonal(a), r).diagonal();
        let frame = space.rep().matrix(&g);

        let mut shift = space.rep().matrix(&g.inverse()) * space.evaluate_cocycle(u, w)?;
        shift[r] = space.alpha(u, w)?;
        let end = holonomy.component_mul(p) + shift;
        Ok(Self {
            word: w.clone(),
            period: h.length,
            frame,
            holonomy,
            start: p.clone(),
            end,
        })
    }

    /// Start value in the adapted frame.
    pub fn start(&self) -> &DVector<f64> {
        &self.start
    }

    /// End value in the adapted frame.
    pub fn end(&self) -> &DVector<f64> {
        &self.end
    }

    /// Diagonal of `ρ(γ)` in the adapted frame.
    pub fn holonomy(&self) -> &DVector<f64> {
        &self.holonomy
    }

    /// `ρ(g)`, mapping adapted coordinates to the monomial basis.
    pub fn frame(&self) -> &DMatrix<f64> {
        &self.frame
    }

    pub fn value(&self, t: f64) -> DVector<f64> {
        let s = smoothstep(t / self.period);
        &self.start * (1.0 - s) + &self.end * s
    }

    pub fn derivative(&self, t: f64) -> DVector<f64> {
        (&self.end - &self.start) * (smoothstep_slope(t / self.period) / self.period)
    }

    /// `ṽ(t)` in the monomial basis of `V_r`.
    pub fn ambient_value(&self, t: f64) -> DVector<f64> {
        &self.frame * self.value(t)
    }

    /// `n + 1` equally spaced values `ṽ(kT/n)`, adapted frame.
    pub fn samples(&self, n: usize) -> Vec<DVector<f64>> {
        (0..=n)
            .map(|k| self.value(self.period * k as f64 / n as f64))
            .collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Quadrature {
    /// Midpoint-rule value of `∫_0^ℓ B(dṽ/dt, x⁰(γ)) dt`.
    pub numeric: f64,
    pub exact: f64,
    pub abs_err: f64,
}

/// Integrates `F = B(dṽ/dt, x⁰(γ))` over one period with `n_steps`
/// midpoint steps and compares with `α_u(γ)`.
pub fn quadrature_check(
    space: &DeformationSpace,
    u: &Cocycle,
    w: &Word,
    n_steps: usize,
    p: &DVector<f64>,
) -> Result<Quadrature> {
    if n_steps < MIN_STEPS {
        return Err(Error::InvalidArgument(format!(
            "need at least {MIN_STEPS} steps, got {n_steps}"
        )));
    }
    let seg = OrbitSegment::new(space, u, w, p)?;
    // the neutral section is e_r in the adapted frame
    let r = space.rep().r();
    let qx0: DVector<f64> = space.rep().form().column(r).into_owned();
    let h = seg.period / n_steps as f64;
    let numeric: f64 = (0..n_steps)
        .map(|k| seg.derivative((k as f64 + 0.5) * h).dot(&qx0))
        .sum::<f64>()
        * h;
    let exact = space.alpha(u, w)?;
    Ok(Quadrature {
        numeric,
        exact,
        abs_err: (numeric - exact).abs(),
    })
}

/// Two classes on which `α_u` takes strictly opposite signs.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct OppositeSign {
    pub negative: ConjClass,
    pub positive: ConjClass,
    pub alpha_negative: f64,
    pub alpha_positive: f64,
}

/// Scans classes of length `≤ max_len` in graded order and returns the
/// first class with `α < -tol` together with the first with `α > tol`.
pub fn opposite_sign_certificate(
    space: &DeformationSpace,
    u: &Cocycle,
    max_len: usize,
) -> Result<Option<OppositeSign>> {
    let mut neg: Option<(ConjClass, f64)> = None;
    let mut pos: Option<(ConjClass, f64)> = None;
    for c in enumerate_classes(space.rank(), max_len) {
        let a = space.alpha(u, c.rep())?;
        if a < -ALPHA_ZERO_TOL && neg.is_none() {
            neg = Some((c, a));
        } else if a > ALPHA_ZERO_TOL && pos.is_none() {
            pos = Some((c, a));
        }
        if let (Some((n, an)), Some((p, ap))) = (&neg, &pos) {
            return Ok(Some(OppositeSign {
                negative: n.clone(),
                positive: p.clone(),
                alpha_negative: *an,
                alpha_positive: *ap,
            }));
        }
    }
    Ok(None)
}

/// The convex combination `t μ₁ + (1-t) μ₂` on which `Ψ_u` vanishes.
pub fn zero_current(
    space: &DeformationSpace,
    u: &Cocycle,
    c1: &ConjClass,
    c2: &ConjClass,
) -> Result<FiniteCurrent> {
    let p1 = psi(space, u, &FiniteCurrent::singleton(c1.clone()))?;
    let p2 = psi(space, u, &FiniteCurrent::singleton(c2.clone()))?;
    if (p1 * p2).partial_cmp(&0.0) != Some(Ordering::Less) {
        return Err(Error::SameSign(p1, p2));
    }
    let t = p2 / (p2 - p1);
    FiniteCurrent::mix(c1.clone(), c2.clone(), t)
}

/// Explicit `C` with `|α_u(γ)| ≤ C ℓ(γ)` for every hyperbolic `γ`.
///
/// Each term of the rotation sum is bounded by `‖Q u(g_i)‖·‖x⁰‖`, the
/// neutral vector of a cyclically reduced word has norm at most
/// `2^r / sin^r(gap)` (its fixed points lie in distinct certificate arcs),
/// and a word of length `n` has `ℓ ≥ -n ln κ`. `None` when `κ ≥ 1`.
pub fn growth_constant(space: &DeformationSpace, u: &Cocycle) -> Option<f64> {
    let group = space.group();
    let kappa = group.contraction_rate();
    let gap = group.arc_gap();
    if kappa.partial_cmp(&1.0) != Some(Ordering::Less)
        || gap.partial_cmp(&0.0) != Some(Ordering::Greater)
    {
        return None;
    }
    let r = space.rep().r() as i32;
    let q = space.rep().form();
    let max_qu = u
        .values()
        .iter()
        .map(|v| (q * v).norm())
        .fold(0.0, f64::max);
    let neutral_bound = 2f64.powi(r) / gap.min(std::f64::consts::FRAC_PI_2).sin().powi(r);
    Some(max_qu * neutral_bound / -kappa.ln())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::schottky::SchottkyGroup;

    fn space() -> DeformationSpace {
        DeformationSpace::new(SchottkyGroup::three_holed_sphere(4.0, 4.0).unwrap(), 1).unwrap()
    }

    fn cls(s: &str) -> ConjClass {
        conj_class(&s.parse().unwrap()).unwrap()
    }

    #[test]
    fn current_validation() {
        assert!(FiniteCurrent::new(vec![]).is_err());
        assert!(FiniteCurrent::new(vec![(cls("a"), 0.5)]).is_err());
        assert!(FiniteCurrent::new(vec![(cls("a"), 1.5), (cls("b"), -0.5)]).is_err());
        assert!(FiniteCurrent::new(vec![(cls("ab"), 0.5), (cls("ba"), 0.5)]).is_err());
        assert!(FiniteCurrent::new(vec![(cls("ab"), 0.5), (cls("aB"), 0.5)]).is_ok());
    }

    #[test]
    fn current_file_roundtrip() {
        let f: CurrentFile = serde_json::from_str(
            r#"{"atoms":[{"word":"ba","weight":0.25},{"word":"b","weight":0.75}]}"#,
        )
        .unwrap();
        let c = FiniteCurrent::try_from(f).unwrap();
        assert_eq!(c.atoms()[0].0.to_string(), "ab");
    }

    #[test]
    fn opposite_sign_from_boundary_alignment() {
        let s = space();
        let x1 = s.neutral_vector(&"a".parse().unwrap()).unwrap();
        let x2 = s.neutral_vector(&"b".parse().unwrap()).unwrap();
        let u = s.cocycle(vec![x1, -x2]).unwrap();
        let cert = opposite_sign_certificate(&s, &u, 1).unwrap().unwrap();
        assert_eq!(cert.positive.to_string(), "a");
        assert_eq!(cert.negative.to_string(), "b");
        assert!((cert.alpha_positive - 1.0).abs() < 1e-9);
        let z = zero_current(&s, &u, &cert.negative, &cert.positive).unwrap();
        assert!((z.atoms()[0].1 - 0.5).abs() < 1e-12);
        assert!(psi(&s, &u, &z).unwrap().abs() < 1e-10);
    }

    #[test]
    fn same_sign_rejected() {
        let s = space();
        let x1 = s.neutral_vector(&"a".parse().unwrap()).unwrap();
        let x2 = s.neutral_vector(&"b".parse().unwrap()).unwrap();
        let u = s.cocycle(vec![x1, x2]).unwrap();
        assert!(matches!(
            zero_current(&s, &u, &cls("a"), &cls("b")),
            Err(Error::SameSign(..))
        ));
    }

    #[test]
    fn quadrature_needs_steps() {
        let s = space();
        let u = s.zero_cocycle();
        let p = DVector::zeros(3);
        assert!(quadrature_check(&s, &u, &"a".parse().unwrap(), 99, &p).is_err());
        let q = quadrature_check(&s, &u, &"a".parse().unwrap(), 100, &p).unwrap();
        assert_eq!(q.numeric, 0.0);
    }

    #[test]
    fn segment_boundary_values() {
        let s = space();
        let x1 = s.neutral_vector(&"a".parse().unwrap()).unwrap();
        let u = s.cocycle(vec![x1.clone(), x1 * 2.0]).unwrap();
        let w: Word = "aB".parse().unwrap();
        let p = DVector::from_vec(vec![0.3, -0.1, 0.7]);
        let seg = OrbitSegment::new(&s, &u, &w, &p).unwrap();
        let v0 = seg.ambient_value(0.0);
        let end = s.rho(&w).unwrap() * &v0 + s.evaluate_cocycle(&u, &w).unwrap();
        let v1 = seg.ambient_value(seg.period);
        assert!(
            (&v1 - &end).amax() < 1e-12 * end.amax().max(1.0),
            "{}",
            (&v1 - &end).amax()
        );
        assert!((seg.value(0.0) - p).amax() == 0.0);
        let x0 = s.neutral_vector(&w).unwrap();
        assert!((seg.frame().column(1) - x0).amax() < 1e-12);
        assert_eq!(seg.samples(4).len(), 5);
    }
}
