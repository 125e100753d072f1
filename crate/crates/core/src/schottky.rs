//! Schottky subgroups of PSL(2,R) certified by the ping-pong lemma.
//!
//! A certificate is a family of pairwise disjoint closed arcs
//! `I₁⁻, I₁⁺, …, I_k⁻, I_k⁺` of RP¹ such that `g_i` maps the exterior of
//! `I_i⁻` into the interior of `I_i⁺` (and `g_i⁻¹` the exterior of `I_i⁺`
//! into `I_i⁻`). Arcs are centered at the repelling and attracting fixed
//! points. The search is sound but not complete: a failed search does not
//! prove the group is not Schottky.

use std::f64::consts::PI;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::freegrp::{enumerate_classes, Letter, Word};
use crate::lie::{projective_distance, Mobius};

/// Minimal slack, in radians, required in every inclusion and between arcs.
pub const MIN_MARGIN: f64 = 1e-6;
const BISECTION_STEPS: usize = 100;
const SAMPLES_PER_ARC: usize = 64;

/// A closed arc of RP¹ given by its center angle and half-width.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Arc {
    pub center: f64,
    pub radius: f64,
}

impl Arc {
    pub fn start(&self) -> f64 {
        (self.center - self.radius).rem_euclid(PI)
    }

    /// Signed distance of `theta` to the complement: positive inside.
    pub fn depth(&self, theta: f64) -> f64 {
        self.radius - projective_distance(theta, self.center)
    }

    pub fn gap_to(&self, other: &Arc) -> f64 {
        projective_distance(self.center, other.center) - self.radius - other.radius
    }
}

/// Ping-pong arcs attached to one generator.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct ArcPair {
    /// Around the repelling fixed point.
    pub minus: Arc,
    /// Around the attracting fixed point.
    pub plus: Arc,
}

#[derive(Clone, Debug, Serialize)]
pub struct SchottkyGroup {
    generators: Vec<Mobius>,
    arcs: Vec<ArcPair>,
    margin: f64,
    /// Boundary words of the quotient surface when known (presets).
    boundary: Vec<Word>,
    name: Option<String>,
}

impl SchottkyGroup {
    /// Certifies a group from `k ≥ 2` hyperbolic generators.
    pub fn from_generators(generators: Vec<Mobius>) -> Result<Self> {
        if generators.len() < 2 {
            return Err(Error::InvalidArgument(format!(
                "a Schottky group needs at least 2 generators, got {}",
                generators.len()
            )));
        }
        for (index, g) in generators.iter().enumerate() {
            if !g.is_hyperbolic() {
                return Err(Error::NotHyperbolicGenerator { index });
            }
        }
        let (arcs, margin) = certify(&generators)?;
        Ok(Self {
            generators,
            arcs,
            margin,
            boundary: Vec::new(),
            name: None,
        })
    }

    /// Rank-2 group whose quotient is a three-holed sphere with boundary
    /// geodesics `g₁`, `g₂` and `(g₁g₂)⁻¹` of lengths `l1`, `l2` and a third
    /// length starting at `max(l1, l2)`, enlarged until a certificate exists.
    pub fn three_holed_sphere(l1: f64, l2: f64) -> Result<Self> {
        check_lengths(&[l1, l2])?;
        let mut l3 = l1.max(l2);
        let mut last_err = None;
        for _ in 0..8 {
            match Self::three_holed_sphere_with_third(l1, l2, l3) {
                Ok(g) => return Ok(g),
                Err(e @ Error::NoPingPongCertificate { .. }) => last_err = Some(e),
                Err(e) => return Err(e),
            }
            l3 *= 1.5;
        }
        Err(last_err.expect("at least one attempt"))
    }

    /// Three-holed sphere with prescribed boundary lengths. The axes of `g₁`
    /// and `g₂` are disjoint, at the distance given by the right-angled
    /// hexagon relation.
    pub fn three_holed_sphere_with_third(l1: f64, l2: f64, l3: f64) -> Result<Self> {
        check_lengths(&[l1, l2, l3])?;
        let (h1, h2, h3) = (l1 / 2.0, l2 / 2.0, l3 / 2.0);
        let cosh_d = (h3.cosh() + h1.cosh() * h2.cosh()) / (h1.sinh() * h2.sinh());
        let d = cosh_d.acosh();
        let g1 = Mobius::one_parameter(l1);
        // reversed orientation makes g₁g₂ (rather than g₁g₂⁻¹) a boundary curve
        let g2 = Mobius::one_parameter(-l2).conjugate_by(&Mobius::cross_translation(d));
        let mut group = Self::from_generators(vec![g1, g2]).map_err(|e| match e {
            Error::NoPingPongCertificate { reason } => Error::NoPingPongCertificate {
                reason: format!("three-holed sphere ({l1}, {l2}, {l3}): {reason}"),
            },
            e => e,
        })?;
        for w in enumerate_classes(2, 2) {
            if !group.element(w.rep())?.is_hyperbolic() {
                return Err(Error::NotHyperbolic {
                    trace_abs: group.element(w.rep())?.trace().abs(),
                });
            }
        }
        group.boundary = ["a", "b", "BA"]
            .iter()
            .map(|s| s.parse().expect("literal"))
            .collect();
        group.name = Some("three_holed_sphere".into());
        Ok(group)
    }

    /// Rank-2 group with crossing axes meeting at angle `twist`; the
    /// quotient is a one-holed torus with boundary the commutator.
    pub fn one_holed_torus(l1: f64, l2: f64, twist: f64) -> Result<Self> {
        check_lengths(&[l1, l2])?;
        let g1 = Mobius::one_parameter(l1);
        let g2 = Mobius::one_parameter(l2).conjugate_by(&Mobius::rotation(twist / 2.0));
        let mut group = Self::from_generators(vec![g1, g2])?;
        for c in enumerate_classes(2, 6) {
            let m = group.element(c.rep())?;
            if !m.is_hyperbolic() {
                return Err(Error::NotHyperbolic {
                    trace_abs: m.trace().abs(),
                });
            }
        }
        group.boundary = vec!["abAB".parse().expect("literal")];
        group.name = Some("one_holed_torus".into());
        Ok(group)
    }

    pub fn rank(&self) -> usize {
        self.generators.len()
    }

    pub fn generators(&self) -> &[Mobius] {
        &self.generators
    }

    pub fn arcs(&self) -> &[ArcPair] {
        &self.arcs
    }

    /// Smallest slack of the certificate (inclusions and arc gaps).
    pub fn margin(&self) -> f64 {
        self.margin
    }

    pub fn boundary_words(&self) -> &[Word] {
        &self.boundary
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn generator(&self, l: Letter) -> Result<Mobius> {
        let g = self.generators.get(l.generator).ok_or(Error::BadIndex {
            index: l.generator,
            rank: self.rank(),
        })?;
        Ok(if l.inverse { g.inverse() } else { *g })
    }

    /// Left-to-right product of the letters of `w`.
    pub fn element(&self, w: &Word) -> Result<Mobius> {
        w.letters()
            .iter()
            .try_fold(Mobius::identity(), |acc, &l| Ok(acc * self.generator(l)?))
    }

    /// The arc `I⁺(l)` into which letter `l` maps the exterior of `I⁻(l)`.
    pub fn attracting_arc(&self, l: Letter) -> Arc {
        let p = self.arcs[l.generator];
        if l.inverse {
            p.minus
        } else {
            p.plus
        }
    }

    /// Smallest distance between two distinct certificate arcs.
    pub fn arc_gap(&self) -> f64 {
        let all: Vec<Arc> = self.arcs.iter().flat_map(|p| [p.minus, p.plus]).collect();
        let mut gap = f64::INFINITY;
        for i in 0..all.len() {
            for j in i + 1..all.len() {
                gap = gap.min(all[i].gap_to(&all[j]));
            }
        }
        gap
    }

    /// Supremum of the circle derivative of every letter on the exterior of
    /// its repelling arc. Below 1, every cyclically reduced word of length
    /// `n` has translation length at least `-n·ln κ`.
    pub fn contraction_rate(&self) -> f64 {
        let mut kappa: f64 = 0.0;
        for (i, p) in self.arcs.iter().enumerate() {
            let g = self.generators[i];
            kappa = kappa.max(max_derivative_outside(&g, &p.minus));
            kappa = kappa.max(max_derivative_outside(&g.inverse(), &p.plus));
        }
        kappa
    }
}

fn check_lengths(ls: &[f64]) -> Result<()> {
    if ls.iter().all(|l| l.is_finite() && *l > 0.0) {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "lengths must be positive, got {ls:?}"
        )))
    }
}

/// How deep `g` maps the exterior of the arc of half-width `rho` around
/// `rep` inside the arc of the same half-width around `att`. Negative when
/// the inclusion fails.
fn inclusion_slack(g: &Mobius, att: f64, rep: f64, rho: f64) -> f64 {
    let start = att - rho;
    let x = (g.act_on_angle(rep + rho) - start).rem_euclid(PI);
    let y = (g.act_on_angle(rep + PI - rho) - start).rem_euclid(PI);
    if x > y {
        return -1.0;
    }
    x.min(2.0 * rho - y)
}

fn generator_slack(g: &Mobius, fixed: (f64, f64), rho: f64) -> f64 {
    let (att, rep) = fixed;
    inclusion_slack(g, att, rep, rho).min(inclusion_slack(&g.inverse(), rep, att, rho))
}

fn certify(generators: &[Mobius]) -> Result<(Vec<ArcPair>, f64)> {
    let fixed: Vec<(f64, f64)> = generators
        .iter()
        .map(|g| g.fixed_points_on_circle())
        .collect::<Result<_>>()?;

    // smallest half-width for which each generator's inclusions hold
    let mut min_radius = Vec::with_capacity(generators.len());
    for (i, g) in generators.iter().enumerate() {
        let (mut lo, mut hi) = (0.0, PI / 2.0 - MIN_MARGIN);
        if generator_slack(g, fixed[i], hi) < MIN_MARGIN {
            return Err(Error::NoPingPongCertificate {
                reason: format!(
                    "generator {} cannot map the exterior of I_{}^- into I_{}^+",
                    i + 1,
                    i + 1,
                    i + 1
                ),
            });
        }
        for _ in 0..BISECTION_STEPS {
            let mid = 0.5 * (lo + hi);
            if generator_slack(g, fixed[i], mid) >= MIN_MARGIN {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        min_radius.push(hi);
    }

    let arcs_at = |extra: f64| -> Vec<ArcPair> {
        fixed
            .iter()
            .zip(&min_radius)
            .map(|(&(att, rep), &rho)| ArcPair {
                minus: Arc {
                    center: rep,
                    radius: rho + extra,
                },
                plus: Arc {
                    center: att,
                    radius: rho + extra,
                },
            })
            .collect()
    };
    let gap = |arcs: &[ArcPair]| -> (f64, String) {
        let all: Vec<(Arc, String)> = arcs
            .iter()
            .enumerate()
            .flat_map(|(i, p)| {
                [
                    (p.minus, format!("I_{}^-", i + 1)),
                    (p.plus, format!("I_{}^+", i + 1)),
                ]
            })
            .collect();
        let mut worst = (f64::INFINITY, String::new());
        for i in 0..all.len() {
            for j in i + 1..all.len() {
                let g = all[i].0.gap_to(&all[j].0);
                if g < worst.0 {
                    worst = (g, format!("{} and {}", all[i].1, all[j].1));
                }
            }
        }
        worst
    };
    let slack = |extra: f64| -> f64 {
        generators
            .iter()
            .enumerate()
            .map(|(i, g)| generator_slack(g, fixed[i], min_radius[i] + extra))
            .fold(f64::INFINITY, f64::min)
    };

    let (gap0, pair) = gap(&arcs_at(0.0));
    if gap0 < MIN_MARGIN {
        return Err(Error::NoPingPongCertificate {
            reason: format!("arcs {pair} overlap at the smallest radii satisfying the inclusions (gap {gap0:.3e})"),
        });
    }

    // balance inclusion slack against the gap between arcs
    let (mut lo, mut hi) = (0.0, gap0 / 2.0);
    for _ in 0..BISECTION_STEPS {
        let mid = 0.5 * (lo + hi);
        if slack(mid) < gap(&arcs_at(mid)).0 {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let arcs = arcs_at(lo);
    let margin = slack(lo).min(gap(&arcs).0);
    if margin < MIN_MARGIN {
        return Err(Error::NoPingPongCertificate {
            reason: format!("certificate margin {margin:.3e} below {MIN_MARGIN:e}"),
        });
    }
    verify_by_sampling(generators, &arcs)?;
    Ok((arcs, margin))
}

/// Independent check of the inclusions on a dense sample of each exterior.
fn verify_by_sampling(generators: &[Mobius], arcs: &[ArcPair]) -> Result<()> {
    for (i, (g, p)) in generators.iter().zip(arcs).enumerate() {
        for (map, from, to, label) in [
            (*g, p.minus, p.plus, "+"),
            (g.inverse(), p.plus, p.minus, "-"),
        ] {
            let span = PI - 2.0 * from.radius;
            for s in 0..=SAMPLES_PER_ARC {
                let theta = from.center + from.radius + span * s as f64 / SAMPLES_PER_ARC as f64;
                if to.depth(map.act_on_angle(theta)) <= 0.0 {
                    return Err(Error::NoPingPongCertificate {
                        reason: format!("sampled point escapes I_{}^{label}", i + 1),
                    });
                }
            }
        }
    }
    Ok(())
}

/// `sup 1/|g e(θ)|²` over the exterior of `arc`, exactly: `|g e(θ)|²` is a
/// sinusoid in `2θ`, so its minimum is at an endpoint or at the critical
/// angle.
fn max_derivative_outside(g: &Mobius, arc: &Arc) -> f64 {
    let [a, b, c, d] = g.entries();
    let (p, q, s) = (a * a + c * c, a * b + c * d, b * b + d * d);
    let mean = 0.5 * (p + s);
    let amp = (0.5 * (p - s)).hypot(q);
    let phase = q.atan2(0.5 * (p - s));
    let stretch = |theta: f64| mean + amp * (2.0 * theta - phase).cos();

    let start = arc.center + arc.radius;
    let len = PI - 2.0 * arc.radius;
    let mut min = stretch(start).min(stretch(start + len));
    let critical = 0.5 * (phase + PI);
    if (critical - start).rem_euclid(PI) <= len {
        min = min.min(mean - amp);
    }
    g.det() / min
}
