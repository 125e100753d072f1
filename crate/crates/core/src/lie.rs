//! Elements of SL(2,R) taken modulo ±Id, their classification and the
//! eigendata of hyperbolic elements.
//!
//! A [`Mobius`] is stored as a 2×2 matrix `(a, b; c, d)` whose first
//! nonzero entry is positive. Products are canonicalized the same way, so
//! two representatives of one PSL(2,R) element compare equal.
//!
//! The projective line RP¹ is parametrized by the angle of a direction in
//! `[0, π)`. A matrix acts on directions linearly; for positive determinant
//! this action preserves the cyclic order of the circle.

use std::f64::consts::PI;
use std::fmt;
use std::ops::Mul;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tolerance on `||tr| - 2|` separating hyperbolic, parabolic and elliptic.
pub const PARABOLIC_TOL: f64 = 1e-9;
/// Tolerance on `|det - 1|` accepted by [`Mobius::new`].
pub const DET_TOL: f64 = 1e-9;
/// Tolerance of the translation length cross-check against the trace.
pub const LENGTH_CHECK_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Classification {
    Hyperbolic,
    Parabolic,
    Elliptic,
}

/// A PSL(2,R) element in canonical SL(2,R) form.
#[derive(Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "[f64; 4]", into = "[f64; 4]")]
pub struct Mobius {
    a: f64,
    b: f64,
    c: f64,
    d: f64,
}

impl fmt::Debug for Mobius {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Mobius[{}, {}; {}, {}]", self.a, self.b, self.c, self.d)
    }
}

impl TryFrom<[f64; 4]> for Mobius {
    type Error = Error;

    fn try_from(e: [f64; 4]) -> Result<Self> {
        Mobius::new(e[0], e[1], e[2], e[3])
    }
}

impl From<Mobius> for [f64; 4] {
    fn from(m: Mobius) -> Self {
        m.entries()
    }
}

impl Mobius {
    /// Builds an element from row-major entries, checking `det = 1`.
    pub fn new(a: f64, b: f64, c: f64, d: f64) -> Result<Self> {
        let det = a * d - b * c;
        if !det.is_finite() || (det - 1.0).abs() > DET_TOL {
            return Err(Error::NotUnimodular { det });
        }
        Ok(Self::canonical(a, b, c, d))
    }

    /// Canonical form without the determinant check. Used for products,
    /// whose determinant drifts with the size of the entries.
    fn canonical(a: f64, b: f64, c: f64, d: f64) -> Self {
        let first = [a, b, c, d].into_iter().find(|x| *x != 0.0).unwrap_or(1.0);
        if first < 0.0 {
            Self {
                a: -a,
                b: -b,
                c: -c,
                d: -d,
            }
        } else {
            Self { a, b, c, d }
        }
    }

    pub fn identity() -> Self {
        Self::canonical(1.0, 0.0, 0.0, 1.0)
    }

    /// `diag(s, 1/s)`.
    pub fn diagonal(s: f64) -> Self {
        Self::canonical(s, 0.0, 0.0, 1.0 / s)
    }

    /// The standard one-parameter element `diag(e^{t/2}, e^{-t/2})`,
    /// translating by `|t|` along its axis.
    pub fn one_parameter(t: f64) -> Self {
        Self::diagonal((t / 2.0).exp())
    }

    /// Rotation of the plane by `theta`; it rotates RP¹ angles by `theta`.
    pub fn rotation(theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        Self::canonical(c, -s, s, c)
    }

    /// Translation by `t` along the axis with endpoints `±1` in the upper
    /// half-plane, i.e. the axis perpendicular to that of
    /// [`Mobius::one_parameter`].
    pub fn cross_translation(t: f64) -> Self {
        let (ch, sh) = ((t / 2.0).cosh(), (t / 2.0).sinh());
        Self::canonical(ch, sh, sh, ch)
    }

    /// Row-major entries `[a, b, c, d]`.
    pub fn entries(&self) -> [f64; 4] {
        [self.a, self.b, self.c, self.d]
    }

    pub fn trace(&self) -> f64 {
        self.a + self.d
    }

    pub fn det(&self) -> f64 {
        self.a * self.d - self.b * self.c
    }

    /// Inverse by the adjugate; exact in floating point.
    pub fn inverse(&self) -> Self {
        Self::canonical(self.d, -self.b, -self.c, self.a)
    }

    pub fn pow(&self, n: i64) -> Self {
        let base = if n < 0 { self.inverse() } else { *self };
        let mut acc = Self::identity();
        for _ in 0..n.unsigned_abs() {
            acc = acc * base;
        }
        acc
    }

    pub fn conjugate_by(&self, w: &Mobius) -> Self {
        *w * *self * w.inverse()
    }

    pub fn apply(&self, v: [f64; 2]) -> [f64; 2] {
        [self.a * v[0] + self.b * v[1], self.c * v[0] + self.d * v[1]]
    }

    /// Action on RP¹ in the angle parametrization.
    pub fn act_on_angle(&self, theta: f64) -> f64 {
        let (s, c) = theta.sin_cos();
        projective_angle(self.apply([c, s]))
    }

    /// Derivative of the circle action at `theta`, i.e. `det / |m e(θ)|²`.
    pub fn circle_derivative(&self, theta: f64) -> f64 {
        let (s, c) = theta.sin_cos();
        let v = self.apply([c, s]);
        self.det() / (v[0] * v[0] + v[1] * v[1])
    }

    pub fn classify(&self) -> Classification {
        let t = self.trace().abs();
        if t > 2.0 + PARABOLIC_TOL {
            Classification::Hyperbolic
        } else if t < 2.0 - PARABOLIC_TOL {
            Classification::Elliptic
        } else {
            Classification::Parabolic
        }
    }

    pub fn is_hyperbolic(&self) -> bool {
        self.classify() == Classification::Hyperbolic
    }

    pub fn hyperbolic_data(&self) -> Result<HyperbolicData> {
        let t = self.trace();
        if self.classify() != Classification::Hyperbolic {
            return Err(Error::NotHyperbolic { trace_abs: t.abs() });
        }
        let sign = t.signum();
        let root = (t * t - 4.0).sqrt();
        // eigenvalue of modulus > 1 without cancellation
        let big = sign * (t.abs() + root) / 2.0;
        let small = 1.0 / big;

        let v_plus = canonical_direction(self.eigenvector(small));
        let mut v_minus = canonical_direction(self.eigenvector(big));
        if det2(v_minus, v_plus) < 0.0 {
            v_minus = [-v_minus[0], -v_minus[1]];
        }

        let length = 2.0 * big.abs().ln();
        let from_trace = 2.0 * (t.abs() / 2.0).acosh();
        if (length - from_trace).abs() > LENGTH_CHECK_TOL * length.max(1.0) {
            return Err(Error::NotHyperbolic { trace_abs: t.abs() });
        }

        Ok(HyperbolicData {
            lambda: small.abs(),
            trace_sign: sign,
            v_plus,
            v_minus,
            length,
        })
    }

    pub fn translation_length(&self) -> Result<f64> {
        self.hyperbolic_data().map(|h| h.length)
    }

    /// Attracting and repelling fixed points on RP¹ as angles in `[0, π)`.
    pub fn fixed_points_on_circle(&self) -> Result<(f64, f64)> {
        let h = self.hyperbolic_data()?;
        Ok((projective_angle(h.v_minus), projective_angle(h.v_plus)))
    }

    /// Eigenvector for a real eigenvalue `mu`, choosing the better
    /// conditioned of the two row-derived candidates.
    fn eigenvector(&self, mu: f64) -> [f64; 2] {
        let p = [self.b, mu - self.a];
        let q = [mu - self.d, self.c];
        if norm2(p) >= norm2(q) {
            p
        } else {
            q
        }
    }
}

impl Mul for Mobius {
    type Output = Mobius;

    fn mul(self, o: Mobius) -> Mobius {
        Mobius::canonical(
            self.a * o.a + self.b * o.c,
            self.a * o.b + self.b * o.d,
            self.c * o.a + self.d * o.c,
            self.c * o.b + self.d * o.d,
        )
    }
}

/// Eigendata of a hyperbolic element.
///
/// `v_plus` spans the contracting eigenline (`γ v₊ = ±λ v₊`), `v_minus` the
/// expanding one; both have unit length and `det[v₋ | v₊] > 0`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HyperbolicData {
    pub lambda: f64,
    /// Sign of the trace of the SL(2,R) representative; the eigenvalues are
    /// `trace_sign · λ^{±1}`.
    pub trace_sign: f64,
    pub v_plus: [f64; 2],
    pub v_minus: [f64; 2],
    pub length: f64,
}

impl HyperbolicData {
    /// Signed contracting eigenvalue of the stored representative.
    pub fn signed_lambda(&self) -> f64 {
        self.trace_sign * self.lambda
    }

    /// `det[v₋ | v₊]`, the sine of the angle between the eigenlines.
    pub fn orientation(&self) -> f64 {
        det2(self.v_minus, self.v_plus)
    }
}

pub(crate) fn det2(u: [f64; 2], v: [f64; 2]) -> f64 {
    u[0] * v[1] - u[1] * v[0]
}

fn norm2(v: [f64; 2]) -> f64 {
    v[0].hypot(v[1])
}

/// Unit vector whose first nonzero component is positive.
fn canonical_direction(v: [f64; 2]) -> [f64; 2] {
    let n = norm2(v);
    let mut u = [v[0] / n, v[1] / n];
    let first = if u[0] != 0.0 { u[0] } else { u[1] };
    if first < 0.0 {
        u = [-u[0], -u[1]];
    }
    u
}

/// Angle in `[0, π)` of the line spanned by `v`.
pub fn projective_angle(v: [f64; 2]) -> f64 {
    let a = v[1].atan2(v[0]).rem_euclid(PI);
    if a >= PI {
        0.0
    } else {
        a
    }
}

/// Distance between two points of RP¹ in the angle metric, in `[0, π/2]`.
pub fn projective_distance(x: f64, y: f64) -> f64 {
    let d = (x - y).rem_euclid(PI);
    d.min(PI - d)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(x: f64, y: f64, tol: f64) -> bool {
        (x - y).abs() <= tol
    }

    #[test]
    fn classification_examples() {
        assert_eq!(Mobius::diagonal(2.0).classify(), Classification::Hyperbolic);
        let p = Mobius::new(1.0, 1.0, 0.0, 1.0).unwrap();
        assert_eq!(p.classify(), Classification::Parabolic);
        assert_eq!(
            Mobius::rotation(PI / 4.0).classify(),
            Classification::Elliptic
        );
    }

    #[test]
    fn canonical_sign() {
        let m = Mobius::new(-2.0, 0.0, 0.0, -0.5).unwrap();
        assert_eq!(m, Mobius::diagonal(2.0));
        let z = Mobius::new(0.0, -1.0, 1.0, 0.0).unwrap();
        assert_eq!(z.entries(), [0.0, 1.0, -1.0, 0.0]);
    }

    #[test]
    fn rejects_non_unimodular() {
        assert!(matches!(
            Mobius::new(2.0, 0.0, 0.0, 1.0),
            Err(Error::NotUnimodular { .. })
        ));
    }

    #[test]
    fn model_element_eigendata() {
        let h = Mobius::one_parameter(1.0).hyperbolic_data().unwrap();
        assert!(close(h.lambda, (-0.5f64).exp(), 1e-15));
        assert_eq!(h.v_plus, [0.0, 1.0]);
        assert_eq!(h.v_minus, [1.0, 0.0]);
        assert!(close(h.length, 1.0, 1e-14));
        let h2 = Mobius::diagonal(2.0).hyperbolic_data().unwrap();
        assert!(close(h2.length, 2.0 * 2f64.ln(), 1e-14));
    }

    #[test]
    fn negative_trace_records_sign() {
        let m = Mobius::new(1.0, 3.0, -2.0, -5.0).unwrap();
        let h = m.hyperbolic_data().unwrap();
        assert_eq!(h.trace_sign, -1.0);
        let v = m.apply(h.v_plus);
        let l = h.signed_lambda();
        assert!(close(v[0], l * h.v_plus[0], 1e-12) && close(v[1], l * h.v_plus[1], 1e-12));
        assert!(h.orientation() > 0.0);
    }

    #[test]
    fn not_hyperbolic_error() {
        let e = Mobius::rotation(0.3).hyperbolic_data().unwrap_err();
        assert!(matches!(e, Error::NotHyperbolic { .. }));
        assert!(Mobius::rotation(0.3).fixed_points_on_circle().is_err());
    }

    #[test]
    fn fixed_points_of_diagonal_and_rotated() {
        let m = Mobius::diagonal(2.0);
        let (att, rep) = m.fixed_points_on_circle().unwrap();
        assert!(close(att, 0.0, 1e-15));
        assert!(close(rep, PI / 2.0, 1e-15));

        let theta = 0.4;
        let c = m.conjugate_by(&Mobius::rotation(theta));
        let (att2, rep2) = c.fixed_points_on_circle().unwrap();
        assert!(projective_distance(att2, theta) < 1e-12);
        assert!(projective_distance(rep2, PI / 2.0 + theta) < 1e-12);
        assert!(projective_distance(c.act_on_angle(att2), att2) < 1e-12);
    }

    #[test]
    fn inverse_swaps_eigenlines() {
        let m = Mobius::new(2.0, 1.0, 3.0, 2.0).unwrap();
        let h = m.hyperbolic_data().unwrap();
        let hi = m.inverse().hyperbolic_data().unwrap();
        assert!(det2(hi.v_plus, h.v_minus).abs() < 1e-12);
        assert!(det2(hi.v_minus, h.v_plus).abs() < 1e-12);
        assert!(close(h.length, hi.length, 1e-12));
    }

    #[test]
    fn powers_scale_length() {
        let m = Mobius::new(2.0, 1.0, 3.0, 2.0).unwrap();
        let l = m.translation_length().unwrap();
        for n in [-4i64, -1, 2, 5] {
            let ln = m.pow(n).translation_length().unwrap();
            assert!(close(ln, n.unsigned_abs() as f64 * l, 1e-8));
        }
    }

    #[test]
    fn circle_derivative_at_attracting_point() {
        let m = Mobius::diagonal(3.0).conjugate_by(&Mobius::rotation(1.1));
        let h = m.hyperbolic_data().unwrap();
        let (att, rep) = m.fixed_points_on_circle().unwrap();
        assert!(close(m.circle_derivative(att), (-h.length).exp(), 1e-12));
        assert!(close(m.circle_derivative(rep), h.length.exp(), 1e-9));
    }

    #[test]
    fn try_from_rejects_bad_det() {
        assert!(Mobius::try_from([1.0, 2.0, 3.0, 4.0]).is_err());
    }
}
