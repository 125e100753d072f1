//! Planar slices of a three-dimensional polyhedral cone.

use nalgebra::Vector3;
use serde::Serialize;

/// Half-width of the clipping box that stands in for unbounded slices.
pub const CLIP_BOX: f64 = 1e6;

/// A convex polygon with counterclockwise vertices (possibly empty).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Polygon {
    pub vertices: Vec<[f64; 2]>,
}

impl Polygon {
    pub fn square(half: f64) -> Self {
        Self {
            vertices: vec![[-half, -half], [half, -half], [half, half], [-half, half]],
        }
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.len() < 3
    }

    /// Shoelace area, positive for counterclockwise order.
    pub fn area(&self) -> f64 {
        let v = &self.vertices;
        if v.len() < 3 {
            return 0.0;
        }
        let mut s = 0.0;
        for i in 0..v.len() {
            let (p, q) = (v[i], v[(i + 1) % v.len()]);
            s += p[0] * q[1] - q[0] * p[1];
        }
        0.5 * s
    }

    /// Keeps the part where `a·x + b·y + c ≥ 0` (Sutherland–Hodgman step).
    pub fn clip(&self, a: f64, b: f64, c: f64) -> Polygon {
        let v = &self.vertices;
        let n = v.len();
        let side = |p: [f64; 2]| a * p[0] + b * p[1] + c;
        let mut out = Vec::with_capacity(n + 1);
        for i in 0..n {
            let (p, q) = (v[i], v[(i + 1) % n]);
            let (sp, sq) = (side(p), side(q));
            if sp >= 0.0 {
                out.push(p);
            }
            if (sp >= 0.0) != (sq >= 0.0) {
                let t = sp / (sp - sq);
                out.push([p[0] + t * (q[0] - p[0]), p[1] + t * (q[1] - p[1])]);
            }
        }
        dedup_close(&mut out);
        Polygon { vertices: out }
    }
}

fn dedup_close(v: &mut Vec<[f64; 2]>) {
    let tol = 1e-12 * CLIP_BOX;
    v.dedup_by(|p, q| (p[0] - q[0]).abs() <= tol && (p[1] - q[1]).abs() <= tol);
    while v.len() > 1 {
        let (f, l) = (v[0], v[v.len() - 1]);
        if (f[0] - l[0]).abs() <= tol && (f[1] - l[1]).abs() <= tol {
            v.pop();
        } else {
            break;
        }
    }
}

/// Affine chart `(s, t) ↦ p₀ + s e₁ + t e₂` of the plane `⟨f₀, x⟩ = 1`.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PlaneChart {
    pub origin: [f64; 3],
    pub e1: [f64; 3],
    pub e2: [f64; 3],
}

impl PlaneChart {
    pub fn new(f0: &Vector3<f64>) -> Self {
        let n2 = f0.norm_squared();
        let origin = f0 / n2;
        let unit = f0 / n2.sqrt();
        // the coordinate axis least aligned with f₀
        let k = (0..3)
            .min_by(|&i, &j| unit[i].abs().total_cmp(&unit[j].abs()))
            .expect("three axes");
        let mut axis = Vector3::zeros();
        axis[k] = 1.0;
        let e1 = (axis - unit * unit.dot(&axis)).normalize();
        let e2 = unit.cross(&e1);
        Self {
            origin: origin.into(),
            e1: e1.into(),
            e2: e2.into(),
        }
    }

    pub fn lift(&self, p: [f64; 2]) -> Vector3<f64> {
        Vector3::from(self.origin) + Vector3::from(self.e1) * p[0] + Vector3::from(self.e2) * p[1]
    }

    /// Coefficients `(a, b, c)` of `⟨f, lift(s, t)⟩ = a s + b t + c`.
    pub fn restrict(&self, f: &Vector3<f64>) -> (f64, f64, f64) {
        let v = |p: [f64; 3]| Vector3::from(p);
        (
            f.dot(&v(self.e1)),
            f.dot(&v(self.e2)),
            f.dot(&v(self.origin)),
        )
    }
}

/// Slice of `{x : ⟨f_i, x⟩ ≥ 0 ∀i}` by the plane `⟨f₀, x⟩ = 1`, clipped to
/// the box of half-width [`CLIP_BOX`] in the chart.
pub fn slice(f0: &Vector3<f64>, others: &[Vector3<f64>]) -> (PlaneChart, Polygon) {
    let chart = PlaneChart::new(f0);
    let mut poly = Polygon::square(CLIP_BOX);
    for f in others {
        if poly.is_empty() {
            break;
        }
        let (a, b, c) = chart.restrict(f);
        poly = poly.clip(a, b, c);
    }
    if poly.is_empty() {
        poly.vertices.clear();
    }
    (chart, poly)
}
