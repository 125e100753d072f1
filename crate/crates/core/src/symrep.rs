//! The irreducible representation `V_r` of PSL(2,R) on binary forms of
//! degree `2r`, its invariant symmetric form and the eigen-splitting
//! attached to a hyperbolic element.
//!
//! Basis: the monomials `x^{2r-i} y^i`, `i = 0..=2r`. A vector `w ∈ R²` is
//! identified with the linear form `w₀x + w₁y`; a matrix `m` acts by
//! `p(x, y) ↦ p((x, y)·m)`, which sends the form of `w` to the form of
//! `m w`. The symmetric product `v₋^{r-j} v₊^{r+j}` is then the product of
//! the corresponding linear forms.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lie::{det2, Mobius};

/// Relative threshold below which a singular value counts as zero.
const NULLSPACE_TOL: f64 = 1e-10;

/// Representation data for `V_r`.
#[derive(Clone, Debug)]
pub struct SymPowerRep {
    r: usize,
    form: DMatrix<f64>,
}

/// The `γ`-invariant splitting `V⁻ ⊕ R x⁰ ⊕ V⁺`.
///
/// `plus[j-1]` is `v₋^{r-j} v₊^{r+j}` with eigenvalue `λ^{2j}`;
/// `minus[j-1]` is `v₋^{r+j} v₊^{r-j}` with eigenvalue `λ^{-2j}`.
#[derive(Clone, Debug)]
pub struct Splitting {
    pub minus: Vec<DVector<f64>>,
    pub neutral: DVector<f64>,
    pub plus: Vec<DVector<f64>>,
    pub lambda: f64,
}

impl Splitting {
    /// Columns `minus[r-1], …, minus[0], neutral, plus[0], …, plus[r-1]`,
    /// i.e. `v₋^{r-j} v₊^{r+j}` for `j = -r..=r`.
    pub fn basis_matrix(&self) -> DMatrix<f64> {
        let cols: Vec<DVector<f64>> = self
            .minus
            .iter()
            .rev()
            .chain(std::iter::once(&self.neutral))
            .chain(self.plus.iter())
            .cloned()
            .collect();
        DMatrix::from_columns(&cols)
    }

    /// Eigenvalues matching [`Splitting::basis_matrix`] column order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let r = self.plus.len() as i32;
        (-r..=r).map(|j| self.lambda.powi(2 * j)).collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct Signature {
    pub positive: usize,
    pub negative: usize,
}

impl SymPowerRep {
    pub fn new(r: usize) -> Result<Self> {
        let form = invariant_form(r)?;
        Ok(Self { r, form })
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn dim(&self) -> usize {
        2 * self.r + 1
    }

    /// Gram matrix `Q` of the invariant form in the monomial basis.
    pub fn form(&self) -> &DMatrix<f64> {
        &self.form
    }

    /// Representations of odd `r` are the ones admitting proper affine
    /// actions (dimension `4k+3`).
    pub fn admits_proper_actions(&self) -> bool {
        self.r % 2 == 1
    }

    pub fn matrix(&self, m: &Mobius) -> DMatrix<f64> {
        sym_power(m, self.r)
    }

    /// `B(x, y) = xᵀ Q y`.
    pub fn pair(&self, x: &DVector<f64>, y: &DVector<f64>) -> f64 {
        x.dot(&(&self.form * y))
    }

    pub fn signature(&self) -> Signature {
        let eig = self.form.clone().symmetric_eigen();
        let scale = eig.eigenvalues.amax();
        let positive = eig
            .eigenvalues
            .iter()
            .filter(|e| **e > NULLSPACE_TOL * scale)
            .count();
        let negative = eig
            .eigenvalues
            .iter()
            .filter(|e| **e < -NULLSPACE_TOL * scale)
            .count();
        Signature { positive, negative }
    }

    /// The unit spacelike vector `c · v₋^r v₊^r` fixed by `m`.
    pub fn neutral_vector(&self, m: &Mobius) -> Result<DVector<f64>> {
        let h = m.hyperbolic_data()?;
        Ok(neutral_from_eigenvectors(h.v_minus, h.v_plus, self.r))
    }

    pub fn invariant_splitting(&self, m: &Mobius) -> Result<Splitting> {
        let h = m.hyperbolic_data()?;
        let r = self.r;
        let product = |minus_pow: usize, plus_pow: usize| {
            let mut forms = vec![h.v_minus; minus_pow];
            forms.extend(std::iter::repeat_n(h.v_plus, plus_pow));
            DVector::from_vec(form_product(&forms))
        };
        Ok(Splitting {
            minus: (1..=r).map(|j| product(r + j, r - j)).collect(),
            neutral: neutral_from_eigenvectors(h.v_minus, h.v_plus, r),
            plus: (1..=r).map(|j| product(r - j, r + j)).collect(),
            lambda: h.lambda,
        })
    }
}

/// `c · v₋^r v₊^r` with `c = det[v₋|v₊]^{-r}`, which gives `B(x⁰, x⁰) = 1`.
pub(crate) fn neutral_from_eigenvectors(
    v_minus: [f64; 2],
    v_plus: [f64; 2],
    r: usize,
) -> DVector<f64> {
    let mut forms = vec![v_minus; r];
    forms.extend(std::iter::repeat_n(v_plus, r));
    let c = det2(v_minus, v_plus).powi(-(r as i32));
    DVector::from_vec(form_product(&forms)) * c
}

/// Coefficients (by power of `y`) of the product of linear forms
/// `w₀x + w₁y`.
fn form_product(forms: &[[f64; 2]]) -> Vec<f64> {
    let mut coeffs = vec![1.0];
    for w in forms {
        let mut next = vec![0.0; coeffs.len() + 1];
        for (k, c) in coeffs.iter().enumerate() {
            next[k] += c * w[0];
            next[k + 1] += c * w[1];
        }
        coeffs = next;
    }
    coeffs
}

/// Matrix of `m` acting on degree-`2r` binary forms. Column `i` holds the
/// coefficients of `(ax + cy)^{2r-i} (bx + dy)^i`.
pub fn sym_power(m: &Mobius, r: usize) -> DMatrix<f64> {
    let [a, b, c, d] = m.entries();
    let n = 2 * r + 1;
    let mut out = DMatrix::zeros(n, n);
    for i in 0..n {
        let mut forms = vec![[a, c]; 2 * r - i];
        forms.extend(std::iter::repeat_n([b, d], i));
        for (k, v) in form_product(&forms).into_iter().enumerate() {
            out[(k, i)] = v;
        }
    }
    out
}

/// Derivative of [`sym_power`] at the identity in the direction `x ∈ sl(2)`.
fn lie_algebra_action(x: [[f64; 2]; 2], r: usize) -> DMatrix<f64> {
    let n = 2 * r + 1;
    let deg = 2 * r;
    let mut out = DMatrix::zeros(n, n);
    for i in 0..n {
        let (dx, dy) = ((deg - i) as f64, i as f64);
        // x-derivative times (x X₁₁ + y X₂₁)
        out[(i, i)] += dx * x[0][0];
        if i + 1 < n {
            out[(i + 1, i)] += dx * x[1][0];
        }
        // y-derivative times (x X₁₂ + y X₂₂)
        if i > 0 {
            out[(i - 1, i)] += dy * x[0][1];
        }
        out[(i, i)] += dy * x[1][1];
    }
    out
}

/// Symmetric `Q` with `XᵀQ + QX = 0` for the standard basis of sl(2),
/// scaled so that `B(x^r y^r, x^r y^r) = 1`.
pub fn invariant_form(r: usize) -> Result<DMatrix<f64>> {
    if r == 0 {
        return Err(Error::InvalidArgument("r must be at least 1".into()));
    }
    let n = 2 * r + 1;
    let generators = [
        [[1.0, 0.0], [0.0, -1.0]],
        [[0.0, 1.0], [0.0, 0.0]],
        [[0.0, 0.0], [1.0, 0.0]],
    ];

    // unknowns: upper triangle of Q
    let index = |i: usize, j: usize| {
        let (a, b) = (i.min(j), i.max(j));
        a * n - a * a.saturating_sub(1) / 2 + (b - a)
    };
    let unknowns = n * (n + 1) / 2;

    let mut system = DMatrix::zeros(3 * n * n, unknowns);
    for (g, x) in generators.iter().enumerate() {
        let xr = lie_algebra_action(*x, r);
        for i in 0..n {
            for j in 0..n {
                let row = g * n * n + i * n + j;
                // (XᵀQ)_{ij} = Σ_k X_{ki} Q_{kj};  (QX)_{ij} = Σ_k Q_{ik} X_{kj}
                for k in 0..n {
                    system[(row, index(k, j))] += xr[(k, i)];
                    system[(row, index(i, k))] += xr[(k, j)];
                }
            }
        }
    }

    let svd = system.svd(false, true);
    let v_t = svd.v_t.expect("requested V^T");
    let smax = svd.singular_values.max();
    let null: Vec<usize> = (0..unknowns)
        .filter(|&k| svd.singular_values[k] <= NULLSPACE_TOL * smax)
        .collect();
    if null.len() != 1 {
        return Err(Error::DegenerateSolve { dim: null.len() });
    }
    let sol = v_t.row(null[0]);

    let mut q = DMatrix::<f64>::zeros(n, n);
    for i in 0..n {
        for j in 0..n {
            q[(i, j)] = sol[index(i, j)];
        }
    }
    let anchor = q[(r, r)];
    if anchor.abs() <= NULLSPACE_TOL {
        return Err(Error::DegenerateSolve { dim: 0 });
    }
    // weight considerations force Q to be antidiagonal; clear the SVD noise
    Ok((q / anchor).map(|v| if v.abs() <= NULLSPACE_TOL { 0.0 } else { v }))
}
