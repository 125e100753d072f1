//! Affine deformations of a Schottky group: cocycles, coboundaries,
//! cohomology coordinates and the Margulis invariant.
//!
//! A cocycle on a free group is determined by its values `u(g_i)` on the
//! generators; the value on a word follows from `u(γ₁γ₂) = u(γ₁) + γ₁u(γ₂)`.
//! The invariant `α_u(γ) = B(u(γ), x⁰(γ))` is evaluated through
//!
//! ```text
//! α_u(γ) = Σ_j ε_j B(u(g_{i_j}), x⁰(γ_j))
//! ```
//!
//! where `γ_j` runs over cyclic rotations of the word (the rotation starting
//! at letter `j` for positive letters, at `j+1` for inverse letters, with
//! `ε_j = ∓1` accordingly). The terms are bounded, so the sum keeps full
//! precision on long words, unlike `u(γ)` itself.

use nalgebra::{DMatrix, DVector};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::freegrp::Word;
use crate::lie::Mobius;
use crate::schottky::SchottkyGroup;
use crate::symrep::SymPowerRep;

/// Threshold under which `|α|` counts as zero.
pub const ALPHA_ZERO_TOL: f64 = 1e-8;
/// Relative singular-value threshold for the rank of the coboundary map.
pub const RANK_TOL: f64 = 1e-9;

/// Translational parts `u(g_1), …, u(g_k)` of an affine deformation.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Cocycle {
    values: Vec<DVector<f64>>,
}

impl Cocycle {
    pub fn values(&self) -> &[DVector<f64>] {
        &self.values
    }

    /// The values stacked into one vector of length `k(2r+1)`.
    pub fn stacked(&self) -> DVector<f64> {
        let parts: Vec<f64> = self.values.iter().flat_map(|v| v.iter().copied()).collect();
        DVector::from_vec(parts)
    }

    /// The homothety-conjugate deformation `λu`.
    pub fn scaled(&self, lambda: f64) -> Result<Cocycle> {
        if lambda == 0.0 {
            return Err(Error::ZeroScale);
        }
        Ok(self.map(|v| v * lambda))
    }

    pub fn add(&self, other: &Cocycle) -> Cocycle {
        Cocycle {
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &Cocycle) -> Cocycle {
        Cocycle {
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(a, b)| a - b)
                .collect(),
        }
    }

    /// Largest Euclidean norm of a generator value.
    pub fn max_norm(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    fn map(&self, f: impl Fn(&DVector<f64>) -> DVector<f64>) -> Cocycle {
        Cocycle {
            values: self.values.iter().map(f).collect(),
        }
    }
}

/// A cohomology class: coordinates in the fixed orthonormal basis of the
/// complement of the coboundaries, and the canonical representative.
#[derive(Clone, Debug, Serialize)]
pub struct CohomClass {
    pub coords: DVector<f64>,
    pub rep: Cocycle,
}

/// Coefficients `c_i` with `α_u(γ) = Σ_i ⟨c_i, u(g_i)⟩`.
#[derive(Clone, Debug, Serialize)]
pub struct AlphaFunctional {
    pub coefficients: Vec<DVector<f64>>,
}

impl AlphaFunctional {
    pub fn apply(&self, u: &Cocycle) -> f64 {
        self.coefficients
            .iter()
            .zip(u.values())
            .map(|(c, v)| c.dot(v))
            .sum()
    }

    pub fn stacked(&self) -> DVector<f64> {
        let parts: Vec<f64> = self
            .coefficients
            .iter()
            .flat_map(|v| v.iter().copied())
            .collect();
        DVector::from_vec(parts)
    }
}

/// The space of affine deformations of a certified Schottky group in `V_r`,
/// with the representation matrices and cohomology basis precomputed.
#[derive(Clone, Debug)]
pub struct DeformationSpace {
    group: SchottkyGroup,
    rep: SymPowerRep,
    gens: Vec<DMatrix<f64>>,
    gens_inv: Vec<DMatrix<f64>>,
    coboundary_map: DMatrix<f64>,
    /// Orthonormal columns spanning the complement of the coboundaries.
    complement: DMatrix<f64>,
    coboundary_singular_values: Vec<f64>,
}

impl DeformationSpace {
    pub fn new(group: SchottkyGroup, r: usize) -> Result<Self> {
        let rep = SymPowerRep::new(r)?;
        let gens: Vec<_> = group.generators().iter().map(|g| rep.matrix(g)).collect();
        let gens_inv: Vec<_> = group
            .generators()
            .iter()
            .map(|g| rep.matrix(&g.inverse()))
            .collect();
        let n = rep.dim();
        let k = group.rank();

        let mut coboundary_map = DMatrix::zeros(k * n, n);
        for (i, m) in gens.iter().enumerate() {
            let block = DMatrix::identity(n, n) - m;
            coboundary_map
                .view_mut((i * n, 0), (n, n))
                .copy_from(&block);
        }
        let sv = coboundary_map.clone().svd(false, false).singular_values;
        let smax = sv.max();
        let mut coboundary_singular_values: Vec<f64> = sv.iter().copied().collect();
        coboundary_singular_values.sort_by(|a, b| b.total_cmp(a));
        let rank = sv.iter().filter(|s| **s > RANK_TOL * smax.max(1.0)).count();
        if rank < n {
            return Err(Error::RankDeficient { rank, expected: n });
        }

        let complement = orthogonal_complement(&coboundary_map);
        Ok(Self {
            group,
            rep,
            gens,
            gens_inv,
            coboundary_map,
            complement,
            coboundary_singular_values,
        })
    }

    pub fn group(&self) -> &SchottkyGroup {
        &self.group
    }

    pub fn rep(&self) -> &SymPowerRep {
        &self.rep
    }

    pub fn rank(&self) -> usize {
        self.group.rank()
    }

    pub fn dim(&self) -> usize {
        self.rep.dim()
    }

    /// Dimension `(k-1)(2r+1)` of the cohomology.
    pub fn cohomology_dim(&self) -> usize {
        self.complement.ncols()
    }

    /// The matrix of `v₀ ↦ (v₀ - ρ(g_i)v₀)_i`.
    pub fn coboundary_map(&self) -> &DMatrix<f64> {
        &self.coboundary_map
    }

    /// Singular values of the coboundary map, descending.
    pub fn coboundary_singular_values(&self) -> &[f64] {
        &self.coboundary_singular_values
    }

    pub fn complement_basis(&self) -> &DMatrix<f64> {
        &self.complement
    }

    pub fn cocycle(&self, values: Vec<DVector<f64>>) -> Result<Cocycle> {
        if values.len() != self.rank() {
            return Err(Error::DimMismatch {
                expected: self.rank(),
                got: values.len(),
            });
        }
        if let Some(v) = values.iter().find(|v| v.len() != self.dim()) {
            return Err(Error::DimMismatch {
                expected: self.dim(),
                got: v.len(),
            });
        }
        Ok(Cocycle { values })
    }

    pub fn zero_cocycle(&self) -> Cocycle {
        Cocycle {
            values: vec![DVector::zeros(self.dim()); self.rank()],
        }
    }

    fn check(&self, u: &Cocycle) -> Result<()> {
        if u.values.len() != self.rank() {
            return Err(Error::DimMismatch {
                expected: self.rank(),
                got: u.values.len(),
            });
        }
        if let Some(v) = u.values.iter().find(|v| v.len() != self.dim()) {
            return Err(Error::DimMismatch {
                expected: self.dim(),
                got: v.len(),
            });
        }
        Ok(())
    }

    pub fn element(&self, w: &Word) -> Result<Mobius> {
        self.group.element(w)
    }

    /// `ρ_r` of the element represented by `w`, as a product of the
    /// precomputed generator matrices.
    pub fn rho(&self, w: &Word) -> Result<DMatrix<f64>> {
        let mut m = DMatrix::identity(self.dim(), self.dim());
        for l in w.letters() {
            m = &m * self.letter_matrix(l.generator, l.inverse)?;
        }
        Ok(m)
    }

    fn letter_matrix(&self, generator: usize, inverse: bool) -> Result<&DMatrix<f64>> {
        let table = if inverse { &self.gens_inv } else { &self.gens };
        table.get(generator).ok_or(Error::BadIndex {
            index: generator,
            rank: self.rank(),
        })
    }

    pub fn length(&self, w: &Word) -> Result<f64> {
        self.element(w)?.translation_length()
    }

    pub fn neutral_vector(&self, w: &Word) -> Result<DVector<f64>> {
        self.rep.neutral_vector(&self.element(w)?)
    }

    /// `u(γ)` by the left-to-right cocycle recursion.
    pub fn evaluate_cocycle(&self, u: &Cocycle, w: &Word) -> Result<DVector<f64>> {
        self.check(u)?;
        let n = self.dim();
        let mut prefix = DMatrix::identity(n, n);
        let mut acc = DVector::zeros(n);
        for l in w.letters() {
            let g = self.letter_matrix(l.generator, false)?;
            let value = &u.values[l.generator];
            if l.inverse {
                let g_inv = self.letter_matrix(l.generator, true)?;
                // u(g⁻¹) = -ρ(g)⁻¹ u(g)
                acc -= &prefix * (g_inv * value);
                prefix = &prefix * g_inv;
            } else {
                acc += &prefix * value;
                prefix = &prefix * g;
            }
        }
        Ok(acc)
    }

    /// The cocycle `g ↦ v₀ - ρ(g)v₀`.
    pub fn coboundary(&self, v0: &DVector<f64>) -> Result<Cocycle> {
        if v0.len() != self.dim() {
            return Err(Error::DimMismatch {
                expected: self.dim(),
                got: v0.len(),
            });
        }
        Ok(Cocycle {
            values: self.gens.iter().map(|m| v0 - m * v0).collect(),
        })
    }

    pub fn cohomology_coords(&self, u: &Cocycle) -> Result<CohomClass> {
        self.check(u)?;
        let coords = self.complement.tr_mul(&u.stacked());
        let rep = self.cocycle_from_coords(&coords)?;
        Ok(CohomClass { coords, rep })
    }

    /// The canonical representative with the given cohomology coordinates.
    pub fn cocycle_from_coords(&self, coords: &DVector<f64>) -> Result<Cocycle> {
        if coords.len() != self.cohomology_dim() {
            return Err(Error::DimMismatch {
                expected: self.cohomology_dim(),
                got: coords.len(),
            });
        }
        let stacked = &self.complement * coords;
        let n = self.dim();
        Ok(Cocycle {
            values: (0..self.rank())
                .map(|i| stacked.rows(i * n, n).into_owned())
                .collect(),
        })
    }

    /// Coefficients of the linear functional `u ↦ α_u(γ)`. Only the
    /// conjugacy class of `w` matters, so the word is cyclically reduced first.
    pub fn alpha_functional(&self, w: &Word) -> Result<AlphaFunctional> {
        if w.is_empty() {
            return Err(Error::EmptyWord);
        }
        let w = &w.cyclically_reduce();
        if w.is_empty() {
            return Err(Error::NotHyperbolic { trace_abs: 2.0 });
        }
        let gamma = self.element(w)?;
        gamma.hyperbolic_data()?;
        let letters = w.letters();
        let n = letters.len();

        let mut neutral_sums = vec![DVector::zeros(self.dim()); self.rank()];
        for (j, l) in letters.iter().enumerate() {
            if l.generator >= self.rank() {
                return Err(Error::BadIndex {
                    index: l.generator,
                    rank: self.rank(),
                });
            }
            let (start, sign) = if l.inverse {
                ((j + 1) % n, -1.0)
            } else {
                (j, 1.0)
            };
            let x0 = self
                .rep
                .neutral_vector(&self.group.element(&w.rotation(start))?)?;
            neutral_sums[l.generator] += x0 * sign;
        }
        let q = self.rep.form();
        Ok(AlphaFunctional {
            coefficients: neutral_sums.iter().map(|s| q * s).collect(),
        })
    }

    /// The Margulis invariant `α_u(γ)`.
    pub fn alpha(&self, u: &Cocycle, w: &Word) -> Result<f64> {
        self.check(u)?;
        Ok(self.alpha_functional(w)?.apply(u))
    }

    /// `B(u(γ), x⁰(γ))` straight from the cocycle recursion. Agrees with
    /// [`DeformationSpace::alpha`] but loses precision as `ℓ(γ)` grows.
    pub fn alpha_direct(&self, u: &Cocycle, w: &Word) -> Result<f64> {
        if w.is_empty() {
            return Err(Error::EmptyWord);
        }
        let x0 = self.neutral_vector(w)?;
        Ok(self.rep.pair(&self.evaluate_cocycle(u, w)?, &x0))
    }

    /// `α_u(γ)/ℓ(γ)` as a linear functional on cohomology coordinates.
    pub fn normalized_functional(&self, w: &Word) -> Result<(f64, DVector<f64>)> {
        let ell = self.length(w)?;
        let c = self.alpha_functional(w)?.stacked();
        Ok((ell, self.complement.tr_mul(&c) / ell))
    }

    /// A point fixed by the affine map `x ↦ ρ(γ)x + u(γ)`, if `α_u(γ) = 0`.
    /// The solution is taken in the B-orthogonal complement of `x⁰(γ)`.
    pub fn fixed_point(&self, u: &Cocycle, w: &Word) -> Result<Option<DVector<f64>>> {
        let alpha = self.alpha(u, w)?;
        if alpha.abs() > ALPHA_ZERO_TOL {
            return Ok(None);
        }
        let split = self.rep.invariant_splitting(&self.element(w)?)?;
        let basis = split.basis_matrix();
        let target = self.evaluate_cocycle(u, w)?;
        let coeffs = basis
            .clone()
            .lu()
            .solve(&target)
            .ok_or_else(|| Error::InvalidArgument("singular eigenbasis".into()))?;
        let r = self.rep.r();
        let mut point = DVector::zeros(self.dim());
        for (j, mu) in split.eigenvalues().into_iter().enumerate() {
            if j == r {
                continue;
            }
            point += basis.column(j) * (coeffs[j] / (1.0 - mu));
        }
        Ok(Some(point))
    }
}

/// Orthonormal basis of the orthogonal complement of the column space of
/// `a`, by Gram–Schmidt of the standard basis against the columns.
fn orthogonal_complement(a: &DMatrix<f64>) -> DMatrix<f64> {
    let total = a.nrows();
    let mut basis: Vec<DVector<f64>> = Vec::new();
    for c in a.column_iter() {
        if let Some(v) = orthonormalize(c.into_owned(), &basis, 1e-12) {
            basis.push(v);
        }
    }
    let image = basis.len();
    let mut complement = Vec::new();
    for e in 0..total {
        if basis.len() == total {
            break;
        }
        let mut v = DVector::zeros(total);
        v[e] = 1.0;
        if let Some(v) = orthonormalize(v, &basis, 1e-8) {
            basis.push(v.clone());
            complement.push(v);
        }
    }
    debug_assert_eq!(complement.len(), total - image);
    DMatrix::from_columns(&complement)
}

/// Twice-iterated Gram–Schmidt step; `None` when the residual is below
/// `tol` relative to the input norm.
fn orthonormalize(mut v: DVector<f64>, basis: &[DVector<f64>], tol: f64) -> Option<DVector<f64>> {
    let norm0 = v.norm();
    if norm0 == 0.0 {
        return None;
    }
    for _ in 0..2 {
        for b in basis {
            let p = b.dot(&v);
            v.axpy(-p, b, 1.0);
        }
    }
    let n = v.norm();
    (n > tol * norm0).then(|| v / n)
}
