//! Dense dictionary simplex for `maximize cᵀx subject to Ax ≤ b, x ≥ 0`,
//! two-phase with an auxiliary variable when `b` has negative entries,
//! Bland's rule for the entering variable, a Harris ratio test for the
//! leaving one. The dictionary is rebuilt from the original
//! data every [`REFACTOR_EVERY`] pivots and before reporting, so rounding
//! does not accumulate along degenerate pivot sequences.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};

const PIVOT_TOL: f64 = 1e-9;
const COST_TOL: f64 = 1e-11;
const FEAS_TOL: f64 = 1e-9;
const HARRIS_TOL: f64 = 1e-11;
const REFACTOR_EVERY: usize = 32;

#[derive(Clone, Debug, PartialEq)]
pub enum LpOutcome {
    Optimal { x: Vec<f64>, value: f64 },
    Infeasible,
    Unbounded,
}

/// `x_{basic[i]} = rhs[i] - Σ_j a[i][j] x_{nonbasic[j]}`,
/// `z = z0 + Σ_j cost[j] x_{nonbasic[j]}`. Variables `0..n` are structural,
/// `n + i` is the slack of row `i`.
struct Dictionary {
    orig_a: Vec<Vec<f64>>,
    orig_b: Vec<f64>,
    orig_c: Vec<f64>,
    a: Vec<Vec<f64>>,
    rhs: Vec<f64>,
    cost: Vec<f64>,
    z0: f64,
    basic: Vec<usize>,
    nonbasic: Vec<usize>,
    pivots: usize,
    max_pivots: usize,
}

enum Step {
    Optimal,
    Unbounded,
    Pivoted,
}

impl Dictionary {
    fn structural(&self) -> usize {
        self.orig_c.len()
    }

    /// Recomputes every coefficient from the original data for the current
    /// basis. The nonbasic variables `v` determine `x` through the square
    /// system of their defining rows: `x_j = v` for a structural `j`,
    /// `A_i x = b_i - v` for a slack of row `i`.
    fn refactor(&mut self) -> Result<()> {
        let n = self.structural();
        let k = self.nonbasic.len();
        debug_assert_eq!(k, n);
        let mut m = DMatrix::zeros(k, n);
        let mut r0 = DVector::zeros(k);
        let mut dsign = DVector::zeros(k);
        for (row, &v) in self.nonbasic.iter().enumerate() {
            if v < n {
                m[(row, v)] = 1.0;
                dsign[row] = 1.0;
            } else {
                let i = v - n;
                for j in 0..n {
                    m[(row, j)] = self.orig_a[i][j];
                }
                r0[row] = self.orig_b[i];
                dsign[row] = -1.0;
            }
        }
        let lu = m.lu();
        let inv = lu
            .try_inverse()
            .ok_or_else(|| Error::LpNumericalFailure("singular basis on refactorization".into()))?;
        // x = x0 + G v
        let x0 = &inv * &r0;
        let g = &inv * DMatrix::from_diagonal(&dsign);

        for (i, &v) in self.basic.iter().enumerate() {
            if v < n {
                self.rhs[i] = x0[v];
                for j in 0..k {
                    self.a[i][j] = -g[(v, j)];
                }
            } else {
                let row = &self.orig_a[v - n];
                let ax0: f64 = (0..n).map(|j| row[j] * x0[j]).sum();
                self.rhs[i] = self.orig_b[v - n] - ax0;
                for jj in 0..k {
                    self.a[i][jj] = (0..n).map(|j| row[j] * g[(j, jj)]).sum();
                }
            }
        }
        self.z0 = (0..n).map(|j| self.orig_c[j] * x0[j]).sum();
        for jj in 0..k {
            self.cost[jj] = (0..n).map(|j| self.orig_c[j] * g[(j, jj)]).sum();
        }
        if let Some(bad) = self.rhs.iter().copied().find(|v| *v < -FEAS_TOL) {
            return Err(Error::LpNumericalFailure(format!(
                "basis lost feasibility ({bad:.3e})"
            )));
        }
        for v in &mut self.rhs {
            *v = v.max(0.0);
        }
        Ok(())
    }

    fn pivot(&mut self, row: usize, col: usize) -> Result<()> {
        let p = self.a[row][col];
        let scale = self.a[row]
            .iter()
            .fold(0.0f64, |m, v| m.max(v.abs()))
            .max(1.0);
        if p.abs() < PIVOT_TOL * scale {
            return Err(Error::LpNumericalFailure(format!(
                "pivot {p:.3e} too small"
            )));
        }
        self.pivots += 1;
        if self.pivots > self.max_pivots {
            return Err(Error::LpNumericalFailure(format!(
                "no convergence after {} pivots",
                self.max_pivots
            )));
        }
        let n = self.nonbasic.len();
        let pivot_row: Vec<f64> = (0..n)
            .map(|k| {
                if k == col {
                    1.0 / p
                } else {
                    self.a[row][k] / p
                }
            })
            .collect();
        let pivot_rhs = self.rhs[row] / p;
        for i in 0..self.a.len() {
            if i == row {
                continue;
            }
            let q = self.a[i][col];
            if q == 0.0 {
                continue;
            }
            for (k, (a, p)) in self.a[i].iter_mut().zip(&pivot_row).enumerate().take(n) {
                *a = if k == col { -q * p } else { *a - q * p };
            }
            self.rhs[i] -= q * pivot_rhs;
        }
        let c = self.cost[col];
        if c != 0.0 {
            for (k, (a, p)) in self.cost.iter_mut().zip(&pivot_row).enumerate().take(n) {
                *a = if k == col { -c * p } else { *a - c * p };
            }
            self.z0 += c * pivot_rhs;
        }
        self.a[row] = pivot_row;
        self.rhs[row] = pivot_rhs;
        std::mem::swap(&mut self.basic[row], &mut self.nonbasic[col]);
        Ok(())
    }

    fn step(&mut self) -> Result<Step> {
        // Bland: lowest-index improving variable, then lowest-index leaving
        let entering = (0..self.nonbasic.len())
            .filter(|&j| self.cost[j] > COST_TOL)
            .min_by_key(|&j| self.nonbasic[j]);
        let Some(col) = entering else {
            return Ok(Step::Optimal);
        };
        // Harris two-pass ratio test: bound the step with slightly relaxed
        // rows, then take the largest pivot among rows within that bound
        let candidates: Vec<usize> = (0..self.a.len())
            .filter(|&i| self.a[i][col] > PIVOT_TOL)
            .collect();
        let bound = candidates
            .iter()
            .map(|&i| (self.rhs[i].max(0.0) + HARRIS_TOL) / self.a[i][col])
            .fold(f64::INFINITY, f64::min);
        let best = candidates
            .iter()
            .copied()
            .filter(|&i| self.rhs[i].max(0.0) / self.a[i][col] <= bound)
            .max_by(|&i, &l| {
                self.a[i][col]
                    .total_cmp(&self.a[l][col])
                    .then(self.basic[l].cmp(&self.basic[i]))
            });
        match best {
            None => Ok(Step::Unbounded),
            Some(row) => {
                self.pivot(row, col)?;
                Ok(Step::Pivoted)
            }
        }
    }

    fn run(&mut self) -> Result<bool> {
        let mut since_refactor = 0;
        loop {
            match self.step()? {
                Step::Optimal => {
                    if since_refactor == 0 {
                        return Ok(true);
                    }
                    // confirm optimality on fresh coefficients
                    self.refactor()?;
                    since_refactor = 0;
                }
                Step::Unbounded => return Ok(false),
                Step::Pivoted => {
                    since_refactor += 1;
                    if since_refactor == REFACTOR_EVERY {
                        self.refactor()?;
                        since_refactor = 0;
                    }
                }
            }
        }
    }
}

/// Solves `max cᵀx, Ax ≤ b, x ≥ 0` for dense `A` given by rows.
pub fn maximize(a: &[Vec<f64>], b: &[f64], c: &[f64]) -> Result<LpOutcome> {
    let m = a.len();
    let n = c.len();
    if b.len() != m {
        return Err(Error::DimMismatch {
            expected: m,
            got: b.len(),
        });
    }
    if let Some(row) = a.iter().find(|row| row.len() != n) {
        return Err(Error::DimMismatch {
            expected: n,
            got: row.len(),
        });
    }
    if a.iter().flatten().chain(b).chain(c).any(|v| !v.is_finite()) {
        return Err(Error::LpNumericalFailure("non-finite input".into()));
    }
    let max_pivots = 50 * (m + n) + 1000;
    let needs_phase_one = b.iter().any(|&v| v < 0.0);

    let mut dict = if needs_phase_one {
        // auxiliary variable x₀ (index n, slacks shifted to n+1..) in every row: Ax - x₀ ≤ b
        let aux = n;
        let a_aux: Vec<Vec<f64>> = a
            .iter()
            .map(|row| row.iter().copied().chain([-1.0]).collect())
            .collect();
        let mut d = Dictionary {
            orig_a: a_aux.clone(),
            orig_b: b.to_vec(),
            orig_c: [vec![0.0; n], vec![-1.0]].concat(),
            a: a_aux,
            rhs: b.to_vec(),
            cost: [vec![0.0; n], vec![-1.0]].concat(),
            z0: 0.0,
            basic: (n + 1..n + 1 + m).collect(),
            nonbasic: (0..=n).collect(),
            pivots: 0,
            max_pivots,
        };
        let worst = (0..m)
            .min_by(|&i, &j| b[i].total_cmp(&b[j]).then(i.cmp(&j)))
            .expect("m > 0");
        d.pivot(worst, n)?;
        d.run()?;
        if d.z0 < -FEAS_TOL {
            return Ok(LpOutcome::Infeasible);
        }
        if let Some(row) = d.basic.iter().position(|&v| v == aux) {
            let col = (0..d.nonbasic.len())
                .filter(|&j| d.a[row][j].abs() > PIVOT_TOL)
                .min_by_key(|&j| d.nonbasic[j])
                .ok_or_else(|| {
                    Error::LpNumericalFailure("auxiliary variable stuck in basis".into())
                })?;
            d.pivot(row, col)?;
        }
        let col = d
            .nonbasic
            .iter()
            .position(|&v| v == aux)
            .expect("auxiliary is nonbasic");
        for row in &mut d.a {
            row.remove(col);
        }
        d.nonbasic.remove(col);
        d.cost = vec![0.0; n];
        // slack indices shift back by one once the auxiliary column is gone
        for v in d.basic.iter_mut().chain(d.nonbasic.iter_mut()) {
            if *v > n {
                *v -= 1;
            }
        }
        d.orig_a = a.to_vec();
        d.orig_c = c.to_vec();
        d.refactor()?;
        d
    } else {
        Dictionary {
            orig_a: a.to_vec(),
            orig_b: b.to_vec(),
            orig_c: c.to_vec(),
            a: a.to_vec(),
            rhs: b.to_vec(),
            cost: c.to_vec(),
            z0: 0.0,
            basic: (n..n + m).collect(),
            nonbasic: (0..n).collect(),
            pivots: 0,
            max_pivots,
        }
    };

    if !dict.run()? {
        return Ok(LpOutcome::Unbounded);
    }
    dict.refactor()?;
    let mut x = vec![0.0; n];
    for (i, &v) in dict.basic.iter().enumerate() {
        if v < n {
            x[v] = dict.rhs[i];
        }
    }
    // post-hoc feasibility check on the original data
    for (row, &bi) in a.iter().zip(b) {
        let lhs: f64 = row.iter().zip(&x).map(|(p, q)| p * q).sum();
        let scale = row.iter().zip(&x).map(|(p, q)| (p * q).abs()).sum::<f64>() + bi.abs() + 1.0;
        if lhs > bi + FEAS_TOL * scale {
            return Err(Error::LpNumericalFailure(format!(
                "constraint violated by {:.3e}",
                lhs - bi
            )));
        }
    }
    if x.iter().any(|&v| v < -FEAS_TOL) {
        return Err(Error::LpNumericalFailure(
            "negative variable in solution".into(),
        ));
    }
    let value = c.iter().zip(&x).map(|(p, q)| p * q).sum();
    Ok(LpOutcome::Optimal { x, value })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn optimal(out: LpOutcome) -> (Vec<f64>, f64) {
        match out {
            LpOutcome::Optimal { x, value } => (x, value),
            o => panic!("expected optimum, got {o:?}"),
        }
    }

    #[test]
    fn textbook_example() {
        // max 5x + 4y + 3z; 2x+3y+z ≤ 5, 4x+y+2z ≤ 11, 3x+4y+2z ≤ 8 → 13 at (2,0,1)
        let a = vec![
            vec![2.0, 3.0, 1.0],
            vec![4.0, 1.0, 2.0],
            vec![3.0, 4.0, 2.0],
        ];
        let (x, v) = optimal(maximize(&a, &[5.0, 11.0, 8.0], &[5.0, 4.0, 3.0]).unwrap());
        assert!((v - 13.0).abs() < 1e-12);
        assert!((x[0] - 2.0).abs() < 1e-12 && x[1].abs() < 1e-12 && (x[2] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn phase_one_example() {
        // max x - y; -2x + y ≤ -1 (y ≥ ... ), x - 2y ≤ -2, x + y ≤ 10
        let a = vec![vec![-2.0, 1.0], vec![1.0, -2.0], vec![1.0, 1.0]];
        let (x, v) = optimal(maximize(&a, &[-1.0, -2.0, 10.0], &[1.0, -1.0]).unwrap());
        assert!(-2.0 * x[0] + x[1] <= -1.0 + 1e-9);
        assert!(x[0] - 2.0 * x[1] <= -2.0 + 1e-9);
        assert!((v - x[0] + x[1]).abs() < 1e-12);
        // optimum on x - 2y = -2 and x + y = 10: (6, 4)
        assert!((v - 2.0).abs() < 1e-9, "{v}");
    }

    #[test]
    fn infeasible_detected() {
        let a = vec![vec![1.0], vec![-1.0]];
        assert_eq!(
            maximize(&a, &[1.0, -2.0], &[1.0]).unwrap(),
            LpOutcome::Infeasible
        );
    }

    #[test]
    fn unbounded_detected() {
        let a = vec![vec![1.0, -1.0]];
        assert_eq!(
            maximize(&a, &[1.0], &[0.0, 1.0]).unwrap(),
            LpOutcome::Unbounded
        );
    }

    #[test]
    fn degenerate_cycling_example() {
        // Beale's example cycles under the textbook largest-coefficient rule
        let a = vec![
            vec![0.25, -60.0, -0.04, 9.0],
            vec![0.5, -90.0, -0.02, 3.0],
            vec![0.0, 0.0, 1.0, 0.0],
        ];
        let (_, v) = optimal(maximize(&a, &[0.0, 0.0, 1.0], &[0.75, -150.0, 0.02, -6.0]).unwrap());
        assert!((v - 0.05).abs() < 1e-12, "{v}");
    }
}
