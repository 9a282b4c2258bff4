//! Compressed sparse row matrices and a Jacobi-preconditioned conjugate gradient.

use std::collections::BTreeMap;

use crate::error::{Error, Result};

/// Square CSR matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    n: usize,
    row_ptr: Vec<usize>,
    col_idx: Vec<usize>,
    values: Vec<f64>,
}

/// Accumulates `(row, col, value)` contributions; duplicates are summed in a fixed order.
#[derive(Debug, Clone)]
pub struct TripletBuilder {
    n: usize,
    rows: Vec<BTreeMap<usize, f64>>,
}

impl TripletBuilder {
    pub fn new(n: usize) -> Self {
        Self {
            n,
            rows: vec![BTreeMap::new(); n],
        }
    }

    pub fn add(&mut self, row: usize, col: usize, value: f64) {
        *self.rows[row].entry(col).or_insert(0.0) += value;
    }

    pub fn build(self) -> CsrMatrix {
        let mut row_ptr = Vec::with_capacity(self.n + 1);
        let mut col_idx = Vec::new();
        let mut values = Vec::new();
        row_ptr.push(0);
        for row in self.rows {
            for (c, v) in row {
                col_idx.push(c);
                values.push(v);
            }
            row_ptr.push(col_idx.len());
        }
        CsrMatrix {
            n: self.n,
            row_ptr,
            col_idx,
            values,
        }
    }
}

impl CsrMatrix {
    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn nnz(&self) -> usize {
        self.values.len()
    }

    pub fn get(&self, row: usize, col: usize) -> f64 {
        let range = self.row_ptr[row]..self.row_ptr[row + 1];
        match self.col_idx[range.clone()].binary_search(&col) {
            Ok(k) => self.values[range.start + k],
            Err(_) => 0.0,
        }
    }

    pub fn diagonal(&self) -> Vec<f64> {
        (0..self.n).map(|i| self.get(i, i)).collect()
    }

    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; self.n];
        self.mul_vec_into(x, &mut y);
        y
    }

    fn mul_vec_into(&self, x: &[f64], y: &mut [f64]) {
        for (i, yi) in y.iter_mut().enumerate() {
            let mut s = 0.0;
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                s += self.values[k] * x[self.col_idx[k]];
            }
            *yi = s;
        }
    }

    /// Largest `|a_ij - a_ji|`.
    pub fn asymmetry(&self) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..self.n {
            for k in self.row_ptr[i]..self.row_ptr[i + 1] {
                let j = self.col_idx[k];
                worst = worst.max((self.values[k] - self.get(j, i)).abs());
            }
        }
        worst
    }

    /// Max absolute row sum.
    pub fn norm_inf(&self) -> f64 {
        (0..self.n)
            .map(|i| {
                self.values[self.row_ptr[i]..self.row_ptr[i + 1]]
                    .iter()
                    .map(|v| v.abs())
                    .sum::<f64>()
            })
            .fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CgSettings {
    /// Stop when `‖b − Ax‖ ≤ rel_tol · ‖b‖`.
    pub rel_tol: f64,
    pub max_iter: usize,
}

impl Default for CgSettings {
    fn default() -> Self {
        Self {
            rel_tol: 1e-10,
            max_iter: 20_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CgSolution {
    pub x: Vec<f64>,
    pub iterations: usize,
    pub relative_residual: f64,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Preconditioned CG from a zero initial guess.
pub fn solve_cg(a: &CsrMatrix, b: &[f64], settings: CgSettings) -> Result<CgSolution> {
    let n = a.dim();
    if b.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: b.len(),
        });
    }
    let b_norm = dot(b, b).sqrt();
    if b_norm == 0.0 {
        return Ok(CgSolution {
            x: vec![0.0; n],
            iterations: 0,
            relative_residual: 0.0,
        });
    }
    let inv_diag: Vec<f64> = a
        .diagonal()
        .into_iter()
        .map(|d| {
            if d > 0.0 {
                Ok(1.0 / d)
            } else {
                Err(Error::NotPositiveDefinite {
                    iteration: 0,
                    curvature: d,
                })
            }
        })
        .collect::<Result<_>>()?;

    let mut x = vec![0.0; n];
    let mut r = b.to_vec();
    let mut z: Vec<f64> = r.iter().zip(&inv_diag).map(|(r, d)| r * d).collect();
    let mut p = z.clone();
    let mut ap = vec![0.0; n];
    let mut rz = dot(&r, &z);
    let mut rel = 1.0;
    for it in 1..=settings.max_iter {
        a.mul_vec_into(&p, &mut ap);
        let curvature = dot(&p, &ap);
        if !(curvature > 0.0) {
            return Err(Error::NotPositiveDefinite {
                iteration: it,
                curvature,
            });
        }
        let alpha = rz / curvature;
        for i in 0..n {
            x[i] += alpha * p[i];
            r[i] -= alpha * ap[i];
        }
        rel = dot(&r, &r).sqrt() / b_norm;
        if rel <= settings.rel_tol {
            return Ok(CgSolution {
                x,
                iterations: it,
                relative_residual: rel,
            });
        }
        for i in 0..n {
            z[i] = r[i] * inv_diag[i];
        }
        let rz_new = dot(&r, &z);
        let beta = rz_new / rz;
        rz = rz_new;
        for i in 0..n {
            p[i] = z[i] + beta * p[i];
        }
    }
    Err(Error::SolverDiverged {
        residual: rel,
        iterations: settings.max_iter,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn laplacian_1d(n: usize) -> CsrMatrix {
        let mut b = TripletBuilder::new(n);
        for i in 0..n {
            b.add(i, i, 2.0);
            if i > 0 {
                b.add(i, i - 1, -1.0);
            }
            if i + 1 < n {
                b.add(i, i + 1, -1.0);
            }
        }
        b.build()
    }

    #[test]
    fn duplicates_are_summed() {
        let mut b = TripletBuilder::new(2);
        b.add(0, 1, 1.0);
        b.add(0, 1, 2.5);
        b.add(1, 1, 4.0);
        let m = b.build();
        assert_eq!(m.get(0, 1), 3.5);
        assert_eq!(m.get(1, 0), 0.0);
        assert_eq!(m.nnz(), 2);
        assert_eq!(m.mul_vec(&[1.0, 2.0]), vec![7.0, 8.0]);
    }

    #[test]
    fn cg_solves_tridiagonal_system() {
        let n = 200;
        let a = laplacian_1d(n);
        let exact: Vec<f64> = (0..n).map(|i| ((i + 1) as f64 * 0.03).sin()).collect();
        let b = a.mul_vec(&exact);
        let sol = solve_cg(&a, &b, CgSettings::default()).unwrap();
        assert!(sol.relative_residual <= 1e-10);
        let resid: Vec<f64> = a.mul_vec(&sol.x).iter().zip(&b).map(|(x, y)| x - y).collect();
        assert!(dot(&resid, &resid).sqrt() <= 1e-10 * dot(&b, &b).sqrt());
        let err = sol.x.iter().zip(&exact).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
        assert!(err < 1e-6);
    }

    #[test]
    fn zero_rhs_gives_zero() {
        let sol = solve_cg(&laplacian_1d(5), &[0.0; 5], CgSettings::default()).unwrap();
        assert_eq!(sol.x, vec![0.0; 5]);
        assert_eq!(sol.iterations, 0);
    }

    #[test]
    fn indefinite_matrix_is_reported() {
        let mut b = TripletBuilder::new(2);
        b.add(0, 0, 1.0);
        b.add(1, 1, 1.0);
        b.add(0, 1, 3.0);
        b.add(1, 0, 3.0);
        let r = solve_cg(&b.build(), &[1.0, -1.0], CgSettings::default());
        assert!(matches!(r, Err(Error::NotPositiveDefinite { .. })));
    }

    #[test]
    fn iteration_cap_reports_divergence() {
        let a = laplacian_1d(100);
        let b = vec![1.0; 100];
        let r = solve_cg(&a, &b, CgSettings { rel_tol: 1e-14, max_iter: 3 });
        assert!(matches!(r, Err(Error::SolverDiverged { iterations: 3, .. })));
    }

    #[test]
    fn dimension_mismatch() {
        assert!(matches!(
            solve_cg(&laplacian_1d(3), &[1.0], CgSettings::default()),
            Err(Error::DimensionMismatch { expected: 3, found: 1 })
        ));
    }
}
