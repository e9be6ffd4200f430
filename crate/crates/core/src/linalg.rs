//! Dense matrices, LU solves (backed by `faer`), restarted GMRES and
//! power-iteration estimates for extreme singular values.

use faer::prelude::*;
use rayon::prelude::*;

use crate::error::{Error, Result};

/// Row-major dense matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DenseMatrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl DenseMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![0.0; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = 1.0;
        }
        m
    }

    /// Build from a row generator; rows are filled in parallel, each row by
    /// a single call so the result does not depend on the thread count.
    pub fn from_row_fn(rows: usize, cols: usize, f: impl Fn(usize, &mut [f64]) + Sync) -> Self {
        let mut data = vec![0.0; rows * cols];
        if cols > 0 {
            data.par_chunks_mut(cols).enumerate().for_each(|(i, row)| f(i, row));
        }
        Self { rows, cols, data }
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> f64 + Sync) -> Self {
        Self::from_row_fn(rows, cols, |i, row| {
            for (j, v) in row.iter_mut().enumerate() {
                *v = f(i, j);
            }
        })
    }

    pub fn nrows(&self) -> usize {
        self.rows
    }

    pub fn ncols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] = v;
    }

    pub fn add_to(&mut self, i: usize, j: usize, v: f64) {
        self.data[i * self.cols + j] += v;
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [f64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn matvec(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.cols, "matvec dimension mismatch");
        if self.cols == 0 {
            return vec![0.0; self.rows];
        }
        self.data.par_chunks(self.cols).map(|row| dot(row, x)).collect()
    }

    pub fn matvec_transpose(&self, x: &[f64]) -> Vec<f64> {
        assert_eq!(x.len(), self.rows, "transpose matvec dimension mismatch");
        let mut y = vec![0.0; self.cols];
        for (row, &xi) in self.data.chunks(self.cols.max(1)).zip(x) {
            if xi != 0.0 {
                for (yj, a) in y.iter_mut().zip(row) {
                    *yj += a * xi;
                }
            }
        }
        y
    }

    /// `A · diag(s)`.
    pub fn scale_columns(&self, s: &[f64]) -> Self {
        assert_eq!(s.len(), self.cols);
        Self::from_row_fn(self.rows, self.cols, |i, row| {
            for ((v, a), sj) in row.iter_mut().zip(self.row(i)).zip(s) {
                *v = a * sj;
            }
        })
    }

    /// `diag(s) · A`.
    pub fn scale_rows(&self, s: &[f64]) -> Self {
        assert_eq!(s.len(), self.rows);
        Self::from_row_fn(self.rows, self.cols, |i, row| {
            for (v, a) in row.iter_mut().zip(self.row(i)) {
                *v = a * s[i];
            }
        })
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|v| v * s).collect() }
    }

    pub fn add(&self, other: &DenseMatrix) -> Self {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &DenseMatrix) -> Self {
        self.zip_with(other, |a, b| a - b)
    }

    fn zip_with(&self, other: &DenseMatrix, f: impl Fn(f64, f64) -> f64) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().zip(&other.data).map(|(a, b)| f(*a, *b)).collect() }
    }

    pub fn select_columns(&self, idx: &[usize]) -> Self {
        Self::from_row_fn(self.rows, idx.len(), |i, row| {
            let src = self.row(i);
            for (v, &j) in row.iter_mut().zip(idx) {
                *v = src[j];
            }
        })
    }

    pub fn select_rows(&self, idx: &[usize]) -> Self {
        let mut data = Vec::with_capacity(idx.len() * self.cols);
        for &i in idx {
            data.extend_from_slice(self.row(i));
        }
        Self { rows: idx.len(), cols: self.cols, data }
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
    }

    pub fn max_abs_diff(&self, other: &DenseMatrix) -> f64 {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        self.data.iter().zip(&other.data).fold(0.0_f64, |m, (a, b)| m.max((a - b).abs()))
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    /// Stack blocks `[[a, b, ...], [c, d, ...]]` into one matrix.
    pub fn from_blocks(blocks: &[Vec<&DenseMatrix>]) -> Self {
        let rows: usize = blocks.iter().map(|r| r[0].rows).sum();
        let cols: usize = blocks[0].iter().map(|b| b.cols).sum();
        let mut out = Self::zeros(rows, cols);
        let mut r0 = 0;
        for brow in blocks {
            let h = brow[0].rows;
            let mut c0 = 0;
            for b in brow {
                assert_eq!(b.rows, h, "block row heights differ");
                for i in 0..h {
                    out.row_mut(r0 + i)[c0..c0 + b.cols].copy_from_slice(b.row(i));
                }
                c0 += b.cols;
            }
            assert_eq!(c0, cols, "block column widths differ");
            r0 += h;
        }
        out
    }

    /// Copy into a `faer` matrix. Also pins `faer` to serial kernels so that
    /// factorizations are bitwise reproducible across thread counts.
    pub fn to_faer(&self) -> Mat<f64> {
        serial_faer();
        Mat::from_fn(self.rows, self.cols, |i, j| self.get(i, j))
    }

    pub fn lu(&self) -> Result<LuFactor> {
        if self.rows != self.cols {
            return Err(Error::Singular(format!("LU needs a square matrix, got {}x{}", self.rows, self.cols)));
        }
        let lu = self.to_faer().partial_piv_lu();
        Ok(LuFactor { n: self.rows, lu })
    }

    /// All singular values, descending.
    pub fn singular_values(&self) -> Vec<f64> {
        let mut s = self.to_faer().singular_values();
        s.sort_by(|a, b| b.partial_cmp(a).unwrap());
        s
    }
}

pub(crate) fn serial_faer() {
    faer::set_global_parallelism(faer::Parallelism::None);
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

pub fn max_abs(a: &[f64]) -> f64 {
    a.iter().fold(0.0_f64, |m, v| m.max(v.abs()))
}

/// Partial-pivoting LU factorization.
pub struct LuFactor {
    n: usize,
    lu: faer::linalg::solvers::PartialPivLu<f64>,
}

impl LuFactor {
    pub fn dim(&self) -> usize {
        self.n
    }

    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        assert_eq!(b.len(), self.n);
        let rhs = Mat::from_fn(self.n, 1, |i, _| b[i]);
        let x = self.lu.solve(&rhs);
        (0..self.n).map(|i| x[(i, 0)]).collect()
    }

    pub fn solve_transpose(&self, b: &[f64]) -> Vec<f64> {
        assert_eq!(b.len(), self.n);
        let rhs = Mat::from_fn(self.n, 1, |i, _| b[i]);
        let x = self.lu.solve_transpose(&rhs);
        (0..self.n).map(|i| x[(i, 0)]).collect()
    }
}

/// Anything that can be applied to a vector.
pub trait LinearOperator: Sync {
    fn dim(&self) -> usize;
    fn apply(&self, x: &[f64]) -> Vec<f64>;
}

impl LinearOperator for DenseMatrix {
    fn dim(&self) -> usize {
        assert_eq!(self.rows, self.cols);
        self.rows
    }

    fn apply(&self, x: &[f64]) -> Vec<f64> {
        self.matvec(x)
    }
}

impl LinearOperator for LuFactor {
    fn dim(&self) -> usize {
        self.n
    }

    fn apply(&self, x: &[f64]) -> Vec<f64> {
        self.solve(x)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GmresConfig {
    pub tol: f64,
    pub max_iter: usize,
    pub restart: usize,
}

impl Default for GmresConfig {
    fn default() -> Self {
        Self { tol: 1e-8, max_iter: 200, restart: 50 }
    }
}

#[derive(Debug, Clone)]
pub struct GmresOutcome {
    pub x: Vec<f64>,
    pub iterations: usize,
    /// Final relative residual `‖b − Ax‖ / ‖b‖` (true residual).
    pub residual: f64,
    pub converged: bool,
    /// Estimated relative residual after each inner iteration.
    pub history: Vec<f64>,
}

/// Restarted GMRES with optional right preconditioning: solves
/// `A M⁻¹ z = b` and returns `x = M⁻¹ z`.
pub fn gmres(a: &dyn LinearOperator, precond: Option<&dyn LinearOperator>, b: &[f64], config: &GmresConfig) -> GmresOutcome {
    let n = a.dim();
    assert_eq!(b.len(), n, "GMRES right-hand side dimension mismatch");
    let b_norm = norm2(b);
    let mut x = vec![0.0; n];
    let mut history = Vec::new();
    if b_norm == 0.0 {
        return GmresOutcome { x, iterations: 0, residual: 0.0, converged: true, history };
    }
    let apply_prec = |v: &[f64]| match precond {
        Some(m) => m.apply(v),
        None => v.to_vec(),
    };
    let m = config.restart.max(1);
    let mut iterations = 0;
    while iterations < config.max_iter {
        let ax = a.apply(&x);
        let r: Vec<f64> = b.iter().zip(&ax).map(|(bi, ai)| bi - ai).collect();
        let beta = norm2(&r);
        let residual = beta / b_norm;
        if residual <= config.tol {
            return GmresOutcome { x, iterations, residual, converged: true, history };
        }
        let mut basis: Vec<Vec<f64>> = vec![r.iter().map(|v| v / beta).collect()];
        let mut h = vec![vec![0.0; m]; m + 1];
        let (mut cs, mut sn) = (vec![0.0; m], vec![0.0; m]);
        let mut g = vec![0.0; m + 1];
        g[0] = beta;
        let mut k_used = 0;
        for k in 0..m {
            if iterations >= config.max_iter {
                break;
            }
            iterations += 1;
            let mut w = a.apply(&apply_prec(&basis[k]));
            for (j, vj) in basis.iter().enumerate() {
                let hj = dot(&w, vj);
                h[j][k] = hj;
                for (wi, vi) in w.iter_mut().zip(vj) {
                    *wi -= hj * vi;
                }
            }
            let wn = norm2(&w);
            h[k + 1][k] = wn;
            for j in 0..k {
                let t = cs[j] * h[j][k] + sn[j] * h[j + 1][k];
                h[j + 1][k] = -sn[j] * h[j][k] + cs[j] * h[j + 1][k];
                h[j][k] = t;
            }
            let denom = (h[k][k] * h[k][k] + h[k + 1][k] * h[k + 1][k]).sqrt();
            if denom == 0.0 {
                cs[k] = 1.0;
                sn[k] = 0.0;
            } else {
                cs[k] = h[k][k] / denom;
                sn[k] = h[k + 1][k] / denom;
            }
            h[k][k] = cs[k] * h[k][k] + sn[k] * h[k + 1][k];
            h[k + 1][k] = 0.0;
            g[k + 1] = -sn[k] * g[k];
            g[k] *= cs[k];
            k_used = k + 1;
            let est = g[k + 1].abs() / b_norm;
            history.push(est);
            if est <= config.tol || wn == 0.0 {
                break;
            }
            basis.push(w.iter().map(|v| v / wn).collect());
        }
        // Back substitution for the least-squares coefficients.
        let mut y = vec![0.0; k_used];
        for i in (0..k_used).rev() {
            let mut s = g[i];
            for j in (i + 1)..k_used {
                s -= h[i][j] * y[j];
            }
            y[i] = s / h[i][i];
        }
        let mut z = vec![0.0; n];
        for (yj, vj) in y.iter().zip(&basis) {
            for (zi, vi) in z.iter_mut().zip(vj) {
                *zi += yj * vi;
            }
        }
        for (xi, di) in x.iter_mut().zip(apply_prec(&z)) {
            *xi += di;
        }
    }
    let ax = a.apply(&x);
    let r: Vec<f64> = b.iter().zip(&ax).map(|(bi, ai)| bi - ai).collect();
    let true_res = norm2(&r) / b_norm;
    GmresOutcome { x, iterations, residual: true_res, converged: true_res <= config.tol, history }
}

/// Deterministic, generic starting vector for power iterations.
fn start_vector(n: usize) -> Vec<f64> {
    let v: Vec<f64> = (0..n).map(|i| 1.0 + 0.5 * ((i as f64) * 0.7316).sin()).collect();
    let s = norm2(&v);
    v.into_iter().map(|x| x / s).collect()
}

/// Largest singular value by power iteration on `AᵀA`.
pub fn estimate_norm2(a: &DenseMatrix, iterations: usize) -> f64 {
    let mut v = start_vector(a.ncols());
    let mut sigma = 0.0;
    for _ in 0..iterations {
        let av = a.matvec(&v);
        let w = a.matvec_transpose(&av);
        let nw = norm2(&w);
        if nw == 0.0 {
            return 0.0;
        }
        sigma = nw.sqrt();
        v = w.into_iter().map(|x| x / nw).collect();
    }
    sigma
}

/// Smallest singular value by inverse iteration on `(AᵀA)⁻¹` using an LU
/// factorization. Stops after `max_iter` steps or when the estimate changes
/// by less than `rtol` (relative).
pub fn estimate_sigma_min(lu: &LuFactor, max_iter: usize, rtol: f64) -> f64 {
    let mut v = start_vector(lu.dim());
    let mut inv_norm = 0.0_f64;
    for _ in 0..max_iter {
        let y = lu.solve_transpose(&lu.solve(&v));
        let ny = norm2(&y);
        if !ny.is_finite() || ny == 0.0 {
            return 0.0;
        }
        let est = ny.sqrt();
        v = y.into_iter().map(|x| x / ny).collect();
        let done = (est - inv_norm).abs() <= rtol * est;
        inv_norm = est;
        if done {
            break;
        }
    }
    1.0 / inv_norm
}

/// Condition estimate `‖A‖₂·‖A⁻¹‖₂` from `iterations` power steps each.
pub fn estimate_condition(a: &DenseMatrix, lu: &LuFactor, iterations: usize) -> f64 {
    let smax = estimate_norm2(a, iterations);
    let smin = estimate_sigma_min(lu, iterations, 0.0);
    if smin == 0.0 {
        f64::INFINITY
    } else {
        smax / smin
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn test_matrix(n: usize) -> DenseMatrix {
        DenseMatrix::from_fn(n, n, |i, j| if i == j { 4.0 + i as f64 * 0.1 } else { 1.0 / (1.0 + (i as f64 - j as f64).abs()) })
    }

    #[test]
    fn lu_solves() {
        let a = test_matrix(40);
        let x: Vec<f64> = (0..40).map(|i| (i as f64).cos()).collect();
        let b = a.matvec(&x);
        let lu = a.lu().unwrap();
        let y = lu.solve(&b);
        assert!(x.iter().zip(&y).all(|(p, q)| (p - q).abs() < 1e-12));
        let bt = a.matvec_transpose(&x);
        let yt = lu.solve_transpose(&bt);
        assert!(x.iter().zip(&yt).all(|(p, q)| (p - q).abs() < 1e-12));
    }

    #[test]
    fn gmres_matches_lu() {
        let a = test_matrix(60);
        let b: Vec<f64> = (0..60).map(|i| (i as f64 * 0.3).sin() + 0.1).collect();
        let out = gmres(&a, None, &b, &GmresConfig { tol: 1e-12, max_iter: 300, restart: 20 });
        assert!(out.converged);
        let x = a.lu().unwrap().solve(&b);
        assert!(out.x.iter().zip(&x).all(|(p, q)| (p - q).abs() < 1e-9));
    }

    #[test]
    fn exact_preconditioner_converges_in_one_step() {
        let a = test_matrix(30);
        let lu = a.lu().unwrap();
        let b = vec![1.0; 30];
        let out = gmres(&a, Some(&lu), &b, &GmresConfig::default());
        assert!(out.converged);
        assert!(out.iterations <= 1);
    }

    #[test]
    fn gmres_zero_rhs() {
        let a = test_matrix(10);
        let out = gmres(&a, None, &[0.0; 10], &GmresConfig::default());
        assert_eq!(out.iterations, 0);
        assert!(out.x.iter().all(|v| *v == 0.0));
    }

    #[test]
    fn singular_value_estimates_match_svd() {
        let a = test_matrix(50);
        let s = a.singular_values();
        let lu = a.lu().unwrap();
        let smin = estimate_sigma_min(&lu, 500, 1e-13);
        assert!((smin - s[s.len() - 1]).abs() < 1e-8 * s[0], "{smin} vs {}", s[s.len() - 1]);
        let smax = estimate_norm2(&a, 200);
        assert!((smax - s[0]).abs() < 1e-6 * s[0]);
    }

    #[test]
    fn block_assembly() {
        let a = DenseMatrix::identity(2);
        let b = DenseMatrix::from_fn(2, 1, |i, _| i as f64 + 5.0);
        let c = DenseMatrix::zeros(1, 2);
        let d = DenseMatrix::from_fn(1, 1, |_, _| 9.0);
        let m = DenseMatrix::from_blocks(&[vec![&a, &b], vec![&c, &d]]);
        assert_eq!(m.nrows(), 3);
        assert_eq!(m.row(0), &[1.0, 0.0, 5.0]);
        assert_eq!(m.row(2), &[0.0, 0.0, 9.0]);
    }
}
