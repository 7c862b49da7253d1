//! Dense complex matrices and LU factorisation with partial pivoting.

use crate::exec::Execution;
use num_complex::Complex64;
use std::ops::{Index, IndexMut};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinsolveError {
    #[error("matrix is singular: no usable pivot in column {column}")]
    Singular { column: usize },
    #[error("matrix must be square, got {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("matrix has non-finite entries")]
    NonFinite,
}

pub type Result<T> = std::result::Result<T, LinsolveError>;

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Row-major dense complex matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct CMatrix {
    rows: usize,
    cols: usize,
    data: Vec<Complex64>,
}

impl CMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self { rows, cols, data: vec![ZERO; rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn<F: FnMut(usize, usize) -> Complex64>(rows: usize, cols: usize, mut f: F) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn from_real(rows: usize, cols: usize, values: &[f64]) -> Self {
        assert_eq!(values.len(), rows * cols);
        Self { rows, cols, data: values.iter().map(|&v| Complex64::new(v, 0.0)).collect() }
    }

    pub fn from_vec(rows: usize, cols: usize, data: Vec<Complex64>) -> Self {
        assert_eq!(data.len(), rows * cols);
        Self { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn as_mut_slice(&mut self) -> &mut [Complex64] {
        &mut self.data
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [Complex64] {
        &mut self.data[i * self.cols..(i + 1) * self.cols]
    }

    pub fn column(&self, j: usize) -> Vec<Complex64> {
        (0..self.rows).map(|i| self[(i, j)]).collect()
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    pub fn scaled(&self, s: Complex64) -> Self {
        Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|v| v * s).collect() }
    }

    /// `self += s * other`
    pub fn add_scaled(&mut self, s: Complex64, other: &CMatrix) {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols));
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += s * b;
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, v| m.max(v.norm()))
    }

    pub fn norm1(&self) -> f64 {
        (0..self.cols).map(|j| (0..self.rows).map(|i| self[(i, j)].norm()).sum::<f64>()).fold(0.0, f64::max)
    }

    pub fn norm_inf(&self) -> f64 {
        (0..self.rows).map(|i| self.row(i).iter().map(|v| v.norm()).sum::<f64>()).fold(0.0, f64::max)
    }

    /// `max |A − B| / max |B|`
    pub fn rel_diff(&self, other: &CMatrix) -> f64 {
        let mut d = self.clone();
        d.add_scaled(Complex64::new(-1.0, 0.0), other);
        d.max_abs() / other.max_abs().max(f64::MIN_POSITIVE)
    }

    pub fn block(&self, r0: usize, c0: usize, nr: usize, nc: usize) -> Self {
        Self::from_fn(nr, nc, |i, j| self[(r0 + i, c0 + j)])
    }

    pub fn set_block(&mut self, r0: usize, c0: usize, b: &CMatrix) {
        for i in 0..b.rows {
            let dst = (r0 + i) * self.cols + c0;
            self.data[dst..dst + b.cols].copy_from_slice(b.row(i));
        }
    }

    pub fn matvec(&self, x: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(x.len(), self.cols);
        (0..self.rows).map(|i| self.row(i).iter().zip(x).map(|(a, b)| a * b).sum()).collect()
    }

    pub fn matmul(&self, other: &CMatrix) -> CMatrix {
        self.matmul_with(other, Execution::default())
    }

    pub fn matmul_with(&self, other: &CMatrix, exec: Execution) -> CMatrix {
        assert_eq!(self.cols, other.rows, "matmul dimension mismatch");
        let mut out = CMatrix::zeros(self.rows, other.cols);
        let nc = other.cols;
        if nc == 0 {
            return out;
        }
        exec.for_each_chunk(&mut out.data, nc, |i, row| {
            for (k, a) in self.row(i).iter().enumerate() {
                if *a == ZERO {
                    continue;
                }
                for (c, b) in row.iter_mut().zip(other.row(k)) {
                    *c += a * b;
                }
            }
        });
        out
    }

    pub fn is_finite(&self) -> bool {
        self.data.iter().all(|v| v.re.is_finite() && v.im.is_finite())
    }
}

impl Index<(usize, usize)> for CMatrix {
    type Output = Complex64;
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for CMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.data[i * self.cols + j]
    }
}

/// `PA = LU` with unit lower `L`. `swaps[k]` is the row exchanged with `k`
/// at step `k`.
#[derive(Debug, Clone)]
pub struct Factorization {
    lu: CMatrix,
    swaps: Vec<usize>,
    norm1: f64,
    pub rcond_estimate: f64,
}

pub fn lu_factor(a: &CMatrix) -> Result<Factorization> {
    lu_factor_with(a, Execution::default())
}

pub fn lu_factor_with(a: &CMatrix, exec: Execution) -> Result<Factorization> {
    if !a.is_square() {
        return Err(LinsolveError::NotSquare { rows: a.rows, cols: a.cols });
    }
    if !a.is_finite() {
        return Err(LinsolveError::NonFinite);
    }
    let n = a.rows;
    let norm1 = a.norm1();
    let mut lu = a.clone();
    let mut swaps = Vec::with_capacity(n);
    for k in 0..n {
        let mut p = k;
        let mut best = 0.0;
        for i in k..n {
            let v = lu[(i, k)].l1_norm();
            if v > best {
                best = v;
                p = i;
            }
        }
        if best == 0.0 {
            return Err(LinsolveError::Singular { column: k });
        }
        if p != k {
            let (upper, lower) = lu.data.split_at_mut(p * n);
            upper[k * n..(k + 1) * n].swap_with_slice(&mut lower[..n]);
        }
        swaps.push(p);
        let (head, tail) = lu.data.split_at_mut((k + 1) * n);
        let pivot_row = &head[k * n..];
        let inv = 1.0 / pivot_row[k];
        let rest = &pivot_row[k + 1..];
        if tail.is_empty() {
            continue;
        }
        exec.for_each_chunk(tail, n, |_, row| {
            let l = row[k] * inv;
            row[k] = l;
            if l != ZERO {
                for (r, u) in row[k + 1..].iter_mut().zip(rest) {
                    *r -= l * u;
                }
            }
        });
    }
    let mut f = Factorization { lu, swaps, norm1, rcond_estimate: 0.0 };
    f.rcond_estimate = f.estimate_rcond();
    if f.rcond_estimate < 1e-12 {
        log::warn!("ill-conditioned system: rcond ≈ {:.3e} (n = {n})", f.rcond_estimate);
    }
    Ok(f)
}

impl Factorization {
    pub fn dim(&self) -> usize {
        self.lu.rows
    }

    /// Unit lower factor.
    pub fn l(&self) -> CMatrix {
        let n = self.dim();
        CMatrix::from_fn(n, n, |i, j| match i.cmp(&j) {
            std::cmp::Ordering::Greater => self.lu[(i, j)],
            std::cmp::Ordering::Equal => Complex64::new(1.0, 0.0),
            std::cmp::Ordering::Less => ZERO,
        })
    }

    pub fn u(&self) -> CMatrix {
        let n = self.dim();
        CMatrix::from_fn(n, n, |i, j| if i <= j { self.lu[(i, j)] } else { ZERO })
    }

    /// Applies the row exchanges to `m` (computes `P m`).
    pub fn permute_rows(&self, m: &CMatrix) -> CMatrix {
        let mut out = m.clone();
        for (k, &p) in self.swaps.iter().enumerate() {
            if p != k {
                for j in 0..out.cols {
                    let t = out[(k, j)];
                    out[(k, j)] = out[(p, j)];
                    out[(p, j)] = t;
                }
            }
        }
        out
    }

    pub fn solve(&self, b: &[Complex64]) -> Result<Vec<Complex64>> {
        let n = self.dim();
        if b.len() != n {
            return Err(LinsolveError::DimensionMismatch { expected: n, got: b.len() });
        }
        let mut x = b.to_vec();
        for (k, &p) in self.swaps.iter().enumerate() {
            x.swap(k, p);
        }
        for i in 0..n {
            let row = self.lu.row(i);
            let mut s = x[i];
            for j in 0..i {
                s -= row[j] * x[j];
            }
            x[i] = s;
        }
        for i in (0..n).rev() {
            let row = self.lu.row(i);
            let mut s = x[i];
            for j in i + 1..n {
                s -= row[j] * x[j];
            }
            x[i] = s / row[i];
        }
        Ok(x)
    }

    /// Solves for every right-hand side through the same path as [`solve`].
    pub fn solve_many(&self, rhs: &[Vec<Complex64>], exec: Execution) -> Result<Vec<Vec<Complex64>>> {
        exec.map_collect(rhs.len(), |i| self.solve(&rhs[i])).into_iter().collect()
    }

    /// `A⁻¹ B` column by column.
    pub fn solve_matrix(&self, b: &CMatrix, exec: Execution) -> Result<CMatrix> {
        let n = self.dim();
        if b.rows() != n {
            return Err(LinsolveError::DimensionMismatch { expected: n, got: b.rows() });
        }
        let cols = b.transpose();
        let mut out_t = CMatrix::zeros(b.cols(), n);
        let mut err = None;
        let solved: Vec<Result<Vec<Complex64>>> = exec.map_collect(b.cols(), |j| self.solve(cols.row(j)));
        for (j, s) in solved.into_iter().enumerate() {
            match s {
                Ok(v) => out_t.row_mut(j).copy_from_slice(&v),
                Err(e) => err = Some(e),
            }
        }
        match err {
            Some(e) => Err(e),
            None => Ok(out_t.transpose()),
        }
    }

    /// Solves `Aᴴ x = b`.
    fn solve_adjoint(&self, b: &[Complex64]) -> Vec<Complex64> {
        let n = self.dim();
        let mut x = b.to_vec();
        // Uᴴ is lower triangular.
        for i in 0..n {
            let mut s = x[i];
            for j in 0..i {
                s -= self.lu[(j, i)].conj() * x[j];
            }
            x[i] = s / self.lu[(i, i)].conj();
        }
        // Lᴴ is unit upper triangular.
        for i in (0..n).rev() {
            let mut s = x[i];
            for j in i + 1..n {
                s -= self.lu[(j, i)].conj() * x[j];
            }
            x[i] = s;
        }
        for (k, &p) in self.swaps.iter().enumerate().rev() {
            x.swap(k, p);
        }
        x
    }

    /// Hager–Higham estimate of `1 / (‖A‖₁ ‖A⁻¹‖₁)`.
    fn estimate_rcond(&self) -> f64 {
        let n = self.dim();
        if n == 0 || self.norm1 == 0.0 {
            return 0.0;
        }
        let mut x = vec![Complex64::new(1.0 / n as f64, 0.0); n];
        let mut est = 0.0;
        let mut last_j = usize::MAX;
        for _ in 0..5 {
            let y = match self.solve(&x) {
                Ok(y) => y,
                Err(_) => return 0.0,
            };
            est = y.iter().map(|v| v.norm()).sum::<f64>();
            let xi: Vec<Complex64> =
                y.iter().map(|v| if v.norm() > 0.0 { v / v.norm() } else { Complex64::new(1.0, 0.0) }).collect();
            let z = self.solve_adjoint(&xi);
            let (j, zmax) = z.iter().enumerate().fold((0, 0.0), |(bj, bm), (j, v)| if v.norm() > bm { (j, v.norm()) } else { (bj, bm) });
            let ztx: f64 = z.iter().zip(&x).map(|(a, b)| (a.conj() * b).re).sum();
            if zmax <= ztx || j == last_j {
                break;
            }
            last_j = j;
            x = vec![ZERO; n];
            x[j] = Complex64::new(1.0, 0.0);
        }
        if !(est.is_finite() && est > 0.0) {
            return 0.0;
        }
        1.0 / (self.norm1 * est)
    }
}
