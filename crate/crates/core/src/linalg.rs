//! Small dense row-major matrices and a Cholesky factorization.

use alloc::vec;
use alloc::vec::Vec;
use core::ops::{Index, IndexMut};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct Matrix {
    rows: usize,
    cols: usize,
    data: Vec<f64>,
}

impl Matrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            data: vec![0.0; rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m[(i, i)] = 1.0;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut data = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                data.push(f(i, j));
            }
        }
        Self { rows, cols, data }
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &[f64] {
        &self.data[i * self.cols..(i + 1) * self.cols]
    }

    /// `A·x`.
    pub fn mul_vec(&self, x: &[f64]) -> Vec<f64> {
        debug_assert_eq!(x.len(), self.cols);
        (0..self.rows).map(|i| dot(self.row(i), x)).collect()
    }

    /// `Aᵀ·x`.
    pub fn tr_mul_vec(&self, x: &[f64]) -> Vec<f64> {
        debug_assert_eq!(x.len(), self.rows);
        let mut out = vec![0.0; self.cols];
        for (i, &xi) in x.iter().enumerate() {
            for (o, &a) in out.iter_mut().zip(self.row(i)) {
                *o += a * xi;
            }
        }
        out
    }

    /// `A·B`.
    pub fn mul(&self, other: &Matrix) -> Matrix {
        debug_assert_eq!(self.cols, other.rows);
        let mut out = Matrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == 0.0 {
                    continue;
                }
                let dst = &mut out.data[i * other.cols..(i + 1) * other.cols];
                for (d, &b) in dst.iter_mut().zip(other.row(k)) {
                    *d += a * b;
                }
            }
        }
        out
    }

    pub fn transpose(&self) -> Matrix {
        Matrix::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    /// Gram matrix `AᵀA`.
    pub fn gram(&self) -> Matrix {
        let n = self.cols;
        let mut out = Matrix::zeros(n, n);
        for r in 0..self.rows {
            let row = self.row(r);
            for i in 0..n {
                let a = row[i];
                if a == 0.0 {
                    continue;
                }
                for j in i..n {
                    out.data[i * n + j] += a * row[j];
                }
            }
        }
        for i in 0..n {
            for j in 0..i {
                out.data[i * n + j] = out.data[j * n + i];
            }
        }
        out
    }

    pub fn scale(&mut self, k: f64) {
        self.data.iter_mut().for_each(|x| *x *= k);
    }

    pub fn add_diagonal(&mut self, k: f64) {
        for i in 0..self.rows.min(self.cols) {
            self[(i, i)] += k;
        }
    }
}

impl Index<(usize, usize)> for Matrix {
    type Output = f64;
    fn index(&self, (i, j): (usize, usize)) -> &f64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for Matrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut f64 {
        &mut self.data[i * self.cols + j]
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm2(a: &[f64]) -> f64 {
    libm::sqrt(dot(a, a))
}

/// Lower Cholesky factor `L` with `A = L·Lᵀ`.
#[derive(Debug, Clone)]
pub struct Cholesky {
    l: Matrix,
}

impl Cholesky {
    /// Factors a symmetric matrix, reading only its lower triangle.
    pub fn new(a: &Matrix) -> Result<Self> {
        let n = a.rows;
        let mut l = Matrix::zeros(n, n);
        for j in 0..n {
            let mut d = a[(j, j)];
            for k in 0..j {
                d -= l[(j, k)] * l[(j, k)];
            }
            if !(d > 0.0) || !d.is_finite() {
                return Err(Error::NotPositiveDefinite { pivot: j });
            }
            let d = libm::sqrt(d);
            l[(j, j)] = d;
            for i in j + 1..n {
                let mut s = a[(i, j)];
                for k in 0..j {
                    s -= l[(i, k)] * l[(j, k)];
                }
                l[(i, j)] = s / d;
            }
        }
        Ok(Self { l })
    }

    pub fn factor(&self) -> &Matrix {
        &self.l
    }

    /// `L·x`.
    pub fn l_mul(&self, x: &[f64]) -> Vec<f64> {
        let n = self.l.rows;
        (0..n).map(|i| dot(&self.l.row(i)[..=i], &x[..=i])).collect()
    }

    /// `Lᵀ·x`.
    pub fn lt_mul(&self, x: &[f64]) -> Vec<f64> {
        let n = self.l.rows;
        let mut out = vec![0.0; n];
        for (i, &xi) in x.iter().enumerate() {
            for (o, &a) in out.iter_mut().zip(&self.l.row(i)[..=i]) {
                *o += a * xi;
            }
        }
        out
    }

    /// Solves `L·y = b`.
    pub fn solve_lower(&self, b: &[f64]) -> Vec<f64> {
        let n = self.l.rows;
        let mut y = b.to_vec();
        for i in 0..n {
            let s = dot(&self.l.row(i)[..i], &y[..i]);
            y[i] = (y[i] - s) / self.l[(i, i)];
        }
        y
    }

    /// Solves `Lᵀ·x = y`.
    pub fn solve_upper(&self, y: &[f64]) -> Vec<f64> {
        let n = self.l.rows;
        let mut x = y.to_vec();
        for i in (0..n).rev() {
            let xi = x[i] / self.l[(i, i)];
            x[i] = xi;
            for k in 0..i {
                x[k] -= self.l[(i, k)] * xi;
            }
        }
        x
    }

    /// Solves `A·x = b`.
    pub fn solve(&self, b: &[f64]) -> Vec<f64> {
        self.solve_upper(&self.solve_lower(b))
    }

    /// `ln det A`.
    pub fn log_det(&self) -> f64 {
        2.0 * (0..self.l.rows).map(|i| libm::log(self.l[(i, i)])).sum::<f64>()
    }

    /// Squared ratio of the extreme pivots, a cheap lower estimate of `cond₂(A)`.
    pub fn condition_estimate(&self) -> f64 {
        let (lo, hi) = (0..self.l.rows).fold((f64::INFINITY, 0.0f64), |(lo, hi), i| {
            let d = self.l[(i, i)];
            (lo.min(d), hi.max(d))
        });
        (hi / lo) * (hi / lo)
    }

    /// `Lᵀ·B·L` for symmetric `B`.
    pub fn congruence(&self, b: &Matrix) -> Matrix {
        let bl = b.mul(&self.l);
        self.l.transpose().mul(&bl)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn cholesky_solves_spd_system() {
        let a = Matrix::from_fn(3, 3, |i, j| [[4.0, 2.0, 0.4], [2.0, 5.0, 1.0], [0.4, 1.0, 3.0]][i][j]);
        let ch = Cholesky::new(&a).unwrap();
        let x = ch.solve(&[1.0, 2.0, 3.0]);
        let back = a.mul_vec(&x);
        for (b, e) in back.iter().zip([1.0, 2.0, 3.0]) {
            assert!((b - e).abs() < 1e-13);
        }
        let l = ch.factor();
        let rebuilt = l.mul(&l.transpose());
        for i in 0..3 {
            for j in 0..3 {
                assert!((rebuilt[(i, j)] - a[(i, j)]).abs() < 1e-14);
            }
        }
        // det = 4*(15-1) - 2*(6-0.4) + 0.4*(2-2) = 44.8
        assert!((ch.log_det() - 44.8f64.ln()).abs() < 1e-12);
        let v = [0.3, -1.0, 2.0];
        let lv = ch.l_mul(&v);
        assert_eq!(lv, l.mul_vec(&v));
        let ltv = ch.lt_mul(&v);
        let dense = l.transpose().mul_vec(&v);
        for (x, y) in ltv.iter().zip(dense) {
            assert!((x - y).abs() < 1e-15);
        }
    }

    #[test]
    fn indefinite_rejected() {
        let a = Matrix::from_fn(2, 2, |i, j| if i == j { 1.0 } else { 2.0 });
        assert!(matches!(Cholesky::new(&a), Err(Error::NotPositiveDefinite { pivot: 1 })));
    }

    #[test]
    fn gram_matches_product() {
        let a = Matrix::from_fn(4, 3, |i, j| (i * 3 + j) as f64 - 4.5);
        assert_eq!(a.gram(), a.transpose().mul(&a));
        assert_eq!(a.tr_mul_vec(&[1.0, 0.0, -1.0, 2.0]), a.transpose().mul_vec(&[1.0, 0.0, -1.0, 2.0]));
    }
}
