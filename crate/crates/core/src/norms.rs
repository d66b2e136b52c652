//! System norms estimated from truncated impulse-response coefficients.
//!
//! H1 and H2 are the ℓ1 and ℓ2 norms of `g(0..M)`. H∞ is approximated by the
//! induced 2-norm of the finite section `G_M`, the lower-triangular Toeplitz
//! matrix with first column `g`; this approaches the true peak gain from
//! below as `M` grows.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::{dot, norm2};
use crate::lti::{ImpulseResponse, NormTriple};

/// Which ℓp norm to take of a signal.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SignalNorm {
    L1,
    L2,
    Inf,
}

pub fn signal_norm(x: &[f64], p: SignalNorm) -> f64 {
    match p {
        SignalNorm::L1 => x.iter().map(|v| libm::fabs(*v)).sum(),
        SignalNorm::L2 => norm2(x),
        SignalNorm::Inf => x.iter().fold(0.0, |m, v| m.max(libm::fabs(*v))),
    }
}

/// `Σ |g(k)|`.
pub fn h1_from_ir(g: &ImpulseResponse) -> f64 {
    signal_norm(g.coeffs(), SignalNorm::L1)
}

/// `√Σ g(k)²`.
pub fn h2_from_ir(g: &ImpulseResponse) -> f64 {
    signal_norm(g.coeffs(), SignalNorm::L2)
}

/// Lower-triangular Toeplitz matrix `G_M(i,j) = g(i−j)`, kept implicit.
#[derive(Debug, Clone, PartialEq)]
pub struct ToeplitzSection<'a> {
    first_column: &'a [f64],
}

impl<'a> ToeplitzSection<'a> {
    pub fn new(first_column: &'a [f64]) -> Self {
        Self { first_column }
    }

    pub fn dim(&self) -> usize {
        self.first_column.len()
    }

    /// `G_M·u`: convolution of `g` and `u` truncated to `M+1` samples.
    pub fn matvec(&self, u: &[f64]) -> Result<Vec<f64>> {
        self.check(u)?;
        Ok(self.matvec_unchecked(u))
    }

    /// `G_Mᵀ·w`: correlation of `g` with `w`.
    pub fn tr_matvec(&self, w: &[f64]) -> Result<Vec<f64>> {
        self.check(w)?;
        Ok(self.tr_matvec_unchecked(w))
    }

    fn check(&self, u: &[f64]) -> Result<()> {
        if u.len() != self.dim() {
            return Err(Error::LengthMismatch {
                expected: self.dim(),
                found: u.len(),
            });
        }
        Ok(())
    }

    fn matvec_unchecked(&self, u: &[f64]) -> Vec<f64> {
        let g = self.first_column;
        (0..g.len())
            .map(|i| (0..=i).map(|j| g[i - j] * u[j]).sum())
            .collect()
    }

    fn tr_matvec_unchecked(&self, w: &[f64]) -> Vec<f64> {
        let g = self.first_column;
        let n = g.len();
        (0..n)
            .map(|j| (j..n).map(|i| g[i - j] * w[i]).sum())
            .collect()
    }

    /// `G_Mᵀ·G_M·u`.
    fn gram_apply(&self, u: &[f64]) -> Vec<f64> {
        self.tr_matvec_unchecked(&self.matvec_unchecked(u))
    }
}

/// Truncated convolution `G_M·u`.
pub fn toeplitz_matvec(g: &ImpulseResponse, u: &[f64]) -> Result<Vec<f64>> {
    ToeplitzSection::new(g.coeffs()).matvec(u)
}

const MAX_LANCZOS_STEPS: usize = 10_000;
const RESIDUAL_TOL: f64 = 1e-9;

/// Largest singular value of `G_M`, the finite-section H∞ estimate.
///
/// Runs Lanczos with full reorthogonalization on `G_MᵀG_M`, started from
/// `g/‖g‖` and applied matrix-free through truncated convolution and
/// correlation. The Krylov space is grown to its full dimension (restarting
/// on breakdown), so the top Ritz value is exact up to rounding; the Ritz
/// pair's residual is checked before returning.
pub fn hinf_from_ir(g: &ImpulseResponse) -> Result<f64> {
    let scale = signal_norm(g.coeffs(), SignalNorm::Inf);
    if scale == 0.0 {
        return Ok(0.0);
    }
    // Unit-peak copy so the Gram operator is well scaled.
    let unit: Vec<f64> = g.coeffs().iter().map(|x| x / scale).collect();
    let op = ToeplitzSection::new(&unit);
    let (sigma, residual) = top_singular_value(&op);
    if !(residual <= RESIDUAL_TOL * sigma * sigma) {
        return Err(Error::NotConverged {
            estimate: sigma * scale,
            residual: residual * scale * scale,
        });
    }
    Ok(sigma * scale)
}

fn top_singular_value(op: &ToeplitzSection<'_>) -> (f64, f64) {
    let n = op.dim();
    let steps = n.min(MAX_LANCZOS_STEPS);
    let mut basis: Vec<Vec<f64>> = Vec::with_capacity(steps);
    let mut alphas = Vec::with_capacity(steps);
    let mut betas: Vec<f64> = Vec::with_capacity(steps);

    let start = op.first_column;
    let start_norm = norm2(start);
    basis.push(start.iter().map(|x| x / start_norm).collect());

    for k in 0..steps {
        let q = &basis[k];
        let mut w = op.gram_apply(q);
        let alpha = dot(q, &w);
        alphas.push(alpha);
        if k + 1 == steps {
            break;
        }
        // Two passes of classical Gram–Schmidt against the whole basis.
        for _ in 0..2 {
            for b in &basis {
                let h = dot(b, &w);
                w.iter_mut().zip(b).for_each(|(wi, bi)| *wi -= h * bi);
            }
        }
        let beta = norm2(&w);
        let spectrum_scale = alphas.iter().fold(0.0f64, |m, a| m.max(libm::fabs(*a)));
        if beta > 1e-12 * spectrum_scale.max(f64::MIN_POSITIVE) {
            betas.push(beta);
            basis.push(w.into_iter().map(|x| x / beta).collect());
        } else {
            // Invariant subspace found: continue from a fresh orthogonal direction.
            betas.push(0.0);
            match fresh_direction(&basis, n) {
                Some(next) => basis.push(next),
                None => break,
            }
        }
    }

    let theta = largest_tridiagonal_eigenvalue(&alphas, &betas);
    let y = tridiagonal_eigenvector(&alphas, &betas, theta);
    let mut ritz = vec![0.0; n];
    for (yk, qk) in y.iter().zip(&basis) {
        ritz.iter_mut().zip(qk).for_each(|(r, q)| *r += yk * q);
    }
    let ritz_norm = norm2(&ritz);
    ritz.iter_mut().for_each(|r| *r /= ritz_norm);
    let image = op.gram_apply(&ritz);
    let residual = libm::sqrt(
        image
            .iter()
            .zip(&ritz)
            .map(|(a, r)| (a - theta * r) * (a - theta * r))
            .sum::<f64>(),
    );
    (libm::sqrt(theta.max(0.0)), residual)
}

fn fresh_direction(basis: &[Vec<f64>], n: usize) -> Option<Vec<f64>> {
    for i in 0..n {
        let mut v = vec![0.0; n];
        v[i] = 1.0;
        for _ in 0..2 {
            for b in basis {
                let h = dot(b, &v);
                v.iter_mut().zip(b).for_each(|(vi, bi)| *vi -= h * bi);
            }
        }
        let norm = norm2(&v);
        if norm > 0.5 {
            return Some(v.into_iter().map(|x| x / norm).collect());
        }
    }
    None
}

/// Number of eigenvalues of the symmetric tridiagonal `(diag, off)` below `x`.
fn sturm_count(diag: &[f64], off: &[f64], x: f64) -> usize {
    let mut count = 0;
    let mut d = 1.0;
    for i in 0..diag.len() {
        let b2 = if i == 0 { 0.0 } else { off[i - 1] * off[i - 1] };
        d = diag[i] - x - if i == 0 { 0.0 } else { b2 / d };
        if d == 0.0 {
            d = -f64::EPSILON * (libm::fabs(x) + f64::MIN_POSITIVE);
        }
        if d < 0.0 {
            count += 1;
        }
    }
    count
}

fn largest_tridiagonal_eigenvalue(diag: &[f64], off: &[f64]) -> f64 {
    let n = diag.len();
    let radius = |i: usize| {
        let left = if i > 0 { libm::fabs(off[i - 1]) } else { 0.0 };
        let right = if i + 1 < n { libm::fabs(off[i]) } else { 0.0 };
        left + right
    };
    let mut hi = (0..n).map(|i| diag[i] + radius(i)).fold(f64::MIN, f64::max);
    let mut lo = diag.iter().copied().fold(f64::MIN, f64::max);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if sturm_count(diag, off, mid) == n {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    hi
}

/// Eigenvector for `theta` by two steps of inverse iteration, using Gaussian
/// elimination with partial pivoting on the tridiagonal system.
fn tridiagonal_eigenvector(diag: &[f64], off: &[f64], theta: f64) -> Vec<f64> {
    let n = diag.len();
    if n == 1 {
        return vec![1.0];
    }
    let shift = theta + 1e-12 * libm::fabs(theta).max(f64::MIN_POSITIVE);
    let mut y = vec![1.0 / libm::sqrt(n as f64); n];
    for _ in 0..3 {
        y = solve_shifted_tridiagonal(diag, off, shift, &y);
        let norm = norm2(&y);
        if !(norm > 0.0 && norm.is_finite()) {
            break;
        }
        y.iter_mut().for_each(|v| *v /= norm);
    }
    y
}

fn solve_shifted_tridiagonal(diag: &[f64], off: &[f64], shift: f64, rhs: &[f64]) -> Vec<f64> {
    let n = diag.len();
    // Row i holds columns i, i+1, i+2 (the last from pivoting fill-in).
    let mut rows: Vec<[f64; 3]> = (0..n)
        .map(|i| [diag[i] - shift, if i + 1 < n { off[i] } else { 0.0 }, 0.0])
        .collect();
    let mut sub: Vec<f64> = (0..n).map(|i| if i > 0 { off[i - 1] } else { 0.0 }).collect();
    let mut b = rhs.to_vec();
    let tiny = f64::EPSILON * diag.iter().fold(0.0f64, |m, d| m.max(libm::fabs(*d))).max(1.0);
    for i in 0..n - 1 {
        // Candidate pivot rows: i (current) and i+1 (with sub-diagonal entry).
        if libm::fabs(sub[i + 1]) > libm::fabs(rows[i][0]) {
            let next = rows[i + 1];
            let below = [sub[i + 1], next[0], next[1]];
            let current = rows[i];
            rows[i] = below;
            sub[i + 1] = current[0];
            rows[i + 1] = [current[1], current[2], 0.0];
            b.swap(i, i + 1);
        } else {
            let next = rows[i + 1];
            rows[i + 1] = [next[0], next[1], 0.0];
        }
        let pivot = if rows[i][0] == 0.0 { tiny } else { rows[i][0] };
        rows[i][0] = pivot;
        let factor = sub[i + 1] / pivot;
        rows[i + 1][0] -= factor * rows[i][1];
        rows[i + 1][1] -= factor * rows[i][2];
        b[i + 1] -= factor * b[i];
    }
    if rows[n - 1][0] == 0.0 {
        rows[n - 1][0] = tiny;
    }
    let mut x = vec![0.0; n];
    for i in (0..n).rev() {
        let mut s = b[i];
        if i + 1 < n {
            s -= rows[i][1] * x[i + 1];
        }
        if i + 2 < n {
            s -= rows[i][2] * x[i + 2];
        }
        x[i] = s / rows[i][0];
    }
    x
}

/// H1, H2 and H∞ estimates from one impulse response.
pub fn norms_from_ir(g: &ImpulseResponse) -> Result<NormTriple> {
    Ok(NormTriple {
        h1: h1_from_ir(g),
        h2: h2_from_ir(g),
        hinf: hinf_from_ir(g)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ir(c: &[f64]) -> ImpulseResponse {
        ImpulseResponse::new(c.to_vec()).unwrap()
    }

    #[test]
    fn signal_norm_examples() {
        assert_eq!(signal_norm(&[1.0, -2.0, 3.0], SignalNorm::L1), 6.0);
        assert_eq!(signal_norm(&[3.0, 4.0], SignalNorm::L2), 5.0);
        assert_eq!(signal_norm(&[1.0, -2.0, 3.0], SignalNorm::Inf), 3.0);
    }

    #[test]
    fn h1_h2_examples() {
        assert_eq!(h1_from_ir(&ir(&[1.0, 0.0, 0.0])), 1.0);
        assert_eq!(h1_from_ir(&ir(&[0.0, 0.0])), 0.0);
        assert_eq!(h2_from_ir(&ir(&[3.0, 4.0])), 5.0);
        assert_eq!(h2_from_ir(&ir(&[-2.5])), 2.5);
    }

    #[test]
    fn matvec_examples() {
        assert_eq!(toeplitz_matvec(&ir(&[5.0]), &[2.0]).unwrap(), vec![10.0]);
        assert_eq!(toeplitz_matvec(&ir(&[1.0, 2.0]), &[1.0, 0.0]).unwrap(), vec![1.0, 2.0]);
        assert_eq!(
            toeplitz_matvec(&ir(&[1.0, 2.0]), &[1.0]),
            Err(Error::LengthMismatch { expected: 2, found: 1 })
        );
        let t = ToeplitzSection::new(&[1.0, 2.0, 3.0]);
        // Gᵀ = [[1,2,3],[0,1,2],[0,0,1]]
        assert_eq!(t.tr_matvec(&[1.0, 1.0, 1.0]).unwrap(), vec![6.0, 3.0, 1.0]);
    }

    #[test]
    fn hinf_small_cases() {
        assert_eq!(hinf_from_ir(&ir(&[-3.0])).unwrap(), 3.0);
        assert_eq!(hinf_from_ir(&ir(&[0.0, 0.0, 0.0])).unwrap(), 0.0);
        let golden = (1.0 + 5f64.sqrt()) / 2.0;
        assert!((hinf_from_ir(&ir(&[1.0, 1.0])).unwrap() - golden).abs() < 1e-14);
        // Nilpotent shift: G = [[0,0],[1,0]] has norm 1 and breaks Lanczos early.
        assert!((hinf_from_ir(&ir(&[0.0, 1.0])).unwrap() - 1.0).abs() < 1e-14);
        assert!((hinf_from_ir(&ir(&[0.0, 0.0, 0.0, 2.0])).unwrap() - 2.0).abs() < 1e-14);
    }

    #[test]
    fn tridiagonal_helpers() {
        // [[2,1],[1,2]] has eigenvalues 1 and 3.
        let top = largest_tridiagonal_eigenvalue(&[2.0, 2.0], &[1.0]);
        assert!((top - 3.0).abs() < 1e-14);
        let y = tridiagonal_eigenvector(&[2.0, 2.0], &[1.0], top);
        assert!((y[0].abs() - 0.5f64.sqrt()).abs() < 1e-10);
        assert!((y[0] - y[1]).abs() < 1e-10);
        assert_eq!(sturm_count(&[2.0, 2.0], &[1.0], 2.0), 1);
    }
}
