//! Dense real polynomials in descending powers and a Durand–Kerner root finder.

use alloc::vec;
use alloc::vec::Vec;
use num_complex::Complex64;

use crate::error::{Error, Result};

/// Product of two polynomials (descending coefficients).
pub fn mul(a: &[f64], b: &[f64]) -> Vec<f64> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        for (j, &y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// Sum of two polynomials, aligned on the constant term.
pub fn add(a: &[f64], b: &[f64]) -> Vec<f64> {
    let n = a.len().max(b.len());
    let mut out = vec![0.0; n];
    for (k, &x) in a.iter().rev().enumerate() {
        out[n - 1 - k] += x;
    }
    for (k, &x) in b.iter().rev().enumerate() {
        out[n - 1 - k] += x;
    }
    out
}

/// Left-pads `a` with zeros to length `len`.
pub fn pad_to(a: &[f64], len: usize) -> Vec<f64> {
    let mut out = vec![0.0; len.saturating_sub(a.len())];
    out.extend_from_slice(a);
    out
}

/// Drops leading coefficients that are exactly zero, keeping at least one.
pub fn trim_leading_zeros(a: &[f64]) -> &[f64] {
    let first = a.iter().position(|&x| x != 0.0).unwrap_or(a.len().saturating_sub(1));
    &a[first..]
}

/// Horner evaluation at a complex point.
pub fn eval(coeffs: &[f64], z: Complex64) -> Complex64 {
    coeffs
        .iter()
        .fold(Complex64::new(0.0, 0.0), |acc, &c| acc * z + c)
}

fn eval_abs(coeffs: &[f64], r: f64) -> f64 {
    coeffs.iter().fold(0.0, |acc, &c| acc * r + libm::fabs(c))
}

const DK_TOLERANCE: f64 = 1e-12;
const DK_MAX_ITER: usize = 500;

/// All complex roots of a polynomial by Durand–Kerner (Weierstrass) iteration.
///
/// Converged when every root's relative backward residual
/// `|p(z)| / Σ|a_k||z|^k` is below 1e-12. Exact zero trailing coefficients
/// are deflated first as roots at the origin.
pub fn roots(coeffs: &[f64]) -> Result<Vec<Complex64>> {
    let coeffs = trim_leading_zeros(coeffs);
    if coeffs.is_empty() || coeffs[0] == 0.0 {
        return Err(Error::ZeroLeadingDenominator);
    }
    let mut zeros_at_origin = 0;
    let mut end = coeffs.len();
    while end > 1 && coeffs[end - 1] == 0.0 {
        end -= 1;
        zeros_at_origin += 1;
    }
    let lead = coeffs[0];
    let monic: Vec<f64> = coeffs[..end].iter().map(|c| c / lead).collect();
    let degree = monic.len() - 1;

    let mut out = vec![Complex64::new(0.0, 0.0); zeros_at_origin];
    if degree == 0 {
        return Ok(out);
    }
    if degree == 1 {
        out.push(Complex64::new(-monic[1], 0.0));
        return Ok(out);
    }

    // Initial guesses on a circle bounded by the Cauchy radius.
    let radius = 1.0 + monic[1..].iter().fold(0.0f64, |m, c| m.max(libm::fabs(*c)));
    let seed = Complex64::new(0.4, 0.9);
    let scale = radius.clamp(0.5, 2.0);
    let mut z: Vec<Complex64> = (0..degree)
        .map(|k| seed.powu(k as u32 + 1) * scale)
        .collect();

    let residual = |z: &[Complex64]| -> f64 {
        z.iter()
            .map(|&zi| {
                let num = eval(&monic, zi).norm();
                let den = eval_abs(&monic, zi.norm());
                if den > 0.0 {
                    num / den
                } else {
                    num
                }
            })
            .fold(0.0, f64::max)
    };

    for _ in 0..DK_MAX_ITER {
        if residual(&z) < DK_TOLERANCE {
            out.extend(z);
            return Ok(out);
        }
        for i in 0..degree {
            let zi = z[i];
            let mut denom = Complex64::new(1.0, 0.0);
            for (j, &zj) in z.iter().enumerate() {
                if j != i {
                    denom *= zi - zj;
                }
            }
            if denom.norm() == 0.0 {
                denom = Complex64::new(f64::EPSILON, 0.0);
            }
            z[i] = zi - eval(&monic, zi) / denom;
        }
    }
    let res = residual(&z);
    if res < DK_TOLERANCE {
        out.extend(z);
        Ok(out)
    } else {
        Err(Error::RootsNotConverged {
            iterations: DK_MAX_ITER,
            residual: res,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mul_and_add() {
        assert_eq!(mul(&[1.0, -1.0], &[1.0, 1.0]), vec![1.0, 0.0, -1.0]);
        assert_eq!(add(&[1.0, 0.0, 0.0], &[2.0, 3.0]), vec![1.0, 2.0, 3.0]);
        assert_eq!(pad_to(&[1.0], 3), vec![0.0, 0.0, 1.0]);
    }

    #[test]
    fn roots_of_quadratic_with_complex_pair() {
        // z^2 - 1.8 z + 0.82 = (z - 0.9)^2 + 0.01
        let mut r = roots(&[1.0, -1.8, 0.82]).unwrap();
        r.sort_by(|a, b| a.im.partial_cmp(&b.im).unwrap());
        assert!((r[0] - Complex64::new(0.9, -0.1)).norm() < 1e-10);
        assert!((r[1] - Complex64::new(0.9, 0.1)).norm() < 1e-10);
    }

    #[test]
    fn roots_at_origin_are_deflated() {
        let r = roots(&[1.0, -1.0, 0.0]).unwrap();
        assert_eq!(r.len(), 2);
        assert!(r.iter().any(|z| z.norm() == 0.0));
        assert!(r.iter().any(|z| (z - 1.0).norm() < 1e-12));
    }

    #[test]
    fn repeated_root_converges() {
        let r = roots(&mul(&[1.0, -0.5], &[1.0, -0.5])).unwrap();
        for z in r {
            assert!((z - 0.5).norm() < 1e-5);
        }
    }

    #[test]
    fn zero_leading_rejected() {
        assert_eq!(roots(&[0.0]), Err(Error::ZeroLeadingDenominator));
    }
}
