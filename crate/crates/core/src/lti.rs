//! Rational SISO discrete-time transfer functions.
//!
//! Coefficients are stored in descending powers of `z`. Simulation runs the
//! equivalent difference equation with zero initial conditions.

use alloc::vec;
use alloc::vec::Vec;
use core::f64::consts::PI;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::poly;

/// `num(z) / den(z)` with real coefficients in descending powers of `z`.
#[derive(Debug, Clone, PartialEq)]
pub struct TransferFunction {
    num: Vec<f64>,
    den: Vec<f64>,
}

fn check_finite(coeffs: &[f64]) -> Result<()> {
    match coeffs.iter().position(|c| !c.is_finite()) {
        Some(index) => Err(Error::NonFinite { index }),
        None => Ok(()),
    }
}

fn degree(coeffs: &[f64]) -> usize {
    poly::trim_leading_zeros(coeffs).len() - 1
}

impl TransferFunction {
    pub fn new(num: Vec<f64>, den: Vec<f64>) -> Result<Self> {
        if num.is_empty() || den.is_empty() {
            return Err(Error::EmptyCoefficients);
        }
        check_finite(&num)?;
        check_finite(&den)?;
        if den[0] == 0.0 {
            return Err(Error::ZeroLeadingDenominator);
        }
        let num_degree = degree(&num);
        let den_degree = den.len() - 1;
        if num_degree > den_degree {
            return Err(Error::Improper {
                num_degree,
                den_degree,
            });
        }
        let num = poly::trim_leading_zeros(&num).to_vec();
        Ok(Self { num, den })
    }

    /// Static gain `k`.
    pub fn gain(k: f64) -> Result<Self> {
        Self::new(vec![k], vec![1.0])
    }

    pub fn num(&self) -> &[f64] {
        &self.num
    }

    pub fn den(&self) -> &[f64] {
        &self.den
    }

    /// Denominator degree.
    pub fn order(&self) -> usize {
        self.den.len() - 1
    }

    /// Nonzero direct feedthrough.
    pub fn is_biproper(&self) -> bool {
        let n = self.den.len();
        self.num.len() >= n && self.num[self.num.len() - n] != 0.0
    }

    /// Output of the system driven by `input` from rest.
    pub fn simulate(&self, input: &[f64]) -> Vec<f64> {
        let mut filter = Filter::new(self);
        input.iter().map(|&u| filter.step(u)).collect()
    }

    /// First `order + 1` impulse-response coefficients `g(0..=order)`.
    pub fn impulse_response(&self, order: usize) -> ImpulseResponse {
        let mut filter = Filter::new(self);
        let coeffs = (0..=order)
            .map(|k| filter.step(if k == 0 { 1.0 } else { 0.0 }))
            .collect();
        ImpulseResponse { coeffs }
    }

    /// Value at `z = exp(i·omega)` for `omega` in `[0, π]`.
    pub fn freq_response(&self, omega: f64) -> Result<Complex64> {
        if !(0.0..=PI).contains(&omega) {
            return Err(Error::FrequencyOutOfRange { omega });
        }
        self.eval_unit_circle(omega)
    }

    fn eval_unit_circle(&self, omega: f64) -> Result<Complex64> {
        let z = Complex64::new(libm::cos(omega), libm::sin(omega));
        let den = poly::eval(&self.den, z);
        let scale: f64 = self.den.iter().map(|c| libm::fabs(*c)).sum();
        if den.norm() <= 1e-14 * scale {
            return Err(Error::PoleOnUnitCircle { omega });
        }
        Ok(poly::eval(&self.num, z) / den)
    }

    /// True iff every pole has modulus below `1 − STABILITY_MARGIN`.
    pub fn is_stable(&self) -> Result<bool> {
        let poles = poly::roots(&self.den)?;
        Ok(poles.iter().all(|p| p.norm() < 1.0 - STABILITY_MARGIN))
    }

    /// High-accuracy reference norms from the model.
    pub fn true_norms(&self) -> Result<NormTriple> {
        if !self.is_stable()? {
            return Err(Error::Unstable);
        }
        let (h1, h2) = self.h1_h2_from_long_ir()?;
        let hinf = self.peak_gain()?;
        Ok(NormTriple { h1, h2, hinf })
    }

    fn h1_h2_from_long_ir(&self) -> Result<(f64, f64)> {
        let mut filter = Filter::new(self);
        let mut abs_sum = 0.0;
        let mut sq_sum = 0.0;
        let mut block_max = 0.0f64;
        let mut prev_block_max = f64::NAN;
        for k in 0..TAIL_CAP {
            let g = filter.step(if k == 0 { 1.0 } else { 0.0 });
            abs_sum += libm::fabs(g);
            sq_sum += g * g;
            block_max = block_max.max(libm::fabs(g));
            if (k + 1) % TAIL_BLOCK == 0 {
                if !prev_block_max.is_nan() && libm::fabs(g) < TAIL_SAMPLE_TOL {
                    if block_max == 0.0 {
                        return Ok((abs_sum, libm::sqrt(sq_sum)));
                    }
                    if block_max < prev_block_max {
                        // Geometric envelope: each later block shrinks by at least `ratio`.
                        let ratio = block_max / prev_block_max;
                        let bound = TAIL_BLOCK as f64 * block_max * ratio / (1.0 - ratio);
                        if bound < TAIL_L1_TOL {
                            return Ok((abs_sum, libm::sqrt(sq_sum)));
                        }
                    }
                }
                prev_block_max = block_max;
                block_max = 0.0;
            }
        }
        Err(Error::TailNotCertified { samples: TAIL_CAP })
    }

    fn peak_gain(&self) -> Result<f64> {
        let step = PI / (HINF_GRID - 1) as f64;
        let mut best = (0usize, -1.0f64);
        for i in 0..HINF_GRID {
            let mag = self.eval_unit_circle(step * i as f64)?.norm();
            if mag > best.1 {
                best = (i, mag);
            }
        }
        let lo = step * best.0.saturating_sub(1) as f64;
        let hi = (step * (best.0 + 1) as f64).min(PI);
        let refined = golden_max(|w| self.eval_unit_circle(w).map(|h| h.norm()), lo, hi)?;
        Ok(refined.max(best.1))
    }
}

/// Golden-section search for the maximum of `f` on `[lo, hi]`.
fn golden_max<F>(f: F, mut lo: f64, mut hi: f64) -> Result<f64>
where
    F: Fn(f64) -> Result<f64>,
{
    let inv_phi = (libm::sqrt(5.0) - 1.0) / 2.0;
    let mut x1 = hi - inv_phi * (hi - lo);
    let mut x2 = lo + inv_phi * (hi - lo);
    let mut f1 = f(x1)?;
    let mut f2 = f(x2)?;
    let mut best = f(lo)?.max(f(hi)?);
    while hi - lo > HINF_REFINE_TOL {
        if f1 >= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - inv_phi * (hi - lo);
            f1 = f(x1)?;
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + inv_phi * (hi - lo);
            f2 = f(x2)?;
        }
        best = best.max(f1).max(f2);
    }
    Ok(best)
}

/// Poles must lie strictly inside the circle of radius `1 − STABILITY_MARGIN`.
pub const STABILITY_MARGIN: f64 = 1e-9;
const TAIL_BLOCK: usize = 50;
const TAIL_SAMPLE_TOL: f64 = 1e-12;
const TAIL_L1_TOL: f64 = 1e-10;
const TAIL_CAP: usize = 200_000;
const HINF_GRID: usize = 4096;
const HINF_REFINE_TOL: f64 = 1e-10;

/// Transposed direct-form II realization, stepped one sample at a time.
#[derive(Debug, Clone)]
pub struct Filter {
    b: Vec<f64>,
    a: Vec<f64>,
    state: Vec<f64>,
}

impl Filter {
    pub fn new(tf: &TransferFunction) -> Self {
        let n = tf.den.len();
        let a0 = tf.den[0];
        let b = poly::pad_to(tf.num(), n).iter().map(|c| c / a0).collect();
        let a = tf.den.iter().map(|c| c / a0).collect();
        Self {
            b,
            a,
            state: vec![0.0; n - 1],
        }
    }

    pub fn step(&mut self, u: f64) -> f64 {
        let n = self.state.len();
        if n == 0 {
            return self.b[0] * u;
        }
        let y = self.b[0] * u + self.state[0];
        for i in 0..n - 1 {
            self.state[i] = self.state[i + 1] + self.b[i + 1] * u - self.a[i + 1] * y;
        }
        self.state[n - 1] = self.b[n] * u - self.a[n] * y;
        y
    }
}

/// Sensitivity `S = 1/(1+CG)` and complementary sensitivity `T = CG/(1+CG)`.
///
/// Built by polynomial algebra over the common denominator `den_C·den_G +
/// num_C·num_G`; no pole–zero cancellation is attempted.
pub fn closed_loop(
    plant: &TransferFunction,
    controller: &TransferFunction,
) -> Result<(TransferFunction, TransferFunction)> {
    let open_den = poly::mul(controller.den(), plant.den());
    let open_num = poly::pad_to(&poly::mul(controller.num(), plant.num()), open_den.len());
    let cl_den = poly::add(&open_den, &open_num);
    if cl_den[0] == 0.0 {
        return Err(Error::IllPosedLoop);
    }
    let s = TransferFunction::new(open_den, cl_den.clone())?;
    let t = TransferFunction::new(open_num, cl_den)?;
    Ok((s, t))
}

/// Truncated impulse response `g(0), …, g(M)`.
#[derive(Debug, Clone, PartialEq)]
pub struct ImpulseResponse {
    coeffs: Vec<f64>,
}

impl ImpulseResponse {
    pub fn new(coeffs: Vec<f64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::EmptySequence);
        }
        check_finite(&coeffs)?;
        Ok(Self { coeffs })
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Truncation order `M` (length minus one).
    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.coeffs
    }
}

/// H1, H2 and H∞ norms of one system.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormTriple {
    pub h1: f64,
    pub h2: f64,
    pub hinf: f64,
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tf(num: &[f64], den: &[f64]) -> TransferFunction {
        TransferFunction::new(num.to_vec(), den.to_vec()).unwrap()
    }

    fn assert_close(a: &[f64], b: &[f64], tol: f64) {
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(b) {
            assert!((x - y).abs() <= tol, "{a:?} vs {b:?}");
        }
    }

    #[test]
    fn validation() {
        assert_eq!(
            TransferFunction::new(vec![], vec![1.0]),
            Err(Error::EmptyCoefficients)
        );
        assert_eq!(
            TransferFunction::new(vec![1.0], vec![0.0, 1.0]),
            Err(Error::ZeroLeadingDenominator)
        );
        assert_eq!(
            TransferFunction::new(vec![1.0, 0.0], vec![1.0]),
            Err(Error::Improper {
                num_degree: 1,
                den_degree: 0
            })
        );
        assert_eq!(
            TransferFunction::new(vec![f64::NAN], vec![1.0]),
            Err(Error::NonFinite { index: 0 })
        );
        // Leading numerator zeros do not count towards the degree.
        assert!(TransferFunction::new(vec![0.0, 0.0, 1.0], vec![1.0, 0.5]).is_ok());
    }

    #[test]
    fn simulate_examples() {
        assert_eq!(tf(&[1.0], &[1.0]).simulate(&[3.0, -1.0, 4.0]), vec![3.0, -1.0, 4.0]);
        assert_eq!(tf(&[1.0], &[1.0, 0.0]).simulate(&[1.0, 0.0, 0.0]), vec![0.0, 1.0, 0.0]);
        let y = tf(&[0.5], &[1.0, -0.9]).simulate(&[1.0, 0.0, 0.0, 0.0]);
        assert_close(&y, &[0.0, 0.5, 0.45, 0.405], 1e-15);
    }

    #[test]
    fn impulse_response_examples() {
        assert_eq!(tf(&[1.0], &[1.0]).impulse_response(3).coeffs(), &[1.0, 0.0, 0.0, 0.0]);
        assert_close(tf(&[0.5], &[1.0, -0.9]).impulse_response(2).coeffs(), &[0.0, 0.5, 0.45], 1e-15);
    }

    #[test]
    fn system1_sensitivity() {
        let g = tf(&[0.5], &[1.0, -0.9]);
        let c = tf(&[0.3797, -0.3797 * 0.9], &[1.0, -1.0]);
        let (s, t) = closed_loop(&g, &c).unwrap();
        assert!(s.is_biproper());
        assert_close(s.impulse_response(1).coeffs(), &[1.0, -0.18985], 1e-12);
        // Same map as (z - 1)/(z - 0.81015).
        let reduced = tf(&[1.0, -1.0], &[1.0, -0.81015]);
        assert_close(
            s.impulse_response(60).coeffs(),
            reduced.impulse_response(60).coeffs(),
            1e-12,
        );
        assert!(s.freq_response(0.0).unwrap().norm() < 1e-12);
        assert!((t.freq_response(0.0).unwrap() - 1.0).norm() < 1e-12);
        let at_pi = s.freq_response(PI).unwrap().norm();
        assert!((at_pi - 2.0 / 1.81015).abs() < 1e-12);
        assert!((at_pi - 1.10488).abs() < 1e-5);
    }

    #[test]
    fn zero_plant_gives_unit_sensitivity() {
        let g = tf(&[0.0], &[1.0]);
        let c = tf(&[2.0, 1.0], &[1.0, -1.0]);
        let (s, t) = closed_loop(&g, &c).unwrap();
        for w in [0.1, 1.0, 3.0] {
            assert!((s.freq_response(w).unwrap() - 1.0).norm() < 1e-15);
            assert!(t.freq_response(w).unwrap().norm() < 1e-15);
        }
    }

    #[test]
    fn ill_posed_loop_rejected() {
        // C·G = -1 identically.
        let g = tf(&[1.0], &[1.0]);
        let c = tf(&[-1.0], &[1.0]);
        assert_eq!(closed_loop(&g, &c), Err(Error::IllPosedLoop));
    }

    #[test]
    fn freq_response_edge_cases() {
        let one = tf(&[1.0], &[1.0]);
        assert_eq!(one.freq_response(1.234).unwrap(), Complex64::new(1.0, 0.0));
        let integrator = tf(&[1.0], &[1.0, -1.0]);
        assert!(matches!(
            integrator.freq_response(0.0),
            Err(Error::PoleOnUnitCircle { .. })
        ));
        assert!(matches!(
            one.freq_response(4.0),
            Err(Error::FrequencyOutOfRange { .. })
        ));
    }

    #[test]
    fn stability_examples() {
        assert!(tf(&[1.0], &[1.0, -0.9]).is_stable().unwrap());
        assert!(!tf(&[1.0], &[1.0, -1.1]).is_stable().unwrap());
        assert!(!tf(&[1.0], &[1.0, -1.0]).is_stable().unwrap());
        assert!(tf(&[1.0], &[1.0]).is_stable().unwrap());
    }

    #[test]
    fn true_norms_of_unity_and_unstable() {
        let n = tf(&[1.0], &[1.0]).true_norms().unwrap();
        assert_eq!((n.h1, n.h2, n.hinf), (1.0, 1.0, 1.0));
        assert_eq!(tf(&[1.0], &[1.0, -1.0]).true_norms(), Err(Error::Unstable));
    }

    #[test]
    fn true_norms_first_order_closed_form() {
        // g(k) = a^k: H1 = 1/(1-a), H2 = 1/sqrt(1-a^2), H∞ = 1/(1-a).
        let a = 0.95;
        let n = tf(&[1.0, 0.0], &[1.0, -a]).true_norms().unwrap();
        assert!((n.h1 - 1.0 / (1.0 - a)).abs() < 1e-9);
        assert!((n.h2 - 1.0 / (1.0 - a * a).sqrt()).abs() < 1e-9);
        assert!((n.hinf - 1.0 / (1.0 - a)).abs() < 1e-9);
    }

    #[test]
    fn impulse_response_rejects_empty() {
        assert_eq!(ImpulseResponse::new(vec![]), Err(Error::EmptySequence));
    }
}
