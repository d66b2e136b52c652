//! Impulse-response identification from a [`Dataset`].
//!
//! The regression `v = Φ·θ + e` has `Φ` the convolution matrix of the
//! reference. Two estimators are provided: plain least squares and
//! least squares regularized by the tuned-correlated (TC) kernel
//! `P(i,j) = c·α^max(i,j)`, whose hyperparameters are chosen by maximizing
//! the marginal likelihood of the data.
//!
//! All heavy algebra is done on `(M+1)×(M+1)` matrices. With `P = L·Lᵀ` the
//! regularized solution is
//!
//! ```text
//! θ = L·(σ²I + LᵀΦᵀΦL)⁻¹·LᵀΦᵀv
//! ```
//!
//! which equals `(ΦᵀΦ + σ²P⁻¹)⁻¹Φᵀv` without ever inverting `P`.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::{dot, Cholesky, Matrix};
use crate::loop_sim::Dataset;
use crate::lti::ImpulseResponse;

/// TC kernel scale and decay plus the noise variance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TcKernelParams {
    pub c: f64,
    pub alpha: f64,
    pub sigma2: f64,
}

impl TcKernelParams {
    pub fn new(c: f64, alpha: f64, sigma2: f64) -> Result<Self> {
        check_kernel(c, alpha)?;
        if !(sigma2 > 0.0 && sigma2.is_finite()) {
            return Err(Error::InvalidHyperparameter {
                what: "sigma2",
                value: sigma2,
            });
        }
        Ok(Self { c, alpha, sigma2 })
    }
}

fn check_kernel(c: f64, alpha: f64) -> Result<()> {
    if !(c > 0.0 && c.is_finite()) {
        return Err(Error::InvalidHyperparameter { what: "c", value: c });
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidHyperparameter {
            what: "alpha",
            value: alpha,
        });
    }
    Ok(())
}

/// Convolution regression with precomputed normal-equation terms.
#[derive(Debug, Clone)]
pub struct RegressionProblem {
    phi: Matrix,
    y: Vec<f64>,
    gram: Matrix,
    phi_t_y: Vec<f64>,
    y_t_y: f64,
}

impl RegressionProblem {
    pub fn phi(&self) -> &Matrix {
        &self.phi
    }

    pub fn y(&self) -> &[f64] {
        &self.y
    }

    /// Number of samples `N`.
    pub fn samples(&self) -> usize {
        self.phi.rows()
    }

    /// Number of unknowns `M + 1`.
    pub fn unknowns(&self) -> usize {
        self.phi.cols()
    }

    fn residual_norm_sq(&self, theta: &[f64]) -> f64 {
        self.phi
            .mul_vec(theta)
            .iter()
            .zip(&self.y)
            .map(|(p, y)| (y - p) * (y - p))
            .sum()
    }
}

/// Builds the `N×(M+1)` convolution regression with zero pre-padding.
///
/// Column `j` is `r` delayed by `j` samples; column 0 carries the direct
/// feedthrough `g(0)`.
pub fn build_regression(data: &Dataset, order: usize) -> Result<RegressionProblem> {
    let n = data.len();
    if order == 0 {
        return Err(Error::InvalidSize {
            what: "IR order",
            value: order,
        });
    }
    if n <= order {
        return Err(Error::InsufficientData { samples: n, order });
    }
    let r = data.r();
    let phi = Matrix::from_fn(n, order + 1, |i, j| if i >= j { r[i - j] } else { 0.0 });
    let gram = phi.gram();
    let phi_t_y = phi.tr_mul_vec(data.v());
    let y_t_y = dot(data.v(), data.v());
    Ok(RegressionProblem {
        phi,
        y: data.v().to_vec(),
        gram,
        phi_t_y,
        y_t_y,
    })
}

/// Normal equations with a condition estimate above this are rejected.
pub const MAX_CONDITION: f64 = 1e12;

/// Ordinary least-squares IR estimate.
pub fn ls_estimate(problem: &RegressionProblem) -> Result<ImpulseResponse> {
    let ch = Cholesky::new(&problem.gram).map_err(|_| Error::RankDeficient {
        condition: f64::INFINITY,
    })?;
    let condition = ch.condition_estimate();
    if condition > MAX_CONDITION {
        return Err(Error::RankDeficient { condition });
    }
    ImpulseResponse::new(ch.solve(&problem.phi_t_y))
}

/// TC kernel matrix of size `(M+1)×(M+1)`.
pub fn tc_kernel(order: usize, c: f64, alpha: f64) -> Result<Matrix> {
    check_kernel(c, alpha)?;
    let powers: Vec<f64> = (0..=order).map(|k| libm::pow(alpha, k as f64)).collect();
    Ok(Matrix::from_fn(order + 1, order + 1, |i, j| c * powers[i.max(j)]))
}

/// Kernel-regularized IR estimate for fixed hyperparameters.
pub fn regularized_estimate(
    problem: &RegressionProblem,
    params: &TcKernelParams,
) -> Result<ImpulseResponse> {
    let order = problem.unknowns() - 1;
    let kernel = Cholesky::new(&tc_kernel(order, params.c, params.alpha)?)?;
    let mut a = kernel.congruence(&problem.gram);
    a.add_diagonal(params.sigma2);
    let a = Cholesky::new(&a)?;
    let b = kernel.lt_mul(&problem.phi_t_y);
    ImpulseResponse::new(kernel.l_mul(&a.solve(&b)))
}

/// `‖v − Φ·θ_LS‖² / (N − M − 1)`.
pub fn estimate_noise_variance(problem: &RegressionProblem) -> Result<f64> {
    let dof = problem.samples() as isize - problem.unknowns() as isize;
    if dof <= 0 {
        return Err(Error::InsufficientData {
            samples: problem.samples(),
            order: problem.unknowns() - 1,
        });
    }
    let theta = ls_estimate(problem)?;
    Ok(problem.residual_norm_sq(theta.coeffs()) / dof as f64)
}

/// Decay grid `0.70, 0.71, …, 0.99`.
pub fn alpha_grid() -> Vec<f64> {
    (70..=99).map(|k| k as f64 / 100.0).collect()
}

/// Twenty log-spaced scales on `[1e-2, 1e2]`.
pub fn c_grid() -> Vec<f64> {
    (0..C_GRID_POINTS)
        .map(|k| libm::pow(10.0, -2.0 + C_LOG_STEP * k as f64))
        .collect()
}

const C_GRID_POINTS: usize = 20;
const C_LOG_STEP: f64 = 4.0 / (C_GRID_POINTS - 1) as f64;
const ALPHA_STEP: f64 = 0.01;
const REFINE_ROUNDS: usize = 5;

/// Floor applied to the LS residual variance, relative to the output power.
const SIGMA2_RELATIVE_FLOOR: f64 = f64::EPSILON;

/// Negative log marginal likelihood of `v` under `N(0, Φ·P·Φᵀ + σ²I)`,
/// without the `N·ln 2π` constant.
pub fn marginal_likelihood_cost(problem: &RegressionProblem, params: &TcKernelParams) -> f64 {
    let order = problem.unknowns() - 1;
    let Ok(kernel) = tc_kernel(order, 1.0, params.alpha).and_then(|k| Cholesky::new(&k)) else {
        return f64::INFINITY;
    };
    let shape = KernelShape::new(problem, &kernel);
    shape.cost(problem, params.c, params.sigma2)
}

/// `LᵀΦᵀΦL` and `LᵀΦᵀv` for a unit-scale kernel factor; reused across `c`.
struct KernelShape {
    gram: Matrix,
    proj: Vec<f64>,
}

impl KernelShape {
    fn new(problem: &RegressionProblem, kernel: &Cholesky) -> Self {
        Self {
            gram: kernel.congruence(&problem.gram),
            proj: kernel.lt_mul(&problem.phi_t_y),
        }
    }

    fn cost(&self, problem: &RegressionProblem, c: f64, sigma2: f64) -> f64 {
        let mut a = self.gram.clone();
        a.scale(c);
        a.add_diagonal(sigma2);
        let Ok(a) = Cholesky::new(&a) else {
            return f64::INFINITY;
        };
        let sqrt_c = libm::sqrt(c);
        let b: Vec<f64> = self.proj.iter().map(|x| sqrt_c * x).collect();
        let fit = (problem.y_t_y - dot(&b, &a.solve(&b))) / sigma2;
        let free = (problem.samples() - problem.unknowns()) as f64;
        let cost = fit + a.log_det() + free * libm::log(sigma2);
        if cost.is_finite() {
            cost
        } else {
            f64::INFINITY
        }
    }
}

/// Empirical-Bayes choice of `(c, α)` with `σ²` fixed from LS residuals.
///
/// Scans the `α`-major grid (first minimum wins), then refines each
/// coordinate with five rounds of halved steps.
pub fn tune_hyperparameters(problem: &RegressionProblem) -> Result<TcKernelParams> {
    let floor = SIGMA2_RELATIVE_FLOOR * problem.y_t_y / problem.samples() as f64;
    let sigma2 = estimate_noise_variance(problem)?.max(floor).max(f64::MIN_POSITIVE);
    let order = problem.unknowns() - 1;
    let cs = c_grid();

    let mut best: Option<(f64, f64, f64)> = None;
    for alpha in alpha_grid() {
        let Ok(kernel) = Cholesky::new(&tc_kernel(order, 1.0, alpha)?) else {
            continue;
        };
        let shape = KernelShape::new(problem, &kernel);
        for &c in &cs {
            let cost = shape.cost(problem, c, sigma2);
            if cost.is_finite() && best.is_none_or(|(f, _, _)| cost < f) {
                best = Some((cost, c, alpha));
            }
        }
    }
    let (mut cost, mut c, mut alpha) = best.ok_or(Error::TuningFailed)?;

    let eval = |c: f64, alpha: f64| {
        TcKernelParams::new(c, alpha, sigma2)
            .map(|p| marginal_likelihood_cost(problem, &p))
            .unwrap_or(f64::INFINITY)
    };
    let mut log_step = C_LOG_STEP;
    let mut alpha_step = ALPHA_STEP;
    for _ in 0..REFINE_ROUNDS {
        log_step /= 2.0;
        alpha_step /= 2.0;
        let up = libm::pow(10.0, log_step);
        for candidate_c in [c * up, c / up] {
            let f = eval(candidate_c, alpha);
            if f < cost {
                (cost, c) = (f, candidate_c);
            }
        }
        for candidate_alpha in [alpha + alpha_step, alpha - alpha_step] {
            let f = eval(c, candidate_alpha);
            if f < cost {
                (cost, alpha) = (f, candidate_alpha);
            }
        }
    }
    TcKernelParams::new(c, alpha, sigma2)
}
