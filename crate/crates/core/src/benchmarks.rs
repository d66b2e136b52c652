//! The five benchmark plant/controller pairs.

use alloc::vec::Vec;

use crate::lti::TransferFunction;
use crate::poly::mul;

/// A plant `G(z)` in feedback with a controller `C(z)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Loop {
    pub plant: TransferFunction,
    pub controller: TransferFunction,
}

fn scaled(k: f64, p: &[f64]) -> Vec<f64> {
    p.iter().map(|c| k * c).collect()
}

fn tf(num: Vec<f64>, den: Vec<f64>) -> TransferFunction {
    TransferFunction::new(num, den).expect("benchmark coefficients are valid")
}

/// Loops 1–5 in order, index 0 being loop 1.
pub fn benchmark_loops() -> Vec<Loop> {
    let z = |p: f64| [1.0, -p];
    let integrator = [1.0, -1.0];
    let integrator_delay = [1.0, -1.0, 0.0];
    alloc::vec![
        Loop {
            plant: tf(alloc::vec![0.5], z(0.9).to_vec()),
            controller: tf(scaled(0.3797, &z(0.9)), integrator.to_vec()),
        },
        Loop {
            plant: tf(scaled(-0.1, &z(0.5)), mul(&z(0.9), &z(0.8))),
            controller: tf(scaled(-1.16, &z(0.9719)), integrator.to_vec()),
        },
        Loop {
            plant: tf(scaled(-0.05, &z(0.6)), alloc::vec![1.0, -1.8, 0.82]),
            controller: tf(
                scaled(-3.7144, &mul(&z(0.9351), &z(0.4210))),
                integrator_delay.to_vec(),
            ),
        },
        Loop {
            plant: tf(scaled(-0.05, &z(1.4)), mul(&z(0.9), &z(0.8))),
            controller: tf(scaled(4.7942, &mul(&z(0.9), &z(0.8))), integrator_delay.to_vec()),
        },
        Loop {
            plant: tf(
                scaled(3.605, &mul(&z(0.55), &[1.0, -1.62, 0.6586])),
                mul(&[1.0, -1.84, 0.8564], &[1.0, -1.26, 0.4069]),
            ),
            controller: tf(scaled(0.0519, &z(0.8977)), integrator.to_vec()),
        },
    ]
}
