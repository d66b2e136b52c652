//! Data-driven estimation of H1, H2 and H∞ system norms from identified
//! impulse-response coefficients.
//!
//! The crate is `no_std` (with `alloc`) and contains every numerical piece:
//! transfer-function algebra and reference norms ([`lti`]), seeded excitation
//! and noise ([`signal`]), closed-loop data generation ([`loop_sim`]),
//! TC-kernel regularized identification ([`ident`]) and the norm estimators
//! themselves ([`norms`]).
#![no_std]

extern crate alloc;

pub mod benchmarks;
pub mod error;
pub mod ident;
pub mod linalg;
pub mod loop_sim;
pub mod lti;
pub mod norms;
pub mod poly;
pub mod signal;

pub use error::{Error, Result};
pub use ident::{
    build_regression, estimate_noise_variance, ls_estimate, regularized_estimate, tc_kernel,
    tune_hyperparameters, RegressionProblem, TcKernelParams,
};
pub use loop_sim::{run_closed_loop, Dataset};
pub use lti::{closed_loop, ImpulseResponse, NormTriple, TransferFunction};
pub use norms::{
    h1_from_ir, h2_from_ir, hinf_from_ir, norms_from_ir, signal_norm, toeplitz_matvec,
    SignalNorm, ToeplitzSection,
};
pub use signal::{awgn_for_snr, prbs, NoiseSpec, RngSeed};
