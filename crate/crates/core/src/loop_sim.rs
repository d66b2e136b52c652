//! Noisy closed-loop experiment producing the identification record.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::lti::{closed_loop, TransferFunction};

/// Paired reference `r(k)` and `v(k) = r(k) − y(k)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    r: Vec<f64>,
    v: Vec<f64>,
}

impl Dataset {
    pub fn new(r: Vec<f64>, v: Vec<f64>) -> Result<Self> {
        if r.is_empty() {
            return Err(Error::EmptySequence);
        }
        if r.len() != v.len() {
            return Err(Error::LengthMismatch {
                expected: r.len(),
                found: v.len(),
            });
        }
        if let Some(index) = r.iter().chain(&v).position(|x| !x.is_finite()) {
            return Err(Error::NonFinite {
                index: index % r.len(),
            });
        }
        Ok(Self { r, v })
    }

    pub fn r(&self) -> &[f64] {
        &self.r
    }

    pub fn v(&self) -> &[f64] {
        &self.v
    }

    pub fn len(&self) -> usize {
        self.r.len()
    }

    pub fn is_empty(&self) -> bool {
        self.r.is_empty()
    }
}

/// Runs the loop `y = T·r + S·n` from rest and returns `{r, r − y}`.
///
/// `noise` is added at the plant output and fed back through the controller,
/// so `v = S·(r − n)`.
pub fn run_closed_loop(
    plant: &TransferFunction,
    controller: &TransferFunction,
    r: &[f64],
    noise: &[f64],
) -> Result<Dataset> {
    if r.len() != noise.len() {
        return Err(Error::LengthMismatch {
            expected: r.len(),
            found: noise.len(),
        });
    }
    let (s, t) = closed_loop(plant, controller)?;
    let tracked = t.simulate(r);
    let disturbed = s.simulate(noise);
    let v: Vec<f64> = r
        .iter()
        .zip(tracked.iter().zip(&disturbed))
        .map(|(&rk, (&ty, &sn))| rk - (ty + sn))
        .collect();
    if let Some(index) = v.iter().position(|x| !x.is_finite()) {
        return Err(Error::NonFinite { index });
    }
    Dataset::new(r.to_vec(), v)
}
