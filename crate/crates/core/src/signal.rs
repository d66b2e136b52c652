//! Seeded excitation and noise generators.
//!
//! Both generators draw from ChaCha20 keyed by the 64-bit seed, on separate
//! stream ids, and use `libm` for transcendental functions so that output is
//! bitwise identical on every platform.

use alloc::vec::Vec;
use rand_chacha::ChaCha20Rng;
use rand_core::{RngCore, SeedableRng};

use crate::error::{Error, Result};

/// Seed for every random stream in an experiment.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct RngSeed(pub u64);

impl RngSeed {
    /// Substream seed `self ⊕ offset`.
    pub fn derive(self, offset: u64) -> Self {
        RngSeed(self.0 ^ offset)
    }

    fn stream(self, id: u64) -> ChaCha20Rng {
        let mut rng = ChaCha20Rng::seed_from_u64(self.0);
        rng.set_stream(id);
        rng
    }
}

const PRBS_STREAM: u64 = 0;
const NOISE_STREAM: u64 = 1;

/// Additive-noise level relative to a reference signal.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NoiseSpec {
    pub snr_db: f64,
    pub seed: RngSeed,
}

/// Register length used when none is requested; period 2047.
pub const DEFAULT_REGISTER_LENGTH: u32 = 11;

/// Feedback taps (1-based stage numbers) of maximal-length Fibonacci LFSRs.
const TAPS: [&[u32]; 12] = [
    &[5, 3],
    &[6, 5],
    &[7, 6],
    &[8, 6, 5, 4],
    &[9, 5],
    &[10, 7],
    &[11, 9],
    &[12, 11, 10, 4],
    &[13, 12, 11, 8],
    &[14, 13, 12, 2],
    &[15, 14],
    &[16, 15, 13, 4],
];

/// Maximal-length shift-register sequence.
#[derive(Debug, Clone)]
pub struct Lfsr {
    state: u32,
    mask: u32,
    len: u32,
}

impl Lfsr {
    /// `state` is reduced into the nonzero range `1..2^n`.
    pub fn new(register_length: u32, state: u64) -> Result<Self> {
        if !(5..=16).contains(&register_length) {
            return Err(Error::UnsupportedRegisterLength(register_length));
        }
        let taps = TAPS[(register_length - 5) as usize];
        let mask = taps
            .iter()
            .fold(0u32, |m, &t| m | (1 << (register_length - t)));
        let period = (1u64 << register_length) - 1;
        Ok(Self {
            state: (1 + state % period) as u32,
            mask,
            len: register_length,
        })
    }

    /// Next output bit (0 or 1).
    pub fn next_bit(&mut self) -> u32 {
        let out = self.state & 1;
        let feedback = (self.state & self.mask).count_ones() & 1;
        self.state = (self.state >> 1) | (feedback << (self.len - 1));
        out
    }
}

/// Binary ±1 excitation of length `n` from a maximal-length LFSR.
///
/// Bit 0 maps to +1 and bit 1 to −1. The initial register state is drawn
/// from the seed.
pub fn prbs(n: usize, register_length: u32, seed: RngSeed) -> Result<Vec<f64>> {
    if n == 0 {
        return Err(Error::InvalidSize {
            what: "PRBS length",
            value: n,
        });
    }
    let mut lfsr = Lfsr::new(register_length, seed.stream(PRBS_STREAM).next_u64())?;
    Ok((0..n)
        .map(|_| if lfsr.next_bit() == 0 { 1.0 } else { -1.0 })
        .collect())
}

/// Population variance (divides by `n`).
pub fn variance(x: &[f64]) -> f64 {
    if x.is_empty() {
        return 0.0;
    }
    let n = x.len() as f64;
    let mean = x.iter().sum::<f64>() / n;
    x.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / n
}

/// Standard normal samples by Box–Muller over the seed's noise stream.
pub fn standard_normal(n: usize, seed: RngSeed) -> Vec<f64> {
    let mut rng = seed.stream(NOISE_STREAM);
    let mut uniform = move || ((rng.next_u64() >> 11) + 1) as f64 * (1.0 / (1u64 << 53) as f64);
    let mut out = Vec::with_capacity(n + 1);
    while out.len() < n {
        let radius = libm::sqrt(-2.0 * libm::log(uniform()));
        let angle = 2.0 * core::f64::consts::PI * uniform();
        out.push(radius * libm::cos(angle));
        out.push(radius * libm::sin(angle));
    }
    out.truncate(n);
    out
}

/// White Gaussian noise scaled to `var(reference) / 10^(snr_db/10)`.
pub fn awgn_for_snr(reference: &[f64], spec: NoiseSpec) -> Result<Vec<f64>> {
    if reference.is_empty() {
        return Err(Error::EmptySequence);
    }
    if !spec.snr_db.is_finite() {
        return Err(Error::InvalidSnr);
    }
    let var = variance(reference);
    if var <= 0.0 {
        return Err(Error::ZeroVariance);
    }
    let sd = libm::sqrt(var / libm::pow(10.0, spec.snr_db / 10.0));
    Ok(standard_normal(reference.len(), spec.seed)
        .into_iter()
        .map(|z| sd * z)
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    fn period(register_length: u32) -> usize {
        let mut lfsr = Lfsr::new(register_length, 0).unwrap();
        let start = lfsr.state;
        let mut k = 0;
        loop {
            lfsr.next_bit();
            k += 1;
            if lfsr.state == start {
                return k;
            }
        }
    }

    #[test]
    fn every_tap_set_is_maximal() {
        for n in 5..=16 {
            assert_eq!(period(n), (1 << n) - 1, "register length {n}");
        }
    }

    #[test]
    fn prbs_sequence_repeats_after_31() {
        let x = prbs(93, 5, RngSeed(3)).unwrap();
        assert_eq!(x[..31], x[31..62]);
        // No shorter period.
        for p in 1..31 {
            assert_ne!(x[..93 - p], x[p..93], "period {p}");
        }
    }

    #[test]
    fn prbs_is_binary_and_deterministic() {
        let a = prbs(2000, 11, RngSeed(42)).unwrap();
        assert!(a.iter().all(|&v| v == 1.0 || v == -1.0));
        assert_eq!(a, prbs(2000, 11, RngSeed(42)).unwrap());
        assert_ne!(a, prbs(2000, 11, RngSeed(43)).unwrap());
        let mean = a.iter().sum::<f64>() / 2000.0;
        assert!(mean.abs() <= 2.0 / 2000f64.sqrt());
    }

    #[test]
    fn prbs_errors() {
        assert_eq!(
            prbs(10, 4, RngSeed(0)),
            Err(Error::UnsupportedRegisterLength(4))
        );
        assert_eq!(
            prbs(10, 17, RngSeed(0)),
            Err(Error::UnsupportedRegisterLength(17))
        );
        assert!(prbs(0, 11, RngSeed(0)).is_err());
    }

    #[test]
    fn snr_scaling() {
        // Alternating ±1 has population variance exactly 1.
        let reference: Vec<f64> = (0..200_000).map(|k| if k % 2 == 0 { 1.0 } else { -1.0 }).collect();
        for (snr, target) in [(0.0, 1.0), (10.0, 0.1)] {
            let n = awgn_for_snr(&reference, NoiseSpec { snr_db: snr, seed: RngSeed(9) }).unwrap();
            assert_eq!(n.len(), reference.len());
            let v = variance(&n);
            assert!((v - target).abs() < 0.05 * target, "snr {snr}: {v}");
        }
    }

    #[test]
    fn law_of_large_numbers_at_10_db() {
        let reference: Vec<f64> = (0..1_000_000).map(|k| if k % 2 == 0 { 1.0 } else { -1.0 }).collect();
        let n = awgn_for_snr(&reference, NoiseSpec { snr_db: 10.0, seed: RngSeed(1) }).unwrap();
        let v = variance(&n);
        assert!((v - 0.1).abs() < 0.001, "{v}");
        let mean = n.iter().sum::<f64>() / n.len() as f64;
        assert!(mean.abs() < 5.0 * (0.1f64 / 1e6).sqrt());
    }

    #[test]
    fn awgn_errors() {
        let spec = NoiseSpec { snr_db: 10.0, seed: RngSeed(0) };
        assert_eq!(awgn_for_snr(&[], spec), Err(Error::EmptySequence));
        assert_eq!(awgn_for_snr(&[2.0, 2.0], spec), Err(Error::ZeroVariance));
        let bad = NoiseSpec { snr_db: f64::INFINITY, seed: RngSeed(0) };
        assert_eq!(awgn_for_snr(&[1.0, -1.0], bad), Err(Error::InvalidSnr));
    }

    #[test]
    fn noise_is_reproducible() {
        let spec = NoiseSpec { snr_db: 3.0, seed: RngSeed(77) };
        let r = vec![1.0, -1.0, 0.5, 2.0];
        let a = awgn_for_snr(&r, spec).unwrap();
        let b = awgn_for_snr(&r, spec).unwrap();
        assert_eq!(
            a.iter().map(|x| x.to_bits()).collect::<Vec<_>>(),
            b.iter().map(|x| x.to_bits()).collect::<Vec<_>>()
        );
    }
}
