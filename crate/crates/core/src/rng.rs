//! Seeded random inputs.
//!
//! The stream is ChaCha20 (`rand_chacha::ChaCha20Rng::seed_from_u64`). A
//! uniform draw is `(next_u64 >> 11) * 2^-53`. A complex Gaussian entry takes
//! two uniforms `u1, u2` and returns `r e^{2πi u2} / sqrt(2)` with
//! `r = sqrt(-2 ln(1 - u1))`, so `E|z|^2 = 1`. Sub-streams are keyed by
//! `derive_seed(seed, label)`, a 64-bit FNV-1a hash of the label mixed with the seed.

use num_complex::Complex64;
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha20Rng;

use crate::group::GroupSpec;
use crate::spectral::{DualFunction, GFunction};

pub fn derive_seed(seed: u64, label: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in seed.to_le_bytes().iter().chain(label.as_bytes()) {
        h ^= *b as u64;
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

pub struct Gaussian {
    rng: ChaCha20Rng,
}

impl Gaussian {
    pub fn new(seed: u64) -> Self {
        Self { rng: ChaCha20Rng::seed_from_u64(seed) }
    }

    pub fn keyed(seed: u64, label: &str) -> Self {
        Self::new(derive_seed(seed, label))
    }

    pub fn uniform(&mut self) -> f64 {
        (self.rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn below(&mut self, n: usize) -> usize {
        ((self.uniform() * n as f64) as usize).min(n - 1)
    }

    pub fn complex(&mut self) -> Complex64 {
        let u1 = self.uniform();
        let u2 = self.uniform();
        let r = (-2.0 * (1.0 - u1).ln()).sqrt() / std::f64::consts::SQRT_2;
        Complex64::from_polar(r, 2.0 * std::f64::consts::PI * u2)
    }

    pub fn real(&mut self) -> f64 {
        self.complex().re * std::f64::consts::SQRT_2
    }

    pub fn vector(&mut self, n: usize) -> Vec<Complex64> {
        (0..n).map(|_| self.complex()).collect()
    }

    pub fn g_function(&mut self, spec: &GroupSpec) -> GFunction {
        GFunction::new(spec, self.vector(spec.order())).expect("finite draws")
    }

    pub fn dual_function(&mut self, spec: &GroupSpec) -> DualFunction {
        DualFunction::new(spec, self.vector(spec.order())).expect("finite draws")
    }
}
