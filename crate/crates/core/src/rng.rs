//! Seeded 64-bit linear congruential generator with Box–Muller normals.
//!
//! The generator is fixed so synthetic experiments reproduce across
//! implementations: `state <- state * 6364136223846793005 + 1442695040888963407`
//! (mod 2^64), uniforms take the top 53 bits of the new state, and normals
//! are produced in pairs `r cos(2 pi u2)`, `r sin(2 pi u2)` with
//! `r = sqrt(-2 ln(1 - u1))`.

use std::f64::consts::PI;

use crate::tensor::{ImageTensor, Shape};

const MULTIPLIER: u64 = 6364136223846793005;
const INCREMENT: u64 = 1442695040888963407;

#[derive(Debug, Clone)]
pub struct Lcg64 {
    state: u64,
    spare: Option<f64>,
}

impl Lcg64 {
    pub fn new(seed: u64) -> Self {
        Lcg64 {
            state: seed,
            spare: None,
        }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_mul(MULTIPLIER).wrapping_add(INCREMENT);
        self.state
    }

    /// Uniform in `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    pub fn normal(&mut self) -> f64 {
        if let Some(z) = self.spare.take() {
            return z;
        }
        let u1 = 1.0 - self.uniform();
        let u2 = self.uniform();
        let r = (-2.0 * u1.ln()).sqrt();
        let (s, c) = (2.0 * PI * u2).sin_cos();
        self.spare = Some(r * s);
        r * c
    }

    pub fn uniform_tensor(&mut self, shape: Shape, lo: f64, hi: f64) -> ImageTensor {
        ImageTensor::from_fn(shape, |_, _, _| lo + (hi - lo) * self.uniform())
    }
}

/// Adds zero-mean Gaussian noise whose standard deviation is `percent` of a
/// unit peak, i.e. `sigma = percent / 100`.
pub fn add_gaussian_noise(x: &ImageTensor, percent: f64, seed: u64) -> ImageTensor {
    let sigma = percent / 100.0;
    let mut rng = Lcg64::new(seed);
    x.map(|v| v + sigma * rng.normal())
}
