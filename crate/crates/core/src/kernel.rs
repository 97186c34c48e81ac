//! Blur kernels with odd support, centered on the middle tap.

use crate::error::{Error, Result};

const NORMALIZATION_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct BlurKernel {
    rows: usize,
    cols: usize,
    taps: Vec<f64>,
}

impl BlurKernel {
    /// Builds a kernel from row-major taps and rescales them to sum to one.
    pub fn new(rows: usize, cols: usize, taps: Vec<f64>) -> Result<Self> {
        let mut k = Self::unnormalized(rows, cols, taps)?;
        let sum: f64 = k.taps.iter().sum();
        if sum.abs() < 1e-12 {
            return Err(Error::validation("kernel taps sum to zero"));
        }
        k.taps.iter_mut().for_each(|t| *t /= sum);
        Ok(k)
    }

    /// Builds a kernel without normalizing the taps. Meant for operator tests.
    pub fn unnormalized(rows: usize, cols: usize, taps: Vec<f64>) -> Result<Self> {
        if rows == 0 || cols == 0 || rows.is_multiple_of(2) || cols.is_multiple_of(2) {
            return Err(Error::validation(format!(
                "kernel dimensions must be odd, got {rows}x{cols}"
            )));
        }
        if taps.len() != rows * cols {
            return Err(Error::validation(format!(
                "{rows}x{cols} kernel needs {} taps, got {}",
                rows * cols,
                taps.len()
            )));
        }
        if taps.iter().any(|t| !t.is_finite()) {
            return Err(Error::validation("kernel taps must be finite"));
        }
        Ok(BlurKernel { rows, cols, taps })
    }

    pub fn delta() -> Self {
        BlurKernel {
            rows: 1,
            cols: 1,
            taps: vec![1.0],
        }
    }

    /// Isotropic Gaussian on a `size x size` support.
    pub fn gaussian(size: usize, sigma: f64) -> Result<Self> {
        if sigma <= 0.0 {
            return Err(Error::validation("gaussian sigma must be positive"));
        }
        let c = (size / 2) as f64;
        let mut taps = Vec::with_capacity(size * size);
        for i in 0..size {
            for j in 0..size {
                let (di, dj) = (i as f64 - c, j as f64 - c);
                taps.push((-(di * di + dj * dj) / (2.0 * sigma * sigma)).exp());
            }
        }
        Self::new(size, size, taps)
    }

    /// Normalized line kernel of the given odd length at `angle` radians.
    pub fn motion(length: usize, angle: f64) -> Result<Self> {
        let size = length | 1;
        let c = (size / 2) as f64;
        let (s, co) = angle.sin_cos();
        let mut taps = vec![0.0; size * size];
        let steps = 4 * size;
        for t in 0..=steps {
            let r = -c + 2.0 * c * t as f64 / steps as f64;
            let i = (c - r * s).round() as usize;
            let j = (c + r * co).round() as usize;
            taps[i * size + j] = 1.0;
        }
        Self::new(size, size, taps)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn taps(&self) -> &[f64] {
        &self.taps
    }

    pub fn tap(&self, i: usize, j: usize) -> f64 {
        self.taps[i * self.cols + j]
    }

    pub fn is_normalized(&self) -> bool {
        (self.taps.iter().sum::<f64>() - 1.0).abs() <= NORMALIZATION_TOL
    }
}
