//! Two-dimensional FFTs over single image planes.

use std::cell::RefCell;
use std::sync::Arc;

use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

thread_local! {
    static PLANNER: RefCell<FftPlanner<f64>> = RefCell::new(FftPlanner::new());
}

/// Planned forward and inverse transforms for an `height x width` plane.
pub(crate) struct Fft2 {
    height: usize,
    width: usize,
    row_fwd: Arc<dyn Fft<f64>>,
    row_inv: Arc<dyn Fft<f64>>,
    col_fwd: Arc<dyn Fft<f64>>,
    col_inv: Arc<dyn Fft<f64>>,
}

impl Fft2 {
    pub fn new(height: usize, width: usize) -> Self {
        PLANNER.with(|p| {
            let mut p = p.borrow_mut();
            Fft2 {
                height,
                width,
                row_fwd: p.plan_fft_forward(width),
                row_inv: p.plan_fft_inverse(width),
                col_fwd: p.plan_fft_forward(height),
                col_inv: p.plan_fft_inverse(height),
            }
        })
    }

    pub fn forward_real(&self, plane: &[f64]) -> Vec<Complex64> {
        let mut buf: Vec<Complex64> = plane.iter().map(|&v| Complex64::new(v, 0.0)).collect();
        self.transform(&mut buf, true);
        buf
    }

    /// Inverse transform keeping only the real part, normalized by `1/(h w)`.
    pub fn inverse_real(&self, mut spectrum: Vec<Complex64>) -> Vec<f64> {
        self.transform(&mut spectrum, false);
        let norm = 1.0 / (self.height * self.width) as f64;
        spectrum.into_iter().map(|c| c.re * norm).collect()
    }

    fn transform(&self, buf: &mut [Complex64], forward: bool) {
        let (row, col) = if forward {
            (&self.row_fwd, &self.col_fwd)
        } else {
            (&self.row_inv, &self.col_inv)
        };
        for r in buf.chunks_exact_mut(self.width) {
            row.process(r);
        }
        let mut column = vec![Complex64::new(0.0, 0.0); self.height];
        for j in 0..self.width {
            for i in 0..self.height {
                column[i] = buf[i * self.width + j];
            }
            col.process(&mut column);
            for i in 0..self.height {
                buf[i * self.width + j] = column[i];
            }
        }
    }
}

/// Applies a circulant filter with the given transfer function to every
/// channel of channel-planar `data`.
pub(crate) fn filter_planes(
    data: &[f64],
    height: usize,
    width: usize,
    transfer: &[Complex64],
    conjugate: bool,
) -> Vec<f64> {
    let fft = Fft2::new(height, width);
    let mut out = Vec::with_capacity(data.len());
    for plane in data.chunks_exact(height * width) {
        let mut spec = fft.forward_real(plane);
        for (s, t) in spec.iter_mut().zip(transfer) {
            *s *= if conjugate { t.conj() } else { *t };
        }
        out.extend(fft.inverse_real(spec));
    }
    out
}
