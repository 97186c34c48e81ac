//! Orthonormal multi-level 2-D Haar transform.
//!
//! Coefficients use the standard pyramid layout: after each level the
//! approximation band occupies the top-left quadrant of the region that was
//! transformed, and the next level recurses into it.

use std::f64::consts::FRAC_1_SQRT_2;

use crate::error::{Error, Result};
use crate::tensor::{ImageTensor, Shape};

pub const DEFAULT_LEVELS: usize = 3;

pub fn check_levels(shape: Shape, levels: usize) -> Result<()> {
    let block = 1usize
        .checked_shl(levels as u32)
        .ok_or_else(|| Error::InvalidShape(format!("{levels} wavelet levels is too many")))?;
    if !shape.height.is_multiple_of(block) || !shape.width.is_multiple_of(block) {
        return Err(Error::InvalidShape(format!(
            "{shape} is not divisible by 2^{levels} as required by the wavelet transform"
        )));
    }
    Ok(())
}

pub fn wavelet_forward(x: &ImageTensor, levels: usize) -> Result<ImageTensor> {
    check_levels(x.shape(), levels)?;
    let (h, w) = (x.height(), x.width());
    let mut out = x.clone();
    let mut scratch = vec![0.0; h.max(w)];
    for c in 0..x.channels() {
        let plane = out.plane_mut(c);
        let (mut rh, mut rw) = (h, w);
        for _ in 0..levels {
            for i in 0..rh {
                analyze(&mut plane[i * w..i * w + rw], &mut scratch);
            }
            let mut col = vec![0.0; rh];
            for j in 0..rw {
                for i in 0..rh {
                    col[i] = plane[i * w + j];
                }
                analyze(&mut col, &mut scratch);
                for i in 0..rh {
                    plane[i * w + j] = col[i];
                }
            }
            rh /= 2;
            rw /= 2;
        }
    }
    Ok(out)
}

pub fn wavelet_inverse(coeffs: &ImageTensor, levels: usize) -> Result<ImageTensor> {
    check_levels(coeffs.shape(), levels)?;
    let (h, w) = (coeffs.height(), coeffs.width());
    let mut out = coeffs.clone();
    let mut scratch = vec![0.0; h.max(w)];
    for c in 0..coeffs.channels() {
        let plane = out.plane_mut(c);
        for level in (0..levels).rev() {
            let (rh, rw) = (h >> level, w >> level);
            let mut col = vec![0.0; rh];
            for j in 0..rw {
                for i in 0..rh {
                    col[i] = plane[i * w + j];
                }
                synthesize(&mut col, &mut scratch);
                for i in 0..rh {
                    plane[i * w + j] = col[i];
                }
            }
            for i in 0..rh {
                synthesize(&mut plane[i * w..i * w + rw], &mut scratch);
            }
        }
    }
    Ok(out)
}

fn analyze(v: &mut [f64], scratch: &mut [f64]) {
    let half = v.len() / 2;
    for k in 0..half {
        let (a, b) = (v[2 * k], v[2 * k + 1]);
        scratch[k] = (a + b) * FRAC_1_SQRT_2;
        scratch[half + k] = (a - b) * FRAC_1_SQRT_2;
    }
    v.copy_from_slice(&scratch[..v.len()]);
}

fn synthesize(v: &mut [f64], scratch: &mut [f64]) {
    let half = v.len() / 2;
    for k in 0..half {
        let (s, d) = (v[k], v[half + k]);
        scratch[2 * k] = (s + d) * FRAC_1_SQRT_2;
        scratch[2 * k + 1] = (s - d) * FRAC_1_SQRT_2;
    }
    v.copy_from_slice(&scratch[..v.len()]);
}
