//! In-process denoisers.

use crate::error::Result;
use crate::feasibility::{solve_g, FeasibilityModel};
use crate::operator::LinearOperator;
use crate::prox::{prox_lp, Exponent, ProxSpec};
use crate::tensor::ImageTensor;
use crate::wavelet::{wavelet_forward, wavelet_inverse, DEFAULT_LEVELS};

pub const TV_ROF_ITERS: usize = 10;

/// Anisotropic total variation `sum |grad_h x| + |grad_v x|` with circular
/// differences.
pub fn total_variation(x: &ImageTensor) -> f64 {
    let s = x.shape();
    let mut tv = 0.0;
    for c in 0..s.channels {
        for i in 0..s.height {
            for j in 0..s.width {
                let v = x.get(i, j, c);
                tv += (x.get(i, (j + 1) % s.width, c) - v).abs();
                tv += (x.get((i + 1) % s.height, j, c) - v).abs();
            }
        }
    }
    tv
}

/// Approximate ROF: `min 1/2 ||u - x||^2 + strength * TV(u)` by splitting.
pub fn tv_rof(x: &ImageTensor, strength: f64) -> Result<ImageTensor> {
    let rho = 4.0 * strength;
    let model = FeasibilityModel::new(LinearOperator::identity(x.shape()), x.clone(), strength, Exponent::One)?
        .with_rho(rho, rho)?
        .with_hqs_iters(TV_ROF_ITERS)?;
    solve_g(&model, x)
}

/// Causal plus anti-causal first-order recursive smoothing along rows then
/// columns, with feedback `exp(-sqrt(2)/sigma)`.
pub fn recursive_filter(x: &ImageTensor, sigma: f64) -> ImageTensor {
    let a = (-std::f64::consts::SQRT_2 / sigma).exp();
    let s = x.shape();
    let mut out = x.clone();
    let mut line = Vec::new();
    for c in 0..s.channels {
        let plane = out.plane_mut(c);
        for i in 0..s.height {
            line.clear();
            line.extend_from_slice(&plane[i * s.width..(i + 1) * s.width]);
            smooth_line(&mut line, a);
            plane[i * s.width..(i + 1) * s.width].copy_from_slice(&line);
        }
        for j in 0..s.width {
            line.clear();
            line.extend((0..s.height).map(|i| plane[i * s.width + j]));
            smooth_line(&mut line, a);
            for (i, &v) in line.iter().enumerate() {
                plane[i * s.width + j] = v;
            }
        }
    }
    out
}

fn smooth_line(line: &mut [f64], a: f64) {
    for n in 1..line.len() {
        line[n] = (1.0 - a) * line[n] + a * line[n - 1];
    }
    for n in (0..line.len().saturating_sub(1)).rev() {
        line[n] = (1.0 - a) * line[n] + a * line[n + 1];
    }
}

/// Separable Gaussian blur with circular boundaries and radius `ceil(3 sigma)`.
pub fn gaussian(x: &ImageTensor, sigma: f64) -> ImageTensor {
    let radius = (3.0 * sigma).ceil() as isize;
    let mut taps: Vec<f64> = (-radius..=radius)
        .map(|d| (-(d * d) as f64 / (2.0 * sigma * sigma)).exp())
        .collect();
    let total: f64 = taps.iter().sum();
    taps.iter_mut().for_each(|t| *t /= total);

    let s = x.shape();
    let (h, w) = (s.height as isize, s.width as isize);
    let wrap = |i: isize, n: isize| i.rem_euclid(n) as usize;
    let mut tmp = vec![0.0; s.plane_len()];
    let mut out = x.clone();
    for c in 0..s.channels {
        let src = x.plane(c);
        for i in 0..h {
            for j in 0..w {
                tmp[(i * w + j) as usize] = taps
                    .iter()
                    .zip(-radius..)
                    .map(|(t, d)| t * src[i as usize * s.width + wrap(j + d, w)])
                    .sum();
            }
        }
        let dst = out.plane_mut(c);
        for i in 0..h {
            for j in 0..w {
                dst[(i * w + j) as usize] = taps
                    .iter()
                    .zip(-radius..)
                    .map(|(t, d)| t * tmp[wrap(i + d, h) * s.width + j as usize])
                    .sum();
            }
        }
    }
    out
}

/// Square-window median with replicated borders.
pub fn median(x: &ImageTensor, radius: usize) -> ImageTensor {
    if radius == 0 {
        return x.clone();
    }
    let s = x.shape();
    let r = radius as isize;
    let clamp = |i: isize, n: usize| i.clamp(0, n as isize - 1) as usize;
    let mut window = Vec::with_capacity((2 * radius + 1).pow(2));
    ImageTensor::from_fn(s, |i, j, c| {
        window.clear();
        for di in -r..=r {
            for dj in -r..=r {
                window.push(x.get(clamp(i as isize + di, s.height), clamp(j as isize + dj, s.width), c));
            }
        }
        let mid = window.len() / 2;
        *window.select_nth_unstable_by(mid, f64::total_cmp).1
    })
}

/// Number of Haar levels used by the shrinkage denoiser for this shape.
pub fn shrink_levels(x: &ImageTensor) -> usize {
    let mut levels = 0;
    while levels < DEFAULT_LEVELS
        && x.height().is_multiple_of(1 << (levels + 1))
        && x.width().is_multiple_of(1 << (levels + 1))
    {
        levels += 1;
    }
    levels
}

/// Soft-thresholding of Haar coefficients.
pub fn wavelet_shrink(x: &ImageTensor, threshold: f64) -> Result<ImageTensor> {
    let levels = shrink_levels(x);
    let coeffs = wavelet_forward(x, levels)?;
    let shrunk = prox_lp(&coeffs, ProxSpec::new(Exponent::One, threshold)?);
    wavelet_inverse(&shrunk, levels)
}
