//! Restoration quality metrics on a unit peak.

use crate::error::{Error, Result};
use crate::tensor::ImageTensor;

pub const PSNR_CAP_DB: f64 = 100.0;

const SSIM_WINDOW: usize = 11;
const SSIM_SIGMA: f64 = 1.5;
const SSIM_K1: f64 = 0.01;
const SSIM_K2: f64 = 0.03;

/// Peak signal-to-noise ratio in dB for peak 1.0, capped at 100 dB.
pub fn psnr(x: &ImageTensor, reference: &ImageTensor) -> Result<f64> {
    reference.shape().ensure_eq(x.shape())?;
    let mse = x.distance(reference)?.powi(2) / x.as_slice().len() as f64;
    if mse == 0.0 {
        return Ok(PSNR_CAP_DB);
    }
    Ok((10.0 * (1.0 / mse).log10()).min(PSNR_CAP_DB))
}

/// PSNR restricted to the entries where `mask` is nonzero.
pub fn psnr_masked(x: &ImageTensor, reference: &ImageTensor, mask: &ImageTensor) -> Result<f64> {
    reference.shape().ensure_eq(x.shape())?;
    reference.shape().ensure_eq(mask.shape())?;
    let mut sum = 0.0;
    let mut count = 0usize;
    for ((a, b), m) in x.as_slice().iter().zip(reference.as_slice()).zip(mask.as_slice()) {
        if *m != 0.0 {
            sum += (a - b) * (a - b);
            count += 1;
        }
    }
    if count == 0 {
        return Err(Error::validation("mask selects no pixels"));
    }
    let mse = sum / count as f64;
    if mse == 0.0 {
        return Ok(PSNR_CAP_DB);
    }
    Ok((10.0 * (1.0 / mse).log10()).min(PSNR_CAP_DB))
}

/// Mean structural similarity with an 11x11 Gaussian window (sigma 1.5),
/// K1 = 0.01, K2 = 0.03, peak 1.0. Color inputs are averaged over channels
/// first; only windows fully inside the image contribute.
pub fn ssim(x: &ImageTensor, reference: &ImageTensor) -> Result<f64> {
    reference.shape().ensure_eq(x.shape())?;
    let (h, w) = (x.height(), x.width());
    if h < SSIM_WINDOW || w < SSIM_WINDOW {
        return Err(Error::validation(format!(
            "SSIM needs at least {SSIM_WINDOW}x{SSIM_WINDOW} pixels, got {h}x{w}"
        )));
    }
    let a = luminance(x);
    let b = luminance(reference);
    let taps = gaussian_taps();

    let prod = |p: &[f64], q: &[f64]| -> Vec<f64> { p.iter().zip(q).map(|(u, v)| u * v).collect() };
    let mu_a = valid_filter(&a, h, w, &taps);
    let mu_b = valid_filter(&b, h, w, &taps);
    let aa = valid_filter(&prod(&a, &a), h, w, &taps);
    let bb = valid_filter(&prod(&b, &b), h, w, &taps);
    let ab = valid_filter(&prod(&a, &b), h, w, &taps);

    let c1 = SSIM_K1 * SSIM_K1;
    let c2 = SSIM_K2 * SSIM_K2;
    let mut total = 0.0;
    for k in 0..mu_a.len() {
        let (ma, mb) = (mu_a[k], mu_b[k]);
        let va = aa[k] - ma * ma;
        let vb = bb[k] - mb * mb;
        let cov = ab[k] - ma * mb;
        total += ((2.0 * ma * mb + c1) * (2.0 * cov + c2))
            / ((ma * ma + mb * mb + c1) * (va + vb + c2));
    }
    // rounding can push identical inputs a few ulps above 1
    Ok((total / mu_a.len() as f64).clamp(-1.0, 1.0))
}

fn luminance(x: &ImageTensor) -> Vec<f64> {
    let n = x.shape().plane_len();
    let c = x.channels();
    (0..n)
        .map(|k| (0..c).map(|ch| x.plane(ch)[k]).sum::<f64>() / c as f64)
        .collect()
}

fn gaussian_taps() -> Vec<f64> {
    let c = (SSIM_WINDOW / 2) as f64;
    let raw: Vec<f64> = (0..SSIM_WINDOW)
        .map(|i| {
            let d = i as f64 - c;
            (-d * d / (2.0 * SSIM_SIGMA * SSIM_SIGMA)).exp()
        })
        .collect();
    let s: f64 = raw.iter().sum();
    raw.into_iter().map(|t| t / s).collect()
}

/// Separable weighted sum over every fully contained window.
fn valid_filter(plane: &[f64], h: usize, w: usize, taps: &[f64]) -> Vec<f64> {
    let n = taps.len();
    let (oh, ow) = (h - n + 1, w - n + 1);
    let mut rows = vec![0.0; h * ow];
    for i in 0..h {
        for j in 0..ow {
            rows[i * ow + j] = (0..n).map(|t| taps[t] * plane[i * w + j + t]).sum();
        }
    }
    let mut out = vec![0.0; oh * ow];
    for i in 0..oh {
        for j in 0..ow {
            out[i * ow + j] = (0..n).map(|t| taps[t] * rows[(i + t) * ow + j]).sum();
        }
    }
    out
}
