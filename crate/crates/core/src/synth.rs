//! Deterministic synthetic test scenes and degradations.

use crate::error::Result;
use crate::kernel::BlurKernel;
use crate::operator::LinearOperator;
use crate::rng::{add_gaussian_noise, Lcg64};
use crate::tensor::{ImageTensor, Shape};

pub const FIXTURE_SIZE: usize = 64;
pub const FIXTURE_SEED: u64 = 42;
pub const FIXTURE_KERNEL_SIZE: usize = 9;
pub const FIXTURE_KERNEL_SIGMA: f64 = 1.5;
pub const FIXTURE_NOISE_PERCENT: f64 = 1.0;
pub const FIXTURE_MISSING_FRACTION: f64 = 0.4;
pub const RAIN_ANGLE: f64 = 1.2;
pub const RAIN_LENGTH: usize = 9;

/// Piecewise-smooth grayscale scene in `[0.05, 0.95]`: a shaded backdrop
/// with a disc, a rectangle, a triangle and a striped patch.
pub fn scene(height: usize, width: usize) -> ImageTensor {
    let (h, w) = (height as f64, width as f64);
    ImageTensor::from_fn(Shape::new(height, width, 1), |i, j, _| {
        let (y, x) = ((i as f64 + 0.5) / h, (j as f64 + 0.5) / w);
        let mut v = 0.25 + 0.2 * x + 0.1 * y;
        if (x - 0.3).powi(2) + (y - 0.35).powi(2) < 0.04 {
            v = 0.85 - 0.2 * y;
        }
        if (0.55..0.9).contains(&x) && (0.15..0.45).contains(&y) {
            v = 0.15;
        }
        if y > 0.55 && y < 0.9 && (x - 0.3).abs() < (y - 0.55) * 0.6 {
            v = 0.7;
        }
        if (0.6..0.9).contains(&x) && (0.6..0.9).contains(&y) {
            v = 0.5 + 0.3 * (x * 40.0).sin().signum();
        }
        v.clamp(0.05, 0.95)
    })
}

pub fn fixture_kernel() -> BlurKernel {
    BlurKernel::gaussian(FIXTURE_KERNEL_SIZE, FIXTURE_KERNEL_SIGMA).expect("valid fixture kernel")
}

/// Circular blur of `truth` plus seeded Gaussian noise.
pub fn blur_and_noise(truth: &ImageTensor, kernel: &BlurKernel, noise_percent: f64, seed: u64) -> Result<ImageTensor> {
    let blurred = LinearOperator::convolution(kernel.clone(), truth.shape())?.apply(truth)?;
    Ok(add_gaussian_noise(&blurred, noise_percent, seed))
}

/// Binary mask with roughly `missing` of the entries set to 0.
pub fn random_mask(shape: Shape, missing: f64, seed: u64) -> ImageTensor {
    let mut rng = Lcg64::new(seed);
    ImageTensor::from_fn(shape, |_, _, _| if rng.uniform() < missing { 0.0 } else { 1.0 })
}

/// Rain layer: sparse salt noise smeared by a line kernel along `angle`,
/// rescaled so its peak equals `amplitude`.
pub fn rain_layer(shape: Shape, density: f64, angle: f64, amplitude: f64, seed: u64) -> Result<ImageTensor> {
    let mut rng = Lcg64::new(seed);
    let salt = ImageTensor::from_fn(shape, |_, _, _| if rng.uniform() < density { 1.0 } else { 0.0 });
    let streaks = LinearOperator::convolution(BlurKernel::motion(RAIN_LENGTH, angle)?, shape)?
        .apply(&salt)?
        .map(|v| v.max(0.0));
    let peak = streaks.max();
    Ok(if peak > 0.0 {
        streaks.scale(amplitude / peak)
    } else {
        streaks
    })
}

#[derive(Debug, Clone)]
pub struct DeblurFixture {
    pub truth: ImageTensor,
    pub kernel: BlurKernel,
    pub blurry: ImageTensor,
}

/// 64x64 scene, 9x9 Gaussian blur (sigma 1.5), 1% noise, seed 42.
pub fn deblur_fixture() -> DeblurFixture {
    let truth = scene(FIXTURE_SIZE, FIXTURE_SIZE);
    let kernel = fixture_kernel();
    let blurry = blur_and_noise(&truth, &kernel, FIXTURE_NOISE_PERCENT, FIXTURE_SEED).expect("fixture shapes agree");
    DeblurFixture { truth, kernel, blurry }
}

#[derive(Debug, Clone)]
pub struct InpaintFixture {
    pub truth: ImageTensor,
    pub mask: ImageTensor,
    /// Observation with missing entries set to 0.
    pub observed: ImageTensor,
}

/// 64x64 scene with 40% of the pixels missing at random.
pub fn inpaint_fixture() -> InpaintFixture {
    let truth = scene(FIXTURE_SIZE, FIXTURE_SIZE);
    let mask = random_mask(truth.shape(), FIXTURE_MISSING_FRACTION, FIXTURE_SEED);
    let observed = truth.zip_map(&mask, |a, m| a * m).expect("same shape");
    InpaintFixture { truth, mask, observed }
}

#[derive(Debug, Clone)]
pub struct DerainFixture {
    pub background: ImageTensor,
    pub rain: ImageTensor,
    pub rainy: ImageTensor,
}

/// Background scene compressed to `[0.05, 0.55]` plus streaks of peak 0.45,
/// so the sum stays in `[0, 1]`.
pub fn derain_fixture() -> DerainFixture {
    let background = scene(FIXTURE_SIZE, FIXTURE_SIZE).map(|v| 0.05 + (v - 0.05) * 0.5 / 0.9);
    let rain = rain_layer(background.shape(), 0.02, RAIN_ANGLE, 0.45, FIXTURE_SEED).expect("fixture shapes agree");
    let rainy = background.add(&rain).expect("same shape");
    DerainFixture {
        background,
        rain,
        rainy,
    }
}
