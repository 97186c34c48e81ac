//! Linear operators with adjoints and operator-norm estimation.
//!
//! Convolution and the two finite-difference operators use circular
//! boundary conditions, so they (and any composition of them) are
//! diagonalized by the 2-D DFT.

use rustfft::num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fft::{filter_planes, Fft2};
use crate::kernel::BlurKernel;
use crate::rng::Lcg64;
use crate::tensor::{ImageTensor, Shape};
use crate::wavelet::{check_levels, wavelet_forward, wavelet_inverse};

pub const DEFAULT_POWER_ITERS: usize = 50;
const POWER_SEED: u64 = 0x5EED_0F1F;

#[derive(Debug, Clone, PartialEq)]
pub enum OperatorKind {
    Identity,
    Convolution(BlurKernel),
    /// Diagonal 0/1 operator.
    Mask(ImageTensor),
    /// Forward difference along rows: `x[i, j+1] - x[i, j]`, wrapping.
    GradientH,
    /// Forward difference along columns: `x[i+1, j] - x[i, j]`, wrapping.
    GradientV,
    WaveletForward { levels: usize },
    WaveletInverse { levels: usize },
    /// Applied first-to-last: `ops[0]` acts on the input.
    Composition(Vec<LinearOperator>),
}

/// A square linear map on images of a fixed shape.
#[derive(Debug, Clone, PartialEq)]
pub struct LinearOperator {
    kind: OperatorKind,
    shape: Shape,
}

impl LinearOperator {
    pub fn identity(shape: Shape) -> Self {
        LinearOperator {
            kind: OperatorKind::Identity,
            shape,
        }
    }

    pub fn convolution(kernel: BlurKernel, shape: Shape) -> Result<Self> {
        let limit = shape.height.min(shape.width);
        if kernel.rows() > limit || kernel.cols() > limit {
            return Err(Error::InvalidShape(format!(
                "{}x{} kernel does not fit a {shape} image",
                kernel.rows(),
                kernel.cols()
            )));
        }
        Ok(LinearOperator {
            kind: OperatorKind::Convolution(kernel),
            shape,
        })
    }

    /// Mask operator; every entry must be exactly 0 or 1.
    pub fn mask(mask: ImageTensor) -> Result<Self> {
        if mask.as_slice().iter().any(|&v| v != 0.0 && v != 1.0) {
            return Err(Error::validation("mask entries must be 0 or 1"));
        }
        Ok(LinearOperator {
            shape: mask.shape(),
            kind: OperatorKind::Mask(mask),
        })
    }

    pub fn gradient_h(shape: Shape) -> Self {
        LinearOperator {
            kind: OperatorKind::GradientH,
            shape,
        }
    }

    pub fn gradient_v(shape: Shape) -> Self {
        LinearOperator {
            kind: OperatorKind::GradientV,
            shape,
        }
    }

    pub fn wavelet_forward(levels: usize, shape: Shape) -> Result<Self> {
        check_levels(shape, levels)?;
        Ok(LinearOperator {
            kind: OperatorKind::WaveletForward { levels },
            shape,
        })
    }

    pub fn wavelet_inverse(levels: usize, shape: Shape) -> Result<Self> {
        check_levels(shape, levels)?;
        Ok(LinearOperator {
            kind: OperatorKind::WaveletInverse { levels },
            shape,
        })
    }

    pub fn compose(ops: Vec<LinearOperator>) -> Result<Self> {
        let shape = ops
            .first()
            .ok_or_else(|| Error::validation("empty composition"))?
            .shape;
        for op in &ops {
            shape.ensure_eq(op.shape)?;
        }
        Ok(LinearOperator {
            kind: OperatorKind::Composition(ops),
            shape,
        })
    }

    pub fn kind(&self) -> &OperatorKind {
        &self.kind
    }

    /// Input and output shape.
    pub fn shape(&self) -> Shape {
        self.shape
    }

    pub fn apply(&self, x: &ImageTensor) -> Result<ImageTensor> {
        self.shape.ensure_eq(x.shape())?;
        self.apply_unchecked(x, false)
    }

    pub fn adjoint(&self, y: &ImageTensor) -> Result<ImageTensor> {
        self.shape.ensure_eq(y.shape())?;
        self.apply_unchecked(y, true)
    }

    /// `A^T A x`
    pub fn normal(&self, x: &ImageTensor) -> Result<ImageTensor> {
        self.adjoint(&self.apply(x)?)
    }

    fn apply_unchecked(&self, x: &ImageTensor, transpose: bool) -> Result<ImageTensor> {
        let s = self.shape;
        Ok(match &self.kind {
            OperatorKind::Identity => x.clone(),
            OperatorKind::Convolution(k) => {
                let transfer = kernel_transfer(k, s.height, s.width);
                ImageTensor::from_raw(
                    s,
                    filter_planes(x.as_slice(), s.height, s.width, &transfer, transpose),
                )
            }
            OperatorKind::Mask(m) => x.zip_map(m, |a, b| a * b)?,
            OperatorKind::GradientH => difference(x, Axis::Row, transpose),
            OperatorKind::GradientV => difference(x, Axis::Column, transpose),
            OperatorKind::WaveletForward { levels } => {
                if transpose {
                    wavelet_inverse(x, *levels)?
                } else {
                    wavelet_forward(x, *levels)?
                }
            }
            OperatorKind::WaveletInverse { levels } => {
                if transpose {
                    wavelet_forward(x, *levels)?
                } else {
                    wavelet_inverse(x, *levels)?
                }
            }
            OperatorKind::Composition(ops) => {
                let mut cur = x.clone();
                if transpose {
                    for op in ops.iter().rev() {
                        cur = op.apply_unchecked(&cur, true)?;
                    }
                } else {
                    for op in ops {
                        cur = op.apply_unchecked(&cur, false)?;
                    }
                }
                cur
            }
        })
    }

    /// DFT eigenvalues of the operator on one plane, if it is circulant.
    pub fn circulant_spectrum(&self) -> Option<Vec<Complex64>> {
        let (h, w) = (self.shape.height, self.shape.width);
        match &self.kind {
            OperatorKind::Identity => Some(vec![Complex64::new(1.0, 0.0); h * w]),
            OperatorKind::Convolution(k) => Some(kernel_transfer(k, h, w)),
            OperatorKind::GradientH | OperatorKind::GradientV => {
                let plane_shape = Shape::new(h, w, 1);
                let mut delta = ImageTensor::zeros(plane_shape);
                delta[0] = 1.0;
                let axis = if self.kind == OperatorKind::GradientH {
                    Axis::Row
                } else {
                    Axis::Column
                };
                let response = difference(&delta, axis, false);
                Some(Fft2::new(h, w).forward_real(response.as_slice()))
            }
            OperatorKind::Composition(ops) => {
                let mut acc = vec![Complex64::new(1.0, 0.0); h * w];
                for op in ops {
                    let s = op.circulant_spectrum()?;
                    acc.iter_mut().zip(&s).for_each(|(a, b)| *a *= b);
                }
                Some(acc)
            }
            OperatorKind::Mask(_)
            | OperatorKind::WaveletForward { .. }
            | OperatorKind::WaveletInverse { .. } => None,
        }
    }

    pub fn is_circulant(&self) -> bool {
        self.circulant_spectrum().is_some()
    }

    /// `||A^T A||_2` read off the DFT eigenvalues for circulant operators.
    pub fn spectral_norm_sq(&self) -> Option<f64> {
        self.circulant_spectrum()
            .map(|s| s.iter().map(|c| c.norm_sqr()).fold(0.0, f64::max))
    }
}

/// Transfer function of a centered kernel on an `h x w` periodic grid.
pub(crate) fn kernel_transfer(k: &BlurKernel, h: usize, w: usize) -> Vec<Complex64> {
    let mut impulse = vec![0.0; h * w];
    let (ch, cw) = (k.rows() / 2, k.cols() / 2);
    for a in 0..k.rows() {
        for b in 0..k.cols() {
            let i = (a + h - ch) % h;
            let j = (b + w - cw) % w;
            impulse[i * w + j] += k.tap(a, b);
        }
    }
    Fft2::new(h, w).forward_real(&impulse)
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Axis {
    Row,
    Column,
}

/// Forward difference with wrap-around, or its adjoint (backward difference
/// with the opposite sign).
fn difference(x: &ImageTensor, axis: Axis, transpose: bool) -> ImageTensor {
    let s = x.shape();
    let (h, w) = (s.height, s.width);
    let mut out = ImageTensor::zeros(s);
    for c in 0..s.channels {
        let src = x.plane(c);
        let dst = out.plane_mut(c);
        for i in 0..h {
            for j in 0..w {
                let (next, prev) = match axis {
                    Axis::Row => (i * w + (j + 1) % w, i * w + (j + w - 1) % w),
                    Axis::Column => (((i + 1) % h) * w + j, ((i + h - 1) % h) * w + j),
                };
                let here = i * w + j;
                dst[here] = if transpose {
                    src[prev] - src[here]
                } else {
                    src[next] - src[here]
                };
            }
        }
    }
    out
}

/// Estimates `||A^T A||_2` by power iteration from a fixed pseudo-random
/// start vector. Returns the Rayleigh quotient `||A v||^2` of the last unit
/// iterate, which is nondecreasing in `iters`.
pub fn estimate_lipschitz(op: &LinearOperator, iters: usize) -> Result<f64> {
    if iters == 0 {
        return Err(Error::config("power iteration needs at least one iteration"));
    }
    let mut rng = Lcg64::new(POWER_SEED);
    let mut v = rng.uniform_tensor(op.shape(), -1.0, 1.0);
    let n = v.norm();
    v = v.scale(1.0 / n);
    let mut estimate = 0.0;
    for _ in 0..iters {
        let av = op.apply(&v)?;
        estimate = av.norm_sq();
        let next = op.adjoint(&av)?;
        let norm = next.norm();
        if norm == 0.0 {
            return Ok(0.0);
        }
        v = next.scale(1.0 / norm);
    }
    Ok(estimate)
}
