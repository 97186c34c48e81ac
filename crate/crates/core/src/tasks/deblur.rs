use crate::error::Result;
use crate::feasibility::FeasibilityModel;
use crate::kernel::BlurKernel;
use crate::operator::LinearOperator;
use crate::problem::{CompositeProblem, Regularizer, VariableSpace};
use crate::prox::Exponent;
use crate::tensor::ImageTensor;
use crate::wavelet::{check_levels, DEFAULT_LEVELS};

/// Wavelet-sparse deblurring `1/2 ||K W^T c - b||^2 + lambda1 ||c||_p` with a
/// TV feasibility model `1/2 ||K x - b||^2 + lambda2 TV_q(x)`.
///
/// The Lipschitz constant is the exact `max |K(omega)|^2`.
pub fn build_deblur(
    blurry: &ImageTensor,
    kernel: &BlurKernel,
    lambda1: f64,
    p: Exponent,
    lambda2: f64,
    q: Exponent,
) -> Result<(CompositeProblem, FeasibilityModel)> {
    let shape = blurry.shape();
    check_levels(shape, DEFAULT_LEVELS)?;
    let blur = LinearOperator::convolution(kernel.clone(), shape)?;
    let lipschitz = blur.spectral_norm_sq().expect("convolution is circulant");
    let data_op = LinearOperator::compose(vec![
        LinearOperator::wavelet_inverse(DEFAULT_LEVELS, shape)?,
        blur.clone(),
    ])?;
    let prob = CompositeProblem::new(
        data_op,
        blurry.clone(),
        Regularizer::new(p, lambda1)?,
        lipschitz,
        VariableSpace::Wavelet {
            levels: DEFAULT_LEVELS,
        },
    )?;
    let feas = FeasibilityModel::new(blur, blurry.clone(), lambda2, q)?;
    Ok((prob, feas))
}
