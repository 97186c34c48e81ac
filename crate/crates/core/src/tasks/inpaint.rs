use crate::error::Result;
use crate::feasibility::FeasibilityModel;
use crate::operator::LinearOperator;
use crate::problem::{CompositeProblem, Regularizer, VariableSpace};
use crate::prox::Exponent;
use crate::tensor::ImageTensor;
use crate::wavelet::{check_levels, DEFAULT_LEVELS};

/// Wavelet-sparse inpainting with a binary `mask` (1 = observed). Missing
/// entries of `observed` are ignored. The feasibility model is solved by
/// conjugate gradients.
pub fn build_inpaint(
    observed: &ImageTensor,
    mask: &ImageTensor,
    lambda1: f64,
    p: Exponent,
    lambda2: f64,
    q: Exponent,
) -> Result<(CompositeProblem, FeasibilityModel)> {
    let shape = observed.shape();
    check_levels(shape, DEFAULT_LEVELS)?;
    let m = LinearOperator::mask(mask.clone())?;
    m.shape().ensure_eq(shape)?;
    let b = m.apply(observed)?;
    let data_op = LinearOperator::compose(vec![
        LinearOperator::wavelet_inverse(DEFAULT_LEVELS, shape)?,
        m.clone(),
    ])?;
    let prob = CompositeProblem::new(
        data_op,
        b.clone(),
        Regularizer::new(p, lambda1)?,
        1.0,
        VariableSpace::Wavelet {
            levels: DEFAULT_LEVELS,
        },
    )?;
    let feas = FeasibilityModel::new(m, b, lambda2, q)?;
    Ok((prob, feas))
}
