//! Reference first-order solvers: PG, APG and monotone APG.

use crate::error::Result;
use crate::metrics::psnr;
use crate::problem::{CompositeProblem, SolverParams};
use crate::tensor::ImageTensor;
use crate::trace::{relative_change, BusBranch, IterateRecord, IterateTrace, MdusBranch, Method};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Baseline {
    Pg,
    Apg,
    Mapg,
}

impl Baseline {
    pub fn method(self) -> Method {
        match self {
            Baseline::Pg => Method::Pg,
            Baseline::Apg => Method::Apg,
            Baseline::Mapg => Method::Mapg,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Solution {
    /// Final iterate in the problem's variable space.
    pub x: ImageTensor,
    pub trace: IterateTrace,
}

/// PSNR of a problem-space iterate against an image-space reference.
pub(crate) fn track_psnr(
    prob: &CompositeProblem,
    x: &ImageTensor,
    reference: Option<&ImageTensor>,
) -> Result<Option<f64>> {
    reference
        .map(|r| psnr(&prob.to_image(x)?, r))
        .transpose()
}

/// Runs one of the baseline solvers from `x0` (problem space). `reference`
/// is an optional ground-truth image used only for the PSNR column.
pub fn solve_baseline(
    prob: &CompositeProblem,
    method: Baseline,
    params: &SolverParams,
    x0: &ImageTensor,
    reference: Option<&ImageTensor>,
) -> Result<Solution> {
    params.validate(prob.lipschitz())?;
    prob.data_op().shape().ensure_eq(x0.shape())?;
    let t = params.step;
    let mut trace = IterateTrace::new(method.method(), prob.objective(x0)?);
    let mut x = x0.clone();
    let mut x_prev = x0.clone();

    for k in 0..params.max_iters {
        let (next, anchor) = match method {
            Baseline::Pg => (prob.pg_step(&x, t)?, x.clone()),
            Baseline::Apg => {
                let y = momentum_point(&x, &x_prev, k)?;
                (prob.pg_step(&y, t)?, y)
            }
            Baseline::Mapg => {
                let y = momentum_point(&x, &x_prev, k)?;
                let from_y = prob.pg_step(&y, t)?;
                let from_x = prob.pg_step(&x, t)?;
                if prob.objective(&from_y)? <= prob.objective(&from_x)? {
                    (from_y, y)
                } else {
                    (from_x, x.clone())
                }
            }
        };
        let step_norm = next.distance(&x)?;
        let rel_err = relative_change(step_norm, next.norm());
        trace.records.push(IterateRecord {
            k,
            objective: prob.objective(&next)?,
            rel_err,
            norm_xf_x: next.distance(&anchor)?,
            norm_xg_x: None,
            norm_xgmu_x: None,
            alpha: None,
            mu: None,
            mdus: MdusBranch::NotApplicable,
            bus: BusBranch::NotApplicable,
            psnr: track_psnr(prob, &next, reference)?,
        });
        x_prev = std::mem::replace(&mut x, next);
        if rel_err <= params.rel_tol {
            break;
        }
    }
    Ok(Solution { x, trace })
}

/// `x + (k - 1)/(k + 2) (x - x_prev)` with `k` counted from 1.
fn momentum_point(x: &ImageTensor, x_prev: &ImageTensor, k: usize) -> Result<ImageTensor> {
    let k = (k + 1) as f64;
    let w = (k - 1.0) / (k + 2.0);
    if w == 0.0 {
        return Ok(x.clone());
    }
    x.axpy(w, &x.sub(x_prev)?)
}
