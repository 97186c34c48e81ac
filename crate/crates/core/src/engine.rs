//! TLF and DTLF iterations with their descent (MDUS) and boundedness (BUS)
//! guards.

use crate::baseline::{track_psnr, Solution};
use crate::denoise::{denoise, DenoiserSpec};
use crate::error::Result;
use crate::feasibility::{hqs, Anchor, FeasibilityModel};
use crate::problem::{CompositeProblem, SolverParams};
use crate::tensor::ImageTensor;
use crate::trace::{relative_change, BusBranch, IterateRecord, IterateTrace, MdusBranch, Method};

#[derive(Debug, Clone, PartialEq)]
pub struct MdusOutcome {
    pub x: ImageTensor,
    pub alpha: f64,
    pub branch: MdusBranch,
    /// Objective at the returned point.
    pub objective: f64,
}

/// Keeps `v` if it does not increase the objective relative to `x_f`,
/// otherwise falls back to `x_f`. `alpha` decays by `gamma` either way.
pub fn mdus(
    prob: &CompositeProblem,
    v: ImageTensor,
    x_f: ImageTensor,
    alpha: f64,
    gamma: f64,
) -> Result<MdusOutcome> {
    mdus_by(|x| prob.objective(x), v, x_f, alpha, gamma)
}

/// [`mdus`] against an arbitrary objective.
pub fn mdus_by(
    objective: impl Fn(&ImageTensor) -> Result<f64>,
    v: ImageTensor,
    x_f: ImageTensor,
    alpha: f64,
    gamma: f64,
) -> Result<MdusOutcome> {
    let f_v = objective(&v)?;
    let f_f = objective(&x_f)?;
    let (x, branch, objective) = if f_v <= f_f {
        (v, MdusBranch::AcceptedV, f_v)
    } else {
        (x_f, MdusBranch::FellBackXF, f_f)
    };
    Ok(MdusOutcome {
        x,
        alpha: gamma * alpha,
        branch,
        objective,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct BusOutcome {
    pub u: ImageTensor,
    pub mu: f64,
    pub branch: BusBranch,
    pub norm_xgmu_x: f64,
    pub norm_xg_x: f64,
}

/// Keeps the data-driven point `z` while `||x_gmu - x|| <= c ||x_g - x||`;
/// otherwise returns the model-based aggregation and shrinks `mu` by `beta`.
#[allow(clippy::too_many_arguments)]
pub fn bus(
    x: &ImageTensor,
    x_g: &ImageTensor,
    x_gmu: &ImageTensor,
    z: ImageTensor,
    x_f: &ImageTensor,
    alpha: f64,
    mu: f64,
    beta: f64,
    c: f64,
) -> Result<BusOutcome> {
    let norm_xgmu_x = x_gmu.distance(x)?;
    let norm_xg_x = x_g.distance(x)?;
    if norm_xgmu_x <= c * norm_xg_x {
        Ok(BusOutcome {
            u: z,
            mu,
            branch: BusBranch::AcceptedZ,
            norm_xgmu_x,
            norm_xg_x,
        })
    } else {
        Ok(BusOutcome {
            u: ImageTensor::blend(alpha, x_g, x_f)?,
            mu: beta * mu,
            branch: BusBranch::FellBackXG,
            norm_xgmu_x,
            norm_xg_x,
        })
    }
}

/// Model-based TLF. `feas` lives in image space; any anchor it carries is
/// ignored.
pub fn tlf_solve(
    prob: &CompositeProblem,
    feas: &FeasibilityModel,
    params: &SolverParams,
    x0: &ImageTensor,
    reference: Option<&ImageTensor>,
) -> Result<Solution> {
    run(prob, feas, None, params, x0, reference)
}

/// Data-driven TLF with `denoiser` supplying the proximal anchor.
pub fn dtlf_solve(
    prob: &CompositeProblem,
    feas: &FeasibilityModel,
    denoiser: &DenoiserSpec,
    params: &SolverParams,
    x0: &ImageTensor,
    reference: Option<&ImageTensor>,
) -> Result<Solution> {
    run(prob, feas, Some(denoiser), params, x0, reference)
}

fn run(
    prob: &CompositeProblem,
    feas: &FeasibilityModel,
    denoiser: Option<&DenoiserSpec>,
    params: &SolverParams,
    x0: &ImageTensor,
    reference: Option<&ImageTensor>,
) -> Result<Solution> {
    params.validate(prob.lipschitz())?;
    prob.data_op().shape().ensure_eq(x0.shape())?;
    feas.shape().ensure_eq(prob.observation().shape())?;
    let method = if denoiser.is_some() { Method::Dtlf } else { Method::Tlf };
    let mut trace = IterateTrace::new(method, prob.objective(x0)?);
    let mut x = x0.clone();
    let mut alpha = params.alpha0;
    let mut mu = params.mu0;

    for k in 0..params.max_iters {
        let x_f = prob.pg_step(&x, params.step)?;
        let image = prob.to_image(&x)?;
        let x_g = prob.from_image(&hqs(feas, None, &image)?)?;

        let (u, bus_branch, norm_xg_x, norm_xgmu_x, mu_used) = match denoiser {
            None => {
                let v = ImageTensor::blend(alpha, &x_g, &x_f)?;
                (v, BusBranch::NotApplicable, x_g.distance(&x)?, None, None)
            }
            Some(spec) => match data_driven_point(prob, feas, spec, &image, mu, k) {
                Ok(x_gmu) => {
                    let z = ImageTensor::blend(alpha, &x_gmu, &x_f)?;
                    let out = bus(&x, &x_g, &x_gmu, z, &x_f, alpha, mu, params.beta, params.c)?;
                    let used = mu;
                    mu = out.mu;
                    (out.u, out.branch, out.norm_xg_x, Some(out.norm_xgmu_x), Some(used))
                }
                Err(crate::Error::Denoiser(_)) => {
                    let u = ImageTensor::blend(alpha, &x_g, &x_f)?;
                    let used = mu;
                    mu *= params.beta;
                    (u, BusBranch::FellBackXG, x_g.distance(&x)?, None, Some(used))
                }
                Err(e) => return Err(e),
            },
        };

        let norm_xf_x = x_f.distance(&x)?;
        let alpha_used = alpha;
        let out = mdus(prob, u, x_f, alpha, params.gamma)?;
        alpha = out.alpha;
        let rel_err = relative_change(out.x.distance(&x)?, out.x.norm());
        trace.records.push(IterateRecord {
            k,
            objective: out.objective,
            rel_err,
            norm_xf_x,
            norm_xg_x: Some(norm_xg_x),
            norm_xgmu_x,
            alpha: Some(alpha_used),
            mu: mu_used,
            mdus: out.branch,
            bus: bus_branch,
            psnr: track_psnr(prob, &out.x, reference)?,
        });
        x = out.x;
        if rel_err <= params.rel_tol {
            break;
        }
    }
    Ok(Solution { x, trace })
}

/// Denoises the current image and solves the anchored feasibility model,
/// returning the result in problem space.
fn data_driven_point(
    prob: &CompositeProblem,
    feas: &FeasibilityModel,
    spec: &DenoiserSpec,
    image: &ImageTensor,
    mu: f64,
    k: usize,
) -> Result<ImageTensor> {
    let anchor = Anchor {
        point: denoise(spec, image, k)?,
        mu,
    };
    prob.from_image(&hqs(feas, Some(&anchor), image)?)
}
