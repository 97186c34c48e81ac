//! Two-layer rain removal `y = x_b + x_r` with wavelet codes for both layers.
//!
//! Objective over `(x_b, x_r, beta, gamma)`:
//!
//! ```text
//! 1/2 ||y - x_b - x_r||^2 + 1/2 ||x_b - W^T beta||^2 + 1/2 ||x_r - W^T gamma||^2
//!   + nu1 ||beta||_p1 + nu2 ||gamma||_p2 + box(x_b) + box(x_r)
//! ```

use crate::denoise::{denoise, DenoiserSpec};
use crate::error::{Error, Result};
use crate::feasibility::{hqs, Anchor, FeasibilityModel};
use crate::engine::{bus, mdus_by};
use crate::metrics::psnr;
use crate::operator::LinearOperator;
use crate::problem::SolverParams;
use crate::prox::{project_box01, prox_lp, Exponent, ProxSpec};
use crate::tensor::{ImageTensor, Shape};
use crate::trace::{relative_change, BusBranch, IterateRecord, IterateTrace, Method};
use crate::wavelet::{check_levels, wavelet_forward, wavelet_inverse, DEFAULT_LEVELS};

/// Lipschitz constant of the layer block of the smooth part.
const LAYER_LIPSCHITZ: f64 = 3.0;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DerainParams {
    /// Code sparsity weight of the background.
    pub nu1: f64,
    /// Code sparsity weight of the rain layer.
    pub nu2: f64,
    /// TV weight of the background feasibility model.
    pub rho1: f64,
    /// Sparsity weight of the rain feasibility model.
    pub rho2: f64,
    pub p1: Exponent,
    pub p2: Exponent,
    pub levels: usize,
}

impl Default for DerainParams {
    fn default() -> Self {
        DerainParams {
            nu1: 0.04,
            nu2: 0.04,
            rho1: 0.03,
            rho2: 0.005,
            p1: Exponent::One,
            p2: Exponent::One,
            levels: DEFAULT_LEVELS,
        }
    }
}

impl DerainParams {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [("nu1", self.nu1), ("nu2", self.nu2), ("rho1", self.rho1), ("rho2", self.rho2)] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::config(format!("{name} must be >= 0, got {v}")));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DerainState {
    pub x_b: ImageTensor,
    pub x_r: ImageTensor,
    pub beta: ImageTensor,
    pub gamma: ImageTensor,
    pub alpha: f64,
    pub mu: f64,
}

impl DerainState {
    /// Background = clipped observation, empty rain layer, fitted codes.
    pub fn initial(model: &DerainModel, solver: &SolverParams) -> Result<Self> {
        let x_b = project_box01(&model.y);
        let x_r = ImageTensor::zeros(model.y.shape());
        model.state(x_b, x_r, solver.alpha0, solver.mu0)
    }

    fn layers(&self) -> ImageTensor {
        stack(&self.x_b, &self.x_r)
    }
}

#[derive(Debug, Clone)]
pub struct DerainModel {
    y: ImageTensor,
    params: DerainParams,
}

impl DerainModel {
    pub fn new(y: ImageTensor, params: DerainParams) -> Result<Self> {
        params.validate()?;
        check_levels(y.shape(), params.levels)?;
        Ok(DerainModel { y, params })
    }

    pub fn observation(&self) -> &ImageTensor {
        &self.y
    }

    pub fn params(&self) -> &DerainParams {
        &self.params
    }

    /// Builds a state from layers, fitting both code sets.
    pub fn state(&self, x_b: ImageTensor, x_r: ImageTensor, alpha: f64, mu: f64) -> Result<DerainState> {
        self.y.shape().ensure_eq(x_b.shape())?;
        self.y.shape().ensure_eq(x_r.shape())?;
        let (beta, gamma) = self.fit_codes(&x_b, &x_r)?;
        Ok(DerainState {
            x_b,
            x_r,
            beta,
            gamma,
            alpha,
            mu,
        })
    }

    /// Full objective at the state's layers and codes.
    pub fn objective(&self, s: &DerainState) -> Result<f64> {
        self.energy(&s.layers(), &s.beta, &s.gamma)
    }

    /// Objective with the codes minimized out:
    /// `beta = prox_{nu1, p1}(W x_b)`, `gamma = prox_{nu2, p2}(W x_r)`.
    pub fn objective_layers(&self, x_b: &ImageTensor, x_r: &ImageTensor) -> Result<f64> {
        let (beta, gamma) = self.fit_codes(x_b, x_r)?;
        self.energy(&stack(x_b, x_r), &beta, &gamma)
    }

    /// Exact code update; one proximal-gradient step of unit length on
    /// `1/2 ||x - W^T c||^2 + nu ||c||_p` from any starting code.
    fn fit_codes(&self, x_b: &ImageTensor, x_r: &ImageTensor) -> Result<(ImageTensor, ImageTensor)> {
        let p = &self.params;
        let beta = prox_lp(&wavelet_forward(x_b, p.levels)?, ProxSpec::new(p.p1, p.nu1)?);
        let gamma = prox_lp(&wavelet_forward(x_r, p.levels)?, ProxSpec::new(p.p2, p.nu2)?);
        Ok((beta, gamma))
    }

    fn objective_stacked(&self, layers: &ImageTensor) -> Result<f64> {
        let (x_b, x_r) = unstack(layers);
        self.objective_layers(&x_b, &x_r)
    }

    /// Infinite outside the box.
    fn energy(&self, layers: &ImageTensor, beta: &ImageTensor, gamma: &ImageTensor) -> Result<f64> {
        if layers.min() < 0.0 || layers.max() > 1.0 {
            return Ok(f64::INFINITY);
        }
        let (x_b, x_r) = unstack(layers);
        let lv = self.params.levels;
        let data = self.y.sub(&x_b)?.sub(&x_r)?.norm_sq();
        let cb = x_b.distance(&wavelet_inverse(beta, lv)?)?.powi(2);
        let cr = x_r.distance(&wavelet_inverse(gamma, lv)?)?.powi(2);
        let reg = self.params.nu1 * self.params.p1.total(beta.as_slice())
            + self.params.nu2 * self.params.p2.total(gamma.as_slice());
        Ok(0.5 * (data + cb + cr) + reg)
    }

    /// Background feasibility model for a given rain layer.
    fn background_model(&self, x_r: &ImageTensor) -> Result<FeasibilityModel> {
        FeasibilityModel::new(
            LinearOperator::identity(self.y.shape()),
            self.y.sub(x_r)?,
            self.params.rho1,
            self.params.p1,
        )
    }

    /// One sweep over the feasibility blocks, background first, with
    /// optional anchors `(x~_b, x~_r, eta)`. Results are clipped to the box.
    fn feasibility_sweep(
        &self,
        state: &DerainState,
        anchors: Option<(&ImageTensor, &ImageTensor, f64)>,
    ) -> Result<ImageTensor> {
        let p = &self.params;
        let bg = self.background_model(&state.x_r)?;
        let zero;
        let (g_b, anchor_r, eta) = match anchors {
            Some((tb, tr, eta)) => {
                let a = Anchor {
                    point: tb.clone(),
                    mu: eta,
                };
                (hqs(&bg, Some(&a), &state.x_b)?, tr, eta)
            }
            None => {
                zero = ImageTensor::zeros(self.y.shape());
                (hqs(&bg, None, &state.x_b)?, &zero, 0.0)
            }
        };
        let g_b = project_box01(&g_b);
        let g_r = derain_gate_r(&self.y.sub(&g_b)?, anchor_r, eta, p.rho2, p.p2)?;
        Ok(stack(&g_b, &project_box01(&g_r)))
    }
}

/// Closed-form rain-layer feasibility update
/// `argmin_r 1/2 ||r - c||^2 + eta/2 ||r - anchor||^2 + rho2 ||r||_p2`
/// with `c = y - x_b`.
pub fn derain_gate_r(
    c: &ImageTensor,
    anchor: &ImageTensor,
    eta: f64,
    rho2: f64,
    p2: Exponent,
) -> Result<ImageTensor> {
    let centre = c.axpy(eta, anchor)?.scale(1.0 / (1.0 + eta));
    Ok(prox_lp(&centre, ProxSpec::new(p2, rho2 / (1.0 + eta))?))
}

/// One outer iteration. Returns the new state and its trace record.
pub fn derain_step(
    model: &DerainModel,
    state: &DerainState,
    denoisers: (&DenoiserSpec, &DenoiserSpec),
    solver: &SolverParams,
    k: usize,
) -> Result<(DerainState, IterateRecord)> {
    let lv = model.params.levels;
    let y = &model.y;

    // projected gradient on the layers at the current codes
    let x = state.layers();
    let residual = y.sub(&state.x_b)?.sub(&state.x_r)?;
    let g_b = state.x_b.sub(&wavelet_inverse(&state.beta, lv)?)?.sub(&residual)?;
    let g_r = state.x_r.sub(&wavelet_inverse(&state.gamma, lv)?)?.sub(&residual)?;
    let x_f = project_box01(&x.axpy(-solver.step / LAYER_LIPSCHITZ, &stack(&g_b, &g_r))?);

    let x_g = model.feasibility_sweep(state, None)?;
    let mu = state.mu;
    let anchored = denoise(denoisers.0, &state.x_b, k).and_then(|tb| {
        let tr = denoise(denoisers.1, &state.x_r, k)?;
        model.feasibility_sweep(state, Some((&tb, &tr, mu)))
    });
    let (u, next_mu, bus_branch, norm_xgmu_x) = match anchored {
        Ok(x_gmu) => {
            let z = ImageTensor::blend(state.alpha, &x_gmu, &x_f)?;
            let out = bus(&x, &x_g, &x_gmu, z, &x_f, state.alpha, mu, solver.beta, solver.c)?;
            (out.u, out.mu, out.branch, Some(out.norm_xgmu_x))
        }
        Err(Error::Denoiser(_)) => (
            ImageTensor::blend(state.alpha, &x_g, &x_f)?,
            solver.beta * mu,
            BusBranch::FellBackXG,
            None,
        ),
        Err(e) => return Err(e),
    };

    let norm_xf_x = x_f.distance(&x)?;
    let norm_xg_x = x_g.distance(&x)?;
    let out = mdus_by(|l| model.objective_stacked(l), u, x_f, state.alpha, solver.gamma)?;
    let rel_err = relative_change(out.x.distance(&x)?, out.x.norm());
    let (x_b, x_r) = unstack(&out.x);
    let record = IterateRecord {
        k,
        objective: out.objective,
        rel_err,
        norm_xf_x,
        norm_xg_x: Some(norm_xg_x),
        norm_xgmu_x,
        alpha: Some(state.alpha),
        mu: Some(mu),
        mdus: out.branch,
        bus: bus_branch,
        psnr: None,
    };
    Ok((model.state(x_b, x_r, out.alpha, next_mu)?, record))
}

/// Runs [`derain_step`] until the joint relative change drops below
/// `rel_tol` or `max_iters` is reached. The PSNR column tracks the
/// background against `reference` when given.
pub fn derain_solve(
    model: &DerainModel,
    init: DerainState,
    denoisers: (&DenoiserSpec, &DenoiserSpec),
    solver: &SolverParams,
    reference: Option<&ImageTensor>,
) -> Result<(DerainState, IterateTrace)> {
    solver.validate(1.0)?;
    if init.layers().min() < 0.0 || init.layers().max() > 1.0 {
        return Err(Error::validation("initial layers must lie in [0, 1]"));
    }
    let mut state = model.state(init.x_b, init.x_r, init.alpha, init.mu)?;
    let mut trace = IterateTrace::new(Method::Dtlf, model.objective(&state)?);
    for k in 0..solver.max_iters {
        let (next, mut record) = derain_step(model, &state, denoisers, solver, k)?;
        record.psnr = reference.map(|r| psnr(&next.x_b, r)).transpose()?;
        let done = record.rel_err <= solver.rel_tol;
        trace.records.push(record);
        state = next;
        if done {
            break;
        }
    }
    Ok((state, trace))
}

/// Concatenates two equally shaped tensors along the channel axis.
fn stack(a: &ImageTensor, b: &ImageTensor) -> ImageTensor {
    let s = a.shape();
    let mut data = Vec::with_capacity(2 * s.len());
    data.extend_from_slice(a.as_slice());
    data.extend_from_slice(b.as_slice());
    ImageTensor::from_raw(Shape::new(s.height, s.width, 2 * s.channels), data)
}

fn unstack(x: &ImageTensor) -> (ImageTensor, ImageTensor) {
    let s = x.shape();
    let half = Shape::new(s.height, s.width, s.channels / 2);
    let (a, b) = x.as_slice().split_at(half.len());
    (ImageTensor::from_raw(half, a.to_vec()), ImageTensor::from_raw(half, b.to_vec()))
}
