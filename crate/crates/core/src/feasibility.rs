//! Total-variation feasibility models solved by half-quadratic splitting.
//!
//! The model is
//!
//! ```text
//! min_x 1/2 ||K x - b||^2 + lambda sum_{j in {h,v}} ||grad_j x||_q  [+ mu/2 ||x - anchor||^2]
//! ```
//!
//! and each splitting alternation performs
//!
//! ```text
//! z_j <- prox_{lambda/(2 rho_j), q}(grad_j x)
//! x   <- argmin 1/2 ||K x - b||^2 + sum_j rho_j ||z_j - grad_j x||^2 [+ mu/2 ||x - anchor||^2]
//! ```
//!
//! The x-update solves
//! `(K^T K + sum_j 2 rho_j grad_j^T grad_j + mu I) x = K^T b + sum_j 2 rho_j grad_j^T z_j + mu anchor`
//! either exactly in the Fourier domain (circulant `K`) or by conjugate
//! gradients.

use rustfft::num_complex::Complex64;

use crate::error::{Error, Result};
use crate::fft::Fft2;
use crate::operator::LinearOperator;
use crate::prox::{prox_lp, Exponent, ProxSpec};
use crate::tensor::{ImageTensor, Shape};

pub const DEFAULT_HQS_RHO: f64 = 0.05;
pub const DEFAULT_HQS_ITERS: usize = 5;
pub const DEFAULT_CG_TOL: f64 = 1e-8;
pub const DEFAULT_CG_MAX_ITERS: usize = 2000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum XSolver {
    Fft,
    Cg,
}

/// Proximal anchor `mu/2 ||x - point||^2`.
#[derive(Debug, Clone, PartialEq)]
pub struct Anchor {
    pub point: ImageTensor,
    pub mu: f64,
}

#[derive(Debug, Clone)]
pub struct FeasibilityModel {
    data_op: LinearOperator,
    observation: ImageTensor,
    tv_weight: f64,
    tv_exponent: Exponent,
    rho: (f64, f64),
    hqs_iters: usize,
    x_solver: XSolver,
    cg_tol: f64,
    cg_max_iters: usize,
    anchor: Option<Anchor>,
}

impl FeasibilityModel {
    /// Builds a model with default splitting parameters; the x-solver is FFT
    /// when `data_op` is circulant and CG otherwise.
    pub fn new(
        data_op: LinearOperator,
        observation: ImageTensor,
        tv_weight: f64,
        tv_exponent: Exponent,
    ) -> Result<Self> {
        data_op.shape().ensure_eq(observation.shape())?;
        if !(tv_weight >= 0.0 && tv_weight.is_finite()) {
            return Err(Error::config(format!("TV weight must be >= 0, got {tv_weight}")));
        }
        let x_solver = if data_op.is_circulant() {
            XSolver::Fft
        } else {
            XSolver::Cg
        };
        Ok(FeasibilityModel {
            data_op,
            observation,
            tv_weight,
            tv_exponent,
            rho: (DEFAULT_HQS_RHO, DEFAULT_HQS_RHO),
            hqs_iters: DEFAULT_HQS_ITERS,
            x_solver,
            cg_tol: DEFAULT_CG_TOL,
            cg_max_iters: DEFAULT_CG_MAX_ITERS,
            anchor: None,
        })
    }

    pub fn with_rho(mut self, rho_h: f64, rho_v: f64) -> Result<Self> {
        if !(rho_h > 0.0 && rho_v > 0.0) {
            return Err(Error::config("splitting weights rho_h, rho_v must be positive"));
        }
        self.rho = (rho_h, rho_v);
        Ok(self)
    }

    pub fn with_hqs_iters(mut self, iters: usize) -> Result<Self> {
        if iters == 0 {
            return Err(Error::config("hqs_iters must be positive"));
        }
        self.hqs_iters = iters;
        Ok(self)
    }

    pub fn with_x_solver(mut self, solver: XSolver) -> Result<Self> {
        if solver == XSolver::Fft && !self.data_op.is_circulant() {
            return Err(Error::config(
                "FFT x-solver needs a circulant data operator (blur or identity)",
            ));
        }
        self.x_solver = solver;
        Ok(self)
    }

    pub fn with_cg(mut self, tol: f64, max_iters: usize) -> Result<Self> {
        if !(tol > 0.0) || max_iters == 0 {
            return Err(Error::config("CG tolerance and iteration cap must be positive"));
        }
        self.cg_tol = tol;
        self.cg_max_iters = max_iters;
        Ok(self)
    }

    pub fn with_anchor(mut self, point: ImageTensor, mu: f64) -> Result<Self> {
        self.data_op.shape().ensure_eq(point.shape())?;
        if !(mu >= 0.0 && mu.is_finite()) {
            return Err(Error::config(format!("anchor weight must be >= 0, got {mu}")));
        }
        self.anchor = Some(Anchor { point, mu });
        Ok(self)
    }

    pub fn without_anchor(mut self) -> Self {
        self.anchor = None;
        self
    }

    pub fn with_observation(mut self, observation: ImageTensor) -> Result<Self> {
        self.data_op.shape().ensure_eq(observation.shape())?;
        self.observation = observation;
        Ok(self)
    }

    pub fn data_op(&self) -> &LinearOperator {
        &self.data_op
    }

    pub fn observation(&self) -> &ImageTensor {
        &self.observation
    }

    pub fn shape(&self) -> Shape {
        self.data_op.shape()
    }

    pub fn tv_weight(&self) -> f64 {
        self.tv_weight
    }

    pub fn tv_exponent(&self) -> Exponent {
        self.tv_exponent
    }

    pub fn rho(&self) -> (f64, f64) {
        self.rho
    }

    pub fn hqs_iters(&self) -> usize {
        self.hqs_iters
    }

    pub fn x_solver(&self) -> XSolver {
        self.x_solver
    }

    pub fn cg_tol(&self) -> f64 {
        self.cg_tol
    }

    pub fn anchor(&self) -> Option<&Anchor> {
        self.anchor.as_ref()
    }

    /// Splitting weights actually used; without a TV term the auxiliary
    /// variables decouple and the weights drop to zero.
    fn effective_rho(&self) -> (f64, f64) {
        if self.tv_weight == 0.0 {
            (0.0, 0.0)
        } else {
            self.rho
        }
    }

    pub fn splitting<'a>(&'a self, anchor: Option<&'a Anchor>) -> Result<Splitting<'a>> {
        Splitting::new(self, anchor)
    }
}

/// Solves the anchor-free model from `x_init`.
pub fn solve_g(model: &FeasibilityModel, x_init: &ImageTensor) -> Result<ImageTensor> {
    if model.anchor.is_some() {
        return Err(Error::config("solve_g expects a model without a proximal anchor"));
    }
    hqs(model, None, x_init)
}

/// Solves the proximally anchored model from `x_init`.
pub fn solve_g_mu(model: &FeasibilityModel, x_init: &ImageTensor) -> Result<ImageTensor> {
    let anchor = model
        .anchor
        .as_ref()
        .ok_or_else(|| Error::config("solve_g_mu needs a proximal anchor"))?;
    if !(anchor.mu > 0.0) {
        return Err(Error::config("solve_g_mu needs mu > 0; use solve_g instead"));
    }
    hqs(model, Some(anchor), x_init)
}

pub(crate) fn hqs(
    model: &FeasibilityModel,
    anchor: Option<&Anchor>,
    x_init: &ImageTensor,
) -> Result<ImageTensor> {
    model.shape().ensure_eq(x_init.shape())?;
    let split = model.splitting(anchor)?;
    let iters = if model.tv_weight == 0.0 { 1 } else { model.hqs_iters };
    let mut x = x_init.clone();
    for _ in 0..iters {
        let z = split.update_z(&x)?;
        x = split.update_x(&x, &z)?;
    }
    if !x.is_finite() {
        return Err(Error::NonFinite("feasibility solve"));
    }
    Ok(x)
}

/// Auxiliary gradient variables `(z_h, z_v)`.
#[derive(Debug, Clone, PartialEq)]
pub struct SplitVars {
    pub h: ImageTensor,
    pub v: ImageTensor,
}

/// One splitting problem with its precomputed operators.
pub struct Splitting<'a> {
    model: &'a FeasibilityModel,
    anchor: Option<&'a Anchor>,
    grad_h: LinearOperator,
    grad_v: LinearOperator,
    rho: (f64, f64),
    /// Fourier denominator of the x-update, present for the FFT solver.
    denominator: Option<Vec<f64>>,
}

impl<'a> Splitting<'a> {
    fn new(model: &'a FeasibilityModel, anchor: Option<&'a Anchor>) -> Result<Self> {
        let shape = model.shape();
        if let Some(a) = anchor {
            shape.ensure_eq(a.point.shape())?;
        }
        let grad_h = LinearOperator::gradient_h(shape);
        let grad_v = LinearOperator::gradient_v(shape);
        let rho = model.effective_rho();
        let mu = anchor.map_or(0.0, |a| a.mu);
        let denominator = match model.x_solver {
            XSolver::Fft => {
                let k = model
                    .data_op
                    .circulant_spectrum()
                    .ok_or_else(|| Error::config("FFT x-solver needs a circulant data operator"))?;
                let gh = grad_h.circulant_spectrum().expect("gradients are circulant");
                let gv = grad_v.circulant_spectrum().expect("gradients are circulant");
                Some(
                    k.iter()
                        .zip(&gh)
                        .zip(&gv)
                        .map(|((k, h), v)| {
                            k.norm_sqr() + 2.0 * rho.0 * h.norm_sqr() + 2.0 * rho.1 * v.norm_sqr() + mu
                        })
                        .collect(),
                )
            }
            XSolver::Cg => None,
        };
        Ok(Splitting {
            model,
            anchor,
            grad_h,
            grad_v,
            rho,
            denominator,
        })
    }

    pub fn update_z(&self, x: &ImageTensor) -> Result<SplitVars> {
        let gh = self.grad_h.apply(x)?;
        let gv = self.grad_v.apply(x)?;
        let lambda = self.model.tv_weight;
        if lambda == 0.0 {
            return Ok(SplitVars { h: gh, v: gv });
        }
        let p = self.model.tv_exponent;
        let spec = |rho: f64| ProxSpec::new(p, lambda / (2.0 * rho));
        Ok(SplitVars {
            h: prox_lp(&gh, spec(self.rho.0)?),
            v: prox_lp(&gv, spec(self.rho.1)?),
        })
    }

    /// Right-hand side `K^T b + sum_j 2 rho_j grad_j^T z_j + mu anchor`.
    pub fn rhs(&self, z: &SplitVars) -> Result<ImageTensor> {
        let mut r = self.model.data_op.adjoint(&self.model.observation)?;
        if self.rho.0 > 0.0 {
            r = r.axpy(2.0 * self.rho.0, &self.grad_h.adjoint(&z.h)?)?;
        }
        if self.rho.1 > 0.0 {
            r = r.axpy(2.0 * self.rho.1, &self.grad_v.adjoint(&z.v)?)?;
        }
        if let Some(a) = self.anchor {
            r = r.axpy(a.mu, &a.point)?;
        }
        Ok(r)
    }

    /// System matrix applied to `x`.
    pub fn system(&self, x: &ImageTensor) -> Result<ImageTensor> {
        let mut y = self.model.data_op.normal(x)?;
        if self.rho.0 > 0.0 {
            y = y.axpy(2.0 * self.rho.0, &self.grad_h.normal(x)?)?;
        }
        if self.rho.1 > 0.0 {
            y = y.axpy(2.0 * self.rho.1, &self.grad_v.normal(x)?)?;
        }
        if let Some(a) = self.anchor {
            y = y.axpy(a.mu, x)?;
        }
        Ok(y)
    }

    /// Solves the x-update; `warm` seeds conjugate gradients.
    pub fn update_x(&self, warm: &ImageTensor, z: &SplitVars) -> Result<ImageTensor> {
        let rhs = self.rhs(z)?;
        match &self.denominator {
            Some(den) => Ok(fourier_solve(&rhs, den)),
            None => conjugate_gradient(
                |v| self.system(v),
                &rhs,
                warm,
                self.model.cg_tol,
                self.model.cg_max_iters,
            ),
        }
    }

    /// Splitting energy
    /// `1/2||Kx-b||^2 + sum_j (rho_j ||z_j - grad_j x||^2 + lambda ||z_j||_q) + mu/2 ||x - anchor||^2`.
    pub fn energy(&self, x: &ImageTensor, z: &SplitVars) -> Result<f64> {
        let m = self.model;
        let mut e = 0.5 * m.data_op.apply(x)?.distance(&m.observation)?.powi(2);
        let rho = self.rho;
        e += rho.0 * z.h.distance(&self.grad_h.apply(x)?)?.powi(2);
        e += rho.1 * z.v.distance(&self.grad_v.apply(x)?)?.powi(2);
        e += m.tv_weight * (m.tv_exponent.total(z.h.as_slice()) + m.tv_exponent.total(z.v.as_slice()));
        if let Some(a) = self.anchor {
            e += 0.5 * a.mu * x.distance(&a.point)?.powi(2);
        }
        Ok(e)
    }
}

fn fourier_solve(rhs: &ImageTensor, denominator: &[f64]) -> ImageTensor {
    let s = rhs.shape();
    let fft = Fft2::new(s.height, s.width);
    let floor = denominator.iter().copied().fold(0.0, f64::max) * 1e-14;
    let mut out = Vec::with_capacity(s.len());
    for c in 0..s.channels {
        let mut spec = fft.forward_real(rhs.plane(c));
        for (v, &d) in spec.iter_mut().zip(denominator) {
            // pseudo-inverse on the (numerically) null frequencies
            *v = if d > floor { *v / d } else { Complex64::new(0.0, 0.0) };
        }
        out.extend(fft.inverse_real(spec));
    }
    ImageTensor::from_raw(s, out)
}

/// Conjugate gradients for a symmetric positive semidefinite operator,
/// stopping at `||r|| <= tol ||rhs||`.
pub fn conjugate_gradient(
    apply: impl Fn(&ImageTensor) -> Result<ImageTensor>,
    rhs: &ImageTensor,
    x0: &ImageTensor,
    tol: f64,
    max_iters: usize,
) -> Result<ImageTensor> {
    let target = tol * if rhs.norm() > 0.0 { rhs.norm() } else { 1.0 };
    let mut x = x0.clone();
    let mut r = rhs.sub(&apply(&x)?)?;
    let mut rr = r.norm_sq();
    if rr.sqrt() <= target {
        return Ok(x);
    }
    let mut p = r.clone();
    for _ in 0..max_iters {
        let ap = apply(&p)?;
        let pap = p.dot(&ap)?;
        if pap <= 0.0 {
            break;
        }
        let step = rr / pap;
        x = x.axpy(step, &p)?;
        r = r.axpy(-step, &ap)?;
        let rr_next = r.norm_sq();
        if rr_next.sqrt() <= target {
            return Ok(x);
        }
        p = r.axpy(rr_next / rr, &p)?;
        rr = rr_next;
    }
    // recompute the true residual before giving up
    let true_res = rhs.sub(&apply(&x)?)?.norm();
    if true_res <= target {
        return Ok(x);
    }
    Err(Error::NotConverged {
        iterations: max_iters,
        residual: true_res / rhs.norm().max(f64::MIN_POSITIVE),
    })
}
