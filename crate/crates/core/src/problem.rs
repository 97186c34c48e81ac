//! Composite objectives `F(x) = 1/2 ||A x - b||^2 + lambda * sum |x_i|^p`
//! and the proximal-gradient map.

use crate::error::{Error, Result};
use crate::operator::LinearOperator;
use crate::prox::{prox_lp, Exponent, ProxSpec};
use crate::tensor::ImageTensor;
use crate::wavelet::{wavelet_forward, wavelet_inverse};

/// Coordinates the optimization variable lives in.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VariableSpace {
    Image,
    /// Orthonormal Haar coefficients; the image is `W^T x`.
    Wavelet { levels: usize },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Regularizer {
    pub exponent: Exponent,
    pub weight: f64,
}

impl Regularizer {
    pub fn new(exponent: Exponent, weight: f64) -> Result<Self> {
        if !(weight >= 0.0 && weight.is_finite()) {
            return Err(Error::config(format!("regularization weight must be >= 0, got {weight}")));
        }
        Ok(Regularizer { exponent, weight })
    }

    pub fn value(&self, x: &ImageTensor) -> f64 {
        if self.weight == 0.0 {
            return 0.0;
        }
        self.weight * self.exponent.total(x.as_slice())
    }

    /// Proximal parameters for step size `t`.
    pub fn prox_spec(&self, t: f64) -> ProxSpec {
        ProxSpec {
            exponent: self.exponent,
            tau: t * self.weight,
        }
    }
}

#[derive(Debug, Clone)]
pub struct CompositeProblem {
    data_op: LinearOperator,
    observation: ImageTensor,
    regularizer: Regularizer,
    lipschitz: f64,
    space: VariableSpace,
}

impl CompositeProblem {
    pub fn new(
        data_op: LinearOperator,
        observation: ImageTensor,
        regularizer: Regularizer,
        lipschitz: f64,
        space: VariableSpace,
    ) -> Result<Self> {
        data_op.shape().ensure_eq(observation.shape())?;
        if !(lipschitz > 0.0 && lipschitz.is_finite()) {
            return Err(Error::config(format!("Lipschitz constant must be positive, got {lipschitz}")));
        }
        if let VariableSpace::Wavelet { levels } = space {
            crate::wavelet::check_levels(observation.shape(), levels)?;
        }
        Ok(CompositeProblem {
            data_op,
            observation,
            regularizer,
            lipschitz,
            space,
        })
    }

    pub fn data_op(&self) -> &LinearOperator {
        &self.data_op
    }

    pub fn observation(&self) -> &ImageTensor {
        &self.observation
    }

    pub fn regularizer(&self) -> Regularizer {
        self.regularizer
    }

    pub fn lipschitz(&self) -> f64 {
        self.lipschitz
    }

    pub fn space(&self) -> VariableSpace {
        self.space
    }

    /// Sufficient-descent constant `1/(2t) - L/2` for step `t`.
    pub fn descent_constant(&self, t: f64) -> f64 {
        0.5 / t - 0.5 * self.lipschitz
    }

    pub fn to_image(&self, x: &ImageTensor) -> Result<ImageTensor> {
        match self.space {
            VariableSpace::Image => Ok(x.clone()),
            VariableSpace::Wavelet { levels } => wavelet_inverse(x, levels),
        }
    }

    pub fn from_image(&self, x: &ImageTensor) -> Result<ImageTensor> {
        match self.space {
            VariableSpace::Image => Ok(x.clone()),
            VariableSpace::Wavelet { levels } => wavelet_forward(x, levels),
        }
    }

    /// `1/2 ||A x - b||^2`
    pub fn data_term(&self, x: &ImageTensor) -> Result<f64> {
        let r = self.data_op.apply(x)?;
        Ok(0.5 * r.distance(&self.observation)?.powi(2))
    }

    /// `A^T (A x - b)`
    pub fn gradient(&self, x: &ImageTensor) -> Result<ImageTensor> {
        let r = self.data_op.apply(x)?.sub(&self.observation)?;
        self.data_op.adjoint(&r)
    }

    pub fn objective(&self, x: &ImageTensor) -> Result<f64> {
        Ok(self.data_term(x)? + self.regularizer.value(x))
    }

    pub fn check_step(&self, t: f64) -> Result<()> {
        if t > 0.0 && t * self.lipschitz < 1.0 {
            Ok(())
        } else {
            Err(Error::config(format!(
                "step {t} outside (0, 1/L) with L = {}",
                self.lipschitz
            )))
        }
    }

    /// `prox_{t psi}(x - t grad f(x))`
    pub fn pg_step(&self, x: &ImageTensor, t: f64) -> Result<ImageTensor> {
        self.check_step(t)?;
        let g = self.gradient(x)?;
        let forward = x.axpy(-t, &g)?;
        let out = prox_lp(&forward, self.regularizer.prox_spec(t));
        if !out.is_finite() {
            return Err(Error::NonFinite("proximal gradient step"));
        }
        Ok(out)
    }
}

/// Shared iteration parameters for the baselines and the TLF/DTLF engine.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverParams {
    /// Step size `t`, must satisfy `0 < t L < 1`.
    pub step: f64,
    pub max_iters: usize,
    pub rel_tol: f64,
    pub alpha0: f64,
    pub gamma: f64,
    pub mu0: f64,
    pub beta: f64,
    pub c: f64,
}

impl SolverParams {
    pub const STEP_FRACTION: f64 = 0.99;

    /// Defaults with `t = 0.99 / L`.
    pub fn for_lipschitz(lipschitz: f64) -> Self {
        SolverParams {
            step: Self::STEP_FRACTION / lipschitz,
            ..Self::default()
        }
    }

    pub fn validate(&self, lipschitz: f64) -> Result<()> {
        if !(self.step > 0.0 && self.step * lipschitz < 1.0) {
            return Err(Error::config(format!(
                "step {} outside (0, 1/L) with L = {lipschitz}",
                self.step
            )));
        }
        if self.max_iters == 0 {
            return Err(Error::config("max_iters must be positive"));
        }
        if !(self.rel_tol >= 0.0) {
            return Err(Error::config("rel_tol must be >= 0"));
        }
        let open_unit = |name: &str, v: f64| {
            if v > 0.0 && v < 1.0 {
                Ok(())
            } else {
                Err(Error::config(format!("{name} must lie in (0, 1), got {v}")))
            }
        };
        if !(0.0..1.0).contains(&self.alpha0) {
            return Err(Error::config(format!("alpha0 must lie in [0, 1), got {}", self.alpha0)));
        }
        open_unit("gamma", self.gamma)?;
        open_unit("beta", self.beta)?;
        if !(self.mu0 > 0.0) {
            return Err(Error::config(format!("mu0 must be positive, got {}", self.mu0)));
        }
        if !(self.c > 0.0) {
            return Err(Error::config(format!("C must be positive, got {}", self.c)));
        }
        Ok(())
    }
}

impl Default for SolverParams {
    fn default() -> Self {
        SolverParams {
            step: Self::STEP_FRACTION,
            max_iters: 200,
            rel_tol: 5e-4,
            alpha0: 0.9,
            gamma: 0.99,
            mu0: 0.015,
            beta: 0.5,
            c: 1.5,
        }
    }
}
