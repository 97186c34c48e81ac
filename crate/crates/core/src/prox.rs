//! Elementwise proximal maps of `tau * |u|^p` and the `[0, 1]` box projection.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::tensor::ImageTensor;

/// Exponents with a closed-form proximal map.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Exponent {
    /// Counting penalty `|u|^0` (with `0^0 = 0`).
    Zero,
    Half,
    TwoThirds,
    One,
}

impl Exponent {
    pub const ALL: [Exponent; 4] = [Exponent::Zero, Exponent::Half, Exponent::TwoThirds, Exponent::One];

    pub fn from_f64(p: f64) -> Result<Self> {
        const EPS: f64 = 1e-12;
        if p.abs() < EPS {
            Ok(Exponent::Zero)
        } else if (p - 0.5).abs() < EPS {
            Ok(Exponent::Half)
        } else if (p - 2.0 / 3.0).abs() < 1e-6 {
            Ok(Exponent::TwoThirds)
        } else if (p - 1.0).abs() < EPS {
            Ok(Exponent::One)
        } else {
            Err(Error::config(format!(
                "exponent {p} has no closed-form proximal map (use 0, 1/2, 2/3 or 1)"
            )))
        }
    }

    pub fn value(self) -> f64 {
        match self {
            Exponent::Zero => 0.0,
            Exponent::Half => 0.5,
            Exponent::TwoThirds => 2.0 / 3.0,
            Exponent::One => 1.0,
        }
    }

    /// `|u|^p`
    pub fn penalty(self, u: f64) -> f64 {
        let a = u.abs();
        match self {
            Exponent::Zero => {
                if a == 0.0 {
                    0.0
                } else {
                    1.0
                }
            }
            Exponent::Half => a.sqrt(),
            Exponent::TwoThirds => a.cbrt() * a.cbrt(),
            Exponent::One => a,
        }
    }

    /// `sum_i |x_i|^p`
    pub fn total(self, x: &[f64]) -> f64 {
        x.iter().map(|&u| self.penalty(u)).sum()
    }
}

impl fmt::Display for Exponent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Exponent::Zero => "0",
            Exponent::Half => "1/2",
            Exponent::TwoThirds => "2/3",
            Exponent::One => "1",
        })
    }
}

impl FromStr for Exponent {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if let Some((n, d)) = s.split_once('/') {
            let n: f64 = n.trim().parse().map_err(|_| Error::config(format!("bad exponent {s:?}")))?;
            let d: f64 = d.trim().parse().map_err(|_| Error::config(format!("bad exponent {s:?}")))?;
            return Exponent::from_f64(n / d);
        }
        let p: f64 = s.parse().map_err(|_| Error::config(format!("bad exponent {s:?}")))?;
        Exponent::from_f64(p)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProxSpec {
    pub exponent: Exponent,
    pub tau: f64,
}

impl ProxSpec {
    pub fn new(exponent: Exponent, tau: f64) -> Result<Self> {
        if !(tau >= 0.0 && tau.is_finite()) {
            return Err(Error::config(format!("threshold weight must be >= 0, got {tau}")));
        }
        Ok(ProxSpec { exponent, tau })
    }

    /// Scalar minimizer of `tau |u|^p + (u - v)^2 / 2`. Ties with `u = 0`
    /// resolve to 0.
    pub fn apply_scalar(&self, v: f64) -> f64 {
        prox_scalar(self.exponent, self.tau, v)
    }

    /// The scalar objective `tau |u|^p + (u - v)^2 / 2`.
    pub fn objective(&self, u: f64, v: f64) -> f64 {
        self.tau * self.exponent.penalty(u) + 0.5 * (u - v) * (u - v)
    }
}

pub fn prox_lp(v: &ImageTensor, spec: ProxSpec) -> ImageTensor {
    if spec.tau == 0.0 {
        return v.clone();
    }
    v.map(|x| spec.apply_scalar(x))
}

pub fn project_box01(v: &ImageTensor) -> ImageTensor {
    v.map(|x| x.clamp(0.0, 1.0))
}

fn prox_scalar(p: Exponent, tau: f64, v: f64) -> f64 {
    if tau == 0.0 || v == 0.0 {
        return v;
    }
    let a = v.abs();
    let magnitude = match p {
        Exponent::Zero => {
            if a * a > 2.0 * tau {
                a
            } else {
                0.0
            }
        }
        Exponent::One => (a - tau).max(0.0),
        Exponent::Half => half_threshold(a, 2.0 * tau),
        Exponent::TwoThirds => two_thirds_threshold(a, 2.0 * tau),
    };
    if magnitude == 0.0 {
        return 0.0;
    }
    // Closed forms give the nonzero stationary point; keep it only when it
    // strictly beats u = 0.
    let at_zero = 0.5 * a * a;
    let at_candidate = tau * p.penalty(magnitude) + 0.5 * (magnitude - a) * (magnitude - a);
    if at_candidate < at_zero {
        magnitude.copysign(v)
    } else {
        0.0
    }
}

/// Half thresholding for `(u - a)^2 + lambda |u|^(1/2)`, `a > 0`.
fn half_threshold(a: f64, lambda: f64) -> f64 {
    let threshold = 54f64.cbrt() / 4.0 * lambda.powf(2.0 / 3.0);
    if a <= threshold {
        return 0.0;
    }
    let arg = (lambda / 8.0) * (a / 3.0).powf(-1.5);
    let phi = arg.clamp(-1.0, 1.0).acos();
    2.0 / 3.0 * a * (1.0 + (2.0 * std::f64::consts::PI / 3.0 - 2.0 * phi / 3.0).cos())
}

/// Two-thirds thresholding for `(u - a)^2 + lambda |u|^(2/3)`, `a > 0`.
fn two_thirds_threshold(a: f64, lambda: f64) -> f64 {
    let threshold = 2.0 / 3.0 * (3.0 * lambda.powi(3)).powf(0.25);
    if a <= threshold {
        return 0.0;
    }
    let arg = 27.0 * a * a / 16.0 * lambda.powf(-1.5);
    let phi = arg.max(1.0).acosh();
    let big_a = 2.0 / 3f64.sqrt() * lambda.powf(0.25) * (phi / 3.0).cosh().sqrt();
    let inner = (2.0 * a / big_a - big_a * big_a).max(0.0);
    ((big_a + inner.sqrt()) / 2.0).powi(3)
}
