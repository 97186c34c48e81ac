//! Task-driven latent feasibility solvers for nonconvex composite image
//! restoration.
// `!(x > 0.0)` also rejects NaN
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod baseline;
pub mod config;
pub mod denoise;
pub mod engine;
pub mod error;
pub mod experiment;
pub mod feasibility;
mod fft;
pub mod io;
pub mod kernel;
pub mod metrics;
pub mod operator;
pub mod problem;
pub mod prox;
pub mod rng;
pub mod synth;
pub mod tasks;
pub mod tensor;
pub mod trace;
pub mod wavelet;

pub use error::{Error, Result};
pub use tensor::{ImageTensor, Shape};
