//! Experiment configuration: flat `key = value` text with `#` comments.

use std::fmt;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::denoise::DenoiserSpec;
use crate::error::{Error, Result};
use crate::feasibility::{DEFAULT_HQS_ITERS, DEFAULT_HQS_RHO};
use crate::problem::SolverParams;
use crate::prox::Exponent;
use crate::tasks::DerainParams;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Task {
    Deblur,
    Inpaint,
    Derain,
    Bench,
}

impl Task {
    pub fn name(self) -> &'static str {
        match self {
            Task::Deblur => "deblur",
            Task::Inpaint => "inpaint",
            Task::Derain => "derain",
            Task::Bench => "bench",
        }
    }
}

impl FromStr for Task {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "deblur" => Ok(Task::Deblur),
            "inpaint" => Ok(Task::Inpaint),
            "derain" => Ok(Task::Derain),
            "bench" => Ok(Task::Bench),
            other => Err(Error::config(format!("unknown task {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SolverKind {
    Pg,
    Apg,
    Mapg,
    Tlf,
    Dtlf,
}

impl SolverKind {
    pub const ALL: [SolverKind; 5] = [
        SolverKind::Pg,
        SolverKind::Apg,
        SolverKind::Mapg,
        SolverKind::Tlf,
        SolverKind::Dtlf,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SolverKind::Pg => "pg",
            SolverKind::Apg => "apg",
            SolverKind::Mapg => "mapg",
            SolverKind::Tlf => "tlf",
            SolverKind::Dtlf => "dtlf",
        }
    }
}

impl FromStr for SolverKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SolverKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::config(format!("unknown solver {s:?} (pg, apg, mapg, tlf, dtlf)")))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub task: Task,
    pub input: Option<PathBuf>,
    pub kernel: Option<PathBuf>,
    pub mask: Option<PathBuf>,
    pub gt: Option<PathBuf>,
    pub out: PathBuf,
    pub solver: SolverKind,
    /// `None` means `0.99 / L`.
    pub step: Option<f64>,
    pub max_iters: usize,
    pub rel_tol: f64,
    pub alpha0: f64,
    pub gamma: f64,
    pub mu0: f64,
    pub beta: f64,
    pub c: f64,
    pub lambda1: f64,
    pub p: Exponent,
    pub lambda2: f64,
    pub q: Exponent,
    pub hqs_rho: f64,
    pub hqs_iters: usize,
    pub nu1: f64,
    pub nu2: f64,
    pub rho1: f64,
    pub rho2: f64,
    pub p1: Exponent,
    pub p2: Exponent,
    pub denoiser: DenoiserSpec,
    pub rain_denoiser: DenoiserSpec,
    /// Noise level (percent of peak) added by `bench` to its synthetic input.
    pub noise: f64,
    pub seed: u64,
}

impl ExperimentConfig {
    pub fn new(task: Task) -> Self {
        let solver = SolverParams::default();
        let derain = DerainParams::default();
        ExperimentConfig {
            task,
            input: None,
            kernel: None,
            mask: None,
            gt: None,
            out: PathBuf::from("out"),
            solver: SolverKind::Dtlf,
            step: None,
            max_iters: solver.max_iters,
            rel_tol: solver.rel_tol,
            alpha0: solver.alpha0,
            gamma: solver.gamma,
            mu0: solver.mu0,
            beta: solver.beta,
            c: solver.c,
            lambda1: 5e-4,
            p: Exponent::One,
            lambda2: 2e-3,
            q: Exponent::One,
            hqs_rho: DEFAULT_HQS_RHO,
            hqs_iters: DEFAULT_HQS_ITERS,
            nu1: derain.nu1,
            nu2: derain.nu2,
            rho1: derain.rho1,
            rho2: derain.rho2,
            p1: derain.p1,
            p2: derain.p2,
            denoiser: "tv-rof:0.02".parse().expect("valid default"),
            rain_denoiser: "wavelet-shrink:0.02".parse().expect("valid default"),
            noise: 1.0,
            seed: 42,
        }
    }

    /// Reads `path` on top of the defaults for `task`. A `task` key in the
    /// file is ignored in favor of the argument.
    pub fn load(task: Task, path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::io(format!("reading {}", path.display()), e))?;
        let mut cfg = Self::new(task);
        cfg.apply_text(&text, &path.display().to_string())?;
        cfg.task = task;
        Ok(cfg)
    }

    pub fn apply_text(&mut self, text: &str, ctx: &str) -> Result<()> {
        for (n, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::config(format!("{ctx}:{}: expected key = value", n + 1)))?;
            self.set(key.trim(), value.trim())
                .map_err(|e| Error::config(format!("{ctx}:{}: {e}", n + 1)))?;
        }
        Ok(())
    }

    /// Sets one key. Path keys accept an empty value to clear them.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        fn num<T: FromStr>(key: &str, v: &str) -> Result<T> {
            v.parse()
                .map_err(|_| Error::config(format!("invalid value {v:?} for {key}")))
        }
        let path = |v: &str| (!v.is_empty()).then(|| PathBuf::from(v));
        match key {
            "task" => self.task = value.parse()?,
            "input" => self.input = path(value),
            "kernel" => self.kernel = path(value),
            "mask" => self.mask = path(value),
            "gt" => self.gt = path(value),
            "out" => self.out = PathBuf::from(value),
            "solver" => self.solver = value.parse()?,
            "step" => self.step = if value == "auto" { None } else { Some(num(key, value)?) },
            "max_iters" => self.max_iters = num(key, value)?,
            "rel_tol" => self.rel_tol = num(key, value)?,
            "alpha0" => self.alpha0 = num(key, value)?,
            "gamma" => self.gamma = num(key, value)?,
            "mu0" => self.mu0 = num(key, value)?,
            "beta" => self.beta = num(key, value)?,
            "c" => self.c = num(key, value)?,
            "lambda1" => self.lambda1 = num(key, value)?,
            "p" => self.p = value.parse()?,
            "lambda2" => self.lambda2 = num(key, value)?,
            "q" => self.q = value.parse()?,
            "hqs_rho" => self.hqs_rho = num(key, value)?,
            "hqs_iters" => self.hqs_iters = num(key, value)?,
            "nu1" => self.nu1 = num(key, value)?,
            "nu2" => self.nu2 = num(key, value)?,
            "rho1" => self.rho1 = num(key, value)?,
            "rho2" => self.rho2 = num(key, value)?,
            "p1" => self.p1 = value.parse()?,
            "p2" => self.p2 = value.parse()?,
            "denoiser" => self.denoiser = value.parse()?,
            "rain_denoiser" => self.rain_denoiser = value.parse()?,
            "noise" => self.noise = num(key, value)?,
            "seed" => self.seed = num(key, value)?,
            other => return Err(Error::config(format!("unknown key {other:?}"))),
        }
        Ok(())
    }

    /// Solver parameters for a problem with Lipschitz constant `lipschitz`.
    pub fn solver_params(&self, lipschitz: f64) -> SolverParams {
        SolverParams {
            step: self.step.unwrap_or(SolverParams::STEP_FRACTION / lipschitz),
            max_iters: self.max_iters,
            rel_tol: self.rel_tol,
            alpha0: self.alpha0,
            gamma: self.gamma,
            mu0: self.mu0,
            beta: self.beta,
            c: self.c,
        }
    }

    pub fn derain_params(&self) -> DerainParams {
        DerainParams {
            nu1: self.nu1,
            nu2: self.nu2,
            rho1: self.rho1,
            rho2: self.rho2,
            p1: self.p1,
            p2: self.p2,
            ..DerainParams::default()
        }
    }

    /// Checks required inputs and numeric ranges.
    pub fn validate(&self) -> Result<()> {
        let need = |p: &Option<PathBuf>, what: &str| {
            p.as_ref()
                .map(|_| ())
                .ok_or_else(|| Error::config(format!("{} needs {what}", self.task.name())))
        };
        match self.task {
            Task::Deblur => {
                need(&self.input, "an input image")?;
                need(&self.kernel, "a kernel file")?;
            }
            Task::Inpaint => {
                need(&self.input, "an input image")?;
                need(&self.mask, "a mask file")?;
            }
            Task::Derain => need(&self.input, "an input image")?,
            Task::Bench => {}
        }
        for (name, v) in [
            ("lambda1", self.lambda1),
            ("lambda2", self.lambda2),
            ("nu1", self.nu1),
            ("nu2", self.nu2),
            ("noise", self.noise),
        ] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::config(format!("{name} must be finite and >= 0, got {v}")));
            }
        }
        if !(self.hqs_rho > 0.0) || self.hqs_iters == 0 {
            return Err(Error::config("hqs_rho and hqs_iters must be positive"));
        }
        self.derain_params().validate()?;
        // L = 0 skips the step bound, which is checked once the problem is built.
        self.solver_params(1.0).validate(0.0)
    }
}

fn opt_path(p: &Option<PathBuf>) -> String {
    p.as_ref().map(|p| p.display().to_string()).unwrap_or_default()
}

/// The listing printed by the `defaults` subcommand; it parses back to the
/// same configuration.
impl fmt::Display for ExperimentConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        let mut kv = |k: &str, v: String| {
            let _ = writeln!(s, "{k} = {v}");
        };
        kv("task", self.task.name().into());
        kv("input", opt_path(&self.input));
        kv("kernel", opt_path(&self.kernel));
        kv("mask", opt_path(&self.mask));
        kv("gt", opt_path(&self.gt));
        kv("out", self.out.display().to_string());
        kv("solver", self.solver.name().into());
        kv("step", self.step.map_or("auto".into(), |s| s.to_string()));
        kv("max_iters", self.max_iters.to_string());
        kv("rel_tol", self.rel_tol.to_string());
        kv("alpha0", self.alpha0.to_string());
        kv("gamma", self.gamma.to_string());
        kv("mu0", self.mu0.to_string());
        kv("beta", self.beta.to_string());
        kv("c", self.c.to_string());
        kv("lambda1", self.lambda1.to_string());
        kv("p", self.p.to_string());
        kv("lambda2", self.lambda2.to_string());
        kv("q", self.q.to_string());
        kv("hqs_rho", self.hqs_rho.to_string());
        kv("hqs_iters", self.hqs_iters.to_string());
        kv("nu1", self.nu1.to_string());
        kv("nu2", self.nu2.to_string());
        kv("rho1", self.rho1.to_string());
        kv("rho2", self.rho2.to_string());
        kv("p1", self.p1.to_string());
        kv("p2", self.p2.to_string());
        kv("denoiser", self.denoiser.to_string());
        kv("rain_denoiser", self.rain_denoiser.to_string());
        kv("noise", self.noise.to_string());
        kv("seed", self.seed.to_string());
        f.write_str(&s)
    }
}
