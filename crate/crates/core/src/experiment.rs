//! Loads inputs, runs a solver and writes the restored image, the trace CSV
//! and a summary into the output directory.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::thread;
use std::time::{Duration, Instant};

use crate::baseline::{solve_baseline, Baseline, Solution};
use crate::config::{ExperimentConfig, SolverKind, Task};
use crate::denoise::DenoiserSpec;
use crate::engine::{dtlf_solve, tlf_solve};
use crate::error::{Error, Result};
use crate::feasibility::FeasibilityModel;
use crate::io::{read_image, read_kernel, read_mask, write_image, write_text, ImageFormat};
use crate::metrics::{psnr, psnr_masked, ssim};
use crate::problem::{CompositeProblem, SolverParams};
use crate::synth::{blur_and_noise, fixture_kernel, scene, FIXTURE_SIZE};
use crate::tasks::{build_deblur, build_inpaint, derain_solve, DerainModel, DerainState};
use crate::tensor::ImageTensor;
use crate::trace::IterateTrace;

pub const TRACE_FILE: &str = "trace.csv";
pub const SUMMARY_FILE: &str = "summary.txt";

#[derive(Debug, Clone)]
pub struct RunSummary {
    pub task: Task,
    pub solver: SolverKind,
    pub out_dir: PathBuf,
    pub iterations: usize,
    pub final_objective: f64,
    /// Quality of the degraded input against the ground truth.
    pub input_psnr: Option<f64>,
    pub psnr: Option<f64>,
    pub ssim: Option<f64>,
    /// Task-specific metrics, e.g. PSNR over the missing pixels.
    pub extra: Vec<(String, f64)>,
    pub elapsed: Duration,
}

impl RunSummary {
    /// `key = value` lines; the elapsed time is left out so reruns match.
    pub fn to_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "task = {}", self.task.name());
        let _ = writeln!(s, "solver = {}", self.solver.name());
        let _ = writeln!(s, "iterations = {}", self.iterations);
        let _ = writeln!(s, "final_objective = {}", self.final_objective);
        for (k, v) in [("input_psnr", self.input_psnr), ("psnr", self.psnr), ("ssim", self.ssim)] {
            if let Some(v) = v {
                let _ = writeln!(s, "{k} = {v}");
            }
        }
        for (k, v) in &self.extra {
            let _ = writeln!(s, "{k} = {v}");
        }
        s
    }
}

/// Runs the configured experiment. `bench` returns one summary per solver.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Vec<RunSummary>> {
    cfg.validate()?;
    match cfg.task {
        Task::Deblur => run_deblur(cfg).map(|r| vec![r]),
        Task::Inpaint => run_inpaint(cfg).map(|r| vec![r]),
        Task::Derain => run_derain(cfg).map(|r| vec![r]),
        Task::Bench => run_bench(cfg),
    }
}

fn required<'a>(p: &'a Option<PathBuf>, what: &str) -> Result<&'a Path> {
    p.as_deref()
        .ok_or_else(|| Error::config(format!("missing {what}")))
}

fn load_gt(cfg: &ExperimentConfig, like: &ImageTensor) -> Result<Option<ImageTensor>> {
    let Some(path) = &cfg.gt else { return Ok(None) };
    let gt = read_image(path)?;
    like.shape().ensure_eq(gt.shape())?;
    Ok(Some(gt))
}

/// Output extension: raw when the input was raw, else PGM/PPM by channels.
fn image_ext(input: Option<&Path>, x: &ImageTensor) -> &'static str {
    match input.and_then(|p| ImageFormat::from_path(p).ok()) {
        Some(ImageFormat::Tlft) | None => "tlft",
        Some(_) if x.channels() == 1 => "pgm",
        Some(_) => "ppm",
    }
}

fn solve(
    kind: SolverKind,
    prob: &CompositeProblem,
    feas: &FeasibilityModel,
    denoiser: &DenoiserSpec,
    params: &SolverParams,
    x0: &ImageTensor,
    reference: Option<&ImageTensor>,
) -> Result<Solution> {
    match kind {
        SolverKind::Pg => solve_baseline(prob, Baseline::Pg, params, x0, reference),
        SolverKind::Apg => solve_baseline(prob, Baseline::Apg, params, x0, reference),
        SolverKind::Mapg => solve_baseline(prob, Baseline::Mapg, params, x0, reference),
        SolverKind::Tlf => tlf_solve(prob, feas, params, x0, reference),
        SolverKind::Dtlf => dtlf_solve(prob, feas, denoiser, params, x0, reference),
    }
}

fn tuned(cfg: &ExperimentConfig, feas: FeasibilityModel) -> Result<FeasibilityModel> {
    feas.with_rho(cfg.hqs_rho, cfg.hqs_rho)?.with_hqs_iters(cfg.hqs_iters)
}

fn quality(x: &ImageTensor, gt: Option<&ImageTensor>) -> Result<(Option<f64>, Option<f64>)> {
    match gt {
        Some(g) => Ok((Some(psnr(x, g)?), Some(ssim(x, g)?))),
        None => Ok((None, None)),
    }
}

fn write_outputs(dir: &Path, images: &[(&str, &ImageTensor)], ext: &str, trace: &IterateTrace, summary: &RunSummary) -> Result<()> {
    for (name, img) in images {
        write_image(&dir.join(format!("{name}.{ext}")), img)?;
    }
    write_text(&dir.join(TRACE_FILE), &trace.to_csv())?;
    write_text(&dir.join(SUMMARY_FILE), &summary.to_text())
}

struct Restoration {
    restored: ImageTensor,
    solution: Solution,
    elapsed: Duration,
}

fn restore(
    cfg: &ExperimentConfig,
    kind: SolverKind,
    prob: &CompositeProblem,
    feas: &FeasibilityModel,
    observed: &ImageTensor,
    gt: Option<&ImageTensor>,
) -> Result<Restoration> {
    let params = cfg.solver_params(prob.lipschitz());
    let x0 = prob.from_image(observed)?;
    let start = Instant::now();
    let solution = solve(kind, prob, feas, &cfg.denoiser, &params, &x0, gt)?;
    let restored = prob.to_image(&solution.x)?;
    Ok(Restoration {
        restored,
        solution,
        elapsed: start.elapsed(),
    })
}

fn summarize(task: Task, kind: SolverKind, dir: &Path, r: &Restoration, input: &ImageTensor, gt: Option<&ImageTensor>) -> Result<RunSummary> {
    let (p, s) = quality(&r.restored, gt)?;
    Ok(RunSummary {
        task,
        solver: kind,
        out_dir: dir.to_path_buf(),
        iterations: r.solution.trace.len(),
        final_objective: r.solution.trace.final_objective(),
        input_psnr: gt.map(|g| psnr(input, g)).transpose()?,
        psnr: p,
        ssim: s,
        extra: Vec::new(),
        elapsed: r.elapsed,
    })
}

fn run_deblur(cfg: &ExperimentConfig) -> Result<RunSummary> {
    let input = required(&cfg.input, "input image")?;
    let blurry = read_image(input)?;
    let kernel = read_kernel(required(&cfg.kernel, "kernel file")?)?;
    let gt = load_gt(cfg, &blurry)?;
    let (prob, feas) = build_deblur(&blurry, &kernel, cfg.lambda1, cfg.p, cfg.lambda2, cfg.q)?;
    let feas = tuned(cfg, feas)?;
    let r = restore(cfg, cfg.solver, &prob, &feas, &blurry, gt.as_ref())?;
    let summary = summarize(Task::Deblur, cfg.solver, &cfg.out, &r, &blurry, gt.as_ref())?;
    let ext = image_ext(Some(input), &blurry);
    write_outputs(&cfg.out, &[("restored", &r.restored)], ext, &r.solution.trace, &summary)?;
    Ok(summary)
}

fn run_inpaint(cfg: &ExperimentConfig) -> Result<RunSummary> {
    let input = required(&cfg.input, "input image")?;
    let observed = read_image(input)?;
    let mask = read_mask(required(&cfg.mask, "mask file")?)?;
    observed.shape().ensure_eq(mask.shape())?;
    let gt = load_gt(cfg, &observed)?;
    let (prob, feas) = build_inpaint(&observed, &mask, cfg.lambda1, cfg.p, cfg.lambda2, cfg.q)?;
    let feas = tuned(cfg, feas)?;
    let r = restore(cfg, cfg.solver, &prob, &feas, prob.observation(), gt.as_ref())?;
    let mut summary = summarize(Task::Inpaint, cfg.solver, &cfg.out, &r, prob.observation(), gt.as_ref())?;
    if let Some(g) = &gt {
        let missing = mask.map(|m| 1.0 - m);
        if missing.max() > 0.0 {
            summary
                .extra
                .push(("input_psnr_missing".into(), psnr_masked(prob.observation(), g, &missing)?));
            summary
                .extra
                .push(("psnr_missing".into(), psnr_masked(&r.restored, g, &missing)?));
        }
    }
    let ext = image_ext(Some(input), &observed);
    write_outputs(&cfg.out, &[("restored", &r.restored)], ext, &r.solution.trace, &summary)?;
    Ok(summary)
}

fn run_derain(cfg: &ExperimentConfig) -> Result<RunSummary> {
    if cfg.solver != SolverKind::Dtlf {
        return Err(Error::config(format!(
            "derain supports only the dtlf solver, got {}",
            cfg.solver.name()
        )));
    }
    let input = required(&cfg.input, "input image")?;
    let y = read_image(input)?;
    let gt = load_gt(cfg, &y)?;
    let model = DerainModel::new(y.clone(), cfg.derain_params())?;
    let params = cfg.solver_params(1.0);
    let init = DerainState::initial(&model, &params)?;
    let start = Instant::now();
    let (state, trace) = derain_solve(&model, init, (&cfg.denoiser, &cfg.rain_denoiser), &params, gt.as_ref())?;
    let elapsed = start.elapsed();
    let (p, s) = quality(&state.x_b, gt.as_ref())?;
    let residual = y.sub(&state.x_b)?.sub(&state.x_r)?.norm() / y.norm().max(f64::MIN_POSITIVE);
    let summary = RunSummary {
        task: Task::Derain,
        solver: cfg.solver,
        out_dir: cfg.out.clone(),
        iterations: trace.len(),
        final_objective: trace.final_objective(),
        input_psnr: gt.as_ref().map(|g| psnr(&y, g)).transpose()?,
        psnr: p,
        ssim: s,
        extra: vec![("layer_residual".into(), residual)],
        elapsed,
    };
    let ext = image_ext(Some(input), &y);
    write_outputs(
        &cfg.out,
        &[("background", &state.x_b), ("rain", &state.x_r)],
        ext,
        &trace,
        &summary,
    )?;
    Ok(summary)
}

/// Degrades the ground truth (or the built-in scene) with the configured
/// kernel and seeded noise, then runs every solver on its own thread, each
/// writing into `out/<solver>/`.
fn run_bench(cfg: &ExperimentConfig) -> Result<Vec<RunSummary>> {
    let truth = match &cfg.gt {
        Some(p) => read_image(p)?,
        None => scene(FIXTURE_SIZE, FIXTURE_SIZE),
    };
    let kernel = match &cfg.kernel {
        Some(p) => read_kernel(p)?,
        None => fixture_kernel(),
    };
    let blurry = blur_and_noise(&truth, &kernel, cfg.noise, cfg.seed)?;
    let (prob, feas) = build_deblur(&blurry, &kernel, cfg.lambda1, cfg.p, cfg.lambda2, cfg.q)?;
    let feas = tuned(cfg, feas)?;
    let ext = image_ext(cfg.gt.as_deref(), &truth);

    let results: Vec<Result<RunSummary>> = thread::scope(|s| {
        let handles: Vec<_> = SolverKind::ALL
            .into_iter()
            .map(|kind| {
                let (prob, feas, blurry, truth) = (&prob, &feas, &blurry, &truth);
                s.spawn(move || -> Result<RunSummary> {
                    let dir = cfg.out.join(kind.name());
                    let r = restore(cfg, kind, prob, feas, blurry, Some(truth))?;
                    let summary = summarize(Task::Bench, kind, &dir, &r, blurry, Some(truth))?;
                    write_outputs(&dir, &[("restored", &r.restored)], ext, &r.solution.trace, &summary)?;
                    Ok(summary)
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().unwrap_or_else(|_| Err(Error::validation("solver thread panicked"))))
            .collect()
    });
    let runs = results.into_iter().collect::<Result<Vec<_>>>()?;

    let mut table = String::from("solver,iterations,final_objective,psnr,ssim\n");
    for r in &runs {
        let _ = writeln!(
            table,
            "{},{},{},{},{}",
            r.solver.name(),
            r.iterations,
            r.final_objective,
            r.psnr.unwrap_or(f64::NAN),
            r.ssim.unwrap_or(f64::NAN)
        );
    }
    write_text(&cfg.out.join("bench.csv"), &table)?;
    write_image(&cfg.out.join(format!("input.{ext}")), &blurry)?;
    Ok(runs)
}
