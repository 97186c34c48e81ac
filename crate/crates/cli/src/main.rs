use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use tlf::config::{ExperimentConfig, Task};
use tlf::experiment::run_experiment;

#[derive(Parser)]
#[command(name = "tlf", version, about = "TLF / DTLF image restoration experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Non-blind deblurring of --input with --kernel
    Deblur(RunArgs),
    /// Fill the pixels of --input where --mask is 0
    Inpaint(RunArgs),
    /// Split --input into background and rain layers
    Derain(RunArgs),
    /// Blur --gt (or a built-in scene) and run every solver in parallel
    Bench(RunArgs),
    /// Print the default configuration for a task
    Defaults {
        #[arg(default_value = "deblur")]
        task: String,
    },
}

#[derive(Args)]
struct RunArgs {
    /// Flat key = value configuration file
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    input: Option<PathBuf>,
    #[arg(long)]
    kernel: Option<PathBuf>,
    #[arg(long)]
    mask: Option<PathBuf>,
    /// Ground truth for PSNR/SSIM
    #[arg(long)]
    gt: Option<PathBuf>,
    #[arg(long)]
    out: Option<PathBuf>,
    /// pg, apg, mapg, tlf or dtlf
    #[arg(long)]
    solver: Option<String>,
    #[arg(long)]
    max_iters: Option<String>,
    #[arg(long)]
    rel_tol: Option<String>,
    #[arg(long)]
    seed: Option<String>,
    /// e.g. tv-rof:0.02 or gaussian:1.5,1.0,0.5
    #[arg(long)]
    denoiser: Option<String>,
    /// Command line of an external denoiser speaking the TLF1 protocol
    #[arg(long)]
    external_denoiser: Option<String>,
    /// Extra key=value overrides, applied last
    #[arg(long = "set", value_name = "KEY=VALUE")]
    set: Vec<String>,
}

impl RunArgs {
    fn config(&self, task: Task) -> tlf::Result<ExperimentConfig> {
        let mut cfg = match &self.config {
            Some(p) => ExperimentConfig::load(task, p)?,
            None => ExperimentConfig::new(task),
        };
        let path = |p: &Option<PathBuf>| p.as_ref().map(|p| p.display().to_string());
        let overrides = [
            ("input", path(&self.input)),
            ("kernel", path(&self.kernel)),
            ("mask", path(&self.mask)),
            ("gt", path(&self.gt)),
            ("out", path(&self.out)),
            ("solver", self.solver.clone()),
            ("max_iters", self.max_iters.clone()),
            ("rel_tol", self.rel_tol.clone()),
            ("seed", self.seed.clone()),
            ("denoiser", self.denoiser.clone()),
            ("denoiser", self.external_denoiser.as_ref().map(|c| format!("external:{c}"))),
        ];
        for (key, value) in overrides {
            if let Some(v) = value {
                cfg.set(key, &v)?;
            }
        }
        for kv in &self.set {
            let (k, v) = kv
                .split_once('=')
                .ok_or_else(|| tlf::Error::Config(format!("--set expects KEY=VALUE, got {kv:?}")))?;
            cfg.set(k.trim(), v.trim())?;
        }
        Ok(cfg)
    }
}

fn run(cli: Cli) -> tlf::Result<()> {
    let (task, args) = match cli.command {
        Command::Defaults { task } => {
            print!("{}", ExperimentConfig::new(task.parse()?));
            return Ok(());
        }
        Command::Deblur(a) => (Task::Deblur, a),
        Command::Inpaint(a) => (Task::Inpaint, a),
        Command::Derain(a) => (Task::Derain, a),
        Command::Bench(a) => (Task::Bench, a),
    };
    let cfg = args.config(task)?;
    for r in run_experiment(&cfg)? {
        let metric = |v: Option<f64>| v.map_or("-".to_string(), |v| format!("{v:.3}"));
        println!(
            "{} {}: {} iterations, F = {:.6e}, PSNR {} dB (input {}), SSIM {}, {:.2?} -> {}",
            r.task.name(),
            r.solver.name(),
            r.iterations,
            r.final_objective,
            metric(r.psnr),
            metric(r.input_psnr),
            metric(r.ssim),
            r.elapsed,
            r.out_dir.display()
        );
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
