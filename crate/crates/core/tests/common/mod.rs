#![allow(dead_code)]

use std::path::PathBuf;

use tlf::config::{ExperimentConfig, Task};
use tlf::feasibility::FeasibilityModel;
use tlf::io::{read_image, read_kernel, read_mask};
use tlf::kernel::BlurKernel;
use tlf::problem::CompositeProblem;
use tlf::tasks::{build_deblur, build_inpaint};
use tlf::ImageTensor;

pub fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

pub fn image(name: &str) -> ImageTensor {
    read_image(&fixture(name)).unwrap()
}

pub fn kernel() -> BlurKernel {
    read_kernel(&fixture("deblur_kernel.txt")).unwrap()
}

pub fn mask() -> ImageTensor {
    read_mask(&fixture("inpaint_mask.pgm")).unwrap()
}

pub fn tuned(cfg: &ExperimentConfig, feas: FeasibilityModel) -> FeasibilityModel {
    feas.with_rho(cfg.hqs_rho, cfg.hqs_rho)
        .unwrap()
        .with_hqs_iters(cfg.hqs_iters)
        .unwrap()
}

/// Deblur problem on the packaged fixture with default weights.
pub fn deblur_problem() -> (ExperimentConfig, CompositeProblem, FeasibilityModel, ImageTensor) {
    let cfg = ExperimentConfig::new(Task::Deblur);
    let blurry = image("deblur_blurry.tlft");
    let (prob, feas) = build_deblur(&blurry, &kernel(), cfg.lambda1, cfg.p, cfg.lambda2, cfg.q).unwrap();
    let feas = tuned(&cfg, feas);
    (cfg, prob, feas, blurry)
}

pub fn inpaint_problem() -> (ExperimentConfig, CompositeProblem, FeasibilityModel) {
    let cfg = ExperimentConfig::new(Task::Inpaint);
    let observed = image("inpaint_observed.tlft");
    let (prob, feas) = build_inpaint(&observed, &mask(), cfg.lambda1, cfg.p, cfg.lambda2, cfg.q).unwrap();
    let feas = tuned(&cfg, feas);
    (cfg, prob, feas)
}

pub fn scratch_dir(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("tlf-test-{tag}-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    dir
}

pub fn double() -> String {
    env!("CARGO_BIN_EXE_tlf-denoise-double").to_string()
}
