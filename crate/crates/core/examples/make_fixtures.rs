//! Regenerates `crates/core/fixtures/` and the golden deblur trace.
//!
//!     cargo run -p tlf --release --example make_fixtures

use std::path::{Path, PathBuf};

use tlf::config::{ExperimentConfig, Task};
use tlf::experiment::{run_experiment, TRACE_FILE};
use tlf::io::{write_image, write_kernel, write_text};
use tlf::synth::{deblur_fixture, derain_fixture, inpaint_fixture};

fn main() -> tlf::Result<()> {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures");
    let at = |name: &str| dir.join(name);

    let d = deblur_fixture();
    write_image(&at("deblur_truth.tlft"), &d.truth)?;
    write_image(&at("deblur_blurry.tlft"), &d.blurry)?;
    write_kernel(&at("deblur_kernel.txt"), &d.kernel)?;

    let i = inpaint_fixture();
    write_image(&at("inpaint_truth.tlft"), &i.truth)?;
    write_image(&at("inpaint_observed.tlft"), &i.observed)?;
    write_image(&at("inpaint_mask.pgm"), &i.mask)?;

    let r = derain_fixture();
    write_image(&at("derain_background.tlft"), &r.background)?;
    write_image(&at("derain_rainy.tlft"), &r.rainy)?;

    let scratch = std::env::temp_dir().join("tlf-make-fixtures");
    let cfg = golden_config(&dir, &scratch);
    run_experiment(&cfg)?;
    let trace = std::fs::read_to_string(scratch.join(TRACE_FILE)).expect("trace written");
    write_text(&at("golden_deblur_trace.csv"), &trace)?;
    println!("fixtures written to {}", dir.display());
    Ok(())
}

fn golden_config(dir: &Path, out: &Path) -> ExperimentConfig {
    let mut cfg = ExperimentConfig::new(Task::Deblur);
    cfg.input = Some(dir.join("deblur_blurry.tlft"));
    cfg.kernel = Some(dir.join("deblur_kernel.txt"));
    cfg.gt = Some(dir.join("deblur_truth.tlft"));
    cfg.out = out.to_path_buf();
    cfg
}
