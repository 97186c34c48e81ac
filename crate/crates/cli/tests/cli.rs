use std::path::PathBuf;
use std::process::{Command, Output};

use tlf::config::{ExperimentConfig, Task};

fn fixture(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../core/fixtures").join(name)
}

fn scratch(tag: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("tlf-cli-{tag}-{}", std::process::id()));
    let _ = std::fs::remove_dir_all(&dir);
    dir
}

fn tlf(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tlf")).args(args).output().unwrap()
}

fn path(p: &std::path::Path) -> &str {
    p.to_str().unwrap()
}

#[test]
fn defaults_parse_back() {
    for task in ["deblur", "inpaint", "derain", "bench"] {
        let out = tlf(&["defaults", task]);
        assert!(out.status.success());
        let text = String::from_utf8(out.stdout).unwrap();
        let t: Task = task.parse().unwrap();
        let mut cfg = ExperimentConfig::new(t);
        cfg.apply_text(&text, "stdout").unwrap();
        assert_eq!(cfg.to_string(), text);
    }
}

#[test]
fn deblur_run_writes_outputs() {
    let out_dir = scratch("deblur");
    let out = tlf(&[
        "deblur",
        "--input", path(&fixture("deblur_blurry.tlft")),
        "--kernel", path(&fixture("deblur_kernel.txt")),
        "--gt", path(&fixture("deblur_truth.tlft")),
        "--out", path(&out_dir),
        "--solver", "tlf",
        "--max-iters", "5",
        "--set", "lambda1=1e-3",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let line = String::from_utf8(out.stdout).unwrap();
    assert!(line.starts_with("deblur tlf: "), "{line}");
    assert!(line.contains("PSNR"));
    for f in ["restored.tlft", "trace.csv", "summary.txt"] {
        assert!(out_dir.join(f).exists(), "{f}");
    }
}

#[test]
fn external_denoiser_flag_reaches_the_solver() {
    let out_dir = scratch("external");
    let out = tlf(&[
        "deblur",
        "--input", path(&fixture("deblur_blurry.tlft")),
        "--kernel", path(&fixture("deblur_kernel.txt")),
        "--out", path(&out_dir),
        "--max-iters", "3",
        "--external-denoiser", "/nonexistent/denoiser",
    ]);
    assert!(out.status.success());
    let trace = std::fs::read_to_string(out_dir.join("trace.csv")).unwrap();
    assert!(trace.lines().skip(1).all(|l| l.contains("fell-back-xG")));
}

#[test]
fn exit_codes() {
    let code = |o: Output| o.status.code().unwrap();
    assert_eq!(code(tlf(&["deblur"])), 1);
    assert_eq!(code(tlf(&["frobnicate"])), 1);
    assert_eq!(code(tlf(&["defaults", "nope"])), 1);
    assert_eq!(code(tlf(&["deblur", "--input", "x.tlft", "--kernel", "k.txt", "--set", "step"])), 1);
    assert_eq!(code(tlf(&["deblur", "--input", "x.tlft", "--kernel", "k.txt", "--set", "gamma=2"])), 1);
    let missing = tlf(&[
        "deblur",
        "--input", "/nonexistent/x.tlft",
        "--kernel", path(&fixture("deblur_kernel.txt")),
        "--out", path(&scratch("missing")),
    ]);
    assert_eq!(code(missing), 2);
    let cfg = scratch("badcfg");
    std::fs::create_dir_all(&cfg).unwrap();
    std::fs::write(cfg.join("c.cfg"), "no equals sign\n").unwrap();
    assert_eq!(code(tlf(&["deblur", "--config", path(&cfg.join("c.cfg"))])), 1);
    assert_eq!(code(tlf(&["--help"])), 0);
}
