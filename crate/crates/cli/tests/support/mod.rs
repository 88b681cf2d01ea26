#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

pub mod svg;

/// Small synthetic run that trains in a couple of seconds.
pub fn toy_config(dir: &Path, task: &str, extra: &str) -> PathBuf {
    let path = dir.join("ids.toml");
    let text = format!(
        r#"task = "{task}"
seed = 11
out = "run"

[data]
synthetic_scale = 0.01

[model]
conv_filters = 4
lstm_units = 8
learning_rate = 0.01
batch_size = 32
max_epochs = 2
{extra}"#
    );
    std::fs::write(&path, text).unwrap();
    path
}

pub fn ids(config: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_ids"))
        .arg("--config")
        .arg(config)
        .args(args)
        .env("IDS_THREADS", "2")
        .output()
        .expect("spawn ids")
}

pub fn ok(config: &Path, args: &[&str]) -> Output {
    let out = ids(config, args);
    assert!(
        out.status.success(),
        "ids {args:?} failed: {}\n{}",
        String::from_utf8_lossy(&out.stdout),
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

pub fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

pub fn full_run(config: &Path) {
    for cmd in ["preprocess", "train", "evaluate", "report"] {
        ok(config, &[cmd]);
    }
}
