#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

pub fn corpus(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../corpus")
        .join(name)
}

/// `--schema/--data-dir/--config` for a corpus fixture.
pub fn inputs(dir: &Path) -> Vec<String> {
    let mut args = vec![
        "--schema".to_string(),
        dir.join("schema.sql").display().to_string(),
        "--data-dir".to_string(),
        dir.join("data").display().to_string(),
    ];
    if dir.join("config.ini").exists() {
        args.push("--config".into());
        args.push(dir.join("config.ini").display().to_string());
    }
    args
}

pub fn ldnf<I, S>(args: I) -> Output
where
    I: IntoIterator<Item = S>,
    S: AsRef<std::ffi::OsStr>,
{
    Command::new(env!("CARGO_BIN_EXE_ldnf"))
        .args(args)
        .env_remove("LDNF_CONFIG")
        .output()
        .expect("binary runs")
}

pub fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

pub fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

pub fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

/// Runs a subcommand against a corpus fixture with extra arguments.
pub fn on(command: &str, fixture: &str, extra: &[&str]) -> Output {
    let mut args = vec![command.to_string()];
    args.extend(inputs(&corpus(fixture)));
    args.extend(extra.iter().map(|s| s.to_string()));
    ldnf(args)
}

/// Rows of a CSV file, header first, split naively on commas.
pub fn csv_rows(path: &Path) -> Vec<Vec<String>> {
    std::fs::read_to_string(path)
        .unwrap_or_else(|e| panic!("{}: {e}", path.display()))
        .lines()
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}
