#![allow(dead_code)]

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use clap::Parser;

use polarscope_cli::{run, Cli, CliError};

pub fn manifest_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
}

pub fn repo_config_dir() -> PathBuf {
    manifest_dir().join("../../config")
}

pub fn fixture(name: &str) -> PathBuf {
    manifest_dir().join("tests/fixtures").join(name)
}

pub fn golden(name: &str) -> PathBuf {
    manifest_dir().join("tests/golden").join(name)
}

/// Copies the repository's `config/` directory and `run_config` (as
/// `polarscope.toml`) into `dir`; returns the staged config path.
pub fn stage(dir: &Path, run_config: &Path) -> PathBuf {
    let cfg_dir = dir.join("config");
    std::fs::create_dir_all(&cfg_dir).unwrap();
    for entry in std::fs::read_dir(repo_config_dir()).unwrap() {
        let entry = entry.unwrap();
        if entry.file_type().unwrap().is_file() {
            std::fs::copy(entry.path(), cfg_dir.join(entry.file_name())).unwrap();
        }
    }
    let target = dir.join("polarscope.toml");
    std::fs::copy(run_config, &target).unwrap();
    target
}

/// Runs the CLI in-process.
pub fn polarscope<I, S>(args: I) -> Result<(), CliError>
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let mut all: Vec<std::ffi::OsString> = vec!["polarscope".into()];
    all.extend(args.into_iter().map(Into::into));
    let cli = Cli::try_parse_from(all).map_err(|e| CliError::Runtime(e.to_string()))?;
    run(&cli)
}

pub fn synth(spec: &Path, out: &Path) {
    polarscope(["synth".into(), spec.as_os_str().to_owned(), "--out".into(), out.as_os_str().to_owned()]).unwrap();
}

/// Every file under `root` except the selection cache, keyed by relative path.
pub fn snapshot(root: &Path) -> BTreeMap<String, Vec<u8>> {
    let mut out = BTreeMap::new();
    walk(root, root, &mut out);
    out
}

fn walk(root: &Path, dir: &Path, out: &mut BTreeMap<String, Vec<u8>>) {
    let Ok(entries) = std::fs::read_dir(dir) else { return };
    for entry in entries {
        let path = entry.unwrap().path();
        let rel = path.strip_prefix(root).unwrap().to_string_lossy().replace('\\', "/");
        if rel == "cache" {
            continue;
        }
        if path.is_dir() {
            walk(root, &path, out);
        } else {
            out.insert(rel, std::fs::read(&path).unwrap());
        }
    }
}

/// Paths whose bytes differ or that exist on one side only.
pub fn diff(a: &BTreeMap<String, Vec<u8>>, b: &BTreeMap<String, Vec<u8>>) -> Vec<String> {
    let mut keys: Vec<&String> = a.keys().chain(b.keys()).collect();
    keys.sort();
    keys.dedup();
    keys.into_iter().filter(|k| a.get(*k) != b.get(*k)).cloned().collect()
}
