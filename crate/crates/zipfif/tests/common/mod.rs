//! Shared helpers for the integration tests: loading the shipped run
//! configurations and building systems from them.
#![allow(dead_code)] // each test target uses a different subset

use std::path::PathBuf;

use zipfif::config::LoadedRun;
use zipfif::{load_config, ZipperSystem};

/// The shipped demo configurations whose systems are strictly contractive.
pub const STRICT_CONFIGS: [&str; 5] = [
    "bounded-rectangle.toml",
    "positive.toml",
    "above-lower-lines.toml",
    "below-upper-lines.toml",
    "between-lines.toml",
];

pub fn config_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("../../configs")
        .join(name)
}

pub fn load(name: &str) -> LoadedRun {
    load_config(&config_path(name)).unwrap_or_else(|e| panic!("loading {name}: {e}"))
}

pub fn system(run: &LoadedRun) -> ZipperSystem {
    ZipperSystem::new(
        run.data.clone(),
        run.sig.clone(),
        run.fam.clone(),
        run.mode,
    )
    .unwrap_or_else(|e| panic!("building system for {}: {e}", run.name))
}
