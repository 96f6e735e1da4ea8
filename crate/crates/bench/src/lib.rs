//! Experiment harness for the metagrad crate: comparator solving, domain
//! sizing and tuning, regret accounting, bound checks, simulations and
//! summaries.

pub mod algo;
pub mod bound;
pub mod comparator;
pub mod error;
pub mod experiment;
pub mod output;
pub mod simulate;
pub mod summary;

use std::path::PathBuf;

pub use algo::Algorithm;
pub use error::{BenchError, Result};

/// Directory searched for LIBSVM files: `$METAGRAD_DATA_DIR`, or `data/` at
/// the workspace root.
pub fn data_dir() -> PathBuf {
    std::env::var_os("METAGRAD_DATA_DIR")
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data"))
}
