//! Shared command plumbing: configuration resolution and report output.

mod calibrate;
mod edge;
mod montecarlo;
mod sweep;

pub use calibrate::{cmd_calibrate, CalibrateOpts};
pub use edge::{cmd_edge_detect, EdgeMode, EdgeOpts};
pub use montecarlo::{cmd_montecarlo, MonteCarloOpts};
pub use sweep::{cmd_sweep, CompensateMode, SweepKind, SweepOpts};

use std::path::{Path, PathBuf};

use a2s_core::config::{load_config, RunConfig};

/// Environment variable overriding the default output directory when no
/// `--out` flag is given.
pub const OUT_DIR_ENV: &str = "A2S_OUT_DIR";

/// Options every command shares.
#[derive(Debug, Clone, Default)]
pub struct CommonOpts {
    /// Configuration file; defaults apply when absent.
    pub config: Option<PathBuf>,
    /// Seed override.
    pub seed: Option<u64>,
    /// Output directory override.
    pub out: Option<PathBuf>,
}

/// Load the configuration and apply overrides. Output directory
/// resolution order: `--out`, then `A2S_OUT_DIR`, then the
/// configuration's `output_dir`.
pub fn resolve(common: &CommonOpts) -> anyhow::Result<(RunConfig, PathBuf)> {
    let mut cfg = match &common.config {
        Some(path) => load_config(path)?,
        None => RunConfig::default(),
    };
    if let Some(seed) = common.seed {
        cfg.seed = seed;
    }
    let out_dir = common
        .out
        .clone()
        .or_else(|| std::env::var_os(OUT_DIR_ENV).map(PathBuf::from))
        .unwrap_or_else(|| cfg.output_dir.clone());
    Ok((cfg, out_dir))
}

/// Write a plain-text report atomically and record it in the output
/// list.
fn write_report(path: &Path, text: &str, written: &mut Vec<PathBuf>) -> anyhow::Result<()> {
    a2s_core::io::write_atomic(path, text.as_bytes())?;
    written.push(path.to_path_buf());
    Ok(())
}
