//! Edge detection over a PGM image in one of three pipelines.

use std::path::{Path, PathBuf};

use a2s_core::config::RunConfig;
use a2s_core::kernels::{
    binary_pipeline_with_errors, roberts_cross_exact, roberts_cross_stochastic,
    StochasticEdgeOptions,
};
use a2s_core::pgm::{self, PgmFormat};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EdgeMode {
    /// Bit-stream Roberts cross with optional converter-bit errors.
    Stochastic,
    /// Quantized pipeline with per-bit soft errors.
    Binary,
    /// Noise-free reference.
    Exact,
}

impl EdgeMode {
    fn name(self) -> &'static str {
        match self {
            EdgeMode::Stochastic => "stochastic",
            EdgeMode::Binary => "binary",
            EdgeMode::Exact => "exact",
        }
    }
}

#[derive(Debug, Clone)]
pub struct EdgeOpts {
    pub input: PathBuf,
    pub mode: EdgeMode,
    /// Stream length for the stochastic pipeline.
    pub bits: usize,
    /// Quantization width for the binary pipeline.
    pub bit_width: u32,
    /// Per-bit flip probability on the pipeline inputs.
    pub error_rate: f64,
    /// Worker threads for the stochastic pipeline; 0 uses all cores.
    pub threads: usize,
}

impl Default for EdgeOpts {
    fn default() -> Self {
        Self {
            input: PathBuf::new(),
            mode: EdgeMode::Exact,
            bits: 1000,
            bit_width: 8,
            error_rate: 0.0,
            threads: 0,
        }
    }
}

pub fn cmd_edge_detect(
    cfg: &RunConfig,
    opts: &EdgeOpts,
    out_dir: &Path,
) -> anyhow::Result<Vec<PathBuf>> {
    let image = pgm::read(&opts.input)?;
    let reference = roberts_cross_exact(&image)?;

    let edges = match opts.mode {
        EdgeMode::Exact => reference.clone(),
        EdgeMode::Binary => {
            binary_pipeline_with_errors(&image, opts.bit_width, opts.error_rate, cfg.seed)?
        }
        EdgeMode::Stochastic => {
            let stoch_opts = StochasticEdgeOptions {
                stream_len: opts.bits,
                error_rate: opts.error_rate,
                seed: cfg.seed,
            };
            let run = || roberts_cross_stochastic(&image, &stoch_opts);
            if opts.threads > 0 {
                rayon::ThreadPoolBuilder::new()
                    .num_threads(opts.threads)
                    .build()?
                    .install(run)?
            } else {
                run()?
            }
        }
    };
    let mae = edges.mean_absolute_error(&reference)?;

    let mut written = Vec::new();
    let image_path = out_dir.join(format!("edge_{}.pgm", opts.mode.name()));
    pgm::write(&image_path, &edges, PgmFormat::P5)?;
    written.push(image_path);

    let metrics = format!(
        "mode = {}\n\
         input = {}\n\
         width = {}\n\
         height = {}\n\
         stream_len = {}\n\
         bit_width = {}\n\
         error_rate = {}\n\
         seed = {}\n\
         mae_vs_exact = {:.9}\n",
        opts.mode.name(),
        opts.input.display(),
        image.width(),
        image.height(),
        opts.bits,
        opts.bit_width,
        opts.error_rate,
        cfg.seed,
        mae,
    );
    super::write_report(
        &out_dir.join(format!("edge_{}_metrics.txt", opts.mode.name())),
        &metrics,
        &mut written,
    )?;
    println!("{metrics}");
    Ok(written)
}
