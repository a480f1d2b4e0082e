use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use a2s_cli::commands::{
    self, CalibrateOpts, CommonOpts, CompensateMode, EdgeMode, EdgeOpts, MonteCarloOpts, SweepKind,
    SweepOpts,
};
use a2s_core::config::parse_si_number;

/// Behavioral simulator of an MTJ-based analog-to-stochastic converter.
#[derive(Parser)]
#[command(name = "a2s", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Configuration file (key = value lines); defaults apply when absent.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Seed override for all random streams.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory (falls back to $A2S_OUT_DIR, then the
    /// configuration's output_dir).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
}

impl Common {
    fn opts(&self) -> CommonOpts {
        CommonOpts {
            config: self.config.clone(),
            seed: self.seed,
            out: self.out.clone(),
        }
    }
}

#[derive(Subcommand)]
enum Command {
    /// Emit an analytic curve family as CSV.
    Sweep {
        #[command(flatten)]
        common: Common,
        /// Curve family to sweep.
        #[arg(long, value_enum)]
        kind: KindArg,
        /// Comma-separated series values (SI suffixes allowed): bias
        /// voltages, critical currents, attempt times or resistance
        /// deviations depending on --kind.
        #[arg(long)]
        series: Option<String>,
        /// Variability compensation mode.
        #[arg(long, value_enum, default_value_t = CompensateArg::None)]
        compensate: CompensateArg,
    },
    /// Run seeded switching trials and report the statistics.
    Montecarlo {
        #[command(flatten)]
        common: Common,
        /// Write current (A).
        #[arg(long = "i-w", conflicts_with = "i_ph")]
        i_w: Option<String>,
        /// Photocurrent (A), converted through the sensor chain.
        #[arg(long = "i-ph")]
        i_ph: Option<String>,
        /// Number of trials.
        #[arg(long, default_value_t = 100)]
        trials: usize,
    },
    /// Calibrate a simulated device with hidden variability from its bit
    /// statistics and compare against the closed-form correction.
    Calibrate {
        #[command(flatten)]
        common: Common,
        /// Bits accumulated per measurement.
        #[arg(long, default_value_t = 1_000_000)]
        stream_len: usize,
        /// Accepted |frequency - 0.5| at the anchor.
        #[arg(long, default_value_t = 5e-3)]
        tol_p: f64,
        /// Accepted |log-log slope - 1|.
        #[arg(long, default_value_t = 1e-2)]
        tol_slope: f64,
        /// Measurement budget.
        #[arg(long, default_value_t = 600)]
        max_iterations: usize,
    },
    /// Run edge detection over a PGM image.
    EdgeDetect {
        #[command(flatten)]
        common: Common,
        /// Input image (PGM, P2 or P5).
        #[arg(long)]
        input: PathBuf,
        /// Pipeline to run.
        #[arg(long, value_enum)]
        mode: ModeArg,
        /// Stream length for the stochastic pipeline.
        #[arg(long, default_value_t = 1000)]
        bits: usize,
        /// Quantization width for the binary pipeline.
        #[arg(long, default_value_t = 8)]
        bit_width: u32,
        /// Per-bit flip probability on the pipeline inputs.
        #[arg(long, default_value_t = 0.0)]
        error_rate: f64,
        /// Worker threads for the stochastic pipeline; 0 uses all cores.
        #[arg(long, default_value_t = 0)]
        threads: usize,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum KindArg {
    WriteCurrent,
    Tau,
    Probability,
    Variability,
}

#[derive(Clone, Copy, ValueEnum, Default)]
enum CompensateArg {
    #[default]
    None,
    Vbias,
    Both,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Stochastic,
    Binary,
    Exact,
}

fn parse_number_arg(name: &str, value: &str) -> anyhow::Result<f64> {
    parse_si_number(value).map_err(|e| anyhow::anyhow!("--{name}: {e}"))
}

fn parse_series(text: &str) -> anyhow::Result<Vec<f64>> {
    text.split(',')
        .map(|item| parse_number_arg("series", item.trim()))
        .collect()
}

fn run() -> anyhow::Result<Vec<PathBuf>> {
    let cli = Cli::parse();
    match cli.command {
        Command::Sweep {
            common,
            kind,
            series,
            compensate,
        } => {
            let (cfg, out_dir) = commands::resolve(&common.opts())?;
            let opts = SweepOpts {
                kind: match kind {
                    KindArg::WriteCurrent => SweepKind::WriteCurrent,
                    KindArg::Tau => SweepKind::Tau,
                    KindArg::Probability => SweepKind::Probability,
                    KindArg::Variability => SweepKind::Variability,
                },
                series: match series {
                    Some(text) => parse_series(&text)?,
                    None => Vec::new(),
                },
                compensate: match compensate {
                    CompensateArg::None => CompensateMode::None,
                    CompensateArg::Vbias => CompensateMode::Vbias,
                    CompensateArg::Both => CompensateMode::Both,
                },
            };
            commands::cmd_sweep(&cfg, &opts, &out_dir)
        }
        Command::Montecarlo {
            common,
            i_w,
            i_ph,
            trials,
        } => {
            let (cfg, out_dir) = commands::resolve(&common.opts())?;
            let opts = MonteCarloOpts {
                i_w: i_w.map(|v| parse_number_arg("i-w", &v)).transpose()?,
                i_ph: i_ph.map(|v| parse_number_arg("i-ph", &v)).transpose()?,
                trials,
            };
            commands::cmd_montecarlo(&cfg, &opts, &out_dir)
        }
        Command::Calibrate {
            common,
            stream_len,
            tol_p,
            tol_slope,
            max_iterations,
        } => {
            let (cfg, out_dir) = commands::resolve(&common.opts())?;
            let opts = CalibrateOpts {
                stream_len,
                tol_p,
                tol_slope,
                max_iterations,
            };
            commands::cmd_calibrate(&cfg, &opts, &out_dir)
        }
        Command::EdgeDetect {
            common,
            input,
            mode,
            bits,
            bit_width,
            error_rate,
            threads,
        } => {
            let (cfg, out_dir) = commands::resolve(&common.opts())?;
            let opts = EdgeOpts {
                input,
                mode: match mode {
                    ModeArg::Stochastic => EdgeMode::Stochastic,
                    ModeArg::Binary => EdgeMode::Binary,
                    ModeArg::Exact => EdgeMode::Exact,
                },
                bits,
                bit_width,
                error_rate,
                threads,
            };
            commands::cmd_edge_detect(&cfg, &opts, &out_dir)
        }
    }
}

fn main() -> ExitCode {
    match run() {
        Ok(written) => {
            for path in written {
                println!("wrote {}", path.display());
            }
            ExitCode::SUCCESS
        }
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::FAILURE
        }
    }
}
