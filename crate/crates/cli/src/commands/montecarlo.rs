//! Seeded Monte-Carlo switching trials.

use std::path::{Path, PathBuf};

use a2s_core::config::RunConfig;
use a2s_core::converter::write_current;
use a2s_core::device::{sample_switch, switching_probability, MtjState};
use a2s_core::rng::{domains, StreamKey};
use a2s_core::sweep::{write_csv, SweepSeries};

#[derive(Debug, Clone)]
pub struct MonteCarloOpts {
    /// Write current (A); mutually exclusive with `i_ph`.
    pub i_w: Option<f64>,
    /// Photocurrent (A); converted through the chain first.
    pub i_ph: Option<f64>,
    pub trials: usize,
}

pub fn cmd_montecarlo(
    cfg: &RunConfig,
    opts: &MonteCarloOpts,
    out_dir: &Path,
) -> anyhow::Result<Vec<PathBuf>> {
    let i_w = match (opts.i_w, opts.i_ph) {
        (Some(i_w), None) => i_w,
        (None, Some(i_ph)) => write_current(&cfg.sensor, &cfg.mtj, &cfg.converter, i_ph)?,
        _ => anyhow::bail!("exactly one of --i-w and --i-ph is required"),
    };
    if opts.trials == 0 {
        anyhow::bail!("--trials must be at least 1");
    }
    let t = cfg.converter.t_write;
    let analytic = switching_probability(&cfg.mtj, i_w, t)?;

    let root = StreamKey::root(cfg.seed);
    let mut series = SweepSeries::new("switched", "trial", "switched");
    let mut switched = 0u64;
    for trial in 0..opts.trials {
        let mut rng = root.derive(domains::MONTE_CARLO, trial as u64).rng();
        let outcome = sample_switch(&cfg.mtj, i_w, t, &mut rng)?;
        let bit = u64::from(outcome == MtjState::AntiParallel);
        switched += bit;
        series.points.push((trial as f64, bit as f64));
    }
    let empirical = switched as f64 / opts.trials as f64;
    let (wilson_lo, wilson_hi) = wilson_interval(switched, opts.trials as u64);

    let mut written = Vec::new();
    let csv_path = out_dir.join("montecarlo.csv");
    write_csv(&csv_path, &[series])?;
    written.push(csv_path);

    let summary = format!(
        "trials = {}\n\
         i_w = {:e} A\n\
         t_write = {:e} s\n\
         analytic_p_w = {:.9}\n\
         empirical_p_w = {:.9}\n\
         wilson_95_low = {:.9}\n\
         wilson_95_high = {:.9}\n\
         seed = {}\n",
        opts.trials, i_w, t, analytic, empirical, wilson_lo, wilson_hi, cfg.seed
    );
    super::write_report(
        &out_dir.join("montecarlo_summary.txt"),
        &summary,
        &mut written,
    )?;
    println!("{summary}");
    Ok(written)
}

/// 95% Wilson score interval for a binomial proportion.
fn wilson_interval(successes: u64, trials: u64) -> (f64, f64) {
    let z = 1.959963984540054f64;
    let n = trials as f64;
    let p = successes as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    ((center - half).max(0.0), (center + half).min(1.0))
}
