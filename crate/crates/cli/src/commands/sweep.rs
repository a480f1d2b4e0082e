//! Analytic parameter sweeps serialized to CSV.

use std::path::{Path, PathBuf};

use a2s_core::calibration::{
    analytic_compensation, perturbed_log_prob_at, vbias_only_compensation,
};
use a2s_core::config::RunConfig;
use a2s_core::converter::{nonswitch_log_prob, solve_attempt_time, write_current, ConverterConfig};
use a2s_core::device::switching_time_constant;
use a2s_core::sweep::{log_space, write_csv, SweepSeries};

/// Which family of curves to produce.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SweepKind {
    /// Write current vs photocurrent, one series per bias voltage.
    WriteCurrent,
    /// Inverse switching time constant vs write current, one series per
    /// critical current.
    Tau,
    /// Non-switching probability vs photocurrent, one series per
    /// attempt time.
    Probability,
    /// Non-switching probability vs photocurrent under resistance
    /// deviations, optionally compensated.
    Variability,
}

/// Compensation applied to the variability sweep.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum CompensateMode {
    #[default]
    None,
    /// Bias voltage only: pins the 50% anchor, leaves the slope error.
    Vbias,
    /// Bias voltage and attempt time: reproduces the nominal curve.
    Both,
}

#[derive(Debug, Clone)]
pub struct SweepOpts {
    pub kind: SweepKind,
    /// Per-kind series values: bias voltages (V), critical currents (A),
    /// attempt times (s) or resistance deviations (Ω). Defaults apply
    /// when empty.
    pub series: Vec<f64>,
    pub compensate: CompensateMode,
}

const POINTS: usize = 100;
/// Default photocurrent sweep range (A); spans the sensor's dynamic
/// range premise.
const I_PH_RANGE: (f64, f64) = (1e-10, 1e-4);

pub fn cmd_sweep(
    cfg: &RunConfig,
    opts: &SweepOpts,
    out_dir: &Path,
) -> anyhow::Result<Vec<PathBuf>> {
    let (name, series) = match opts.kind {
        SweepKind::WriteCurrent => (
            "write_current.csv".to_string(),
            write_current_series(cfg, opts)?,
        ),
        SweepKind::Tau => ("tau.csv".to_string(), tau_series(cfg, opts)?),
        SweepKind::Probability => (
            "probability.csv".to_string(),
            probability_series(cfg, opts)?,
        ),
        SweepKind::Variability => (
            format!(
                "variability_{}.csv",
                match opts.compensate {
                    CompensateMode::None => "none",
                    CompensateMode::Vbias => "vbias",
                    CompensateMode::Both => "both",
                }
            ),
            variability_series(cfg, opts)?,
        ),
    };
    let path = out_dir.join(name);
    write_csv(&path, &series)?;
    Ok(vec![path])
}

fn write_current_series(cfg: &RunConfig, opts: &SweepOpts) -> anyhow::Result<Vec<SweepSeries>> {
    let v_biases = if opts.series.is_empty() {
        vec![0.0, 0.2, 0.4]
    } else {
        opts.series.clone()
    };
    let xs = log_space(I_PH_RANGE.0, I_PH_RANGE.1, POINTS);
    let mut out = Vec::new();
    for v_bias in v_biases {
        let config = ConverterConfig {
            v_bias,
            ..cfg.converter.clone()
        };
        let mut s = SweepSeries::new(format!("vbias={v_bias}"), "I_ph (A)", "I_w (A)");
        let mut nonpositive = 0usize;
        for &i_ph in &xs {
            let i_w = write_current(&cfg.sensor, &cfg.mtj, &config, i_ph)?;
            if i_w <= 0.0 {
                nonpositive += 1;
            }
            s.points.push((i_ph, i_w));
        }
        if nonpositive > 0 {
            s.metadata.push(format!(
                "nonpositive write current: {nonpositive}/{POINTS} points"
            ));
        }
        out.push(s);
    }
    Ok(out)
}

fn tau_series(cfg: &RunConfig, opts: &SweepOpts) -> anyhow::Result<Vec<SweepSeries>> {
    let criticals = if opts.series.is_empty() {
        vec![50e-6, 100e-6, 200e-6]
    } else {
        opts.series.clone()
    };
    let mut out = Vec::new();
    for i_c0s in criticals {
        let mtj = a2s_core::device::MtjParams {
            i_c0s,
            ..cfg.mtj.clone()
        };
        let xs = log_space(1.05 * i_c0s, 1e-3, POINTS);
        let mut s = SweepSeries::new(format!("ic0s={i_c0s}"), "I_w (A)", "1/tau_p (1/s)");
        for &i_w in &xs {
            let tau_p = switching_time_constant(&mtj, i_w)?;
            s.points.push((i_w, tau_p.recip()));
        }
        out.push(s);
    }
    Ok(out)
}

fn probability_series(cfg: &RunConfig, opts: &SweepOpts) -> anyhow::Result<Vec<SweepSeries>> {
    let times = if opts.series.is_empty() {
        vec![
            1e-9,
            solve_attempt_time(&cfg.sensor, &cfg.mtj, cfg.converter.v_bias),
            10e-9,
        ]
    } else {
        opts.series.clone()
    };
    let xs = log_space(I_PH_RANGE.0, I_PH_RANGE.1, POINTS);
    let mut out = Vec::new();
    for t_write in times {
        let config = ConverterConfig {
            t_write,
            ..cfg.converter.clone()
        };
        let mut s = SweepSeries::new(
            format!("t={t_write}"),
            "I_ph (A)",
            "non-switching probability",
        );
        let mut clipped = 0usize;
        for &i_ph in &xs {
            let p = nonswitch_log_prob(&cfg.sensor, &cfg.mtj, &config, i_ph)?;
            if p.no_switching {
                clipped += 1;
            }
            s.points.push((i_ph, p.pbar()));
        }
        if clipped > 0 {
            s.metadata
                .push(format!("no-switching regime: {clipped}/{POINTS} points"));
        }
        out.push(s);
    }
    Ok(out)
}

fn variability_series(cfg: &RunConfig, opts: &SweepOpts) -> anyhow::Result<Vec<SweepSeries>> {
    let deviations = if opts.series.is_empty() {
        vec![-100.0, -50.0, 50.0, 100.0]
    } else {
        opts.series.clone()
    };
    let xs = log_space(I_PH_RANGE.0, I_PH_RANGE.1, POINTS);
    let mut out = Vec::new();

    let mut baseline = SweepSeries::new("baseline", "I_ph (A)", "non-switching probability");
    for &i_ph in &xs {
        let p = nonswitch_log_prob(&cfg.sensor, &cfg.mtj, &cfg.converter, i_ph)?;
        baseline.points.push((i_ph, p.pbar()));
    }
    out.push(baseline);

    for delta_r in deviations {
        let (t_write, v_bias, note) = match opts.compensate {
            CompensateMode::None => (cfg.converter.t_write, cfg.converter.v_bias, None),
            CompensateMode::Vbias => {
                let comp = vbias_only_compensation(&cfg.sensor, &cfg.mtj, &cfg.converter, delta_r)?;
                (
                    comp.t_prime,
                    comp.v_bias_prime,
                    Some(format!(
                        "vbias-only compensation: v_bias'={:.6} V; residual slope error {:.6}",
                        comp.v_bias_prime, comp.residual_slope_error
                    )),
                )
            }
            CompensateMode::Both => {
                let comp = analytic_compensation(&cfg.sensor, &cfg.mtj, &cfg.converter, delta_r)?;
                (
                    comp.t_prime,
                    comp.v_bias_prime,
                    Some(format!(
                        "full compensation: t'={:e} s; v_bias'={:.6} V",
                        comp.t_prime, comp.v_bias_prime
                    )),
                )
            }
        };
        let mut s = SweepSeries::new(
            format!("dr={delta_r}"),
            "I_ph (A)",
            "non-switching probability",
        );
        s.metadata
            .push("resistance correction assumed independent of the retuned bias".into());
        if let Some(note) = note {
            s.metadata.push(note);
        }
        let mut clipped = 0usize;
        for &i_ph in &xs {
            let p = perturbed_log_prob_at(
                &cfg.sensor,
                &cfg.mtj,
                &cfg.converter,
                delta_r,
                t_write,
                v_bias,
                i_ph,
            )?;
            if p.no_switching {
                clipped += 1;
            }
            s.points.push((i_ph, p.pbar()));
        }
        if clipped > 0 {
            s.metadata
                .push(format!("no-switching regime: {clipped}/{POINTS} points"));
        }
        out.push(s);
    }
    Ok(out)
}
