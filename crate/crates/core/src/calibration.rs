//! Resistance-variability modeling and its compensation.
//!
//! A device instance deviates from the nominal parallel resistance by
//! `ΔR`, which shifts both the write current and the log-domain bit
//! probability. Two closed-form corrections restore the nominal
//! transfer curve exactly in-model: scaling the attempt time by
//! `(1 + ΔR/R_Pb)` restores the unit log-log slope, and shifting the
//! bias voltage by `−ΔR·I_c0s` restores the operating point. A
//! bias-only correction can pin the 50% operating point but leaves a
//! slope error of `|ΔR|/(R_Pb + ΔR)`.
//!
//! [`empirical_calibrate`] recovers both corrections from measured bit
//! statistics alone, without access to `ΔR`: it alternates a bisection
//! on the bias voltage until the 50% anchor locks with a bisection on
//! the attempt time until the measured log-log slope reaches one. Both
//! responses are monotone in the controlled parameter, which is what
//! makes bisection valid.

use crate::converter::{
    input_for_nonswitch_prob, log_prob_at, ConverterConfig, NonSwitchProb, SensorParams,
};
use crate::device::{biased_parallel_resistance, MtjParams};
use crate::error::{Error, Result};
use crate::num::{thermal_voltage, Real};
use crate::rng::StreamRng;

/// Resistance deviation of one device instance.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum VariabilityModel<F> {
    /// Deterministic deviation `ΔR` (Ω), signed.
    Fixed { delta_r: F },
    /// Deviation sampled per instance from `N(0, (sigma_rel·R_P)²)`,
    /// truncated so the total resistance stays positive. Array-level
    /// extension; the closed-form analysis uses fixed deviations.
    SampledGaussian { sigma_rel: F },
}

impl<F: Real> VariabilityModel<F> {
    /// List violated invariants against the device it perturbs.
    pub fn validate(&self, r_p: F) -> Vec<String> {
        let mut violations = Vec::new();
        match *self {
            VariabilityModel::Fixed { delta_r } => {
                if !(delta_r.abs() < r_p) {
                    violations.push(format!(
                        "variability.delta_r magnitude ({:e}) must stay below r_p ({:e})",
                        delta_r.approx_f64(),
                        r_p.approx_f64()
                    ));
                }
            }
            VariabilityModel::SampledGaussian { sigma_rel } => {
                if !(sigma_rel >= F::zero() && sigma_rel <= F::lit(0.2)) {
                    violations.push(format!(
                        "variability.sigma_rel must lie in [0, 0.2], got {}",
                        sigma_rel.approx_f64()
                    ));
                }
            }
        }
        violations
    }

    /// Concrete `ΔR` for one device instance. Fixed deviations do not
    /// consume randomness.
    pub fn realize(&self, r_p: F, rng: &mut StreamRng) -> F {
        match *self {
            VariabilityModel::Fixed { delta_r } => delta_r,
            VariabilityModel::SampledGaussian { sigma_rel } => {
                let sigma = (sigma_rel * r_p).approx_f64();
                let bound = r_p.approx_f64() * 0.999;
                loop {
                    let draw = rng.normal() * sigma;
                    if draw.abs() < bound {
                        return F::lit(draw);
                    }
                }
            }
        }
    }
}

/// Outcome of a compensation, closed-form or empirical.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CalibrationResult<F> {
    /// Compensated attempt time t′ (s).
    pub t_prime: F,
    /// Compensated bias voltage V′_bias (V).
    pub v_bias_prime: F,
    /// Number of measurements the empirical loop spent (0 for closed
    /// forms).
    pub iterations: usize,
    /// |measured log-log slope − 1| after compensation.
    pub residual_slope_error: F,
    /// |probability at the 50% anchor − 0.5| after compensation.
    pub residual_p50_error: F,
}

/// Log-domain non-switching probability of a device with resistance
/// deviation `delta_r`, operated at explicit `t_write` / `v_bias`.
///
/// `ΔR` is added to the bias-corrected parallel resistance everywhere it
/// appears; the junction bias entering the resistance correction is
/// taken at the nominal bias voltage, i.e. retuning the bias voltage is
/// assumed not to change the resistance itself.
pub fn perturbed_log_prob_at<F: Real>(
    sensor: &SensorParams<F>,
    mtj: &MtjParams<F>,
    config: &ConverterConfig<F>,
    delta_r: F,
    t_write: F,
    v_bias: F,
    i_ph: F,
) -> Result<NonSwitchProb<F>> {
    let r_pb = crate::converter::write_resistance(sensor, mtj, config.v_bias, i_ph)?;
    log_prob_at(sensor, mtj, i_ph, r_pb + delta_r, t_write, v_bias)
}

/// Log-domain non-switching probability of a perturbed, uncompensated
/// device at the configured operating point.
pub fn perturbed_log_prob<F: Real>(
    sensor: &SensorParams<F>,
    mtj: &MtjParams<F>,
    config: &ConverterConfig<F>,
    delta_r: F,
    i_ph: F,
) -> Result<NonSwitchProb<F>> {
    perturbed_log_prob_at(
        sensor,
        mtj,
        config,
        delta_r,
        config.t_write,
        config.v_bias,
        i_ph,
    )
}

/// Closed-form compensation of both parameters:
/// `t′ = t·(1 + ΔR/R_Pb)` and `V′_bias = V_bias − ΔR·I_c0s`.
///
/// Under the fixed-resistance-correction assumption this reproduces the
/// nominal transfer curve exactly: the scaled attempt time restores the
/// unit slope, and the shifted bias restores the offset term
/// identically for every input.
pub fn analytic_compensation<F: Real>(
    sensor: &SensorParams<F>,
    mtj: &MtjParams<F>,
    config: &ConverterConfig<F>,
    delta_r: F,
) -> Result<CalibrationResult<F>> {
    let r_ref = biased_parallel_resistance(mtj, F::zero());
    let t_prime = config.t_write * (F::one() + delta_r / r_ref);
    let v_bias_prime = config.v_bias - delta_r * mtj.i_c0s;
    if !(v_bias_prime >= F::zero() && v_bias_prime < sensor.v_dd) {
        return Err(Error::CompensationOutOfRange {
            v_bias: v_bias_prime.approx_f64(),
            v_dd: sensor.v_dd.approx_f64(),
        });
    }
    Ok(CalibrationResult {
        t_prime,
        v_bias_prime,
        iterations: 0,
        residual_slope_error: F::zero(),
        residual_p50_error: F::zero(),
    })
}

/// Bias-only compensation: keep `t′ = t` and choose the bias voltage
/// that pins the perturbed curve to the nominal 50% operating point.
///
/// Only the offset can be corrected this way; the log-log slope stays at
/// `β′ = R_Pb/(R_Pb + ΔR)`, recorded as `residual_slope_error`. This is
/// the first step of the empirical procedure run in closed form.
pub fn vbias_only_compensation<F: Real>(
    sensor: &SensorParams<F>,
    mtj: &MtjParams<F>,
    config: &ConverterConfig<F>,
    delta_r: F,
) -> Result<CalibrationResult<F>> {
    let half = F::lit(0.5);
    let anchor = input_for_nonswitch_prob(sensor, mtj, config, half)?;
    let r_ref = biased_parallel_resistance(mtj, F::zero()) + delta_r;
    let alpha = config.t_write / (mtj.i_c0s * mtj.tau_relax * mtj.spin_log_factor());
    let beta = alpha * sensor.n * thermal_voltage(sensor.temperature) / r_ref;
    // solve beta·ln(anchor/I_d0) + alpha·(I_c0s − (V_dd − V′)/R_eff) = ln(1/2)
    let offset_target = (half.ln() - beta * (anchor / sensor.i_d0).ln()) / alpha;
    let v_bias_prime = sensor.v_dd - r_ref * (mtj.i_c0s - offset_target);
    if !(v_bias_prime >= F::zero() && v_bias_prime < sensor.v_dd) {
        return Err(Error::CompensationOutOfRange {
            v_bias: v_bias_prime.approx_f64(),
            v_dd: sensor.v_dd.approx_f64(),
        });
    }
    Ok(CalibrationResult {
        t_prime: config.t_write,
        v_bias_prime,
        iterations: 0,
        residual_slope_error: (F::one() - beta).abs(),
        residual_p50_error: F::zero(),
    })
}

/// A device that can be exercised only through its bit statistics.
pub trait BitSource {
    /// Ones-frequency over `len` conversion cycles at the given
    /// photocurrent, attempt time and bias voltage.
    fn measure(&mut self, i_ph: f64, t_write: f64, v_bias: f64, len: usize) -> f64;
}

/// Simulated converter with a hidden resistance deviation, for
/// exercising the calibration loop against a known ground truth.
#[derive(Debug, Clone)]
pub struct SimulatedMtjConverter {
    sensor: SensorParams<f64>,
    mtj: MtjParams<f64>,
    config: ConverterConfig<f64>,
    delta_r: f64,
    key: crate::rng::StreamKey,
    calls: u64,
}

impl SimulatedMtjConverter {
    pub fn new(
        sensor: SensorParams<f64>,
        mtj: MtjParams<f64>,
        config: ConverterConfig<f64>,
        delta_r: f64,
        key: crate::rng::StreamKey,
    ) -> Self {
        Self {
            sensor,
            mtj,
            config,
            delta_r,
            key,
            calls: 0,
        }
    }
}

impl BitSource for SimulatedMtjConverter {
    fn measure(&mut self, i_ph: f64, t_write: f64, v_bias: f64, len: usize) -> f64 {
        let pbar = perturbed_log_prob_at(
            &self.sensor,
            &self.mtj,
            &self.config,
            self.delta_r,
            t_write,
            v_bias,
            i_ph,
        )
        .map(|p| p.pbar())
        .unwrap_or(1.0);
        let mut rng = self
            .key
            .derive(crate::rng::domains::CALIBRATION, self.calls)
            .rng();
        self.calls += 1;
        let mut ones = 0usize;
        for _ in 0..len {
            ones += usize::from(rng.bernoulli(pbar));
        }
        ones as f64 / len as f64
    }
}

/// Stop conditions of the empirical loop.
#[derive(Debug, Clone, Copy)]
pub struct CalibrationTolerances {
    /// Accepted |frequency − 0.5| at the anchor.
    pub tol_p: f64,
    /// Accepted |log-log slope − 1|.
    pub tol_slope: f64,
    /// Measurement budget before giving up.
    pub max_iterations: usize,
}

impl Default for CalibrationTolerances {
    fn default() -> Self {
        Self {
            tol_p: 5e-3,
            tol_slope: 1e-2,
            max_iterations: 600,
        }
    }
}

/// Recover `(t′, V′_bias)` of an uncharacterized device from bit
/// statistics.
///
/// `anchor_inputs[0]` is the photocurrent whose nominal response is
/// 50%; the remaining entries (at least two, log-spaced) measure the
/// slope. Each outer pass locks the anchor by bisection on the bias
/// voltage over `[0, v_dd)`, then locks the slope by bisection on the
/// attempt time over `[0.2·t, 5·t]`; passes repeat until both residuals
/// hold simultaneously. `iterations` counts individual bit-stream
/// measurements.
pub fn empirical_calibrate(
    device: &mut dyn BitSource,
    anchor_inputs: &[f64],
    stream_len: usize,
    base_t_write: f64,
    base_v_bias: f64,
    v_dd: f64,
    tol: &CalibrationTolerances,
) -> Result<CalibrationResult<f64>> {
    if anchor_inputs.len() < 3 {
        return Err(Error::TooFewAnchors(anchor_inputs.len()));
    }
    let floor = 3.0 * (0.25 / stream_len as f64).sqrt();
    if floor >= tol.tol_p {
        return Err(Error::StreamTooShort {
            len: stream_len,
            tol: tol.tol_p,
            floor,
        });
    }
    let anchor = anchor_inputs[0];
    let slope_inputs = &anchor_inputs[1..];

    let mut iterations = 0usize;
    let mut t = base_t_write;
    let mut v = base_v_bias;
    let mut residual_p = f64::INFINITY;
    let mut residual_s = f64::INFINITY;

    const MAX_PASSES: usize = 8;
    for _pass in 0..MAX_PASSES {
        // step 1: lock the 50% anchor with the bias voltage
        let (mut lo, mut hi) = (0.0, v_dd * (1.0 - 1e-9));
        while iterations < tol.max_iterations {
            let mid = 0.5 * (lo + hi);
            let freq = device.measure(anchor, t, mid, stream_len);
            iterations += 1;
            v = mid;
            if (freq - 0.5).abs() <= 0.5 * tol.tol_p || hi - lo < 1e-7 {
                break;
            }
            // too few ones means too little non-switching: raise the bias
            if freq < 0.5 {
                lo = mid;
            } else {
                hi = mid;
            }
        }

        // step 2: lock the unit log-log slope with the attempt time
        let (mut lo, mut hi) = (0.2 * base_t_write, 5.0 * base_t_write);
        while iterations < tol.max_iterations {
            let mid = 0.5 * (lo + hi);
            let slope = measured_slope(device, slope_inputs, mid, v, stream_len, &mut iterations);
            t = mid;
            if (slope - 1.0).abs() <= 0.5 * tol.tol_slope || hi - lo < 1e-4 * base_t_write {
                break;
            }
            if slope < 1.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }

        // verify both locks hold together
        residual_p = (device.measure(anchor, t, v, stream_len) - 0.5).abs();
        iterations += 1;
        residual_s =
            (measured_slope(device, slope_inputs, t, v, stream_len, &mut iterations) - 1.0).abs();
        if residual_p <= tol.tol_p && residual_s <= tol.tol_slope {
            return Ok(CalibrationResult {
                t_prime: t,
                v_bias_prime: v,
                iterations,
                residual_slope_error: residual_s,
                residual_p50_error: residual_p,
            });
        }
        if iterations >= tol.max_iterations {
            break;
        }
    }
    Err(Error::CalibrationDiverged {
        iterations,
        t_prime: t,
        v_bias_prime: v,
        residual_p50: residual_p,
        residual_slope: residual_s,
    })
}

/// Least-squares log-log slope of the measured response over the slope
/// inputs. Frequencies are clamped away from 0 and 1 so the logarithm
/// stays finite.
fn measured_slope(
    device: &mut dyn BitSource,
    inputs: &[f64],
    t_write: f64,
    v_bias: f64,
    stream_len: usize,
    iterations: &mut usize,
) -> f64 {
    let eps = 1.0 / stream_len as f64;
    let points: Vec<(f64, f64)> = inputs
        .iter()
        .map(|&i_ph| {
            let freq = device
                .measure(i_ph, t_write, v_bias, stream_len)
                .clamp(eps, 1.0 - eps);
            *iterations += 1;
            (i_ph.ln(), freq.ln())
        })
        .collect();
    let n = points.len() as f64;
    let mean_x = points.iter().map(|p| p.0).sum::<f64>() / n;
    let mean_y = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = points.iter().map(|p| (p.0 - mean_x) * (p.1 - mean_y)).sum();
    let sxx: f64 = points.iter().map(|p| (p.0 - mean_x) * (p.0 - mean_x)).sum();
    sxy / sxx
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::{domains, StreamKey};
    use crate::sweep::log_space;
    use approx::assert_relative_eq;

    fn chain() -> (SensorParams<f64>, MtjParams<f64>, ConverterConfig<f64>) {
        (
            SensorParams::default(),
            MtjParams::default(),
            ConverterConfig::default(),
        )
    }

    #[test]
    fn zero_deviation_is_the_identity() {
        let (s, m, c) = chain();
        for &i_ph in &log_space(1e-9, 1e-5, 50) {
            let nominal = crate::converter::nonswitch_log_prob(&s, &m, &c, i_ph).unwrap();
            let perturbed = perturbed_log_prob(&s, &m, &c, 0.0, i_ph).unwrap();
            assert_relative_eq!(
                perturbed.ln_pbar,
                nominal.ln_pbar,
                max_relative = 1e-15,
                epsilon = 1e-300
            );
        }
    }

    #[test]
    fn deviation_shifts_the_anchor_with_matching_sign() {
        let (s, m, c) = chain();
        let anchor = input_for_nonswitch_prob(&s, &m, &c, 0.5).unwrap();
        // larger resistance lowers the write current, so switching drops
        // and the ones-frequency rises
        let plus = perturbed_log_prob(&s, &m, &c, 100.0, anchor)
            .unwrap()
            .pbar();
        let minus = perturbed_log_prob(&s, &m, &c, -100.0, anchor)
            .unwrap()
            .pbar();
        assert!(plus > 0.5 && minus < 0.5, "plus = {plus}, minus = {minus}");
    }

    #[test]
    fn analytic_compensation_examples() {
        let (s, m, c) = chain();
        let comp = analytic_compensation(&s, &m, &c, 100.0).unwrap();
        assert_relative_eq!(comp.t_prime, 5.316089926586246e-9, max_relative = 1e-13);
        assert_relative_eq!(comp.v_bias_prime, 0.38, max_relative = 1e-13);
        let zero = analytic_compensation(&s, &m, &c, 0.0).unwrap();
        assert_eq!(zero.t_prime, c.t_write);
        assert_eq!(zero.v_bias_prime, c.v_bias);
    }

    #[test]
    fn analytic_compensation_is_exact_across_the_sweep() {
        let (s, m, c) = chain();
        for delta_r in [-100.0, -50.0, 50.0, 100.0] {
            let comp = analytic_compensation(&s, &m, &c, delta_r).unwrap();
            for &i_ph in &log_space(1e-9, 2e-5, 100) {
                let nominal = crate::converter::nonswitch_log_prob(&s, &m, &c, i_ph).unwrap();
                let compensated = perturbed_log_prob_at(
                    &s,
                    &m,
                    &c,
                    delta_r,
                    comp.t_prime,
                    comp.v_bias_prime,
                    i_ph,
                )
                .unwrap();
                assert_relative_eq!(compensated.pbar(), nominal.pbar(), max_relative = 1e-9);
            }
        }
    }

    #[test]
    fn compensation_rejects_out_of_range_bias() {
        let (s, m, mut c) = chain();
        c.v_bias = 0.01;
        // ΔR·I_c0s = 20 mV exceeds the 10 mV headroom
        assert!(matches!(
            analytic_compensation(&s, &m, &c, 100.0),
            Err(Error::CompensationOutOfRange { .. })
        ));
    }

    #[test]
    fn vbias_only_pins_the_anchor_but_not_the_slope() {
        let (s, m, c) = chain();
        let anchor = input_for_nonswitch_prob(&s, &m, &c, 0.5).unwrap();
        for (delta_r, slope_err, v_expected) in [
            (100.0, 100.0 / 1100.0, 0.3764161526659303),
            (50.0, 50.0 / 1050.0, 0.38820807633296517),
            (-50.0, 50.0 / 950.0, 0.41179192366703476),
            (-100.0, 100.0 / 900.0, 0.4235838473340694),
        ] {
            let comp = vbias_only_compensation(&s, &m, &c, delta_r).unwrap();
            assert_eq!(comp.t_prime, c.t_write);
            assert_relative_eq!(comp.v_bias_prime, v_expected, max_relative = 1e-12);
            assert_relative_eq!(comp.residual_slope_error, slope_err, max_relative = 1e-10);
            let at_anchor =
                perturbed_log_prob_at(&s, &m, &c, delta_r, comp.t_prime, comp.v_bias_prime, anchor)
                    .unwrap();
            assert_relative_eq!(at_anchor.pbar(), 0.5, max_relative = 1e-9);
        }
        let zero = vbias_only_compensation(&s, &m, &c, 0.0).unwrap();
        assert!(zero.residual_slope_error < 1e-12);
    }

    #[test]
    fn gaussian_realizations_stay_bounded_and_spread() {
        let model = VariabilityModel::SampledGaussian { sigma_rel: 0.05 };
        let mut rng = StreamKey::root(7).derive(domains::VARIABILITY, 0).rng();
        let draws: Vec<f64> = (0..2000).map(|_| model.realize(1e3, &mut rng)).collect();
        assert!(draws.iter().all(|d| d.abs() < 1e3));
        let mean = draws.iter().sum::<f64>() / draws.len() as f64;
        let var = draws.iter().map(|d| (d - mean) * (d - mean)).sum::<f64>() / draws.len() as f64;
        assert!(mean.abs() < 5.0, "mean = {mean}");
        assert!((var.sqrt() - 50.0).abs() < 5.0, "sd = {}", var.sqrt());
    }

    #[test]
    fn variability_validation() {
        let fixed = VariabilityModel::Fixed { delta_r: 1200.0 };
        assert_eq!(fixed.validate(1e3).len(), 1);
        let gauss = VariabilityModel::SampledGaussian { sigma_rel: 0.5 };
        assert_eq!(gauss.validate(1e3).len(), 1);
        let ok = VariabilityModel::Fixed { delta_r: -100.0 };
        assert!(ok.validate(1e3).is_empty());
    }

    fn calibrate_hidden(delta_r: f64, seed: u64) -> CalibrationResult<f64> {
        let (s, m, c) = chain();
        let anchor = input_for_nonswitch_prob(&s, &m, &c, 0.5).unwrap();
        let mut dut = SimulatedMtjConverter::new(
            s.clone(),
            m.clone(),
            c.clone(),
            delta_r,
            StreamKey::root(seed),
        );
        let anchors = [anchor, 1e-6, 3.1623e-6, 1e-5];
        empirical_calibrate(
            &mut dut,
            &anchors,
            1_000_000,
            c.t_write,
            c.v_bias,
            s.v_dd,
            &CalibrationTolerances::default(),
        )
        .unwrap()
    }

    #[test]
    fn empirical_loop_recovers_the_closed_form_for_positive_deviation() {
        let (s, m, c) = chain();
        let truth = analytic_compensation(&s, &m, &c, 100.0).unwrap();
        let found = calibrate_hidden(100.0, 101);
        assert!((found.v_bias_prime - truth.v_bias_prime).abs() < 5e-3);
        assert!((found.t_prime - truth.t_prime).abs() / truth.t_prime < 0.03);
        assert!(found.iterations > 0);
    }

    #[test]
    fn empirical_loop_recovers_the_closed_form_for_negative_deviation() {
        let (s, m, c) = chain();
        let truth = analytic_compensation(&s, &m, &c, -50.0).unwrap();
        let found = calibrate_hidden(-50.0, 103);
        assert!((found.v_bias_prime - truth.v_bias_prime).abs() < 5e-3);
        assert!((found.t_prime - truth.t_prime).abs() / truth.t_prime < 0.03);
    }

    #[test]
    fn empirical_loop_is_a_no_op_for_a_nominal_device() {
        let (s, m, c) = chain();
        let found = calibrate_hidden(0.0, 107);
        assert!((found.v_bias_prime - c.v_bias).abs() < 5e-3);
        assert!((found.t_prime - c.t_write).abs() / c.t_write < 0.03);
        let _ = (s, m);
    }

    #[test]
    fn calibration_rejects_insufficient_streams() {
        let (s, m, c) = chain();
        let mut dut = SimulatedMtjConverter::new(s.clone(), m, c.clone(), 0.0, StreamKey::root(1));
        let err = empirical_calibrate(
            &mut dut,
            &[5e-6, 1e-6, 1e-5],
            1000,
            c.t_write,
            c.v_bias,
            s.v_dd,
            &CalibrationTolerances::default(),
        );
        assert!(matches!(err, Err(Error::StreamTooShort { .. })));
        let err = empirical_calibrate(
            &mut dut,
            &[5e-6, 1e-6],
            1_000_000,
            c.t_write,
            c.v_bias,
            s.v_dd,
            &CalibrationTolerances::default(),
        );
        assert!(matches!(err, Err(Error::TooFewAnchors(2))));
    }
}
