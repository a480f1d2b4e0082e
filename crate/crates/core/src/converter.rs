//! The analog-to-stochastic conversion chain.
//!
//! A logarithmic image sensor turns a photocurrent into a voltage, the
//! converter cell turns that voltage into a write current through the
//! MTJ, and the probabilistic switching of the junction turns the write
//! current into a Bernoulli bit. In the log domain the non-switching
//! probability is affine in `ln(i_ph)` with slope `beta`; choosing the
//! write attempt time so that `beta = 1` makes the bit probability
//! exactly proportional to the photocurrent, which is the property the
//! whole chain exists to deliver.
//!
//! Each conversion cycle has three phases: a probabilistic write, a set
//! phase that latches the state as one output bit (high while the
//! junction stayed parallel), and an erase that returns the junction to
//! the parallel state.

use crate::bitstream::BitStream;
use crate::device::{biased_parallel_resistance, sample_switch, MtjParams, MtjState};
use crate::error::{Error, Result};
use crate::num::{thermal_voltage, Real, BOLTZMANN, ELEMENTARY_CHARGE};
use crate::rng::StreamRng;

/// Logarithmic sensor operating point.
#[derive(Debug, Clone, PartialEq)]
pub struct SensorParams<F> {
    /// Supply voltage (V).
    pub v_dd: F,
    /// Process-dependent sensor current scale (A).
    pub i_d0: F,
    /// Sensor slope factor, typically 1.3–2.
    pub n: F,
    /// Absolute temperature (K); must match the device temperature.
    pub temperature: F,
}

impl<F: Real> Default for SensorParams<F> {
    fn default() -> Self {
        Self {
            v_dd: F::lit(1.2),
            i_d0: F::lit(0.1e-9),
            n: F::lit(2.0),
            temperature: F::lit(300.0),
        }
    }
}

impl<F: Real> SensorParams<F> {
    pub fn validate(&self) -> Vec<String> {
        let mut violations = Vec::new();
        if !(self.v_dd > F::zero()) {
            violations.push(format!(
                "sensor.v_dd must be strictly positive, got {:e}",
                self.v_dd.approx_f64()
            ));
        }
        if !(self.i_d0 > F::zero()) {
            violations.push(format!(
                "sensor.i_d0 must be strictly positive, got {:e}",
                self.i_d0.approx_f64()
            ));
        }
        if !(self.n >= F::one() && self.n <= F::lit(3.0)) {
            violations.push(format!(
                "sensor.n must lie in [1, 3], got {}",
                self.n.approx_f64()
            ));
        }
        if !(self.temperature > F::zero()) {
            violations.push(format!(
                "sensor.temperature must be strictly positive, got {:e}",
                self.temperature.approx_f64()
            ));
        }
        violations
    }
}

/// Circuit-level operating point of one converter cell.
///
/// The write attempt time defaults to the solved value that makes the
/// conversion linear for the default device and sensor; set and erase
/// durations are bookkeeping for cycle-time reporting only.
#[derive(Debug, Clone, PartialEq)]
pub struct ConverterConfig<F> {
    /// Write-path bias voltage (V).
    pub v_bias: F,
    /// Write-current attempt time (s).
    pub t_write: F,
    /// Set-phase duration (s).
    pub t_set: F,
    /// Erase-phase duration (s).
    pub t_erase: F,
    /// Total cycle time (s).
    pub t_cycle: F,
    /// Probability that an erase pulse fails to restore the parallel
    /// state. The model described by the closed-form equations assumes a
    /// deterministic erase; this hook exists for robustness studies and
    /// defaults to zero.
    pub erase_failure_prob: F,
}

impl<F: Real> Default for ConverterConfig<F> {
    fn default() -> Self {
        let sensor = SensorParams::default();
        let mtj = MtjParams::default();
        let v_bias = F::lit(0.4);
        Self {
            v_bias,
            t_write: solve_attempt_time(&sensor, &mtj, v_bias),
            t_set: F::lit(1e-9),
            t_erase: F::lit(4e-9),
            t_cycle: F::lit(10e-9),
            erase_failure_prob: F::zero(),
        }
    }
}

impl<F: Real> ConverterConfig<F> {
    pub fn validate(&self, v_dd: F) -> Vec<String> {
        let mut violations = Vec::new();
        if !(self.v_bias >= F::zero() && self.v_bias < v_dd) {
            violations.push(format!(
                "converter.v_bias must lie in [0, v_dd = {}), got {}",
                v_dd.approx_f64(),
                self.v_bias.approx_f64()
            ));
        }
        for (name, value) in [
            ("converter.t_write", self.t_write),
            ("converter.t_set", self.t_set),
            ("converter.t_erase", self.t_erase),
            ("converter.t_cycle", self.t_cycle),
        ] {
            if !(value > F::zero()) {
                violations.push(format!(
                    "{name} must be strictly positive, got {:e}",
                    value.approx_f64()
                ));
            }
        }
        if self.t_write + self.t_set + self.t_erase > self.t_cycle {
            violations.push(format!(
                "phase durations exceed the cycle time: {:e} + {:e} + {:e} > {:e}",
                self.t_write.approx_f64(),
                self.t_set.approx_f64(),
                self.t_erase.approx_f64(),
                self.t_cycle.approx_f64()
            ));
        }
        if !(self.erase_failure_prob >= F::zero() && self.erase_failure_prob <= F::one()) {
            violations.push(format!(
                "converter.erase_failure_prob must lie in [0, 1], got {}",
                self.erase_failure_prob.approx_f64()
            ));
        }
        violations
    }
}

/// Sensor output voltage for a photocurrent:
/// `V_dd − n·(k_BT/q)·ln(i_ph/I_d0)`.
pub fn photocurrent_to_voltage<F: Real>(sensor: &SensorParams<F>, i_ph: F) -> Result<F> {
    if !(i_ph > F::zero()) {
        return Err(Error::NonPositive {
            name: "i_ph",
            value: i_ph.approx_f64(),
        });
    }
    let vt = thermal_voltage(sensor.temperature);
    Ok(sensor.v_dd - sensor.n * vt * (i_ph / sensor.i_d0).ln())
}

/// Parallel-state resistance seen by the write path, evaluated at the
/// junction bias `V_b = V_ph − V_bias`.
pub fn write_resistance<F: Real>(
    sensor: &SensorParams<F>,
    mtj: &MtjParams<F>,
    v_bias: F,
    i_ph: F,
) -> Result<F> {
    let v_ph = photocurrent_to_voltage(sensor, i_ph)?;
    Ok(biased_parallel_resistance(mtj, v_ph - v_bias))
}

/// Write current through the junction during the write phase:
/// `(V_dd − V_bias)/R_Pb − n·k_BT/(q·R_Pb)·ln(i_ph/I_d0)`.
///
/// Monotonically decreasing in the photocurrent when the bias
/// coefficients are zero. Large photocurrents drive the value to or
/// below zero; downstream consumers treat anything at or below the
/// critical current as non-switching.
pub fn write_current<F: Real>(
    sensor: &SensorParams<F>,
    mtj: &MtjParams<F>,
    config: &ConverterConfig<F>,
    i_ph: F,
) -> Result<F> {
    let r_pb = write_resistance(sensor, mtj, config.v_bias, i_ph)?;
    let vt = thermal_voltage(sensor.temperature);
    Ok((sensor.v_dd - config.v_bias) / r_pb - sensor.n * vt / r_pb * (i_ph / sensor.i_d0).ln())
}

/// Log-domain non-switching probability together with the regime flag.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NonSwitchProb<F> {
    /// `ln(p̄_w)`, clamped to 0 in the non-switching regime.
    pub ln_pbar: F,
    /// True when the write current is at or below the critical current,
    /// so the bit is 1 with certainty.
    pub no_switching: bool,
}

impl<F: Real> NonSwitchProb<F> {
    /// Non-switching probability `p̄_w` in linear space.
    pub fn pbar(&self) -> F {
        self.ln_pbar.exp()
    }
}

/// `ln(p̄_w)` as an affine function of `ln(i_ph)`:
/// `β·ln(i_ph/I_d0) + α·(I_c0s − (V_dd−V_bias)/R_Pb)` with
/// `α = t/(I_c0s·τ_relax·ln((π/2)/sqrt(k_BT/E)))` and
/// `β = α·n·k_BT/(q·R_Pb)`.
///
/// Algebraically identical to `−t/τ_p` evaluated at the write current,
/// so the affine form and the exponential switching law agree to
/// rounding error.
pub fn nonswitch_log_prob<F: Real>(
    sensor: &SensorParams<F>,
    mtj: &MtjParams<F>,
    config: &ConverterConfig<F>,
    i_ph: F,
) -> Result<NonSwitchProb<F>> {
    let r_pb = write_resistance(sensor, mtj, config.v_bias, i_ph)?;
    log_prob_at(sensor, mtj, i_ph, r_pb, config.t_write, config.v_bias)
}

/// Shared evaluator for the nominal and variability-perturbed chains:
/// the effective write-path resistance, attempt time and bias voltage
/// are supplied by the caller.
pub(crate) fn log_prob_at<F: Real>(
    sensor: &SensorParams<F>,
    mtj: &MtjParams<F>,
    i_ph: F,
    resistance: F,
    t_write: F,
    v_bias: F,
) -> Result<NonSwitchProb<F>> {
    if !(i_ph > F::zero()) {
        return Err(Error::NonPositive {
            name: "i_ph",
            value: i_ph.approx_f64(),
        });
    }
    let alpha = t_write / (mtj.i_c0s * mtj.tau_relax * mtj.spin_log_factor());
    let beta = alpha * sensor.n * thermal_voltage(sensor.temperature) / resistance;
    let ln_pbar = beta * (i_ph / sensor.i_d0).ln()
        + alpha * (mtj.i_c0s - (sensor.v_dd - v_bias) / resistance);
    if ln_pbar >= F::zero() {
        // write current at or below critical: the device never switches
        Ok(NonSwitchProb {
            ln_pbar: F::zero(),
            no_switching: true,
        })
    } else {
        Ok(NonSwitchProb {
            ln_pbar,
            no_switching: false,
        })
    }
}

/// The unique attempt time that makes `β = 1`, i.e. makes the bit
/// probability linear in the photocurrent:
/// `t = I_c0s·τ_relax·ln((π/2)/sqrt(k_BT/E)) · q·R_P/(n·k_BT)`.
///
/// The write-path resistance is taken at zero junction bias; with
/// nonzero bias coefficients `β` varies along the sweep and no single
/// attempt time linearizes every operating point.
pub fn solve_attempt_time<F: Real>(sensor: &SensorParams<F>, mtj: &MtjParams<F>, _v_bias: F) -> F {
    let r_pb = biased_parallel_resistance(mtj, F::zero());
    let charge_over_nkt =
        F::lit(ELEMENTARY_CHARGE) / (sensor.n * F::lit(BOLTZMANN) * sensor.temperature);
    mtj.i_c0s * mtj.tau_relax * mtj.spin_log_factor() * charge_over_nkt * r_pb
}

/// Photocurrent at which the chain produces a given non-switching
/// probability. Closed form when the bias coefficients are zero;
/// otherwise refined by a short fixed-point iteration on the
/// bias-dependent resistance.
pub fn input_for_nonswitch_prob<F: Real>(
    sensor: &SensorParams<F>,
    mtj: &MtjParams<F>,
    config: &ConverterConfig<F>,
    pbar: F,
) -> Result<F> {
    let p = pbar.approx_f64();
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::ProbabilityRange(p));
    }
    let alpha = config.t_write / (mtj.i_c0s * mtj.tau_relax * mtj.spin_log_factor());
    let vt = thermal_voltage(sensor.temperature);
    let mut r_pb = biased_parallel_resistance(mtj, F::zero());
    let mut i_ph = sensor.i_d0;
    for _ in 0..64 {
        let beta = alpha * sensor.n * vt / r_pb;
        let offset = alpha * (mtj.i_c0s - (sensor.v_dd - config.v_bias) / r_pb);
        let next = sensor.i_d0 * ((pbar.ln() - offset) / beta).exp();
        let converged = ((next - i_ph) / next).abs() < F::lit(1e-14);
        i_ph = next;
        if converged {
            break;
        }
        r_pb = write_resistance(sensor, mtj, config.v_bias, i_ph)?;
    }
    Ok(i_ph)
}

/// One converter cell tracking the junction state across cycles.
#[derive(Debug, Clone, Default)]
pub struct ConverterCell {
    state: Option<MtjState>,
}

impl ConverterCell {
    pub fn new() -> Self {
        Self { state: None }
    }

    /// Junction state after the last cycle (parallel before any cycle).
    pub fn state(&self) -> MtjState {
        self.state.unwrap_or(MtjState::Parallel)
    }

    /// Run one write/set/erase cycle and return the emitted bit.
    ///
    /// Write: sample the switching outcome at the write current for this
    /// photocurrent. Set: latch 1 while the junction stayed parallel,
    /// 0 once it switched. Erase: return to the parallel state
    /// (deterministically unless an erase-failure probability is set).
    pub fn cycle<F: Real>(
        &mut self,
        sensor: &SensorParams<F>,
        mtj: &MtjParams<F>,
        config: &ConverterConfig<F>,
        i_ph: F,
        rng: &mut StreamRng,
    ) -> Result<u8> {
        // write phase; a junction already anti-parallel cannot be
        // switched further by the write-direction current
        let state = match self.state() {
            MtjState::Parallel => {
                let i_w = write_current(sensor, mtj, config, i_ph)?;
                sample_switch(mtj, i_w, config.t_write, rng)?
            }
            MtjState::AntiParallel => MtjState::AntiParallel,
        };
        // set phase
        let bit = u8::from(state == MtjState::Parallel);
        // erase phase
        let fail = config.erase_failure_prob.approx_f64();
        self.state = if fail > 0.0 && rng.uniform() < fail {
            Some(state)
        } else {
            Some(MtjState::Parallel)
        };
        Ok(bit)
    }
}

/// One conversion cycle starting from the parallel state.
/// `P(bit = 1) = p̄_w(i_ph)`.
pub fn convert_sample<F: Real>(
    sensor: &SensorParams<F>,
    mtj: &MtjParams<F>,
    config: &ConverterConfig<F>,
    i_ph: F,
    rng: &mut StreamRng,
) -> Result<u8> {
    ConverterCell::new().cycle(sensor, mtj, config, i_ph, rng)
}

/// Generate a Bernoulli bit stream of `length` conversion cycles. The
/// decoded value of the stream estimates `p̄_w(i_ph)`.
pub fn generate_bitstream<F: Real>(
    sensor: &SensorParams<F>,
    mtj: &MtjParams<F>,
    config: &ConverterConfig<F>,
    i_ph: F,
    length: usize,
    rng: &mut StreamRng,
) -> Result<BitStream> {
    if length == 0 {
        return Err(Error::EmptyStream);
    }
    let mut cell = ConverterCell::new();
    let mut bits = Vec::with_capacity(length);
    for _ in 0..length {
        bits.push(cell.cycle(sensor, mtj, config, i_ph, rng)?);
    }
    Ok(BitStream::from_bits(&bits))
}
