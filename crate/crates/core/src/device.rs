//! Closed-form spin-transfer-torque MTJ switching physics.
//!
//! A write pulse of amplitude `i_w` and duration `t` flips the free layer
//! with probability `1 - exp(-t / tau_p)`. The switching time constant
//! `tau_p` diverges at the critical current, so two regimes exist: a
//! thermal-activation regime for long pulses and a spin-injection regime
//! for nanosecond pulses. The conversion chain operates entirely in the
//! spin-injection regime; the thermal formula is exposed for completeness.

use crate::error::{Error, Result};
use crate::num::Real;
use crate::rng::StreamRng;

/// Physical MTJ device constants.
///
/// Defaults describe a 100 nm perpendicular STT-MTJ at room temperature:
/// critical current 200 µA, parallel resistance 1 kΩ, anti-parallel
/// resistance 3 kΩ, thermal stability factor 60, relaxation time 500 ps.
/// The bias coefficients default to zero (bias-independent resistance)
/// and the thermal-regime critical current defaults to the spin-regime
/// value; treat results that depend on either as device-specific.
#[derive(Debug, Clone, PartialEq)]
pub struct MtjParams<F> {
    /// Critical current extrapolated at infinite pulse duration (A).
    pub i_c0s: F,
    /// Critical current extrapolated at the thermal attempt time (A).
    pub i_c0t: F,
    /// Attempt time for thermal switching (s).
    pub tau_0: F,
    /// Relaxation time of the magnetic moment (s).
    pub tau_relax: F,
    /// Thermal stability factor E/k_BT, dimensionless.
    pub e_over_kbt: F,
    /// Parallel-state resistance at zero bias (Ω).
    pub r_p: F,
    /// Anti-parallel-state resistance at zero bias (Ω).
    pub r_ap: F,
    /// First bias coefficient (1/V).
    pub bc1: F,
    /// Second bias coefficient (1/V²).
    pub bc2: F,
    /// Absolute temperature (K).
    pub temperature: F,
}

impl<F: Real> Default for MtjParams<F> {
    fn default() -> Self {
        Self {
            i_c0s: F::lit(200e-6),
            i_c0t: F::lit(200e-6),
            tau_0: F::lit(1e-9),
            tau_relax: F::lit(500e-12),
            e_over_kbt: F::lit(60.0),
            r_p: F::lit(1e3),
            r_ap: F::lit(3e3),
            bc1: F::zero(),
            bc2: F::zero(),
            temperature: F::lit(300.0),
        }
    }
}

impl<F: Real> MtjParams<F> {
    /// ln((π/2) / sqrt(k_BT/E)) — the logarithm shared by the
    /// spin-regime critical current and the switching time constant.
    pub fn spin_log_factor(&self) -> F {
        F::FRAC_PI_2().ln() + F::lit(0.5) * self.e_over_kbt.ln()
    }

    /// List every violated invariant. An empty list means the parameter
    /// set is usable.
    pub fn validate(&self) -> Vec<String> {
        let mut violations = Vec::new();
        let positives: [(&str, F); 8] = [
            ("mtj.i_c0s", self.i_c0s),
            ("mtj.i_c0t", self.i_c0t),
            ("mtj.tau_0", self.tau_0),
            ("mtj.tau_relax", self.tau_relax),
            ("mtj.e_over_kbt", self.e_over_kbt),
            ("mtj.r_p", self.r_p),
            ("mtj.r_ap", self.r_ap),
            ("mtj.temperature", self.temperature),
        ];
        for (name, value) in positives {
            if !(value > F::zero()) {
                violations.push(format!(
                    "{name} must be strictly positive, got {:e}",
                    value.approx_f64()
                ));
            }
        }
        if !(self.r_ap > self.r_p) {
            violations.push(format!(
                "mtj.r_ap ({:e}) must exceed mtj.r_p ({:e})",
                self.r_ap.approx_f64(),
                self.r_p.approx_f64()
            ));
        }
        violations
    }
}

/// Magnetic state of the free layer. `Parallel` is the low-resistance
/// state and the converter's rest state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum MtjState {
    Parallel,
    AntiParallel,
}

impl MtjState {
    /// Zero-bias resistance of this state (Ω).
    pub fn resistance<F: Real>(self, params: &MtjParams<F>) -> F {
        match self {
            MtjState::Parallel => params.r_p,
            MtjState::AntiParallel => params.r_ap,
        }
    }
}

/// Critical current in the thermal-activation regime (long pulses).
///
/// `I_c0t · (1 − ln(τ_p/τ_0) / (E/k_BT))`. Valid for `tau_p >= tau_0`;
/// shorter pulses would extrapolate above `I_c0t` and are rejected.
pub fn critical_current_thermal<F: Real>(params: &MtjParams<F>, tau_p: F) -> Result<F> {
    if tau_p < params.tau_0 {
        return Err(Error::PulseBelowAttemptTime {
            tau_p: tau_p.approx_f64(),
            tau_0: params.tau_0.approx_f64(),
        });
    }
    let thermal = (tau_p / params.tau_0).ln() / params.e_over_kbt;
    Ok(params.i_c0t * (F::one() - thermal))
}

/// Critical current in the spin-injection regime (nanosecond pulses).
///
/// `I_c0s · (1 + (τ_relax/τ_p) · ln((π/2)/sqrt(k_BT/E)))`.
pub fn critical_current_spin<F: Real>(params: &MtjParams<F>, tau_p: F) -> Result<F> {
    if !(tau_p > F::zero()) {
        return Err(Error::NonPositive {
            name: "tau_p",
            value: tau_p.approx_f64(),
        });
    }
    Ok(params.i_c0s * (F::one() + params.tau_relax / tau_p * params.spin_log_factor()))
}

/// Switching time constant for a write current above the critical
/// current; algebraic inverse of [`critical_current_spin`].
///
/// Currents at or below `I_c0s` have no finite time constant and are
/// rejected; the probability level treats them as non-switching instead.
pub fn switching_time_constant<F: Real>(params: &MtjParams<F>, i_w: F) -> Result<F> {
    if i_w <= params.i_c0s {
        return Err(Error::BelowCriticalCurrent {
            i_w: i_w.approx_f64(),
            i_c0s: params.i_c0s.approx_f64(),
        });
    }
    Ok(params.i_c0s * params.tau_relax * params.spin_log_factor() / (i_w - params.i_c0s))
}

/// Probability that a pulse of amplitude `i_w` and width `t` switches the
/// device out of the parallel state: `1 − exp(−t/τ_p)`.
///
/// Sub-critical currents yield exactly zero: the spin-torque term cannot
/// switch the device and thermal activation is negligible over
/// nanosecond pulses at the default stability factor.
pub fn switching_probability<F: Real>(params: &MtjParams<F>, i_w: F, t: F) -> Result<F> {
    if t < F::zero() {
        return Err(Error::NegativePulseWidth { t: t.approx_f64() });
    }
    if i_w <= params.i_c0s {
        return Ok(F::zero());
    }
    let tau_p = switching_time_constant(params, i_w)?;
    Ok(F::one() - (-t / tau_p).exp())
}

/// Parallel-state resistance under a bias voltage `v_b` across the
/// junction: `R_P · (1 + BC1·|v_b| + BC2·|v_b|²)`. Sign-symmetric.
pub fn biased_parallel_resistance<F: Real>(params: &MtjParams<F>, v_b: F) -> F {
    let v = v_b.abs();
    params.r_p * (F::one() + params.bc1 * v + params.bc2 * v * v)
}

/// Sample the state after one write pulse, starting from the parallel
/// state. Consumes exactly one uniform draw.
pub fn sample_switch<F: Real>(
    params: &MtjParams<F>,
    i_w: F,
    t: F,
    rng: &mut StreamRng,
) -> Result<MtjState> {
    let p_w = switching_probability(params, i_w, t)?.approx_f64();
    let u = rng.uniform();
    Ok(if u < p_w {
        MtjState::AntiParallel
    } else {
        MtjState::Parallel
    })
}
