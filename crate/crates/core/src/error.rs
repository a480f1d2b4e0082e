//! Crate-wide error type.

/// Result alias used throughout the crate.
pub type Result<T, E = Error> = core::result::Result<T, E>;

/// Errors produced by the device model, the conversion chain and the
/// stochastic kernels. Scalar diagnostics are carried as `f64` regardless
/// of the scalar type the computation ran at.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{name} must be positive, got {value:e}")]
    NonPositive { name: &'static str, value: f64 },

    #[error("pulse duration {tau_p:e} s is below the thermal attempt time {tau_0:e} s")]
    PulseBelowAttemptTime { tau_p: f64, tau_0: f64 },

    #[error("write current {i_w:e} A is at or below the critical current {i_c0s:e} A")]
    BelowCriticalCurrent { i_w: f64, i_c0s: f64 },

    #[error("pulse width must be non-negative, got {t:e} s")]
    NegativePulseWidth { t: f64 },

    #[error("probability {0} is outside [0, 1]")]
    ProbabilityRange(f64),

    #[error("bit stream lengths differ: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("absolute difference requires streams encoded from the same correlated source tag")]
    UncorrelatedStreams,

    #[error("bit stream length must be at least 1")]
    EmptyStream,

    #[error("pixel grid must be at least 2x2, got {width}x{height}")]
    GridTooSmall { width: usize, height: usize },

    #[error("pixel intensity {value} at index {index} is outside [0, 1]")]
    PixelRange { index: usize, value: f64 },

    #[error("grid dimensions {width}x{height} do not match {len} pixels")]
    GridShape {
        width: usize,
        height: usize,
        len: usize,
    },

    #[error("bit width {0} is outside [1, 16]")]
    BitWidthRange(u32),

    #[error("compensated bias voltage {v_bias:.6} V is outside [0, {v_dd}) V")]
    CompensationOutOfRange { v_bias: f64, v_dd: f64 },

    #[error(
        "stream length {len} cannot resolve probability tolerance {tol} \
         (3-sigma binomial floor is {floor:e})"
    )]
    StreamTooShort { len: usize, tol: f64, floor: f64 },

    #[error("need the 50% anchor plus at least two more inputs, got {0}")]
    TooFewAnchors(usize),

    #[error(
        "calibration did not converge after {iterations} iterations; best so far \
         t' = {t_prime:e} s, v_bias' = {v_bias_prime:.6} V \
         (residuals: p50 {residual_p50:e}, slope {residual_slope:e})"
    )]
    CalibrationDiverged {
        iterations: usize,
        t_prime: f64,
        v_bias_prime: f64,
        residual_p50: f64,
        residual_slope: f64,
    },

    #[error("sweep series '{label}': x values must be strictly increasing at point {index}")]
    NonMonotonicSweep { label: String, index: usize },

    #[error("series label '{0}' may not contain commas or line breaks")]
    BadSeriesLabel(String),

    #[error("CSV parse error at line {line}: {message}")]
    CsvParse { line: usize, message: String },

    #[error("{0}")]
    Pgm(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
