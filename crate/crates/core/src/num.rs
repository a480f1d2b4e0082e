//! Scalar abstraction and physical constants shared by the closed-form math.

use num_traits::{Float, FloatConst, FromPrimitive, ToPrimitive};

/// Boltzmann constant (J/K).
pub const BOLTZMANN: f64 = 1.380649e-23;

/// Elementary charge (C).
pub const ELEMENTARY_CHARGE: f64 = 1.602177e-19;

/// Floating-point scalar for the device and circuit equations.
///
/// Implemented by `f32` and `f64`. Conversions from `f64` literals go
/// through [`Real::lit`]; diagnostics that end up in error values go the
/// other way through [`Real::approx_f64`].
pub trait Real:
    Float + FloatConst + FromPrimitive + ToPrimitive + core::fmt::Debug + Send + Sync + 'static
{
    /// Convert an `f64` literal into this scalar type.
    fn lit(value: f64) -> Self {
        Self::from_f64(value).expect("finite literal")
    }

    /// Lossy view of this scalar as `f64`, for diagnostics.
    fn approx_f64(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl<T> Real for T where
    T: Float + FloatConst + FromPrimitive + ToPrimitive + core::fmt::Debug + Send + Sync + 'static
{
}

/// Thermal voltage k_B·T/q (V).
pub fn thermal_voltage<F: Real>(temperature: F) -> F {
    temperature * F::lit(BOLTZMANN / ELEMENTARY_CHARGE)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn thermal_voltage_at_room_temperature() {
        // k_B * 300 / q
        let vt: f64 = thermal_voltage(300.0);
        assert!((vt - 0.0258519938808259).abs() < 1e-16);
    }

    #[test]
    fn literals_convert_to_both_widths() {
        assert_eq!(<f64 as Real>::lit(0.5), 0.5);
        assert_eq!(<f32 as Real>::lit(0.5), 0.5f32);
    }
}
