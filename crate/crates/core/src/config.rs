//! Plain-text run configuration.
//!
//! The format is one `key = value` pair per line with dotted section
//! keys, `#` comments and blank lines. Numeric values accept scientific
//! notation (`200e-6`) or an SI scale suffix (`200u`); recognized
//! suffixes are `f p n u m k M G`. Missing keys fall back to the
//! built-in defaults, and every invariant violation is reported in one
//! pass rather than first-error-wins.
//!
//! ```text
//! # device
//! mtj.i_c0s = 200u
//! mtj.r_p   = 1k
//! converter.v_bias = 0.4
//! seed = 42
//! output_dir = out
//! ```

use std::path::{Path, PathBuf};

use crate::calibration::VariabilityModel;
use crate::converter::{solve_attempt_time, ConverterConfig, SensorParams};
use crate::device::MtjParams;
use crate::rng::DEFAULT_SEED;

/// A full run description: device, sensor, converter operating point,
/// optional variability, seed and output directory.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub mtj: MtjParams<f64>,
    pub sensor: SensorParams<f64>,
    pub converter: ConverterConfig<f64>,
    pub variability: Option<VariabilityModel<f64>>,
    pub seed: u64,
    pub output_dir: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            mtj: MtjParams::default(),
            sensor: SensorParams::default(),
            converter: ConverterConfig::default(),
            variability: None,
            seed: DEFAULT_SEED,
            output_dir: PathBuf::from("out"),
        }
    }
}

impl RunConfig {
    /// List every violated invariant across all sections.
    pub fn validate(&self) -> Vec<String> {
        let mut violations = self.mtj.validate();
        violations.extend(self.sensor.validate());
        violations.extend(self.converter.validate(self.sensor.v_dd));
        if let Some(var) = &self.variability {
            violations.extend(var.validate(self.mtj.r_p));
        }
        if self.mtj.temperature != self.sensor.temperature {
            violations.push(format!(
                "mtj.temperature ({}) and sensor.temperature ({}) must match",
                self.mtj.temperature, self.sensor.temperature
            ));
        }
        violations
    }
}

/// Configuration loading failure.
#[derive(Debug, thiserror::Error)]
pub enum ConfigError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("line {line}: unknown key '{key}'")]
    UnknownKey { line: usize, key: String },

    #[error("line {line}: duplicate key '{key}' (first set at line {first_line})")]
    DuplicateKey {
        line: usize,
        key: String,
        first_line: usize,
    },

    #[error("configuration violates {} invariant(s):\n  {}", .0.len(), .0.join("\n  "))]
    Invalid(Vec<String>),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Parse configuration text. Unset fields take their defaults; an unset
/// write attempt time is solved so the conversion is linear for the
/// configured device and sensor.
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let mut cfg = RunConfig::default();
    let mut t_write_set = false;
    let mut seen: Vec<(String, usize)> = Vec::new();
    let mut delta_r: Option<f64> = None;
    let mut sigma_rel: Option<f64> = None;

    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = match raw.find('#') {
            Some(pos) => &raw[..pos],
            None => raw,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        let (key, value) = line.split_once('=').ok_or_else(|| ConfigError::Parse {
            line: lineno,
            message: format!("expected 'key = value', got '{line}'"),
        })?;
        let key = key.trim();
        let value = value.trim();
        if value.is_empty() {
            return Err(ConfigError::Parse {
                line: lineno,
                message: format!("empty value for '{key}'"),
            });
        }
        if let Some((_, first_line)) = seen.iter().find(|(k, _)| k == key) {
            return Err(ConfigError::DuplicateKey {
                line: lineno,
                key: key.to_string(),
                first_line: *first_line,
            });
        }
        seen.push((key.to_string(), lineno));

        let num = || {
            parse_si_number(value).map_err(|message| ConfigError::Parse {
                line: lineno,
                message: format!("key '{key}': {message}"),
            })
        };
        match key {
            "mtj.i_c0s" => cfg.mtj.i_c0s = num()?,
            "mtj.i_c0t" => cfg.mtj.i_c0t = num()?,
            "mtj.tau_0" => cfg.mtj.tau_0 = num()?,
            "mtj.tau_relax" => cfg.mtj.tau_relax = num()?,
            "mtj.e_over_kbt" => cfg.mtj.e_over_kbt = num()?,
            "mtj.r_p" => cfg.mtj.r_p = num()?,
            "mtj.r_ap" => cfg.mtj.r_ap = num()?,
            "mtj.bc1" => cfg.mtj.bc1 = num()?,
            "mtj.bc2" => cfg.mtj.bc2 = num()?,
            "mtj.temperature" => cfg.mtj.temperature = num()?,
            "sensor.v_dd" => cfg.sensor.v_dd = num()?,
            "sensor.i_d0" => cfg.sensor.i_d0 = num()?,
            "sensor.n" => cfg.sensor.n = num()?,
            "sensor.temperature" => cfg.sensor.temperature = num()?,
            "converter.v_bias" => cfg.converter.v_bias = num()?,
            "converter.t_write" => {
                cfg.converter.t_write = num()?;
                t_write_set = true;
            }
            "converter.t_set" => cfg.converter.t_set = num()?,
            "converter.t_erase" => cfg.converter.t_erase = num()?,
            "converter.t_cycle" => cfg.converter.t_cycle = num()?,
            "converter.erase_failure_prob" => cfg.converter.erase_failure_prob = num()?,
            "variability.delta_r" => delta_r = Some(num()?),
            "variability.sigma_rel" => sigma_rel = Some(num()?),
            "seed" => {
                cfg.seed = parse_seed(value).map_err(|message| ConfigError::Parse {
                    line: lineno,
                    message: format!("key 'seed': {message}"),
                })?;
            }
            "output_dir" => cfg.output_dir = PathBuf::from(value),
            _ => {
                return Err(ConfigError::UnknownKey {
                    line: lineno,
                    key: key.to_string(),
                })
            }
        }
    }

    cfg.variability = match (delta_r, sigma_rel) {
        (Some(_), Some(_)) => {
            return Err(ConfigError::Invalid(vec![
                "variability.delta_r and variability.sigma_rel are mutually exclusive".into(),
            ]))
        }
        (Some(delta_r), None) => Some(VariabilityModel::Fixed { delta_r }),
        (None, Some(sigma_rel)) => Some(VariabilityModel::SampledGaussian { sigma_rel }),
        (None, None) => None,
    };

    if !t_write_set {
        cfg.converter.t_write = solve_attempt_time(&cfg.sensor, &cfg.mtj, cfg.converter.v_bias);
    }

    let violations = cfg.validate();
    if !violations.is_empty() {
        return Err(ConfigError::Invalid(violations));
    }
    Ok(cfg)
}

/// Load and parse a configuration file.
pub fn load_config(path: &Path) -> Result<RunConfig, ConfigError> {
    parse_config(&std::fs::read_to_string(path)?)
}

/// Numeric literal with an optional SI scale suffix
/// (`f p n u m k M G`), e.g. `200e-6` or `200u`.
pub fn parse_si_number(text: &str) -> Result<f64, String> {
    if let Ok(v) = text.parse::<f64>() {
        return finite(v, text);
    }
    if let Some(last) = text.chars().last() {
        let scale = match last {
            'f' => 1e-15,
            'p' => 1e-12,
            'n' => 1e-9,
            'u' => 1e-6,
            'm' => 1e-3,
            'k' => 1e3,
            'M' => 1e6,
            'G' => 1e9,
            _ => return Err(format!("cannot parse number '{text}'")),
        };
        let mantissa = text[..text.len() - 1].trim();
        let v = mantissa
            .parse::<f64>()
            .map_err(|_| format!("cannot parse number '{text}'"))?;
        return finite(v * scale, text);
    }
    Err(format!("cannot parse number '{text}'"))
}

fn finite(v: f64, text: &str) -> Result<f64, String> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(format!("'{text}' is not finite"))
    }
}

fn parse_seed(text: &str) -> Result<u64, String> {
    if let Some(hex) = text.strip_prefix("0x").or_else(|| text.strip_prefix("0X")) {
        u64::from_str_radix(hex, 16).map_err(|_| format!("cannot parse seed '{text}'"))
    } else {
        text.parse()
            .map_err(|_| format!("cannot parse seed '{text}'"))
    }
}
