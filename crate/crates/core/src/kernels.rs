//! Edge detection in the stochastic domain and its references.
//!
//! The Roberts cross responds to the two diagonal differences of each
//! 2×2 stencil: `s = 0.5·(|x(i,j) − x(i+1,j+1)| + |x(i,j+1) − x(i+1,j)|)`.
//! The stochastic implementation encodes each diagonal pair against one
//! shared uniform source, XORs the pair into its absolute difference,
//! and averages the two differences through a MUX — every arithmetic
//! step stays bit-serial. An exact-arithmetic implementation of the
//! same stencil serves as the noise-free reference, and a quantized
//! binary pipeline with injectable bit flips provides the conventional
//! implementation to compare error robustness against.
//!
//! Every pixel derives its own random streams from the base seed and
//! its index, so results are bit-identical regardless of how pixels are
//! scheduled across threads.

use rayon::prelude::*;

use crate::bitstream::{abs_diff, encode, encode_correlated, inject_errors, scaled_add};
use crate::error::{Error, Result};
use crate::rng::{domains, StreamKey};

/// Row-major grayscale image with intensities in `[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct PixelGrid {
    width: usize,
    height: usize,
    pixels: Vec<f64>,
}

impl PixelGrid {
    /// Build from row-major intensities; dimensions and range are
    /// validated.
    pub fn new(width: usize, height: usize, pixels: Vec<f64>) -> Result<Self> {
        if width * height != pixels.len() {
            return Err(Error::GridShape {
                width,
                height,
                len: pixels.len(),
            });
        }
        for (index, &value) in pixels.iter().enumerate() {
            if !(0.0..=1.0).contains(&value) {
                return Err(Error::PixelRange { index, value });
            }
        }
        Ok(Self {
            width,
            height,
            pixels,
        })
    }

    /// Build by evaluating `f(x, y)` over the grid; values are clamped
    /// into `[0, 1]`.
    pub fn from_fn(width: usize, height: usize, f: impl Fn(usize, usize) -> f64) -> Self {
        let mut pixels = Vec::with_capacity(width * height);
        for y in 0..height {
            for x in 0..width {
                pixels.push(f(x, y).clamp(0.0, 1.0));
            }
        }
        Self {
            width,
            height,
            pixels,
        }
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn get(&self, x: usize, y: usize) -> f64 {
        self.pixels[y * self.width + x]
    }

    pub fn pixels(&self) -> &[f64] {
        &self.pixels
    }

    /// Mean absolute per-pixel difference against another grid of the
    /// same shape.
    pub fn mean_absolute_error(&self, other: &PixelGrid) -> Result<f64> {
        if self.width != other.width || self.height != other.height {
            return Err(Error::GridShape {
                width: other.width,
                height: other.height,
                len: self.pixels.len(),
            });
        }
        let sum: f64 = self
            .pixels
            .iter()
            .zip(&other.pixels)
            .map(|(a, b)| (a - b).abs())
            .sum();
        Ok(sum / self.pixels.len() as f64)
    }

    fn check_stencil(&self) -> Result<()> {
        if self.width < 2 || self.height < 2 {
            return Err(Error::GridTooSmall {
                width: self.width,
                height: self.height,
            });
        }
        Ok(())
    }

    /// Fill the last row and column by copying the nearest interior
    /// output, after the `(height−1)×(width−1)` interior was written.
    fn pad_border(&mut self) {
        let (w, h) = (self.width, self.height);
        for y in 0..h - 1 {
            self.pixels[y * w + w - 1] = self.pixels[y * w + w - 2];
        }
        for x in 0..w {
            self.pixels[(h - 1) * w + x] = self.pixels[(h - 2) * w + x];
        }
    }
}

/// Roberts cross in exact real arithmetic.
pub fn roberts_cross_exact(img: &PixelGrid) -> Result<PixelGrid> {
    img.check_stencil()?;
    let (w, h) = (img.width, img.height);
    let mut out = PixelGrid {
        width: w,
        height: h,
        pixels: vec![0.0; w * h],
    };
    for y in 0..h - 1 {
        for x in 0..w - 1 {
            let a = img.get(x, y);
            let d = img.get(x + 1, y + 1);
            let b = img.get(x + 1, y);
            let c = img.get(x, y + 1);
            out.pixels[y * w + x] = 0.5 * ((a - d).abs() + (b - c).abs());
        }
    }
    out.pad_border();
    Ok(out)
}

/// Settings of the stochastic edge detector.
#[derive(Debug, Clone, Copy)]
pub struct StochasticEdgeOptions {
    /// Bits per stream.
    pub stream_len: usize,
    /// Per-bit flip probability applied to the four encoded input
    /// streams, modeling wrong bits out of the converters.
    pub error_rate: f64,
    /// Base seed for the per-pixel stream derivation.
    pub seed: u64,
}

impl Default for StochasticEdgeOptions {
    fn default() -> Self {
        Self {
            stream_len: 1000,
            error_rate: 0.0,
            seed: crate::rng::DEFAULT_SEED,
        }
    }
}

/// Roberts cross computed entirely on bit streams.
///
/// Per stencil: the main-diagonal pair is encoded against one shared
/// source and the anti-diagonal pair against another, optional
/// converter noise flips each encoded bit independently, the two XOR
/// absolute differences feed a MUX with an independent half-rate
/// select, and the output stream decodes into the edge value.
pub fn roberts_cross_stochastic(
    img: &PixelGrid,
    opts: &StochasticEdgeOptions,
) -> Result<PixelGrid> {
    img.check_stencil()?;
    if opts.stream_len == 0 {
        return Err(Error::EmptyStream);
    }
    if !(0.0..=1.0).contains(&opts.error_rate) {
        return Err(Error::ProbabilityRange(opts.error_rate));
    }
    let (w, h) = (img.width, img.height);
    let root = StreamKey::root(opts.seed);
    let len = opts.stream_len;

    let interior: Vec<f64> = (0..(h - 1) * (w - 1))
        .into_par_iter()
        .map(|idx| {
            let y = idx / (w - 1);
            let x = idx % (w - 1);
            let pixel = (y * w + x) as u64;

            let main_key = root.derive(domains::EDGE_DIAG_MAIN, pixel);
            let anti_key = root.derive(domains::EDGE_DIAG_ANTI, pixel);
            let a = encode_correlated(img.get(x, y), len, main_key)?;
            let d = encode_correlated(img.get(x + 1, y + 1), len, main_key)?;
            let b = encode_correlated(img.get(x + 1, y), len, anti_key)?;
            let c = encode_correlated(img.get(x, y + 1), len, anti_key)?;

            let (a, d, b, c) = if opts.error_rate > 0.0 {
                let noisy = |stream, lane: u64| {
                    let mut rng = root.derive(domains::EDGE_NOISE, pixel * 4 + lane).rng();
                    inject_errors(stream, opts.error_rate, &mut rng)
                };
                (noisy(&a, 0)?, noisy(&d, 1)?, noisy(&b, 2)?, noisy(&c, 3)?)
            } else {
                (a, d, b, c)
            };

            let main_diff = abs_diff(&a, &d)?;
            let anti_diff = abs_diff(&b, &c)?;
            let mut select_rng = root.derive(domains::EDGE_SELECT, pixel).rng();
            let select = encode(0.5, len, &mut select_rng)?;
            let edge = scaled_add(&main_diff, &anti_diff, &select)?;
            Ok(edge.decode())
        })
        .collect::<Result<_>>()?;

    let mut out = PixelGrid {
        width: w,
        height: h,
        pixels: vec![0.0; w * h],
    };
    for y in 0..h - 1 {
        for x in 0..w - 1 {
            out.pixels[y * w + x] = interior[y * (w - 1) + x];
        }
    }
    out.pad_border();
    Ok(out)
}

/// Conventional pipeline: quantize to `bit_width` bits, flip each bit
/// independently with probability `rate` (most-significant bits
/// included), then run the exact stencil on the corrupted values.
pub fn binary_pipeline_with_errors(
    img: &PixelGrid,
    bit_width: u32,
    rate: f64,
    seed: u64,
) -> Result<PixelGrid> {
    img.check_stencil()?;
    if !(1..=16).contains(&bit_width) {
        return Err(Error::BitWidthRange(bit_width));
    }
    if !(0.0..=1.0).contains(&rate) {
        return Err(Error::ProbabilityRange(rate));
    }
    let max_value = ((1u32 << bit_width) - 1) as f64;
    let root = StreamKey::root(seed);
    let corrupted: Vec<f64> = img
        .pixels
        .iter()
        .enumerate()
        .map(|(idx, &value)| {
            let mut q = (value * max_value).round() as u32;
            if rate > 0.0 {
                let mut rng = root.derive(domains::BINARY_NOISE, idx as u64).rng();
                for bit in 0..bit_width {
                    if rng.uniform() < rate {
                        q ^= 1 << bit;
                    }
                }
            }
            f64::from(q) / max_value
        })
        .collect();
    let noisy = PixelGrid {
        width: img.width,
        height: img.height,
        pixels: corrupted,
    };
    roberts_cross_exact(&noisy)
}

/// Deterministic texture test card for edge-detection studies.
///
/// Left half: vertical bar comb at the stencil pitch (edge response
/// 0.5). Upper right: the same comb rotated. Lower right: a smooth ramp
/// with a bright disk, providing flat regions and a curved contour.
pub fn test_card(width: usize, height: usize) -> PixelGrid {
    PixelGrid::from_fn(width, height, |x, y| {
        let right = x >= width / 2;
        let lower = y >= height / 2;
        if !right {
            if x % 2 == 0 {
                0.75
            } else {
                0.25
            }
        } else if !lower {
            if y % 2 == 0 {
                0.75
            } else {
                0.25
            }
        } else {
            let dx = x as f64 - 0.75 * width as f64;
            let dy = y as f64 - 0.75 * height as f64;
            if dx * dx + dy * dy < (0.1 * width as f64).powi(2) {
                0.9
            } else {
                0.15 + 0.6 * (x - width / 2) as f64 / (width / 2) as f64
            }
        }
    })
}
