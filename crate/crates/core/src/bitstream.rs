//! Bernoulli bit streams and stochastic-computing arithmetic.
//!
//! A value in `[0, 1]` is carried as the ones-frequency of a bit
//! sequence (unipolar encoding). Multiplication is a bitwise AND of
//! independent streams; absolute difference is a bitwise XOR of streams
//! encoded against the *same* uniform sequence; scaled addition is a
//! bitwise MUX steered by an independent half-rate select stream.
//!
//! Correlation is tracked explicitly: a stream encoded against a
//! [`StreamKey`] carries that key as its tag, and the XOR kernel refuses
//! operands whose tags differ — XOR of independent streams computes
//! `p + q − 2pq`, not `|p − q|`, and that misuse should fail loudly
//! rather than bias results.

use crate::error::{Error, Result};
use crate::rng::{StreamKey, StreamRng};

/// A packed Bernoulli bit sequence.
///
/// Bits are stored little-endian within `u64` words; unused high bits of
/// the last word are always zero.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BitStream {
    words: Vec<u64>,
    len: usize,
    tag: Option<StreamKey>,
}

impl BitStream {
    /// Build from unpacked 0/1 bytes.
    pub fn from_bits(bits: &[u8]) -> Self {
        let mut words = vec![0u64; bits.len().div_ceil(64)];
        for (i, &b) in bits.iter().enumerate() {
            if b != 0 {
                words[i / 64] |= 1 << (i % 64);
            }
        }
        Self {
            words,
            len: bits.len(),
            tag: None,
        }
    }

    /// Number of bits.
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    /// The bit at `index`.
    pub fn bit(&self, index: usize) -> bool {
        assert!(
            index < self.len,
            "bit index {index} out of range {}",
            self.len
        );
        (self.words[index / 64] >> (index % 64)) & 1 == 1
    }

    /// Count of set bits.
    pub fn ones(&self) -> u64 {
        self.words.iter().map(|w| u64::from(w.count_ones())).sum()
    }

    /// Decoded value: ones-frequency in `[0, 1]`.
    pub fn decode(&self) -> f64 {
        self.ones() as f64 / self.len as f64
    }

    /// Correlation tag, present when the stream was encoded against a
    /// shared uniform source.
    pub fn tag(&self) -> Option<StreamKey> {
        self.tag
    }

    /// Iterate over the bits in order.
    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(|i| self.bit(i))
    }

    fn with_words(words: Vec<u64>, len: usize, tag: Option<StreamKey>) -> Self {
        Self { words, len, tag }
    }

    fn check_len(&self, other: &BitStream) -> Result<()> {
        if self.len != other.len {
            return Err(Error::LengthMismatch {
                left: self.len,
                right: other.len,
            });
        }
        Ok(())
    }
}

fn check_probability(p: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::ProbabilityRange(p));
    }
    Ok(())
}

fn encode_with(
    p: f64,
    length: usize,
    rng: &mut StreamRng,
    tag: Option<StreamKey>,
) -> Result<BitStream> {
    check_probability(p)?;
    if length == 0 {
        return Err(Error::EmptyStream);
    }
    let mut words = vec![0u64; length.div_ceil(64)];
    for (i, word) in words.iter_mut().enumerate() {
        let bits = 64.min(length - i * 64);
        for b in 0..bits {
            if rng.uniform() < p {
                *word |= 1 << b;
            }
        }
    }
    Ok(BitStream::with_words(words, length, tag))
}

/// Encode a probability as a Bernoulli stream drawn from `rng`.
/// The stream carries no correlation tag.
pub fn encode(p: f64, length: usize, rng: &mut StreamRng) -> Result<BitStream> {
    encode_with(p, length, rng, None)
}

/// Encode a probability against a shared uniform source.
///
/// Every stream encoded with the same key consumes the same uniform
/// sequence from its start, so `bit_i = [u_i < p]` — two such streams
/// are maximally correlated, which is what the XOR absolute-difference
/// kernel requires.
pub fn encode_correlated(p: f64, length: usize, key: StreamKey) -> Result<BitStream> {
    encode_with(p, length, &mut key.rng(), Some(key))
}

/// Bitwise AND: multiplies the decoded values of independent streams.
pub fn and_multiply(a: &BitStream, b: &BitStream) -> Result<BitStream> {
    a.check_len(b)?;
    let words = a.words.iter().zip(&b.words).map(|(x, y)| x & y).collect();
    Ok(BitStream::with_words(words, a.len, None))
}

/// Bitwise XOR of two streams encoded against the same shared source:
/// decodes to `|p(A) − p(B)|` as the length grows.
///
/// With shared uniforms the output bit is the indicator of
/// `u ∈ [min(p,q), max(p,q))`, hence the absolute difference. Operands
/// with missing or differing tags are rejected.
pub fn abs_diff(a: &BitStream, b: &BitStream) -> Result<BitStream> {
    a.check_len(b)?;
    match (a.tag, b.tag) {
        (Some(ta), Some(tb)) if ta == tb => {}
        _ => return Err(Error::UncorrelatedStreams),
    }
    let words = a.words.iter().zip(&b.words).map(|(x, y)| x ^ y).collect();
    // a single XOR level is exact; the result is no longer a threshold
    // encoding, so it must not feed another correlated XOR
    Ok(BitStream::with_words(words, a.len, None))
}

/// MUX-based scaled addition: selects `a` where the select bit is 1 and
/// `b` elsewhere, decoding to `(p(A) + p(B)) / 2` for a half-rate
/// independent select stream.
pub fn scaled_add(a: &BitStream, b: &BitStream, select: &BitStream) -> Result<BitStream> {
    a.check_len(b)?;
    a.check_len(select)?;
    let words = a
        .words
        .iter()
        .zip(&b.words)
        .zip(&select.words)
        .map(|((x, y), s)| (x & s) | (y & !s))
        .collect();
    Ok(BitStream::with_words(words, a.len, None))
}

/// Flip each bit independently with probability `rate`.
///
/// Models wrong bits produced by the converter. The correlation tag is
/// preserved: a corrupted stream is still the correlated encoding it was,
/// just with noise, and downstream kernels stay unaware by design.
pub fn inject_errors(stream: &BitStream, rate: f64, rng: &mut StreamRng) -> Result<BitStream> {
    check_probability(rate)?;
    let mut words = stream.words.clone();
    if rate > 0.0 {
        for (i, word) in words.iter_mut().enumerate() {
            let bits = 64.min(stream.len - i * 64);
            let mut mask = 0u64;
            for b in 0..bits {
                if rng.uniform() < rate {
                    mask |= 1 << b;
                }
            }
            *word ^= mask;
        }
    }
    Ok(BitStream::with_words(words, stream.len, stream.tag))
}
