//! Scalar fixed-point (or IEEE single) serialization.

use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use super::BitStream;
use crate::error::{Error, Result};

/// Closed interval covered by a quantizer.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalarRange {
    pub min: f64,
    pub max: f64,
}

impl ScalarRange {
    pub const fn new(min: f64, max: f64) -> Self {
        ScalarRange { min, max }
    }
}

/// Kind of scalar in a payload item; selects the range.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Field {
    Position,
    Quaternion,
    Euler,
    Color,
}

impl Field {
    pub const fn range(self) -> ScalarRange {
        match self {
            Field::Position => ScalarRange::new(-2.0, 2.0),
            Field::Quaternion => ScalarRange::new(-1.0, 1.0),
            Field::Euler => ScalarRange::new(-180.0, 180.0),
            Field::Color => ScalarRange::new(0.0, 255.0),
        }
    }
}

/// Bit layout of one scalar.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ScalarEncoding {
    /// Uniform fixed point over the field range.
    #[default]
    FixedPoint,
    /// IEEE-754 binary32, big-endian. Colour stays 8-bit fixed point.
    Float32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct QuantizationScheme {
    bits_per_scalar: u32,
    pub encoding: ScalarEncoding,
}

impl Default for QuantizationScheme {
    fn default() -> Self {
        QuantizationScheme {
            bits_per_scalar: 16,
            encoding: ScalarEncoding::FixedPoint,
        }
    }
}

impl QuantizationScheme {
    pub fn new(bits_per_scalar: u32, encoding: ScalarEncoding) -> Result<Self> {
        if !(4..=32).contains(&bits_per_scalar) {
            return Err(Error::Config(alloc::format!(
                "bits_per_scalar must be in [4, 32], got {bits_per_scalar}"
            )));
        }
        Ok(QuantizationScheme {
            bits_per_scalar,
            encoding,
        })
    }

    pub fn bits_per_scalar(&self) -> u32 {
        self.bits_per_scalar
    }

    /// Bits used for one scalar of `field`.
    pub fn field_bits(&self, field: Field) -> u32 {
        match (field, self.encoding) {
            (Field::Color, _) => 8,
            (_, ScalarEncoding::Float32) => 32,
            (_, ScalarEncoding::FixedPoint) => self.bits_per_scalar,
        }
    }

    /// Bits for one item laid out as `layout`.
    pub fn item_bits(&self, layout: &[Field]) -> usize {
        layout.iter().map(|&f| self.field_bits(f) as usize).sum()
    }
}

/// Fixed-point index of `v`; the flag reports clamping.
pub fn quantize(v: f64, range: ScalarRange, bits: u32) -> (u32, bool) {
    let levels = ((1u64 << bits) - 1) as f64;
    let t = (v - range.min) / (range.max - range.min);
    let clamped = !(0.0..=1.0).contains(&t);
    let t = if t.is_nan() { 0.0 } else { t.clamp(0.0, 1.0) };
    ((t * levels).round() as u32, clamped)
}

pub fn dequantize(index: u32, range: ScalarRange, bits: u32) -> f64 {
    let levels = ((1u64 << bits) - 1) as f64;
    range.min + (index as f64 / levels) * (range.max - range.min)
}

fn push_word(out: &mut Vec<bool>, word: u32, bits: u32) {
    for b in (0..bits).rev() {
        out.push((word >> b) & 1 == 1);
    }
}

fn read_word(bits: &[bool]) -> u32 {
    bits.iter().fold(0u32, |acc, &b| (acc << 1) | u32::from(b))
}

/// Serialized payload plus the number of clamped scalars.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Serialized {
    pub bits: BitStream,
    pub clamped: usize,
}

/// Serializes `values` as consecutive items laid out as `layout`, one
/// segment per item, big-endian.
pub fn quantize_serialize(
    values: &[f64],
    layout: &[Field],
    scheme: &QuantizationScheme,
) -> Result<Serialized> {
    if layout.is_empty() || !values.len().is_multiple_of(layout.len()) {
        return Err(Error::LengthMismatch {
            what: "payload scalars",
            expected: layout.len() * values.len().div_ceil(layout.len().max(1)),
            found: values.len(),
        });
    }
    let mut stream = BitStream::new();
    let mut clamped = 0;
    let mut seg = Vec::with_capacity(scheme.item_bits(layout));
    for item in values.chunks(layout.len()) {
        seg.clear();
        for (&v, &field) in item.iter().zip(layout) {
            let bits = scheme.field_bits(field);
            if field != Field::Color && scheme.encoding == ScalarEncoding::Float32 {
                push_word(&mut seg, (v as f32).to_bits(), 32);
            } else {
                let (q, c) = quantize(v, field.range(), bits);
                clamped += usize::from(c);
                push_word(&mut seg, q, bits);
            }
        }
        stream.push_segment(seg.iter().copied());
    }
    Ok(Serialized {
        bits: stream,
        clamped,
    })
}

/// Inverse of [`quantize_serialize`]. Non-finite decoded floats become 0.
pub fn deserialize_dequantize(
    bits: &BitStream,
    layout: &[Field],
    scheme: &QuantizationScheme,
) -> Result<Vec<f64>> {
    let per_item = scheme.item_bits(layout);
    if per_item == 0 || !bits.len().is_multiple_of(per_item) {
        return Err(Error::LengthMismatch {
            what: "payload bits",
            expected: per_item,
            found: bits.len(),
        });
    }
    let raw = bits.bits();
    let mut out = Vec::with_capacity(raw.len() / per_item * layout.len());
    let mut at = 0;
    while at < raw.len() {
        for &field in layout {
            let n = scheme.field_bits(field) as usize;
            let word = read_word(&raw[at..at + n]);
            at += n;
            let v = if field != Field::Color && scheme.encoding == ScalarEncoding::Float32 {
                let f = f32::from_bits(word) as f64;
                if f.is_finite() {
                    f
                } else {
                    0.0
                }
            } else {
                dequantize(word, field.range(), n as u32)
            };
            out.push(v);
        }
    }
    Ok(out)
}
