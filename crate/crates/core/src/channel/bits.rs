use alloc::vec::Vec;
use core::ops::Range;

/// Bits with a segment table mapping each payload item to its span.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct BitStream {
    bits: Vec<bool>,
    segments: Vec<Range<usize>>,
}

impl BitStream {
    pub fn new() -> Self {
        Self::default()
    }

    /// A stream of `bits` treated as a single segment.
    pub fn from_bits(bits: Vec<bool>) -> Self {
        let n = bits.len();
        BitStream {
            bits,
            segments: alloc::vec![0..n],
        }
    }

    /// Builds a stream from raw bits and segment lengths, which must sum to
    /// the number of bits.
    pub fn from_parts(bits: Vec<bool>, lengths: &[usize]) -> Option<Self> {
        if lengths.iter().sum::<usize>() != bits.len() {
            return None;
        }
        let mut segments = Vec::with_capacity(lengths.len());
        let mut at = 0;
        for &l in lengths {
            segments.push(at..at + l);
            at += l;
        }
        Some(BitStream { bits, segments })
    }

    /// Appends one segment.
    pub fn push_segment(&mut self, bits: impl IntoIterator<Item = bool>) {
        let start = self.bits.len();
        self.bits.extend(bits);
        self.segments.push(start..self.bits.len());
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn segments(&self) -> &[Range<usize>] {
        &self.segments
    }

    pub fn segment(&self, i: usize) -> &[bool] {
        &self.bits[self.segments[i].clone()]
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    /// Same segment table, different bits of equal length.
    pub fn with_bits(&self, bits: Vec<bool>) -> Self {
        assert_eq!(bits.len(), self.bits.len());
        BitStream {
            bits,
            segments: self.segments.clone(),
        }
    }

    /// Positions where `self` and `other` differ.
    pub fn count_errors(&self, other: &BitStream) -> usize {
        self.bits
            .iter()
            .zip(&other.bits)
            .filter(|(a, b)| a != b)
            .count()
    }
}
