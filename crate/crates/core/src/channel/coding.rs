//! Channel coders operating segment by segment.

use alloc::vec::Vec;

use super::BitStream;
use crate::error::{Error, Result};

pub trait ChannelCoder {
    /// Code rate as `(information bits, coded bits)`.
    fn code_rate(&self) -> (usize, usize);
    fn encode(&self, bits: &BitStream) -> BitStream;
    /// Decodes a stream produced by [`ChannelCoder::encode`].
    fn decode(&self, bits: &BitStream) -> BitStream;
}

/// Built-in coders.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Coder {
    #[default]
    Identity,
    /// Each bit sent `k` times, majority decoded; `k` odd.
    Repetition(usize),
}

impl Coder {
    pub fn repetition(k: usize) -> Result<Coder> {
        if k == 0 || k.is_multiple_of(2) {
            return Err(Error::Config(alloc::format!(
                "repetition factor must be odd, got {k}"
            )));
        }
        Ok(Coder::Repetition(k))
    }

    /// Coded bits per information bit.
    pub fn expansion(&self) -> usize {
        match *self {
            Coder::Identity => 1,
            Coder::Repetition(k) => k,
        }
    }
}

impl ChannelCoder for Coder {
    fn code_rate(&self) -> (usize, usize) {
        (1, self.expansion())
    }

    fn encode(&self, bits: &BitStream) -> BitStream {
        let k = self.expansion();
        if k == 1 {
            return bits.clone();
        }
        let mut out = BitStream::new();
        for i in 0..bits.segments().len() {
            out.push_segment(
                bits.segment(i)
                    .iter()
                    .flat_map(|&b| core::iter::repeat_n(b, k)),
            );
        }
        out
    }

    fn decode(&self, bits: &BitStream) -> BitStream {
        let k = self.expansion();
        if k == 1 {
            return bits.clone();
        }
        let mut out = BitStream::new();
        for i in 0..bits.segments().len() {
            let seg: Vec<bool> = bits
                .segment(i)
                .chunks(k)
                .map(|c| 2 * c.iter().filter(|&&b| b).count() > c.len())
                .collect();
            out.push_segment(seg);
        }
        out
    }
}
