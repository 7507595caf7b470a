//! Bit-level wireless transport over Rayleigh block-fading subchannels.

mod bits;
pub mod coding;
pub mod quantize;

pub use bits::BitStream;
pub use coding::{ChannelCoder, Coder};
pub use quantize::{
    deserialize_dequantize, quantize_serialize, Field, QuantizationScheme, ScalarEncoding,
    ScalarRange, Serialized,
};

use alloc::vec::Vec;

use num_complex::Complex64;
#[allow(unused_imports)]
use num_traits::Float;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};

/// Default number of subchannels.
pub const DEFAULT_SUBCHANNELS: usize = 64;

/// One frame's channel state: a complex gain per subchannel, uniform
/// transmit power and the noise power.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelRealization {
    gains: Vec<Complex64>,
    tx_power: f64,
    noise_power: f64,
}

impl ChannelRealization {
    pub fn new(gains: Vec<Complex64>, tx_power: f64, noise_power: f64) -> Result<Self> {
        if gains.is_empty() {
            return Err(Error::EmptyChannel);
        }
        if !(tx_power > 0.0) || !(noise_power >= 0.0) {
            return Err(Error::Config(alloc::format!(
                "invalid powers: transmit {tx_power}, noise {noise_power}"
            )));
        }
        Ok(ChannelRealization {
            gains,
            tx_power,
            noise_power,
        })
    }

    pub fn gains(&self) -> &[Complex64] {
        &self.gains
    }

    pub fn n_subchannels(&self) -> usize {
        self.gains.len()
    }

    pub fn tx_power(&self) -> f64 {
        self.tx_power
    }

    pub fn noise_power(&self) -> f64 {
        self.noise_power
    }

    /// Linear SNR of each subchannel, `P |h|² / σ²`.
    pub fn snr(&self) -> Vec<f64> {
        self.gains
            .iter()
            .map(|h| self.tx_power * h.norm_sqr() / self.noise_power)
            .collect()
    }

    /// Received signal strength `P |h|²`, which orders subchannels the same
    /// way as [`ChannelRealization::snr`] and stays finite without noise.
    pub fn strength(&self) -> Vec<f64> {
        self.gains
            .iter()
            .map(|h| self.tx_power * h.norm_sqr())
            .collect()
    }

    /// Same gains at a different average SNR.
    pub fn with_snr_db(&self, snr_avg_db: f64) -> Self {
        ChannelRealization {
            noise_power: noise_power_for(self.tx_power, snr_avg_db),
            ..self.clone()
        }
    }
}

fn noise_power_for(tx_power: f64, snr_db: f64) -> f64 {
    tx_power / 10f64.powf(snr_db / 10.0)
}

/// Standard circular complex Gaussian, `E|z|² = 1`.
pub fn complex_gaussian(rng: &mut ChaCha8Rng) -> Complex64 {
    let s = core::f64::consts::FRAC_1_SQRT_2;
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    Complex64::new(re * s, im * s)
}

/// Draws i.i.d. unit-variance Rayleigh gains and sets the noise power so the
/// expected subchannel SNR equals `snr_avg_db`. The gains depend on `seed`
/// only. An infinite SNR gives a noiseless channel.
pub fn sample_channel(
    n_subchannels: usize,
    snr_avg_db: f64,
    seed: u64,
) -> Result<ChannelRealization> {
    if n_subchannels == 0 {
        return Err(Error::EmptyChannel);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let gains = (0..n_subchannels)
        .map(|_| complex_gaussian(&mut rng))
        .collect();
    ChannelRealization::new(gains, 1.0, noise_power_for(1.0, snr_avg_db))
}

/// Maps bit 1 to +1 and bit 0 to −1.
pub fn bpsk_modulate(bits: &[bool]) -> Vec<f64> {
    bits.iter().map(|&b| if b { 1.0 } else { -1.0 }).collect()
}

/// Coherent decision: bit 1 iff `Re(y · conj h) ≥ 0`.
pub fn bpsk_decide(y: Complex64, h: Complex64) -> bool {
    (y * h.conj()).re >= 0.0
}

pub fn bpsk_demodulate(received: &[Complex64], gains: &[Complex64]) -> Vec<bool> {
    received
        .iter()
        .zip(gains)
        .map(|(&y, &h)| bpsk_decide(y, h))
        .collect()
}

/// Received bits and the subchannel that carried each bit.
#[derive(Debug, Clone, PartialEq)]
pub struct Transmission {
    pub bits: BitStream,
    pub subchannel: Vec<u32>,
}

impl Transmission {
    /// Number of bits sent on each subchannel.
    pub fn bits_per_subchannel(&self, n_subchannels: usize) -> Vec<usize> {
        let mut counts = alloc::vec![0; n_subchannels];
        for &s in &self.subchannel {
            counts[s as usize] += 1;
        }
        counts
    }
}

/// Round-robin assignment of `n_items` segments over `n_subchannels`.
pub fn round_robin(n_items: usize, n_subchannels: usize) -> Vec<usize> {
    (0..n_items).map(|i| i % n_subchannels.max(1)).collect()
}

/// Sends each segment serially on its subchannel, `y = h √P s + σ n`, and
/// demodulates coherently. Noise samples are drawn in bit order from `seed`,
/// so for fixed gains and seed the error set shrinks as the SNR grows.
/// Without a mapping segments go round-robin.
pub fn transmit(
    bits: &BitStream,
    channel: &ChannelRealization,
    mapping: Option<&[usize]>,
    seed: u64,
) -> Result<Transmission> {
    let n_sub = channel.n_subchannels();
    let segments = bits.segments();
    let default_map;
    let mapping = match mapping {
        Some(m) => {
            if m.len() < segments.len() {
                return Err(Error::LengthMismatch {
                    what: "channel map",
                    expected: segments.len(),
                    found: m.len(),
                });
            }
            m
        }
        None => {
            default_map = round_robin(segments.len(), n_sub);
            &default_map
        }
    };
    if let Some((item, &sub)) = mapping.iter().enumerate().find(|(_, &s)| s >= n_sub) {
        return Err(Error::UnknownSubchannel {
            item,
            subchannel: sub,
            available: n_sub,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let amp = channel.tx_power.sqrt();
    let sigma = channel.noise_power.sqrt();
    let mut out = Vec::with_capacity(bits.len());
    let mut log = Vec::with_capacity(bits.len());
    for (seg, &sub) in segments.iter().zip(mapping) {
        let h = channel.gains[sub];
        for &b in &bits.bits()[seg.clone()] {
            let s = if b { amp } else { -amp };
            let n = complex_gaussian(&mut rng);
            let y = h * s + n * sigma;
            out.push(bpsk_decide(y, h));
            log.push(sub as u32);
        }
    }
    Ok(Transmission {
        bits: bits.with_bits(out),
        subchannel: log,
    })
}

/// Coherent BPSK bit error rate over Rayleigh fading at average SNR `snr`
/// (linear).
pub fn rayleigh_bpsk_ber(snr: f64) -> f64 {
    0.5 * (1.0 - (snr / (1.0 + snr)).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec;

    #[test]
    fn gains_are_deterministic() {
        assert_eq!(
            sample_channel(8, 3.0, 9).unwrap(),
            sample_channel(8, 3.0, 9).unwrap()
        );
        assert_ne!(
            sample_channel(8, 3.0, 9).unwrap(),
            sample_channel(8, 3.0, 10).unwrap()
        );
        assert_eq!(
            sample_channel(8, 3.0, 9).unwrap().gains(),
            sample_channel(8, 13.0, 9).unwrap().gains()
        );
    }

    #[test]
    fn modulation_map_and_tie() {
        assert_eq!(bpsk_modulate(&[true, false]), vec![1.0, -1.0]);
        assert!(bpsk_decide(
            Complex64::new(0.0, 0.0),
            Complex64::new(0.3, -0.2)
        ));
    }

    #[test]
    fn noiseless_any_phase() {
        let gains = vec![
            Complex64::from_polar(0.2, 2.5),
            Complex64::from_polar(1.5, -1.0),
        ];
        let ch = ChannelRealization::new(gains, 1.0, 0.0).unwrap();
        let bits = BitStream::from_parts(vec![true, false, false, true, true], &[2, 3]).unwrap();
        let t = transmit(&bits, &ch, None, 4).unwrap();
        assert_eq!(t.bits, bits);
        assert_eq!(t.subchannel, vec![0, 0, 1, 1, 1]);
    }

    #[test]
    fn unknown_subchannel_rejected() {
        let ch = sample_channel(2, 10.0, 0).unwrap();
        let bits = BitStream::from_parts(vec![true; 4], &[2, 2]).unwrap();
        assert_eq!(
            transmit(&bits, &ch, Some(&[0, 5]), 0),
            Err(Error::UnknownSubchannel {
                item: 1,
                subchannel: 5,
                available: 2
            })
        );
    }

    #[test]
    fn closed_form_at_ten_db() {
        assert!((rayleigh_bpsk_ber(10.0) - 0.0233).abs() < 1e-4);
    }
}
