//! Evaluation metrics: joint errors, point-cloud geometry and colour
//! fidelity, and the latency model.

use alloc::vec::Vec;

#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::nn::{nearest_brute, NearestIndex};
use crate::pointcloud::PointCloud;
use crate::rotation::Vec3;
use crate::semantics::WeightVector;
use crate::skeleton::Pose;

/// PSNR reported for (near) zero error.
pub const PSNR_CAP_DB: f64 = 100.0;

fn check_len(what: &'static str, a: usize, b: usize) -> Result<()> {
    if a != b {
        return Err(Error::LengthMismatch {
            what,
            expected: a,
            found: b,
        });
    }
    Ok(())
}

/// Mean Euclidean distance between corresponding joints.
pub fn mpjpe_positions(tx: &[Vec3], rx: &[Vec3]) -> Result<f64> {
    check_len("joints", tx.len(), rx.len())?;
    if tx.is_empty() {
        return Err(Error::TooFewPoints {
            needed: 1,
            found: 0,
        });
    }
    Ok(tx.iter().zip(rx).map(|(a, b)| a.distance(*b)).sum::<f64>() / tx.len() as f64)
}

pub fn mpjpe(tx: &Pose, rx: &Pose) -> Result<f64> {
    mpjpe_positions(&tx.positions, &rx.positions)
}

/// MPJPE between each pair of consecutive frames.
pub fn adjacent_mpjpe(frames: &[Pose]) -> Result<Vec<f64>> {
    if frames.len() < 2 {
        return Err(Error::InsufficientFrames {
            needed: 2,
            found: frames.len(),
        });
    }
    frames.windows(2).map(|w| mpjpe(&w[0], &w[1])).collect()
}

/// `Σ_i ω_i ‖tx_i − rx_i‖` over joint positions.
pub fn weighted_semantic_error(tx: &[Vec3], rx: &[Vec3], weights: &WeightVector) -> Result<f64> {
    check_len("joints", tx.len(), rx.len())?;
    check_len("weights", tx.len(), weights.len())?;
    Ok(tx
        .iter()
        .zip(rx)
        .zip(weights.as_slice())
        .map(|((a, b), w)| w * a.distance(*b))
        .sum())
}

fn nonempty(c: &PointCloud) -> Result<()> {
    if c.is_empty() {
        Err(Error::EmptyCloud)
    } else {
        Ok(())
    }
}

fn directed_rms(from: &[Vec3], to: &NearestIndex<'_>) -> f64 {
    let sum: f64 = from
        .iter()
        .map(|&p| to.nearest(p).map_or(0.0, |(_, d2)| d2))
        .sum();
    (sum / from.len() as f64).sqrt()
}

/// Symmetric point-to-point RMS distance, the larger of both directions.
pub fn p2point(tx: &PointCloud, rx: &PointCloud) -> Result<f64> {
    nonempty(tx)?;
    nonempty(rx)?;
    let (a, b) = (tx.positions(), rx.positions());
    let ia = NearestIndex::new(&a);
    let ib = NearestIndex::new(&b);
    Ok(directed_rms(&a, &ib).max(directed_rms(&b, &ia)))
}

/// [`p2point`] by exhaustive search.
pub fn p2point_brute(tx: &PointCloud, rx: &PointCloud) -> Result<f64> {
    nonempty(tx)?;
    nonempty(rx)?;
    let (a, b) = (tx.positions(), rx.positions());
    Ok(directed_rms(&a, &NearestIndex::Brute(&b)).max(directed_rms(&b, &NearestIndex::Brute(&a))))
}

/// BT.601 luma of an RGB triple.
pub fn luminance(rgb: [u8; 3]) -> f64 {
    0.299 * rgb[0] as f64 + 0.587 * rgb[1] as f64 + 0.114 * rgb[2] as f64
}

/// PSNR from a luminance MSE, capped at [`PSNR_CAP_DB`].
pub fn psnr_from_mse(mse: f64) -> f64 {
    if mse < 255.0 * 255.0 * 1e-10 {
        PSNR_CAP_DB
    } else {
        (10.0 * (255.0 * 255.0 / mse).log10()).min(PSNR_CAP_DB)
    }
}

/// Luminance PSNR pairing each transmitted point with its nearest received
/// point.
pub fn psnr_y(tx: &PointCloud, rx: &PointCloud) -> Result<f64> {
    nonempty(tx)?;
    nonempty(rx)?;
    let b = rx.positions();
    let index = NearestIndex::new(&b);
    let mse = tx
        .points
        .iter()
        .map(|p| {
            let (j, _) = index.nearest(p.position).unwrap_or((0, 0.0));
            let d = luminance(p.color) - luminance(rx.points[j].color);
            d * d
        })
        .sum::<f64>()
        / tx.len() as f64;
    Ok(psnr_from_mse(mse))
}

/// [`psnr_y`] by exhaustive search.
pub fn psnr_y_brute(tx: &PointCloud, rx: &PointCloud) -> Result<f64> {
    nonempty(tx)?;
    nonempty(rx)?;
    let b = rx.positions();
    let mse = tx
        .points
        .iter()
        .map(|p| {
            let (j, _) = nearest_brute(&b, p.position).unwrap_or((0, 0.0));
            let d = luminance(p.color) - luminance(rx.points[j].color);
            d * d
        })
        .sum::<f64>()
        / tx.len() as f64;
    Ok(psnr_from_mse(mse))
}

/// Parallel-subchannel air-interface model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LinkModel {
    pub n_subchannels: usize,
    /// Symbols per second on each subchannel.
    pub symbol_rate: f64,
    pub bits_per_symbol: f64,
}

impl Default for LinkModel {
    fn default() -> Self {
        LinkModel {
            n_subchannels: 64,
            symbol_rate: 250_000.0,
            bits_per_symbol: 1.0,
        }
    }
}

impl LinkModel {
    /// Air time for `payload_bits` at code rate `1 / expansion`.
    pub fn transmission_time(&self, payload_bits: usize, expansion: usize) -> Result<f64> {
        let rate = self.n_subchannels as f64 * self.symbol_rate * self.bits_per_symbol;
        if !(rate > 0.0) || !rate.is_finite() || expansion == 0 {
            return Err(Error::Config(alloc::format!(
                "link rate must be positive, got {rate} b/s"
            )));
        }
        Ok((payload_bits * expansion) as f64 / rate)
    }
}

/// Per-frame latency split into extraction, air time and rendering.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Latency {
    pub t_s: f64,
    pub t_w: f64,
    pub t_r: f64,
}

impl Latency {
    pub fn total(&self) -> f64 {
        self.t_s + self.t_w + self.t_r
    }
}

/// All per-frame measurements.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MetricsReport {
    pub mpjpe: f64,
    /// Distance to the previous recovered frame; `None` on the first frame.
    pub adjacent_mpjpe: Option<f64>,
    pub weighted_error: f64,
    pub p2point: f64,
    pub psnr_y: f64,
    pub latency: Latency,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pointcloud::Point;
    use alloc::vec;

    fn cloud(pts: &[(f64, f64, f64)], c: [u8; 3]) -> PointCloud {
        PointCloud::new(
            pts.iter()
                .map(|&(x, y, z)| Point::new(Vec3::new(x, y, z), c))
                .collect(),
        )
    }

    #[test]
    fn mpjpe_hand_values() {
        let a = vec![Vec3::ZERO, Vec3::ZERO];
        let b = vec![Vec3::new(3.0, 0.0, 0.0), Vec3::new(0.0, 4.0, 0.0)];
        assert_eq!(mpjpe_positions(&a, &b).unwrap(), 3.5);
        assert_eq!(mpjpe_positions(&a, &a).unwrap(), 0.0);
        assert!(mpjpe_positions(&a, &b[..1]).is_err());
    }

    #[test]
    fn adjacent_needs_two_frames() {
        let p = Pose {
            positions: vec![Vec3::ZERO],
            rotations: vec![Default::default()],
        };
        assert_eq!(
            adjacent_mpjpe(core::slice::from_ref(&p)),
            Err(Error::InsufficientFrames {
                needed: 2,
                found: 1
            })
        );
        assert_eq!(
            adjacent_mpjpe(&[p.clone(), p.clone(), p]).unwrap(),
            vec![0.0, 0.0]
        );
    }

    #[test]
    fn uniform_weights_equal_mpjpe() {
        let a = vec![
            Vec3::ZERO,
            Vec3::new(1.0, 1.0, 1.0),
            Vec3::new(-2.0, 0.5, 0.0),
        ];
        let b = vec![
            Vec3::new(0.1, 0.0, 0.0),
            Vec3::new(1.0, 0.0, 1.0),
            Vec3::new(0.0, 0.0, 0.0),
        ];
        let w = weighted_semantic_error(&a, &b, &WeightVector::uniform(3)).unwrap();
        assert!((w - mpjpe_positions(&a, &b).unwrap()).abs() < 1e-15);
    }

    #[test]
    fn p2point_hand_values() {
        let tx = cloud(&[(0.0, 0.0, 0.0), (2.0, 0.0, 0.0)], [0; 3]);
        let rx = cloud(&[(0.0, 0.0, 0.0)], [0; 3]);
        assert!((p2point(&tx, &rx).unwrap() - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(p2point(&tx, &tx).unwrap(), 0.0);
        let d = cloud(&[(0.0, 0.0, 0.7)], [0; 3]);
        assert!((p2point(&rx, &d).unwrap() - 0.7).abs() < 1e-15);
        assert_eq!(p2point(&tx, &PointCloud::default()), Err(Error::EmptyCloud));
    }

    #[test]
    fn psnr_hand_values() {
        let a = cloud(&[(0.0, 0.0, 0.0)], [100, 100, 100]);
        let b = cloud(&[(0.0, 0.0, 0.0)], [116, 116, 116]);
        assert!((psnr_y(&a, &b).unwrap() - 10.0 * (65025.0f64 / 256.0).log10()).abs() < 1e-9);
        assert!((psnr_y(&a, &b).unwrap() - 24.05).abs() < 0.01);
        assert_eq!(psnr_y(&a, &a).unwrap(), PSNR_CAP_DB);
    }

    #[test]
    fn air_time_scales_with_subchannels() {
        let m = LinkModel::default();
        let t = m.transmission_time(2800, 1).unwrap();
        assert!((t - 2800.0 / 16e6).abs() < 1e-18);
        let m2 = LinkModel {
            n_subchannels: 128,
            ..m
        };
        assert_eq!(m2.transmission_time(2800, 1).unwrap() * 2.0, t);
        assert!(LinkModel {
            symbol_rate: 0.0,
            ..m
        }
        .transmission_time(1, 1)
        .is_err());
        let base = m.transmission_time(147_456, 1).unwrap();
        assert!(1.0 - t / base > 0.98);
    }
}
