//! Long-format plot tables: one row per framework and SNR point.

use std::fmt::Write as _;

use crate::error::{Error, Result};
use crate::experiment::{frameworks_in, mean_std, FrameRecord};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Figure {
    AdjacentMpjpe,
    Mpjpe,
    P2Point,
    PsnrY,
    /// Total of extraction, air time and rendering.
    Latency,
}

impl Figure {
    pub const ALL: [Figure; 5] = [
        Figure::AdjacentMpjpe,
        Figure::Mpjpe,
        Figure::P2Point,
        Figure::PsnrY,
        Figure::Latency,
    ];

    pub fn id(self) -> &'static str {
        match self {
            Figure::AdjacentMpjpe => "adjacent-mpjpe",
            Figure::Mpjpe => "mpjpe",
            Figure::P2Point => "p2point",
            Figure::PsnrY => "psnr-y",
            Figure::Latency => "latency",
        }
    }

    pub fn parse(id: &str) -> Result<Figure> {
        let norm = id.to_ascii_lowercase().replace('_', "-");
        Figure::ALL
            .into_iter()
            .find(|f| f.id() == norm)
            .ok_or_else(|| Error::UnknownFigure {
                id: id.to_string(),
                valid: Figure::ALL.iter().map(|f| f.id()).collect(),
            })
    }

    fn value(self, r: &FrameRecord) -> Option<f64> {
        match self {
            Figure::AdjacentMpjpe => r.adj_mpjpe,
            Figure::Mpjpe => r.mpjpe,
            Figure::P2Point => r.p2point,
            Figure::PsnrY => r.psnr_y,
            Figure::Latency => r.latency(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct PlotRow {
    pub snr_db: f64,
    pub framework: String,
    pub mean: f64,
    pub std: f64,
}

/// Per-cell mean and standard deviation, frameworks in order of first
/// appearance and SNR ascending. Cells without values are left out.
pub fn plot_rows(records: &[FrameRecord], figure: Figure) -> Result<Vec<PlotRow>> {
    if records.is_empty() {
        return Err(Error::EmptyResults);
    }
    let mut snrs: Vec<f64> = Vec::new();
    for r in records {
        if !snrs.contains(&r.snr_db) {
            snrs.push(r.snr_db);
        }
    }
    snrs.sort_by(f64::total_cmp);
    let mut rows = Vec::new();
    for fw in frameworks_in(records) {
        for &snr in &snrs {
            let values: Vec<f64> = records
                .iter()
                .filter(|r| r.framework == fw && r.snr_db == snr)
                .filter_map(|r| figure.value(r))
                .collect();
            if let Some(m) = mean_std(&values) {
                rows.push(PlotRow {
                    snr_db: snr,
                    framework: fw.clone(),
                    mean: m.mean,
                    std: m.std,
                });
            }
        }
    }
    Ok(rows)
}

pub fn plot_csv(records: &[FrameRecord], figure: Figure) -> Result<String> {
    let mut s = String::from("snr_db,framework,mean,std\n");
    for r in plot_rows(records, figure)? {
        let _ = writeln!(s, "{},{},{},{}", r.snr_db, r.framework, r.mean, r.std);
    }
    Ok(s)
}
