//! Experiment configuration, read from TOML or JSON.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use gsar_core::channel::{Coder, QuantizationScheme, ScalarEncoding};
use gsar_core::metrics::LinkModel;
use gsar_core::pipeline::{AnalyticLatency, LatencyMode, PipelineConfig};
use gsar_core::semantics::Framework;
use gsar_core::trace::TraceKind;

use crate::error::{io_err, Error, Result};

pub const DEFAULT_SNR_DB: [f64; 7] = [0.5, 1.0, 3.0, 5.0, 8.0, 10.0, 13.0];

fn by_name<S: Serializer, T: fmt::Display>(v: &T, s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_str(v)
}

fn parse_name<'de, D, T>(d: D) -> std::result::Result<T, D::Error>
where
    D: Deserializer<'de>,
    T: FromStr,
    T::Err: fmt::Display,
{
    let s = String::deserialize(d)?;
    s.parse().map_err(serde::de::Error::custom)
}

/// A framework as it appears in config files.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct FrameworkName(
    #[serde(serialize_with = "by_name", deserialize_with = "parse_name")] pub Framework,
);

/// `identity` or `repetition:k`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct CoderSpec(pub Coder);

impl fmt::Display for CoderSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0 {
            Coder::Identity => f.write_str("identity"),
            Coder::Repetition(k) => write!(f, "repetition:{k}"),
        }
    }
}

impl FromStr for CoderSpec {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.split_once(':') {
            None if s == "identity" => Ok(CoderSpec(Coder::Identity)),
            Some(("repetition", k)) => {
                let k: usize = k
                    .parse()
                    .map_err(|_| format!("bad repetition factor '{k}'"))?;
                Coder::repetition(k)
                    .map(CoderSpec)
                    .map_err(|e| e.to_string())
            }
            _ => Err(format!(
                "unknown coder '{s}', expected identity or repetition:k"
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EncodingName {
    #[default]
    Fixed,
    Float32,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ChannelConfig {
    pub n_subchannels: usize,
    #[serde(serialize_with = "by_name", deserialize_with = "parse_name")]
    pub coder: CoderSpec,
    pub bits_per_scalar: u32,
    pub encoding: EncodingName,
    pub symbol_rate_per_subchannel: f64,
    /// Seed of the channel and noise streams; the master seed when absent.
    pub seed: Option<u64>,
    /// Single-point sweep; alternative to the top-level `snr_db` list.
    pub snr_avg_db: Option<f64>,
}

impl Default for ChannelConfig {
    fn default() -> Self {
        ChannelConfig {
            n_subchannels: 64,
            coder: CoderSpec::default(),
            bits_per_scalar: 16,
            encoding: EncodingName::Fixed,
            symbol_rate_per_subchannel: 250_000.0,
            seed: None,
            snr_avg_db: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LatencyModeName {
    #[default]
    Analytic,
    Measured,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct LatencyConfig {
    pub mode: LatencyModeName,
    pub per_generated_point_s: f64,
    pub per_rendered_point_s: f64,
    pub per_joint_extract_s: f64,
    pub per_joint_render_s: f64,
}

impl Default for LatencyConfig {
    fn default() -> Self {
        let a = AnalyticLatency::default();
        LatencyConfig {
            mode: LatencyModeName::Analytic,
            per_generated_point_s: a.per_generated_point,
            per_rendered_point_s: a.per_rendered_point,
            per_joint_extract_s: a.per_joint_extract,
            per_joint_render_s: a.per_joint_render,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CloudSizes {
    pub avatar_points: usize,
    pub stationary_points: usize,
    pub downsample_points: usize,
    pub upsample_points: usize,
}

impl Default for CloudSizes {
    fn default() -> Self {
        CloudSizes {
            avatar_points: 6144,
            stationary_points: 2048,
            downsample_points: 2048,
            upsample_points: 8192,
        }
    }
}

/// A trace file, or a generated trace of the given kind.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TraceConfig {
    pub path: Option<PathBuf>,
    #[serde(serialize_with = "by_name", deserialize_with = "parse_name")]
    pub kind: TraceKind,
    pub fps: f64,
}

impl Default for TraceConfig {
    fn default() -> Self {
        TraceConfig {
            path: None,
            kind: TraceKind::FullBody,
            fps: 60.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub frameworks: Vec<FrameworkName>,
    pub snr_db: Option<Vec<f64>>,
    /// Frames per sweep point.
    pub frames: usize,
    pub seed: u64,
    /// Skeleton file; the built-in humanoid when absent.
    pub skeleton: Option<PathBuf>,
    pub trace: TraceConfig,
    pub clouds: CloudSizes,
    pub channel: ChannelConfig,
    pub latency: LatencyConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            frameworks: Framework::ALL.into_iter().map(FrameworkName).collect(),
            snr_db: None,
            frames: 200,
            seed: 1,
            skeleton: None,
            trace: TraceConfig::default(),
            clouds: CloudSizes::default(),
            channel: ChannelConfig::default(),
            latency: LatencyConfig::default(),
        }
    }
}

impl ExperimentConfig {
    /// Reads TOML, or JSON when the extension is `.json`. Relative paths
    /// are taken from the config file's directory.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(io_err(path))?;
        let mut cfg = if path
            .extension()
            .is_some_and(|e| e.eq_ignore_ascii_case("json"))
        {
            Self::from_json(&text)?
        } else {
            Self::from_toml(&text)?
        };
        let base = path.parent().unwrap_or(Path::new(""));
        for p in [&mut cfg.skeleton, &mut cfg.trace.path]
            .into_iter()
            .flatten()
        {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        }
        Ok(cfg)
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        Ok(toml::from_str(text)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    /// Fills defaults and checks every field.
    pub fn resolve(mut self) -> Result<Self> {
        let bad = |m: String| Err(Error::Config(m));
        if self.frameworks.is_empty() {
            return bad("framework set is empty".into());
        }
        let mut seen = Vec::new();
        self.frameworks.retain(|f| {
            let fresh = !seen.contains(f);
            seen.push(*f);
            fresh
        });
        self.snr_db = Some(match (self.snr_db.take(), self.channel.snr_avg_db.take()) {
            (Some(_), Some(_)) => {
                return bad("set either snr_db or channel.snr_avg_db, not both".into())
            }
            (Some(v), None) => v,
            (None, Some(s)) => vec![s],
            (None, None) => DEFAULT_SNR_DB.to_vec(),
        });
        let snrs = self.snr_list();
        if snrs.is_empty() {
            return bad("SNR list is empty".into());
        }
        if let Some(s) = snrs.iter().find(|s| s.is_nan() || **s == f64::NEG_INFINITY) {
            return bad(format!("invalid SNR {s}"));
        }
        if self.frames < 1 {
            return bad("frames must be at least 1".into());
        }
        if self.trace.path.is_none() && self.frames < 2 {
            return bad("a generated trace needs at least 2 frames".into());
        }
        if !(self.trace.fps > 0.0) {
            return bad(format!(
                "trace fps must be positive, got {}",
                self.trace.fps
            ));
        }
        if self.channel.n_subchannels == 0 {
            return bad("n_subchannels must be positive".into());
        }
        let c = &self.clouds;
        if c.avatar_points == 0 || c.downsample_points == 0 || c.upsample_points == 0 {
            return bad("cloud sizes must be positive".into());
        }
        if c.downsample_points > c.avatar_points + c.stationary_points {
            return bad(format!(
                "downsample_points {} exceeds the scene size {}",
                c.downsample_points,
                c.avatar_points + c.stationary_points
            ));
        }
        if c.upsample_points < c.downsample_points {
            return bad("upsample_points must be at least downsample_points".into());
        }
        let l = &self.latency;
        let costs = [
            l.per_generated_point_s,
            l.per_rendered_point_s,
            l.per_joint_extract_s,
            l.per_joint_render_s,
        ];
        if costs.iter().any(|c| !(*c >= 0.0) || !c.is_finite()) {
            return bad("latency costs must be finite and non-negative".into());
        }
        self.pipeline()?;
        self.channel.seed.get_or_insert(self.seed);
        Ok(self)
    }

    pub fn framework_list(&self) -> Vec<Framework> {
        self.frameworks.iter().map(|f| f.0).collect()
    }

    pub fn snr_list(&self) -> Vec<f64> {
        self.snr_db
            .clone()
            .unwrap_or_else(|| DEFAULT_SNR_DB.to_vec())
    }

    pub fn channel_seed(&self) -> u64 {
        self.channel.seed.unwrap_or(self.seed)
    }

    pub fn pipeline(&self) -> Result<PipelineConfig> {
        let encoding = match self.channel.encoding {
            EncodingName::Fixed => ScalarEncoding::FixedPoint,
            EncodingName::Float32 => ScalarEncoding::Float32,
        };
        let l = &self.latency;
        Ok(PipelineConfig {
            scheme: QuantizationScheme::new(self.channel.bits_per_scalar, encoding)?,
            coder: self.channel.coder.0,
            link: LinkModel {
                n_subchannels: self.channel.n_subchannels,
                symbol_rate: self.channel.symbol_rate_per_subchannel,
                ..LinkModel::default()
            },
            downsample_points: self.clouds.downsample_points,
            upsample_points: self.clouds.upsample_points,
            latency: match l.mode {
                LatencyModeName::Analytic => LatencyMode::Analytic(AnalyticLatency {
                    per_generated_point: l.per_generated_point_s,
                    per_rendered_point: l.per_rendered_point_s,
                    per_joint_extract: l.per_joint_extract_s,
                    per_joint_render: l.per_joint_render_s,
                }),
                LatencyModeName::Measured => LatencyMode::Measured,
            },
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults() {
        let c = ExperimentConfig::from_toml("").unwrap().resolve().unwrap();
        assert_eq!(c.framework_list(), Framework::ALL.to_vec());
        assert_eq!(c.snr_list(), DEFAULT_SNR_DB.to_vec());
        assert_eq!(c.frames, 200);
        assert_eq!(c.channel_seed(), 1);
        assert_eq!(c.pipeline().unwrap(), PipelineConfig::default());
    }

    #[test]
    fn toml_and_json_agree() {
        let toml = r#"
frameworks = ["gsar", "EC-GSAR"]
snr_db = [0.0, 10.0]
frames = 12
seed = 9

[trace]
kind = "slight-shaking"

[channel]
coder = "repetition:3"
bits_per_scalar = 12
seed = 4
"#;
        let json = r#"{"frameworks":["gsar","ecgsar"],"snr_db":[0,10],"frames":12,"seed":9,
"trace":{"kind":"slight-shaking"},"channel":{"coder":"repetition:3","bits_per_scalar":12,"seed":4}}"#;
        let a = ExperimentConfig::from_toml(toml)
            .unwrap()
            .resolve()
            .unwrap();
        let b = ExperimentConfig::from_json(json)
            .unwrap()
            .resolve()
            .unwrap();
        assert_eq!(a, b);
        assert_eq!(a.framework_list(), vec![Framework::Gsar, Framework::Ecgsar]);
        assert_eq!(a.pipeline().unwrap().coder, Coder::Repetition(3));
        assert_eq!(a.channel_seed(), 4);
        assert_eq!(a.trace.kind, TraceKind::SlightShaking);
    }

    #[test]
    fn resolved_config_round_trips() {
        let c = ExperimentConfig::from_toml("frames = 3\n[channel]\nsnr_avg_db = 5.0")
            .unwrap()
            .resolve()
            .unwrap();
        assert_eq!(c.snr_list(), vec![5.0]);
        let json = serde_json::to_string(&c).unwrap();
        assert_eq!(
            ExperimentConfig::from_json(&json)
                .unwrap()
                .resolve()
                .unwrap(),
            c
        );
    }

    #[test]
    fn rejects_invalid() {
        let fails = |t: &str| {
            ExperimentConfig::from_toml(t)
                .and_then(|c| c.resolve())
                .is_err()
        };
        assert!(fails("frameworks = []"));
        assert!(fails("snr_db = []"));
        assert!(fails("frames = 0"));
        assert!(fails("frameworks = [\"mesh\"]"));
        assert!(fails("[channel]\ncoder = \"repetition:2\""));
        assert!(fails("[channel]\nbits_per_scalar = 40"));
        assert!(fails("[channel]\nn_subchannels = 0"));
        assert!(fails("snr_db = [1.0]\n[channel]\nsnr_avg_db = 5.0"));
        assert!(fails("unknown_key = 1"));
        assert!(fails("[trace]\nkind = \"waltz\""));
        assert!(!fails("snr_db = [inf]"));
    }
}
