//! Run configuration: defaults, JSON config file, command-line overrides.
//!
//! Precedence is flags > config file > defaults. The config file is a
//! single JSON object with the same shape as [`RunConfig`]; every key is
//! optional.

use std::path::Path;

use mtee_core::channel::InnerChannelModel;
use mtee_core::gf::FieldSpec;
use mtee_core::rs::OuterCode;
use serde::{Deserialize, Serialize};

use crate::LabError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CodeConfig {
    pub n: usize,
    pub k: usize,
    pub m: u32,
    /// Defaults to the conventional primitive polynomial for `m`.
    pub primitive_polynomial: Option<u32>,
}

impl Default for CodeConfig {
    fn default() -> Self {
        CodeConfig {
            n: 255,
            k: 144,
            m: 8,
            primitive_polynomial: None,
        }
    }
}

impl CodeConfig {
    pub fn outer_code(&self) -> Result<OuterCode, LabError> {
        let field = match self.primitive_polynomial {
            Some(poly) => FieldSpec::new(self.m, poly),
            None => FieldSpec::with_default_polynomial(self.m)?,
        };
        // Rejects non-primitive polynomials up front.
        mtee_core::gf::Field::new(field)?;
        Ok(OuterCode::new(field, self.n, self.k)?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ChannelConfig {
    pub p: f64,
    pub rate_inner: f64,
    /// Defaults to `m / rate_inner`.
    pub n_inner: Option<f64>,
}

impl Default for ChannelConfig {
    fn default() -> Self {
        ChannelConfig {
            p: 0.02,
            rate_inner: 0.5,
            n_inner: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum DecoderChoice {
    Bmd,
    Gs,
    #[default]
    Tangent,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DecoderConfig {
    pub kind: DecoderChoice,
    /// Tradeoff factor(s) used for thresholds; sweeps take every entry.
    pub lambda: Option<Vec<f64>>,
    /// Tangent point; `None` selects the optimal one for each trial count.
    pub kappa: Option<usize>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SimConfig {
    pub words: u64,
    pub seed: u64,
    pub chunks: usize,
    /// Worker threads; `None` uses the rayon default.
    pub threads: Option<usize>,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            words: 100_000,
            seed: 1,
            chunks: 16,
            threads: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ValidateConfig {
    pub trials: u64,
    pub seed: u64,
}

impl Default for ValidateConfig {
    fn default() -> Self {
        ValidateConfig {
            trials: 10_000,
            seed: 1,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputConfig {
    pub format: Format,
    pub path: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub code: CodeConfig,
    pub channel: ChannelConfig,
    pub decoder: DecoderConfig,
    /// Trial counts; each command has its own default list.
    pub z: Option<Vec<usize>>,
    /// Overrides the default tilt `rho* / (1 + rho*)`.
    pub s: Option<f64>,
    pub sim: SimConfig,
    pub validate: ValidateConfig,
    pub output: OutputConfig,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, LabError> {
        serde_json::from_str(text).map_err(|e| LabError::Usage(format!("config: {e}")))
    }

    pub fn from_file(path: &Path) -> Result<Self, LabError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| LabError::Usage(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn outer_code(&self) -> Result<OuterCode, LabError> {
        self.code.outer_code()
    }

    pub fn n_inner(&self) -> f64 {
        self.channel
            .n_inner
            .unwrap_or_else(|| InnerChannelModel::default_n_inner(self.code.m, self.channel.rate_inner))
    }

    pub fn channel_model(&self) -> Result<InnerChannelModel, LabError> {
        Ok(InnerChannelModel::new(
            self.channel.p,
            self.channel.rate_inner,
            self.n_inner(),
            self.s,
        )?)
    }

    pub fn z_list(&self, default: &[usize]) -> Result<Vec<usize>, LabError> {
        let z = self.z.clone().unwrap_or_else(|| default.to_vec());
        if z.is_empty() || z.contains(&0) {
            return Err(LabError::Usage("trial counts must be >= 1".into()));
        }
        Ok(z)
    }
}
