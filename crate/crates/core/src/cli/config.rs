use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::classifier::ClassifierConfig;
use crate::integrator::IntegratorConfig;
use crate::model::{ModelParams, State};

use super::CliError;

/// Everything a run needs. Missing sections take their defaults.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default = "default_model")]
    pub model: ModelParams,
    /// When set, `Lambda_ab` is recomputed as `ratio * Lambda_a`.
    #[serde(default)]
    pub lambda_ab_ratio: Option<f64>,
    #[serde(default)]
    pub initial: State,
    #[serde(default)]
    pub integrator: IntegratorConfig,
    #[serde(default)]
    pub classifier: ClassifierConfig,
    #[serde(default)]
    pub sweep: Option<SweepSpec>,
    #[serde(default)]
    pub output: OutputSpec,
}

fn default_model() -> ModelParams {
    ModelParams::symmetric(1.0, 0.0, 0.0)
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            model: default_model(),
            lambda_ab_ratio: None,
            initial: State::default(),
            integrator: IntegratorConfig::default(),
            classifier: ClassifierConfig::default(),
            sweep: None,
            output: OutputSpec::default(),
        }
    }
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Config(format!("invalid config: {e}")))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    /// Model parameters with the ratio convention applied.
    pub fn effective_model(&self) -> ModelParams {
        let mut p = self.model;
        if let Some(r) = self.lambda_ab_ratio {
            p.lambda_ab = r * p.lambda_a;
        }
        p
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if let Some(r) = self.lambda_ab_ratio {
            if !r.is_finite() {
                return Err(CliError::Config(format!("lambda_ab_ratio must be finite, got {r}")));
            }
        }
        self.effective_model().validate().map_err(|e| CliError::Config(e.to_string()))?;
        self.initial.validate().map_err(|e| CliError::Config(e.to_string()))?;
        self.integrator.validate().map_err(|e| CliError::Config(e.to_string()))?;
        self.classifier.validate().map_err(|e| CliError::Config(e.to_string()))?;
        if let Some(s) = &self.sweep {
            s.validate()?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TableFormat {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSpec {
    /// Output path stem; extensions are appended per artifact.
    pub path: PathBuf,
    #[serde(default)]
    pub format: TableFormat,
}

impl Default for OutputSpec {
    fn default() -> Self {
        Self {
            path: PathBuf::from("twomode_out"),
            format: TableFormat::Csv,
        }
    }
}

impl OutputSpec {
    pub fn with_extension(&self, ext: &str) -> PathBuf {
        let mut s = self.path.clone().into_os_string();
        s.push(".");
        s.push(ext);
        PathBuf::from(s)
    }
}

/// A sweepable field of [`ModelParams`] or [`State`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Axis {
    /// Sets `Lambda_a` and `Lambda_b` together.
    Lambda,
    LambdaA,
    LambdaB,
    LambdaAb,
    /// Sets `K_a` and `K_b` together.
    K,
    KA,
    KB,
    ZA,
    ZB,
    PhiA,
    PhiB,
}

impl Axis {
    pub fn is_initial_condition(self) -> bool {
        matches!(self, Self::ZA | Self::ZB | Self::PhiA | Self::PhiB)
    }

    pub fn apply(self, value: f64, p: &mut ModelParams, s: &mut State) {
        match self {
            Self::Lambda => {
                p.lambda_a = value;
                p.lambda_b = value;
            }
            Self::LambdaA => p.lambda_a = value,
            Self::LambdaB => p.lambda_b = value,
            Self::LambdaAb => p.lambda_ab = value,
            Self::K => {
                p.k_a = value;
                p.k_b = value;
            }
            Self::KA => p.k_a = value,
            Self::KB => p.k_b = value,
            Self::ZA => s.z_a = value,
            Self::ZB => s.z_b = value,
            Self::PhiA => s.phi_a = value,
            Self::PhiB => s.phi_b = value,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AxisSpec {
    pub name: Axis,
    pub min: f64,
    pub max: f64,
    pub count: usize,
}

impl AxisSpec {
    pub fn values(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.min];
        }
        let n = self.count - 1;
        (0..self.count)
            .map(|i| if i == n { self.max } else { self.min + (self.max - self.min) * i as f64 / n as f64 })
            .collect()
    }

    fn validate(&self) -> Result<(), CliError> {
        if self.count == 0 {
            return Err(CliError::Config(format!("axis {:?}: count must be at least 1", self.name)));
        }
        if !(self.min.is_finite() && self.max.is_finite()) {
            return Err(CliError::Config(format!("axis {:?}: bounds must be finite", self.name)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSpec {
    pub axis1: AxisSpec,
    #[serde(default)]
    pub axis2: Option<AxisSpec>,
    /// Integrate and classify every node instead of reporting only the
    /// linear-stability summary in the label column.
    #[serde(default)]
    pub simulate: bool,
}

impl SweepSpec {
    fn validate(&self) -> Result<(), CliError> {
        self.axis1.validate()?;
        if let Some(a) = &self.axis2 {
            a.validate()?;
            if a.name == self.axis1.name {
                return Err(CliError::Config("sweep axes must differ".into()));
            }
        }
        Ok(())
    }

    /// Grid nodes in row-major order (`axis1` outer).
    pub fn nodes(&self) -> Vec<(f64, Option<f64>)> {
        let v1 = self.axis1.values();
        match &self.axis2 {
            None => v1.into_iter().map(|a| (a, None)).collect(),
            Some(ax) => {
                let v2 = ax.values();
                v1.iter().flat_map(|&a| v2.iter().map(move |&b| (a, Some(b)))).collect()
            }
        }
    }

    pub fn touches_lambda_ab(&self) -> bool {
        self.axis1.name == Axis::LambdaAb || self.axis2.is_some_and(|a| a.name == Axis::LambdaAb)
    }
}
