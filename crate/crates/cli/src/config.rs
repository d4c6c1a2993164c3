use std::path::Path;

use kerrjunction::{Channel, Error, ModelConfig};
use serde::{Deserialize, Serialize};

/// `points` samples from `min` to `max` inclusive.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Range {
    pub min: f64,
    pub max: f64,
    pub points: usize,
}

impl Range {
    pub fn new(min: f64, max: f64, points: usize) -> Self {
        Self { min, max, points }
    }

    pub fn samples(&self) -> Result<Vec<f64>, Error> {
        match self.points {
            0 => Err(Error::BadGrid("grid has no points".into())),
            1 if self.min == self.max && self.min.is_finite() => Ok(vec![self.min]),
            n => kerrjunction::spectrum::uniform_grid(self.min, self.max, n),
        }
    }
}

/// Numeric controls shared by the subcommands. Every field is optional and
/// each subcommand reads only the ones it needs.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Controls {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega0: Option<Range>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub omega: Option<Range>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub detuning: Option<Range>,
    /// Detection channel of the spectra; photons always enter through `L`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub output: Option<Channel>,
    /// Propagator step.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub h: Option<f64>,
    /// Largest separation written to the pulse cut.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub max_d: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub cutoff: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub t_max: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    /// Explicit classical drive `f`, overriding `sqrt(gamma_L / tau) b`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub drive_re: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub drive_im: Option<f64>,
    /// Calibrate a real drive so that the mean-field population `|<a>|^2`
    /// takes this value at the model's `omega_0`.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub target_population: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub model: ModelConfig,
    #[serde(default)]
    pub controls: Controls,
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, Error> {
        serde_json::from_str(text).map_err(|e| Error::Parse(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, Error> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Io(std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))))?;
        Self::parse(&text)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const MODEL: &str = r#"{"omega_c":0,"u":4,"gamma_L":1,"gamma_R":1,"omega_0":0,"tau":7,"envelope":"uncorr_gauss"}"#;

    #[test]
    fn controls_are_optional() {
        let c = RunConfig::parse(&format!(r#"{{"model":{MODEL}}}"#)).unwrap();
        assert_eq!(c.controls, Controls::default());
    }

    #[test]
    fn unknown_keys_rejected() {
        assert!(RunConfig::parse(&format!(r#"{{"model":{MODEL},"extra":1}}"#)).is_err());
        assert!(RunConfig::parse(&format!(r#"{{"model":{MODEL},"controls":{{"cutof":8}}}}"#)).is_err());
    }

    #[test]
    fn range_samples() {
        assert_eq!(Range::new(0.0, 1.0, 3).samples().unwrap(), vec![0.0, 0.5, 1.0]);
        assert_eq!(Range::new(2.0, 2.0, 1).samples().unwrap(), vec![2.0]);
        assert!(Range::new(0.0, 1.0, 0).samples().is_err());
    }
}
