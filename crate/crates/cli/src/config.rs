//! Experiment configuration: a TOML file merged with command-line overrides.
//! Every field is optional; each experiment fills in its own defaults.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Experiment {
    Figure1,
    Figure2,
    SweepEta,
    StrongError,
    Ergodicity,
    Coupling,
    Verify,
    Constants,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Experiment::Figure1 => "figure1",
            Experiment::Figure2 => "figure2",
            Experiment::SweepEta => "sweep_eta",
            Experiment::StrongError => "strong_error",
            Experiment::Ergodicity => "ergodicity",
            Experiment::Coupling => "coupling",
            Experiment::Verify => "verify",
            Experiment::Constants => "constants",
        }
    }
}

/// A potential family by name and parameters, with optional overrides of the declared constants.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilySpec {
    /// `quadratic`, `trig` or `appendix_c`.
    pub kind: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub shifts: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dim: Option<usize>,
    #[serde(rename = "L", default, skip_serializing_if = "Option::is_none")]
    pub l: Option<f64>,
    #[serde(rename = "K", default, skip_serializing_if = "Option::is_none")]
    pub k: Option<f64>,
    #[serde(rename = "R", default, skip_serializing_if = "Option::is_none")]
    pub r: Option<f64>,
}

impl FamilySpec {
    pub fn quadratic(a: &[f64], b: &[f64]) -> Self {
        Self {
            kind: "quadratic".into(),
            a: Some(a.to_vec()),
            b: Some(b.to_vec()),
            ..Self::default()
        }
    }

    pub fn trig(shifts: &[f64]) -> Self {
        Self {
            kind: "trig".into(),
            shifts: Some(shifts.to_vec()),
            ..Self::default()
        }
    }

    pub fn with_r(mut self, r: f64) -> Self {
        self.r = Some(r);
        self
    }

    /// One component with drift `−10x`.
    pub fn ornstein_uhlenbeck() -> Self {
        Self::quadratic(&[10.0], &[0.0])
    }

    /// `a = (5, 15)`, `b = (5, −5/3)`; the components average to the drift `−10x`.
    pub fn figure2() -> Self {
        Self::quadratic(&[5.0, 15.0], &[5.0, -5.0 / 3.0])
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub experiment: Option<Experiment>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub seed: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub out: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threads: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub family: Option<FamilySpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eta: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub horizon: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub dt: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub burn_in: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_replicas: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub x0: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub y0: Option<Vec<f64>>,
    /// Evaluation times (ergodicity, coupling) or the `(s, t)` pair of the continuity check.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub times: Option<Vec<f64>>,
    /// Grid steps between retained stationary samples.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub thin: Option<usize>,
    /// Maximum number of rows of a sample-path CSV.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path_points: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_bins: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference_horizon: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference_points: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub n_boot: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eps_meet: Option<f64>,
    /// Initial distance used by the combined bound table.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub w0: Option<f64>,
    /// Verifier battery selection.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub checks: Option<Vec<String>>,
}

/// Command-line overrides, applied on top of the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    pub threads: Option<usize>,
    pub eta: Option<Vec<f64>>,
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> CliResult<Self> {
        toml::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::from_toml_str(&text).map_err(|e| match e {
            CliError::Config(m) => CliError::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn apply(mut self, o: &Overrides) -> Self {
        if o.seed.is_some() {
            self.seed = o.seed;
        }
        if o.out.is_some() {
            self.out.clone_from(&o.out);
        }
        if o.threads.is_some() {
            self.threads = o.threads;
        }
        if o.eta.is_some() {
            self.eta.clone_from(&o.eta);
        }
        self
    }

    /// Rejects a file written for another experiment.
    pub fn check_experiment(&self, requested: Experiment) -> CliResult<()> {
        match self.experiment {
            Some(e) if e != requested => Err(CliError::Config(format!(
                "config is for experiment `{}` but `{}` was requested",
                e.name(),
                requested.name()
            ))),
            _ => Ok(()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_nested_family() {
        let cfg = ExperimentConfig::from_toml_str(
            r#"
            experiment = "strong_error"
            seed = 3
            eta = [0.1, 0.01]
            [family]
            kind = "quadratic"
            a = [5.0, 15.0]
            b = [5.0, -1.6666666666666667]
            L = 14.0
            "#,
        )
        .unwrap();
        assert_eq!(cfg.experiment, Some(Experiment::StrongError));
        assert_eq!(cfg.family.as_ref().unwrap().l, Some(14.0));
        assert_eq!(cfg.eta, Some(vec![0.1, 0.01]));
    }

    #[test]
    fn unknown_keys_are_errors() {
        assert!(ExperimentConfig::from_toml_str("horizn = 3").is_err());
        assert!(ExperimentConfig::from_toml_str("[family]\nkind = \"trig\"\nshift = [1.0]").is_err());
    }

    #[test]
    fn overrides_win() {
        let cfg = ExperimentConfig::from_toml_str("seed = 1\neta = [1.0]").unwrap();
        let o = Overrides {
            seed: Some(9),
            eta: Some(vec![0.5]),
            ..Overrides::default()
        };
        let cfg = cfg.apply(&o);
        assert_eq!(cfg.seed, Some(9));
        assert_eq!(cfg.eta, Some(vec![0.5]));
    }

    #[test]
    fn mismatched_experiment_is_rejected() {
        let cfg = ExperimentConfig::from_toml_str("experiment = \"figure1\"").unwrap();
        assert!(cfg.check_experiment(Experiment::Figure1).is_ok());
        assert_eq!(cfg.check_experiment(Experiment::Verify).unwrap_err().exit_code(), 2);
    }
}
