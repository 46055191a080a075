//! Named, seeded scenarios over `carmarkov` with JSON or CSV reports.

mod scenarios;

use std::fmt;
use std::fs::File;
use std::io::{self, Write};
use std::path::Path;

use clap::ValueEnum;
use serde::{Deserialize, Serialize};

pub use carmarkov::Matrix;

pub const VERSION: &str = env!("CARGO_PKG_VERSION");

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scenario {
    SsaSweep,
    CommutingSquare,
    MarkovEquivalence,
    Counterexample,
    AdditivityProduct,
    EntropyIdentities,
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = self
            .to_possible_value()
            .map(|v| v.get_name().to_owned())
            .unwrap_or_default();
        f.write_str(&name)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub scenario: Scenario,
    /// Mode counts per region, `A,B,C` (or `A,C` for `additivity-product`).
    pub modes: Vec<usize>,
    pub lambda: f64,
    pub seed: u64,
    pub trials: usize,
    /// Replaces the primary threshold of the scenario.
    pub tol: Option<f64>,
    pub out: Option<String>,
}

impl ScenarioConfig {
    pub fn new(scenario: Scenario) -> Self {
        let (modes, trials) = match scenario {
            Scenario::SsaSweep => (vec![1, 1, 1], 500),
            Scenario::CommutingSquare => (vec![1, 1, 1], 1),
            Scenario::MarkovEquivalence => (vec![1, 1, 1], 200),
            Scenario::Counterexample => (vec![1, 3, 1], 100),
            Scenario::AdditivityProduct => (vec![1, 1], 200),
            Scenario::EntropyIdentities => (vec![1, 1, 1], 100),
        };
        Self {
            scenario,
            modes,
            lambda: 1.0,
            seed: 0,
            trials,
            tol: None,
            out: None,
        }
    }

    pub fn validate(&self) -> Result<(), ConfigError> {
        let expected = match self.scenario {
            Scenario::AdditivityProduct => 2,
            _ => 3,
        };
        if self.modes.len() != expected {
            return Err(ConfigError(format!(
                "scenario {} takes {expected} region sizes, got {}",
                self.scenario,
                self.modes.len()
            )));
        }
        if self.modes.contains(&0) {
            return Err(ConfigError("every region needs at least one mode".into()));
        }
        let total: usize = self.modes.iter().sum();
        if total > carmarkov::car::MAX_MODES {
            return Err(ConfigError(format!(
                "{total} modes requested, at most {} supported",
                carmarkov::car::MAX_MODES
            )));
        }
        if !(self.lambda > 0.0 && self.lambda <= 1.0) {
            return Err(ConfigError(format!(
                "lambda {} outside (0, 1]",
                self.lambda
            )));
        }
        if self.trials == 0 {
            return Err(ConfigError("trials must be at least 1".into()));
        }
        if let Some(t) = self.tol {
            if !(t > 0.0 && t.is_finite()) {
                return Err(ConfigError(format!("tolerance {t} must be positive")));
            }
        }
        if self.scenario == Scenario::Counterexample
            && (self.modes[0] != 1 || self.modes[2] != 1 || self.modes[1] < 3)
        {
            return Err(ConfigError(
                "counterexample needs single-mode A and C and at least 3 modes in B".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Comparison {
    /// `value ≤ threshold`
    AtMost,
    /// `value ≥ threshold`
    AtLeast,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Assertion {
    pub name: String,
    pub value: f64,
    pub threshold: f64,
    pub comparison: Comparison,
    pub pass: bool,
}

impl Assertion {
    pub fn at_most(name: &str, value: f64, threshold: f64) -> Self {
        Self {
            name: name.to_owned(),
            value,
            threshold,
            comparison: Comparison::AtMost,
            pass: value <= threshold,
        }
    }

    pub fn at_least(name: &str, value: f64, threshold: f64) -> Self {
        Self {
            name: name.to_owned(),
            value,
            threshold,
            comparison: Comparison::AtLeast,
            pass: value >= threshold,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NamedMatrix {
    pub name: String,
    pub matrix: Matrix,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub scenario: Scenario,
    pub config: ScenarioConfig,
    pub version: String,
    pub assertions: Vec<Assertion>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub matrices: Option<Vec<NamedMatrix>>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub error: Option<String>,
}

impl Report {
    pub fn new(config: &ScenarioConfig) -> Self {
        Self {
            scenario: config.scenario,
            config: config.clone(),
            version: VERSION.to_owned(),
            assertions: Vec::new(),
            matrices: None,
            error: None,
        }
    }

    pub fn config_error(config: &ScenarioConfig, err: &ConfigError) -> Self {
        Self {
            error: Some(err.to_string()),
            ..Self::new(config)
        }
    }

    pub fn passed(&self) -> bool {
        self.error.is_none() && self.assertions.iter().all(|a| a.pass)
    }

    /// 0 when every assertion passes, 1 on a failed assertion, 2 on a
    /// configuration error.
    pub fn exit_code(&self) -> u8 {
        match (&self.error, self.passed()) {
            (Some(_), _) => 2,
            (None, true) => 0,
            (None, false) => 1,
        }
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn write_csv<W: Write>(&self, w: W) -> io::Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record([
            "scenario",
            "name",
            "value",
            "threshold",
            "comparison",
            "pass",
        ])?;
        let scenario = self.scenario.to_string();
        for a in &self.assertions {
            let comparison = match a.comparison {
                Comparison::AtMost => "at_most",
                Comparison::AtLeast => "at_least",
            };
            out.write_record([
                scenario.as_str(),
                &a.name,
                &a.value.to_string(),
                &a.threshold.to_string(),
                comparison,
                &a.pass.to_string(),
            ])?;
        }
        if let Some(err) = &self.error {
            out.write_record([scenario.as_str(), "config_error", "", "", "", err])?;
        }
        out.flush()
    }
}

/// Writes the report to `path`: CSV when it ends in `.csv`, JSON otherwise.
pub fn emit_report(report: &Report, path: &Path) -> io::Result<()> {
    let file = File::create(path)?;
    if path
        .extension()
        .is_some_and(|e| e.eq_ignore_ascii_case("csv"))
    {
        report.write_csv(file)
    } else {
        let mut file = file;
        file.write_all(report.to_json().as_bytes())?;
        file.write_all(b"\n")
    }
}

/// Validates the configuration and runs the scenario.
pub fn run_scenario(config: &ScenarioConfig) -> Report {
    if let Err(err) = config.validate() {
        return Report::config_error(config, &err);
    }
    match scenarios::run(config) {
        Ok(report) => report,
        Err(err) => Report::config_error(config, &ConfigError(err.to_string())),
    }
}
