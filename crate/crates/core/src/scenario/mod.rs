//! Scenario runner: validated JSON configs in, deterministic reports out.

mod commands;
mod report;
mod suite;

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::QuadConfig;
use crate::shift::GridSpec;

pub use report::{Check, Observation, Recorder, Relation, Report, Worst};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Command {
    Shift,
    Doi,
    Sylvester,
    Quantize,
    Cotlar,
    Peller,
    Suite,
}

impl Command {
    pub const ALL: [Command; 7] = [
        Command::Shift,
        Command::Doi,
        Command::Sylvester,
        Command::Quantize,
        Command::Cotlar,
        Command::Peller,
        Command::Suite,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Command::Shift => "shift",
            Command::Doi => "doi",
            Command::Sylvester => "sylvester",
            Command::Quantize => "quantize",
            Command::Cotlar => "cotlar",
            Command::Peller => "peller",
            Command::Suite => "suite",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|c| c.name() == s)
            .ok_or_else(|| Error::Config { path: "command".into(), message: format!("unknown command {s:?}") })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Route {
    Counting,
    Arctan,
    ArctanExtrapolated,
    Fourier,
    #[serde(rename = "rank1")]
    RankOne,
}

impl Route {
    pub fn parse(s: &str) -> Result<Self> {
        serde_json::from_value(serde_json::Value::String(s.into()))
            .map_err(|_| Error::Config { path: "route".into(), message: format!("unknown route {s:?}") })
    }
}

/// Named tolerances. Defaults: 1e-10 for algebraic identities, 1e-9 for solver residuals and
/// the trace formula, 1e-8 for agreement between independent solvers, 1e-6 for quadrature
/// cross-checks and iterative norm estimates, 0.05 for boundary-limit comparisons.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Tolerances {
    pub algebraic: f64,
    pub residual: f64,
    pub solver: f64,
    pub quadrature: f64,
    pub estimate: f64,
    pub boundary: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self { algebraic: 1e-10, residual: 1e-9, solver: 1e-8, quadrature: 1e-6, estimate: 1e-6, boundary: 0.05 }
    }
}

impl Tolerances {
    pub fn set(&mut self, name: &str, value: f64) -> Result<()> {
        let slot = match name {
            "algebraic" => &mut self.algebraic,
            "residual" => &mut self.residual,
            "solver" => &mut self.solver,
            "quadrature" => &mut self.quadrature,
            "estimate" => &mut self.estimate,
            "boundary" => &mut self.boundary,
            _ => {
                return Err(Error::Config { path: format!("tolerances.{name}"), message: "unknown tolerance".into() })
            }
        };
        *slot = value;
        Ok(())
    }

    fn entries(&self) -> [(&'static str, f64); 6] {
        [
            ("algebraic", self.algebraic),
            ("residual", self.residual),
            ("solver", self.solver),
            ("quadrature", self.quadrature),
            ("estimate", self.estimate),
            ("boundary", self.boundary),
        ]
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Inputs {
    #[serde(skip_serializing_if = "Option::is_none")]
    pub a: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub b: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub y: Option<PathBuf>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub symbol: Option<PathBuf>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub command: Command,
    #[serde(default = "default_dims")]
    pub dims: Vec<usize>,
    #[serde(default = "default_seed")]
    pub seed: u64,
    /// Overrides the per-group trial counts.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trials: Option<usize>,
    #[serde(default)]
    pub tolerances: Tolerances,
    /// `min:max:count`
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub quad: Option<QuadConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub route: Option<Route>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub epsilon: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub eta: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<f64>,
    #[serde(default)]
    pub inputs: Inputs,
    /// Output directory; not echoed in reports so reruns elsewhere stay byte-identical.
    #[serde(default, skip_serializing)]
    pub out: Option<PathBuf>,
}

fn default_dims() -> Vec<usize> {
    vec![2, 4, 6, 8]
}

fn default_seed() -> u64 {
    42
}

impl ScenarioConfig {
    pub fn new(command: Command) -> Self {
        Self {
            command,
            dims: default_dims(),
            seed: default_seed(),
            trials: None,
            tolerances: Tolerances::default(),
            grid: None,
            quad: None,
            route: None,
            epsilon: None,
            eta: None,
            p: None,
            inputs: Inputs::default(),
            out: None,
        }
    }

    /// Parses and validates; errors name the offending field path.
    pub fn from_json(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let cfg: Self = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            Error::Config { path: if path == "." { "<root>".into() } else { path }, message: e.into_inner().to_string() }
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |path: String, message: String| Err(Error::Config { path, message });
        if self.dims.is_empty() {
            return bad("dims".into(), "at least one dimension is required".into());
        }
        if let Some(i) = self.dims.iter().position(|&d| d == 0) {
            return bad(format!("dims[{i}]"), "dimensions must be at least 1".into());
        }
        if self.trials == Some(0) {
            return bad("trials".into(), "trials must be at least 1".into());
        }
        for (name, v) in self.tolerances.entries() {
            if !(v.is_finite() && v >= 0.0) {
                return bad(format!("tolerances.{name}"), format!("must be finite and non-negative, got {v}"));
            }
        }
        if let Some(g) = &self.grid {
            GridSpec::parse(g).map_err(|e| Error::Config { path: "grid".into(), message: e.to_string() })?;
        }
        if let Some(q) = &self.quad {
            q.points().map_err(|e| Error::Config { path: "quad".into(), message: e.to_string() })?;
        }
        for (name, v) in [("epsilon", self.epsilon), ("eta", self.eta)] {
            if let Some(v) = v {
                if !(v.is_finite() && v > 0.0) {
                    return bad(name.into(), format!("must be positive, got {v}"));
                }
            }
        }
        if let Some(p) = self.p {
            if !(p >= 1.0) {
                return bad("p".into(), format!("must be at least 1 or infinite, got {p}"));
            }
        }
        Ok(())
    }

    pub fn grid_spec(&self) -> Result<Option<GridSpec>> {
        self.grid.as_deref().map(GridSpec::parse).transpose()
    }

    fn trials_or(&self, default: usize) -> usize {
        self.trials.unwrap_or(default)
    }
}

/// Executes the configured command. Deterministic given the config.
pub fn run(cfg: &ScenarioConfig) -> Result<Report> {
    cfg.validate()?;
    let mut rec = Recorder::default();
    match cfg.command {
        Command::Suite => suite::run_suite(cfg, &mut rec)?,
        Command::Shift => commands::shift(cfg, &mut rec)?,
        Command::Doi => commands::doi(cfg, &mut rec)?,
        Command::Sylvester => commands::sylvester(cfg, &mut rec)?,
        Command::Quantize => commands::quantize_command(cfg, &mut rec)?,
        Command::Cotlar => commands::cotlar(cfg, &mut rec)?,
        Command::Peller => commands::peller(cfg, &mut rec)?,
    }
    Ok(rec.finish(cfg.command, cfg.clone()))
}

/// Writes `report.json` and every artifact into `dir`, creating it if needed.
pub fn emit_report(report: &Report, dir: impl AsRef<Path>) -> Result<()> {
    let dir = dir.as_ref();
    std::fs::create_dir_all(dir)?;
    std::fs::write(dir.join("report.json"), report.to_json())?;
    for (name, contents) in &report.artifacts {
        std::fs::write(dir.join(name), contents)?;
    }
    Ok(())
}

#[cfg(test)]
mod tests;
