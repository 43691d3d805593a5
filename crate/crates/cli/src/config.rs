use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::Parser;
use cylscat::analysis::Spacing;
use cylscat::{Engine, Formulation, Measure};
use serde::Deserialize;

use crate::error::CliError;

/// A swept quantity: an error measure or the system condition number.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Quantity {
    Error(Measure),
    Condition,
}

impl Quantity {
    pub fn name(self) -> &'static str {
        match self {
            Quantity::Error(m) => m.name(),
            Quantity::Condition => "cond",
        }
    }
}

impl std::fmt::Display for Quantity {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Quantity {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        if s.eq_ignore_ascii_case("cond") {
            return Ok(Quantity::Condition);
        }
        s.parse::<Measure>().map(Quantity::Error).map_err(|e| e.to_string())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EngineChoice {
    Predicted,
    Numerical,
    Both,
}

impl EngineChoice {
    pub fn engines(self) -> &'static [Engine] {
        match self {
            EngineChoice::Predicted => &[Engine::Predicted],
            EngineChoice::Numerical => &[Engine::Numerical],
            EngineChoice::Both => &[Engine::Predicted, Engine::Numerical],
        }
    }
}

impl FromStr for EngineChoice {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s.to_ascii_lowercase().as_str() {
            "predicted" => Ok(EngineChoice::Predicted),
            "numerical" => Ok(EngineChoice::Numerical),
            "both" => Ok(EngineChoice::Both),
            _ => Err(format!("unknown engine '{s}' (expected predicted, numerical or both)")),
        }
    }
}

/// A validated sweep description.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    /// Cylinder radius in metres.
    pub a: f64,
    pub ka_start: f64,
    pub ka_stop: f64,
    pub points: usize,
    pub spacing: Spacing,
    pub n_lambda: f64,
    pub formulations: Vec<Formulation>,
    pub quantities: Vec<Quantity>,
    pub harmonics: usize,
    pub quadrature: usize,
    pub epsilon: f64,
    pub engine: EngineChoice,
    /// Operator spectral errors at `q = floor(ka)` instead of formulation errors.
    pub spectral: bool,
    pub out: PathBuf,
    pub plots: Option<PathBuf>,
    pub threads: Option<usize>,
}

impl Default for SweepConfig {
    fn default() -> Self {
        use Formulation::*;
        SweepConfig {
            a: 1.0,
            ka_start: 30.0,
            ka_stop: 400.0,
            points: 60,
            spacing: Spacing::Log,
            n_lambda: 4.0,
            formulations: vec![TmEfie, TmMfie, TeEfie, TeMfie, TmCcfie, TeCcfie],
            quantities: vec![Quantity::Error(Measure::L2), Quantity::Error(Measure::Hs), Quantity::Error(Measure::Hsk)],
            harmonics: 1,
            quadrature: 100,
            epsilon: 0.1,
            engine: EngineChoice::Predicted,
            spectral: false,
            out: PathBuf::from("sweep.csv"),
            plots: None,
            threads: None,
        }
    }
}

/// Contents of a configuration file; every key is optional.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub a: Option<f64>,
    pub ka_start: Option<f64>,
    pub ka_stop: Option<f64>,
    pub points: Option<usize>,
    pub spacing: Option<String>,
    pub n_lambda: Option<f64>,
    pub formulations: Option<Vec<String>>,
    pub norms: Option<Vec<String>>,
    pub harmonics: Option<usize>,
    pub quadrature: Option<usize>,
    pub epsilon: Option<f64>,
    pub engine: Option<String>,
    pub spectral: Option<bool>,
    pub out: Option<PathBuf>,
    pub plots: Option<PathBuf>,
    pub threads: Option<usize>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }
}

/// Frequency sweeps of discretization errors for scattering by a conducting cylinder.
#[derive(Debug, Parser)]
#[command(name = "cylscat", version)]
pub struct Args {
    /// Key-value configuration file; flags below override its entries.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Cylinder radius in metres.
    #[arg(long)]
    pub a: Option<f64>,
    #[arg(long)]
    pub ka_start: Option<f64>,
    #[arg(long)]
    pub ka_stop: Option<f64>,
    #[arg(long)]
    pub points: Option<usize>,
    /// Grid spacing: log or linear.
    #[arg(long)]
    pub spacing: Option<String>,
    /// Mesh points per wavelength.
    #[arg(long)]
    pub nlambda: Option<f64>,
    /// Formulation tag such as TE-EFIE or TM-CCFIE_F; repeatable.
    #[arg(long = "formulation")]
    pub formulations: Vec<String>,
    /// L2, Hs, Hsk, P, S_L2 or cond; repeatable.
    #[arg(long = "norm")]
    pub norms: Vec<String>,
    /// predicted, numerical or both.
    #[arg(long)]
    pub engine: Option<String>,
    /// Alias harmonics kept on each side of the principal band.
    #[arg(long)]
    pub harmonics: Option<usize>,
    /// Gauss points per element for regular interactions.
    #[arg(long)]
    pub quadrature: Option<usize>,
    /// Filter margin in the cutoff floor((n_lambda - 1 - epsilon) ka).
    #[arg(long)]
    pub epsilon: Option<f64>,
    /// Sweep operator spectral errors at q = floor(ka).
    #[arg(long)]
    pub spectral: bool,
    /// Output CSV path.
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Directory for gnuplot scripts.
    #[arg(long)]
    pub plots: Option<PathBuf>,
    /// Worker threads (default: all cores).
    #[arg(long)]
    pub threads: Option<usize>,
    /// Exit with status 3 if a slope check fails.
    #[arg(long)]
    pub check: bool,
}

fn parse_list<T: FromStr<Err = E>, E: std::fmt::Display>(what: &str, tags: &[String]) -> Result<Vec<T>, CliError> {
    tags.iter()
        .map(|t| t.parse::<T>().map_err(|e| CliError::Config(format!("{what} '{t}': {e}"))))
        .collect()
}

fn parse_one<T: FromStr<Err = E>, E: std::fmt::Display>(what: &str, tag: &str) -> Result<T, CliError> {
    tag.parse::<T>().map_err(|e| CliError::Config(format!("{what} '{tag}': {e}")))
}

impl SweepConfig {
    /// Defaults, then the file (if any), then command-line flags.
    pub fn resolve(args: &Args) -> Result<Self, CliError> {
        let file = match &args.config {
            Some(p) => FileConfig::load(p)?,
            None => FileConfig::default(),
        };
        let mut c = SweepConfig::default();
        c.apply_file(&file)?;
        c.apply_args(args)?;
        c.validate()?;
        Ok(c)
    }

    pub fn apply_file(&mut self, f: &FileConfig) -> Result<(), CliError> {
        macro_rules! take {
            ($($k:ident),*) => { $(if let Some(v) = f.$k.clone() { self.$k = v; })* };
        }
        take!(a, ka_start, ka_stop, points, n_lambda, harmonics, quadrature, epsilon, spectral);
        if let Some(s) = &f.spacing {
            self.spacing = parse_one("spacing", s)?;
        }
        if let Some(v) = &f.formulations {
            self.formulations = parse_list("formulation", v)?;
        }
        if let Some(v) = &f.norms {
            self.quantities = parse_list("norm", v)?;
        }
        if let Some(e) = &f.engine {
            self.engine = parse_one("engine", e)?;
        }
        if let Some(o) = &f.out {
            self.out = o.clone();
        }
        if f.plots.is_some() {
            self.plots = f.plots.clone();
        }
        if f.threads.is_some() {
            self.threads = f.threads;
        }
        Ok(())
    }

    pub fn apply_args(&mut self, a: &Args) -> Result<(), CliError> {
        macro_rules! take {
            ($($src:ident => $dst:ident),*) => { $(if let Some(v) = a.$src { self.$dst = v; })* };
        }
        take!(a => a, ka_start => ka_start, ka_stop => ka_stop, points => points, nlambda => n_lambda,
              harmonics => harmonics, quadrature => quadrature, epsilon => epsilon);
        if let Some(s) = &a.spacing {
            self.spacing = parse_one("spacing", s)?;
        }
        if !a.formulations.is_empty() {
            self.formulations = parse_list("formulation", &a.formulations)?;
        }
        if !a.norms.is_empty() {
            self.quantities = parse_list("norm", &a.norms)?;
        }
        if let Some(e) = &a.engine {
            self.engine = parse_one("engine", e)?;
        }
        self.spectral |= a.spectral;
        if let Some(o) = &a.out {
            self.out = o.clone();
        }
        if a.plots.is_some() {
            self.plots = a.plots.clone();
        }
        if a.threads.is_some() {
            self.threads = a.threads;
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |m: String| Err(CliError::Config(m));
        if !(self.a > 0.0 && self.a.is_finite()) {
            return bad(format!("radius must be positive, got {}", self.a));
        }
        if !(self.ka_start > 0.0 && self.ka_stop > self.ka_start && self.ka_stop.is_finite()) {
            return bad(format!("need 0 < ka_start < ka_stop, got [{}, {}]", self.ka_start, self.ka_stop));
        }
        if self.points < 2 {
            return bad(format!("need at least 2 points, got {}", self.points));
        }
        if !(self.n_lambda > 1.0 && self.n_lambda.is_finite()) {
            return bad(format!("n_lambda must exceed 1, got {}", self.n_lambda));
        }
        if !self.spectral && self.formulations.is_empty() {
            return bad("no formulation selected".into());
        }
        if !self.spectral && self.quantities.is_empty() {
            return bad("no norm selected".into());
        }
        if self.quadrature < 2 {
            return bad(format!("quadrature order must be at least 2, got {}", self.quadrature));
        }
        if !(self.epsilon > 0.0 && self.epsilon < self.n_lambda - 1.0) {
            return bad(format!("epsilon must lie in (0, n_lambda - 1), got {}", self.epsilon));
        }
        if self.threads == Some(0) {
            return bad("threads must be at least 1".into());
        }
        Ok(())
    }

    pub fn problem(&self, ka: f64) -> cylscat::Result<cylscat::ProblemConfig64> {
        let k = ka / self.a;
        let eta = 376.730_313_668;
        Ok(cylscat::ProblemConfig64::new(self.a, k, eta, self.n_lambda)?
            .with_harmonics(self.harmonics)
            .with_quadrature(self.quadrature)
            .with_epsilon(self.epsilon))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn args(v: &[&str]) -> Args {
        Args::parse_from(std::iter::once("cylscat").chain(v.iter().copied()))
    }

    #[test]
    fn flags_override_defaults() {
        let c = SweepConfig::resolve(&args(&["--ka-start", "5", "--ka-stop", "9", "--formulation", "te-efie", "--norm", "cond", "--norm", "L2"]))
            .unwrap();
        assert_eq!((c.ka_start, c.ka_stop), (5.0, 9.0));
        assert_eq!(c.formulations, vec![Formulation::TeEfie]);
        assert_eq!(c.quantities, vec![Quantity::Condition, Quantity::Error(Measure::L2)]);
        assert_eq!(c.points, 60);
    }

    #[test]
    fn file_then_flags() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("c.toml");
        std::fs::write(&p, "points = 7\nengine = \"both\"\nformulations = [\"TM-CCFIE\"]\nnorms = [\"S_L2\"]\n").unwrap();
        let c = SweepConfig::resolve(&args(&["--config", p.to_str().unwrap(), "--points", "9"])).unwrap();
        assert_eq!(c.points, 9);
        assert_eq!(c.engine, EngineChoice::Both);
        assert_eq!(c.formulations, vec![Formulation::TmCcfie]);
        assert_eq!(c.quantities, vec![Quantity::Error(Measure::ScatteringL2)]);
    }

    #[test]
    fn invalid_settings_are_config_errors() {
        for v in [
            vec!["--points", "1"],
            vec!["--ka-start", "0"],
            vec!["--ka-start", "10", "--ka-stop", "5"],
            vec!["--formulation", "XX-EFIE"],
            vec!["--norm", "H1"],
            vec!["--engine", "exact"],
            vec!["--spacing", "cubic"],
            vec!["--epsilon", "5"],
        ] {
            assert!(matches!(SweepConfig::resolve(&args(&v)), Err(CliError::Config(_))), "{v:?}");
        }
        let mut c = SweepConfig::default();
        c.formulations.clear();
        assert!(matches!(c.validate(), Err(CliError::Config(_))));
    }

    #[test]
    fn unknown_file_keys_are_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("c.toml");
        std::fs::write(&p, "pionts = 7\n").unwrap();
        assert!(matches!(SweepConfig::resolve(&args(&["--config", p.to_str().unwrap()])), Err(CliError::Config(_))));
    }
}
