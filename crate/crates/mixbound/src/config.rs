//! Run configuration from a JSON file and command-line flags; flags win.

use std::fs;
use std::path::{Path, PathBuf};

use mixbound_core::oracle::Metric;
use mixbound_core::suite::Mutation;
use mixbound_core::{CongestionKernel, Decay};
use serde::Deserialize;

use crate::error::{CliError, CliResult};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

/// Every option a command may read. Absent fields take per-command defaults.
#[derive(Clone, Debug, Default, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct RunConfig {
    pub command: Option<String>,
    pub input: Option<PathBuf>,
    pub output: Option<PathBuf>,
    pub format: Option<Format>,
    pub eps: Option<Vec<f64>>,
    pub metrics: Option<Vec<String>>,
    pub kernels: Option<Vec<String>>,
    /// Largest `n` searched by the exact mixing-time oracle.
    pub n_max: Option<usize>,
    pub seed: Option<u64>,
    pub samples: Option<u64>,
    /// Comparison tolerance applied to loaded chains.
    pub tol: Option<f64>,
    pub threads: Option<usize>,
    /// Evolving-set steps for `simulate`.
    pub steps: Option<usize>,
    /// Start set for `simulate`, as state indices.
    pub start: Option<Vec<usize>>,
    /// Decay function averaged by `simulate`.
    pub functional: Option<String>,
    /// `doob` (default) or `plain`: which set walk `evolve` expands.
    pub process: Option<String>,
    /// Random chains added to the `verify` suite.
    pub random: Option<usize>,
    pub mutate: Option<String>,
}

macro_rules! overlay {
    ($base:ident, $top:ident; $($f:ident),*) => {
        $(if $top.$f.is_some() { $base.$f = $top.$f; })*
    };
}

impl RunConfig {
    pub fn from_file(path: &Path) -> CliResult<Self> {
        let text =
            fs::read_to_string(path).map_err(|e| CliError::input(format!("cannot read {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::input(format!("bad config {}: {e}", path.display())))
    }

    /// `self` with every field set in `flags` replaced.
    pub fn overlay(mut self, flags: RunConfig) -> Self {
        overlay!(self, flags; command, input, output, format, eps, metrics, kernels, n_max, seed, samples, tol,
            threads, steps, start, functional, process, random, mutate);
        self
    }

    /// Rejects values no command can use.
    pub fn validate(&self, command: &str) -> CliResult<()> {
        if let Some(c) = &self.command {
            if c != command {
                return Err(CliError::input(format!("config is for \"{c}\", not \"{command}\"")));
            }
        }
        if let Some(eps) = &self.eps {
            if eps.is_empty() || eps.iter().any(|e| !(e.is_finite() && *e > 0.0)) {
                return Err(CliError::input("eps values must be positive and finite"));
            }
        }
        self.metric_list()?;
        self.kernel_list()?;
        self.decay()?;
        self.mutation()?;
        self.doob()?;
        if let Some(t) = self.tol {
            if !(t.is_finite() && t > 0.0 && t < 1e-3) {
                return Err(CliError::input("tol must lie in (0, 1e-3)"));
            }
        }
        if self.samples == Some(0) {
            return Err(CliError::input("samples must be at least 1"));
        }
        if self.threads == Some(0) {
            return Err(CliError::input("threads must be at least 1"));
        }
        Ok(())
    }

    pub fn eps_list(&self) -> Vec<f64> {
        self.eps.clone().unwrap_or_else(|| vec![0.25, 0.05])
    }

    pub fn metric_list(&self) -> CliResult<Vec<Metric>> {
        match &self.metrics {
            None => Ok(vec![Metric::TotalVariation, Metric::RelativeEntropy, Metric::L2, Metric::Hellinger]),
            Some(names) => names
                .iter()
                .map(|n| Metric::from_name(n).ok_or_else(|| CliError::input(format!("unknown metric \"{n}\""))))
                .collect(),
        }
    }

    pub fn kernel_list(&self) -> CliResult<Vec<CongestionKernel>> {
        let default = ["variance", "entropy", "sqrt-variance", "sqrt"];
        let names: Vec<String> =
            self.kernels.clone().unwrap_or_else(|| default.iter().map(|s| s.to_string()).collect());
        names
            .iter()
            .map(|n| CongestionKernel::by_name(n).ok_or_else(|| CliError::input(format!("unknown kernel \"{n}\""))))
            .collect()
    }

    pub fn decay(&self) -> CliResult<Decay> {
        match self.functional.as_deref() {
            None | Some("l2") => Ok(Decay::L2),
            Some("tv") => Ok(Decay::TotalVariation),
            Some("entropy") => Ok(Decay::RelativeEntropy),
            Some("hellinger") => Ok(Decay::Hellinger),
            Some(other) => Err(CliError::input(format!("unknown functional \"{other}\""))),
        }
    }

    pub fn mutation(&self) -> CliResult<Option<Mutation>> {
        match self.mutate.as_deref() {
            None => Ok(None),
            Some("flip-sandwich-sign") => Ok(Some(Mutation::FlipSandwichSign)),
            Some(other) => Err(CliError::input(format!("unknown mutation \"{other}\""))),
        }
    }

    /// Whether `evolve` uses the Doob transform.
    pub fn doob(&self) -> CliResult<bool> {
        match self.process.as_deref() {
            None | Some("doob") => Ok(true),
            Some("plain") => Ok(false),
            Some(other) => Err(CliError::input(format!("unknown process \"{other}\" (doob or plain)"))),
        }
    }

    pub fn format(&self) -> Format {
        self.format.unwrap_or_else(|| match self.output.as_ref().and_then(|p| p.extension()) {
            Some(ext) if ext == "csv" => Format::Csv,
            _ => Format::Json,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unknown_keys_are_rejected() {
        let r: Result<RunConfig, _> = serde_json::from_str(r#"{"eps": [0.1], "epsilon": 0.2}"#);
        assert!(r.is_err());
    }

    #[test]
    fn flags_win() {
        let file: RunConfig = serde_json::from_str(r#"{"eps": [0.1], "seed": 5, "n-max": 100}"#).unwrap();
        let flags = RunConfig { seed: Some(9), ..Default::default() };
        let merged = file.overlay(flags);
        assert_eq!(merged.seed, Some(9));
        assert_eq!(merged.eps, Some(vec![0.1]));
        assert_eq!(merged.n_max, Some(100));
    }

    #[test]
    fn validation() {
        let ok = RunConfig { eps: Some(vec![0.1]), metrics: Some(vec!["tv".into()]), ..Default::default() };
        assert!(ok.validate("bound").is_ok());
        let bad = RunConfig { eps: Some(vec![0.0]), ..Default::default() };
        assert!(bad.validate("bound").is_err());
        let bad = RunConfig { metrics: Some(vec!["cosine".into()]), ..Default::default() };
        assert!(bad.validate("bound").is_err());
        let wrong = RunConfig { command: Some("profile".into()), ..Default::default() };
        assert!(wrong.validate("bound").is_err());
    }

    #[test]
    fn format_from_extension() {
        let c = RunConfig { output: Some("x.csv".into()), ..Default::default() };
        assert_eq!(c.format(), Format::Csv);
        assert_eq!(RunConfig::default().format(), Format::Json);
    }
}
