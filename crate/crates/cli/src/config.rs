//! Flat TOML workbench configuration.

use crate::error::{CliError, CliResult};
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};
use tmss_core::{FilterKind, FilterModel, LossBudget64, SourceParams64};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl Format {
    pub fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

/// Every key is optional; missing keys take the reference-experiment values.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct WorkbenchConfig {
    pub s: f64,
    pub t_a: f64,
    pub seed_photons: f64,
    pub t_p: f64,
    pub eta_p: f64,
    pub eta_c: f64,
    /// Probing photons per measurement, counted at the system input.
    pub n_r: f64,
    pub filter: FilterKind,
    /// Resolution bandwidth (Hz).
    pub rbw: f64,
    pub t_grid: Vec<f64>,
    /// Master seed. Grid point `i` of `simulate` uses `seed + i`.
    pub seed: u64,
    pub trials: usize,
    pub modulation_freq: f64,
    pub ramp_duration: f64,
    pub fit_population: usize,
    pub fit_max_generations: usize,
    pub output_dir: PathBuf,
    pub format: Format,
}

/// 0.10, 0.15, ..., 0.85.
pub fn default_t_grid() -> Vec<f64> {
    (0..16).map(|k| (10 + 5 * k) as f64 / 100.0).collect()
}

impl Default for WorkbenchConfig {
    fn default() -> Self {
        let p = SourceParams64::experimental();
        let b = LossBudget64::experimental();
        Self {
            s: p.s,
            t_a: p.t_a,
            seed_photons: p.seed_photons,
            t_p: b.t_p,
            eta_p: b.eta_p,
            eta_c: b.eta_c,
            n_r: 2.8e9,
            filter: FilterKind::SyncTuned { poles: 4 },
            rbw: 51e3,
            t_grid: default_t_grid(),
            seed: 0,
            trials: 10_000,
            modulation_freq: 1.5e6,
            ramp_duration: 1.0,
            fit_population: 500,
            fit_max_generations: 2000,
            output_dir: PathBuf::from("out"),
            format: Format::Csv,
        }
    }
}

impl WorkbenchConfig {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::parse(&text)
    }

    pub fn parse(text: &str) -> CliResult<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| CliError::Schema(format!("config: {e}")))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> CliResult<()> {
        if self.t_grid.is_empty() {
            return Err(CliError::Schema("t_grid must not be empty".into()));
        }
        if let Some(t) = self.t_grid.iter().find(|t| !(**t > 0.0 && **t <= 1.0)) {
            return Err(CliError::Schema(format!("t_grid entry {t} outside (0, 1]")));
        }
        if self.t_grid.windows(2).any(|w| w[1] <= w[0]) {
            return Err(CliError::Schema("t_grid must be strictly increasing".into()));
        }
        if !(self.n_r > 0.0) || !self.n_r.is_finite() {
            return Err(CliError::Schema(format!("n_r = {} must be finite and > 0", self.n_r)));
        }
        Ok(())
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    pub fn source(&self) -> SourceParams64 {
        SourceParams64::new(self.s, self.t_a).with_seed_photons(self.seed_photons)
    }

    pub fn budget(&self) -> CliResult<LossBudget64> {
        Ok(LossBudget64::new(self.t_p, self.eta_p, self.eta_c)?)
    }

    pub fn filter_model(&self) -> CliResult<FilterModel> {
        Ok(FilterModel::new(self.filter, self.rbw)?)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_grid() {
        let g = default_t_grid();
        assert_eq!(g.len(), 16);
        assert_eq!(g[0], 0.1);
        assert_eq!(g[15], 0.85);
    }

    #[test]
    fn toml_round_trip() {
        let c = WorkbenchConfig { s: 1.25, filter: FilterKind::Gaussian, ..Default::default() };
        assert_eq!(WorkbenchConfig::parse(&c.to_toml()).unwrap(), c);
    }

    #[test]
    fn partial_file_fills_defaults() {
        let c = WorkbenchConfig::parse("s = 0.0\nformat = \"json\"\n").unwrap();
        assert_eq!(c.s, 0.0);
        assert_eq!(c.format, Format::Json);
        assert_eq!(c.t_a, WorkbenchConfig::default().t_a);
    }

    #[test]
    fn rejects_bad_input() {
        for text in ["sq = 1.0", "t_grid = [0.5, 0.4]", "t_grid = [0.0, 0.4]", "n_r = 0.0", "filter = \"box\""] {
            assert!(matches!(WorkbenchConfig::parse(text), Err(CliError::Schema(_))), "{text}");
        }
    }
}
