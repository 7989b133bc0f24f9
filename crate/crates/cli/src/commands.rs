//! Subcommand bodies. Each returns the path it wrote or the text it printed.

use crate::config::{Format, WorkbenchConfig};
use crate::error::{CliError, CliResult};
use crate::output::{output_path, write_file, Table};
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};
use tmss_core::{
    fit_source, qcrb_coherent, qcrb_distributed, qcrb_ultimate, snr_ramp_simulate, DEConfig, FilterModel, FitConfig,
    FitResult, MeasurementPlan, NoiseMeasurement, ProbeChain, RampProfile,
};

pub const BOUNDS_COLUMNS: [&str; 6] = ["T", "btmss_closed", "btmss_numeric", "coherent", "ultimate_ideal", "ultimate_lossy"];

pub const SIMULATE_COLUMNS: [&str; 6] =
    ["T", "simulated_var_n", "analytic_var_n", "btmss_numeric", "ratio", "samples_per_bin"];

pub const MIN_TRIALS: usize = 100;

/// Bound curves `Var(T) · n_r` over the grid.
pub fn bounds_table(cfg: &WorkbenchConfig) -> CliResult<Table> {
    let params = cfg.source();
    let budget = cfg.budget()?;
    let chain = ProbeChain::new(&params, &budget)?;
    let n = cfg.n_r;
    let mut table = Table::new("bounds", cfg, &BOUNDS_COLUMNS);
    for &t in &cfg.t_grid {
        table.push(vec![
            t,
            qcrb_distributed(t, n, &params, &budget)?.var_n(),
            chain.qcrb(t, n)?.var_n(),
            qcrb_coherent(t, n, budget.eta_p)?.var_n(),
            qcrb_ultimate(t, n, &budget, true)?.var_n(),
            qcrb_ultimate(t, n, &budget, false)?.var_n(),
        ])?;
    }
    Ok(table)
}

/// One SNR ramp per grid point; point `i` is seeded with `seed + i`.
pub fn simulate_table(cfg: &WorkbenchConfig) -> CliResult<Table> {
    if cfg.trials < MIN_TRIALS {
        return Err(CliError::Schema(format!("trials = {} must be >= {MIN_TRIALS}", cfg.trials)));
    }
    let chain = ProbeChain::new(&cfg.source(), &cfg.budget()?)?;
    let filter = cfg.filter_model()?;
    let mut table = Table::new("simulate", cfg, &SIMULATE_COLUMNS);
    for (i, &t) in cfg.t_grid.iter().enumerate() {
        let plan = MeasurementPlan {
            estimator_gain: None,
            modulation_freq: cfg.modulation_freq,
            ramp_duration: cfg.ramp_duration,
            filter,
            trials: cfg.trials,
            samples_per_bin: None,
            rng_seed: cfg.seed.wrapping_add(i as u64),
        };
        let profile = RampProfile::from_chain(&chain, t, &plan, cfg.n_r)?;
        let ramp = snr_ramp_simulate(&plan, &profile)?;
        let simulated = ramp.delta_t_at_snr1.powi(2) * cfg.n_r;
        let analytic = profile.noise_variance * cfg.n_r;
        table.push(vec![
            t,
            simulated,
            analytic,
            chain.qcrb(t, cfg.n_r)?.var_n(),
            simulated / analytic,
            ramp.samples_per_bin as f64,
        ])?;
    }
    Ok(table)
}

pub fn write_table(table: &Table, out: Option<&Path>, format: Format) -> CliResult<PathBuf> {
    let path = output_path(out, &table.config, &table.command, format);
    write_file(&path, &table.render(format))?;
    Ok(path)
}

/// Input of `fit`: detected noises with their transmissions.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseFile {
    pub measurements: Vec<NoiseMeasurement>,
}

impl NoiseFile {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| CliError::Schema(format!("{}: {e}", path.display())))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitOutput {
    pub command: String,
    pub config: WorkbenchConfig,
    pub measurements: Vec<NoiseMeasurement>,
    pub result: FitResult,
}

pub fn fit_config(cfg: &WorkbenchConfig) -> FitConfig {
    let mut de = DEConfig::source_fit(cfg.seed);
    de.population = cfg.fit_population;
    de.max_generations = cfg.fit_max_generations;
    FitConfig::new(de)
}

pub fn run_fit(cfg: &WorkbenchConfig, noises: &NoiseFile) -> CliResult<FitOutput> {
    let result = fit_source(&noises.measurements, &fit_config(cfg))?;
    Ok(FitOutput { command: "fit".into(), config: cfg.clone(), measurements: noises.measurements.clone(), result })
}

/// Always JSON.
pub fn write_fit(fit: &FitOutput, out: Option<&Path>) -> CliResult<PathBuf> {
    let path = output_path(out, &fit.config, "fit", Format::Json);
    write_file(&path, &(serde_json::to_string_pretty(fit).expect("fit serializes") + "\n"))?;
    Ok(path)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SaTimeReport {
    pub kind: tmss_core::FilterKind,
    pub rbw: f64,
    pub t: f64,
    pub t_rbw: f64,
}

pub fn sa_time(filter: &FilterModel) -> CliResult<SaTimeReport> {
    let t = filter.effective_time()?;
    Ok(SaTimeReport { kind: filter.kind, rbw: filter.rbw, t, t_rbw: t * filter.rbw })
}

impl SaTimeReport {
    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Json => serde_json::to_string_pretty(self).expect("report serializes") + "\n",
            Format::Csv => format!("kind = {}\nrbw = {}\nt = {:e}\nt_rbw = {}\n", self.kind, self.rbw, self.t, self.t_rbw),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn experimental_bounds_table() {
        let t = bounds_table(&WorkbenchConfig::default()).unwrap();
        assert_eq!(t.rows.len(), 16);
        for row in &t.rows {
            assert!((row[1] / row[2] - 1.0).abs() < 1e-6);
            assert!(row[5] <= row[1] && row[1] <= row[3]);
        }
    }

    #[test]
    fn too_few_trials() {
        let cfg = WorkbenchConfig { trials: 99, ..Default::default() };
        assert_eq!(simulate_table(&cfg).unwrap_err().exit_code(), 3);
    }

    #[test]
    fn sa_time_gaussian() {
        let r = sa_time(&FilterModel::gaussian(51e3).unwrap()).unwrap();
        assert!((r.t_rbw - 0.4697).abs() < 1e-3);
    }
}
