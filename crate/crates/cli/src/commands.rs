//! The `run`, `ablate`, `compare` and `report` commands.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::time::Instant;

use macrosim::backends::BackendKind;
use macrosim::engine::{AblationFlags, MonthRecord, RunConfig};
use macrosim::{RunResult, Simulation};
use serde::Serialize;

use crate::config::{self, LoadedConfig};
use crate::manifest::{config_hash, Manifest};
use crate::report::{self, Report};
use crate::store;
use crate::CliError;

/// Inputs shared by every command that starts simulations.
#[derive(Debug, Clone, Default)]
pub struct RunOptions {
    pub config: Option<PathBuf>,
    /// Replay the resolved configuration stored in an earlier manifest.
    pub manifest: Option<PathBuf>,
    pub seed: Option<u64>,
    pub agents: Option<usize>,
    /// Dotted-path overrides, `key=value`.
    pub set: Vec<String>,
    /// Output directory; a fresh directory under the store root otherwise.
    pub out: Option<PathBuf>,
    pub quiet: bool,
}

impl RunOptions {
    fn overrides(&self) -> Vec<String> {
        let mut all = self.set.clone();
        if let Some(seed) = self.seed {
            all.push(format!("seed={seed}"));
        }
        if let Some(n) = self.agents {
            all.push(format!("n_agents={n}"));
        }
        all
    }

    pub fn load(&self) -> Result<LoadedConfig, CliError> {
        let overrides = self.overrides();
        let Some(path) = &self.manifest else {
            return config::load(self.config.as_deref(), &overrides);
        };
        if self.config.is_some() {
            return Err(CliError::Config("--config and --manifest are mutually exclusive".into()));
        }
        let manifest = Manifest::read(path)?;
        let mut table = toml::Table::try_from(&manifest.config)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        for o in &overrides {
            config::apply_override(&mut table, o)?;
        }
        let overridden: Vec<&str> = overrides.iter().filter_map(|o| o.split_once('=')).map(|(k, _)| k.trim()).collect();
        let mut loaded = config::resolve(table)?;
        loaded.defaulted = manifest.defaulted.into_iter().filter(|p| !overridden.contains(&p.as_str())).collect();
        loaded.config.validate().map_err(CliError::Invalid)?;
        Ok(loaded)
    }

    fn target_dir(&self, config: &RunConfig) -> Result<PathBuf, CliError> {
        match &self.out {
            Some(dir) => {
                std::fs::create_dir_all(dir)?;
                Ok(dir.clone())
            }
            None => store::new_run_dir(Path::new(&config.output.root), &config_hash(config)),
        }
    }
}

fn year_line(label: &str, months: &[MonthRecord], prev_mean_price: Option<f64>) -> String {
    let n = months.len() as f64;
    let price = months.iter().map(|m| m.price).sum::<f64>() / n;
    let u = months.iter().map(|m| m.unemployment).sum::<f64>() / n;
    let output: f64 = months.iter().map(|m| m.production).sum();
    let esi = months.iter().map(|m| m.mean_esi).sum::<f64>() / n;
    let infl = prev_mean_price.map_or_else(|| "    n/a".to_owned(), |p| format!("{:+6.2}%", (price / p - 1.0) * 100.0));
    format!(
        "{label}year {:>3}  price {price:8.4}  inflation {infl}  unemployment {:5.2}%  output {output:12.1}  esi {esi:+.3}",
        months[0].t / 12,
        u * 100.0
    )
}

/// Runs one configuration month by month, printing a line per simulated year.
pub fn simulate(config: RunConfig, label: &str, quiet: bool) -> Result<(RunResult, f64), CliError> {
    let started = Instant::now();
    let mut sim = Simulation::new(config)?;
    let mut prev_price = None;
    while sim.market().month_index < sim.config().n_months {
        sim.step()?;
        let months = sim.months();
        if months.len() % 12 == 0 {
            let year = &months[months.len() - 12..];
            if !quiet {
                println!("{}", year_line(label, year, prev_price));
            }
            prev_price = Some(year.iter().map(|m| m.price).sum::<f64>() / 12.0);
        }
    }
    let result = sim.finish();
    Ok((result, started.elapsed().as_secs_f64()))
}

fn run_into(dir: &Path, config: RunConfig, defaulted: Vec<String>, label: &str, quiet: bool) -> Result<(RunResult, Report), CliError> {
    let (result, secs) = simulate(config, label, quiet)?;
    let manifest = Manifest::new(&result.config, defaulted, result.stats, secs);
    if result.stats.backend_fallbacks > 0 {
        log::warn!("{label}{} decisions fell back to the previous month", result.stats.backend_fallbacks);
    }
    let report = store::write_run(dir, &result, &manifest)?;
    Ok((result, report))
}

/// `run`: one simulation into a fresh run directory. Returns that directory.
pub fn cmd_run(opts: &RunOptions) -> Result<PathBuf, CliError> {
    let loaded = opts.load()?;
    for path in &loaded.defaulted {
        log::debug!("using default for {path}");
    }
    let dir = opts.target_dir(&loaded.config)?;
    let (_, report) = run_into(&dir, loaded.config, loaded.defaulted, "", opts.quiet)?;
    if !opts.quiet {
        if let Some(reg) = &report.regularity {
            println!(
                "Phillips rho {:+.3} (p = {:.4}, slope {:+.4}); Okun rho {:+.3} (p = {:.4}, slope {:+.4})",
                reg.phillips.rho, reg.phillips.p_value, reg.phillips.slope, reg.okun.rho, reg.okun.p_value, reg.okun.slope
            );
        }
        println!("wrote {}", dir.display());
    }
    Ok(dir)
}

fn mean_var(xs: impl Iterator<Item = f64> + Clone) -> (f64, f64) {
    let n = xs.clone().count() as f64;
    if n == 0.0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = xs.clone().sum::<f64>() / n;
    let var = xs.map(|x| (x - mean).powi(2)).sum::<f64>() / n;
    (mean, var)
}

#[derive(Debug, Serialize)]
struct AblationSummary<'a> {
    variant: &'a str,
    mean_unemployment: f64,
    unemployment_variance: f64,
    mean_annual_inflation: f64,
    annual_inflation_variance: f64,
    mean_esi: f64,
    total_investment: f64,
    retrieval_calls: u64,
}

/// `ablate`: the full model and four single-component removals, all on the
/// same seed. Writes one subdirectory per variant plus `ablation.csv` (monthly
/// unemployment per variant) and `ablation_summary.csv`.
pub fn cmd_ablate(opts: &RunOptions) -> Result<PathBuf, CliError> {
    let loaded = opts.load()?;
    let dir = opts.target_dir(&loaded.config)?;
    let variants = AblationFlags::variants();
    let mut columns = Vec::new();
    let mut summary = Vec::new();
    for (name, flags) in variants {
        let mut config = loaded.config.clone();
        config.ablation = flags;
        let label = format!("[{name}] ");
        let (result, report) = run_into(&dir.join(name), config, loaded.defaulted.clone(), &label, opts.quiet)?;
        let u = result.months.iter().map(|m| m.unemployment);
        let (mean_u, var_u) = mean_var(u.clone());
        let (mean_pi, var_pi) = mean_var(report.annual.iter().filter_map(|y| y.inflation));
        summary.push(AblationSummary {
            variant: name,
            mean_unemployment: mean_u,
            unemployment_variance: var_u,
            mean_annual_inflation: mean_pi,
            annual_inflation_variance: var_pi,
            mean_esi: result.months.iter().map(|m| m.mean_esi).sum::<f64>() / result.months.len() as f64,
            total_investment: result.months.iter().map(|m| m.investment).sum(),
            retrieval_calls: result.stats.retrieval_calls,
        });
        columns.push(u.collect::<Vec<_>>());
    }

    let mut w = csv::Writer::from_path(dir.join("ablation.csv"))?;
    let mut header = vec!["t".to_owned()];
    header.extend(variants.iter().map(|(n, _)| n.to_string()));
    w.write_record(&header)?;
    for t in 0..columns[0].len() {
        let mut row = vec![t.to_string()];
        row.extend(columns.iter().map(|c| c[t].to_string()));
        w.write_record(&row)?;
    }
    w.flush()?;
    store::write_csv(&dir.join("ablation_summary.csv"), &summary)?;
    if !opts.quiet {
        for s in &summary {
            println!(
                "{:<22} mean u {:6.3}%  var u {:.3e}  mean inflation {:+.3}%",
                s.variant,
                s.mean_unemployment * 100.0,
                s.unemployment_variance,
                s.mean_annual_inflation * 100.0
            );
        }
        println!("wrote {}", dir.display());
    }
    Ok(dir)
}

pub fn parse_backend(name: &str) -> Result<BackendKind, CliError> {
    let wanted = name.trim().to_ascii_lowercase().replace('_', "-");
    BackendKind::ALL.into_iter().find(|k| k.as_str() == wanted).ok_or_else(|| {
        let known: Vec<_> = BackendKind::ALL.iter().map(|k| k.as_str()).collect();
        CliError::Config(format!("unknown backend '{name}' (expected one of {})", known.join(", ")))
    })
}

#[derive(Debug, Serialize)]
struct CompareRow<'a> {
    backend: &'a str,
    year: u32,
    nominal_gdp: f64,
    real_gdp: f64,
    mean_price: f64,
    inflation: Option<f64>,
    wage_inflation: Option<f64>,
    unemployment: f64,
}

/// `compare`: the same configuration and seed under several backends.
pub fn cmd_compare(opts: &RunOptions, backends: &[BackendKind]) -> Result<PathBuf, CliError> {
    let distinct: std::collections::HashSet<_> = backends.iter().collect();
    if distinct.len() < 2 || distinct.len() != backends.len() {
        return Err(CliError::Config("compare needs at least two distinct backend kinds".into()));
    }
    let loaded = opts.load()?;
    let dir = opts.target_dir(&loaded.config)?;
    let mut rows = Vec::new();
    let mut reports = BTreeMap::new();
    for &kind in backends {
        let mut config = loaded.config.clone();
        config.backend.kind = kind;
        config.validate().map_err(CliError::Invalid)?;
        let label = format!("[{kind}] ");
        let (_, report) = run_into(&dir.join(kind.as_str()), config, loaded.defaulted.clone(), &label, opts.quiet)?;
        rows.extend(report.annual.iter().map(|y| CompareRow {
            backend: kind.as_str(),
            year: y.year,
            nominal_gdp: y.nominal_gdp,
            real_gdp: y.real_gdp,
            mean_price: y.mean_price,
            inflation: y.inflation,
            wage_inflation: y.wage_inflation,
            unemployment: y.unemployment_mean,
        }));
        reports.insert(kind.as_str(), report);
    }
    store::write_csv(&dir.join("compare.csv"), &rows)?;
    store::write_json(&dir.join("compare.json"), &reports)?;
    if !opts.quiet {
        for (name, r) in &reports {
            match &r.regularity {
                Some(reg) => println!(
                    "{name:<24} Phillips rho {:+.3} (p = {:.4})  Okun rho {:+.3} (p = {:.4})",
                    reg.phillips.rho, reg.phillips.p_value, reg.okun.rho, reg.okun.p_value
                ),
                None => println!("{name:<24} no regularity statistics: {}", r.regularity_error.as_deref().unwrap_or("")),
            }
        }
        println!("wrote {}", dir.display());
    }
    Ok(dir)
}

/// `report`: recomputes report.json (and charts) from a months.csv alone.
pub fn cmd_report(months_csv: &Path, out: Option<&Path>, charts: bool) -> Result<PathBuf, CliError> {
    let months = report::read_months(months_csv)?;
    let dir = match out {
        Some(d) => d.to_path_buf(),
        None => months_csv.parent().map(Path::to_path_buf).unwrap_or_default(),
    };
    std::fs::create_dir_all(&dir)?;
    let report = report::build_report(&months)?;
    let path = dir.join("report.json");
    store::write_json(&path, &report)?;
    if charts {
        report::write_charts(&dir, &months, &report)?;
    }
    Ok(path)
}
