//! report.json and the figures derived from a month series.

use std::path::Path;

use macrosim::engine::MonthRecord;
use macrosim::metrics::{
    annual_indicators, base_price, regularity_points, regularity_report, AnnualIndicators, RegularityReport,
};
use serde::{Deserialize, Serialize};

use crate::charts;
use crate::CliError;

pub const REPORT_NOTES: &[&str] = &[
    "annual price and wage are unweighted means of the monthly values",
    "base price P0 is the mean price of the first simulated year; real GDP uses P0",
    "Phillips and Okun statistics use annual data; the first year has no growth rates and is excluded",
    "p-values are two-sided t-tests with n-2 degrees of freedom",
];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub notes: Vec<String>,
    pub months: usize,
    pub base_price: f64,
    pub annual: Vec<AnnualIndicators>,
    /// Absent when the run is too short or a series has zero variance.
    pub regularity: Option<RegularityReport>,
    pub regularity_error: Option<String>,
}

pub fn build_report(months: &[MonthRecord]) -> Result<Report, CliError> {
    let p0 = base_price(months).map_err(|e| CliError::Runtime(format!("cannot build report: {e}")))?;
    let series = annual_indicators(months, p0).map_err(|e| CliError::Runtime(format!("cannot build report: {e}")))?;
    let (regularity, regularity_error) = match regularity_report(&series) {
        Ok(r) => (Some(r), None),
        Err(e) => (None, Some(e.to_string())),
    };
    Ok(Report {
        notes: REPORT_NOTES.iter().map(|s| s.to_string()).collect(),
        months: months.len(),
        base_price: p0,
        annual: series.annual.clone(),
        regularity,
        regularity_error,
    })
}

/// Writes monthly.svg and indicators.svg, plus phillips.svg and okun.svg when
/// the regularity statistics exist.
pub fn write_charts(dir: &Path, months: &[MonthRecord], report: &Report) -> Result<(), CliError> {
    let t: Vec<f64> = months.iter().map(|m| f64::from(m.t)).collect();
    let monthly = charts::line_panels(
        "month",
        &t,
        &[
            ("price P", months.iter().map(|m| m.price).collect()),
            ("unemployment rate", months.iter().map(|m| m.unemployment).collect()),
            ("production S", months.iter().map(|m| m.production).collect()),
            ("mean ESI", months.iter().map(|m| m.mean_esi).collect()),
            ("interest rate r", months.iter().map(|m| m.interest_rate).collect()),
        ],
    );
    std::fs::write(dir.join("monthly.svg"), monthly)?;

    let years: Vec<f64> = report.annual.iter().map(|y| f64::from(y.year)).collect();
    let opt = |f: fn(&AnnualIndicators) -> Option<f64>| report.annual.iter().map(|y| f(y).unwrap_or(f64::NAN)).collect();
    let annual = charts::line_panels(
        "year",
        &years,
        &[
            ("nominal GDP", report.annual.iter().map(|y| y.nominal_gdp).collect()),
            ("real GDP", report.annual.iter().map(|y| y.real_gdp).collect()),
            ("inflation", opt(|y| y.inflation)),
            ("wage inflation", opt(|y| y.wage_inflation)),
            ("unemployment", report.annual.iter().map(|y| y.unemployment_mean).collect()),
        ],
    );
    std::fs::write(dir.join("indicators.svg"), annual)?;

    if let Some(reg) = &report.regularity {
        let series = annual_indicators(months, report.base_price)
            .map_err(|e| CliError::Runtime(format!("cannot draw charts: {e}")))?;
        let pts = regularity_points(&series);
        let title = |name: &str, rho: f64, p: f64| format!("{name}: rho = {rho:.3}, p = {p:.4}");
        std::fs::write(
            dir.join("phillips.svg"),
            charts::scatter_with_fit(
                &title("Phillips curve (wage inflation vs unemployment)", reg.phillips.rho, reg.phillips.p_value),
                "annual unemployment rate",
                &pts.unemployment,
                &pts.wage_inflation,
                reg.phillips.slope,
                reg.phillips.intercept,
            ),
        )?;
        std::fs::write(
            dir.join("okun.svg"),
            charts::scatter_with_fit(
                &title("Okun's law (real GDP growth vs change in unemployment)", reg.okun.rho, reg.okun.p_value),
                "change in annual unemployment rate",
                &pts.unemployment_change,
                &pts.real_gdp_growth,
                reg.okun.slope,
                reg.okun.intercept,
            ),
        )?;
    }
    Ok(())
}

/// Reads a months.csv written by `run`.
pub fn read_months(path: &Path) -> Result<Vec<MonthRecord>, CliError> {
    let mut reader =
        csv::Reader::from_path(path).map_err(|e| CliError::Config(format!("cannot read {}: {e}", path.display())))?;
    reader
        .deserialize()
        .collect::<Result<Vec<MonthRecord>, _>>()
        .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn months(n: u32) -> Vec<MonthRecord> {
        (0..n)
            .map(|t| MonthRecord {
                t,
                price: 1.0 + 0.01 * f64::from(t),
                unemployment: 0.05 + 0.02 * (f64::from(t) / 7.0).sin(),
                production: 100.0 + f64::from(t % 13),
                mean_wage: 10.0 + 0.05 * f64::from(t) + (f64::from(t) / 5.0).cos(),
                ..Default::default()
            })
            .collect()
    }

    #[test]
    fn short_runs_report_why_statistics_are_missing() {
        let r = build_report(&months(36)).unwrap();
        assert_eq!(r.annual.len(), 3);
        assert!(r.regularity.is_none());
        assert!(r.regularity_error.is_some());
        assert!(matches!(build_report(&months(6)), Err(CliError::Runtime(_))));
    }

    #[test]
    fn charts_are_written_when_statistics_exist() {
        let m = months(120);
        let r = build_report(&m).unwrap();
        assert!(r.regularity.is_some(), "{:?}", r.regularity_error);
        let dir = tempfile::tempdir().unwrap();
        write_charts(dir.path(), &m, &r).unwrap();
        for f in ["monthly.svg", "indicators.svg", "phillips.svg", "okun.svg"] {
            assert!(dir.path().join(f).is_file(), "{f}");
        }
    }
}
