//! Annual indicators and regularity statistics computed from month records.

mod stats;

pub use stats::{ols_slope, pearson, student_t_two_sided_p, Correlation, StatsError};

use serde::{Deserialize, Serialize};

use crate::engine::MonthRecord;

/// One year of aggregate indicators.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnnualIndicators {
    pub year: u32,
    pub nominal_gdp: f64,
    pub real_gdp: f64,
    pub mean_price: f64,
    pub mean_wage: f64,
    /// Undefined for the first year.
    pub inflation: Option<f64>,
    pub wage_inflation: Option<f64>,
    pub unemployment_mean: f64,
    pub nominal_gdp_growth: Option<f64>,
    pub real_gdp_growth: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IndicatorSeries {
    pub base_price: f64,
    pub annual: Vec<AnnualIndicators>,
    pub monthly: Vec<MonthRecord>,
}

fn growth(now: f64, before: f64) -> Option<f64> {
    (before != 0.0).then(|| (now - before) / before)
}

/// Year-1 mean price, the base for real GDP.
pub fn base_price(months: &[MonthRecord]) -> Result<f64, StatsError> {
    if months.len() < 12 {
        return Err(StatsError::InsufficientData { needed: 12, got: months.len() });
    }
    Ok(months[..12].iter().map(|m| m.price).sum::<f64>() / 12.0)
}

/// Aggregates complete years of month records; a trailing partial year is dropped.
pub fn annual_indicators(months: &[MonthRecord], base_price: f64) -> Result<IndicatorSeries, StatsError> {
    if months.len() < 12 {
        return Err(StatsError::InsufficientData { needed: 12, got: months.len() });
    }
    let mut annual: Vec<AnnualIndicators> = Vec::with_capacity(months.len() / 12);
    for (year, chunk) in months.chunks_exact(12).enumerate() {
        let nominal_gdp = chunk.iter().map(|m| m.production * m.price).sum();
        let real_gdp = chunk.iter().map(|m| m.production * base_price).sum();
        let mean_price = chunk.iter().map(|m| m.price).sum::<f64>() / 12.0;
        let mean_wage = chunk.iter().map(|m| m.mean_wage).sum::<f64>() / 12.0;
        let unemployment_mean = chunk.iter().map(|m| m.unemployment).sum::<f64>() / 12.0;
        let prev = annual.last();
        annual.push(AnnualIndicators {
            year: year as u32,
            nominal_gdp,
            real_gdp,
            mean_price,
            mean_wage,
            inflation: prev.and_then(|p| growth(mean_price, p.mean_price)),
            wage_inflation: prev.and_then(|p| growth(mean_wage, p.mean_wage)),
            unemployment_mean,
            nominal_gdp_growth: prev.and_then(|p| growth(nominal_gdp, p.nominal_gdp)),
            real_gdp_growth: prev.and_then(|p| growth(real_gdp, p.real_gdp)),
        });
    }
    Ok(IndicatorSeries { base_price, annual, monthly: months.to_vec() })
}

/// Correlation plus fitted slope for one regularity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Relation {
    pub x: String,
    pub y: String,
    pub n: usize,
    pub rho: f64,
    pub p_value: f64,
    pub slope: f64,
    pub intercept: f64,
}

impl Relation {
    fn fit(x: &str, y: &str, xs: &[f64], ys: &[f64]) -> Result<Self, StatsError> {
        let c = pearson(xs, ys)?;
        let slope = ols_slope(xs, ys)?;
        let mean = |v: &[f64]| v.iter().sum::<f64>() / v.len() as f64;
        Ok(Self {
            x: x.into(),
            y: y.into(),
            n: xs.len(),
            rho: c.rho,
            p_value: c.p_value,
            slope,
            intercept: mean(ys) - slope * mean(xs),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RegularityReport {
    /// States the sampling frequency the statistics were computed at.
    pub note: String,
    pub phillips: Relation,
    pub okun: Relation,
}

/// Annual points behind the regularity statistics; the first year has no
/// growth rates and is excluded.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RegularityPoints {
    pub unemployment: Vec<f64>,
    pub wage_inflation: Vec<f64>,
    pub unemployment_change: Vec<f64>,
    pub real_gdp_growth: Vec<f64>,
}

pub fn regularity_points(series: &IndicatorSeries) -> RegularityPoints {
    let mut pts = RegularityPoints::default();
    for pair in series.annual.windows(2) {
        let (prev, cur) = (&pair[0], &pair[1]);
        if let (Some(w), Some(r)) = (cur.wage_inflation, cur.real_gdp_growth) {
            pts.unemployment.push(cur.unemployment_mean);
            pts.wage_inflation.push(w);
            pts.unemployment_change.push(cur.unemployment_mean - prev.unemployment_mean);
            pts.real_gdp_growth.push(r);
        }
    }
    pts
}

/// Phillips (unemployment vs wage inflation) and Okun (change in unemployment
/// vs real GDP growth) relations over annual data.
pub fn regularity_report(series: &IndicatorSeries) -> Result<RegularityReport, StatsError> {
    let years = &series.annual;
    if years.len() < 6 {
        return Err(StatsError::InsufficientData { needed: 6, got: years.len() });
    }
    let RegularityPoints { unemployment: u, wage_inflation: wi, unemployment_change: du, real_gdp_growth: g } =
        regularity_points(series);
    Ok(RegularityReport {
        note: "annual frequency: yearly means of monthly unemployment, year-over-year growth of mean wage and real GDP"
            .into(),
        phillips: Relation::fit("unemployment", "wage_inflation", &u, &wi)?,
        okun: Relation::fit("unemployment_change", "real_gdp_growth", &du, &g)?,
    })
}
