use serde::{Deserialize, Serialize};

use super::MarketError;
use crate::engine::ConfigIssue;

/// `(lower bound of annual income, marginal rate)`; serialized as a two-element array.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TaxBracket(pub f64, pub f64);

impl TaxBracket {
    pub fn lower(&self) -> f64 {
        self.0
    }
    pub fn rate(&self) -> f64 {
        self.1
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Redistribution {
    #[default]
    EqualLumpSum,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TaxSchedule {
    pub brackets: Vec<TaxBracket>,
    pub redistribution: Redistribution,
}

impl Default for TaxSchedule {
    /// 2018 U.S. federal single-filer brackets.
    fn default() -> Self {
        Self {
            brackets: vec![
                TaxBracket(0.0, 0.10),
                TaxBracket(9_525.0, 0.12),
                TaxBracket(38_700.0, 0.22),
                TaxBracket(82_500.0, 0.24),
                TaxBracket(157_500.0, 0.32),
                TaxBracket(200_000.0, 0.35),
                TaxBracket(500_000.0, 0.37),
            ],
            redistribution: Redistribution::EqualLumpSum,
        }
    }
}

impl TaxSchedule {
    pub fn flat(rate: f64) -> Self {
        Self { brackets: vec![TaxBracket(0.0, rate)], redistribution: Redistribution::EqualLumpSum }
    }

    pub fn check(&self, prefix: &str, out: &mut Vec<ConfigIssue>) {
        match self.brackets.first() {
            None => out.push(ConfigIssue::new(format!("{prefix}.brackets"), "at least one bracket is required")),
            Some(b) if b.lower() != 0.0 => {
                out.push(ConfigIssue::new(format!("{prefix}.brackets[0]"), "first lower bound must be 0"))
            }
            _ => {}
        }
        for (i, b) in self.brackets.iter().enumerate() {
            if !(b.rate().is_finite() && (0.0..1.0).contains(&b.rate())) {
                out.push(ConfigIssue::new(format!("{prefix}.brackets[{i}]"), "rate must be in [0, 1)"));
            }
            if !b.lower().is_finite() {
                out.push(ConfigIssue::new(format!("{prefix}.brackets[{i}]"), "lower bound must be finite"));
            }
            if i > 0 && b.lower() <= self.brackets[i - 1].lower() {
                out.push(ConfigIssue::new(
                    format!("{prefix}.brackets[{i}]"),
                    "lower bounds must be strictly increasing",
                ));
            }
        }
    }
}

/// Marginal-bracket tax on an annual income.
pub fn annual_tax(income: f64, schedule: &TaxSchedule) -> f64 {
    let b = &schedule.brackets;
    let mut tax = 0.0;
    for (i, bracket) in b.iter().enumerate() {
        if income <= bracket.lower() {
            break;
        }
        let upper = b.get(i + 1).map_or(f64::INFINITY, |n| n.lower());
        tax += (income.min(upper) - bracket.lower()) * bracket.rate();
    }
    tax
}

/// Tax on a monthly income, assessed on the annualized amount.
pub fn monthly_tax(income: f64, schedule: &TaxSchedule) -> f64 {
    annual_tax(income * 12.0, schedule) / 12.0
}

#[derive(Debug, Clone, PartialEq)]
pub struct TaxOutcome {
    pub post_tax: Vec<f64>,
    pub taxes: Vec<f64>,
    pub lump_sum: f64,
}

impl TaxOutcome {
    pub fn total_tax(&self) -> f64 {
        self.taxes.iter().sum()
    }
}

/// Taxes monthly incomes and hands the revenue back as an equal lump sum.
pub fn apply_taxes(incomes: &[f64], schedule: &TaxSchedule) -> Result<TaxOutcome, MarketError> {
    if incomes.is_empty() {
        return Err(MarketError::InvalidArgument("no incomes to tax".into()));
    }
    if let Some(bad) = incomes.iter().find(|z| !(z.is_finite() && **z >= 0.0)) {
        return Err(MarketError::InvalidArgument(format!("income must be finite and >= 0, got {bad}")));
    }
    let taxes: Vec<f64> = incomes.iter().map(|&z| monthly_tax(z, schedule)).collect();
    let lump_sum = match schedule.redistribution {
        Redistribution::EqualLumpSum => taxes.iter().sum::<f64>() / incomes.len() as f64,
    };
    let post_tax = incomes.iter().zip(&taxes).map(|(z, t)| z - t + lump_sum).collect();
    Ok(TaxOutcome { post_tax, taxes, lump_sum })
}
