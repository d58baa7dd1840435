use serde::{Deserialize, Serialize};

/// Aggregate state and flows for one simulated month. One row of `months.csv`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct MonthRecord {
    pub t: u32,
    /// Price at which this month's goods traded.
    pub price: f64,
    /// Annualized price change observed at the start of the month.
    pub inflation_proxy: f64,
    pub unemployment: f64,
    pub production: f64,
    pub demand: f64,
    /// Inventory carried into next month.
    pub inventory: f64,
    pub capital: f64,
    /// Annual rate applied to savings this month.
    pub interest_rate: f64,
    pub mean_esi: f64,
    pub mean_p_work: f64,
    pub mean_p_consume: f64,
    /// Mean hourly wage after this month's adjustment.
    pub mean_wage: f64,
    pub investment: f64,
    pub consumption: f64,
    pub imbalance: f64,
    pub gross_income: f64,
    pub tax_total: f64,
    pub post_tax_income: f64,
    pub spending: f64,
    pub savings_open: f64,
    pub savings_close: f64,
    /// (revenue − wage bill) / revenue of the aggregate production side.
    pub profit_margin: f64,
    pub fallbacks: u32,
    pub retrievals: u32,
}

/// Year-end view of one household. One row of `agents.csv`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgentSnapshot {
    pub year: u32,
    pub agent: usize,
    pub name: String,
    pub age: u32,
    pub occupation: String,
    pub hourly_wage: f64,
    pub savings: f64,
    pub employed: bool,
    pub months_worked: u32,
    pub annual_income: f64,
    /// Post-tax income including redistribution (no essential expenditures are modelled).
    pub disposable_income: f64,
    pub spending: f64,
    pub savings_rate: f64,
    pub esi: f64,
    pub p_work: f64,
    pub p_consume: f64,
}
