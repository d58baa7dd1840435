use serde::{Deserialize, Serialize};

use super::scenario::ScenarioEvent;
use crate::backends::BackendConfig;
use crate::cognition::{SentimentParams, DEFAULT_DIM};
use crate::market::{AdjustmentParams, ProductionParams, TaxSchedule, TaylorParams};

/// One validation failure, addressed by its dotted config path.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ConfigIssue {
    pub path: String,
    pub message: String,
}

impl ConfigIssue {
    pub fn new(path: impl Into<String>, message: impl Into<String>) -> Self {
        Self { path: path.into(), message: message.into() }
    }
}

impl std::fmt::Display for ConfigIssue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {}", self.path, self.message)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PopulationParams {
    /// Pareto scale of initial hourly wages.
    pub wage_scale: f64,
    /// Pareto shape of initial hourly wages.
    pub wage_shape: f64,
    /// Initial savings as a multiple of the first month's income.
    pub initial_savings_months: f64,
}

impl Default for PopulationParams {
    fn default() -> Self {
        Self { wage_scale: 7.25, wage_shape: 2.0, initial_savings_months: 2.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MarketParams {
    pub initial_capital: f64,
    pub production: ProductionParams,
    pub adjustment: AdjustmentParams,
    pub tax: TaxSchedule,
    pub taylor: TaylorParams,
}

impl Default for MarketParams {
    fn default() -> Self {
        Self {
            initial_capital: 1000.0,
            production: ProductionParams::default(),
            adjustment: AdjustmentParams::default(),
            tax: TaxSchedule::default(),
            taylor: TaylorParams::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CognitionParams {
    pub sentiment: SentimentParams,
    pub memory_capacity: usize,
    pub short_term_months: usize,
    pub retrieval_k: usize,
    pub embedding_dim: usize,
    pub persona_update_months: u32,
    /// Households observe unemployment as the mean of this many trailing months.
    pub unemployment_window: usize,
}

impl Default for CognitionParams {
    fn default() -> Self {
        Self {
            sentiment: SentimentParams::default(),
            memory_capacity: 60,
            short_term_months: 3,
            retrieval_k: 5,
            embedding_dim: DEFAULT_DIM,
            persona_update_months: 12,
            unemployment_window: 3,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AblationFlags {
    pub no_history_memory: bool,
    pub no_sentiment_index: bool,
    pub no_belief_factor: bool,
    pub no_investment_impact: bool,
}

impl AblationFlags {
    /// The full model followed by one variant per removed component.
    pub fn variants() -> [(&'static str, AblationFlags); 5] {
        let none = AblationFlags::default();
        [
            ("full", none),
            ("no_history_memory", AblationFlags { no_history_memory: true, ..none }),
            ("no_sentiment_index", AblationFlags { no_sentiment_index: true, ..none }),
            ("no_belief_factor", AblationFlags { no_belief_factor: true, ..none }),
            ("no_investment_impact", AblationFlags { no_investment_impact: true, ..none }),
        ]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct OutputParams {
    /// Root of the run store.
    pub root: String,
    pub charts: bool,
    pub memory_dump: bool,
}

impl Default for OutputParams {
    fn default() -> Self {
        Self { root: "runs".into(), charts: true, memory_dump: true }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub n_agents: usize,
    pub n_months: u32,
    pub seed: u64,
    pub population: PopulationParams,
    pub market: MarketParams,
    pub cognition: CognitionParams,
    pub backend: BackendConfig,
    pub ablation: AblationFlags,
    pub scenario: Vec<ScenarioEvent>,
    pub output: OutputParams,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            n_agents: 100,
            n_months: 240,
            seed: 1,
            population: PopulationParams::default(),
            market: MarketParams::default(),
            cognition: CognitionParams::default(),
            backend: BackendConfig::default(),
            ablation: AblationFlags::default(),
            scenario: Vec::new(),
            output: OutputParams::default(),
        }
    }
}

impl RunConfig {
    /// Every problem with the configuration, not just the first.
    pub fn issues(&self) -> Vec<ConfigIssue> {
        let mut out = Vec::new();
        if self.n_agents < 2 {
            out.push(ConfigIssue::new("n_agents", "must be >= 2"));
        }
        if self.n_months < 12 {
            out.push(ConfigIssue::new("n_months", "must be >= 12"));
        }
        let pop = &self.population;
        if !(pop.wage_scale.is_finite() && pop.wage_scale > 0.0) {
            out.push(ConfigIssue::new("population.wage_scale", "must be finite and > 0"));
        }
        if !(pop.wage_shape.is_finite() && pop.wage_shape > 0.0) {
            out.push(ConfigIssue::new("population.wage_shape", "must be finite and > 0"));
        }
        if !(pop.initial_savings_months.is_finite() && pop.initial_savings_months >= 0.0) {
            out.push(ConfigIssue::new("population.initial_savings_months", "must be finite and >= 0"));
        }
        if !(self.market.initial_capital.is_finite() && self.market.initial_capital >= 0.0) {
            out.push(ConfigIssue::new("market.initial_capital", "must be finite and >= 0"));
        }
        self.market.production.check("market.production", &mut out);
        self.market.adjustment.check("market.adjustment", &mut out);
        self.market.tax.check("market.tax", &mut out);
        self.market.taylor.check("market.taylor", &mut out);
        self.cognition.sentiment.check("cognition.sentiment", &mut out);
        if self.cognition.embedding_dim == 0 {
            out.push(ConfigIssue::new("cognition.embedding_dim", "must be >= 1"));
        }
        if self.cognition.unemployment_window == 0 {
            out.push(ConfigIssue::new("cognition.unemployment_window", "must be >= 1"));
        }
        if self.cognition.persona_update_months == 0 {
            out.push(ConfigIssue::new("cognition.persona_update_months", "must be >= 1"));
        }
        self.backend.check("backend", &mut out);
        for (i, ev) in self.scenario.iter().enumerate() {
            ev.check(&format!("scenario[{i}]"), self.n_months, &mut out);
        }
        for i in 0..self.scenario.len() {
            for j in 0..i {
                if self.scenario[i].duplicates(&self.scenario[j]) {
                    out.push(ConfigIssue::new(
                        format!("scenario[{i}]"),
                        format!("identical event overlaps scenario[{j}]"),
                    ));
                }
            }
        }
        out
    }

    pub fn validate(&self) -> Result<(), Vec<ConfigIssue>> {
        let issues = self.issues();
        if issues.is_empty() {
            Ok(())
        } else {
            Err(issues)
        }
    }
}
