//! The monthly simulation loop.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::config::{ConfigIssue, RunConfig};
use super::household::{Household, YearTotals};
use super::population::{draw_profile, wage_distribution};
use super::record::{AgentSnapshot, MonthRecord};
use crate::backends::{BackendError, DecisionBackend, DecisionRequest, DecisionResponse, Transcript};
use crate::cognition::{adjust_decision, HashingEncoder, MemoryBank, MemoryError, Persona, SentimentState};
use crate::market::{
    adjust_price, adjust_wage, aggregate_demand, apply_taxes, market_imbalance, produce, taylor_rate, update_capital,
    MarketError, MarketState, HOURS_PER_MONTH,
};
use crate::rng;

#[derive(Debug, Error)]
pub enum SimError {
    #[error("invalid configuration:\n{}", .0.iter().map(|i| format!("  {i}")).collect::<Vec<_>>().join("\n"))]
    Config(Vec<ConfigIssue>),
    #[error(transparent)]
    Backend(#[from] BackendError),
    #[error(transparent)]
    Market(#[from] MarketError),
    #[error(transparent)]
    Memory(#[from] MemoryError),
    #[error("simulation integrity violated in month {month}: {detail}")]
    Integrity { month: u32, detail: String },
}

/// Counters reported in the run manifest.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct RunStats {
    pub backend_fallbacks: u64,
    pub retrieval_calls: u64,
    pub clamped_responses: u64,
    pub persona_update_failures: u64,
}

#[derive(Debug, Clone)]
pub struct RunResult {
    pub config: RunConfig,
    pub months: Vec<MonthRecord>,
    pub agents: Vec<AgentSnapshot>,
    pub stats: RunStats,
    /// Line-delimited memory records of every agent, when requested.
    pub memory_dump: Option<String>,
    pub transcripts: Vec<Transcript>,
}

/// Event summary stored in memory and reused as the retrieval query.
pub fn event_summary(month: u32, income: f64, savings: f64, price: f64, unemployment: f64, worked: bool) -> String {
    format!(
        "month {month}: income {income:.2}, saved {savings:.2}, price {price:.4}, unemployment {unemployment:.4}, worked: {}",
        if worked { "yes" } else { "no" }
    )
}

pub struct Simulation {
    config: RunConfig,
    backend: Box<dyn DecisionBackend>,
    encoder: HashingEncoder,
    agents: Vec<Household>,
    market: MarketState,
    market_rng: ChaCha8Rng,
    prices: Vec<f64>,
    unemployment: Vec<f64>,
    stats: RunStats,
    months: Vec<MonthRecord>,
    snapshots: Vec<AgentSnapshot>,
}

impl Simulation {
    /// Builds the backend from the configuration and initializes the population.
    pub fn new(config: RunConfig) -> Result<Self, SimError> {
        config.validate().map_err(SimError::Config)?;
        let backend = config.backend.build()?;
        Self::with_backend(config, backend)
    }

    pub fn with_backend(config: RunConfig, backend: Box<dyn DecisionBackend>) -> Result<Self, SimError> {
        config.validate().map_err(SimError::Config)?;
        let wages = wage_distribution(&config.population)
            .map_err(|m| SimError::Config(vec![ConfigIssue::new("population", m)]))?;
        let cog = &config.cognition;
        let agents = (0..config.n_agents)
            .map(|id| {
                let seed = rng::child_seed(config.seed, id as u64);
                let mut agent_rng = rng::stream(config.seed, id as u64);
                let profile = draw_profile(&mut agent_rng, &wages, &config.population);
                let income = profile.hourly_wage * HOURS_PER_MONTH;
                Household {
                    id,
                    seed,
                    persona: Persona::new(profile.name, profile.age, profile.occupation),
                    hourly_wage: profile.hourly_wage,
                    reservation_wage: profile.reservation_wage,
                    savings: income * config.population.initial_savings_months,
                    employed: true,
                    hours: HOURS_PER_MONTH,
                    income,
                    post_tax_income: 0.0,
                    spending: 0.0,
                    p_work: 1.0,
                    p_consume: 0.5,
                    sentiment: SentimentState::new(cog.sentiment.clone()),
                    memory: MemoryBank::new(cog.memory_capacity, cog.short_term_months),
                    last_decision: None,
                    rng: agent_rng,
                    year: YearTotals::default(),
                }
            })
            .collect();
        let taylor = &config.market.taylor;
        let market =
            MarketState::new(config.market.initial_capital, taylor.neutral_rate(), taylor.natural_unemployment);
        Ok(Self {
            encoder: HashingEncoder::new(cog.embedding_dim),
            market_rng: rng::stream(config.seed, rng::MARKET_STREAM),
            backend,
            agents,
            market,
            prices: Vec::new(),
            unemployment: Vec::new(),
            stats: RunStats::default(),
            months: Vec::new(),
            snapshots: Vec::new(),
            config,
        })
    }

    pub fn agents(&self) -> &[Household] {
        &self.agents
    }

    pub fn agents_mut(&mut self) -> &mut [Household] {
        &mut self.agents
    }

    pub fn market(&self) -> &MarketState {
        &self.market
    }

    pub fn stats(&self) -> RunStats {
        self.stats
    }

    pub fn months(&self) -> &[MonthRecord] {
        &self.months
    }

    pub fn config(&self) -> &RunConfig {
        &self.config
    }

    /// Trailing mean of realized unemployment, or the initial rate before month 0.
    pub fn perceived_unemployment(&self) -> f64 {
        let w = self.config.cognition.unemployment_window.min(self.unemployment.len());
        if w == 0 {
            return self.market.unemployment;
        }
        self.unemployment[self.unemployment.len() - w..].iter().sum::<f64>() / w as f64
    }

    /// Decision requests every agent would see this month (no side effects
    /// other than retrieval counting).
    pub fn observe(&mut self) -> Vec<DecisionRequest> {
        let t = self.market.month_index;
        let events: Vec<String> =
            self.config.scenario.iter().filter(|e| e.is_active(t)).map(|e| e.text.clone()).collect();
        let k = if self.config.ablation.no_history_memory { 0 } else { self.config.cognition.retrieval_k };
        let unemployment = self.perceived_unemployment();
        let m = &self.market;
        let mut retrievals = 0u64;
        let requests = self
            .agents
            .iter()
            .map(|a| {
                let query = event_summary(t, a.income, a.savings, m.price, unemployment, a.worked());
                let retrieved = if k > 0 {
                    retrievals += 1;
                    a.memory.retrieve(&self.encoder, &query, k).into_iter().map(|r| r.summary.clone()).collect()
                } else {
                    Vec::new()
                };
                DecisionRequest {
                    agent_id: a.id,
                    agent_seed: a.seed,
                    month_index: t,
                    income: a.income,
                    price: m.price,
                    savings: a.savings,
                    unemployment,
                    interest_rate: m.interest_rate,
                    esi: a.sentiment.esi,
                    hourly_wage: a.hourly_wage,
                    reservation_wage: a.reservation_wage,
                    employed: a.worked(),
                    previous_p_consume: a.last_decision.as_ref().map_or(a.p_consume, |d| d.p_consume),
                    price_change_annualized: m.inflation_proxy(),
                    persona: a.persona.clone(),
                    retrieved_memories: retrieved,
                    short_term_context: a.memory.short_term().map(str::to_owned).collect(),
                    scenario_events: events.clone(),
                }
            })
            .collect();
        self.stats.retrieval_calls += retrievals;
        requests
    }

    /// Advances one month and returns its record.
    pub fn step(&mut self) -> Result<MonthRecord, SimError> {
        let t = self.market.month_index;
        let n = self.agents.len();
        let inflation_proxy = self.market.inflation_proxy();
        let retrievals_before = self.stats.retrieval_calls;
        let fallbacks_before = self.stats.backend_fallbacks;

        // Observation, retrieval and decisions against one shared snapshot.
        let requests = self.observe();
        let responses = self.backend.decide_all(&requests);
        let shock: f64 = self
            .config
            .scenario
            .iter()
            .filter(|e| e.is_active(t))
            .filter_map(|e| e.esi_shock)
            .sum();
        let scripted = self.backend.kind().is_scripted();
        let flags = self.config.ablation;

        for (agent, result) in self.agents.iter_mut().zip(responses) {
            let mut decision = match result {
                Ok(d) => {
                    if d.clamped {
                        self.stats.clamped_responses += 1;
                    }
                    agent.last_decision = Some(d.clone());
                    d
                }
                Err(e) => {
                    log::warn!("agent {} month {t}: {e}; reusing previous decision", agent.id);
                    self.stats.backend_fallbacks += 1;
                    agent.last_decision.clone().unwrap_or_else(|| {
                        DecisionResponse::new(agent.p_work, agent.p_consume, agent.sentiment.esi, 1.0)
                    })
                }
            };
            if scripted && shock != 0.0 {
                decision.esi_llm = (decision.esi_llm + shock).clamp(-1.0, 1.0);
            }
            if flags.no_sentiment_index {
                agent.sentiment.esi = 0.0;
            } else {
                agent.sentiment.update(decision.esi_llm);
            }
            let (p_work, p_consume) = if flags.no_belief_factor {
                (decision.p_work, decision.p_consume)
            } else {
                adjust_decision(decision.p_work, decision.p_consume, &agent.sentiment, decision.confidence)
            };
            agent.p_work = p_work;
            agent.p_consume = p_consume;
        }

        // Labor market. Employed agents keep their job if they choose to work;
        // unemployed agents get one offer at a wage drawn from current workers.
        let mut offer_pool: Vec<f64> = self.agents.iter().filter(|a| a.employed).map(|a| a.hourly_wage).collect();
        if offer_pool.is_empty() {
            offer_pool = self.agents.iter().map(|a| a.hourly_wage).collect();
        }
        for a in &mut self.agents {
            let works = if a.employed {
                a.rng.random::<f64>() < a.p_work
            } else {
                let offer = offer_pool[a.rng.random_range(0..offer_pool.len())];
                let accept = a.rng.random::<f64>() < a.p_work;
                if accept {
                    a.hourly_wage = offer;
                }
                accept
            };
            a.employed = works;
            a.hours = if works { HOURS_PER_MONTH } else { 0.0 };
            a.income = a.hourly_wage * a.hours;
        }
        let idle = self.agents.iter().filter(|a| !a.worked()).count();
        let unemployment = idle as f64 / n as f64;

        // Production.
        let market_cfg = &self.config.market;
        let labor: f64 = self.agents.iter().map(|a| a.hours).sum();
        let production = produce(self.market.capital, labor, &market_cfg.production)?;
        let available = self.market.inventory + production;

        // Taxes and redistribution.
        let incomes: Vec<f64> = self.agents.iter().map(|a| a.income).collect();
        let taxed = apply_taxes(&incomes, &market_cfg.tax)?;

        // Goods market with proportional rationing, then savings.
        let price = self.market.price;
        let demand = aggregate_demand(self.agents.iter().map(|a| (a.p_consume, a.savings)), price)?;
        let consumption = demand.min(available);
        let fill = if demand > 0.0 { consumption / demand } else { 0.0 };
        let monthly_rate = self.market.interest_rate / 12.0;
        let savings_open: f64 = self.agents.iter().map(|a| a.savings).sum();
        for (a, post_tax) in self.agents.iter_mut().zip(&taxed.post_tax) {
            let spend = a.p_consume * a.savings * fill;
            a.savings = a.savings * (1.0 + monthly_rate) + post_tax - spend;
            a.post_tax_income = *post_tax;
            a.spending = spend;
            a.year.income += a.income;
            a.year.post_tax += post_tax;
            a.year.spending += spend;
            a.year.months_worked += u32::from(a.worked());
        }
        self.market.inventory = available - consumption;

        // Investment and capital.
        let post_tax_total: f64 = taxed.post_tax.iter().sum();
        let investment = if flags.no_investment_impact {
            0.0
        } else {
            market_cfg.production.investment_share * post_tax_total
        };
        self.market.capital = update_capital(self.market.capital, investment, &market_cfg.production)?;

        // Imbalance-driven wage and price adjustment.
        let imbalance = market_imbalance(demand, available);
        let adj = &market_cfg.adjustment;
        for a in &mut self.agents {
            a.hourly_wage = adjust_wage(&mut a.rng, a.hourly_wage, imbalance, adj);
        }
        adjust_price(&mut self.market_rng, &mut self.market, imbalance, adj);

        // Record keeping and the annual policy-rate update.
        let interest_rate = self.market.interest_rate;
        self.prices.push(price);
        self.unemployment.push(unemployment);
        self.market.unemployment = unemployment;
        if (t + 1).is_multiple_of(12) {
            self.close_year(t);
        }

        // Memory writes and persona updates.
        let persona_due = (t + 1).is_multiple_of(self.config.cognition.persona_update_months);
        for a in &mut self.agents {
            let summary = event_summary(t, a.income, a.savings, price, unemployment, a.worked());
            a.memory.store_event(&self.encoder, t, &summary, a.sentiment.esi)?;
            if persona_due {
                let context: Vec<&str> = a.memory.short_term().collect();
                a.persona = match self.backend.summarize_persona(&a.persona, &context.join("\n")) {
                    None => a.persona.with_observation(&summary),
                    Some(Ok(text)) => a.persona.with_traits(&text),
                    Some(Err(e)) => {
                        log::warn!("agent {} persona update failed: {e}", a.id);
                        self.stats.persona_update_failures += 1;
                        a.persona.clone()
                    }
                };
            }
        }

        let gross: f64 = incomes.iter().sum();
        let spending: f64 = self.agents.iter().map(|a| a.spending).sum();
        let revenue = consumption * price;
        let mean = |f: &dyn Fn(&Household) -> f64| self.agents.iter().map(f).sum::<f64>() / n as f64;
        let record = MonthRecord {
            t,
            price,
            inflation_proxy,
            unemployment,
            production,
            demand,
            inventory: self.market.inventory,
            capital: self.market.capital,
            interest_rate,
            mean_esi: mean(&|a| a.sentiment.esi),
            mean_p_work: mean(&|a| a.p_work),
            mean_p_consume: mean(&|a| a.p_consume),
            mean_wage: mean(&|a| a.hourly_wage),
            investment,
            consumption,
            imbalance,
            gross_income: gross,
            tax_total: taxed.total_tax(),
            post_tax_income: post_tax_total,
            spending,
            savings_open,
            savings_close: self.agents.iter().map(|a| a.savings).sum(),
            profit_margin: if revenue > 0.0 { (revenue - gross) / revenue } else { 0.0 },
            fallbacks: (self.stats.backend_fallbacks - fallbacks_before) as u32,
            retrievals: (self.stats.retrieval_calls - retrievals_before) as u32,
        };
        self.check_integrity(&record)?;
        self.market.month_index += 1;
        self.months.push(record.clone());
        Ok(record)
    }

    fn close_year(&mut self, t: u32) {
        let year = t / 12;
        let mean_of = |xs: &[f64]| xs.iter().sum::<f64>() / xs.len() as f64;
        let len = self.prices.len();
        let this_year = mean_of(&self.prices[len - 12..]);
        if year == 0 {
            self.market.base_price = Some(this_year);
        } else {
            let last_year = mean_of(&self.prices[len - 24..len - 12]);
            let inflation = (this_year - last_year) / last_year;
            let unemployment = mean_of(&self.unemployment[len - 12..]);
            self.market.last_annual_inflation = inflation;
            self.market.interest_rate = taylor_rate(inflation, unemployment, &self.config.market.taylor);
        }
        for a in &mut self.agents {
            let y = std::mem::take(&mut a.year);
            self.snapshots.push(AgentSnapshot {
                year,
                agent: a.id,
                name: a.persona.name.clone(),
                age: a.persona.age,
                occupation: a.persona.occupation.clone(),
                hourly_wage: a.hourly_wage,
                savings: a.savings,
                employed: a.employed,
                months_worked: y.months_worked,
                annual_income: y.income,
                disposable_income: y.post_tax,
                spending: y.spending,
                savings_rate: if y.post_tax > 0.0 { (y.post_tax - y.spending) / y.post_tax } else { 0.0 },
                esi: a.sentiment.esi,
                p_work: a.p_work,
                p_consume: a.p_consume,
            });
        }
    }

    fn check_integrity(&self, r: &MonthRecord) -> Result<(), SimError> {
        let m = &self.market;
        let bad_market = [m.price, m.inventory, m.capital, m.interest_rate, r.production, r.demand]
            .iter()
            .any(|v| !v.is_finite());
        let bad_agent = self
            .agents
            .iter()
            .find(|a| !(a.hourly_wage.is_finite() && a.savings.is_finite() && a.sentiment.esi.is_finite()));
        if bad_market || bad_agent.is_some() || m.price <= 0.0 {
            let detail = match bad_agent {
                Some(a) => format!(
                    "agent {} has wage={} savings={} esi={}; market {:?}",
                    a.id, a.hourly_wage, a.savings, a.sentiment.esi, m
                ),
                None => format!("market state {m:?}, record {r:?}"),
            };
            return Err(SimError::Integrity { month: r.t, detail });
        }
        Ok(())
    }

    /// Runs the remaining months and collects the result.
    pub fn run_to_end(mut self) -> Result<RunResult, SimError> {
        while self.market.month_index < self.config.n_months {
            self.step()?;
        }
        Ok(self.finish())
    }

    pub fn finish(self) -> RunResult {
        let memory_dump = self
            .config
            .output
            .memory_dump
            .then(|| self.agents.iter().map(|a| a.memory.to_jsonl(a.id)).collect::<String>());
        RunResult {
            transcripts: self.backend.take_transcripts(),
            config: self.config,
            months: self.months,
            agents: self.snapshots,
            stats: self.stats,
            memory_dump,
        }
    }
}

/// Runs a whole simulation from its configuration.
pub fn run(config: RunConfig) -> Result<RunResult, SimError> {
    Simulation::new(config)?.run_to_end()
}
