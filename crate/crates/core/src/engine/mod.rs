//! Simulation engine: population, monthly loop, scenarios and ablations.

mod config;
mod household;
mod population;
mod record;
mod scenario;
mod sim;

pub use config::{AblationFlags, CognitionParams, ConfigIssue, MarketParams, OutputParams, PopulationParams, RunConfig};
pub use household::Household;
pub use population::{draw_profile, wage_decile, wage_distribution, Profile};
pub use record::{AgentSnapshot, MonthRecord};
pub use scenario::{inject_scenario, ScenarioEvent};
pub use sim::{event_summary, run, RunResult, RunStats, SimError, Simulation};
