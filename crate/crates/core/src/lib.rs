//! Discrete-time agent-based macroeconomic simulator.
//!
//! Household agents decide each month whether to work and how much of their
//! savings to spend. Decisions come from a pluggable [`backends::DecisionBackend`]
//! (scripted policies or an OpenAI-compatible chat endpoint) and are modulated by
//! a per-agent memory bank and an economic sentiment index. The economy side has
//! Cobb-Douglas production with capital accumulation, imbalance-driven wage and
//! price adjustment, progressive taxation with lump-sum redistribution and a
//! Taylor-rule interest rate.

pub mod backends;
pub mod cognition;
pub mod engine;
pub mod market;
pub mod metrics;
pub mod rng;

pub use engine::{RunConfig, RunResult, Simulation};
