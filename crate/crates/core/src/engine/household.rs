use rand_chacha::ChaCha8Rng;

use crate::backends::DecisionResponse;
use crate::cognition::{MemoryBank, Persona, SentimentState};

/// One household agent and everything it carries between months.
#[derive(Debug, Clone)]
pub struct Household {
    pub id: usize,
    pub seed: u64,
    pub persona: Persona,
    pub hourly_wage: f64,
    pub reservation_wage: f64,
    pub savings: f64,
    pub employed: bool,
    /// 0 or 168 for the month just completed.
    pub hours: f64,
    /// Pre-tax income for the month just completed.
    pub income: f64,
    pub post_tax_income: f64,
    pub spending: f64,
    pub p_work: f64,
    pub p_consume: f64,
    pub sentiment: SentimentState,
    pub memory: MemoryBank,
    /// Last decision obtained from the backend, reused if the backend fails.
    pub last_decision: Option<DecisionResponse>,
    pub rng: ChaCha8Rng,
    pub(crate) year: YearTotals,
}

#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub(crate) struct YearTotals {
    pub months_worked: u32,
    pub income: f64,
    pub post_tax: f64,
    pub spending: f64,
}

impl Household {
    pub fn worked(&self) -> bool {
        self.hours > 0.0
    }
}
