//! Rule-based decision policies. All of them are pure functions of the
//! request (including the agent seed it carries).

use super::{BackendError, BackendKind, DecisionBackend, DecisionRequest, DecisionResponse};
use crate::market::HOURS_PER_MONTH;
use crate::rng::child_seed;

/// Households that cut spending and look for work as perceived unemployment
/// risk rises.
#[derive(Debug, Clone, PartialEq)]
pub struct PrecautionaryPolicy {
    /// Unemployment level regarded as normal.
    pub reference_unemployment: f64,
    /// Rate above which borrowing costs start to weigh on consumption.
    pub reference_rate: f64,
}

impl Default for PrecautionaryPolicy {
    fn default() -> Self {
        Self { reference_unemployment: 0.04, reference_rate: 0.02 }
    }
}

impl PrecautionaryPolicy {
    pub fn respond(&self, r: &DecisionRequest) -> DecisionResponse {
        let u = r.unemployment;
        let p_work = (0.6 + 1.5 * u - 0.5 * r.esi).clamp(0.05, 0.98);
        let rate_drag = 0.3 * (r.interest_rate - self.reference_rate).max(0.0) * 10.0;
        let p_consume = (0.7 - 1.2 * u + 0.4 * r.esi - rate_drag).clamp(0.05, 0.95);
        let esi = (-(u - self.reference_unemployment) * 4.0 - r.price_change_annualized).clamp(-1.0, 1.0);
        DecisionResponse::new(p_work, p_consume, esi, 0.4)
    }
}

impl DecisionBackend for PrecautionaryPolicy {
    fn kind(&self) -> BackendKind {
        BackendKind::ScriptedPrecautionary
    }

    fn decide(&self, request: &DecisionRequest) -> Result<DecisionResponse, BackendError> {
        Ok(self.respond(request))
    }
}

/// Reservation-wage worker with a buffer-stock consumption target
/// (a coarse stand-in for the LEN rulebook).
#[derive(Debug, Clone, Copy, Default)]
pub struct LenPolicy;

impl LenPolicy {
    pub fn respond(r: &DecisionRequest) -> DecisionResponse {
        let p_work = if r.hourly_wage >= r.reservation_wage { 0.95 } else { 0.2 };
        // Buffer stock: one month of full-time wage income.
        let buffer = r.hourly_wage * HOURS_PER_MONTH;
        let p_consume = if r.savings > 0.0 { 0.9 * (r.savings - buffer).max(0.0) / r.savings } else { 0.0 };
        DecisionResponse::new(p_work, p_consume.clamp(0.05, 0.95), 0.0, 1.0)
    }
}

impl DecisionBackend for LenPolicy {
    fn kind(&self) -> BackendKind {
        BackendKind::ScriptedLen
    }

    fn decide(&self, request: &DecisionRequest) -> Result<DecisionResponse, BackendError> {
        Ok(Self::respond(request))
    }
}

/// Adaptive consumer: spends 5% more after a month with income and 10% less
/// after a month without (a coarse stand-in for the CATS rulebook).
#[derive(Debug, Clone, Copy, Default)]
pub struct CatsPolicy;

impl CatsPolicy {
    pub fn respond(r: &DecisionRequest) -> DecisionResponse {
        let factor = if r.employed { 1.05 } else { 0.9 };
        let p_consume = (r.previous_p_consume * factor).clamp(0.05, 0.95);
        DecisionResponse::new(0.9, p_consume, 0.0, 1.0)
    }
}

impl DecisionBackend for CatsPolicy {
    fn kind(&self) -> BackendKind {
        BackendKind::ScriptedCats
    }

    fn decide(&self, request: &DecisionRequest) -> Result<DecisionResponse, BackendError> {
        Ok(Self::respond(request))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Rulebook {
    Len,
    Cats,
}

impl Rulebook {
    /// The rulebook an agent holds for the whole run, fixed by its seed.
    pub fn for_agent(agent_seed: u64) -> Self {
        if child_seed(agent_seed, 0xC_04D0_517E) & 1 == 0 {
            Rulebook::Len
        } else {
            Rulebook::Cats
        }
    }
}

/// Each agent follows either the LEN or the CATS rules.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompositePolicy;

impl DecisionBackend for CompositePolicy {
    fn kind(&self) -> BackendKind {
        BackendKind::ScriptedComposite
    }

    fn decide(&self, request: &DecisionRequest) -> Result<DecisionResponse, BackendError> {
        Ok(match Rulebook::for_agent(request.agent_seed) {
            Rulebook::Len => LenPolicy::respond(request),
            Rulebook::Cats => CatsPolicy::respond(request),
        })
    }
}
