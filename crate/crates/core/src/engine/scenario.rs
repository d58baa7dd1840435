use serde::{Deserialize, Serialize};

use super::config::{ConfigIssue, RunConfig};

/// An exogenous textual event shown to every agent while active.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioEvent {
    pub start_month: u32,
    /// Exclusive; open-ended when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub end_month: Option<u32>,
    pub text: String,
    /// Added to the sentiment reported by scripted backends while active.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub esi_shock: Option<f64>,
}

impl ScenarioEvent {
    pub fn new(start_month: u32, end_month: Option<u32>, text: impl Into<String>) -> Self {
        Self { start_month, end_month, text: text.into(), esi_shock: None }
    }

    pub fn with_shock(mut self, shock: f64) -> Self {
        self.esi_shock = Some(shock);
        self
    }

    pub fn is_active(&self, month: u32) -> bool {
        month >= self.start_month && self.end_month.is_none_or(|e| month < e)
    }

    fn overlaps(&self, other: &ScenarioEvent) -> bool {
        let end_a = self.end_month.unwrap_or(u32::MAX);
        let end_b = other.end_month.unwrap_or(u32::MAX);
        self.start_month < end_b && other.start_month < end_a
    }

    /// Same text over an overlapping window.
    pub fn duplicates(&self, other: &ScenarioEvent) -> bool {
        self.text == other.text && self.overlaps(other)
    }

    pub fn check(&self, prefix: &str, n_months: u32, out: &mut Vec<ConfigIssue>) {
        if self.text.trim().is_empty() {
            out.push(ConfigIssue::new(format!("{prefix}.text"), "must not be empty"));
        }
        if self.start_month >= n_months {
            out.push(ConfigIssue::new(format!("{prefix}.start_month"), "must fall inside the simulated horizon"));
        }
        if let Some(end) = self.end_month {
            if end < self.start_month {
                out.push(ConfigIssue::new(format!("{prefix}.end_month"), "must not precede start_month"));
            }
        }
        if let Some(s) = self.esi_shock {
            if !(s.is_finite() && (-1.0..=1.0).contains(&s)) {
                out.push(ConfigIssue::new(format!("{prefix}.esi_shock"), "must be in [-1, 1]"));
            }
        }
    }
}

/// `config` with `event` added to its scenario list; nothing else changes.
pub fn inject_scenario(config: &RunConfig, event: ScenarioEvent) -> Result<RunConfig, Vec<ConfigIssue>> {
    let mut next = config.clone();
    next.scenario.push(event);
    let issues: Vec<ConfigIssue> = next.issues().into_iter().filter(|i| i.path.starts_with("scenario")).collect();
    if issues.is_empty() {
        Ok(next)
    } else {
        Err(issues)
    }
}
