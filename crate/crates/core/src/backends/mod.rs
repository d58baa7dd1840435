//! Decision backends: the engine-facing contract, scripted policies and an
//! OpenAI-compatible chat-completion client.

mod llm;
mod parse;
mod prompt;
mod scripted;

pub use llm::{ChatClient, LlmBackend, LlmConfig, Transcript};
pub use parse::{parse_response, ParseError};
pub use prompt::{build_prompt, SYSTEM_PROMPT, TEMPLATE_VERSION};
pub use scripted::{CatsPolicy, CompositePolicy, LenPolicy, PrecautionaryPolicy, Rulebook};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cognition::Persona;
use crate::engine::ConfigIssue;

/// Everything an agent observes before deciding.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecisionRequest {
    pub agent_id: usize,
    /// Per-agent seed; scripted policies may derive fixed traits from it.
    pub agent_seed: u64,
    pub month_index: u32,
    /// Pre-tax income last month.
    pub income: f64,
    pub price: f64,
    pub savings: f64,
    pub unemployment: f64,
    pub interest_rate: f64,
    pub esi: f64,
    pub hourly_wage: f64,
    pub reservation_wage: f64,
    /// Whether the agent worked last month.
    pub employed: bool,
    pub previous_p_consume: f64,
    /// Latest monthly price change ×12.
    pub price_change_annualized: f64,
    pub persona: Persona,
    pub retrieved_memories: Vec<String>,
    pub short_term_context: Vec<String>,
    pub scenario_events: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecisionResponse {
    #[serde(rename = "work")]
    pub p_work: f64,
    #[serde(rename = "consume")]
    pub p_consume: f64,
    #[serde(rename = "esi")]
    pub esi_llm: f64,
    pub confidence: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub rationale: Option<String>,
    /// Free-form self-reported satisfaction; carried but unused by the engine.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub satisfaction: Option<f64>,
    /// Set when any bounded field had to be clamped into range.
    #[serde(default, skip_serializing)]
    pub clamped: bool,
}

impl DecisionResponse {
    pub fn new(p_work: f64, p_consume: f64, esi_llm: f64, confidence: f64) -> Self {
        Self { p_work, p_consume, esi_llm, confidence, rationale: None, satisfaction: None, clamped: false }
    }

    /// Clamps every bounded field into range, setting `clamped` iff a value moved.
    pub fn clamped(mut self) -> Self {
        let mut moved = false;
        let mut fix = |v: &mut f64, lo: f64, hi: f64| {
            let c = if v.is_nan() { lo } else { v.clamp(lo, hi) };
            if c != *v || v.is_nan() {
                moved = true;
            }
            *v = c;
        };
        fix(&mut self.p_work, 0.0, 1.0);
        fix(&mut self.p_consume, 0.0, 1.0);
        fix(&mut self.esi_llm, -1.0, 1.0);
        fix(&mut self.confidence, 0.0, 1.0);
        if let Some(s) = self.satisfaction.as_mut() {
            fix(s, 0.0, 1.0);
        }
        self.clamped |= moved;
        self
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BackendKind {
    ScriptedLen,
    ScriptedCats,
    ScriptedComposite,
    ScriptedPrecautionary,
    LlmHttp,
}

impl BackendKind {
    pub const ALL: [BackendKind; 5] = [
        BackendKind::ScriptedLen,
        BackendKind::ScriptedCats,
        BackendKind::ScriptedComposite,
        BackendKind::ScriptedPrecautionary,
        BackendKind::LlmHttp,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            BackendKind::ScriptedLen => "scripted-len",
            BackendKind::ScriptedCats => "scripted-cats",
            BackendKind::ScriptedComposite => "scripted-composite",
            BackendKind::ScriptedPrecautionary => "scripted-precautionary",
            BackendKind::LlmHttp => "llm-http",
        }
    }

    pub fn is_scripted(self) -> bool {
        self != BackendKind::LlmHttp
    }
}

impl std::fmt::Display for BackendKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for BackendKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        BackendKind::ALL
            .into_iter()
            .find(|k| k.as_str().eq_ignore_ascii_case(s))
            .ok_or_else(|| format!("unknown backend kind '{s}'"))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BackendConfig {
    pub kind: BackendKind,
    pub llm: LlmConfig,
}

impl Default for BackendConfig {
    fn default() -> Self {
        Self { kind: BackendKind::ScriptedPrecautionary, llm: LlmConfig::default() }
    }
}

impl BackendConfig {
    pub fn check(&self, prefix: &str, out: &mut Vec<ConfigIssue>) {
        if self.kind == BackendKind::LlmHttp {
            self.llm.check(&format!("{prefix}.llm"), out);
        }
    }

    pub fn build(&self) -> Result<Box<dyn DecisionBackend>, BackendError> {
        Ok(match self.kind {
            BackendKind::ScriptedLen => Box::new(LenPolicy),
            BackendKind::ScriptedCats => Box::new(CatsPolicy),
            BackendKind::ScriptedComposite => Box::new(CompositePolicy),
            BackendKind::ScriptedPrecautionary => Box::new(PrecautionaryPolicy::default()),
            BackendKind::LlmHttp => Box::new(LlmBackend::from_config(&self.llm)?),
        })
    }
}

#[derive(Debug, Error)]
pub enum BackendError {
    #[error("backend unavailable after {attempts} attempt(s): {last_error}")]
    Unavailable { attempts: u32, last_error: String },
    #[error("environment variable {0} is not set (required for the llm-http backend API key)")]
    MissingApiKey(String),
    #[error("backend configuration error: {0}")]
    Config(String),
}

/// Source of household decisions.
pub trait DecisionBackend: Send + Sync {
    fn kind(&self) -> BackendKind;

    fn decide(&self, request: &DecisionRequest) -> Result<DecisionResponse, BackendError>;

    /// Decides for every request; results come back in request order.
    fn decide_all(&self, requests: &[DecisionRequest]) -> Vec<Result<DecisionResponse, BackendError>> {
        requests.iter().map(|r| self.decide(r)).collect()
    }

    /// Backend-produced persona summary; `None` when the backend has no such
    /// capability and the deterministic fallback should be used.
    fn summarize_persona(&self, _persona: &Persona, _observations: &str) -> Option<Result<String, BackendError>> {
        None
    }

    /// Prompt/response pairs recorded so far (drained).
    fn take_transcripts(&self) -> Vec<Transcript> {
        Vec::new()
    }
}


#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn clamp_flag_set_iff_clamped() {
        let ok = DecisionResponse::new(0.5, 0.5, 0.0, 1.0).clamped();
        assert!(!ok.clamped);
        let bad = DecisionResponse::new(1.5, -0.1, 2.0, 0.5).clamped();
        assert!(bad.clamped);
        assert_eq!((bad.p_work, bad.p_consume, bad.esi_llm), (1.0, 0.0, 1.0));
        let nan = DecisionResponse::new(f64::NAN, 0.5, 0.0, 0.5).clamped();
        assert!(nan.clamped);
        assert_eq!(nan.p_work, 0.0);
    }

    #[test]
    fn kind_names_round_trip() {
        for k in BackendKind::ALL {
            assert_eq!(k.as_str().parse::<BackendKind>().unwrap(), k);
            assert_eq!(serde_json::to_string(&k).unwrap(), format!("\"{}\"", k.as_str()));
        }
        assert!("scripted-LEN".parse::<BackendKind>().is_ok());
        assert!("nope".parse::<BackendKind>().is_err());
    }

    #[test]
    fn llm_kind_requires_endpoint_and_model() {
        let cfg = BackendConfig {
            kind: BackendKind::LlmHttp,
            llm: LlmConfig { endpoint: String::new(), model: String::new(), ..LlmConfig::default() },
        };
        let mut issues = Vec::new();
        cfg.check("backend", &mut issues);
        let paths: Vec<_> = issues.iter().map(|i| i.path.as_str()).collect();
        assert!(paths.contains(&"backend.llm.endpoint"));
        assert!(paths.contains(&"backend.llm.model"));
        let mut issues = Vec::new();
        BackendConfig { kind: BackendKind::ScriptedLen, ..cfg }.check("backend", &mut issues);
        assert!(issues.is_empty());
    }
}
