use serde::{Deserialize, Serialize};

use crate::engine::ConfigIssue;

/// Probabilities are nudged into `[EPS, 1 − EPS]` before taking a logit.
const EPS: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum AdjustMode {
    /// Shift in logit space, so zero sentiment leaves decisions unchanged.
    #[default]
    Logit,
    /// Apply the sigmoid directly to the shifted probability.
    Literal,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SentimentParams {
    pub decay: f64,
    pub work_gain: f64,
    pub consume_gain: f64,
    pub confidence_threshold: f64,
    pub adjust_mode: AdjustMode,
}

impl Default for SentimentParams {
    fn default() -> Self {
        Self { decay: 0.9, work_gain: 0.5, consume_gain: 0.5, confidence_threshold: 0.5, adjust_mode: AdjustMode::Logit }
    }
}

impl SentimentParams {
    pub fn check(&self, prefix: &str, out: &mut Vec<ConfigIssue>) {
        if !(0.8..=0.95).contains(&self.decay) {
            out.push(ConfigIssue::new(format!("{prefix}.decay"), "must be in [0.8, 0.95]"));
        }
        for (field, v) in [("work_gain", self.work_gain), ("consume_gain", self.consume_gain)] {
            if !(v.is_finite() && v >= 0.0) {
                out.push(ConfigIssue::new(format!("{prefix}.{field}"), "must be finite and >= 0"));
            }
        }
        if !(0.0..=1.0).contains(&self.confidence_threshold) {
            out.push(ConfigIssue::new(format!("{prefix}.confidence_threshold"), "must be in [0, 1]"));
        }
    }
}

/// An agent's sentiment index together with its (per-run) parameters.
#[derive(Debug, Clone, PartialEq)]
pub struct SentimentState {
    pub esi: f64,
    pub params: SentimentParams,
}

impl SentimentState {
    pub fn new(params: SentimentParams) -> Self {
        Self { esi: 0.0, params }
    }

    /// `ESI ← λ·ESI + (1−λ)·ESI_llm`, with the input clamped to [−1, 1].
    pub fn update(&mut self, esi_llm: f64) -> f64 {
        let input = if esi_llm.is_finite() { esi_llm.clamp(-1.0, 1.0) } else { 0.0 };
        if input != esi_llm {
            log::debug!("sentiment input {esi_llm} clamped to {input}");
        }
        let lambda = self.params.decay;
        self.esi = (lambda * self.esi + (1.0 - lambda) * input).clamp(-1.0, 1.0);
        self.esi
    }
}

pub fn sigmoid(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

pub fn logit(p: f64) -> f64 {
    let p = p.clamp(EPS, 1.0 - EPS);
    (p / (1.0 - p)).ln()
}

/// Sentiment adjustment of `(p_work, p_consume)`, applied only when the
/// backend's confidence is below the threshold. Negative sentiment raises the
/// willingness to work and lowers consumption; positive sentiment the reverse.
pub fn adjust_decision(p_work: f64, p_consume: f64, state: &SentimentState, confidence: f64) -> (f64, f64) {
    let params = &state.params;
    if confidence >= params.confidence_threshold {
        return (p_work, p_consume);
    }
    let esi = state.esi;
    match params.adjust_mode {
        AdjustMode::Logit => (
            sigmoid(logit(p_work) - params.work_gain * esi),
            sigmoid(logit(p_consume) + params.consume_gain * esi),
        ),
        AdjustMode::Literal => {
            (sigmoid(p_work - params.work_gain * esi), sigmoid(p_consume + params.consume_gain * esi))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn state(esi: f64, decay: f64) -> SentimentState {
        SentimentState { esi, params: SentimentParams { decay, work_gain: 1.0, consume_gain: 1.0, ..Default::default() } }
    }

    #[test]
    fn fixed_point() {
        let mut s = state(0.5, 0.9);
        assert_abs_diff_eq!(s.update(0.5), 0.5, epsilon = 1e-15);
    }

    #[test]
    fn geometric_convergence_from_zero() {
        let mut s = state(0.0, 0.9);
        for _ in 0..10 {
            s.update(1.0);
        }
        assert_abs_diff_eq!(s.esi, 1.0 - 0.9f64.powi(10), epsilon = 1e-12);
        assert_abs_diff_eq!(s.esi, 0.651_321_559_9, epsilon = 1e-9);
    }

    #[test]
    fn single_step_arithmetic_and_clamping() {
        let mut s = state(1.0, 0.8);
        assert_abs_diff_eq!(s.update(-1.0), 0.6, epsilon = 1e-12);
        let mut s = state(0.0, 0.8);
        assert_abs_diff_eq!(s.update(-7.0), -0.2, epsilon = 1e-12);
        let mut s = state(0.3, 0.8);
        assert_abs_diff_eq!(s.update(f64::NAN), 0.24, epsilon = 1e-12);
    }

    #[test]
    fn logit_mode_is_identity_at_zero_sentiment() {
        let (w, c) = adjust_decision(0.3, 0.7, &state(0.0, 0.9), 0.2);
        assert_abs_diff_eq!(w, 0.3, epsilon = 1e-12);
        assert_abs_diff_eq!(c, 0.7, epsilon = 1e-12);
    }

    #[test]
    fn logit_mode_shift() {
        let (w, _) = adjust_decision(0.5, 0.5, &state(-0.5, 0.9), 0.2);
        assert_abs_diff_eq!(w, 0.622_459_331_201_854_6, epsilon = 1e-9);
    }

    #[test]
    fn confident_decisions_pass_through() {
        assert_eq!(adjust_decision(0.5, 0.5, &state(-0.5, 0.9), 0.9), (0.5, 0.5));
        assert_eq!(adjust_decision(0.5, 0.5, &state(-0.5, 0.9), 0.5), (0.5, 0.5));
    }

    #[test]
    fn literal_mode_uses_raw_probability() {
        let mut s = state(0.0, 0.9);
        s.params.adjust_mode = AdjustMode::Literal;
        let (w, _) = adjust_decision(0.5, 0.5, &s, 0.1);
        assert_abs_diff_eq!(w, sigmoid(0.5), epsilon = 1e-15);
    }

    #[test]
    fn boundary_probabilities_stay_finite() {
        let (w, c) = adjust_decision(0.0, 1.0, &state(0.5, 0.9), 0.0);
        assert!(w > 0.0 && w < 1e-5);
        assert!(c < 1.0 && c > 1.0 - 1e-5);
    }

    #[test]
    fn decay_band_validated() {
        let mut issues = Vec::new();
        SentimentParams { decay: 0.5, ..Default::default() }.check("cognition.sentiment", &mut issues);
        assert_eq!(issues[0].path, "cognition.sentiment.decay");
    }

    proptest! {
        #[test]
        fn update_is_a_convex_combination(prev in -1.0f64..=1.0, input in -1.0f64..=1.0, decay in 0.8f64..=0.95) {
            let mut s = state(prev, decay);
            let next = s.update(input);
            prop_assert!(next >= prev.min(input) - 1e-15 && next <= prev.max(input) + 1e-15);
        }
    }
}
