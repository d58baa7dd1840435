use serde::{Deserialize, Serialize};

use crate::engine::ConfigIssue;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TaylorParams {
    pub natural_rate: f64,
    pub target_inflation: f64,
    pub natural_unemployment: f64,
    pub inflation_gap_coef: f64,
    pub unemployment_gap_coef: f64,
}

impl Default for TaylorParams {
    fn default() -> Self {
        Self {
            natural_rate: 0.01,
            target_inflation: 0.02,
            natural_unemployment: 0.04,
            inflation_gap_coef: 0.5,
            unemployment_gap_coef: 0.5,
        }
    }
}

impl TaylorParams {
    /// Rate when both gaps are closed.
    pub fn neutral_rate(&self) -> f64 {
        (self.natural_rate + self.target_inflation).max(0.0)
    }

    pub fn check(&self, prefix: &str, out: &mut Vec<ConfigIssue>) {
        for (field, v) in [
            ("natural_rate", self.natural_rate),
            ("target_inflation", self.target_inflation),
            ("inflation_gap_coef", self.inflation_gap_coef),
            ("unemployment_gap_coef", self.unemployment_gap_coef),
        ] {
            if !v.is_finite() {
                out.push(ConfigIssue::new(format!("{prefix}.{field}"), "must be finite"));
            }
        }
        if !(0.0..=1.0).contains(&self.natural_unemployment) {
            out.push(ConfigIssue::new(format!("{prefix}.natural_unemployment"), "must be in [0, 1]"));
        }
    }
}

/// `max(0, rn + π* + α_π(π − π*) + α_u(un − u))`.
pub fn taylor_rate(annual_inflation: f64, unemployment: f64, tp: &TaylorParams) -> f64 {
    let r = tp.natural_rate
        + tp.target_inflation
        + tp.inflation_gap_coef * (annual_inflation - tp.target_inflation)
        + tp.unemployment_gap_coef * (tp.natural_unemployment - unemployment);
    r.max(0.0)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn no_gap_gives_neutral_rate() {
        let tp = TaylorParams::default();
        assert_abs_diff_eq!(taylor_rate(0.02, 0.04, &tp), 0.03, epsilon = 1e-15);
        assert_abs_diff_eq!(taylor_rate(0.04, 0.04, &tp), 0.04, epsilon = 1e-15);
    }

    #[test]
    fn zero_lower_bound_binds() {
        assert_eq!(taylor_rate(-0.10, 0.30, &TaylorParams::default()), 0.0);
    }

    proptest! {
        #[test]
        fn rate_is_never_negative(pi in -2.0f64..2.0, u in 0.0f64..=1.0) {
            prop_assert!(taylor_rate(pi, u, &TaylorParams::default()) >= 0.0);
        }
    }
}
