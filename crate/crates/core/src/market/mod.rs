//! Economy-side mechanics: production, capital, demand, imbalance-driven
//! wage/price adjustment, taxation and the interest-rate rule.

mod tax;
mod taylor;

pub use tax::{annual_tax, apply_taxes, monthly_tax, Redistribution, TaxBracket, TaxOutcome, TaxSchedule};
pub use taylor::{taylor_rate, TaylorParams};

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::engine::ConfigIssue;

/// Hours one full-time worker supplies per month.
pub const HOURS_PER_MONTH: f64 = 168.0;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MarketError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

fn finite(name: &str, v: f64) -> Result<f64, MarketError> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(MarketError::InvalidArgument(format!("{name} must be finite, got {v}")))
    }
}

/// Economy-wide state carried from month to month.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MarketState {
    pub month_index: u32,
    pub price: f64,
    /// Year-1 mean price. Unset until the first simulated year completes.
    pub base_price: Option<f64>,
    /// Price before the most recent adjustment, for the monthly inflation proxy.
    pub prev_price: f64,
    pub inventory: f64,
    pub capital: f64,
    /// Annual nominal rate.
    pub interest_rate: f64,
    pub unemployment: f64,
    pub last_annual_inflation: f64,
}

impl MarketState {
    pub fn new(capital: f64, interest_rate: f64, unemployment: f64) -> Self {
        Self {
            month_index: 0,
            price: 1.0,
            base_price: None,
            prev_price: 1.0,
            inventory: 0.0,
            capital,
            interest_rate,
            unemployment,
            last_annual_inflation: 0.0,
        }
    }

    /// Latest monthly price change, annualized (×12).
    pub fn inflation_proxy(&self) -> f64 {
        (self.price / self.prev_price - 1.0) * 12.0
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ProductionParams {
    pub productivity: f64,
    pub capital_exponent: f64,
    pub labor_exponent: f64,
    /// Diminishing-returns rate on capital (the `e^(-λK)` damping).
    pub capital_damping: f64,
    pub depreciation: f64,
    pub inefficiency: f64,
    /// Share of aggregate post-tax income invested each month.
    pub investment_share: f64,
}

impl Default for ProductionParams {
    fn default() -> Self {
        Self {
            productivity: 5.6,
            capital_exponent: 0.3,
            labor_exponent: 0.7,
            capital_damping: 1.0e-8,
            depreciation: 0.05,
            inefficiency: 0.01,
            investment_share: 0.1,
        }
    }
}

impl ProductionParams {
    pub fn check(&self, prefix: &str, out: &mut Vec<ConfigIssue>) {
        let mut need = |ok: bool, field: &str, msg: &str| {
            if !ok {
                out.push(ConfigIssue::new(format!("{prefix}.{field}"), msg));
            }
        };
        need(self.productivity.is_finite() && self.productivity > 0.0, "productivity", "must be finite and > 0");
        need(
            self.capital_exponent.is_finite() && self.capital_exponent > 0.0 && self.capital_exponent <= 1.0,
            "capital_exponent",
            "must be in (0, 1]",
        );
        need(
            self.labor_exponent.is_finite() && self.labor_exponent > 0.0 && self.labor_exponent <= 1.0,
            "labor_exponent",
            "must be in (0, 1]",
        );
        need(self.capital_damping.is_finite() && self.capital_damping >= 0.0, "capital_damping", "must be finite and >= 0");
        need((0.0..=1.0).contains(&self.depreciation), "depreciation", "must be in [0, 1]");
        need(self.inefficiency.is_finite() && self.inefficiency >= 0.0, "inefficiency", "must be finite and >= 0");
        need(
            self.investment_share.is_finite() && self.investment_share >= 0.0,
            "investment_share",
            "must be finite and >= 0",
        );
    }
}

/// Output `A·K^β₁·L^β₂·e^(−λK)`.
pub fn produce(capital: f64, labor_hours: f64, p: &ProductionParams) -> Result<f64, MarketError> {
    finite("capital", capital)?;
    finite("labor_hours", labor_hours)?;
    if capital < 0.0 || labor_hours < 0.0 {
        return Err(MarketError::InvalidArgument(format!(
            "capital and labor must be >= 0, got K={capital}, L={labor_hours}"
        )));
    }
    if capital == 0.0 || labor_hours == 0.0 {
        return Ok(0.0);
    }
    Ok(p.productivity
        * capital.powf(p.capital_exponent)
        * labor_hours.powf(p.labor_exponent)
        * (-p.capital_damping * capital).exp())
}

/// Solves `K_t = (1−δ)K_prev + I − ω·K_t` for `K_t`.
pub fn update_capital(prev: f64, investment: f64, p: &ProductionParams) -> Result<f64, MarketError> {
    finite("capital", prev)?;
    finite("investment", investment)?;
    if prev < 0.0 || investment < 0.0 {
        return Err(MarketError::InvalidArgument(format!(
            "capital and investment must be >= 0, got K={prev}, I={investment}"
        )));
    }
    Ok(((1.0 - p.depreciation) * prev + investment) / (1.0 + p.inefficiency))
}

/// `D = Σ q_j·s_j / P`, in goods.
pub fn aggregate_demand<I>(agents: I, price: f64) -> Result<f64, MarketError>
where
    I: IntoIterator<Item = (f64, f64)>,
{
    if !(price.is_finite() && price > 0.0) {
        return Err(MarketError::InvalidArgument(format!("price must be > 0, got {price}")));
    }
    Ok(agents.into_iter().map(|(q, s)| q * s).sum::<f64>() / price)
}

/// `(D − G) / max(D, G)`, defined as 0 for an empty market.
pub fn market_imbalance(demand: f64, supply: f64) -> f64 {
    let m = demand.max(supply);
    if m <= 0.0 {
        0.0
    } else {
        ((demand - supply) / m).clamp(-1.0, 1.0)
    }
}

/// One draw of `sign(φ̂)·U(0, bound·|φ̂|)`. Always consumes exactly one value
/// from `rng`, even when the interval is empty.
pub fn draw_adjustment<R: Rng + ?Sized>(rng: &mut R, imbalance: f64, bound: f64) -> f64 {
    let u: f64 = rng.random();
    if imbalance == 0.0 {
        return 0.0;
    }
    imbalance.signum() * u * bound * imbalance.abs()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AdjustmentParams {
    pub kappa: f64,
    pub wage_bound: f64,
    pub price_bound: f64,
}

impl Default for AdjustmentParams {
    fn default() -> Self {
        Self { kappa: 0.2, wage_bound: 0.2, price_bound: 0.4 }
    }
}

impl AdjustmentParams {
    pub fn check(&self, prefix: &str, out: &mut Vec<ConfigIssue>) {
        for (field, v) in [("kappa", self.kappa), ("wage_bound", self.wage_bound), ("price_bound", self.price_bound)] {
            if !(v.is_finite() && v >= 0.0) {
                out.push(ConfigIssue::new(format!("{prefix}.{field}"), "must be finite and >= 0"));
            }
        }
        // kappa * bound >= 1 could push a wage or the price to zero or below.
        if self.kappa * self.wage_bound >= 1.0 {
            out.push(ConfigIssue::new(format!("{prefix}.wage_bound"), "kappa * wage_bound must be < 1"));
        }
        if self.kappa * self.price_bound >= 1.0 {
            out.push(ConfigIssue::new(format!("{prefix}.price_bound"), "kappa * price_bound must be < 1"));
        }
    }
}

/// New wage `w·(1 + φ·κ)` with `φ` drawn from `rng`.
pub fn adjust_wage<R: Rng + ?Sized>(rng: &mut R, wage: f64, imbalance: f64, ap: &AdjustmentParams) -> f64 {
    wage * (1.0 + draw_adjustment(rng, imbalance, ap.wage_bound) * ap.kappa)
}

/// Applies `P ← P·(1 + φ_P·κ)` and remembers the previous price.
pub fn adjust_price<R: Rng + ?Sized>(rng: &mut R, market: &mut MarketState, imbalance: f64, ap: &AdjustmentParams) {
    let phi = draw_adjustment(rng, imbalance, ap.price_bound);
    market.prev_price = market.price;
    market.price *= 1.0 + phi * ap.kappa;
}

/// Adjusts every wage (one independent draw each, in order) and then the price,
/// all from a single stream.
pub fn adjust_wages_and_price<R: Rng + ?Sized>(
    rng: &mut R,
    wages: &mut [f64],
    market: &mut MarketState,
    imbalance: f64,
    ap: &AdjustmentParams,
) {
    for w in wages.iter_mut() {
        *w = adjust_wage(rng, *w, imbalance, ap);
    }
    adjust_price(rng, market, imbalance, ap);
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn unit_params(a: f64, b1: f64, b2: f64, damping: f64) -> ProductionParams {
        ProductionParams {
            productivity: a,
            capital_exponent: b1,
            labor_exponent: b2,
            capital_damping: damping,
            ..ProductionParams::default()
        }
    }

    #[test]
    fn produce_examples() {
        assert_abs_diff_eq!(produce(4.0, 9.0, &unit_params(1.0, 0.5, 0.5, 0.0)).unwrap(), 6.0, epsilon = 1e-12);
        assert_eq!(produce(0.0, 100.0, &unit_params(3.0, 0.5, 0.5, 0.0)).unwrap(), 0.0);
        // 2·e^(−0.1), evaluated independently.
        assert_abs_diff_eq!(produce(1.0, 1.0, &unit_params(2.0, 0.5, 0.5, 0.1)).unwrap(), 1.809_674_836_071_919_6, epsilon = 1e-9);
    }

    #[test]
    fn produce_rejects_non_finite() {
        assert!(produce(f64::NAN, 1.0, &ProductionParams::default()).is_err());
        assert!(produce(1.0, f64::INFINITY, &ProductionParams::default()).is_err());
    }

    #[test]
    fn capital_examples() {
        let mut p = ProductionParams { depreciation: 0.1, inefficiency: 0.0, ..Default::default() };
        assert_abs_diff_eq!(update_capital(100.0, 10.0, &p).unwrap(), 100.0, epsilon = 1e-12);
        p.inefficiency = 0.05;
        let k = update_capital(100.0, 10.0, &p).unwrap();
        assert_abs_diff_eq!(k, 95.238_095_238_095_24, epsilon = 1e-9);
        assert!((k - (0.9 * 100.0 + 10.0 - 0.05 * k)).abs() < 1e-12 * k.max(1.0));
        p.depreciation = 1.0;
        p.inefficiency = 0.0;
        assert_eq!(update_capital(50.0, 0.0, &p).unwrap(), 0.0);
        assert!(update_capital(f64::NAN, 0.0, &p).is_err());
    }

    #[test]
    fn demand_examples() {
        assert_abs_diff_eq!(aggregate_demand([(0.5, 100.0)], 10.0).unwrap(), 5.0);
        assert_eq!(aggregate_demand(std::iter::empty(), 1.0).unwrap(), 0.0);
        let d = aggregate_demand([(0.5, 100.0), (0.2, 50.0), (1.0, 10.0)], 2.0).unwrap();
        assert_abs_diff_eq!(d, 35.0, epsilon = 1e-12);
        assert!(aggregate_demand([(0.5, 1.0)], 0.0).is_err());
        assert!(aggregate_demand([(0.5, 1.0)], -1.0).is_err());
    }

    #[test]
    fn imbalance_examples() {
        assert_eq!(market_imbalance(100.0, 100.0), 0.0);
        assert_abs_diff_eq!(market_imbalance(150.0, 100.0), 1.0 / 3.0, epsilon = 1e-12);
        assert_eq!(market_imbalance(0.0, 0.0), 0.0);
    }

    #[test]
    fn zero_imbalance_still_consumes_one_draw() {
        let mut a = ChaCha8Rng::seed_from_u64(1);
        let mut b = ChaCha8Rng::seed_from_u64(1);
        assert_eq!(draw_adjustment(&mut a, 0.0, 0.4), 0.0);
        let _: f64 = b.random();
        assert_eq!(a.random::<u64>(), b.random::<u64>());
    }

    #[test]
    fn adjustment_draws_are_uniform_on_the_signed_interval() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let n = 10_000;
        let draws: Vec<f64> = (0..n).map(|_| draw_adjustment(&mut rng, 0.5, 0.4)).collect();
        assert!(draws.iter().all(|d| (0.0..=0.2).contains(d)));
        // U(0, 0.2): mean 0.1, sd 0.2/sqrt(12); 3σ band on the sample mean.
        let mean = draws.iter().sum::<f64>() / n as f64;
        let se = 0.2 / 12f64.sqrt() / (n as f64).sqrt();
        assert!((mean - 0.1).abs() < 3.0 * se, "mean {mean}");

        let neg: Vec<f64> = (0..n).map(|_| draw_adjustment(&mut rng, -0.5, 0.4)).collect();
        assert!(neg.iter().all(|d| (-0.2..=0.0).contains(d)));
        let mean = neg.iter().sum::<f64>() / n as f64;
        assert!((mean + 0.1).abs() < 3.0 * se, "mean {mean}");
    }

    #[test]
    fn wage_and_price_adjustment_bounds() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut m = MarketState::new(1000.0, 0.03, 0.04);
        let ap = AdjustmentParams { kappa: 0.2, wage_bound: 0.5, price_bound: 0.5 };

        let mut wages = vec![10.0; 1000];
        adjust_wages_and_price(&mut rng, &mut wages, &mut m, 0.0, &ap);
        assert!(wages.iter().all(|&w| w == 10.0));
        assert_eq!(m.price, 1.0);

        adjust_wages_and_price(&mut rng, &mut wages, &mut m, 1.0, &ap);
        assert!(wages.iter().all(|&w| (10.0..=11.0).contains(&w)));

        let before = m.price;
        adjust_price(&mut rng, &mut m, -1.0, &ap);
        assert!(m.price >= 0.9 * before && m.price <= before);
        assert_eq!(m.prev_price, before);
    }

    #[test]
    fn adjustment_config_rejects_unsafe_gain() {
        let mut issues = Vec::new();
        AdjustmentParams { kappa: 2.0, wage_bound: 0.5, price_bound: 0.4 }.check("market.adjustment", &mut issues);
        let paths: Vec<_> = issues.iter().map(|i| i.path.as_str()).collect();
        assert_eq!(paths, ["market.adjustment.wage_bound"]);
        issues.clear();
        AdjustmentParams::default().check("x", &mut issues);
        assert!(issues.is_empty());
    }

    proptest! {
        #[test]
        fn production_is_monotone_in_labor(k in 0.0f64..1e6, l1 in 0.0f64..1e5, dl in 0.0f64..1e5) {
            let p = ProductionParams::default();
            let a = produce(k, l1, &p).unwrap();
            let b = produce(k, l1 + dl, &p).unwrap();
            prop_assert!(a >= 0.0);
            prop_assert!(b >= a);
            prop_assert_eq!(produce(k, 0.0, &p).unwrap(), 0.0);
            prop_assert_eq!(produce(0.0, l1, &p).unwrap(), 0.0);
        }

        #[test]
        fn imbalance_is_bounded_and_antisymmetric(d in 0.0f64..1e9, g in 0.0f64..1e9) {
            let x = market_imbalance(d, g);
            prop_assert!((-1.0..=1.0).contains(&x));
            prop_assert_eq!(x, -market_imbalance(g, d));
        }

        #[test]
        fn validated_adjustment_keeps_prices_positive(seed in any::<u64>(), steps in 1usize..200) {
            let ap = AdjustmentParams { kappa: 0.99, wage_bound: 1.0, price_bound: 1.0 };
            let mut issues = Vec::new();
            ap.check("a", &mut issues);
            prop_assert!(issues.is_empty());
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let mut m = MarketState::new(1.0, 0.0, 0.0);
            let mut wages = vec![1.0; 4];
            for _ in 0..steps {
                adjust_wages_and_price(&mut rng, &mut wages, &mut m, -1.0, &ap);
            }
            prop_assert!(m.price > 0.0);
            prop_assert!(wages.iter().all(|&w| w > 0.0));
        }
    }
}
