use serde::{Deserialize, Serialize};

/// Maximum length, in characters, of the free-text trait summary.
pub const TRAITS_BUDGET: usize = 512;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Persona {
    pub name: String,
    pub age: u32,
    pub occupation: String,
    pub traits: String,
}

impl Persona {
    pub fn new(name: impl Into<String>, age: u32, occupation: impl Into<String>) -> Self {
        let p = Self { name: name.into(), age, occupation: occupation.into(), traits: String::new() };
        debug_assert!((18..=60).contains(&p.age));
        p
    }

    /// Deterministic trait update: append the newest observation and keep the
    /// most recent `TRAITS_BUDGET` characters.
    pub fn with_observation(&self, observation: &str) -> Persona {
        let observation = observation.trim();
        if observation.is_empty() {
            return self.clone();
        }
        let joined = if self.traits.is_empty() {
            observation.to_owned()
        } else {
            format!("{} | {}", self.traits, observation)
        };
        let n = joined.chars().count();
        let traits = if n > TRAITS_BUDGET { joined.chars().skip(n - TRAITS_BUDGET).collect() } else { joined };
        Persona { traits, ..self.clone() }
    }

    /// Replaces traits with an externally produced summary, truncated to budget.
    pub fn with_traits(&self, summary: &str) -> Persona {
        Persona { traits: summary.trim().chars().take(TRAITS_BUDGET).collect(), ..self.clone() }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn base() -> Persona {
        Persona::new("Ada Moreno", 34, "Electrician")
    }

    #[test]
    fn empty_observation_is_noop() {
        assert_eq!(base().with_observation(""), base());
        assert_eq!(base().with_observation("   "), base());
    }

    #[test]
    fn observation_is_recorded_within_budget() {
        let p = base().with_observation("lost job in month 14");
        assert!(p.traits.contains("lost job in month 14"));
        assert!(p.traits.chars().count() <= TRAITS_BUDGET);
    }

    #[test]
    fn long_histories_keep_newest_and_identity() {
        let mut p = base();
        for m in 0..200 {
            p = p.with_observation(&format!("month {m}: worked, saved a little"));
        }
        assert!(p.traits.chars().count() <= TRAITS_BUDGET);
        assert!(p.traits.ends_with("month 199: worked, saved a little"));
        assert_eq!((p.name.as_str(), p.age, p.occupation.as_str()), ("Ada Moreno", 34, "Electrician"));
        let q = p.with_traits(&"x".repeat(2000));
        assert_eq!(q.traits.len(), TRAITS_BUDGET);
        assert_eq!(q.name, p.name);
    }
}
