//! Configuration loading: a TOML file, dotted-path overrides, and the list of
//! fields that were filled from defaults.

use std::path::Path;

use macrosim::RunConfig;
use serde_json::Value;
use toml::Table;

use crate::CliError;

/// A resolved configuration plus the fields the user did not set.
#[derive(Debug, Clone)]
pub struct LoadedConfig {
    pub config: RunConfig,
    pub defaulted: Vec<String>,
}

/// Parses an override value as a TOML literal, falling back to a bare string
/// so `backend.kind=scripted-len` works without quoting.
fn parse_value(raw: &str) -> toml::Value {
    match format!("v = {raw}").parse::<Table>() {
        Ok(mut t) => t.remove("v").unwrap_or_else(|| toml::Value::String(raw.into())),
        Err(_) => toml::Value::String(raw.into()),
    }
}

/// Applies `a.b.c=value` to a table, creating intermediate tables.
pub fn apply_override(root: &mut Table, assignment: &str) -> Result<(), CliError> {
    let (path, raw) = assignment
        .split_once('=')
        .ok_or_else(|| CliError::Config(format!("override '{assignment}' must look like path.to.key=value")))?;
    let keys: Vec<&str> = path.trim().split('.').collect();
    if keys.iter().any(|k| k.is_empty()) {
        return Err(CliError::Config(format!("override '{assignment}' has an empty path segment")));
    }
    let (last, parents) = keys.split_last().expect("split yields at least one key");
    let mut table = root;
    for (depth, key) in parents.iter().enumerate() {
        let entry = table.entry(key.to_string()).or_insert_with(|| toml::Value::Table(Table::new()));
        table = entry.as_table_mut().ok_or_else(|| {
            CliError::Config(format!("override '{assignment}': '{}' is not a section", keys[..=depth].join(".")))
        })?;
    }
    table.insert(last.to_string(), parse_value(raw.trim()));
    Ok(())
}

fn leaf_paths(value: &Value, prefix: &str, out: &mut Vec<String>) {
    match value {
        Value::Object(map) if !map.is_empty() => {
            for (k, v) in map {
                let path = if prefix.is_empty() { k.clone() } else { format!("{prefix}.{k}") };
                leaf_paths(v, &path, out);
            }
        }
        _ => out.push(prefix.to_owned()),
    }
}

fn user_sets(user: &Table, path: &str) -> bool {
    let mut cur = user;
    let keys: Vec<&str> = path.split('.').collect();
    for (i, key) in keys.iter().enumerate() {
        match cur.get(*key) {
            None => return false,
            Some(toml::Value::Table(t)) if i + 1 < keys.len() => cur = t,
            Some(_) => return true,
        }
    }
    true
}

/// Builds a configuration from an already-parsed table.
pub fn resolve(user: Table) -> Result<LoadedConfig, CliError> {
    let config: RunConfig = toml::Value::Table(user.clone())
        .try_into()
        .map_err(|e: toml::de::Error| CliError::Config(format!("configuration does not match the schema: {e}")))?;
    let mut leaves = Vec::new();
    leaf_paths(&serde_json::to_value(&config).map_err(|e| CliError::Config(e.to_string()))?, "", &mut leaves);
    let defaulted = leaves.into_iter().filter(|p| !user_sets(&user, p)).collect();
    Ok(LoadedConfig { config, defaulted })
}

/// Reads the optional config file, applies overrides in order, and validates.
/// All semantic problems are reported together.
pub fn load(path: Option<&Path>, overrides: &[String]) -> Result<LoadedConfig, CliError> {
    let mut table = match path {
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .map_err(|e| CliError::Config(format!("cannot read config {}: {e}", p.display())))?;
            text.parse::<Table>().map_err(|e| CliError::Config(format!("{}: {e}", p.display())))?
        }
        None => Table::new(),
    };
    for o in overrides {
        apply_override(&mut table, o)?;
    }
    let loaded = resolve(table)?;
    loaded.config.validate().map_err(CliError::Invalid)?;
    Ok(loaded)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn overrides_parse_literals_and_bare_strings() {
        let mut t = Table::new();
        apply_override(&mut t, "n_agents=300").unwrap();
        apply_override(&mut t, "backend.kind=scripted-len").unwrap();
        apply_override(&mut t, "market.taylor.natural_rate=0.02").unwrap();
        apply_override(&mut t, "ablation.no_sentiment_index=true").unwrap();
        let loaded = resolve(t).unwrap();
        assert_eq!(loaded.config.n_agents, 300);
        assert_eq!(loaded.config.backend.kind.as_str(), "scripted-len");
        assert_eq!(loaded.config.market.taylor.natural_rate, 0.02);
        assert!(loaded.config.ablation.no_sentiment_index);
        assert!(!loaded.defaulted.contains(&"n_agents".to_string()));
        assert!(loaded.defaulted.contains(&"n_months".to_string()));
        assert!(loaded.defaulted.contains(&"market.taylor.target_inflation".to_string()));
    }

    #[test]
    fn malformed_overrides_are_rejected() {
        let mut t = Table::new();
        assert!(apply_override(&mut t, "n_agents").is_err());
        assert!(apply_override(&mut t, "a..b=1").is_err());
        apply_override(&mut t, "seed=3").unwrap();
        assert!(apply_override(&mut t, "seed.inner=3").is_err());
    }

    #[test]
    fn unknown_keys_and_all_invalid_values_are_reported() {
        let mut t = Table::new();
        apply_override(&mut t, "n_agentz=3").unwrap();
        assert!(matches!(resolve(t), Err(CliError::Config(_))));

        let mut t = Table::new();
        apply_override(&mut t, "n_agents=1").unwrap();
        apply_override(&mut t, "n_months=5").unwrap();
        let err = resolve(t).unwrap().config.validate().unwrap_err();
        let paths: Vec<_> = err.iter().map(|i| i.path.as_str()).collect();
        assert!(paths.contains(&"n_agents") && paths.contains(&"n_months"));
    }
}
