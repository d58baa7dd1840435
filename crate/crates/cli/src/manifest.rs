//! manifest.json: everything needed to reproduce a run.

use std::path::Path;

use macrosim::backends::{BackendKind, TEMPLATE_VERSION};
use macrosim::engine::{RunConfig, RunStats};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::CliError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    /// SHA-256 of the canonical JSON form of `config`.
    pub config_hash: String,
    /// The resolved configuration with every default materialized.
    pub config: RunConfig,
    pub seed: u64,
    pub code_version: String,
    pub backend_kind: BackendKind,
    pub template_version: String,
    /// Dotted paths of the fields that came from defaults.
    pub defaulted: Vec<String>,
    pub stats: RunStats,
    pub wall_clock_seconds: f64,
    pub created: String,
    pub notes: Vec<String>,
}

pub fn config_hash(config: &RunConfig) -> String {
    let canonical = serde_json::to_vec(config).expect("RunConfig always serializes");
    hex::encode(Sha256::digest(&canonical))
}

impl Manifest {
    pub fn new(config: &RunConfig, defaulted: Vec<String>, stats: RunStats, wall_clock_seconds: f64) -> Self {
        Self {
            config_hash: config_hash(config),
            config: config.clone(),
            seed: config.seed,
            code_version: env!("CARGO_PKG_VERSION").to_owned(),
            backend_kind: config.backend.kind,
            template_version: TEMPLATE_VERSION.to_owned(),
            defaulted,
            stats,
            wall_clock_seconds,
            created: chrono::Utc::now().to_rfc3339_opts(chrono::SecondsFormat::Secs, true),
            notes: crate::report::REPORT_NOTES.iter().map(|s| s.to_string()).collect(),
        }
    }

    pub fn read(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("cannot read manifest {}: {e}", path.display())))?;
        serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hash_tracks_config_content() {
        let a = RunConfig::default();
        let mut b = a.clone();
        assert_eq!(config_hash(&a), config_hash(&b));
        assert_eq!(config_hash(&a).len(), 64);
        b.seed += 1;
        assert_ne!(config_hash(&a), config_hash(&b));
    }

    #[test]
    fn manifest_round_trips() {
        let m = Manifest::new(&RunConfig::default(), vec!["seed".into()], RunStats::default(), 0.25);
        let back: Manifest = serde_json::from_str(&serde_json::to_string(&m).unwrap()).unwrap();
        assert_eq!(back, m);
        assert_eq!(config_hash(&back.config), m.config_hash);
    }
}
