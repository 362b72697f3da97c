//! One flat configuration record for a whole run.
//!
//! Every stage reads its knobs from here, every persisted artifact
//! embeds the effective values, and two runs with equal configs (and
//! equal inputs) produce byte-identical outputs. Values load in layers:
//! defaults, then an optional `key=value` file, then individual
//! overrides; later layers win.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::RankParams;
use crate::relevance::{IdfVariant, IndexParams, MatchParams};
use crate::reputation::ReputationConfig;

/// Effective settings of one run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    /// Master seed for every randomized step.
    pub seed: u64,
    /// Fraction of each user's answers held out as test documents.
    pub test_fraction: f64,
    pub idf_variant: IdfVariant,
    /// Answer posts examined per query.
    pub k_posts: usize,
    /// Candidates kept after the relevance cut.
    pub k_users: usize,
    /// Damping factor of the prestige recurrence.
    pub damping: f64,
    /// Convergence tolerance of the prestige iteration.
    pub tolerance: f64,
    pub max_iterations: usize,
    /// Divide prestige by out-weight instead of distinct answerers.
    pub weighted_graph: bool,
    /// Answer score that counts as community acceptance.
    pub accept_threshold: i64,
    /// Also honour the asker's explicit accepted-answer mark.
    pub use_accepted_flag: bool,
    /// Weight of the prestige score in the final fusion; the rest goes
    /// to reputation significance.
    pub alpha: f64,
    /// In evaluation, a user is relevant to a query when their held-out
    /// terms cover at least this fraction of the query's terms.
    pub coverage_threshold: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            seed: 42,
            test_fraction: 0.2,
            idf_variant: IdfVariant::Smooth,
            k_posts: 50,
            k_users: 20,
            damping: 0.85,
            tolerance: 1e-8,
            max_iterations: 100,
            weighted_graph: false,
            accept_threshold: 15,
            use_accepted_flag: false,
            alpha: 0.5,
            coverage_threshold: 0.5,
        }
    }
}

impl RunConfig {
    /// Apply a `key=value` file: one setting per line, `#` comments and
    /// blank lines ignored.
    pub fn apply_file(&mut self, path: &Path) -> Result<()> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        for (number, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let Some((key, value)) = line.split_once('=') else {
                return Err(Error::Config(format!(
                    "{}:{}: expected `key=value`, got {line:?}",
                    path.display(),
                    number + 1
                )));
            };
            self.apply_kv(key.trim(), value.trim()).map_err(|e| {
                Error::Config(format!("{}:{}: {e}", path.display(), number + 1))
            })?;
        }
        Ok(())
    }

    /// Apply one setting by name. Names match the field names.
    pub fn apply_kv(&mut self, key: &str, value: &str) -> Result<()> {
        fn parsed<T: std::str::FromStr>(key: &str, value: &str) -> Result<T> {
            value.parse().map_err(|_| {
                Error::Config(format!("invalid value {value:?} for {key}"))
            })
        }
        match key {
            "seed" => self.seed = parsed(key, value)?,
            "test_fraction" => self.test_fraction = parsed(key, value)?,
            "idf_variant" => {
                self.idf_variant = match value {
                    "smooth" => IdfVariant::Smooth,
                    "raw" => IdfVariant::Raw,
                    _ => {
                        return Err(Error::Config(format!(
                            "invalid value {value:?} for idf_variant (expected smooth or raw)"
                        )))
                    }
                }
            }
            "k_posts" => self.k_posts = parsed(key, value)?,
            "k_users" => self.k_users = parsed(key, value)?,
            "damping" => self.damping = parsed(key, value)?,
            "tolerance" => self.tolerance = parsed(key, value)?,
            "max_iterations" => self.max_iterations = parsed(key, value)?,
            "weighted_graph" => self.weighted_graph = parsed(key, value)?,
            "accept_threshold" => self.accept_threshold = parsed(key, value)?,
            "use_accepted_flag" => self.use_accepted_flag = parsed(key, value)?,
            "alpha" => self.alpha = parsed(key, value)?,
            "coverage_threshold" => self.coverage_threshold = parsed(key, value)?,
            _ => return Err(Error::Config(format!("unknown setting {key:?}"))),
        }
        Ok(())
    }

    pub fn index_params(&self) -> IndexParams {
        IndexParams {
            seed: self.seed,
            test_fraction: self.test_fraction,
            variant: self.idf_variant,
        }
    }

    pub fn match_params(&self) -> MatchParams {
        MatchParams {
            k_posts: self.k_posts,
            k_users: self.k_users,
            seed: self.seed,
        }
    }

    pub fn rank_params(&self) -> RankParams {
        RankParams {
            damping: self.damping,
            tolerance: self.tolerance,
            max_iterations: self.max_iterations,
            weighted: self.weighted_graph,
        }
    }

    pub fn reputation_config(&self) -> ReputationConfig {
        ReputationConfig {
            accept_threshold: self.accept_threshold,
            use_accepted_flag: self.use_accepted_flag,
        }
    }
}
