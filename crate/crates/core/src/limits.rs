//! Enumeration caps and work budgets.
//!
//! Every exhaustive loop in the crate is guarded by one of these limits so
//! factorial blowup surfaces as an error with an estimate instead of a hang.
//! Defaults can be overridden through environment variables:
//!
//! | variable              | default       |
//! |-----------------------|---------------|
//! | `SCF_MAX_ALTS`        | 6             |
//! | `SCF_MAX_AGENTS`      | 5             |
//! | `SCF_PROFILE_BUDGET`  | 100 000 000   |
//! | `SCF_RULE_BUDGET`     | 10 000 000    |

use std::sync::OnceLock;

use serde::Serialize;

use crate::error::{Error, Result};

/// Hard ceiling on alternatives: rule strings use one decimal digit per outcome.
pub const MAX_ALTS_HARD: usize = 10;
/// Hard ceiling on agents.
pub const MAX_AGENTS_HARD: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct Limits {
    pub max_alts: usize,
    pub max_agents: usize,
    /// Largest profile space `(m!)^n` an exhaustive predicate may scan.
    pub profile_budget: u64,
    /// Largest rule space `m^(m^n)` the exhaustive rule enumerator may walk.
    pub rule_budget: u64,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_alts: 6,
            max_agents: 5,
            profile_budget: 100_000_000,
            rule_budget: 10_000_000,
        }
    }
}

impl Limits {
    pub fn from_env() -> Result<Self> {
        Self::from_lookup(|key| std::env::var(key).ok())
    }

    pub fn from_lookup(lookup: impl Fn(&str) -> Option<String>) -> Result<Self> {
        fn read(
            lookup: &impl Fn(&str) -> Option<String>,
            key: &str,
            default: u64,
        ) -> Result<u64> {
            match lookup(key) {
                None => Ok(default),
                Some(raw) => raw
                    .trim()
                    .parse::<u64>()
                    .map_err(|_| Error::Config(format!("{key}={raw:?} is not a non-negative integer"))),
            }
        }
        let d = Limits::default();
        let limits = Limits {
            max_alts: read(&lookup, "SCF_MAX_ALTS", d.max_alts as u64)? as usize,
            max_agents: read(&lookup, "SCF_MAX_AGENTS", d.max_agents as u64)? as usize,
            profile_budget: read(&lookup, "SCF_PROFILE_BUDGET", d.profile_budget)?,
            rule_budget: read(&lookup, "SCF_RULE_BUDGET", d.rule_budget)?,
        };
        if limits.max_alts > MAX_ALTS_HARD {
            return Err(Error::Config(format!(
                "SCF_MAX_ALTS={} exceeds the hard ceiling {MAX_ALTS_HARD}",
                limits.max_alts
            )));
        }
        if limits.max_agents > MAX_AGENTS_HARD {
            return Err(Error::Config(format!(
                "SCF_MAX_AGENTS={} exceeds the hard ceiling {MAX_AGENTS_HARD}",
                limits.max_agents
            )));
        }
        Ok(limits)
    }

    /// Process-wide limits, read from the environment once. Malformed
    /// variables fall back to the defaults; the CLI validates them up front.
    pub fn current() -> &'static Limits {
        static CURRENT: OnceLock<Limits> = OnceLock::new();
        CURRENT.get_or_init(|| Limits::from_env().unwrap_or_default())
    }

    pub fn check_alts(&self, m: usize) -> Result<()> {
        if m > self.max_alts {
            return Err(Error::CapExceeded {
                what: "alternatives",
                value: m as u64,
                cap: self.max_alts as u64,
            });
        }
        Ok(())
    }

    pub fn check_agents(&self, n: usize) -> Result<()> {
        if n > self.max_agents {
            return Err(Error::CapExceeded {
                what: "agents",
                value: n as u64,
                cap: self.max_agents as u64,
            });
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn env_overrides() {
        let l = Limits::from_lookup(|k| (k == "SCF_RULE_BUDGET").then(|| "42".to_string())).unwrap();
        assert_eq!(l.rule_budget, 42);
        assert_eq!(l.max_alts, 6);
    }

    #[test]
    fn rejects_garbage_and_hard_ceiling() {
        assert!(Limits::from_lookup(|k| (k == "SCF_MAX_ALTS").then(|| "lots".into())).is_err());
        assert!(Limits::from_lookup(|k| (k == "SCF_MAX_ALTS").then(|| "11".into())).is_err());
    }

    #[test]
    fn caps() {
        let l = Limits::default();
        assert!(l.check_alts(6).is_ok());
        assert!(matches!(l.check_alts(7), Err(Error::CapExceeded { .. })));
        assert!(matches!(l.check_agents(6), Err(Error::CapExceeded { .. })));
    }
}
