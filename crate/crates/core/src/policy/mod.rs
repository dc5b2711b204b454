//! Sequential decision rules behind a common `select` / `observe` interface.
//!
//! Two families share the statistics in [`stats`]:
//! * index policies (UCB, KL-UCB) pick the arm with the largest index over
//!   all arms;
//! * leader policies (OSUB, UCB-U) restrict the choice to the graph
//!   neighbourhood of the empirical leader and force the leader itself once
//!   every `gamma + 1` leaderships.
//!
//! Either family runs on full-history statistics or on a sliding window.

mod continuum;
mod index;
mod leader;
pub mod stats;

use std::fmt;
use std::str::FromStr;

pub use continuum::{discretization_step, UcbDelta};
pub use index::{klucb_select, ucb_select, IndexPolicy};
pub use leader::{
    leader_candidates, leader_of, leader_step, osub_step, step_with_leader, ucbu_step, LeaderDecision, LeaderPolicy,
};
pub use stats::{ArmStats, PolicyState, WindowRecord, WindowState};

use crate::error::{BanditError, Result};
use crate::kl::{kl_ucb_upper_unchecked, threshold, ThresholdConfig};

/// A bandit algorithm driven one round at a time.
pub trait Policy: Send {
    fn num_arms(&self) -> usize;

    /// Arm (0-based) to pull at `round` (1-based).
    fn select(&mut self, round: u64) -> usize;

    /// Feeds back the reward of the arm returned by the last `select`.
    fn observe(&mut self, arm: usize, reward: f64) -> Result<()>;
}

/// Exploration coefficient `rho` of the UCB index `mean + sqrt(rho ln t / count)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UcbConfig {
    rho: f64,
}

impl UcbConfig {
    pub fn new(rho: f64) -> Result<Self> {
        if !(rho >= 0.0 && rho.is_finite()) {
            return Err(BanditError::Domain {
                name: "rho",
                value: rho,
                domain: "[0, inf)",
            });
        }
        Ok(Self { rho })
    }

    pub fn rho(&self) -> f64 {
        self.rho
    }
}

impl Default for UcbConfig {
    fn default() -> Self {
        Self { rho: 2.0 }
    }
}

/// Confidence index attached to each arm.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum IndexRule {
    /// `mean + sqrt(rho ln t / count)`, infinite for untried arms.
    Ucb(UcbConfig),
    /// `F(mean, count, t)`, equal to 1 for untried arms.
    KlUcb(ThresholdConfig),
}

impl IndexRule {
    /// Index for an arm with `count` pulls and empirical `mean`, at time
    /// argument `time` (clamped below at 3 like the KL threshold).
    pub fn value(&self, mean: f64, count: u64, time: u64) -> f64 {
        match *self {
            IndexRule::Ucb(cfg) => {
                if count == 0 {
                    f64::INFINITY
                } else {
                    let log_t = (time.max(3) as f64).ln();
                    mean + (cfg.rho * log_t / count as f64).sqrt()
                }
            }
            IndexRule::KlUcb(cfg) => kl_ucb_upper_unchecked(mean, count, threshold(time, cfg)),
        }
    }
}

/// Argmax of `value` over `candidates` (ascending), ties going to the least
/// sampled arm and then to the lowest index.
pub(crate) fn argmax_by_index<S: ArmStats>(
    stats: &S,
    candidates: impl IntoIterator<Item = usize>,
    mut value: impl FnMut(usize) -> f64,
) -> usize {
    let mut best: Option<(usize, f64, u64)> = None;
    for k in candidates {
        let v = value(k);
        let t = stats.count(k);
        let better = match best {
            None => true,
            Some((_, bv, bt)) => v > bv || (v == bv && t < bt),
        };
        if better {
            best = Some((k, v, t));
        }
    }
    best.expect("non-empty candidate set").0
}

/// Algorithms selectable by name.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum PolicyKind {
    Ucb,
    KlUcb,
    Osub,
    UcbU,
    SwUcb,
    SwKlUcb,
    SwOsub,
    SwUcbU,
    UcbDelta,
    /// Always plays the best arm; a zero-regret reference.
    Oracle,
}

impl PolicyKind {
    pub const ALL: [PolicyKind; 10] = [
        PolicyKind::Ucb,
        PolicyKind::KlUcb,
        PolicyKind::Osub,
        PolicyKind::UcbU,
        PolicyKind::SwUcb,
        PolicyKind::SwKlUcb,
        PolicyKind::SwOsub,
        PolicyKind::SwUcbU,
        PolicyKind::UcbDelta,
        PolicyKind::Oracle,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            PolicyKind::Ucb => "ucb",
            PolicyKind::KlUcb => "klucb",
            PolicyKind::Osub => "osub",
            PolicyKind::UcbU => "ucbu",
            PolicyKind::SwUcb => "sw-ucb",
            PolicyKind::SwKlUcb => "sw-klucb",
            PolicyKind::SwOsub => "sw-osub",
            PolicyKind::SwUcbU => "sw-ucbu",
            PolicyKind::UcbDelta => "ucb-delta",
            PolicyKind::Oracle => "oracle",
        }
    }

    pub fn is_windowed(&self) -> bool {
        matches!(
            self,
            PolicyKind::SwUcb | PolicyKind::SwKlUcb | PolicyKind::SwOsub | PolicyKind::SwUcbU
        )
    }

    /// Whether the policy needs the arm graph.
    pub fn uses_graph(&self) -> bool {
        matches!(
            self,
            PolicyKind::Osub | PolicyKind::UcbU | PolicyKind::SwOsub | PolicyKind::SwUcbU
        )
    }

    /// Default window parameter `tau` for drift speed `sigma`, rounded to
    /// the nearest integer and at least 1.
    ///
    /// Leader policies use `sigma^(-3/4) ln(1/sigma) / 8`; the index
    /// policies use `sigma^(-4/5)`.
    pub fn default_tau(&self, sigma: f64) -> Option<u64> {
        if !(sigma > 0.0 && sigma < 1.0) {
            return None;
        }
        let tau = match self {
            PolicyKind::SwOsub | PolicyKind::SwUcbU => sigma.powf(-0.75) * (1.0 / sigma).ln() / 8.0,
            PolicyKind::SwUcb | PolicyKind::SwKlUcb => sigma.powf(-0.8),
            _ => return None,
        };
        Some((tau.round() as u64).max(1))
    }
}

impl fmt::Display for PolicyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for PolicyKind {
    type Err = BanditError;

    fn from_str(s: &str) -> Result<Self> {
        let lower = s.trim().to_ascii_lowercase();
        PolicyKind::ALL
            .into_iter()
            .find(|k| k.name() == lower)
            .ok_or_else(|| {
                BanditError::Config(format!(
                    "unknown policy '{s}'; expected one of {}",
                    PolicyKind::ALL.map(|k| k.name()).join(", ")
                ))
            })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_names() {
        for kind in PolicyKind::ALL {
            assert_eq!(kind.name().parse::<PolicyKind>().unwrap(), kind);
        }
        assert_eq!("SW-OSUB".parse::<PolicyKind>().unwrap(), PolicyKind::SwOsub);
        assert!("lse".parse::<PolicyKind>().is_err());
    }

    #[test]
    fn window_recipes() {
        // 1e-3^(-3/4) ln(1e3) / 8 = 177.83 * 6.9078 / 8 = 153.55
        assert_eq!(PolicyKind::SwOsub.default_tau(1e-3), Some(154));
        // 1e-4^(-3/4) ln(1e4) / 8 = 1000 * 9.2103 / 8 = 1151.3
        assert_eq!(PolicyKind::SwUcbU.default_tau(1e-4), Some(1151));
        // 1e-3^(-4/5) = 251.19
        assert_eq!(PolicyKind::SwKlUcb.default_tau(1e-3), Some(251));
        assert_eq!(PolicyKind::SwUcb.default_tau(1e-4), Some(1585));
        assert_eq!(PolicyKind::Osub.default_tau(1e-3), None);
        assert_eq!(PolicyKind::SwOsub.default_tau(0.0), None);
    }

    #[test]
    fn index_values() {
        assert_eq!(IndexRule::Ucb(UcbConfig::default()).value(0.3, 0, 10), f64::INFINITY);
        let kl = IndexRule::KlUcb(ThresholdConfig::default());
        assert_eq!(kl.value(0.3, 0, 10), 1.0);
        assert_eq!(kl.value(1.0, 7, 10), 1.0);
        let v = IndexRule::Ucb(UcbConfig::default()).value(0.5, 2, 3);
        assert!((v - (0.5 + 3f64.ln().sqrt())).abs() < 1e-15);
        let half = IndexRule::Ucb(UcbConfig::new(1.0).unwrap()).value(0.5, 4, 100);
        assert!((half - (0.5 + (100f64.ln() / 4.0).sqrt())).abs() < 1e-15);
        assert!(UcbConfig::new(-1.0).is_err());
    }
}
