use super::{argmax_by_index, UcbConfig, ArmStats, IndexRule, Policy, PolicyState, WindowState};
use crate::error::{BanditError, Result};
use crate::kl::ThresholdConfig;

/// UCB choice at `round`: untried arms first (lowest index), then the
/// largest `mean + sqrt(2 ln n / t)`.
pub fn ucb_select<S: ArmStats>(stats: &S, round: u64) -> usize {
    let rule = IndexRule::Ucb(UcbConfig::default());
    argmax_by_index(stats, 0..stats.num_arms(), |k| {
        rule.value(stats.mean(k), stats.count(k), round)
    })
}

/// KL-UCB choice at `round`: index `F(mean, t, round)`.
pub fn klucb_select<S: ArmStats>(stats: &S, round: u64, cfg: ThresholdConfig) -> usize {
    let rule = IndexRule::KlUcb(cfg);
    argmax_by_index(stats, 0..stats.num_arms(), |k| {
        rule.value(stats.mean(k), stats.count(k), round)
    })
}

/// UCB / KL-UCB over all arms, with full-history or windowed statistics.
#[derive(Debug, Clone)]
pub struct IndexPolicy<S> {
    stats: S,
    rule: IndexRule,
    /// Windowed variants use `min(n, tau + 1)` as the index time argument.
    time_cap: Option<u64>,
    selected: Option<usize>,
}

impl IndexPolicy<PolicyState> {
    pub fn new(num_arms: usize, rule: IndexRule) -> Self {
        Self {
            stats: PolicyState::new(num_arms),
            rule,
            time_cap: None,
            selected: None,
        }
    }
}

impl IndexPolicy<WindowState> {
    pub fn windowed(num_arms: usize, rule: IndexRule, tau: u64) -> Result<Self> {
        let stats = WindowState::new(num_arms, tau)?;
        Ok(Self {
            time_cap: Some(stats.capacity() as u64),
            stats,
            rule,
            selected: None,
        })
    }
}

impl<S: ArmStats> IndexPolicy<S> {
    pub fn stats(&self) -> &S {
        &self.stats
    }

    pub fn rule(&self) -> IndexRule {
        self.rule
    }
}

impl<S: ArmStats> Policy for IndexPolicy<S> {
    fn num_arms(&self) -> usize {
        self.stats.num_arms()
    }

    fn select(&mut self, round: u64) -> usize {
        let time = self.time_cap.map_or(round, |cap| round.min(cap));
        let (stats, rule) = (&self.stats, self.rule);
        let arm = argmax_by_index(stats, 0..stats.num_arms(), |k| {
            rule.value(stats.mean(k), stats.count(k), time)
        });
        self.selected = Some(arm);
        arm
    }

    fn observe(&mut self, arm: usize, reward: f64) -> Result<()> {
        match self.selected.take() {
            Some(selected) if selected != arm => Err(BanditError::UnexpectedArm {
                observed: arm,
                selected,
            }),
            _ => self.stats.record(arm, reward, None),
        }
    }
}
