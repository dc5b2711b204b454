use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::{argmax_by_index, ArmStats, IndexRule, Policy, PolicyState, UcbConfig, WindowState};
use crate::error::{BanditError, Result};
use crate::graph::UnimodalGraph;
use crate::kl::ThresholdConfig;
use crate::stream::aux_rng;

/// Empirical leader: the arm with the highest mean. The incumbent keeps the
/// lead while it is among the maximizers, otherwise the lowest index wins.
pub fn leader_of<S: ArmStats>(stats: &S, incumbent: Option<usize>) -> usize {
    let best = (0..stats.num_arms())
        .map(|k| stats.mean(k))
        .fold(f64::NEG_INFINITY, f64::max);
    if let Some(inc) = incumbent {
        if stats.mean(inc) == best {
            return inc;
        }
    }
    (0..stats.num_arms())
        .find(|&k| stats.mean(k) == best)
        .expect("at least one arm")
}

/// All arms sharing the highest empirical mean, ascending.
pub fn leader_candidates<S: ArmStats>(stats: &S) -> Vec<usize> {
    let best = (0..stats.num_arms())
        .map(|k| stats.mean(k))
        .fold(f64::NEG_INFINITY, f64::max);
    (0..stats.num_arms()).filter(|&k| stats.mean(k) == best).collect()
}

/// Outcome of one leader-policy round.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct LeaderDecision {
    pub leader: usize,
    /// `l_{L(n)}(n)`, counting the current round.
    pub leader_count: u64,
    pub arm: usize,
    /// The leader was selected by the forcing rule.
    pub forced: bool,
}

/// One round of a leader policy.
///
/// The leader is forced when `(l - 1)` is a multiple of `gamma + 1`;
/// otherwise the arm with the largest index in the leader's neighbourhood is
/// chosen, using `l` as the index time argument.
pub fn leader_step<S: ArmStats>(
    stats: &S,
    graph: &UnimodalGraph,
    rule: IndexRule,
    incumbent: Option<usize>,
) -> LeaderDecision {
    step_with_leader(stats, graph, rule, leader_of(stats, incumbent))
}

/// One round of a leader policy whose leader has already been chosen.
pub fn step_with_leader<S: ArmStats>(
    stats: &S,
    graph: &UnimodalGraph,
    rule: IndexRule,
    leader: usize,
) -> LeaderDecision {
    let leader_count = stats.leader_count(leader) + 1;
    let period = graph.max_degree() as u64 + 1;
    if (leader_count - 1).is_multiple_of(period) {
        return LeaderDecision {
            leader,
            leader_count,
            arm: leader,
            forced: true,
        };
    }
    let arm = argmax_by_index(
        stats,
        graph.neighborhood_unchecked(leader).iter().copied(),
        |k| rule.value(stats.mean(k), stats.count(k), leader_count),
    );
    LeaderDecision {
        leader,
        leader_count,
        arm,
        forced: false,
    }
}

/// OSUB round: KL index `F(mean, t, l_L)` over `N(L)`.
pub fn osub_step<S: ArmStats>(
    stats: &S,
    graph: &UnimodalGraph,
    cfg: ThresholdConfig,
    incumbent: Option<usize>,
) -> LeaderDecision {
    leader_step(stats, graph, IndexRule::KlUcb(cfg), incumbent)
}

/// UCB-U round: UCB index with time argument `l_L` over `N(L)`.
pub fn ucbu_step<S: ArmStats>(stats: &S, graph: &UnimodalGraph, incumbent: Option<usize>) -> LeaderDecision {
    leader_step(stats, graph, IndexRule::Ucb(UcbConfig::default()), incumbent)
}

/// OSUB, UCB-U and their sliding-window versions.
///
/// Leader ties follow [`leader_of`] unless [`with_random_ties`] is set, in
/// which case a tied leader is drawn uniformly from the maximizers.
///
/// [`with_random_ties`]: LeaderPolicy::with_random_ties
#[derive(Debug, Clone)]
pub struct LeaderPolicy<S> {
    stats: S,
    graph: UnimodalGraph,
    rule: IndexRule,
    incumbent: Option<usize>,
    pending: Option<LeaderDecision>,
    ties: Option<ChaCha8Rng>,
}

impl LeaderPolicy<PolicyState> {
    pub fn new(graph: UnimodalGraph, rule: IndexRule) -> Self {
        Self {
            stats: PolicyState::new(graph.num_arms()),
            graph,
            rule,
            incumbent: None,
            pending: None,
            ties: None,
        }
    }

    pub fn osub(graph: UnimodalGraph, cfg: ThresholdConfig) -> Self {
        Self::new(graph, IndexRule::KlUcb(cfg))
    }
}

impl LeaderPolicy<WindowState> {
    pub fn windowed(graph: UnimodalGraph, rule: IndexRule, tau: u64) -> Result<Self> {
        Ok(Self {
            stats: WindowState::new(graph.num_arms(), tau)?,
            graph,
            rule,
            incumbent: None,
            pending: None,
            ties: None,
        })
    }
}

impl<S: ArmStats> LeaderPolicy<S> {
    /// Breaks leader ties at random with a generator keyed by `(seed, run)`.
    pub fn with_random_ties(mut self, seed: u64, run: u64) -> Self {
        self.ties = Some(aux_rng(seed, b"leadties", run));
        self
    }

    pub fn stats(&self) -> &S {
        &self.stats
    }

    pub fn graph(&self) -> &UnimodalGraph {
        &self.graph
    }

    /// Decision made by the last `select`, until it is observed.
    pub fn pending(&self) -> Option<LeaderDecision> {
        self.pending
    }
}

impl<S: ArmStats> Policy for LeaderPolicy<S> {
    fn num_arms(&self) -> usize {
        self.graph.num_arms()
    }

    fn select(&mut self, _round: u64) -> usize {
        let leader = match &mut self.ties {
            None => leader_of(&self.stats, self.incumbent),
            Some(rng) => {
                let tied = leader_candidates(&self.stats);
                tied[rng.random_range(0..tied.len())]
            }
        };
        let decision = step_with_leader(&self.stats, &self.graph, self.rule, leader);
        self.incumbent = Some(decision.leader);
        self.pending = Some(decision);
        decision.arm
    }

    fn observe(&mut self, arm: usize, reward: f64) -> Result<()> {
        match self.pending.take() {
            Some(d) if d.arm == arm => self.stats.record(arm, reward, Some(d.leader)),
            Some(d) => {
                self.pending = Some(d);
                Err(BanditError::UnexpectedArm {
                    observed: arm,
                    selected: d.arm,
                })
            }
            None => Err(BanditError::Config("observe called before select".into())),
        }
    }
}
