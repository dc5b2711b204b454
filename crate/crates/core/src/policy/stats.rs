use std::collections::VecDeque;

use crate::error::{BanditError, Result};

/// Per-arm statistics a policy reads when it picks an arm.
pub trait ArmStats: Clone + Send {
    fn num_arms(&self) -> usize;

    /// Pulls of `arm` covered by the statistics.
    fn count(&self, arm: usize) -> u64;

    fn sum(&self, arm: usize) -> f64;

    /// Past rounds in which `arm` was the leader, as seen by the next
    /// leadership count (which adds the current round).
    fn leader_count(&self, arm: usize) -> u64;

    /// Appends the outcome of one round.
    fn record(&mut self, arm: usize, reward: f64, leader: Option<usize>) -> Result<()>;

    /// Empirical mean, 0 for an untried arm.
    fn mean(&self, arm: usize) -> f64 {
        match self.count(arm) {
            0 => 0.0,
            t => self.sum(arm) / t as f64,
        }
    }
}

fn check_record(num_arms: usize, arm: usize, reward: f64, leader: Option<usize>) -> Result<()> {
    for a in std::iter::once(arm).chain(leader) {
        if a >= num_arms {
            return Err(BanditError::ArmOutOfRange { arm: a, num_arms });
        }
    }
    if !(reward.is_finite() && (0.0..=1.0).contains(&reward)) {
        return Err(BanditError::Domain {
            name: "reward",
            value: reward,
            domain: "[0, 1]",
        });
    }
    Ok(())
}

/// Statistics over the whole history: `t_k`, reward sums and `l_k`.
#[derive(Debug, Clone, PartialEq)]
pub struct PolicyState {
    counts: Vec<u64>,
    sums: Vec<f64>,
    leaders: Vec<u64>,
    rounds: u64,
}

impl PolicyState {
    pub fn new(num_arms: usize) -> Self {
        Self {
            counts: vec![0; num_arms],
            sums: vec![0.0; num_arms],
            leaders: vec![0; num_arms],
            rounds: 0,
        }
    }

    /// Rounds recorded so far.
    pub fn rounds(&self) -> u64 {
        self.rounds
    }
}

impl ArmStats for PolicyState {
    fn num_arms(&self) -> usize {
        self.counts.len()
    }

    fn count(&self, arm: usize) -> u64 {
        self.counts[arm]
    }

    fn sum(&self, arm: usize) -> f64 {
        self.sums[arm]
    }

    fn leader_count(&self, arm: usize) -> u64 {
        self.leaders[arm]
    }

    fn record(&mut self, arm: usize, reward: f64, leader: Option<usize>) -> Result<()> {
        check_record(self.counts.len(), arm, reward, leader)?;
        self.counts[arm] += 1;
        self.sums[arm] += reward;
        if let Some(l) = leader {
            self.leaders[l] += 1;
        }
        self.rounds += 1;
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WindowRecord {
    pub arm: usize,
    pub reward: f64,
    pub leader: Option<usize>,
}

/// Statistics over the last `tau + 1` rounds only.
#[derive(Debug, Clone, PartialEq)]
pub struct WindowState {
    capacity: usize,
    buffer: VecDeque<WindowRecord>,
    counts: Vec<u64>,
    sums: Vec<f64>,
    leaders: Vec<u64>,
}

impl WindowState {
    pub fn new(num_arms: usize, tau: u64) -> Result<Self> {
        if tau < 1 {
            return Err(BanditError::Config("window parameter tau must be >= 1".into()));
        }
        let capacity = usize::try_from(tau + 1)
            .map_err(|_| BanditError::Config(format!("window tau = {tau} too large")))?;
        Ok(Self {
            capacity,
            buffer: VecDeque::with_capacity(capacity.min(1 << 20)),
            counts: vec![0; num_arms],
            sums: vec![0.0; num_arms],
            leaders: vec![0; num_arms],
        })
    }

    /// `tau + 1`.
    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn records(&self) -> impl Iterator<Item = &WindowRecord> {
        self.buffer.iter()
    }
}

impl ArmStats for WindowState {
    fn num_arms(&self) -> usize {
        self.counts.len()
    }

    fn count(&self, arm: usize) -> u64 {
        self.counts[arm]
    }

    fn sum(&self, arm: usize) -> f64 {
        self.sums[arm]
    }

    /// Leaderships over the latest `tau` records, so that together with the
    /// current round the count spans `tau + 1` rounds.
    fn leader_count(&self, arm: usize) -> u64 {
        let oldest = match self.buffer.front() {
            Some(r) if self.buffer.len() == self.capacity && r.leader == Some(arm) => 1,
            _ => 0,
        };
        self.leaders[arm] - oldest
    }

    fn record(&mut self, arm: usize, reward: f64, leader: Option<usize>) -> Result<()> {
        check_record(self.counts.len(), arm, reward, leader)?;
        if self.buffer.len() == self.capacity {
            let old = self.buffer.pop_front().expect("full buffer");
            self.counts[old.arm] -= 1;
            if self.counts[old.arm] == 0 {
                self.sums[old.arm] = 0.0;
            } else {
                self.sums[old.arm] -= old.reward;
            }
            if let Some(l) = old.leader {
                self.leaders[l] -= 1;
            }
        }
        self.buffer.push_back(WindowRecord { arm, reward, leader });
        self.counts[arm] += 1;
        self.sums[arm] += reward;
        if let Some(l) = leader {
            self.leaders[l] += 1;
        }
        Ok(())
    }
}
