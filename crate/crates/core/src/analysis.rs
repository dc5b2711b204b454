//! Regret accounting, the asymptotic lower-bound constant and a Monte Carlo
//! check of the stopping-time concentration bound.

use rand::Rng;
use rayon::prelude::*;

use crate::env::{ContinuousTriangleEnv, Environment, MovingTriangleEnv};
use crate::error::{check_probability, BanditError, Result};
use crate::graph::{best_arm, UnimodalGraph};
use crate::kl::kl_unchecked;
use crate::stream::aux_rng;

/// `c(theta) = sum over neighbours k of the best arm of (mu* - mu_k) / I(mu_k, mu*)`.
///
/// Asymptotically no uniformly good policy has `R(T) / ln T` below this.
pub fn lower_bound_c(graph: &UnimodalGraph, means: &[f64]) -> Result<f64> {
    for &m in means {
        check_probability("mean", m)?;
    }
    graph.check_unimodal(means)?;
    let best = best_arm(means);
    let top = means[best];
    Ok(graph
        .adjacent(best)?
        .iter()
        .map(|&k| (top - means[k]) / kl_unchecked(means[k], top))
        .sum())
}

/// One simulated round.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RoundRecord {
    pub round: u64,
    pub arm: usize,
    /// Position in `[0, 1]` for continuous problems.
    pub point: Option<f64>,
    pub reward: f64,
    /// `mu*(n) - mu_{chosen}(n)`.
    pub gap: f64,
}

/// Per-round history of one run plus the horizons at which cumulative
/// regret is reported.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct RunTrace {
    records: Vec<RoundRecord>,
    checkpoints: Vec<u64>,
}

/// `(T, cumulative regret up to T)` pairs, ascending in `T`.
pub type RegretCurve = Vec<(u64, f64)>;

impl RunTrace {
    pub fn new(checkpoints: Vec<u64>) -> Result<Self> {
        if checkpoints.windows(2).any(|w| w[1] <= w[0]) {
            return Err(BanditError::Config(
                "checkpoints must be strictly increasing".into(),
            ));
        }
        if checkpoints.first() == Some(&0) {
            return Err(BanditError::Config("checkpoints start at 1".into()));
        }
        Ok(Self {
            records: Vec::new(),
            checkpoints,
        })
    }

    pub fn with_capacity(checkpoints: Vec<u64>, rounds: usize) -> Result<Self> {
        let mut trace = Self::new(checkpoints)?;
        trace.records.reserve(rounds);
        Ok(trace)
    }

    /// Appends the next round; rounds must be consecutive from 1.
    pub fn push(&mut self, record: RoundRecord) -> Result<()> {
        let expected = self.records.len() as u64 + 1;
        if record.round != expected {
            return Err(BanditError::Config(format!(
                "trace expected round {expected}, got {}",
                record.round
            )));
        }
        self.records.push(record);
        Ok(())
    }

    pub fn records(&self) -> &[RoundRecord] {
        &self.records
    }

    pub fn checkpoints(&self) -> &[u64] {
        &self.checkpoints
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    fn check_checkpoints(&self) -> Result<()> {
        match self.checkpoints.last() {
            Some(&last) if last > self.records.len() as u64 => Err(BanditError::Config(format!(
                "checkpoint {last} beyond trace length {}",
                self.records.len()
            ))),
            _ => Ok(()),
        }
    }

    /// Cumulative sum of `f(record)` sampled at the checkpoints.
    fn curve_by(&self, mut f: impl FnMut(&RoundRecord) -> f64) -> Result<RegretCurve> {
        self.check_checkpoints()?;
        let mut curve = Vec::with_capacity(self.checkpoints.len());
        let mut total = 0.0;
        let mut done = 0usize;
        for &cp in &self.checkpoints {
            for rec in &self.records[done..cp as usize] {
                total += f(rec);
            }
            done = cp as usize;
            curve.push((cp, total));
        }
        Ok(curve)
    }

    /// Cumulative regret from the gaps recorded during simulation.
    pub fn recorded_regret(&self) -> Result<RegretCurve> {
        self.curve_by(|r| r.gap)
    }

    /// Pull counts of each arm over the first `rounds` rounds.
    pub fn pull_counts(&self, num_arms: usize, rounds: u64) -> Result<Vec<u64>> {
        let rounds = rounds as usize;
        if rounds > self.records.len() {
            return Err(BanditError::Config(format!(
                "{rounds} rounds requested from a trace of {}",
                self.records.len()
            )));
        }
        let mut counts = vec![0; num_arms];
        for rec in &self.records[..rounds] {
            if rec.arm >= num_arms {
                return Err(BanditError::ArmOutOfRange {
                    arm: rec.arm,
                    num_arms,
                });
            }
            counts[rec.arm] += 1;
        }
        Ok(counts)
    }
}

/// Pseudo-regret `sum_k (mu* - mu_k) t_k(T)` at each checkpoint, from pull counts.
pub fn stationary_regret(trace: &RunTrace, means: &[f64]) -> Result<RegretCurve> {
    trace.check_checkpoints()?;
    let top = means.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    trace
        .checkpoints()
        .iter()
        .map(|&cp| {
            let counts = trace.pull_counts(means.len(), cp)?;
            let regret = counts
                .iter()
                .zip(means)
                .map(|(&t, &m)| (top - m) * t as f64)
                .sum();
            Ok((cp, regret))
        })
        .collect()
}

/// `sum_n (mu*(n) - mu_{k(n)}(n))` recomputed from the environment.
pub fn nonstationary_regret(trace: &RunTrace, env: &MovingTriangleEnv) -> Result<RegretCurve> {
    let num_arms = env.num_arms();
    if let Some(rec) = trace.records().iter().find(|r| r.arm >= num_arms) {
        return Err(BanditError::ArmOutOfRange {
            arm: rec.arm,
            num_arms,
        });
    }
    trace.curve_by(|r| env.gap(r.arm, r.round))
}

/// `T mu* - sum_n mu(x(n))`; every record must carry a point.
pub fn continuous_regret(trace: &RunTrace, env: &ContinuousTriangleEnv) -> Result<RegretCurve> {
    let mut points = Vec::with_capacity(trace.len());
    for rec in trace.records() {
        let x = rec
            .point
            .ok_or_else(|| BanditError::Config(format!("round {} has no point", rec.round)))?;
        points.push(env.continuous_mean(x)?);
    }
    let top = env.best_mean();
    let mut i = 0;
    trace.curve_by(|_| {
        let gap = top - points[i];
        i += 1;
        gap
    })
}

/// Previsible sampling rule `B_t` for the concentration experiment.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SamplingRule {
    /// `B_t = 1` every round.
    AlwaysOn,
    /// `B_t = 1` while the centred sum `S_{t-1}` is not above zero.
    WhileBehind,
}

impl SamplingRule {
    fn sample(&self, centred_sum: f64) -> bool {
        match self {
            SamplingRule::AlwaysOn => true,
            SamplingRule::WhileBehind => centred_sum <= 0.0,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConcentrationConfig {
    /// Rewards take values in `[0, bound]`.
    pub bound: f64,
    /// Sample threshold `s` defining the stopping time.
    pub samples: u64,
    pub deviation: f64,
    pub horizon: u64,
    pub rule: SamplingRule,
    pub trials: u64,
    pub seed: u64,
}

impl ConcentrationConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.bound > 0.0 && self.bound.is_finite()) {
            return Err(BanditError::Config("bound B must be positive".into()));
        }
        if !(self.deviation > 0.0 && self.deviation <= self.bound) {
            return Err(BanditError::Config("deviation must lie in (0, B]".into()));
        }
        if self.samples < 1 || self.samples > self.horizon {
            return Err(BanditError::Config("need 1 <= s <= T".into()));
        }
        if self.trials < 1 {
            return Err(BanditError::Config("need at least one trial".into()));
        }
        Ok(())
    }

    /// `exp(-2 s delta^2 / B^2)`.
    pub fn bound_value(&self) -> f64 {
        (-2.0 * self.samples as f64 * self.deviation.powi(2) / self.bound.powi(2)).exp()
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConcentrationReport {
    pub trials: u64,
    pub hits: u64,
    pub empirical: f64,
    pub bound: f64,
    /// Binomial standard error of `empirical`.
    pub std_error: f64,
}

/// Runs independent trials of the process `S_n = sum B_t (Z_t - E Z_t)` with
/// `Z_t = B * Bernoulli(1/2)`, stopped at the first round `phi` where
/// `t_phi >= s` (or `T + 1`), and counts the trials with
/// `S_phi >= t_phi delta` and `phi <= T`.
pub fn concentration_check(cfg: &ConcentrationConfig) -> Result<ConcentrationReport> {
    cfg.validate()?;
    let hits: u64 = (0..cfg.trials)
        .into_par_iter()
        .map(|trial| u64::from(concentration_trial(cfg, trial)))
        .sum();
    let p = hits as f64 / cfg.trials as f64;
    Ok(ConcentrationReport {
        trials: cfg.trials,
        hits,
        empirical: p,
        bound: cfg.bound_value(),
        std_error: (p * (1.0 - p) / cfg.trials as f64).sqrt(),
    })
}

fn concentration_trial(cfg: &ConcentrationConfig, trial: u64) -> bool {
    let mut rng = aux_rng(cfg.seed, b"stopping", trial);
    let half = cfg.bound / 2.0;
    let mut sum = 0.0;
    let mut sampled = 0u64;
    for _ in 0..cfg.horizon {
        let on = cfg.rule.sample(sum);
        let z = if rng.random::<bool>() { cfg.bound } else { 0.0 };
        if on {
            sum += z - half;
            sampled += 1;
            if sampled >= cfg.samples {
                return sum >= sampled as f64 * cfg.deviation;
            }
        }
    }
    false
}
