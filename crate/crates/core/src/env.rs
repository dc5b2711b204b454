//! Reward environments: stationary Bernoulli arms, the moving triangle and
//! continuous unimodal means on `[0, 1]`.
//!
//! Rounds are numbered from 1. Rewards are drawn lazily per `(arm, round)`
//! through a [`RewardStream`].

use crate::error::{check_probability, BanditError, Result};
use crate::graph::{best_arm, UnimodalGraph};
use crate::stream::RewardStream;

/// Mean-reward oracle for a bandit with a finite arm set.
pub trait Environment: Sync {
    fn num_arms(&self) -> usize;

    /// Mean of `arm` at `round`.
    fn mean(&self, arm: usize, round: u64) -> f64;

    /// Highest achievable mean at `round`.
    fn best_mean(&self, round: u64) -> f64;

    fn gap(&self, arm: usize, round: u64) -> f64 {
        self.best_mean(round) - self.mean(arm, round)
    }

    fn sample(&self, arm: usize, round: u64, stream: &mut RewardStream) -> f64 {
        stream.bernoulli(arm, round, self.mean(arm, round))
    }
}

/// Fixed Bernoulli means, unimodal on a graph.
#[derive(Debug, Clone)]
pub struct StationaryBernoulliEnv {
    means: Vec<f64>,
    graph: UnimodalGraph,
    best: usize,
}

impl StationaryBernoulliEnv {
    pub fn new(graph: UnimodalGraph, means: Vec<f64>) -> Result<Self> {
        for &m in &means {
            check_probability("mean", m)?;
        }
        graph.check_unimodal(&means)?;
        let best = best_arm(&means);
        Ok(Self { means, graph, best })
    }

    pub fn means(&self) -> &[f64] {
        &self.means
    }

    pub fn graph(&self) -> &UnimodalGraph {
        &self.graph
    }

    pub fn best_arm(&self) -> usize {
        self.best
    }

    pub fn sample_stationary(&self, arm: usize, round: u64, stream: &mut RewardStream) -> Result<f64> {
        if arm >= self.means.len() {
            return Err(BanditError::ArmOutOfRange {
                arm,
                num_arms: self.means.len(),
            });
        }
        Ok(self.sample(arm, round, stream))
    }
}

impl Environment for StationaryBernoulliEnv {
    fn num_arms(&self) -> usize {
        self.means.len()
    }

    fn mean(&self, arm: usize, _round: u64) -> f64 {
        self.means[arm]
    }

    fn best_mean(&self, _round: u64) -> f64 {
        self.means[self.best]
    }
}

/// `mu_k(n) = (K-1)/K - |w(n) - k| / K` with `w(n) = 1 + (K-1)(1 + sin(n sigma))/2`
/// on a line of `K` arms (`k` is 1-based in the formula).
#[derive(Debug, Clone)]
pub struct MovingTriangleEnv {
    num_arms: usize,
    speed: f64,
    graph: UnimodalGraph,
}

impl MovingTriangleEnv {
    pub fn new(num_arms: usize, speed: f64) -> Result<Self> {
        if num_arms < 2 {
            return Err(BanditError::Config(
                "moving triangle needs at least two arms".into(),
            ));
        }
        if !(speed.is_finite() && speed >= 0.0) {
            return Err(BanditError::Domain {
                name: "sigma",
                value: speed,
                domain: "[0, inf)",
            });
        }
        Ok(Self {
            num_arms,
            speed,
            graph: UnimodalGraph::line(num_arms)?,
        })
    }

    pub fn speed(&self) -> f64 {
        self.speed
    }

    pub fn graph(&self) -> &UnimodalGraph {
        &self.graph
    }

    /// Peak position `w(n)` on the 1-based arm axis.
    pub fn peak(&self, round: u64) -> f64 {
        let k = self.num_arms as f64;
        1.0 + (k - 1.0) * (1.0 + (round as f64 * self.speed).sin()) / 2.0
    }

    pub fn means_at(&self, round: u64) -> Vec<f64> {
        (0..self.num_arms).map(|arm| self.mean(arm, round)).collect()
    }

    pub fn sample_nonstationary(
        &self,
        arm: usize,
        round: u64,
        stream: &mut RewardStream,
    ) -> Result<f64> {
        if arm >= self.num_arms {
            return Err(BanditError::ArmOutOfRange {
                arm,
                num_arms: self.num_arms,
            });
        }
        Ok(self.sample(arm, round, stream))
    }

    /// `H(delta, T)`: number of `(round, edge)` pairs in rounds `1..=T` whose
    /// mean gap is below `delta`.
    pub fn h_delta(&self, delta: f64, horizon: u64) -> u64 {
        let edges = self.graph.edges();
        let mut count = 0;
        let mut means = vec![0.0; self.num_arms];
        for round in 1..=horizon {
            for (arm, m) in means.iter_mut().enumerate() {
                *m = self.mean(arm, round);
            }
            count += edges
                .iter()
                .filter(|&&(a, b)| (means[a] - means[b]).abs() < delta)
                .count() as u64;
        }
        count
    }

    /// Largest per-round change of any arm mean over rounds `1..=T`.
    pub fn lipschitz_audit(&self, horizon: u64) -> f64 {
        let mut worst: f64 = 0.0;
        let mut prev = self.means_at(1);
        for round in 2..=horizon {
            let cur = self.means_at(round);
            for (a, b) in prev.iter().zip(&cur) {
                worst = worst.max((a - b).abs());
            }
            prev = cur;
        }
        worst
    }
}

impl Environment for MovingTriangleEnv {
    fn num_arms(&self) -> usize {
        self.num_arms
    }

    fn mean(&self, arm: usize, round: u64) -> f64 {
        let k = self.num_arms as f64;
        (k - 1.0) / k - (self.peak(round) - (arm + 1) as f64).abs() / k
    }

    fn best_mean(&self, round: u64) -> f64 {
        let w = self.peak(round);
        // the arms nearest the peak; w lies in [1, K]
        let lower = w.floor().clamp(1.0, self.num_arms as f64) as usize - 1;
        let upper = (lower + 1).min(self.num_arms - 1);
        self.mean(lower, round).max(self.mean(upper, round))
    }
}

/// Piecewise-linear unimodal mean on `[0, 1]` plus the regularity constants
/// `(alpha, C1, C2, delta0)` that describe its peak.
#[derive(Debug, Clone, PartialEq)]
pub struct ContinuousTriangleEnv {
    knots: Vec<(f64, f64)>,
    peak: usize,
    exponent: f64,
    c1: f64,
    c2: f64,
    delta0: f64,
}

impl ContinuousTriangleEnv {
    /// `mu(x) = 1/2 - |x - 1/2|`, with `alpha = C1 = C2 = 1` and `delta0 = 1/2`.
    pub fn triangle() -> Self {
        Self {
            knots: vec![(0.0, 0.0), (0.5, 0.5), (1.0, 0.0)],
            peak: 1,
            exponent: 1.0,
            c1: 1.0,
            c2: 1.0,
            delta0: 0.5,
        }
    }

    /// Mean through `knots` (x strictly increasing from 0 to 1, values in
    /// `[0, 1]`, strictly up to a single peak then strictly down).
    pub fn piecewise(knots: Vec<(f64, f64)>, exponent: f64, c1: f64, c2: f64, delta0: f64) -> Result<Self> {
        if knots.len() < 2 {
            return Err(BanditError::Config("need at least two knots".into()));
        }
        if knots[0].0 != 0.0 || knots[knots.len() - 1].0 != 1.0 {
            return Err(BanditError::Config("knots must span [0, 1]".into()));
        }
        for &(_, y) in &knots {
            check_probability("knot mean", y)?;
        }
        if knots.windows(2).any(|w| w[1].0 <= w[0].0) {
            return Err(BanditError::Config("knot positions must increase".into()));
        }
        let values: Vec<f64> = knots.iter().map(|k| k.1).collect();
        let peak = best_arm(&values);
        let rising = values[..=peak].windows(2).all(|w| w[1] > w[0]);
        let falling = values[peak..].windows(2).all(|w| w[1] < w[0]);
        if !rising || !falling {
            return Err(BanditError::Config("knot means must be unimodal".into()));
        }
        Ok(Self {
            knots,
            peak,
            exponent,
            c1,
            c2,
            delta0,
        })
    }

    pub fn peak_location(&self) -> f64 {
        self.knots[self.peak].0
    }

    pub fn best_mean(&self) -> f64 {
        self.knots[self.peak].1
    }

    pub fn exponent(&self) -> f64 {
        self.exponent
    }

    /// `(C1, C2, delta0)`.
    pub fn regularity(&self) -> (f64, f64, f64) {
        (self.c1, self.c2, self.delta0)
    }

    pub fn continuous_mean(&self, x: f64) -> Result<f64> {
        check_probability("x", x)?;
        Ok(self.mean_unchecked(x))
    }

    pub(crate) fn mean_unchecked(&self, x: f64) -> f64 {
        let i = self
            .knots
            .windows(2)
            .position(|w| x <= w[1].0)
            .unwrap_or(self.knots.len() - 2);
        let (x0, y0) = self.knots[i];
        let (x1, y1) = self.knots[i + 1];
        y0 + (y1 - y0) * (x - x0) / (x1 - x0)
    }

    /// Bernoulli(`mu(x)`) draw; `arm` keys the reward stream.
    pub fn sample_continuous(&self, x: f64, arm: usize, round: u64, stream: &mut RewardStream) -> Result<f64> {
        let mean = self.continuous_mean(x)?;
        Ok(stream.bernoulli(arm, round, mean))
    }
}

/// Finite arm set placed at fixed points of a continuous environment.
/// Regret is measured against the continuous optimum.
#[derive(Debug, Clone)]
pub struct DiscretizedEnv {
    env: ContinuousTriangleEnv,
    positions: Vec<f64>,
    means: Vec<f64>,
}

impl DiscretizedEnv {
    pub fn new(env: ContinuousTriangleEnv, positions: Vec<f64>) -> Result<Self> {
        let means = positions
            .iter()
            .map(|&x| env.continuous_mean(x))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            env,
            positions,
            means,
        })
    }

    pub fn positions(&self) -> &[f64] {
        &self.positions
    }

    pub fn continuous(&self) -> &ContinuousTriangleEnv {
        &self.env
    }
}

impl Environment for DiscretizedEnv {
    fn num_arms(&self) -> usize {
        self.positions.len()
    }

    fn mean(&self, arm: usize, _round: u64) -> f64 {
        self.means[arm]
    }

    fn best_mean(&self, _round: u64) -> f64 {
        self.env.best_mean()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn stationary_rejects_non_unimodal() {
        let g = UnimodalGraph::line(3).unwrap();
        assert!(StationaryBernoulliEnv::new(g.clone(), vec![0.5, 0.2, 0.5]).is_err());
        assert!(StationaryBernoulliEnv::new(g.clone(), vec![0.1, 1.2, 0.5]).is_err());
        let env = StationaryBernoulliEnv::new(g, vec![0.1, 0.9, 0.5]).unwrap();
        assert_eq!(env.best_arm(), 1);
        let mut s = RewardStream::new(0, 0);
        assert!(env.sample_stationary(3, 1, &mut s).is_err());
    }

    #[test]
    fn stationary_empirical_mean() {
        let g = UnimodalGraph::line(3).unwrap();
        let env = StationaryBernoulliEnv::new(g, vec![0.0, 0.5, 1.0]).unwrap();
        let mut s = RewardStream::new(42, 0);
        let n = 100_000;
        let total: f64 = (1..=n).map(|r| env.sample_stationary(1, r, &mut s).unwrap()).sum();
        // 6 sigma band of Binomial(1e5, 1/2)/1e5 is 0.0095
        assert!((total / n as f64 - 0.5).abs() < 0.01);
        assert!((1..100).all(|r| env.sample_stationary(0, r, &mut s).unwrap() == 0.0));
        assert!((1..100).all(|r| env.sample_stationary(2, r, &mut s).unwrap() == 1.0));
    }

    #[test]
    fn moving_triangle_values() {
        let env = MovingTriangleEnv::new(10, 1e-3).unwrap();
        assert!((env.peak(0) - 5.5).abs() < 1e-12);
        let m = env.means_at(0);
        assert!((m[4] - 0.85).abs() < 1e-12);
        assert!((m[0] - 0.45).abs() < 1e-12);
        // sin(n sigma) = 1 when n sigma = pi/2
        let fast = MovingTriangleEnv::new(10, std::f64::consts::FRAC_PI_2).unwrap();
        let m = fast.means_at(1);
        assert!((fast.peak(1) - 10.0).abs() < 1e-12);
        assert_eq!(best_arm(&m), 9);
        assert!((m[9] - 0.9).abs() < 1e-12);
        assert!((fast.best_mean(1) - 0.9).abs() < 1e-12);
    }

    #[test]
    fn moving_triangle_best_mean_matches_max() {
        let env = MovingTriangleEnv::new(10, 1e-3).unwrap();
        for round in (0..20_000).step_by(37) {
            let direct = env.means_at(round).into_iter().fold(f64::MIN, f64::max);
            assert!((env.best_mean(round) - direct).abs() < 1e-15);
        }
    }

    #[test]
    fn moving_triangle_sampling() {
        let env = MovingTriangleEnv::new(10, 1e-3).unwrap();
        let mut s = RewardStream::new(3, 0);
        let trials = 100_000u64;
        // fixed round 0, independent draws keyed by distinct runs
        let draws: Vec<f64> = (0..trials)
            .map(|t| {
                let mut s = RewardStream::new(3, t);
                env.sample_nonstationary(4, 0, &mut s).unwrap()
            })
            .collect();
        let mean = draws.iter().sum::<f64>() / trials as f64;
        assert!((mean - 0.85).abs() < 0.01);
        // successive pairs of draws at the same (arm, round) across trials
        let xs = &draws[..draws.len() - 1];
        let ys = &draws[1..];
        let (mx, my) = (xs.iter().sum::<f64>() / xs.len() as f64, ys.iter().sum::<f64>() / ys.len() as f64);
        let cov: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum::<f64>() / xs.len() as f64;
        let corr = cov / (mx * (1.0 - mx)).sqrt() / (my * (1.0 - my)).sqrt();
        assert!(corr.abs() < 0.01, "corr {corr}");
        assert!(env.sample_nonstationary(10, 1, &mut s).is_err());
    }

    #[test]
    fn moving_triangle_stays_unimodal() {
        let env = MovingTriangleEnv::new(10, 1e-3).unwrap();
        for round in 1..=10_000 {
            let m = env.means_at(round);
            assert!(env.graph().check_unimodal(&m).is_ok(), "round {round}");
            assert!(m.iter().all(|&v| (0.0..=0.9).contains(&v)));
        }
    }

    #[test]
    fn lipschitz() {
        let env = MovingTriangleEnv::new(10, 1e-3).unwrap();
        assert!(env.lipschitz_audit(10_000) <= 1e-3);
        let slow = MovingTriangleEnv::new(10, 1e-4).unwrap();
        assert!(slow.lipschitz_audit(10_000) <= 1e-4);
        let still = MovingTriangleEnv::new(10, 0.0).unwrap();
        assert_eq!(still.lipschitz_audit(100), 0.0);
    }

    #[test]
    fn h_delta_limits() {
        let env = MovingTriangleEnv::new(10, 1e-3).unwrap();
        assert_eq!(env.h_delta(1e-9, 1_000), 0);
        assert_eq!(env.h_delta(1.0, 1_000), 9_000);
        assert!(env.h_delta(0.02, 5_000) <= env.h_delta(0.05, 5_000));
        assert!(env.h_delta(0.05, 2_000) <= env.h_delta(0.05, 5_000));
        // independent brute-force count
        assert_eq!(env.h_delta(0.05, 10_000), 4_458);
    }

    #[test]
    fn continuous_triangle() {
        let env = ContinuousTriangleEnv::triangle();
        assert_eq!(env.continuous_mean(0.5).unwrap(), 0.5);
        assert_eq!(env.continuous_mean(0.0).unwrap(), 0.0);
        assert_eq!(env.continuous_mean(0.25).unwrap(), 0.25);
        assert_eq!(env.continuous_mean(1.0).unwrap(), 0.0);
        assert!(env.continuous_mean(1.5).is_err());
        assert_eq!(env.peak_location(), 0.5);
        assert_eq!(env.regularity(), (1.0, 1.0, 0.5));
    }

    #[test]
    fn piecewise_validation() {
        let plateau = vec![(0.0, 0.1), (0.3, 0.5), (0.6, 0.5), (1.0, 0.0)];
        assert!(ContinuousTriangleEnv::piecewise(plateau, 1.0, 1.0, 1.0, 0.1).is_err());
        let skewed = vec![(0.0, 0.2), (0.8, 0.9), (1.0, 0.1)];
        let env = ContinuousTriangleEnv::piecewise(skewed, 1.0, 1.0, 4.0, 0.1).unwrap();
        assert_eq!(env.peak_location(), 0.8);
        assert!((env.continuous_mean(0.4).unwrap() - 0.55).abs() < 1e-12);
    }
}
