//! Ready-made experiments: the 17-arm triangle comparison, the moving
//! triangle at a given drift speed and UCB(delta) on the continuous triangle.

use crate::config::{EnvSpec, ExperimentConfig, GraphSpec, PolicySpec};
use crate::graph::triangle_means;
use crate::policy::PolicyKind;

/// Horizons reported by the stationary comparison.
pub const TABLE1_HORIZONS: [u64; 3] = [1_000, 10_000, 100_000];

/// Drift speeds swept by default in the non-stationary comparison.
pub const DEFAULT_SIGMAS: [f64; 5] = [1e-4, 3e-4, 1e-3, 3e-3, 1e-2];

/// Means `0.1, 0.2, ..., 0.9, ..., 0.2, 0.1` on a line of `num_arms` arms.
pub fn stationary_triangle(num_arms: usize) -> EnvSpec {
    EnvSpec::Stationary {
        graph: GraphSpec::Line(num_arms),
        means: triangle_means(num_arms, 0.1, 0.9)
            .into_iter()
            // keep the config text short: 0.1 steps print as 0.1, 0.2, ...
            .map(|m| (m * 1e12).round() / 1e12)
            .collect(),
    }
}

/// UCB, KL-UCB, UCB-U and OSUB on the 17-arm triangle up to `horizon`,
/// reported at the standard horizons that fit.
///
/// The UCB-type policies use `rho = 1`, KL-UCB keeps `c = 3` and OSUB uses
/// `c = 0`.
pub fn table1(horizon: u64, runs: u64, seed: u64) -> ExperimentConfig {
    let mut ucb = PolicySpec::new(PolicyKind::Ucb);
    ucb.rho = Some(1.0);
    let mut klucb = PolicySpec::new(PolicyKind::KlUcb);
    klucb.c = Some(3.0);
    let mut ucbu = PolicySpec::new(PolicyKind::UcbU);
    ucbu.rho = Some(1.0);
    let mut osub = PolicySpec::new(PolicyKind::Osub);
    osub.c = Some(0.0);
    let policies = vec![ucb, klucb, ucbu, osub];
    let mut cfg = ExperimentConfig::new(stationary_triangle(17), policies, horizon);
    cfg.checkpoints = TABLE1_HORIZONS.iter().copied().filter(|&t| t <= horizon).collect();
    if cfg.checkpoints.last() != Some(&horizon) {
        cfg.checkpoints.push(horizon);
    }
    cfg.runs = runs;
    cfg.seed = seed;
    cfg
}

/// The four sliding-window policies on a 10-arm moving triangle with drift
/// `sigma`, windows sized by their default recipes.
pub fn moving_triangle(sigma: f64, horizon: u64, runs: u64, seed: u64) -> ExperimentConfig {
    let policies = [
        PolicyKind::SwUcb,
        PolicyKind::SwKlUcb,
        PolicyKind::SwUcbU,
        PolicyKind::SwOsub,
    ]
    .into_iter()
    .map(PolicySpec::new)
    .collect();
    let mut cfg = ExperimentConfig::new(EnvSpec::MovingTriangle { arms: 10, sigma }, policies, horizon);
    cfg.runs = runs;
    cfg.seed = seed;
    cfg
}

/// UCB(delta) on `mu(x) = 1/2 - |x - 1/2|`.
pub fn continuous(horizon: u64, runs: u64, seed: u64) -> ExperimentConfig {
    let mut cfg = ExperimentConfig::new(
        EnvSpec::ContinuousTriangle { knots: None },
        vec![PolicySpec::new(PolicyKind::UcbDelta)],
        horizon,
    );
    cfg.runs = runs;
    cfg.seed = seed;
    cfg
}

/// Runs `T = 20 / sigma` rounds for each drift speed; sigma is appended to
/// each policy label as `name@sigma=<value>`.
pub fn sweep_sigma(sigmas: &[f64], runs: u64, seed: u64) -> Vec<ExperimentConfig> {
    sigmas
        .iter()
        .map(|&sigma| {
            let horizon = (20.0 / sigma).round() as u64;
            let mut cfg = moving_triangle(sigma, horizon, runs, seed);
            cfg.checkpoints = vec![horizon];
            for p in &mut cfg.policies {
                p.label = Some(format!("{}@sigma={sigma}", p.kind));
            }
            cfg
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn table1_layout() {
        let cfg = table1(100_000, 50, 7);
        assert_eq!(cfg.checkpoints, TABLE1_HORIZONS.to_vec());
        assert_eq!(cfg.policies.len(), 4);
        cfg.validate().unwrap();
        let short = table1(5_000, 2, 7);
        assert_eq!(short.checkpoints, vec![1_000, 5_000]);
    }

    #[test]
    fn triangle_is_the_reference_vector() {
        let EnvSpec::Stationary { means, .. } = stationary_triangle(17) else {
            unreachable!()
        };
        assert_eq!(means[0], 0.1);
        assert_eq!(means[8], 0.9);
        assert_eq!(means[16], 0.1);
        assert_eq!(means[7], 0.8);
    }

    #[test]
    fn sweep_horizons() {
        let cfgs = sweep_sigma(&[1e-3, 1e-4], 10, 1);
        assert_eq!(cfgs[0].horizon, 20_000);
        assert_eq!(cfgs[1].horizon, 200_000);
        assert_eq!(cfgs[0].policies[3].label(), "sw-osub@sigma=0.001");
    }
}
