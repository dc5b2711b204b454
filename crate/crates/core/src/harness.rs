//! Batch simulation: build environments and policies from an
//! [`ExperimentConfig`], run them in parallel and aggregate regret curves.
//!
//! Results are a pure function of the config. Reward draws are keyed by
//! `(seed, run, arm, round)`, so all policies in a run face the same reward
//! table and thread scheduling cannot change anything.

use std::fmt::Write as _;
use std::path::Path;

use rayon::prelude::*;

use crate::analysis::{
    continuous_regret, nonstationary_regret, stationary_regret, RegretCurve, RoundRecord, RunTrace,
};
use crate::config::{EnvSpec, ExperimentConfig, PolicySpec, DEFAULT_C};
use crate::env::{
    ContinuousTriangleEnv, DiscretizedEnv, Environment, MovingTriangleEnv, StationaryBernoulliEnv,
};
use crate::error::{BanditError, Result};
use crate::graph::UnimodalGraph;
use crate::kl::ThresholdConfig;
use crate::policy::{IndexPolicy, IndexRule, LeaderPolicy, Policy, PolicyKind, UcbConfig, UcbDelta};
use crate::stream::RewardStream;

/// Environment instantiated from an [`EnvSpec`].
#[derive(Debug, Clone)]
pub enum BuiltEnv {
    Stationary(StationaryBernoulliEnv),
    Moving(MovingTriangleEnv),
    Continuous(ContinuousTriangleEnv),
}

impl BuiltEnv {
    pub fn from_spec(spec: &EnvSpec) -> Result<Self> {
        Ok(match spec {
            EnvSpec::Stationary { graph, means } => {
                BuiltEnv::Stationary(StationaryBernoulliEnv::new(graph.build()?, means.clone())?)
            }
            EnvSpec::MovingTriangle { arms, sigma } => {
                BuiltEnv::Moving(MovingTriangleEnv::new(*arms, *sigma)?)
            }
            EnvSpec::ContinuousTriangle { knots: None } => {
                BuiltEnv::Continuous(ContinuousTriangleEnv::triangle())
            }
            EnvSpec::ContinuousTriangle { knots: Some(knots) } => {
                let tri = ContinuousTriangleEnv::triangle();
                let (c1, c2, d0) = tri.regularity();
                BuiltEnv::Continuous(ContinuousTriangleEnv::piecewise(
                    knots.clone(),
                    tri.exponent(),
                    c1,
                    c2,
                    d0,
                )?)
            }
        })
    }

    fn graph(&self) -> Option<&UnimodalGraph> {
        match self {
            BuiltEnv::Stationary(e) => Some(e.graph()),
            BuiltEnv::Moving(e) => Some(e.graph()),
            BuiltEnv::Continuous(_) => None,
        }
    }

    fn sigma(&self) -> Option<f64> {
        match self {
            BuiltEnv::Moving(e) => Some(e.speed()),
            _ => None,
        }
    }
}

/// Plays the arm with the highest current mean.
struct Oracle<'a> {
    env: &'a dyn Environment,
    selected: usize,
}

impl Policy for Oracle<'_> {
    fn num_arms(&self) -> usize {
        self.env.num_arms()
    }

    fn select(&mut self, round: u64) -> usize {
        let mut best = 0;
        for k in 1..self.env.num_arms() {
            if self.env.mean(k, round) > self.env.mean(best, round) {
                best = k;
            }
        }
        self.selected = best;
        best
    }

    fn observe(&mut self, arm: usize, _reward: f64) -> Result<()> {
        if arm == self.selected {
            Ok(())
        } else {
            Err(BanditError::UnexpectedArm {
                observed: arm,
                selected: self.selected,
            })
        }
    }
}

/// Builds a finite-arm policy for `graph`'s arm set. Leader policies break
/// leader ties at random, keyed by `(seed, run)`.
pub fn build_policy(
    spec: &PolicySpec,
    graph: &UnimodalGraph,
    sigma: Option<f64>,
    seed: u64,
    run: u64,
) -> Result<Box<dyn Policy>> {
    let cfg = ThresholdConfig::new(spec.c.unwrap_or(DEFAULT_C))?;
    let ucb = IndexRule::Ucb(match spec.rho {
        Some(rho) => UcbConfig::new(rho)?,
        None => UcbConfig::default(),
    });
    let k = graph.num_arms();
    let tau = || -> Result<u64> {
        spec.tau
            .or_else(|| sigma.and_then(|s| spec.kind.default_tau(s)))
            .ok_or_else(|| {
                BanditError::Config(format!(
                    "policy {} needs 'tau' (no drift speed to derive it from)",
                    spec.kind
                ))
            })
    };
    // once one arm leads the whole window its count saturates at tau + 1, so a
    // derived tau divisible by the forcing period would force every round
    let leader_tau = || -> Result<u64> {
        let t = tau()?;
        let period = graph.max_degree() as u64 + 1;
        Ok(if spec.tau.is_none() && t.is_multiple_of(period) { t + 1 } else { t })
    };
    let kl = IndexRule::KlUcb(cfg);
    Ok(match spec.kind {
        PolicyKind::Ucb => Box::new(IndexPolicy::new(k, ucb)),
        PolicyKind::KlUcb => Box::new(IndexPolicy::new(k, kl)),
        PolicyKind::Osub => Box::new(LeaderPolicy::new(graph.clone(), kl).with_random_ties(seed, run)),
        PolicyKind::UcbU => Box::new(LeaderPolicy::new(graph.clone(), ucb).with_random_ties(seed, run)),
        PolicyKind::SwUcb => Box::new(IndexPolicy::windowed(k, ucb, tau()?)?),
        PolicyKind::SwKlUcb => Box::new(IndexPolicy::windowed(k, kl, tau()?)?),
        PolicyKind::SwOsub => {
            Box::new(LeaderPolicy::windowed(graph.clone(), kl, leader_tau()?)?.with_random_ties(seed, run))
        }
        PolicyKind::SwUcbU => {
            Box::new(LeaderPolicy::windowed(graph.clone(), ucb, leader_tau()?)?.with_random_ties(seed, run))
        }
        PolicyKind::UcbDelta | PolicyKind::Oracle => {
            return Err(BanditError::Config(format!(
                "{} is not a finite-arm policy",
                spec.kind
            )))
        }
    })
}

/// Plays `horizon` rounds of `policy` against `env`.
///
/// `positions` maps arms to points of a continuous arm set, if any.
pub fn simulate(
    policy: &mut dyn Policy,
    env: &dyn Environment,
    horizon: u64,
    checkpoints: Vec<u64>,
    stream: &mut RewardStream,
    positions: Option<&[f64]>,
) -> Result<RunTrace> {
    if policy.num_arms() != env.num_arms() {
        return Err(BanditError::Config(format!(
            "policy has {} arms but environment has {}",
            policy.num_arms(),
            env.num_arms()
        )));
    }
    let mut trace = RunTrace::with_capacity(checkpoints, horizon as usize)?;
    for round in 1..=horizon {
        let arm = policy.select(round);
        let reward = env.sample(arm, round, stream);
        policy.observe(arm, reward)?;
        trace.push(RoundRecord {
            round,
            arm,
            point: positions.map(|p| p[arm]),
            reward,
            gap: env.gap(arm, round),
        })?;
    }
    Ok(trace)
}

fn check_compatible(spec: &PolicySpec, env: &BuiltEnv) -> Result<()> {
    match (spec.kind, env) {
        (PolicyKind::UcbDelta | PolicyKind::Oracle, BuiltEnv::Continuous(_)) => Ok(()),
        (_, BuiltEnv::Continuous(_)) => Err(BanditError::Config(format!(
            "policy {} cannot run on a continuous environment; use ucb-delta",
            spec.kind
        ))),
        (PolicyKind::UcbDelta, _) => Err(BanditError::Config(
            "ucb-delta requires a continuous_triangle environment".into(),
        )),
        _ => Ok(()),
    }
}

/// Regret curve of one run.
fn run_once(cfg: &ExperimentConfig, env: &BuiltEnv, spec: &PolicySpec, run: u64) -> Result<RegretCurve> {
    let mut stream = RewardStream::new(cfg.seed, run);
    let checkpoints = cfg.checkpoints.clone();
    match env {
        BuiltEnv::Continuous(cont) => {
            let (mut policy, arms): (Box<dyn Policy + '_>, DiscretizedEnv) = match spec.kind {
                PolicyKind::UcbDelta => {
                    let p = UcbDelta::new(cfg.horizon, spec.alpha.unwrap_or(cont.exponent()), cont.clone())?;
                    let arms = p.discretized().clone();
                    (Box::new(p), arms)
                }
                _ => {
                    let arms = DiscretizedEnv::new(cont.clone(), vec![cont.peak_location()])?;
                    (Box::new(SingleArm), arms)
                }
            };
            let positions = arms.positions().to_vec();
            let trace = simulate(policy.as_mut(), &arms, cfg.horizon, checkpoints, &mut stream, Some(&positions))?;
            continuous_regret(&trace, cont)
        }
        BuiltEnv::Stationary(st) => {
            let trace = match spec.kind {
                PolicyKind::Oracle => {
                    let mut oracle = Oracle { env: st, selected: 0 };
                    simulate(&mut oracle, st, cfg.horizon, checkpoints, &mut stream, None)?
                }
                _ => {
                    let mut policy = build_policy(spec, st.graph(), None, cfg.seed, run)?;
                    simulate(policy.as_mut(), st, cfg.horizon, checkpoints, &mut stream, None)?
                }
            };
            stationary_regret(&trace, st.means())
        }
        BuiltEnv::Moving(mv) => {
            let trace = match spec.kind {
                PolicyKind::Oracle => {
                    let mut oracle = Oracle { env: mv, selected: 0 };
                    simulate(&mut oracle, mv, cfg.horizon, checkpoints, &mut stream, None)?
                }
                _ => {
                    let mut policy = build_policy(spec, mv.graph(), env.sigma(), cfg.seed, run)?;
                    simulate(policy.as_mut(), mv, cfg.horizon, checkpoints, &mut stream, None)?
                }
            };
            nonstationary_regret(&trace, mv)
        }
    }
}

/// Always plays arm 0 of a one-arm grid.
struct SingleArm;

impl Policy for SingleArm {
    fn num_arms(&self) -> usize {
        1
    }

    fn select(&mut self, _round: u64) -> usize {
        0
    }

    fn observe(&mut self, _arm: usize, _reward: f64) -> Result<()> {
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResultRow {
    pub policy: String,
    pub horizon: u64,
    pub mean_regret: f64,
    pub std_regret: f64,
    /// `mean_regret / ln(horizon)`.
    pub regret_per_log_t: f64,
    pub runs: u64,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ResultTable {
    pub rows: Vec<ResultRow>,
}

impl ResultTable {
    pub fn row(&self, policy: &str, horizon: u64) -> Option<&ResultRow> {
        self.rows
            .iter()
            .find(|r| r.policy == policy && r.horizon == horizon)
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("policy,T,mean_regret,std_regret,regret_per_logT,runs\n");
        for r in &self.rows {
            let _ = writeln!(
                s,
                "{},{},{:.10e},{:.10e},{:.10e},{}",
                r.policy, r.horizon, r.mean_regret, r.std_regret, r.regret_per_log_t, r.runs
            );
        }
        s
    }
}

/// Writes `table` as CSV to `path`.
pub fn emit_csv(table: &ResultTable, path: &Path) -> Result<()> {
    if table.rows.is_empty() {
        return Err(BanditError::Config("refusing to write an empty table".into()));
    }
    std::fs::write(path, table.to_csv()).map_err(|e| BanditError::Io(format!("{}: {e}", path.display())))
}

/// Mean and sample standard deviation of each checkpoint across runs.
pub fn aggregate(label: &str, checkpoints: &[u64], curves: &[RegretCurve]) -> Vec<ResultRow> {
    let runs = curves.len();
    checkpoints
        .iter()
        .enumerate()
        .map(|(i, &horizon)| {
            let values: Vec<f64> = curves.iter().map(|c| c[i].1).collect();
            let mean = values.iter().sum::<f64>() / runs as f64;
            let std = if runs > 1 {
                (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (runs - 1) as f64).sqrt()
            } else {
                0.0
            };
            ResultRow {
                policy: label.to_owned(),
                horizon,
                mean_regret: mean,
                std_regret: std,
                regret_per_log_t: mean / (horizon as f64).ln(),
                runs: runs as u64,
            }
        })
        .collect()
}

/// Runs every policy of `cfg` for `cfg.runs` runs. `threads = None` uses the
/// global rayon pool; the result does not depend on it.
pub fn run_experiment(cfg: &ExperimentConfig, threads: Option<usize>) -> Result<ResultTable> {
    cfg.validate()?;
    let env = BuiltEnv::from_spec(&cfg.environment)?;
    for spec in &cfg.policies {
        check_compatible(spec, &env)?;
        // surface construction errors before spawning work
        if let (Some(graph), false) = (env.graph(), spec.kind == PolicyKind::Oracle) {
            build_policy(spec, graph, env.sigma(), cfg.seed, 0)?;
        }
    }
    let jobs: Vec<(usize, u64)> = (0..cfg.policies.len())
        .flat_map(|p| (0..cfg.runs).map(move |r| (p, r)))
        .collect();
    let work = || -> Result<Vec<RegretCurve>> {
        jobs.par_iter()
            .map(|&(p, run)| run_once(cfg, &env, &cfg.policies[p], run))
            .collect()
    };
    let curves = match threads {
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| BanditError::Config(format!("thread pool: {e}")))?
            .install(work)?,
        None => work()?,
    };
    let per_policy = cfg.runs as usize;
    let rows = cfg
        .policies
        .iter()
        .zip(curves.chunks(per_policy))
        .flat_map(|(spec, chunk)| aggregate(&spec.label(), &cfg.checkpoints, chunk))
        .collect();
    Ok(ResultTable { rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::GraphSpec;

    fn small(kinds: &[PolicyKind], horizon: u64, runs: u64) -> ExperimentConfig {
        let mut cfg = ExperimentConfig::new(
            EnvSpec::Stationary {
                graph: GraphSpec::Line(5),
                means: vec![0.2, 0.4, 0.8, 0.5, 0.1],
            },
            kinds.iter().map(|&k| PolicySpec::new(k)).collect(),
            horizon,
        );
        cfg.runs = runs;
        cfg.seed = 3;
        cfg
    }

    #[test]
    fn oracle_has_zero_regret_everywhere() {
        let mut cfg = small(&[PolicyKind::Oracle], 200, 3);
        let t = run_experiment(&cfg, None).unwrap();
        assert!(t.rows.iter().all(|r| r.mean_regret == 0.0 && r.std_regret == 0.0));
        cfg.environment = EnvSpec::MovingTriangle { arms: 10, sigma: 1e-2 };
        let t = run_experiment(&cfg, None).unwrap();
        assert!(t.rows.iter().all(|r| r.mean_regret == 0.0));
        cfg.environment = EnvSpec::ContinuousTriangle { knots: None };
        let t = run_experiment(&cfg, None).unwrap();
        assert!(t.rows.iter().all(|r| r.mean_regret == 0.0));
    }

    #[test]
    fn deterministic_and_thread_invariant() {
        let mut cfg = small(&[PolicyKind::Osub, PolicyKind::Ucb, PolicyKind::KlUcb], 10, 1);
        cfg.checkpoints = vec![10];
        let a = run_experiment(&cfg, Some(1)).unwrap().to_csv();
        let b = run_experiment(&cfg, Some(1)).unwrap().to_csv();
        assert_eq!(a, b);
        cfg.horizon = 500;
        cfg.runs = 6;
        cfg.checkpoints = vec![50, 500];
        let one = run_experiment(&cfg, Some(1)).unwrap().to_csv();
        let four = run_experiment(&cfg, Some(4)).unwrap().to_csv();
        assert_eq!(one, four);
    }

    #[test]
    fn derived_leader_window_skips_the_forcing_period() {
        // sigma = 3e-3 derives tau = 57, a multiple of 3 on a line
        assert_eq!(PolicyKind::SwOsub.default_tau(3e-3), Some(57));
        let mut derived = PolicySpec::new(PolicyKind::SwOsub);
        derived.label = Some("x".into());
        let mut explicit = derived.clone();
        explicit.tau = Some(58);
        let run = |p: PolicySpec| {
            let mut cfg = ExperimentConfig::new(
                EnvSpec::MovingTriangle { arms: 10, sigma: 3e-3 },
                vec![p],
                2_000,
            );
            cfg.runs = 2;
            run_experiment(&cfg, None).unwrap().to_csv()
        };
        assert_eq!(run(derived), run(explicit.clone()));
        explicit.tau = Some(57);
        assert_ne!(run(PolicySpec { tau: None, ..explicit.clone() }), run(explicit));
    }

    #[test]
    fn aggregation_matches_serial_fold() {
        let cfg = small(&[PolicyKind::UcbU], 300, 5);
        let table = run_experiment(&cfg, None).unwrap();
        let env = BuiltEnv::from_spec(&cfg.environment).unwrap();
        let last = cfg.checkpoints.len() - 1;
        let mut total = 0.0;
        for run in 0..cfg.runs {
            total += run_once(&cfg, &env, &cfg.policies[0], run).unwrap()[last].1;
        }
        let row = table.row("ucbu", 300).unwrap();
        assert!((row.mean_regret - total / 5.0).abs() < 1e-9);
    }

    #[test]
    fn incompatible_pairs_are_rejected() {
        let mut cfg = small(&[PolicyKind::UcbDelta], 100, 1);
        assert!(run_experiment(&cfg, None).is_err());
        cfg.environment = EnvSpec::ContinuousTriangle { knots: None };
        cfg.policies = vec![PolicySpec::new(PolicyKind::Osub)];
        assert!(run_experiment(&cfg, None).is_err());
        // stationary env has no drift speed to size a window from
        let cfg = small(&[PolicyKind::SwOsub], 100, 1);
        assert!(run_experiment(&cfg, None).is_err());
        let mut cfg = small(&[PolicyKind::SwOsub], 100, 1);
        cfg.policies[0].tau = Some(20);
        assert!(run_experiment(&cfg, None).is_ok());
    }

    #[test]
    fn csv_layout() {
        let table = ResultTable {
            rows: vec![ResultRow {
                policy: "osub".into(),
                horizon: 1000,
                mean_regret: 41.5,
                std_regret: 3.25,
                regret_per_log_t: 41.5 / 1000f64.ln(),
                runs: 50,
            }],
        };
        let csv = table.to_csv();
        let lines: Vec<&str> = csv.lines().collect();
        assert_eq!(lines.len(), 2);
        assert_eq!(lines[0], "policy,T,mean_regret,std_regret,regret_per_logT,runs");
        assert!(lines[1].starts_with("osub,1000,4.1500000000e1,3.2500000000e0,"));
        assert!(csv.ends_with('\n'));
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("out.csv");
        emit_csv(&table, &path).unwrap();
        let first = std::fs::read(&path).unwrap();
        emit_csv(&table, &path).unwrap();
        assert_eq!(first, std::fs::read(&path).unwrap());
        assert!(emit_csv(&ResultTable::default(), &path).is_err());
        assert!(emit_csv(&table, Path::new("/nonexistent/dir/out.csv")).is_err());
    }

    #[test]
    fn regret_is_nondecreasing_over_checkpoints() {
        let cfg = small(&[PolicyKind::Osub, PolicyKind::KlUcb], 2_000, 4);
        let table = run_experiment(&cfg, None).unwrap();
        for label in ["osub", "klucb"] {
            let means: Vec<f64> = table
                .rows
                .iter()
                .filter(|r| r.policy == label)
                .map(|r| r.mean_regret)
                .collect();
            assert!(means.windows(2).all(|w| w[0] <= w[1]));
        }
    }
}
