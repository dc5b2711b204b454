//! WebAssembly bindings behind the static demo page in `www/`.
//!
//! Each export is a thin wrapper over a plain Rust function so the logic can
//! be tested natively; the wrappers only translate errors into `JsError`.

use unibandit::config::{EnvSpec, GraphSpec};
use unibandit::kl::threshold;
use unibandit::{
    kl_ucb_upper, lower_bound_c, run_experiment, BanditError, ExperimentConfig, MovingTriangleEnv,
    PolicyKind, PolicySpec, Result, ThresholdConfig, UnimodalGraph,
};
use wasm_bindgen::prelude::*;

/// Longest simulation the page will run in one call.
pub const MAX_ROUNDS: u64 = 2_000_000;

fn js(e: BanditError) -> JsError {
    JsError::new(&e.to_string())
}

fn parse_list(text: &str) -> Result<Vec<f64>> {
    text.split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|s| {
            s.trim()
                .parse()
                .map_err(|_| BanditError::Config(format!("'{}' is not a number", s.trim())))
        })
        .collect()
}

/// KL-UCB index of an arm with empirical mean `mean` after `pulls` samples at round `round`.
pub fn index_value(mean: f64, pulls: u64, round: u64, c: f64) -> Result<f64> {
    let thr = threshold(round, ThresholdConfig::new(c)?);
    kl_ucb_upper(mean, pulls, thr)
}

/// Index as a function of the pull count, for `pulls = 1..=max_pulls`.
pub fn index_curve(mean: f64, max_pulls: u64, round: u64, c: f64) -> Result<Vec<f64>> {
    (1..=max_pulls).map(|s| index_value(mean, s, round, c)).collect()
}

/// Mean regret of each policy on a line of Bernoulli arms, as CSV.
///
/// The first line is a comment carrying the asymptotic constant of the instance.
pub fn simulate_line_csv(
    means: &str,
    policies: &str,
    horizon: u64,
    runs: u64,
    seed: u64,
) -> Result<String> {
    let means = parse_list(means)?;
    if horizon.saturating_mul(runs) > MAX_ROUNDS {
        return Err(BanditError::Config(format!(
            "horizon x runs must stay below {MAX_ROUNDS} in the browser"
        )));
    }
    let graph = UnimodalGraph::line(means.len())?;
    graph.check_unimodal(&means)?;
    let c = lower_bound_c(&graph, &means)?;
    let specs = policies
        .split(',')
        .filter(|s| !s.trim().is_empty())
        .map(|name| {
            let kind: PolicyKind = name.trim().parse()?;
            let mut spec = PolicySpec::new(kind);
            // the settings used for the 17-arm reference table
            match kind {
                PolicyKind::Ucb | PolicyKind::UcbU => spec.rho = Some(1.0),
                PolicyKind::Osub => spec.c = Some(0.0),
                _ => {}
            }
            Ok(spec)
        })
        .collect::<Result<Vec<_>>>()?;
    let env = EnvSpec::Stationary {
        graph: GraphSpec::Line(means.len()),
        means,
    };
    let mut cfg = ExperimentConfig::new(env, specs, horizon);
    cfg.runs = runs;
    cfg.seed = seed;
    let table = run_experiment(&cfg, None)?;
    Ok(format!("# c={c}\n{}", table.to_csv()))
}

/// Arm means of the moving triangle at `round`.
pub fn moving_means_at(arms: usize, sigma: f64, round: u64) -> Result<Vec<f64>> {
    Ok(MovingTriangleEnv::new(arms, sigma)?.means_at(round))
}

#[wasm_bindgen(js_name = klUcbCurve)]
pub fn kl_ucb_curve(
    mean: f64,
    max_pulls: u32,
    round: u32,
    c: f64,
) -> std::result::Result<Vec<f64>, JsError> {
    index_curve(mean, max_pulls.into(), round.into(), c).map_err(js)
}

#[wasm_bindgen(js_name = simulateLine)]
pub fn simulate_line(
    means: &str,
    policies: &str,
    horizon: u32,
    runs: u32,
    seed: u32,
) -> std::result::Result<String, JsError> {
    simulate_line_csv(means, policies, horizon.into(), runs.into(), seed.into()).map_err(js)
}

#[wasm_bindgen(js_name = movingMeans)]
pub fn moving_means(arms: u32, sigma: f64, round: u32) -> std::result::Result<Vec<f64>, JsError> {
    moving_means_at(arms as usize, sigma, round.into()).map_err(js)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn index_shrinks_with_pulls() {
        let curve = index_curve(0.5, 50, 1_000, 0.0).unwrap();
        assert_eq!(curve.len(), 50);
        assert!(curve.windows(2).all(|w| w[1] <= w[0]));
        assert!(curve[49] > 0.5 && curve[0] <= 1.0);
        assert!(index_value(0.5, 3, 10, -1.0).is_err());
    }

    #[test]
    fn simulation_reports_rows_and_constant() {
        let csv = simulate_line_csv("0.2, 0.5, 0.9, 0.4", "klucb,osub", 1_000, 2, 1).unwrap();
        let mut lines = csv.lines();
        let c: f64 = lines.next().unwrap().strip_prefix("# c=").unwrap().parse().unwrap();
        assert!(c > 0.0);
        assert!(lines.next().unwrap().starts_with("policy,T,"));
        assert!(csv.lines().any(|l| l.starts_with("osub,1000,")));
        assert_eq!(csv, simulate_line_csv("0.2,0.5,0.9,0.4", "klucb,osub", 1_000, 2, 1).unwrap());
    }

    #[test]
    fn simulation_rejects_bad_input() {
        assert!(simulate_line_csv("0.2,x", "osub", 100, 1, 0).is_err());
        assert!(simulate_line_csv("0.2,0.9,0.1,0.8", "osub", 100, 1, 0).is_err());
        assert!(simulate_line_csv("0.2,0.9", "nope", 100, 1, 0).is_err());
        assert!(simulate_line_csv("0.2,0.9", "osub", MAX_ROUNDS, 2, 0).is_err());
    }

    #[test]
    fn moving_means_peak_once() {
        let means = moving_means_at(10, 1e-3, 250).unwrap();
        assert_eq!(means.len(), 10);
        let g = UnimodalGraph::line(10).unwrap();
        assert!(g.check_unimodal(&means).is_ok());
        assert!(moving_means_at(10, -1e-3, 1).is_err());
    }
}
