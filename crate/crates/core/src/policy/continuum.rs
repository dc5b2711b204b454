use super::{UcbConfig, IndexPolicy, IndexRule, Policy, PolicyState};
use crate::env::{ContinuousTriangleEnv, DiscretizedEnv};
use crate::error::{BanditError, Result};

/// Grid step `(ln T / sqrt T)^(1/alpha)`.
pub fn discretization_step(horizon: f64, alpha: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha.is_finite()) {
        return Err(BanditError::Domain {
            name: "alpha",
            value: alpha,
            domain: "(0, inf)",
        });
    }
    if horizon.is_nan() || horizon < 3.0 {
        return Err(BanditError::Domain {
            name: "T",
            value: horizon,
            domain: "[3, inf)",
        });
    }
    let delta = (horizon.ln() / horizon.sqrt()).powf(1.0 / alpha);
    if delta >= 1.0 {
        return Err(BanditError::Config(format!(
            "horizon {horizon} too short: grid step {delta:.4} >= 1"
        )));
    }
    Ok(delta)
}

/// UCB on `ceil(1/delta)` arms placed at `x_k = (k - 1) delta` in `[0, 1]`.
#[derive(Debug, Clone)]
pub struct UcbDelta {
    delta: f64,
    env: DiscretizedEnv,
    inner: IndexPolicy<PolicyState>,
}

impl UcbDelta {
    pub fn new(horizon: u64, alpha: f64, env: ContinuousTriangleEnv) -> Result<Self> {
        let delta = discretization_step(horizon as f64, alpha)?;
        let num_arms = (1.0 / delta).ceil() as usize;
        let positions = (0..num_arms)
            .map(|k| (k as f64 * delta).clamp(0.0, 1.0))
            .collect();
        let env = DiscretizedEnv::new(env, positions)?;
        Ok(Self {
            delta,
            inner: IndexPolicy::new(num_arms, IndexRule::Ucb(UcbConfig::default())),
            env,
        })
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn positions(&self) -> &[f64] {
        self.env.positions()
    }

    /// The arm grid as a finite environment.
    pub fn discretized(&self) -> &DiscretizedEnv {
        &self.env
    }
}

impl Policy for UcbDelta {
    fn num_arms(&self) -> usize {
        self.inner.num_arms()
    }

    fn select(&mut self, round: u64) -> usize {
        self.inner.select(round)
    }

    fn observe(&mut self, arm: usize, reward: f64) -> Result<()> {
        self.inner.observe(arm, reward)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::env::Environment;

    #[test]
    fn step_sizes() {
        let d = discretization_step(1e4, 1.0).unwrap();
        assert!((d - 0.092_103_403_719_761_83).abs() < 1e-15);
        let e2 = std::f64::consts::E.powi(2);
        let d = discretization_step(e2, 1.0).unwrap();
        assert!((d - 2.0 / std::f64::consts::E).abs() < 1e-12);
        assert!(discretization_step(3.0, 0.0).is_err());
        assert!(discretization_step(2.0, 1.0).is_err());
        // ln T / sqrt T peaks at 2/e, so any valid T gives a step below one
        assert!(discretization_step(3.0, 1e6).unwrap() < 1.0);
    }

    #[test]
    fn grid_layout() {
        let p = UcbDelta::new(10_000, 1.0, ContinuousTriangleEnv::triangle()).unwrap();
        assert_eq!(p.num_arms(), 11);
        assert_eq!(p.positions()[0], 0.0);
        assert!(p.positions().iter().all(|&x| (0.0..=1.0).contains(&x)));
        let near_peak = p.positions()[5];
        assert!((near_peak - 0.460_517).abs() < 1e-6);
        assert!((p.discretized().gap(5, 1) - 0.039_483).abs() < 1e-6);
    }

    #[test]
    fn arm_count_grows_like_sqrt_t_over_log_t() {
        for &t in &[1e4, 1e6, 1e8] {
            let k = (1.0 / discretization_step(t, 1.0).unwrap()).ceil();
            let scale = t.sqrt() / t.ln();
            assert!(k >= scale && k <= scale + 1.0);
        }
    }
}
