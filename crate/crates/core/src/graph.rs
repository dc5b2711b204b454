//! Arm-similarity graphs and unimodality checks.
//!
//! Arms are 0-based internally; user-facing text (config files, error
//! messages, CLI output) uses 1-based arm numbers.

use crate::error::{BanditError, Result};

/// Undirected graph over `K` arms whose edges link arms with similar rewards.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct UnimodalGraph {
    num_arms: usize,
    edges: Vec<(usize, usize)>,
    adjacency: Vec<Vec<usize>>,
    neighborhoods: Vec<Vec<usize>>,
}

impl UnimodalGraph {
    /// Builds a graph from 0-based edge pairs. Duplicate edges are merged.
    pub fn from_edges(num_arms: usize, edges: &[(usize, usize)]) -> Result<Self> {
        if num_arms == 0 {
            return Err(BanditError::Config("a graph needs at least one arm".into()));
        }
        let mut adjacency = vec![Vec::new(); num_arms];
        for &(a, b) in edges {
            for arm in [a, b] {
                if arm >= num_arms {
                    return Err(BanditError::ArmOutOfRange { arm, num_arms });
                }
            }
            if a == b {
                return Err(BanditError::Config(format!("self-loop on arm {}", a + 1)));
            }
            adjacency[a].push(b);
            adjacency[b].push(a);
        }
        for list in &mut adjacency {
            list.sort_unstable();
            list.dedup();
        }
        let mut canonical: Vec<(usize, usize)> = adjacency
            .iter()
            .enumerate()
            .flat_map(|(a, list)| list.iter().filter(move |&&b| a < b).map(move |&b| (a, b)))
            .collect();
        canonical.sort_unstable();
        let neighborhoods = adjacency
            .iter()
            .enumerate()
            .map(|(k, list)| {
                let mut hood = list.clone();
                hood.push(k);
                hood.sort_unstable();
                hood
            })
            .collect();
        Ok(Self {
            num_arms,
            edges: canonical,
            adjacency,
            neighborhoods,
        })
    }

    /// Path `1 - 2 - ... - K`.
    pub fn line(num_arms: usize) -> Result<Self> {
        let edges: Vec<_> = (1..num_arms).map(|k| (k - 1, k)).collect();
        Self::from_edges(num_arms, &edges)
    }

    /// Arm 0 joined to `leaves` other arms.
    pub fn star(leaves: usize) -> Result<Self> {
        let edges: Vec<_> = (1..=leaves).map(|k| (0, k)).collect();
        Self::from_edges(leaves + 1, &edges)
    }

    pub fn num_arms(&self) -> usize {
        self.num_arms
    }

    /// Canonical edge list, each pair `(a, b)` with `a < b`, sorted.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    /// Graph neighbours of `arm`, excluding itself.
    pub fn adjacent(&self, arm: usize) -> Result<&[usize]> {
        self.check_arm(arm)?;
        Ok(&self.adjacency[arm])
    }

    /// `N(k)`: the neighbours of `arm` plus `arm`, sorted.
    pub fn neighborhood(&self, arm: usize) -> Result<&[usize]> {
        self.check_arm(arm)?;
        Ok(&self.neighborhoods[arm])
    }

    pub(crate) fn neighborhood_unchecked(&self, arm: usize) -> &[usize] {
        &self.neighborhoods[arm]
    }

    /// `gamma`, the largest neighbour count.
    pub fn max_degree(&self) -> usize {
        self.adjacency.iter().map(Vec::len).max().unwrap_or(0)
    }

    fn check_arm(&self, arm: usize) -> Result<()> {
        if arm < self.num_arms {
            Ok(())
        } else {
            Err(BanditError::ArmOutOfRange {
                arm,
                num_arms: self.num_arms,
            })
        }
    }

    fn check_len(&self, means: &[f64]) -> Result<()> {
        if means.len() == self.num_arms {
            Ok(())
        } else {
            Err(BanditError::LengthMismatch {
                expected: self.num_arms,
                got: means.len(),
            })
        }
    }

    /// Lists arms (0-based) that break unimodality.
    ///
    /// A vector is unimodal when its maximum is unique and every other arm has
    /// a neighbour with strictly larger mean, so greedy ascent can only stop at
    /// the best arm. With a tied maximum, every tied arm is reported.
    pub fn unimodality_violations(&self, means: &[f64]) -> Result<Vec<usize>> {
        self.check_len(means)?;
        let best = means.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let maximizers: Vec<usize> = (0..self.num_arms).filter(|&k| means[k] == best).collect();
        let mut violations = Vec::new();
        if maximizers.len() > 1 {
            violations.extend(&maximizers);
        }
        for k in 0..self.num_arms {
            if means[k] == best {
                continue;
            }
            if !self.adjacency[k].iter().any(|&j| means[j] > means[k]) {
                violations.push(k);
            }
        }
        violations.sort_unstable();
        Ok(violations)
    }

    /// Fails with [`BanditError::NotUnimodal`] (1-based arm list) on violation.
    pub fn check_unimodal(&self, means: &[f64]) -> Result<()> {
        let violations = self.unimodality_violations(means)?;
        if violations.is_empty() {
            Ok(())
        } else {
            Err(BanditError::NotUnimodal(
                violations.into_iter().map(|k| k + 1).collect(),
            ))
        }
    }

    /// Smallest gap between a suboptimal arm and its best neighbour.
    ///
    /// The best arm itself is excluded; its best-neighbour gap is negative.
    pub fn min_separation(&self, means: &[f64]) -> Result<f64> {
        self.check_unimodal(means)?;
        if self.num_arms < 2 {
            return Err(BanditError::Config(
                "separation needs at least two arms".into(),
            ));
        }
        let best = best_arm(means);
        let gap = (0..self.num_arms)
            .filter(|&k| k != best)
            .map(|k| {
                let top = self.adjacency[k]
                    .iter()
                    .map(|&j| means[j])
                    .fold(f64::NEG_INFINITY, f64::max);
                top - means[k]
            })
            .fold(f64::INFINITY, f64::min);
        Ok(gap)
    }
}

/// Lowest-index argmax.
pub(crate) fn best_arm(means: &[f64]) -> usize {
    let mut best = 0;
    for (k, &m) in means.iter().enumerate() {
        if m > means[best] {
            best = k;
        }
    }
    best
}

/// Triangle `lo, lo+step, ..., hi, ..., lo` over `num_arms` (odd) arms.
pub fn triangle_means(num_arms: usize, lo: f64, hi: f64) -> Vec<f64> {
    if num_arms == 1 {
        return vec![hi];
    }
    let half = (num_arms - 1) / 2;
    let peak = half as f64;
    let step = if half == 0 { 0.0 } else { (hi - lo) / peak };
    (0..num_arms)
        .map(|k| {
            let dist = (k as f64 - peak).abs();
            hi - step * dist
        })
        .collect()
}
