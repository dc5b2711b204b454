//! Bernoulli KL divergence and the KL upper-confidence solver.
//!
//! Every KL-based index in the crate reduces to [`kl_ucb_upper`]: the largest
//! mean `q >= p` such that `s * I(p, q)` stays within an exploration budget.

use crate::error::{check_probability, BanditError, Result};

/// Bisection stops after this many halvings even if the bracket is still wide.
pub const MAX_BISECTION_STEPS: usize = 64;
/// Bisection stops once the bracket is this narrow and the lower end is
/// within this distance of the threshold, measured as `thr - s I(p, q)`.
pub const BISECTION_TOLERANCE: f64 = 1e-9;

/// Exploration constant `c` multiplying `log log n` in the index threshold.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThresholdConfig {
    c: f64,
}

impl ThresholdConfig {
    pub fn new(c: f64) -> Result<Self> {
        if c.is_finite() && c >= 0.0 {
            Ok(Self { c })
        } else {
            Err(BanditError::Domain {
                name: "c",
                value: c,
                domain: "[0, inf)",
            })
        }
    }

    pub fn c(&self) -> f64 {
        self.c
    }
}

impl Default for ThresholdConfig {
    fn default() -> Self {
        Self { c: 3.0 }
    }
}

/// `I(p, q) = p log(p/q) + (1-p) log((1-p)/(1-q))` with `0 log 0 = 0`.
pub fn bernoulli_kl(p: f64, q: f64) -> Result<f64> {
    check_probability("p", p)?;
    check_probability("q", q)?;
    Ok(kl_unchecked(p, q))
}

#[inline]
pub(crate) fn kl_unchecked(p: f64, q: f64) -> f64 {
    if p == q {
        return 0.0;
    }
    let head = if p > 0.0 {
        if q == 0.0 {
            return f64::INFINITY;
        }
        p * (p / q).ln()
    } else {
        0.0
    };
    let tail = if p < 1.0 {
        if q == 1.0 {
            return f64::INFINITY;
        }
        (1.0 - p) * ((1.0 - p) / (1.0 - q)).ln()
    } else {
        0.0
    };
    // rounding can push the sum a hair below zero when p and q are close
    (head + tail).max(0.0)
}

/// `log(n+) + c log(log(n+))` with `n+ = max(n, 3)`.
pub fn threshold(n: u64, cfg: ThresholdConfig) -> f64 {
    let n = n.max(3) as f64;
    let log_n = n.ln();
    log_n + cfg.c * log_n.ln()
}

/// `sup { q >= p : s I(p, q) <= thr }`, with `F(p, 0, .) = F(1, s, .) = 1`.
pub fn kl_ucb_upper(p: f64, s: u64, thr: f64) -> Result<f64> {
    check_probability("p", p)?;
    if thr.is_nan() || thr < 0.0 {
        return Err(BanditError::Domain {
            name: "thr",
            value: thr,
            domain: "[0, inf]",
        });
    }
    Ok(kl_ucb_upper_unchecked(p, s, thr))
}

pub(crate) fn kl_ucb_upper_unchecked(p: f64, s: u64, thr: f64) -> f64 {
    if s == 0 || p >= 1.0 {
        return 1.0;
    }
    if thr <= 0.0 {
        return p;
    }
    let budget = thr / s as f64;
    // I(p, 1) = -log(p) is finite for p > 0
    if p > 0.0 && -p.ln() <= budget {
        return 1.0;
    }
    let (mut lo, mut hi) = (p, 1.0);
    let s = s as f64;
    for _ in 0..MAX_BISECTION_STEPS {
        // a narrow bracket alone is not enough when s I'(q) is large
        if hi - lo <= BISECTION_TOLERANCE && thr - s * kl_unchecked(p, lo) <= BISECTION_TOLERANCE {
            break;
        }
        let mid = 0.5 * (lo + hi);
        if kl_unchecked(p, mid) > budget {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    lo
}

/// Quadratic bracket `(2 (p-q)^2, (p-q)^2 / (q (1-q)))` around `I(p, q)` for `p <= q`.
pub fn pinsker_bounds(p: f64, q: f64) -> Result<(f64, f64)> {
    check_probability("p", p)?;
    check_probability("q", q)?;
    if q <= 0.0 || q >= 1.0 {
        return Err(BanditError::Domain {
            name: "q",
            value: q,
            domain: "(0, 1)",
        });
    }
    if p > q {
        return Err(BanditError::Domain {
            name: "p",
            value: p,
            domain: "[0, q]",
        });
    }
    let sq = (p - q) * (p - q);
    Ok((2.0 * sq, sq / (q * (1.0 - q))))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn close(a: f64, b: f64, tol: f64) -> bool {
        (a - b).abs() <= tol
    }

    #[test]
    fn kl_reference_values() {
        assert_eq!(bernoulli_kl(0.5, 0.5).unwrap(), 0.0);
        // 30-digit closed-form evaluations
        assert!(close(bernoulli_kl(0.4, 0.6).unwrap(), 0.081_093_021_621_632_88, 1e-15));
        assert!(close(bernoulli_kl(0.8, 0.9).unwrap(), 0.044_403_007_586_882_3, 1e-15));
        assert!(close(bernoulli_kl(0.0, 0.5).unwrap(), std::f64::consts::LN_2, 1e-15));
    }

    #[test]
    fn kl_edge_conventions() {
        assert_eq!(bernoulli_kl(0.0, 0.0).unwrap(), 0.0);
        assert_eq!(bernoulli_kl(1.0, 1.0).unwrap(), 0.0);
        assert_eq!(bernoulli_kl(0.3, 1.0).unwrap(), f64::INFINITY);
        assert_eq!(bernoulli_kl(0.3, 0.0).unwrap(), f64::INFINITY);
        assert!(close(bernoulli_kl(1.0, 0.5).unwrap(), std::f64::consts::LN_2, 1e-15));
    }

    #[test]
    fn kl_rejects_bad_inputs() {
        assert!(bernoulli_kl(-0.1, 0.5).is_err());
        assert!(bernoulli_kl(0.5, 1.5).is_err());
        assert!(bernoulli_kl(f64::NAN, 0.5).is_err());
    }

    #[test]
    fn threshold_values() {
        let zero = ThresholdConfig::new(0.0).unwrap();
        assert!(close(threshold(3, zero), 3f64.ln(), 1e-15));
        assert_eq!(threshold(1, zero), threshold(3, zero));
        let three = ThresholdConfig::new(3.0).unwrap();
        assert!(close(threshold(100, three), 9.186_709_063_411_795, 1e-12));
        assert!(ThresholdConfig::new(-1.0).is_err());
        assert_eq!(ThresholdConfig::default().c(), 3.0);
    }

    #[test]
    fn solver_conventions() {
        assert_eq!(kl_ucb_upper(0.7, 0, 5.0).unwrap(), 1.0);
        assert_eq!(kl_ucb_upper(1.0, 5, 2.0).unwrap(), 1.0);
        assert_eq!(kl_ucb_upper(0.5, 10, 0.0).unwrap(), 0.5);
        assert!(kl_ucb_upper(1.2, 3, 1.0).is_err());
        assert!(kl_ucb_upper(0.5, 3, -1.0).is_err());
    }

    #[test]
    fn solver_reference_value() {
        let q = kl_ucb_upper(0.5, 10, 100f64.ln()).unwrap();
        assert!(close(q, 0.887_908_761_645_861_4, 1e-8));
        // closed form of the symmetric case: q(1-q) = 0.25 exp(-2 ln(100)/10)
        assert!(close(q * (1.0 - q), 0.25 * (-0.2 * 100f64.ln()).exp(), 1e-8));
    }

    #[test]
    fn solver_saturates_when_budget_exceeds_kl_to_one() {
        // I(0.9, 1) = -ln 0.9 ~ 0.105; budget 1.0 per sample swamps it
        assert_eq!(kl_ucb_upper(0.9, 1, 1.0).unwrap(), 1.0);
        // p = 0 has I(0, 1) = inf, so the solution is interior
        let q = kl_ucb_upper(0.0, 10, 1.0).unwrap();
        assert!(q > 0.0 && q < 1.0);
        assert!(close(10.0 * kl_unchecked(0.0, q), 1.0, 1e-6));
    }

    #[test]
    fn pinsker_values() {
        assert_eq!(pinsker_bounds(0.5, 0.5).unwrap(), (0.0, 0.0));
        let (lo, hi) = pinsker_bounds(0.4, 0.6).unwrap();
        assert!(close(lo, 0.08, 1e-15) && close(hi, 0.04 / 0.24, 1e-15));
        let (lo, hi) = pinsker_bounds(0.8, 0.9).unwrap();
        assert!(close(lo, 0.02, 1e-15) && close(hi, 0.01 / 0.09, 1e-14));
        assert!(pinsker_bounds(0.2, 1.0).is_err());
        assert!(pinsker_bounds(0.0, 0.0).is_err());
    }
}
