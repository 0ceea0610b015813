use crate::critical::{CriticalType, TypeCounts};
use crate::error::{Error, Result};

use super::special::beta_quantile;

/// Confidence level γ in (0, 1); α = 1 − γ.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct ConfidenceLevel(f64);

impl ConfidenceLevel {
    pub fn new(gamma: f64) -> Result<Self> {
        if !(gamma > 0.0 && gamma < 1.0) {
            return Err(Error::input(format!(
                "confidence level must lie in (0, 1), got {gamma}"
            )));
        }
        Ok(ConfidenceLevel(gamma))
    }

    pub fn gamma(self) -> f64 {
        self.0
    }

    pub fn alpha(self) -> f64 {
        1.0 - self.0
    }
}

impl Default for ConfidenceLevel {
    fn default() -> Self {
        ConfidenceLevel(0.95)
    }
}

/// Point estimate and confidence interval for one binomial proportion.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntervalEstimate {
    pub p_hat: f64,
    pub p_lower: f64,
    pub p_upper: f64,
    pub c: usize,
    pub m: usize,
}

impl IntervalEstimate {
    pub fn width(&self) -> f64 {
        self.p_upper - self.p_lower
    }

    pub fn contains(&self, p: f64) -> bool {
        self.p_lower <= p && p <= self.p_upper
    }
}

fn check_count(c: usize, m: usize) -> Result<()> {
    if m == 0 {
        return Err(Error::input("ensemble size must be at least 1"));
    }
    if c > m {
        return Err(Error::input(format!("count {c} exceeds ensemble size {m}")));
    }
    Ok(())
}

/// Relative frequency c / m.
pub fn point_estimate(c: usize, m: usize) -> Result<f64> {
    check_count(c, m)?;
    Ok(c as f64 / m as f64)
}

/// Equal-tailed Jeffreys interval: the α/2 and 1 − α/2 quantiles of
/// Beta(c + ½, m − c + ½), with the lower bound pinned to 0 when c = 0 and
/// the upper bound pinned to 1 when c = m.
pub fn jeffreys_interval(c: usize, m: usize, level: ConfidenceLevel) -> Result<IntervalEstimate> {
    let p_hat = point_estimate(c, m)?;
    let a = c as f64 + 0.5;
    let b = (m - c) as f64 + 0.5;
    let half = level.alpha() / 2.0;
    let p_lower = if c == 0 { 0.0 } else { beta_quantile(half, a, b)? };
    let p_upper = if c == m { 1.0 } else { beta_quantile(1.0 - half, a, b)? };
    Ok(IntervalEstimate {
        p_hat,
        p_lower,
        p_upper,
        c,
        m,
    })
}

/// The nine values shown for one vertex: an interval per critical type.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbabilitySummary {
    pub minimum: IntervalEstimate,
    pub maximum: IntervalEstimate,
    pub saddle: IntervalEstimate,
    pub level: ConfidenceLevel,
}

impl ProbabilitySummary {
    pub fn get(&self, t: CriticalType) -> Option<&IntervalEstimate> {
        match t {
            CriticalType::Minimum => Some(&self.minimum),
            CriticalType::Maximum => Some(&self.maximum),
            CriticalType::Saddle => Some(&self.saddle),
            CriticalType::Regular => None,
        }
    }

    pub fn m(&self) -> usize {
        self.minimum.m
    }

    /// A summary whose intervals collapse onto the given probabilities.
    pub fn degenerate(p_min: f64, p_max: f64, p_saddle: f64, m: usize, level: ConfidenceLevel) -> Self {
        let point = |p: f64| IntervalEstimate {
            p_hat: p,
            p_lower: p,
            p_upper: p,
            c: (p * m as f64).round() as usize,
            m,
        };
        ProbabilitySummary {
            minimum: point(p_min),
            maximum: point(p_max),
            saddle: point(p_saddle),
            level,
        }
    }
}

pub fn summarize(counts: &TypeCounts, level: ConfidenceLevel) -> Result<ProbabilitySummary> {
    TypeCounts::new(counts.min, counts.max, counts.saddle, counts.m)?;
    Ok(ProbabilitySummary {
        minimum: jeffreys_interval(counts.min, counts.m, level)?,
        maximum: jeffreys_interval(counts.max, counts.m, level)?,
        saddle: jeffreys_interval(counts.saddle, counts.m, level)?,
        level,
    })
}
