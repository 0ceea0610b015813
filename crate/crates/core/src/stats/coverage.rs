use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha20Rng;

use crate::error::{Error, Result};

use super::interval::{jeffreys_interval, ConfidenceLevel, IntervalEstimate};

/// Outcome of a Monte-Carlo coverage run for one (p, m, γ) cell.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoverageReport {
    pub p_true: f64,
    pub m: usize,
    pub gamma: f64,
    pub reps: usize,
    pub hits: usize,
    pub mean_width: f64,
}

impl CoverageReport {
    pub fn empirical_coverage(&self) -> f64 {
        self.hits as f64 / self.reps as f64
    }
}

/// Draws `reps` counts from Bin(m, p_true) and reports how often the Jeffreys
/// interval contains `p_true`.
pub fn coverage_experiment(
    p_true: f64,
    m: usize,
    level: ConfidenceLevel,
    reps: usize,
    seed: u64,
) -> Result<CoverageReport> {
    if !(0.0..=1.0).contains(&p_true) {
        return Err(Error::input(format!("probability must lie in [0, 1], got {p_true}")));
    }
    if reps == 0 {
        return Err(Error::input("coverage needs at least one repetition"));
    }
    // Every possible count's interval, computed once.
    let table: Vec<IntervalEstimate> = (0..=m).map(|c| jeffreys_interval(c, m, level)).collect::<Result<_>>()?;
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    let mut hits = 0;
    let mut width_sum = 0.0;
    for _ in 0..reps {
        let c = (0..m).filter(|_| rng.gen_bool(p_true)).count();
        let interval = &table[c];
        if interval.contains(p_true) {
            hits += 1;
        }
        width_sum += interval.width();
    }
    Ok(CoverageReport {
        p_true,
        m,
        gamma: level.gamma(),
        reps,
        hits,
        mean_width: width_sum / reps as f64,
    })
}
