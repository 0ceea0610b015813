//! Multivariate normal model fitted to a seed ensemble, and sampling from it.
//!
//! The covariance is kept as a factor `F` (n x r) with `F Fᵀ` equal to the
//! unbiased sample covariance; the n x n matrix is never formed. Members are
//! drawn as `mean + F z` with `z` standard normal in r dimensions.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;
use rayon::prelude::*;

use crate::critical::{build_links, classify_with_links, TypeCounts};
use crate::error::{Error, Result};
use crate::grid::{Ensemble, GridTopology, ScalarField};
use crate::stats::{summarize, ConfidenceLevel, ProbabilitySummary};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct Seed(pub u64);

impl Seed {
    /// Seed of the `ordinal`-th ensemble in a batch.
    pub fn offset(self, ordinal: u64) -> Seed {
        Seed(self.0.wrapping_add(ordinal))
    }
}

/// Standard normal variates by Marsaglia's polar method.
///
/// Each member index gets its own ChaCha stream under the same key, so draws
/// are independent of evaluation order.
pub struct NormalStream {
    rng: ChaCha20Rng,
    spare: Option<f64>,
}

impl NormalStream {
    pub fn new(seed: Seed, stream: u64) -> Self {
        let mut rng = ChaCha20Rng::seed_from_u64(seed.0);
        rng.set_stream(stream);
        NormalStream { rng, spare: None }
    }

    pub fn next_normal(&mut self) -> f64 {
        if let Some(z) = self.spare.take() {
            return z;
        }
        loop {
            let u = 2.0 * self.rng.gen::<f64>() - 1.0;
            let v = 2.0 * self.rng.gen::<f64>() - 1.0;
            let s = u * u + v * v;
            if s > 0.0 && s < 1.0 {
                let scale = (-2.0 * s.ln() / s).sqrt();
                self.spare = Some(v * scale);
                return u * scale;
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MomentModel {
    topology: GridTopology,
    mean: Vec<f64>,
    /// Factor columns, each of length n.
    columns: Vec<Vec<f64>>,
}

impl MomentModel {
    pub fn new(topology: GridTopology, mean: Vec<f64>, columns: Vec<Vec<f64>>) -> Result<Self> {
        let n = topology.vertex_count();
        if mean.len() != n {
            return Err(Error::input(format!(
                "mean has {} entries, grid has {n} vertices",
                mean.len()
            )));
        }
        if columns.is_empty() {
            return Err(Error::input("factor needs at least one column"));
        }
        if let Some(k) = columns.iter().position(|c| c.len() != n) {
            return Err(Error::input(format!("factor column {k} has wrong length")));
        }
        if mean.iter().chain(columns.iter().flatten()).any(|v| !v.is_finite()) {
            return Err(Error::input("model contains non-finite values"));
        }
        Ok(MomentModel {
            topology,
            mean,
            columns,
        })
    }

    pub fn topology(&self) -> &GridTopology {
        &self.topology
    }

    pub fn mean(&self) -> &[f64] {
        &self.mean
    }

    pub fn columns(&self) -> &[Vec<f64>] {
        &self.columns
    }

    /// Number of factor columns r.
    pub fn rank(&self) -> usize {
        self.columns.len()
    }

    /// Entry (u, v) of F Fᵀ.
    pub fn covariance(&self, u: usize, v: usize) -> f64 {
        self.columns.iter().map(|c| c[u] * c[v]).sum()
    }

    /// Same model with every mean entry shifted by `delta`.
    pub fn shifted(&self, delta: f64) -> Result<Self> {
        MomentModel::new(
            self.topology,
            self.mean.iter().map(|v| v + delta).collect(),
            self.columns.clone(),
        )
    }

    /// One member `mean + F z`, with `z` from `stream` of `seed`.
    pub fn draw(&self, seed: Seed, stream: u64) -> Vec<f64> {
        let mut normals = NormalStream::new(seed, stream);
        let mut out = vec![0.0; self.mean.len()];
        for column in &self.columns {
            let z = normals.next_normal();
            for (o, c) in out.iter_mut().zip(column) {
                *o += z * c;
            }
        }
        for (o, mu) in out.iter_mut().zip(&self.mean) {
            *o += mu;
        }
        out
    }
}

pub fn estimate_moments(e: &Ensemble) -> Result<MomentModel> {
    let m = e.len();
    if m < 2 {
        return Err(Error::input(format!(
            "moment estimation needs at least 2 members, got {m}"
        )));
    }
    let n = e.topology().vertex_count();
    let mut mean = vec![0.0; n];
    for member in e.members() {
        for (acc, v) in mean.iter_mut().zip(member.values()) {
            *acc += v;
        }
    }
    for acc in &mut mean {
        *acc /= m as f64;
    }
    let scale = 1.0 / ((m - 1) as f64).sqrt();
    let columns = e
        .members()
        .iter()
        .map(|member| {
            member
                .values()
                .iter()
                .zip(&mean)
                .map(|(v, mu)| (v - mu) * scale)
                .collect()
        })
        .collect();
    MomentModel::new(*e.topology(), mean, columns)
}

/// Draws `m_out` members; member k uses stream k of `seed`.
pub fn sample_ensemble(model: &MomentModel, m_out: usize, seed: Seed) -> Result<Ensemble> {
    if m_out == 0 {
        return Err(Error::input("sample size must be at least 1"));
    }
    let members = (0..m_out as u64)
        .into_par_iter()
        .map(|k| ScalarField::new(model.draw(seed, k)))
        .collect::<Result<Vec<_>>>()?;
    Ensemble::new(model.topology, members)
}

/// Monte-Carlo occurrence counts over `n_draws` members, without keeping the
/// members. Draw k is identical to member k of `sample_ensemble`.
pub fn ground_truth_counts(model: &MomentModel, n_draws: usize, seed: Seed) -> Result<Vec<TypeCounts>> {
    if n_draws == 0 {
        return Err(Error::input("ground truth needs at least one draw"));
    }
    let topology = model.topology;
    let links = build_links(&topology);
    let zero = || vec![TypeCounts::empty(n_draws); topology.vertex_count()];
    let counts = (0..n_draws as u64)
        .into_par_iter()
        .try_fold(zero, |mut acc, k| {
            let field = ScalarField::new(model.draw(seed, k))?;
            for (c, t) in acc.iter_mut().zip(classify_with_links(&field, &topology, &links)) {
                c.record(t);
            }
            Ok::<_, Error>(acc)
        })
        .try_reduce(zero, |mut a, b| {
            for (x, y) in a.iter_mut().zip(b) {
                x.min += y.min;
                x.max += y.max;
                x.saddle += y.saddle;
            }
            Ok(a)
        })?;
    Ok(counts)
}

pub fn ground_truth_probabilities(
    model: &MomentModel,
    n_draws: usize,
    seed: Seed,
    level: ConfidenceLevel,
) -> Result<Vec<ProbabilitySummary>> {
    ground_truth_counts(model, n_draws, seed)?
        .iter()
        .map(|c| summarize(c, level))
        .collect()
}
