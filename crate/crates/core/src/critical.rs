//! Per-vertex critical point classification and ensemble occurrence counts.

use std::cmp::Ordering;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::{build_link, Ensemble, GridTopology, ScalarField, VertexIndex, VertexLink};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CriticalType {
    Minimum,
    Maximum,
    Saddle,
    Regular,
}

impl CriticalType {
    /// Short name used in CSV output.
    pub fn as_str(self) -> &'static str {
        match self {
            CriticalType::Minimum => "min",
            CriticalType::Maximum => "max",
            CriticalType::Saddle => "saddle",
            CriticalType::Regular => "regular",
        }
    }

    pub fn is_critical(self) -> bool {
        self != CriticalType::Regular
    }
}

/// Symbolic-perturbation order: values first, ties broken by linear index.
/// Never returns `Equal` for distinct vertices.
pub fn compare_vertices(field: &ScalarField, u: usize, v: usize) -> Ordering {
    field
        .value(u)
        .partial_cmp(&field.value(v))
        .expect("scalar fields hold finite values")
        .then(u.cmp(&v))
}

/// Counts maximal runs of equal signs, treating the sequence as cyclic when
/// `closed`.
pub(crate) fn count_sign_runs(higher: &[bool], closed: bool) -> usize {
    if higher.is_empty() {
        return 0;
    }
    let changes = higher.windows(2).filter(|w| w[0] != w[1]).count();
    if !closed {
        return changes + 1;
    }
    let wrap = usize::from(higher[0] != higher[higher.len() - 1]);
    // A cycle with no sign change is a single run.
    (changes + wrap).max(1)
}

pub fn classify_vertex(field: &ScalarField, link: &VertexLink, v: usize, topology: &GridTopology) -> CriticalType {
    let higher: Vec<bool> = link
        .neighbors
        .iter()
        .map(|&u| compare_vertices(field, topology.linear(u), v) == Ordering::Greater)
        .collect();
    if higher.iter().all(|&h| h) {
        CriticalType::Minimum
    } else if higher.iter().all(|&h| !h) {
        CriticalType::Maximum
    } else if count_sign_runs(&higher, link.closed) > 2 {
        CriticalType::Saddle
    } else {
        CriticalType::Regular
    }
}

/// All links of a topology, in linear vertex order.
pub fn build_links(topology: &GridTopology) -> Vec<VertexLink> {
    topology
        .vertices()
        .map(|v| build_link(topology, v).expect("vertex from topology is in range"))
        .collect()
}

pub(crate) fn classify_with_links(
    field: &ScalarField,
    topology: &GridTopology,
    links: &[VertexLink],
) -> Vec<CriticalType> {
    links
        .iter()
        .enumerate()
        .map(|(k, link)| classify_vertex(field, link, k, topology))
        .collect()
}

pub fn classify_field(field: &ScalarField, topology: &GridTopology) -> Result<Vec<CriticalType>> {
    if field.len() != topology.vertex_count() {
        return Err(Error::input(format!(
            "field has {} values, grid has {} vertices",
            field.len(),
            topology.vertex_count()
        )));
    }
    Ok(classify_with_links(field, topology, &build_links(topology)))
}

/// Occurrence counts of each critical type at one vertex over `m` fields.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct TypeCounts {
    pub min: usize,
    pub max: usize,
    pub saddle: usize,
    pub m: usize,
}

impl TypeCounts {
    pub fn new(min: usize, max: usize, saddle: usize, m: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::input("ensemble size must be at least 1"));
        }
        if min + max + saddle > m {
            return Err(Error::input(format!(
                "counts ({min}, {max}, {saddle}) exceed ensemble size {m}"
            )));
        }
        Ok(TypeCounts { min, max, saddle, m })
    }

    pub fn empty(m: usize) -> Self {
        TypeCounts {
            m,
            ..Default::default()
        }
    }

    pub fn record(&mut self, t: CriticalType) {
        match t {
            CriticalType::Minimum => self.min += 1,
            CriticalType::Maximum => self.max += 1,
            CriticalType::Saddle => self.saddle += 1,
            CriticalType::Regular => {}
        }
    }

    pub fn get(&self, t: CriticalType) -> usize {
        match t {
            CriticalType::Minimum => self.min,
            CriticalType::Maximum => self.max,
            CriticalType::Saddle => self.saddle,
            CriticalType::Regular => self.m - self.min - self.max - self.saddle,
        }
    }
}

/// Per-vertex counts of each type over all members, in linear vertex order.
pub fn count_types(e: &Ensemble) -> Vec<TypeCounts> {
    let topology = e.topology();
    let links = build_links(topology);
    let per_member: Vec<Vec<CriticalType>> = e
        .members()
        .par_iter()
        .map(|f| classify_with_links(f, topology, &links))
        .collect();
    let mut counts = vec![TypeCounts::empty(e.len()); topology.vertex_count()];
    for types in &per_member {
        for (c, &t) in counts.iter_mut().zip(types) {
            c.record(t);
        }
    }
    counts
}

/// Classification of `v` in a field given by vertex index pairs; convenience
/// for callers that hold `VertexIndex` values.
pub fn classify_at(field: &ScalarField, topology: &GridTopology, v: VertexIndex) -> Result<CriticalType> {
    let link = build_link(topology, v)?;
    Ok(classify_vertex(field, &link, topology.linear(v), topology))
}
