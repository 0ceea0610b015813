//! Structured 2D simplicial grid and ensembles of scalar fields on it.
//!
//! Every unit cell `[i, i+1] x [j, j+1]` is split along the diagonal from
//! `(i, j)` to `(i+1, j+1)`, so interior vertices have six neighbors.

use crate::error::{Error, Result};

/// Offsets of the six potential neighbors, in counterclockwise order.
const LINK_OFFSETS: [(isize, isize); 6] = [(1, 0), (1, 1), (0, 1), (-1, 0), (-1, -1), (0, -1)];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GridTopology {
    nx: usize,
    ny: usize,
}

impl GridTopology {
    pub fn new(nx: usize, ny: usize) -> Result<Self> {
        if nx < 2 || ny < 2 {
            return Err(Error::input(format!(
                "grid needs at least 2 vertices per axis, got {nx}x{ny}"
            )));
        }
        nx.checked_mul(ny)
            .ok_or_else(|| Error::input("grid vertex count overflows"))?;
        Ok(GridTopology { nx, ny })
    }

    pub fn nx(&self) -> usize {
        self.nx
    }

    pub fn ny(&self) -> usize {
        self.ny
    }

    pub fn vertex_count(&self) -> usize {
        self.nx * self.ny
    }

    pub fn contains(&self, v: VertexIndex) -> bool {
        v.i < self.nx && v.j < self.ny
    }

    /// Row-major linear index `j * nx + i`.
    pub fn linear(&self, v: VertexIndex) -> usize {
        v.j * self.nx + v.i
    }

    pub fn vertex(&self, index: usize) -> VertexIndex {
        VertexIndex::new(index % self.nx, index / self.nx)
    }

    /// All vertices in linear order.
    pub fn vertices(&self) -> impl Iterator<Item = VertexIndex> + '_ {
        (0..self.vertex_count()).map(move |k| self.vertex(k))
    }

    pub fn is_boundary(&self, v: VertexIndex) -> bool {
        v.i == 0 || v.j == 0 || v.i + 1 == self.nx || v.j + 1 == self.ny
    }

    /// Number of edges of the triangulation.
    pub fn edge_count(&self) -> usize {
        let (nx, ny) = (self.nx, self.ny);
        nx * (ny - 1) + ny * (nx - 1) + (nx - 1) * (ny - 1)
    }

    fn offset(&self, v: VertexIndex, (di, dj): (isize, isize)) -> Option<VertexIndex> {
        let i = v.i.checked_add_signed(di)?;
        let j = v.j.checked_add_signed(dj)?;
        let u = VertexIndex::new(i, j);
        self.contains(u).then_some(u)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VertexIndex {
    pub i: usize,
    pub j: usize,
}

impl VertexIndex {
    pub const fn new(i: usize, j: usize) -> Self {
        VertexIndex { i, j }
    }
}

impl From<(usize, usize)> for VertexIndex {
    fn from((i, j): (usize, usize)) -> Self {
        VertexIndex::new(i, j)
    }
}

/// Neighbors of a vertex in the triangulation.
///
/// Interior links are closed cycles; boundary links are open paths whose
/// consecutive entries share a triangle with the center vertex.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct VertexLink {
    pub neighbors: Vec<VertexIndex>,
    pub closed: bool,
}

impl VertexLink {
    pub fn degree(&self) -> usize {
        self.neighbors.len()
    }
}

/// Link of `v`: the counterclockwise cycle `(i+1,j), (i+1,j+1), (i,j+1),
/// (i-1,j), (i-1,j-1), (i,j-1)` for interior vertices. On the boundary the
/// missing positions form one contiguous gap in that cycle; the path starts
/// right after the gap and keeps the counterclockwise direction.
pub fn build_link(topology: &GridTopology, v: VertexIndex) -> Result<VertexLink> {
    if !topology.contains(v) {
        return Err(Error::input(format!(
            "vertex ({}, {}) outside {}x{} grid",
            v.i, v.j, topology.nx, topology.ny
        )));
    }
    let candidates: Vec<Option<VertexIndex>> = LINK_OFFSETS.iter().map(|&d| topology.offset(v, d)).collect();
    if candidates.iter().all(Option::is_some) {
        return Ok(VertexLink {
            neighbors: candidates.into_iter().flatten().collect(),
            closed: true,
        });
    }
    // First present position that follows a missing one.
    let n = candidates.len();
    let start = (0..n)
        .find(|&k| candidates[k].is_some() && candidates[(k + n - 1) % n].is_none())
        .expect("a grid with nx, ny >= 2 leaves every vertex with a neighbor");
    let neighbors = (0..n)
        .map(|k| candidates[(start + k) % n])
        .take_while(Option::is_some)
        .flatten()
        .collect();
    Ok(VertexLink {
        neighbors,
        closed: false,
    })
}

/// Vertex values of one PL field, row-major with `j` major.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarField {
    values: Vec<f64>,
}

impl ScalarField {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if let Some(k) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::input(format!("non-finite value {} at vertex {k}", values[k])));
        }
        Ok(ScalarField { values })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn value(&self, index: usize) -> f64 {
        self.values[index]
    }

    /// Applies `g` to every value.
    pub fn map(&self, g: impl Fn(f64) -> f64) -> Result<Self> {
        ScalarField::new(self.values.iter().map(|&v| g(v)).collect())
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Ensemble {
    topology: GridTopology,
    members: Vec<ScalarField>,
}

impl Ensemble {
    pub fn new(topology: GridTopology, members: Vec<ScalarField>) -> Result<Self> {
        if members.is_empty() {
            return Err(Error::input("ensemble needs at least one member"));
        }
        let n = topology.vertex_count();
        if let Some(k) = members.iter().position(|f| f.len() != n) {
            return Err(Error::input(format!(
                "member {k} has {} values, grid has {n} vertices",
                members[k].len()
            )));
        }
        Ok(Ensemble { topology, members })
    }

    pub fn topology(&self) -> &GridTopology {
        &self.topology
    }

    pub fn members(&self) -> &[ScalarField] {
        &self.members
    }

    /// Ensemble size `m`.
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}
