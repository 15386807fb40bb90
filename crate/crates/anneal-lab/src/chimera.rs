//! Chimera topology C(M, N, L): an M x N grid of K_{L,L} cells.
//!
//! Each cell holds two shores of L vertices. Within a cell every shore-0
//! vertex couples to every shore-1 vertex. Between cells, shore-0 vertices
//! couple to the same shore index in the row-adjacent cell (vertical) and
//! shore-1 vertices to the same index in the column-adjacent cell
//! (horizontal). Vertices listed in a broken mask are removed together with
//! their incident edges.

use std::collections::BTreeSet;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};

/// Linear vertex index: `(((row * N) + col) * 2 + shore) * L + k`.
pub type VertexId = usize;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct VertexCoords {
    pub row: usize,
    pub col: usize,
    pub shore: usize,
    pub k: usize,
}

#[derive(Debug, Clone)]
pub struct ChimeraTopology {
    rows: usize,
    cols: usize,
    shore_size: usize,
    broken: BTreeSet<VertexId>,
    /// All surviving edges as (u, v) with u < v, sorted.
    edges: Vec<(VertexId, VertexId)>,
    /// Adjacency lists indexed by vertex id; empty for broken vertices.
    adjacency: Vec<Vec<VertexId>>,
    /// Working (non-broken) vertex ids, ascending.
    working: Vec<VertexId>,
    /// Dense rank of each working vertex in `working`, by vertex id.
    rank: Vec<Option<usize>>,
}

impl ChimeraTopology {
    /// Build C(M, N, L) minus the broken vertices.
    pub fn build(
        rows: usize,
        cols: usize,
        shore_size: usize,
        broken: &BTreeSet<VertexId>,
    ) -> Result<Self> {
        if rows == 0 || cols == 0 || shore_size == 0 {
            return Err(Error::Topology(format!(
                "dimensions must be positive, got {rows}x{cols}x{shore_size}"
            )));
        }
        let n_vertices = 2 * rows * cols * shore_size;
        for &b in broken {
            if b >= n_vertices {
                return Err(Error::Topology(format!(
                    "broken vertex {b} out of range for {n_vertices} vertices"
                )));
            }
        }

        let mut topo = ChimeraTopology {
            rows,
            cols,
            shore_size,
            broken: broken.clone(),
            edges: Vec::new(),
            adjacency: vec![Vec::new(); n_vertices],
            working: Vec::new(),
            rank: vec![None; n_vertices],
        };

        for v in 0..n_vertices {
            if !broken.contains(&v) {
                topo.rank[v] = Some(topo.working.len());
                topo.working.push(v);
            }
        }
        if topo.working.is_empty() {
            return Err(Error::Topology("all vertices are broken".into()));
        }

        let mut edges = Vec::new();
        let mut push = |a: VertexId, b: VertexId| {
            if !broken.contains(&a) && !broken.contains(&b) {
                edges.push((a.min(b), a.max(b)));
            }
        };
        for row in 0..rows {
            for col in 0..cols {
                for k0 in 0..shore_size {
                    let u = topo.vertex_id(row, col, 0, k0);
                    // Intra-cell bipartite couplers.
                    for k1 in 0..shore_size {
                        push(u, topo.vertex_id(row, col, 1, k1));
                    }
                    // Vertical coupler to the next row, same shore index.
                    if row + 1 < rows {
                        push(u, topo.vertex_id(row + 1, col, 0, k0));
                    }
                }
                // Horizontal couplers to the next column, same shore index.
                if col + 1 < cols {
                    for k1 in 0..shore_size {
                        push(
                            topo.vertex_id(row, col, 1, k1),
                            topo.vertex_id(row, col + 1, 1, k1),
                        );
                    }
                }
            }
        }
        edges.sort_unstable();
        for &(u, v) in &edges {
            topo.adjacency[u].push(v);
            topo.adjacency[v].push(u);
        }
        for adj in &mut topo.adjacency {
            adj.sort_unstable();
        }
        topo.edges = edges;
        Ok(topo)
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn shore_size(&self) -> usize {
        self.shore_size
    }

    /// Total vertex count including broken vertices.
    pub fn n_vertices(&self) -> usize {
        2 * self.rows * self.cols * self.shore_size
    }

    /// Number of working (non-broken) vertices.
    pub fn n_working(&self) -> usize {
        self.working.len()
    }

    pub fn broken(&self) -> &BTreeSet<VertexId> {
        &self.broken
    }

    /// Surviving edges as (u, v) with u < v, ascending.
    pub fn edges(&self) -> &[(VertexId, VertexId)] {
        &self.edges
    }

    /// Working vertex ids, ascending.
    pub fn working(&self) -> &[VertexId] {
        &self.working
    }

    pub fn is_working(&self, v: VertexId) -> bool {
        v < self.n_vertices() && !self.broken.contains(&v)
    }

    /// Dense index of a working vertex in `working()`.
    pub fn rank_of(&self, v: VertexId) -> Option<usize> {
        self.rank.get(v).copied().flatten()
    }

    /// Compose a linear vertex id from grid coordinates.
    pub fn vertex_id(&self, row: usize, col: usize, shore: usize, k: usize) -> VertexId {
        debug_assert!(row < self.rows && col < self.cols && shore < 2 && k < self.shore_size);
        (((row * self.cols) + col) * 2 + shore) * self.shore_size + k
    }

    /// Decompose a linear vertex id into grid coordinates.
    pub fn vertex_coords(&self, v: VertexId) -> Result<VertexCoords> {
        if v >= self.n_vertices() {
            return Err(Error::Topology(format!(
                "vertex {v} out of range for {} vertices",
                self.n_vertices()
            )));
        }
        let k = v % self.shore_size;
        let rest = v / self.shore_size;
        let shore = rest % 2;
        let rest = rest / 2;
        let col = rest % self.cols;
        let row = rest / self.cols;
        Ok(VertexCoords { row, col, shore, k })
    }

    /// Neighbors of a working vertex, ascending. Broken and out-of-range
    /// vertices are errors.
    pub fn neighbors(&self, v: VertexId) -> Result<&[VertexId]> {
        if v >= self.n_vertices() {
            return Err(Error::Topology(format!(
                "vertex {v} out of range for {} vertices",
                self.n_vertices()
            )));
        }
        if self.broken.contains(&v) {
            return Err(Error::Topology(format!("vertex {v} is broken")));
        }
        Ok(&self.adjacency[v])
    }

    /// Position of edge (u, v) in `edges()`, if present.
    pub fn edge_position(&self, u: VertexId, v: VertexId) -> Option<usize> {
        let key = (u.min(v), u.max(v));
        self.edges.binary_search(&key).ok()
    }
}

/// Read a broken-vertex mask: one decimal vertex id per line, `#` starts a
/// comment, blank lines ignored.
pub fn load_broken_mask(path: &Path) -> Result<BTreeSet<VertexId>> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let mut mask = BTreeSet::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = match raw.split_once('#') {
            Some((before, _)) => before,
            None => raw,
        }
        .trim();
        if line.is_empty() {
            continue;
        }
        let id: VertexId = line.parse().map_err(|_| {
            Error::parse(path, format!("line {}: expected a vertex id, got {line:?}", lineno + 1))
        })?;
        mask.insert(id);
    }
    Ok(mask)
}

/// Write a broken-vertex mask in the same format `load_broken_mask` reads.
pub fn write_broken_mask(path: &Path, mask: &BTreeSet<VertexId>) -> Result<()> {
    let mut text = String::new();
    for v in mask {
        text.push_str(&v.to_string());
        text.push('\n');
    }
    fs::write(path, text).map_err(|e| Error::io(path, e))
}
