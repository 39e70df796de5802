//! The weighted planar graph that stands in for a metric surface.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{input, Result};
use crate::scalar::Scalar;

/// Index of a vertex inside a [`DiscreteSpace`].
pub type VertexId = u32;

/// Which copy of a doubled slit vertex a vertex is; `None` for ordinary vertices.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    None,
    Left,
    Right,
}

/// Role of a marked vertex subset.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SetKind {
    BoundaryComponent,
    Slit,
    GluingLocus,
    Generic,
}

impl SetKind {
    /// Boundary components and slit circles together form the boundary fringe.
    pub fn is_boundary(self) -> bool {
        matches!(self, SetKind::BoundaryComponent | SetKind::Slit)
    }
}

/// How distances are measured between vertices.
///
/// `Path` is the shortest-path metric of the weighted graph.  `Euclidean` keeps
/// the graph only as the topology (continua are connected induced subgraphs)
/// and measures distance between the stored planar coordinates; it models
/// subsets of the plane carrying the restricted ambient metric.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum MetricKind {
    #[default]
    Path,
    Euclidean,
}

/// A vertex: planar coordinate plus slit side tag.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Vertex<S> {
    pub x: S,
    pub y: S,
    pub side: Side,
}

/// A named vertex subset with component metadata.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MarkedSet {
    pub name: String,
    pub kind: SetKind,
    /// Vertex ids; in cyclic order when `cyclic` is set.
    pub ids: Vec<VertexId>,
    pub component: u32,
    /// Whether `ids` lists the set in the cyclic order of a closed curve.
    #[serde(default)]
    pub cyclic: bool,
}

impl MarkedSet {
    pub fn new(name: impl Into<String>, kind: SetKind, ids: Vec<VertexId>, component: u32) -> Self {
        MarkedSet { name: name.into(), kind, ids, component, cyclic: false }
    }

    /// Declares `ids` to be in cyclic order.
    pub fn with_cyclic_order(mut self) -> Self {
        self.cyclic = true;
        self
    }
}

/// Explicit surface cell: a polygon of vertices with its area.  Lattice
/// cells of grid meshes are recognised from their diagonals and need not be
/// listed; explicit cells describe curved patches such as glued caps.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Cell<S> {
    pub corners: Vec<VertexId>,
    pub area: S,
}

/// Finite connected weighted graph with planar coordinates.
///
/// Immutable after construction; every query takes `&self` so a space can be
/// shared across worker threads.
#[derive(Clone, Debug)]
pub struct DiscreteSpace<S> {
    vertices: Vec<Vertex<S>>,
    edges: Vec<(VertexId, VertexId, S)>,
    offsets: Vec<usize>,
    targets: Vec<VertexId>,
    lengths: Vec<S>,
    pitch: Vec<S>,
    interior: Vec<bool>,
    marked: BTreeMap<String, MarkedSet>,
    limits: Vec<(u32, u32)>,
    cells: Vec<Cell<S>>,
    h: S,
    label: String,
    metric: MetricKind,
}

impl<S: Scalar> DiscreteSpace<S> {
    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Nominal mesh pitch (the coarsest pitch for graded meshes).
    pub fn h(&self) -> S {
        self.h
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    /// Replaces the descriptive label.
    pub fn relabel(&mut self, label: impl Into<String>) {
        self.label = label.into();
    }

    pub fn metric(&self) -> MetricKind {
        self.metric
    }

    pub fn vertex(&self, v: VertexId) -> &Vertex<S> {
        &self.vertices[v as usize]
    }

    pub fn vertices(&self) -> &[Vertex<S>] {
        &self.vertices
    }

    /// Undirected edge list as supplied to the builder.
    pub fn edges(&self) -> &[(VertexId, VertexId, S)] {
        &self.edges
    }

    /// Neighbours of `v` with edge lengths.
    #[inline]
    pub fn neighbors(&self, v: VertexId) -> impl Iterator<Item = (VertexId, S)> + '_ {
        let (a, b) = (self.offsets[v as usize], self.offsets[v as usize + 1]);
        self.targets[a..b].iter().copied().zip(self.lengths[a..b].iter().copied())
    }

    #[inline]
    pub fn degree(&self, v: VertexId) -> usize {
        self.offsets[v as usize + 1] - self.offsets[v as usize]
    }

    /// Local mesh pitch at `v`: the shortest positive incident edge length.
    #[inline]
    pub fn pitch(&self, v: VertexId) -> S {
        self.pitch[v as usize]
    }

    /// True for vertices carrying area: not slit copies and not on a boundary set.
    #[inline]
    pub fn is_interior(&self, v: VertexId) -> bool {
        self.interior[v as usize]
    }

    /// Euclidean distance between the stored coordinates.
    #[inline]
    pub fn euclid(&self, u: VertexId, v: VertexId) -> S {
        let (a, b) = (&self.vertices[u as usize], &self.vertices[v as usize]);
        (a.x - b.x).hypot(a.y - b.y)
    }

    pub fn check_vertex(&self, v: VertexId) -> Result<()> {
        if (v as usize) < self.vertices.len() {
            Ok(())
        } else {
            input(format!("unknown vertex id {v} (space has {} vertices)", self.len()))
        }
    }

    pub fn marked(&self, name: &str) -> Option<&MarkedSet> {
        self.marked.get(name)
    }

    /// Marked sets in name order.
    pub fn marked_sets(&self) -> impl Iterator<Item = &MarkedSet> {
        self.marked.values()
    }

    /// Boundary components and slit circles, in name order.
    pub fn boundary_sets(&self) -> Vec<&MarkedSet> {
        self.marked.values().filter(|m| m.kind.is_boundary()).collect()
    }

    /// Declared accumulation relations `(component, limit component)`.
    pub fn limits(&self) -> &[(u32, u32)] {
        &self.limits
    }

    /// Explicitly listed surface cells.
    pub fn cells(&self) -> &[Cell<S>] {
        &self.cells
    }

    /// Vertex closest (Euclidean) to `(x, y)`, preferring `side` on ties.
    pub fn nearest(&self, x: S, y: S, side: Side) -> VertexId {
        let mut best = (S::infinity(), 1u8, 0u32);
        for (i, p) in self.vertices.iter().enumerate() {
            let d = (p.x - x).hypot(p.y - y);
            let pen = u8::from(p.side != side);
            if d < best.0 || (d == best.0 && pen < best.1) {
                best = (d, pen, i as VertexId);
            }
        }
        best.2
    }

    /// Rebuilds the space with every length and coordinate multiplied by `s`.
    pub fn scaled(&self, s: S) -> Result<Self> {
        let mut b = SpaceBuilder::new();
        b.metric(self.metric);
        for p in &self.vertices {
            b.add_vertex(p.x * s, p.y * s, p.side);
        }
        for &(u, v, l) in &self.edges {
            b.push_edge(u, v, l * s)?;
        }
        for m in self.marked.values() {
            b.mark(m.clone())?;
        }
        b.limits = self.limits.clone();
        for c in &self.cells {
            b.add_cell(c.corners.clone(), c.area * s * s)?;
        }
        b.build(self.h * s, self.label.clone())
    }

    /// Copy of the space with an extra marked set attached.
    pub fn with_marked(mut self, set: MarkedSet) -> Result<Self> {
        validate_set(&set, self.len())?;
        self.marked.insert(set.name.clone(), set);
        self.interior = interior_mask(&self.vertices, &self.marked);
        Ok(self)
    }

    /// Copy of the space with the given accumulation relations.
    pub fn with_limits(mut self, limits: Vec<(u32, u32)>) -> Self {
        self.limits = limits;
        self
    }
}

fn validate_set(set: &MarkedSet, n: usize) -> Result<()> {
    if set.ids.is_empty() {
        return input(format!("marked set '{}' is empty", set.name));
    }
    if let Some(&bad) = set.ids.iter().find(|&&v| v as usize >= n) {
        return input(format!("marked set '{}' references unknown vertex {bad}", set.name));
    }
    Ok(())
}

fn interior_mask<S>(vertices: &[Vertex<S>], marked: &BTreeMap<String, MarkedSet>) -> Vec<bool> {
    let mut mask: Vec<bool> = vertices.iter().map(|p| p.side == Side::None).collect();
    for m in marked.values().filter(|m| m.kind != SetKind::Generic) {
        for &v in &m.ids {
            mask[v as usize] = false;
        }
    }
    mask
}

/// Incremental constructor for [`DiscreteSpace`].
#[derive(Clone, Debug, Default)]
pub struct SpaceBuilder<S> {
    vertices: Vec<Vertex<S>>,
    edges: Vec<(VertexId, VertexId, S)>,
    marked: BTreeMap<String, MarkedSet>,
    limits: Vec<(u32, u32)>,
    cells: Vec<Cell<S>>,
    metric: MetricKind,
}

impl<S: Scalar> SpaceBuilder<S> {
    pub fn new() -> Self {
        SpaceBuilder {
            vertices: Vec::new(),
            edges: Vec::new(),
            marked: BTreeMap::new(),
            limits: Vec::new(),
            cells: Vec::new(),
            metric: MetricKind::Path,
        }
    }

    pub fn metric(&mut self, metric: MetricKind) -> &mut Self {
        self.metric = metric;
        self
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    pub fn add_vertex(&mut self, x: S, y: S, side: Side) -> VertexId {
        self.vertices.push(Vertex { x, y, side });
        (self.vertices.len() - 1) as VertexId
    }

    /// Adds an edge of positive finite length.
    pub fn add_edge(&mut self, u: VertexId, v: VertexId, len: S) -> Result<()> {
        if !(len.is_finite() && len > S::zero()) {
            return input(format!("edge ({u},{v}) has invalid length {len}"));
        }
        self.push_edge(u, v, len)
    }

    /// Adds a zero-length identification edge (gluing only).
    pub fn identify(&mut self, u: VertexId, v: VertexId) -> Result<()> {
        self.push_edge(u, v, S::zero())
    }

    fn push_edge(&mut self, u: VertexId, v: VertexId, len: S) -> Result<()> {
        let n = self.vertices.len() as VertexId;
        if u >= n || v >= n {
            return input(format!("edge ({u},{v}) references unknown vertex"));
        }
        if u == v {
            return input(format!("self-loop at vertex {u}"));
        }
        if !(len.is_finite() && len >= S::zero()) {
            return input(format!("edge ({u},{v}) has invalid length {len}"));
        }
        self.edges.push((u, v, len));
        Ok(())
    }

    pub fn mark(&mut self, set: MarkedSet) -> Result<()> {
        validate_set(&set, self.vertices.len())?;
        self.marked.insert(set.name.clone(), set);
        Ok(())
    }

    /// Lists a surface cell (at least 3 distinct corners, positive area).
    pub fn add_cell(&mut self, corners: Vec<VertexId>, area: S) -> Result<()> {
        let n = self.vertices.len() as VertexId;
        if corners.len() < 3 || corners.iter().any(|&v| v >= n) {
            return input(format!("cell {corners:?} needs at least 3 known corners"));
        }
        if !(area.is_finite() && area > S::zero()) {
            return input(format!("cell {corners:?} has invalid area {area}"));
        }
        self.cells.push(Cell { corners, area });
        Ok(())
    }

    pub fn limit(&mut self, component: u32, limit: u32) {
        self.limits.push((component, limit));
    }

    /// Validates connectivity and freezes the graph.
    pub fn build(self, h: S, label: impl Into<String>) -> Result<DiscreteSpace<S>> {
        let n = self.vertices.len();
        if n == 0 {
            return input("space has no vertices");
        }
        if !(h.is_finite() && h > S::zero()) {
            return input(format!("invalid resolution h = {h}"));
        }
        let mut degree = vec![0usize; n + 1];
        for &(u, v, _) in &self.edges {
            degree[u as usize] += 1;
            degree[v as usize] += 1;
        }
        let mut offsets = vec![0usize; n + 1];
        for i in 0..n {
            offsets[i + 1] = offsets[i] + degree[i];
        }
        let mut fill = offsets.clone();
        let mut targets = vec![0 as VertexId; offsets[n]];
        let mut lengths = vec![S::zero(); offsets[n]];
        for &(u, v, l) in &self.edges {
            for (a, b) in [(u, v), (v, u)] {
                let slot = &mut fill[a as usize];
                targets[*slot] = b;
                lengths[*slot] = l;
                *slot += 1;
            }
        }
        // Connectivity by breadth-first search from vertex 0.
        let mut seen = vec![false; n];
        let mut stack = vec![0usize];
        seen[0] = true;
        let mut count = 1;
        while let Some(u) = stack.pop() {
            for &w in &targets[offsets[u]..offsets[u + 1]] {
                if !seen[w as usize] {
                    seen[w as usize] = true;
                    count += 1;
                    stack.push(w as usize);
                }
            }
        }
        if count != n {
            return input(format!("graph is disconnected ({count} of {n} vertices reachable)"));
        }
        for &(c, l) in &self.limits {
            if c == l {
                return input(format!("component {c} declared as its own limit"));
            }
        }
        let pitch = (0..n)
            .map(|v| {
                lengths[offsets[v]..offsets[v + 1]]
                    .iter()
                    .copied()
                    .filter(|&l| l > S::zero())
                    .fold(S::infinity(), S::min)
            })
            .map(|p| if p.is_finite() { p } else { h })
            .collect();
        let interior = interior_mask(&self.vertices, &self.marked);
        Ok(DiscreteSpace {
            vertices: self.vertices,
            edges: self.edges,
            offsets,
            targets,
            lengths,
            pitch,
            interior,
            marked: self.marked,
            limits: self.limits,
            cells: self.cells,
            h,
            label: label.into(),
            metric: self.metric,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path3() -> SpaceBuilder<f64> {
        let mut b = SpaceBuilder::new();
        for i in 0..3 {
            b.add_vertex(i as f64, 0.0, Side::None);
        }
        b
    }

    #[test]
    fn rejects_disconnected_graph() {
        let mut b = path3();
        b.add_edge(0, 1, 1.0).unwrap();
        assert!(b.build(1.0, "t").is_err());
    }

    #[test]
    fn rejects_bad_lengths_and_ids() {
        let mut b = path3();
        assert!(b.add_edge(0, 1, 0.0).is_err());
        assert!(b.add_edge(0, 1, f64::NAN).is_err());
        assert!(b.add_edge(0, 7, 1.0).is_err());
        assert!(b.mark(MarkedSet::new("x", SetKind::Generic, vec![9], 0)).is_err());
        assert!(b.mark(MarkedSet::new("x", SetKind::Generic, vec![], 0)).is_err());
    }

    #[test]
    fn pitch_and_interior() {
        let mut b = path3();
        b.add_edge(0, 1, 0.5).unwrap();
        b.add_edge(1, 2, 0.25).unwrap();
        b.mark(MarkedSet::new("end", SetKind::BoundaryComponent, vec![2], 0)).unwrap();
        let s = b.build(0.5, "t").unwrap();
        assert_eq!(s.pitch(1), 0.25);
        assert_eq!(s.pitch(0), 0.5);
        assert!(s.is_interior(0) && !s.is_interior(2));
        assert_eq!(s.degree(1), 2);
    }
}
