//! JSON mesh files.
//!
//! ```json
//! {"h": 0.25, "vertices": [{"id": 0, "x": 0.0, "y": 0.0, "side": "none"}],
//!  "edges": [[0, 1, 0.25]],
//!  "marked": {"outer": {"kind": "boundary-component", "ids": [0], "component": 0}}}
//! ```
//!
//! Optional keys: `label`, `metric` (`"path"` or `"euclidean"`), a per-set
//! `cyclic` flag, `limits` (declared accumulation relations as
//! `[component, limit]` pairs) and `cells` (explicit surface cells as
//! `{"corners": [...], "area": a}`).  Zero-length edges are read back as gluing
//! identifications.

use std::collections::BTreeMap;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::space::{Cell, DiscreteSpace, MarkedSet, MetricKind, SetKind, Side, SpaceBuilder, VertexId};
use crate::error::{input, Result};
use crate::scalar::Scalar;

#[derive(Serialize, Deserialize)]
struct VertexRecord {
    id: VertexId,
    x: f64,
    y: f64,
    side: Side,
}

fn is_false(b: &bool) -> bool {
    !*b
}

#[derive(Serialize, Deserialize)]
struct MarkedRecord {
    kind: SetKind,
    ids: Vec<VertexId>,
    component: u32,
    #[serde(default, skip_serializing_if = "is_false")]
    cyclic: bool,
}

#[derive(Serialize, Deserialize)]
struct MeshFile {
    h: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    label: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    metric: Option<MetricKind>,
    vertices: Vec<VertexRecord>,
    edges: Vec<(VertexId, VertexId, f64)>,
    marked: BTreeMap<String, MarkedRecord>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    limits: Vec<(u32, u32)>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    cells: Vec<Cell<f64>>,
}

/// Serializes a space to the mesh JSON format.
pub fn to_json<S: Scalar>(space: &DiscreteSpace<S>) -> Result<String> {
    let file = MeshFile {
        h: space.h().as_f64(),
        label: Some(space.label().to_string()),
        metric: (space.metric() != MetricKind::Path).then_some(space.metric()),
        vertices: space
            .vertices()
            .iter()
            .enumerate()
            .map(|(i, p)| VertexRecord { id: i as VertexId, x: p.x.as_f64(), y: p.y.as_f64(), side: p.side })
            .collect(),
        edges: space.edges().iter().map(|&(u, v, l)| (u, v, l.as_f64())).collect(),
        marked: space
            .marked_sets()
            .map(|m| {
                (
                    m.name.clone(),
                    MarkedRecord { kind: m.kind, ids: m.ids.clone(), component: m.component, cyclic: m.cyclic },
                )
            })
            .collect(),
        limits: space.limits().to_vec(),
        cells: space
            .cells()
            .iter()
            .map(|c| Cell { corners: c.corners.clone(), area: c.area.as_f64() })
            .collect(),
    };
    Ok(serde_json::to_string(&file)?)
}

/// Parses the mesh JSON format, validating every invariant of [`DiscreteSpace`].
pub fn from_json<S: Scalar>(text: &str) -> Result<DiscreteSpace<S>> {
    let file: MeshFile = serde_json::from_str(text)?;
    let mut b = SpaceBuilder::new();
    b.metric(file.metric.unwrap_or_default());
    for (i, v) in file.vertices.iter().enumerate() {
        if v.id as usize != i {
            return input(format!("vertex ids must be 0..n in order (found {} at position {i})", v.id));
        }
        b.add_vertex(S::of(v.x), S::of(v.y), v.side);
    }
    for &(u, v, l) in &file.edges {
        if l == 0.0 {
            b.identify(u, v)?;
        } else {
            b.add_edge(u, v, S::of(l))?;
        }
    }
    for (name, m) in file.marked {
        let mut set = MarkedSet::new(name, m.kind, m.ids, m.component);
        set.cyclic = m.cyclic;
        b.mark(set)?;
    }
    for (c, l) in file.limits {
        b.limit(c, l);
    }
    for c in file.cells {
        b.add_cell(c.corners, S::of(c.area))?;
    }
    b.build(S::of(file.h), file.label.unwrap_or_default())
}

pub fn read_mesh<S: Scalar>(path: &Path) -> Result<DiscreteSpace<S>> {
    from_json(&std::fs::read_to_string(path)?)
}

pub fn write_mesh<S: Scalar>(space: &DiscreteSpace<S>, path: &Path) -> Result<()> {
    std::fs::write(path, to_json(space)?)?;
    Ok(())
}
