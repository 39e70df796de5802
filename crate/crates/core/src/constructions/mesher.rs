//! Graded lattice mesher with slit doubling.
//!
//! The unit square is tiled by axis-parallel blocks, each meshed with an
//! 8-neighbour lattice of its own pitch.  All coordinates are integers in units
//! of the finest pitch, so block interfaces and slit endpoints are matched
//! exactly.  Along an interface the finer lattice wins: coarse edges whose
//! midpoint is a lattice vertex are dropped.  Every lattice vertex strictly
//! inside a slit is split into a left and a right copy; edges reaching it from
//! the left attach to the left copy, edges from the right to the right copy,
//! and edges running along the slit are duplicated, so no edge crosses a slit.

use std::collections::HashMap;

use crate::error::{Error, Result};
use crate::metric::{DiscreteSpace, MarkedSet, SetKind, Side, SpaceBuilder, VertexId};
use crate::scalar::Scalar;

/// Axis-parallel block `[x0, x1] × [y0, y1]` meshed at `pitch` (lattice units).
#[derive(Clone, Copy, Debug)]
pub(crate) struct Block {
    pub x0: i64,
    pub y0: i64,
    pub x1: i64,
    pub y1: i64,
    pub pitch: i64,
}

/// Slit `{x} × [y0, y1]` in lattice units.
#[derive(Clone, Copy, Debug)]
pub(crate) struct LatticeSlit {
    pub x: i64,
    pub y0: i64,
    pub y1: i64,
}

pub(crate) struct Meshed<S> {
    pub space: DiscreteSpace<S>,
    /// Vertex at lattice point `(0, 0)`.
    pub origin: VertexId,
}

/// Meshes `[0, units]²` (scaled to the unit square) with the given blocks and
/// slits.  Slit `i` becomes marked set `names[i]` with component `i + 1`; the
/// outer boundary is marked `"outer"` with component 0.
pub(crate) fn mesh<S: Scalar>(
    units: i64,
    blocks: &[Block],
    slits: &[LatticeSlit],
    names: &[String],
    h: S,
    label: &str,
) -> Result<Meshed<S>> {
    // Lattice points, deduplicated and ordered by (y, x).
    let mut points: Vec<(i64, i64)> = Vec::new();
    for b in blocks {
        let mut j = b.y0;
        while j <= b.y1 {
            let mut i = b.x0;
            while i <= b.x1 {
                points.push((j, i));
                i += b.pitch;
            }
            j += b.pitch;
        }
    }
    points.sort_unstable();
    points.dedup();
    let index: HashMap<(i64, i64), usize> =
        points.iter().enumerate().map(|(k, &(j, i))| ((i, j), k)).collect();

    // Points strictly inside a slit, with the slit they belong to.
    let mut doubled: HashMap<usize, usize> = HashMap::new();
    for (s, sl) in slits.iter().enumerate() {
        let tips = (index.get(&(sl.x, sl.y0)), index.get(&(sl.x, sl.y1)));
        if tips.0.is_none() || tips.1.is_none() {
            return Err(Error::Resolution(format!(
                "slit {} endpoints are not mesh vertices",
                names[s]
            )));
        }
        let mut last = sl.y0;
        let mut gap = 0;
        for j in sl.y0 + 1..sl.y1 {
            if let Some(&k) = index.get(&(sl.x, j)) {
                doubled.insert(k, s);
                gap = gap.max(j - last);
                last = j;
            }
        }
        gap = gap.max(sl.y1 - last);
        if 4 * gap > sl.y1 - sl.y0 {
            return Err(Error::Resolution(format!(
                "slit {} is resolved by fewer than 4 grid cells",
                names[s]
            )));
        }
    }

    // Vertex ids: one per point, two (left, right) per doubled point.
    let unit = 1.0 / units as f64;
    let mut b = SpaceBuilder::<S>::new();
    let mut first_id = Vec::with_capacity(points.len());
    for (k, &(j, i)) in points.iter().enumerate() {
        let (x, y) = (S::of(i as f64 * unit), S::of(j as f64 * unit));
        if doubled.contains_key(&k) {
            first_id.push(b.add_vertex(x, y, Side::Left));
            b.add_vertex(x, y, Side::Right);
        } else {
            first_id.push(b.add_vertex(x, y, Side::None));
        }
    }

    // Lattice edges per block; (point, point, pitch, diagonal).
    let mut lattice_edges: Vec<(usize, usize, i64, bool)> = Vec::new();
    for bl in blocks {
        let p = bl.pitch;
        let mut j = bl.y0;
        while j <= bl.y1 {
            let mut i = bl.x0;
            while i <= bl.x1 {
                let here = index[&(i, j)];
                let steps = [(p, 0, false), (0, p, false), (p, p, true), (p, -p, true)];
                for (dx, dy, diag) in steps {
                    let (ni, nj) = (i + dx, j + dy);
                    if ni > bl.x1 || nj > bl.y1 || nj < bl.y0 {
                        continue;
                    }
                    if !diag && p > 1 && index.contains_key(&(i + dx / 2, j + dy / 2)) {
                        continue;
                    }
                    let there = index[&(ni, nj)];
                    let (a, c) = if here < there { (here, there) } else { (there, here) };
                    lattice_edges.push((a, c, p, diag));
                }
                i += p;
            }
            j += p;
        }
    }
    lattice_edges.sort_unstable();
    lattice_edges.dedup();

    let side_copies = |k: usize, other_x: i64| -> Vec<VertexId> {
        let id = first_id[k];
        match doubled.get(&k) {
            None => vec![id],
            Some(&s) => {
                let xs = slits[s].x;
                if other_x < xs {
                    vec![id]
                } else if other_x > xs {
                    vec![id + 1]
                } else {
                    vec![id, id + 1]
                }
            }
        }
    };
    let sqrt2 = S::of(std::f64::consts::SQRT_2);
    for (a, c, p, diag) in lattice_edges {
        let (ia, ic) = (points[a].1, points[c].1);
        let ea = side_copies(a, ic);
        let ec = side_copies(c, ia);
        let mut len = S::of(p as f64 * unit);
        if diag {
            len = len * sqrt2;
        }
        match (ea.len(), ec.len()) {
            (2, 2) => {
                b.add_edge(ea[0], ec[0], len)?;
                b.add_edge(ea[1], ec[1], len)?;
            }
            _ => {
                for &u in &ea {
                    for &v in &ec {
                        b.add_edge(u, v, len)?;
                    }
                }
            }
        }
    }

    // Outer boundary in counterclockwise perimeter order from the origin.
    let mut perimeter: Vec<(i64, VertexId)> = Vec::new();
    for (k, &(j, i)) in points.iter().enumerate() {
        let t = if j == 0 {
            i
        } else if i == units {
            units + j
        } else if j == units {
            3 * units - i
        } else if i == 0 {
            4 * units - j
        } else {
            continue;
        };
        perimeter.push((t, first_id[k]));
    }
    perimeter.sort_unstable();
    b.mark(
        MarkedSet::new("outer", SetKind::BoundaryComponent, perimeter.iter().map(|p| p.1).collect(), 0)
            .with_cyclic_order(),
    )?;

    // Slit circles: bottom tip, left copies upward, top tip, right copies downward.
    for (s, sl) in slits.iter().enumerate() {
        let mut inner: Vec<usize> = (sl.y0 + 1..sl.y1).filter_map(|j| index.get(&(sl.x, j)).copied()).collect();
        inner.sort_by_key(|&k| points[k].0);
        let mut ids = vec![first_id[index[&(sl.x, sl.y0)]]];
        ids.extend(inner.iter().map(|&k| first_id[k]));
        ids.push(first_id[index[&(sl.x, sl.y1)]]);
        ids.extend(inner.iter().rev().map(|&k| first_id[k] + 1));
        b.mark(MarkedSet::new(names[s].clone(), SetKind::Slit, ids, s as u32 + 1).with_cyclic_order())?;
    }

    let origin = first_id[index[&(0, 0)]];
    let space = b.build(h, label)?;
    Ok(Meshed { space, origin })
}
