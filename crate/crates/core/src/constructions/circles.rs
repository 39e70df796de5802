//! Circle domains, round circles and closed polygons.

use std::f64::consts::PI;

use crate::constructions::families::resolution_exponent;
use crate::error::{input, Result};
use crate::metric::{DiscreteSpace, MarkedSet, MetricKind, SetKind, Side, SpaceBuilder, VertexId};
use crate::scalar::Scalar;

/// A round disk `(cx, cy, radius)`.
pub type Disk = (f64, f64, f64);

/// Unit square minus finitely many open round disks, meshed by an 8-neighbour
/// grid of pitch `h` and carrying the restricted Euclidean metric.
///
/// The outer boundary is marked `"outer"` (component 0).  Grid vertices
/// axis-adjacent to disk `k` are moved radially onto its circle and form
/// marked set `"disk:k"` (component `k + 1`), listed in angular order.
pub fn gen_circle_domain<S: Scalar>(disks: &[Disk], h: f64) -> Result<DiscreteSpace<S>> {
    let m = resolution_exponent(h)?;
    for (k, &(cx, cy, r)) in disks.iter().enumerate() {
        if !(r > 0.0) || cx - r <= 0.0 || cx + r >= 1.0 || cy - r <= 0.0 || cy + r >= 1.0 {
            return input(format!("disk {k} is not contained in the open unit square"));
        }
        for (l, &(dx, dy, q)) in disks.iter().enumerate().skip(k + 1) {
            if (cx - dx).hypot(cy - dy) <= r + q {
                return input(format!("disks {k} and {l} overlap"));
            }
        }
    }
    let n = 1i64 << m;
    let owner = |i: i64, j: i64| -> Option<usize> {
        let (x, y) = (i as f64 * h, j as f64 * h);
        disks.iter().position(|&(cx, cy, r)| (x - cx).hypot(y - cy) < r)
    };
    let inside = |i: i64, j: i64| i >= 0 && j >= 0 && i <= n && j <= n;
    let at = |i: i64, j: i64| (j * (n + 1) + i) as usize;
    // Kept grid points axis-adjacent to a removed point are the discrete disk
    // boundary; they are moved radially onto the circle itself.
    let mut id = vec![VertexId::MAX; ((n + 1) * (n + 1)) as usize];
    let mut coords: Vec<(f64, f64)> = Vec::new();
    let mut rings: Vec<Vec<VertexId>> = vec![Vec::new(); disks.len()];
    let mut b = SpaceBuilder::<S>::new();
    b.metric(MetricKind::Euclidean);
    for j in 0..=n {
        for i in 0..=n {
            if owner(i, j).is_some() {
                continue;
            }
            let (mut x, mut y) = (i as f64 * h, j as f64 * h);
            let ring = [(1, 0), (0, 1), (-1, 0), (0, -1)]
                .iter()
                .filter(|&&(dx, dy)| inside(i + dx, j + dy))
                .find_map(|&(dx, dy)| owner(i + dx, j + dy));
            if let Some(k) = ring {
                let (cx, cy, r) = disks[k];
                let t = (y - cy).atan2(x - cx);
                x = cx + r * t.cos();
                y = cy + r * t.sin();
            }
            let v = b.add_vertex(S::of(x), S::of(y), Side::None);
            id[at(i, j)] = v;
            coords.push((x, y));
            if let Some(k) = ring {
                rings[k].push(v);
            }
        }
    }
    for j in 0..=n {
        for i in 0..=n {
            let u = id[at(i, j)];
            if u == VertexId::MAX {
                continue;
            }
            for (dx, dy) in [(1, 0), (0, 1), (1, 1), (1, -1)] {
                if !inside(i + dx, j + dy) {
                    continue;
                }
                let v = id[at(i + dx, j + dy)];
                if v != VertexId::MAX {
                    let (p, q) = (coords[u as usize], coords[v as usize]);
                    b.add_edge(u, v, S::of((p.0 - q.0).hypot(p.1 - q.1)))?;
                }
            }
        }
    }
    let mut perimeter: Vec<(i64, VertexId)> = Vec::new();
    for j in 0..=n {
        for i in 0..=n {
            let t = if j == 0 {
                i
            } else if i == n {
                n + j
            } else if j == n {
                3 * n - i
            } else if i == 0 {
                4 * n - j
            } else {
                continue;
            };
            perimeter.push((t, id[at(i, j)]));
        }
    }
    perimeter.sort_unstable();
    b.mark(
        MarkedSet::new("outer", SetKind::BoundaryComponent, perimeter.into_iter().map(|p| p.1).collect(), 0)
            .with_cyclic_order(),
    )?;
    for (k, ring) in rings.into_iter().enumerate() {
        let (cx, cy, _) = disks[k];
        let mut ring: Vec<(f64, VertexId)> = ring
            .into_iter()
            .map(|v| {
                let (x, y) = coords[v as usize];
                ((y - cy).atan2(x - cx), v)
            })
            .collect();
        ring.sort_by(|a, c| a.0.partial_cmp(&c.0).expect("finite").then(a.1.cmp(&c.1)));
        b.mark(
            MarkedSet::new(format!("disk:{k}"), SetKind::BoundaryComponent, ring.into_iter().map(|p| p.1).collect(), k as u32 + 1)
                .with_cyclic_order(),
        )?;
    }
    b.build(S::of(h), format!("circles({},{m})", disks.len()))
}

/// Cycle graph on `m` equally spaced points of the unit circle with
/// chord-length edges (intrinsic path metric); marked set `"circle"`.
pub fn gen_round_circle<S: Scalar>(m: usize) -> Result<DiscreteSpace<S>> {
    if m < 3 {
        return input(format!("a round circle needs at least 3 vertices (got {m})"));
    }
    let pts: Vec<(f64, f64)> = (0..m)
        .map(|k| {
            let t = 2.0 * PI * k as f64 / m as f64;
            (t.cos(), t.sin())
        })
        .collect();
    gen_closed_polygon(&pts, MetricKind::Path)
}

/// Closed polygon through `points` (cycle topology, chord-length edges) with
/// the chosen metric; marked set `"circle"` in cyclic order.
pub fn gen_closed_polygon<S: Scalar>(points: &[(f64, f64)], metric: MetricKind) -> Result<DiscreteSpace<S>> {
    if points.len() < 3 {
        return input("a closed polygon needs at least 3 vertices");
    }
    let mut b = SpaceBuilder::<S>::new();
    b.metric(metric);
    for &(x, y) in points {
        b.add_vertex(S::of(x), S::of(y), Side::None);
    }
    let n = points.len();
    let mut pitch = f64::INFINITY;
    for k in 0..n {
        let (a, c) = (points[k], points[(k + 1) % n]);
        let l = (a.0 - c.0).hypot(a.1 - c.1);
        pitch = pitch.min(l);
        b.add_edge(k as VertexId, ((k + 1) % n) as VertexId, S::of(l))?;
    }
    b.mark(
        MarkedSet::new("circle", SetKind::BoundaryComponent, (0..n as VertexId).collect(), 0).with_cyclic_order(),
    )?;
    b.build(S::of(pitch), format!("polygon({n})"))
}

/// Axis-aligned ellipse with semi-axes `a`, `b` sampled at `m` equal angles.
pub fn ellipse_points(m: usize, a: f64, b: f64) -> Vec<(f64, f64)> {
    (0..m)
        .map(|k| {
            let t = 2.0 * PI * k as f64 / m as f64;
            (a * t.cos(), b * t.sin())
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::rel_distance;

    #[test]
    fn two_disk_domain_relative_distance() {
        let h = 1.0 / 64.0;
        let s = gen_circle_domain::<f64>(&[(0.3, 0.5, 0.1), (0.7, 0.5, 0.1)], h).unwrap();
        let a = &s.marked("disk:0").unwrap().ids;
        let b = &s.marked("disk:1").unwrap().ids;
        let d = rel_distance(&s, a, b).unwrap().finite().unwrap();
        assert!((d - 1.0).abs() <= 10.0 * h, "{d}");
        assert!(gen_circle_domain::<f64>(&[(0.3, 0.5, 0.2), (0.5, 0.5, 0.1)], h).is_err());
        assert!(gen_circle_domain::<f64>(&[(0.05, 0.5, 0.1)], h).is_err());
        assert_eq!(gen_circle_domain::<f64>(&[], h).unwrap().len(), 65 * 65);
    }

    #[test]
    fn round_circle_shape() {
        let c = gen_round_circle::<f64>(64).unwrap();
        assert_eq!(c.len(), 64);
        assert!(gen_round_circle::<f64>(2).is_err());
    }
}
