//! Checks behind the weak-tangent argument for the accumulating domain:
//! dyadic nets pulled back to slit domains (net graphs and their distance
//! matrices), the inclusion of Euclidean balls in projected metric balls, and
//! the covering of projection preimages by few metric balls.

use std::collections::{BTreeMap, HashMap, HashSet};

use rayon::prelude::*;

use super::sample::SampleSpec;
use crate::constructions::SlitDomainMesh;
use crate::error::{input, Result};
use crate::metric::{diameter, ConstantReport, DiscreteSpace, Ratio, Search, Side, VertexId};
use crate::scalar::Scalar;

/// Key of a net point: lattice indices in units of the net spacing and the
/// slit side of the chosen preimage.
pub type NetKey = (u32, u32, Side);

/// Net graph of a pulled-back dyadic net with its shortest-path matrix.
#[derive(Clone, Debug)]
pub struct NetGraph {
    pub spacing: f64,
    /// Net points in key order.
    pub keys: Vec<NetKey>,
    pub vertices: Vec<VertexId>,
    /// Net-graph edges as index pairs into `keys`.
    pub edges: Vec<(usize, usize)>,
    /// Net-graph distances (multiples of `spacing`, `∞` when disconnected).
    pub dist: Vec<Vec<f64>>,
}

/// Outcome of comparing two net graphs entrywise.
#[derive(Clone, Debug, PartialEq)]
pub struct NetComparison {
    /// Whether both nets have the same points.
    pub same_points: bool,
    /// Largest entrywise difference of the distance matrices (∞ when the
    /// point sets differ or one side is disconnected where the other is not).
    pub max_diff: f64,
    /// Keys present in only one of the nets.
    pub unmatched: Vec<NetKey>,
}

impl NetComparison {
    pub fn within(&self, tol: f64) -> bool {
        self.same_points && self.max_diff <= tol
    }
}

/// Index of mesh vertices by exact coordinates and side.
fn coordinate_index<S: Scalar>(space: &DiscreteSpace<S>) -> HashMap<(u64, u64, Side), VertexId> {
    space
        .vertices()
        .iter()
        .enumerate()
        .map(|(i, p)| ((p.x.as_f64().to_bits(), p.y.as_f64().to_bits(), p.side), i as VertexId))
        .collect()
}

/// The net `D_N`: preimages of the dyadic grid of spacing `2^-(N+1)` in the
/// unit square (two preimages for points inside a slit), joined when they are
/// axis-adjacent grid points whose mesh distance equals the spacing.
pub fn pulled_back_net<S: Scalar>(mesh: &SlitDomainMesh<S>, level: u32) -> Result<NetGraph> {
    let space = &mesh.space;
    let steps = 1u32 << (level + 1);
    let spacing = 1.0 / steps as f64;
    if spacing < 2.0 * space.h().as_f64() {
        return input(format!("net spacing {spacing} is below the mesh resolution"));
    }
    let index = coordinate_index(space);
    let mut points: BTreeMap<NetKey, VertexId> = BTreeMap::new();
    for i in 0..=steps {
        for j in 0..=steps {
            let (x, y) = ((i as f64 * spacing).to_bits(), (j as f64 * spacing).to_bits());
            for side in [Side::None, Side::Left, Side::Right] {
                if let Some(&v) = index.get(&(x, y, side)) {
                    points.insert((i, j, side), v);
                }
            }
        }
    }
    let keys: Vec<NetKey> = points.keys().copied().collect();
    let vertices: Vec<VertexId> = points.values().copied().collect();
    let slot: HashMap<VertexId, usize> = vertices.iter().enumerate().map(|(k, &v)| (v, k)).collect();
    let limit = S::of(spacing * (1.0 + 1e-9));
    let tol = 1e-9 * spacing;
    let rows: Vec<Vec<usize>> = vertices
        .par_iter()
        .enumerate()
        .map_init(
            || Search::new(space),
            |search, (a, &v)| {
                search.run(&[v], limit);
                let (i, j, _) = keys[a];
                search
                    .settled()
                    .iter()
                    .filter_map(|w| slot.get(w).map(|&b| (b, *w)))
                    .filter(|&(b, w)| {
                        let (k, l, _) = keys[b];
                        let adjacent = (i.abs_diff(k) + j.abs_diff(l)) == 1;
                        adjacent && a < b && (search.dist(w).as_f64() - spacing).abs() <= tol
                    })
                    .map(|(b, _)| b)
                    .collect()
            },
        )
        .collect();
    let edges: Vec<(usize, usize)> =
        rows.iter().enumerate().flat_map(|(a, bs)| bs.iter().map(move |&b| (a, b))).collect();
    let n = keys.len();
    let mut dist = vec![vec![f64::INFINITY; n]; n];
    for (a, row) in dist.iter_mut().enumerate() {
        row[a] = 0.0;
    }
    for &(a, b) in &edges {
        dist[a][b] = spacing;
        dist[b][a] = spacing;
    }
    for k in 0..n {
        for a in 0..n {
            let dak = dist[a][k];
            if dak.is_infinite() {
                continue;
            }
            for b in 0..n {
                let via = dak + dist[k][b];
                if via < dist[a][b] {
                    dist[a][b] = via;
                }
            }
        }
    }
    Ok(NetGraph { spacing, keys, vertices, edges, dist })
}

/// Entrywise comparison of two net graphs over their common key order.
pub fn compare_nets(a: &NetGraph, b: &NetGraph) -> NetComparison {
    let unmatched: Vec<NetKey> = {
        let sa: std::collections::BTreeSet<_> = a.keys.iter().copied().collect();
        let sb: std::collections::BTreeSet<_> = b.keys.iter().copied().collect();
        sa.symmetric_difference(&sb).copied().collect()
    };
    if !unmatched.is_empty() {
        return NetComparison { same_points: false, max_diff: f64::INFINITY, unmatched };
    }
    let mut max_diff = 0.0f64;
    for i in 0..a.keys.len() {
        for j in 0..a.keys.len() {
            let (x, y) = (a.dist[i][j], b.dist[i][j]);
            let diff = if x == y { 0.0 } else { (x - y).abs() };
            max_diff = max_diff.max(if diff.is_nan() { f64::INFINITY } else { diff });
        }
    }
    NetComparison { same_points: true, max_diff, unmatched }
}

/// Bounding box `(x0, y0, x1, y1)` of the projection.
fn bounding_box<S: Scalar>(space: &DiscreteSpace<S>) -> (f64, f64, f64, f64) {
    space.vertices().iter().fold(
        (f64::INFINITY, f64::INFINITY, f64::NEG_INFINITY, f64::NEG_INFINITY),
        |(a, b, c, d), p| {
            let (x, y) = (p.x.as_f64(), p.y.as_f64());
            (a.min(x), b.min(y), c.max(x), d.max(y))
        },
    )
}

/// Inclusion check: for sampled `(p, r)`, the largest `c` such that a
/// Euclidean ball `B(q, c·r)` lies in the projection `π(B(p, r))`, i.e. every
/// mesh point within `c·r` of `q` is the image of a vertex of the ball and the
/// disc stays in the square.  The report's value is the minimum of `c` over
/// samples (a min-type constant; larger is better).
///
/// Every projected ball vertex is tried as the center `q`, scored by exact
/// nearest-neighbour distance to the mesh points the ball misses.
pub fn inclusion_check<S: Scalar>(mesh: &SlitDomainMesh<S>, spec: &SampleSpec) -> Result<ConstantReport> {
    spec.validate()?;
    let space = &mesh.space;
    let diam = diameter(space, None)?.as_f64();
    let range = spec.radius_range(diam);
    let h = space.h().as_f64();
    if range.0 <= 2.0 * h {
        return input(format!("radius {} is below the resolution floor 2h = {}", range.0, 2.0 * h));
    }
    let bbox = bounding_box(space);
    let point = |v: VertexId| {
        let p = space.vertex(v);
        [p.x.as_f64(), p.y.as_f64()]
    };
    let key = |v: VertexId| {
        let [x, y] = point(v);
        (x.to_bits(), y.to_bits())
    };
    let pool: Vec<VertexId> = (0..space.len() as VertexId).collect();
    let outcomes: Vec<f64> = (0..spec.samples)
        .into_par_iter()
        .map_init(
            || Search::new(space),
            |search, i| {
                let mut rng = spec.rng(i);
                let p = spec.draw_center(&mut rng, i, &pool);
                let r = spec.draw_radius(&mut rng, range);
                let rs = S::of(r);
                search.run(&[p], rs);
                let inside: Vec<VertexId> =
                    search.settled().iter().copied().filter(|&v| search.dist(v) < rs).collect();
                let reached: HashSet<(u64, u64)> = inside.iter().map(|&v| key(v)).collect();
                let mut missed: Vec<[f64; 2]> = Vec::new();
                let mut seen = HashSet::new();
                for v in 0..space.len() as VertexId {
                    let k = key(v);
                    if !reached.contains(&k) && seen.insert(k) {
                        missed.push(point(v));
                    }
                }
                let missed = PointGrid::new(&missed, bbox, r / 8.0);
                let best = inside
                    .iter()
                    .map(|&q| {
                        let [x, y] = point(q);
                        let room = euclid_room(x, y, bbox);
                        room.min(missed.nearest(x, y, room))
                    })
                    .fold(0.0, f64::max);
                best / r
            },
        )
        .collect();
    let worst = outcomes.iter().copied().fold(f64::INFINITY, f64::min);
    let mut report = spec.report("inclusion", "Euclidean balls inside projected balls", space, range);
    report.samples = outcomes.len();
    report.value = Ratio::from_f64(worst);
    Ok(report)
}

/// Uniform bucket grid over a point cloud for exact nearest-neighbour
/// distances.
struct PointGrid {
    origin: (f64, f64),
    cell: f64,
    dims: (usize, usize),
    buckets: Vec<Vec<[f64; 2]>>,
}

impl PointGrid {
    fn new(points: &[[f64; 2]], bbox: (f64, f64, f64, f64), cell: f64) -> Self {
        let dims = (
            ((bbox.2 - bbox.0) / cell).floor() as usize + 1,
            ((bbox.3 - bbox.1) / cell).floor() as usize + 1,
        );
        let mut buckets = vec![Vec::new(); dims.0 * dims.1];
        let mut grid = PointGrid { origin: (bbox.0, bbox.1), cell, dims, buckets: Vec::new() };
        for &p in points {
            let (i, j) = grid.cell_of(p[0], p[1]);
            buckets[j * dims.0 + i].push(p);
        }
        grid.buckets = buckets;
        grid
    }

    fn cell_of(&self, x: f64, y: f64) -> (usize, usize) {
        let i = (((x - self.origin.0) / self.cell).floor().max(0.0) as usize).min(self.dims.0 - 1);
        let j = (((y - self.origin.1) / self.cell).floor().max(0.0) as usize).min(self.dims.1 - 1);
        (i, j)
    }

    /// Distance from `(x, y)` to the nearest point, or `cap` if none is
    /// closer than `cap`.
    fn nearest(&self, x: f64, y: f64, cap: f64) -> f64 {
        let (ci, cj) = self.cell_of(x, y);
        let mut best = cap;
        let mut ring = 0usize;
        // Points in rings beyond `ring` are at least `ring·cell` away.
        while (ring as f64) * self.cell < best && (ring <= self.dims.0 || ring <= self.dims.1) {
            let (i0, i1) = (ci.saturating_sub(ring), (ci + ring).min(self.dims.0 - 1));
            let (j0, j1) = (cj.saturating_sub(ring), (cj + ring).min(self.dims.1 - 1));
            for j in j0..=j1 {
                for i in i0..=i1 {
                    if i.abs_diff(ci) != ring && j.abs_diff(cj) != ring {
                        continue;
                    }
                    for p in &self.buckets[j * self.dims.0 + i] {
                        best = best.min((p[0] - x).hypot(p[1] - y));
                    }
                }
            }
            ring += 1;
        }
        best
    }
}

/// Distance from `(x, y)` to the complement of the box.
fn euclid_room(x: f64, y: f64, bbox: (f64, f64, f64, f64)) -> f64 {
    (x - bbox.0).min(y - bbox.1).min(bbox.2 - x).min(bbox.3 - y)
}

/// Preimage-cover check: for sampled `q = π(v)` and `r`, greedily covers the
/// preimage `π⁻¹(B(q, r))` (Euclidean ball) by metric balls of radius
/// `factor·r` centered in the preimage.  The report's value is the largest
/// number of balls used; extra `radius_factor` records the factor.
pub fn preimage_cover_check<S: Scalar>(
    mesh: &SlitDomainMesh<S>,
    spec: &SampleSpec,
    factor: f64,
) -> Result<ConstantReport> {
    spec.validate()?;
    if !(factor > 0.0) {
        return input("cover radius factor must be positive");
    }
    let space = &mesh.space;
    let diam = diameter(space, None)?.as_f64();
    let range = spec.radius_range(diam);
    let pool: Vec<VertexId> = (0..space.len() as VertexId).collect();
    let counts: Vec<usize> = (0..spec.samples)
        .into_par_iter()
        .map_init(
            || Search::new(space),
            |search, i| {
                let mut rng = spec.rng(i);
                let c = spec.draw_center(&mut rng, i, &pool);
                let r = spec.draw_radius(&mut rng, range);
                let (qx, qy) = (space.vertex(c).x.as_f64(), space.vertex(c).y.as_f64());
                let pre: Vec<VertexId> = (0..space.len() as VertexId)
                    .filter(|&v| {
                        let p = space.vertex(v);
                        (p.x.as_f64() - qx).hypot(p.y.as_f64() - qy) < r
                    })
                    .collect();
                let mut in_pre = HashMap::with_capacity(pre.len());
                for (k, &v) in pre.iter().enumerate() {
                    in_pre.insert(v, k);
                }
                let mut covered = vec![false; pre.len()];
                let radius = S::of(factor * r);
                let mut balls = 0;
                for k in 0..pre.len() {
                    if covered[k] {
                        continue;
                    }
                    balls += 1;
                    search.run(&[pre[k]], radius);
                    for &w in search.settled() {
                        if search.dist(w) < radius {
                            if let Some(&j) = in_pre.get(&w) {
                                covered[j] = true;
                            }
                        }
                    }
                }
                balls
            },
        )
        .collect();
    let mut report = spec.report("preimage_cover", "preimages of Euclidean balls", space, range);
    report.samples = counts.len();
    report.value = Ratio::Finite(counts.iter().copied().max().unwrap_or(0) as f64);
    report.extra.push(("radius_factor".into(), factor));
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::{gen_q, gen_slit_carpet};

    #[test]
    fn net_of_first_slit_domain() {
        let q = gen_q::<f64>(1, 1.0 / 32.0).unwrap();
        let net = pulled_back_net(&q, 1).unwrap();
        // 5×5 grid; (1/2, 1/2) lies inside the slit and is doubled.
        assert_eq!(net.keys.len(), 26);
        let l = net.keys.iter().position(|k| *k == (2, 2, Side::Left)).unwrap();
        let r = net.keys.iter().position(|k| *k == (2, 2, Side::Right)).unwrap();
        // Up the left side to a tip and down the right side.
        assert_eq!(net.dist[l][r], 0.5);
        let same = compare_nets(&net, &pulled_back_net(&gen_slit_carpet::<f64>(1, 1.0 / 32.0).unwrap(), 1).unwrap());
        assert!(same.within(0.0));
    }

    #[test]
    fn plain_square_inclusion_and_cover() {
        let q = gen_q::<f64>(0, 1.0 / 32.0).unwrap();
        let spec = SampleSpec::default().with_samples(6).with_absolute_radii(0.125, 0.25);
        let inc = inclusion_check(&q, &spec).unwrap().value.finite().unwrap();
        assert!(inc >= 0.3, "{inc}");
        let cover = preimage_cover_check(&q, &spec, 8.0).unwrap().value.finite().unwrap();
        assert_eq!(cover, 1.0);
    }
}
