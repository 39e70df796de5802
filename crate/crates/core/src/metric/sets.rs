//! Balls, set distances, diameters, nets and connectivity primitives.

use rayon::prelude::*;

use super::paths::{distances_from_set, Search};
use super::report::Ratio;
use super::space::{DiscreteSpace, MarkedSet, SetKind, VertexId};
use crate::error::{input, Result};
use crate::scalar::Scalar;

/// Shortest-path (or Euclidean, per metric kind) distance between two vertices.
pub fn shortest_dist<S: Scalar>(space: &DiscreteSpace<S>, u: VertexId, v: VertexId) -> Result<S> {
    space.check_vertex(u)?;
    space.check_vertex(v)?;
    if u == v {
        return Ok(S::zero());
    }
    let mut search = Search::new(space);
    let mut found = S::infinity();
    search.run_with(&[u], S::infinity(), |w, d| {
        if w == v {
            found = d;
            false
        } else {
            true
        }
    });
    Ok(found)
}

/// Open ball `{v : d(center, v) < r}`, sorted by id.
pub fn ball<S: Scalar>(space: &DiscreteSpace<S>, center: VertexId, r: S) -> Result<Vec<VertexId>> {
    space.check_vertex(center)?;
    let mut search = Search::new(space);
    search.run(&[center], r);
    let mut out: Vec<VertexId> =
        search.settled().iter().copied().filter(|&v| search.dist(v) < r).collect();
    out.sort_unstable();
    Ok(out)
}

/// Open annulus `{v : r < d(center, v) < R}`, sorted by id.
pub fn annulus<S: Scalar>(
    space: &DiscreteSpace<S>,
    center: VertexId,
    r: S,
    big_r: S,
) -> Result<Vec<VertexId>> {
    space.check_vertex(center)?;
    if !(r >= S::zero() && r < big_r) {
        return input(format!("annulus radii must satisfy 0 <= r < R (got {r}, {big_r})"));
    }
    let mut search = Search::new(space);
    search.run(&[center], big_r);
    let mut out: Vec<VertexId> = search
        .settled()
        .iter()
        .copied()
        .filter(|&v| {
            let d = search.dist(v);
            d > r && d < big_r
        })
        .collect();
    out.sort_unstable();
    Ok(out)
}

fn check_set<S: Scalar>(space: &DiscreteSpace<S>, set: &[VertexId], what: &str) -> Result<()> {
    if set.is_empty() {
        return input(format!("{what} is empty"));
    }
    set.iter().try_for_each(|&v| space.check_vertex(v))
}

/// `dist(A, B) = min d(a, b)`.
pub fn set_dist<S: Scalar>(space: &DiscreteSpace<S>, a: &[VertexId], b: &[VertexId]) -> Result<S> {
    check_set(space, a, "first set")?;
    check_set(space, b, "second set")?;
    let mut search = Search::new(space);
    let mut target = vec![false; space.len()];
    for &v in b {
        target[v as usize] = true;
    }
    let mut found = S::infinity();
    search.run_with(a, S::infinity(), |v, d| {
        if target[v as usize] {
            found = d;
            false
        } else {
            true
        }
    });
    Ok(found)
}

/// Exact diameter of a vertex set (one bounded search per member, in parallel).
pub fn set_diameter<S: Scalar>(space: &DiscreteSpace<S>, set: &[VertexId]) -> Result<S> {
    check_set(space, set, "set")?;
    let mut members = vec![false; space.len()];
    for &v in set {
        members[v as usize] = true;
    }
    let total = {
        let mut s = set.to_vec();
        s.sort_unstable();
        s.dedup();
        s.len()
    };
    let diam = set
        .par_iter()
        .map_init(
            || Search::new(space),
            |search, &a| {
                let mut left = total;
                let mut far = S::zero();
                search.run_with(&[a], S::infinity(), |v, d| {
                    if members[v as usize] {
                        left -= 1;
                        far = d;
                    }
                    left > 0
                });
                far
            },
        )
        .reduce(S::zero, S::max);
    Ok(diam)
}

/// Distance matrix of `set` (rows and columns in the given order), one
/// early-stopping search per member.
pub fn set_distance_matrix<S: Scalar>(space: &DiscreteSpace<S>, set: &[VertexId]) -> Result<Vec<Vec<S>>> {
    check_set(space, set, "set")?;
    let mut slot = vec![usize::MAX; space.len()];
    for (i, &v) in set.iter().enumerate() {
        if slot[v as usize] != usize::MAX {
            return input(format!("vertex {v} repeated in set"));
        }
        slot[v as usize] = i;
    }
    let rows = set
        .par_iter()
        .map_init(
            || Search::new(space),
            |search, &a| {
                let mut row = vec![S::infinity(); set.len()];
                let mut left = set.len();
                search.run_with(&[a], S::infinity(), |v, d| {
                    let i = slot[v as usize];
                    if i != usize::MAX {
                        row[i] = d;
                        left -= 1;
                    }
                    left > 0
                });
                row
            },
        )
        .collect();
    Ok(rows)
}

/// Diameter of `set`, or of the whole space when `set` is `None`.
///
/// The whole-space diameter is exact up to 4096 vertices; above that it is
/// the iterated double-sweep lower bound (all-pairs sweeps are never run on
/// large meshes).
pub fn diameter<S: Scalar>(space: &DiscreteSpace<S>, set: Option<&[VertexId]>) -> Result<S> {
    match set {
        Some(s) => set_diameter(space, s),
        None if space.len() <= 4096 => {
            let all: Vec<VertexId> = (0..space.len() as VertexId).collect();
            set_diameter(space, &all)
        }
        None => Ok(double_sweep(space)),
    }
}

/// Iterated double sweep: a lower bound on the diameter, usually tight on meshes.
pub fn double_sweep<S: Scalar>(space: &DiscreteSpace<S>) -> S {
    let mut search = Search::new(space);
    let mut src = 0;
    let mut best = S::zero();
    for _ in 0..4 {
        search.run(&[src], S::infinity());
        let (far, d) = search
            .settled()
            .last()
            .map(|&v| (v, search.dist(v)))
            .unwrap_or((src, S::zero()));
        if d <= best && far == src {
            break;
        }
        best = best.max(d);
        src = far;
    }
    best
}

/// Relative distance `dist(A,B) / min(diam A, diam B)`, infinite when the
/// smaller diameter vanishes.
pub fn rel_distance<S: Scalar>(
    space: &DiscreteSpace<S>,
    a: &[VertexId],
    b: &[VertexId],
) -> Result<Ratio> {
    let gap = set_dist(space, a, b)?;
    let m = set_diameter(space, a)?.min(set_diameter(space, b)?);
    Ok(rel_from_parts(gap, m))
}

/// Relative distance from a precomputed gap and smaller diameter.
pub fn rel_from_parts<S: Scalar>(gap: S, min_diam: S) -> Ratio {
    if min_diam <= S::zero() {
        Ratio::Infinite
    } else {
        Ratio::Finite((gap / min_diam).as_f64())
    }
}

/// Hausdorff distance between two vertex sets.
pub fn hausdorff_dist<S: Scalar>(
    space: &DiscreteSpace<S>,
    a: &[VertexId],
    b: &[VertexId],
) -> Result<S> {
    check_set(space, a, "first set")?;
    check_set(space, b, "second set")?;
    let to_b = distances_from_set(space, b);
    let to_a = distances_from_set(space, a);
    let ab = a.iter().map(|&v| to_b[v as usize]).fold(S::zero(), S::max);
    let ba = b.iter().map(|&v| to_a[v as usize]).fold(S::zero(), S::max);
    Ok(ab.max(ba))
}

/// Greedy ε-net in vertex-id order: every vertex lies within distance `< ε`
/// of a net point and net points are pairwise at distance `>= ε`.
pub fn epsilon_net<S: Scalar>(space: &DiscreteSpace<S>, eps: S) -> Result<MarkedSet> {
    if !(eps > S::zero()) {
        return input(format!("epsilon must be positive (got {eps})"));
    }
    let mut covered = vec![false; space.len()];
    let mut net = Vec::new();
    let mut search = Search::new(space);
    for v in 0..space.len() as VertexId {
        if covered[v as usize] {
            continue;
        }
        net.push(v);
        search.run(&[v], eps);
        for &w in search.settled() {
            if search.dist(w) < eps {
                covered[w as usize] = true;
            }
        }
    }
    Ok(MarkedSet::new(format!("net:{eps}"), SetKind::Generic, net, 0))
}

/// Partition of `set` into connected components of the induced subgraph.
/// Parts are sorted internally and ordered by smallest member.
pub fn restricted_components<S: Scalar>(
    space: &DiscreteSpace<S>,
    set: &[VertexId],
) -> Vec<Vec<VertexId>> {
    let mut inside = vec![false; space.len()];
    for &v in set {
        inside[v as usize] = true;
    }
    let mut order = set.to_vec();
    order.sort_unstable();
    order.dedup();
    let mut seen = vec![false; space.len()];
    let mut parts = Vec::new();
    for &s in &order {
        if seen[s as usize] {
            continue;
        }
        seen[s as usize] = true;
        let mut part = vec![s];
        let mut i = 0;
        while i < part.len() {
            let u = part[i];
            i += 1;
            for (w, _) in space.neighbors(u) {
                if inside[w as usize] && !seen[w as usize] {
                    seen[w as usize] = true;
                    part.push(w);
                }
            }
        }
        part.sort_unstable();
        parts.push(part);
    }
    parts
}

/// Disjoint-set forest used by the chain partitions.
pub(crate) struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    pub(crate) fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }

    pub(crate) fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    pub(crate) fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            // Smaller root wins so the result does not depend on call order.
            let (lo, hi) = if ra < rb { (ra, rb) } else { (rb, ra) };
            self.parent[hi] = lo;
        }
    }
}

/// Partition of `set` into ε-chain classes, where `u, w` are chain neighbours
/// when `d(u, w) <= eps(u).min(eps(w))`.  Parts are sorted and ordered by
/// smallest member.
pub fn epsilon_chain_components<S: Scalar>(
    space: &DiscreteSpace<S>,
    set: &[VertexId],
    eps: impl Fn(VertexId) -> S + Sync,
) -> Vec<Vec<VertexId>> {
    let mut order = set.to_vec();
    order.sort_unstable();
    order.dedup();
    let mut index = vec![usize::MAX; space.len()];
    for (i, &v) in order.iter().enumerate() {
        index[v as usize] = i;
    }
    let links: Vec<(usize, usize)> = order
        .par_iter()
        .enumerate()
        .map_init(
            || Search::new(space),
            |search, (i, &u)| {
                let eu = eps(u);
                let mut out = Vec::new();
                search.run(&[u], eu);
                for &w in search.settled() {
                    let j = index[w as usize];
                    if j != usize::MAX && j > i && search.dist(w) <= eu.min(eps(w)) {
                        out.push((i, j));
                    }
                }
                out
            },
        )
        .flatten()
        .collect();
    let mut uf = UnionFind::new(order.len());
    for (i, j) in links {
        uf.union(i, j);
    }
    let mut parts: Vec<Vec<VertexId>> = Vec::new();
    let mut slot = vec![usize::MAX; order.len()];
    for (i, &v) in order.iter().enumerate() {
        let r = uf.find(i);
        if slot[r] == usize::MAX {
            slot[r] = parts.len();
            parts.push(Vec::new());
        }
        parts[slot[r]].push(v);
    }
    parts
}

/// Whether every pair of `set` is joined by an ε-chain inside `set`.
pub fn epsilon_chain_connected<S: Scalar>(space: &DiscreteSpace<S>, set: &[VertexId], eps: S) -> bool {
    epsilon_chain_components(space, set, |_| eps).len() <= 1
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::space::{Side, SpaceBuilder};

    fn grid(n: usize, h: f64) -> DiscreteSpace<f64> {
        let mut b = SpaceBuilder::new();
        for j in 0..n {
            for i in 0..n {
                b.add_vertex(i as f64 * h, j as f64 * h, Side::None);
            }
        }
        for j in 0..n {
            for i in 0..n {
                let v = (j * n + i) as u32;
                if i + 1 < n {
                    b.add_edge(v, v + 1, h).unwrap();
                }
                if j + 1 < n {
                    b.add_edge(v, v + n as u32, h).unwrap();
                }
            }
        }
        b.build(h, "grid").unwrap()
    }

    #[test]
    fn balls_and_annuli() {
        let s = grid(5, 0.25);
        assert!(ball(&s, 12, 0.0).unwrap().is_empty());
        assert_eq!(ball(&s, 12, 10.0).unwrap().len(), 25);
        assert_eq!(ball(&s, 12, 0.3).unwrap().len(), 5);
        let ann = annulus(&s, 12, 0.0, 0.3).unwrap();
        assert_eq!(ann.len(), 4);
        assert!(annulus(&s, 12, 0.5, 0.5).is_err());
    }

    #[test]
    fn set_distances_and_relative_distance() {
        let s = grid(5, 0.25);
        assert_eq!(shortest_dist(&s, 0, 24).unwrap(), 2.0);
        assert!(shortest_dist(&s, 0, 99).is_err());
        let left: Vec<u32> = (0..5).map(|j| j * 5).collect();
        let right: Vec<u32> = (0..5).map(|j| j * 5 + 4).collect();
        assert_eq!(set_dist(&s, &left, &right).unwrap(), 1.0);
        assert_eq!(rel_distance(&s, &left, &right).unwrap(), Ratio::Finite(1.0));
        assert_eq!(rel_distance(&s, &[0], &right).unwrap(), Ratio::Infinite);
        assert_eq!(hausdorff_dist(&s, &left, &right).unwrap(), 1.0);
        assert!(set_dist(&s, &[], &right).is_err());
        assert_eq!(diameter(&s, None).unwrap(), 2.0);
        assert_eq!(double_sweep(&s), 2.0);
    }

    #[test]
    fn nets_components_chains() {
        let s = grid(6, 0.2);
        let net = epsilon_net(&s, 0.5).unwrap();
        let mut q = Search::new(&s);
        for &a in &net.ids {
            q.run(&[a], f64::INFINITY);
            for &b in &net.ids {
                assert!(a == b || q.dist(b) >= 0.5);
            }
        }
        let all: Vec<u32> = (0..36).collect();
        assert_eq!(restricted_components(&s, &all).len(), 1);
        assert_eq!(restricted_components(&s, &[0, 35]).len(), 2);
        assert!(!epsilon_chain_connected(&s, &[0, 35], 0.3));
        assert!(epsilon_chain_connected(&s, &[0, 35], 2.0));
        assert!(epsilon_chain_connected(&s, &[7], 0.1));
        assert!(restricted_components(&s, &[]).is_empty());
    }
}
