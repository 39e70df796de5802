//! Shortest-path and bottleneck-path searches with reusable scratch buffers.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use super::space::{DiscreteSpace, MetricKind, VertexId};
use crate::scalar::Scalar;

/// Heap entry ordered so that `BinaryHeap` pops the smallest key first and,
/// among equal keys, the smallest vertex id.  The total order makes every
/// search deterministic.
#[derive(Clone, Copy, Debug)]
struct Item<S> {
    key: S,
    v: VertexId,
}

impl<S: Scalar> PartialEq for Item<S> {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl<S: Scalar> Eq for Item<S> {}

impl<S: Scalar> PartialOrd for Item<S> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl<S: Scalar> Ord for Item<S> {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .key
            .partial_cmp(&self.key)
            .unwrap_or(Ordering::Equal)
            .then_with(|| other.v.cmp(&self.v))
    }
}

/// Dijkstra search whose distance table is reset lazily between runs, so a
/// single instance can serve thousands of bounded queries on a large graph.
///
/// For spaces with [`MetricKind::Euclidean`] the same interface computes
/// coordinate distances by a linear scan.
pub struct Search<'a, S> {
    space: &'a DiscreteSpace<S>,
    dist: Vec<S>,
    touched: Vec<VertexId>,
    settled: Vec<VertexId>,
    heap: BinaryHeap<Item<S>>,
}

impl<'a, S: Scalar> Search<'a, S> {
    pub fn new(space: &'a DiscreteSpace<S>) -> Self {
        Search {
            space,
            dist: vec![S::infinity(); space.len()],
            touched: Vec::new(),
            settled: Vec::new(),
            heap: BinaryHeap::new(),
        }
    }

    pub fn space(&self) -> &'a DiscreteSpace<S> {
        self.space
    }

    /// Distance found by the last run (`∞` if the vertex was not reached).
    #[inline]
    pub fn dist(&self, v: VertexId) -> S {
        self.dist[v as usize]
    }

    /// Vertices settled by the last run, in nondecreasing distance order.
    pub fn settled(&self) -> &[VertexId] {
        &self.settled
    }

    fn reset(&mut self) {
        for &v in &self.touched {
            self.dist[v as usize] = S::infinity();
        }
        self.touched.clear();
        self.settled.clear();
        self.heap.clear();
    }

    /// Settles every vertex with distance `<= limit` from the source set;
    /// returns how many were settled (see [`Search::settled`]).
    pub fn run(&mut self, sources: &[VertexId], limit: S) -> usize {
        self.run_with(sources, limit, |_, _| true);
        self.settled.len()
    }

    /// Like [`Search::run`], calling `visit(v, d)` as each vertex is settled;
    /// the search stops early when `visit` returns `false`.
    pub fn run_with(
        &mut self,
        sources: &[VertexId],
        limit: S,
        mut visit: impl FnMut(VertexId, S) -> bool,
    ) {
        self.reset();
        if self.space.metric() == MetricKind::Euclidean {
            self.scan_euclidean(sources, limit, visit);
            return;
        }
        for &s in sources {
            if self.dist[s as usize] > S::zero() {
                if self.dist[s as usize].is_infinite() {
                    self.touched.push(s);
                }
                self.dist[s as usize] = S::zero();
                self.heap.push(Item { key: S::zero(), v: s });
            }
        }
        while let Some(Item { key, v }) = self.heap.pop() {
            if key > self.dist[v as usize] {
                continue;
            }
            if key > limit {
                break;
            }
            self.settled.push(v);
            if !visit(v, key) {
                break;
            }
            for (w, l) in self.space.neighbors(v) {
                let nd = key + l;
                let slot = &mut self.dist[w as usize];
                if nd < *slot {
                    if slot.is_infinite() {
                        self.touched.push(w);
                    }
                    *slot = nd;
                    self.heap.push(Item { key: nd, v: w });
                }
            }
        }
    }

    fn scan_euclidean(
        &mut self,
        sources: &[VertexId],
        limit: S,
        mut visit: impl FnMut(VertexId, S) -> bool,
    ) {
        let space = self.space;
        let mut found: Vec<(S, VertexId)> = Vec::new();
        for v in 0..space.len() as VertexId {
            let d = sources.iter().map(|&s| space.euclid(s, v)).fold(S::infinity(), S::min);
            if d <= limit {
                found.push((d, v));
            }
        }
        found.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap_or(Ordering::Equal).then(a.1.cmp(&b.1)));
        for (d, v) in found {
            self.dist[v as usize] = d;
            self.touched.push(v);
            self.settled.push(v);
            if !visit(v, d) {
                break;
            }
        }
    }
}

/// Full single-source distance table.
pub fn distances<S: Scalar>(space: &DiscreteSpace<S>, source: VertexId) -> Vec<S> {
    distances_from_set(space, &[source])
}

/// Full multi-source distance table: `d(v, sources)` for every vertex.
pub fn distances_from_set<S: Scalar>(space: &DiscreteSpace<S>, sources: &[VertexId]) -> Vec<S> {
    let mut search = Search::new(space);
    search.run(sources, S::infinity());
    search.dist
}

/// Bottleneck ("minimax") search: minimises over paths the maximum of a
/// per-vertex cost.  Connecting two vertices inside `{v : cost(v) < t}` is
/// possible exactly when their minimax value is `< t`, which turns every
/// "least λ such that x and y lie in one component of a sublevel set" question
/// into a single search.
pub struct Minimax<'a, S> {
    space: &'a DiscreteSpace<S>,
    key: Vec<S>,
    pred: Vec<VertexId>,
    touched: Vec<VertexId>,
    heap: BinaryHeap<Item<S>>,
}

impl<'a, S: Scalar> Minimax<'a, S> {
    pub fn new(space: &'a DiscreteSpace<S>) -> Self {
        Minimax {
            space,
            key: vec![S::infinity(); space.len()],
            pred: vec![VertexId::MAX; space.len()],
            touched: Vec::new(),
            heap: BinaryHeap::new(),
        }
    }

    /// Minimax value from the last run's source to `v` (`∞` if unreached).
    #[inline]
    pub fn value(&self, v: VertexId) -> S {
        self.key[v as usize]
    }

    /// Runs from `source` until every vertex of `targets` is settled or the
    /// frontier exceeds `limit`.  Vertices with infinite cost are never entered.
    pub fn run(
        &mut self,
        source: VertexId,
        targets: &[VertexId],
        limit: S,
        cost: impl Fn(VertexId) -> S,
    ) {
        for &v in &self.touched {
            self.key[v as usize] = S::infinity();
            self.pred[v as usize] = VertexId::MAX;
        }
        self.touched.clear();
        self.heap.clear();
        let c0 = cost(source);
        if !c0.is_finite() {
            return;
        }
        self.key[source as usize] = c0;
        self.touched.push(source);
        self.heap.push(Item { key: c0, v: source });
        let mut remaining: Vec<VertexId> = targets.to_vec();
        remaining.sort_unstable();
        remaining.dedup();
        let mut left = remaining.len();
        let mut done = vec![false; remaining.len()];
        while let Some(Item { key, v }) = self.heap.pop() {
            if key > self.key[v as usize] {
                continue;
            }
            if key > limit {
                break;
            }
            if let Ok(i) = remaining.binary_search(&v) {
                if !done[i] {
                    done[i] = true;
                    left -= 1;
                    if left == 0 {
                        break;
                    }
                }
            }
            for (w, _) in self.space.neighbors(v) {
                let cw = cost(w);
                if !cw.is_finite() {
                    continue;
                }
                let nk = if cw > key { cw } else { key };
                let slot = &mut self.key[w as usize];
                if nk < *slot {
                    if slot.is_infinite() {
                        self.touched.push(w);
                    }
                    *slot = nk;
                    self.pred[w as usize] = v;
                    self.heap.push(Item { key: nk, v: w });
                }
            }
        }
    }

    /// Path from the last run's source to `v` (empty if unreached).
    pub fn path_to(&self, v: VertexId) -> Vec<VertexId> {
        if self.key[v as usize].is_infinite() {
            return Vec::new();
        }
        let mut path = vec![v];
        let mut cur = v;
        while self.pred[cur as usize] != VertexId::MAX {
            cur = self.pred[cur as usize];
            path.push(cur);
        }
        path.reverse();
        path
    }
}
