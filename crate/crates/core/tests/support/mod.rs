//! Independent oracles and random instances shared by integration tests.
//!
//! The admissible-sequence oracle never looks at the glued graph: it takes
//! the pieces separately, computes each piece's own metric by Floyd–Warshall
//! and then minimises over chains of legs, each leg inside a single piece,
//! consecutive legs meeting at identified points.  With integer edge lengths
//! every sum is exact, so the comparison with the glued graph is exact.

#![allow(dead_code)]

use std::collections::{BTreeSet, VecDeque};

use carpetlab::gluing::{glue, GluedSpace, GluingInstance};
use carpetlab::metric::{DiscreteSpace, Side, SpaceBuilder, VertexId};
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// All-pairs distances of one piece in its own metric.
pub fn floyd_warshall(space: &DiscreteSpace<f64>) -> Vec<Vec<f64>> {
    let n = space.len();
    let mut d = vec![vec![f64::INFINITY; n]; n];
    for (i, row) in d.iter_mut().enumerate() {
        row[i] = 0.0;
    }
    for &(u, v, l) in space.edges() {
        let (u, v) = (u as usize, v as usize);
        d[u][v] = d[u][v].min(l);
        d[v][u] = d[v][u].min(l);
    }
    for k in 0..n {
        for i in 0..n {
            if d[i][k].is_infinite() {
                continue;
            }
            for j in 0..n {
                let via = d[i][k] + d[k][j];
                if via < d[i][j] {
                    d[i][j] = via;
                }
            }
        }
    }
    d
}

/// Pieces of a gluing instance (base first) and its identifications as
/// `((piece, vertex), (piece, vertex))` pairs.
pub struct Pieces {
    pub spaces: Vec<DiscreteSpace<f64>>,
    pub links: Vec<((usize, VertexId), (usize, VertexId))>,
}

impl Pieces {
    pub fn of(instance: &GluingInstance<f64>) -> Self {
        let mut spaces = vec![instance.base.clone()];
        let mut links = Vec::new();
        for (i, p) in instance.patches.iter().enumerate() {
            spaces.push(p.space.clone());
            links.extend(p.pairs.iter().map(|&(b, q)| ((0, b), (i + 1, q))));
        }
        Pieces { spaces, links }
    }
}

/// Infimum of admissible-sequence lengths from `(piece, v)` to every point
/// `(piece', w)`, found by relaxing chains leg by leg until no chain of one
/// more leg is shorter.
pub fn admissible_infimum(pieces: &Pieces, metrics: &[Vec<Vec<f64>>], from: (usize, VertexId)) -> Vec<Vec<f64>> {
    let mut best: Vec<Vec<f64>> = pieces.spaces.iter().map(|s| vec![f64::INFINITY; s.len()]).collect();
    // One leg: inside the starting piece.
    let (p0, v0) = (from.0, from.1 as usize);
    best[p0].clone_from(&metrics[p0][v0]);
    loop {
        let mut changed = false;
        // Cross an identification (zero cost), then walk one leg in the new
        // piece from the crossing point.
        for &((pa, a), (pb, b)) in &pieces.links {
            for (src, dst) in [((pa, a as usize), (pb, b as usize)), ((pb, b as usize), (pa, a as usize))] {
                let reach = best[src.0][src.1];
                if reach.is_infinite() {
                    continue;
                }
                let row = &metrics[dst.0][dst.1];
                for (w, &leg) in row.iter().enumerate() {
                    let total = reach + leg;
                    if total < best[dst.0][w] {
                        best[dst.0][w] = total;
                        changed = true;
                    }
                }
            }
        }
        if !changed {
            return best;
        }
    }
}

/// Random connected graph with integer edge lengths in `1..=4` and distinct
/// integer-grid coordinates.
pub fn random_piece(rng: &mut ChaCha8Rng, n: usize, label: &str) -> DiscreteSpace<f64> {
    let mut b = SpaceBuilder::<f64>::new();
    let mut cells: Vec<(u32, u32)> = (0..n as u32 * 4).flat_map(|x| (0..4).map(move |y| (x, y))).collect();
    cells.shuffle(rng);
    for &(x, y) in cells.iter().take(n) {
        b.add_vertex(x as f64, y as f64, Side::None);
    }
    let mut present = BTreeSet::new();
    let mut add = |b: &mut SpaceBuilder<f64>, u: usize, v: usize, rng: &mut ChaCha8Rng| {
        let key = (u.min(v), u.max(v));
        if u != v && present.insert(key) {
            b.add_edge(u as VertexId, v as VertexId, rng.gen_range(1..=4) as f64).unwrap();
        }
    };
    // Random spanning tree, then a few chords.
    for v in 1..n {
        let u = rng.gen_range(0..v);
        add(&mut b, u, v, rng);
    }
    for _ in 0..n / 2 {
        let (u, v) = (rng.gen_range(0..n), rng.gen_range(0..n));
        add(&mut b, u, v, rng);
    }
    b.build(1.0, label).unwrap()
}

/// A connected vertex set of `size` grown by breadth-first search from a
/// random start avoiding `taken`, in BFS order; `None` if too small.
pub fn connected_set(
    rng: &mut ChaCha8Rng,
    space: &DiscreteSpace<f64>,
    size: usize,
    taken: &BTreeSet<VertexId>,
) -> Option<Vec<VertexId>> {
    let free: Vec<VertexId> = (0..space.len() as VertexId).filter(|v| !taken.contains(v)).collect();
    let start = *free.choose(rng)?;
    let mut seen = BTreeSet::from([start]);
    let mut order = vec![start];
    let mut queue = VecDeque::from([start]);
    while let Some(u) = queue.pop_front() {
        for (w, _) in space.neighbors(u) {
            if order.len() == size {
                return Some(order);
            }
            if !taken.contains(&w) && seen.insert(w) {
                order.push(w);
                queue.push_back(w);
            }
        }
    }
    (order.len() == size).then_some(order)
}

/// Random gluing instance: a base and `patches` pieces, each glued along a
/// connected set of 1–4 points to a disjoint connected set of the base,
/// declared with a generous bi-Lipschitz constant.  At most `max_vertices`
/// vertices in total.
pub fn random_instance(seed: u64, patches: usize, max_vertices: usize) -> GluingInstance<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let per = max_vertices / (patches + 1);
    let n = rng.gen_range(per / 2..=per);
    let base = random_piece(&mut rng, n, "base");
    let mut instance = GluingInstance::new(base.clone(), 1e6).unwrap();
    let mut taken = BTreeSet::new();
    for i in 0..patches {
        let n = rng.gen_range(per / 2..=per);
        let patch = random_piece(&mut rng, n, &format!("patch{i}"));
        let size = rng.gen_range(1..=4);
        let (Some(e), Some(f)) =
            (connected_set(&mut rng, &base, size, &taken), connected_set(&mut rng, &patch, size, &BTreeSet::new()))
        else {
            continue;
        };
        taken.extend(e.iter().copied());
        instance.add_patch(patch, e.into_iter().zip(f).collect()).unwrap();
    }
    instance
}

/// Compares glued-graph distances with the admissible-sequence oracle for
/// every ordered pair of glued vertices; returns the number of pairs whose
/// difference exceeds `tol` and the number of pairs examined.  Use `tol = 0`
/// for integer lengths, where both computations are exact.
pub fn oracle_mismatches(instance: &GluingInstance<f64>, tol: f64) -> (usize, usize) {
    let glued: GluedSpace<f64> = glue(instance).unwrap();
    let pieces = Pieces::of(instance);
    let metrics: Vec<Vec<Vec<f64>>> = pieces.spaces.iter().map(floyd_warshall).collect();
    let n = glued.space.len() as VertexId;
    let mut bad = 0;
    let mut pairs = 0;
    for g in 0..n {
        let oracle = admissible_infimum(&pieces, &metrics, glued.provenance(g));
        let graph = carpetlab::metric::distances(&glued.space, g);
        for h in 0..n {
            let (piece, local) = glued.provenance(h);
            pairs += 1;
            let (x, y) = (graph[h as usize], oracle[piece][local as usize]);
            if x != y && !((x - y).abs() <= tol) {
                bad += 1;
            }
        }
    }
    (bad, pairs)
}
