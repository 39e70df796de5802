//! Porosity of a marked set and box-counting slopes.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use rayon::prelude::*;

use super::sample::{merge_max, Outcome, SampleSpec};
use crate::error::{input, Result};
use crate::metric::{
    diameter, distances_from_set, epsilon_net, ConstantReport, DiscreteSpace, MetricKind, Search, VertexId,
};
use crate::predicates::ahlfors::ols_slope;
use crate::scalar::Scalar;

/// Porosity constant of `z`: for sampled `z ∈ Z` and `r`, the least grid `C`
/// such that some ball `B(x, r/C)` lies in `B(z, r) \ Z`; max over samples.
///
/// The best ball radius at `x ∈ B(z,r)` is `min(d(x, Z), d(x, X \ B(z,r)))`,
/// both computed exactly (the second by a search confined to the ball).
pub fn porosity_constant<S: Scalar>(
    space: &DiscreteSpace<S>,
    z: &[VertexId],
    spec: &SampleSpec,
) -> Result<ConstantReport> {
    spec.validate()?;
    if z.is_empty() {
        return input("porosity needs a nonempty set");
    }
    let diam = diameter(space, None)?.as_f64();
    let range = spec.radius_range(diam);
    let h = space.h().as_f64();
    if range.0 < 4.0 * h {
        return input(format!("radius {} is below 4h = {}", range.0, 4.0 * h));
    }
    let to_z = distances_from_set(space, z);
    let outcomes: Vec<Outcome> = (0..spec.samples)
        .into_par_iter()
        .map_init(
            || (Search::new(space), vec![S::infinity(); space.len()]),
            |(search, scratch), i| {
                let mut rng = spec.rng(i);
                let center = spec.draw_center(&mut rng, i, z);
                let r = spec.draw_radius(&mut rng, range);
                let rs = S::of(r);
                search.run(&[center], rs);
                let ball: Vec<VertexId> =
                    search.settled().iter().copied().filter(|&v| search.dist(v) < rs).collect();
                let out = distance_to_outside(space, &ball, scratch);
                let best = ball
                    .iter()
                    .zip(&out)
                    .map(|(&v, &o)| to_z[v as usize].min(o))
                    .fold(S::zero(), S::max)
                    .as_f64();
                let raw = if best > 0.0 { r / best } else { f64::INFINITY };
                match spec.snap(raw, false) {
                    Some(grid) => Outcome::Value { grid, raw, aux: 0.0 },
                    None => Outcome::Capped { raw, aux: 0.0 },
                }
            },
        )
        .collect();
    let mut report = spec.report("porosity", "porosity", space, range);
    let (raw, _) = merge_max(&mut report, &outcomes, spec.cap);
    report.extra.push(("raw_max".into(), raw));
    Ok(report)
}

#[derive(Clone, Copy)]
struct Item<S> {
    d: S,
    v: VertexId,
}

impl<S: Scalar> PartialEq for Item<S> {
    fn eq(&self, o: &Self) -> bool {
        self.cmp(o) == Ordering::Equal
    }
}
impl<S: Scalar> Eq for Item<S> {}
impl<S: Scalar> PartialOrd for Item<S> {
    fn partial_cmp(&self, o: &Self) -> Option<Ordering> {
        Some(self.cmp(o))
    }
}
impl<S: Scalar> Ord for Item<S> {
    fn cmp(&self, o: &Self) -> Ordering {
        o.d.partial_cmp(&self.d).unwrap_or(Ordering::Equal).then(o.v.cmp(&self.v))
    }
}

/// `d(x, X \ ball)` for every `x` in `ball` (same order).  `scratch` is an
/// all-infinite buffer of the space's size and is restored before returning.
fn distance_to_outside<S: Scalar>(space: &DiscreteSpace<S>, ball: &[VertexId], scratch: &mut [S]) -> Vec<S> {
    let mut inside = std::collections::HashSet::with_capacity(ball.len());
    inside.extend(ball.iter().copied());
    if space.metric() == MetricKind::Euclidean {
        let outside: Vec<VertexId> =
            (0..space.len() as VertexId).filter(|v| !inside.contains(v)).collect();
        return ball
            .iter()
            .map(|&x| outside.iter().map(|&w| space.euclid(x, w)).fold(S::infinity(), S::min))
            .collect();
    }
    // Multi-source search seeded from the ball's outer frontier, confined to the ball.
    let mut heap = BinaryHeap::new();
    for &v in ball {
        let mut best = S::infinity();
        for (w, l) in space.neighbors(v) {
            if !inside.contains(&w) {
                best = best.min(l);
            }
        }
        if best.is_finite() {
            scratch[v as usize] = best;
            heap.push(Item { d: best, v });
        }
    }
    while let Some(Item { d, v }) = heap.pop() {
        if d > scratch[v as usize] {
            continue;
        }
        for (w, l) in space.neighbors(v) {
            if inside.contains(&w) && d + l < scratch[w as usize] {
                scratch[w as usize] = d + l;
                heap.push(Item { d: d + l, v: w });
            }
        }
    }
    let out = ball.iter().map(|&v| scratch[v as usize]).collect();
    for &v in ball {
        scratch[v as usize] = S::infinity();
    }
    out
}

/// Box-counting slope of a vertex set: `log N(ε)` against `log(1/ε)` where
/// `N(ε)` is the size of a greedy ε-net of the set (in the ambient metric).
pub fn box_count_slope<S: Scalar>(space: &DiscreteSpace<S>, set: &[VertexId], scales: &[f64]) -> Result<f64> {
    if scales.len() < 2 {
        return input("box counting needs at least two scales");
    }
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    let mut members = vec![false; space.len()];
    for &v in set {
        members[v as usize] = true;
    }
    let mut search = Search::new(space);
    for &eps in scales {
        let e = S::of(eps);
        let mut covered = vec![false; space.len()];
        let mut count = 0usize;
        let mut order = set.to_vec();
        order.sort_unstable();
        for v in order {
            if covered[v as usize] {
                continue;
            }
            count += 1;
            search.run(&[v], e);
            for &w in search.settled() {
                if members[w as usize] && search.dist(w) < e {
                    covered[w as usize] = true;
                }
            }
        }
        xs.push((1.0 / eps).ln());
        ys.push((count as f64).ln());
    }
    let _ = epsilon_net::<S>; // the whole-space net is the same greedy rule
    Ok(ols_slope(&xs, &ys))
}
