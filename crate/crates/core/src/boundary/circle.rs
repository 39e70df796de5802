//! Boundary components as topological circles.

use crate::error::Result;
use crate::metric::{CheckReport, DiscreteSpace, MarkedSet, VertexId};
use crate::predicates::{circle_llc1, quasicircle_constant};
use crate::scalar::Scalar;

/// Cyclic order of `set` when its induced adjacency is a single cycle.
///
/// A set that already carries a cyclic order is accepted when consecutive
/// members are adjacent and no member repeats; otherwise every member must
/// have exactly two induced neighbours and the walk from the smallest member
/// must visit the whole set.  The error string describes the obstruction.
pub fn cycle_order<S: Scalar>(space: &DiscreteSpace<S>, set: &MarkedSet) -> std::result::Result<Vec<VertexId>, (VertexId, String)> {
    let ids = &set.ids;
    if ids.len() < 3 {
        return Err((ids.first().copied().unwrap_or(0), format!("{} has fewer than 3 vertices", set.name)));
    }
    let mut inside = vec![false; space.len()];
    for &v in ids {
        if std::mem::replace(&mut inside[v as usize], true) {
            return Err((v, format!("vertex {v} repeats in {}", set.name)));
        }
    }
    let adjacent = |u: VertexId, v: VertexId| space.neighbors(u).any(|(w, _)| w == v);
    if set.cyclic {
        let n = ids.len();
        for i in 0..n {
            let (u, v) = (ids[i], ids[(i + 1) % n]);
            if !adjacent(u, v) {
                return Err((u, format!("consecutive vertices {u} and {v} of {} are not adjacent", set.name)));
            }
        }
        return Ok(ids.clone());
    }
    let induced = |v: VertexId| {
        let mut ns: Vec<VertexId> = space.neighbors(v).map(|(w, _)| w).filter(|&w| inside[w as usize] && w != v).collect();
        ns.sort_unstable();
        ns.dedup();
        ns
    };
    for &v in ids {
        let d = induced(v).len();
        if d != 2 {
            return Err((v, format!("vertex {v} has {d} neighbours inside {}", set.name)));
        }
    }
    let start = *ids.iter().min().expect("nonempty");
    let mut order = vec![start];
    let (mut prev, mut cur) = (start, induced(start)[0]);
    while cur != start {
        order.push(cur);
        let ns = induced(cur);
        let next = if ns[0] == prev { ns[1] } else { ns[0] };
        prev = cur;
        cur = next;
    }
    if order.len() != ids.len() {
        return Err((start, format!("{} splits into several cycles", set.name)));
    }
    Ok(order)
}

/// Verifies that a boundary component is a cycle at mesh scale and reports
/// its internal LLC₁ constant (`llc1`) and three-point constant
/// (`three_point`).  A non-cycle fails with a witness vertex.
pub fn boundary_circle_check<S: Scalar>(space: &DiscreteSpace<S>, set: &MarkedSet) -> Result<CheckReport> {
    let mut report = CheckReport::new("boundary_circle", "boundary component is a linearly locally connected circle");
    report.checked = 1;
    match cycle_order(space, set) {
        Err((v, why)) => {
            report.fail(&[v], why);
        }
        Ok(order) => {
            let curve = MarkedSet { ids: order, cyclic: true, ..set.clone() };
            let llc = circle_llc1(space, &curve)?;
            let qc = quasicircle_constant(space, &curve)?;
            report.values.push(("vertices".into(), curve.ids.len() as f64));
            report.values.push(("llc1".into(), llc.value.finite().unwrap_or(f64::INFINITY)));
            report.values.push(("three_point".into(), qc.value.finite().unwrap_or(f64::INFINITY)));
        }
    }
    Ok(report)
}
