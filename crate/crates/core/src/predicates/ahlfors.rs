//! Ahlfors Q-regularity fit.
//!
//! The measure proxy spreads the mass `p^Q` of every square lattice cell of
//! side `p` evenly over its four corners, so on a uniform grid an interior
//! vertex carries `h^Q`, a slit copy or edge vertex half of that, and graded
//! meshes stay consistent across their interfaces.  Explicit cells of area
//! `A` (curved patches) spread `A^{Q/2}` the same way.  Unslit vertices on no
//! cell carry `pitch^Q`, the pitch being the shortest incident edge.

use std::collections::HashMap;

use rayon::prelude::*;

use super::sample::SampleSpec;
use crate::error::{input, Result};
use crate::metric::{diameter, distances_from_set, ConstantReport, DiscreteSpace, Ratio, Search, Side, VertexId};
use crate::scalar::Scalar;

/// Ball-mass series `μ(B(x, r_j))` of one center.
#[derive(Clone, Debug, PartialEq)]
pub struct MassSeries {
    pub center: VertexId,
    pub masses: Vec<f64>,
}

/// Result of [`ahlfors_fit`]: the constant report plus the raw series.
#[derive(Clone, Debug)]
pub struct AhlforsFit {
    pub report: ConstantReport,
    pub radii: Vec<f64>,
    pub series: Vec<MassSeries>,
}

/// Ordinary least-squares slope of `ys` against `xs`.
pub fn ols_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let (mx, my) = (xs.iter().sum::<f64>() / n, ys.iter().sum::<f64>() / n);
    let sxy: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let sxx: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    sxy / sxx
}

/// Median of a nonempty slice.
pub fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).expect("finite values"));
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// Fits `μ(B(x,r)) ≍ r^Q` on sampled centers over a geometric radius ladder.
///
/// The reported value is `K = max max(r^Q/μ, μ/r^Q)`; the regression slope
/// (extra `slope`) is the median over centers of the per-center log–log
/// least-squares slope, with the slope of the pooled mean mass (extra
/// `pooled_slope`) alongside.
pub fn ahlfors_fit<S: Scalar>(space: &DiscreteSpace<S>, q: f64, spec: &SampleSpec) -> Result<AhlforsFit> {
    spec.validate()?;
    if !(q > 0.0) {
        return input(format!("dimension Q must be positive (got {q})"));
    }
    let diam = diameter(space, None)?.as_f64();
    let range = spec.radius_range(diam);
    let h = space.h().as_f64();
    if range.0 < 4.0 * h {
        return input(format!("radius {} is below 4h = {}", range.0, 4.0 * h));
    }
    let radii = spec.radius_ladder(range);
    let pool = deep_centers(space, S::of(*radii.last().expect("nonempty ladder")));
    if pool.is_empty() {
        return input("space has no interior vertices");
    }
    let mass = mass_proxy(space, q);
    let r_top = S::of(*radii.last().expect("nonempty ladder"));
    let series: Vec<MassSeries> = (0..spec.samples)
        .into_par_iter()
        .map_init(
            || Search::new(space),
            |search, i| {
                let mut rng = spec.rng(i);
                let center = spec.draw_center(&mut rng, i, &pool);
                search.run(&[center], r_top);
                let mut masses = vec![0.0; radii.len()];
                let mut j = 0;
                let mut acc = 0.0;
                for &v in search.settled() {
                    let d = search.dist(v).as_f64();
                    while j < radii.len() && d >= radii[j] {
                        masses[j] = acc;
                        j += 1;
                    }
                    acc += mass[v as usize];
                }
                while j < radii.len() {
                    masses[j] = acc;
                    j += 1;
                }
                MassSeries { center, masses }
            },
        )
        .collect();
    let logs: Vec<f64> = radii.iter().map(|r| r.ln()).collect();
    let mut k_max = 0.0f64;
    let mut slopes = Vec::new();
    for s in &series {
        for (m, r) in s.masses.iter().zip(&radii) {
            let rq = r.powf(q);
            k_max = k_max.max(if *m > 0.0 { (rq / m).max(m / rq) } else { f64::INFINITY });
        }
        if s.masses.iter().all(|&m| m > 0.0) {
            let ys: Vec<f64> = s.masses.iter().map(|m| m.ln()).collect();
            slopes.push(ols_slope(&logs, &ys));
        }
    }
    let pooled: Vec<f64> = (0..radii.len())
        .map(|j| (series.iter().map(|s| s.masses[j]).sum::<f64>() / series.len() as f64).ln())
        .collect();
    let mut report = spec.report("ahlfors", "Ahlfors Q-regularity", space, range);
    report.samples = series.len();
    report.value = Ratio::from_f64(k_max);
    let slope = if slopes.is_empty() { f64::NAN } else { median(&slopes) };
    report.extra.push(("slope".into(), slope));
    report.extra.push(("pooled_slope".into(), ols_slope(&logs, &pooled)));
    report.extra.push(("dimension".into(), q));
    Ok(AhlforsFit { report, radii, series })
}

/// Per-vertex mass of the measure proxy (see the module docs).
///
/// A cell is recognised by its rising diagonal edge `(x,y)–(x+p,y+p)`; its
/// other two corners are the endpoints of the falling diagonal
/// `(x,y+p)–(x+p,y)`, which selects the right copy next to a slit.
pub fn mass_proxy<S: Scalar>(space: &DiscreteSpace<S>, q: f64) -> Vec<f64> {
    let key = |x: f64, y: f64, p: f64| (x.to_bits(), y.to_bits(), p.to_bits());
    let mut falling = HashMap::new();
    let mut rising = Vec::new();
    for &(u, v, _) in space.edges() {
        let (a, b) = (space.vertex(u), space.vertex(v));
        let (dx, dy) = ((b.x - a.x).as_f64(), (b.y - a.y).as_f64());
        if dx == 0.0 || dx.abs() != dy.abs() {
            continue;
        }
        // Orient so that the first endpoint is the left one.
        let (l, r) = if dx > 0.0 { (u, v) } else { (v, u) };
        let (lv, p) = (space.vertex(l), dx.abs());
        if dx * dy > 0.0 {
            rising.push((l, r, p));
        } else {
            falling.insert(key(lv.x.as_f64(), lv.y.as_f64(), p), (l, r));
        }
    }
    let mut mass = vec![0.0; space.len()];
    let mut covered = vec![false; space.len()];
    for (l, r, p) in rising {
        let cell = p.powf(q);
        let lv = space.vertex(l);
        let corners: Vec<VertexId> = match falling.get(&key(lv.x.as_f64(), lv.y.as_f64() + p, p)) {
            Some(&(a, b)) => vec![l, r, a, b],
            None => vec![l, r],
        };
        for &c in &corners {
            mass[c as usize] += cell / corners.len() as f64;
            covered[c as usize] = true;
        }
    }
    for c in space.cells() {
        let share = c.area.as_f64().powf(q / 2.0) / c.corners.len() as f64;
        for &v in &c.corners {
            mass[v as usize] += share;
            covered[v as usize] = true;
        }
    }
    for v in 0..space.len() {
        // A slit copy outside every cell is a hanging node on the side of a
        // coarser cell whose mass is already counted.
        if !covered[v] && space.vertex(v as VertexId).side == Side::None {
            mass[v] = space.pitch(v as VertexId).as_f64().powf(q);
        }
    }
    mass
}

/// Interior vertices whose balls of radius `r_top` are not clipped by the
/// outer boundary (the marked set `outer`, or every boundary set when there
/// is none).  When no vertex is that deep, the deepest interior vertices are
/// used instead.  Inner boundaries such as slits are deliberately kept: the
/// fit is meant to see them.
fn deep_centers<S: Scalar>(space: &DiscreteSpace<S>, r_top: S) -> Vec<VertexId> {
    let interior: Vec<VertexId> = (0..space.len() as VertexId).filter(|&v| space.is_interior(v)).collect();
    let outer: Vec<VertexId> = match space.marked("outer") {
        Some(set) if set.kind.is_boundary() => set.ids.clone(),
        _ => space.boundary_sets().into_iter().flat_map(|m| m.ids.iter().copied()).collect(),
    };
    if outer.is_empty() || interior.is_empty() {
        return interior;
    }
    let depth = distances_from_set(space, &outer);
    let deep: Vec<VertexId> = interior.iter().copied().filter(|&v| depth[v as usize] >= r_top).collect();
    if !deep.is_empty() {
        return deep;
    }
    let best = interior.iter().map(|&v| depth[v as usize]).fold(S::zero(), S::max);
    interior.into_iter().filter(|&v| depth[v as usize] == best).collect()
}
