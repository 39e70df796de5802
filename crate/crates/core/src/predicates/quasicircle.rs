//! Three-point (quasicircle) constant and internal LLC₁ constant of a
//! cyclically ordered curve, both by exhaustive scans.

use rayon::prelude::*;

use crate::error::{input, Result};
use crate::metric::{set_distance_matrix, ConstantReport, DiscreteSpace, MarkedSet, Ratio, VertexId};
use crate::scalar::Scalar;

/// Largest curve handled at full resolution by the three-point scan.
pub const QUASICIRCLE_MAX: usize = 2048;
/// Largest curve handled at full resolution by the cubic LLC₁ scan.
pub const CIRCLE_LLC_MAX: usize = 512;

/// Evenly spaced subsequence of a cyclic list, keeping at most `max` points.
fn subsample(ids: &[VertexId], max: usize) -> Vec<VertexId> {
    if ids.len() <= max {
        return ids.to_vec();
    }
    (0..max).map(|i| ids[i * ids.len() / max]).collect()
}

fn checked_curve<'a>(circle: &'a MarkedSet) -> Result<&'a [VertexId]> {
    if !circle.cyclic {
        return input(format!("marked set {} has no cyclic order", circle.name));
    }
    if circle.ids.len() < 3 {
        return input(format!("cyclic order of {} has fewer than 3 points", circle.name));
    }
    Ok(&circle.ids)
}

/// Three-point constant `max_{x≠y} min(diam γ₁, diam γ₂) / d(x,y)` over all
/// pairs, where `γ₁, γ₂` are the two closed arcs of the curve between `x`
/// and `y`, diameters taken in the ambient metric.
///
/// Curves longer than [`QUASICIRCLE_MAX`] are evenly subsampled first (the
/// report's `subsampled` extra is then 1).
pub fn quasicircle_constant<S: Scalar>(space: &DiscreteSpace<S>, circle: &MarkedSet) -> Result<ConstantReport> {
    let full = checked_curve(circle)?;
    let ids = subsample(full, QUASICIRCLE_MAX);
    let n = ids.len();
    let d: Vec<Vec<f64>> = set_distance_matrix(space, &ids)?
        .into_iter()
        .map(|row| row.into_iter().map(|x| x.as_f64()).collect())
        .collect();
    // diam[s][l]: diameter of the closed arc s, s+1, …, s+l (indices mod n).
    let mut diam = vec![vec![0.0f64; n]; n];
    for l in 1..n {
        for s in 0..n {
            let e = (s + l) % n;
            let v = diam[s][l - 1].max(diam[(s + 1) % n][l - 1]).max(d[s][e]);
            diam[s][l] = v;
        }
    }
    let mut worst = 0.0f64;
    let mut witness = (0, 0);
    let mut pairs = 0usize;
    for s in 0..n {
        for l in 1..n {
            let e = (s + l) % n;
            if s > e || d[s][e] <= 0.0 {
                continue;
            }
            pairs += 1;
            let ratio = diam[s][l].min(diam[e][n - l]) / d[s][e];
            if ratio > worst {
                worst = ratio;
                witness = (ids[s], ids[e]);
            }
        }
    }
    let mut report = ConstantReport::new("quasicircle", "three-point condition", Ratio::Finite(worst));
    report.samples = pairs;
    report.resolution = space.h().as_f64();
    report.extra.push(("witness_x".into(), witness.0 as f64));
    report.extra.push(("witness_y".into(), witness.1 as f64));
    report.extra.push(("subsampled".into(), if n < full.len() { 1.0 } else { 0.0 }));
    Ok(report)
}

/// Internal LLC₁ constant of the curve with the ambient metric restricted to
/// it: the supremum over centers `a` and pairs `x, y` of the curve of
/// `min over the two arcs γ from x to y of max_{v∈γ} d(a,v)` divided by
/// `max(d(a,x), d(a,y))` — the least `λ` with `x, y` joined by an arc inside
/// `B(a, λr)` whenever both lie in `B(a, r)`.
///
/// Curves longer than [`CIRCLE_LLC_MAX`] are evenly subsampled first.
pub fn circle_llc1<S: Scalar>(space: &DiscreteSpace<S>, circle: &MarkedSet) -> Result<ConstantReport> {
    let full = checked_curve(circle)?;
    let ids = subsample(full, CIRCLE_LLC_MAX);
    let n = ids.len();
    let d: Vec<Vec<f64>> = set_distance_matrix(space, &ids)?
        .into_iter()
        .map(|row| row.into_iter().map(|x| x.as_f64()).collect())
        .collect();
    let worst = (0..n)
        .into_par_iter()
        .map(|a| {
            let da = &d[a];
            let mut worst = 0.0f64;
            let mut reach = vec![0.0f64; n];
            // prefix[i] = max da[..=i], suffix[i] = max da[i..].
            let mut prefix = da.clone();
            let mut suffix = da.clone();
            for i in 1..n {
                prefix[i] = prefix[i].max(prefix[i - 1]);
                suffix[n - 1 - i] = suffix[n - 1 - i].max(suffix[n - i]);
            }
            for x in 0..n {
                // reach[l]: max of d(a,·) over the arc x, x+1, …, x+l.
                reach[0] = da[x];
                for l in 1..n {
                    reach[l] = reach[l - 1].max(da[(x + l) % n]);
                }
                for l in 1..n {
                    let y = (x + l) % n;
                    if x > y {
                        continue;
                    }
                    let r = da[x].max(da[y]);
                    if r <= 0.0 {
                        continue;
                    }
                    // The other arc runs from y forward to x: it contains
                    // y..n-1 and 0..x, i.e. everything outside the open arc.
                    let forward = reach[l];
                    let backward = suffix[y].max(prefix[x]);
                    worst = worst.max(forward.min(backward) / r);
                }
            }
            worst
        })
        .reduce(|| 0.0, f64::max);
    let mut report = ConstantReport::new("circle_llc1", "linear local connectivity of a curve", Ratio::Finite(worst));
    report.samples = n * n * (n - 1) / 2;
    report.resolution = space.h().as_f64();
    report.extra.push(("subsampled".into(), if n < full.len() { 1.0 } else { 0.0 }));
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::{ellipse_points, gen_closed_polygon, gen_round_circle};
    use crate::metric::MetricKind;

    #[test]
    fn round_circle_is_one() {
        let c = gen_round_circle::<f64>(64).unwrap();
        let set = c.marked("circle").unwrap().clone();
        let q = quasicircle_constant(&c, &set).unwrap().value.finite().unwrap();
        assert!((q - 1.0).abs() <= 0.05, "{q}");
        let l = circle_llc1(&c, &set).unwrap().value.finite().unwrap();
        assert!(l <= 1.05, "{l}");
    }

    #[test]
    fn ellipse_is_not_round() {
        let e = gen_closed_polygon::<f64>(&ellipse_points(64, 4.0, 1.0), MetricKind::Euclidean).unwrap();
        let set = e.boundary_sets()[0].clone();
        assert!(quasicircle_constant(&e, &set).unwrap().value.finite().unwrap() > 1.5);
    }

    #[test]
    fn arcs_are_rejected() {
        let c = gen_round_circle::<f64>(8).unwrap();
        let arc = MarkedSet::new("arc", crate::metric::SetKind::Generic, vec![0, 1, 2], 0);
        assert!(quasicircle_constant(&c, &arc).is_err());
        assert!(quasicircle_constant(&c, &arc.clone().with_cyclic_order()).is_ok());
    }
}
