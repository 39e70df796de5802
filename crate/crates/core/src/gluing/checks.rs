//! Exact checks on a glued space: comparison with the piece metrics, local
//! isometry away from the gluing locus, and flatness of the patches.

use rayon::prelude::*;

use crate::error::Result;
use crate::metric::{distances, distances_from_set, set_diameter, CheckReport, DiscreteSpace, Search, VertexId};
use crate::scalar::Scalar;

use super::instance::{GluedSpace, GluingInstance};

/// Absolute slack used by the comparison inequalities.
const SLACK: f64 = 1e-9;

/// Evenly spaced subset of `0..n` of size at most `k` (all of it for `None`).
fn spread(items: &[VertexId], k: Option<usize>) -> Vec<VertexId> {
    match k {
        Some(k) if k < items.len() => (0..k).map(|i| items[i * items.len() / k]).collect(),
        _ => items.to_vec(),
    }
}

/// Checks `d̃(x,y)/L − ε <= d(x,y) <= d̃(x,y) + ε` for every pair of vertices
/// lying in a common piece, where `d̃` is that piece's own metric and `d` the
/// glued metric.
///
/// `sources` limits the first vertex of each pair to an evenly spaced subset
/// of the given size; the second vertex always ranges over the whole piece.
/// Values `min_ratio`/`max_ratio` are the extreme `d/d̃` seen.
pub fn comparison_check<S: Scalar>(glued: &GluedSpace<S>, sources: Option<usize>) -> CheckReport {
    let all: Vec<VertexId> = (0..glued.space.len() as VertexId).collect();
    let chosen = spread(&all, sources);
    let l = glued.lipschitz;
    // (first violation, checked pairs, min ratio, max ratio) per source.
    let per: Vec<(Option<(VertexId, VertexId, f64, f64)>, usize, f64, f64)> = chosen
        .par_iter()
        .map(|&a| {
            let (piece, local) = glued.provenance(a);
            let d = distances(&glued.space, a);
            let dt = distances(&glued.pieces()[piece], local);
            let mut bad = None;
            let (mut lo, mut hi, mut count) = (f64::INFINITY, 0.0f64, 0usize);
            for (b_local, t) in dt.iter().enumerate() {
                let t = t.as_f64();
                if b_local as VertexId == local || !t.is_finite() {
                    continue;
                }
                let b = glued.glued_id(piece, b_local as VertexId);
                let g = d[b as usize].as_f64();
                count += 1;
                if t > 0.0 {
                    lo = lo.min(g / t);
                    hi = hi.max(g / t);
                }
                if bad.is_none() && !(g <= t + SLACK && g >= t / l - SLACK) {
                    bad = Some((a, b, g, t));
                }
            }
            (bad, count, lo, hi)
        })
        .collect();
    let mut report = CheckReport::new("comparison", "glued metric against piece metrics");
    let (mut lo, mut hi) = (f64::INFINITY, 0.0f64);
    for (bad, count, l0, h0) in per {
        report.checked += count;
        lo = lo.min(l0);
        hi = hi.max(h0);
        if let Some((a, b, g, t)) = bad {
            report.fail(&[a, b], format!("d = {g} but piece distance {t} (L = {l})"));
        }
    }
    report.skipped = all.len() - chosen.len();
    report.values.push(("min_ratio".into(), lo));
    report.values.push(("max_ratio".into(), hi));
    report.values.push(("L".into(), l));
    report
}

/// Checks that the glued metric equals the piece metric exactly on every ball
/// `B(a, r)` whose centre lies at distance at least `3r` from the
/// identification locus.  Centres closer than that are counted as skipped;
/// `max_centers` caps the number of centres examined (evenly spaced).
pub fn local_isometry_check<S: Scalar>(glued: &GluedSpace<S>, r: f64, max_centers: Option<usize>) -> CheckReport {
    let mut report = CheckReport::new("local_isometry", "isometric to the pieces away from the gluing locus");
    let locus = glued.identified_vertices();
    let to_locus = distances_from_set(&glued.space, &locus);
    let far: Vec<VertexId> = (0..glued.space.len() as VertexId)
        .filter(|&v| to_locus[v as usize].as_f64() >= 3.0 * r)
        .collect();
    report.skipped = glued.space.len() - far.len();
    let centers = spread(&far, max_centers);
    let r_s = S::of(r);
    let two_r = S::of(2.0 * r);
    let per: Vec<(Option<(VertexId, VertexId, f64, f64)>, usize)> = centers
        .par_iter()
        .map(|&a| {
            let (piece, _) = glued.provenance(a);
            let pspace = &glued.pieces()[piece];
            let mut gs = Search::new(&glued.space);
            let mut ps = Search::new(pspace);
            gs.run(&[a], r_s);
            let ball: Vec<VertexId> = gs.settled().iter().copied().filter(|&v| gs.dist(v) < r_s).collect();
            let mut count = 0;
            for &b in &ball {
                let (pb, lb) = glued.provenance(b);
                if pb != piece {
                    return (Some((a, b, f64::NAN, f64::NAN)), count);
                }
                gs.run(&[b], two_r);
                ps.run(&[lb], two_r);
                for &c in &ball {
                    let (_, lc) = glued.provenance(c);
                    let (g, t) = (gs.dist(c).as_f64(), ps.dist(lc).as_f64());
                    count += 1;
                    if g != t {
                        return (Some((b, c, g, t)), count);
                    }
                }
            }
            (None, count)
        })
        .collect();
    for (bad, count) in per {
        report.checked += count;
        if let Some((a, b, g, t)) = bad {
            if g.is_nan() {
                report.fail(&[a, b], format!("ball around {a} reaches another piece"));
            } else {
                report.fail(&[a, b], format!("glued distance {g} differs from piece distance {t}"));
            }
        }
    }
    report.values.push(("r".into(), r));
    report.values.push(("centers".into(), centers.len() as f64));
    report
}

/// Flatness `C = max_i diam(X_i) / diam(f_i(E_i))`, compared against the
/// declared constant when one is given.
pub fn flatness_check<S: Scalar>(instance: &GluingInstance<S>) -> Result<CheckReport> {
    let mut report = CheckReport::new("flatness", "patch diameter against gluing-set diameter");
    let mut worst = 0.0f64;
    let mut worst_patch = 0usize;
    for (i, p) in instance.patches.iter().enumerate() {
        let whole = patch_diameter(&p.space)?;
        let image = set_diameter(&p.space, &p.image_set())?.as_f64();
        let c = if image > 0.0 { whole / image } else { f64::INFINITY };
        report.checked += 1;
        if c > worst {
            worst = c;
            worst_patch = i;
        }
    }
    report.values.push(("C".into(), worst));
    if let Some(declared) = instance.flatness {
        report.values.push(("declared".into(), declared));
        if worst > declared * (1.0 + SLACK) {
            report.fail(&[worst_patch as u32], format!("patch {worst_patch} has flatness {worst} > {declared}"));
        }
    }
    Ok(report)
}

fn patch_diameter<S: Scalar>(space: &DiscreteSpace<S>) -> Result<f64> {
    let all: Vec<VertexId> = (0..space.len() as VertexId).collect();
    Ok(set_diameter(space, &all)?.as_f64())
}
