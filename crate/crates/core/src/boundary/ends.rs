//! Ends through a collar exhaustion and the ends↔components check.

use serde::{Deserialize, Serialize};

use crate::error::{input, Result};
use crate::metric::{distances_from_set, CheckReport, DiscreteSpace, VertexId};
use crate::scalar::Scalar;

use super::components::{boundary_components, fringe, local_pitch, ComponentSpace};

/// Complement components of an exhaustion `K_1 ⊆ K_2 ⊆ …` by compacta.
///
/// The open surface is the mesh minus its boundary fringe, so compacta are
/// the sets kept away from the fringe: `K_j = {x : d(x, fringe) >= D − r_j}`
/// with `D = d(basepoint, fringe)`.  Each `K_j` contains the ball
/// `B(basepoint, r_j)`, and the complement `X ∖ K_j` is a collar of width
/// `D − r_j` around the fringe.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EndProfile {
    pub basepoint: VertexId,
    /// `D = d(basepoint, fringe)`.
    pub depth: f64,
    /// Exhaustion radii `r_1 < r_2 < …`, all below `depth`.
    pub radii: Vec<f64>,
    /// Per level, the complement components meeting the fringe (sorted
    /// vertex lists, ordered by smallest member).
    pub levels: Vec<Vec<Vec<VertexId>>>,
    /// `nesting[j][i]`: index of the level-`j` component containing
    /// component `i` of level `j + 1`.
    pub nesting: Vec<Vec<usize>>,
    /// End count, when the last two levels correspond bijectively.
    pub stabilized: Option<usize>,
}

impl EndProfile {
    pub fn counts(&self) -> Vec<usize> {
        self.levels.iter().map(Vec::len).collect()
    }
}

/// Computes the complement components of the collar exhaustion.
pub fn ends<S: Scalar>(space: &DiscreteSpace<S>, basepoint: VertexId, radii: &[f64]) -> Result<EndProfile> {
    space.check_vertex(basepoint)?;
    if radii.is_empty() || radii.windows(2).any(|w| w[1] <= w[0]) || radii[0] < 0.0 {
        return input("exhaustion radii must be nonnegative and strictly increasing");
    }
    let edge = fringe(space);
    if edge.is_empty() {
        return input("space has no marked boundary vertices");
    }
    let to_fringe: Vec<f64> = distances_from_set(space, &edge).iter().map(|d| d.as_f64()).collect();
    let depth = to_fringe[basepoint as usize];
    if radii[radii.len() - 1] >= depth {
        return input(format!("largest radius must stay below the basepoint depth {depth}"));
    }
    let mut levels = Vec::with_capacity(radii.len());
    for &r in radii {
        let width = depth - r;
        levels.push(collar_components(space, &to_fringe, width));
    }
    let mut nesting: Vec<Vec<usize>> = Vec::with_capacity(levels.len().saturating_sub(1));
    for j in 0..levels.len().saturating_sub(1) {
        let mut owner = vec![usize::MAX; space.len()];
        for (i, c) in levels[j].iter().enumerate() {
            for &v in c {
                owner[v as usize] = i;
            }
        }
        nesting.push(levels[j + 1].iter().map(|c| owner[c[0] as usize]).collect());
    }
    let stabilized = match (levels.len(), nesting.last()) {
        (n, Some(last)) if n >= 2 && levels[n - 1].len() == levels[n - 2].len() => {
            let mut seen = vec![false; levels[n - 2].len()];
            let bijective = last.iter().all(|&p| p != usize::MAX && !std::mem::replace(&mut seen[p], true));
            bijective.then_some(levels[n - 1].len())
        }
        _ => None,
    };
    Ok(EndProfile { basepoint, depth, radii: radii.to_vec(), levels, nesting, stabilized })
}

/// Connected components of the open collar `{d(·, fringe) < width}`.  Every
/// such component reaches the fringe along a shortest path.
fn collar_components<S: Scalar>(space: &DiscreteSpace<S>, to_fringe: &[f64], width: f64) -> Vec<Vec<VertexId>> {
    let inside: Vec<bool> = to_fringe.iter().map(|&d| d < width).collect();
    let mut seen = vec![false; space.len()];
    let mut parts = Vec::new();
    for s in 0..space.len() {
        if !inside[s] || seen[s] {
            continue;
        }
        seen[s] = true;
        let mut part = vec![s as VertexId];
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

/// Label fragments of constructions that are not planar; the ends↔components
/// correspondence is not claimed for them.
pub const NON_PLANAR_LABELS: [&str; 5] = ["torus", "klein", "mobius", "rp2", "projective"];

/// Default exhaustion for a space: the deepest vertex (smallest id on ties)
/// as basepoint and collar widths `D/2, D/4, …` down to `2·pitch`, where
/// `pitch` is the median local pitch on the fringe.
pub fn default_exhaustion<S: Scalar>(space: &DiscreteSpace<S>) -> Result<(VertexId, Vec<f64>)> {
    let edge = fringe(space);
    if edge.is_empty() {
        return input("space has no marked boundary vertices");
    }
    let to_fringe = distances_from_set(space, &edge);
    let mut best = 0;
    for v in 0..space.len() {
        if to_fringe[v] > to_fringe[best] {
            best = v;
        }
    }
    let depth = to_fringe[best].as_f64();
    let mut pitches: Vec<f64> = edge.iter().map(|&v| local_pitch(space, v)).collect();
    pitches.sort_by(f64::total_cmp);
    let floor = 2.0 * pitches[pitches.len() / 2];
    let mut radii = Vec::new();
    let mut width = depth / 2.0;
    while width >= floor {
        radii.push(depth - width);
        width /= 2.0;
    }
    if radii.len() < 2 {
        return input(format!("mesh too coarse for a collar exhaustion (depth {depth}, floor {floor})"));
    }
    Ok((best as VertexId, radii))
}

/// Checks the ends↔components bijection on a planar construction: the
/// stabilized end count equals the boundary-component count and each
/// terminal collar component meets exactly one boundary component, each
/// boundary component being met exactly once.
///
/// Spaces whose label names a non-planar construction are refused.  An
/// exhaustion that does not stabilize makes the report fail with an
/// "inconclusive" note.
pub fn ends_components_check<S: Scalar>(space: &DiscreteSpace<S>) -> Result<CheckReport> {
    let label = space.label().to_ascii_lowercase();
    if let Some(bad) = NON_PLANAR_LABELS.iter().find(|b| label.contains(*b)) {
        return input(format!("ends/components correspondence is only claimed for planar spaces ({bad})"));
    }
    let comps = boundary_components(space)?;
    let (base, radii) = default_exhaustion(space)?;
    let profile = ends(space, base, &radii)?;
    ends_components_report(space, &comps, &profile)
}

/// The comparison behind [`ends_components_check`], for given inputs.
pub fn ends_components_report<S: Scalar>(
    space: &DiscreteSpace<S>,
    comps: &ComponentSpace,
    profile: &EndProfile,
) -> Result<CheckReport> {
    let mut report = CheckReport::new("ends_components", "ends correspond to boundary components");
    report.values.push(("components".into(), comps.len() as f64));
    if !comps.cross_check.pass {
        report.fail(&comps.cross_check.witness, format!("boundary partition: {}", comps.cross_check.note));
    }
    let Some(count) = profile.stabilized else {
        report.fail(&[profile.basepoint], format!("inconclusive: end counts {:?} did not stabilize", profile.counts()));
        return Ok(report);
    };
    report.values.push(("ends".into(), count as f64));
    let mut owner = vec![usize::MAX; space.len()];
    for (i, c) in comps.components.iter().enumerate() {
        for &v in &c.vertices {
            owner[v as usize] = i;
        }
    }
    let terminal = profile.levels.last().expect("at least two levels");
    let mut hit = vec![0usize; comps.len()];
    for (e, end) in terminal.iter().enumerate() {
        let mut met: Vec<usize> = end.iter().map(|&v| owner[v as usize]).filter(|&i| i != usize::MAX).collect();
        met.sort_unstable();
        met.dedup();
        report.checked += 1;
        if met.len() != 1 {
            report.fail(&[end[0]], format!("end {e} meets {} boundary components", met.len()));
        } else {
            hit[met[0]] += 1;
        }
    }
    if count != comps.len() {
        report.fail(&[profile.basepoint], format!("{count} ends but {} boundary components", comps.len()));
    }
    if let Some(i) = hit.iter().position(|&h| h != 1) {
        report.fail(&[comps.components[i].id], format!("boundary component {} is met by {} ends", comps.components[i].id, hit[i]));
    }
    Ok(report)
}
