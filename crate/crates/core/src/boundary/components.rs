//! Boundary components by ε-chain connectivity, and rank on declared
//! accumulation structures.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{input, Error, Result};
use crate::metric::{distances_from_set, epsilon_chain_components, CheckReport, DiscreteSpace, VertexId};
use crate::scalar::Scalar;

/// Chain step as a multiple of the local mesh pitch.
pub const CHAIN_FACTOR: f64 = 3.0;

/// Largest component count for which the Hausdorff matrix is computed (one
/// full search per component).
pub const HAUSDORFF_MAX_COMPONENTS: usize = 128;

/// One boundary component.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BoundaryComponent {
    /// Registry component id when the chain class matches a marked boundary
    /// set, otherwise a fresh id above every registry id.
    pub id: u32,
    /// Name of the matching marked set, if any.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub name: Option<String>,
    pub vertices: Vec<VertexId>,
}

/// Boundary components with their pairwise Hausdorff distances and the
/// declared accumulation relations `(component, limit component)`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ComponentSpace {
    pub components: Vec<BoundaryComponent>,
    /// Symmetric matrix indexed like `components`; empty for declared
    /// structures and above [`HAUSDORFF_MAX_COMPONENTS`] components.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub hausdorff: Vec<Vec<f64>>,
    pub limits: Vec<(u32, u32)>,
    /// Agreement of the chain partition with the marked boundary sets.
    pub cross_check: CheckReport,
}

impl ComponentSpace {
    /// A bare declared structure (no geometry), e.g. for rank experiments.
    pub fn declared(ids: &[u32], limits: Vec<(u32, u32)>) -> Self {
        ComponentSpace {
            components: ids.iter().map(|&id| BoundaryComponent { id, name: None, vertices: Vec::new() }).collect(),
            hausdorff: Vec::new(),
            limits,
            cross_check: CheckReport::new("registry", "declared structure"),
        }
    }

    /// The structure recorded by the generator: one component per marked
    /// boundary set, with its declared limits and no geometry.
    pub fn from_marked_sets<S: Scalar>(space: &DiscreteSpace<S>) -> Self {
        let mut components: Vec<BoundaryComponent> = space
            .boundary_sets()
            .into_iter()
            .map(|m| BoundaryComponent { id: m.component, name: Some(m.name.clone()), vertices: m.ids.clone() })
            .collect();
        components.sort_by_key(|c| c.id);
        ComponentSpace {
            components,
            hausdorff: Vec::new(),
            limits: space.limits().to_vec(),
            cross_check: CheckReport::new("registry", "declared structure"),
        }
    }

    pub fn len(&self) -> usize {
        self.components.len()
    }

    pub fn is_empty(&self) -> bool {
        self.components.is_empty()
    }

    pub fn ids(&self) -> Vec<u32> {
        self.components.iter().map(|c| c.id).collect()
    }
}

/// Robust local pitch at `v`: the median positive incident edge length.
/// Unlike the shortest edge it ignores the occasional short edge created by
/// snapping vertices onto curved boundaries.
pub fn local_pitch<S: Scalar>(space: &DiscreteSpace<S>, v: VertexId) -> f64 {
    let mut lens: Vec<f64> = space.neighbors(v).map(|(_, l)| l.as_f64()).filter(|&l| l > 0.0).collect();
    if lens.is_empty() {
        return space.h().as_f64();
    }
    lens.sort_by(f64::total_cmp);
    lens[(lens.len() - 1) / 2]
}

/// Every vertex of a boundary marked set, sorted.
pub fn fringe<S: Scalar>(space: &DiscreteSpace<S>) -> Vec<VertexId> {
    let mut all: Vec<VertexId> = space.boundary_sets().iter().flat_map(|m| m.ids.iter().copied()).collect();
    all.sort_unstable();
    all.dedup();
    all
}

/// Partitions the boundary vertices into ε-chain classes with
/// `ε(v) = factor · local_pitch(v)` and matches the classes against the
/// marked boundary sets.
///
/// A class equal (as a set) to a marked boundary set takes that set's
/// component id and name; any other class, or a marked set split over
/// several classes, makes the cross-check fail.
pub fn boundary_components_with<S: Scalar>(space: &DiscreteSpace<S>, factor: f64) -> Result<ComponentSpace> {
    let boundary = fringe(space);
    if boundary.is_empty() {
        return input("space has no marked boundary vertices");
    }
    let parts = epsilon_chain_components(space, &boundary, |v| S::of(factor * local_pitch(space, v)));
    let mut by_content: BTreeMap<Vec<VertexId>, (u32, String)> = BTreeMap::new();
    for m in space.boundary_sets() {
        let mut ids = m.ids.clone();
        ids.sort_unstable();
        ids.dedup();
        by_content.insert(ids, (m.component, m.name.clone()));
    }
    let mut report = CheckReport::new("registry", "chain classes against marked boundary components");
    report.checked = parts.len();
    let mut next = space.boundary_sets().iter().map(|m| m.component + 1).max().unwrap_or(0);
    let mut components = Vec::with_capacity(parts.len());
    for part in parts {
        let matched = by_content.remove(&part);
        let (id, name) = match matched {
            Some((id, name)) => (id, Some(name)),
            None => {
                report.fail(&part[..part.len().min(4)], format!("chain class of {} vertices matches no marked set", part.len()));
                next += 1;
                (next - 1, None)
            }
        };
        components.push(BoundaryComponent { id, name, vertices: part });
    }
    if let Some((_, (id, name))) = by_content.into_iter().next() {
        report.fail(&[id], format!("marked set {name} is not a single chain class"));
    }
    components.sort_by_key(|c| (c.id, c.vertices[0]));
    report.values.push(("components".into(), components.len() as f64));
    report.values.push(("factor".into(), factor));
    let hausdorff = if components.len() <= HAUSDORFF_MAX_COMPONENTS {
        hausdorff_matrix(space, &components)
    } else {
        Vec::new()
    };
    Ok(ComponentSpace { components, hausdorff, limits: space.limits().to_vec(), cross_check: report })
}

/// [`boundary_components_with`] at the default chain factor.
pub fn boundary_components<S: Scalar>(space: &DiscreteSpace<S>) -> Result<ComponentSpace> {
    boundary_components_with(space, CHAIN_FACTOR)
}

/// Pairwise Hausdorff distances: one multi-source search per component.
fn hausdorff_matrix<S: Scalar>(space: &DiscreteSpace<S>, comps: &[BoundaryComponent]) -> Vec<Vec<f64>> {
    let n = comps.len();
    // half[j][i] = max over a in component i of d(a, component j).
    let half: Vec<Vec<f64>> = comps
        .par_iter()
        .map(|cj| {
            let d = distances_from_set(space, &cj.vertices);
            comps.iter().map(|ci| ci.vertices.iter().map(|&v| d[v as usize].as_f64()).fold(0.0, f64::max)).collect()
        })
        .collect();
    (0..n).map(|i| (0..n).map(|j| half[j][i].max(half[i][j])).collect()).collect()
}

/// Rank of the declared accumulation structure.
///
/// Each round keeps only the components that are the limit of some relation
/// whose source survived the previous round (the non-isolated points); the
/// rank is the number of rounds until no relation is left among the
/// survivors.  Every finite acyclic declaration has finite rank; cycles and
/// limits naming unknown components are input errors.
pub fn rank(cs: &ComponentSpace) -> Result<u32> {
    let ids: std::collections::BTreeSet<u32> = cs.ids().into_iter().collect();
    for &(c, l) in &cs.limits {
        if !ids.contains(&c) || !ids.contains(&l) {
            return input(format!("accumulation relation ({c} -> {l}) names an unknown component"));
        }
    }
    check_acyclic(&cs.limits)?;
    let mut alive = ids;
    let mut rounds = 0;
    loop {
        let live: Vec<(u32, u32)> =
            cs.limits.iter().copied().filter(|(c, l)| alive.contains(c) && alive.contains(l)).collect();
        if live.is_empty() {
            return Ok(rounds);
        }
        alive = live.iter().map(|&(_, l)| l).collect();
        rounds += 1;
    }
}

fn check_acyclic(limits: &[(u32, u32)]) -> Result<()> {
    let mut out: BTreeMap<u32, Vec<u32>> = BTreeMap::new();
    for &(c, l) in limits {
        if c == l {
            return Err(Error::CyclicDeclaration(format!("component {c} is declared its own limit")));
        }
        out.entry(c).or_default().push(l);
    }
    // 0 = unvisited, 1 = on stack, 2 = done.
    let mut state: BTreeMap<u32, u8> = BTreeMap::new();
    for &start in out.keys() {
        if state.get(&start).copied().unwrap_or(0) != 0 {
            continue;
        }
        let mut stack = vec![(start, 0usize)];
        state.insert(start, 1);
        while let Some(&mut (v, ref mut i)) = stack.last_mut() {
            let next = out.get(&v).and_then(|n| n.get(*i)).copied();
            *i += 1;
            match next {
                Some(w) => match state.get(&w).copied().unwrap_or(0) {
                    0 => {
                        state.insert(w, 1);
                        stack.push((w, 0));
                    }
                    1 => return Err(Error::CyclicDeclaration(format!("accumulation cycle through component {w}"))),
                    _ => {}
                },
                None => {
                    state.insert(v, 2);
                    stack.pop();
                }
            }
        }
    }
    Ok(())
}
