//! Filling slits with hemispherical caps.
//!
//! Every slit circle of a slit domain is closed off by a discretised round
//! hemisphere whose equator has the same length as the circle.  The result is
//! a topological sphere with one hole (the outer square) whose metric stays
//! Ahlfors 2-regular, because each cap carries area comparable to the square
//! of its diameter.

use std::f64::consts::PI;

use crate::constructions::{partial_sums, registry_counts, SlitDomainMesh};
use crate::error::{input, Result};
use crate::metric::{set_diameter, DiscreteSpace, MarkedSet, SetKind, Side, SpaceBuilder, VertexId};
use crate::predicates::uniform_rel_sep;
use crate::scalar::Scalar;

use super::instance::{distortion, glue, GluedSpace, GluingInstance};

/// Largest boundary distortion accepted for a cap gluing map.
pub const MAX_CAP_DISTORTION: f64 = 1.3;

/// A discretised hemisphere ready to be glued onto a closed curve.
#[derive(Clone, Debug)]
pub struct Cap<S> {
    pub space: DiscreteSpace<S>,
    /// Equator vertices, in the order of the arclength positions given.
    pub rim: Vec<VertexId>,
    pub radius: f64,
    pub rings: usize,
}

/// Hemisphere of equator length `length` with equator vertices at the given
/// arclength positions (increasing, in `[0, length)`).
///
/// Radius `R = length/(2π)`; `K = max(2, round((π/2)·R / h_b))` latitude rings
/// where `h_b` is the mean equator spacing, every ring repeating the equator's
/// longitudes, plus a pole.  Edges join neighbours along rings and meridians
/// and both diagonals of each quadrilateral, weighted by 3D chord length.
/// Each quadrilateral and polar triangle is recorded as a cell carrying its
/// exact spherical area.  Planar coordinates squash the cap onto the segment
/// or curve given by `plane`: ring `k` of longitude `j` sits at
/// `centre + cos(α_k)·(plane[j] − centre)`.
pub fn hemisphere<S: Scalar>(length: f64, positions: &[f64], plane: &[(f64, f64)]) -> Result<Cap<S>> {
    let nb = positions.len();
    if nb < 3 || plane.len() != nb {
        return input("a cap needs at least 3 equator points with planar positions");
    }
    if !(length > 0.0) || positions.windows(2).any(|w| w[1] <= w[0]) || positions[nb - 1] >= length {
        return input("cap equator positions must increase within [0, length)");
    }
    let radius = length / (2.0 * PI);
    let hb = length / nb as f64;
    let rings = ((PI / 2.0 * radius) / hb).round().max(2.0) as usize;
    let alpha = |k: usize| PI / 2.0 * k as f64 / rings as f64;
    let theta: Vec<f64> = positions.iter().map(|s| 2.0 * PI * s / length).collect();
    let centre = (
        plane.iter().map(|p| p.0).sum::<f64>() / nb as f64,
        plane.iter().map(|p| p.1).sum::<f64>() / nb as f64,
    );
    let point3 = |k: usize, j: usize| {
        let a = alpha(k);
        let t = theta[j];
        [radius * a.cos() * t.cos(), radius * a.cos() * t.sin(), radius * a.sin()]
    };
    let pole3 = [0.0, 0.0, radius];
    let chord = |p: [f64; 3], q: [f64; 3]| ((p[0] - q[0]).powi(2) + (p[1] - q[1]).powi(2) + (p[2] - q[2]).powi(2)).sqrt();

    let mut b = SpaceBuilder::<S>::new();
    let mut ids = vec![vec![0 as VertexId; nb]; rings];
    for (k, row) in ids.iter_mut().enumerate() {
        let c = alpha(k).cos();
        for (j, slot) in row.iter_mut().enumerate() {
            let (x, y) = (centre.0 + c * (plane[j].0 - centre.0), centre.1 + c * (plane[j].1 - centre.1));
            *slot = b.add_vertex(S::of(x), S::of(y), Side::None);
        }
    }
    let pole = b.add_vertex(S::of(centre.0), S::of(centre.1), Side::None);
    let zone = |k: usize| 2.0 * PI * radius * radius * (alpha(k + 1).sin() - alpha(k).sin());
    for k in 0..rings {
        for j in 0..nb {
            let j1 = (j + 1) % nb;
            let frac = ((theta[j1] - theta[j]).rem_euclid(2.0 * PI)) / (2.0 * PI);
            b.add_edge(ids[k][j], ids[k][j1], S::of(chord(point3(k, j), point3(k, j1))))?;
            if k + 1 < rings {
                b.add_edge(ids[k][j], ids[k + 1][j], S::of(chord(point3(k, j), point3(k + 1, j))))?;
                b.add_edge(ids[k][j], ids[k + 1][j1], S::of(chord(point3(k, j), point3(k + 1, j1))))?;
                b.add_edge(ids[k][j1], ids[k + 1][j], S::of(chord(point3(k, j1), point3(k + 1, j))))?;
                b.add_cell(vec![ids[k][j], ids[k][j1], ids[k + 1][j1], ids[k + 1][j]], S::of(zone(k) * frac))?;
            } else {
                b.add_edge(ids[k][j], pole, S::of(chord(point3(k, j), pole3)))?;
                let polar = 2.0 * PI * radius * radius * (1.0 - alpha(k).sin());
                b.add_cell(vec![ids[k][j], ids[k][j1], pole], S::of(polar * frac))?;
            }
        }
    }
    let rim = ids[0].clone();
    b.mark(MarkedSet::new("rim", SetKind::BoundaryComponent, rim.clone(), 0).with_cyclic_order())?;
    let space = b.build(S::of(hb), format!("hemisphere({length})"))?;
    Ok(Cap { space, rim, radius, rings })
}

/// Length of the shortest edge joining `u` and `v`, if they are adjacent.
fn edge_length<S: Scalar>(space: &DiscreteSpace<S>, u: VertexId, v: VertexId) -> Option<f64> {
    space.neighbors(u).filter(|&(w, _)| w == v).map(|(_, l)| l.as_f64()).reduce(f64::min)
}

/// Closes every slit of the mesh with a hemispherical cap glued along an
/// arclength-matching boundary map.
///
/// The gluing data are filled in from the construction: `L` is the attained
/// boundary distortion (an error if it exceeds [`MAX_CAP_DISTORTION`]), the
/// flatness is the largest cap-to-rim diameter ratio, the separation is the
/// uniform relative separation of the slit circles (when there are at least
/// two) and the counting bound is `(2, M)` with `M` the planarity sum of the
/// slit registry over the unit ball around the square's centre.
pub fn fill_slits<S: Scalar>(mesh: &SlitDomainMesh<S>) -> Result<GluedSpace<S>> {
    let base = &mesh.space;
    let mut caps = Vec::with_capacity(mesh.slit_count());
    for circle in mesh.slit_circles() {
        if !circle.cyclic {
            return input(format!("slit set {} has no cyclic order", circle.name));
        }
        let ids = &circle.ids;
        let n = ids.len();
        let mut positions = Vec::with_capacity(n);
        let mut s = 0.0;
        for j in 0..n {
            positions.push(s);
            let (u, v) = (ids[j], ids[(j + 1) % n]);
            s += edge_length(base, u, v)
                .ok_or_else(|| crate::Error::Input(format!("slit circle {} is not a cycle at {u}", circle.name)))?;
        }
        let plane: Vec<(f64, f64)> =
            ids.iter().map(|&v| (base.vertex(v).x.as_f64(), base.vertex(v).y.as_f64())).collect();
        let cap = hemisphere::<S>(s, &positions, &plane)?;
        let pairs: Vec<(VertexId, VertexId)> = ids.iter().copied().zip(cap.rim.iter().copied()).collect();
        caps.push((cap, pairs));
    }
    let mut worst = 1.0f64;
    let mut flat = 0.0f64;
    for (i, (cap, pairs)) in caps.iter().enumerate() {
        let l = distortion(base, &cap.space, pairs)?;
        if l > MAX_CAP_DISTORTION {
            return input(format!("cap {i} distorts its slit circle by {l} > {MAX_CAP_DISTORTION}"));
        }
        worst = worst.max(l);
        let all: Vec<VertexId> = (0..cap.space.len() as VertexId).collect();
        let c = set_diameter(&cap.space, &all)?.as_f64() / set_diameter(&cap.space, &cap.rim)?.as_f64();
        flat = flat.max(c);
    }
    let mut instance = GluingInstance::new(base.clone(), worst)?;
    instance.flatness = Some(flat);
    if mesh.slit_count() >= 2 {
        let comps: Vec<Vec<VertexId>> = mesh.slit_circles().iter().map(|m| m.ids.clone()).collect();
        instance.separation = uniform_rel_sep(base, &comps)?.value.finite();
    }
    let k_max = mesh.generation + mesh.resolution + 2;
    let counts = registry_counts(&mesh.slits, 0.5, 0.5, 1.0, k_max);
    instance.counting = Some((2.0, partial_sums(&counts, 2.0).last().copied().unwrap_or(0.0)));
    for (cap, pairs) in caps {
        instance.add_patch(cap.space, pairs)?;
    }
    let mut glued = glue(&instance)?;
    glued.space.relabel(format!("filled({})", base.label()));
    Ok(glued)
}
