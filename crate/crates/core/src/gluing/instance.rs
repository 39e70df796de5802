//! Gluing instances and the glued quotient space.

use crate::error::{input, Result};
use crate::metric::sets::UnionFind;
use crate::metric::{
    restricted_components, set_distance_matrix, DiscreteSpace, MarkedSet, MetricKind, SetKind, SpaceBuilder,
    VertexId,
};
use crate::scalar::Scalar;

/// A patch `X_i` with its gluing map `f_i`, given as pairs `(x, f_i(x))` of
/// a base vertex in `E_i` and a patch vertex.
#[derive(Clone, Debug)]
pub struct Patch<S> {
    pub space: DiscreteSpace<S>,
    pub pairs: Vec<(VertexId, VertexId)>,
}

impl<S> Patch<S> {
    /// The gluing set `E_i` in the base, in pair order.
    pub fn base_set(&self) -> Vec<VertexId> {
        self.pairs.iter().map(|p| p.0).collect()
    }

    /// The image `f_i(E_i)` in the patch, in pair order.
    pub fn image_set(&self) -> Vec<VertexId> {
        self.pairs.iter().map(|p| p.1).collect()
    }
}

/// Base space, patches and gluing maps, with the declared constants.
///
/// Patches are only accepted after their gluing map has been verified:
/// `f_i` must be a bijection between `E_i` and its image, `E_i` must be
/// connected and disjoint from the other gluing sets, and
/// `d_i(f(u), f(v)) ∈ [d_0(u,v)/L, L·d_0(u,v)]` must hold for every pair.
#[derive(Clone, Debug)]
pub struct GluingInstance<S> {
    pub base: DiscreteSpace<S>,
    pub patches: Vec<Patch<S>>,
    /// Declared bi-Lipschitz constant `L` of the gluing maps.
    pub lipschitz: f64,
    /// Flatness constant `C`: `diam X_i <= C·diam f_i(E_i)`.
    pub flatness: Option<f64>,
    /// Separation constant `c` of the gluing sets.
    pub separation: Option<f64>,
    /// Counting bound `(Q, M)` on the gluing sets.
    pub counting: Option<(f64, f64)>,
}

/// Tolerance used when verifying declared bi-Lipschitz bounds.
const LIPSCHITZ_TOL: f64 = 1e-9;

impl<S: Scalar> GluingInstance<S> {
    pub fn new(base: DiscreteSpace<S>, lipschitz: f64) -> Result<Self> {
        if !(lipschitz.is_finite() && lipschitz >= 1.0) {
            return input(format!("bi-Lipschitz constant must be >= 1 (got {lipschitz})"));
        }
        if base.metric() != MetricKind::Path {
            return input("gluing needs path-metric spaces");
        }
        Ok(GluingInstance { base, patches: Vec::new(), lipschitz, flatness: None, separation: None, counting: None })
    }

    /// Verifies and appends a patch.
    pub fn add_patch(&mut self, space: DiscreteSpace<S>, pairs: Vec<(VertexId, VertexId)>) -> Result<()> {
        if space.metric() != MetricKind::Path {
            return input("gluing needs path-metric spaces");
        }
        if pairs.is_empty() {
            return input("gluing map is empty");
        }
        let mut in_base = vec![false; self.base.len()];
        let mut in_patch = vec![false; space.len()];
        for &(x, y) in &pairs {
            self.base.check_vertex(x)?;
            space.check_vertex(y)?;
            if std::mem::replace(&mut in_base[x as usize], true) {
                return input(format!("gluing map is not injective: base vertex {x} repeated"));
            }
            if std::mem::replace(&mut in_patch[y as usize], true) {
                return input(format!("gluing map is not injective: patch vertex {y} repeated"));
            }
        }
        for (i, p) in self.patches.iter().enumerate() {
            if let Some(&(x, _)) = p.pairs.iter().find(|(x, _)| in_base[*x as usize]) {
                return input(format!("gluing sets overlap: base vertex {x} already glued to patch {i}"));
            }
        }
        let patch = Patch { space, pairs };
        let base_set = patch.base_set();
        if restricted_components(&self.base, &base_set).len() != 1 {
            return input("gluing set is not connected in the base");
        }
        let d0 = set_distance_matrix(&self.base, &base_set)?;
        let d1 = set_distance_matrix(&patch.space, &patch.image_set())?;
        let l = self.lipschitz;
        for a in 0..base_set.len() {
            for b in a + 1..base_set.len() {
                let (x, y) = (d0[a][b].as_f64(), d1[a][b].as_f64());
                let ok = y <= l * x * (1.0 + LIPSCHITZ_TOL) + LIPSCHITZ_TOL
                    && x <= l * y * (1.0 + LIPSCHITZ_TOL) + LIPSCHITZ_TOL;
                if !ok {
                    return input(format!(
                        "gluing map is not {l}-bi-Lipschitz: base pair ({}, {}) at distance {x} maps to distance {y}",
                        base_set[a], base_set[b]
                    ));
                }
            }
        }
        self.patches.push(patch);
        Ok(())
    }

    /// Largest distortion `max(d_i/d_0, d_0/d_i)` over all gluing pairs (the
    /// least admissible `L`).
    pub fn attained_lipschitz(&self) -> Result<f64> {
        let mut worst = 1.0f64;
        for p in &self.patches {
            worst = worst.max(distortion(&self.base, &p.space, &p.pairs)?);
        }
        Ok(worst)
    }
}

/// `max(d_1/d_0, d_0/d_1)` of a vertex correspondence between two spaces.
pub fn distortion<S: Scalar>(
    base: &DiscreteSpace<S>,
    patch: &DiscreteSpace<S>,
    pairs: &[(VertexId, VertexId)],
) -> Result<f64> {
    let a: Vec<VertexId> = pairs.iter().map(|p| p.0).collect();
    let b: Vec<VertexId> = pairs.iter().map(|p| p.1).collect();
    let d0 = set_distance_matrix(base, &a)?;
    let d1 = set_distance_matrix(patch, &b)?;
    let mut worst = 1.0f64;
    for i in 0..a.len() {
        for j in i + 1..a.len() {
            let (x, y) = (d0[i][j].as_f64(), d1[i][j].as_f64());
            if x <= 0.0 || y <= 0.0 {
                if x != y {
                    return Ok(f64::INFINITY);
                }
                continue;
            }
            worst = worst.max(y / x).max(x / y);
        }
    }
    Ok(worst)
}

/// Quotient of the disjoint union of base and patches, realised by
/// zero-length identification edges.  Base vertices keep their ids; patch `i`
/// occupies the id range starting at `offset(i + 1)`.
#[derive(Clone, Debug)]
pub struct GluedSpace<S> {
    pub space: DiscreteSpace<S>,
    /// Piece 0 is the base, piece `i + 1` is patch `i`.
    pieces: Vec<DiscreteSpace<S>>,
    offsets: Vec<usize>,
    /// Identification classes (glued ids), each of size >= 2.
    classes: Vec<Vec<VertexId>>,
    /// Per patch: the glued ids of `E_i ∪ f_i(E_i)`.
    loci: Vec<Vec<VertexId>>,
    pub lipschitz: f64,
    pub flatness: Option<f64>,
    pub separation: Option<f64>,
    pub counting: Option<(f64, f64)>,
}

impl<S: Scalar> GluedSpace<S> {
    pub fn pieces(&self) -> &[DiscreteSpace<S>] {
        &self.pieces
    }

    /// Piece index and piece-local id of a glued vertex.
    pub fn provenance(&self, v: VertexId) -> (usize, VertexId) {
        let p = self.offsets.partition_point(|&o| o <= v as usize) - 1;
        (p, (v as usize - self.offsets[p]) as VertexId)
    }

    /// Glued id of a piece-local vertex.
    pub fn glued_id(&self, piece: usize, v: VertexId) -> VertexId {
        (self.offsets[piece] + v as usize) as VertexId
    }

    pub fn classes(&self) -> &[Vec<VertexId>] {
        &self.classes
    }

    pub fn loci(&self) -> &[Vec<VertexId>] {
        &self.loci
    }

    /// Every vertex lying in an identification class.
    pub fn identified_vertices(&self) -> Vec<VertexId> {
        let mut all: Vec<VertexId> = self.classes.iter().flatten().copied().collect();
        all.sort_unstable();
        all
    }
}

/// Glues the instance: disjoint union plus zero-length identification edges.
///
/// Marked sets of the pieces are carried over (patch sets prefixed with
/// `patch<i>/`); boundary sets lying entirely inside a gluing locus stop being
/// boundary and become gluing-locus sets.  Each `E_i` is also marked as
/// `locus:<i>`.  Declared accumulation relations of the base are kept.
pub fn glue<S: Scalar>(instance: &GluingInstance<S>) -> Result<GluedSpace<S>> {
    let mut b = SpaceBuilder::<S>::new();
    let mut pieces = vec![instance.base.clone()];
    pieces.extend(instance.patches.iter().map(|p| p.space.clone()));
    let mut offsets = Vec::with_capacity(pieces.len() + 1);
    for piece in &pieces {
        offsets.push(b.len());
        for p in piece.vertices() {
            b.add_vertex(p.x, p.y, p.side);
        }
    }
    offsets.push(b.len());
    for (k, piece) in pieces.iter().enumerate() {
        let off = offsets[k] as VertexId;
        for &(u, v, l) in piece.edges() {
            if l > S::zero() {
                b.add_edge(u + off, v + off, l)?;
            } else {
                b.identify(u + off, v + off)?;
            }
        }
        for c in piece.cells() {
            b.add_cell(c.corners.iter().map(|&v| v + off).collect(), c.area)?;
        }
    }
    let n = b.len();
    let mut glued = vec![false; n];
    let mut loci = Vec::new();
    let mut uf = UnionFind::new(n);
    for (i, p) in instance.patches.iter().enumerate() {
        let off = offsets[i + 1] as VertexId;
        let mut locus = Vec::with_capacity(2 * p.pairs.len());
        for &(x, y) in &p.pairs {
            b.identify(x, y + off)?;
            uf.union(x as usize, (y + off) as usize);
            glued[x as usize] = true;
            glued[(y + off) as usize] = true;
            locus.extend([x, y + off]);
        }
        loci.push(locus);
    }
    // Carry marked sets over, demoting fully glued boundary sets.
    let mut next_component =
        instance.base.marked_sets().map(|m| m.component + 1).max().unwrap_or(1).max(1);
    for (k, piece) in pieces.iter().enumerate() {
        let off = offsets[k] as VertexId;
        for m in piece.marked_sets() {
            let ids: Vec<VertexId> = m.ids.iter().map(|&v| v + off).collect();
            let mut set = m.clone();
            set.ids = ids;
            if k > 0 {
                set.name = format!("patch{}/{}", k - 1, m.name);
            }
            if set.kind.is_boundary() && set.ids.iter().all(|&v| glued[v as usize]) {
                set.kind = SetKind::GluingLocus;
            } else if k > 0 && set.kind.is_boundary() {
                set.component = next_component;
                next_component += 1;
            }
            b.mark(set)?;
        }
    }
    for (i, p) in instance.patches.iter().enumerate() {
        b.mark(MarkedSet::new(format!("locus:{i}"), SetKind::GluingLocus, p.base_set(), 0))?;
    }
    for &(c, l) in instance.base.limits() {
        b.limit(c, l);
    }
    let mut members: std::collections::BTreeMap<usize, Vec<VertexId>> = Default::default();
    for v in 0..n {
        if glued[v] {
            members.entry(uf.find(v)).or_default().push(v as VertexId);
        }
    }
    let classes: Vec<Vec<VertexId>> = members.into_values().collect();
    let label = format!("glued({};{})", instance.base.label(), instance.patches.len());
    let space = b.build(instance.base.h(), label)?;
    Ok(GluedSpace {
        space,
        pieces,
        offsets,
        classes,
        loci,
        lipschitz: instance.lipschitz,
        flatness: instance.flatness,
        separation: instance.separation,
        counting: instance.counting,
    })
}
