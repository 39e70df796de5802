//! Slit domains, their accumulating limit truncations, slit carpets and
//! rescaled corner pieces.

use crate::constructions::mesher::{mesh, Block, LatticeSlit};
use crate::constructions::registry::{q_slits, r_slits, slit_set_name, Slit};
use crate::error::{input, Error, Result};
use crate::metric::{DiscreteSpace, MarkedSet, SetKind, Side, SpaceBuilder, VertexId};
use crate::scalar::Scalar;

/// Which generator produced a mesh.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Family {
    /// n-th slit domain.
    Slit,
    /// Stage-n truncation of the accumulating domain.
    Truncation,
    /// n-th slit-carpet approximation.
    Carpet,
    /// Rescaled lower-left corner (`level`) of a truncation.
    Corner { level: u32 },
}

/// A slit-domain mesh with its construction provenance.
#[derive(Clone, Debug)]
pub struct SlitDomainMesh<S> {
    pub space: DiscreteSpace<S>,
    pub family: Family,
    pub generation: u32,
    /// `m` with nominal pitch `h = 2^-m`.
    pub resolution: u32,
    pub slits: Vec<Slit>,
    /// Name of the outer-boundary marked set.
    pub outer: String,
    /// Vertex representing the accumulation corner, when the family has one.
    pub accumulation: Option<VertexId>,
}

impl<S: Scalar> SlitDomainMesh<S> {
    pub fn h(&self) -> S {
        self.space.h()
    }

    pub fn slit_count(&self) -> usize {
        self.slits.len()
    }

    /// Doubled boundary circle of slit `i`.
    pub fn slit_circle(&self, i: usize) -> &MarkedSet {
        self.space.marked(&self.slits[i].set).expect("registry names a marked set")
    }

    /// All slit circles in registry order.
    pub fn slit_circles(&self) -> Vec<&MarkedSet> {
        (0..self.slits.len()).map(|i| self.slit_circle(i)).collect()
    }

    pub fn outer_boundary(&self) -> &MarkedSet {
        self.space.marked(&self.outer).expect("outer boundary is marked")
    }

    /// Projection to the closed unit square (left and right copies coincide).
    pub fn project(&self, v: VertexId) -> (S, S) {
        let p = self.space.vertex(v);
        (p.x, p.y)
    }

    /// Vertex at lattice position `(x, y)` with the given side (exact match).
    pub fn vertex_at(&self, x: f64, y: f64, side: Side) -> Option<VertexId> {
        self.space
            .vertices()
            .iter()
            .position(|p| p.x.as_f64() == x && p.y.as_f64() == y && p.side == side)
            .map(|i| i as VertexId)
    }

    /// Left or right copy of the slit-`i` vertex nearest to its midpoint.
    pub fn slit_midpoint(&self, i: usize, side: Side) -> VertexId {
        let s = &self.slits[i];
        let mid = S::of((s.y0 + s.y1) / 2.0);
        *self
            .slit_circle(i)
            .ids
            .iter()
            .filter(|&&v| self.space.vertex(v).side == side)
            .min_by(|&&a, &&b| {
                let da = (self.space.vertex(a).y - mid).abs();
                let db = (self.space.vertex(b).y - mid).abs();
                da.partial_cmp(&db).expect("finite").then(a.cmp(&b))
            })
            .expect("slit has interior vertices")
    }
}

/// Exponent `m` with `h = 2^-m`.
pub fn resolution_exponent(h: f64) -> Result<u32> {
    if !(h > 0.0 && h <= 1.0) {
        return input(format!("resolution h = {h} must lie in (0, 1]"));
    }
    let m = (-h.log2()).round();
    if (0.5f64.powi(m as i32) - h).abs() > 0.0 || m > 40.0 {
        return input(format!("resolution h = {h} is not a power of two"));
    }
    Ok(m as u32)
}

fn lattice_slits(slits: &[Slit], units: i64) -> Result<Vec<LatticeSlit>> {
    slits
        .iter()
        .map(|s| {
            let conv = |v: f64| -> Result<i64> {
                let t = v * units as f64;
                if t.fract() != 0.0 {
                    Err(Error::Resolution(format!("slit {} is not on the mesh lattice", s.set)))
                } else {
                    Ok(t as i64)
                }
            };
            Ok(LatticeSlit { x: conv(s.x)?, y0: conv(s.y0)?, y1: conv(s.y1)? })
        })
        .collect()
}

fn uniform<S: Scalar>(n: u32, h: f64, family: Family, label: String) -> Result<SlitDomainMesh<S>> {
    let m = resolution_exponent(h)?;
    if m < n + 2 {
        return Err(Error::Resolution(format!(
            "h = 2^-{m} is too coarse for generation {n} (need h <= 2^-{})",
            n + 2
        )));
    }
    let units = 1i64 << m;
    let slits = q_slits(n);
    let names: Vec<String> = slits.iter().map(|s| s.set.clone()).collect();
    let blocks = [Block { x0: 0, y0: 0, x1: units, y1: units, pitch: 1 }];
    let meshed = mesh(units, &blocks, &lattice_slits(&slits, units)?, &names, S::of(h), &label)?;
    Ok(SlitDomainMesh {
        space: meshed.space,
        family,
        generation: n,
        resolution: m,
        slits,
        outer: "outer".into(),
        accumulation: None,
    })
}

/// The n-th slit domain on a uniform 8-neighbour grid of pitch `h = 2^-m`,
/// `m >= n + 2`.
pub fn gen_q<S: Scalar>(n: u32, h: f64) -> Result<SlitDomainMesh<S>> {
    uniform(n, h, Family::Slit, format!("Q({n},{})", resolution_exponent(h)?))
}

/// The n-th slit-carpet approximation: the completed n-th slit domain with
/// its slit circles as peripheral circles (same vertex and edge sets as
/// [`gen_q`]).
pub fn gen_slit_carpet<S: Scalar>(n: u32, h: f64) -> Result<SlitDomainMesh<S>> {
    uniform(n, h, Family::Carpet, format!("carpet({n},{})", resolution_exponent(h)?))
}

/// Stage-`n` truncation of the accumulating domain on a graded mesh.
///
/// Band `k` (`[0,2^-k]²` minus its lower-left quarter) is meshed at pitch
/// `h·2^-k` and the innermost square `[0,2^-n]²` at `h·2^-n`, so every corner
/// copy sees the same relative resolution.  Requires `h <= 2^-(n+3)`.
pub fn gen_q_inf<S: Scalar>(n: u32, h: f64) -> Result<SlitDomainMesh<S>> {
    let m = resolution_exponent(h)?;
    if m < n + 3 {
        return Err(Error::Resolution(format!(
            "h = 2^-{m} is too coarse for truncation stage {n} (need h <= 2^-{})",
            n + 3
        )));
    }
    let units = 1i64 << (m + n);
    let mut blocks = Vec::new();
    for k in 0..n {
        let outer = units >> k;
        let inner = outer / 2;
        let pitch = 1i64 << (n - k);
        blocks.push(Block { x0: inner, y0: 0, x1: outer, y1: outer, pitch });
        blocks.push(Block { x0: 0, y0: inner, x1: inner, y1: outer, pitch });
    }
    let core = units >> n;
    blocks.push(Block { x0: 0, y0: 0, x1: core, y1: core, pitch: 1 });
    let slits = r_slits(n);
    let names: Vec<String> = slits.iter().map(|s| s.set.clone()).collect();
    let label = format!("Qinf({n},{m})");
    let meshed = mesh(units, &blocks, &lattice_slits(&slits, units)?, &names, S::of(h), &label)?;
    let mut space = meshed
        .space
        .with_marked(MarkedSet::new("accumulation", SetKind::Generic, vec![meshed.origin], 0))?;
    let limits = (1..=slits.len() as u32).map(|c| (c, 0)).collect();
    space = space.with_limits(limits);
    Ok(SlitDomainMesh {
        space,
        family: Family::Truncation,
        generation: n,
        resolution: m,
        slits,
        outer: "outer".into(),
        accumulation: Some(meshed.origin),
    })
}

/// Alias of [`gen_q_inf`]: the n-th replacement stage.
pub fn gen_r<S: Scalar>(n: u32, h: f64) -> Result<SlitDomainMesh<S>> {
    gen_q_inf(n, h)
}

/// Preimage of the corner square `[0, 2^-level]²` rescaled by `2^level`.
///
/// The result is the induced subgraph on vertices projecting into the closed
/// corner square.  Right-hand copies of a slit lying on the square's right
/// side face away from the square and are dropped, so that slit's left copies
/// become ordinary points of the new outer boundary.
pub fn rescaled_corner<S: Scalar>(mesh: &SlitDomainMesh<S>, level: u32) -> Result<SlitDomainMesh<S>> {
    if mesh.family != Family::Truncation {
        return input("rescaled_corner expects a truncation of the accumulating domain");
    }
    if level > mesh.generation {
        return input(format!(
            "corner level {level} exceeds truncation stage {}",
            mesh.generation
        ));
    }
    if level == 0 {
        return Ok(mesh.clone());
    }
    let side = 0.5f64.powi(level as i32);
    let c = S::of(side);
    let scale = S::of(1.0 / side);
    let space = &mesh.space;
    let keep = |v: VertexId| {
        let p = space.vertex(v);
        p.x <= c && p.y <= c && !(p.side == Side::Right && p.x == c)
    };
    let mut new_id = vec![VertexId::MAX; space.len()];
    let mut b = SpaceBuilder::<S>::new();
    for v in 0..space.len() as VertexId {
        if keep(v) {
            let p = space.vertex(v);
            // The surviving left copies on the right side are single points
            // of the new outer boundary.
            let side = if p.x == c { Side::None } else { p.side };
            new_id[v as usize] = b.add_vertex(p.x * scale, p.y * scale, side);
        }
    }
    for &(u, v, l) in space.edges() {
        let (a, d) = (new_id[u as usize], new_id[v as usize]);
        if a != VertexId::MAX && d != VertexId::MAX {
            b.add_edge(a, d, l * scale)?;
        }
    }
    // Outer boundary of the new square in perimeter order.
    let one = S::one();
    let mut perimeter: Vec<(S, VertexId)> = Vec::new();
    for v in 0..space.len() as VertexId {
        let id = new_id[v as usize];
        if id == VertexId::MAX {
            continue;
        }
        let p = space.vertex(v);
        let (x, y) = (p.x * scale, p.y * scale);
        let t = if y == S::zero() {
            x
        } else if x == one {
            one + y
        } else if y == one {
            S::of(3.0) - x
        } else if x == S::zero() {
            S::of(4.0) - y
        } else {
            continue;
        };
        perimeter.push((t, id));
    }
    perimeter.sort_by(|a, b| a.0.partial_cmp(&b.0).expect("finite").then(a.1.cmp(&b.1)));
    b.mark(
        MarkedSet::new("outer", SetKind::BoundaryComponent, perimeter.iter().map(|p| p.1).collect(), 0)
            .with_cyclic_order(),
    )?;
    let mut slits = Vec::new();
    for s in &mesh.slits {
        if !(s.x < side && s.y1 <= side) {
            continue;
        }
        let old = space.marked(&s.set).expect("registry names a marked set");
        let id = slits.len();
        let ids: Vec<VertexId> = old.ids.iter().map(|&v| new_id[v as usize]).collect();
        let name = slit_set_name(id);
        b.mark(MarkedSet::new(name.clone(), SetKind::Slit, ids, id as u32 + 1).with_cyclic_order())?;
        slits.push(Slit {
            id,
            x: s.x / side,
            y0: s.y0 / side,
            y1: s.y1 / side,
            generation: s.generation,
            copy: s.copy - level,
            set: name,
        });
    }
    for id in 0..slits.len() as u32 {
        b.limit(id + 1, 0);
    }
    let origin = new_id[mesh.accumulation.expect("truncations mark their corner") as usize];
    b.mark(MarkedSet::new("accumulation", SetKind::Generic, vec![origin], 0))?;
    let label = format!("corner({},{};{level})", mesh.generation, mesh.resolution);
    let out = b.build(mesh.h(), label)?;
    Ok(SlitDomainMesh {
        space: out,
        family: Family::Corner { level },
        generation: mesh.generation - level,
        resolution: mesh.resolution,
        slits,
        outer: "outer".into(),
        accumulation: Some(origin),
    })
}

/// Rebuilds a slit-domain view of a mesh read from disk: slits are recovered
/// from the marked sets of kind `slit` (tips are the extreme vertices).
pub fn from_space<S: Scalar>(space: DiscreteSpace<S>) -> Result<SlitDomainMesh<S>> {
    let mut slits = Vec::new();
    for m in space.marked_sets().filter(|m| m.kind == SetKind::Slit) {
        let xs: Vec<f64> = m.ids.iter().map(|&v| space.vertex(v).x.as_f64()).collect();
        let ys: Vec<f64> = m.ids.iter().map(|&v| space.vertex(v).y.as_f64()).collect();
        let y0 = ys.iter().copied().fold(f64::INFINITY, f64::min);
        let y1 = ys.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        slits.push(Slit { id: slits.len(), x: xs[0], y0, y1, generation: 0, copy: 0, set: m.name.clone() });
    }
    let outer = space
        .marked_sets()
        .find(|m| m.kind == SetKind::BoundaryComponent && m.component == 0)
        .map(|m| m.name.clone())
        .unwrap_or_else(|| "outer".into());
    let accumulation = space.marked("accumulation").map(|m| m.ids[0]);
    let m = resolution_exponent(space.h().as_f64()).unwrap_or(0);
    Ok(SlitDomainMesh {
        space,
        family: if accumulation.is_some() { Family::Truncation } else { Family::Slit },
        generation: 0,
        resolution: m,
        slits,
        outer,
        accumulation,
    })
}
