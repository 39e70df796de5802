//! Linear local connectivity estimators.
//!
//! Each sampled question "least λ such that x and y lie in one connected
//! piece of a region defined by distance to a" is answered exactly by a
//! bottleneck search over the per-vertex cost that the region's threshold
//! bounds; the answer is then rounded up to the geometric λ grid.

use rand::Rng;
use rayon::prelude::*;

use super::sample::{merge_max, Outcome, SampleSpec};
use crate::error::Result;
use crate::metric::{diameter, ConstantReport, DiscreteSpace, Minimax, Search, VertexId};
use crate::scalar::Scalar;

#[derive(Clone, Copy, PartialEq, Eq, Debug)]
enum Condition {
    /// Points of `B(a,r)` joined inside `B(a,λr)`.
    Inner,
    /// Points outside `B(a,r)` joined outside `B(a,r/λ)`.
    Outer,
    /// Points of the annulus `A(a,r,2r)` joined inside `A(a,r/Λ,2Λr)`.
    Annular,
}

/// λ of the first linear-local-connectivity clause (max over samples).
pub fn llc1_constant<S: Scalar>(space: &DiscreteSpace<S>, spec: &SampleSpec) -> Result<ConstantReport> {
    estimate(space, spec, Condition::Inner)
}

/// λ of the second linear-local-connectivity clause (max over samples).
pub fn llc2_constant<S: Scalar>(space: &DiscreteSpace<S>, spec: &SampleSpec) -> Result<ConstantReport> {
    estimate(space, spec, Condition::Outer)
}

/// Annular constant Λ for the outer radius `R = 2r` (max over samples).
///
/// The report's `continuum_ratio` extra is the largest value of
/// `diam(E)/r` bounded by `2·max_{v∈E} d(a,v)/r` over the connecting
/// continua `E` found.
pub fn allc_constant<S: Scalar>(space: &DiscreteSpace<S>, spec: &SampleSpec) -> Result<ConstantReport> {
    estimate(space, spec, Condition::Annular)
}

fn estimate<S: Scalar>(space: &DiscreteSpace<S>, spec: &SampleSpec, cond: Condition) -> Result<ConstantReport> {
    spec.validate()?;
    let diam = diameter(space, None)?.as_f64();
    let range = spec.radius_range(diam);
    let pool: Vec<VertexId> = (0..space.len() as VertexId).collect();
    let floor = 2.0 * space.h().as_f64();
    let outcomes: Vec<Outcome> = (0..spec.samples)
        .into_par_iter()
        .map_init(
            || (Search::new(space), Minimax::new(space)),
            |(search, mm), i| sample(spec, cond, i, range, floor, &pool, search, mm),
        )
        .collect();
    let (name, reference) = match cond {
        Condition::Inner => ("llc1", "linear local connectivity, first clause"),
        Condition::Outer => ("llc2", "linear local connectivity, second clause"),
        Condition::Annular => ("allc", "annular linear local connectivity, R = 2r"),
    };
    let mut report = spec.report(name, reference, space, range);
    let (raw, aux) = merge_max(&mut report, &outcomes, spec.cap);
    report.extra.push(("raw_max".into(), raw));
    if cond == Condition::Annular {
        report.extra.push(("continuum_ratio".into(), aux));
    }
    Ok(report)
}

#[allow(clippy::too_many_arguments)]
fn sample<S: Scalar>(
    spec: &SampleSpec,
    cond: Condition,
    index: usize,
    range: (f64, f64),
    floor: f64,
    pool: &[VertexId],
    search: &mut Search<'_, S>,
    mm: &mut Minimax<'_, S>,
) -> Outcome {
    let mut rng = spec.rng(index);
    let a = spec.draw_center(&mut rng, index, pool);
    let r = spec.draw_radius(&mut rng, range);
    if r <= floor {
        return Outcome::Skipped;
    }
    search.run(&[a], S::infinity());
    let settled = search.settled();
    let rs = S::of(r);
    let lo = settled.partition_point(|&v| search.dist(v) < rs);
    let candidates: &[VertexId] = match cond {
        Condition::Inner => &settled[..lo],
        Condition::Outer => &settled[lo..],
        Condition::Annular => {
            let first = settled.partition_point(|&v| search.dist(v) <= rs);
            let end = settled.partition_point(|&v| search.dist(v) < rs + rs);
            &settled[first..end.max(first)]
        }
    };
    if candidates.is_empty() {
        return Outcome::Skipped;
    }
    let d = |v: VertexId| search.dist(v);
    let two_r = rs + rs;
    let mut worst: Option<Outcome> = None;
    for _ in 0..spec.pairs.max(1) {
        let x = candidates[rng.gen_range(0..candidates.len())];
        let y = candidates[rng.gen_range(0..candidates.len())];
        let (raw, aux) = match cond {
            Condition::Inner => {
                mm.run(x, &[y], S::of(spec.cap) * rs, d);
                ((mm.value(y) / rs).as_f64(), 0.0)
            }
            Condition::Outer => {
                let inv = |v: VertexId| {
                    let dv = d(v);
                    if dv > S::zero() {
                        S::one() / dv
                    } else {
                        S::infinity()
                    }
                };
                mm.run(x, &[y], S::of(spec.cap) / rs, inv);
                ((mm.value(y) * rs).as_f64(), 0.0)
            }
            Condition::Annular => {
                let cost = |v: VertexId| {
                    let dv = d(v);
                    if dv > S::zero() {
                        (rs / dv).max(dv / two_r)
                    } else {
                        S::infinity()
                    }
                };
                mm.run(x, &[y], S::of(spec.cap), cost);
                let v = mm.value(y);
                let far = mm.path_to(y).iter().map(|&w| d(w)).fold(S::zero(), S::max);
                (v.as_f64(), (S::of(2.0) * far / rs).as_f64())
            }
        };
        let strict = cond != Condition::Outer;
        let o = match spec.snap(raw, strict) {
            Some(grid) => Outcome::Value { grid, raw, aux },
            None => Outcome::Capped { raw, aux },
        };
        worst = Some(match (worst, o) {
            (None, o) => o,
            (Some(Outcome::Capped { raw: r1, aux: a1 }), Outcome::Capped { raw: r2, aux: a2 }) => {
                Outcome::Capped { raw: r1.max(r2), aux: a1.max(a2) }
            }
            (Some(Outcome::Capped { raw: r1, aux: a1 }), Outcome::Value { raw: r2, aux: a2, .. })
            | (Some(Outcome::Value { raw: r2, aux: a2, .. }), Outcome::Capped { raw: r1, aux: a1 }) => {
                Outcome::Capped { raw: r1.max(r2), aux: a1.max(a2) }
            }
            (Some(Outcome::Value { grid: g1, raw: r1, aux: a1 }), Outcome::Value { grid: g2, raw: r2, aux: a2 }) => {
                Outcome::Value { grid: g1.max(g2), raw: r1.max(r2), aux: a1.max(a2) }
            }
            (Some(Outcome::Skipped), o) => o,
            (Some(w), Outcome::Skipped) => w,
        });
    }
    worst.unwrap_or(Outcome::Skipped)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::{gen_q, gen_round_circle};

    #[test]
    fn round_circle_is_llc_with_unit_constants() {
        let c = gen_round_circle::<f64>(256).unwrap();
        let spec = SampleSpec::default().with_samples(40).with_relative_radii(0.05, 0.45);
        let l1 = llc1_constant(&c, &spec).unwrap();
        let l2 = llc2_constant(&c, &spec).unwrap();
        assert!(l1.value.finite().unwrap() <= 1.05 + 1e-12, "{l1:?}");
        assert!(l2.value.finite().unwrap() <= 1.05 + 1e-12, "{l2:?}");
    }

    #[test]
    fn circle_annular_constant_grows_as_radii_shrink() {
        let c = gen_round_circle::<f64>(1024).unwrap();
        let coarse = SampleSpec::default().with_samples(16).with_relative_radii(0.2, 0.2);
        let fine = SampleSpec::default().with_samples(16).with_relative_radii(0.01, 0.01);
        let a = allc_constant(&c, &coarse).unwrap().value.finite().unwrap();
        let b = allc_constant(&c, &fine).unwrap().value.finite().unwrap();
        assert!(b > 10.0 * a, "{a} {b}");
    }

    #[test]
    fn square_annular_constant_is_small() {
        let q = gen_q::<f64>(0, 1.0 / 32.0).unwrap();
        let spec = SampleSpec::default().with_samples(40).with_relative_radii(0.05, 0.4);
        let r = allc_constant(&q.space, &spec).unwrap();
        assert!(!r.capped);
        assert!(r.value.finite().unwrap() <= 4.0, "{r:?}");
    }
}
