//! Uniform relative separation of a family of components.

use rayon::prelude::*;

use crate::error::{input, Result};
use crate::metric::{set_diameter, ConstantReport, DiscreteSpace, Ratio, Search, VertexId};
use crate::scalar::Scalar;

/// Minimum over pairs of components of `Δ(E,F) = dist(E,F)/min(diam E, diam F)`.
///
/// Pairs whose smaller diameter is zero have `Δ = ∞` and are ignored; when
/// every pair is of that kind the report's value is the `∞` sentinel.
/// Distances and diameters are exact.  Extras `witness_a`/`witness_b` give
/// the indices of a minimising pair.
pub fn uniform_rel_sep<S: Scalar>(space: &DiscreteSpace<S>, components: &[Vec<VertexId>]) -> Result<ConstantReport> {
    if components.len() < 2 {
        return input(format!("relative separation needs at least 2 components (got {})", components.len()));
    }
    let mut owner = vec![u32::MAX; space.len()];
    for (i, c) in components.iter().enumerate() {
        for &v in c {
            space.check_vertex(v)?;
            if owner[v as usize] != u32::MAX && owner[v as usize] != i as u32 {
                return input(format!("components {} and {i} share vertex {v}", owner[v as usize]));
            }
            owner[v as usize] = i as u32;
        }
    }
    let diams: Vec<f64> = components
        .iter()
        .map(|c| set_diameter(space, c).map(|d| d.as_f64()))
        .collect::<Result<_>>()?;
    // Each pair is examined from its smaller-diameter side, where
    // Δ = d / diam_i: a search from component i stops at the first other
    // component of diameter >= diam_i that it settles.
    let per: Vec<(f64, usize)> = (0..components.len())
        .into_par_iter()
        .map_init(
            || Search::new(space),
            |search, i| {
                let di = diams[i];
                let mut best = (f64::INFINITY, usize::MAX);
                if di <= 0.0 {
                    return best;
                }
                search.run_with(&components[i], S::infinity(), |v, d| {
                    let j = owner[v as usize];
                    if j != u32::MAX && j as usize != i && diams[j as usize] >= di {
                        best = (d.as_f64() / di, j as usize);
                        return false;
                    }
                    true
                });
                best
            },
        )
        .collect();
    let mut value = f64::INFINITY;
    let mut witness = (usize::MAX, usize::MAX);
    for (i, &(delta, j)) in per.iter().enumerate() {
        if delta < value {
            value = delta;
            witness = (i.min(j), i.max(j));
        }
    }
    let n = components.len();
    let mut report = ConstantReport::new("relsep", "uniform relative separation", Ratio::from_f64(value));
    report.samples = n * (n - 1) / 2;
    report.resolution = space.h().as_f64();
    if value.is_finite() {
        report.extra.push(("witness_a".into(), witness.0 as f64));
        report.extra.push(("witness_b".into(), witness.1 as f64));
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::gen_q;
    use crate::metric::{rel_distance, Side};

    #[test]
    fn matches_pairwise_scan() {
        let q = gen_q::<f64>(2, 1.0 / 32.0).unwrap();
        let comps: Vec<Vec<u32>> = q.slit_circles().iter().map(|m| m.ids.clone()).collect();
        let rep = uniform_rel_sep(&q.space, &comps).unwrap();
        let mut brute = f64::INFINITY;
        for i in 0..comps.len() {
            for j in i + 1..comps.len() {
                if let Some(d) = rel_distance(&q.space, &comps[i], &comps[j]).unwrap().finite() {
                    brute = brute.min(d);
                }
            }
        }
        assert_eq!(rep.value.finite().unwrap(), brute);
    }

    #[test]
    fn singletons_are_vacuous() {
        let q = gen_q::<f64>(0, 1.0 / 8.0).unwrap();
        let a = q.vertex_at(0.125, 0.125, Side::None).unwrap();
        let b = q.vertex_at(0.875, 0.875, Side::None).unwrap();
        let rep = uniform_rel_sep(&q.space, &[vec![a], vec![b]]).unwrap();
        assert!(rep.value.is_infinite());
        assert!(uniform_rel_sep(&q.space, &[vec![a]]).is_err());
    }
}
