//! Scale-class counts `n_k` of components meeting a ball, and the partial
//! sums of the planarity series built from them.

use crate::constructions::registry::{partial_sums, scale_class};
use crate::error::Result;
use crate::metric::{set_diameter, DiscreteSpace, Search, VertexId};
use crate::scalar::Scalar;

/// Components with precomputed diameters, reusable across many balls.
#[derive(Clone, Debug)]
pub struct ComponentFamily {
    pub sets: Vec<Vec<VertexId>>,
    pub diameters: Vec<f64>,
}

impl ComponentFamily {
    pub fn new<S: Scalar>(space: &DiscreteSpace<S>, sets: Vec<Vec<VertexId>>) -> Result<Self> {
        let diameters = sets
            .iter()
            .map(|s| set_diameter(space, s).map(|d| d.as_f64()))
            .collect::<Result<Vec<_>>>()?;
        Ok(ComponentFamily { sets, diameters })
    }

    /// `n_k` for `k = 0..=k_max`: components meeting `B(x, r)` whose diameter
    /// lies in `(2^-k r, 2^-k+1 r]`.
    pub fn counts<S: Scalar>(&self, space: &DiscreteSpace<S>, x: VertexId, r: f64, k_max: u32) -> Vec<u64> {
        let mut search = Search::new(space);
        search.run(&[x], S::of(r));
        let rs = S::of(r);
        let mut counts = vec![0u64; k_max as usize + 1];
        for (set, &diam) in self.sets.iter().zip(&self.diameters) {
            if !set.iter().any(|&v| search.dist(v) < rs) {
                continue;
            }
            if let Some(k) = scale_class(diam, r) {
                if k <= k_max {
                    counts[k as usize] += 1;
                }
            }
        }
        counts
    }
}

/// `n_k` sequence of `components` around `B(x, r)` for `k = 0..=k_max`.
pub fn homogeneity_counts<S: Scalar>(
    space: &DiscreteSpace<S>,
    components: &[Vec<VertexId>],
    x: VertexId,
    r: f64,
    k_max: u32,
) -> Result<Vec<u64>> {
    space.check_vertex(x)?;
    Ok(ComponentFamily::new(space, components.to_vec())?.counts(space, x, r, k_max))
}

/// Partial sums `S_K = Σ_{k<=K} n_k 2^{-kQ}` for `K = 0..=k_max`.
pub fn planarity_sum<S: Scalar>(
    space: &DiscreteSpace<S>,
    components: &[Vec<VertexId>],
    q: f64,
    x: VertexId,
    r: f64,
    k_max: u32,
) -> Result<Vec<f64>> {
    Ok(partial_sums(&homogeneity_counts(space, components, x, r, k_max)?, q))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constructions::gen_q;
    use crate::metric::Side;

    #[test]
    fn second_slit_domain_counts() {
        let q = gen_q::<f64>(2, 1.0 / 128.0).unwrap();
        let comps: Vec<Vec<u32>> = q.slit_circles().iter().map(|m| m.ids.clone()).collect();
        let x = q.vertex_at(0.25, 0.5, Side::None).unwrap();
        let n = homogeneity_counts(&q.space, &comps, x, 1.0, 4).unwrap();
        // diam 1/2 lies in (1/4, 1/2] (k = 2), diam 1/4 in (1/8, 1/4] (k = 3).
        assert_eq!(n, vec![0, 0, 1, 4, 0]);
        assert_eq!(homogeneity_counts(&q.space, &[], x, 1.0, 2).unwrap(), vec![0, 0, 0]);
        let s = planarity_sum(&q.space, &comps, 2.0, x, 1.0, 3).unwrap();
        assert!((s[3] - (1.0 / 16.0 + 4.0 / 64.0)).abs() < 1e-12);
    }
}
