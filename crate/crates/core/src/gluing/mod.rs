//! Metric gluing along bi-Lipschitz identifications.
//!
//! A [`GluingInstance`] collects a base space, patches and verified gluing
//! maps; [`glue`] realises the quotient by zero-length identification edges,
//! so the glued metric is exactly the quotient path metric.  The checks in
//! [`checks`] compare the glued metric with the piece metrics, and
//! [`fill_slits`] closes every slit of a slit domain with a hemispherical cap.

pub mod checks;
pub mod fill;
pub mod instance;

pub use checks::{comparison_check, flatness_check, local_isometry_check};
pub use fill::{fill_slits, hemisphere, Cap, MAX_CAP_DISTORTION};
pub use instance::{distortion, glue, GluedSpace, GluingInstance, Patch};

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::{shortest_dist, Side, SpaceBuilder};
    use crate::DiscreteSpace;

    fn path(n: usize, step: f64) -> DiscreteSpace<f64> {
        let mut b = SpaceBuilder::new();
        for i in 0..n {
            b.add_vertex(i as f64 * step, 0.0, Side::None);
        }
        for i in 1..n {
            b.add_edge(i as u32 - 1, i as u32, step).unwrap();
        }
        b.build(step, "path").unwrap()
    }

    #[test]
    fn three_paths_share_an_endpoint() {
        // Two unit paths a–p and q–b glued at p ~ q: d(a, b) = 2, d(a, q) = 1.
        let mut inst = GluingInstance::new(path(2, 1.0), 1.0).unwrap();
        inst.add_patch(path(3, 1.0), vec![(1, 0)]).unwrap();
        let g = glue(&inst).unwrap();
        assert_eq!(g.space.len(), 5);
        let far = g.glued_id(1, 2);
        assert_eq!(shortest_dist(&g.space, 0, far).unwrap(), 3.0);
        assert_eq!(g.provenance(far), (1, 2));
        assert_eq!(g.classes(), &[vec![1, 2]]);
        assert!(comparison_check(&g, None).pass);
    }

    #[test]
    fn map_validation() {
        let mut inst = GluingInstance::new(path(4, 1.0), 1.0).unwrap();
        // Not injective.
        assert!(inst.add_patch(path(4, 1.0), vec![(0, 0), (1, 0)]).is_err());
        // Not connected in the base.
        assert!(inst.add_patch(path(4, 1.0), vec![(0, 0), (2, 1)]).is_err());
        // Stretches by 2 with L = 1.
        assert!(inst.add_patch(path(5, 1.0), vec![(0, 0), (1, 2)]).is_err());
        inst.add_patch(path(4, 1.0), vec![(0, 0), (1, 1)]).unwrap();
        // Overlaps the first gluing set.
        assert!(inst.add_patch(path(4, 1.0), vec![(1, 0), (2, 1)]).is_err());
    }

    #[test]
    fn hemisphere_has_half_sphere_area() {
        let n = 64;
        let pos: Vec<f64> = (0..n).map(|j| j as f64 / n as f64).collect();
        let plane: Vec<(f64, f64)> = (0..n).map(|j| (0.0, j as f64)).collect();
        let cap = hemisphere::<f64>(1.0, &pos, &plane).unwrap();
        let area: f64 = cap.space.cells().iter().map(|c| c.area).sum();
        let r = cap.radius;
        assert!((area - 2.0 * std::f64::consts::PI * r * r).abs() < 1e-12);
        assert_eq!(cap.rings, n / 4);
        let l = distortion(&cap.space, &cap.space, &[(0, 0), (1, 1)]).unwrap();
        assert_eq!(l, 1.0);
    }
}
