//! Generators for slit domains, their accumulating limit, slit carpets,
//! rescaled corners, circle domains and round circles.

pub mod circles;
pub mod families;
mod mesher;
pub mod registry;

pub use circles::{ellipse_points, gen_circle_domain, gen_closed_polygon, gen_round_circle, Disk};
pub use families::{
    from_space, gen_q, gen_q_inf, gen_r, gen_slit_carpet, rescaled_corner, resolution_exponent, Family,
    SlitDomainMesh,
};
pub use registry::{q_slits, r_slits, registry_counts, partial_sums, scale_class, Slit};
