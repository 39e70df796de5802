//! Boundary components, ends and rank.
//!
//! Boundary components are the ε-chain classes of the marked boundary
//! vertices; ends are read off a collar exhaustion by compacta; rank is
//! computed on the accumulation structure declared by the generators, since
//! every point of a finite metric space is isolated.

pub mod circle;
pub mod components;
pub mod ends;

pub use circle::{boundary_circle_check, cycle_order};
pub use components::{
    boundary_components, boundary_components_with, fringe, local_pitch, rank, BoundaryComponent, ComponentSpace,
    CHAIN_FACTOR, HAUSDORFF_MAX_COMPONENTS,
};
pub use ends::{default_exhaustion, ends, ends_components_check, ends_components_report, EndProfile, NON_PLANAR_LABELS};
