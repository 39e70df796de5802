//! Finite metric-space substrate: weighted planar graphs, shortest paths,
//! balls, set distances, nets and connectivity primitives.

pub mod io;
pub mod paths;
pub mod report;
pub mod sets;
pub mod space;

pub use paths::{distances, distances_from_set, Minimax, Search};
pub use report::{CheckReport, ConstantReport, Ratio};
pub use sets::{
    annulus, ball, diameter, double_sweep, epsilon_chain_components, epsilon_chain_connected,
    epsilon_net, hausdorff_dist, rel_distance, rel_from_parts, restricted_components, set_diameter, set_dist,
    set_distance_matrix,
    shortest_dist,
};
pub use space::{Cell, DiscreteSpace, MarkedSet, MetricKind, SetKind, Side, SpaceBuilder, Vertex, VertexId};
