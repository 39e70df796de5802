//! Discrete metric-surface toolkit.
//!
//! Metric surfaces are modelled as finite weighted planar graphs
//! ([`DiscreteSpace`]).  On top of that substrate the crate provides
//! generators for recursively slit squares and their carpet limits
//! ([`constructions`]), sampled estimators for linear local connectivity,
//! Ahlfors regularity, porosity and related constants ([`predicates`]), exact
//! metric gluing along bi-Lipschitz identifications ([`gluing`]), boundary
//! component / end analysis ([`boundary`]) and a manifest-driven verification
//! harness ([`harness`]).
//!
//! All geometry is generic over the [`Scalar`] type; the aliases below fix the
//! default `f64` instantiation.

pub mod boundary;
pub mod constructions;
pub mod error;
pub mod gluing;
pub mod harness;
pub mod metric;
pub mod predicates;
pub mod scalar;

pub use error::{Error, Result};
pub use metric::{Cell, CheckReport, ConstantReport, DiscreteSpace, MarkedSet, Ratio, SetKind, Side, VertexId};
pub use scalar::Scalar;

/// Default double-precision space.
pub type Space = metric::DiscreteSpace<f64>;
/// Single-precision space.
pub type Space32 = metric::DiscreteSpace<f32>;
/// Default double-precision slit-domain mesh.
pub type SlitMesh = constructions::SlitDomainMesh<f64>;
/// Default double-precision glued space.
pub type Glued = gluing::GluedSpace<f64>;




