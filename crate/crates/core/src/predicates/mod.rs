//! Sampled estimators for the geometric constants of a discrete space:
//! linear local connectivity, Ahlfors regularity, homogeneity counts,
//! porosity, quasicircle and relative-separation constants, and the
//! tangent-approximation checks.

pub mod ahlfors;
pub mod homogeneity;
pub mod llc;
pub mod porosity;
pub mod quasicircle;
pub mod relsep;
pub mod sample;
pub mod tangent;

pub use ahlfors::{ahlfors_fit, mass_proxy, median, ols_slope, AhlforsFit, MassSeries};
pub use homogeneity::{homogeneity_counts, planarity_sum, ComponentFamily};
pub use llc::{allc_constant, llc1_constant, llc2_constant};
pub use porosity::{box_count_slope, porosity_constant};
pub use quasicircle::{circle_llc1, quasicircle_constant};
pub use relsep::uniform_rel_sep;
pub use sample::SampleSpec;
pub use tangent::{
    compare_nets, inclusion_check, preimage_cover_check, pulled_back_net, NetComparison, NetGraph, NetKey,
};
