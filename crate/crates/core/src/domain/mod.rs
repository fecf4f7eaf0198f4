//! Domain types shared by every module: norms, distributions, datasets,
//! transport costs and the exact discrete transport oracle.

pub mod cost;
pub mod dataset;
pub mod distribution;
pub mod norm;
pub mod transport;

pub use cost::TransportCost;
pub use dataset::LabeledDataset;
pub use distribution::DiscreteDistribution;
pub use norm::{dual_norm_witness, Norm};
pub use transport::{ot_distance, transport_matrix, CouplingPlan, Move};

/// Feasibility slack for "Q lies in the ball of radius eps".
pub const BALL_SLACK: f64 = 1e-9;
