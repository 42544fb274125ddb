//! Approximate degradability of finite-dimensional quantum channels.
//!
//! The crate computes, for a channel `Phi`, the smallest `epsilon` for which
//! some degrading map `Xi` brings `Xi . Phi` within `epsilon` of the
//! complementary channel, and turns that number into upper bounds on the
//! quantum and private capacities.

pub mod bounds;
pub mod channel;
pub mod degradability;
pub mod entropy;
pub mod envelope;
pub mod error;
pub mod io;
pub mod linalg;
pub mod operator;
pub mod optimize;
pub mod random;
pub mod sdp;
pub mod sweep;
pub mod zoo;

pub use bounds::{
    alicki_fannes_term, anti_degradable_bound, capacity_bounds, close_degradable_bounds, close_to_eps_degradable,
    fannes_audenaert_term, BoundTerms, CapacityBounds, CloseDegradableBounds, Interval,
};
pub use channel::{ChoiMatrix, QuantumChannel, StinespringIsometry, TransferMatrix};
pub use degradability::{
    diamond_norm_distance, epsilon_antidegradable, epsilon_degradable, DegradabilityReport,
};
pub use entropy::{binary_entropy, coherent_information, conditional_entropy, von_neumann_entropy};
pub use envelope::{lower_convex_envelope, EnvelopePoints};
pub use error::{Error, Result};
pub use operator::{DensityOperator, HermitianOperator};
pub use optimize::{channel_coherent_information, u_xi};
pub use sdp::{solve_sdp, SdpProblem, SdpSolution, SolveOptions, SolveStatus};
pub use sweep::{emit_csv, sweep_bb84, sweep_depolarizing, SweepTable};
pub use zoo::ChannelFamilySpec;
