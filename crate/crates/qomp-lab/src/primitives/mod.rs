//! Simulated quantum subroutines: amplitude estimation, inner products,
//! max-finding and distance estimation, each charging a [`QueryLedger`].

mod distance;
mod estimation;
mod inner_product;
mod ledger;
mod max_finding;
mod noise;
mod state;

pub use distance::weighted_distance_estimate;
pub use estimation::{
    amp_est, fixed_point_amplify_cost, majority_vote, powering_median, reps_for_confidence, EstimateOutcome,
    SUCCESS_PROBABILITY,
};
pub use inner_product::{hadamard_inner_product, InnerProductEstimate};
pub use ledger::{QueryCounts, QueryLedger};
pub use max_finding::{find_max_approx, find_max_over_estimates, max_finding_queries, MaxOutcome};
pub use noise::{FailureHandling, Noise, NoiseMode, NoiseModel};
pub use state::{perturb_state, PreparedState, StateRef};

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum PrimitiveError {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("empty candidate set")]
    EmptySet,
}

pub(crate) fn require(cond: bool, msg: impl FnOnce() -> String) -> Result<(), PrimitiveError> {
    if cond {
        Ok(())
    } else {
        Err(PrimitiveError::InvalidArgument(msg()))
    }
}
