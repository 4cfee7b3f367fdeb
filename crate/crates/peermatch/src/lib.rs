//! Solver library for many-to-one matching markets with social-network peer
//! effects.
//!
//! Students are assigned to houses with fixed quotas; a student's utility is
//! the desirability of their house plus the friendship weight to housemates,
//! and houses may score the students they receive. The crate computes and
//! verifies two-sided exchange-stable matchings, searches for them with a
//! greedy ascent and an MCMC heat bath, measures how well a matching
//! clusters the friendship graph, evaluates price-of-anarchy bounds, and
//! cross-checks everything against a brute-force oracle on small instances.

#![forbid(unsafe_code)]

pub mod io;
pub mod market;
pub mod metrics;
pub mod oracle;
pub mod solvers;
pub mod stability;

#[cfg(test)]
pub(crate) mod testutil;

pub use market::{
    house_utility, potential, social_welfare, student_utility, welfare_delta, Desirability,
    HouseId, HouseScoring, HouseSpec, Instance, InstanceSpec, Matching, SocialNetwork, StudentId,
};
pub use solvers::{
    polish, random_matching, solve_greedy, solve_mcmc, GreedyConfig, McmcConfig, PivotRule,
    SolveTrace, TerminationReason,
};
pub use stability::{
    alpha, assess_swap, is_one_sided_exchange_stable, is_two_sided_exchange_stable,
    StabilityReport, SwapAssessment,
};
