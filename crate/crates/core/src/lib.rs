//! Incentive-compatible contracts for agents linked by an influence network.
//!
//! A principal offers each agent a quantity `x_i`. Agent `i`'s utility is
//! `a x_i - x_i^2 / 2 + alpha * sum_j g_ij x_i x_j`, where `g_ij = 1` means
//! `i` is influenced by `j`. When agents know where they sit in the network but
//! the principal does not, coalitions can misreport positions; this crate
//! computes contracts and checks them against such deviations.

pub mod checks;
pub mod classify;
pub mod coalitions;
pub mod error;
pub mod families;
pub mod io;
pub mod mechanism;
pub mod net;
pub mod search;
pub mod solver;
pub mod verify;

pub use classify::{classify, layering, pooling_pattern, Classification, Family, TierPartition};
pub use coalitions::{adjacent_coalitions, coalitions, CoalitionMode};
pub use error::{Error, Result};
pub use net::{auto_alpha, network_lambda, spectral_radius, DirectedNetwork, ModelParams};
pub use solver::{
    constrained_first_best, first_best, katz_bonacich, price_schedule, taxes_for_target,
    uniform_optimum, utilities, utility, welfare, Contract, EqualityClasses,
};
pub use verify::{
    verify, verify_group_ic, verify_group_ic_transfers, Deviation, Mode, Verdict,
    VerificationReport, VerifyOptions, Violation,
};
