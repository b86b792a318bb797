//! Stackelberg security games under attacker manipulation.
//!
//! * [`game`]: payoffs, coverage vectors, utilities and best responses.
//! * [`solvers`]: SSE and maximin strategies.
//! * [`manipulation`]: the attacker's optimal fake report.
//! * [`policy`]: SSE, optimal and quantal-response policies and their
//!   efficiency (EoP).
//! * [`gen`] and [`io`]: random instances and JSON files.
//! * [`experiment`]: the batch harness behind the `experiment` subcommand.

pub mod error;
pub mod experiment;
pub mod game;
pub mod gen;
pub mod io;
pub mod manipulation;
pub mod policy;
pub mod solvers;

pub use error::{Error, Result};
pub use game::{
    attacker_utility, best_responses, defender_utility, shift_nonnegative, zero_sum_type,
    AttackerType, Coverage, GameInstance, TypeSet,
};
pub use manipulation::{best_report_in_set, optimal_report, report_zero_sum, ManipulationReport};
pub use policy::{
    eop, max_eop_policy, qr_eop, qr_outcome, sse_policy, threshold_policy, EopReport, Outcome,
    Policy, QrPolicy, StochasticOutcome,
};
pub use solvers::{maximin, solve_sse, MaximinResult, SseResult};
