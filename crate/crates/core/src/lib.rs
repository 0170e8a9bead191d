//! Offer optimization for churn-prone subscriber bases.
//!
//! Two stages:
//!
//! 1. [`segments`] distributes offer units (or offer budgets) across
//!    subscriber segments so that the expected number of acceptances is
//!    maximal.
//! 2. [`greedy`] assigns the offers granted to a segment to individual
//!    subscribers, maximizing expected revenue under churn, using the
//!    position-tracked queues of [`heapset`].
//!
//! [`oracle`] holds exhaustive reference solvers for small instances.

pub mod error;
pub mod exec;
pub mod generate;
pub mod greedy;
pub mod heapset;
pub mod io;
pub mod model;
pub mod oracle;
pub mod segments;

pub use error::{Error, Result};
pub use exec::Exec;
pub use generate::{generate_instance, GeneratorConfig};
pub use greedy::{
    greedy_offer, greedy_offer_with, verify_assignment, GreedyOffer, GreedyOptions, GreedyTrace,
    VerificationReport,
};
pub use heapset::{HeapSet, PriorityQueue, RootSelector};
pub use model::{
    acceptance_probability, expected_revenue, objective_value, Assignment, OfferCatalog, OfferType,
    Pair, Subscriber,
};
pub use oracle::{
    brute_force_budget, brute_force_oop, brute_force_segments, compare_greedy_vs_oracle,
    compare_greedy_vs_oracle_with, ComparisonReport,
};
pub use segments::{
    solve_budget_allocation, solve_count_allocation, AllocationMatrix, BranchBoundOptions,
    BudgetInstance, SegmentInstance,
};
