//! Desk-scale simulator for selection-rule stochasticity separations.
//!
//! The crate builds the disorderly contestant `h` from nested disordered
//! blocks, runs the host's car/goat strategies against finite families of
//! monotone selectors and adaptive orderly contestants, and brute-forces the
//! counting arguments behind the ordered-block constructions.
//!
//! Densities are exact: every checker compares against thresholds such as
//! `1/3`, `1/n` and `1/(s+2)` with strict or non-strict inequalities, so the
//! constructions run over [`Rational`]. Density functions are generic over
//! [`DensityScalar`] and also accept big rationals and floats.
//!
//! Infinite objects appear only as finite prefixes. Where the underlying
//! argument consults the halting oracle, the simulator evaluates explicitly
//! supplied total opponents under a step budget and drops any opponent that
//! faults.

pub mod adaptive;
pub mod bits;
pub mod blocks;
pub mod catalog;
pub mod counting;
pub mod density;
pub mod error;
pub mod ledger;
pub mod nonadaptive;
pub mod permutation;
pub mod scalar;
pub mod selector;
pub mod skip;

pub use adaptive::{build_adaptive_assignment, check_adaptive_p, AdaptiveAssignment, AdaptiveContestant, AdaptivePCheck};
pub use bits::BitPrefix;
pub use blocks::{
    audit_host, construct_db, construct_db_with, construct_h, construct_h_with, h_eval, largeness_ok, BlockParams,
    DisorderedBlock, HostPermutation, IfSizing,
};
pub use counting::{build_x_greedy, count_big, harmonic_bound, hat_permutation, is_big, verify_greedy, GreedyState};
pub use density::{alpha_shift_check, density_profile, join, rho, DensityProfile, ShiftWitness};
pub use error::{Error, Fault, Result};
pub use ledger::RestrictionLedger;
pub use nonadaptive::{build_host_assignment, check_g, check_p, HostAssignment, OpponentFamily};
pub use permutation::{permute_image, FinitePermutation, PermutationFragment};
pub use scalar::{format_decimal, DensityScalar};
pub use selector::{select_monotone, MonotoneSelector};
pub use skip::{
    apply_skip_rule, block_scanner, even_odd_rule, halve_rule, ordered_block, scanner_exit_densities, SkipEntry, SkipRule,
    SkipSequence,
};

/// Exact density values.
pub type Rational = num_rational::Ratio<i64>;
/// Exact values whose numerators outgrow 64 bits, such as harmonic sums.
pub type BigRational = num_rational::BigRational;
pub type ExactProfile = DensityProfile<Rational>;
pub type FloatProfile = DensityProfile<f64>;
/// Door index.
pub type Door = u64;
/// Time stamp of a disorderly contestant.
pub type Time = u64;
