use thiserror::Error;

/// Why an opponent (monotone selector or adaptive contestant) was disqualified.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Fault {
    #[error("no value at index {index} within the evaluation budget")]
    Partial { index: u64 },
    #[error("evaluation budget of {budget} steps exhausted")]
    BudgetExceeded { budget: u64 },
    #[error("not increasing at step {step}: door {door} after {previous}")]
    Disorderly { step: u64, previous: u64, door: u64 },
    #[error("trace changed at step {step} when unopened doors were flipped")]
    Inconsistent { step: u64 },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("position {index} is outside the prefix of length {len}")]
    OutOfRange { index: u64, len: u64 },

    #[error("prefix of length {len} is shorter than the required {required}")]
    InsufficientPrefix { len: u64, required: u64 },

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: u64, right: u64 },

    #[error("selector is not increasing at index {index}: {previous} then {value}")]
    NotMonotone { index: u64, previous: u64, value: u64 },

    #[error("skip rule is not orderly at step {step}: door {door} after {previous}")]
    NotOrderly { step: u64, previous: u64, door: u64 },

    #[error("not a permutation: {0}")]
    NotPermutation(String),

    #[error("range error: {0}")]
    Range(String),

    #[error("contract violation: {0}")]
    Contract(String),

    #[error("block of level {level} is too shallow for {members} opponents")]
    InsufficientNesting { level: u32, members: usize },

    #[error("door {door} demanded as both car and goat")]
    LedgerConflict { door: u64 },

    #[error("witness search over {free} free doors exceeds the cap of {cap}")]
    WitnessCapExceeded { free: usize, cap: usize },

    #[error("evaluation horizon too short: {0}")]
    Horizon(String),

    #[error("opponent {member} ({name}): {fault}")]
    Opponent { member: usize, name: String, fault: Fault },

    #[error("host permutation exhausted: {0}")]
    HostExhausted(String),

    #[error("parse error at byte {offset}: {message}")]
    Parse { offset: usize, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;
