use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("sequence has {got} entries, at least {need} required")]
    SequenceTooShort { need: usize, got: usize },
    #[error("repeated entry {0} in permutation sequence")]
    RepeatedEntry(String),
    #[error("negative entry {0} in permutation sequence")]
    NegativeEntry(String),
    #[error("sequence length k={k} must lie in [3, {n}]")]
    SequenceLength { k: usize, n: usize },

    #[error("bipartite array has an empty side")]
    EmptySide,
    #[error("array element {0} is not positive")]
    NonPositiveElement(String),
    #[error("array is not invariant: positive side sums to {pos}, negative side to {neg}")]
    NotInvariant { pos: String, neg: String },
    #[error("side maxima are equal ({0}); the ancestor is undefined")]
    TiedMaxima(String),
    #[error("theta must be a positive integer, got {0}")]
    BadTheta(String),
    #[error("ancestor by theta={theta} would contain the nonpositive element {value}")]
    AncestorNotPositive { theta: String, value: String },
    #[error("theta={theta} is not below delta={delta} of the array")]
    ThetaNotBelowDelta { theta: String, delta: String },
    #[error("theta schedule stalls at 2 after {0} step(s)")]
    ScheduleStalled(usize),
    #[error("ancestor string breaks at step {step}: {reason}")]
    StringBroken { step: usize, reason: Box<Error> },

    #[error("equation arity {k} exceeds the cap of {cap}")]
    ArityCap { k: usize, cap: usize },
    #[error("search needs {needed} elementary checks, cap is {cap}")]
    SearchCap { needed: String, cap: u128 },
    #[error("m={m} exceeds the exact-search cap of {cap}")]
    ExactCap { m: u64, cap: u64 },
    #[error("materialized output would have {size} elements, cap is {cap}")]
    OutputCap { size: String, cap: u64 },

    #[error("equation is not one-sided with singleton equal to the opposite sum: {0}")]
    NotOneSided(String),
    #[error("digit set element {value} outside [1, {limit}]")]
    DigitOutOfRange { value: String, limit: String },
    #[error("carry-free condition fails: {lhs} is not below base {base}")]
    CarryCondition { lhs: String, base: String },
    #[error("digit set is not solution-free for the ancestor")]
    DigitSetNotFree,

    #[error("tower collision at level {level}: value {value} repeats or drops below 2")]
    TowerCollision { level: usize, value: String },
    #[error("value {value} outside the admissible range [{lo}, {hi}]")]
    OutOfRange { value: String, lo: String, hi: String },
    #[error("integer overflow in {0}")]
    Overflow(&'static str),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("malformed input: {0}")]
    Malformed(String),
}
