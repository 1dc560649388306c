use thiserror::Error;

/// Everything that can go wrong when building instances, evaluating indices
/// or bounds, or validating a scenario.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid support: need finite a < b, got [{a}, {b}]")]
    InvalidSupport { a: f64, b: f64 },

    #[error("a bandit instance needs at least two arms, got {0}")]
    TooFewArms(usize),

    #[error("{policy} index is undefined for t = {t} samples (needs t >= {min})")]
    SampleCountTooSmall {
        policy: &'static str,
        min: u64,
        t: u64,
    },

    #[error("index evaluation needs global time n >= 1, got {0}")]
    GlobalTimeTooSmall(f64),

    #[error("index evaluation needs v_min <= w_max, got v_min = {v_min}, w_max = {w_max}")]
    InvertedRange { v_min: f64, w_max: f64 },

    #[error("index evaluation needs sd >= 0, got {0}")]
    NegativeSd(f64),

    #[error("{policy} needs at least {min} initialization rounds, got {given}")]
    InitRoundsTooSmall {
        policy: &'static str,
        min: u64,
        given: u64,
    },

    #[error("horizon {horizon} is shorter than the initialization phase ({arms} arms x {rounds} rounds)")]
    HorizonTooShort {
        horizon: u64,
        arms: usize,
        rounds: u64,
    },

    #[error("slack for arm {arm} violates {constraint}")]
    InfeasibleSlack { arm: usize, constraint: String },

    #[error("target mean {mu_star} lies below the arm mean {mean}")]
    TargetBelowMean { mu_star: f64, mean: f64 },

    #[error("parameter out of domain: {0}")]
    OutOfDomain(String),

    #[error("invalid scenario: {0}")]
    InvalidScenario(String),

    #[error("thread pool construction failed: {0}")]
    ThreadPool(String),
}
