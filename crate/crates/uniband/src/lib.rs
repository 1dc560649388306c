//! Sequential allocation for bandits whose rewards are uniform on unknown
//! supports.
//!
//! The crate has three layers:
//!
//! * [`policy`]: index rules and the allocation loop. `ucb-uniform` is the
//!   support-based rule built for this reward family; `bk-ucb`, `chk-normal`
//!   and `kr` are comparators.
//! * [`theory`]: closed-form regret bounds (the asymptotic lower-bound
//!   constant, a finite-time bound with per-arm slack, and a slack-free
//!   bound), plus numeric verifiers for the inequalities behind them.
//! * [`montecarlo`]: a replicated, deterministic simulation harness whose
//!   output does not depend on thread count.

// validation uses negated float comparisons on purpose: `!(a < b)` also
// rejects NaN, which the un-negated form would let through
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod arm;
pub mod error;
pub mod montecarlo;
pub mod policy;
pub mod rng;
pub mod stats;
pub mod theory;

pub use arm::{BanditInstance, UniformArm};
pub use error::Error;
pub use montecarlo::{RegretCurve, RegretPoint, Scenario};
pub use policy::{PolicyKind, PolicyRun, PolicySpec};
pub use stats::ArmStats;
