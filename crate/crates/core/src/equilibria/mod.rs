//! Equilibrium notions on rational strategy profiles.

mod backward;
mod convert;
mod nash;
mod sgpe;

use serde::Serialize;

pub use backward::{backward_induction, cut_game, nodes_from, BackwardError, DEFAULT_PROFILE_CAP};
pub use convert::{convertible, Convertibility};
pub use nash::{best_deviation, check_nash, profile_leq, Change, DeviationWitness, NashError, NashVerdict};
pub use sgpe::{check_sgpe, Comparison, FailureReason, NodeCheck, SgpeCertificate, SgpeFailure};

/// How utilities that depend on the step counter are compared.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum CounterMode {
    /// For every counter value.
    Uniform,
    /// For the family member whose root counter is `k`.
    Instance { k: u64 },
}

impl CounterMode {
    pub fn from_instance(k: Option<u64>) -> Self {
        k.map_or(CounterMode::Uniform, |k| CounterMode::Instance { k })
    }
}
