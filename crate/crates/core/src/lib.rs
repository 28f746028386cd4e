//! Analysis of rational (finitely presented, possibly infinite) binary
//! extensive games: coinductive predicates as fixpoints over the finite
//! graph, subgame perfect and Nash equilibrium checking, and escalation.
//!
//! ```
//! use regal::builtin;
//! use regal::equilibria::{check_sgpe, CounterMode};
//! use regal::escalation::{find_escalation, verify_witness, DEFAULT_ENUM_CAP};
//!
//! let m = builtin::dollar(regal::utility::rat(2)).unwrap();
//! let cert = check_sgpe(m.profile("dolAsBc").unwrap(), CounterMode::Uniform);
//! assert!(cert.verdict);
//!
//! let g = m.game("dollar").unwrap();
//! let w = find_escalation(g, DEFAULT_ENUM_CAP).unwrap().unwrap();
//! verify_witness(g, &w).unwrap();
//! ```

pub mod bisim;
pub mod builtin;
#[cfg(feature = "cli")]
pub mod cli;
pub mod dsl;
pub mod equilibria;
pub mod escalation;
pub mod fixpoint;
pub mod graph;
pub mod model;
pub mod utility;

pub use graph::{Choice, GameGraph, Graph, ProfileGraph};
pub use model::Model;
pub use utility::{AffineUtility, Preference, Rational};
