//! Subgame perfect equilibrium as a greatest fixpoint.
//!
//! A node is in the SGPE set when it is a leaf, or when it always leads to
//! a leaf, its deciding agent's other-side utility is `≤ut` its chosen-side
//! utility, and both children are in the set.

use serde::Serialize;

use super::CounterMode;
use crate::fixpoint::{always_leads_to_leaf, child_utility, gfp, s2u_all};
use crate::graph::{Arrivals, Choice, Node, NodeId, ProfileGraph};
use crate::utility::{first_violation, AffineUtility};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Comparison {
    Holds,
    FailsAt { k: u64 },
    /// A child's utility does not exist (the node is not ALtL).
    Undefined,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct NodeCheck {
    pub node: String,
    pub agent: String,
    pub chosen: Choice,
    pub chosen_utility: Option<AffineUtility>,
    pub other_utility: Option<AffineUtility>,
    /// Smallest arrival counter the comparison was required for.
    pub checked_from: u64,
    /// Set when the node is reached at finitely many counter values (in
    /// instance mode): the comparison was required at exactly these.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub checked_at: Option<Vec<u64>>,
    pub altl: bool,
    pub comparison: Comparison,
}

impl NodeCheck {
    pub fn passes(&self) -> bool {
        self.altl && self.comparison == Comparison::Holds
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum FailureReason {
    #[serde(rename = "not-ALtL")]
    NotAlwaysLeadsToLeaf,
    #[serde(rename = "comparison-fails-at-k")]
    ComparisonFailsAt,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SgpeFailure {
    pub node: String,
    pub reason: FailureReason,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub k: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SgpeCertificate {
    pub verdict: bool,
    pub mode: CounterMode,
    /// One record per reachable internal node, breadth-first from the root.
    pub nodes: Vec<NodeCheck>,
    pub failure: Option<SgpeFailure>,
}

impl SgpeCertificate {
    pub fn record(&self, node: &str) -> Option<&NodeCheck> {
        self.nodes.iter().find(|c| c.node == node)
    }
}

pub fn check_sgpe(p: &ProfileGraph, mode: CounterMode) -> SgpeCertificate {
    let altl = always_leads_to_leaf(p);
    let utils = s2u_all(p);
    let arrivals = p.arrival_offsets();

    let local: Vec<Option<NodeCheck>> = (0..p.len())
        .map(|n| {
            let Node::Internal { agent, label, .. } = p.node(n) else { return None };
            // Counter values the comparison must hold at: all from `from` on,
            // or exactly the listed ones.
            let (from, exactly) = match (mode, &arrivals[n]) {
                (CounterMode::Uniform, _) | (CounterMode::Instance { .. }, Arrivals::Unreachable) => (0, None),
                (CounterMode::Instance { k }, Arrivals::From(m)) => (k + m, None),
                (CounterMode::Instance { k }, Arrivals::Exactly(offs)) => {
                    (k + offs[0], Some(offs.iter().map(|o| k + o).collect::<Vec<u64>>()))
                }
            };
            let chosen_utility = child_utility(p, &utils, n, *label, *agent);
            let other_utility = child_utility(p, &utils, n, label.flip(), *agent);
            let pref = p.preference();
            let comparison = match (&chosen_utility, &other_utility) {
                (Some(c), Some(o)) => {
                    let violation = match &exactly {
                        None => first_violation(o, c, pref, from),
                        Some(ks) => ks.iter().copied().find(|&k| pref.better(&o.eval(k), &c.eval(k))),
                    };
                    match violation {
                        None => Comparison::Holds,
                        Some(k) => Comparison::FailsAt { k },
                    }
                }
                _ => Comparison::Undefined,
            };
            Some(NodeCheck {
                node: p.name(n).to_string(),
                agent: p.agent_name(*agent).to_string(),
                chosen: *label,
                chosen_utility,
                other_utility,
                checked_from: from,
                checked_at: exactly,
                altl: altl.contains(n),
                comparison,
            })
        })
        .collect();

    let passes = |n: NodeId| local[n].as_ref().is_none_or(NodeCheck::passes);
    let sgpe = gfp(p, |p, n, s| {
        passes(n)
            && match p.node(n) {
                Node::Leaf(_) => true,
                Node::Internal { left, right, .. } => s.contains(left.target) && s.contains(right.target),
            }
    });

    let order = p.reachable();
    let failure = order.iter().find(|&&n| !passes(n)).map(|&n| {
        let c = local[n].as_ref().unwrap();
        match (c.altl, &c.comparison) {
            (false, _) => SgpeFailure { node: c.node.clone(), reason: FailureReason::NotAlwaysLeadsToLeaf, k: None },
            (true, Comparison::FailsAt { k }) => {
                SgpeFailure { node: c.node.clone(), reason: FailureReason::ComparisonFailsAt, k: Some(*k) }
            }
            (true, _) => unreachable!("ALtL nodes have defined child utilities"),
        }
    });
    let verdict = sgpe.contains(p.root());
    debug_assert_eq!(verdict, failure.is_none());
    SgpeCertificate {
        verdict,
        mode,
        nodes: order.into_iter().filter_map(|n| local[n].clone()).collect(),
        failure,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::builtin;
    use crate::utility::rat;

    const U: CounterMode = CounterMode::Uniform;

    #[test]
    fn zero_one_equilibria() {
        let m = builtin::zero_one();
        assert!(check_sgpe(m.profile("z1AcBs").unwrap(), U).verdict);
        assert!(check_sgpe(m.profile("z1AsBc").unwrap(), U).verdict);
        let cert = check_sgpe(m.profile("z1_all_continue").unwrap(), U);
        assert!(!cert.verdict);
        let f = cert.failure.unwrap();
        assert_eq!(f.node, "A");
        assert_eq!(f.reason, FailureReason::NotAlwaysLeadsToLeaf);
    }

    #[test]
    fn dollar_equilibria() {
        let m = builtin::dollar(rat(2)).unwrap();
        let cert = check_sgpe(m.profile("dolAsBc").unwrap(), U);
        assert!(cert.verdict);
        let bob = cert.record("B").unwrap();
        assert_eq!(bob.chosen, Choice::L);
        assert_eq!(bob.chosen_utility.as_ref().unwrap().to_string(), "k + 1");
        assert_eq!(bob.other_utility.as_ref().unwrap().to_string(), "k + 2");
        assert!(check_sgpe(m.profile("dolAcBs").unwrap(), U).verdict);
        let bad = check_sgpe(m.profile("dolAsBs").unwrap(), U);
        assert!(!bad.verdict);
        assert_eq!(bad.failure.unwrap().reason, FailureReason::ComparisonFailsAt);
    }

    #[test]
    fn infinipede_clamped_comparison() {
        let m = builtin::infinipede();
        let cert = check_sgpe(m.profile("cent_agu").unwrap(), U);
        assert!(cert.verdict);
        let alice = cert.record("A").unwrap();
        assert_eq!(alice.other_utility.as_ref().unwrap().to_string(), "nat(2*k - 1)");
        assert_eq!(alice.other_utility.as_ref().unwrap().eval(0), rat(0));
        assert_eq!(alice.chosen_utility.as_ref().unwrap().eval(0), rat(0));
    }

    #[test]
    fn instance_mode_on_small_value() {
        // With v = 1/2 Bob prefers to stop at cost v + k over continuing at k + 1.
        let m = builtin::dollar(crate::utility::rat_frac(1, 2)).unwrap();
        let p = m.profile("dolAsBc").unwrap();
        assert!(!check_sgpe(p, U).verdict);
        assert!(!check_sgpe(p, CounterMode::Instance { k: 3 }).verdict);
    }

    #[test]
    fn instance_mode_checks_only_arrival_counters() {
        use crate::graph::GraphBuilder;
        use crate::utility::{AffineUtility, Preference};
        // Bob's node is reached at counter 1 only; there stopping (2 - k = 1)
        // ties with continuing (1), though continuing loses for k = 0.
        let p = GraphBuilder::new(Preference::Max)
            .node("A", "Alice", Choice::L, ("B", 1), ("LA", 0))
            .node("B", "Bob", Choice::L, ("LC", 0), ("LB", 0))
            .leaf("LA", [("Alice", AffineUtility::constant(rat(0))), ("Bob", AffineUtility::constant(rat(0)))])
            .leaf("LB", [("Alice", AffineUtility::constant(rat(0))), ("Bob", AffineUtility::new(rat(-1), rat(2)))])
            .leaf("LC", [("Alice", AffineUtility::constant(rat(1))), ("Bob", AffineUtility::constant(rat(1)))])
            .root("A")
            .build()
            .unwrap();
        let cert = check_sgpe(&p, CounterMode::Instance { k: 0 });
        assert!(cert.verdict);
        assert_eq!(cert.record("B").unwrap().checked_at, Some(vec![1]));
        assert!(!check_sgpe(&p, U).verdict);
    }

    #[test]
    fn certificate_covers_reachable_internal_nodes() {
        let m = builtin::zero_one();
        let cert = check_sgpe(m.profile("z1AcBs").unwrap(), U);
        let names: Vec<_> = cert.nodes.iter().map(|c| c.node.as_str()).collect();
        assert_eq!(names, vec!["A", "B"]);
        assert!(cert.nodes.iter().all(NodeCheck::passes));
    }
}
