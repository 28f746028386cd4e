//! Convertibility `p1 ⊢a⊣ p2`: the two profiles differ only in finitely many
//! choices of agent `a`, up to bisimilarity.
//!
//! Walk the product of the two graphs from the pair of roots, stopping at
//! bisimilar pairs. Every other visited pair must agree on everything but
//! `a`'s choice, and must not lie on a cycle: a cycle of non-bisimilar pairs
//! is an infinite branch of the unfolding that never reaches a bisimilar
//! pair, so no finite derivation exists.

use std::collections::HashMap;

use serde::Serialize;

use crate::bisim::classes;
use crate::graph::{AgentId, Node, NodeId, ProfileGraph};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Convertibility {
    pub holds: bool,
    pub reason: Option<String>,
}

impl Convertibility {
    fn yes() -> Self {
        Convertibility { holds: true, reason: None }
    }

    fn no(reason: String) -> Self {
        Convertibility { holds: false, reason: Some(reason) }
    }
}

pub fn convertible(p1: &ProfileGraph, p2: &ProfileGraph, agent: AgentId) -> Convertibility {
    let cls = match classes(p1, p2) {
        Ok(c) => c,
        Err(e) => return Convertibility::no(e.to_string()),
    };
    let pair_name = |(x, y): (NodeId, NodeId)| format!("({}, {})", p1.name(x), p2.name(y));

    // 1 = on the DFS stack, 2 = finished
    let mut state: HashMap<(NodeId, NodeId), u8> = HashMap::new();
    let mut stack: Vec<((NodeId, NodeId), usize)> = Vec::new();
    let start = (p1.root(), p2.root());
    if cls.related(start.0, start.1) {
        return Convertibility::yes();
    }
    state.insert(start, 1);
    stack.push((start, 0));

    while let Some(&mut (pair, ref mut next)) = stack.last_mut() {
        let (x, y) = pair;
        let succ = match (p1.node(x), p2.node(y)) {
            (Node::Leaf(_), Node::Leaf(_)) => {
                return Convertibility::no(format!("leaf payoffs differ at {}", pair_name(pair)));
            }
            (
                Node::Internal { agent: a1, label: c1, left: l1, right: r1 },
                Node::Internal { agent: a2, label: c2, left: l2, right: r2 },
            ) => {
                if a1 != a2 {
                    return Convertibility::no(format!("deciding agents differ at {}", pair_name(pair)));
                }
                if l1.delta != l2.delta || r1.delta != r2.delta {
                    return Convertibility::no(format!("edge deltas differ at {}", pair_name(pair)));
                }
                if c1 != c2 && *a1 != agent {
                    return Convertibility::no(format!(
                        "choice of {} differs at {}",
                        p1.agent_name(*a1),
                        pair_name(pair)
                    ));
                }
                [(l1.target, l2.target), (r1.target, r2.target)]
            }
            _ => return Convertibility::no(format!("leaf against internal node at {}", pair_name(pair))),
        };
        if *next == 2 {
            state.insert(pair, 2);
            stack.pop();
            continue;
        }
        let child = succ[*next];
        *next += 1;
        if cls.related(child.0, child.1) {
            continue;
        }
        match state.get(&child) {
            None => {
                state.insert(child, 1);
                stack.push((child, 0));
            }
            Some(1) => {
                return Convertibility::no(format!(
                    "profiles differ at infinitely many positions (cycle through {})",
                    pair_name(child)
                ));
            }
            Some(_) => {}
        }
    }
    Convertibility::yes()
}
