//! Backward induction on finite games, and cutting an infinite game down
//! to a finite one.

use thiserror::Error;

use crate::graph::{unfold_from, AgentId, Choice, GameGraph, Graph, Node, NodeId, ProfileGraph, TreeKind, UtilityAssignment};
use crate::graph::{Edge, GraphBuilder};
use crate::utility::Rational;

pub const DEFAULT_PROFILE_CAP: usize = 64;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum BackwardError {
    #[error("backward induction needs an acyclic game")]
    Cyclic,
    #[error("node {0} is shared by several parents; backward induction needs a tree")]
    NotATree(String),
    #[error("more than {0} backward induction profiles")]
    CapExceeded(usize),
    #[error("cannot cut at node {0}: its stop edge does not lead to a leaf")]
    NoStopLeaf(String),
    #[error("unknown node {0}")]
    UnknownNode(String),
}

#[derive(Clone)]
struct Solution {
    choices: Vec<(NodeId, Choice)>,
    payoff: Vec<Rational>,
}

/// Every pure subgame perfect profile of a finite game, ties enumerated.
///
/// At each node the deciding agent keeps every choice whose value is
/// `≤ut`-maximal given the solutions below. Leaves are evaluated at the
/// counter value `k` plus the deltas on the way down. Unreachable internal
/// nodes get choice `l`.
pub fn backward_induction(g: &GameGraph, k: u64, cap: usize) -> Result<Vec<ProfileGraph>, BackwardError> {
    if !g.is_acyclic() {
        return Err(BackwardError::Cyclic);
    }
    let mut parents = vec![0usize; g.len()];
    for n in g.reachable() {
        if let Some((l, r)) = g.node(n).children() {
            parents[l.target] += 1;
            parents[r.target] += 1;
        }
    }
    if let Some(n) = g.internal_ids().find(|&n| parents[n] > 1) {
        return Err(BackwardError::NotATree(g.name(n).to_string()));
    }
    let sols = solve(g, g.root(), k, cap)?;
    Ok(sols
        .into_iter()
        .map(|s| {
            let mut choice = vec![Choice::L; g.len()];
            for (n, c) in s.choices {
                choice[n] = c;
            }
            g.with_choices(|n| choice[n])
        })
        .collect())
}

fn solve(g: &GameGraph, node: NodeId, k: u64, cap: usize) -> Result<Vec<Solution>, BackwardError> {
    match g.node(node) {
        Node::Leaf(u) => Ok(vec![Solution { choices: vec![], payoff: u.0.iter().map(|f| f.eval(k)).collect() }]),
        Node::Internal { agent, left, right, .. } => {
            let ls = solve(g, left.target, k + left.delta, cap)?;
            let rs = solve(g, right.target, k + right.delta, cap)?;
            let pref = g.preference();
            let AgentId(a) = *agent;
            let mut out = Vec::new();
            for l in &ls {
                for r in &rs {
                    if pref.leq(&r.payoff[a], &l.payoff[a]) {
                        out.push(combine(node, Choice::L, l, r, &l.payoff));
                    }
                    if pref.leq(&l.payoff[a], &r.payoff[a]) {
                        out.push(combine(node, Choice::R, l, r, &r.payoff));
                    }
                    if out.len() > cap {
                        return Err(BackwardError::CapExceeded(cap));
                    }
                }
            }
            Ok(out)
        }
    }
}

fn combine(node: NodeId, c: Choice, l: &Solution, r: &Solution, payoff: &[Rational]) -> Solution {
    let mut choices = Vec::with_capacity(l.choices.len() + r.choices.len() + 1);
    choices.push((node, c));
    choices.extend_from_slice(&l.choices);
    choices.extend_from_slice(&r.choices);
    Solution { choices, payoff: payoff.to_vec() }
}

/// The finite game obtained by unfolding `g` from `start` for `depth`
/// levels and replacing each frontier node by the leaf its stop (`r`) edge
/// leads to. Leaf payoffs absorb the counter offset of their position, so
/// the result is a tree with zero deltas. Nodes are named
/// `<source>_<path>` where path is the choice string from `start`.
pub fn cut_game(g: &GameGraph, start: &str, depth: usize) -> Result<GameGraph, BackwardError> {
    let start_id = g.id_of(start).ok_or_else(|| BackwardError::UnknownNode(start.to_string()))?;
    let tree = unfold_from(g, start_id, depth);
    let mut b = GraphBuilder::<()>::new(g.preference());
    for a in g.agents() {
        b = b.agent(a);
    }
    let mut names = vec![String::new(); tree.nodes.len()];
    // preorder: parents come before children
    let mut paths = vec![String::new(); tree.nodes.len()];
    for (i, t) in tree.nodes.iter().enumerate() {
        names[i] = format!("{}_{}", g.name(t.source), paths[i]);
        if let TreeKind::Internal { left, right, .. } = t.kind {
            paths[left] = format!("{}l", paths[i]);
            paths[right] = format!("{}r", paths[i]);
        }
    }
    let pays = |u: &UtilityAssignment, off: u64| -> Vec<(String, crate::utility::AffineUtility)> {
        g.agents().iter().cloned().zip(u.shift(off).0).collect()
    };
    for (i, t) in tree.nodes.iter().enumerate() {
        b = match &t.kind {
            TreeKind::Leaf(u) => b.leaf(&names[i], pays(u, t.offset)),
            TreeKind::Internal { agent, left, right, .. } => {
                b.node(&names[i], g.agent_name(*agent), (), (&names[*left], 0), (&names[*right], 0))
            }
            TreeKind::Cut { .. } => {
                let Some(Edge { target, delta }) = g.node(t.source).edge(Choice::R) else { unreachable!() };
                let Node::Leaf(u) = g.node(target) else {
                    return Err(BackwardError::NoStopLeaf(g.name(t.source).to_string()));
                };
                b.leaf(&names[i], pays(u, t.offset + delta))
            }
        };
    }
    Ok(b.root(&names[0]).build().expect("cut tree is well formed"))
}

/// Internal node ids of a cut game whose source node in the original game
/// is `source`.
pub fn nodes_from<C: crate::graph::NodeLabel>(g: &Graph<C>, source: &str) -> Vec<NodeId> {
    let prefix = format!("{source}_");
    g.internal_ids().filter(|&n| g.name(n).starts_with(&prefix)).collect()
}
