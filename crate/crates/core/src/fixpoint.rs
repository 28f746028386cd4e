//! Least and greatest fixpoints of node-local predicates on a finite graph,
//! and the inductive/coinductive predicates on games and profiles built
//! from them.
//!
//! A local rule decides membership of one node from its kind and the
//! current membership of its children. Rules must be monotone in the
//! current set; this is not checked.

use serde::Serialize;

use crate::graph::{AgentId, Choice, GameGraph, Graph, Node, NodeId, NodeLabel, ProfileGraph, UtilityAssignment};
use crate::utility::AffineUtility;

/// Membership of every node of one graph in a predicate.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct NodeSet(Vec<bool>);

impl NodeSet {
    pub fn empty(len: usize) -> Self {
        NodeSet(vec![false; len])
    }

    pub fn full(len: usize) -> Self {
        NodeSet(vec![true; len])
    }

    pub fn from_fn(len: usize, f: impl FnMut(NodeId) -> bool) -> Self {
        NodeSet((0..len).map(f).collect())
    }

    pub fn contains(&self, n: NodeId) -> bool {
        self.0[n]
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn count(&self) -> usize {
        self.0.iter().filter(|&&b| b).count()
    }

    pub fn members(&self) -> impl Iterator<Item = NodeId> + '_ {
        self.0.iter().enumerate().filter(|(_, &b)| b).map(|(i, _)| i)
    }

    pub fn is_subset(&self, other: &NodeSet) -> bool {
        self.0.iter().zip(&other.0).all(|(&a, &b)| !a || b)
    }

    pub fn intersect(&self, other: &NodeSet) -> NodeSet {
        NodeSet(self.0.iter().zip(&other.0).map(|(&a, &b)| a && b).collect())
    }

    /// Member node names, in node order.
    pub fn names<C: NodeLabel>(&self, g: &Graph<C>) -> Vec<String> {
        self.members().map(|n| g.name(n).to_string()).collect()
    }
}

/// A fixpoint together with the number of iterations that changed the set.
#[derive(Clone, Debug)]
pub struct Solution {
    pub set: NodeSet,
    pub rounds: usize,
}

fn iterate<C, R>(g: &Graph<C>, mut current: NodeSet, rule: R) -> Solution
where
    C: NodeLabel,
    R: Fn(&Graph<C>, NodeId, &NodeSet) -> bool,
{
    let mut rounds = 0;
    loop {
        let next = NodeSet::from_fn(g.len(), |n| rule(g, n, &current));
        if next == current {
            return Solution { set: current, rounds };
        }
        current = next;
        rounds += 1;
    }
}

/// Least fixpoint: Kleene iteration upward from the empty set.
pub fn lfp_counted<C, R>(g: &Graph<C>, rule: R) -> Solution
where
    C: NodeLabel,
    R: Fn(&Graph<C>, NodeId, &NodeSet) -> bool,
{
    iterate(g, NodeSet::empty(g.len()), rule)
}

/// Greatest fixpoint: iteration downward from the full set.
pub fn gfp_counted<C, R>(g: &Graph<C>, rule: R) -> Solution
where
    C: NodeLabel,
    R: Fn(&Graph<C>, NodeId, &NodeSet) -> bool,
{
    iterate(g, NodeSet::full(g.len()), rule)
}

pub fn lfp<C, R>(g: &Graph<C>, rule: R) -> NodeSet
where
    C: NodeLabel,
    R: Fn(&Graph<C>, NodeId, &NodeSet) -> bool,
{
    lfp_counted(g, rule).set
}

pub fn gfp<C, R>(g: &Graph<C>, rule: R) -> NodeSet
where
    C: NodeLabel,
    R: Fn(&Graph<C>, NodeId, &NodeSet) -> bool,
{
    gfp_counted(g, rule).set
}

/// Leaf, or the chosen child is in the set.
pub fn leads_to_leaf_rule(p: &ProfileGraph, n: NodeId, s: &NodeSet) -> bool {
    match p.node(n) {
        Node::Leaf(_) => true,
        Node::Internal { label, .. } => s.contains(p.node(n).edge(*label).unwrap().target),
    }
}

/// Nodes whose play reaches a leaf (inductive).
pub fn leads_to_leaf(p: &ProfileGraph) -> NodeSet {
    lfp(p, leads_to_leaf_rule)
}

/// Nodes from which every subprofile's play reaches a leaf (coinductive).
pub fn always_leads_to_leaf(p: &ProfileGraph) -> NodeSet {
    let ltl = leads_to_leaf(p);
    gfp(p, |p, n, s| match p.node(n) {
        Node::Leaf(_) => true,
        Node::Internal { left, right, .. } => ltl.contains(n) && s.contains(left.target) && s.contains(right.target),
    })
}

/// `□P`: `P` holds at the node and everywhere below it.
pub fn always(p: &ProfileGraph, pred: &NodeSet) -> NodeSet {
    gfp(p, |p, n, s| {
        pred.contains(n)
            && match p.node(n) {
                Node::Leaf(_) => true,
                Node::Internal { left, right, .. } => s.contains(left.target) && s.contains(right.target),
            }
    })
}

/// Nodes whose unfolding has an infinite branch. Leaves play the empty tree.
pub fn is_infinite<C: NodeLabel>(g: &Graph<C>) -> NodeSet {
    gfp(g, |g, n, s| match g.node(n) {
        Node::Leaf(_) => false,
        Node::Internal { left, right, .. } => s.contains(left.target) || s.contains(right.target),
    })
}

/// Utility of every agent at a node, as a function of the counter on
/// arrival there. Defined exactly on the nodes that lead to a leaf.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum UtilityResult {
    Defined(UtilityAssignment),
    Undefined,
}

impl UtilityResult {
    pub fn get(&self, agent: AgentId) -> Option<&AffineUtility> {
        match self {
            UtilityResult::Defined(u) => Some(u.get(agent)),
            UtilityResult::Undefined => None,
        }
    }

    pub fn is_defined(&self) -> bool {
        matches!(self, UtilityResult::Defined(_))
    }
}

impl Serialize for UtilityResult {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        match self {
            UtilityResult::Defined(u) => u.0.serialize(s),
            UtilityResult::Undefined => s.serialize_none(),
        }
    }
}

/// Follows the choices from `node`, accumulating edge deltas, and returns
/// the reached leaf's payoffs shifted by that total. A play that has not
/// reached a leaf after `|nodes|` moves has revisited a node and never will.
pub fn s2u(p: &ProfileGraph, node: NodeId) -> UtilityResult {
    let mut at = node;
    let mut delta = 0u64;
    for _ in 0..=p.len() {
        match p.node(at) {
            Node::Leaf(u) => return UtilityResult::Defined(u.shift(delta)),
            Node::Internal { label, .. } => {
                let e = p.node(at).edge(*label).unwrap();
                delta += e.delta;
                at = e.target;
            }
        }
    }
    UtilityResult::Undefined
}

pub fn s2u_all(p: &ProfileGraph) -> Vec<UtilityResult> {
    (0..p.len()).map(|n| s2u(p, n)).collect()
}

/// Utility at `node` of a move in direction `dir`: the child's utility
/// shifted by the edge delta.
pub fn child_utility(p: &ProfileGraph, utils: &[UtilityResult], node: NodeId, dir: Choice, agent: AgentId) -> Option<AffineUtility> {
    let e = p.node(node).edge(dir)?;
    utils[e.target].get(agent).map(|u| u.shift(e.delta))
}

/// Game-level convenience: which nodes of a game are infinite.
pub fn infinite_nodes(g: &GameGraph) -> Vec<String> {
    is_infinite(g).names(g)
}
