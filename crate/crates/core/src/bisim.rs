//! Bisimilarity of games and profiles by partition refinement.
//!
//! Two nodes are bisimilar when their unfoldings are identical trees. The
//! observable label of a leaf is its payoff coefficients; of an internal
//! node, its agent, its choice (profiles only) and the deltas of both edges.

use std::collections::HashMap;

use thiserror::Error;

use crate::graph::{Graph, Node, NodeId, NodeLabel, UtilityAssignment};
use crate::utility::Preference;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum BisimError {
    #[error("incomparable models: agents {left:?} vs {right:?}")]
    Agents { left: Vec<String>, right: Vec<String> },
    #[error("incomparable models: preference {left:?} vs {right:?}")]
    Preference { left: Preference, right: Preference },
}

#[derive(Clone, PartialEq, Eq, Hash)]
enum Label<'a, C> {
    Leaf(&'a UtilityAssignment),
    Internal { agent: usize, label: &'a C, deltas: (u64, u64) },
}

/// Coarsest stable partition of the disjoint union of `a` and `b`.
/// `blocks.0[i]` is the class of node `i` of `a`, `blocks.1[j]` of node `j` of `b`.
#[derive(Clone, Debug)]
pub struct Classes {
    pub left: Vec<usize>,
    pub right: Vec<usize>,
    pub rounds: usize,
}

impl Classes {
    pub fn related(&self, x: NodeId, y: NodeId) -> bool {
        self.left[x] == self.right[y]
    }
}

pub fn check_comparable<C, D>(a: &Graph<C>, b: &Graph<D>) -> Result<(), BisimError>
where
    C: NodeLabel,
    D: NodeLabel,
{
    if a.agents() != b.agents() {
        return Err(BisimError::Agents { left: a.agents().to_vec(), right: b.agents().to_vec() });
    }
    if a.preference() != b.preference() {
        return Err(BisimError::Preference { left: a.preference(), right: b.preference() });
    }
    Ok(())
}

pub fn classes<C: NodeLabel>(a: &Graph<C>, b: &Graph<C>) -> Result<Classes, BisimError> {
    check_comparable(a, b)?;
    let union: Vec<&Node<C>> = a.nodes().iter().chain(b.nodes().iter()).collect();
    let offset = a.len();
    let succ = |i: usize| -> Option<(usize, usize)> {
        let shift = if i < offset { 0 } else { offset };
        union[i].children().map(|(l, r)| (l.target + shift, r.target + shift))
    };

    let mut block = renumber(union.iter().map(|n| match n {
        Node::Leaf(u) => Label::Leaf(u),
        Node::Internal { agent, label, left, right } => {
            Label::Internal { agent: agent.0, label, deltas: (left.delta, right.delta) }
        }
    }));
    let mut count = distinct(&block);
    let mut rounds = 0;
    loop {
        rounds += 1;
        let next = renumber((0..union.len()).map(|i| (block[i], succ(i).map(|(l, r)| (block[l], block[r])))));
        let next_count = distinct(&next);
        block = next;
        if next_count == count {
            break;
        }
        count = next_count;
    }
    let right = block.split_off(offset);
    Ok(Classes { left: block, right, rounds })
}

fn renumber<K: Eq + std::hash::Hash>(keys: impl Iterator<Item = K>) -> Vec<usize> {
    let mut ids: HashMap<K, usize> = HashMap::new();
    keys.map(|k| {
        let n = ids.len();
        *ids.entry(k).or_insert(n)
    })
    .collect()
}

fn distinct(blocks: &[usize]) -> usize {
    blocks.iter().copied().max().map_or(0, |m| m + 1)
}

/// Whether the roots of `a` and `b` unfold to the same tree.
pub fn bisimilar<C: NodeLabel>(a: &Graph<C>, b: &Graph<C>) -> Result<bool, BisimError> {
    Ok(classes(a, b)?.related(a.root(), b.root()))
}
