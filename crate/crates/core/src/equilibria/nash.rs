//! Nash equilibrium refutation by bounded best-deviation search, and the
//! per-agent order on profiles that lead to a leaf.

use serde::Serialize;
use thiserror::Error;

use super::{check_sgpe, CounterMode};
use crate::fixpoint::{s2u, s2u_all, UtilityResult};
use crate::graph::{unfold, AgentId, Choice, Node, NodeId, ProfileGraph, TreeKind};
use crate::utility::{affine_leq_forall, first_violation, fmt_rational, AffineUtility, Preference, Rational};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum NashError {
    #[error("deviation depth must be at least 1")]
    ZeroDepth,
    #[error("profile `{0}` root does not lead to a leaf")]
    NotLeadsToLeaf(&'static str),
    #[error("profiles have different preferences")]
    Incomparable,
}

/// One changed choice of the deviating agent.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Change {
    /// Choices from the root to the changed node; empty for the root.
    pub position: String,
    pub node: String,
    pub from: Choice,
    pub to: Choice,
}

/// A finite deviation that is strictly better for `agent` at `k_min`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DeviationWitness {
    pub agent: String,
    pub changes: Vec<Change>,
    pub deviation_utility: AffineUtility,
    pub original_utility: AffineUtility,
    pub k_min: u64,
    #[serde(serialize_with = "ser_rational")]
    pub deviation_value: Rational,
    #[serde(serialize_with = "ser_rational")]
    pub original_value: Rational,
}

fn ser_rational<S: serde::Serializer>(q: &Rational, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&fmt_rational(q))
}

impl DeviationWitness {
    /// Plays the deviation on `unfold(p, depth)` at root counter `k` and
    /// returns the deviating agent's utility, evaluated from scratch.
    pub fn replay(&self, p: &ProfileGraph, depth: usize, k: u64) -> Option<Rational> {
        let agent = p.agent_id(&self.agent)?;
        let tree = unfold(p, depth);
        let mut at = 0;
        let mut position = String::new();
        loop {
            let t = &tree.nodes[at];
            match &t.kind {
                TreeKind::Leaf(u) => return Some(u.get(agent).eval(k + t.offset)),
                TreeKind::Cut { .. } => return s2u(p, t.source).get(agent).map(|u| u.eval(k + t.offset)),
                TreeKind::Internal { label, left, right, .. } => {
                    let dir = self.changes.iter().find(|c| c.position == position).map_or(*label, |c| c.to);
                    position.push(dir.letter());
                    at = match dir {
                        Choice::L => *left,
                        Choice::R => *right,
                    };
                }
            }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum NashVerdict {
    Refuted { witness: DeviationWitness },
    NoCounterexampleUpToDepth { depth: usize },
    ImpliedBySgpe,
}

impl NashVerdict {
    pub fn is_refuted(&self) -> bool {
        matches!(self, NashVerdict::Refuted { .. })
    }
}

#[derive(Clone, Debug)]
struct Candidate {
    utility: AffineUtility,
    changes: Vec<Change>,
}

struct Search<'a> {
    p: &'a ProfileGraph,
    agent: AgentId,
    utils: Vec<UtilityResult>,
    mode: CounterMode,
}

impl Search<'_> {
    /// Best utilities reachable by the agent from `node` reached with
    /// accumulated delta `offset`, as functions of the root counter.
    fn explore(&self, node: NodeId, offset: u64, left: usize, path: &mut String) -> Vec<Candidate> {
        match self.p.node(node) {
            Node::Leaf(u) => vec![Candidate { utility: u.get(self.agent).shift(offset), changes: vec![] }],
            Node::Internal { .. } if left == 0 => self.utils[node]
                .get(self.agent)
                .map(|u| Candidate { utility: u.shift(offset), changes: vec![] })
                .into_iter()
                .collect(),
            Node::Internal { agent, label, .. } => {
                let step = |dir: Choice, path: &mut String| {
                    let e = self.p.node(node).edge(dir).unwrap();
                    path.push(dir.letter());
                    let out = self.explore(e.target, offset + e.delta, left - 1, path);
                    path.pop();
                    out
                };
                if *agent != self.agent {
                    return step(*label, path);
                }
                let mut all = step(*label, path);
                for mut c in step(label.flip(), path) {
                    c.changes.insert(
                        0,
                        Change { position: path.clone(), node: self.p.name(node).to_string(), from: *label, to: label.flip() },
                    );
                    all.push(c);
                }
                self.prune(all)
            }
        }
    }

    fn prune(&self, mut cands: Vec<Candidate>) -> Vec<Candidate> {
        let pref = self.p.preference();
        cands.sort_by_key(|c| c.changes.len());
        match self.mode {
            CounterMode::Instance { k } => {
                let mut best: Option<Candidate> = None;
                for c in cands {
                    if best.as_ref().is_none_or(|b| pref.better(&c.utility.eval(k), &b.utility.eval(k))) {
                        best = Some(c);
                    }
                }
                best.into_iter().collect()
            }
            CounterMode::Uniform => {
                let mut kept: Vec<Candidate> = Vec::new();
                for c in cands {
                    if kept.iter().any(|k| affine_leq_forall(&c.utility, &k.utility, pref, 0)) {
                        continue;
                    }
                    kept.retain(|k| !affine_leq_forall(&k.utility, &c.utility, pref, 0));
                    kept.push(c);
                }
                kept
            }
        }
    }
}

/// Searches deviations of `agent` that change finitely many of its choices
/// within the first `depth` levels of the unfolding. Returns a witness iff
/// one is strictly better than the profile's own utility for some counter
/// value (the smallest such value is reported).
pub fn best_deviation(
    p: &ProfileGraph,
    agent: AgentId,
    depth: usize,
    mode: CounterMode,
) -> Result<Option<DeviationWitness>, NashError> {
    if depth == 0 {
        return Err(NashError::ZeroDepth);
    }
    let utils = s2u_all(p);
    let Some(original) = utils[p.root()].get(agent).cloned() else {
        return Ok(None);
    };
    let search = Search { p, agent, utils, mode };
    let pref = p.preference();
    let cands = search.explore(p.root(), 0, depth, &mut String::new());
    let best = cands
        .into_iter()
        .filter_map(|c| {
            let k = match mode {
                CounterMode::Uniform => first_violation(&c.utility, &original, pref, 0)?,
                CounterMode::Instance { k } => {
                    pref.better(&c.utility.eval(k), &original.eval(k)).then_some(k)?
                }
            };
            Some((k, c))
        })
        .min_by_key(|(k, c)| (*k, c.changes.len()));
    Ok(best.map(|(k, c)| DeviationWitness {
        agent: p.agent_name(agent).to_string(),
        deviation_value: c.utility.eval(k),
        original_value: original.eval(k),
        changes: c.changes,
        deviation_utility: c.utility,
        original_utility: original,
        k_min: k,
    }))
}

/// Nash check: a verified SGPE settles it; otherwise every agent's best
/// deviation is searched up to `depth`.
pub fn check_nash(p: &ProfileGraph, depth: usize, mode: CounterMode) -> Result<NashVerdict, NashError> {
    if depth == 0 {
        return Err(NashError::ZeroDepth);
    }
    if check_sgpe(p, mode).verdict {
        return Ok(NashVerdict::ImpliedBySgpe);
    }
    for a in 0..p.agents().len() {
        if let Some(witness) = best_deviation(p, AgentId(a), depth, mode)? {
            return Ok(NashVerdict::Refuted { witness });
        }
    }
    Ok(NashVerdict::NoCounterexampleUpToDepth { depth })
}

/// `lhs ≤_agent rhs`: the agent's utility in `lhs` is `≤ut` that in `rhs`.
pub fn profile_leq(
    lhs: &ProfileGraph,
    rhs: &ProfileGraph,
    agent: AgentId,
    mode: CounterMode,
) -> Result<bool, NashError> {
    if lhs.preference() != rhs.preference() {
        return Err(NashError::Incomparable);
    }
    let u1 = s2u(lhs, lhs.root()).get(agent).cloned().ok_or(NashError::NotLeadsToLeaf("left"))?;
    let u2 = s2u(rhs, rhs.root()).get(agent).cloned().ok_or(NashError::NotLeadsToLeaf("right"))?;
    let pref: Preference = lhs.preference();
    Ok(match mode {
        CounterMode::Uniform => affine_leq_forall(&u1, &u2, pref, 0),
        CounterMode::Instance { k } => pref.leq(&u1.eval(k), &u2.eval(k)),
    })
}
