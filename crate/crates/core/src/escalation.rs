//! Escalation: an infinite path through the game along which, at every
//! step, continuing is the root choice of some subgame perfect equilibrium
//! of the current subgame.
//!
//! Witness profiles are searched among rational profiles over the game's
//! own graph. A returned witness is sound; `None` only means no escalation
//! exists among those profiles.

use std::collections::HashMap;

use serde::Serialize;
use thiserror::Error;

use crate::bisim::bisimilar;
use crate::equilibria::{check_sgpe, CounterMode};
use crate::graph::{s2g, Choice, GameGraph, Node, NodeId, ProfileGraph};

pub const DEFAULT_ENUM_CAP: usize = 20;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum EscalationError {
    #[error("subgame at {node} has {internal} internal nodes, over the enumeration cap of {cap}")]
    CapExceeded { node: String, internal: usize, cap: usize },
    #[error("node {0} is a leaf and has no choice")]
    Leaf(String),
}

/// One step of an escalation: at `node`, `agent` moves `direction` as the
/// root choice of the subgame perfect `profile`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Step {
    pub node: String,
    pub agent: String,
    pub direction: Choice,
    /// Choices of the witness profile, by node name, rooted at `node`.
    pub profile: Vec<(String, Choice)>,
    #[serde(skip)]
    pub graph: ProfileGraph,
}

/// A lasso: the stem is walked once, then the cycle forever.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EscalationWitness {
    pub stem: Vec<Step>,
    pub cycle: Vec<Step>,
}

impl EscalationWitness {
    pub fn steps(&self) -> impl Iterator<Item = &Step> {
        self.stem.iter().chain(self.cycle.iter())
    }
}

/// Per-(node, direction) search for subgame perfect profiles, cached.
pub struct EscalationSearch<'a> {
    game: &'a GameGraph,
    cap: usize,
    cache: HashMap<(NodeId, Choice), Option<ProfileGraph>>,
}

impl<'a> EscalationSearch<'a> {
    pub fn new(game: &'a GameGraph, cap: usize) -> Self {
        EscalationSearch { game, cap, cache: HashMap::new() }
    }

    /// First profile of the subgame at `node`, in lexicographic order of
    /// choices over its internal nodes (sorted by name, `l` before `r`),
    /// that chooses `dir` at `node` and is subgame perfect.
    pub fn sgpe_with_choice(&mut self, node: NodeId, dir: Choice) -> Result<Option<ProfileGraph>, EscalationError> {
        if let Some(hit) = self.cache.get(&(node, dir)) {
            return Ok(hit.clone());
        }
        if self.game.node(node).is_leaf() {
            return Err(EscalationError::Leaf(self.game.name(node).to_string()));
        }
        let sub = self.game.rooted_at(node);
        let internal: Vec<NodeId> = sub.internal_ids().collect();
        if internal.len() > self.cap {
            return Err(EscalationError::CapExceeded {
                node: self.game.name(node).to_string(),
                internal: internal.len(),
                cap: self.cap,
            });
        }
        let free: Vec<NodeId> = internal.iter().copied().filter(|&n| n != sub.root()).collect();
        let mut found = None;
        for mask in 0u64..(1u64 << free.len()) {
            let mut choice = vec![Choice::L; sub.len()];
            choice[sub.root()] = dir;
            for (j, &n) in free.iter().enumerate() {
                if mask >> (free.len() - 1 - j) & 1 == 1 {
                    choice[n] = Choice::R;
                }
            }
            let p = sub.with_choices(|n| choice[n]);
            if check_sgpe(&p, CounterMode::Uniform).verdict {
                found = Some(p);
                break;
            }
        }
        self.cache.insert((node, dir), found.clone());
        Ok(found)
    }

    /// Continuation edges out of `node`: directions whose child is internal
    /// and which start some subgame perfect profile, `l` first.
    fn continuations(&mut self, node: NodeId) -> Result<Vec<(Choice, NodeId)>, EscalationError> {
        let mut out = Vec::new();
        for dir in [Choice::L, Choice::R] {
            let target = self.game.node(node).edge(dir).unwrap().target;
            if self.game.node(target).is_leaf() {
                continue;
            }
            if self.sgpe_with_choice(node, dir)?.is_some() {
                out.push((dir, target));
            }
        }
        Ok(out)
    }

    fn step(&mut self, node: NodeId, dir: Choice) -> Result<Step, EscalationError> {
        let graph = self.sgpe_with_choice(node, dir)?.expect("continuation edge has a profile");
        let Node::Internal { agent, .. } = self.game.node(node) else { unreachable!() };
        Ok(Step {
            node: self.game.name(node).to_string(),
            agent: self.game.agent_name(*agent).to_string(),
            direction: dir,
            profile: graph.internal_ids().map(|n| (graph.name(n).to_string(), graph.choice(n).unwrap())).collect(),
            graph,
        })
    }

    /// Depth-first lasso search in the continuation graph from the root.
    pub fn find(&mut self) -> Result<Option<EscalationWitness>, EscalationError> {
        let root = self.game.root();
        if self.game.node(root).is_leaf() {
            return Ok(None);
        }
        // 1 = on stack, 2 = exhausted
        let mut state = vec![0u8; self.game.len()];
        let mut stack: Vec<(NodeId, Vec<(Choice, NodeId)>, usize)> = Vec::new();
        state[root] = 1;
        let edges = self.continuations(root)?;
        stack.push((root, edges, 0));
        while let Some(top) = stack.last_mut() {
            let (node, ref edges, ref mut next) = *top;
            if *next == edges.len() {
                state[node] = 2;
                stack.pop();
                continue;
            }
            let (_, target) = edges[*next];
            *next += 1;
            match state[target] {
                0 => {
                    state[target] = 1;
                    let edges = self.continuations(target)?;
                    stack.push((target, edges, 0));
                }
                1 => {
                    let pos = stack.iter().position(|(n, _, _)| *n == target).unwrap();
                    let path: Vec<(NodeId, Choice)> = stack.iter().map(|(n, e, i)| (*n, e[*i - 1].0)).collect();
                    let mut steps = Vec::with_capacity(path.len());
                    for (n, d) in path {
                        steps.push(self.step(n, d)?);
                    }
                    let cycle = steps.split_off(pos);
                    return Ok(Some(EscalationWitness { stem: steps, cycle }));
                }
                _ => {}
            }
        }
        Ok(None)
    }
}

pub fn find_escalation(g: &GameGraph, cap: usize) -> Result<Option<EscalationWitness>, EscalationError> {
    EscalationSearch::new(g, cap).find()
}

pub fn sgpe_with_choice(g: &GameGraph, node: NodeId, dir: Choice, cap: usize) -> Result<Option<ProfileGraph>, EscalationError> {
    EscalationSearch::new(g, cap).sgpe_with_choice(node, dir)
}

/// Re-checks a witness against the game from scratch: the lasso is a path
/// of the game starting at the root, every step's profile is subgame
/// perfect, chooses the step's direction at its root, and erases to a game
/// bisimilar to the subgame at that step.
pub fn verify_witness(g: &GameGraph, w: &EscalationWitness) -> Result<(), String> {
    if w.cycle.is_empty() {
        return Err("empty cycle".into());
    }
    let steps: Vec<&Step> = w.steps().collect();
    if steps[0].node != g.name(g.root()) {
        return Err(format!("witness starts at {} instead of the root", steps[0].node));
    }
    for (i, s) in steps.iter().enumerate() {
        let n = g.id_of(&s.node).ok_or_else(|| format!("unknown node {}", s.node))?;
        let Node::Internal { agent, .. } = g.node(n) else {
            return Err(format!("step {i} at leaf {}", s.node));
        };
        if g.agent_name(*agent) != s.agent {
            return Err(format!("step {i}: {} does not decide at {}", s.agent, s.node));
        }
        let p = &s.graph;
        if p.name(p.root()) != s.node || p.choice(p.root()) != Some(s.direction) {
            return Err(format!("step {i}: profile root does not choose {} at {}", s.direction, s.node));
        }
        if !check_sgpe(p, CounterMode::Uniform).verdict {
            return Err(format!("step {i}: profile is not subgame perfect"));
        }
        let subgame = g.rooted_at(n);
        if !bisimilar(&s2g(p), &subgame).map_err(|e| e.to_string())? {
            return Err(format!("step {i}: profile is not over the subgame at {}", s.node));
        }
        let next = if i + 1 < steps.len() { &steps[i + 1].node } else { &w.cycle[0].node };
        let target = g.node(n).edge(s.direction).unwrap().target;
        if g.name(target) != next {
            return Err(format!("step {i}: {} from {} does not lead to {next}", s.direction, s.node));
        }
    }
    Ok(())
}
