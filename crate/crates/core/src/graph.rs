//! Finite rooted graphs whose unfoldings are the (possibly infinite) binary
//! games and strategy profiles.
//!
//! A [`Graph<C>`] with `C = ()` is a game; with `C = Choice` it is a
//! strategy profile. Every internal node has exactly two out-edges, `l` and
//! `r`. Edges may add a natural `delta` to a global step counter that starts
//! at `0` at the root; leaf payoffs are affine in the counter value on
//! arrival.

use std::collections::{BTreeMap, BTreeSet, HashMap, VecDeque};
use std::fmt;

use serde::Serialize;

use crate::utility::{AffineUtility, Preference};

pub type NodeId = usize;

/// Dense agent index into [`Graph::agents`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct AgentId(pub usize);

/// `L` is the left edge (continue in every built-in), `R` the right edge (stop).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Choice {
    #[serde(rename = "l")]
    L,
    #[serde(rename = "r")]
    R,
}

impl Choice {
    pub fn flip(self) -> Choice {
        match self {
            Choice::L => Choice::R,
            Choice::R => Choice::L,
        }
    }

    pub fn letter(self) -> char {
        match self {
            Choice::L => 'l',
            Choice::R => 'r',
        }
    }
}

impl fmt::Display for Choice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.letter())
    }
}

/// Label carried by internal nodes beyond the deciding agent.
pub trait NodeLabel: Clone + Eq + std::hash::Hash + fmt::Debug {
    fn chosen(&self) -> Option<Choice>;
}

impl NodeLabel for () {
    fn chosen(&self) -> Option<Choice> {
        None
    }
}

impl NodeLabel for Choice {
    fn chosen(&self) -> Option<Choice> {
        Some(*self)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Edge {
    pub target: NodeId,
    pub delta: u64,
}

impl Edge {
    pub fn to(target: NodeId) -> Self {
        Edge { target, delta: 0 }
    }
}

/// Per-agent payoffs of a leaf, indexed by [`AgentId`].
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct UtilityAssignment(pub Vec<AffineUtility>);

impl UtilityAssignment {
    pub fn get(&self, agent: AgentId) -> &AffineUtility {
        &self.0[agent.0]
    }

    pub fn shift(&self, delta: u64) -> Self {
        UtilityAssignment(self.0.iter().map(|u| u.shift(delta)).collect())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Node<C> {
    Leaf(UtilityAssignment),
    Internal { agent: AgentId, label: C, left: Edge, right: Edge },
}

impl<C> Node<C> {
    pub fn is_leaf(&self) -> bool {
        matches!(self, Node::Leaf(_))
    }

    pub fn edge(&self, dir: Choice) -> Option<Edge> {
        match self {
            Node::Leaf(_) => None,
            Node::Internal { left, right, .. } => Some(match dir {
                Choice::L => *left,
                Choice::R => *right,
            }),
        }
    }

    pub fn children(&self) -> Option<(Edge, Edge)> {
        match self {
            Node::Leaf(_) => None,
            Node::Internal { left, right, .. } => Some((*left, *right)),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph<C> {
    agents: Vec<String>,
    preference: Preference,
    names: Vec<String>,
    nodes: Vec<Node<C>>,
    root: NodeId,
}

pub type GameGraph = Graph<()>;
/// Result of [`Graph::arrival_offsets`] for one node.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Arrivals {
    Unreachable,
    /// Finitely many offsets, ascending.
    Exactly(Vec<u64>),
    /// Infinitely many offsets, the smallest being this one.
    From(u64),
}

pub type ProfileGraph = Graph<Choice>;

impl<C: NodeLabel> Graph<C> {
    /// Assembles a graph from already-resolved parts without checking it.
    /// Use [`validate`] on the result, or [`GraphBuilder`] to build by name.
    pub fn from_parts(
        agents: Vec<String>,
        preference: Preference,
        names: Vec<String>,
        nodes: Vec<Node<C>>,
        root: NodeId,
    ) -> Self {
        Graph { agents, preference, names, nodes, root }
    }

    pub fn agents(&self) -> &[String] {
        &self.agents
    }

    pub fn agent_name(&self, agent: AgentId) -> &str {
        &self.agents[agent.0]
    }

    pub fn agent_id(&self, name: &str) -> Option<AgentId> {
        self.agents.iter().position(|a| a == name).map(AgentId)
    }

    pub fn preference(&self) -> Preference {
        self.preference
    }

    pub fn root(&self) -> NodeId {
        self.root
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn node(&self, id: NodeId) -> &Node<C> {
        &self.nodes[id]
    }

    pub fn nodes(&self) -> &[Node<C>] {
        &self.nodes
    }

    pub fn name(&self, id: NodeId) -> &str {
        &self.names[id]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn id_of(&self, name: &str) -> Option<NodeId> {
        self.names.iter().position(|n| n == name)
    }

    pub fn internal_ids(&self) -> impl Iterator<Item = NodeId> + '_ {
        (0..self.nodes.len()).filter(|&i| !self.nodes[i].is_leaf())
    }

    /// Node ids reachable from the root in breadth-first order, left before right.
    pub fn reachable(&self) -> Vec<NodeId> {
        self.reachable_from(self.root)
    }

    pub fn reachable_from(&self, start: NodeId) -> Vec<NodeId> {
        let mut seen = vec![false; self.nodes.len()];
        let mut order = Vec::new();
        let mut queue = VecDeque::from([start]);
        seen[start] = true;
        while let Some(n) = queue.pop_front() {
            order.push(n);
            if let Some((l, r)) = self.nodes[n].children() {
                for e in [l, r] {
                    if !seen[e.target] {
                        seen[e.target] = true;
                        queue.push_back(e.target);
                    }
                }
            }
        }
        order
    }

    /// Smallest accumulated counter delta over paths from the root to each node.
    pub fn min_offsets(&self) -> Vec<Option<u64>> {
        // Dijkstra with non-negative weights; graphs are small.
        let mut dist: Vec<Option<u64>> = vec![None; self.nodes.len()];
        let mut done = vec![false; self.nodes.len()];
        dist[self.root] = Some(0);
        loop {
            let next = (0..self.nodes.len())
                .filter(|&i| !done[i] && dist[i].is_some())
                .min_by_key(|&i| dist[i]);
            let Some(n) = next else { break };
            done[n] = true;
            let d = dist[n].unwrap();
            if let Some((l, r)) = self.nodes[n].children() {
                for e in [l, r] {
                    let cand = d.saturating_add(e.delta);
                    if dist[e.target].is_none_or(|cur| cand < cur) {
                        dist[e.target] = Some(cand);
                    }
                }
            }
        }
        dist
    }

    /// Counter offsets at which each node can be reached from the root.
    ///
    /// A simple path accumulates at most the sum of all deltas, so an offset
    /// above that bound went around a cycle with a positive delta; from
    /// there on every reachable node has unboundedly many offsets.
    pub fn arrival_offsets(&self) -> Vec<Arrivals> {
        let bound: u64 = self.nodes.iter().filter_map(Node::children).map(|(l, r)| l.delta + r.delta).sum();
        let mut seen: Vec<BTreeSet<u64>> = vec![BTreeSet::new(); self.nodes.len()];
        let mut pumped = vec![false; self.nodes.len()];
        let mut queue = VecDeque::from([(self.root, 0u64)]);
        seen[self.root].insert(0);
        while let Some((n, off)) = queue.pop_front() {
            if let Some((l, r)) = self.nodes[n].children() {
                for e in [l, r] {
                    let next = off + e.delta;
                    if next > bound {
                        pumped[e.target] = true;
                    } else if seen[e.target].insert(next) {
                        queue.push_back((e.target, next));
                    }
                }
            }
        }
        let mut unbounded = vec![false; self.nodes.len()];
        for n in (0..self.nodes.len()).filter(|&n| pumped[n]) {
            for m in self.reachable_from(n) {
                unbounded[m] = true;
            }
        }
        let min = self.min_offsets();
        (0..self.nodes.len())
            .map(|n| match min[n] {
                None => Arrivals::Unreachable,
                Some(m) if unbounded[n] => Arrivals::From(m),
                Some(_) => Arrivals::Exactly(seen[n].iter().copied().collect()),
            })
            .collect()
    }

    /// The subgraph reachable from `start`, rooted there. Node names are kept.
    pub fn rooted_at(&self, start: NodeId) -> Graph<C> {
        let mut keep = self.reachable_from(start);
        keep.sort_unstable();
        let remap: HashMap<NodeId, NodeId> = keep.iter().enumerate().map(|(i, &n)| (n, i)).collect();
        let fix = |e: Edge| Edge { target: remap[&e.target], delta: e.delta };
        let nodes = keep
            .iter()
            .map(|&n| match &self.nodes[n] {
                Node::Leaf(u) => Node::Leaf(u.clone()),
                Node::Internal { agent, label, left, right } => Node::Internal {
                    agent: *agent,
                    label: label.clone(),
                    left: fix(*left),
                    right: fix(*right),
                },
            })
            .collect();
        Graph {
            agents: self.agents.clone(),
            preference: self.preference,
            names: keep.iter().map(|&n| self.names[n].clone()).collect(),
            nodes,
            root: remap[&start],
        }
    }

    /// Replaces every internal label through `f`.
    pub fn map_labels<D: NodeLabel>(&self, mut f: impl FnMut(NodeId, &C) -> D) -> Graph<D> {
        let nodes = self
            .nodes
            .iter()
            .enumerate()
            .map(|(i, n)| match n {
                Node::Leaf(u) => Node::Leaf(u.clone()),
                Node::Internal { agent, label, left, right } => Node::Internal {
                    agent: *agent,
                    label: f(i, label),
                    left: *left,
                    right: *right,
                },
            })
            .collect();
        Graph {
            agents: self.agents.clone(),
            preference: self.preference,
            names: self.names.clone(),
            nodes,
            root: self.root,
        }
    }

    /// True when no cycle is reachable from the root.
    pub fn is_acyclic(&self) -> bool {
        // 0 = unvisited, 1 = on stack, 2 = done
        let mut state = vec![0u8; self.nodes.len()];
        let mut stack = vec![(self.root, 0usize)];
        state[self.root] = 1;
        while let Some(&mut (n, ref mut next)) = stack.last_mut() {
            let kids = self.nodes[n].children().map(|(l, r)| [l.target, r.target]);
            match kids {
                Some(k) if *next < 2 => {
                    let c = k[*next];
                    *next += 1;
                    match state[c] {
                        0 => {
                            state[c] = 1;
                            stack.push((c, 0));
                        }
                        1 => return false,
                        _ => {}
                    }
                }
                _ => {
                    state[n] = 2;
                    stack.pop();
                }
            }
        }
        true
    }
}

impl ProfileGraph {
    pub fn choice(&self, id: NodeId) -> Option<Choice> {
        match &self.nodes[id] {
            Node::Internal { label, .. } => Some(*label),
            Node::Leaf(_) => None,
        }
    }

    /// Same profile with the choice at `id` replaced.
    pub fn with_choice(&self, id: NodeId, choice: Choice) -> ProfileGraph {
        self.map_labels(|n, c| if n == id { choice } else { *c })
    }
}

impl GameGraph {
    /// Attaches `choose(node)` to every internal node.
    pub fn with_choices(&self, mut choose: impl FnMut(NodeId) -> Choice) -> ProfileGraph {
        self.map_labels(|n, _| choose(n))
    }
}

/// The game obtained by erasing every choice of a profile.
pub fn s2g(p: &ProfileGraph) -> GameGraph {
    p.map_labels(|_, _| ())
}

// ---------------------------------------------------------------------------
// Validation
// ---------------------------------------------------------------------------

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct GraphDiagnostic {
    pub severity: Severity,
    pub node: String,
    pub message: String,
}

impl GraphDiagnostic {
    fn error(node: impl Into<String>, message: impl Into<String>) -> Self {
        GraphDiagnostic { severity: Severity::Error, node: node.into(), message: message.into() }
    }

    fn warning(node: impl Into<String>, message: impl Into<String>) -> Self {
        GraphDiagnostic { severity: Severity::Warning, node: node.into(), message: message.into() }
    }
}

impl fmt::Display for GraphDiagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sev = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        write!(f, "{sev}: node {}: {}", self.node, self.message)
    }
}

/// Checks the structural invariants of an index-resolved graph. The report
/// is empty iff every invariant holds; unreachable nodes are warnings.
pub fn validate<C: NodeLabel>(g: &Graph<C>) -> Vec<GraphDiagnostic> {
    let mut out = Vec::new();
    let name = |i: NodeId| g.names.get(i).cloned().unwrap_or_else(|| format!("#{i}"));
    if g.names.len() != g.nodes.len() {
        out.push(GraphDiagnostic::error("-", "node name table does not match node count"));
    }
    let mut seen = HashMap::new();
    for (i, n) in g.names.iter().enumerate() {
        if let Some(prev) = seen.insert(n.as_str(), i) {
            out.push(GraphDiagnostic::error(n.clone(), format!("duplicate node id (also #{prev})")));
        }
    }
    if g.root >= g.nodes.len() {
        out.push(GraphDiagnostic::error(format!("#{}", g.root), "root is not a declared node"));
        return out;
    }
    for (i, node) in g.nodes.iter().enumerate() {
        match node {
            Node::Leaf(u) => {
                if u.0.len() != g.agents.len() {
                    out.push(GraphDiagnostic::error(
                        name(i),
                        format!("leaf assigns {} utilities for {} agents", u.0.len(), g.agents.len()),
                    ));
                }
            }
            Node::Internal { agent, left, right, .. } => {
                if agent.0 >= g.agents.len() {
                    out.push(GraphDiagnostic::error(name(i), format!("unknown agent #{}", agent.0)));
                }
                for e in [left, right] {
                    if e.target >= g.nodes.len() {
                        out.push(GraphDiagnostic::error(name(i), format!("unknown target #{}", e.target)));
                    }
                }
            }
        }
    }
    if out.iter().any(|d| d.severity == Severity::Error) {
        return out;
    }
    let mut reach = vec![false; g.nodes.len()];
    for n in g.reachable() {
        reach[n] = true;
    }
    for (i, r) in reach.iter().enumerate() {
        if !r {
            out.push(GraphDiagnostic::warning(name(i), "unreachable from root"));
        }
    }
    out
}

// ---------------------------------------------------------------------------
// Construction by name
// ---------------------------------------------------------------------------

#[derive(Clone, Debug)]
enum Decl<C> {
    Leaf(Vec<(String, AffineUtility)>),
    Internal { agent: String, label: C, left: (String, u64), right: (String, u64) },
}

/// Builds a [`Graph`] from named declarations. Nodes are stored sorted by
/// name and agents sorted alphabetically, so two builders fed the same
/// declarations in any order produce identical graphs.
#[derive(Clone, Debug)]
pub struct GraphBuilder<C> {
    preference: Preference,
    agents: Vec<String>,
    decls: Vec<(String, Decl<C>)>,
    root: Option<String>,
}

impl<C: NodeLabel> GraphBuilder<C> {
    pub fn new(preference: Preference) -> Self {
        GraphBuilder { preference, agents: Vec::new(), decls: Vec::new(), root: None }
    }

    /// Declares an agent that may not otherwise appear.
    pub fn agent(mut self, name: &str) -> Self {
        self.agents.push(name.to_string());
        self
    }

    pub fn agents<S: AsRef<str>>(self, names: impl IntoIterator<Item = S>) -> Self {
        names.into_iter().fold(self, |b, a| b.agent(a.as_ref()))
    }

    pub fn leaf<S: AsRef<str>>(mut self, name: &str, payoffs: impl IntoIterator<Item = (S, AffineUtility)>) -> Self {
        let pays = payoffs.into_iter().map(|(a, u)| (a.as_ref().to_string(), u)).collect();
        self.decls.push((name.to_string(), Decl::Leaf(pays)));
        self
    }

    pub fn node(mut self, name: &str, agent: &str, label: C, left: (&str, u64), right: (&str, u64)) -> Self {
        self.decls.push((
            name.to_string(),
            Decl::Internal {
                agent: agent.to_string(),
                label,
                left: (left.0.to_string(), left.1),
                right: (right.0.to_string(), right.1),
            },
        ));
        self
    }

    pub fn root(mut self, name: &str) -> Self {
        self.root = Some(name.to_string());
        self
    }

    pub fn build(self) -> Result<Graph<C>, Vec<GraphDiagnostic>> {
        let mut errors = Vec::new();
        let mut agents = self.agents.clone();
        for (_, d) in &self.decls {
            match d {
                Decl::Leaf(p) => agents.extend(p.iter().map(|(a, _)| a.clone())),
                Decl::Internal { agent, .. } => agents.push(agent.clone()),
            }
        }
        agents.sort();
        agents.dedup();

        let mut by_name: BTreeMap<&str, &Decl<C>> = BTreeMap::new();
        for (name, d) in &self.decls {
            if by_name.insert(name.as_str(), d).is_some() {
                errors.push(GraphDiagnostic::error(name.clone(), "duplicate definition"));
            }
        }
        let names: Vec<String> = by_name.keys().map(|s| s.to_string()).collect();
        let index: HashMap<&str, NodeId> = names.iter().enumerate().map(|(i, n)| (n.as_str(), i)).collect();
        let agent_index = |a: &str| AgentId(agents.iter().position(|x| x == a).unwrap());

        let mut nodes = Vec::with_capacity(names.len());
        for (name, d) in &by_name {
            match d {
                Decl::Leaf(pays) => {
                    let mut slots: Vec<Option<AffineUtility>> = vec![None; agents.len()];
                    for (a, u) in pays {
                        let slot = &mut slots[agent_index(a).0];
                        if slot.is_some() {
                            errors.push(GraphDiagnostic::error(*name, format!("payoff for {a} given twice")));
                        }
                        *slot = Some(u.clone());
                    }
                    let mut us = Vec::with_capacity(agents.len());
                    for (i, s) in slots.into_iter().enumerate() {
                        match s {
                            Some(u) => us.push(u),
                            None => {
                                errors.push(GraphDiagnostic::error(*name, format!("missing payoff for {}", agents[i])));
                                us.push(AffineUtility::constant(crate::utility::rat(0)));
                            }
                        }
                    }
                    nodes.push(Node::Leaf(UtilityAssignment(us)));
                }
                Decl::Internal { agent, label, left, right } => {
                    let mut edge = |(t, delta): &(String, u64)| match index.get(t.as_str()) {
                        Some(&target) => Edge { target, delta: *delta },
                        None => {
                            errors.push(GraphDiagnostic::error(*name, format!("unknown target {t}")));
                            Edge::to(0)
                        }
                    };
                    let (left, right) = (edge(left), edge(right));
                    nodes.push(Node::Internal { agent: agent_index(agent), label: label.clone(), left, right });
                }
            }
        }
        let root = match &self.root {
            Some(r) => match index.get(r.as_str()) {
                Some(&i) => i,
                None => {
                    errors.push(GraphDiagnostic::error(r.clone(), "root is not a declared node"));
                    0
                }
            },
            None => {
                errors.push(GraphDiagnostic::error("-", "no root declared"));
                0
            }
        };
        if nodes.is_empty() && errors.is_empty() {
            errors.push(GraphDiagnostic::error("-", "graph has no nodes"));
        }
        if !errors.is_empty() {
            return Err(errors);
        }
        Ok(Graph { agents, preference: self.preference, names, nodes, root })
    }
}

// ---------------------------------------------------------------------------
// Unfolding and histories
// ---------------------------------------------------------------------------

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TreeKind<C> {
    Leaf(UtilityAssignment),
    Internal { agent: AgentId, label: C, left: usize, right: usize },
    /// Internal node at the depth frontier; its subtrees are not produced.
    Cut { agent: AgentId, label: C },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreeNode<C> {
    pub source: NodeId,
    /// Counter increments accumulated on the path from the root.
    pub offset: u64,
    pub depth: usize,
    pub kind: TreeKind<C>,
}

/// A finite, depth-bounded unfolding. Nodes are in preorder, left first;
/// index 0 is the root.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Tree<C> {
    pub nodes: Vec<TreeNode<C>>,
}

impl<C: NodeLabel> Tree<C> {
    pub fn root(&self) -> &TreeNode<C> {
        &self.nodes[0]
    }

    /// Re-cuts the tree at a smaller depth.
    pub fn truncate(&self, depth: usize) -> Tree<C> {
        let mut out = Vec::new();
        self.copy_truncated(0, depth, &mut out);
        Tree { nodes: out }
    }

    fn copy_truncated(&self, at: usize, depth: usize, out: &mut Vec<TreeNode<C>>) -> usize {
        let n = &self.nodes[at];
        let me = out.len();
        let kind = match &n.kind {
            TreeKind::Internal { agent, label, .. } | TreeKind::Cut { agent, label } if n.depth >= depth => {
                TreeKind::Cut { agent: *agent, label: label.clone() }
            }
            other => other.clone(),
        };
        out.push(TreeNode { kind, ..n.clone() });
        if let TreeKind::Internal { agent, label, left, right } = &n.kind {
            if n.depth < depth {
                let l = self.copy_truncated(*left, depth, out);
                let r = self.copy_truncated(*right, depth, out);
                out[me].kind = TreeKind::Internal { agent: *agent, label: label.clone(), left: l, right: r };
            }
        }
        me
    }
}

/// Depth-bounded unfolding from the root. Internal nodes at depth `depth`
/// are marked [`TreeKind::Cut`].
pub fn unfold<C: NodeLabel>(g: &Graph<C>, depth: usize) -> Tree<C> {
    unfold_from(g, g.root, depth)
}

pub fn unfold_from<C: NodeLabel>(g: &Graph<C>, start: NodeId, depth: usize) -> Tree<C> {
    let mut nodes = Vec::new();
    unfold_rec(g, start, 0, 0, depth, &mut nodes);
    Tree { nodes }
}

fn unfold_rec<C: NodeLabel>(
    g: &Graph<C>,
    source: NodeId,
    offset: u64,
    depth: usize,
    max: usize,
    out: &mut Vec<TreeNode<C>>,
) -> usize {
    let me = out.len();
    match g.node(source) {
        Node::Leaf(u) => out.push(TreeNode { source, offset, depth, kind: TreeKind::Leaf(u.clone()) }),
        Node::Internal { agent, label, .. } if depth >= max => out.push(TreeNode {
            source,
            offset,
            depth,
            kind: TreeKind::Cut { agent: *agent, label: label.clone() },
        }),
        Node::Internal { agent, label, left, right } => {
            out.push(TreeNode { source, offset, depth, kind: TreeKind::Cut { agent: *agent, label: label.clone() } });
            let l = unfold_rec(g, left.target, offset + left.delta, depth + 1, max, out);
            let r = unfold_rec(g, right.target, offset + right.delta, depth + 1, max, out);
            out[me].kind = TreeKind::Internal { agent: *agent, label: label.clone(), left: l, right: r };
        }
    }
    me
}

/// A finite prefix of the play of a profile.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct History {
    pub choices: Vec<Choice>,
    /// The play reached a leaf within the step budget.
    pub terminated: bool,
}

/// Follows the profile's choices from the root for at most `max_steps` moves.
pub fn history(p: &ProfileGraph, max_steps: usize) -> History {
    let mut at = p.root();
    let mut choices = Vec::new();
    loop {
        match p.node(at) {
            Node::Leaf(_) => return History { choices, terminated: true },
            Node::Internal { label, left, right, .. } => {
                if choices.len() == max_steps {
                    return History { choices, terminated: false };
                }
                choices.push(*label);
                at = match label {
                    Choice::L => left.target,
                    Choice::R => right.target,
                };
            }
        }
    }
}
