//! Random games and profiles for the property suites.

use rand::Rng;
use regal::graph::{AgentId, GraphBuilder, Node, NodeLabel};
use regal::utility::rat;
use regal::{AffineUtility, Choice, GameGraph, Graph, Preference, ProfileGraph};

#[derive(Clone, Copy, Debug)]
pub struct Shape {
    pub max_internal: usize,
    pub max_leaves: usize,
    pub agents: usize,
    /// Allow payoffs that depend on the counter.
    pub slopes: bool,
    pub max_delta: u64,
}

impl Default for Shape {
    fn default() -> Self {
        Shape { max_internal: 6, max_leaves: 4, agents: 2, slopes: true, max_delta: 1 }
    }
}

pub const AGENTS: [&str; 3] = ["A", "B", "C"];

pub fn utility(rng: &mut impl Rng, slopes: bool) -> AffineUtility {
    let offset = rat(rng.gen_range(-5..=5));
    if !slopes || rng.gen_bool(0.5) {
        return AffineUtility::constant(offset);
    }
    let u = AffineUtility::new(rat(rng.gen_range(-1..=1)), offset);
    if rng.gen_bool(0.25) {
        AffineUtility { clamped: true, ..u }
    } else {
        u
    }
}

pub fn preference(rng: &mut impl Rng) -> Preference {
    if rng.gen_bool(0.5) {
        Preference::Max
    } else {
        Preference::Min
    }
}

/// A random game with root `N0`. Targets are arbitrary, so the graph may be
/// cyclic and may have unreachable nodes.
pub fn game(rng: &mut impl Rng, shape: Shape, pref: Preference) -> GameGraph {
    let internal = rng.gen_range(1..=shape.max_internal);
    let leaves = rng.gen_range(1..=shape.max_leaves);
    let names: Vec<String> =
        (0..internal).map(|i| format!("N{i}")).chain((0..leaves).map(|i| format!("T{i}"))).collect();
    let mut b = GraphBuilder::<()>::new(pref);
    for i in 0..internal {
        let mut tgt = || (names[rng.gen_range(0..names.len())].as_str(), rng.gen_range(0..=shape.max_delta));
        let (l, r) = (tgt(), tgt());
        let agent = AGENTS[rng.gen_range(0..shape.agents)];
        b = b.node(&names[i], agent, (), l, r);
    }
    for name in &names[internal..] {
        let pays: Vec<(&str, AffineUtility)> = AGENTS[..shape.agents].iter().map(|a| (*a, utility(rng, shape.slopes))).collect();
        b = b.leaf(name, pays);
    }
    b.agents(&AGENTS[..shape.agents]).root("N0").build().unwrap()
}

/// A random finite tree: every internal node has two fresh children.
pub fn tree(rng: &mut impl Rng, shape: Shape, pref: Preference) -> GameGraph {
    let mut b = GraphBuilder::<()>::new(pref).agents(&AGENTS[..shape.agents]);
    let mut count = 0;
    let mut internal = 0;
    fn grow<R: Rng>(
        rng: &mut R,
        b: GraphBuilder<()>,
        shape: Shape,
        count: &mut usize,
        internal: &mut usize,
    ) -> (GraphBuilder<()>, String) {
        let name = format!("X{count}");
        *count += 1;
        if *internal < shape.max_internal && rng.gen_bool(0.6) {
            *internal += 1;
            let (b, l) = grow(rng, b, shape, count, internal);
            let (b, r) = grow(rng, b, shape, count, internal);
            let agent = AGENTS[rng.gen_range(0..shape.agents)];
            let (dl, dr) = (rng.gen_range(0..=shape.max_delta), rng.gen_range(0..=shape.max_delta));
            (b.node(&name, agent, (), (&l, dl), (&r, dr)), name)
        } else {
            let pays: Vec<(&str, AffineUtility)> =
                AGENTS[..shape.agents].iter().map(|a| (*a, utility(rng, shape.slopes))).collect();
            (b.leaf(&name, pays), name)
        }
    }
    let root;
    (b, root) = grow(rng, b, shape, &mut count, &mut internal);
    b.root(&root).build().unwrap()
}

pub fn choices(rng: &mut impl Rng, g: &GameGraph) -> ProfileGraph {
    g.with_choices(|_| if rng.gen_bool(0.5) { Choice::L } else { Choice::R })
}

pub fn profile(rng: &mut impl Rng, shape: Shape) -> ProfileGraph {
    let pref = preference(rng);
    let g = game(rng, shape, pref);
    choices(rng, &g)
}

/// Every profile of `g`, in mask order over its internal nodes.
pub fn all_profiles(g: &GameGraph) -> Vec<ProfileGraph> {
    let internal: Vec<usize> = g.internal_ids().collect();
    (0u32..1 << internal.len())
        .map(|mask| {
            g.with_choices(|n| {
                let j = internal.iter().position(|&i| i == n).unwrap();
                if mask >> j & 1 == 1 {
                    Choice::R
                } else {
                    Choice::L
                }
            })
        })
        .collect()
}

/// A bisimilar re-presentation: every node gets a twin, and every edge
/// picks the original or the twin of its target at random.
pub fn duplicate<C: NodeLabel>(rng: &mut impl Rng, g: &Graph<C>) -> Graph<C> {
    let pick = |rng: &mut dyn rand::RngCore, n: usize| -> String {
        if rng.gen_bool(0.5) {
            format!("{}x", g.name(n))
        } else {
            format!("{}y", g.name(n))
        }
    };
    let mut b = GraphBuilder::<C>::new(g.preference()).agents(g.agents());
    for n in 0..g.len() {
        for twin in [false, true] {
            let name = format!("{}{}", g.name(n), if twin { "y" } else { "x" });
            b = match g.node(n) {
                Node::Leaf(u) => b.leaf(&name, g.agents().iter().cloned().zip(u.0.iter().cloned())),
                Node::Internal { agent, label, left, right } => {
                    let l = pick(rng, left.target);
                    let r = pick(rng, right.target);
                    b.node(&name, g.agent_name(*agent), label.clone(), (&l, left.delta), (&r, right.delta))
                }
            };
        }
    }
    let root = pick(rng, g.root());
    b.root(&root).build().unwrap()
}

/// Flips one reachable internal choice, or perturbs a reachable leaf.
pub fn mutate_profile(rng: &mut impl Rng, p: &ProfileGraph) -> ProfileGraph {
    let internal: Vec<usize> = p.reachable().into_iter().filter(|&n| !p.node(n).is_leaf()).collect();
    if internal.is_empty() {
        return p.clone();
    }
    let n = internal[rng.gen_range(0..internal.len())];
    p.with_choice(n, p.choice(n).unwrap().flip())
}

pub fn agent_ids<C: NodeLabel>(g: &Graph<C>) -> Vec<AgentId> {
    (0..g.agents().len()).map(AgentId).collect()
}
