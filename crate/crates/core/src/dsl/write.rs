use std::fmt::Write;

use crate::graph::{Edge, GameGraph, Node};
use crate::model::Model;
use crate::utility::{fmt_rational, Preference};

/// Canonical text of a model: params, then games, then profiles, each
/// sorted by name; nodes of a game sorted by name. Parsing the output gives
/// back graphs with identical node ids.
pub fn serialize(m: &Model) -> String {
    let mut blocks = Vec::new();
    if !m.params.is_empty() {
        let mut s = String::new();
        for (name, v) in &m.params {
            writeln!(s, "param {name} = {}", fmt_rational(v)).unwrap();
        }
        blocks.push(s);
    }
    for (name, g) in &m.games {
        blocks.push(game_text(name, g));
    }
    for (name, p) in &m.profiles {
        let g = &p.graph;
        let choices: Vec<String> = g.internal_ids().map(|n| format!("{}: {}", g.name(n), g.choice(n).unwrap())).collect();
        blocks.push(format!("profile {name} on {} {{ {} }}\n", p.game, choices.join(" ")));
    }
    blocks.join("\n")
}

fn target(g: &GameGraph, e: &Edge) -> String {
    if e.delta == 0 {
        g.name(e.target).to_string()
    } else {
        format!("{} @ k + {}", g.name(e.target), e.delta)
    }
}

fn game_text(name: &str, g: &GameGraph) -> String {
    let mut s = String::new();
    writeln!(s, "game {name} {{").unwrap();
    let pref = match g.preference() {
        Preference::Max => "max",
        Preference::Min => "min",
    };
    writeln!(s, "  prefer {pref}").unwrap();
    for (id, node) in g.nodes().iter().enumerate() {
        match node {
            Node::Leaf(u) => {
                let pays: Vec<String> = g.agents().iter().zip(&u.0).map(|(a, f)| format!("{a} = {f}")).collect();
                writeln!(s, "  leaf {}: {{ {} }}", g.name(id), pays.join(", ")).unwrap();
            }
            Node::Internal { agent, left, right, .. } => {
                writeln!(
                    s,
                    "  node {}: {} {{ l -> {}, r -> {} }}",
                    g.name(id),
                    g.agent_name(*agent),
                    target(g, left),
                    target(g, right)
                )
                .unwrap();
            }
        }
    }
    writeln!(s, "  root {}", g.name(g.root())).unwrap();
    s.push_str("}\n");
    s
}
