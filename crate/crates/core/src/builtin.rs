//! The example games shipped with the tool.
//!
//! Choice `l` continues and `r` stops throughout. Node names: `A`/`B` are
//! Alice's and Bob's decision nodes, `LA`/`LB` the leaves their stops lead to.

use std::collections::BTreeMap;

use num_traits::Signed;
use thiserror::Error;

use crate::graph::{Choice, GameGraph, GraphBuilder, NodeLabel};
use crate::model::{Model, NamedProfile};
use crate::utility::{fmt_rational, rat, AffineUtility, Preference, Rational};

pub const NAMES: [&str; 5] = ["zero_one", "dollar", "infinipede", "zigzag", "backbone"];

#[derive(Debug, Error, PartialEq, Eq)]
pub enum BuiltinError {
    #[error("unknown built-in `{0}` (expected one of: zero_one, dollar, infinipede, zigzag, backbone)")]
    Unknown(String),
    #[error("dollar auction needs a positive item value, got {0}")]
    NonPositiveValue(String),
}

pub fn by_name(name: &str, v: Option<Rational>) -> Result<Model, BuiltinError> {
    match name {
        "zero_one" => Ok(zero_one()),
        "dollar" => dollar(v.unwrap_or_else(|| rat(2))),
        "infinipede" => Ok(infinipede()),
        "zigzag" => Ok(zigzag()),
        "backbone" => Ok(backbone()),
        other => Err(BuiltinError::Unknown(other.to_string())),
    }
}

/// One-line description per built-in, for `regal examples`.
pub fn describe(name: &str) -> &'static str {
    match name {
        "zero_one" => "0,1 game: Alice/Bob alternate, stopping pays 0,1 or 1,0 (max)",
        "dollar" => "dollar auction with item value v (default 2), costs grow by 1 per round (min)",
        "infinipede" => "infinite centipede with payoffs 2k / nat(2k-1), 2k+3 (max)",
        "zigzag" => "the zig and zag infinite binary trees as one-agent games",
        "backbone" => "the infinite left spine, as a self-loop and as a 2-node cycle",
        _ => "",
    }
}

fn c(q: i64) -> AffineUtility {
    AffineUtility::constant(rat(q))
}

fn lin(slope: i64, offset: Rational) -> AffineUtility {
    AffineUtility::new(rat(slope), offset)
}

fn profile(game_name: &str, g: &GameGraph, choices: &[(&str, Choice)]) -> NamedProfile {
    let map: BTreeMap<usize, Choice> = choices.iter().map(|(n, ch)| (g.id_of(n).unwrap(), *ch)).collect();
    NamedProfile { game: game_name.to_string(), graph: g.with_choices(|n| map[&n]) }
}

fn alice_bob<C: NodeLabel>(pref: Preference, cont_delta: u64, labels: (C, C)) -> GraphBuilder<C> {
    GraphBuilder::new(pref)
        .node("A", "Alice", labels.0, ("B", 0), ("LA", 0))
        .node("B", "Bob", labels.1, ("A", cont_delta), ("LB", 0))
        .root("A")
}

pub fn zero_one_game() -> GameGraph {
    alice_bob(Preference::Max, 0, ((), ()))
        .leaf("LA", [("Alice", c(0)), ("Bob", c(1))])
        .leaf("LB", [("Alice", c(1)), ("Bob", c(0))])
        .build()
        .expect("zero_one is well formed")
}

/// The 0,1 game presented with its spine duplicated: A1 → B1 → A2 → B2 → A1.
pub fn zero_one_unrolled() -> GameGraph {
    GraphBuilder::new(Preference::Max)
        .node("A1", "Alice", (), ("B1", 0), ("LA1", 0))
        .node("B1", "Bob", (), ("A2", 0), ("LB1", 0))
        .node("A2", "Alice", (), ("B2", 0), ("LA2", 0))
        .node("B2", "Bob", (), ("A1", 0), ("LB2", 0))
        .leaf("LA1", [("Alice", c(0)), ("Bob", c(1))])
        .leaf("LB1", [("Alice", c(1)), ("Bob", c(0))])
        .leaf("LA2", [("Alice", c(0)), ("Bob", c(1))])
        .leaf("LB2", [("Alice", c(1)), ("Bob", c(0))])
        .root("A1")
        .build()
        .expect("unrolled zero_one is well formed")
}

pub fn zero_one() -> Model {
    use Choice::*;
    let g = zero_one_game();
    let mut m = Model::default();
    for (name, a, b) in [("z1AcBs", L, R), ("z1AsBc", R, L), ("z1_all_continue", L, L)] {
        m.profiles.insert(name.into(), profile("zero_one", &g, &[("A", a), ("B", b)]));
    }
    m.games.insert("zero_one".into(), g);
    m
}

/// Dollar auction where each bid raises the cost by one and the item is
/// worth `v`. Payoffs are costs, so the preference is `min`.
pub fn dollar_game(v: &Rational) -> Result<GameGraph, BuiltinError> {
    if !v.is_positive() {
        return Err(BuiltinError::NonPositiveValue(fmt_rational(v)));
    }
    Ok(alice_bob(Preference::Min, 1, ((), ()))
        .leaf("LA", [("Alice", lin(1, v.clone())), ("Bob", lin(1, rat(0)))])
        .leaf("LB", [("Alice", lin(1, rat(1))), ("Bob", lin(1, v.clone()))])
        .build()
        .expect("dollar is well formed"))
}

pub fn dollar(v: Rational) -> Result<Model, BuiltinError> {
    use Choice::*;
    let g = dollar_game(&v)?;
    let mut m = Model::default();
    m.params.insert("v".into(), v);
    for (name, a, b) in [("dolAsBc", R, L), ("dolAcBs", L, R), ("dolAsBs", R, R)] {
        m.profiles.insert(name.into(), profile("dollar", &g, &[("A", a), ("B", b)]));
    }
    m.games.insert("dollar".into(), g);
    Ok(m)
}

pub fn infinipede_game() -> GameGraph {
    alice_bob(Preference::Max, 1, ((), ()))
        .leaf("LA", [("Alice", lin(2, rat(0))), ("Bob", lin(2, rat(0)))])
        .leaf("LB", [("Alice", AffineUtility::clamped(rat(2), rat(-1))), ("Bob", lin(2, rat(3)))])
        .build()
        .expect("infinipede is well formed")
}

pub fn infinipede() -> Model {
    let g = infinipede_game();
    let mut m = Model::default();
    m.profiles.insert("cent_agu".into(), profile("infinipede", &g, &[("A", Choice::R), ("B", Choice::R)]));
    m.games.insert("infinipede".into(), g);
    m
}

fn zig_zag_builder(root: &str) -> GameGraph {
    GraphBuilder::new(Preference::Max)
        .node("Zig", "P", (), ("Zag", 0), ("Nil", 0))
        .node("Zag", "P", (), ("Nil", 0), ("Zig", 0))
        .leaf("Nil", [("P", c(0))])
        .root(root)
        .build()
        .expect("zigzag is well formed")
}

pub fn zigzag() -> Model {
    let mut m = Model::default();
    m.games.insert("zig".into(), zig_zag_builder("Zig"));
    m.games.insert("zag".into(), zig_zag_builder("Zag"));
    m
}

pub fn backbone() -> Model {
    let mut m = Model::default();
    let loop1 = GraphBuilder::new(Preference::Max)
        .node("Spine", "P", (), ("Spine", 0), ("Nil", 0))
        .leaf("Nil", [("P", c(0))])
        .root("Spine")
        .build()
        .expect("backbone is well formed");
    let loop2 = GraphBuilder::new(Preference::Max)
        .node("Spine1", "P", (), ("Spine2", 0), ("Nil", 0))
        .node("Spine2", "P", (), ("Spine1", 0), ("Nil", 0))
        .leaf("Nil", [("P", c(0))])
        .root("Spine1")
        .build()
        .expect("backbone is well formed");
    m.games.insert("backbone".into(), loop1);
    m.games.insert("backbone2".into(), loop2);
    m
}
