//! Named collections of games and profiles, as read from or written to the
//! `.game` text format.

use std::collections::BTreeMap;

use crate::graph::{GameGraph, ProfileGraph};
use crate::utility::Rational;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NamedProfile {
    /// Name of the game this profile assigns choices on.
    pub game: String,
    pub graph: ProfileGraph,
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Model {
    pub params: BTreeMap<String, Rational>,
    pub games: BTreeMap<String, GameGraph>,
    pub profiles: BTreeMap<String, NamedProfile>,
}

impl Model {
    pub fn game(&self, name: &str) -> Option<&GameGraph> {
        self.games.get(name)
    }

    pub fn profile(&self, name: &str) -> Option<&ProfileGraph> {
        self.profiles.get(name).map(|p| &p.graph)
    }

    /// Union of the agents of every game, sorted.
    pub fn agents(&self) -> Vec<String> {
        let mut all: Vec<String> = self.games.values().flat_map(|g| g.agents().iter().cloned()).collect();
        all.sort();
        all.dedup();
        all
    }

    pub fn is_empty(&self) -> bool {
        self.params.is_empty() && self.games.is_empty() && self.profiles.is_empty()
    }
}
