use std::collections::{BTreeMap, BTreeSet, HashMap};

use num_bigint::BigInt;
use num_traits::Zero;

use super::lexer::{lex, Tok, Token};
use super::{Diagnostic, Span};
use crate::graph::{Choice, GraphBuilder};
use crate::model::{Model, NamedProfile};
use crate::utility::{AffineUtility, Preference, Rational};

#[derive(Clone, Debug)]
struct Name {
    text: String,
    span: Span,
}

struct Target {
    name: Name,
    delta: u64,
}

enum Decl {
    Node { name: Name, agent: Name, left: Target, right: Target },
    Leaf { name: Name, pays: Vec<(Name, AffineUtility)> },
}

impl Decl {
    fn name(&self) -> &Name {
        match self {
            Decl::Node { name, .. } | Decl::Leaf { name, .. } => name,
        }
    }
}

struct GameAst {
    name: Name,
    pref: Preference,
    decls: Vec<Decl>,
    root: Name,
}

struct ProfileAst {
    name: Name,
    game: Name,
    entries: Vec<(Name, Choice)>,
}

const RESERVED: [&str; 13] = ["param", "game", "prefer", "max", "min", "node", "leaf", "root", "profile", "on", "k", "nat", "l"];

struct Parser<'a> {
    toks: &'a [Token],
    pos: usize,
    params: BTreeMap<String, Rational>,
}

type PResult<T> = Result<T, Diagnostic>;

impl<'a> Parser<'a> {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn span(&self) -> Span {
        self.toks[self.pos].span
    }

    fn bump(&mut self) -> &Token {
        let t = &self.toks[self.pos];
        if t.tok != Tok::Eof {
            self.pos += 1;
        }
        t
    }

    fn unexpected<T>(&self, expected: &str) -> PResult<T> {
        Err(Diagnostic::error(
            "E001",
            format!("expected {expected}, found {}", self.peek().describe()),
            self.span(),
        ))
    }

    fn expect(&mut self, tok: Tok) -> PResult<Span> {
        if *self.peek() == tok {
            Ok(self.bump().span)
        } else {
            self.unexpected(&tok.describe())
        }
    }

    fn is_kw(&self, kw: &str) -> bool {
        matches!(self.peek(), Tok::Ident(s) if s == kw)
    }

    fn keyword(&mut self, kw: &str) -> PResult<Span> {
        if self.is_kw(kw) {
            Ok(self.bump().span)
        } else {
            self.unexpected(&format!("`{kw}`"))
        }
    }

    fn ident(&mut self) -> PResult<Name> {
        match self.peek().clone() {
            Tok::Ident(text) => {
                let span = self.bump().span;
                Ok(Name { text, span })
            }
            _ => self.unexpected("an identifier"),
        }
    }

    fn choice(&mut self) -> PResult<Choice> {
        if self.is_kw("l") {
            self.bump();
            Ok(Choice::L)
        } else if self.is_kw("r") {
            self.bump();
            Ok(Choice::R)
        } else {
            self.unexpected("`l` or `r`")
        }
    }

    fn nat(&mut self) -> PResult<u64> {
        match self.peek().clone() {
            Tok::Int(s) => {
                let span = self.bump().span;
                s.parse().map_err(|_| Diagnostic::error("E005", "counter increment out of range", span))
            }
            _ => self.unexpected("a natural number"),
        }
    }

    /// `-`? INT (`/` INT)? | param name
    fn rational(&mut self) -> PResult<Rational> {
        let start = self.span();
        let negative = if *self.peek() == Tok::Minus {
            self.bump();
            true
        } else {
            false
        };
        let value = match self.peek().clone() {
            Tok::Int(n) => {
                self.bump();
                let numer: BigInt = n.parse().unwrap();
                if *self.peek() == Tok::Slash {
                    self.bump();
                    let dspan = self.span();
                    let Tok::Int(d) = self.peek().clone() else { return self.unexpected("a denominator") };
                    self.bump();
                    let denom: BigInt = d.parse().unwrap();
                    if denom.is_zero() {
                        return Err(Diagnostic::error("E005", "zero denominator", dspan));
                    }
                    Rational::new(numer, denom)
                } else {
                    Rational::from_integer(numer)
                }
            }
            Tok::Ident(name) if name != "k" && name != "nat" => {
                let span = self.bump().span;
                match self.params.get(&name) {
                    Some(v) => v.clone(),
                    None => return Err(Diagnostic::error("E002", format!("unknown identifier {name}"), span)),
                }
            }
            _ => {
                if negative {
                    return self.unexpected("a number");
                }
                return Err(Diagnostic::error(
                    "E001",
                    format!("expected a number, found {}", self.peek().describe()),
                    start,
                ));
            }
        };
        Ok(if negative { -value } else { value })
    }

    fn affine(&mut self) -> PResult<AffineUtility> {
        let slope = if self.is_kw("k") {
            Rational::from_integer(1.into())
        } else {
            let q = self.rational()?;
            if *self.peek() != Tok::Star {
                return Ok(AffineUtility::constant(q));
            }
            self.bump();
            q
        };
        self.keyword("k")?;
        let offset = match self.peek() {
            Tok::Plus => {
                self.bump();
                self.rational()?
            }
            Tok::Minus => {
                self.bump();
                -self.rational()?
            }
            _ => Rational::zero(),
        };
        Ok(AffineUtility::new(slope, offset))
    }

    fn expr(&mut self) -> PResult<AffineUtility> {
        if self.is_kw("nat") {
            self.bump();
            self.expect(Tok::LParen)?;
            let a = self.affine()?;
            self.expect(Tok::RParen)?;
            Ok(AffineUtility { clamped: true, ..a })
        } else {
            self.affine()
        }
    }

    fn target(&mut self) -> PResult<Target> {
        let name = self.ident()?;
        let delta = if *self.peek() == Tok::At {
            self.bump();
            self.keyword("k")?;
            self.expect(Tok::Plus)?;
            self.nat()?
        } else {
            0
        };
        Ok(Target { name, delta })
    }

    fn decl(&mut self) -> PResult<Decl> {
        if self.is_kw("node") {
            self.bump();
            let name = self.ident()?;
            self.expect(Tok::Colon)?;
            let agent = self.ident()?;
            self.expect(Tok::LBrace)?;
            self.keyword("l")?;
            self.expect(Tok::Arrow)?;
            let left = self.target()?;
            self.expect(Tok::Comma)?;
            self.keyword("r")?;
            self.expect(Tok::Arrow)?;
            let right = self.target()?;
            self.expect(Tok::RBrace)?;
            Ok(Decl::Node { name, agent, left, right })
        } else if self.is_kw("leaf") {
            self.bump();
            let name = self.ident()?;
            self.expect(Tok::Colon)?;
            self.expect(Tok::LBrace)?;
            let mut pays = Vec::new();
            loop {
                let agent = self.ident()?;
                self.expect(Tok::Eq)?;
                pays.push((agent, self.expr()?));
                if *self.peek() == Tok::Comma {
                    self.bump();
                } else {
                    break;
                }
            }
            self.expect(Tok::RBrace)?;
            Ok(Decl::Leaf { name, pays })
        } else {
            self.unexpected("`node` or `leaf`")
        }
    }

    fn game(&mut self) -> PResult<GameAst> {
        self.keyword("game")?;
        let name = self.ident()?;
        self.expect(Tok::LBrace)?;
        self.keyword("prefer")?;
        let pref = if self.is_kw("max") {
            self.bump();
            Preference::Max
        } else if self.is_kw("min") {
            self.bump();
            Preference::Min
        } else {
            return self.unexpected("`max` or `min`");
        };
        let mut decls = vec![self.decl()?];
        while !self.is_kw("root") {
            decls.push(self.decl()?);
        }
        self.keyword("root")?;
        let root = self.ident()?;
        self.expect(Tok::RBrace)?;
        Ok(GameAst { name, pref, decls, root })
    }

    fn profile(&mut self) -> PResult<ProfileAst> {
        self.keyword("profile")?;
        let name = self.ident()?;
        self.keyword("on")?;
        let game = self.ident()?;
        self.expect(Tok::LBrace)?;
        let mut entries = Vec::new();
        loop {
            let node = self.ident()?;
            self.expect(Tok::Colon)?;
            entries.push((node, self.choice()?));
            if *self.peek() == Tok::RBrace {
                break;
            }
        }
        self.expect(Tok::RBrace)?;
        Ok(ProfileAst { name, game, entries })
    }

    fn check_name(&self, n: &Name) -> PResult<()> {
        if RESERVED.contains(&n.text.as_str()) || n.text == "r" {
            return Err(Diagnostic::error("E001", format!("`{}` is a reserved word", n.text), n.span));
        }
        Ok(())
    }
}

/// Parses a model. Syntax errors stop at the first one; name and shape
/// errors are all reported. On success the warnings (if any) are returned
/// alongside the model.
pub fn parse_with_warnings(src: &str) -> Result<(Model, Vec<Diagnostic>), Vec<Diagnostic>> {
    let toks = lex(src).map_err(|d| vec![d])?;
    let mut p = Parser { toks: &toks, pos: 0, params: BTreeMap::new() };
    let mut games = Vec::new();
    let mut profiles = Vec::new();
    let mut errors = Vec::new();
    let mut param_names: HashMap<String, Span> = HashMap::new();

    let syntax = (|| -> PResult<()> {
        loop {
            match p.peek() {
                Tok::Eof => return Ok(()),
                Tok::Ident(kw) if kw == "param" => {
                    p.bump();
                    let name = p.ident()?;
                    p.check_name(&name)?;
                    p.expect(Tok::Eq)?;
                    let v = p.rational()?;
                    if param_names.insert(name.text.clone(), name.span).is_some() {
                        errors.push(Diagnostic::error("E003", format!("duplicate definition {}", name.text), name.span));
                    }
                    p.params.insert(name.text, v);
                }
                Tok::Ident(kw) if kw == "game" => games.push(p.game()?),
                Tok::Ident(kw) if kw == "profile" => profiles.push(p.profile()?),
                _ => return p.unexpected("`param`, `game` or `profile`"),
            }
        }
    })();
    if let Err(d) = syntax {
        return Err(vec![d]);
    }

    let mut model = Model { params: p.params.clone(), ..Model::default() };
    let mut warnings = Vec::new();
    let mut game_internal: HashMap<String, BTreeSet<String>> = HashMap::new();
    let mut game_nodes: HashMap<String, BTreeSet<String>> = HashMap::new();

    for g in &games {
        if let Err(d) = p.check_name(&g.name) {
            errors.push(d);
            continue;
        }
        if model.games.contains_key(&g.name.text) || game_nodes.contains_key(&g.name.text) {
            errors.push(Diagnostic::error("E003", format!("duplicate definition {}", g.name.text), g.name.span));
            continue;
        }
        let before = errors.len();
        let mut names: HashMap<&str, &Decl> = HashMap::new();
        for d in &g.decls {
            let n = d.name();
            if let Err(e) = p.check_name(n) {
                errors.push(e);
            } else if names.insert(n.text.as_str(), d).is_some() {
                errors.push(Diagnostic::error("E003", format!("duplicate definition {}", n.text), n.span));
            }
        }
        let mut agents = BTreeSet::new();
        for d in &g.decls {
            match d {
                Decl::Node { agent, .. } => {
                    agents.insert(agent.text.clone());
                }
                Decl::Leaf { pays, .. } => agents.extend(pays.iter().map(|(a, _)| a.text.clone())),
            }
        }
        for d in &g.decls {
            match d {
                Decl::Node { left, right, .. } => {
                    for t in [left, right] {
                        if !names.contains_key(t.name.text.as_str()) {
                            errors.push(Diagnostic::error(
                                "E002",
                                format!("unknown identifier {}", t.name.text),
                                t.name.span,
                            ));
                        }
                    }
                }
                Decl::Leaf { name, pays } => {
                    let mut seen = BTreeSet::new();
                    for (a, _) in pays {
                        if !seen.insert(a.text.as_str()) {
                            errors.push(Diagnostic::error("E003", format!("duplicate payoff for {}", a.text), a.span));
                        }
                    }
                    let missing: Vec<&str> = agents.iter().map(String::as_str).filter(|a| !seen.contains(a)).collect();
                    if !missing.is_empty() {
                        errors.push(Diagnostic::error(
                            "E005",
                            format!("leaf {} has no payoff for {}", name.text, missing.join(", ")),
                            name.span,
                        ));
                    }
                }
            }
        }
        if !names.contains_key(g.root.text.as_str()) {
            errors.push(Diagnostic::error("E002", format!("unknown identifier {}", g.root.text), g.root.span));
        }
        game_nodes.insert(g.name.text.clone(), names.keys().map(|s| s.to_string()).collect());
        game_internal.insert(
            g.name.text.clone(),
            g.decls
                .iter()
                .filter(|d| matches!(d, Decl::Node { .. }))
                .map(|d| d.name().text.clone())
                .collect(),
        );
        if errors.len() > before {
            continue;
        }
        let mut b = GraphBuilder::<()>::new(g.pref);
        for d in &g.decls {
            b = match d {
                Decl::Node { name, agent, left, right } => b.node(
                    &name.text,
                    &agent.text,
                    (),
                    (&left.name.text, left.delta),
                    (&right.name.text, right.delta),
                ),
                Decl::Leaf { name, pays } => b.leaf(&name.text, pays.iter().map(|(a, u)| (a.text.as_str(), u.clone()))),
            };
        }
        match b.root(&g.root.text).build() {
            Ok(graph) => {
                for w in crate::graph::validate(&graph) {
                    let span = names.get(w.node.as_str()).map_or(g.name.span, |d| d.name().span);
                    warnings.push(Diagnostic::warning("W001", format!("node {} is {}", w.node, w.message), span));
                }
                model.games.insert(g.name.text.clone(), graph);
            }
            Err(diags) => {
                for d in diags {
                    errors.push(Diagnostic::error("E005", d.to_string(), g.name.span));
                }
            }
        }
    }

    for pr in &profiles {
        if let Err(d) = p.check_name(&pr.name) {
            errors.push(d);
            continue;
        }
        if model.profiles.contains_key(&pr.name.text) {
            errors.push(Diagnostic::error("E003", format!("duplicate definition {}", pr.name.text), pr.name.span));
            continue;
        }
        let Some(internal) = game_internal.get(&pr.game.text) else {
            errors.push(Diagnostic::error("E002", format!("unknown identifier {}", pr.game.text), pr.game.span));
            continue;
        };
        let nodes = &game_nodes[&pr.game.text];
        let before = errors.len();
        let mut chosen: BTreeMap<&str, Choice> = BTreeMap::new();
        for (n, c) in &pr.entries {
            if !nodes.contains(&n.text) {
                errors.push(Diagnostic::error("E002", format!("unknown identifier {}", n.text), n.span));
            } else if !internal.contains(&n.text) {
                errors.push(Diagnostic::error("E004", format!("{} is a leaf and takes no choice", n.text), n.span));
            } else if chosen.insert(n.text.as_str(), *c).is_some() {
                errors.push(Diagnostic::error("E003", format!("duplicate choice for {}", n.text), n.span));
            }
        }
        let missing: Vec<&str> = internal.iter().map(String::as_str).filter(|n| !chosen.contains_key(n)).collect();
        if !missing.is_empty() && errors.len() == before {
            errors.push(Diagnostic::error(
                "E004",
                format!("profile {} gives no choice for {}", pr.name.text, missing.join(", ")),
                pr.name.span,
            ));
        }
        if errors.len() > before {
            continue;
        }
        if let Some(game) = model.games.get(&pr.game.text) {
            let graph = game.with_choices(|n| chosen[game.name(n)]);
            model.profiles.insert(pr.name.text.clone(), NamedProfile { game: pr.game.text.clone(), graph });
        }
    }

    if errors.is_empty() {
        Ok((model, warnings))
    } else {
        Err(errors)
    }
}
