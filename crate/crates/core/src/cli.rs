//! Command-line front end. `run` is the whole program minus process
//! plumbing, so it can be driven from tests.

use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Value};

use crate::bisim::classes;
use crate::builtin;
use crate::dsl;
use crate::equilibria::{
    backward_induction, check_nash, check_sgpe, cut_game, CounterMode, NashVerdict, DEFAULT_PROFILE_CAP,
};
use crate::escalation::{find_escalation, DEFAULT_ENUM_CAP};
use crate::fixpoint::{always_leads_to_leaf, is_infinite, leads_to_leaf, s2u, NodeSet};
use crate::graph::{GameGraph, ProfileGraph};
use crate::model::Model;
use crate::utility::{fmt_rational, Preference, Rational};

pub const ENUM_CAP_VAR: &str = "REGAL_ENUM_CAP";

#[derive(Parser, Debug)]
#[command(name = "regal", version, about = "Equilibria and escalation in rational extensive games")]
pub struct Cli {
    /// Print a JSON report instead of text
    #[arg(long, global = true)]
    json: bool,
    /// Model file in the .game format
    #[arg(long, global = true, value_name = "PATH", conflicts_with = "builtin")]
    file: Option<PathBuf>,
    /// Built-in model (see `regal examples`)
    #[arg(long, global = true, value_name = "NAME")]
    builtin: Option<String>,
    /// Item value for the dollar auction built-in
    #[arg(long, global = true, value_name = "RAT", value_parser = parse_rational)]
    v: Option<Rational>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check a property of a profile
    #[command(subcommand)]
    Check(Check),
    /// Utility of an agent in a profile
    Utility {
        #[arg(long)]
        profile: String,
        #[arg(long)]
        agent: String,
        /// Evaluate at this counter value
        #[arg(long)]
        k: Option<u64>,
    },
    /// Bisimilarity of two games or two profiles
    Bisim {
        #[arg(long)]
        left: String,
        #[arg(long)]
        right: String,
    },
    /// Search for an escalation
    Escalation {
        #[arg(long)]
        game: Option<String>,
    },
    /// Backward induction on a game cut after `depth` moves
    BackwardInduction {
        #[arg(long)]
        game: Option<String>,
        #[arg(long)]
        depth: usize,
        /// Node to start the cut game from (default: the root)
        #[arg(long)]
        start: Option<String>,
        /// Counter value at the start node
        #[arg(long, default_value_t = 0)]
        k: u64,
    },
    /// Nodes whose unfolding is infinite
    Infinite {
        #[arg(long)]
        game: Option<String>,
    },
    /// Parse and lint a model file
    Parse,
    /// List the built-in models
    Examples,
}

#[derive(Subcommand, Debug)]
enum Check {
    /// Subgame perfect equilibrium
    Sgpe {
        #[command(flatten)]
        target: ProfileArg,
    },
    /// Nash equilibrium, refuted by bounded deviation search
    Nash {
        #[command(flatten)]
        target: ProfileArg,
        #[arg(long)]
        depth: usize,
    },
    /// Leads to a leaf
    Ltl {
        #[command(flatten)]
        target: ProfileArg,
    },
    /// Always leads to a leaf
    Altl {
        #[command(flatten)]
        target: ProfileArg,
    },
}

#[derive(Args, Debug)]
struct ProfileArg {
    #[arg(long)]
    profile: String,
    /// Check the instance with root counter K instead of every counter value
    #[arg(long, value_name = "K")]
    instance: Option<u64>,
}

fn parse_rational(s: &str) -> Result<Rational, String> {
    s.parse::<Rational>().map_err(|e| format!("not a rational number: {e}"))
}

/// Failure that maps to exit code 2.
#[derive(Debug)]
struct UsageError(String);

impl<E: std::fmt::Display> From<E> for UsageError {
    fn from(e: E) -> Self {
        UsageError(e.to_string())
    }
}

/// The JSON document printed with `--json`.
#[derive(Serialize)]
pub struct Report {
    pub command: String,
    pub model: Option<String>,
    pub target: Option<String>,
    pub verdict: bool,
    pub certificate: Value,
    pub version: &'static str,
    pub ms: u64,
}

struct Outcome {
    target: Option<String>,
    verdict: bool,
    certificate: Value,
    text: String,
    /// Exit 1 when the verdict is false.
    refutable: bool,
}

struct Ctx {
    model: Model,
    source: String,
    enum_cap: usize,
}

/// Runs the program on `args` (including the program name) and returns
/// the exit code: 0 holds or succeeded, 1 refuted, 2 usage or input error.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let msg = e.render().to_string();
            let _ = if code == 0 { out.write_all(msg.as_bytes()) } else { err.write_all(msg.as_bytes()) };
            return code;
        }
    };
    let started = Instant::now();
    let (name, result) = execute(&cli, err);
    match result {
        Ok((model, o)) => {
            if cli.json {
                let report = Report {
                    command: name,
                    model,
                    target: o.target,
                    verdict: o.verdict,
                    certificate: o.certificate,
                    version: env!("CARGO_PKG_VERSION"),
                    ms: started.elapsed().as_millis() as u64,
                };
                let _ = writeln!(out, "{}", serde_json::to_string_pretty(&report).unwrap());
            } else {
                let _ = write!(out, "{}", o.text);
            }
            if o.refutable && !o.verdict {
                1
            } else {
                0
            }
        }
        Err(UsageError(msg)) => {
            if !msg.is_empty() {
                let _ = writeln!(err, "error: {msg}");
            }
            2
        }
    }
}

fn execute(cli: &Cli, err: &mut dyn Write) -> (String, Result<(Option<String>, Outcome), UsageError>) {
    let name = command_name(&cli.command);
    let result = (|| {
        if let Command::Examples = cli.command {
            return Ok((None, examples()));
        }
        let ctx = load(cli, err)?;
        let o = match &cli.command {
            Command::Check(c) => check(&ctx, c)?,
            Command::Utility { profile, agent, k } => utility(&ctx, profile, agent, *k)?,
            Command::Bisim { left, right } => bisim(&ctx, left, right)?,
            Command::Escalation { game } => escalation(&ctx, game.as_deref())?,
            Command::BackwardInduction { game, depth, start, k } => {
                backward(&ctx, game.as_deref(), *depth, start.as_deref(), *k)?
            }
            Command::Infinite { game } => infinite(&ctx, game.as_deref())?,
            Command::Parse => lint(&ctx),
            Command::Examples => unreachable!(),
        };
        Ok((Some(ctx.source.clone()), o))
    })();
    (name, result)
}

fn command_name(c: &Command) -> String {
    match c {
        Command::Check(Check::Sgpe { .. }) => "check sgpe",
        Command::Check(Check::Nash { .. }) => "check nash",
        Command::Check(Check::Ltl { .. }) => "check ltl",
        Command::Check(Check::Altl { .. }) => "check altl",
        Command::Utility { .. } => "utility",
        Command::Bisim { .. } => "bisim",
        Command::Escalation { .. } => "escalation",
        Command::BackwardInduction { .. } => "backward-induction",
        Command::Infinite { .. } => "infinite",
        Command::Parse => "parse",
        Command::Examples => "examples",
    }
    .to_string()
}

fn load(cli: &Cli, err: &mut dyn Write) -> Result<Ctx, UsageError> {
    let enum_cap = match std::env::var(ENUM_CAP_VAR) {
        Ok(s) => s.trim().parse().map_err(|_| UsageError(format!("{ENUM_CAP_VAR} must be a natural number, got `{s}`")))?,
        Err(_) => DEFAULT_ENUM_CAP,
    };
    let (model, source) = match (&cli.file, &cli.builtin) {
        (Some(path), _) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| UsageError(format!("cannot read {}: {e}", path.display())))?;
            let shown = path.display().to_string();
            match dsl::parse_with_warnings(&text) {
                Ok((m, warnings)) => {
                    for w in warnings {
                        let _ = writeln!(err, "{}", w.render(&text, &shown));
                    }
                    (m, shown)
                }
                Err(diags) => {
                    for d in &diags {
                        let _ = writeln!(err, "{}", d.render(&text, &shown));
                    }
                    return Err(UsageError(format!("{} error(s) in {shown}", diags.len())));
                }
            }
        }
        (None, Some(name)) => (builtin::by_name(name, cli.v.clone())?, name.clone()),
        (None, None) => return Err(UsageError("no model given: use --file PATH or --builtin NAME".into())),
    };
    if cli.v.is_some() && cli.builtin.as_deref() != Some("dollar") {
        return Err(UsageError("--v only applies to --builtin dollar".into()));
    }
    Ok(Ctx { model, source, enum_cap })
}

fn profile<'a>(ctx: &'a Ctx, name: &str) -> Result<&'a ProfileGraph, UsageError> {
    ctx.model.profile(name).ok_or_else(|| {
        let known: Vec<&str> = ctx.model.profiles.keys().map(String::as_str).collect();
        UsageError(format!("unknown profile `{name}` (known: {})", list(&known)))
    })
}

fn game<'a>(ctx: &'a Ctx, name: Option<&str>) -> Result<(String, &'a GameGraph), UsageError> {
    let known: Vec<&str> = ctx.model.games.keys().map(String::as_str).collect();
    let name = match name {
        Some(n) => n,
        None if known.len() == 1 => known[0],
        None => return Err(UsageError(format!("--game is required (games: {})", list(&known)))),
    };
    match ctx.model.game(name) {
        Some(g) => Ok((name.to_string(), g)),
        None => Err(UsageError(format!("unknown game `{name}` (known: {})", list(&known)))),
    }
}

fn list(names: &[&str]) -> String {
    if names.is_empty() {
        "none".into()
    } else {
        names.join(", ")
    }
}

fn mode_text(m: CounterMode) -> String {
    match m {
        CounterMode::Uniform => "for every k".into(),
        CounterMode::Instance { k } => format!("at k = {k}"),
    }
}

fn check(ctx: &Ctx, c: &Check) -> Result<Outcome, UsageError> {
    Ok(match c {
        Check::Sgpe { target } => {
            let p = profile(ctx, &target.profile)?;
            let mode = CounterMode::from_instance(target.instance);
            let cert = check_sgpe(p, mode);
            let text = match &cert.failure {
                None => format!("{} is a subgame perfect equilibrium {}\n", target.profile, mode_text(mode)),
                Some(f) => {
                    let why = match f.k {
                        Some(k) => format!("the comparison fails at {} for k = {k}", f.node),
                        None => format!("{} does not always lead to a leaf", f.node),
                    };
                    format!("{} is not a subgame perfect equilibrium: {why}\n", target.profile)
                }
            };
            Outcome {
                target: Some(target.profile.clone()),
                verdict: cert.verdict,
                certificate: serde_json::to_value(&cert).unwrap(),
                text,
                refutable: true,
            }
        }
        Check::Nash { target, depth } => {
            let p = profile(ctx, &target.profile)?;
            let mode = CounterMode::from_instance(target.instance);
            let verdict = check_nash(p, *depth, mode)?;
            let text = match &verdict {
                NashVerdict::ImpliedBySgpe => {
                    format!("{} is a Nash equilibrium (it is subgame perfect)\n", target.profile)
                }
                NashVerdict::NoCounterexampleUpToDepth { depth } => {
                    format!("no profitable deviation from {} within depth {depth}\n", target.profile)
                }
                NashVerdict::Refuted { witness: w } => {
                    let flips: Vec<String> = w
                        .changes
                        .iter()
                        .map(|c| {
                            let at = if c.position.is_empty() { "root".to_string() } else { c.position.clone() };
                            format!("flip {}@{at} to {}", w.agent, c.to)
                        })
                        .collect();
                    let (what, cmp) = match p.preference() {
                        Preference::Max => ("payoff", ">"),
                        Preference::Min => ("cost", "<"),
                    };
                    format!(
                        "{} is not a Nash equilibrium: {}; {what} {} {cmp} {} at k={}\n",
                        target.profile,
                        flips.join(", "),
                        fmt_rational(&w.deviation_value),
                        fmt_rational(&w.original_value),
                        w.k_min
                    )
                }
            };
            Outcome {
                target: Some(target.profile.clone()),
                verdict: !verdict.is_refuted(),
                certificate: serde_json::to_value(&verdict).unwrap(),
                text,
                refutable: true,
            }
        }
        Check::Ltl { target } | Check::Altl { target } => {
            let p = profile(ctx, &target.profile)?;
            let (set, what) = match c {
                Check::Ltl { .. } => (leads_to_leaf(p), "leads to a leaf"),
                _ => (always_leads_to_leaf(p), "always leads to a leaf"),
            };
            let holds = set.contains(p.root());
            let nodes = set.names(p);
            let text = format!(
                "{} {}: {}\nnodes where it holds: {}\n",
                target.profile,
                what,
                if holds { "yes" } else { "no" },
                list(&nodes.iter().map(String::as_str).collect::<Vec<_>>())
            );
            Outcome {
                target: Some(target.profile.clone()),
                verdict: holds,
                certificate: node_set(p, &set),
                text,
                refutable: true,
            }
        }
    })
}

fn node_set<C: crate::graph::NodeLabel>(g: &crate::Graph<C>, s: &NodeSet) -> Value {
    json!({ "root": g.name(g.root()), "nodes": s.names(g) })
}

fn utility(ctx: &Ctx, name: &str, agent: &str, k: Option<u64>) -> Result<Outcome, UsageError> {
    let p = profile(ctx, name)?;
    let a = p
        .agent_id(agent)
        .ok_or_else(|| UsageError(format!("unknown agent `{agent}` (known: {})", p.agents().join(", "))))?;
    let u = s2u(p, p.root()).get(a).cloned();
    let value = match (&u, k) {
        (Some(u), Some(k)) => Some(u.eval(k)),
        _ => None,
    };
    let text = match (&u, &value) {
        (None, _) => format!("the utility of {agent} in {name} is undefined: the play never reaches a leaf\n"),
        (Some(u), None) => format!("{agent} in {name}: {u}\n"),
        (Some(u), Some(v)) => format!("{agent} in {name}: {u} = {} at k = {}\n", fmt_rational(v), k.unwrap()),
    };
    Ok(Outcome {
        target: Some(name.to_string()),
        verdict: u.is_some(),
        certificate: json!({
            "agent": agent,
            "utility": u,
            "k": k,
            "value": value.as_ref().map(fmt_rational),
        }),
        text,
        refutable: true,
    })
}

fn bisim(ctx: &Ctx, left: &str, right: &str) -> Result<Outcome, UsageError> {
    let is_game = |n: &str| ctx.model.game(n).is_some();
    let rounds_and_verdict = if is_game(left) && is_game(right) {
        let (a, b) = (ctx.model.game(left).unwrap(), ctx.model.game(right).unwrap());
        let c = classes(a, b)?;
        (c.related(a.root(), b.root()), c.rounds)
    } else if !is_game(left) && !is_game(right) {
        let (a, b) = (profile(ctx, left)?, profile(ctx, right)?);
        let c = classes(a, b)?;
        (c.related(a.root(), b.root()), c.rounds)
    } else {
        return Err(UsageError("bisim compares two games or two profiles, not one of each".into()));
    };
    let (holds, rounds) = rounds_and_verdict;
    Ok(Outcome {
        target: Some(format!("{left} ~ {right}")),
        verdict: holds,
        certificate: json!({ "left": left, "right": right, "bisimilar": holds, "rounds": rounds }),
        text: format!("{left} and {right} are {}bisimilar\n", if holds { "" } else { "not " }),
        refutable: true,
    })
}

fn escalation(ctx: &Ctx, name: Option<&str>) -> Result<Outcome, UsageError> {
    let (name, g) = game(ctx, name)?;
    let w = find_escalation(g, ctx.enum_cap)?;
    let text = match &w {
        None => format!("no escalation in {name} among its rational profiles\n"),
        Some(w) => {
            let show = |steps: &[crate::escalation::Step]| -> String {
                steps.iter().map(|s| format!("{} at {} plays {}", s.agent, s.node, s.direction)).collect::<Vec<_>>().join(" -> ")
            };
            let mut t = format!("{name} has an escalation\n");
            if !w.stem.is_empty() {
                t.push_str(&format!("stem: {}\n", show(&w.stem)));
            }
            t.push_str(&format!("cycle: {} -> (repeat)\n", show(&w.cycle)));
            t
        }
    };
    Ok(Outcome {
        target: Some(name),
        verdict: w.is_some(),
        certificate: serde_json::to_value(&w).unwrap(),
        text,
        refutable: true,
    })
}

fn backward(ctx: &Ctx, name: Option<&str>, depth: usize, start: Option<&str>, k: u64) -> Result<Outcome, UsageError> {
    let (name, g) = game(ctx, name)?;
    let start = start.unwrap_or(g.name(g.root()));
    let cut = cut_game(g, start, depth)?;
    let sols = backward_induction(&cut, k, DEFAULT_PROFILE_CAP)?;
    let profiles: Vec<Value> = sols
        .iter()
        .map(|p| {
            let m: serde_json::Map<String, Value> =
                p.internal_ids().map(|n| (p.name(n).to_string(), json!(p.choice(n).unwrap()))).collect();
            Value::Object(m)
        })
        .collect();
    let mut text = format!(
        "{name} cut after {depth} moves from {start}: {} internal nodes, {} backward induction profile(s)\n",
        cut.internal_ids().count(),
        sols.len()
    );
    for p in &sols {
        let line: Vec<String> = p.internal_ids().map(|n| format!("{}: {}", p.name(n), p.choice(n).unwrap())).collect();
        text.push_str(&format!("  {{ {} }}\n", line.join(" ")));
    }
    Ok(Outcome {
        target: Some(name),
        verdict: true,
        certificate: json!({ "start": start, "depth": depth, "k": k, "profiles": profiles }),
        text,
        refutable: false,
    })
}

fn infinite(ctx: &Ctx, name: Option<&str>) -> Result<Outcome, UsageError> {
    let (name, g) = game(ctx, name)?;
    let set = is_infinite(g);
    let holds = set.contains(g.root());
    let names = set.names(g);
    Ok(Outcome {
        target: Some(name.clone()),
        verdict: holds,
        certificate: node_set(g, &set),
        text: format!(
            "{name} is {}infinite\ninfinite nodes: {}\n",
            if holds { "" } else { "not " },
            list(&names.iter().map(String::as_str).collect::<Vec<_>>())
        ),
        refutable: true,
    })
}

fn lint(ctx: &Ctx) -> Outcome {
    let m = &ctx.model;
    let params: serde_json::Map<String, Value> = m.params.iter().map(|(k, v)| (k.clone(), json!(fmt_rational(v)))).collect();
    let games: Vec<Value> = m
        .games
        .iter()
        .map(|(n, g)| json!({ "name": n, "nodes": g.len(), "internal": g.internal_ids().count(), "agents": g.agents() }))
        .collect();
    let profiles: Vec<Value> = m.profiles.iter().map(|(n, p)| json!({ "name": n, "game": p.game })).collect();
    Outcome {
        target: None,
        verdict: true,
        text: format!(
            "{}: {} game(s), {} profile(s), {} param(s)\n",
            ctx.source,
            m.games.len(),
            m.profiles.len(),
            m.params.len()
        ),
        certificate: json!({ "params": params, "games": games, "profiles": profiles, "canonical": dsl::serialize(m) }),
        refutable: false,
    }
}

fn examples() -> Outcome {
    let mut text = String::new();
    let mut items = Vec::new();
    for name in builtin::NAMES {
        let m = builtin::by_name(name, None).expect("built-ins construct");
        let profiles: Vec<&String> = m.profiles.keys().collect();
        let games: Vec<&String> = m.games.keys().collect();
        text.push_str(&format!("{name:<11} {}\n", builtin::describe(name)));
        items.push(json!({ "name": name, "description": builtin::describe(name), "games": games, "profiles": profiles }));
    }
    Outcome { target: None, verdict: true, certificate: Value::Array(items), text, refutable: false }
}
