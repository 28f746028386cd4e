//! Browser bindings. Each operation takes model source text and returns a
//! JSON string, so the page needs no glue beyond `JSON.parse`.

use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

use regal::dsl::{self, Diagnostic};
use regal::equilibria::{check_nash, check_sgpe, CounterMode, NashVerdict};
use regal::escalation::{find_escalation, DEFAULT_ENUM_CAP};
use regal::fixpoint::{always_leads_to_leaf, s2u};
use regal::graph::history;
use regal::utility::fmt_rational;
use regal::Model;

const NASH_DEPTH: usize = 6;

fn parsed(source: &str) -> Result<Model, Value> {
    dsl::parse(source).map_err(|diags| json!({ "ok": false, "diagnostics": diag_list(&diags) }))
}

fn diag_list(diags: &[Diagnostic]) -> Vec<Value> {
    diags
        .iter()
        .map(|d| json!({ "code": d.code, "message": d.message, "line": d.span.line, "column": d.span.column }))
        .collect()
}

/// Every profile of the model checked for subgame perfection (uniformly in
/// the counter) and for Nash deviations up to a fixed depth.
pub fn analyze(source: &str) -> Value {
    let m = match parsed(source) {
        Ok(m) => m,
        Err(e) => return e,
    };
    let profiles: Vec<Value> = m
        .profiles
        .iter()
        .map(|(name, np)| {
            let p = &np.graph;
            let cert = check_sgpe(p, CounterMode::Uniform);
            let failure = cert.failure.as_ref().map(|f| match f.k {
                Some(k) => format!("comparison fails at {} for k = {k}", f.node),
                None => format!("{} does not always lead to a leaf", f.node),
            });
            let nash = match check_nash(p, NASH_DEPTH, CounterMode::Uniform) {
                Ok(NashVerdict::ImpliedBySgpe) => "equilibrium (subgame perfect)".to_string(),
                Ok(NashVerdict::NoCounterexampleUpToDepth { depth }) => format!("no deviation within depth {depth}"),
                Ok(NashVerdict::Refuted { witness: w }) => format!(
                    "{} deviates at {}: {} instead of {} at k = {}",
                    w.agent,
                    w.changes.iter().map(|c| c.node.as_str()).collect::<Vec<_>>().join(", "),
                    fmt_rational(&w.deviation_value),
                    fmt_rational(&w.original_value),
                    w.k_min
                ),
                Err(e) => e.to_string(),
            };
            json!({
                "name": name,
                "game": np.game,
                "altl": always_leads_to_leaf(p).contains(p.root()),
                "sgpe": cert.verdict,
                "failure": failure,
                "nash": nash,
            })
        })
        .collect();
    json!({ "ok": true, "games": m.games.keys().collect::<Vec<_>>(), "profiles": profiles })
}

/// Escalation search on every game of the model.
pub fn escalation(source: &str) -> Value {
    let m = match parsed(source) {
        Ok(m) => m,
        Err(e) => return e,
    };
    let games: Vec<Value> = m
        .games
        .iter()
        .map(|(name, g)| match find_escalation(g, DEFAULT_ENUM_CAP) {
            Ok(w) => json!({
                "name": name,
                "found": w.is_some(),
                "stem": w.as_ref().map(|w| steps(&w.stem)),
                "cycle": w.as_ref().map(|w| steps(&w.cycle)),
            }),
            Err(e) => json!({ "name": name, "error": e.to_string() }),
        })
        .collect();
    json!({ "ok": true, "games": games })
}

fn steps(s: &[regal::escalation::Step]) -> Vec<String> {
    s.iter().map(|s| format!("{} at {} plays {}", s.agent, s.node, s.direction)).collect()
}

/// Utilities of a profile's root for counter values `0..=kmax`, and the
/// first moves of its play.
pub fn utilities(source: &str, profile: &str, kmax: u32) -> Value {
    let m = match parsed(source) {
        Ok(m) => m,
        Err(e) => return e,
    };
    let Some(p) = m.profile(profile) else {
        return json!({ "ok": false, "diagnostics": [{ "code": "", "message": format!("unknown profile {profile}"), "line": 0, "column": 0 }] });
    };
    let u = s2u(p, p.root());
    let agents: Vec<Value> = (0..p.agents().len())
        .map(|a| {
            let f = u.get(regal::graph::AgentId(a));
            json!({
                "agent": p.agents()[a],
                "expr": f.map(|f| f.to_string()),
                "values": f.map(|f| (0..=u64::from(kmax)).map(|k| fmt_rational(&f.eval(k))).collect::<Vec<_>>()),
            })
        })
        .collect();
    let h = history(p, 12);
    let play: String = h.choices.iter().map(|c| c.letter()).collect();
    json!({ "ok": true, "agents": agents, "play": play, "terminated": h.terminated })
}

#[wasm_bindgen(js_name = analyze)]
pub fn analyze_js(source: &str) -> String {
    analyze(source).to_string()
}

#[wasm_bindgen(js_name = escalation)]
pub fn escalation_js(source: &str) -> String {
    escalation(source).to_string()
}

#[wasm_bindgen(js_name = utilities)]
pub fn utilities_js(source: &str, profile: &str, kmax: u32) -> String {
    utilities(source, profile, kmax).to_string()
}

/// Canonical text of a built-in model, to seed the editor.
#[wasm_bindgen(js_name = builtinSource)]
pub fn builtin_source(name: &str) -> String {
    regal::builtin::by_name(name, None).map(|m| dsl::serialize(&m)).unwrap_or_default()
}
