//! Animation of a machine: constant binding, enabled-event offers, firing,
//! invariant monitoring, undo and trace export.

pub mod server;

use std::collections::BTreeMap;

use serde_json::{json, Value as Json};
use thiserror::Error;

use crate::eb::*;

pub const DEFAULT_OFFER_CAP: usize = 50;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SimError {
    #[error(transparent)]
    Type(#[from] TypeError),
    #[error("project has no machine `{0}`")]
    UnknownMachine(String),
    #[error("project has no machine to animate")]
    NoMachine,
    #[error("no binding of the constants satisfies the axioms within bounds")]
    NoConstantModel,
    #[error("`{0}` is not a constant of the context")]
    UnknownConstant(String),
    #[error("INITIALISATION violates {}", .0.join(", "))]
    InitInvariantViolation(Vec<String>),
    #[error("INITIALISATION failed: {0}")]
    InitFailed(EventError),
    #[error("machine has no event `{0}`")]
    UnknownEvent(String),
    #[error("bad parameters: {0}")]
    BadParams(String),
    #[error("guard {0} does not hold")]
    GuardFailed(String),
    #[error("event error: {0}")]
    EventError(String),
    #[error("nothing to undo")]
    NothingToUndo,
    #[error("cannot enumerate `{0}` within bounds")]
    NotEnumerable(String),
    #[error("{0}")]
    Eval(String),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InvariantStatus {
    pub label: String,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Step {
    pub event: String,
    pub params: Valuation,
    /// Variables after the step.
    pub state: Valuation,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EventOffer {
    pub event: String,
    pub params: Vec<Valuation>,
    /// More valuations exist beyond the cap.
    pub truncated: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StepResult {
    pub state: Valuation,
    pub previous: Valuation,
    pub invariants: Vec<InvariantStatus>,
    pub step: usize,
}

#[derive(Debug, Clone)]
pub struct SimSession {
    tp: TypedProject,
    machine: String,
    constants: Valuation,
    /// `states[0]` is the post-INITIALISATION state; `trace[i]` leads from
    /// `states[i]` to `states[i + 1]`.
    states: Vec<Valuation>,
    trace: Vec<Step>,
    invariants: Vec<InvariantStatus>,
    bounds: Bounds,
    pub offer_cap: usize,
}

/// Every assignment of `names` (in order) satisfying `preds`, up to `limit`.
/// Each predicate is checked as soon as its names are bound; ill-defined
/// predicates count as false.
fn solve(
    names: &[(String, Vec<Value>)],
    preds: &[&Pred],
    base: &Valuation,
    bounds: &Bounds,
    limit: usize,
) -> Result<Vec<Valuation>, SimError> {
    let mut at_depth: Vec<Vec<&Pred>> = vec![Vec::new(); names.len() + 1];
    for p in preds {
        let fv = p.free_names();
        let depth = names.iter().rposition(|(n, _)| fv.contains(n)).map_or(0, |i| i + 1);
        at_depth[depth].push(p);
    }
    let mut env = base.clone();
    let mut out = Vec::new();
    if holds_all(&at_depth[0], &env, bounds)? {
        descend(names, &at_depth, 0, &mut env, bounds, limit, &mut out)?;
    }
    Ok(out)
}

fn holds_all(preds: &[&Pred], env: &Valuation, bounds: &Bounds) -> Result<bool, SimError> {
    for p in preds {
        match eval_pred(p, env, bounds) {
            Ok(true) => {}
            Ok(false) => return Ok(false),
            Err(e) if e.is_wd() => return Ok(false),
            Err(e) => return Err(SimError::Eval(e.to_string())),
        }
    }
    Ok(true)
}

fn descend(
    names: &[(String, Vec<Value>)],
    at_depth: &[Vec<&Pred>],
    depth: usize,
    env: &mut Valuation,
    bounds: &Bounds,
    limit: usize,
    out: &mut Vec<Valuation>,
) -> Result<(), SimError> {
    if depth == names.len() {
        out.push(env.restrict(names.iter().map(|(n, _)| n)));
        return Ok(());
    }
    let (name, values) = &names[depth];
    for v in values {
        if out.len() >= limit {
            break;
        }
        env.insert(name.clone(), v.clone());
        if holds_all(&at_depth[depth + 1], env, bounds)? {
            descend(names, at_depth, depth + 1, env, bounds, limit, out)?;
        }
    }
    env.remove(name);
    Ok(())
}

fn domains(names: &[String], types: &BTreeMap<String, Type>, bounds: &Bounds) -> Result<Vec<(String, Vec<Value>)>, SimError> {
    names
        .iter()
        .map(|n| {
            let values = enumerate(&types[n], bounds).map_err(|_| SimError::NotEnumerable(n.clone()))?;
            Ok((n.clone(), values))
        })
        .collect()
}

impl SimSession {
    /// Starts a session on `machine` (default: the most concrete one).
    /// Constants missing from `fixed` take their least axiom-satisfying values.
    pub fn new(project: &Project, machine: Option<&str>, fixed: &Valuation, bounds: Bounds) -> Result<SimSession, SimError> {
        let tp = typecheck(project)?;
        let m = match machine {
            Some(n) => tp.machine(n).ok_or_else(|| SimError::UnknownMachine(n.to_string()))?,
            None => tp.project.most_concrete().ok_or(SimError::NoMachine)?,
        };
        let ctx = tp.context_of(m);
        for (n, _) in fixed.iter() {
            if !ctx.constants.contains(n) {
                return Err(SimError::UnknownConstant(n.clone()));
            }
        }
        let mut base = Valuation::new();
        base.bind_carriers(&ctx.sets, &bounds);
        base.extend(fixed);
        let free: Vec<String> = ctx.constants.iter().filter(|c| !fixed.contains(c)).cloned().collect();
        let names = domains(&free, tp.constant_types(m), &bounds)?;
        let axioms: Vec<&Pred> = ctx.axioms.iter().map(|a| &a.pred).collect();
        let model = solve(&names, &axioms, &base, &bounds, 1)?.pop().ok_or(SimError::NoConstantModel)?;
        let mut constants = fixed.clone();
        constants.extend(&model);

        let init = m.event(INITIALISATION).expect("typecheck requires INITIALISATION");
        let mut env = base;
        env.extend(&model);
        let post = apply_event(init, &env, &Valuation::new(), &bounds).map_err(SimError::InitFailed)?;
        let state = post.restrict(&m.variables);
        let machine = m.name.clone();
        let mut s = SimSession {
            tp,
            machine,
            constants,
            states: vec![state],
            trace: Vec::new(),
            invariants: Vec::new(),
            bounds,
            offer_cap: DEFAULT_OFFER_CAP,
        };
        s.invariants = s.evaluate_invariants();
        let broken: Vec<String> = s.invariants.iter().filter(|i| !i.holds).map(|i| i.label.clone()).collect();
        if !broken.is_empty() {
            return Err(SimError::InitInvariantViolation(broken));
        }
        Ok(s)
    }

    pub fn machine(&self) -> &Machine {
        self.tp.machine(&self.machine).expect("session machine exists")
    }

    pub fn bounds(&self) -> &Bounds {
        &self.bounds
    }

    pub fn constants(&self) -> &Valuation {
        &self.constants
    }

    /// Current values of the machine variables.
    pub fn state(&self) -> &Valuation {
        self.states.last().expect("at least the initial state")
    }

    pub fn previous(&self) -> Option<&Valuation> {
        self.states.len().checked_sub(2).map(|i| &self.states[i])
    }

    pub fn trace(&self) -> &[Step] {
        &self.trace
    }

    pub fn invariant_status(&self) -> &[InvariantStatus] {
        &self.invariants
    }

    pub fn invariants_ok(&self) -> bool {
        self.invariants.iter().all(|i| i.holds)
    }

    fn env(&self) -> Valuation {
        let mut env = Valuation::new();
        env.bind_carriers(&self.tp.context_of(self.machine()).sets, &self.bounds);
        env.extend(&self.constants);
        env.extend(self.state());
        env
    }

    fn evaluate_invariants(&self) -> Vec<InvariantStatus> {
        let env = self.env();
        self.tp
            .all_invariants(self.machine())
            .into_iter()
            .map(|i| InvariantStatus { label: i.label.clone(), holds: eval_pred(&i.pred, &env, &self.bounds).unwrap_or(false) })
            .collect()
    }

    /// Parameter valuations enabling `event`, up to `limit`.
    pub fn offers_for(&self, event: &str, limit: usize) -> Result<Vec<Valuation>, SimError> {
        let m = self.machine();
        let ev = m.event(event).ok_or_else(|| SimError::UnknownEvent(event.to_string()))?;
        let names = domains(&ev.params, self.tp.param_types(m, event), &self.bounds)?;
        let guards: Vec<&Pred> = ev.guards.iter().map(|g| &g.pred).collect();
        solve(&names, &guards, &self.env(), &self.bounds, limit)
    }

    /// Enabled events other than INITIALISATION, each with at most
    /// `offer_cap` parameter valuations.
    pub fn enabled_events(&self) -> Result<Vec<EventOffer>, SimError> {
        let mut out = Vec::new();
        for ev in self.machine().events.iter().filter(|e| !e.is_initialisation()) {
            let mut params = self.offers_for(&ev.name, self.offer_cap + 1)?;
            if params.is_empty() {
                continue;
            }
            let truncated = params.len() > self.offer_cap;
            params.truncate(self.offer_cap);
            out.push(EventOffer { event: ev.name.clone(), params, truncated });
        }
        Ok(out)
    }

    /// Decodes JSON parameters against the event's parameter types.
    pub fn parse_params(&self, event: &str, params: &serde_json::Map<String, Json>) -> Result<Valuation, SimError> {
        let m = self.machine();
        let ev = m.event(event).ok_or_else(|| SimError::UnknownEvent(event.to_string()))?;
        let types = self.tp.param_types(m, event);
        for k in params.keys() {
            if !ev.params.contains(k) {
                return Err(SimError::BadParams(format!("`{event}` has no parameter `{k}`")));
            }
        }
        ev.params
            .iter()
            .map(|p| {
                let j = params.get(p).ok_or_else(|| SimError::BadParams(format!("missing parameter `{p}`")))?;
                let v = Value::from_json(j, &types[p], &self.bounds).map_err(SimError::BadParams)?;
                Ok((p.clone(), v))
            })
            .collect()
    }

    pub fn fire(&mut self, event: &str, params: &Valuation) -> Result<StepResult, SimError> {
        let m = self.machine();
        let ev = m.event(event).filter(|e| !e.is_initialisation()).ok_or_else(|| SimError::UnknownEvent(event.to_string()))?;
        for p in &ev.params {
            if !params.contains(p) {
                return Err(SimError::BadParams(format!("missing parameter `{p}`")));
            }
        }
        let params = params.restrict(&ev.params);
        let post = apply_event(ev, &self.env(), &params, &self.bounds).map_err(|e| match e {
            EventError::GuardFailed(label) => SimError::GuardFailed(label),
            other => SimError::EventError(other.to_string()),
        })?;
        let state = post.restrict(&m.variables);
        self.trace.push(Step { event: event.to_string(), params, state: state.clone() });
        self.states.push(state);
        self.invariants = self.evaluate_invariants();
        Ok(self.step_result())
    }

    pub fn step_result(&self) -> StepResult {
        StepResult {
            state: self.state().clone(),
            previous: self.previous().cloned().unwrap_or_default(),
            invariants: self.invariants.clone(),
            step: self.trace.len(),
        }
    }

    pub fn undo(&mut self) -> Result<StepResult, SimError> {
        if self.trace.is_empty() {
            return Err(SimError::NothingToUndo);
        }
        self.trace.pop();
        self.states.pop();
        self.invariants = self.evaluate_invariants();
        Ok(self.step_result())
    }

    pub fn reset(&mut self) -> StepResult {
        self.trace.clear();
        self.states.truncate(1);
        self.invariants = self.evaluate_invariants();
        self.step_result()
    }

    /// `{variables, previous, constants, invariants, step}`
    pub fn state_json(&self) -> Json {
        let r = self.step_result();
        json!({
            "variables": r.state.to_json(),
            "previous": r.previous.to_json(),
            "constants": self.constants.to_json(),
            "invariants": invariants_json(&r.invariants),
            "step": r.step,
        })
    }

    pub fn trace_json(&self) -> Json {
        json!({
            "machine": self.machine,
            "constants": self.constants.to_json(),
            "initial": self.states[0].to_json(),
            "steps": self.trace.iter().map(|s| json!({
                "event": s.event,
                "params": s.params.to_json(),
                "state": s.state.to_json(),
            })).collect::<Vec<_>>(),
        })
    }
}

pub fn invariants_json(inv: &[InvariantStatus]) -> Json {
    Json::Array(inv.iter().map(|i| json!({"label": i.label, "holds": i.holds})).collect())
}

impl StepResult {
    pub fn to_json(&self) -> Json {
        json!({
            "variables": self.state.to_json(),
            "previous": self.previous.to_json(),
            "invariants": invariants_json(&self.invariants),
            "step": self.step,
        })
    }
}

impl EventOffer {
    pub fn to_json(&self) -> Json {
        json!({
            "event": self.event,
            "params": self.params.iter().map(Valuation::to_json).collect::<Vec<_>>(),
            "truncated": self.truncated,
        })
    }
}

/// Decodes JSON constant values against the types of `machine`'s context.
pub fn decode_constants(
    project: &Project,
    machine: Option<&str>,
    values: &serde_json::Map<String, Json>,
    bounds: &Bounds,
) -> Result<Valuation, SimError> {
    if values.is_empty() {
        return Ok(Valuation::new());
    }
    let tp = typecheck(project)?;
    let m = match machine {
        Some(n) => tp.machine(n).ok_or_else(|| SimError::UnknownMachine(n.to_string()))?,
        None => tp.project.most_concrete().ok_or(SimError::NoMachine)?,
    };
    let types = tp.constant_types(m);
    values
        .iter()
        .map(|(k, j)| {
            let ty = types.get(k).ok_or_else(|| SimError::UnknownConstant(k.clone()))?;
            let v = Value::from_json(j, ty, bounds).map_err(SimError::BadParams)?;
            Ok((k.clone(), v))
        })
        .collect()
}
