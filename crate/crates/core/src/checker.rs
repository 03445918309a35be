//! Bounded discharge of proof obligations by exhaustive enumeration.

use std::collections::{BTreeMap, BTreeSet};
use std::time::{Duration, Instant};

use rayon::prelude::*;
use serde::Serialize;
use serde_json::Value as Json;

use crate::eb::*;
use crate::po::{gen_project_pos, PoKind, ProofObligation, RefinementShapeError};
use crate::translate::TranslationReport;

pub const DEFAULT_BUDGET: u64 = 100_000_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Status {
    DischargedWithinBounds,
    Violated(Valuation),
    Unsupported(Unsupported),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Unsupported {
    BudgetExceeded { budget: u64 },
    NotEnumerable(String),
    Eval(String),
    ReplayFailed(String),
}

impl std::fmt::Display for Unsupported {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Unsupported::BudgetExceeded { budget } => write!(f, "case budget of {budget} exceeded"),
            Unsupported::NotEnumerable(s) => write!(f, "cannot enumerate {s}"),
            Unsupported::Eval(s) => write!(f, "evaluation error: {s}"),
            Unsupported::ReplayFailed(s) => write!(f, "counterexample failed replay: {s}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Verdict {
    pub po_name: String,
    pub status: Status,
    /// Complete valuations on which the goal was evaluated.
    pub enumerated_cases: u64,
    pub elapsed: Duration,
}

impl Verdict {
    pub fn is_violated(&self) -> bool {
        matches!(self.status, Status::Violated(_))
    }

    pub fn counterexample(&self) -> Option<&Valuation> {
        match &self.status {
            Status::Violated(v) => Some(v),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CheckOptions {
    pub bounds: Bounds,
    pub budget: u64,
    /// Include syntactically discharged obligations.
    pub all: bool,
}

impl Default for CheckOptions {
    fn default() -> Self {
        CheckOptions { bounds: Bounds::default(), budget: DEFAULT_BUDGET, all: false }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SourceSpan {
    pub file: String,
    pub line: u32,
    pub col: u32,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct PoResult {
    pub name: String,
    pub machine: String,
    pub kind: PoKind,
    pub status: &'static str,
    pub cases: u64,
    pub counterexample: Option<Json>,
    pub source_span: Option<SourceSpan>,
    pub detail: Option<String>,
}

/// Byte-stable summary of a checking run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct CheckReport {
    pub project: String,
    pub bounds: Bounds,
    pub pos: Vec<PoResult>,
}

impl CheckReport {
    pub fn violated(&self) -> impl Iterator<Item = &PoResult> {
        self.pos.iter().filter(|p| p.status == "violated")
    }

    pub fn unsupported(&self) -> impl Iterator<Item = &PoResult> {
        self.pos.iter().filter(|p| p.status == "unsupported")
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }
}

/// JSON Schema of [`CheckReport`].
pub const REPORT_SCHEMA: &str = include_str!("../schema/check-report.schema.json");

struct Search<'a> {
    po: &'a ProofObligation,
    bounds: &'a Bounds,
    budget: u64,
    spent: u64,
    cases: u64,
}

enum Outcome {
    Exhausted,
    Found(Valuation),
    Stop(Unsupported),
}

/// One connected group of names with the hypotheses over them.
struct Component {
    names: Vec<(String, Vec<Value>)>,
    /// Hypotheses keyed by the depth at which all their names are bound.
    checks: Vec<Vec<usize>>,
    has_goal: bool,
}

impl Search<'_> {
    fn tick(&mut self) -> Result<(), Unsupported> {
        self.spent += 1;
        if self.spent > self.budget {
            Err(Unsupported::BudgetExceeded { budget: self.budget })
        } else {
            Ok(())
        }
    }

    fn holds(&self, p: &Pred, env: &Valuation) -> Result<bool, Unsupported> {
        match eval_pred(p, env, self.bounds) {
            Ok(b) => Ok(b),
            Err(e) if e.is_wd() => Ok(false),
            Err(e) => Err(Unsupported::Eval(e.to_string())),
        }
    }

    /// Whether the goal fails under `env`.
    fn goal_fails(&self, env: &Valuation) -> Result<bool, Unsupported> {
        match eval_pred(&self.po.goal, env, self.bounds) {
            Ok(b) => Ok(!b),
            // Ill-defined goals of other kinds are covered by the WD obligations.
            Err(e) if e.is_wd() => Ok(self.po.kind == PoKind::Wd),
            Err(e) => Err(Unsupported::Eval(e.to_string())),
        }
    }

    /// Depth-first enumeration; with a goal, finds a failing case, otherwise
    /// any case satisfying the hypotheses.
    fn dfs(&mut self, c: &Component, depth: usize, env: &mut Valuation) -> Outcome {
        if depth == c.names.len() {
            if !c.has_goal {
                return Outcome::Found(env.clone());
            }
            self.cases += 1;
            return match self.goal_fails(env) {
                Ok(true) => Outcome::Found(env.clone()),
                Ok(false) => Outcome::Exhausted,
                Err(u) => Outcome::Stop(u),
            };
        }
        let (name, values) = &c.names[depth];
        for v in values {
            if let Err(u) = self.tick() {
                return Outcome::Stop(u);
            }
            env.insert(name.clone(), v.clone());
            let mut ok = true;
            for &h in &c.checks[depth + 1] {
                match self.holds(&self.po.hypotheses[h], env) {
                    Ok(true) => {}
                    Ok(false) => {
                        ok = false;
                        break;
                    }
                    Err(u) => return Outcome::Stop(u),
                }
            }
            if ok {
                match self.dfs(c, depth + 1, env) {
                    Outcome::Exhausted => {}
                    other => return other,
                }
            }
        }
        env.remove(name);
        Outcome::Exhausted
    }
}

/// Splits the free names into groups linked by shared hypotheses.
fn components(po: &ProofObligation, bounds: &Bounds) -> Result<Vec<Component>, Unsupported> {
    let free: BTreeSet<&str> = po.free_names.iter().map(|(n, _)| n.as_str()).collect();
    let order: BTreeMap<&str, usize> = po.free_names.iter().enumerate().map(|(i, (n, _))| (n.as_str(), i)).collect();
    let mut parent: Vec<usize> = (0..po.free_names.len()).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        p[x] = r;
        r
    }
    let names_of = |p: &Pred| -> Vec<usize> {
        p.free_names().iter().filter(|n| free.contains(n.as_str())).map(|n| order[n.as_str()]).collect()
    };
    let hyp_names: Vec<Vec<usize>> = po.hypotheses.iter().map(names_of).collect();
    let goal_names = names_of(&po.goal);
    for ns in hyp_names.iter().chain(std::iter::once(&goal_names)) {
        for w in ns.windows(2) {
            let (a, b) = (find(&mut parent, w[0]), find(&mut parent, w[1]));
            parent[a.max(b)] = a.min(b);
        }
    }
    let mut roots: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for i in 0..po.free_names.len() {
        let r = find(&mut parent, i);
        roots.entry(r).or_default().push(i);
    }
    let goal_root = goal_names.first().map(|&g| find(&mut parent, g));

    let mut out = Vec::new();
    if goal_root.is_none() {
        out.push(Component { names: vec![], checks: vec![closed(&hyp_names)], has_goal: true });
    }
    for (root, members) in roots {
        let mut names = Vec::new();
        for &i in &members {
            let (n, ty) = &po.free_names[i];
            let values = enumerate(ty, bounds).map_err(|e| Unsupported::NotEnumerable(format!("`{n}`: {e}")))?;
            names.push((n.clone(), values));
        }
        let mut checks = vec![Vec::new(); members.len() + 1];
        for (h, ns) in hyp_names.iter().enumerate() {
            if let Some(&first) = ns.first() {
                if find(&mut parent, first) == root {
                    let depth = ns.iter().map(|i| members.iter().position(|m| m == i).unwrap()).max().unwrap();
                    checks[depth + 1].push(h);
                }
            }
        }
        out.push(Component { names, checks, has_goal: Some(root) == goal_root });
    }
    // Closed hypotheses go with whichever component is searched first.
    if goal_root.is_some() {
        out.sort_by_key(|c| !c.has_goal);
        out[0].checks[0].extend(closed(&hyp_names));
    }
    Ok(out)
}

fn closed(hyp_names: &[Vec<usize>]) -> Vec<usize> {
    hyp_names.iter().enumerate().filter(|(_, ns)| ns.is_empty()).map(|(h, _)| h).collect()
}

/// Checks `po` over every valuation of its free names within `bounds`.
pub fn check_po(po: &ProofObligation, bounds: &Bounds, budget: u64) -> Verdict {
    let start = Instant::now();
    let mut search = Search { po, bounds, budget, spent: 0, cases: 0 };
    let status = run(&mut search);
    Verdict { po_name: po.name.clone(), status, enumerated_cases: search.cases, elapsed: start.elapsed() }
}

fn run(search: &mut Search<'_>) -> Status {
    let po = search.po;
    let comps = match components(po, search.bounds) {
        Ok(c) => c,
        Err(u) => return Status::Unsupported(u),
    };
    let mut base = Valuation::new();
    base.bind_carriers(&po.sets, search.bounds);
    // Side components only matter when unsatisfiable, which makes the
    // obligation hold vacuously.
    let mut witness = base.clone();
    for c in comps.iter().filter(|c| !c.has_goal) {
        let mut env = base.clone();
        match search.holds_all(&c.checks[0], &env) {
            Ok(true) => {}
            Ok(false) => return Status::DischargedWithinBounds,
            Err(u) => return Status::Unsupported(u),
        }
        match search.dfs(c, 0, &mut env) {
            Outcome::Found(v) => witness.extend(&v),
            Outcome::Exhausted => return Status::DischargedWithinBounds,
            Outcome::Stop(u) => return Status::Unsupported(u),
        }
    }
    let goal = comps.iter().find(|c| c.has_goal).expect("goal component");
    let mut env = base.clone();
    match search.holds_all(&goal.checks[0], &env) {
        Ok(true) => {}
        Ok(false) => return Status::DischargedWithinBounds,
        Err(u) => return Status::Unsupported(u),
    }
    match search.dfs(goal, 0, &mut env) {
        Outcome::Exhausted => Status::DischargedWithinBounds,
        Outcome::Stop(u) => Status::Unsupported(u),
        Outcome::Found(v) => {
            witness.extend(&v);
            match replay(po, &witness, search.bounds) {
                Ok(()) => Status::Violated(witness.restrict(po.free_names.iter().map(|(n, _)| n))),
                Err(why) => Status::Unsupported(Unsupported::ReplayFailed(why)),
            }
        }
    }
}

impl Search<'_> {
    fn holds_all(&self, hyps: &[usize], env: &Valuation) -> Result<bool, Unsupported> {
        for &h in hyps {
            if !self.holds(&self.po.hypotheses[h], env)? {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

/// Re-evaluates the whole sequent under `cex`: every hypothesis true and the
/// goal false (or ill-defined for WD obligations).
pub fn replay(po: &ProofObligation, cex: &Valuation, bounds: &Bounds) -> Result<(), String> {
    let mut env = cex.clone();
    env.bind_carriers(&po.sets, bounds);
    for (i, h) in po.hypotheses.iter().enumerate() {
        match eval_pred(h, &env, bounds) {
            Ok(true) => {}
            Ok(false) => return Err(format!("hypothesis {} is false", i + 1)),
            Err(e) => return Err(format!("hypothesis {}: {e}", i + 1)),
        }
    }
    match eval_pred(&po.goal, &env, bounds) {
        Ok(false) => Ok(()),
        Err(e) if e.is_wd() && po.kind == PoKind::Wd => Ok(()),
        Ok(true) => Err("goal holds".into()),
        Err(e) => Err(format!("goal: {e}")),
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CheckError {
    #[error(transparent)]
    Type(#[from] TypeError),
    #[error(transparent)]
    Shape(#[from] RefinementShapeError),
}

/// Generates and checks every obligation of `project`.
pub fn check_all(project: &Project, opts: &CheckOptions, report: Option<&TranslationReport>) -> Result<CheckReport, CheckError> {
    let tp = typecheck(project)?;
    let pos: Vec<ProofObligation> = gen_project_pos(&tp)?.into_iter().filter(|p| opts.all || !p.trivial).collect();
    Ok(check_pos(&project.name, &pos, opts, report))
}

/// Checks `pos` in parallel; the report keeps their order.
pub fn check_pos(project: &str, pos: &[ProofObligation], opts: &CheckOptions, report: Option<&TranslationReport>) -> CheckReport {
    let verdicts: Vec<Verdict> = pos.par_iter().map(|p| check_po(p, &opts.bounds, opts.budget)).collect();
    let results = pos
        .iter()
        .zip(verdicts)
        .map(|(po, v)| {
            let (status, counterexample, detail) = match v.status {
                Status::DischargedWithinBounds => ("discharged", None, None),
                Status::Violated(cex) => ("violated", Some(cex.to_json()), None),
                Status::Unsupported(u) => ("unsupported", None, Some(u.to_string())),
            };
            let source_span = (status == "violated").then(|| report.and_then(|r| source_span(r, &po.name))).flatten();
            PoResult {
                name: po.name.clone(),
                machine: po.machine.clone(),
                kind: po.kind,
                status,
                cases: v.enumerated_cases,
                counterexample,
                source_span,
                detail,
            }
        })
        .collect();
    CheckReport { project: project.to_string(), bounds: opts.bounds, pos: results }
}

fn source_span(r: &TranslationReport, po_name: &str) -> Option<SourceSpan> {
    let s = r.span_for_po(po_name)?;
    let file = r.source.clone().unwrap_or_else(|| format!("{}.sol", r.contract));
    Some(SourceSpan { file, line: s.line, col: s.col })
}
