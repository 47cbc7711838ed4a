//! Equation checks: extensional comparison on fresh arguments, comparison
//! of closed instances, and step-by-step replay of conversion chains.
//!
//! Checks are data. The built-in catalog lives in `catalog/paper.toml` and
//! uses the same format that `clsh check --catalog` reads.

use std::collections::{BTreeSet, HashMap};
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::compile::expand_definitions;
use crate::error::{Error, Result};
use crate::rewrite::{
    normalize_layered, reduce, verify_step, Direction, RewriteRule, RuleSet, Status, Strategy, Trace,
    TraceStep, DEFAULT_MAX_STEPS,
};
use crate::syntax::{parse_with, print, SyntaxConfig};
use crate::term::{alpha_eq, free_vars, fresh_var, positions, substitute_all, Position, Term};

pub const PAPER_CATALOG: &str = include_str!("../catalog/paper.toml");

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Pass,
    Fail,
    Budget,
}

/// One line of a conversion chain. The first line carries only a term.
#[derive(Debug, Clone)]
pub struct ChainStep {
    pub term: Term,
    pub rule: Option<String>,
    pub pos: Option<Position>,
    pub direction: Direction,
}

#[derive(Debug, Clone)]
pub enum Mode {
    /// Apply both sides to `arity` fresh variables.
    Extensional { arity: usize },
    /// Substitute the bindings into both sides.
    Instance { bindings: Vec<(String, Term)> },
    /// Replay a conversion chain from `lhs` to `rhs`.
    Chain { script: Vec<ChainStep> },
}

impl Mode {
    pub fn label(&self) -> &'static str {
        match self {
            Mode::Extensional { .. } => "extensional",
            Mode::Instance { .. } => "instance",
            Mode::Chain { .. } => "chain",
        }
    }
}

#[derive(Debug, Clone)]
pub struct EquationCheck {
    pub name: String,
    pub group: String,
    pub lhs: Term,
    pub rhs: Term,
    pub mode: Mode,
    /// Built-in rules the check runs under (base or derived).
    pub rules: RuleSet,
    pub hypotheses: RuleSet,
    pub max_steps: usize,
    pub expect: Verdict,
    pub note: String,
}

#[derive(Debug, Clone)]
pub struct CheckReport {
    pub name: String,
    pub group: String,
    pub mode: &'static str,
    pub verdict: Verdict,
    pub expected: Verdict,
    /// Final forms: normal forms for the reducing modes, chain endpoints
    /// for replays.
    pub lhs_nf: Term,
    pub rhs_nf: Term,
    pub traces: Option<(Trace, Trace)>,
    pub replay: Vec<TraceStep>,
    /// 1-based index of the first chain step that does not check.
    pub failed_step: Option<usize>,
    /// For chains: whether the endpoints also meet by plain normalisation
    /// under the same rules.
    pub joinable: Option<bool>,
    pub detail: String,
}

impl CheckReport {
    pub fn ok(&self) -> bool {
        self.verdict == self.expected
    }

    pub fn to_json(&self) -> serde_json::Value {
        let mut v = serde_json::json!({
            "name": self.name,
            "group": self.group,
            "mode": self.mode,
            "verdict": self.verdict,
            "expected": self.expected,
            "ok": self.ok(),
            "lhs_nf": print(&self.lhs_nf),
            "rhs_nf": print(&self.rhs_nf),
            "detail": self.detail,
        });
        if let Some((l, r)) = &self.traces {
            v["traces"] = serde_json::json!([l.to_json(), r.to_json()]);
        }
        if !self.replay.is_empty() {
            v["replay"] = self
                .replay
                .iter()
                .map(|s| {
                    serde_json::json!({
                        "rule": s.rule, "pos": s.pos, "dir": s.direction, "result": print(&s.result),
                    })
                })
                .collect();
        }
        if let Some(i) = self.failed_step {
            v["failed_step"] = i.into();
        }
        if let Some(j) = self.joinable {
            v["joinable"] = j.into();
        }
        v
    }
}

/// How derived combinators are interpreted while running a suite.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum RuleMode {
    /// Derived combinators reduce by their own rules.
    #[default]
    Rules,
    /// Derived combinators are replaced by their compiled definitions and
    /// only the base axioms (plus hypotheses) are used. Chain steps taken by
    /// a derived rule are accepted when both sides, expanded, have the same
    /// normal form.
    Definitions,
}

#[derive(Debug, Clone, Default)]
pub struct SuiteOptions {
    /// Overrides every check's step budget.
    pub max_steps: Option<usize>,
    pub rule_mode: RuleMode,
}

fn compare(lhs: &Term, rhs: &Term, layers: &[&RuleSet], max_steps: usize) -> CheckReport {
    let lt = normalize_layered(lhs, layers, max_steps);
    let rt = normalize_layered(rhs, layers, max_steps);
    let verdict = if !lt.is_normal_form() || !rt.is_normal_form() {
        Verdict::Budget
    } else if alpha_eq(lt.result(), rt.result()) {
        Verdict::Pass
    } else {
        Verdict::Fail
    };
    let detail = match verdict {
        Verdict::Pass => format!("both sides reach {}", lt.result()),
        Verdict::Fail => format!("{} vs {}", lt.result(), rt.result()),
        Verdict::Budget => format!("budget of {max_steps} steps exhausted"),
    };
    CheckReport {
        name: String::new(),
        group: String::new(),
        mode: "",
        verdict,
        expected: Verdict::Pass,
        lhs_nf: lt.result().clone(),
        rhs_nf: rt.result().clone(),
        traces: Some((lt, rt)),
        replay: Vec::new(),
        failed_step: None,
        joinable: None,
        detail,
    }
}

/// Applies both sides to `arity` fresh variables and compares normal forms.
pub fn check_extensional(lhs: &Term, rhs: &Term, arity: usize, rules: &RuleSet, max_steps: usize) -> CheckReport {
    extensional(lhs, rhs, arity, &[rules], max_steps)
}

fn extensional(lhs: &Term, rhs: &Term, arity: usize, layers: &[&RuleSet], max_steps: usize) -> CheckReport {
    let mut avoid: BTreeSet<String> = free_vars(lhs);
    avoid.extend(free_vars(rhs));
    let vars: Vec<Term> = (1..=arity)
        .map(|i| {
            let v = fresh_var(&avoid, &format!("v{i}"));
            avoid.insert(v.clone());
            Term::var(v)
        })
        .collect();
    let mut r = compare(
        &Term::apps(lhs.clone(), vars.clone()),
        &Term::apps(rhs.clone(), vars),
        layers,
        max_steps,
    );
    r.name = "extensional".into();
    r.mode = "extensional";
    r
}

/// Substitutes `bindings` into both sides and compares normal forms.
pub fn check_instance(
    lhs: &Term,
    rhs: &Term,
    bindings: &[(String, Term)],
    rules: &RuleSet,
    max_steps: usize,
) -> CheckReport {
    instance(lhs, rhs, bindings, &[rules], max_steps)
}

fn instance(lhs: &Term, rhs: &Term, bindings: &[(String, Term)], layers: &[&RuleSet], max_steps: usize) -> CheckReport {
    let map: HashMap<String, Term> = bindings.iter().cloned().collect();
    let mut r = compare(&substitute_all(lhs, &map), &substitute_all(rhs, &map), layers, max_steps);
    r.name = "instance".into();
    r.mode = "instance";
    r
}

/// Replays `script` under `rules`: every adjacent pair must be one
/// application of the named rule (right-to-left for backward steps), and
/// the chain must run from `lhs` to `rhs`.
pub fn replay_chain(script: &[ChainStep], lhs: &Term, rhs: &Term, rules: &RuleSet) -> CheckReport {
    replay_with(script, lhs, rhs, rules, None)
}

fn replay_with(
    script: &[ChainStep],
    lhs: &Term,
    rhs: &Term,
    rules: &RuleSet,
    by_definition: Option<(&BTreeSet<String>, usize)>,
) -> CheckReport {
    let mut report = CheckReport {
        name: "chain".into(),
        group: String::new(),
        mode: "chain",
        verdict: Verdict::Fail,
        expected: Verdict::Pass,
        lhs_nf: script.first().map(|s| s.term.clone()).unwrap_or_else(|| lhs.clone()),
        rhs_nf: script.last().map(|s| s.term.clone()).unwrap_or_else(|| rhs.clone()),
        traces: None,
        replay: Vec::new(),
        failed_step: None,
        joinable: None,
        detail: String::new(),
    };
    let Some(first) = script.first() else {
        report.detail = "empty chain".into();
        return report;
    };
    for (i, pair) in script.windows(2).enumerate() {
        let (before, step) = (&pair[0].term, &pair[1]);
        let index = i + 1;
        let fail = |mut report: CheckReport, why: String| {
            report.failed_step = Some(index);
            report.detail = format!("step {index}: {why}");
            report
        };
        let Some(rule_name) = &step.rule else {
            return fail(report, "no rule given".into());
        };
        let Some(rule) = rules.get(rule_name) else {
            return fail(report, format!("unknown rule `{rule_name}`"));
        };
        let found = match by_definition {
            // derived steps are judged by their expanded definitions
            Some((derived, budget)) if derived.contains(rule_name) => {
                let base = RuleSet::cl_base();
                let a = reduce(&expand_definitions(before), &base, budget, Strategy::LeftmostOutermost);
                let b = reduce(&expand_definitions(&step.term), &base, budget, Strategy::LeftmostOutermost);
                let joined = a.status == Status::NormalForm
                    && b.status == Status::NormalForm
                    && alpha_eq(&a.term, &b.term);
                joined.then(|| step.pos.clone().unwrap_or_default())
            }
            _ => locate_step(rule, before, &step.term, step.pos.as_ref(), step.direction),
        };
        let Some(pos) = found else {
            let dir = match step.direction {
                Direction::Forward => "",
                Direction::Backward => " (backward)",
            };
            return fail(
                report,
                format!("`{}` does not turn {} into {}{dir}", rule_name, print(before), print(&step.term)),
            );
        };
        report.replay.push(TraceStep {
            rule: rule_name.clone(),
            pos,
            direction: step.direction,
            result: step.term.clone(),
        });
    }
    let last = &script.last().expect("non-empty").term;
    if !alpha_eq(&first.term, lhs) {
        report.detail = format!("chain starts at {} but the equation's left side is {}", first.term, lhs);
        return report;
    }
    if !alpha_eq(last, rhs) {
        report.detail = format!("chain ends at {} but the equation's right side is {}", last, rhs);
        return report;
    }
    report.verdict = Verdict::Pass;
    report.detail = format!("{} steps", script.len() - 1);
    report
}

fn locate_step(
    rule: &RewriteRule,
    before: &Term,
    after: &Term,
    pos: Option<&Position>,
    direction: Direction,
) -> Option<Position> {
    if let Some(pos) = pos {
        return verify_step(rule, before, after, pos, direction).then(|| pos.clone());
    }
    let redex_side = match direction {
        Direction::Forward => before,
        Direction::Backward => after,
    };
    positions(redex_side)
        .into_iter()
        .find(|p| verify_step(rule, before, after, p, direction))
}

fn expand_rules(rules: &RuleSet) -> RuleSet {
    let expanded = rules
        .rules()
        .iter()
        .map(|r| RewriteRule::new(r.name(), expand_definitions(r.lhs()), expand_definitions(r.rhs())))
        .collect::<Result<Vec<_>>>()
        .expect("expansion keeps rules well-formed");
    RuleSet::new(rules.name(), expanded).expect("names unchanged")
}

pub fn run_check(check: &EquationCheck, opts: &SuiteOptions) -> CheckReport {
    let max_steps = opts.max_steps.unwrap_or(check.max_steps);
    let definitional = opts.rule_mode == RuleMode::Definitions;
    let combined = check.rules.extend("check", &check.hypotheses).expect("catalog loader rejects clashing names");
    let base = RuleSet::cl_base();
    let expanded_hyps;
    // With definitions expanded, a hypothesis about V would otherwise fire
    // on half-reduced combinator terms, so it waits for the base axioms.
    let (lhs, rhs, layers): (Term, Term, Vec<&RuleSet>) = if definitional {
        expanded_hyps = expand_rules(&check.hypotheses);
        (expand_definitions(&check.lhs), expand_definitions(&check.rhs), vec![&base, &expanded_hyps])
    } else {
        (check.lhs.clone(), check.rhs.clone(), vec![&combined])
    };
    let mut report = match &check.mode {
        Mode::Extensional { arity } => extensional(&lhs, &rhs, *arity, &layers, max_steps),
        Mode::Instance { bindings } => {
            let bindings: Vec<(String, Term)> = if definitional {
                bindings.iter().map(|(k, v)| (k.clone(), expand_definitions(v))).collect()
            } else {
                bindings.clone()
            };
            instance(&lhs, &rhs, &bindings, &layers, max_steps)
        }
        Mode::Chain { script } => {
            // scripts are written over the rule vocabulary, so they are
            // replayed unexpanded; only derived steps change meaning
            let derived: BTreeSet<String> = RuleSet::derived()
                .rules()
                .iter()
                .map(|r| r.name().to_string())
                .filter(|n| base.get(n).is_none())
                .collect();
            let mut r = replay_with(
                script,
                &check.lhs,
                &check.rhs,
                &combined,
                definitional.then_some((&derived, max_steps)),
            );
            let l = normalize_layered(&lhs, &layers, max_steps);
            let rr = normalize_layered(&rhs, &layers, max_steps);
            r.joinable = Some(l.is_normal_form() && rr.is_normal_form() && alpha_eq(l.result(), rr.result()));
            r
        }
    };
    report.name = check.name.clone();
    report.group = check.group.clone();
    report.mode = check.mode.label();
    report.expected = check.expect;
    report
}

/// Runs every check, in parallel, returning reports in catalog order.
pub fn run_checks(checks: &[EquationCheck], opts: &SuiteOptions) -> Vec<CheckReport> {
    std::thread::scope(|s| {
        let handles: Vec<_> = checks.iter().map(|c| s.spawn(move || run_check(c, opts))).collect();
        handles.into_iter().map(|h| h.join().expect("check panicked")).collect()
    })
}

pub fn paper_catalog() -> Vec<EquationCheck> {
    load_catalog(PAPER_CATALOG).expect("built-in catalog is valid")
}

pub fn run_paper_suite(opts: &SuiteOptions) -> Vec<CheckReport> {
    run_checks(&paper_catalog(), opts)
}

/// The constant-object checks: constants commute with valuation of
/// applications on either side, `C V rho` acts as the identity on
/// constants, and the valuation `K` treats every object as a constant.
pub fn check_constant_principles() -> Vec<CheckReport> {
    let checks: Vec<EquationCheck> = paper_catalog().into_iter().filter(|c| c.group == "constant").collect();
    run_checks(&checks, &SuiteOptions::default())
}

// ---- catalog file format ----

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct CatalogFile {
    version: u32,
    #[serde(default, rename = "check")]
    checks: Vec<CheckEntry>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct CheckEntry {
    name: String,
    #[serde(default)]
    group: String,
    mode: String,
    lhs: String,
    rhs: String,
    arity: Option<usize>,
    #[serde(default)]
    bindings: toml::Table,
    #[serde(default)]
    atoms: Vec<String>,
    #[serde(default)]
    hypotheses: Vec<String>,
    rules: Option<String>,
    max_steps: Option<usize>,
    expect: Option<Verdict>,
    #[serde(default)]
    note: String,
    #[serde(default)]
    script: Vec<ScriptEntry>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct ScriptEntry {
    term: String,
    by: Option<String>,
    dir: Option<Direction>,
    at: Option<String>,
}

pub const CATALOG_VERSION: u32 = 1;

/// Parses a check catalog (TOML, see `catalog/paper.toml`).
pub fn load_catalog(text: &str) -> Result<Vec<EquationCheck>> {
    let file: CatalogFile = toml::from_str(text).map_err(|e| Error::Catalog(e.to_string()))?;
    if file.version != CATALOG_VERSION {
        return Err(Error::Catalog(format!(
            "unsupported catalog version {} (expected {CATALOG_VERSION})",
            file.version
        )));
    }
    let mut names = BTreeSet::new();
    file.checks
        .into_iter()
        .map(|entry| {
            if !names.insert(entry.name.clone()) {
                return Err(Error::Catalog(format!("duplicate check `{}`", entry.name)));
            }
            let name = entry.name.clone();
            entry_to_check(entry).map_err(|e| match e {
                Error::Catalog(m) => Error::Catalog(format!("check `{name}`: {m}")),
                other => Error::Catalog(format!("check `{name}`: {other}")),
            })
        })
        .collect()
}

fn entry_to_check(e: CheckEntry) -> Result<EquationCheck> {
    let cfg = SyntaxConfig::default().with_atoms(e.atoms.iter().cloned());
    let term = |s: &str| parse_with(s, &cfg);
    let rules = match e.rules.as_deref() {
        None | Some("derived") => RuleSet::derived(),
        Some("base") => RuleSet::cl_base(),
        Some(other) => return Err(Error::Catalog(format!("unknown rule set `{other}`"))),
    };
    let hyp_rules = e
        .hypotheses
        .iter()
        .map(|line| RewriteRule::parse(line, &cfg))
        .collect::<Result<Vec<_>>>()?;
    let hypotheses = RuleSet::new("hypotheses", hyp_rules)?;
    let all = rules.extend("all", &hypotheses)?;
    let mode = match e.mode.as_str() {
        "extensional" => Mode::Extensional {
            arity: e.arity.ok_or_else(|| Error::Catalog("extensional check needs `arity`".into()))?,
        },
        "instance" => {
            let bindings = e
                .bindings
                .iter()
                .map(|(k, v)| {
                    let src = v
                        .as_str()
                        .ok_or_else(|| Error::Catalog(format!("binding `{k}` must be a string")))?;
                    Ok((k.clone(), term(src)?))
                })
                .collect::<Result<Vec<_>>>()?;
            Mode::Instance { bindings }
        }
        "chain" => {
            if e.script.is_empty() {
                return Err(Error::Catalog("chain check needs a `script`".into()));
            }
            let script = e
                .script
                .iter()
                .enumerate()
                .map(|(i, s)| {
                    if i > 0 && s.by.is_none() {
                        return Err(Error::Catalog(format!("script line {} names no rule", i + 1)));
                    }
                    if let Some(r) = &s.by {
                        if all.get(r).is_none() {
                            return Err(Error::Catalog(format!("script line {} uses unknown rule `{r}`", i + 1)));
                        }
                    }
                    Ok(ChainStep {
                        term: term(&s.term)?,
                        rule: s.by.clone(),
                        pos: s.at.as_deref().map(str::parse).transpose()?,
                        direction: s.dir.unwrap_or(Direction::Forward),
                    })
                })
                .collect::<Result<Vec<_>>>()?;
            Mode::Chain { script }
        }
        other => return Err(Error::Catalog(format!("unknown mode `{other}`"))),
    };
    Ok(EquationCheck {
        name: e.name,
        group: e.group,
        lhs: term(&e.lhs)?,
        rhs: term(&e.rhs)?,
        mode,
        rules,
        hypotheses,
        max_steps: e.max_steps.unwrap_or(DEFAULT_MAX_STEPS),
        expect: e.expect.unwrap_or(Verdict::Pass),
        note: e.note,
    })
}

/// Fixed-width text table, one row per report.
pub fn render_table(reports: &[CheckReport]) -> String {
    let width = reports.iter().map(|r| r.name.len()).max().unwrap_or(5).max(5);
    let mut out = String::new();
    let _ = writeln!(out, "{:<width$}  {:<11}  {:<7}  DETAIL", "CHECK", "MODE", "VERDICT");
    for r in reports {
        let verdict = match r.verdict {
            Verdict::Pass => "pass",
            Verdict::Fail => "fail",
            Verdict::Budget => "budget",
        };
        let mark = if r.ok() {
            if r.expected == Verdict::Pass {
                String::new()
            } else {
                " (expected)".to_string()
            }
        } else {
            " !".to_string()
        };
        let _ = writeln!(out, "{:<width$}  {:<11}  {:<7}  {}{mark}", r.name, r.mode, verdict, r.detail);
    }
    let ok = reports.iter().filter(|r| r.ok()).count();
    let _ = writeln!(out, "{ok}/{} checks as expected", reports.len());
    out
}
