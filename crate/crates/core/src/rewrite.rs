//! First-order rewriting of applicative terms.
//!
//! A rule is an oriented equation whose left side is an atom-headed
//! application spine; variables in a rule are metavariables. Reduction is
//! weak: it never looks inside a lambda body.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::syntax::{parse_with, print, SyntaxConfig};
use crate::term::{alpha_eq, replace_at, subterm_at, Atom, Node, Position, Step, Term};

pub const DEFAULT_MAX_STEPS: usize = 10_000;

/// Metavariable bindings produced by [`match_pattern`].
pub type Bindings = HashMap<String, Term>;

#[derive(Debug, Clone)]
pub struct RewriteRule {
    name: String,
    lhs: Term,
    rhs: Term,
    metavars: BTreeSet<String>,
    head: Atom,
    arity: usize,
}

fn collect_vars(t: &Term, out: &mut Vec<String>) {
    match t.node() {
        Node::Var(x) => out.push(x.clone()),
        Node::App(f, a) => {
            collect_vars(f, out);
            collect_vars(a, out);
        }
        Node::Lam(_, b) => collect_vars(b, out),
        Node::Atom(_) => {}
    }
}

impl RewriteRule {
    pub fn new(name: impl Into<String>, lhs: Term, rhs: Term) -> Result<RewriteRule> {
        let name = name.into();
        let bad = |reason: String| Error::IllFormedRule { name: name.clone(), reason };
        if name.trim().is_empty() {
            return Err(bad("empty rule name".into()));
        }
        if lhs.has_lambda() || rhs.has_lambda() {
            return Err(bad("rules may not contain abstractions".into()));
        }
        let (head, args) = lhs.spine();
        let Some(head) = head.as_atom().cloned() else {
            return Err(bad(format!("left side `{lhs}` is not headed by an atom")));
        };
        let arity = args.len();
        let mut lhs_vars = Vec::new();
        collect_vars(&lhs, &mut lhs_vars);
        let mut metavars = BTreeSet::new();
        for v in lhs_vars {
            if !metavars.insert(v.clone()) {
                return Err(bad(format!("metavariable `{v}` occurs more than once on the left")));
            }
        }
        let mut rhs_vars = Vec::new();
        collect_vars(&rhs, &mut rhs_vars);
        if let Some(v) = rhs_vars.iter().find(|v| !metavars.contains(*v)) {
            return Err(bad(format!("metavariable `{v}` on the right is not bound on the left")));
        }
        Ok(RewriteRule { name, lhs, rhs, metavars, head, arity })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn lhs(&self) -> &Term {
        &self.lhs
    }

    pub fn rhs(&self) -> &Term {
        &self.rhs
    }

    pub fn metavars(&self) -> &BTreeSet<String> {
        &self.metavars
    }

    /// Head atom and number of arguments of the left side.
    pub fn key(&self) -> (&Atom, usize) {
        (&self.head, self.arity)
    }

    /// Contracts `t` if it is an instance of the left side.
    pub fn apply(&self, t: &Term) -> Option<Term> {
        match_pattern(&self.lhs, t).map(|b| instantiate(&self.rhs, &b))
    }

    /// Parses `name: LHS => RHS`.
    pub fn parse(line: &str, cfg: &SyntaxConfig) -> Result<RewriteRule> {
        let malformed = |reason: &str| Error::IllFormedRule {
            name: line.trim().to_string(),
            reason: reason.to_string(),
        };
        let (name, body) = line.split_once(':').ok_or_else(|| malformed("expected `name: LHS => RHS`"))?;
        let (lhs, rhs) = body.split_once("=>").ok_or_else(|| malformed("missing `=>`"))?;
        let name = name.trim();
        let side = |s: &str| {
            parse_with(s, cfg).map_err(|e| Error::IllFormedRule { name: name.to_string(), reason: e.to_string() })
        };
        RewriteRule::new(name, side(lhs)?, side(rhs)?)
    }
}

impl fmt::Display for RewriteRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {} => {}", self.name, self.lhs, self.rhs)
    }
}

/// An ordered collection of rules with unique names. Earlier rules win
/// when several match at the same position.
#[derive(Debug, Clone)]
pub struct RuleSet {
    name: String,
    rules: Vec<RewriteRule>,
    index: HashMap<(Atom, usize), Vec<usize>>,
}

const BASE_RULES: &str = "\
I: I a => a
K: K a b => a
S: S a b c => a c (b c)
";

const DERIVED_RULES: &str = "\
B: B a b c => a (b c)
C: C a b c => a c b
D: D a b r => r a b
Phi: Phi a b c d => a (b d) (c d)
Psi: Psi a b c d => a (b c) (b d)
B2: B2 => B B B
C2: C2 a b c d => a d b c
Curry: Curry h a b => h (D a b)
p: p (D a b) => a
q: q (D a b) => b
eps: eps z => z I
Fork: Fork f g t => D (f t) (g t)
Comp: Comp f g a => f (g a)
";

impl RuleSet {
    pub fn new(name: impl Into<String>, rules: Vec<RewriteRule>) -> Result<RuleSet> {
        let name = name.into();
        let mut seen = BTreeSet::new();
        let mut index: HashMap<(Atom, usize), Vec<usize>> = HashMap::new();
        for (i, r) in rules.iter().enumerate() {
            if !seen.insert(r.name.clone()) {
                return Err(Error::IllFormedRule {
                    name: r.name.clone(),
                    reason: format!("duplicate rule name in set `{name}`"),
                });
            }
            index.entry((r.head.clone(), r.arity)).or_default().push(i);
        }
        Ok(RuleSet { name, rules, index })
    }

    pub fn empty(name: impl Into<String>) -> RuleSet {
        RuleSet::new(name, Vec::new()).expect("empty set is well-formed")
    }

    /// The three postulated axioms `I`, `K`, `S`.
    pub fn cl_base() -> RuleSet {
        static SET: OnceLock<RuleSet> = OnceLock::new();
        SET.get_or_init(|| RuleSet::parse("base", BASE_RULES, &SyntaxConfig::raw()).unwrap())
            .clone()
    }

    /// The base axioms followed by the derived combinator rules.
    pub fn derived() -> RuleSet {
        static SET: OnceLock<RuleSet> = OnceLock::new();
        SET.get_or_init(|| {
            let derived = RuleSet::parse("derived", DERIVED_RULES, &SyntaxConfig::raw()).unwrap();
            RuleSet::cl_base().extend("derived", &derived).unwrap()
        })
        .clone()
    }

    /// Parses a rule file: one `name: LHS => RHS` per line, `#` comments,
    /// and optional `@atoms A B ...` lines declaring opaque atoms for the
    /// lines that follow.
    pub fn parse(name: impl Into<String>, text: &str, cfg: &SyntaxConfig) -> Result<RuleSet> {
        let mut cfg = cfg.clone();
        let mut rules = Vec::new();
        for line in text.lines() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(atoms) = line.strip_prefix("@atoms") {
                cfg.atoms.extend(atoms.split_whitespace().map(str::to_string));
                continue;
            }
            rules.push(RewriteRule::parse(line, &cfg)?);
        }
        RuleSet::new(name, rules)
    }

    /// This set followed by the rules of `other`.
    pub fn extend(&self, name: impl Into<String>, other: &RuleSet) -> Result<RuleSet> {
        let mut rules = self.rules.clone();
        rules.extend(other.rules.iter().cloned());
        RuleSet::new(name, rules)
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn rules(&self) -> &[RewriteRule] {
        &self.rules
    }

    pub fn get(&self, name: &str) -> Option<&RewriteRule> {
        self.rules.iter().find(|r| r.name == name)
    }

    pub fn is_empty(&self) -> bool {
        self.rules.is_empty()
    }

    fn candidates(&self, head: &Atom, arity: usize) -> &[usize] {
        self.index.get(&(head.clone(), arity)).map(Vec::as_slice).unwrap_or(&[])
    }

    /// First rule (in set order) that rewrites `t` at its root.
    pub fn apply_at_root(&self, t: &Term) -> Option<(&RewriteRule, Term)> {
        let (head, args) = t.spine();
        let head = head.as_atom()?;
        self.candidates(head, args.len())
            .iter()
            .map(|&i| &self.rules[i])
            .find_map(|r| r.apply(t).map(|res| (r, res)))
    }
}

/// Atoms declared by `@atoms` lines of a rule file.
pub fn declared_atoms(text: &str) -> Vec<String> {
    text.lines()
        .filter_map(|l| l.split('#').next().unwrap_or("").trim().strip_prefix("@atoms"))
        .flat_map(|a| a.split_whitespace().map(str::to_string))
        .collect()
}

/// Builds a rule set from oriented equations given as `(name, lhs, rhs)`.
pub fn make_hypothesis_rules<I, S>(name: &str, equations: I) -> Result<RuleSet>
where
    I: IntoIterator<Item = (S, Term, Term)>,
    S: Into<String>,
{
    let rules = equations
        .into_iter()
        .map(|(n, l, r)| RewriteRule::new(n, l, r))
        .collect::<Result<Vec<_>>>()?;
    RuleSet::new(name, rules)
}

/// Binds the metavariables of `pattern` so that it becomes `t`.
pub fn match_pattern(pattern: &Term, t: &Term) -> Option<Bindings> {
    fn go(p: &Term, t: &Term, b: &mut Bindings) -> bool {
        match (p.node(), t.node()) {
            (Node::Var(x), _) => match b.get(x) {
                Some(prev) => alpha_eq(prev, t),
                None => {
                    b.insert(x.clone(), t.clone());
                    true
                }
            },
            (Node::Atom(a), Node::Atom(c)) => a == c,
            (Node::App(pf, pa), Node::App(tf, ta)) => go(pf, tf, b) && go(pa, ta, b),
            _ => false,
        }
    }
    let mut b = Bindings::new();
    go(pattern, t, &mut b).then_some(b)
}

/// Replaces metavariables in `pattern` by their bindings.
pub fn instantiate(pattern: &Term, b: &Bindings) -> Term {
    match pattern.node() {
        Node::Var(x) => b.get(x).cloned().unwrap_or_else(|| pattern.clone()),
        Node::Atom(_) => pattern.clone(),
        Node::App(f, a) => Term::app(instantiate(f, b), instantiate(a, b)),
        Node::Lam(x, body) => Term::lam(x.clone(), instantiate(body, b)),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Forward,
    Backward,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    NormalForm,
    BudgetExhausted,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Strategy {
    /// Normal order: outermost redex first, leftmost among those.
    #[default]
    LeftmostOutermost,
    /// Arguments right to left, each before the application containing it.
    RightmostInnermost,
}

#[derive(Debug, Clone, PartialEq)]
pub struct TraceStep {
    pub rule: String,
    pub pos: Position,
    pub direction: Direction,
    pub result: Term,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trace {
    pub initial: Term,
    pub steps: Vec<TraceStep>,
    pub status: Status,
}

impl Trace {
    /// The last term of the trace.
    pub fn result(&self) -> &Term {
        self.steps.last().map(|s| &s.result).unwrap_or(&self.initial)
    }

    pub fn is_normal_form(&self) -> bool {
        self.status == Status::NormalForm
    }

    /// `{initial, steps: [{rule, pos, dir, result}], status}` with terms
    /// rendered as concrete syntax.
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({
            "initial": print(&self.initial),
            "steps": self.steps.iter().map(|s| serde_json::json!({
                "rule": s.rule,
                "pos": s.pos,
                "dir": s.direction,
                "result": print(&s.result),
            })).collect::<Vec<_>>(),
            "status": self.status,
        })
    }
}

/// A contracted redex.
#[derive(Debug, Clone, PartialEq)]
pub struct Redex {
    pub result: Term,
    pub rule: String,
    pub pos: Position,
}

/// One normal-order step.
pub fn reduce_step(t: &Term, rules: &RuleSet) -> Option<Redex> {
    reduce_step_with(t, rules, Strategy::LeftmostOutermost)
}

pub fn reduce_step_with(t: &Term, rules: &RuleSet, strategy: Strategy) -> Option<Redex> {
    let mut path = Vec::new();
    let (rule, contractum, path) = match strategy {
        Strategy::LeftmostOutermost => find_outermost(t, rules, &mut path)?,
        Strategy::RightmostInnermost => find_innermost(t, rules, &mut path)?,
    };
    let pos = Position(path);
    let result = replace_at(t, &pos, contractum).expect("redex position exists");
    Some(Redex { result, rule: rule.name.clone(), pos })
}

// A spine `h a1 .. an` is walked as a unit: the prefixes `h a1 .. ak` are
// the nodes on its left edge, so long spines need no recursion.
fn spine_nodes(t: &Term) -> Vec<&Term> {
    let mut nodes = vec![t];
    let mut cur = t;
    while let Node::App(f, _) = cur.node() {
        nodes.push(f);
        cur = f;
    }
    nodes
}

fn arg_of(t: &Term) -> &Term {
    match t.node() {
        Node::App(_, a) => a,
        _ => unreachable!("spine node is an application"),
    }
}

fn find_outermost<'r>(
    t: &Term,
    rules: &'r RuleSet,
    path: &mut Vec<Step>,
) -> Option<(&'r RewriteRule, Term, Vec<Step>)> {
    let nodes = spine_nodes(t);
    let n = nodes.len() - 1;
    if let Some(head) = nodes[n].as_atom() {
        for (depth, node) in nodes.iter().enumerate() {
            let arity = n - depth;
            for &i in rules.candidates(head, arity) {
                let rule = &rules.rules[i];
                if let Some(res) = rule.apply(node) {
                    let mut p = path.clone();
                    p.extend(std::iter::repeat_n(Step::Fun, depth));
                    return Some((rule, res, p));
                }
            }
        }
    }
    for depth in (0..n).rev() {
        let base = path.len();
        path.extend(std::iter::repeat_n(Step::Fun, depth));
        path.push(Step::Arg);
        let found = find_outermost(arg_of(nodes[depth]), rules, path);
        path.truncate(base);
        if found.is_some() {
            return found;
        }
    }
    None
}

fn find_innermost<'r>(
    t: &Term,
    rules: &'r RuleSet,
    path: &mut Vec<Step>,
) -> Option<(&'r RewriteRule, Term, Vec<Step>)> {
    let nodes = spine_nodes(t);
    let n = nodes.len() - 1;
    for (depth, node) in nodes.iter().enumerate().take(n) {
        let base = path.len();
        path.extend(std::iter::repeat_n(Step::Fun, depth));
        path.push(Step::Arg);
        let found = find_innermost(arg_of(node), rules, path);
        path.truncate(base);
        if found.is_some() {
            return found;
        }
    }
    let head = nodes[n].as_atom()?;
    for (depth, node) in nodes.iter().enumerate().rev() {
        let arity = n - depth;
        for &i in rules.candidates(head, arity) {
            let rule = &rules.rules[i];
            if let Some(res) = rule.apply(node) {
                let mut p = path.clone();
                p.extend(std::iter::repeat_n(Step::Fun, depth));
                return Some((rule, res, p));
            }
        }
    }
    None
}

/// Normal-order reduction for at most `max_steps` steps.
pub fn normalize(t: &Term, rules: &RuleSet, max_steps: usize) -> Trace {
    normalize_with(t, rules, max_steps, Strategy::LeftmostOutermost)
}

pub fn normalize_with(t: &Term, rules: &RuleSet, max_steps: usize, strategy: Strategy) -> Trace {
    trace_steps(t, max_steps, |cur| reduce_step_with(cur, rules, strategy))
}

/// Normal-order reduction where a later rule set only fires once no rule
/// of an earlier set applies anywhere in the term.
pub fn normalize_layered(t: &Term, layers: &[&RuleSet], max_steps: usize) -> Trace {
    trace_steps(t, max_steps, |cur| layers.iter().find_map(|rules| reduce_step(cur, rules)))
}

fn trace_steps(t: &Term, max_steps: usize, next: impl Fn(&Term) -> Option<Redex>) -> Trace {
    let mut steps: Vec<TraceStep> = Vec::new();
    let mut cur = t.clone();
    let status = loop {
        let Some(redex) = next(&cur) else {
            break Status::NormalForm;
        };
        if steps.len() == max_steps {
            break Status::BudgetExhausted;
        }
        cur = redex.result.clone();
        steps.push(TraceStep {
            rule: redex.rule,
            pos: redex.pos,
            direction: Direction::Forward,
            result: redex.result,
        });
    };
    Trace { initial: t.clone(), steps, status }
}

/// Outcome of an untraced reduction.
#[derive(Debug, Clone, PartialEq)]
pub struct Reduction {
    pub term: Term,
    pub steps: usize,
    pub status: Status,
}

/// Like [`normalize_with`] but keeps only the final term.
pub fn reduce(t: &Term, rules: &RuleSet, max_steps: usize, strategy: Strategy) -> Reduction {
    let mut cur = t.clone();
    let mut steps = 0;
    loop {
        let Some(redex) = reduce_step_with(&cur, rules, strategy) else {
            return Reduction { term: cur, steps, status: Status::NormalForm };
        };
        if steps == max_steps {
            return Reduction { term: cur, steps, status: Status::BudgetExhausted };
        }
        cur = redex.result;
        steps += 1;
    }
}

/// Checks that `after` is `before` rewritten once by the named rule at
/// `pos`, read right-to-left for backward steps.
pub fn verify_step(
    rule: &RewriteRule,
    before: &Term,
    after: &Term,
    pos: &Position,
    direction: Direction,
) -> bool {
    let (from, to) = match direction {
        Direction::Forward => (before, after),
        Direction::Backward => (after, before),
    };
    let Ok(redex) = subterm_at(from, pos) else { return false };
    let Some(contractum) = rule.apply(&redex) else { return false };
    match replace_at(from, pos, contractum) {
        Ok(expected) => alpha_eq(&expected, to),
        Err(_) => false,
    }
}

/// Re-checks every step of a trace against `rules`.
pub fn verify_trace(trace: &Trace, rules: &RuleSet) -> bool {
    let mut before = &trace.initial;
    for step in &trace.steps {
        let Some(rule) = rules.get(&step.rule) else { return false };
        if !verify_step(rule, before, &step.result, &step.pos, step.direction) {
            return false;
        }
        before = &step.result;
    }
    true
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse;

    fn p(s: &str) -> Term {
        parse(s).unwrap()
    }

    fn nf(s: &str, rules: &RuleSet) -> Term {
        normalize(&p(s), rules, DEFAULT_MAX_STEPS).result().clone()
    }

    #[test]
    fn matching() {
        let b = match_pattern(&p("K a b"), &p("K x y")).unwrap();
        assert_eq!(b["a"], p("x"));
        assert_eq!(b["b"], p("y"));
        assert!(match_pattern(&p("K a b"), &p("K x")).is_none());
        let b = match_pattern(&p("S a b c"), &p("S (c1 d) c2 c3")).unwrap();
        assert_eq!((b["a"].clone(), b["b"].clone(), b["c"].clone()), (p("c1 d"), p("c2"), p("c3")));
        // nested pattern
        let b = match_pattern(&p("p (D a b)"), &p("p [u, v w]")).unwrap();
        assert_eq!(b["b"], p("v w"));
        assert!(match_pattern(&p("p (D a b)"), &p("p u")).is_none());
    }

    #[test]
    fn single_steps() {
        let base = RuleSet::cl_base();
        let r = reduce_step(&p("K a b"), &base).unwrap();
        assert_eq!((r.result, r.rule.as_str(), r.pos), (p("a"), "K", Position::root()));
        let r = reduce_step(&p("S a b c"), &base).unwrap();
        assert_eq!(r.result, p("a c (b c)"));
        // leftmost-outermost: the I at the root goes first
        let r = reduce_step(&p("I (K a b)"), &base).unwrap();
        assert_eq!((r.result, r.rule.as_str()), (p("K a b"), "I"));
        // nothing under a lambda, nothing under-applied
        assert!(reduce_step(&p("\\x.K x y"), &base).is_none());
        assert!(reduce_step(&p("K a"), &base).is_none());
        assert!(reduce_step(&p("S a b"), &base).is_none());
    }

    #[test]
    fn redex_positions() {
        let base = RuleSet::cl_base();
        let r = reduce_step(&p("K a b c"), &base).unwrap();
        assert_eq!(r.pos, "fun".parse().unwrap());
        assert_eq!(r.result, p("a c"));
        let r = reduce_step(&p("x y (I z)"), &base).unwrap();
        assert_eq!(r.pos, "arg".parse().unwrap());
        let r = reduce_step(&p("x (I y) (I z)"), &base).unwrap();
        assert_eq!(r.pos, "fun.arg".parse().unwrap());
        let r = reduce_step_with(&p("x (I y) (I z)"), &base, Strategy::RightmostInnermost).unwrap();
        assert_eq!(r.pos, "arg".parse().unwrap());
        let r = reduce_step_with(&p("I (K a b)"), &base, Strategy::RightmostInnermost).unwrap();
        assert_eq!(r.rule, "K");
    }

    #[test]
    fn skk_is_identity_in_two_steps() {
        let t = normalize(&p("S K K x"), &RuleSet::cl_base(), 100);
        let rules: Vec<_> = t.steps.iter().map(|s| s.rule.as_str()).collect();
        assert_eq!(rules, ["S", "K"]);
        assert_eq!(t.steps[0].result, p("K x (K x)"));
        assert_eq!(*t.result(), p("x"));
        assert_eq!(t.status, Status::NormalForm);
    }

    #[test]
    fn derived_rules() {
        let d = RuleSet::derived();
        assert_eq!(nf("B V M N rho", &d), p("V (M N) rho"));
        assert_eq!(nf("C B2 D V M N rho", &d), p("V (D M N) rho"));
        assert_eq!(nf("C x y z", &d), p("x z y"));
        assert_eq!(nf("Phi x y z w", &d), p("x (y w) (z w)"));
        assert_eq!(nf("Psi x y z w", &d), p("x (y z) (y w)"));
        assert_eq!(nf("C2 x y z w", &d), p("x w y z"));
        assert_eq!(nf("Curry h x y", &d), p("h [x,y]"));
        assert_eq!(nf("p [x,y]", &d), p("x"));
        assert_eq!(nf("q [x,y]", &d), p("y"));
        assert_eq!(nf("eps [x,y]", &d), p("x y"));
        assert_eq!(nf("<f,g> t", &d), p("[f t, g t]"));
        assert_eq!(nf("(f . g) x", &d), p("f (g x)"));
        assert_eq!(nf("[x,y] r", &d), p("r x y"));
        // the raw B2 atom unfolds through its expansion rule
        let raw = parse_with("B2 f g x y", &SyntaxConfig::raw()).unwrap();
        assert_eq!(*normalize(&raw, &d, 100).result(), p("f (g x y)"));
        // base set leaves derived atoms alone
        assert_eq!(nf("B x y z", &RuleSet::cl_base()), p("B x y z"));
    }

    #[test]
    fn budget() {
        let omega = p("S I I (S I I)");
        let t = normalize(&omega, &RuleSet::cl_base(), 5);
        assert_eq!(t.status, Status::BudgetExhausted);
        assert_eq!(t.steps.len(), 5);
        // first cycle by hand
        assert_eq!(t.steps[0].result, p("I (S I I) (I (S I I))"));
        assert_eq!(t.steps[1].result, p("S I I (I (S I I))"));

        let t = normalize(&p("K a b"), &RuleSet::cl_base(), 0);
        assert_eq!((t.status, t.steps.len()), (Status::BudgetExhausted, 0));
        // exactly enough budget still ends in a normal form
        let t = normalize(&p("S K K x"), &RuleSet::cl_base(), 2);
        assert_eq!(t.status, Status::NormalForm);
        let r = reduce(&p("S K K x"), &RuleSet::cl_base(), 1, Strategy::default());
        assert_eq!((r.steps, r.status), (1, Status::BudgetExhausted));
    }

    #[test]
    fn traces_verify() {
        let d = RuleSet::derived();
        let t = normalize(&p("C B2 D V M N rho"), &d, 100);
        assert!(verify_trace(&t, &d));
        let mut broken = t.clone();
        broken.steps[1].result = p("V");
        assert!(!verify_trace(&broken, &d));
    }

    #[test]
    fn hypothesis_rules() {
        let cfg = SyntaxConfig::default().with_atoms(["Kappa"]);
        let konst = make_hypothesis_rules(
            "hyp",
            [("const", parse_with("V Kappa r", &cfg).unwrap(), parse_with("Kappa", &cfg).unwrap())],
        )
        .unwrap();
        assert_eq!(
            *normalize(&parse_with("V Kappa rho", &cfg).unwrap(), &konst, 10).result(),
            parse_with("Kappa", &cfg).unwrap()
        );
        let app = make_hypothesis_rules("hyp", [("app", p("V (m n) r"), p("V m r (V n r)"))]).unwrap();
        assert_eq!(*normalize(&p("V (M N) rho"), &app, 10).result(), p("V M rho (V N rho)"));
        let none = make_hypothesis_rules::<_, String>("hyp", []).unwrap();
        assert!(none.is_empty());
    }

    #[test]
    fn ill_formed_rules() {
        let err = |l: &str, r: &str| RewriteRule::new("r", p(l), p(r)).unwrap_err();
        assert!(matches!(err("x y", "x"), Error::IllFormedRule { .. }));
        assert!(matches!(err("K a a", "a"), Error::IllFormedRule { .. }));
        assert!(matches!(err("K a", "b"), Error::IllFormedRule { .. }));
        assert!(matches!(err("K (\\x.x)", "K"), Error::IllFormedRule { .. }));
        let a = RewriteRule::new("a", p("K x"), p("x")).unwrap();
        assert!(RuleSet::new("dup", vec![a.clone(), a]).is_err());
    }

    #[test]
    fn rule_file() {
        let text = "# valuation\n@atoms Kappa\nconst: V Kappa r => Kappa\napp: V (m n) r => V m r (V n r)\n\n";
        let set = RuleSet::parse("file", text, &SyntaxConfig::default()).unwrap();
        assert_eq!(set.rules().len(), 2);
        assert_eq!(set.get("const").unwrap().to_string(), "const: V Kappa r => Kappa");
        assert!(RuleSet::parse("bad", "oops K a => a", &SyntaxConfig::default()).is_err());
        assert!(RuleSet::parse("bad", "r: K a", &SyntaxConfig::default()).is_err());
        assert!(RuleSet::parse("bad", "r: K ( => a", &SyntaxConfig::default()).is_err());
    }

    #[test]
    fn trace_json() {
        let t = normalize(&p("S K K x"), &RuleSet::cl_base(), 10);
        let j = t.to_json();
        assert_eq!(j["initial"], "S K K x");
        assert_eq!(j["status"], "normal_form");
        assert_eq!(j["steps"][0]["rule"], "S");
        assert_eq!(j["steps"][0]["dir"], "forward");
        assert_eq!(j["steps"][0]["pos"], serde_json::json!([]));
        assert_eq!(j["steps"][1]["result"], "x");
    }

    #[test]
    fn layered_rules_wait_for_earlier_layers() {
        let cfg = SyntaxConfig::default();
        let hyp = RuleSet::parse("h", "app-val: V (m n) r => V m r (V n r)", &cfg).unwrap();
        let base = RuleSet::cl_base();
        let t = p("V (K x y) rho");
        let flat = normalize(&t, &base.extend("all", &hyp).unwrap(), 100);
        assert_eq!(flat.steps[0].rule, "app-val");
        let layered = normalize_layered(&t, &[&base, &hyp], 100);
        assert_eq!(layered.steps[0].rule, "K");
        assert_eq!(*layered.result(), p("V x rho"));
        let all = base.extend("all", &hyp).unwrap();
        assert!(verify_trace(&layered, &all));
    }
}
