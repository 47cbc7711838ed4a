//! Comparisons between the two reduction engines, and between each derived
//! rule and the compiled definition of its atom.

use std::collections::BTreeSet;

use crate::compile::{compile, definition, expand_definitions};
use crate::oracle::beta_reduce;
use crate::rewrite::{reduce, RuleSet, Status, Strategy};
use crate::syntax::parse;
use crate::term::{alpha_eq, fresh_var, free_vars, Atom, Node, Term};

/// Reads a lambda-free term back as a beta-normal lambda term.
///
/// The term is weakly normalised. A variable-headed (or opaque-atom-headed)
/// result keeps its head and has each argument read back in turn; a result
/// whose head combinator is short of arguments is applied to a fresh
/// variable, which is then abstracted again. Returns `None` once the shared
/// step budget runs out.
pub fn readback(t: &Term, rules: &RuleSet, max_steps: usize) -> Option<Term> {
    let mut avoid = all_vars(t);
    let mut budget = max_steps;
    read(t, rules, &mut budget, &mut avoid)
}

fn all_vars(t: &Term) -> BTreeSet<String> {
    let mut out = free_vars(t);
    let mut stack = vec![t.clone()];
    while let Some(t) = stack.pop() {
        match t.node() {
            Node::Lam(x, b) => {
                out.insert(x.clone());
                stack.push(b.clone());
            }
            Node::App(f, a) => {
                stack.push(f.clone());
                stack.push(a.clone());
            }
            _ => {}
        }
    }
    out
}

fn under_applied(head: &Atom, args: usize, rules: &RuleSet) -> bool {
    rules.rules().iter().any(|r| {
        let (h, arity) = r.key();
        h == head && arity > args
    })
}

fn read(t: &Term, rules: &RuleSet, budget: &mut usize, avoid: &mut BTreeSet<String>) -> Option<Term> {
    let r = reduce(t, rules, *budget, Strategy::LeftmostOutermost);
    *budget -= r.steps;
    if r.status == Status::BudgetExhausted {
        return None;
    }
    let nf = r.term;
    let (head, args) = nf.spine();
    match head.node() {
        Node::Lam(..) => None,
        Node::Atom(a) if under_applied(a, args.len(), rules) => {
            let z = fresh_var(avoid, "z");
            avoid.insert(z.clone());
            let body = read(&Term::app(nf.clone(), Term::var(z.clone())), rules, budget, avoid)?;
            Some(Term::lam(z, body))
        }
        _ => {
            let mut out = head.clone();
            for a in args {
                out = Term::app(out, read(a, rules, budget, avoid)?);
            }
            Some(out)
        }
    }
}

/// Outcome of running a closed lambda term through both engines.
#[derive(Debug, Clone, PartialEq)]
pub enum Agreement {
    Agree,
    Disagree { combinatory: Term, lambda: Term },
    BothDiverge,
    OnlyCombinatoryDiverges,
    OnlyLambdaDiverges,
}

impl Agreement {
    pub fn is_mismatch(&self) -> bool {
        !matches!(self, Agreement::Agree | Agreement::BothDiverge)
    }
}

/// Applies `t` to `arity` fresh variables and compares the compiled route
/// (bracket abstraction, weak reduction, read-back) with normal-order beta
/// reduction. Each engine gets `max_steps` steps.
pub fn compare_with_oracle(t: &Term, arity: usize, max_steps: usize) -> Agreement {
    let mut avoid = free_vars(t);
    let vars: Vec<Term> = (1..=arity)
        .map(|i| {
            let v = fresh_var(&avoid, &format!("v{i}"));
            avoid.insert(v.clone());
            Term::var(v)
        })
        .collect();
    let lambda = beta_reduce(&Term::apps(t.clone(), vars.clone()), max_steps, false);
    let compiled = Term::apps(compile(t, false), vars);
    let combinatory = readback(&compiled, &RuleSet::cl_base(), max_steps);
    match (combinatory, lambda.status) {
        (Some(c), Status::NormalForm) => {
            if alpha_eq(&c, &lambda.term) {
                Agreement::Agree
            } else {
                Agreement::Disagree { combinatory: c, lambda: lambda.term }
            }
        }
        (None, Status::BudgetExhausted) => Agreement::BothDiverge,
        (None, Status::NormalForm) => Agreement::OnlyCombinatoryDiverges,
        (Some(_), Status::BudgetExhausted) => Agreement::OnlyLambdaDiverges,
    }
}

/// Atoms that carry both a reduction rule and a lambda definition.
pub const DEFINABLE_RULE_ATOMS: [Atom; 13] = [
    Atom::B,
    Atom::C,
    Atom::D,
    Atom::Phi,
    Atom::Psi,
    Atom::B2,
    Atom::C2,
    Atom::Curry,
    Atom::P,
    Atom::Q,
    Atom::Eps,
    Atom::Fork,
    Atom::Comp,
];

/// Fully applied spines on which an atom's rule and definition are
/// compared. Projections are applied to a pair, since that is the only
/// shape their rules match.
pub fn soundness_spines(atom: &Atom) -> Vec<Term> {
    let srcs: &[&str] = match atom {
        Atom::P => &["p [x,y]", "p [x,y] z"],
        Atom::Q => &["q [x,y]", "q [x,y] z"],
        Atom::Eps => &["eps z", "eps [x,y]"],
        Atom::B2 => &["B2 x y z w"],
        _ => {
            let Ok(def) = definition(atom) else { return Vec::new() };
            let mut arity = 0;
            let mut cur = def;
            while let Node::Lam(_, b) = cur.node().clone() {
                arity += 1;
                cur = b;
            }
            let head = Term::atom(atom.clone());
            let vars = ["x1", "x2", "x3", "x4", "x5"];
            return vec![
                Term::apps(head.clone(), vars[..arity].iter().map(|v| Term::var(*v))),
                Term::apps(head, vars[..arity + 1].iter().map(|v| Term::var(*v))),
            ];
        }
    };
    let cfg = crate::syntax::SyntaxConfig::raw();
    srcs.iter()
        .map(|s| crate::syntax::parse_with(s, &cfg).unwrap_or_else(|_| parse(s).unwrap()))
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct SoundnessCase {
    pub spine: Term,
    /// Rule route: reduce with the derived rules, expand what remains,
    /// finish with the base axioms.
    pub by_rule: Option<Term>,
    /// Definition route: expand first, reduce with the base axioms only.
    pub by_definition: Option<Term>,
}

impl SoundnessCase {
    pub fn agrees(&self) -> bool {
        match (&self.by_rule, &self.by_definition) {
            (Some(a), Some(b)) => alpha_eq(a, b),
            _ => false,
        }
    }
}

pub fn rule_soundness(atom: &Atom, max_steps: usize) -> Vec<SoundnessCase> {
    let base = RuleSet::cl_base();
    let derived = RuleSet::derived();
    let nf = |t: &Term, rules: &RuleSet| {
        let r = reduce(t, rules, max_steps, Strategy::LeftmostOutermost);
        (r.status == Status::NormalForm).then_some(r.term)
    };
    soundness_spines(atom)
        .into_iter()
        .map(|spine| {
            let by_rule = nf(&spine, &derived).and_then(|t| nf(&expand_definitions(&t), &base));
            let by_definition = nf(&expand_definitions(&spine), &base);
            SoundnessCase { spine, by_rule, by_definition }
        })
        .collect()
}
