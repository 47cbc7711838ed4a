//! The term language: combinator atoms, variables, application and
//! abstraction, together with alpha-equivalence and capture-avoiding
//! substitution.
//!
//! Terms are immutable handles around a shared node. Cloning a [`Term`] is
//! an `Arc` bump, so rewriting rebuilds only the path to the contracted
//! redex and shares everything else.

use std::collections::{BTreeSet, HashMap};
use std::fmt;
use std::sync::{Arc, OnceLock};

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

/// A combinator constant.
///
/// The built-in catalog is closed; anything else a user declares is carried
/// as an opaque [`Atom::User`] constant with no rules of its own.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Atom {
    I,
    K,
    S,
    B,
    C,
    D,
    Phi,
    Psi,
    B2,
    C2,
    Curry,
    P,
    Q,
    Eps,
    Fork,
    Comp,
    V,
    Quote,
    User(String),
}

impl Atom {
    /// Every built-in atom, in catalog order.
    pub const BUILTIN: [Atom; 18] = [
        Atom::I,
        Atom::K,
        Atom::S,
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
        Atom::V,
        Atom::Quote,
    ];

    pub fn name(&self) -> &str {
        match self {
            Atom::I => "I",
            Atom::K => "K",
            Atom::S => "S",
            Atom::B => "B",
            Atom::C => "C",
            Atom::D => "D",
            Atom::Phi => "Phi",
            Atom::Psi => "Psi",
            Atom::B2 => "B2",
            Atom::C2 => "C2",
            Atom::Curry => "Curry",
            Atom::P => "p",
            Atom::Q => "q",
            Atom::Eps => "eps",
            Atom::Fork => "Fork",
            Atom::Comp => "Comp",
            Atom::V => "V",
            Atom::Quote => "quote",
            Atom::User(name) => name,
        }
    }

    /// Looks up a built-in atom by its catalog name.
    pub fn builtin(name: &str) -> Option<Atom> {
        Atom::BUILTIN.iter().find(|a| a.name() == name).cloned()
    }

    pub fn is_builtin(&self) -> bool {
        !matches!(self, Atom::User(_))
    }
}

impl fmt::Display for Atom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl Serialize for Atom {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(self.name())
    }
}

impl<'de> Deserialize<'de> for Atom {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let name = String::deserialize(d)?;
        Ok(Atom::builtin(&name).unwrap_or(Atom::User(name)))
    }
}

/// The shape of a single term node.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Node {
    Atom(Atom),
    Var(String),
    App(Term, Term),
    Lam(String, Term),
}

/// An immutable, cheaply clonable term.
#[derive(Clone)]
pub struct Term(Arc<Node>);

fn placeholder() -> Arc<Node> {
    static HOLE: OnceLock<Arc<Node>> = OnceLock::new();
    HOLE.get_or_init(|| Arc::new(Node::Atom(Atom::I))).clone()
}

// Terms produced by divergent reductions can be tens of thousands of nodes
// deep; the default recursive drop would blow the stack on them.
impl Drop for Term {
    fn drop(&mut self) {
        fn detach(t: &mut Term, stack: &mut Vec<Node>) {
            if Arc::strong_count(&t.0) != 1 {
                return;
            }
            let arc = std::mem::replace(&mut t.0, placeholder());
            if let Ok(node) = Arc::try_unwrap(arc) {
                stack.push(node);
            }
        }
        let mut stack = Vec::new();
        detach(self, &mut stack);
        while let Some(node) = stack.pop() {
            match node {
                Node::App(mut f, mut a) => {
                    detach(&mut f, &mut stack);
                    detach(&mut a, &mut stack);
                }
                Node::Lam(_, mut b) => detach(&mut b, &mut stack),
                Node::Atom(_) | Node::Var(_) => {}
            }
        }
    }
}

impl Serialize for Term {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.0.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Term {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        Node::deserialize(d).map(|n| Term(Arc::new(n)))
    }
}

impl fmt::Debug for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", crate::syntax::print(self))
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::syntax::print(self))
    }
}

/// Structural equality: bound variable names must match too. Use
/// [`alpha_eq`] for equality up to renaming.
impl PartialEq for Term {
    fn eq(&self, other: &Term) -> bool {
        if Arc::ptr_eq(&self.0, &other.0) {
            return true;
        }
        match (self.node(), other.node()) {
            (Node::Atom(a), Node::Atom(b)) => a == b,
            (Node::Var(a), Node::Var(b)) => a == b,
            (Node::App(f1, a1), Node::App(f2, a2)) => f1 == f2 && a1 == a2,
            (Node::Lam(x1, b1), Node::Lam(x2, b2)) => x1 == x2 && b1 == b2,
            _ => false,
        }
    }
}

impl Eq for Term {}

impl From<Atom> for Term {
    fn from(a: Atom) -> Term {
        Term::atom(a)
    }
}

impl Term {
    pub fn node(&self) -> &Node {
        &self.0
    }

    pub fn atom(a: Atom) -> Term {
        Term(Arc::new(Node::Atom(a)))
    }

    pub fn var(name: impl Into<String>) -> Term {
        Term(Arc::new(Node::Var(name.into())))
    }

    pub fn app(fun: Term, arg: Term) -> Term {
        Term(Arc::new(Node::App(fun, arg)))
    }

    pub fn lam(binder: impl Into<String>, body: Term) -> Term {
        Term(Arc::new(Node::Lam(binder.into(), body)))
    }

    /// Left-nested application `head a1 a2 ... an`.
    pub fn apps<I: IntoIterator<Item = Term>>(head: Term, args: I) -> Term {
        args.into_iter().fold(head, Term::app)
    }

    pub fn as_atom(&self) -> Option<&Atom> {
        match self.node() {
            Node::Atom(a) => Some(a),
            _ => None,
        }
    }

    pub fn as_var(&self) -> Option<&str> {
        match self.node() {
            Node::Var(x) => Some(x),
            _ => None,
        }
    }

    /// Splits a left-nested application into its head and arguments.
    pub fn spine(&self) -> (&Term, Vec<&Term>) {
        let mut args = Vec::new();
        let mut head = self;
        while let Node::App(f, a) = head.node() {
            args.push(a);
            head = f;
        }
        args.reverse();
        (head, args)
    }

    /// Number of nodes.
    pub fn size(&self) -> usize {
        let mut n = 0;
        let mut stack = vec![self];
        while let Some(t) = stack.pop() {
            n += 1;
            match t.node() {
                Node::App(f, a) => {
                    stack.push(f);
                    stack.push(a);
                }
                Node::Lam(_, b) => stack.push(b),
                _ => {}
            }
        }
        n
    }

    pub fn has_lambda(&self) -> bool {
        let mut stack = vec![self];
        while let Some(t) = stack.pop() {
            match t.node() {
                Node::Lam(..) => return true,
                Node::App(f, a) => {
                    stack.push(f);
                    stack.push(a);
                }
                _ => {}
            }
        }
        false
    }

    /// Every atom occurring in the term.
    pub fn atoms(&self) -> BTreeSet<Atom> {
        let mut out = BTreeSet::new();
        let mut stack = vec![self];
        while let Some(t) = stack.pop() {
            match t.node() {
                Node::Atom(a) => {
                    out.insert(a.clone());
                }
                Node::App(f, a) => {
                    stack.push(f);
                    stack.push(a);
                }
                Node::Lam(_, b) => stack.push(b),
                Node::Var(_) => {}
            }
        }
        out
    }
}

/// One step of a [`Position`] path.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Step {
    Fun,
    Arg,
    Body,
}

/// Address of a subterm, as a path from the root.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Position(pub Vec<Step>);

impl Position {
    pub fn root() -> Position {
        Position(Vec::new())
    }

    pub fn is_root(&self) -> bool {
        self.0.is_empty()
    }

    pub fn child(&self, step: Step) -> Position {
        let mut path = self.0.clone();
        path.push(step);
        Position(path)
    }
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("root");
        }
        let parts: Vec<&str> = self
            .0
            .iter()
            .map(|s| match s {
                Step::Fun => "fun",
                Step::Arg => "arg",
                Step::Body => "body",
            })
            .collect();
        f.write_str(&parts.join("."))
    }
}

impl std::str::FromStr for Position {
    type Err = Error;

    /// Accepts `root` (or the empty string) and dot-separated
    /// `fun`/`arg`/`body` steps.
    fn from_str(s: &str) -> Result<Position> {
        let s = s.trim();
        if s.is_empty() || s == "root" {
            return Ok(Position::root());
        }
        s.split('.')
            .map(|part| match part.trim() {
                "fun" => Ok(Step::Fun),
                "arg" => Ok(Step::Arg),
                "body" => Ok(Step::Body),
                other => Err(Error::InvalidPosition(format!("unknown step `{other}`"))),
            })
            .collect::<Result<Vec<_>>>()
            .map(Position)
    }
}

/// Variables with at least one unbound occurrence.
pub fn free_vars(t: &Term) -> BTreeSet<String> {
    fn go<'a>(t: &'a Term, bound: &mut Vec<&'a str>, out: &mut BTreeSet<String>) {
        match t.node() {
            Node::Atom(_) => {}
            Node::Var(x) => {
                if !bound.contains(&x.as_str()) {
                    out.insert(x.clone());
                }
            }
            Node::App(f, a) => {
                go(f, bound, out);
                go(a, bound, out);
            }
            Node::Lam(x, b) => {
                bound.push(x);
                go(b, bound, out);
                bound.pop();
            }
        }
    }
    let mut out = BTreeSet::new();
    go(t, &mut Vec::new(), &mut out);
    out
}

pub fn occurs_free(x: &str, t: &Term) -> bool {
    fn go(x: &str, t: &Term) -> bool {
        match t.node() {
            Node::Atom(_) => false,
            Node::Var(y) => x == y,
            Node::App(f, a) => go(x, f) || go(x, a),
            Node::Lam(y, b) => y != x && go(x, b),
        }
    }
    go(x, t)
}

/// Equality up to consistent renaming of bound variables.
pub fn alpha_eq(a: &Term, b: &Term) -> bool {
    // Each binder gets the depth at which it was introduced; a bound
    // occurrence is compared by the depth of the binder it refers to.
    fn lookup(env: &[&str], x: &str) -> Option<usize> {
        env.iter().rposition(|y| *y == x)
    }
    fn go<'a>(a: &'a Term, b: &'a Term, ea: &mut Vec<&'a str>, eb: &mut Vec<&'a str>) -> bool {
        if Arc::ptr_eq(&a.0, &b.0) && ea == eb {
            return true;
        }
        match (a.node(), b.node()) {
            (Node::Atom(x), Node::Atom(y)) => x == y,
            (Node::Var(x), Node::Var(y)) => match (lookup(ea, x), lookup(eb, y)) {
                (Some(i), Some(j)) => i == j,
                (None, None) => x == y,
                _ => false,
            },
            (Node::App(f1, a1), Node::App(f2, a2)) => go(f1, f2, ea, eb) && go(a1, a2, ea, eb),
            (Node::Lam(x, b1), Node::Lam(y, b2)) => {
                ea.push(x);
                eb.push(y);
                let r = go(b1, b2, ea, eb);
                ea.pop();
                eb.pop();
                r
            }
            _ => false,
        }
    }
    go(a, b, &mut Vec::new(), &mut Vec::new())
}

/// Deterministic fresh name: `hint`, then `hint1`, `hint2`, ...
pub fn fresh_var(avoid: &BTreeSet<String>, hint: &str) -> String {
    if !avoid.contains(hint) {
        return hint.to_string();
    }
    (1..)
        .map(|i| format!("{hint}{i}"))
        .find(|candidate| !avoid.contains(candidate))
        .expect("unbounded counter")
}

/// Capture-avoiding substitution `[s/x]t`.
pub fn substitute(t: &Term, x: &str, s: &Term) -> Term {
    let fv_s = free_vars(s);
    subst(t, x, s, &fv_s)
}

fn subst(t: &Term, x: &str, s: &Term, fv_s: &BTreeSet<String>) -> Term {
    match t.node() {
        Node::Atom(_) => t.clone(),
        Node::Var(y) => {
            if y == x {
                s.clone()
            } else {
                t.clone()
            }
        }
        Node::App(f, a) => {
            let f2 = subst(f, x, s, fv_s);
            let a2 = subst(a, x, s, fv_s);
            if Arc::ptr_eq(&f.0, &f2.0) && Arc::ptr_eq(&a.0, &a2.0) {
                t.clone()
            } else {
                Term::app(f2, a2)
            }
        }
        Node::Lam(y, body) => {
            if y == x || !occurs_free(x, body) {
                return t.clone();
            }
            if fv_s.contains(y) {
                let mut avoid = fv_s.clone();
                avoid.extend(free_vars(body));
                avoid.insert(x.to_string());
                let fresh = fresh_var(&avoid, y);
                let renamed = subst(body, y, &Term::var(fresh.clone()), &BTreeSet::from([fresh.clone()]));
                Term::lam(fresh, subst(&renamed, x, s, fv_s))
            } else {
                Term::lam(y.clone(), subst(body, x, s, fv_s))
            }
        }
    }
}

/// Simultaneous substitution of free variables. Binders are renamed when
/// they would capture a free variable of an inserted term.
pub fn substitute_all(t: &Term, map: &HashMap<String, Term>) -> Term {
    if map.is_empty() {
        return t.clone();
    }
    // Sequential substitution is equivalent here as long as no replacement
    // mentions another key; route through fresh intermediates otherwise.
    let mut avoid: BTreeSet<String> = free_vars(t);
    for v in map.values() {
        avoid.extend(free_vars(v));
    }
    avoid.extend(map.keys().cloned());
    let mut staged = t.clone();
    let mut finals = Vec::new();
    for (k, v) in map {
        let tmp = fresh_var(&avoid, &format!("{k}_"));
        avoid.insert(tmp.clone());
        staged = substitute(&staged, k, &Term::var(tmp.clone()));
        finals.push((tmp, v.clone()));
    }
    for (tmp, v) in finals {
        staged = substitute(&staged, &tmp, &v);
    }
    staged
}

pub fn subterm_at(t: &Term, pos: &Position) -> Result<Term> {
    let mut cur = t;
    for (i, step) in pos.0.iter().enumerate() {
        cur = match (step, cur.node()) {
            (Step::Fun, Node::App(f, _)) => f,
            (Step::Arg, Node::App(_, a)) => a,
            (Step::Body, Node::Lam(_, b)) => b,
            _ => {
                return Err(Error::InvalidPosition(format!(
                    "{pos}: step {} does not exist",
                    i + 1
                )))
            }
        };
    }
    Ok(cur.clone())
}

pub fn replace_at(t: &Term, pos: &Position, s: Term) -> Result<Term> {
    fn go(t: &Term, path: &[Step], s: Term, pos: &Position) -> Result<Term> {
        let Some((step, rest)) = path.split_first() else {
            return Ok(s);
        };
        match (step, t.node()) {
            (Step::Fun, Node::App(f, a)) => Ok(Term::app(go(f, rest, s, pos)?, a.clone())),
            (Step::Arg, Node::App(f, a)) => Ok(Term::app(f.clone(), go(a, rest, s, pos)?)),
            (Step::Body, Node::Lam(x, b)) => Ok(Term::lam(x.clone(), go(b, rest, s, pos)?)),
            _ => Err(Error::InvalidPosition(format!("{pos} does not address a subterm"))),
        }
    }
    go(t, &pos.0, s, pos)
}

/// All valid positions in pre-order (root, then function side, then
/// argument side).
pub fn positions(t: &Term) -> Vec<Position> {
    fn go(t: &Term, here: &mut Vec<Step>, out: &mut Vec<Position>) {
        out.push(Position(here.clone()));
        match t.node() {
            Node::App(f, a) => {
                here.push(Step::Fun);
                go(f, here, out);
                here.pop();
                here.push(Step::Arg);
                go(a, here, out);
                here.pop();
            }
            Node::Lam(_, b) => {
                here.push(Step::Body);
                go(b, here, out);
                here.pop();
            }
            _ => {}
        }
    }
    let mut out = Vec::new();
    go(t, &mut Vec::new(), &mut out);
    out
}
