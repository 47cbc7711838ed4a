//! Bracket abstraction over the I/K/S basis.
//!
//! `\x.M` is taken apart by cases on the shape of `M`:
//!
//! * `\x.x` is `I`;
//! * `\x.y` is `K y` for any leaf other than `x` (variables and atoms alike);
//! * `\x.M N` is `S (\x.M) (\x.N)`.
//!
//! No other optimisation is applied, except the optional eta case
//! `\x.M x = M` when `x` is not free in `M`.

use std::collections::{BTreeMap, BTreeSet};

use crate::error::{Error, Result};
use crate::syntax::{parse_with, SyntaxConfig};
use crate::term::{occurs_free, Atom, Node, Term};

/// Eliminates one abstraction. The body must already be lambda-free.
pub fn compile_abstraction(x: &str, body: &Term) -> Result<Term> {
    compile_abstraction_with(x, body, false)
}

pub fn compile_abstraction_with(x: &str, body: &Term, use_eta: bool) -> Result<Term> {
    match body.node() {
        Node::Lam(..) => Err(Error::NestedLambda),
        Node::Var(y) if y == x => Ok(Term::atom(Atom::I)),
        Node::Var(_) | Node::Atom(_) => Ok(Term::app(Term::atom(Atom::K), body.clone())),
        Node::App(m, n) => {
            if use_eta && n.as_var() == Some(x) && !occurs_free(x, m) {
                if m.has_lambda() {
                    return Err(Error::NestedLambda);
                }
                return Ok(m.clone());
            }
            let s = Term::atom(Atom::S);
            Ok(Term::apps(
                s,
                [compile_abstraction_with(x, m, use_eta)?, compile_abstraction_with(x, n, use_eta)?],
            ))
        }
    }
}

/// Removes every abstraction, innermost first.
pub fn compile(t: &Term, use_eta: bool) -> Term {
    match t.node() {
        Node::Atom(_) | Node::Var(_) => t.clone(),
        Node::App(f, a) => Term::app(compile(f, use_eta), compile(a, use_eta)),
        Node::Lam(x, b) => {
            let body = compile(b, use_eta);
            compile_abstraction_with(x, &body, use_eta).expect("compiled body is lambda-free")
        }
    }
}

/// Source text of each definable atom. `B2` and `quote` are plain
/// abbreviations; the rest are lambda definitions over other catalog atoms.
fn definition_source(atom: &Atom) -> Option<&'static str> {
    Some(match atom {
        Atom::I => "\\x.x",
        Atom::K => "\\x y.x",
        Atom::S => "\\x y z.x z (y z)",
        Atom::B => "\\x y z.x (y z)",
        Atom::C => "\\x y z.x z y",
        Atom::D => "\\x y r.r x y",
        Atom::Phi => "\\x y z w.x (y w) (z w)",
        Atom::Psi => "\\x y z w.x (y z) (y w)",
        Atom::B2 => "B B B",
        Atom::C2 => "\\x y z w.x w y z",
        Atom::Curry => "\\h x y.h [x,y]",
        Atom::P => "\\z.z K",
        Atom::Q => "\\z.z (K I)",
        Atom::Eps => "\\z.z I",
        Atom::Fork => "\\f g t.[f t, g t]",
        Atom::Comp => "\\f g x.f (g x)",
        Atom::Quote => "K",
        Atom::V | Atom::User(_) => return None,
    })
}

/// The defining lambda term of an atom, before compilation.
pub fn definition(atom: &Atom) -> Result<Term> {
    let src = definition_source(atom).ok_or_else(|| Error::NoDefinition(atom.clone()))?;
    Ok(parse_with(src, &SyntaxConfig::raw()).expect("catalog definitions parse"))
}

fn is_basis(atom: &Atom) -> bool {
    matches!(atom, Atom::I | Atom::K | Atom::S)
}

/// Compiled form of an atom's definition. Other catalog atoms mentioned by
/// the definition (`D` inside `Curry`, `B` inside `B2`) are kept as atoms;
/// [`expand_definitions`] removes them as well.
pub fn define_as_ski(atom: &Atom) -> Result<Term> {
    if is_basis(atom) {
        return Ok(Term::atom(atom.clone()));
    }
    Ok(compile(&definition(atom)?, false))
}

/// Replaces every definable non-basis atom by its [`define_as_ski`] form.
/// Opaque atoms (`V`, user atoms) are left in place.
pub fn expand_definitions(t: &Term) -> Term {
    let mut cache = BTreeMap::new();
    expand_cached(t, &mut cache, &mut BTreeSet::new())
}

fn expand_cached(t: &Term, cache: &mut BTreeMap<Atom, Term>, active: &mut BTreeSet<Atom>) -> Term {
    match t.node() {
        Node::Var(_) => t.clone(),
        Node::Atom(a) if is_basis(a) || definition_source(a).is_none() => t.clone(),
        Node::Atom(a) => {
            if let Some(done) = cache.get(a) {
                return done.clone();
            }
            assert!(active.insert(a.clone()), "cyclic definition for {a}");
            let body = compile(&definition(a).expect("checked above"), false);
            let expanded = expand_cached(&body, cache, active);
            active.remove(a);
            cache.insert(a.clone(), expanded.clone());
            expanded
        }
        Node::App(f, x) => Term::app(expand_cached(f, cache, active), expand_cached(x, cache, active)),
        Node::Lam(x, b) => Term::lam(x.clone(), expand_cached(b, cache, active)),
    }
}
