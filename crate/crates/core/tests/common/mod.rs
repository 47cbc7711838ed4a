#![allow(dead_code)]

use clshell::{Atom, Term};
use proptest::prelude::*;

pub const VARS: [&str; 5] = ["x", "y", "z", "M", "rho"];

fn var() -> impl Strategy<Value = Term> {
    prop::sample::select(&VARS[..]).prop_map(Term::var)
}

fn atom() -> impl Strategy<Value = Term> {
    let mut atoms: Vec<Atom> = Atom::BUILTIN.to_vec();
    atoms.push(Atom::User("Kappa".into()));
    prop::sample::select(atoms).prop_map(Term::atom)
}

/// Any term: atoms, variables, applications and abstractions.
pub fn term() -> impl Strategy<Value = Term> {
    prop_oneof![var(), atom()].prop_recursive(6, 40, 2, |inner| {
        prop_oneof![
            3 => (inner.clone(), inner.clone()).prop_map(|(f, a)| Term::app(f, a)),
            1 => (prop::sample::select(&VARS[..]), inner).prop_map(|(x, b)| Term::lam(x, b)),
        ]
    })
}

/// Lambda-free terms over `atoms` and the test variables.
pub fn applicative(atoms: Vec<Atom>) -> impl Strategy<Value = Term> {
    let leaf = prop_oneof![
        var(),
        prop::sample::select(atoms).prop_map(Term::atom),
    ];
    leaf.prop_recursive(5, 24, 2, |inner| (inner.clone(), inner).prop_map(|(f, a)| Term::app(f, a)))
}

/// Pure lambda terms (no atoms).
pub fn lambda() -> impl Strategy<Value = Term> {
    var().prop_recursive(6, 30, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(f, a)| Term::app(f, a)),
            (prop::sample::select(&VARS[..3]), inner).prop_map(|(x, b)| Term::lam(x, b)),
        ]
    })
}

pub fn derived_atoms() -> Vec<Atom> {
    Atom::BUILTIN.iter().filter(|a| **a != Atom::V).cloned().collect()
}
