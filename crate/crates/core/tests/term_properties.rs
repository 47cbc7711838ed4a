mod common;

use std::collections::BTreeSet;

use clshell::syntax::{from_json, to_json};
use clshell::term::{fresh_var, occurs_free, positions, replace_at, subterm_at};
use clshell::{alpha_eq, free_vars, parse_with, print_with, substitute, Node, PrintConfig, SyntaxConfig, Term};
use proptest::prelude::*;

use common::{term, VARS};

fn raw() -> SyntaxConfig {
    SyntaxConfig::raw().with_atoms(["Kappa"])
}

// Renames every binder to a name unused anywhere in the term.
fn rename_binders(t: &Term, avoid: &mut BTreeSet<String>) -> Term {
    match t.node() {
        Node::Atom(_) | Node::Var(_) => t.clone(),
        Node::App(f, a) => Term::app(rename_binders(f, avoid), rename_binders(a, avoid)),
        Node::Lam(x, b) => {
            let fresh = fresh_var(avoid, "b");
            avoid.insert(fresh.clone());
            let body = substitute(b, x, &Term::var(fresh.clone()));
            Term::lam(fresh, rename_binders(&body, avoid))
        }
    }
}

proptest! {
    #[test]
    fn alpha_eq_is_reflexive_and_symmetric(a in term(), b in term()) {
        prop_assert!(alpha_eq(&a, &a));
        prop_assert_eq!(alpha_eq(&a, &b), alpha_eq(&b, &a));
    }

    #[test]
    fn renaming_binders_preserves_alpha_class(t in term()) {
        let mut avoid: BTreeSet<String> = VARS.iter().map(|s| s.to_string()).collect();
        let renamed = rename_binders(&t, &mut avoid);
        prop_assert!(alpha_eq(&t, &renamed), "{} vs {}", t, renamed);
        prop_assert_eq!(free_vars(&t), free_vars(&renamed));
    }

    #[test]
    fn substitution_free_variables(t in term(), s in term(), x in prop::sample::select(&VARS[..])) {
        let r = substitute(&t, x, &s);
        let mut expected = free_vars(&t);
        if expected.remove(x) {
            expected.extend(free_vars(&s));
        }
        prop_assert_eq!(free_vars(&r), expected);
    }

    #[test]
    fn substituting_a_variable_for_itself(t in term(), x in prop::sample::select(&VARS[..])) {
        prop_assert!(alpha_eq(&substitute(&t, x, &Term::var(x)), &t));
    }

    #[test]
    fn substituting_for_an_absent_variable(t in term(), s in term(), x in prop::sample::select(&VARS[..])) {
        prop_assume!(!occurs_free(x, &t));
        prop_assert!(alpha_eq(&substitute(&t, x, &s), &t));
    }

    #[test]
    fn substitution_respects_alpha(t in term(), s in term(), x in prop::sample::select(&VARS[..])) {
        let mut avoid: BTreeSet<String> = VARS.iter().map(|s| s.to_string()).collect();
        let renamed = rename_binders(&t, &mut avoid);
        prop_assert!(alpha_eq(&substitute(&t, x, &s), &substitute(&renamed, x, &s)));
    }

    #[test]
    fn replace_then_read_back(t in term(), s in term(), pick in any::<prop::sample::Index>()) {
        let all = positions(&t);
        let p = &all[pick.index(all.len())];
        let replaced = replace_at(&t, p, s.clone()).unwrap();
        prop_assert_eq!(subterm_at(&replaced, p).unwrap(), s);
        let same = replace_at(&t, p, subterm_at(&t, p).unwrap()).unwrap();
        prop_assert_eq!(same, t.clone());
        prop_assert_eq!(all.len(), t.size());
    }

    #[test]
    fn print_parse_round_trip(t in term(), sugar in any::<bool>()) {
        let text = print_with(&t, PrintConfig { sugar });
        let back = parse_with(&text, &raw()).unwrap();
        prop_assert!(alpha_eq(&back, &t), "{} reparsed as {}", text, back);
    }

    #[test]
    fn json_round_trip(t in term()) {
        prop_assert_eq!(from_json(&to_json(&t)).unwrap(), t);
    }
}
