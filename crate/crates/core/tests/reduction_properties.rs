mod common;

use clshell::oracle::beta_reduce;
use clshell::rewrite::{verify_trace, Strategy};
use clshell::term::occurs_free;
use clshell::{
    alpha_eq, compile, compile_abstraction, expand_definitions, free_vars, normalize, normalize_with, reduce,
    substitute, Atom, Node, RuleSet, Status, Term,
};
use proptest::prelude::*;

use common::{applicative, derived_atoms, lambda, VARS};

const BUDGET: usize = 2_000;

fn no_beta_redex(t: &Term) -> bool {
    match t.node() {
        Node::App(f, a) => !matches!(f.node(), Node::Lam(..)) && no_beta_redex(f) && no_beta_redex(a),
        Node::Lam(_, b) => no_beta_redex(b),
        _ => true,
    }
}

proptest! {
    #[test]
    fn compiled_terms_are_lambda_free(t in lambda(), eta in any::<bool>()) {
        let c = compile(&t, eta);
        prop_assert!(!c.has_lambda());
        prop_assert_eq!(free_vars(&c), free_vars(&t));
        prop_assert_eq!(compile(&c, eta), c);
    }

    #[test]
    fn abstraction_binds_the_variable(m in applicative(vec![Atom::S, Atom::K, Atom::I]),
                                      x in prop::sample::select(&VARS[..])) {
        let c = compile_abstraction(x, &m).unwrap();
        prop_assert!(!occurs_free(x, &c));
    }

    // (\x.M) N and M[x:=N] are convertible, so by confluence they cannot
    // reach different normal forms.
    #[test]
    fn abstraction_simulates_beta(m in applicative(vec![Atom::S, Atom::K, Atom::I, Atom::B]),
                                  n in applicative(vec![Atom::K, Atom::I]),
                                  x in prop::sample::select(&VARS[..])) {
        let rules = RuleSet::derived();
        let applied = Term::app(compile_abstraction(x, &m).unwrap(), n.clone());
        let a = reduce(&applied, &rules, BUDGET, Strategy::LeftmostOutermost);
        let b = reduce(&substitute(&m, x, &n), &rules, BUDGET, Strategy::LeftmostOutermost);
        if a.status == Status::NormalForm && b.status == Status::NormalForm {
            prop_assert!(alpha_eq(&a.term, &b.term), "{} vs {}", a.term, b.term);
        }
    }

    #[test]
    fn normal_forms_are_stable(t in applicative(derived_atoms())) {
        let rules = RuleSet::derived();
        let tr = normalize(&t, &rules, BUDGET);
        prop_assert!(verify_trace(&tr, &rules));
        if tr.is_normal_form() {
            let again = normalize(tr.result(), &rules, BUDGET);
            prop_assert!(again.steps.is_empty());
        } else {
            prop_assert_eq!(tr.steps.len(), BUDGET);
        }
    }

    #[test]
    fn strategies_agree(t in applicative(derived_atoms())) {
        let rules = RuleSet::derived();
        let lo = normalize_with(&t, &rules, BUDGET, Strategy::LeftmostOutermost);
        let ri = normalize_with(&t, &rules, BUDGET, Strategy::RightmostInnermost);
        prop_assert!(verify_trace(&ri, &rules));
        if lo.is_normal_form() && ri.is_normal_form() {
            prop_assert!(alpha_eq(lo.result(), ri.result()));
        }
    }

    // Each derived rule is a theorem of the base axioms once combinators
    // are read as their definitions.
    #[test]
    fn derived_reduction_matches_expanded_reduction(t in applicative(derived_atoms())) {
        let base = RuleSet::cl_base();
        let by_rules = reduce(&t, &RuleSet::derived(), BUDGET, Strategy::LeftmostOutermost);
        prop_assume!(by_rules.status == Status::NormalForm);
        let a = reduce(&expand_definitions(&by_rules.term), &base, 20 * BUDGET, Strategy::LeftmostOutermost);
        let b = reduce(&expand_definitions(&t), &base, 20 * BUDGET, Strategy::LeftmostOutermost);
        prop_assume!(a.status == Status::NormalForm && b.status == Status::NormalForm);
        prop_assert!(alpha_eq(&a.term, &b.term), "{} : {} vs {}", t, a.term, b.term);
    }

    #[test]
    fn beta_normal_forms_have_no_redex(t in lambda(), eta in any::<bool>()) {
        let r = beta_reduce(&t, BUDGET, eta);
        if r.status == Status::NormalForm {
            prop_assert!(no_beta_redex(&r.term), "{}", r.term);
            prop_assert!(free_vars(&r.term).is_subset(&free_vars(&t)));
        }
    }
}
