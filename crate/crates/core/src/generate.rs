//! Seeded random terms for sampling-based checks.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::term::{Atom, Term};

const BINDERS: [&str; 3] = ["x", "y", "z"];

/// A closed pure lambda term with at most `max_size` nodes (and at least
/// two, the smallest closed term being `\x.x`). Binder names are drawn from
/// a small pool, so shadowing occurs.
pub fn closed_lambda<R: Rng + ?Sized>(rng: &mut R, max_size: usize) -> Term {
    let size = rng.gen_range(2..=max_size.max(2));
    lambda_of_size(rng, size, &mut Vec::new())
}

fn lambda_of_size<R: Rng + ?Sized>(rng: &mut R, size: usize, scope: &mut Vec<String>) -> Term {
    if size == 1 {
        return Term::var(scope.choose(rng).expect("non-empty scope").clone());
    }
    let abstraction = scope.is_empty() || size == 2 || rng.gen_bool(0.4);
    if abstraction {
        let x = BINDERS.choose(rng).unwrap().to_string();
        scope.push(x.clone());
        let body = lambda_of_size(rng, size - 1, scope);
        scope.pop();
        return Term::lam(x, body);
    }
    let left = rng.gen_range(1..size - 1);
    let f = lambda_of_size(rng, left, scope);
    let a = lambda_of_size(rng, size - 1 - left, scope);
    Term::app(f, a)
}

/// A lambda-free term with at most `max_size` nodes whose leaves are drawn
/// from `atoms` and `vars`.
pub fn applicative<R: Rng + ?Sized>(rng: &mut R, max_size: usize, atoms: &[Atom], vars: &[&str]) -> Term {
    let size = rng.gen_range(1..=max_size.max(1));
    applicative_of_size(rng, size, atoms, vars)
}

fn applicative_of_size<R: Rng + ?Sized>(rng: &mut R, size: usize, atoms: &[Atom], vars: &[&str]) -> Term {
    // app nodes need two children, so even sizes round down to a leaf count
    if size < 3 {
        let pick_var = !vars.is_empty() && (atoms.is_empty() || rng.gen_bool(0.3));
        return if pick_var {
            Term::var(*vars.choose(rng).unwrap())
        } else {
            Term::atom(atoms.choose(rng).unwrap().clone())
        };
    }
    let left = rng.gen_range(1..size - 1);
    Term::app(
        applicative_of_size(rng, left, atoms, vars),
        applicative_of_size(rng, size - 1 - left, atoms, vars),
    )
}

/// Any term: atoms (including user atoms), variables, applications and
/// abstractions, free variables allowed.
pub fn any_term<R: Rng + ?Sized>(rng: &mut R, max_size: usize) -> Term {
    let size = rng.gen_range(1..=max_size.max(1));
    any_of_size(rng, size)
}

fn any_of_size<R: Rng + ?Sized>(rng: &mut R, size: usize) -> Term {
    const VARS: [&str; 5] = ["x", "y", "z", "M", "rho"];
    if size == 1 {
        return match rng.gen_range(0..3) {
            0 => Term::var(*VARS.choose(rng).unwrap()),
            1 => Term::atom(Atom::User("Kappa".into())),
            _ => Term::atom(Atom::BUILTIN.choose(rng).unwrap().clone()),
        };
    }
    if size == 2 || rng.gen_bool(0.3) {
        return Term::lam(*VARS.choose(rng).unwrap(), any_of_size(rng, size - 1));
    }
    let left = rng.gen_range(1..size - 1);
    Term::app(any_of_size(rng, left), any_of_size(rng, size - 1 - left))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::free_vars;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn closed_terms_are_closed_and_bounded() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..500 {
            let t = closed_lambda(&mut rng, 12);
            assert!(free_vars(&t).is_empty(), "{t}");
            assert!((2..=12).contains(&t.size()), "{t}");
        }
    }

    #[test]
    fn applicative_terms_are_lambda_free() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..500 {
            let t = applicative(&mut rng, 10, &[Atom::S, Atom::K], &["x"]);
            assert!(!t.has_lambda());
            assert!(t.size() <= 10);
        }
    }

    #[test]
    fn generation_is_deterministic() {
        let a: Vec<Term> = {
            let mut rng = ChaCha8Rng::seed_from_u64(3);
            (0..20).map(|_| any_term(&mut rng, 9)).collect()
        };
        let b: Vec<Term> = {
            let mut rng = ChaCha8Rng::seed_from_u64(3);
            (0..20).map(|_| any_term(&mut rng, 9)).collect()
        };
        assert_eq!(a, b);
    }
}
