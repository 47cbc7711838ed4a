//! Normal-order beta(-eta) reduction over full lambda terms.
//!
//! This engine shares nothing with [`crate::rewrite`] beyond the term type:
//! atoms are inert here, and reduction goes under binders.

use crate::rewrite::{Direction, Reduction, Status, Trace, TraceStep};
use crate::term::{occurs_free, replace_at, substitute, Node, Position, Step, Term};

/// Contracts the leftmost-outermost beta redex, under binders included.
pub fn beta_step(t: &Term) -> Option<Term> {
    find_beta(t, &mut Vec::new()).map(|(res, path)| {
        replace_at(t, &Position(path), res).expect("redex position exists")
    })
}

fn find_beta(t: &Term, path: &mut Vec<Step>) -> Option<(Term, Vec<Step>)> {
    // walk the left spine iteratively; the head redex sits at its bottom
    let mut nodes = vec![t];
    let mut cur = t;
    while let Node::App(f, _) = cur.node() {
        nodes.push(f);
        cur = f;
    }
    let n = nodes.len() - 1;
    if let Node::Lam(x, body) = nodes[n].node() {
        if n == 0 {
            path.push(Step::Body);
            let found = find_beta(body, path);
            path.pop();
            return found;
        }
        let Node::App(_, arg) = nodes[n - 1].node() else { unreachable!() };
        let mut p = path.clone();
        p.extend(std::iter::repeat_n(Step::Fun, n - 1));
        return Some((substitute(body, x, arg), p));
    }
    for depth in (0..n).rev() {
        let Node::App(_, arg) = nodes[depth].node() else { unreachable!() };
        let base = path.len();
        path.extend(std::iter::repeat_n(Step::Fun, depth));
        path.push(Step::Arg);
        let found = find_beta(arg, path);
        path.truncate(base);
        if found.is_some() {
            return found;
        }
    }
    None
}

/// Contracts the leftmost-outermost eta redex `\x.M x` with `x` not free
/// in `M`.
pub fn eta_step(t: &Term) -> Option<Term> {
    find_eta_position(t).map(|(res, path)| replace_at(t, &Position(path), res).expect("valid position"))
}

/// Beta steps until none apply, then eta steps when `use_eta` is set, for
/// at most `max_steps` contractions in total.
pub fn beta_normalize(t: &Term, max_steps: usize, use_eta: bool) -> Trace {
    let mut steps: Vec<TraceStep> = Vec::new();
    let (_, status) = run(t, max_steps, use_eta, |rule, pos, result| {
        steps.push(TraceStep { rule: rule.into(), pos, direction: Direction::Forward, result: result.clone() });
    });
    Trace { initial: t.clone(), steps, status }
}

/// [`beta_normalize`] without the trace.
pub fn beta_reduce(t: &Term, max_steps: usize, use_eta: bool) -> Reduction {
    let mut steps = 0;
    let (term, status) = run(t, max_steps, use_eta, |_, _, _| steps += 1);
    Reduction { term, steps, status }
}

fn run(
    t: &Term,
    max_steps: usize,
    use_eta: bool,
    mut on_step: impl FnMut(&'static str, Position, &Term),
) -> (Term, Status) {
    let mut cur = t.clone();
    let mut taken = 0;
    let status = loop {
        let (rule, next) = match find_beta(&cur, &mut Vec::new()) {
            Some(found) => ("beta", found),
            None if use_eta => match find_eta_position(&cur) {
                Some(found) => ("eta", found),
                None => break Status::NormalForm,
            },
            None => break Status::NormalForm,
        };
        if taken == max_steps {
            break Status::BudgetExhausted;
        }
        let (contractum, path) = next;
        let pos = Position(path);
        cur = replace_at(&cur, &pos, contractum).expect("redex position exists");
        taken += 1;
        on_step(rule, pos, &cur);
    };
    (cur, status)
}

fn find_eta_position(t: &Term) -> Option<(Term, Vec<Step>)> {
    fn find(t: &Term, path: &mut Vec<Step>) -> Option<(Term, Vec<Step>)> {
        match t.node() {
            Node::Lam(x, body) => {
                if let Node::App(m, last) = body.node() {
                    if last.as_var() == Some(x.as_str()) && !occurs_free(x, m) {
                        return Some((m.clone(), path.clone()));
                    }
                }
                path.push(Step::Body);
                let r = find(body, path);
                path.pop();
                r
            }
            Node::App(f, a) => {
                path.push(Step::Fun);
                let r = find(f, path);
                path.pop();
                if r.is_some() {
                    return r;
                }
                path.push(Step::Arg);
                let r = find(a, path);
                path.pop();
                r
            }
            Node::Atom(_) | Node::Var(_) => None,
        }
    }
    find(t, &mut Vec::new())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse;
    use crate::term::alpha_eq;

    fn p(s: &str) -> Term {
        parse(s).unwrap()
    }

    #[test]
    fn beta_examples() {
        assert_eq!(beta_step(&p("(\\x.x) a")), Some(p("a")));
        let once = beta_step(&p("(\\x.\\y.x) a b")).unwrap();
        assert_eq!(once, p("(\\y.a) b"));
        assert_eq!(beta_step(&once), Some(p("a")));
        assert_eq!(beta_step(&p("\\z.(\\x.x) z")), Some(p("\\z.z")));
        assert_eq!(beta_step(&p("x y")), None);
        // atoms are inert
        assert_eq!(beta_step(&p("K a b")), None);
    }

    #[test]
    fn head_redex_first() {
        // (\x.x) ((\y.y) a) contracts the outer redex first
        assert_eq!(beta_step(&p("(\\x.x) ((\\y.y) a)")), Some(p("(\\y.y) a")));
        assert_eq!(beta_step(&p("f ((\\y.y) a) ((\\z.z) b)")), Some(p("f a ((\\z.z) b)")));
    }

    #[test]
    fn capture_is_avoided() {
        let t = beta_normalize(&p("(\\x.\\y.x) y"), 10, false);
        assert!(alpha_eq(t.result(), &p("\\z.y")));
    }

    #[test]
    fn normalization() {
        let omega = p("(\\x.x x)(\\x.x x)");
        let t = beta_normalize(&omega, 100, false);
        assert_eq!(t.status, Status::BudgetExhausted);
        assert_eq!(t.steps.len(), 100);

        let t = beta_normalize(&p("\\x.f x"), 10, true);
        assert_eq!(*t.result(), p("f"));
        assert_eq!(t.steps[0].rule, "eta");
        let t = beta_normalize(&p("\\x.f x"), 10, false);
        assert_eq!(*t.result(), p("\\x.f x"));
        // eta needs x not free in the function part
        let t = beta_normalize(&p("\\x.x x"), 10, true);
        assert!(t.steps.is_empty());

        let t = beta_normalize(&p("(\\h.\\x.\\y.h (D x y)) f a b"), 100, false);
        assert_eq!(*t.result(), p("f (D a b)"));
        assert_eq!(t.steps.len(), 3);
        assert_eq!(t.status, Status::NormalForm);
    }

    #[test]
    fn eta_step_examples() {
        assert_eq!(eta_step(&p("\\x.f x")), Some(p("f")));
        assert_eq!(eta_step(&p("g (\\y.h z y)")), Some(p("g (h z)")));
        assert_eq!(eta_step(&p("\\x.x")), None);
    }
}
