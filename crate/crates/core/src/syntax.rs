//! Concrete syntax for terms.
//!
//! ```text
//! term   := binder | comp
//! binder := ("\" | "λ" | "lambda") ident+ "." term
//! comp   := app ("." term)?                 right-assoc, looser than app
//! app    := prim+ binder?
//! prim   := ident | "(" term ")" | "[" term "," term "]"
//!         | "<" term "," term ">" | "'" prim
//! ```
//!
//! `[M,N]` is `D M N`, `<M,N>` is `Fork M N`, `M . N` is `Comp M N` and
//! `'M` is `K M`. Catalog names parse as atoms (`p` and `q` included);
//! every other identifier is a variable unless declared in
//! [`SyntaxConfig::atoms`].

use std::collections::BTreeSet;
use std::fmt::Write as _;

use serde::Deserialize;

use crate::error::{Error, Result, SyntaxError};
use crate::term::{Atom, Node, Term};

#[derive(Debug, Clone)]
pub struct SyntaxConfig {
    /// Expand definitional abbreviations while parsing: `B2` becomes
    /// `B B B` and `'M` becomes `K M`. With this off they stay as the
    /// `B2` and `quote` atoms.
    pub expand_sugar: bool,
    /// Extra identifiers to treat as opaque atoms.
    pub atoms: BTreeSet<String>,
}

impl Default for SyntaxConfig {
    fn default() -> Self {
        SyntaxConfig { expand_sugar: true, atoms: BTreeSet::new() }
    }
}

impl SyntaxConfig {
    /// Parse exactly what is written: no abbreviation is expanded.
    pub fn raw() -> Self {
        SyntaxConfig { expand_sugar: false, ..Self::default() }
    }

    pub fn with_atoms<I, S>(mut self, atoms: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: Into<String>,
    {
        self.atoms.extend(atoms.into_iter().map(Into::into));
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Lambda,
    Dot,
    LParen,
    RParen,
    LBracket,
    RBracket,
    LAngle,
    RAngle,
    Comma,
    Quote,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Lambda => "lambda".into(),
            Tok::Dot => "`.`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::LBracket => "`[`".into(),
            Tok::RBracket => "`]`".into(),
            Tok::LAngle => "`<`".into(),
            Tok::RAngle => "`>`".into(),
            Tok::Comma => "`,`".into(),
            Tok::Quote => "`'`".into(),
        }
    }
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: usize,
    column: usize,
}

fn alias(c: char) -> Option<&'static str> {
    match c {
        'ε' => Some("eps"),
        'Φ' => Some("Phi"),
        'Ψ' => Some("Psi"),
        'ρ' => Some("rho"),
        _ => None,
    }
}

fn is_ident_start(c: char) -> bool {
    c.is_ascii_alphabetic() || c == '_'
}

fn is_ident_continue(c: char) -> bool {
    c.is_ascii_alphanumeric() || c == '_' || c == '²'
}

fn lex(text: &str) -> Result<(Vec<Spanned>, (usize, usize))> {
    let mut out = Vec::new();
    let mut chars = text.chars().peekable();
    let (mut line, mut column) = (1, 1);
    while let Some(&c) = chars.peek() {
        let (tl, tc) = (line, column);
        let mut bump = |chars: &mut std::iter::Peekable<std::str::Chars>| {
            let c = chars.next().unwrap();
            if c == '\n' {
                line += 1;
                column = 1;
            } else {
                column += 1;
            }
            c
        };
        let tok = match c {
            c if c.is_whitespace() => {
                bump(&mut chars);
                continue;
            }
            '#' => {
                while chars.peek().is_some_and(|&c| c != '\n') {
                    bump(&mut chars);
                }
                continue;
            }
            '\\' | 'λ' => {
                bump(&mut chars);
                Tok::Lambda
            }
            '.' | '∘' => {
                bump(&mut chars);
                Tok::Dot
            }
            '(' => {
                bump(&mut chars);
                Tok::LParen
            }
            ')' => {
                bump(&mut chars);
                Tok::RParen
            }
            '[' => {
                bump(&mut chars);
                Tok::LBracket
            }
            ']' => {
                bump(&mut chars);
                Tok::RBracket
            }
            '<' | '⟨' => {
                bump(&mut chars);
                Tok::LAngle
            }
            '>' | '⟩' => {
                bump(&mut chars);
                Tok::RAngle
            }
            ',' => {
                bump(&mut chars);
                Tok::Comma
            }
            '\'' => {
                bump(&mut chars);
                Tok::Quote
            }
            c if alias(c).is_some() => {
                bump(&mut chars);
                let mut name = alias(c).unwrap().to_string();
                while chars.peek().is_some_and(|&c| is_ident_continue(c)) {
                    name.push(bump(&mut chars));
                }
                Tok::Ident(name.replace('²', "2"))
            }
            c if is_ident_start(c) => {
                let mut name = String::new();
                while chars.peek().is_some_and(|&c| is_ident_continue(c)) {
                    name.push(bump(&mut chars));
                }
                let name = name.replace('²', "2");
                if name == "lambda" {
                    Tok::Lambda
                } else {
                    Tok::Ident(name)
                }
            }
            other => {
                return Err(SyntaxError {
                    line: tl,
                    column: tc,
                    message: format!("unexpected character `{other}`"),
                }
                .into())
            }
        };
        out.push(Spanned { tok, line: tl, column: tc });
    }
    Ok((out, (line, column)))
}

struct Parser<'a> {
    toks: Vec<Spanned>,
    pos: usize,
    end: (usize, usize),
    cfg: &'a SyntaxConfig,
}

impl Parser<'_> {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|s| &s.tok)
    }

    fn error(&self, message: impl Into<String>) -> Error {
        let (line, column) = self
            .toks
            .get(self.pos)
            .map(|s| (s.line, s.column))
            .unwrap_or(self.end);
        SyntaxError { line, column, message: message.into() }.into()
    }

    fn expected(&self, what: &str) -> Error {
        match self.peek() {
            Some(t) => self.error(format!("expected {what}, found {}", t.describe())),
            None => self.error(format!("expected {what}")),
        }
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == Some(tok) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, tok: Tok, what: &str) -> Result<()> {
        if self.eat(&tok) {
            Ok(())
        } else {
            Err(self.expected(what))
        }
    }

    fn term(&mut self) -> Result<Term> {
        if self.peek() == Some(&Tok::Lambda) {
            return self.binder();
        }
        let head = self.app()?;
        if self.eat(&Tok::Dot) {
            let rest = self.term()?;
            return Ok(Term::apps(Term::atom(Atom::Comp), [head, rest]));
        }
        Ok(head)
    }

    fn binder(&mut self) -> Result<Term> {
        self.expect(Tok::Lambda, "lambda")?;
        let mut names = Vec::new();
        while let Some(Tok::Ident(name)) = self.peek() {
            let name = name.clone();
            if self.is_atom_name(&name) {
                return Err(self.error(format!("atom `{name}` cannot be bound")));
            }
            names.push(name);
            self.pos += 1;
        }
        if names.is_empty() {
            return Err(self.expected("binder variable"));
        }
        self.expect(Tok::Dot, "`.` after binders")?;
        let body = self.term()?;
        Ok(names.into_iter().rev().fold(body, |b, x| Term::lam(x, b)))
    }

    fn starts_prim(&self) -> bool {
        matches!(
            self.peek(),
            Some(Tok::Ident(_) | Tok::LParen | Tok::LBracket | Tok::LAngle | Tok::Quote)
        )
    }

    fn app(&mut self) -> Result<Term> {
        if !self.starts_prim() {
            return Err(self.expected("term"));
        }
        let mut t = self.prim()?;
        while self.starts_prim() {
            let a = self.prim()?;
            t = Term::app(t, a);
        }
        if self.peek() == Some(&Tok::Lambda) {
            let a = self.binder()?;
            t = Term::app(t, a);
        }
        Ok(t)
    }

    fn is_atom_name(&self, name: &str) -> bool {
        Atom::builtin(name).is_some() || self.cfg.atoms.contains(name)
    }

    fn ident(&self, name: &str) -> Term {
        match Atom::builtin(name) {
            Some(Atom::B2) if self.cfg.expand_sugar => {
                let b = Term::atom(Atom::B);
                Term::apps(b.clone(), [b.clone(), b])
            }
            Some(a) => Term::atom(a),
            None if self.cfg.atoms.contains(name) => Term::atom(Atom::User(name.to_string())),
            None => Term::var(name),
        }
    }

    fn prim(&mut self) -> Result<Term> {
        let Some(tok) = self.peek().cloned() else {
            return Err(self.expected("term"));
        };
        self.pos += 1;
        match tok {
            Tok::Ident(name) => Ok(self.ident(&name)),
            Tok::LParen => {
                let t = self.term()?;
                self.expect(Tok::RParen, "`)`")?;
                Ok(t)
            }
            Tok::LBracket => {
                let a = self.term()?;
                self.expect(Tok::Comma, "`,` in pair")?;
                let b = self.term()?;
                self.expect(Tok::RBracket, "`]`")?;
                Ok(Term::apps(Term::atom(Atom::D), [a, b]))
            }
            Tok::LAngle => {
                let a = self.term()?;
                self.expect(Tok::Comma, "`,` in fork")?;
                let b = self.term()?;
                self.expect(Tok::RAngle, "`>`")?;
                Ok(Term::apps(Term::atom(Atom::Fork), [a, b]))
            }
            Tok::Quote => {
                let t = self.prim()?;
                let q = if self.cfg.expand_sugar { Atom::K } else { Atom::Quote };
                Ok(Term::app(Term::atom(q), t))
            }
            _ => {
                self.pos -= 1;
                Err(self.expected("term"))
            }
        }
    }
}

pub fn parse(text: &str) -> Result<Term> {
    parse_with(text, &SyntaxConfig::default())
}

pub fn parse_with(text: &str, cfg: &SyntaxConfig) -> Result<Term> {
    let (toks, end) = lex(text)?;
    let mut p = Parser { toks, pos: 0, end, cfg };
    let t = p.term()?;
    if p.pos < p.toks.len() {
        return Err(p.expected("end of input"));
    }
    Ok(t)
}

#[derive(Debug, Clone, Copy, Default)]
pub struct PrintConfig {
    /// Render `D x y` as `[x,y]`, `Fork f g` as `<f,g>` and `Comp f g` as
    /// `f . g`.
    pub sugar: bool,
}

/// Single-line rendering with the minimum number of parentheses.
pub fn print(t: &Term) -> String {
    print_with(t, PrintConfig::default())
}

pub fn print_with(t: &Term, cfg: PrintConfig) -> String {
    let mut out = String::new();
    write_term(&mut out, t, Level::Lambda, cfg);
    out
}

// Binding strength, loosest first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
enum Level {
    Lambda,
    Comp,
    App,
    Atomic,
}

enum Sugar<'a> {
    Pair(&'a Term, &'a Term),
    Fork(&'a Term, &'a Term),
    Comp(&'a Term, &'a Term),
}

fn sugar(t: &Term) -> Option<Sugar<'_>> {
    let Node::App(f, b) = t.node() else { return None };
    let Node::App(h, a) = f.node() else { return None };
    match h.as_atom()? {
        Atom::D => Some(Sugar::Pair(a, b)),
        Atom::Fork => Some(Sugar::Fork(a, b)),
        Atom::Comp => Some(Sugar::Comp(a, b)),
        _ => None,
    }
}

fn level(t: &Term, cfg: PrintConfig) -> Level {
    if cfg.sugar {
        match sugar(t) {
            Some(Sugar::Pair(..) | Sugar::Fork(..)) => return Level::Atomic,
            Some(Sugar::Comp(..)) => return Level::Comp,
            None => {}
        }
    }
    match t.node() {
        Node::Lam(..) => Level::Lambda,
        Node::App(..) => Level::App,
        Node::Atom(_) | Node::Var(_) => Level::Atomic,
    }
}

fn write_term(out: &mut String, t: &Term, need: Level, cfg: PrintConfig) {
    if level(t, cfg) < need {
        out.push('(');
        write_term(out, t, Level::Lambda, cfg);
        out.push(')');
        return;
    }
    if cfg.sugar {
        match sugar(t) {
            Some(Sugar::Pair(a, b)) => {
                out.push('[');
                write_term(out, a, Level::Lambda, cfg);
                out.push(',');
                write_term(out, b, Level::Lambda, cfg);
                out.push(']');
                return;
            }
            Some(Sugar::Fork(a, b)) => {
                out.push('<');
                write_term(out, a, Level::Lambda, cfg);
                out.push(',');
                write_term(out, b, Level::Lambda, cfg);
                out.push('>');
                return;
            }
            Some(Sugar::Comp(a, b)) => {
                write_term(out, a, Level::App, cfg);
                out.push_str(" . ");
                write_term(out, b, Level::Comp, cfg);
                return;
            }
            None => {}
        }
    }
    match t.node() {
        Node::Atom(a) => out.push_str(a.name()),
        Node::Var(x) => out.push_str(x),
        Node::App(f, a) => {
            write_term(out, f, Level::App, cfg);
            out.push(' ');
            write_term(out, a, Level::Atomic, cfg);
        }
        Node::Lam(x, b) => {
            let _ = write!(out, "\\{x}.");
            write_term(out, b, Level::Lambda, cfg);
        }
    }
}

/// JSON AST: `{"atom":n}`, `{"var":n}`, `{"app":[f,a]}`, `{"lam":[x,body]}`.
pub fn to_json(t: &Term) -> serde_json::Value {
    serde_json::to_value(t).expect("terms always serialize")
}

pub fn from_json(v: &serde_json::Value) -> Result<Term> {
    Term::deserialize(v).map_err(|e| {
        Error::Syntax(SyntaxError { line: 0, column: 0, message: format!("bad JSON AST: {e}") })
    })
}

/// Indented tree view, one node per line.
pub fn ast_tree(t: &Term) -> String {
    fn go(out: &mut String, t: &Term, depth: usize) {
        let pad = "  ".repeat(depth);
        match t.node() {
            Node::Atom(a) => {
                let _ = writeln!(out, "{pad}Atom {a}");
            }
            Node::Var(x) => {
                let _ = writeln!(out, "{pad}Var {x}");
            }
            Node::App(f, a) => {
                let _ = writeln!(out, "{pad}App");
                go(out, f, depth + 1);
                go(out, a, depth + 1);
            }
            Node::Lam(x, b) => {
                let _ = writeln!(out, "{pad}Lam {x}");
                go(out, b, depth + 1);
            }
        }
    }
    let mut out = String::new();
    go(&mut out, t, 0);
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::term::alpha_eq;

    fn a(x: Atom) -> Term {
        Term::atom(x)
    }
    fn v(x: &str) -> Term {
        Term::var(x)
    }

    #[test]
    fn application_is_left_associative() {
        let t = parse("S K K x").unwrap();
        assert_eq!(t, Term::apps(a(Atom::S), [a(Atom::K), a(Atom::K), v("x")]));
    }

    #[test]
    fn pair_sugar() {
        assert_eq!(parse("[x,y]").unwrap(), Term::apps(a(Atom::D), [v("x"), v("y")]));
        assert_eq!(parse("<f,g>").unwrap(), Term::apps(a(Atom::Fork), [v("f"), v("g")]));
    }

    #[test]
    fn lambdas() {
        assert_eq!(parse("\\x.x").unwrap(), Term::lam("x", v("x")));
        assert_eq!(parse("lambda x y.x").unwrap(), Term::lam("x", Term::lam("y", v("x"))));
        assert_eq!(parse("λx.x").unwrap(), Term::lam("x", v("x")));
        // the body extends as far right as possible
        assert_eq!(
            parse("\\x.x x").unwrap(),
            Term::lam("x", Term::app(v("x"), v("x")))
        );
        // trailing lambda argument
        assert_eq!(parse("f \\x.x").unwrap(), Term::app(v("f"), Term::lam("x", v("x"))));
    }

    #[test]
    fn composition_is_right_associative_and_loose() {
        let t = parse("f . g x . h").unwrap();
        let comp = |l, r| Term::apps(a(Atom::Comp), [l, r]);
        assert_eq!(t, comp(v("f"), comp(Term::app(v("g"), v("x")), v("h"))));
        assert_eq!(parse("f ∘ g").unwrap(), comp(v("f"), v("g")));
        assert_eq!(parse("\\x.f . g").unwrap(), Term::lam("x", comp(v("f"), v("g"))));
    }

    #[test]
    fn atoms_and_variables() {
        assert_eq!(parse("p").unwrap(), a(Atom::P));
        assert_eq!(parse("q").unwrap(), a(Atom::Q));
        assert_eq!(parse("M").unwrap(), v("M"));
        assert_eq!(parse("rho").unwrap(), v("rho"));
        assert_eq!(parse("ρ").unwrap(), v("rho"));
        assert_eq!(parse("ε Φ Ψ").unwrap(), Term::apps(a(Atom::Eps), [a(Atom::Phi), a(Atom::Psi)]));
        assert_eq!(parse("Kappa").unwrap(), v("Kappa"));
        let cfg = SyntaxConfig::default().with_atoms(["Kappa"]);
        assert_eq!(parse_with("Kappa", &cfg).unwrap(), a(Atom::User("Kappa".into())));
    }

    #[test]
    fn abbreviations() {
        let b = a(Atom::B);
        assert_eq!(parse("B2").unwrap(), Term::apps(b.clone(), [b.clone(), b]));
        assert_eq!(parse("B²").unwrap(), parse("B B B").unwrap());
        assert_eq!(parse_with("B2", &SyntaxConfig::raw()).unwrap(), a(Atom::B2));
        assert_eq!(parse("'x").unwrap(), Term::app(a(Atom::K), v("x")));
        assert_eq!(
            parse_with("'x", &SyntaxConfig::raw()).unwrap(),
            Term::app(a(Atom::Quote), v("x"))
        );
        assert_eq!(parse("'(S K) r").unwrap(), parse("K (S K) r").unwrap());
    }

    #[test]
    fn syntax_errors_carry_location() {
        let Err(Error::Syntax(e)) = parse("\\x.") else { panic!() };
        assert_eq!((e.line, e.column), (1, 4));
        assert!(e.message.contains("expected term"), "{}", e.message);

        let Err(Error::Syntax(e)) = parse("S (K\n  x") else { panic!() };
        assert_eq!(e.line, 2);
        assert!(e.message.contains("`)`"));

        assert!(parse("").is_err());
        assert!(parse("x )").is_err());
        assert!(parse("\\K.K").is_err());
        assert!(parse("[x y]").is_err());
        assert!(parse("x $").is_err());
    }

    #[test]
    fn printing() {
        assert_eq!(print(&Term::apps(a(Atom::K), [v("a"), v("b")])), "K a b");
        assert_eq!(print(&Term::app(v("a"), Term::app(v("b"), v("c")))), "a (b c)");
        assert_eq!(print(&Term::lam("x", Term::app(v("x"), v("x")))), "\\x.x x");
        assert_eq!(print(&parse("(\\x.x) y").unwrap()), "(\\x.x) y");
        assert_eq!(print(&parse("f (\\x.x)").unwrap()), "f (\\x.x)");
        assert_eq!(print(&parse("[x,y] z").unwrap()), "D x y z");
    }

    #[test]
    fn sugared_printing() {
        let cfg = PrintConfig { sugar: true };
        assert_eq!(print_with(&parse("D x y").unwrap(), cfg), "[x,y]");
        assert_eq!(print_with(&parse("D x y z").unwrap(), cfg), "[x,y] z");
        assert_eq!(print_with(&parse("Fork p q z").unwrap(), cfg), "<p,q> z");
        assert_eq!(print_with(&parse("Comp eps (Fork (Comp k p) q)").unwrap(), cfg), "eps . <k . p,q>");
        assert_eq!(print_with(&parse("(f . g) . h").unwrap(), cfg), "(f . g) . h");
        assert_eq!(print_with(&parse("(f . g) x").unwrap(), cfg), "(f . g) x");
    }

    #[test]
    fn json_shape() {
        let t = parse("\\x.K x").unwrap();
        let j = to_json(&t);
        assert_eq!(
            j,
            serde_json::json!({"lam": ["x", {"app": [{"atom": "K"}, {"var": "x"}]}]})
        );
        assert!(alpha_eq(&from_json(&j).unwrap(), &t));
        assert!(from_json(&serde_json::json!({"pair": 1})).is_err());
    }
}
