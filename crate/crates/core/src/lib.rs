//! A workbench for combinatory logic: terms with optional lambda
//! abstraction, bracket abstraction into `I`, `K`, `S`, weak first-order
//! rewriting with traces, a normal-order beta oracle, and a data-driven
//! suite of equation checks.
//!
//! ```
//! use clshell::{compile, normalize, parse, RuleSet};
//!
//! let t = parse("\\x.\\y.x").unwrap();
//! let ski = compile(&t, false);
//! assert_eq!(ski.to_string(), "S (K K) I");
//!
//! let applied = parse("S (K K) I a b").unwrap();
//! let trace = normalize(&applied, &RuleSet::cl_base(), 100);
//! assert_eq!(trace.result().to_string(), "a");
//! ```

pub mod compile;
pub mod crosscheck;
pub mod error;
pub mod generate;
pub mod oracle;
pub mod rewrite;
pub mod suite;
pub mod syntax;
pub mod term;

pub use compile::{compile, compile_abstraction, compile_abstraction_with, define_as_ski, expand_definitions};
pub use error::{Error, Result, SyntaxError};
pub use oracle::{beta_normalize, beta_step};
pub use rewrite::{
    normalize, normalize_with, reduce, reduce_step, Direction, RewriteRule, RuleSet, Status, Strategy, Trace,
    DEFAULT_MAX_STEPS,
};
pub use suite::{load_catalog, run_paper_suite, CheckReport, EquationCheck, SuiteOptions, Verdict};
pub use syntax::{parse, parse_with, print, print_with, PrintConfig, SyntaxConfig};
pub use term::{alpha_eq, free_vars, substitute, Atom, Node, Position, Step, Term};

// The guide's snippets run as doctests.
#[cfg(doctest)]
#[doc = include_str!("../../../book/src/introduction.md")]
pub mod book_introduction {}
#[cfg(doctest)]
#[doc = include_str!("../../../book/src/terms.md")]
pub mod book_terms {}
#[cfg(doctest)]
#[doc = include_str!("../../../book/src/disassembling.md")]
pub mod book_disassembling {}
#[cfg(doctest)]
#[doc = include_str!("../../../book/src/rewriting.md")]
pub mod book_rewriting {}
#[cfg(doctest)]
#[doc = include_str!("../../../book/src/oracle.md")]
pub mod book_oracle {}
#[cfg(doctest)]
#[doc = include_str!("../../../book/src/equations.md")]
pub mod book_equations {}
#[cfg(doctest)]
#[doc = include_str!("../../../book/src/cli.md")]
pub mod book_cli {}
