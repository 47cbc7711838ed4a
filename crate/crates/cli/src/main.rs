//! `clsh`: parse, compile, reduce and check combinatory terms.
//!
//! Exit status: 0 on success, 1 when a check fails, 2 on usage or syntax
//! errors, 3 when a step budget runs out.

use std::fmt::Write as _;
use std::io::{Read, Write as _};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use clshell::oracle::beta_normalize;
use clshell::rewrite::{declared_atoms, normalize_with};
use clshell::suite::{load_catalog, paper_catalog, render_table, run_checks, RuleMode, SuiteOptions, Verdict};
use clshell::syntax::{ast_tree, to_json};
use clshell::{compile, parse_with, print, RuleSet, Status, Strategy, SyntaxConfig, Term, Trace, DEFAULT_MAX_STEPS};

const EXIT_FAIL: u8 = 1;
const EXIT_USAGE: u8 = 2;
const EXIT_BUDGET: u8 = 3;

// Terms are trees and several passes over them recurse on depth.
const STACK_SIZE: usize = 512 * 1024 * 1024;

#[derive(Parser)]
#[command(name = "clsh", version, about = "Combinatory-logic workbench")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Parse a term and show its syntax tree.
    Parse {
        #[command(flatten)]
        input: TermInput,
        /// Print the JSON AST instead of the tree.
        #[arg(long)]
        json: bool,
    },
    /// Compile lambda abstractions into I, K and S.
    Compile {
        #[command(flatten)]
        input: TermInput,
        /// Also use the eta case `\x.M x = M`.
        #[arg(long)]
        eta: bool,
    },
    /// Reduce a term to normal form.
    Reduce {
        #[command(flatten)]
        input: TermInput,
        /// `base`, `derived`, or a rule file whose rules are added to `derived`.
        #[arg(long, default_value = "derived")]
        rules: String,
        #[arg(long, value_enum, default_value_t = StrategyArg::Lo)]
        strategy: StrategyArg,
        /// Step budget (default: $CLSH_MAX_STEPS, else 10000).
        #[arg(long)]
        max_steps: Option<usize>,
        /// Use the beta oracle on lambda terms instead of the rule engine.
        #[arg(long, conflicts_with_all = ["rules", "strategy"])]
        beta: bool,
        /// With --beta: contract eta redexes once beta is done.
        #[arg(long, requires = "beta")]
        eta: bool,
        /// Print every step.
        #[arg(long)]
        trace: bool,
        #[arg(long)]
        json: bool,
    },
    /// Run equation checks.
    Check {
        /// The built-in suite.
        #[arg(long, value_parser = ["paper"], required_unless_present = "catalog", conflicts_with = "catalog")]
        suite: Option<String>,
        /// A catalog file in the built-in suite's format.
        #[arg(long)]
        catalog: Option<PathBuf>,
        /// Replace derived combinators by their compiled definitions.
        #[arg(long)]
        definitions: bool,
        /// Overrides every check's budget (default: $CLSH_MAX_STEPS, else each check's own).
        #[arg(long)]
        max_steps: Option<usize>,
        #[arg(long)]
        json: bool,
    },
}

#[derive(Args)]
struct TermInput {
    /// The term; `-` reads standard input.
    term: String,
    /// Declare an opaque atom (repeatable).
    #[arg(long = "atom", value_name = "NAME")]
    atoms: Vec<String>,
    /// Keep `B2` and `'` as atoms instead of expanding them.
    #[arg(long)]
    raw: bool,
}

#[derive(Clone, Copy, ValueEnum)]
enum StrategyArg {
    /// Leftmost-outermost (normal order).
    Lo,
    /// Rightmost-innermost.
    Ri,
}

struct Failure {
    code: u8,
    message: String,
}

fn usage(message: impl ToString) -> Failure {
    Failure { code: EXIT_USAGE, message: message.to_string() }
}

impl TermInput {
    fn config(&self, extra_atoms: &[String]) -> SyntaxConfig {
        let base = if self.raw { SyntaxConfig::raw() } else { SyntaxConfig::default() };
        base.with_atoms(self.atoms.iter().chain(extra_atoms).cloned())
    }

    fn read(&self, extra_atoms: &[String]) -> Result<Term, Failure> {
        let text = if self.term == "-" {
            let mut s = String::new();
            std::io::stdin().read_to_string(&mut s).map_err(usage)?;
            s
        } else {
            self.term.clone()
        };
        parse_with(&text, &self.config(extra_atoms)).map_err(usage)
    }
}

fn env_max_steps() -> Result<Option<usize>, Failure> {
    match std::env::var("CLSH_MAX_STEPS") {
        Ok(v) => v
            .trim()
            .parse()
            .map(Some)
            .map_err(|_| usage(format!("CLSH_MAX_STEPS must be a number, got `{v}`"))),
        Err(_) => Ok(None),
    }
}

fn emit_json(out: &mut String, v: &serde_json::Value) {
    out.push_str(&serde_json::to_string_pretty(v).expect("JSON values serialize"));
    out.push('\n');
}

fn print_trace(out: &mut String, trace: &Trace) {
    let _ = writeln!(out, "   {}", trace.initial);
    for (i, s) in trace.steps.iter().enumerate() {
        let _ = writeln!(out, "{:>3} {}  [{} at {}]", i + 1, s.result, s.rule, s.pos);
    }
}

// Output is collected here and written once, so a closed pipe is not an error.
fn run(cli: Cli, out: &mut String) -> Result<u8, Failure> {
    match cli.command {
        Command::Parse { input, json } => {
            let t = input.read(&[])?;
            if json {
                emit_json(out, &to_json(&t));
            } else {
                out.push_str(&ast_tree(&t));
            }
            Ok(0)
        }
        Command::Compile { input, eta } => {
            let t = input.read(&[])?;
            let _ = writeln!(out, "{}", compile(&t, eta));
            Ok(0)
        }
        Command::Reduce { input, rules, strategy, max_steps, beta, eta, trace, json } => {
            let max_steps = max_steps.or(env_max_steps()?).unwrap_or(DEFAULT_MAX_STEPS);
            let (t, result) = if beta {
                let t = input.read(&[])?;
                let tr = beta_normalize(&t, max_steps, eta);
                (t, tr)
            } else {
                let (set, atoms) = load_rules(&rules)?;
                let t = input.read(&atoms)?;
                let strategy = match strategy {
                    StrategyArg::Lo => Strategy::LeftmostOutermost,
                    StrategyArg::Ri => Strategy::RightmostInnermost,
                };
                let tr = normalize_with(&t, &set, max_steps, strategy);
                (t, tr)
            };
            if json {
                let mut v = serde_json::json!({
                    "input": print(&t),
                    "result": print(result.result()),
                    "status": result.status,
                    "steps": result.steps.len(),
                });
                if trace {
                    v["trace"] = result.to_json()["steps"].clone();
                }
                emit_json(out, &v);
            } else {
                if trace {
                    print_trace(out, &result);
                } else {
                    let _ = writeln!(out, "{}", result.result());
                }
                if result.status == Status::BudgetExhausted {
                    eprintln!("budget of {max_steps} steps exhausted");
                }
            }
            Ok(match result.status {
                Status::NormalForm => 0,
                Status::BudgetExhausted => EXIT_BUDGET,
            })
        }
        Command::Check { suite: _, catalog, definitions, max_steps, json } => {
            let checks = match catalog {
                Some(path) => {
                    let text = std::fs::read_to_string(&path)
                        .map_err(|e| usage(format!("{}: {e}", path.display())))?;
                    load_catalog(&text).map_err(usage)?
                }
                None => paper_catalog(),
            };
            let opts = SuiteOptions {
                max_steps: max_steps.or(env_max_steps()?),
                rule_mode: if definitions { RuleMode::Definitions } else { RuleMode::Rules },
            };
            let reports = run_checks(&checks, &opts);
            if json {
                emit_json(out, &serde_json::Value::Array(reports.iter().map(|r| r.to_json()).collect()));
            } else {
                out.push_str(&render_table(&reports));
            }
            let bad: Vec<_> = reports.iter().filter(|r| !r.ok()).collect();
            Ok(if bad.is_empty() {
                0
            } else if bad.iter().all(|r| r.verdict == Verdict::Budget) {
                EXIT_BUDGET
            } else {
                EXIT_FAIL
            })
        }
    }
}

fn load_rules(source: &str) -> Result<(RuleSet, Vec<String>), Failure> {
    match source {
        "base" => Ok((RuleSet::cl_base(), Vec::new())),
        "derived" => Ok((RuleSet::derived(), Vec::new())),
        path => {
            let text = std::fs::read_to_string(path).map_err(|e| usage(format!("{path}: {e}")))?;
            let extra = RuleSet::parse(path, &text, &SyntaxConfig::default()).map_err(usage)?;
            let set = RuleSet::derived().extend("derived+file", &extra).map_err(usage)?;
            Ok((set, declared_atoms(&text)))
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let worker = std::thread::Builder::new()
        .stack_size(STACK_SIZE)
        .spawn(move || {
            let mut out = String::new();
            let status = run(cli, &mut out);
            let mut stdout = std::io::stdout().lock();
            let _ = stdout.write_all(out.as_bytes()).and_then(|_| stdout.flush());
            status
        })
        .expect("spawn worker thread");
    match worker.join().expect("worker thread panicked") {
        Ok(code) => ExitCode::from(code),
        Err(f) => {
            eprintln!("error: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
