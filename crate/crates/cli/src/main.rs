//! `nmda`: evaluate, compare and solve discounted-sum automata, and build and
//! check the two-counter machine reduction.
//!
//! Exit codes: 0 success or `true`, 1 `false`, 2 `unknown`, 3 bad input.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use nmda_core::automaton::{Automaton, LassoWord};
use nmda_core::compare::{decide, Case, ComparisonInstance, Relation, Verdict, WordMode, DEFAULT_SEARCH_DEPTH};
use nmda_core::eval::{word_value_finite, word_value_lasso, EvalError};
use nmda_core::games::{solve_optimal, Mode};
use nmda_core::rational::display_with_approx;
use nmda_core::reduction::{
    check_reduction, format_trace, parse_machine, CheckOptions, CorruptionKind, ReductionOutput, TwoCounterMachine,
    INFINITE_MODE_TAG,
};
use nmda_core::text::{parse_automaton, serialize_automaton};

const EXIT_FALSE: u8 = 1;
const EXIT_UNKNOWN: u8 = 2;
const EXIT_INPUT: u8 = 3;

#[derive(Parser, Debug)]
#[command(name = "nmda", version, about = "Exact discounted-sum automata toolkit")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Value of an automaton on a finite word or a lasso word.
    Eval {
        automaton: PathBuf,
        /// Whitespace-separated letters.
        #[arg(long, conflicts_with = "lasso", required_unless_present = "lasso")]
        word: Option<String>,
        /// `u|v` for the infinite word `u v v v ...`.
        #[arg(long)]
        lasso: Option<String>,
    },
    /// Compare a complete automaton `A` with a deterministic `D` on all words.
    Compare {
        left: PathBuf,
        right: PathBuf,
        #[arg(long, value_enum)]
        words: Words,
        #[arg(long, value_enum, default_value = "min-diff")]
        relation: RelationArg,
        /// Print a word realising the minimal difference.
        #[arg(long)]
        witness: bool,
    },
    /// Highest infinite-run value from every state, with an optimal strategy.
    Best { automaton: PathBuf },
    /// Lowest infinite-run value from every state, with an optimal strategy.
    Worst { automaton: PathBuf },
    /// Write the automata pair of a two-counter machine to `P.A` and `P.B`.
    Reduce {
        machine: PathBuf,
        #[arg(long)]
        out_prefix: PathBuf,
        #[arg(long, value_enum, default_value = "finite")]
        words: Words,
    },
    /// Run a two-counter machine and print its command trace.
    Simulate {
        machine: PathBuf,
        #[arg(long, default_value_t = 1_000_000)]
        max_steps: usize,
    },
    /// Compare `A` and `B` on the machine's trace and on corrupted traces.
    CheckReduction {
        machine: PathBuf,
        /// Corruptions per kind.
        #[arg(long, default_value_t = 50)]
        corruptions: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Words {
    Finite,
    Infinite,
}

impl From<Words> for WordMode {
    fn from(w: Words) -> WordMode {
        match w {
            Words::Finite => WordMode::Finite,
            Words::Infinite => WordMode::Infinite,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum RelationArg {
    Geq,
    Gt,
    Eq,
    MinDiff,
}

/// What a command printed and how it should exit.
struct Outcome {
    text: String,
    code: u8,
}

impl Outcome {
    fn ok(text: String) -> Outcome {
        Outcome { text, code: 0 }
    }
}

fn verdict_code(v: Verdict) -> u8 {
    match v {
        Verdict::True => 0,
        Verdict::False => EXIT_FALSE,
        Verdict::Unknown => EXIT_UNKNOWN,
    }
}

fn read(path: &Path) -> Result<String, String> {
    fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))
}

fn load_automaton(path: &Path) -> Result<Automaton, String> {
    parse_automaton(&read(path)?).map_err(|e| format!("{}: {e}", path.display()))
}

fn load_machine(path: &Path) -> Result<TwoCounterMachine, String> {
    let machine = parse_machine(&read(path)?).map_err(|e| format!("{}: {e}", path.display()))?;
    let violations = machine.validate();
    if !violations.is_empty() {
        let list: Vec<String> = violations.iter().map(ToString::to_string).collect();
        return Err(format!("{}: invalid machine: {}", path.display(), list.join("; ")));
    }
    Ok(machine)
}

fn eval(path: &Path, word: Option<&str>, lasso: Option<&str>) -> Result<Outcome, String> {
    let aut = load_automaton(path)?;
    let value = match (word, lasso) {
        (Some(w), _) => {
            let word = aut.parse_word(w).map_err(|e| e.to_string())?;
            word_value_finite(&aut, &word).map_err(|e| e.to_string())?
        }
        (None, Some(l)) => {
            let lasso = LassoWord::parse(&aut, l).map_err(|e| e.to_string())?;
            match word_value_lasso(&aut, &lasso) {
                Ok(v) => Some(v),
                Err(EvalError::NoRun) => None,
                Err(e) => return Err(e.to_string()),
            }
        }
        (None, None) => return Err("one of --word or --lasso is required".into()),
    };
    Ok(Outcome::ok(match value {
        Some(v) => format!("value: {}\n", display_with_approx(&v)),
        None => "value: none (no run reads the word)\n".into(),
    }))
}

fn compare(left: &Path, right: &Path, mode: WordMode, relation: RelationArg, witness: bool) -> Result<Outcome, String> {
    let instance =
        ComparisonInstance::new(load_automaton(left)?, load_automaton(right)?, mode).map_err(|e| e.to_string())?;
    let chosen = match relation {
        RelationArg::Geq | RelationArg::MinDiff => Relation::Geq,
        RelationArg::Gt => Relation::Gt,
        RelationArg::Eq => Relation::Eq,
    };
    let decision = decide(&instance, chosen, DEFAULT_SEARCH_DEPTH).map_err(|e| e.to_string())?;
    let report = &decision.report;
    let aut = instance.left();

    let mut out = String::new();
    let _ = writeln!(
        out,
        "words: {}",
        if mode == WordMode::Finite { "finite" } else { "infinite" }
    );
    let case = match report.case {
        Case::EqualFactors => "equal-factors",
        Case::ConstantLeft => "constant-left",
        Case::ConstantRight => "constant-right",
        Case::Unfolded => "unfolded",
    };
    let _ = writeln!(out, "case: {case}");
    let _ = writeln!(out, "min-diff: {}", display_with_approx(&report.min_diff));
    let attained = match mode {
        WordMode::Infinite => "n/a",
        WordMode::Finite if report.attained => "yes",
        WordMode::Finite => "no",
    };
    let _ = writeln!(out, "attained: {attained}");
    let _ = writeln!(out, "k: {}", report.unfold_depth);
    let _ = writeln!(out, "geq: {}", report.verdicts.geq);
    let _ = writeln!(out, "gt: {}", report.verdicts.gt);
    let _ = writeln!(out, "eq: {}", report.verdicts.eq);
    if witness {
        match &report.witness {
            Some(w) => {
                let _ = writeln!(out, "witness: {}", w.format(aut));
            }
            None => {
                let _ = writeln!(out, "witness: none");
            }
        }
    }
    let mut code = 0;
    if relation != RelationArg::MinDiff {
        let _ = writeln!(out, "verdict: {}", decision.verdict);
        if let Some(c) = decision
            .certificate
            .as_ref()
            .filter(|c| Some(*c) != report.witness.as_ref())
        {
            let _ = writeln!(out, "counterexample: {}", c.format(aut));
        }
        code = verdict_code(decision.verdict);
    }
    Ok(Outcome { text: out, code })
}

fn optimal(path: &Path, mode: Mode) -> Result<Outcome, String> {
    let aut = load_automaton(path)?;
    let solution = solve_optimal(&aut, mode).map_err(|e| e.to_string())?;
    let mut out = String::new();
    let _ = writeln!(out, "mode: {}", if mode == Mode::Max { "max" } else { "min" });
    for (q, v) in solution.values.iter() {
        let _ = writeln!(out, "value: {} {}", aut.state_name(q), display_with_approx(v));
    }
    for (q, &id) in solution.strategy.iter().enumerate() {
        let t = aut.transition(id);
        let _ = writeln!(
            out,
            "choose: {} {} {}",
            aut.state_name(q),
            aut.letter_name(t.letter),
            aut.state_name(t.target)
        );
    }
    let _ = writeln!(out, "initial: {}", display_with_approx(&solution.initial_value(&aut)));
    Ok(Outcome::ok(out))
}

fn reduce(path: &Path, prefix: &Path, mode: WordMode) -> Result<Outcome, String> {
    let machine = load_machine(path)?;
    let output = ReductionOutput::build(&machine, mode);
    let tag = if mode == WordMode::Infinite {
        format!("{INFINITE_MODE_TAG}\n")
    } else {
        String::new()
    };
    let mut out = String::new();
    for (ext, aut) in [("A", &output.a), ("B", &output.b)] {
        let mut file = prefix.as_os_str().to_owned();
        file.push(format!(".{ext}"));
        let file = PathBuf::from(file);
        fs::write(&file, format!("{tag}{}", serialize_automaton(aut)))
            .map_err(|e| format!("{}: {e}", file.display()))?;
        let _ = writeln!(
            out,
            "wrote {} ({} states, {} transitions)",
            file.display(),
            aut.num_states(),
            aut.transitions().len()
        );
    }
    let _ = writeln!(out, "alphabet: {} letters", output.alphabet.len());
    Ok(Outcome::ok(out))
}

fn simulate(path: &Path, max_steps: usize) -> Result<Outcome, String> {
    let machine = load_machine(path)?;
    let sim = machine.simulate(max_steps);
    let last = sim
        .configs
        .last()
        .expect("the initial configuration is always recorded");
    let mut out = String::new();
    let _ = writeln!(out, "outcome: {}", sim.outcome);
    let _ = writeln!(out, "steps: {}", sim.trace.len());
    let _ = writeln!(out, "final: <l{}, {}, {}>", last.location, last.x, last.y);
    let _ = writeln!(out, "trace: {}", format_trace(&sim.trace));
    Ok(Outcome::ok(out))
}

fn check(path: &Path, corruptions: usize, seed: u64) -> Result<Outcome, String> {
    let machine = load_machine(path)?;
    let options = CheckOptions {
        corruptions_per_kind: corruptions,
        seed,
        ..CheckOptions::default()
    };
    let report = check_reduction(&machine, &options).map_err(|e| e.to_string())?;
    let mut out = String::new();
    let _ = writeln!(out, "seed: {seed}");
    let _ = writeln!(out, "corruptions-per-kind: {corruptions}");
    let _ = writeln!(out, "outcome: {}", report.outcome);
    match &report.trace {
        Some(t) => {
            let expected = if report.outcome == nmda_core::reduction::Outcome::ZeroHalted {
                "B > A"
            } else {
                "B < A"
            };
            let _ = writeln!(out, "trace: {}", format_trace(&t.word));
            let _ = writeln!(out, "trace A: {}", display_with_approx(&t.a));
            let _ = writeln!(out, "trace B: {}", display_with_approx(&t.b));
            let _ = writeln!(out, "trace expects {expected}: {}", pass(t.holds));
        }
        None => {
            let _ = writeln!(out, "trace: not checked (timeout)");
        }
    }
    for kind in CorruptionKind::ALL {
        let checks: Vec<_> = report.corruptions.iter().filter(|c| c.kind == kind).collect();
        if report.inapplicable.contains(&kind) && checks.is_empty() {
            let _ = writeln!(out, "{kind}: inapplicable");
            continue;
        }
        let held = checks.iter().filter(|c| c.check.holds).count();
        let _ = writeln!(out, "{kind}: {held}/{} with B < A", checks.len());
        for c in checks {
            let _ = writeln!(
                out,
                "  seed {} {}: A = {} B = {} [{}]",
                c.seed,
                format_trace(&c.check.word),
                c.check.a,
                c.check.b,
                pass(c.check.holds)
            );
        }
    }
    if !report.suffixes.is_empty() {
        let held = report.suffixes.iter().filter(|s| s.holds).count();
        let _ = writeln!(out, "post-halt suffixes: {held}/{} unchanged", report.suffixes.len());
    }
    let all = report.all_hold();
    let _ = writeln!(
        out,
        "result: {}",
        if all {
            "all checks hold".to_string()
        } else {
            format!("{} checks failed", report.failures())
        }
    );
    Ok(Outcome {
        text: out,
        code: if all { 0 } else { EXIT_FALSE },
    })
}

fn pass(ok: bool) -> &'static str {
    if ok {
        "ok"
    } else {
        "FAILED"
    }
}

fn run(cli: Cli) -> Result<Outcome, String> {
    match cli.command {
        Command::Eval { automaton, word, lasso } => eval(&automaton, word.as_deref(), lasso.as_deref()),
        Command::Compare {
            left,
            right,
            words,
            relation,
            witness,
        } => compare(&left, &right, words.into(), relation, witness),
        Command::Best { automaton } => optimal(&automaton, Mode::Max),
        Command::Worst { automaton } => optimal(&automaton, Mode::Min),
        Command::Reduce {
            machine,
            out_prefix,
            words,
        } => reduce(&machine, &out_prefix, words.into()),
        Command::Simulate { machine, max_steps } => simulate(&machine, max_steps),
        Command::CheckReduction {
            machine,
            corruptions,
            seed,
        } => check(&machine, corruptions, seed),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { EXIT_INPUT } else { 0 });
        }
    };
    match run(cli) {
        Ok(outcome) => {
            print!("{}", outcome.text);
            ExitCode::from(outcome.code)
        }
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(EXIT_INPUT)
        }
    }
}
