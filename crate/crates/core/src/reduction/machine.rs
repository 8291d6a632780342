//! Two-counter machines: parsing, validation, simulation and command traces.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Counter {
    X,
    Y,
}

impl Counter {
    pub const BOTH: [Counter; 2] = [Counter::X, Counter::Y];

    pub fn name(self) -> &'static str {
        match self {
            Counter::X => "x",
            Counter::Y => "y",
        }
    }

    fn parse(tok: &str) -> Option<Counter> {
        match tok {
            "x" => Some(Counter::X),
            "y" => Some(Counter::Y),
            _ => None,
        }
    }
}

impl fmt::Display for Counter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One command; locations are 1-based.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Command {
    Inc(Counter),
    Dec(Counter),
    Goto(usize),
    /// `jz c k k'`: go to `k` when `c = 0`, to `k'` otherwise.
    Jz(Counter, usize, usize),
    Halt,
}

impl fmt::Display for Command {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Command::Inc(c) => write!(f, "inc {c}"),
            Command::Dec(c) => write!(f, "dec {c}"),
            Command::Goto(k) => write!(f, "goto {k}"),
            Command::Jz(c, k, k2) => write!(f, "jz {c} {k} {k2}"),
            Command::Halt => f.write_str("halt"),
        }
    }
}

/// A letter of a command trace.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum TraceLetter {
    Inc(Counter),
    Dec(Counter),
    Goto(usize),
    /// `(goto l_k, c = 0)`
    Zero(Counter, usize),
    /// `(goto l_k, c > 0)`
    Positive(Counter, usize),
    Halt,
}

impl TraceLetter {
    pub fn is_incdec(self) -> bool {
        matches!(self, TraceLetter::Inc(_) | TraceLetter::Dec(_))
    }

    pub fn is_goto(self) -> bool {
        matches!(
            self,
            TraceLetter::Goto(_) | TraceLetter::Zero(..) | TraceLetter::Positive(..)
        )
    }
}

impl fmt::Display for TraceLetter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            TraceLetter::Inc(c) => write!(f, "inc({c})"),
            TraceLetter::Dec(c) => write!(f, "dec({c})"),
            TraceLetter::Goto(k) => write!(f, "goto({k})"),
            TraceLetter::Zero(c, k) => write!(f, "jz0({c},{k})"),
            TraceLetter::Positive(c, k) => write!(f, "jgt({c},{k})"),
            TraceLetter::Halt => f.write_str("halt"),
        }
    }
}

impl FromStr for TraceLetter {
    type Err = String;

    fn from_str(s: &str) -> Result<TraceLetter, String> {
        let bad = || format!("not a trace letter: `{s}`");
        if s == "halt" {
            return Ok(TraceLetter::Halt);
        }
        let (head, rest) = s.split_once('(').ok_or_else(bad)?;
        let args: Vec<&str> = rest.strip_suffix(')').ok_or_else(bad)?.split(',').collect();
        let counter = |i: usize| args.get(i).and_then(|t| Counter::parse(t)).ok_or_else(bad);
        let location = |i: usize| args.get(i).and_then(|t| t.parse::<usize>().ok()).ok_or_else(bad);
        match (head, args.len()) {
            ("inc", 1) => Ok(TraceLetter::Inc(counter(0)?)),
            ("dec", 1) => Ok(TraceLetter::Dec(counter(0)?)),
            ("goto", 1) => Ok(TraceLetter::Goto(location(0)?)),
            ("jz0", 2) => Ok(TraceLetter::Zero(counter(0)?, location(1)?)),
            ("jgt", 2) => Ok(TraceLetter::Positive(counter(0)?, location(1)?)),
            _ => Err(bad()),
        }
    }
}

/// The `5n + 5` trace letters of a machine with `n` commands, in alphabet order:
/// `inc(x) dec(x) inc(y) dec(y)`, the `goto`s, the `jz0`s for `x` then `y`,
/// the `jgt`s for `x` then `y`, and `halt`.
pub fn trace_alphabet(n: usize) -> Vec<TraceLetter> {
    let mut letters = vec![
        TraceLetter::Inc(Counter::X),
        TraceLetter::Dec(Counter::X),
        TraceLetter::Inc(Counter::Y),
        TraceLetter::Dec(Counter::Y),
    ];
    letters.extend((1..=n).map(TraceLetter::Goto));
    for c in Counter::BOTH {
        letters.extend((1..=n).map(|k| TraceLetter::Zero(c, k)));
    }
    for c in Counter::BOTH {
        letters.extend((1..=n).map(|k| TraceLetter::Positive(c, k)));
    }
    letters.push(TraceLetter::Halt);
    letters
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MachineError {
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("machine has no commands")]
    Empty,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MachineViolation {
    /// A jump target outside `1..=n`.
    OutOfRange { location: usize, target: usize },
    /// `inc`/`dec` in the last location has no successor.
    FallsOff { location: usize },
    /// `dec c` at `i` is not preceded by `jz c z i` with `z != i`.
    UnguardedDec { location: usize },
    /// Some command other than the guarding `jz` reaches the `dec` at `location`.
    DecReachedFrom { location: usize, from: usize },
}

impl fmt::Display for MachineViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MachineViolation::OutOfRange { location, target } => {
                write!(f, "l{location}: target {target} is out of range")
            }
            MachineViolation::FallsOff { location } => write!(f, "l{location}: no next location"),
            MachineViolation::UnguardedDec { location } => {
                write!(
                    f,
                    "l{location}: dec must follow a `jz` whose nonzero branch is l{location}"
                )
            }
            MachineViolation::DecReachedFrom { location, from } => {
                write!(f, "l{location}: dec is also reached from l{from}")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TwoCounterMachine {
    commands: Vec<Command>,
}

impl TwoCounterMachine {
    pub fn new(commands: Vec<Command>) -> Result<TwoCounterMachine, MachineError> {
        if commands.is_empty() {
            return Err(MachineError::Empty);
        }
        Ok(TwoCounterMachine { commands })
    }

    pub fn len(&self) -> usize {
        self.commands.len()
    }

    pub fn is_empty(&self) -> bool {
        self.commands.is_empty()
    }

    /// Command at 1-based `location`.
    pub fn command(&self, location: usize) -> Command {
        self.commands[location - 1]
    }

    pub fn commands(&self) -> &[Command] {
        &self.commands
    }

    pub fn alphabet(&self) -> Vec<TraceLetter> {
        trace_alphabet(self.len())
    }

    /// Locations reachable in one step from `location`, ignoring counter values.
    fn targets(&self, location: usize) -> Vec<usize> {
        match self.command(location) {
            Command::Inc(_) | Command::Dec(_) => vec![location + 1],
            Command::Goto(k) => vec![k],
            Command::Jz(_, k, k2) => vec![k, k2],
            Command::Halt => vec![],
        }
    }

    pub fn validate(&self) -> Vec<MachineViolation> {
        let n = self.len();
        let mut violations = Vec::new();
        for i in 1..=n {
            match self.command(i) {
                Command::Inc(_) | Command::Dec(_) if i == n => {
                    violations.push(MachineViolation::FallsOff { location: i })
                }
                Command::Goto(k) if !(1..=n).contains(&k) => {
                    violations.push(MachineViolation::OutOfRange { location: i, target: k })
                }
                Command::Jz(_, k, k2) => {
                    for t in [k, k2] {
                        if !(1..=n).contains(&t) {
                            violations.push(MachineViolation::OutOfRange { location: i, target: t });
                        }
                    }
                }
                _ => {}
            }
        }
        for i in 1..=n {
            let Command::Dec(c) = self.command(i) else { continue };
            let guarded =
                i > 1 && matches!(self.command(i - 1), Command::Jz(c2, z, nz) if c2 == c && nz == i && z != i);
            if !guarded {
                violations.push(MachineViolation::UnguardedDec { location: i });
            }
            for j in 1..=n {
                if guarded && j == i - 1 {
                    continue;
                }
                if j <= n && self.targets(j).contains(&i) {
                    violations.push(MachineViolation::DecReachedFrom { location: i, from: j });
                }
            }
        }
        violations
    }

    /// Runs from `<l_1, 0, 0>` for at most `max_steps` commands.
    pub fn simulate(&self, max_steps: usize) -> Simulation {
        let mut config = MachineConfig {
            location: 1,
            x: 0,
            y: 0,
        };
        let mut configs = vec![config];
        let mut trace = Vec::new();
        for _ in 0..max_steps {
            let (letter, next) = match self.command(config.location) {
                Command::Inc(c) => {
                    *config.counter_mut(c) += 1;
                    (TraceLetter::Inc(c), config.location + 1)
                }
                Command::Dec(c) => {
                    let v = config.counter_mut(c);
                    // Guarded decrements never hit zero; saturate on unvalidated input.
                    *v = v.saturating_sub(1);
                    (TraceLetter::Dec(c), config.location + 1)
                }
                Command::Goto(k) => (TraceLetter::Goto(k), k),
                Command::Jz(c, k, k2) => {
                    if config.counter(c) == 0 {
                        (TraceLetter::Zero(c, k), k)
                    } else {
                        (TraceLetter::Positive(c, k2), k2)
                    }
                }
                Command::Halt => {
                    trace.push(TraceLetter::Halt);
                    let outcome = if config.x == 0 && config.y == 0 {
                        Outcome::ZeroHalted
                    } else {
                        Outcome::Halted
                    };
                    return Simulation {
                        outcome,
                        configs,
                        trace,
                    };
                }
            };
            trace.push(letter);
            if !(1..=self.len()).contains(&next) {
                // Only reachable on unvalidated machines: treat as running off the program.
                return Simulation {
                    outcome: Outcome::Timeout,
                    configs,
                    trace,
                };
            }
            config.location = next;
            configs.push(config);
        }
        Simulation {
            outcome: Outcome::Timeout,
            configs,
            trace,
        }
    }
}

impl fmt::Display for TwoCounterMachine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, c) in self.commands.iter().enumerate() {
            writeln!(f, "{}: {c}", i + 1)?;
        }
        Ok(())
    }
}

impl FromStr for TwoCounterMachine {
    type Err = MachineError;

    fn from_str(text: &str) -> Result<TwoCounterMachine, MachineError> {
        parse_machine(text)
    }
}

/// Parses `<idx>: <command>` entries, one per line or separated by `;`.
/// Indices must run `1, 2, 3, ...`; `#` starts a comment.
pub fn parse_machine(text: &str) -> Result<TwoCounterMachine, MachineError> {
    let mut commands = Vec::new();
    for (idx, raw) in text.lines().enumerate() {
        let line_no = idx + 1;
        let line = raw.split('#').next().unwrap_or("");
        for entry in line.split(';').map(str::trim).filter(|e| !e.is_empty()) {
            let err = |message: String| MachineError::Syntax { line: line_no, message };
            let (index, body) = entry
                .split_once(':')
                .ok_or_else(|| err(format!("expected `<idx>: <command>`, found `{entry}`")))?;
            let index: usize = index
                .trim()
                .parse()
                .map_err(|_| err(format!("bad location index `{}`", index.trim())))?;
            if index != commands.len() + 1 {
                return Err(err(format!("expected location {}, found {index}", commands.len() + 1)));
            }
            commands.push(parse_command(body.trim()).map_err(err)?);
        }
    }
    TwoCounterMachine::new(commands)
}

fn parse_command(body: &str) -> Result<Command, String> {
    let toks: Vec<&str> = body.split_whitespace().collect();
    let counter = |t: &str| Counter::parse(t).ok_or_else(|| format!("unknown counter `{t}`"));
    let location = |t: &str| t.parse::<usize>().map_err(|_| format!("bad location `{t}`"));
    match toks.as_slice() {
        ["inc", c] => Ok(Command::Inc(counter(c)?)),
        ["dec", c] => Ok(Command::Dec(counter(c)?)),
        ["goto", k] => Ok(Command::Goto(location(k)?)),
        ["jz", c, k, k2] => Ok(Command::Jz(counter(c)?, location(k)?, location(k2)?)),
        ["halt"] => Ok(Command::Halt),
        _ => Err(format!("unknown command `{body}`")),
    }
}

/// `<l, α_x, α_y>`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct MachineConfig {
    pub location: usize,
    pub x: u64,
    pub y: u64,
}

impl MachineConfig {
    pub fn counter(&self, c: Counter) -> u64 {
        match c {
            Counter::X => self.x,
            Counter::Y => self.y,
        }
    }

    fn counter_mut(&mut self, c: Counter) -> &mut u64 {
        match c {
            Counter::X => &mut self.x,
            Counter::Y => &mut self.y,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Outcome {
    /// Halted with both counters zero.
    ZeroHalted,
    /// Halted with a nonzero counter.
    Halted,
    /// The step budget ran out.
    Timeout,
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Outcome::ZeroHalted => "zero-halted",
            Outcome::Halted => "halted",
            Outcome::Timeout => "timeout",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Simulation {
    pub outcome: Outcome,
    /// Configurations visited, starting with `<l_1, 0, 0>`.
    pub configs: Vec<MachineConfig>,
    pub trace: Vec<TraceLetter>,
}

pub fn format_trace(trace: &[TraceLetter]) -> String {
    trace.iter().map(ToString::to_string).collect::<Vec<_>>().join(" ")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::samples::COUNTDOWN_MACHINE_TEXT;

    #[test]
    fn countdown_parses_and_validates() {
        let m = parse_machine(COUNTDOWN_MACHINE_TEXT).unwrap();
        assert_eq!(m.len(), 6);
        assert_eq!(m.command(3), Command::Jz(Counter::X, 3, 4));
        assert!(m.validate().is_empty());
        assert_eq!(parse_machine(&m.to_string()).unwrap(), m);
    }

    #[test]
    fn countdown_trace() {
        let m = parse_machine(COUNTDOWN_MACHINE_TEXT).unwrap();
        let sim = m.simulate(1000);
        assert_eq!(sim.outcome, Outcome::ZeroHalted);
        assert_eq!(
            format_trace(&sim.trace),
            "inc(x) inc(x) jgt(x,4) dec(x) jgt(x,3) jgt(x,4) dec(x) jz0(x,6) halt"
        );
        assert_eq!(sim.configs.len(), 9);
        assert_eq!(
            sim.configs[3],
            MachineConfig {
                location: 4,
                x: 2,
                y: 0
            }
        );
    }

    #[test]
    fn halting_with_nonzero_counter() {
        let m = parse_machine("1: inc x; 2: halt").unwrap();
        let sim = m.simulate(10);
        assert_eq!(sim.outcome, Outcome::Halted);
        assert_eq!(format_trace(&sim.trace), "inc(x) halt");
    }

    #[test]
    fn self_loop_times_out() {
        let m = parse_machine("1: goto 1").unwrap();
        for budget in [0, 1, 100] {
            let sim = m.simulate(budget);
            assert_eq!(sim.outcome, Outcome::Timeout);
            assert_eq!(sim.trace.len(), budget);
        }
    }

    #[test]
    fn validation_errors() {
        let m = parse_machine("1: dec x\n2: halt").unwrap();
        assert_eq!(m.validate(), vec![MachineViolation::UnguardedDec { location: 1 }]);
        let m = parse_machine("1: goto 9\n2: inc x\n3: inc x\n4: inc x\n5: inc x\n6: halt").unwrap();
        assert_eq!(
            m.validate(),
            vec![MachineViolation::OutOfRange { location: 1, target: 9 }]
        );
        let m = parse_machine("1: halt\n2: inc y").unwrap();
        assert_eq!(m.validate(), vec![MachineViolation::FallsOff { location: 2 }]);
        let m = parse_machine("1: jz x 1 3\n2: goto 3\n3: dec x\n4: halt").unwrap();
        assert!(m.validate().contains(&MachineViolation::UnguardedDec { location: 3 }));
        let m = parse_machine("1: inc x\n2: jz x 2 3\n3: dec x\n4: goto 3\n5: halt").unwrap();
        assert_eq!(
            m.validate(),
            vec![MachineViolation::DecReachedFrom { location: 3, from: 4 }]
        );
    }

    #[test]
    fn syntax_errors_carry_lines() {
        assert_eq!(
            parse_machine("1: inc x\n3: halt"),
            Err(MachineError::Syntax {
                line: 2,
                message: "expected location 2, found 3".into()
            })
        );
        assert!(matches!(
            parse_machine("1: inc z"),
            Err(MachineError::Syntax { line: 1, .. })
        ));
        assert_eq!(parse_machine("# nothing\n"), Err(MachineError::Empty));
    }

    #[test]
    fn alphabet_size_and_tokens() {
        for n in 1..8 {
            assert_eq!(trace_alphabet(n).len(), 5 * n + 5);
        }
        for letter in trace_alphabet(3) {
            assert_eq!(letter.to_string().parse::<TraceLetter>().unwrap(), letter);
        }
        assert!("jz0(z,1)".parse::<TraceLetter>().is_err());
    }
}
