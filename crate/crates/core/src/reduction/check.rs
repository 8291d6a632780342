//! Seeded trace corruptions and the empirical check of the reduction.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::compare::WordMode;
use crate::eval::{word_value_finite, EvalError};
use crate::rational::Rational;

use super::gadgets::ReductionOutput;
use super::machine::{Command, Counter, MachineViolation, Outcome, Simulation, TraceLetter, TwoCounterMachine};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum CorruptionKind {
    DropHalt,
    ExtraDec,
    ExtraInc,
    WrongSuccessor,
    FlipZeroJump,
    FlipPositiveJump,
}

impl CorruptionKind {
    pub const ALL: [CorruptionKind; 6] = [
        CorruptionKind::DropHalt,
        CorruptionKind::ExtraDec,
        CorruptionKind::ExtraInc,
        CorruptionKind::WrongSuccessor,
        CorruptionKind::FlipZeroJump,
        CorruptionKind::FlipPositiveJump,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CorruptionKind::DropHalt => "drop-halt",
            CorruptionKind::ExtraDec => "extra-dec",
            CorruptionKind::ExtraInc => "extra-inc",
            CorruptionKind::WrongSuccessor => "wrong-successor",
            CorruptionKind::FlipZeroJump => "flip-zero-jump",
            CorruptionKind::FlipPositiveJump => "flip-positive-jump",
        }
    }
}

impl fmt::Display for CorruptionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for CorruptionKind {
    type Err = String;

    fn from_str(s: &str) -> Result<CorruptionKind, String> {
        CorruptionKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| format!("unknown corruption kind `{s}`"))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("corruption `{0}` does not apply to this trace")]
pub struct Inapplicable(pub CorruptionKind);

/// Injects one violation of `kind` into the simulated trace.
///
/// Insertions and substitutions happen at or before the first `halt`, so the
/// corrupted word's halt prefix differs from the machine's unique trace.
/// `DropHalt` is deterministic and ignores the seed.
pub fn corrupt_trace(
    machine: &TwoCounterMachine,
    sim: &Simulation,
    kind: CorruptionKind,
    seed: u64,
) -> Result<Vec<TraceLetter>, Inapplicable> {
    let trace = &sim.trace;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let halt_at = trace.iter().position(|&l| l == TraceLetter::Halt);
    let active = halt_at.unwrap_or(trace.len());
    let fail = Err(Inapplicable(kind));
    let mut word = trace.clone();
    match kind {
        CorruptionKind::DropHalt => {
            // The empty word has value 0 in both automata, so it violates nothing strictly.
            let Some(h) = halt_at.filter(|&h| h > 0) else {
                return fail;
            };
            word.truncate(h);
        }
        CorruptionKind::ExtraDec | CorruptionKind::ExtraInc => {
            let c = *Counter::BOTH.choose(&mut rng).expect("two counters");
            let letter = if kind == CorruptionKind::ExtraDec {
                TraceLetter::Dec(c)
            } else {
                TraceLetter::Inc(c)
            };
            word.insert(rng.gen_range(0..=active), letter);
        }
        CorruptionKind::WrongSuccessor => {
            if active == 0 {
                return fail;
            }
            let i = rng.gen_range(0..active);
            let mut options: Vec<TraceLetter> = (1..=machine.len())
                .map(TraceLetter::Goto)
                .filter(|&l| l != trace[i])
                .collect();
            if options.is_empty() {
                options = machine
                    .alphabet()
                    .into_iter()
                    .filter(|&l| l != trace[i] && l != TraceLetter::Halt)
                    .collect();
            }
            word[i] = *options.choose(&mut rng).expect("alphabet has at least ten letters");
        }
        CorruptionKind::FlipZeroJump | CorruptionKind::FlipPositiveJump => {
            let spots: Vec<usize> = (0..active)
                .filter(|&i| match trace[i] {
                    TraceLetter::Zero(..) => kind == CorruptionKind::FlipZeroJump,
                    TraceLetter::Positive(..) => kind == CorruptionKind::FlipPositiveJump,
                    _ => false,
                })
                .collect();
            let Some(&i) = spots.choose(&mut rng) else { return fail };
            let Command::Jz(c, k, k2) = machine.command(sim.configs[i].location) else {
                return fail;
            };
            word[i] = if kind == CorruptionKind::FlipZeroJump {
                TraceLetter::Positive(c, k2)
            } else {
                TraceLetter::Zero(c, k)
            };
        }
    }
    Ok(word)
}

/// The word up to and including its first `halt`.
pub fn pref_halt(word: &[TraceLetter]) -> &[TraceLetter] {
    match word.iter().position(|&l| l == TraceLetter::Halt) {
        Some(h) => &word[..=h],
        None => word,
    }
}

#[derive(Debug, Clone)]
pub struct CheckOptions {
    pub corruptions_per_kind: usize,
    pub seed: u64,
    pub max_steps: usize,
    /// Random suffixes appended after `halt` to test that they change nothing.
    pub suffix_samples: usize,
    /// Trace letters of a timed-out run used as the corruption base.
    pub timeout_window: usize,
}

impl Default for CheckOptions {
    fn default() -> Self {
        CheckOptions {
            corruptions_per_kind: 50,
            seed: 0,
            max_steps: 1_000_000,
            suffix_samples: 8,
            timeout_window: 64,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WordCheck {
    pub word: Vec<TraceLetter>,
    pub a: Rational,
    pub b: Rational,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorruptionCheck {
    pub kind: CorruptionKind,
    pub seed: u64,
    /// `holds` means `B < A`.
    pub check: WordCheck,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReductionReport {
    pub outcome: Outcome,
    pub seed: u64,
    /// The correct trace; `holds` means `B > A` for zero-halting machines and
    /// `B < A` otherwise. `None` after a timeout.
    pub trace: Option<WordCheck>,
    pub corruptions: Vec<CorruptionCheck>,
    pub inapplicable: Vec<CorruptionKind>,
    /// Trace followed by junk after `halt`; `holds` means both values are unchanged.
    pub suffixes: Vec<WordCheck>,
}

impl ReductionReport {
    pub fn all_hold(&self) -> bool {
        self.trace.iter().all(|t| t.holds)
            && self.corruptions.iter().all(|c| c.check.holds)
            && self.suffixes.iter().all(|s| s.holds)
    }

    pub fn failures(&self) -> usize {
        self.trace.iter().filter(|t| !t.holds).count()
            + self.corruptions.iter().filter(|c| !c.check.holds).count()
            + self.suffixes.iter().filter(|s| !s.holds).count()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CheckError {
    #[error("invalid machine: {}", .0.iter().map(ToString::to_string).collect::<Vec<_>>().join("; "))]
    InvalidMachine(Vec<MachineViolation>),
    #[error(transparent)]
    Eval(#[from] EvalError),
}

/// Exact values of `A` and `B` on a word, or `None` when no run exists.
pub fn evaluate(out: &ReductionOutput, word: &[TraceLetter]) -> Result<(Rational, Rational), EvalError> {
    let ids = out.encode(word);
    let a = word_value_finite(&out.a, &ids)?.ok_or(EvalError::NoRun)?;
    let b = word_value_finite(&out.b, &ids)?.ok_or(EvalError::NoRun)?;
    Ok((a, b))
}

/// Simulates the machine, then compares `A` and `B` on its trace, on seeded
/// corruptions of it and on post-halt suffix variants.
pub fn check_reduction(machine: &TwoCounterMachine, options: &CheckOptions) -> Result<ReductionReport, CheckError> {
    let violations = machine.validate();
    if !violations.is_empty() {
        return Err(CheckError::InvalidMachine(violations));
    }
    let out = ReductionOutput::build(machine, WordMode::Finite);
    let mut sim = machine.simulate(options.max_steps);
    if sim.outcome == Outcome::Timeout {
        sim.trace.truncate(options.timeout_window);
        sim.configs.truncate(options.timeout_window + 1);
    }

    let mut trace = None;
    let mut suffixes = Vec::new();
    let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
    if sim.outcome != Outcome::Timeout {
        let (a, b) = evaluate(&out, &sim.trace)?;
        let holds = if sim.outcome == Outcome::ZeroHalted {
            b > a
        } else {
            b < a
        };
        let letters = machine.alphabet();
        for _ in 0..options.suffix_samples {
            let len = rng.gen_range(1..=4);
            let mut word = sim.trace.clone();
            word.extend((0..len).map(|_| *letters.choose(&mut rng).expect("nonempty alphabet")));
            let (a2, b2) = evaluate(&out, &word)?;
            suffixes.push(WordCheck {
                holds: a2 == a && b2.cmp(&a2) == b.cmp(&a),
                word,
                a: a2,
                b: b2,
            });
        }
        trace = Some(WordCheck {
            word: sim.trace.clone(),
            a,
            b,
            holds,
        });
    }

    let mut corruptions = Vec::new();
    let mut inapplicable = Vec::new();
    for kind in CorruptionKind::ALL {
        for _ in 0..options.corruptions_per_kind {
            let seed = rng.next_u64();
            match corrupt_trace(machine, &sim, kind, seed) {
                Ok(word) => {
                    let word = pref_halt(&word).to_vec();
                    let (a, b) = evaluate(&out, &word)?;
                    corruptions.push(CorruptionCheck {
                        kind,
                        seed,
                        check: WordCheck {
                            holds: b < a,
                            word,
                            a,
                            b,
                        },
                    });
                }
                Err(_) => {
                    inapplicable.push(kind);
                    break;
                }
            }
        }
    }

    Ok(ReductionReport {
        outcome: sim.outcome,
        seed: options.seed,
        trace,
        corruptions,
        inapplicable,
        suffixes,
    })
}
