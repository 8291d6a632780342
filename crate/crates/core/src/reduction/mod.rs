//! Two-counter machines and the automata pair that encodes their halting.
//!
//! [`build_a`] gives a deterministic automaton whose value on a command trace
//! is `1 - 1/Πρ`. [`build_b`] is a union of checkers, each of which undercuts
//! `A` on words that are not the trace of a run ending in `<l, 0, 0>`.

pub mod check;
pub mod gadgets;
pub mod machine;

pub use check::{
    check_reduction, corrupt_trace, evaluate, pref_halt, CheckError, CheckOptions, CorruptionCheck, CorruptionKind,
    Inapplicable, ReductionReport, WordCheck,
};
pub use gadgets::{build_a, build_b, rho_dual, rho_primal, telescoping, ReductionOutput};
pub use machine::{
    format_trace, parse_machine, trace_alphabet, Command, Counter, MachineConfig, MachineError, MachineViolation,
    Outcome, Simulation, TraceLetter, TwoCounterMachine,
};

/// Header line written above `B` when it is built for infinite words.
pub const INFINITE_MODE_TAG: &str = "# infinite-word mode";
