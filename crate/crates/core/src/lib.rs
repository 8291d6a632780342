//! Exact discounted-sum automata.
//!
//! Automata carry a rational weight and a rational discount factor (> 1) on
//! every transition. This crate evaluates them on finite and ultimately
//! periodic words, solves one-player optimal-value problems on them, compares
//! a nondeterministic automaton against a deterministic one with a different
//! discount factor, and builds the two-counter machine reduction pair.

pub mod automaton;
pub mod compare;
pub mod construct;
pub mod eval;
pub mod games;
pub mod rational;
pub mod reduction;
pub mod samples;
pub mod text;

pub use automaton::{
    validate_automaton, Automaton, AutomatonBuilder, AutomatonError, Kind, LassoWord, Requirements, Run, StateValues,
    Transition, ValidationReport, Violation,
};
pub use rational::Rational;
