//! Small hand-made automata and machines used by tests, docs and the CLI's test suite.

use crate::automaton::{Automaton, AutomatonBuilder};
use crate::rational::{int, ratio, Rational};

/// A three-state NMDA with four different discount factors.
pub const THREE_STATE_NMDA_TEXT: &str = "\
nmda
alphabet: a b
states: q0 q1 q2
initial: q0
trans: q0 a q0 1 3
trans: q0 a q1 1/2 2
trans: q0 b q2 3/2 4
trans: q1 a q0 1 3
trans: q1 a q1 1/2 2
trans: q1 b q2 2 5
trans: q2 a q2 1/4 2
trans: q2 b q2 1/4 2
";

pub fn three_state_nmda() -> Automaton {
    AutomatonBuilder::new(&["a", "b"])
        .initial("q0")
        .state("q1")
        .state("q2")
        .transition("q0", "a", "q0", int(1), int(3))
        .transition("q0", "a", "q1", ratio(1, 2), int(2))
        .transition("q0", "b", "q2", ratio(3, 2), int(4))
        .transition("q1", "a", "q0", int(1), int(3))
        .transition("q1", "a", "q1", ratio(1, 2), int(2))
        .transition("q1", "b", "q2", int(2), int(5))
        .transition("q2", "a", "q2", ratio(1, 4), int(2))
        .transition("q2", "b", "q2", ratio(1, 4), int(2))
        .build()
        .expect("sample automaton is well formed")
}

/// One state with a self loop per letter of `{a, b}`.
pub fn single_state(weight_a: Rational, weight_b: Rational, factor: Rational) -> Automaton {
    AutomatonBuilder::new(&["a", "b"])
        .initial("s")
        .transition("s", "a", "s", weight_a, factor.clone())
        .transition("s", "b", "s", weight_b, factor)
        .build()
        .expect("single-state automaton is well formed")
}

/// One state with a single self loop on `a`.
pub fn unary_loop(weight: Rational, factor: Rational) -> Automaton {
    AutomatonBuilder::new(&["a"])
        .initial("s")
        .transition("s", "a", "s", weight, factor)
        .build()
        .expect("unary automaton is well formed")
}

/// The cross-factor pair: left 2-NDA `{a:0, b:1}`, right 3-DDA `{a:1, b:0}`.
pub fn cross_factor_pair() -> (Automaton, Automaton) {
    (
        single_state(int(0), int(1), int(2)),
        single_state(int(1), int(0), int(3)),
    )
}

/// Left 3-NDA with constant weight 4/3 and right 2-DDA with constant weight 1.
///
/// Both have value 2 on every infinite word, but the left one is strictly
/// larger on every finite word.
pub fn limit_pair() -> (Automaton, Automaton) {
    (
        single_state(ratio(4, 3), ratio(4, 3), int(3)),
        single_state(int(1), int(1), int(2)),
    )
}

/// Six-command machine that counts `x` up to two and back down to zero.
pub const COUNTDOWN_MACHINE_TEXT: &str = "\
1: inc x
2: inc x
3: jz x 3 4
4: dec x
5: jz x 6 3
6: halt
";
