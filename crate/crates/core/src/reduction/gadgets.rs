//! The deterministic automaton `A` and the checker union `B` built from a machine.

use std::collections::HashMap;

use num_traits::{One, Zero};

use crate::automaton::{Automaton, LetterId, StateId, Transition};
use crate::compare::WordMode;
use crate::rational::{int, Rational};

use super::machine::{trace_alphabet, Command, Counter, TraceLetter, TwoCounterMachine};

/// Primal discount factor `ρ_p`.
pub fn rho_primal(letter: TraceLetter) -> u32 {
    match letter {
        TraceLetter::Inc(Counter::X) => 5,
        TraceLetter::Dec(Counter::X) => 4,
        TraceLetter::Inc(Counter::Y) => 7,
        TraceLetter::Dec(Counter::Y) => 6,
        _ => 15,
    }
}

/// Dual discount factor `ρ_d`: inc and dec swap roles on each counter.
pub fn rho_dual(letter: TraceLetter) -> u32 {
    match letter {
        TraceLetter::Inc(Counter::X) => 4,
        TraceLetter::Dec(Counter::X) => 5,
        TraceLetter::Inc(Counter::Y) => 6,
        TraceLetter::Dec(Counter::Y) => 7,
        _ => 15,
    }
}

/// `(ρ - 1)/ρ` together with `ρ`.
pub fn telescoping(rho: u32) -> (Rational, Rational) {
    let rho = int(i64::from(rho));
    ((&rho - Rational::one()) / &rho, rho)
}

fn primal(letter: TraceLetter) -> (Rational, Rational) {
    telescoping(rho_primal(letter))
}

fn dual(letter: TraceLetter) -> (Rational, Rational) {
    telescoping(rho_dual(letter))
}

fn sink_edge() -> (Rational, Rational) {
    (Rational::zero(), int(2))
}

const INCDEC: [TraceLetter; 4] = [
    TraceLetter::Inc(Counter::X),
    TraceLetter::Dec(Counter::X),
    TraceLetter::Inc(Counter::Y),
    TraceLetter::Dec(Counter::Y),
];

/// Index-based assembly keyed by trace letters.
struct Assembly {
    letters: Vec<TraceLetter>,
    letter_ids: HashMap<TraceLetter, LetterId>,
    states: Vec<String>,
    initial: Vec<StateId>,
    transitions: Vec<Transition>,
}

impl Assembly {
    fn new(n: usize) -> Assembly {
        let letters = trace_alphabet(n);
        let letter_ids = letters.iter().enumerate().map(|(i, &l)| (l, i)).collect();
        Assembly {
            letters,
            letter_ids,
            states: Vec::new(),
            initial: Vec::new(),
            transitions: Vec::new(),
        }
    }

    fn state(&mut self, name: &str) -> StateId {
        self.states.push(name.to_string());
        self.states.len() - 1
    }

    fn initial_state(&mut self, name: &str) -> StateId {
        let q = self.state(name);
        self.initial.push(q);
        q
    }

    fn edge(&mut self, source: StateId, letter: TraceLetter, target: StateId, (weight, factor): (Rational, Rational)) {
        self.transitions.push(Transition {
            source,
            letter: self.letter_ids[&letter],
            target,
            weight,
            factor,
        });
    }

    fn goto_letters(&self) -> Vec<TraceLetter> {
        self.letters.iter().copied().filter(|l| l.is_goto()).collect()
    }

    fn non_halt(&self) -> Vec<TraceLetter> {
        self.letters
            .iter()
            .copied()
            .filter(|&l| l != TraceLetter::Halt)
            .collect()
    }

    /// Primal loops on every goto letter.
    fn goto_loops(&mut self, q: StateId) {
        for l in self.goto_letters() {
            self.edge(q, l, q, primal(l));
        }
    }

    fn sink(&mut self, name: &str) -> StateId {
        let q = self.state(name);
        for l in self.letters.clone() {
            self.edge(q, l, q, sink_edge());
        }
        q
    }

    fn finish(self) -> Automaton {
        let alphabet = self.letters.iter().map(ToString::to_string).collect();
        Automaton::from_parts(alphabet, self.states, self.initial, self.transitions)
            .expect("reduction gadgets are well formed")
    }
}

/// Weight and factor of `halt` into `q_halt`: above `A`'s `(14/15, 15)`.
fn halt_edge() -> (Rational, Rational) {
    telescoping(16)
}

/// The deterministic `A` over the `5n + 5` letters: primal loops on every
/// non-halt letter, then `halt` into a zero sink.
pub fn build_a(n: usize) -> Automaton {
    assert!(n >= 1, "a machine has at least one command");
    let mut asm = Assembly::new(n);
    let q = asm.initial_state("q_A");
    let h = asm.state("q_A_h");
    for l in asm.non_halt() {
        asm.edge(q, l, q, primal(l));
    }
    asm.edge(q, TraceLetter::Halt, h, telescoping(15));
    for l in asm.letters.clone() {
        asm.edge(h, l, h, sink_edge());
    }
    asm.finish()
}

/// The checker union `B` for a machine. The halt checker is left out in
/// infinite-word mode.
pub fn build_b(machine: &TwoCounterMachine, mode: WordMode) -> Automaton {
    let n = machine.len();
    let mut asm = Assembly::new(n);
    let halt = TraceLetter::Halt;

    let hc = (mode == WordMode::Finite).then(|| asm.initial_state("q_HC"));
    let nx = asm.initial_state("q_Nx");
    let ny = asm.initial_state("q_Ny");
    let bc = asm.initial_state("q_BC");
    let mut locations = vec![asm.initial_state("q_1")];
    locations.extend((2..=n).map(|j| asm.state(&format!("q_{j}"))));
    let zc: Vec<StateId> = Counter::BOTH
        .iter()
        .map(|c| asm.initial_state(&format!("q_ZC{c}")))
        .collect();
    let pc0: Vec<StateId> = Counter::BOTH
        .iter()
        .map(|c| asm.initial_state(&format!("q_PC0{c}")))
        .collect();
    let fr = asm.sink("q_fr");
    let q_halt = asm.sink("q_halt");

    if let Some(hc) = hc {
        let last = asm.state("q_last");
        for l in asm.non_halt() {
            asm.edge(hc, l, hc, primal(l));
            asm.edge(hc, l, last, sink_edge());
        }
        asm.edge(hc, halt, q_halt, halt_edge());
        for l in asm.letters.clone() {
            asm.edge(last, l, fr, (int(2), int(2)));
        }
    }

    // Negative counters: the inc factor grows and the dec factor shrinks for
    // the checked counter, so surplus decrements pull the value down.
    let negative = |c: Counter, l: TraceLetter| -> u32 {
        match (c, l) {
            (Counter::X, TraceLetter::Inc(Counter::X)) => 10,
            (Counter::X, TraceLetter::Dec(Counter::X)) => 2,
            (Counter::Y, TraceLetter::Inc(Counter::Y)) => 14,
            (Counter::Y, TraceLetter::Dec(Counter::Y)) => 3,
            _ => rho_primal(l),
        }
    };
    for (q, c) in [(nx, Counter::X), (ny, Counter::Y)] {
        for l in INCDEC {
            asm.edge(q, l, q, telescoping(negative(c, l)));
        }
        asm.goto_loops(q);
        asm.edge(q, halt, q_halt, halt_edge());
    }

    // Positive counters.
    for l in INCDEC {
        asm.edge(bc, l, bc, dual(l));
    }
    asm.goto_loops(bc);
    asm.edge(bc, halt, q_halt, halt_edge());

    // Command checker.
    for (j, &q) in locations.iter().enumerate() {
        let here = j + 1;
        let mut follow: Vec<(TraceLetter, StateId)> = Vec::new();
        let mut to_halt = false;
        match machine.command(here) {
            Command::Inc(c) => follow.extend(locations.get(here).map(|&q| (TraceLetter::Inc(c), q))),
            Command::Dec(c) => follow.extend(locations.get(here).map(|&q| (TraceLetter::Dec(c), q))),
            Command::Goto(k) => follow.push((TraceLetter::Goto(k), locations[k - 1])),
            Command::Jz(c, k, k2) => {
                follow.push((TraceLetter::Zero(c, k), locations[k - 1]));
                follow.push((TraceLetter::Positive(c, k2), locations[k2 - 1]));
            }
            Command::Halt => to_halt = true,
        }
        for l in asm.letters.clone() {
            if let Some(&(_, target)) = follow.iter().find(|(f, _)| *f == l) {
                asm.edge(q, l, target, primal(l));
            } else if l == halt && to_halt {
                asm.edge(q, l, q_halt, halt_edge());
            } else {
                asm.edge(q, l, fr, sink_edge());
            }
        }
    }

    // Zero jumps: from q_ZC, a `jz0(c, k)` may move to q_c, after which the
    // c-letters are read with primal factors.
    for (i, c) in Counter::BOTH.into_iter().enumerate() {
        let (start, inc, dec) = (zc[i], TraceLetter::Inc(c), TraceLetter::Dec(c));
        let checked = asm.state(&format!("q_{c}"));
        for l in INCDEC {
            let edge = if l == inc || l == dec { dual(l) } else { primal(l) };
            asm.edge(start, l, start, edge);
            asm.edge(checked, l, checked, primal(l));
        }
        asm.goto_loops(start);
        asm.goto_loops(checked);
        for k in 1..=n {
            asm.edge(start, TraceLetter::Zero(c, k), checked, primal(TraceLetter::Zero(c, k)));
        }
        asm.edge(start, halt, q_halt, halt_edge());
        asm.edge(checked, halt, q_halt, halt_edge());
    }

    // Positive jumps: q_PC0 waits for the first inc(c), q_PC1 for a later
    // `jgt(c, k)`, after which q_PC2 reads c-letters with dual factors.
    for (i, c) in Counter::BOTH.into_iter().enumerate() {
        let (inc, dec) = (TraceLetter::Inc(c), TraceLetter::Dec(c));
        let p0 = pc0[i];
        let p1 = asm.state(&format!("q_PC1{c}"));
        let p2 = asm.state(&format!("q_PC2{c}"));

        for l in INCDEC {
            if l == inc {
                asm.edge(p0, l, p1, dual(l));
            } else {
                asm.edge(p0, l, p0, primal(l));
            }
            asm.edge(p1, l, p1, primal(l));
            let edge = if l == inc || l == dec { dual(l) } else { primal(l) };
            asm.edge(p2, l, p2, edge);
        }
        for q in [p0, p1, p2] {
            asm.goto_loops(q);
        }
        for k in 1..=n {
            let jump = TraceLetter::Positive(c, k);
            asm.edge(p0, jump, fr, sink_edge());
            asm.edge(p1, jump, p2, primal(jump));
        }
        asm.edge(p0, halt, q_halt, halt_edge());
        asm.edge(p1, halt, fr, (int(1), int(2)));
        asm.edge(p2, halt, q_halt, halt_edge());
    }

    asm.finish()
}

/// `A`, `B` and their shared alphabet.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReductionOutput {
    pub a: Automaton,
    pub b: Automaton,
    pub alphabet: Vec<TraceLetter>,
    pub mode: WordMode,
}

impl ReductionOutput {
    pub fn build(machine: &TwoCounterMachine, mode: WordMode) -> ReductionOutput {
        ReductionOutput {
            a: build_a(machine.len()),
            b: build_b(machine, mode),
            alphabet: machine.alphabet(),
            mode,
        }
    }

    /// Letter ids of a trace over this alphabet.
    pub fn encode(&self, trace: &[TraceLetter]) -> Vec<LetterId> {
        trace
            .iter()
            .map(|l| {
                self.alphabet
                    .iter()
                    .position(|a| a == l)
                    .expect("letter of the machine alphabet")
            })
            .collect()
    }
}
