//! Structural constructions: union, initial-state normalization, the
//! finite-to-infinite "hat" extension, and weight negation.

use std::collections::BTreeSet;

use num_traits::Zero;
use thiserror::Error;

use crate::automaton::{Automaton, AutomatonError, LetterId, StateId, Transition};
use crate::games::GameError;
use crate::rational::{int, Rational};

/// Reserved letter appended by [`hat`].
pub const END: &str = "END";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConstructError {
    #[error("alphabets differ: `{0}` is not shared")]
    AlphabetMismatch(String),
    #[error("letter `{0}` already belongs to the alphabet")]
    LetterCollision(String),
    #[error("initial state `{0}` has incoming transitions; normalize first")]
    NotNormalized(String),
    #[error(transparent)]
    Invalid(#[from] AutomatonError),
}

/// A name not yet in `taken`, built by priming `base`.
fn fresh_name(base: &str, taken: &BTreeSet<String>) -> String {
    let mut name = format!("{base}'");
    while taken.contains(&name) {
        name.push('\'');
    }
    name
}

/// Disjoint union; the value on every word is the minimum of both values.
///
/// `right` is re-indexed to `left`'s letter order. Clashing state names of
/// `right` get primes appended.
pub fn union(left: &Automaton, right: &Automaton) -> Result<Automaton, ConstructError> {
    let right = right.realphabet(left.alphabet()).map_err(|e| match e {
        AutomatonError::UnknownLetter(l) => ConstructError::AlphabetMismatch(l),
        other => other.into(),
    })?;
    let mut taken: BTreeSet<String> = left.states().iter().cloned().collect();
    let mut states = left.states().to_vec();
    for name in right.states() {
        let name = if taken.contains(name) {
            fresh_name(name, &taken)
        } else {
            name.clone()
        };
        taken.insert(name.clone());
        states.push(name);
    }
    let offset = left.num_states();
    let mut transitions = left.transitions().to_vec();
    transitions.extend(right.transitions().iter().map(|t| Transition {
        source: t.source + offset,
        target: t.target + offset,
        ..t.clone()
    }));
    let mut initial = left.initial().to_vec();
    initial.extend(right.initial().iter().map(|&q| q + offset));
    Ok(Automaton::from_parts(
        left.alphabet().to_vec(),
        states,
        initial,
        transitions,
    )?)
}

/// Value-equivalent automaton whose initial states have no incoming transitions.
///
/// Each initial state with an incoming transition is demoted and replaced by a
/// fresh primed copy carrying the same outgoing transitions. Already normal
/// automata are returned unchanged.
pub fn normalize_initial(aut: &Automaton) -> Automaton {
    let entered: BTreeSet<StateId> = aut.transitions().iter().map(|t| t.target).collect();
    let to_copy: Vec<StateId> = aut.initial().iter().copied().filter(|q| entered.contains(q)).collect();
    if to_copy.is_empty() {
        return aut.clone();
    }
    let mut taken: BTreeSet<String> = aut.states().iter().cloned().collect();
    let mut states = aut.states().to_vec();
    let mut transitions = aut.transitions().to_vec();
    let mut initial: Vec<StateId> = aut.initial().iter().copied().filter(|q| !entered.contains(q)).collect();
    for q in to_copy {
        let name = fresh_name(aut.state_name(q), &taken);
        taken.insert(name.clone());
        let copy = states.len();
        states.push(name);
        initial.push(copy);
        for &id in aut.outgoing(q) {
            transitions.push(Transition {
                source: copy,
                ..aut.transition(id).clone()
            });
        }
    }
    Automaton::from_parts(aut.alphabet().to_vec(), states, initial, transitions)
        .expect("copies of existing transitions are well formed")
}

/// An automaton extended with an end-of-word letter and a zero sink.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HatAutomaton {
    pub automaton: Automaton,
    /// The fresh sink state.
    pub sink: StateId,
    /// The end-of-word letter, last in the alphabet.
    pub end: LetterId,
}

impl HatAutomaton {
    /// The sink, after checking it still carries only weight-0 self loops.
    pub fn sink_checked(&self) -> Result<StateId, GameError> {
        let aut = &self.automaton;
        let name = || aut.state_names_or(self.sink);
        if self.sink >= aut.num_states() {
            return Err(GameError::MissingSink(name()));
        }
        let ok = !aut.outgoing(self.sink).is_empty()
            && aut.outgoing(self.sink).iter().all(|&id| {
                let t = aut.transition(id);
                t.target == self.sink && t.weight.is_zero()
            });
        if ok {
            Ok(self.sink)
        } else {
            Err(GameError::MissingSink(name()))
        }
    }

    /// Cuts a hat word at its first end letter, dropping it.
    pub fn cut(&self, word: &[LetterId]) -> Vec<LetterId> {
        word.iter().copied().take_while(|&a| a != self.end).collect()
    }
}

impl Automaton {
    fn state_names_or(&self, q: StateId) -> String {
        self.states().get(q).cloned().unwrap_or_else(|| format!("#{q}"))
    }
}

/// Adds `end_letter` and a sink `q_fin` with weight-0 loops on every letter,
/// plus a weight-0 `end_letter` transition from every non-initial state to the sink.
///
/// The new transitions use the automaton's common discount factor when it has
/// one, so a single-discount input stays single-discount; otherwise 2.
pub fn hat(aut: &Automaton, end_letter: &str) -> Result<HatAutomaton, ConstructError> {
    if aut.letter_id(end_letter).is_some() {
        return Err(ConstructError::LetterCollision(end_letter.to_string()));
    }
    let entered: BTreeSet<StateId> = aut.transitions().iter().map(|t| t.target).collect();
    if let Some(&q) = aut.initial().iter().find(|q| entered.contains(q)) {
        return Err(ConstructError::NotNormalized(aut.state_name(q).to_string()));
    }
    let factor: Rational = aut.single_discount().cloned().unwrap_or_else(|| int(2));

    let mut alphabet = aut.alphabet().to_vec();
    alphabet.push(end_letter.to_string());
    let end = alphabet.len() - 1;

    let taken: BTreeSet<String> = aut.states().iter().cloned().collect();
    let mut sink_name = "q_fin".to_string();
    if taken.contains(&sink_name) {
        sink_name = fresh_name(&sink_name, &taken);
    }
    let mut states = aut.states().to_vec();
    states.push(sink_name);
    let sink = states.len() - 1;

    let mut transitions = aut.transitions().to_vec();
    let zero_step = |source: StateId, letter: LetterId| Transition {
        source,
        letter,
        target: sink,
        weight: Rational::zero(),
        factor: factor.clone(),
    };
    for q in (0..aut.num_states()).filter(|&q| !aut.is_initial(q)) {
        transitions.push(zero_step(q, end));
    }
    for letter in 0..alphabet.len() {
        transitions.push(zero_step(sink, letter));
    }
    let automaton = Automaton::from_parts(alphabet, states, aut.initial().to_vec(), transitions)?;
    Ok(HatAutomaton { automaton, sink, end })
}

/// The same automaton with every weight negated.
pub fn negate(aut: &Automaton) -> Automaton {
    let transitions = aut
        .transitions()
        .iter()
        .map(|t| Transition {
            weight: -t.weight.clone(),
            ..t.clone()
        })
        .collect();
    Automaton::from_parts(
        aut.alphabet().to_vec(),
        aut.states().to_vec(),
        aut.initial().to_vec(),
        transitions,
    )
    .expect("negation keeps the structure")
}
