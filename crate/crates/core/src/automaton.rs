//! The discounted-sum automaton data model.
//!
//! An [`Automaton`] carries a weight and a discount factor on every
//! transition. States, letters and transitions are addressed by dense
//! indices; names are kept for parsing and display. Transitions are stored in
//! canonical order, sorted by `(source, letter, target)`, and each such triple
//! occurs at most once.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::ops::Index;

use num_traits::One;
use thiserror::Error;

use crate::rational::Rational;

pub type StateId = usize;
pub type LetterId = usize;
pub type TransitionId = usize;

/// A finite word as a sequence of letter indices.
pub type Word = Vec<LetterId>;

/// Declared automaton class, as written on the first line of the text format.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Kind {
    /// Per-transition discount factors, possibly nondeterministic.
    Nmda,
    /// Single discount factor, possibly nondeterministic.
    Nda,
    /// Single discount factor, deterministic.
    Dda,
}

impl Kind {
    pub fn keyword(self) -> &'static str {
        match self {
            Kind::Nmda => "nmda",
            Kind::Nda => "nda",
            Kind::Dda => "dda",
        }
    }

    pub fn from_keyword(word: &str) -> Option<Kind> {
        match word {
            "nmda" => Some(Kind::Nmda),
            "nda" => Some(Kind::Nda),
            "dda" => Some(Kind::Dda),
            _ => None,
        }
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.keyword())
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Transition {
    pub source: StateId,
    pub letter: LetterId,
    pub target: StateId,
    pub weight: Rational,
    pub factor: Rational,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AutomatonError {
    #[error("alphabet is empty")]
    EmptyAlphabet,
    #[error("automaton has no states")]
    NoStates,
    #[error("automaton has no initial state")]
    NoInitialState,
    #[error("duplicate state `{0}`")]
    DuplicateState(String),
    #[error("duplicate letter `{0}`")]
    DuplicateLetter(String),
    #[error("unknown state `{0}`")]
    UnknownState(String),
    #[error("unknown letter `{0}`")]
    UnknownLetter(String),
    /// `edge` is rendered as `from -letter-> target`.
    #[error("discount factor {factor} on transition {edge} must be a rational greater than 1")]
    FactorNotAboveOne { edge: String, factor: String },
    #[error("transition {0} is declared twice")]
    DuplicateTransition(String),
    #[error("declared kind `{kind}` does not hold: {report}")]
    KindMismatch { kind: Kind, report: Box<ValidationReport> },
}

/// A nondeterministic discounted-sum automaton with per-transition discount factors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Automaton {
    kind: Kind,
    alphabet: Vec<String>,
    states: Vec<String>,
    initial: Vec<StateId>,
    transitions: Vec<Transition>,
    outgoing: Vec<Vec<TransitionId>>,
}

impl Automaton {
    /// Builds an automaton from index-based parts. The kind is inferred.
    pub fn from_parts(
        alphabet: Vec<String>,
        states: Vec<String>,
        initial: Vec<StateId>,
        transitions: Vec<Transition>,
    ) -> Result<Automaton, AutomatonError> {
        if alphabet.is_empty() {
            return Err(AutomatonError::EmptyAlphabet);
        }
        if states.is_empty() {
            return Err(AutomatonError::NoStates);
        }
        check_unique(&alphabet).map_err(AutomatonError::DuplicateLetter)?;
        check_unique(&states).map_err(AutomatonError::DuplicateState)?;

        let mut initial: Vec<StateId> = initial;
        initial.sort_unstable();
        initial.dedup();
        if initial.is_empty() {
            return Err(AutomatonError::NoInitialState);
        }
        if let Some(&bad) = initial.iter().find(|&&q| q >= states.len()) {
            return Err(AutomatonError::UnknownState(format!("#{bad}")));
        }

        let mut transitions = transitions;
        for t in &transitions {
            if t.source >= states.len() {
                return Err(AutomatonError::UnknownState(format!("#{}", t.source)));
            }
            if t.target >= states.len() {
                return Err(AutomatonError::UnknownState(format!("#{}", t.target)));
            }
            if t.letter >= alphabet.len() {
                return Err(AutomatonError::UnknownLetter(format!("#{}", t.letter)));
            }
            if t.factor <= Rational::one() {
                return Err(AutomatonError::FactorNotAboveOne {
                    edge: format!("{} -{}-> {}", states[t.source], alphabet[t.letter], states[t.target]),
                    factor: t.factor.to_string(),
                });
            }
        }
        transitions.sort_by_key(|t| (t.source, t.letter, t.target));
        for pair in transitions.windows(2) {
            let (a, b) = (&pair[0], &pair[1]);
            if (a.source, a.letter, a.target) == (b.source, b.letter, b.target) {
                return Err(AutomatonError::DuplicateTransition(format!(
                    "{} -{}-> {}",
                    states[a.source], alphabet[a.letter], states[a.target]
                )));
            }
        }

        let mut outgoing = vec![Vec::new(); states.len()];
        for (id, t) in transitions.iter().enumerate() {
            outgoing[t.source].push(id);
        }

        let mut aut = Automaton {
            kind: Kind::Nmda,
            alphabet,
            states,
            initial,
            transitions,
            outgoing,
        };
        aut.kind = aut.inferred_kind();
        Ok(aut)
    }

    /// Re-labels the automaton with a declared kind, checking that it holds.
    pub fn with_kind(mut self, kind: Kind) -> Result<Automaton, AutomatonError> {
        let require = match kind {
            Kind::Nmda => Requirements::default(),
            Kind::Nda => Requirements {
                single_discount: true,
                ..Requirements::default()
            },
            Kind::Dda => Requirements {
                deterministic: true,
                single_discount: true,
                ..Requirements::default()
            },
        };
        let report = validate_automaton(&self, require);
        if !report.is_ok() {
            return Err(AutomatonError::KindMismatch {
                kind,
                report: Box::new(report),
            });
        }
        self.kind = kind;
        Ok(self)
    }

    /// Most specific kind that holds structurally.
    pub fn inferred_kind(&self) -> Kind {
        match (self.single_discount().is_some(), self.is_deterministic()) {
            (true, true) => Kind::Dda,
            (true, false) => Kind::Nda,
            _ => Kind::Nmda,
        }
    }

    pub fn kind(&self) -> Kind {
        self.kind
    }

    pub fn alphabet(&self) -> &[String] {
        &self.alphabet
    }

    pub fn states(&self) -> &[String] {
        &self.states
    }

    pub fn initial(&self) -> &[StateId] {
        &self.initial
    }

    pub fn is_initial(&self, q: StateId) -> bool {
        self.initial.binary_search(&q).is_ok()
    }

    pub fn transitions(&self) -> &[Transition] {
        &self.transitions
    }

    pub fn transition(&self, id: TransitionId) -> &Transition {
        &self.transitions[id]
    }

    pub fn num_states(&self) -> usize {
        self.states.len()
    }

    pub fn num_letters(&self) -> usize {
        self.alphabet.len()
    }

    /// Outgoing transition ids of `q`, in canonical order.
    pub fn outgoing(&self, q: StateId) -> &[TransitionId] {
        &self.outgoing[q]
    }

    /// Outgoing transitions of `q` on `letter`.
    pub fn successors(&self, q: StateId, letter: LetterId) -> impl Iterator<Item = TransitionId> + '_ {
        self.outgoing[q]
            .iter()
            .copied()
            .filter(move |&id| self.transitions[id].letter == letter)
    }

    pub fn state_id(&self, name: &str) -> Option<StateId> {
        self.states.iter().position(|s| s == name)
    }

    pub fn letter_id(&self, name: &str) -> Option<LetterId> {
        self.alphabet.iter().position(|s| s == name)
    }

    pub fn state_name(&self, q: StateId) -> &str {
        &self.states[q]
    }

    pub fn letter_name(&self, a: LetterId) -> &str {
        &self.alphabet[a]
    }

    pub fn find_transition(&self, source: StateId, letter: LetterId, target: StateId) -> Option<TransitionId> {
        self.successors(source, letter)
            .find(|&id| self.transitions[id].target == target)
    }

    /// `|initial| = 1` and no state has two transitions on one letter.
    pub fn is_deterministic(&self) -> bool {
        self.initial.len() == 1 && self.nondeterministic_points().is_empty()
    }

    /// Every state has at least one transition on every letter.
    pub fn is_complete(&self) -> bool {
        self.missing_letters().is_empty()
    }

    /// The common discount factor, if all transitions share one.
    ///
    /// An automaton without transitions has no factor to report.
    pub fn single_discount(&self) -> Option<&Rational> {
        let first = &self.transitions.first()?.factor;
        self.transitions.iter().all(|t| &t.factor == first).then_some(first)
    }

    /// Distinct discount factors, ascending.
    pub fn discount_factors(&self) -> Vec<Rational> {
        let set: BTreeSet<&Rational> = self.transitions.iter().map(|t| &t.factor).collect();
        set.into_iter().cloned().collect()
    }

    /// `(state, letter)` pairs with two or more transitions.
    fn nondeterministic_points(&self) -> Vec<(StateId, LetterId)> {
        let mut points = Vec::new();
        for (q, out) in self.outgoing.iter().enumerate() {
            let mut seen = BTreeMap::new();
            for &id in out {
                *seen.entry(self.transitions[id].letter).or_insert(0usize) += 1;
            }
            points.extend(seen.into_iter().filter(|&(_, n)| n > 1).map(|(a, _)| (q, a)));
        }
        points
    }

    fn missing_letters(&self) -> Vec<(StateId, LetterId)> {
        let mut missing = Vec::new();
        for (q, out) in self.outgoing.iter().enumerate() {
            let present: BTreeSet<LetterId> = out.iter().map(|&id| self.transitions[id].letter).collect();
            missing.extend(
                (0..self.alphabet.len())
                    .filter(|a| !present.contains(a))
                    .map(|a| (q, a)),
            );
        }
        missing
    }

    /// Parses whitespace-separated letter tokens.
    pub fn parse_word(&self, text: &str) -> Result<Word, AutomatonError> {
        text.split_whitespace()
            .map(|tok| {
                self.letter_id(tok)
                    .ok_or_else(|| AutomatonError::UnknownLetter(tok.to_string()))
            })
            .collect()
    }

    pub fn format_word(&self, word: &[LetterId]) -> String {
        word.iter()
            .map(|&a| self.alphabet[a].as_str())
            .collect::<Vec<_>>()
            .join(" ")
    }

    /// Builds a run from a start state and a list of `(letter, target)` steps.
    pub fn run_through(&self, start: &str, steps: &[(&str, &str)]) -> Result<Run, AutomatonError> {
        let mut q = self
            .state_id(start)
            .ok_or_else(|| AutomatonError::UnknownState(start.to_string()))?;
        let start_id = q;
        let mut ids = Vec::with_capacity(steps.len());
        for &(letter, target) in steps {
            let a = self
                .letter_id(letter)
                .ok_or_else(|| AutomatonError::UnknownLetter(letter.to_string()))?;
            let p = self
                .state_id(target)
                .ok_or_else(|| AutomatonError::UnknownState(target.to_string()))?;
            let id = self
                .find_transition(q, a, p)
                .ok_or_else(|| AutomatonError::UnknownState(format!("no transition {start} -{letter}-> {target}")))?;
            ids.push(id);
            q = p;
        }
        Ok(Run {
            start: start_id,
            steps: ids,
        })
    }

    /// The automaton with a different set of initial states.
    pub fn with_initial(&self, initial: Vec<StateId>) -> Result<Automaton, AutomatonError> {
        Automaton::from_parts(
            self.alphabet.clone(),
            self.states.clone(),
            initial,
            self.transitions.clone(),
        )
    }

    /// Same automaton, letters re-indexed to follow `order`. The letter sets must coincide.
    pub fn realphabet(&self, order: &[String]) -> Result<Automaton, AutomatonError> {
        let ours: BTreeSet<&String> = self.alphabet.iter().collect();
        let theirs: BTreeSet<&String> = order.iter().collect();
        if ours != theirs || order.len() != self.alphabet.len() {
            let odd = ours
                .symmetric_difference(&theirs)
                .next()
                .map(|s| s.to_string())
                .unwrap_or_default();
            return Err(AutomatonError::UnknownLetter(odd));
        }
        let position: HashMap<&String, LetterId> = order.iter().enumerate().map(|(i, s)| (s, i)).collect();
        let transitions = self
            .transitions
            .iter()
            .map(|t| Transition {
                letter: position[&self.alphabet[t.letter]],
                ..t.clone()
            })
            .collect();
        let aut = Automaton::from_parts(order.to_vec(), self.states.clone(), self.initial.clone(), transitions)?;
        Ok(Automaton { kind: self.kind, ..aut })
    }
}

fn check_unique(names: &[String]) -> Result<(), String> {
    let mut seen = BTreeSet::new();
    for n in names {
        if !seen.insert(n) {
            return Err(n.clone());
        }
    }
    Ok(())
}

/// Name-based construction, mostly for tests and small hand-written automata.
#[derive(Debug, Default)]
pub struct AutomatonBuilder {
    alphabet: Vec<String>,
    states: Vec<String>,
    initial: Vec<String>,
    transitions: Vec<(String, String, String, Rational, Rational)>,
}

impl AutomatonBuilder {
    pub fn new<S: AsRef<str>>(alphabet: &[S]) -> Self {
        AutomatonBuilder {
            alphabet: alphabet.iter().map(|s| s.as_ref().to_string()).collect(),
            ..Default::default()
        }
    }

    /// Declares a state; repeated declarations are ignored.
    pub fn state(mut self, name: &str) -> Self {
        if !self.states.iter().any(|s| s == name) {
            self.states.push(name.to_string());
        }
        self
    }

    pub fn initial(mut self, name: &str) -> Self {
        self = self.state(name);
        self.initial.push(name.to_string());
        self
    }

    /// Adds a transition, declaring unseen states on the fly.
    pub fn transition(mut self, source: &str, letter: &str, target: &str, weight: Rational, factor: Rational) -> Self {
        self = self.state(source).state(target);
        self.transitions.push((
            source.to_string(),
            letter.to_string(),
            target.to_string(),
            weight,
            factor,
        ));
        self
    }

    pub fn build(self) -> Result<Automaton, AutomatonError> {
        let state_ix = |name: &str, states: &[String]| {
            states
                .iter()
                .position(|s| s == name)
                .ok_or_else(|| AutomatonError::UnknownState(name.to_string()))
        };
        let initial = self
            .initial
            .iter()
            .map(|n| state_ix(n, &self.states))
            .collect::<Result<Vec<_>, _>>()?;
        let mut transitions = Vec::with_capacity(self.transitions.len());
        for (s, a, t, weight, factor) in self.transitions {
            let letter = self
                .alphabet
                .iter()
                .position(|l| *l == a)
                .ok_or_else(|| AutomatonError::UnknownLetter(a.clone()))?;
            transitions.push(Transition {
                source: state_ix(&s, &self.states)?,
                letter,
                target: state_ix(&t, &self.states)?,
                weight,
                factor,
            });
        }
        Automaton::from_parts(self.alphabet, self.states, initial, transitions)
    }
}

/// Which structural properties [`validate_automaton`] should check.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Requirements {
    pub deterministic: bool,
    pub complete: bool,
    pub single_discount: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Violation {
    /// More than one initial state in a deterministic automaton.
    SeveralInitialStates(Vec<String>),
    /// Two or more transitions from `state` on `letter`.
    Nondeterministic { state: String, letter: String },
    /// No transition from `state` on `letter`.
    Incomplete { state: String, letter: String },
    /// More than one discount factor in use.
    SeveralDiscountFactors(Vec<Rational>),
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::SeveralInitialStates(states) => {
                write!(f, "several initial states ({})", states.join(", "))
            }
            Violation::Nondeterministic { state, letter } => {
                write!(f, "state {state} has several transitions on {letter}")
            }
            Violation::Incomplete { state, letter } => {
                write!(f, "state {state} has no transition on {letter}")
            }
            Violation::SeveralDiscountFactors(factors) => {
                let list: Vec<String> = factors.iter().map(|r| r.to_string()).collect();
                write!(f, "several discount factors ({})", list.join(", "))
            }
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.violations.is_empty() {
            return f.write_str("ok");
        }
        let parts: Vec<String> = self.violations.iter().map(|v| v.to_string()).collect();
        f.write_str(&parts.join("; "))
    }
}

/// Reports every violated requirement. An empty report means all requested flags hold.
pub fn validate_automaton(aut: &Automaton, require: Requirements) -> ValidationReport {
    let mut violations = Vec::new();
    if require.deterministic {
        if aut.initial.len() > 1 {
            violations.push(Violation::SeveralInitialStates(
                aut.initial.iter().map(|&q| aut.states[q].clone()).collect(),
            ));
        }
        for (q, a) in aut.nondeterministic_points() {
            violations.push(Violation::Nondeterministic {
                state: aut.states[q].clone(),
                letter: aut.alphabet[a].clone(),
            });
        }
    }
    if require.complete {
        for (q, a) in aut.missing_letters() {
            violations.push(Violation::Incomplete {
                state: aut.states[q].clone(),
                letter: aut.alphabet[a].clone(),
            });
        }
    }
    if require.single_discount {
        let factors = aut.discount_factors();
        if factors.len() > 1 {
            violations.push(Violation::SeveralDiscountFactors(factors));
        }
    }
    ValidationReport { violations }
}

/// A finite run: a start state and the transitions taken from it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Run {
    pub start: StateId,
    pub steps: Vec<TransitionId>,
}

impl Run {
    pub fn empty(start: StateId) -> Run {
        Run {
            start,
            steps: Vec::new(),
        }
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    /// State reached after the last step.
    pub fn target(&self, aut: &Automaton) -> StateId {
        self.steps
            .last()
            .map(|&id| aut.transition(id).target)
            .unwrap_or(self.start)
    }

    /// Product of the discount factors along the run.
    pub fn accumulated_factor(&self, aut: &Automaton) -> Rational {
        self.steps
            .iter()
            .fold(Rational::one(), |acc, &id| acc * &aut.transition(id).factor)
    }

    /// The first `len` steps.
    pub fn prefix(&self, len: usize) -> Run {
        Run {
            start: self.start,
            steps: self.steps[..len].to_vec(),
        }
    }

    /// The steps from index `from` on, starting where the prefix ends.
    pub fn suffix(&self, aut: &Automaton, from: usize) -> Run {
        Run {
            start: self.prefix(from).target(aut),
            steps: self.steps[from..].to_vec(),
        }
    }

    pub fn word(&self, aut: &Automaton) -> Word {
        self.steps.iter().map(|&id| aut.transition(id).letter).collect()
    }
}

/// The ultimately periodic word `prefix · cycle^ω`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LassoWord {
    pub prefix: Word,
    pub cycle: Word,
}

impl LassoWord {
    /// Fails (returns `None`) on an empty cycle.
    pub fn new(prefix: Word, cycle: Word) -> Option<LassoWord> {
        (!cycle.is_empty()).then_some(LassoWord { prefix, cycle })
    }

    /// Letter at position `i` of the infinite word.
    pub fn letter_at(&self, i: usize) -> LetterId {
        if i < self.prefix.len() {
            self.prefix[i]
        } else {
            self.cycle[(i - self.prefix.len()) % self.cycle.len()]
        }
    }

    /// First `len` letters.
    pub fn take(&self, len: usize) -> Word {
        (0..len).map(|i| self.letter_at(i)).collect()
    }

    /// Parses `u|v`, each side whitespace-separated letters.
    pub fn parse(aut: &Automaton, text: &str) -> Result<LassoWord, AutomatonError> {
        let (u, v) = text
            .split_once('|')
            .ok_or_else(|| AutomatonError::UnknownLetter(format!("expected `prefix|loop`, got `{text}`")))?;
        let prefix = aut.parse_word(u)?;
        let cycle = aut.parse_word(v)?;
        LassoWord::new(prefix, cycle).ok_or_else(|| AutomatonError::UnknownLetter("empty loop".to_string()))
    }

    /// The shortest representation of the same infinite word: the cycle is
    /// reduced to its primitive root and the prefix absorbed into it as far as possible.
    pub fn canonical(&self) -> LassoWord {
        let n = self.cycle.len();
        let period = (1..=n)
            .find(|&d| n.is_multiple_of(d) && (d..n).all(|i| self.cycle[i] == self.cycle[i - d]))
            .unwrap_or(n);
        let mut cycle: Word = self.cycle[..period].to_vec();
        let mut prefix = self.prefix.clone();
        while prefix.last().is_some_and(|a| Some(a) == cycle.last()) {
            prefix.pop();
            cycle.rotate_right(1);
        }
        LassoWord { prefix, cycle }
    }

    /// Renders as `u (v)^w`.
    pub fn format(&self, aut: &Automaton) -> String {
        let cycle = format!("({})^w", aut.format_word(&self.cycle));
        if self.prefix.is_empty() {
            cycle
        } else {
            format!("{} {}", aut.format_word(&self.prefix), cycle)
        }
    }
}

/// One rational per state.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StateValues(pub Vec<Rational>);

impl StateValues {
    pub fn get(&self, q: StateId) -> &Rational {
        &self.0[q]
    }

    pub fn iter(&self) -> impl Iterator<Item = (StateId, &Rational)> {
        self.0.iter().enumerate()
    }

    /// Minimum over the given states.
    pub fn min_over(&self, states: &[StateId]) -> Option<&Rational> {
        states.iter().map(|&q| &self.0[q]).min()
    }

    pub fn max_over(&self, states: &[StateId]) -> Option<&Rational> {
        states.iter().map(|&q| &self.0[q]).max()
    }
}

impl Index<StateId> for StateValues {
    type Output = Rational;

    fn index(&self, q: StateId) -> &Rational {
        &self.0[q]
    }
}
