//! Exact values of runs, finite words and ultimately periodic words.

use num_traits::{One, Zero};
use thiserror::Error;

use crate::automaton::{Automaton, LassoWord, LetterId, Run, Transition};
use crate::games::{self, Mode};
use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum EvalError {
    #[error("transition #{0} does not belong to the automaton")]
    ForeignTransition(usize),
    #[error("run is not chained at step {0}")]
    BrokenRun(usize),
    #[error("letter #{0} is not in the alphabet")]
    UnknownLetter(LetterId),
    #[error("the automaton has no infinite run on the word")]
    NoRun,
}

/// Discounted sum of the weights along `run`; the empty run has value 0.
pub fn run_value(aut: &Automaton, run: &Run) -> Result<Rational, EvalError> {
    if run.start >= aut.num_states() {
        return Err(EvalError::BrokenRun(0));
    }
    let mut state = run.start;
    let mut value = Rational::zero();
    let mut discount = Rational::one();
    for (i, &id) in run.steps.iter().enumerate() {
        let t = aut.transitions().get(id).ok_or(EvalError::ForeignTransition(id))?;
        if t.source != state {
            return Err(EvalError::BrokenRun(i));
        }
        value += &t.weight / &discount;
        discount *= &t.factor;
        state = t.target;
    }
    Ok(value)
}

/// Minimum over all runs from an initial state on `word`, or `None` when no run exists.
///
/// Backward dynamic programming: `V(|w|, q) = 0` and
/// `V(i, q) = min over (q, w[i], q') of weight + V(i+1, q') / factor`.
pub fn word_value_finite(aut: &Automaton, word: &[LetterId]) -> Result<Option<Rational>, EvalError> {
    let values = suffix_values(aut, word)?;
    Ok(aut.initial().iter().filter_map(|&q| values[q].clone()).min())
}

/// `V(0, q)` for every state `q`: the minimal value of `aut^q` on `word`.
pub fn suffix_values(aut: &Automaton, word: &[LetterId]) -> Result<Vec<Option<Rational>>, EvalError> {
    if let Some(&bad) = word.iter().find(|&&a| a >= aut.num_letters()) {
        return Err(EvalError::UnknownLetter(bad));
    }
    let mut next: Vec<Option<Rational>> = vec![Some(Rational::zero()); aut.num_states()];
    for &letter in word.iter().rev() {
        let current = (0..aut.num_states())
            .map(|q| {
                aut.successors(q, letter)
                    .filter_map(|id| {
                        let t = aut.transition(id);
                        next[t.target].as_ref().map(|v| &t.weight + v / &t.factor)
                    })
                    .min()
            })
            .collect();
        next = current;
    }
    Ok(next)
}

/// Infimum over infinite runs on `prefix · cycle^ω`.
///
/// Builds the product of the automaton with the word's lasso positions, drops
/// nodes that cannot continue forever, and solves the resulting one-player
/// minimisation exactly.
pub fn word_value_lasso(aut: &Automaton, word: &LassoWord) -> Result<Rational, EvalError> {
    let positioned = PositionedProduct::new(aut, word)?;
    positioned.value()
}

/// The first `len` steps of a run attaining [`word_value_lasso`], in terms of
/// the automaton's own transitions.
pub fn optimal_run_prefix(aut: &Automaton, word: &LassoWord, len: usize) -> Result<Run, EvalError> {
    let positioned = PositionedProduct::new(aut, word)?;
    let solution = games::solve_optimal(&positioned.product, Mode::Min).expect("pruned product has no dead nodes");
    let mut node = solution.best_initial(&positioned.product);
    let start = positioned.state_of[node];
    let mut steps = Vec::with_capacity(len);
    for _ in 0..len {
        let id = solution.strategy[node];
        steps.push(positioned.origin[id]);
        node = positioned.product.transition(id).target;
    }
    Ok(Run { start, steps })
}

/// The automaton unrolled along the positions of a lasso word.
pub(crate) struct PositionedProduct {
    pub product: Automaton,
    /// Product node index of `(state, 0)` for each initial state that survived pruning.
    pub entries: Vec<usize>,
    /// Original transition id behind each product transition.
    pub origin: Vec<usize>,
    /// Original state behind each product node.
    pub state_of: Vec<usize>,
}

impl PositionedProduct {
    pub fn new(aut: &Automaton, word: &LassoWord) -> Result<PositionedProduct, EvalError> {
        let letters: Vec<LetterId> = word.prefix.iter().chain(word.cycle.iter()).copied().collect();
        if let Some(&bad) = letters.iter().find(|&&a| a >= aut.num_letters()) {
            return Err(EvalError::UnknownLetter(bad));
        }
        if word.cycle.is_empty() {
            return Err(EvalError::NoRun);
        }
        let positions = letters.len();
        let next_pos = |i: usize| if i + 1 < positions { i + 1 } else { word.prefix.len() };
        let node = |q: usize, i: usize| q * positions + i;
        let nodes = aut.num_states() * positions;

        // Edges of the full positioned graph.
        let mut edges: Vec<(usize, usize, usize)> = Vec::new();
        for q in 0..aut.num_states() {
            for (i, &letter) in letters.iter().enumerate() {
                for id in aut.successors(q, letter) {
                    edges.push((node(q, i), id, node(aut.transition(id).target, next_pos(i))));
                }
            }
        }

        // Keep nodes that have an infinite continuation: iteratively drop dead ones.
        let mut alive = vec![true; nodes];
        let mut out_degree = vec![0usize; nodes];
        let mut preds: Vec<Vec<usize>> = vec![Vec::new(); nodes];
        for &(s, _, t) in &edges {
            out_degree[s] += 1;
            preds[t].push(s);
        }
        let mut stack: Vec<usize> = (0..nodes).filter(|&n| out_degree[n] == 0).collect();
        for &n in &stack {
            alive[n] = false;
        }
        while let Some(n) = stack.pop() {
            for &p in &preds[n] {
                if alive[p] {
                    out_degree[p] -= 1;
                    if out_degree[p] == 0 {
                        alive[p] = false;
                        stack.push(p);
                    }
                }
            }
        }

        let entries_old: Vec<usize> = aut
            .initial()
            .iter()
            .map(|&q| node(q, 0))
            .filter(|&n| alive[n])
            .collect();
        if entries_old.is_empty() {
            return Err(EvalError::NoRun);
        }

        let kept: Vec<usize> = (0..nodes).filter(|&n| alive[n]).collect();
        let mut renumber = vec![usize::MAX; nodes];
        for (new, &old) in kept.iter().enumerate() {
            renumber[old] = new;
        }
        let names: Vec<String> = kept
            .iter()
            .map(|&n| format!("{}@{}", aut.state_name(n / positions), n % positions))
            .collect();
        let mut transitions = Vec::new();
        let mut origin_of = Vec::new();
        for &(s, id, t) in &edges {
            if alive[s] && alive[t] {
                let orig = aut.transition(id);
                transitions.push(Transition {
                    source: renumber[s],
                    letter: orig.letter,
                    target: renumber[t],
                    weight: orig.weight.clone(),
                    factor: orig.factor.clone(),
                });
                origin_of.push(((renumber[s], orig.letter, renumber[t]), id));
            }
        }
        let entries: Vec<usize> = entries_old.iter().map(|&n| renumber[n]).collect();
        let product = Automaton::from_parts(aut.alphabet().to_vec(), names, entries.clone(), transitions)
            .expect("positioned product is well formed");
        // Product transitions are re-sorted canonically; map them back to their origin.
        origin_of.sort();
        let origin = product
            .transitions()
            .iter()
            .map(|t| {
                let key = (t.source, t.letter, t.target);
                let ix = origin_of
                    .binary_search_by(|(k, _)| k.cmp(&key))
                    .expect("every product transition has an origin");
                origin_of[ix].1
            })
            .collect();
        let state_of = kept.iter().map(|&n| n / positions).collect();
        Ok(PositionedProduct {
            product,
            entries,
            origin,
            state_of,
        })
    }

    pub fn value(&self) -> Result<Rational, EvalError> {
        let solution = games::solve_optimal(&self.product, Mode::Min).expect("pruned product has no dead nodes");
        Ok(self
            .entries
            .iter()
            .map(|&n| solution.values[n].clone())
            .min()
            .expect("entries are nonempty"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automaton::AutomatonBuilder;
    use crate::rational::{int, ratio};
    use crate::samples::{single_state, three_state_nmda, unary_loop};

    #[test]
    fn run_value_of_three_step_run() {
        let aut = three_state_nmda();
        let run = aut.run_through("q0", &[("a", "q0"), ("a", "q1"), ("b", "q2")]).unwrap();
        assert_eq!(run_value(&aut, &run).unwrap(), ratio(3, 2));
        assert_eq!(run_value(&aut, &Run::empty(0)).unwrap(), int(0));
    }

    #[test]
    fn run_value_of_telescoping_weights() {
        let aut = AutomatonBuilder::new(&["a"])
            .initial("p")
            .transition("p", "a", "r", ratio(2, 3), int(3))
            .transition("r", "a", "p", ratio(4, 5), int(5))
            .build()
            .unwrap();
        let run = aut.run_through("p", &[("a", "r"), ("a", "p")]).unwrap();
        assert_eq!(run_value(&aut, &run).unwrap(), ratio(14, 15));
    }

    #[test]
    fn broken_runs_are_rejected() {
        let aut = three_state_nmda();
        // q2 -a-> q2 cannot follow from q0.
        let q2_loop = aut.find_transition(2, 0, 2).unwrap();
        let bad = Run {
            start: 0,
            steps: vec![q2_loop],
        };
        assert_eq!(run_value(&aut, &bad), Err(EvalError::BrokenRun(0)));
        let foreign = Run {
            start: 0,
            steps: vec![99],
        };
        assert_eq!(run_value(&aut, &foreign), Err(EvalError::ForeignTransition(99)));
    }

    #[test]
    fn finite_word_minimum() {
        let aut = three_state_nmda();
        let w = aut.parse_word("a b").unwrap();
        assert_eq!(word_value_finite(&aut, &w).unwrap(), Some(ratio(3, 2)));
        assert_eq!(word_value_finite(&aut, &[]).unwrap(), Some(int(0)));
        assert_eq!(word_value_finite(&aut, &[7]), Err(EvalError::UnknownLetter(7)));
    }

    #[test]
    fn finite_word_without_run() {
        let aut = AutomatonBuilder::new(&["a", "b"])
            .initial("s")
            .transition("s", "a", "s", int(1), int(2))
            .build()
            .unwrap();
        assert_eq!(word_value_finite(&aut, &[0, 1]).unwrap(), None);
    }

    #[test]
    fn lasso_values() {
        let geometric = unary_loop(int(1), int(2));
        let a_omega = LassoWord::new(vec![], vec![0]).unwrap();
        assert_eq!(word_value_lasso(&geometric, &a_omega).unwrap(), int(2));

        let slow = unary_loop(int(1), ratio(5, 2));
        let w = LassoWord::new(vec![0], vec![0]).unwrap();
        assert_eq!(word_value_lasso(&slow, &w).unwrap(), ratio(5, 3));

        let two_loops = single_state(int(0), int(1), int(2));
        assert_eq!(word_value_lasso(&two_loops, &a_omega).unwrap(), int(0));
    }

    #[test]
    fn optimal_run_prefix_attains_value() {
        let aut = three_state_nmda();
        let w = LassoWord::new(vec![0, 0], vec![1]).unwrap();
        let value = word_value_lasso(&aut, &w).unwrap();
        let run = optimal_run_prefix(&aut, &w, 3).unwrap();
        assert_eq!(run.word(&aut), vec![0, 0, 1]);
        // After the b step the run sits in q2, whose loops are worth 1/2.
        let tail = ratio(1, 2) / run.accumulated_factor(&aut);
        assert_eq!(run_value(&aut, &run).unwrap() + tail, value);
    }

    #[test]
    fn lasso_without_infinite_run() {
        let aut = AutomatonBuilder::new(&["a", "b"])
            .initial("s")
            .transition("s", "a", "t", int(1), int(2))
            .transition("t", "b", "t", int(1), int(2))
            .build()
            .unwrap();
        let a_omega = LassoWord::new(vec![], vec![0]).unwrap();
        assert_eq!(word_value_lasso(&aut, &a_omega), Err(EvalError::NoRun));
        let ab_omega = LassoWord::new(vec![0], vec![1]).unwrap();
        assert_eq!(word_value_lasso(&aut, &ab_omega).unwrap(), int(1) + int(2) / int(2));
    }

    #[test]
    fn lasso_on_nondeterministic_automaton() {
        // q2 loops have weight 1/4, factor 2: value 1/2 from q2.
        let aut = three_state_nmda();
        let b_omega = LassoWord::new(vec![], vec![1]).unwrap();
        // Only run: q0 -b-> q2 then loops: 3/2 + (1/2)/4.
        assert_eq!(word_value_lasso(&aut, &b_omega).unwrap(), ratio(3, 2) + ratio(1, 8));
    }
}
