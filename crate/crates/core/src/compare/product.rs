//! Synchronized products of a left automaton with a deterministic right one.

use std::collections::hash_map::Entry;
use std::collections::{HashMap, VecDeque};

use crate::automaton::{Automaton, StateId, Transition, TransitionId};
use crate::rational::Rational;

/// A product automaton together with the pair behind each of its states.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Product {
    pub automaton: Automaton,
    pub pairs: Vec<(StateId, StateId)>,
    index: HashMap<(StateId, StateId), StateId>,
}

impl Product {
    pub fn state_of(&self, left: StateId, right: StateId) -> Option<StateId> {
        self.index.get(&(left, right)).copied()
    }
}

/// Which side's weights and factor a product carries.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Weights {
    Left,
    Right,
    Difference,
}

/// Product over pairs reachable from `starts`, keeping only transitions
/// accepted by `keep_left` / `keep_right`.
pub(crate) fn build_product(
    left: &Automaton,
    right: &Automaton,
    starts: &[(StateId, StateId)],
    keep_left: impl Fn(TransitionId) -> bool,
    keep_right: impl Fn(TransitionId) -> bool,
    weights: Weights,
) -> Product {
    let mut pairs: Vec<(StateId, StateId)> = Vec::new();
    let mut index: HashMap<(StateId, StateId), StateId> = HashMap::new();
    let mut queue = VecDeque::new();
    for &pair in starts {
        if let Entry::Vacant(slot) = index.entry(pair) {
            slot.insert(pairs.len());
            pairs.push(pair);
            queue.push_back(pair);
        }
    }
    let mut transitions = Vec::new();
    while let Some((q, p)) = queue.pop_front() {
        let source = index[&(q, p)];
        for &ta in left.outgoing(q).iter().filter(|&&id| keep_left(id)) {
            let a = left.transition(ta);
            for td in right.successors(p, a.letter).filter(|&id| keep_right(id)) {
                let d = right.transition(td);
                let pair = (a.target, d.target);
                let target = *index.entry(pair).or_insert_with(|| {
                    pairs.push(pair);
                    queue.push_back(pair);
                    pairs.len() - 1
                });
                let (weight, factor): (Rational, Rational) = match weights {
                    Weights::Left => (a.weight.clone(), a.factor.clone()),
                    Weights::Right => (d.weight.clone(), d.factor.clone()),
                    Weights::Difference => (&a.weight - &d.weight, a.factor.clone()),
                };
                transitions.push(Transition {
                    source,
                    letter: a.letter,
                    target,
                    weight,
                    factor,
                });
            }
        }
    }
    let names = pairs
        .iter()
        .map(|&(q, p)| format!("{}|{}", left.state_name(q), right.state_name(p)))
        .collect();
    let initial = starts.iter().map(|pair| index[pair]).collect();
    let automaton = Automaton::from_parts(left.alphabet().to_vec(), names, initial, transitions)
        .expect("product of well-formed automata is well formed");
    Product {
        automaton,
        pairs,
        index,
    }
}

/// `left - right` over reachable pairs, for equal discount factors.
///
/// On every word, the least run value of the product equals `left(w) - right(w)`.
pub fn product_equal_lambda(left: &Automaton, right: &Automaton) -> Product {
    let right_init = right.initial()[0];
    let starts: Vec<_> = left.initial().iter().map(|&q| (q, right_init)).collect();
    build_product(left, right, &starts, |_| true, |_| true, Weights::Difference)
}

/// Which side is restricted to its preferred transitions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Restrict {
    /// Left keeps preferred transitions only; the product carries the right's weights.
    Left,
    /// Right keeps preferred transitions only; the product carries the left's weights.
    Right,
}

/// Product of the preferred-restricted side with the other automaton, from the given entry pairs.
pub fn product_preferred(
    left: &Automaton,
    right: &Automaton,
    preferred: &[bool],
    restrict: Restrict,
    entries: &[(StateId, StateId)],
) -> Product {
    match restrict {
        Restrict::Left => build_product(left, right, entries, |id| preferred[id], |_| true, Weights::Right),
        Restrict::Right => build_product(left, right, entries, |_| true, |id| preferred[id], Weights::Left),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::games::{preferred_min, solve_optimal, Mode};
    use crate::rational::int;
    use crate::samples::{cross_factor_pair, single_state, three_state_nmda};

    #[test]
    fn self_difference_is_zero() {
        let x = single_state(int(2), int(-1), int(3));
        let p = product_equal_lambda(&x, &x);
        assert!(p.automaton.transitions().iter().all(|t| t.weight == int(0)));
    }

    #[test]
    fn equal_lambda_difference_weights() {
        let left = single_state(int(0), int(1), int(2));
        let right = single_state(int(1), int(0), int(2));
        let p = product_equal_lambda(&left, &right);
        let weights: Vec<_> = p.automaton.transitions().iter().map(|t| t.weight.clone()).collect();
        assert_eq!(weights, vec![int(-1), int(1)]);
        let low = solve_optimal(&p.automaton, Mode::Min).unwrap();
        assert_eq!(low.values[0], int(-2));
    }

    #[test]
    fn preferred_product_of_cross_pair() {
        let (left, right) = cross_factor_pair();
        let pref = preferred_min(&left).unwrap();
        let c = product_preferred(&left, &right, &pref.preferred, Restrict::Left, &[(0, 0)]);
        assert_eq!(c.automaton.num_states(), 1);
        assert_eq!(c.automaton.transitions().len(), 1);
        let t = &c.automaton.transitions()[0];
        assert_eq!((t.weight.clone(), t.factor.clone()), (int(1), int(3)));
        let high = solve_optimal(&c.automaton, Mode::Max).unwrap();
        assert_eq!(high.values[0], crate::rational::ratio(3, 2));
    }

    #[test]
    fn restricting_the_right_keeps_left_weights() {
        let (right, left) = cross_factor_pair();
        let left = left.with_initial(vec![0]).unwrap();
        let pref = crate::games::preferred_max(&right).unwrap();
        let c = product_preferred(&left, &right, &pref.preferred, Restrict::Right, &[(0, 0)]);
        assert!(c.automaton.transitions().iter().all(|t| t.factor == int(3)));
    }

    #[test]
    fn names_pairs() {
        let x = three_state_nmda();
        let d = single_state(int(0), int(0), int(2));
        let p = build_product(&x, &d, &[(0, 0)], |_| true, |_| true, Weights::Left);
        assert_eq!(p.automaton.state_name(0), "q0|s");
        assert_eq!(p.state_of(2, 0), p.automaton.state_id("q2|s"));
    }
}
