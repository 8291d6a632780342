//! The level-indexed dynamic program over state pairs.
//!
//! `M_0(q, p) = 0` for initial pairs, and
//! `M_{i+1}(q', p') = min over matching (q,a,q'), (p,a,p') of
//! M_i(q, p) + γ_A(t)/λ_A^i - γ_D(e)/λ_D^i`.
//! `M_k(q, p)` is the least `left(run) - right(u)` over words `u` of length `k`
//! and left runs on `u` ending in `q` while the right run ends in `p`.

use num_traits::{One, Zero};

use crate::automaton::{Automaton, LetterId, StateId, TransitionId, Word};
use crate::rational::Rational;

#[derive(Debug, Clone, PartialEq, Eq)]
struct Cell {
    value: Rational,
    /// Previous pair index, left transition, right transition.
    back: Option<(usize, TransitionId, TransitionId)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LevelTable {
    right_states: usize,
    levels: Vec<Vec<Option<Cell>>>,
}

impl LevelTable {
    pub fn depth(&self) -> usize {
        self.levels.len() - 1
    }

    /// `M_i(q, p)`, or `None` when no pair of runs of length `i` ends there.
    pub fn value_at(&self, level: usize, q: StateId, p: StateId) -> Option<&Rational> {
        self.levels[level][q * self.right_states + p].as_ref().map(|c| &c.value)
    }

    /// `M_k(q, p)` at the last level.
    pub fn value(&self, q: StateId, p: StateId) -> Option<&Rational> {
        self.value_at(self.depth(), q, p)
    }

    /// Pairs reached at the last level with their minima, in index order.
    pub fn leaves(&self) -> Vec<((StateId, StateId), &Rational)> {
        self.levels[self.depth()]
            .iter()
            .enumerate()
            .filter_map(|(ix, cell)| {
                cell.as_ref()
                    .map(|c| ((ix / self.right_states, ix % self.right_states), &c.value))
            })
            .collect()
    }

    /// A word and left run attaining `M_k(q, p)`.
    pub fn prefix(&self, left: &Automaton, q: StateId, p: StateId) -> Option<(Word, Vec<TransitionId>)> {
        let mut ix = q * self.right_states + p;
        self.levels[self.depth()][ix].as_ref()?;
        let mut letters: Vec<LetterId> = Vec::with_capacity(self.depth());
        let mut run = Vec::with_capacity(self.depth());
        for level in (1..=self.depth()).rev() {
            let cell = self.levels[level][ix]
                .as_ref()
                .expect("back pointers stay in the table");
            let (prev, ta, _) = cell.back.expect("non-root cells have a back pointer");
            letters.push(left.transition(ta).letter);
            run.push(ta);
            ix = prev;
        }
        letters.reverse();
        run.reverse();
        Some((letters, run))
    }
}

/// Runs the level DP up to `depth` levels. Both automata must be single-discount
/// and `right` deterministic.
pub fn level_minima(left: &Automaton, right: &Automaton, depth: usize) -> LevelTable {
    let lambda_a = left
        .single_discount()
        .expect("left automaton has one discount factor")
        .clone();
    let lambda_d = right
        .single_discount()
        .expect("right automaton has one discount factor")
        .clone();
    let width = right.num_states();
    let size = left.num_states() * width;
    let right_init = right.initial()[0];

    let mut first = vec![None; size];
    for &q in left.initial() {
        first[q * width + right_init] = Some(Cell {
            value: Rational::zero(),
            back: None,
        });
    }
    let mut levels = vec![first];
    let mut scale_a = Rational::one();
    let mut scale_d = Rational::one();
    for _ in 0..depth {
        let current = levels.last().expect("at least one level");
        let mut next: Vec<Option<Cell>> = vec![None; size];
        for (ix, cell) in current.iter().enumerate() {
            let Some(cell) = cell else { continue };
            let (q, p) = (ix / width, ix % width);
            for &ta in left.outgoing(q) {
                let a = left.transition(ta);
                for td in right.successors(p, a.letter) {
                    let d = right.transition(td);
                    let value = &cell.value + &a.weight / &scale_a - &d.weight / &scale_d;
                    let slot = &mut next[a.target * width + d.target];
                    if slot.as_ref().is_none_or(|c| value < c.value) {
                        *slot = Some(Cell {
                            value,
                            back: Some((ix, ta, td)),
                        });
                    }
                }
            }
        }
        levels.push(next);
        scale_a *= &lambda_a;
        scale_d *= &lambda_d;
    }
    LevelTable {
        right_states: width,
        levels,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::automaton::Run;
    use crate::eval::run_value;
    use crate::rational::ratio;
    use crate::samples::cross_factor_pair;

    #[test]
    fn cross_pair_level_two() {
        let (left, right) = cross_factor_pair();
        let table = level_minima(&left, &right, 2);
        // a a: left 0, right 1 + 1/3.
        assert_eq!(table.value(0, 0), Some(&ratio(-4, 3)));
        let (word, run) = table.prefix(&left, 0, 0).unwrap();
        assert_eq!(word, vec![0, 0]);
        assert_eq!(run_value(&left, &Run { start: 0, steps: run }).unwrap(), ratio(0, 1));
    }

    #[test]
    fn level_zero_is_initial_pairs() {
        let (left, right) = cross_factor_pair();
        let table = level_minima(&left, &right, 0);
        assert_eq!(table.leaves(), vec![((0, 0), &ratio(0, 1))]);
        assert_eq!(table.prefix(&left, 0, 0), Some((vec![], vec![])));
    }
}
