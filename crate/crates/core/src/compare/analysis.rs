//! The minimum-difference algorithm proper.

use std::collections::BTreeSet;

use num_traits::Zero;

use crate::automaton::{Automaton, LassoWord, LetterId, StateId, Word};
use crate::construct::{hat, normalize_initial, END};
use crate::games::{mark_attainable, preferred_max, preferred_min, solve_optimal, Mode, Solution};
use crate::rational::{pow, Rational};

use super::levels::level_minima;
use super::product::{product_equal_lambda, product_preferred, Restrict};
use super::{order_verdicts, Case, CompareError, ComparisonInstance, ComparisonReport, Witness, WordMode};

/// Least `k >= 0` with `spread · (λ_penalized / λ_spread)^k < penalty`.
///
/// With `λ_penalized < λ_spread` this is the first level at which the whole
/// remaining influence `spread/λ_spread^k` of the faster-discounted side drops
/// below one penalty `penalty/λ_penalized^k` on the other side.
pub fn unfold_depth(
    spread: &Rational,
    penalty: &Rational,
    lambda_penalized: &Rational,
    lambda_spread: &Rational,
) -> usize {
    assert!(
        lambda_penalized < lambda_spread,
        "unfolding needs λ_penalized < λ_spread"
    );
    assert!(*penalty > Rational::zero(), "penalty must be positive");
    let shrink = lambda_penalized / lambda_spread;
    let mut lhs = spread.clone();
    let mut k = 0;
    while lhs >= *penalty {
        lhs *= &shrink;
        k += 1;
    }
    k
}

/// Result of the algorithm on the pair actually analysed (the hats, in finite mode).
#[derive(Debug, Clone)]
pub(crate) struct Analysis {
    pub left: Automaton,
    pub right: Automaton,
    pub case: Case,
    pub k: usize,
    pub min_diff: Rational,
    /// An infinite word of the analysed pair realising `min_diff`.
    pub lasso: LassoWord,
    /// In finite mode: a hat word reaching the end letter and realising `min_diff`.
    pub finite: Option<Word>,
    pub end: Option<LetterId>,
}

impl Analysis {
    pub fn report(&self, mode: WordMode) -> ComparisonReport {
        let (attained, witness) = match mode {
            WordMode::Infinite => (true, Some(Witness::Lasso(self.lasso.canonical()))),
            WordMode::Finite => {
                let end = self.end.expect("finite mode has an end letter");
                let witness = self
                    .finite
                    .as_ref()
                    .map(|w| Witness::Finite(w.iter().copied().take_while(|&a| a != end).collect()));
                (witness.is_some(), witness)
            }
        };
        ComparisonReport {
            mode,
            min_diff: self.min_diff.clone(),
            attained,
            witness,
            unfold_depth: self.k,
            case: self.case,
            verdicts: order_verdicts(mode, &self.min_diff, attained),
        }
    }
}

/// A letter not in the alphabet, `END` unless taken.
fn end_token(alphabet: &[String]) -> String {
    let taken: BTreeSet<&str> = alphabet.iter().map(String::as_str).collect();
    let mut token = END.to_string();
    while taken.contains(token.as_str()) {
        token.push('_');
    }
    token
}

pub(crate) fn analyze(instance: &ComparisonInstance) -> Result<Analysis, CompareError> {
    match instance.mode() {
        WordMode::Infinite => analyze_pair(instance.left().clone(), instance.right().clone(), None),
        WordMode::Finite => {
            let end = end_token(instance.left().alphabet());
            let left = hat(&normalize_initial(instance.left()), &end)?;
            let right = hat(&normalize_initial(instance.right()), &end)?;
            let sinks = Sinks {
                left: left.sink,
                right: right.sink,
                end: left.end,
            };
            analyze_pair(left.automaton, right.automaton, Some(sinks))
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Sinks {
    left: StateId,
    right: StateId,
    end: LetterId,
}

/// Letters of a path of optimal transitions from the first marked candidate to `sink`.
fn attaining_word(aut: &Automaton, solution: &Solution, sink: Option<StateId>, candidates: &[StateId]) -> Option<Word> {
    let marking = mark_attainable(aut, sink?, solution);
    let from = candidates.iter().copied().find(|&q| marking.is_marked(q))?;
    let path = marking.path_to_sink(aut, from)?;
    Some(path.iter().map(|&id| aut.transition(id).letter).collect())
}

fn spread(low: &Solution, high: &Solution) -> Rational {
    low.values
        .iter()
        .map(|(q, v)| &high.values[q] - v)
        .max()
        .unwrap_or_else(Rational::zero)
}

/// Initial states of `aut` attaining the solution's optimum.
fn optimal_initials(aut: &Automaton, solution: &Solution) -> Vec<StateId> {
    let best = solution.initial_value(aut);
    aut.initial()
        .iter()
        .copied()
        .filter(|&q| solution.values[q] == best)
        .collect()
}

fn analyze_pair(left: Automaton, right: Automaton, sinks: Option<Sinks>) -> Result<Analysis, CompareError> {
    let lambda_a = left.single_discount().expect("validated").clone();
    let lambda_d = right.single_discount().expect("validated").clone();
    let right_init = right.initial()[0];
    let sink_left = sinks.map(|s| s.left);
    let sink_right = sinks.map(|s| s.right);
    let end = sinks.map(|s| s.end);
    let done = |case, k, min_diff, lasso, finite| Analysis {
        left: left.clone(),
        right: right.clone(),
        case,
        k,
        min_diff,
        lasso,
        finite,
        end,
    };

    if lambda_a == lambda_d {
        let product = product_equal_lambda(&left, &right);
        let solution = solve_optimal(&product.automaton, Mode::Min)?;
        let start = solution.best_initial(&product.automaton);
        let min_diff = solution.values[start].clone();
        let lasso = solution.lasso_word_from(&product.automaton, start);
        let sink = sinks.and_then(|s| product.state_of(s.left, s.right));
        let finite = attaining_word(
            &product.automaton,
            &solution,
            sink,
            &optimal_initials(&product.automaton, &solution),
        );
        return Ok(done(Case::EqualFactors, 0, min_diff, lasso, finite));
    }

    if lambda_a < lambda_d {
        let pref = preferred_min(&left)?;
        let low_a = &pref.solution;
        let high_d = solve_optimal(&right, Mode::Max)?;
        if pref.all_preferred() {
            let min_diff = low_a.initial_value(&left) - &high_d.values[right_init];
            let lasso = high_d.lasso_word_from(&right, right_init);
            let finite = attaining_word(&right, &high_d, sink_right, &[right_init]);
            return Ok(done(Case::ConstantLeft, 0, min_diff, lasso, finite));
        }
        let low_d = solve_optimal(&right, Mode::Min)?;
        let spread_d = spread(&low_d, &high_d);
        if spread_d.is_zero() {
            let min_diff = low_a.initial_value(&left) - &high_d.values[right_init];
            let start = low_a.best_initial(&left);
            let lasso = low_a.lasso_word_from(&left, start);
            let finite = attaining_word(&left, low_a, sink_left, &optimal_initials(&left, low_a));
            return Ok(done(Case::ConstantRight, 0, min_diff, lasso, finite));
        }
        let penalty = pref.penalty.clone().expect("some transition is not preferred");
        let k = unfold_depth(&spread_d, &penalty, &lambda_a, &lambda_d);
        let table = level_minima(&left, &right, k);
        let leaves = table.leaves();
        let entries: Vec<_> = leaves.iter().map(|&(pair, _)| pair).collect();
        let c = product_preferred(&left, &right, &pref.preferred, Restrict::Left, &entries);
        let high_c = solve_optimal(&c.automaton, Mode::Max)?;
        let (scale_a, scale_d) = (pow(&lambda_a, k), pow(&lambda_d, k));
        let terms: Vec<((StateId, StateId), Rational)> = leaves
            .iter()
            .map(|&((q, p), m)| {
                let node = c.state_of(q, p).expect("leaf pairs are entries of the product");
                let term = m + &low_a.values[q] / &scale_a - &high_c.values[node] / &scale_d;
                ((q, p), term)
            })
            .collect();
        let c_sink = sinks.and_then(|s| c.state_of(s.left, s.right));
        return Ok(finish_unfolded(
            &left,
            &table,
            &terms,
            |q, p| {
                let node = c.state_of(q, p).expect("leaf in product");
                (
                    high_c.lasso_word_from(&c.automaton, node),
                    attaining_word(&c.automaton, &high_c, c_sink, &[node]),
                )
            },
            k,
            done,
        ));
    }

    // λ_A > λ_D
    let pref = preferred_max(&right)?;
    let high_d = &pref.solution;
    let low_a = solve_optimal(&left, Mode::Min)?;
    if pref.all_preferred() {
        let min_diff = low_a.initial_value(&left) - &high_d.values[right_init];
        let start = low_a.best_initial(&left);
        let lasso = low_a.lasso_word_from(&left, start);
        let finite = attaining_word(&left, &low_a, sink_left, &optimal_initials(&left, &low_a));
        return Ok(done(Case::ConstantRight, 0, min_diff, lasso, finite));
    }
    let high_a = solve_optimal(&left, Mode::Max)?;
    let spread_a = spread(&low_a, &high_a);
    if spread_a.is_zero() {
        let min_diff = low_a.initial_value(&left) - &high_d.values[right_init];
        let lasso = high_d.lasso_word_from(&right, right_init);
        let finite = attaining_word(&right, high_d, sink_right, &[right_init]);
        return Ok(done(Case::ConstantLeft, 0, min_diff, lasso, finite));
    }
    let penalty = pref.penalty.clone().expect("some transition is not preferred");
    let k = unfold_depth(&spread_a, &penalty, &lambda_d, &lambda_a);
    let table = level_minima(&left, &right, k);
    let leaves = table.leaves();
    let entries: Vec<_> = leaves.iter().map(|&(pair, _)| pair).collect();
    let c = product_preferred(&left, &right, &pref.preferred, Restrict::Right, &entries);
    let low_c = solve_optimal(&c.automaton, Mode::Min)?;
    let (scale_a, scale_d) = (pow(&lambda_a, k), pow(&lambda_d, k));
    let terms: Vec<((StateId, StateId), Rational)> = leaves
        .iter()
        .map(|&((q, p), m)| {
            let node = c.state_of(q, p).expect("leaf pairs are entries of the product");
            let term = m + &low_c.values[node] / &scale_a - &high_d.values[p] / &scale_d;
            ((q, p), term)
        })
        .collect();
    let c_sink = sinks.and_then(|s| c.state_of(s.left, s.right));
    Ok(finish_unfolded(
        &left,
        &table,
        &terms,
        |q, p| {
            let node = c.state_of(q, p).expect("leaf in product");
            (
                low_c.lasso_word_from(&c.automaton, node),
                attaining_word(&c.automaton, &low_c, c_sink, &[node]),
            )
        },
        k,
        done,
    ))
}

/// Picks the least leaf term and assembles witnesses: the level-DP prefix
/// followed by the product's optimal continuation.
fn finish_unfolded(
    left: &Automaton,
    table: &super::levels::LevelTable,
    terms: &[((StateId, StateId), Rational)],
    continuation: impl Fn(StateId, StateId) -> (LassoWord, Option<Word>),
    k: usize,
    done: impl Fn(Case, usize, Rational, LassoWord, Option<Word>) -> Analysis,
) -> Analysis {
    let min_diff = terms
        .iter()
        .map(|(_, t)| t)
        .min()
        .expect("level k is reached by some pair")
        .clone();
    let optimal: Vec<(StateId, StateId)> = terms
        .iter()
        .filter(|(_, t)| *t == min_diff)
        .map(|&(pair, _)| pair)
        .collect();
    let with_prefix = |(q, p): (StateId, StateId), tail: &[LetterId]| {
        let (mut word, _) = table.prefix(left, q, p).expect("leaf has a prefix");
        word.extend_from_slice(tail);
        word
    };
    let (q, p) = optimal[0];
    let (lasso, _) = continuation(q, p);
    let lasso = LassoWord {
        prefix: with_prefix((q, p), &lasso.prefix),
        cycle: lasso.cycle,
    };
    let finite = optimal.iter().find_map(|&(q, p)| {
        let (_, path) = continuation(q, p);
        path.map(|tail| with_prefix((q, p), &tail))
    });
    done(Case::Unfolded, k, min_diff, lasso, finite)
}
