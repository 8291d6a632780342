//! One-player discounted problems on automata.
//!
//! [`solve_optimal`] computes, for every state `q`, the lowest (or highest)
//! value of an infinite run starting in `q`, together with a positional
//! strategy attaining it. It runs policy iteration; each positional policy
//! induces a functional graph whose values are closed-form lasso sums, so
//! every step is exact.

use std::collections::VecDeque;

use num_traits::{One, Signed, Zero};
use thiserror::Error;

use crate::automaton::{Automaton, LassoWord, StateId, StateValues, TransitionId};
use crate::construct::HatAutomaton;
use crate::rational::Rational;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Mode {
    Min,
    Max,
}

impl Mode {
    /// `true` when `candidate` is strictly better than `incumbent`.
    fn improves(self, candidate: &Rational, incumbent: &Rational) -> bool {
        match self {
            Mode::Min => candidate < incumbent,
            Mode::Max => candidate > incumbent,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GameError {
    #[error("state `{0}` has no outgoing transition")]
    DeadState(String),
    #[error("lasso loop is empty")]
    EmptyLoop,
    #[error("expected a single discount factor")]
    MultipleDiscountFactors,
    #[error("expected a deterministic automaton")]
    Nondeterministic,
    #[error("automaton has no transitions")]
    NoTransitions,
    #[error("no zero sink `{0}` in the automaton")]
    MissingSink(String),
}

/// Exact value of the infinite run `prefix · loop^ω`, given as `(weight, factor)` steps.
///
/// With `v_f` the prefix sum, `P` its accumulated factor, `v_l` the loop sum and
/// `L` the loop's accumulated factor, the value is `v_f + (1/P) · v_l · L / (L - 1)`.
pub fn lasso_value(prefix: &[(Rational, Rational)], cycle: &[(Rational, Rational)]) -> Result<Rational, GameError> {
    if cycle.is_empty() {
        return Err(GameError::EmptyLoop);
    }
    let (prefix_sum, prefix_factor) = discounted_sum(prefix);
    let (loop_sum, loop_factor) = discounted_sum(cycle);
    let repeated = loop_sum * &loop_factor / (&loop_factor - Rational::one());
    Ok(prefix_sum + repeated / prefix_factor)
}

fn discounted_sum(steps: &[(Rational, Rational)]) -> (Rational, Rational) {
    let mut sum = Rational::zero();
    let mut factor = Rational::one();
    for (weight, f) in steps {
        sum += weight / &factor;
        factor *= f;
    }
    (sum, factor)
}

/// Optimal values and a positional strategy attaining them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Solution {
    pub mode: Mode,
    pub values: StateValues,
    /// Chosen transition per state: the lowest-indexed optimal one.
    pub strategy: Vec<TransitionId>,
}

impl Solution {
    /// The infinite run induced by the strategy from `q`, as a lasso of transitions.
    pub fn lasso_from(&self, aut: &Automaton, q: StateId) -> (Vec<TransitionId>, Vec<TransitionId>) {
        follow_choice(aut, q, |s| self.strategy[s])
    }

    /// The word read along [`Solution::lasso_from`].
    pub fn lasso_word_from(&self, aut: &Automaton, q: StateId) -> LassoWord {
        let (prefix, cycle) = self.lasso_from(aut, q);
        let letters = |ids: &[TransitionId]| ids.iter().map(|&id| aut.transition(id).letter).collect();
        LassoWord {
            prefix: letters(&prefix),
            cycle: letters(&cycle),
        }
    }

    /// Optimal value over the automaton's initial states.
    pub fn initial_value(&self, aut: &Automaton) -> Rational {
        let pick = match self.mode {
            Mode::Min => self.values.min_over(aut.initial()),
            Mode::Max => self.values.max_over(aut.initial()),
        };
        pick.expect("initial set is nonempty").clone()
    }

    /// An initial state attaining [`Solution::initial_value`] (lowest index on ties).
    pub fn best_initial(&self, aut: &Automaton) -> StateId {
        let best = self.initial_value(aut);
        *aut.initial()
            .iter()
            .find(|&&q| self.values[q] == best)
            .expect("some initial state attains the optimum")
    }
}

/// Follows a positional choice from `q` until a state repeats.
fn follow_choice(
    aut: &Automaton,
    q: StateId,
    choice: impl Fn(StateId) -> TransitionId,
) -> (Vec<TransitionId>, Vec<TransitionId>) {
    let mut seen = vec![usize::MAX; aut.num_states()];
    let mut path = Vec::new();
    let mut state = q;
    while seen[state] == usize::MAX {
        seen[state] = path.len();
        let id = choice(state);
        path.push(id);
        state = aut.transition(id).target;
    }
    let cycle = path.split_off(seen[state]);
    (path, cycle)
}

/// Per-state optimal infinite-run values with a positional strategy.
///
/// Every state needs at least one outgoing transition.
pub fn solve_optimal(aut: &Automaton, mode: Mode) -> Result<Solution, GameError> {
    if let Some(dead) = (0..aut.num_states()).find(|&q| aut.outgoing(q).is_empty()) {
        return Err(GameError::DeadState(aut.state_name(dead).to_string()));
    }

    // Start from the locally best weight.
    let mut policy: Vec<TransitionId> = (0..aut.num_states())
        .map(|q| {
            let mut best = aut.outgoing(q)[0];
            for &id in &aut.outgoing(q)[1..] {
                if mode.improves(&aut.transition(id).weight, &aut.transition(best).weight) {
                    best = id;
                }
            }
            best
        })
        .collect();

    loop {
        let values = evaluate_policy(aut, &policy);
        let mut changed = false;
        for q in 0..aut.num_states() {
            let (best_id, best_value) = best_response(aut, &values, q, mode);
            if mode.improves(&best_value, &values[q]) {
                policy[q] = best_id;
                changed = true;
            }
        }
        if !changed {
            let strategy = (0..aut.num_states())
                .map(|q| best_response(aut, &values, q, mode).0)
                .collect();
            return Ok(Solution {
                mode,
                values: StateValues(values),
                strategy,
            });
        }
    }
}

/// `weight + value(target) / factor` for a transition.
pub fn one_step(aut: &Automaton, values: &[Rational], id: TransitionId) -> Rational {
    let t = aut.transition(id);
    &t.weight + &values[t.target] / &t.factor
}

/// Lowest-indexed transition of `q` with the best one-step value.
fn best_response(aut: &Automaton, values: &[Rational], q: StateId, mode: Mode) -> (TransitionId, Rational) {
    let mut iter = aut.outgoing(q).iter();
    let first = *iter.next().expect("no dead states");
    let mut best = (first, one_step(aut, values, first));
    for &id in iter {
        let v = one_step(aut, values, id);
        if mode.improves(&v, &best.1) {
            best = (id, v);
        }
    }
    best
}

/// Exact values of the positional policy `policy`.
fn evaluate_policy(aut: &Automaton, policy: &[TransitionId]) -> Vec<Rational> {
    let n = aut.num_states();
    let mut values: Vec<Option<Rational>> = vec![None; n];
    // 0 = unvisited, 1 = on the current path, 2 = done
    let mut mark = vec![0u8; n];
    for start in 0..n {
        if mark[start] == 2 {
            continue;
        }
        let mut path = Vec::new();
        let mut q = start;
        while mark[q] == 0 {
            mark[q] = 1;
            path.push(q);
            q = aut.transition(policy[q]).target;
        }
        if mark[q] == 1 {
            // Closed a new cycle at q: solve it in closed form.
            let at = path.iter().position(|&s| s == q).expect("q is on the path");
            let cycle: Vec<(Rational, Rational)> = path[at..]
                .iter()
                .map(|&s| {
                    let t = aut.transition(policy[s]);
                    (t.weight.clone(), t.factor.clone())
                })
                .collect();
            values[q] = Some(lasso_value(&[], &cycle).expect("cycle is nonempty"));
            // Walk the rest of the cycle backwards from q.
            for &s in path[at + 1..].iter().rev() {
                let t = aut.transition(policy[s]);
                let next = values[t.target].as_ref().expect("successor solved");
                values[s] = Some(&t.weight + next / &t.factor);
            }
            for &s in &path[at..] {
                mark[s] = 2;
            }
            path.truncate(at);
        }
        for &s in path.iter().rev() {
            let t = aut.transition(policy[s]);
            let next = values[t.target].as_ref().expect("successor solved");
            values[s] = Some(&t.weight + next / &t.factor);
            mark[s] = 2;
        }
    }
    values.into_iter().map(|v| v.expect("all states solved")).collect()
}

/// Transitions whose one-step value equals their source's optimal value.
pub fn optimal_transitions(aut: &Automaton, values: &StateValues) -> Vec<bool> {
    (0..aut.transitions().len())
        .map(|id| one_step(aut, &values.0, id) == values[aut.transition(id).source])
        .collect()
}

/// `max over q of highest(q) - lowest(q)`.
pub fn maxdiff(aut: &Automaton) -> Result<Rational, GameError> {
    let low = solve_optimal(aut, Mode::Min)?;
    let high = solve_optimal(aut, Mode::Max)?;
    Ok((0..aut.num_states())
        .map(|q| &high.values[q] - &low.values[q])
        .max()
        .unwrap_or_else(Rational::zero))
}

/// Preferred transitions of a single-discount automaton and the penalty for leaving them.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Preferred {
    pub mode: Mode,
    pub solution: Solution,
    /// Indexed by transition id.
    pub preferred: Vec<bool>,
    /// Smallest loss of a non-preferred transition; `None` when every transition is preferred.
    pub penalty: Option<Rational>,
}

impl Preferred {
    pub fn is_preferred(&self, id: TransitionId) -> bool {
        self.preferred[id]
    }

    pub fn all_preferred(&self) -> bool {
        self.preferred.iter().all(|&p| p)
    }

    pub fn preferred_ids(&self) -> Vec<TransitionId> {
        (0..self.preferred.len()).filter(|&id| self.preferred[id]).collect()
    }
}

/// Transitions that start a minimal-valued infinite run, and the minimal penalty `m_A`.
///
/// `minval(t) = weight(t) + lowest(target)/λ`; `t` is preferred iff
/// `minval(t) = lowest(source)`; the penalty is the least
/// `minval(t') - lowest(source(t'))` over non-preferred `t'`.
pub fn preferred_min(aut: &Automaton) -> Result<Preferred, GameError> {
    if aut.single_discount().is_none() {
        return Err(if aut.transitions().is_empty() {
            GameError::NoTransitions
        } else {
            GameError::MultipleDiscountFactors
        });
    }
    preferred_for(aut, Mode::Min)
}

/// Transitions that start a maximal-valued infinite run of a deterministic
/// automaton, and the minimal penalty `m_D`.
pub fn preferred_max(aut: &Automaton) -> Result<Preferred, GameError> {
    if aut.single_discount().is_none() {
        return Err(if aut.transitions().is_empty() {
            GameError::NoTransitions
        } else {
            GameError::MultipleDiscountFactors
        });
    }
    if !aut.is_deterministic() {
        return Err(GameError::Nondeterministic);
    }
    preferred_for(aut, Mode::Max)
}

fn preferred_for(aut: &Automaton, mode: Mode) -> Result<Preferred, GameError> {
    let solution = solve_optimal(aut, mode)?;
    let preferred = optimal_transitions(aut, &solution.values);
    let penalty = (0..aut.transitions().len())
        .filter(|&id| !preferred[id])
        .map(|id| {
            let v = one_step(aut, &solution.values.0, id);
            (v - &solution.values[aut.transition(id).source]).abs()
        })
        .min();
    Ok(Preferred {
        mode,
        solution,
        preferred,
        penalty,
    })
}

/// States whose optimal value is realised by a run that reaches the sink.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Marking {
    pub marked: Vec<bool>,
    /// For marked states other than the sink: an optimal transition one round closer to the sink.
    pub toward_sink: Vec<Option<TransitionId>>,
}

impl Marking {
    pub fn is_marked(&self, q: StateId) -> bool {
        self.marked[q]
    }

    /// Transitions from `q` to the sink along [`Marking::toward_sink`].
    pub fn path_to_sink(&self, aut: &Automaton, q: StateId) -> Option<Vec<TransitionId>> {
        if !self.marked[q] {
            return None;
        }
        let mut path = Vec::new();
        let mut state = q;
        while let Some(id) = self.toward_sink[state] {
            path.push(id);
            state = aut.transition(id).target;
        }
        Some(path)
    }
}

/// Marks, starting from `sink`, every state with an optimal transition into a
/// marked state, until nothing changes.
pub fn mark_attainable(aut: &Automaton, sink: StateId, solution: &Solution) -> Marking {
    let optimal = optimal_transitions(aut, &solution.values);
    let n = aut.num_states();
    let mut marked = vec![false; n];
    let mut toward_sink = vec![None; n];
    let mut incoming: Vec<Vec<TransitionId>> = vec![Vec::new(); n];
    for (id, t) in aut.transitions().iter().enumerate() {
        if optimal[id] {
            incoming[t.target].push(id);
        }
    }
    marked[sink] = true;
    // Breadth-first rounds; each newly marked state records the edge it was marked through.
    let mut queue = VecDeque::from([sink]);
    while let Some(q) = queue.pop_front() {
        for &id in &incoming[q] {
            let s = aut.transition(id).source;
            if !marked[s] {
                marked[s] = true;
                toward_sink[s] = Some(id);
                queue.push_back(s);
            }
        }
    }
    Marking { marked, toward_sink }
}

/// The marking process on a hat automaton: which states' lowest (or highest)
/// value is attained by a run taking an end-of-word transition.
pub fn attainable_marking(hat: &HatAutomaton, mode: Mode) -> Result<Marking, GameError> {
    let sink = hat.sink_checked()?;
    let solution = solve_optimal(&hat.automaton, mode)?;
    Ok(mark_attainable(&hat.automaton, sink, &solution))
}

/// Exact synchronous value iteration, `iterations` rounds from zero. Test oracle only.
pub fn value_iteration(aut: &Automaton, mode: Mode, iterations: usize) -> Vec<Rational> {
    let mut values = vec![Rational::zero(); aut.num_states()];
    for _ in 0..iterations {
        values = (0..aut.num_states())
            .map(|q| {
                let candidates = aut.outgoing(q).iter().map(|&id| one_step(aut, &values, id));
                match mode {
                    Mode::Min => candidates.min(),
                    Mode::Max => candidates.max(),
                }
                .unwrap_or_else(Rational::zero)
            })
            .collect();
    }
    values
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::construct::{hat, normalize_initial};
    use crate::rational::{int, ratio};
    use crate::samples::{single_state, three_state_nmda, unary_loop};

    fn step(w: Rational, f: Rational) -> (Rational, Rational) {
        (w, f)
    }

    #[test]
    fn lasso_closed_forms() {
        assert_eq!(lasso_value(&[], &[step(int(1), int(2))]).unwrap(), int(2));
        assert_eq!(
            lasso_value(&[step(int(1), ratio(5, 2))], &[step(int(1), ratio(5, 2))]).unwrap(),
            ratio(5, 3)
        );
        assert_eq!(
            lasso_value(&[], &[step(ratio(2, 3), int(3)), step(ratio(4, 5), int(5))]).unwrap(),
            int(1)
        );
        assert_eq!(lasso_value(&[step(int(1), int(2))], &[]), Err(GameError::EmptyLoop));
    }

    #[test]
    fn lasso_closed_form_matches_truncated_sum() {
        // 200 unrolled terms of 1 + (1/λ)·Σ λ^{-i} with λ = 5/2.
        let lambda = ratio(5, 2);
        let mut sum = int(1);
        let mut discount = lambda.clone();
        for _ in 0..200 {
            sum += int(1) / &discount;
            discount *= &lambda;
        }
        let exact = ratio(5, 3);
        assert!(crate::rational::approx(&(&exact - &sum)).abs() < 1e-12);
    }

    #[test]
    fn single_state_lowest_and_highest() {
        let aut = single_state(int(0), int(1), int(2));
        let low = solve_optimal(&aut, Mode::Min).unwrap();
        let high = solve_optimal(&aut, Mode::Max).unwrap();
        assert_eq!(low.values[0], int(0));
        assert_eq!(high.values[0], int(2));
        assert_eq!(aut.letter_name(aut.transition(low.strategy[0]).letter), "a");
        assert_eq!(aut.letter_name(aut.transition(high.strategy[0]).letter), "b");
    }

    #[test]
    fn nmda_lowest_at_sink_state() {
        let aut = three_state_nmda();
        let low = solve_optimal(&aut, Mode::Min).unwrap();
        assert_eq!(low.values[2], ratio(1, 2));
        let vi = value_iteration(&aut, Mode::Min, 60);
        assert!(crate::rational::approx(&(&vi[2] - ratio(1, 2))).abs() < 1e-12);
        let high = solve_optimal(&aut, Mode::Max).unwrap();
        for q in 0..aut.num_states() {
            assert!(low.values[q] <= high.values[q]);
        }
    }

    #[test]
    fn bellman_residual_is_zero() {
        let aut = three_state_nmda();
        for mode in [Mode::Min, Mode::Max] {
            let sol = solve_optimal(&aut, mode).unwrap();
            for q in 0..aut.num_states() {
                let best = aut.outgoing(q).iter().map(|&id| one_step(&aut, &sol.values.0, id));
                let best = match mode {
                    Mode::Min => best.min(),
                    Mode::Max => best.max(),
                }
                .unwrap();
                assert_eq!(best, sol.values[q]);
            }
        }
    }

    #[test]
    fn dead_state_is_reported() {
        let aut = crate::automaton::AutomatonBuilder::new(&["a"])
            .initial("s")
            .transition("s", "a", "t", int(1), int(2))
            .build()
            .unwrap();
        assert_eq!(solve_optimal(&aut, Mode::Min), Err(GameError::DeadState("t".into())));
    }

    #[test]
    fn maxdiff_examples() {
        assert_eq!(maxdiff(&single_state(int(1), int(1), int(3))).unwrap(), int(0));
        assert_eq!(maxdiff(&single_state(int(0), int(1), int(2))).unwrap(), int(2));
        assert_eq!(maxdiff(&single_state(int(1), int(0), int(3))).unwrap(), ratio(3, 2));
    }

    #[test]
    fn preferred_min_single_state() {
        let aut = single_state(int(0), int(1), int(2));
        let pref = preferred_min(&aut).unwrap();
        assert_eq!(pref.preferred, vec![true, false]);
        assert_eq!(pref.penalty, Some(int(1)));
    }

    #[test]
    fn preferred_constant_weights() {
        let aut = single_state(int(3), int(3), int(2));
        let pref = preferred_min(&aut).unwrap();
        assert!(pref.all_preferred());
        assert_eq!(pref.penalty, None);
        let pref = preferred_max(&aut).unwrap();
        assert!(pref.all_preferred());
        assert_eq!(pref.penalty, None);
    }

    #[test]
    fn preferred_max_single_state() {
        let aut = single_state(int(1), int(0), int(3));
        let pref = preferred_max(&aut).unwrap();
        assert_eq!(pref.preferred, vec![true, false]);
        assert_eq!(pref.penalty, Some(int(1)));
    }

    #[test]
    fn preferred_rejects_wrong_shapes() {
        assert_eq!(
            preferred_min(&three_state_nmda()).unwrap_err(),
            GameError::MultipleDiscountFactors
        );
        let nondet = crate::automaton::AutomatonBuilder::new(&["a"])
            .initial("s")
            .transition("s", "a", "s", int(0), int(2))
            .transition("s", "a", "t", int(1), int(2))
            .transition("t", "a", "t", int(1), int(2))
            .build()
            .unwrap();
        assert_eq!(preferred_max(&nondet).unwrap_err(), GameError::Nondeterministic);
    }

    #[test]
    fn marking_zero_loop_hat() {
        let h = hat(&normalize_initial(&unary_loop(int(0), int(2))), "END").unwrap();
        let marking = attainable_marking(&h, Mode::Min).unwrap();
        assert!(h.automaton.initial().iter().all(|&q| marking.is_marked(q)));
    }

    #[test]
    fn marking_positive_loop_hat() {
        // Values of a^L are 2 - 2^{1-L}: the infimum over nonempty words is 1, at length 1.
        let h = hat(&normalize_initial(&unary_loop(int(1), int(2))), "END").unwrap();
        let sol = solve_optimal(&h.automaton, Mode::Min).unwrap();
        let init = h.automaton.initial()[0];
        assert_eq!(sol.values[init], int(1));
        let marking = attainable_marking(&h, Mode::Min).unwrap();
        assert!(marking.is_marked(init));
        let path = marking.path_to_sink(&h.automaton, init).unwrap();
        let word: Vec<&str> = path
            .iter()
            .map(|&id| h.automaton.letter_name(h.automaton.transition(id).letter))
            .collect();
        assert_eq!(word, vec!["a", "END"]);
    }

    #[test]
    fn marking_unattained_infimum() {
        // Values 2 - 2·3^{-L} vs 2 - 2^{1-L}: the highest finite value is approached only in the limit.
        let h = hat(&normalize_initial(&unary_loop(ratio(4, 3), int(3))), "END").unwrap();
        let marking = attainable_marking(&h, Mode::Max).unwrap();
        let init = h.automaton.initial()[0];
        assert!(!marking.is_marked(init));
        let sol = solve_optimal(&h.automaton, Mode::Max).unwrap();
        assert_eq!(sol.values[init], int(2));
    }
}
