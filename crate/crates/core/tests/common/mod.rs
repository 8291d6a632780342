//! Random instances and brute-force oracles shared by the integration tests.
//!
//! Nothing here calls the library's solvers or comparison code: the oracles
//! work directly on transition lists.

#![allow(dead_code)]

use nmda_core::automaton::{Automaton, AutomatonBuilder, LassoWord, Transition};
use nmda_core::rational::{int, ratio, Rational};
use num_traits::{One, Signed, Zero};
use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub const LAMBDAS: [(i64, i64); 4] = [(3, 2), (2, 1), (5, 2), (3, 1)];

pub fn random_lambda(rng: &mut ChaCha8Rng) -> Rational {
    let &(p, q) = LAMBDAS.choose(rng).unwrap();
    ratio(p, q)
}

fn weight(rng: &mut ChaCha8Rng) -> Rational {
    int(rng.gen_range(-2..=2))
}

/// Complete NDA over `{a, b}` with 1 to `max_states` states and one or two
/// successors per state and letter.
pub fn random_nda(rng: &mut ChaCha8Rng, max_states: usize, lambda: &Rational) -> Automaton {
    let n = rng.gen_range(1..=max_states);
    let name = |i: usize| format!("q{i}");
    let mut b = AutomatonBuilder::new(&["a", "b"]).initial("q0");
    for i in 1..n {
        b = b.state(&name(i));
    }
    if n > 1 && rng.gen_bool(0.3) {
        b = b.initial(&name(rng.gen_range(1..n)));
    }
    for i in 0..n {
        for letter in ["a", "b"] {
            let mut targets: Vec<usize> = (0..n).collect();
            targets.shuffle(rng);
            let count = if n > 1 && rng.gen_bool(0.4) { 2 } else { 1 };
            for &t in &targets[..count] {
                b = b.transition(&name(i), letter, &name(t), weight(rng), lambda.clone());
            }
        }
    }
    b.build().unwrap()
}

/// Complete DDA over `{a, b}`.
pub fn random_dda(rng: &mut ChaCha8Rng, max_states: usize, lambda: &Rational) -> Automaton {
    let n = rng.gen_range(1..=max_states);
    let name = |i: usize| format!("p{i}");
    let mut b = AutomatonBuilder::new(&["a", "b"]).initial("p0");
    for i in 1..n {
        b = b.state(&name(i));
    }
    for i in 0..n {
        for letter in ["a", "b"] {
            let t = rng.gen_range(0..n);
            b = b.transition(&name(i), letter, &name(t), weight(rng), lambda.clone());
        }
    }
    b.build().unwrap()
}

/// An NMDA with per-transition factors in `{3/2, 2, 5/2, 3}`, complete over `{a, b}`.
pub fn random_nmda(rng: &mut ChaCha8Rng, max_states: usize) -> Automaton {
    let n = rng.gen_range(1..=max_states);
    let name = |i: usize| format!("q{i}");
    let mut b = AutomatonBuilder::new(&["a", "b"]).initial("q0");
    for i in 1..n {
        b = b.state(&name(i));
    }
    for i in 0..n {
        for letter in ["a", "b"] {
            let mut targets: Vec<usize> = (0..n).collect();
            targets.shuffle(rng);
            let count = if n > 1 && rng.gen_bool(0.4) { 2 } else { 1 };
            for &t in &targets[..count] {
                let factor = random_lambda(rng);
                b = b.transition(&name(i), letter, &name(t), weight(rng), factor);
            }
        }
    }
    b.build().unwrap()
}

pub fn pow(base: &Rational, exp: usize) -> Rational {
    (0..exp).fold(Rational::one(), |acc, _| acc * base)
}

pub fn max_abs_weight(aut: &Automaton) -> Rational {
    aut.transitions()
        .iter()
        .map(|t| t.weight.abs())
        .max()
        .unwrap_or_else(Rational::zero)
}

fn lambda(aut: &Automaton) -> Rational {
    aut.single_discount().unwrap().clone()
}

fn moves(aut: &Automaton, q: usize, letter: usize) -> impl Iterator<Item = &Transition> {
    aut.transitions()
        .iter()
        .filter(move |t| t.source == q && t.letter == letter)
}

/// Interval `[m_L - T_L, m_L + T_L]` around `min_w left(w) - right(w)` over
/// infinite words: `m_L` is the exact minimum of the first `depth` discounted
/// terms over synchronized paths, `T_L` bounds both tails.
pub fn min_diff_interval(left: &Automaton, right: &Automaton, depth: usize) -> (Rational, Rational) {
    let (la, ld) = (lambda(left), lambda(right));
    let (na, nd) = (left.num_states(), right.num_states());
    let letters = left.num_letters();
    let mut next = vec![Rational::zero(); na * nd];
    for level in (0..depth).rev() {
        let (sa, sd) = (pow(&la, level), pow(&ld, level));
        let mut cur = vec![Rational::zero(); na * nd];
        for q in 0..na {
            for p in 0..nd {
                let mut best: Option<Rational> = None;
                for letter in 0..letters {
                    for ta in moves(left, q, letter) {
                        for td in moves(right, p, letter) {
                            let v = &ta.weight / &sa - &td.weight / &sd + &next[ta.target * nd + td.target];
                            if best.as_ref().is_none_or(|b| v < *b) {
                                best = Some(v);
                            }
                        }
                    }
                }
                cur[q * nd + p] = best.expect("complete automata");
            }
        }
        next = cur;
    }
    let p0 = right.initial()[0];
    let m = left.initial().iter().map(|&q| next[q * nd + p0].clone()).min().unwrap();
    let tail = |aut: &Automaton, l: &Rational| max_abs_weight(aut) / pow(l, depth) * l / (l - Rational::one());
    let t = tail(left, &la) + tail(right, &ld);
    (&m - &t, m + t)
}

/// `M_i(q, p)` for `i = 0..=depth` by enumerating every word of length `i` and
/// every left run on it.
pub fn naive_levels(left: &Automaton, right: &Automaton, depth: usize) -> Vec<Vec<Option<Rational>>> {
    let (la, ld) = (lambda(left), lambda(right));
    let nd = right.num_states();
    let mut levels = Vec::new();
    for i in 0..=depth {
        let mut table: Vec<Option<Rational>> = vec![None; left.num_states() * nd];
        for word in 0..(left.num_letters().pow(i as u32)) {
            let letters: Vec<usize> = (0..i)
                .map(|j| (word / left.num_letters().pow((i - 1 - j) as u32)) % left.num_letters())
                .collect();
            // right run
            let mut p = right.initial()[0];
            let mut right_sum = Rational::zero();
            for (j, &a) in letters.iter().enumerate() {
                let t = moves(right, p, a).next().unwrap();
                right_sum += &t.weight / pow(&ld, j);
                p = t.target;
            }
            // all left runs, depth first
            let mut stack: Vec<(usize, usize, Rational)> =
                left.initial().iter().map(|&q| (q, 0, Rational::zero())).collect();
            while let Some((q, j, sum)) = stack.pop() {
                if j == i {
                    let v = &sum - &right_sum;
                    let cell = &mut table[q * nd + p];
                    if cell.as_ref().is_none_or(|c| v < *c) {
                        *cell = Some(v);
                    }
                    continue;
                }
                for t in moves(left, q, letters[j]) {
                    stack.push((t.target, j + 1, &sum + &t.weight / pow(&la, j)));
                }
            }
        }
        levels.push(table);
    }
    levels
}

/// Every lasso over `letters` letters with `|prefix| + |cycle| <= max_total`.
pub fn small_lassos(letters: usize, max_total: usize) -> Vec<LassoWord> {
    let mut out = Vec::new();
    for total in 1..=max_total {
        for code in 0..letters.pow(total as u32) {
            let word: Vec<usize> = (0..total).map(|j| (code / letters.pow(j as u32)) % letters).collect();
            for cycle_len in 1..=total {
                let (prefix, cycle) = word.split_at(total - cycle_len);
                out.push(LassoWord::new(prefix.to_vec(), cycle.to_vec()).unwrap());
            }
        }
    }
    out
}

/// Synchronous value iteration from zero, computed directly from the transition list.
pub fn value_iteration_min(aut: &Automaton, iterations: usize) -> Vec<Rational> {
    let mut v = vec![Rational::zero(); aut.num_states()];
    for _ in 0..iterations {
        let mut next: Vec<Option<Rational>> = vec![None; aut.num_states()];
        for t in aut.transitions() {
            let cand = &t.weight + &v[t.target] / &t.factor;
            let slot = &mut next[t.source];
            if slot.as_ref().is_none_or(|s| cand < *s) {
                *slot = Some(cand);
            }
        }
        v = next.into_iter().map(|x| x.expect("no dead states")).collect();
    }
    v
}

/// A chain automaton reading `a^m` with the given factors and weights `(ρ - 1)/ρ`.
pub fn telescoping_chain(factors: &[i64]) -> Automaton {
    let mut b = AutomatonBuilder::new(&["a"]).initial("s0");
    for (i, &f) in factors.iter().enumerate() {
        b = b.transition(&format!("s{i}"), "a", &format!("s{}", i + 1), ratio(f - 1, f), int(f));
    }
    b.build().unwrap()
}

/// Bounds on `inf left(u) - right(u)` over nonempty finite words: the exact
/// minimum over lengths `1..=depth` is an upper bound; the lower bound also
/// allows longer words, whose first `depth` terms are at least the
/// length-`depth` minimum and whose rest is at least `-T`.
pub fn finite_min_diff_interval(left: &Automaton, right: &Automaton, depth: usize) -> (Rational, Rational) {
    let (la, ld) = (lambda(left), lambda(right));
    let nd = right.num_states();
    let mut cur: Vec<Option<Rational>> = vec![None; left.num_states() * nd];
    for &q in left.initial() {
        cur[q * nd + right.initial()[0]] = Some(Rational::zero());
    }
    let mut best_short: Option<Rational> = None;
    let mut last = Rational::zero();
    for level in 0..depth {
        let (sa, sd) = (pow(&la, level), pow(&ld, level));
        let mut next: Vec<Option<Rational>> = vec![None; cur.len()];
        for (ix, v) in cur.iter().enumerate() {
            let Some(v) = v else { continue };
            let (q, p) = (ix / nd, ix % nd);
            for letter in 0..left.num_letters() {
                for ta in moves(left, q, letter) {
                    for td in moves(right, p, letter) {
                        let cand = v + &ta.weight / &sa - &td.weight / &sd;
                        let slot = &mut next[ta.target * nd + td.target];
                        if slot.as_ref().is_none_or(|s| cand < *s) {
                            *slot = Some(cand);
                        }
                    }
                }
            }
        }
        cur = next;
        last = cur.iter().flatten().min().unwrap().clone();
        if best_short.as_ref().is_none_or(|b| last < *b) {
            best_short = Some(last.clone());
        }
    }
    let upper = best_short.unwrap();
    let tail = |aut: &Automaton, l: &Rational| max_abs_weight(aut) / pow(l, depth) * l / (l - Rational::one());
    let lower = (&last - tail(left, &la) - tail(right, &ld)).min(upper.clone());
    (lower, upper)
}
