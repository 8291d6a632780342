//! Verdicts for `>=`, `>` and `=`, with certificates.

use num_traits::Zero;

use crate::automaton::{LassoWord, LetterId, Word};
use crate::construct::negate;
use crate::eval::{word_value_finite, word_value_lasso};
use crate::rational::Rational;

use super::analysis::analyze;
use super::{CompareError, ComparisonInstance, ComparisonReport, Relation, Verdict, Witness, WordMode};

/// Default length bound for the counterexample search used by `=`.
pub const DEFAULT_SEARCH_DEPTH: usize = 6;

/// Cap on the number of candidate words tried by the search.
const SEARCH_BUDGET: usize = 20_000;

/// Longest prefix tried when turning an unattained negative infimum into a concrete word.
const TRUNCATION_LIMIT: usize = 256;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Decision {
    pub verdict: Verdict,
    /// For `false` verdicts, a word on which the relation fails, when one was found.
    pub certificate: Option<Witness>,
    pub report: ComparisonReport,
}

/// Decides `left(w) R right(w)` for all words `w` of the instance's mode.
///
/// `search_depth` bounds the counterexample search used for `=` with a
/// nondeterministic left automaton.
pub fn decide(
    instance: &ComparisonInstance,
    relation: Relation,
    search_depth: usize,
) -> Result<Decision, CompareError> {
    let analysis = analyze(instance)?;
    let mut report = analysis.report(instance.mode());
    match relation {
        Relation::Geq | Relation::Gt => {
            let verdict = if relation == Relation::Geq {
                report.verdicts.geq
            } else {
                report.verdicts.gt
            };
            let certificate = if verdict == Verdict::False {
                match &report.witness {
                    Some(w) => Some(w.clone()),
                    None => truncated_counterexample(instance, &analysis.lasso, analysis.end),
                }
            } else {
                None
            };
            let eq = decide_eq(instance, &report, search_depth)?;
            report.verdicts.eq = eq.verdict;
            Ok(Decision {
                verdict,
                certificate,
                report,
            })
        }
        Relation::Eq => {
            let eq = decide_eq(instance, &report, search_depth)?;
            report.verdicts.eq = eq.verdict;
            Ok(Decision { report, ..eq })
        }
    }
}

/// Equality given the already computed `left - right` report.
pub(crate) fn decide_eq(
    instance: &ComparisonInstance,
    report: &ComparisonReport,
    search_depth: usize,
) -> Result<Decision, CompareError> {
    let decision = |verdict, certificate| Decision {
        verdict,
        certificate,
        report: report.clone(),
    };
    if report.verdicts.geq == Verdict::False {
        let certificate = report.witness.clone().or_else(|| {
            let analysis = analyze(instance).ok()?;
            truncated_counterexample(instance, &analysis.lasso, analysis.end)
        });
        return Ok(decision(Verdict::False, certificate));
    }
    if report.verdicts.gt == Verdict::True {
        // Strictly larger everywhere; any word separates the two.
        let any = first_word(instance.mode());
        return Ok(decision(Verdict::False, Some(any)));
    }

    // left >= right holds; what remains is left <= right.
    if instance.left().is_deterministic() {
        let swapped = instance.swapped()?;
        let back = analyze(&swapped)?.report(instance.mode());
        let verdict = back.verdicts.geq;
        let certificate = if verdict == Verdict::False { back.witness } else { None };
        return Ok(decision(verdict, certificate));
    }

    if let Some(w) = search_larger(instance, search_depth) {
        return Ok(decision(Verdict::False, Some(w)));
    }
    // Sufficient: every left run is at most right(w), i.e. min (right - left run) >= 0.
    let negated = ComparisonInstance::new(negate(instance.left()), negate(instance.right()), instance.mode())?;
    let all_runs_below = analyze(&negated)?.min_diff >= Rational::zero();
    Ok(decision(
        if all_runs_below {
            Verdict::True
        } else {
            Verdict::Unknown
        },
        None,
    ))
}

fn first_word(mode: WordMode) -> Witness {
    match mode {
        WordMode::Finite => Witness::Finite(vec![0]),
        WordMode::Infinite => Witness::Lasso(LassoWord::new(vec![], vec![0]).expect("nonempty loop")),
    }
}

/// Some word with `left(w) > right(w)` among short words (finite mode) or short lassos.
fn search_larger(instance: &ComparisonInstance, depth: usize) -> Option<Witness> {
    let (left, right) = (instance.left(), instance.right());
    let letters = left.num_letters();
    let mut tried = 0usize;
    match instance.mode() {
        WordMode::Finite => {
            for len in 1..=depth {
                for word in words_of_length(letters, len) {
                    tried += 1;
                    if tried > SEARCH_BUDGET {
                        return None;
                    }
                    let a = word_value_finite(left, &word).ok()??;
                    let d = word_value_finite(right, &word).ok()??;
                    if a > d {
                        return Some(Witness::Finite(word));
                    }
                }
            }
        }
        WordMode::Infinite => {
            for total in 1..=depth {
                for cycle_len in 1..=total {
                    for word in words_of_length(letters, total) {
                        tried += 1;
                        if tried > SEARCH_BUDGET {
                            return None;
                        }
                        let (prefix, cycle) = word.split_at(total - cycle_len);
                        let lasso = LassoWord::new(prefix.to_vec(), cycle.to_vec()).expect("nonempty loop");
                        let a = word_value_lasso(left, &lasso).ok()?;
                        let d = word_value_lasso(right, &lasso).ok()?;
                        if a > d {
                            return Some(Witness::Lasso(lasso));
                        }
                    }
                }
            }
        }
    }
    None
}

/// All words of length `len`, in lexicographic order.
fn words_of_length(letters: usize, len: usize) -> impl Iterator<Item = Word> {
    let total = letters.checked_pow(len as u32).unwrap_or(usize::MAX);
    (0..total).map(move |mut n| {
        let mut word = vec![0; len];
        for slot in word.iter_mut().rev() {
            *slot = n % letters;
            n /= letters;
        }
        word
    })
}

/// A finite prefix of the hat witness with `left(u) < right(u)`.
///
/// Used when the finite-word infimum is negative but not attained: finite
/// prefixes of the optimal infinite word approach it, so one of them is negative.
fn truncated_counterexample(
    instance: &ComparisonInstance,
    lasso: &LassoWord,
    end: Option<LetterId>,
) -> Option<Witness> {
    if instance.mode() != WordMode::Finite {
        return None;
    }
    let (left, right) = (instance.left(), instance.right());
    let mut word = Vec::new();
    for i in 0..TRUNCATION_LIMIT {
        let letter = lasso.letter_at(i);
        if Some(letter) == end {
            break;
        }
        word.push(letter);
        let a = word_value_finite(left, &word).ok()??;
        let d = word_value_finite(right, &word).ok()??;
        if a < d {
            return Some(Witness::Finite(word));
        }
    }
    None
}
