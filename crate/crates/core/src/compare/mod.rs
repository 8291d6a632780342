//! Comparing a nondeterministic automaton against a deterministic one with a
//! possibly different discount factor.
//!
//! The central quantity is `min over words w of left(w) - right(w)`, over
//! infinite words or over nonempty finite words. From it follow the `>=` and
//! `>` verdicts; equality is exact when the left automaton is deterministic
//! and three-valued otherwise.
//!
//! ```
//! use nmda_core::compare::{ComparisonInstance, WordMode};
//! use nmda_core::rational::ratio;
//! use nmda_core::samples::cross_factor_pair;
//!
//! let (left, right) = cross_factor_pair();
//! let instance = ComparisonInstance::new(left, right, WordMode::Infinite).unwrap();
//! let report = instance.report().unwrap();
//! assert_eq!(report.min_diff, ratio(-3, 2));
//! assert_eq!(report.unfold_depth, 2);
//! ```

mod analysis;
mod bound;
mod decide;
mod levels;
mod product;

use std::fmt;

use num_traits::Zero;
use thiserror::Error;

use crate::automaton::{validate_automaton, Automaton, LassoWord, Requirements, ValidationReport, Word};
use crate::construct::ConstructError;
use crate::games::GameError;
use crate::rational::Rational;

pub use analysis::unfold_depth;
pub use bound::{check_k_bound, instance_size, KBound};
pub use decide::{decide, Decision, DEFAULT_SEARCH_DEPTH};
pub use levels::{level_minima, LevelTable};
pub use product::{product_equal_lambda, product_preferred, Product, Restrict};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum WordMode {
    Finite,
    Infinite,
}

impl WordMode {
    pub fn from_keyword(word: &str) -> Option<WordMode> {
        match word {
            "finite" => Some(WordMode::Finite),
            "infinite" => Some(WordMode::Infinite),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Relation {
    Geq,
    Gt,
    Eq,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Verdict {
    True,
    False,
    Unknown,
}

impl Verdict {
    pub fn from_bool(b: bool) -> Verdict {
        if b {
            Verdict::True
        } else {
            Verdict::False
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::True => "true",
            Verdict::False => "false",
            Verdict::Unknown => "unknown",
        })
    }
}

/// Which branch of the algorithm produced the answer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Case {
    /// Both discount factors coincide: one difference product.
    EqualFactors,
    /// The left automaton has the same value on all words.
    ConstantLeft,
    /// The right automaton has the same value on all words.
    ConstantRight,
    /// Unfolding to depth `k` followed by a preferred product.
    Unfolded,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Witness {
    Lasso(LassoWord),
    Finite(Word),
}

impl Witness {
    pub fn format(&self, aut: &Automaton) -> String {
        match self {
            Witness::Lasso(w) => w.format(aut),
            Witness::Finite(w) => aut.format_word(w),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Verdicts {
    pub geq: Verdict,
    pub gt: Verdict,
    pub eq: Verdict,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComparisonReport {
    pub mode: WordMode,
    /// Minimum (infinite words) or infimum (finite words) of `left(w) - right(w)`.
    pub min_diff: Rational,
    /// Whether some word realises `min_diff`; always true for infinite words.
    pub attained: bool,
    /// A word realising `min_diff`, when one exists.
    pub witness: Option<Witness>,
    pub unfold_depth: usize,
    pub case: Case,
    pub verdicts: Verdicts,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CompareError {
    #[error("left automaton must be complete with one discount factor: {0}")]
    Left(ValidationReport),
    #[error("right automaton must be deterministic, complete, with one discount factor: {0}")]
    Right(ValidationReport),
    #[error("alphabets differ at letter `{0}`")]
    AlphabetMismatch(String),
    #[error(transparent)]
    Game(#[from] GameError),
    #[error(transparent)]
    Construct(#[from] ConstructError),
}

/// A validated pair: left complete single-discount, right deterministic complete
/// single-discount, over the same alphabet (the right one re-indexed to the left's order).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ComparisonInstance {
    left: Automaton,
    right: Automaton,
    mode: WordMode,
}

impl ComparisonInstance {
    pub fn new(left: Automaton, right: Automaton, mode: WordMode) -> Result<ComparisonInstance, CompareError> {
        let left_report = validate_automaton(
            &left,
            Requirements {
                complete: true,
                single_discount: true,
                ..Requirements::default()
            },
        );
        if !left_report.is_ok() {
            return Err(CompareError::Left(left_report));
        }
        let right_report = validate_automaton(
            &right,
            Requirements {
                deterministic: true,
                complete: true,
                single_discount: true,
            },
        );
        if !right_report.is_ok() {
            return Err(CompareError::Right(right_report));
        }
        let right = right.realphabet(left.alphabet()).map_err(|e| match e {
            crate::automaton::AutomatonError::UnknownLetter(l) => CompareError::AlphabetMismatch(l),
            other => CompareError::Construct(other.into()),
        })?;
        Ok(ComparisonInstance { left, right, mode })
    }

    pub fn left(&self) -> &Automaton {
        &self.left
    }

    pub fn right(&self) -> &Automaton {
        &self.right
    }

    pub fn mode(&self) -> WordMode {
        self.mode
    }

    pub fn with_mode(&self, mode: WordMode) -> ComparisonInstance {
        ComparisonInstance { mode, ..self.clone() }
    }

    /// The same pair with left and right exchanged. Needs a deterministic left side.
    pub fn swapped(&self) -> Result<ComparisonInstance, CompareError> {
        ComparisonInstance::new(self.right.clone(), self.left.clone(), self.mode)
    }

    /// Exact minimum difference, attainability, witness and all three verdicts.
    pub fn report(&self) -> Result<ComparisonReport, CompareError> {
        let analysis = analysis::analyze(self)?;
        let mut report = analysis.report(self.mode);
        report.verdicts.eq = decide::decide_eq(self, &report, DEFAULT_SEARCH_DEPTH)?.verdict;
        Ok(report)
    }

    /// The unfolding depth `k` used by the algorithm (0 outside the unfolded case).
    pub fn unfold_depth(&self) -> Result<usize, CompareError> {
        Ok(analysis::analyze(self)?.k)
    }
}

/// `min over infinite words of left(w) - right(w)` with a lasso witness.
pub fn min_diff_infinite(left: &Automaton, right: &Automaton) -> Result<ComparisonReport, CompareError> {
    ComparisonInstance::new(left.clone(), right.clone(), WordMode::Infinite)?.report()
}

/// `inf over nonempty finite words of left(u) - right(u)`, with attainability.
pub fn min_diff_finite(left: &Automaton, right: &Automaton) -> Result<ComparisonReport, CompareError> {
    ComparisonInstance::new(left.clone(), right.clone(), WordMode::Finite)?.report()
}

/// `>=` and `>` verdicts from the minimum difference; equality is filled in separately.
fn order_verdicts(mode: WordMode, min_diff: &Rational, attained: bool) -> Verdicts {
    let zero = Rational::zero();
    let geq = *min_diff >= zero;
    let gt = *min_diff > zero || (mode == WordMode::Finite && *min_diff == zero && !attained);
    Verdicts {
        geq: Verdict::from_bool(geq),
        gt: Verdict::from_bool(gt),
        eq: if geq && !gt { Verdict::Unknown } else { Verdict::False },
    }
}
