//! Sanity check of the unfolding depth against the size bound `S²(3S + 3S²)`.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive};

use crate::automaton::Automaton;
use crate::rational::bit_length;

use super::analysis::analyze;
use super::{Case, CompareError, ComparisonInstance};

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum KBound {
    /// No unfolding happens in this case.
    NotApplicable(Case),
    Checked {
        k: usize,
        /// `S = |left| + |right|`.
        size: u64,
        bound: u128,
        holds: bool,
    },
}

/// `|left| + |right|`, where the size of one automaton is the maximum of its
/// transition count, the bit length of its weights once all weights of both
/// automata are scaled to integers by their common denominator, and the
/// numerator of its discount factor.
pub fn instance_size(left: &Automaton, right: &Automaton) -> u64 {
    let common = left
        .transitions()
        .iter()
        .chain(right.transitions())
        .fold(BigInt::one(), |acc, t| acc.lcm(t.weight.denom()));
    let size = |aut: &Automaton| {
        let weight_bits = aut
            .transitions()
            .iter()
            .map(|t| bit_length(&(t.weight.numer() * (&common / t.weight.denom())).abs()))
            .max()
            .unwrap_or(0);
        let numerator = aut
            .discount_factors()
            .iter()
            .map(|f| f.numer().to_u64().unwrap_or(u64::MAX))
            .max()
            .unwrap_or(0);
        (aut.transitions().len() as u64).max(weight_bits).max(numerator)
    };
    size(left) + size(right)
}

/// Compares the computed `k` with `S²(3S + 3S²)` on the analysed pair.
pub fn check_k_bound(instance: &ComparisonInstance) -> Result<KBound, CompareError> {
    let analysis = analyze(instance)?;
    if analysis.case != Case::Unfolded {
        return Ok(KBound::NotApplicable(analysis.case));
    }
    let size = instance_size(&analysis.left, &analysis.right);
    let s = u128::from(size);
    let bound = s * s * (3 * s + 3 * s * s);
    Ok(KBound::Checked {
        k: analysis.k,
        size,
        bound,
        holds: (analysis.k as u128) <= bound,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::compare::WordMode;
    use crate::rational::{int, ratio};
    use crate::samples::{cross_factor_pair, single_state};

    #[test]
    fn cross_pair_bound() {
        let (left, right) = cross_factor_pair();
        assert_eq!(instance_size(&left, &right), 2 + 3);
        let instance = ComparisonInstance::new(left, right, WordMode::Infinite).unwrap();
        match check_k_bound(&instance).unwrap() {
            KBound::Checked { k, bound, holds, .. } => {
                assert_eq!(k, 2);
                assert!(bound >= 72);
                assert!(holds);
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn degenerate_is_not_applicable() {
        let x = single_state(int(1), int(1), int(2));
        let y = single_state(ratio(1, 2), int(0), int(3));
        let instance = ComparisonInstance::new(x, y, WordMode::Infinite).unwrap();
        assert_eq!(
            check_k_bound(&instance).unwrap(),
            KBound::NotApplicable(Case::ConstantLeft)
        );
    }

    #[test]
    fn weights_scaled_by_common_denominator() {
        let left = single_state(ratio(1, 6), int(0), int(2));
        let right = single_state(int(5), int(0), int(2));
        // 5 becomes 30: five bits.
        assert_eq!(instance_size(&left, &right), 2 + 5);
    }
}
