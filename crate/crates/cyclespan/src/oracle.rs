//! Brute-force enumeration of small symmetric groups. Deliberately naive:
//! its value as an oracle comes from sharing nothing with the closed-form
//! and recurrence paths it is used to judge.

use num::bigint::BigInt;
use num::rational::BigRational;
use thiserror::Error;

use crate::dist::{factorial, PmfTable, SpanParams};
use crate::perm::Permutation;

/// Absolute ceiling on enumeration size; 10! is ~3.6M permutations.
pub const HARD_CAP: usize = 10;
pub const DEFAULT_MAX_N: usize = 8;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum OracleError {
    #[error("n={n} exceeds the enumeration budget of {max_n}")]
    OverBudget { n: usize, max_n: usize },
    #[error("budget {max_n} exceeds the hard cap of {HARD_CAP}")]
    OverHardCap { max_n: usize },
    #[error("l={l} outside [{m}, {n}]")]
    OutsideSupport { l: u64, m: u64, n: u64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EnumerationBudget {
    max_n: usize,
}

impl EnumerationBudget {
    pub fn new(max_n: usize) -> Result<Self, OracleError> {
        if max_n > HARD_CAP {
            return Err(OracleError::OverHardCap { max_n });
        }
        Ok(Self { max_n })
    }

    /// Bypasses the hard cap; only for explicitly configured callers.
    pub fn unchecked(max_n: usize) -> Self {
        Self { max_n }
    }

    pub fn max_n(&self) -> usize {
        self.max_n
    }

    fn check(&self, n: usize) -> Result<(), OracleError> {
        if n > self.max_n {
            Err(OracleError::OverBudget { n, max_n: self.max_n })
        } else {
            Ok(())
        }
    }
}

impl Default for EnumerationBudget {
    fn default() -> Self {
        Self { max_n: DEFAULT_MAX_N }
    }
}

/// All `n!` permutations, each exactly once, in lexicographic order of
/// one-line notation.
pub fn enumerate_permutations(
    n: usize,
    budget: EnumerationBudget,
) -> Result<impl Iterator<Item = Permutation>, OracleError> {
    budget.check(n)?;
    let first: Vec<usize> = (1..=n).collect();
    let mut state = Some(first);
    Ok(std::iter::from_fn(move || {
        let current = state.take()?;
        let mut next = current.clone();
        if next_permutation(&mut next) {
            state = Some(next);
        }
        Some(Permutation::new(current).expect("enumeration yields bijections"))
    }))
}

/// In-place lexicographic successor; false once the sequence is the last.
fn next_permutation(seq: &mut [usize]) -> bool {
    if seq.len() < 2 {
        return false;
    }
    let mut i = seq.len() - 1;
    while i > 0 && seq[i - 1] >= seq[i] {
        i -= 1;
    }
    if i == 0 {
        return false;
    }
    let mut j = seq.len() - 1;
    while seq[j] <= seq[i - 1] {
        j -= 1;
    }
    seq.swap(i - 1, j);
    seq[i..].reverse();
    true
}

/// Exact distribution of the span length over `[m]`, obtained by counting
/// every permutation of `[n]` individually.
pub fn exact_distribution_by_enumeration(
    params: SpanParams,
    budget: EnumerationBudget,
) -> Result<PmfTable, OracleError> {
    let n = params.n() as usize;
    let m = params.m() as usize;
    let mut counts = vec![0u64; n - m + 1];
    for p in enumerate_permutations(n, budget)? {
        counts[p.span_length(m).expect("m <= n") - m] += 1;
    }
    let total = factorial(params.n());
    let probs = counts
        .into_iter()
        .enumerate()
        .map(|(i, c)| {
            (params.m() + i as u64, BigRational::new(BigInt::from(c), total.clone()))
        })
        .collect();
    Ok(PmfTable { params, probs })
}

/// `|{pi in S_n : span length over [m] equals l}|` by direct count.
pub fn count_by_enumeration(
    params: SpanParams,
    l: u64,
    budget: EnumerationBudget,
) -> Result<u64, OracleError> {
    let (n, m) = (params.n(), params.m());
    if l < m || l > n {
        return Err(OracleError::OutsideSupport { l, m, n });
    }
    let mut count = 0;
    for p in enumerate_permutations(n as usize, budget)? {
        if p.span_length(m as usize).expect("m <= n") as u64 == l {
            count += 1;
        }
    }
    Ok(count)
}
