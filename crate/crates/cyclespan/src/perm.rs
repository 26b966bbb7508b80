//! Permutations of `[n] = {1, ..., n}`, their canonical cycle structure,
//! restriction to a prefix, and the spanned-cycle quantities everything else
//! is built on.
//!
//! Elements are 1-based in every interface. The canonical cycle
//! representation writes each cycle with its smallest element first and
//! orders cycles by decreasing first element; it stays unambiguous even with
//! the parentheses dropped, which the profile codec relies on.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum PermError {
    #[error("ground set must be non-empty")]
    EmptyGroundSet,
    #[error("images are not a bijection on [{n}]: value {value} at position {position}")]
    NotBijection { n: usize, value: usize, position: usize },
    #[error("index {k} out of range for ground set [{n}]")]
    IndexOutOfRange { k: usize, n: usize },
    #[error("cycles do not partition the ground set")]
    NotPartition,
    #[error("cycle decomposition is not canonical")]
    NotCanonical,
    #[error("cannot parse permutation: {0}")]
    Parse(String),
}

/// A bijection on `[n]`, stored in one-line notation.
///
/// `images[j-1]` is the image of `j`, itself a value in `[n]`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    images: Vec<usize>,
}

impl Permutation {
    /// Builds a permutation from 1-based one-line notation, validating the
    /// bijection property.
    pub fn new(images: Vec<usize>) -> Result<Self, PermError> {
        let n = images.len();
        if n == 0 {
            return Err(PermError::EmptyGroundSet);
        }
        let mut seen = vec![false; n];
        for (i, &v) in images.iter().enumerate() {
            if v < 1 || v > n || seen[v - 1] {
                return Err(PermError::NotBijection { n, value: v, position: i + 1 });
            }
            seen[v - 1] = true;
        }
        Ok(Self { images })
    }

    pub fn identity(n: usize) -> Result<Self, PermError> {
        Self::new((1..=n).collect())
    }

    pub fn n(&self) -> usize {
        self.images.len()
    }

    /// Image of `j` under the permutation; `j` is 1-based.
    pub fn apply(&self, j: usize) -> usize {
        self.images[j - 1]
    }

    pub fn images(&self) -> &[usize] {
        &self.images
    }

    pub fn count_fixed_points(&self) -> usize {
        self.images.iter().enumerate().filter(|(i, &v)| v == i + 1).count()
    }

    /// Canonical cycle decomposition: smallest element first within each
    /// cycle, cycles in decreasing order of first element.
    pub fn cycle_decomposition(&self) -> CycleDecomposition {
        let n = self.n();
        let mut visited = vec![false; n];
        let mut cycles = Vec::new();
        // Collect with smallest leaders first, then reverse.
        for start in 1..=n {
            if visited[start - 1] {
                continue;
            }
            let mut cycle = Vec::new();
            let mut j = start;
            loop {
                visited[j - 1] = true;
                cycle.push(j);
                j = self.apply(j);
                if j == start {
                    break;
                }
            }
            cycles.push(cycle);
        }
        cycles.reverse();
        CycleDecomposition { cycles }
    }

    /// Restriction to `[k]`: each `j <= k` maps to the first iterate of `j`
    /// that lands back in `[k]`. Returns a permutation on a fresh ground set
    /// `[k]`.
    pub fn restrict(&self, k: usize) -> Result<Permutation, PermError> {
        self.check_prefix(k)?;
        let mut images = Vec::with_capacity(k);
        for j in 1..=k {
            let mut x = self.apply(j);
            while x > k {
                x = self.apply(x);
            }
            images.push(x);
        }
        Ok(Permutation { images })
    }

    /// Union of all cycles that intersect `marked`. Always a union of whole
    /// cycles; empty input gives an empty result.
    pub fn spanned_cycles(&self, marked: &BTreeSet<usize>) -> BTreeSet<usize> {
        let mut result = BTreeSet::new();
        for &start in marked {
            if result.contains(&start) {
                continue;
            }
            let mut j = start;
            loop {
                result.insert(j);
                j = self.apply(j);
                if j == start {
                    break;
                }
            }
        }
        result
    }

    /// Total length of the cycles meeting the prefix `[m]`.
    pub fn span_length(&self, m: usize) -> Result<usize, PermError> {
        self.check_prefix(m)?;
        Ok(self.following_distances(m)?.into_iter().sum())
    }

    /// For each `j` in `[m]`, the smallest power of the permutation that
    /// sends `j` back into `[m]`. The entries sum to the span length.
    pub fn following_distances(&self, m: usize) -> Result<Vec<usize>, PermError> {
        self.check_prefix(m)?;
        let mut distances = Vec::with_capacity(m);
        for j in 1..=m {
            let mut x = self.apply(j);
            let mut steps = 1usize;
            while x > m {
                x = self.apply(x);
                steps += 1;
            }
            distances.push(steps);
        }
        Ok(distances)
    }

    /// The elements of `[m+1, n]` in the order they appear in the canonical
    /// cycle representation.
    pub fn tail_sequence(&self, m: usize) -> Result<Vec<usize>, PermError> {
        self.check_prefix(m)?;
        Ok(self
            .cycle_decomposition()
            .cycles
            .iter()
            .flatten()
            .copied()
            .filter(|&x| x > m)
            .collect())
    }

    fn check_prefix(&self, m: usize) -> Result<(), PermError> {
        if m < 1 || m > self.n() {
            Err(PermError::IndexOutOfRange { k: m, n: self.n() })
        } else {
            Ok(())
        }
    }

    /// One-line notation: images separated by single spaces.
    pub fn to_one_line(&self) -> String {
        self.images
            .iter()
            .map(|v| v.to_string())
            .collect::<Vec<_>>()
            .join(" ")
    }
}

impl FromStr for Permutation {
    type Err = PermError;

    fn from_str(s: &str) -> Result<Self, PermError> {
        let trimmed = s.trim();
        if trimmed.starts_with('(') {
            return CycleDecomposition::from_str(trimmed).and_then(from_cycles);
        }
        let images = trimmed
            .split_whitespace()
            .map(|t| t.parse::<usize>().map_err(|e| PermError::Parse(e.to_string())))
            .collect::<Result<Vec<_>, _>>()?;
        Permutation::new(images)
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.cycle_decomposition())
    }
}

/// Canonical cycle structure of a permutation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CycleDecomposition {
    cycles: Vec<Vec<usize>>,
}

impl CycleDecomposition {
    /// Validates canonicity: every cycle leads with its minimum, leaders
    /// strictly decrease, and the cycles partition `[n]`.
    pub fn new(cycles: Vec<Vec<usize>>) -> Result<Self, PermError> {
        let n: usize = cycles.iter().map(|c| c.len()).sum();
        if n == 0 {
            return Err(PermError::EmptyGroundSet);
        }
        let mut seen = vec![false; n];
        let mut prev_leader = usize::MAX;
        for cycle in &cycles {
            let leader = *cycle.first().ok_or(PermError::NotCanonical)?;
            if leader >= prev_leader {
                return Err(PermError::NotCanonical);
            }
            prev_leader = leader;
            for &x in cycle {
                if x < 1 || x > n || seen[x - 1] {
                    return Err(PermError::NotPartition);
                }
                if x < leader {
                    return Err(PermError::NotCanonical);
                }
                seen[x - 1] = true;
            }
        }
        // seen is full iff every element in [n] appeared once.
        Ok(Self { cycles })
    }

    pub fn cycles(&self) -> &[Vec<usize>] {
        &self.cycles
    }

    pub fn n(&self) -> usize {
        self.cycles.iter().map(|c| c.len()).sum()
    }

    /// The parenthesis-free element sequence.
    pub fn concatenation(&self) -> Vec<usize> {
        self.cycles.iter().flatten().copied().collect()
    }
}

impl fmt::Display for CycleDecomposition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for cycle in &self.cycles {
            write!(f, "(")?;
            for (i, x) in cycle.iter().enumerate() {
                if i > 0 {
                    write!(f, " ")?;
                }
                write!(f, "{x}")?;
            }
            write!(f, ")")?;
        }
        Ok(())
    }
}

impl FromStr for CycleDecomposition {
    type Err = PermError;

    fn from_str(s: &str) -> Result<Self, PermError> {
        let mut cycles = Vec::new();
        let mut rest = s.trim();
        while !rest.is_empty() {
            if !rest.starts_with('(') {
                return Err(PermError::Parse(format!("expected '(' at {rest:?}")));
            }
            let end = rest
                .find(')')
                .ok_or_else(|| PermError::Parse("unbalanced parenthesis".into()))?;
            let inner = &rest[1..end];
            let cycle = inner
                .split_whitespace()
                .map(|t| t.parse::<usize>().map_err(|e| PermError::Parse(e.to_string())))
                .collect::<Result<Vec<_>, _>>()?;
            if cycle.is_empty() {
                return Err(PermError::Parse("empty cycle".into()));
            }
            cycles.push(cycle);
            rest = rest[end + 1..].trim_start();
        }
        CycleDecomposition::new(cycles)
    }
}

/// Inverse of [`Permutation::cycle_decomposition`]; rejects non-canonical or
/// non-partitioning input.
pub fn from_cycles(decomposition: CycleDecomposition) -> Result<Permutation, PermError> {
    let n = decomposition.n();
    let mut images = vec![0usize; n];
    for cycle in decomposition.cycles() {
        for (i, &x) in cycle.iter().enumerate() {
            let next = cycle[(i + 1) % cycle.len()];
            images[x - 1] = next;
        }
    }
    Permutation::new(images)
}

/// Parses a parenthesis-free canonical concatenation by the prefix-minimum
/// rule: a new cycle starts at exactly each element smaller than everything
/// before it.
pub fn parse_concatenation(sequence: &[usize]) -> Result<CycleDecomposition, PermError> {
    let mut cycles: Vec<Vec<usize>> = Vec::new();
    let mut running_min = usize::MAX;
    for &x in sequence {
        if x < running_min {
            running_min = x;
            cycles.push(vec![x]);
        } else {
            cycles.last_mut().ok_or(PermError::NotCanonical)?.push(x);
        }
    }
    CycleDecomposition::new(cycles)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// The S_11 permutation (8)(3 10 11 6 5 7)(2 4)(1 9) used throughout.
    pub(crate) fn example_perm() -> Permutation {
        Permutation::new(vec![9, 4, 10, 2, 7, 5, 3, 8, 1, 11, 6]).unwrap()
    }

    #[test]
    fn cycle_decomposition_canonical() {
        let d = example_perm().cycle_decomposition();
        assert_eq!(
            d.cycles(),
            &[vec![8], vec![3, 10, 11, 6, 5, 7], vec![2, 4], vec![1, 9]]
        );
    }

    #[test]
    fn cycle_decomposition_identity_and_single_cycle() {
        let id3 = Permutation::identity(3).unwrap();
        assert_eq!(id3.cycle_decomposition().cycles(), &[vec![3], vec![2], vec![1]]);
        let c = Permutation::new(vec![2, 3, 1]).unwrap();
        assert_eq!(c.cycle_decomposition().cycles(), &[vec![1, 2, 3]]);
    }

    #[test]
    fn from_cycles_round_trip() {
        let id = from_cycles(CycleDecomposition::new(vec![vec![3], vec![2], vec![1]]).unwrap())
            .unwrap();
        assert_eq!(id, Permutation::identity(3).unwrap());
        let c = from_cycles(CycleDecomposition::new(vec![vec![1, 2, 3]]).unwrap()).unwrap();
        assert_eq!(c.images(), &[2, 3, 1]);
        let id2 = from_cycles(CycleDecomposition::new(vec![vec![2], vec![1]]).unwrap()).unwrap();
        assert_eq!(id2, Permutation::identity(2).unwrap());
    }

    #[test]
    fn from_cycles_rejects_non_canonical() {
        assert!(CycleDecomposition::new(vec![vec![1, 9], vec![2, 4]]).is_err());
        assert!(CycleDecomposition::new(vec![vec![2, 1]]).is_err());
        assert!(CycleDecomposition::new(vec![vec![2], vec![1], vec![2]]).is_err());
    }

    #[test]
    fn restrict_matches_worked_example() {
        let p = example_perm();
        let r = p.restrict(6).unwrap();
        assert_eq!(
            r.cycle_decomposition().cycles(),
            &[vec![3, 6, 5], vec![2, 4], vec![1]]
        );
        assert_eq!(p.restrict(11).unwrap(), p);
        assert_eq!(p.restrict(2).unwrap(), Permutation::identity(2).unwrap());
        assert!(p.restrict(0).is_err());
        assert!(p.restrict(12).is_err());
    }

    #[test]
    fn spanned_cycles_examples() {
        let p = example_perm();
        let marked: BTreeSet<usize> = (1..=6).collect();
        let expected: BTreeSet<usize> = [1, 2, 3, 4, 5, 6, 7, 9, 10, 11].into_iter().collect();
        assert_eq!(p.spanned_cycles(&marked), expected);

        let all: BTreeSet<usize> = (1..=11).collect();
        assert_eq!(p.spanned_cycles(&all), all);

        let id5 = Permutation::identity(5).unwrap();
        let single: BTreeSet<usize> = [2].into_iter().collect();
        assert_eq!(id5.spanned_cycles(&single), single);
        assert!(id5.spanned_cycles(&BTreeSet::new()).is_empty());
    }

    #[test]
    fn span_length_and_distances() {
        let p = example_perm();
        assert_eq!(p.span_length(6).unwrap(), 10);
        assert_eq!(p.following_distances(6).unwrap(), vec![2, 1, 3, 1, 2, 1]);
        assert_eq!(p.span_length(11).unwrap(), 11);
        assert!(p.span_length(0).is_err());

        let id = Permutation::identity(7).unwrap();
        assert_eq!(id.span_length(4).unwrap(), 4);
        assert_eq!(id.following_distances(4).unwrap(), vec![1; 4]);

        let cycle = Permutation::new(vec![2, 3, 4, 5, 1]).unwrap();
        assert_eq!(cycle.following_distances(1).unwrap(), vec![5]);
    }

    #[test]
    fn tail_sequence_examples() {
        let p = example_perm();
        assert_eq!(p.tail_sequence(6).unwrap(), vec![8, 10, 11, 7, 9]);
        assert_eq!(p.tail_sequence(11).unwrap(), Vec::<usize>::new());
        let id3 = Permutation::identity(3).unwrap();
        assert_eq!(id3.tail_sequence(1).unwrap(), vec![3, 2]);
    }

    #[test]
    fn fixed_points() {
        assert_eq!(Permutation::identity(6).unwrap().count_fixed_points(), 6);
        assert_eq!(Permutation::new(vec![2, 3, 1]).unwrap().count_fixed_points(), 0);
        assert_eq!(example_perm().count_fixed_points(), 1);
    }

    #[test]
    fn parse_and_print_round_trip() {
        let p = example_perm();
        let one_line = p.to_one_line();
        assert_eq!(one_line, "9 4 10 2 7 5 3 8 1 11 6");
        assert_eq!(one_line.parse::<Permutation>().unwrap(), p);

        let cycle_text = p.to_string();
        assert_eq!(cycle_text, "(8)(3 10 11 6 5 7)(2 4)(1 9)");
        assert_eq!(cycle_text.parse::<Permutation>().unwrap(), p);
    }

    #[test]
    fn invalid_inputs_rejected() {
        assert!(Permutation::new(vec![]).is_err());
        assert!(Permutation::new(vec![1, 1]).is_err());
        assert!(Permutation::new(vec![0, 2]).is_err());
        assert!(Permutation::new(vec![3, 1]).is_err());
        assert!("(2 1)".parse::<Permutation>().is_err());
        assert!("1 2 2".parse::<Permutation>().is_err());
    }

    #[test]
    fn prefix_minimum_reparse_recovers_decomposition() {
        let p = example_perm();
        let d = p.cycle_decomposition();
        let reparsed = parse_concatenation(&d.concatenation()).unwrap();
        assert_eq!(reparsed, d);
    }
}
