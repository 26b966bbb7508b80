//! Exact and empirical distributions of the combined length of all cycles
//! of a uniform random permutation of `[n]` that intersect the prefix
//! `[m]`.
//!
//! The crate provides:
//! - [`perm`]: permutations, canonical cycle structure, restriction, and
//!   spanned-cycle quantities;
//! - [`dist`]: the exact PMF (closed form, product form, and recurrence),
//!   moments, and counting formulas in arbitrary-precision rationals;
//! - [`sample`]: seedable uniform and constrained samplers, the span
//!   profile codec, and a deterministic Monte Carlo driver;
//! - [`oracle`]: brute-force enumeration of small symmetric groups;
//! - [`report`]: stable CSV/JSON renderings;
//! - [`cli`]: the `cyclespan` command-line front end.

pub mod cli;
pub mod dist;
pub mod oracle;
pub mod perm;
pub mod report;
pub mod sample;
