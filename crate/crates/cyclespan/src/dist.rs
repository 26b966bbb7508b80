//! Exact distribution of the combined spanned-cycles length `L` for a
//! uniform random permutation of `[n]` and a marked prefix `[m]`.
//!
//! Everything is computed in arbitrary-precision rationals; floats appear
//! only when a table is rendered. Three independent routes to the PMF are
//! exposed: the closed form `C(l-1, m-1) / C(n, m)`, the telescoping product
//! form, and a recurrence on `m` that never touches the closed form.

use std::collections::BTreeMap;

use num::bigint::BigInt;
use num::rational::BigRational;
use num::traits::{One, Signed, ToPrimitive, Zero};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
pub enum DistError {
    #[error("invalid parameters: require 1 <= m <= n, got n={n}, m={m}")]
    InvalidParams { n: u64, m: u64 },
    #[error("l={l} outside the support [{m}, {n}]")]
    OutsideSupport { l: i64, m: u64, n: u64 },
    #[error("k must be positive")]
    InvalidMomentOrder,
}

/// Ground-set size `n` and marked-prefix size `m`, with `1 <= m <= n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SpanParams {
    n: u64,
    m: u64,
}

impl SpanParams {
    pub fn new(n: u64, m: u64) -> Result<Self, DistError> {
        if m < 1 || m > n {
            return Err(DistError::InvalidParams { n, m });
        }
        Ok(Self { n, m })
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn m(&self) -> u64 {
        self.m
    }
}

/// `C(a, b)` by the multiplicative formula; zero when `b < 0` or `b > a`.
pub fn binomial(a: u64, b: i64) -> BigInt {
    if b < 0 || b as u64 > a {
        return BigInt::zero();
    }
    let b = (b as u64).min(a - b as u64);
    let mut result = BigInt::one();
    for i in 1..=b {
        result = result * BigInt::from(a - b + i) / BigInt::from(i);
    }
    result
}

/// Rising factorial `x (x+1) ... (x+k-1)`; empty product for `k = 0`.
pub fn rising_factorial(x: u64, k: u64) -> BigInt {
    let mut result = BigInt::one();
    for i in 0..k {
        result *= BigInt::from(x + i);
    }
    result
}

pub fn factorial(n: u64) -> BigInt {
    rising_factorial(1, n)
}

fn ratio(num: BigInt, den: BigInt) -> BigRational {
    BigRational::new(num, den)
}

/// Closed-form PMF `P(L = l) = C(l-1, m-1) / C(n, m)`, total over all
/// integers: exact zero outside the support `[m, n]`.
pub fn pmf(params: SpanParams, l: i64) -> BigRational {
    if l < params.m as i64 || l > params.n as i64 {
        return BigRational::zero();
    }
    ratio(
        binomial(l as u64 - 1, params.m as i64 - 1),
        binomial(params.n, params.m as i64),
    )
}

/// Product form `(m/n) * prod_{j=1}^{m-1} (l-j)/(n-j)`; defined only on the
/// support, unlike [`pmf`].
pub fn pmf_product(params: SpanParams, l: i64) -> Result<BigRational, DistError> {
    let (n, m) = (params.n, params.m);
    if l < m as i64 || l > n as i64 {
        return Err(DistError::OutsideSupport { l, m, n });
    }
    let mut result = ratio(BigInt::from(m), BigInt::from(n));
    for j in 1..m {
        result *= ratio(BigInt::from(l as u64 - j), BigInt::from(n - j));
    }
    Ok(result)
}

/// Exact PMF over the support `[m, n]`, with optionally precomputed entries.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PmfTable {
    pub params: SpanParams,
    pub probs: BTreeMap<u64, BigRational>,
}

impl PmfTable {
    pub fn total(&self) -> BigRational {
        self.probs.values().sum()
    }
}

/// Closed-form PMF table; sums to exactly 1.
pub fn pmf_table(params: SpanParams) -> PmfTable {
    let denominator = binomial(params.n, params.m as i64);
    let probs = (params.m..=params.n)
        .map(|l| (l, ratio(binomial(l - 1, params.m as i64 - 1), denominator.clone())))
        .collect();
    PmfTable { params, probs }
}

/// PMF table built purely from the base case `p(n, 1, l) = 1/n` and the
/// recurrence
/// `p(n,m,l) = p(n,m-1,l) (l-m+1)/(n-m+1)
///           + sum_{j=m-1}^{l-1} p(n,m-1,j) (n-j)/(n-m+1) p(n-j,1,l-j)`,
/// never via the closed form. Serves as an independent verification path.
pub fn pmf_recurrence(params: SpanParams) -> PmfTable {
    let rows = recurrence_rows(params.n, params.m);
    let row = rows.into_iter().last().expect("m >= 1 row exists");
    PmfTable { params, probs: row }
}

/// Rows `m' = 1..=m` of the recurrence for fixed `n`. Each row maps
/// `l in [m', n]` to `p(n, m', l)`.
pub fn recurrence_rows(n: u64, m: u64) -> Vec<BTreeMap<u64, BigRational>> {
    let base = |size: u64| ratio(BigInt::one(), BigInt::from(size));
    let mut rows: Vec<BTreeMap<u64, BigRational>> = Vec::with_capacity(m as usize);
    let row1: BTreeMap<u64, BigRational> = (1..=n).map(|l| (l, base(n))).collect();
    rows.push(row1);
    for cur_m in 2..=m {
        let prev = &rows[(cur_m - 2) as usize];
        let scale = BigInt::from(n - cur_m + 1);
        let mut row = BTreeMap::new();
        // Prefix sums of the previous row make the inner sum O(1) per entry.
        let mut prefix = BigRational::zero();
        let mut prefix_at: BTreeMap<u64, BigRational> = BTreeMap::new();
        for j in (cur_m - 1)..=n {
            prefix += &prev[&j];
            prefix_at.insert(j, prefix.clone());
        }
        for l in cur_m..=n {
            let stay = &prev[&l] * ratio(BigInt::from(l - cur_m + 1), scale.clone());
            // sum_{j=m-1}^{l-1} p(n,m-1,j) (n-j)/(n-m+1) * 1/(n-j)
            // collapses because the base case contributes exactly 1/(n-j).
            let grown = &prefix_at[&(l - 1)] * ratio(BigInt::one(), scale.clone());
            row.insert(l, stay + grown);
        }
        rows.push(row);
    }
    rows
}

/// `E[L] = m (n+1) / (m+1)`.
pub fn expectation(params: SpanParams) -> BigRational {
    ratio(
        BigInt::from(params.m) * BigInt::from(params.n + 1),
        BigInt::from(params.m + 1),
    )
}

/// `E[L^(k)] = m (n+1)^(k) / (m+k)` for the k-th rising-factorial moment.
pub fn rising_factorial_moment(params: SpanParams, k: u64) -> Result<BigRational, DistError> {
    if k < 1 {
        return Err(DistError::InvalidMomentOrder);
    }
    Ok(ratio(
        BigInt::from(params.m) * rising_factorial(params.n + 1, k),
        BigInt::from(params.m + k),
    ))
}

/// `Var[L] = m (n+1) (n-m) / ((m+1)^2 (m+2))`.
pub fn variance(params: SpanParams) -> BigRational {
    let (n, m) = (params.n, params.m);
    ratio(
        BigInt::from(m) * BigInt::from(n + 1) * BigInt::from(n - m),
        BigInt::from(m + 1) * BigInt::from(m + 1) * BigInt::from(m + 2),
    )
}

/// `P(L = n) = m / n`.
pub fn full_coverage_probability(params: SpanParams) -> BigRational {
    ratio(BigInt::from(params.m), BigInt::from(params.n))
}

/// Mean and squared standard deviation of the uncovered fraction
/// `1 - L/n`, plus a decimal rendering of the (generally irrational)
/// standard deviation itself.
#[derive(Debug, Clone, PartialEq)]
pub struct UncoveredFractionStats {
    pub mean: BigRational,
    pub sd_squared: BigRational,
    pub sd_decimal: String,
}

pub fn uncovered_fraction_stats(params: SpanParams) -> UncoveredFractionStats {
    let n = BigRational::from_integer(BigInt::from(params.n));
    let mean = BigRational::one() - expectation(params) / n.clone();
    let sd_squared = variance(params) / (n.clone() * n);
    let sd = sd_squared.to_f64().unwrap_or(f64::NAN).sqrt();
    UncoveredFractionStats { mean, sd_squared, sd_decimal: format!("{sd:?}") }
}

/// `|N^n_{m,l}| = C(n-m, l-m) * m * (l-1)! * (n-l)!`, the number of
/// permutations of `[n]` whose spanned-cycle length over `[m]` is exactly
/// `l`. Equals `pmf(l) * n!`.
pub fn count_span_permutations(params: SpanParams, l: i64) -> Result<BigInt, DistError> {
    let (n, m) = (params.n, params.m);
    if l < m as i64 || l > n as i64 {
        return Err(DistError::OutsideSupport { l, m, n });
    }
    let l = l as u64;
    Ok(binomial(n - m, (l - m) as i64) * BigInt::from(m) * factorial(l - 1) * factorial(n - l))
}

/// Moments of `L`: expectation, variance, and the first rising-factorial
/// moments.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentReport {
    pub params: SpanParams,
    pub expectation: BigRational,
    pub variance: BigRational,
    pub rising_factorial: BTreeMap<u64, BigRational>,
}

pub fn moment_report(params: SpanParams, k_max: u64) -> MomentReport {
    let rising_factorial = (1..=k_max.max(1))
        .map(|k| (k, rising_factorial_moment(params, k).expect("k >= 1")))
        .collect();
    MomentReport {
        params,
        expectation: expectation(params),
        variance: variance(params),
        rising_factorial,
    }
}

/// Renders a rational as a float string. `digits >= 17` gives the shortest
/// representation that round-trips; fewer digits round to that many
/// significant digits in scientific notation.
pub fn render_float(value: &BigRational, digits: usize) -> String {
    let f = rational_to_f64(value);
    if digits >= 17 {
        format!("{f:?}")
    } else {
        format!("{:.*e}", digits.saturating_sub(1), f)
    }
}

/// Correctly-rounded conversion to `f64`.
pub fn rational_to_f64(value: &BigRational) -> f64 {
    value.to_f64().unwrap_or_else(|| {
        if value.is_negative() {
            f64::NEG_INFINITY
        } else {
            f64::INFINITY
        }
    })
}
