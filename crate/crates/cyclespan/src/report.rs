//! Stable CSV and JSON renderings of tables and reports.
//!
//! CSV schemas:
//! - PMF: `l,numerator,denominator,float`
//! - empirical: the same columns plus `count`, preceded by a
//!   `# trials=<t> seed=<s>` comment line
//! - moments: `statistic,numerator,denominator,float`
//! - figure: blocks of `l,float` rows, each preceded by
//!   `# m=<value> expectation=<float>`
//!
//! JSON carries numerator/denominator as decimal strings (they routinely
//! exceed any machine integer) next to a float field.

use num::rational::BigRational;
use serde::Serialize;

use crate::dist::{rational_to_f64, render_float, MomentReport, PmfTable, UncoveredFractionStats};
use crate::sample::EmpiricalDistribution;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Serialize)]
struct RationalJson {
    numerator: String,
    denominator: String,
    float: f64,
}

fn rational_json(value: &BigRational) -> RationalJson {
    RationalJson {
        numerator: value.numer().to_string(),
        denominator: value.denom().to_string(),
        float: rational_to_f64(value),
    }
}

#[derive(Serialize)]
struct PmfEntryJson {
    l: u64,
    #[serde(flatten)]
    prob: RationalJson,
}

#[derive(Serialize)]
struct PmfJson {
    n: u64,
    m: u64,
    entries: Vec<PmfEntryJson>,
}

pub fn pmf_csv(table: &PmfTable, digits: usize) -> String {
    let mut out = String::from("l,numerator,denominator,float\n");
    for (l, p) in &table.probs {
        out.push_str(&format!(
            "{l},{},{},{}\n",
            p.numer(),
            p.denom(),
            render_float(p, digits)
        ));
    }
    out
}

pub fn pmf_json(table: &PmfTable) -> String {
    let doc = PmfJson {
        n: table.params.n(),
        m: table.params.m(),
        entries: table
            .probs
            .iter()
            .map(|(&l, p)| PmfEntryJson { l, prob: rational_json(p) })
            .collect(),
    };
    serde_json::to_string_pretty(&doc).expect("serializable")
}

pub fn moments_csv(
    report: &MomentReport,
    coverage: &BigRational,
    uncovered: &UncoveredFractionStats,
    digits: usize,
) -> String {
    let mut out = String::from("statistic,numerator,denominator,float\n");
    let mut row = |name: &str, value: &BigRational| {
        out.push_str(&format!(
            "{name},{},{},{}\n",
            value.numer(),
            value.denom(),
            render_float(value, digits)
        ));
    };
    row("expectation", &report.expectation);
    row("variance", &report.variance);
    for (k, v) in &report.rising_factorial {
        row(&format!("rising_factorial_{k}"), v);
    }
    row("full_coverage_probability", coverage);
    row("uncovered_fraction_mean", &uncovered.mean);
    row("uncovered_fraction_sd_squared", &uncovered.sd_squared);
    out.push_str(&format!("uncovered_fraction_sd,,,{}\n", uncovered.sd_decimal));
    out
}

#[derive(Serialize)]
struct MomentsJson {
    n: u64,
    m: u64,
    expectation: RationalJson,
    variance: RationalJson,
    rising_factorial: Vec<(u64, RationalJson)>,
    full_coverage_probability: RationalJson,
    uncovered_fraction_mean: RationalJson,
    uncovered_fraction_sd_squared: RationalJson,
    uncovered_fraction_sd: String,
}

pub fn moments_json(
    report: &MomentReport,
    coverage: &BigRational,
    uncovered: &UncoveredFractionStats,
) -> String {
    let doc = MomentsJson {
        n: report.params.n(),
        m: report.params.m(),
        expectation: rational_json(&report.expectation),
        variance: rational_json(&report.variance),
        rising_factorial: report
            .rising_factorial
            .iter()
            .map(|(&k, v)| (k, rational_json(v)))
            .collect(),
        full_coverage_probability: rational_json(coverage),
        uncovered_fraction_mean: rational_json(&uncovered.mean),
        uncovered_fraction_sd_squared: rational_json(&uncovered.sd_squared),
        uncovered_fraction_sd: uncovered.sd_decimal.clone(),
    };
    serde_json::to_string_pretty(&doc).expect("serializable")
}

pub fn empirical_csv(dist: &EmpiricalDistribution, digits: usize) -> String {
    let mut out = format!("# trials={} seed={}\n", dist.trials, dist.seed);
    out.push_str("l,numerator,denominator,float,count\n");
    for (l, count) in &dist.counts {
        let p = BigRational::new((*count).into(), dist.trials.into());
        out.push_str(&format!(
            "{l},{},{},{},{count}\n",
            p.numer(),
            p.denom(),
            render_float(&p, digits)
        ));
    }
    out
}

#[derive(Serialize)]
struct EmpiricalEntryJson {
    l: u64,
    count: u64,
    #[serde(flatten)]
    frequency: RationalJson,
}

#[derive(Serialize)]
struct EmpiricalJson {
    n: u64,
    m: u64,
    trials: u64,
    seed: u64,
    fixed_point_total: u64,
    entries: Vec<EmpiricalEntryJson>,
}

pub fn empirical_json(dist: &EmpiricalDistribution) -> String {
    let doc = EmpiricalJson {
        n: dist.params.n(),
        m: dist.params.m(),
        trials: dist.trials,
        seed: dist.seed,
        fixed_point_total: dist.fixed_point_total,
        entries: dist
            .counts
            .iter()
            .map(|(&l, &count)| EmpiricalEntryJson {
                l,
                count,
                frequency: rational_json(&BigRational::new(count.into(), dist.trials.into())),
            })
            .collect(),
    };
    serde_json::to_string_pretty(&doc).expect("serializable")
}

/// One figure block per `m`: the PMF over the full range `[1, n]` with
/// zeros below the support, preceded by the expectation marker.
pub struct FigureBlock {
    pub m: u64,
    pub expectation: f64,
    pub values: Vec<(u64, f64)>,
}

pub fn figure_csv(blocks: &[FigureBlock]) -> String {
    let mut out = String::from("l,float\n");
    for block in blocks {
        out.push_str(&format!("# m={} expectation={:?}\n", block.m, block.expectation));
        for (l, v) in &block.values {
            out.push_str(&format!("{l},{v:?}\n"));
        }
    }
    out
}

#[derive(Serialize)]
struct FigureBlockJson {
    m: u64,
    expectation: f64,
    values: Vec<(u64, f64)>,
}

pub fn figure_json(n: u64, blocks: &[FigureBlock]) -> String {
    #[derive(Serialize)]
    struct FigureJson {
        n: u64,
        blocks: Vec<FigureBlockJson>,
    }
    let doc = FigureJson {
        n,
        blocks: blocks
            .iter()
            .map(|b| FigureBlockJson {
                m: b.m,
                expectation: b.expectation,
                values: b.values.clone(),
            })
            .collect(),
    };
    serde_json::to_string_pretty(&doc).expect("serializable")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dist::{
        full_coverage_probability, moment_report, pmf_table, uncovered_fraction_stats, SpanParams,
    };

    #[test]
    fn pmf_csv_schema() {
        let table = pmf_table(SpanParams::new(4, 2).unwrap());
        let csv = pmf_csv(&table, 17);
        let lines: Vec<_> = csv.lines().collect();
        assert_eq!(lines[0], "l,numerator,denominator,float");
        assert_eq!(lines[1], "2,1,6,0.16666666666666666");
        assert_eq!(lines[2], "3,1,3,0.3333333333333333");
        assert_eq!(lines[3], "4,1,2,0.5");
    }

    #[test]
    fn pmf_json_fields() {
        let table = pmf_table(SpanParams::new(3, 3).unwrap());
        let parsed: serde_json::Value = serde_json::from_str(&pmf_json(&table)).unwrap();
        assert_eq!(parsed["n"], 3);
        assert_eq!(parsed["entries"][0]["numerator"], "1");
        assert_eq!(parsed["entries"][0]["denominator"], "1");
        assert_eq!(parsed["entries"][0]["float"], 1.0);
    }

    #[test]
    fn moments_csv_contains_all_statistics() {
        let params = SpanParams::new(1000, 100).unwrap();
        let csv = moments_csv(
            &moment_report(params, 2),
            &full_coverage_probability(params),
            &uncovered_fraction_stats(params),
            17,
        );
        assert!(csv.contains("expectation,100100,101,"));
        assert!(csv.contains("full_coverage_probability,1,10,0.1"));
        assert!(csv.contains("uncovered_fraction_mean,9,1010,"));
    }

    #[test]
    fn empirical_csv_header() {
        let dist = crate::sample::monte_carlo(SpanParams::new(5, 2).unwrap(), 100, 9);
        let csv = empirical_csv(&dist, 17);
        assert!(csv.starts_with("# trials=100 seed=9\n"));
        assert_eq!(csv.lines().nth(1).unwrap(), "l,numerator,denominator,float,count");
    }

    #[test]
    fn figure_csv_blocks() {
        let blocks = vec![FigureBlock {
            m: 1,
            expectation: 50.5,
            values: vec![(1, 0.01), (2, 0.01)],
        }];
        let csv = figure_csv(&blocks);
        assert_eq!(csv, "l,float\n# m=1 expectation=50.5\n1,0.01\n2,0.01\n");
    }
}
