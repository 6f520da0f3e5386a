//! Report rows and their CSV/JSON renderings.

use std::fmt::Write as _;

use capsndp_core::rational::{self, Rational};
use num_traits::{Signed, Zero};
use serde::Serialize;

/// Bumped whenever the column set or order changes.
pub const CSV_VERSION: u32 = 1;
/// Bumped whenever a JSON trace changes shape.
pub const TRACE_VERSION: u32 = 1;

pub const COLUMNS: [&str; 12] = [
    "id", "variant", "n", "m", "lp_cost", "cost", "bound", "oracle_cost", "ratio", "attempts", "wall_ms", "seed",
];

/// Digits after the point for `ratio` and the summary statistics.
const RATIO_DIGITS: u32 = 6;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ReportRow {
    pub id: String,
    pub variant: String,
    pub n: usize,
    pub m: usize,
    #[serde(serialize_with = "opt_rat")]
    pub lp_cost: Option<Rational>,
    #[serde(serialize_with = "rat")]
    pub cost: Rational,
    /// Expected rounded cost for LP variants, `9 Σℓ` for multicopy.
    #[serde(serialize_with = "opt_rat")]
    pub bound: Option<Rational>,
    #[serde(serialize_with = "opt_rat")]
    pub oracle_cost: Option<Rational>,
    pub attempts: Option<usize>,
    pub wall_ms: Option<u128>,
    pub seed: Option<u64>,
}

fn rat<S: serde::Serializer>(q: &Rational, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&rational::format(q))
}

fn opt_rat<S: serde::Serializer>(q: &Option<Rational>, s: S) -> Result<S::Ok, S::Error> {
    match q {
        Some(q) => s.serialize_some(&rational::format(q)),
        None => s.serialize_none(),
    }
}

/// `cost / oracle`; `None` without an oracle, `Some(None)` when the oracle
/// is zero but the cost is not.
pub fn ratio_of(cost: &Rational, oracle: Option<&Rational>) -> Option<Option<Rational>> {
    let oracle = oracle?;
    if oracle.is_positive() {
        Some(Some(cost / oracle))
    } else if cost.is_zero() {
        Some(Some(Rational::from_integer(1.into())))
    } else {
        Some(None)
    }
}

impl ReportRow {
    pub fn ratio(&self) -> Option<Option<Rational>> {
        ratio_of(&self.cost, self.oracle_cost.as_ref())
    }

    pub fn csv_line(&self) -> String {
        let opt = |q: &Option<Rational>| q.as_ref().map(rational::format).unwrap_or_default();
        let ratio = match self.ratio() {
            None => String::new(),
            Some(None) => "inf".to_string(),
            Some(Some(q)) => rational::format_decimal(&q, RATIO_DIGITS),
        };
        let fields = [
            self.id.clone(),
            self.variant.clone(),
            self.n.to_string(),
            self.m.to_string(),
            opt(&self.lp_cost),
            rational::format(&self.cost),
            opt(&self.bound),
            opt(&self.oracle_cost),
            ratio,
            self.attempts.map(|a| a.to_string()).unwrap_or_default(),
            self.wall_ms.map(|a| a.to_string()).unwrap_or_default(),
            self.seed.map(|a| a.to_string()).unwrap_or_default(),
        ];
        fields.join(",")
    }
}

pub fn csv_header() -> String {
    format!("# capsndp report v{CSV_VERSION}\n{}\n", COLUMNS.join(","))
}

pub fn csv_table(rows: &[ReportRow]) -> String {
    let mut out = csv_header();
    for row in rows {
        out.push_str(&row.csv_line());
        out.push('\n');
    }
    out
}

/// Mean and max ratio over the rows that have one. Infinite ratios make
/// the max `inf`.
pub fn summary_line(variant: &str, rows: &[ReportRow]) -> String {
    let ratios: Vec<Option<Rational>> = rows.iter().filter_map(ReportRow::ratio).collect();
    let mut line = format!("# summary variant={variant} trials={} rated={}", rows.len(), ratios.len());
    if ratios.is_empty() {
        line.push('\n');
        return line;
    }
    if ratios.iter().any(Option::is_none) {
        line.push_str(" mean_ratio=inf max_ratio=inf\n");
        return line;
    }
    let finite: Vec<Rational> = ratios.into_iter().flatten().collect();
    let sum = finite.iter().fold(Rational::zero(), |acc, q| acc + q);
    let mean = sum / Rational::from_integer((finite.len() as i64).into());
    let max = finite.iter().max().expect("nonempty").clone();
    let _ = writeln!(
        line,
        " mean_ratio={} max_ratio={}",
        rational::format_decimal(&mean, RATIO_DIGITS),
        rational::format_decimal(&max, RATIO_DIGITS)
    );
    line
}

#[cfg(test)]
mod tests {
    use super::*;
    use capsndp_core::rational::int;

    fn row(cost: i64, oracle: Option<i64>) -> ReportRow {
        ReportRow {
            id: "t".into(),
            variant: "uniform".into(),
            n: 3,
            m: 3,
            lp_cost: Some(rational::ratio(7, 2)),
            cost: int(cost),
            bound: None,
            oracle_cost: oracle.map(int),
            attempts: Some(1),
            wall_ms: None,
            seed: Some(9),
        }
    }

    #[test]
    fn ratio_empty_without_oracle() {
        assert_eq!(row(4, None).csv_line(), "t,uniform,3,3,7/2,4,,,,1,,9");
        assert_eq!(row(4, Some(2)).csv_line(), "t,uniform,3,3,7/2,4,,2,2.000000,1,,9");
        assert_eq!(row(4, Some(0)).csv_line(), "t,uniform,3,3,7/2,4,,0,inf,1,,9");
    }

    #[test]
    fn summary_statistics() {
        let rows = [row(3, Some(2)), row(2, Some(2)), row(5, None)];
        assert_eq!(
            summary_line("uniform", &rows),
            "# summary variant=uniform trials=3 rated=2 mean_ratio=1.250000 max_ratio=1.500000\n"
        );
    }

    #[test]
    fn header_is_versioned() {
        assert!(csv_header().starts_with("# capsndp report v1\nid,variant,"));
    }
}
