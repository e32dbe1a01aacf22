//! Summary of known values and bounds of the packing number.

use serde::{Deserialize, Serialize};

use crate::arith::Rat;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Exact,
    Bounds,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Source {
    /// Upper bound certified here, lower bound by construction.
    Certified,
    /// Taken from the literature.
    Cited,
}

/// Radius range: a half-open interval, the unbounded range above 1, or a
/// single radius.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Row {
    pub interval: String,
    pub lo: Rat,
    pub hi: Option<Rat>,
    pub lower: usize,
    pub upper: usize,
    pub status: Status,
    pub source: Source,
}

fn row(interval: &str, lo: Rat, hi: Option<Rat>, lower: usize, upper: usize, source: Source) -> Row {
    let status = if lower == upper { Status::Exact } else { Status::Bounds };
    Row { interval: interval.to_string(), lo, hi, lower, upper, status, source }
}

/// Rows for dimension `n`; the finer rows exist only for `n = 3`.
pub fn summary(n: usize) -> Vec<Row> {
    let q = Rat::new;
    let top_lo = Rat::one() - Rat::new(1, n as i64);
    let mut rows = vec![
        row("(1,inf)", Rat::one(), None, 1, 1, Source::Certified),
        row(&format!("({top_lo},1]"), top_lo, Some(Rat::one()), 2 * n, 2 * n, Source::Certified),
    ];
    if n == 3 {
        rows.extend([
            row("(3/5,2/3]", q(3, 5), Some(q(2, 3)), 10, 10, Source::Certified),
            row("(4/7,3/5]", q(4, 7), Some(q(3, 5)), 12, 12, Source::Certified),
            row("(6/11,4/7]", q(6, 11), Some(q(4, 7)), 12, 14, Source::Certified),
            row("(1/2,6/11]", q(1, 2), Some(q(6, 11)), 13, 14, Source::Certified),
            row("[1/2,1/2]", q(1, 2), Some(q(1, 2)), 19, 26, Source::Cited),
        ]);
    }
    rows
}

fn status_name(s: Status) -> &'static str {
    match s {
        Status::Exact => "exact",
        Status::Bounds => "bounds",
    }
}

fn source_name(s: Source) -> &'static str {
    match s {
        Source::Certified => "certified",
        Source::Cited => "cited",
    }
}

/// CSV with a header line. With `decimal`, approximate endpoint columns are
/// appended.
pub fn to_csv(rows: &[Row], decimal: bool) -> String {
    let mut out = String::from("interval,lower,upper,status,source");
    if decimal {
        out.push_str(",lo_approx,hi_approx");
    }
    out.push('\n');
    for r in rows {
        out.push_str(&format!(
            "\"{}\",{},{},{},{}",
            r.interval,
            r.lower,
            r.upper,
            status_name(r.status),
            source_name(r.source)
        ));
        if decimal {
            let hi = r.hi.as_ref().map_or("inf".to_string(), |h| h.to_decimal_string(6));
            out.push_str(&format!(",{},{}", r.lo.to_decimal_string(6), hi));
        }
        out.push('\n');
    }
    out
}
