//! Verification of identities and dissection claims.

use std::time::Instant;

use num_rational::BigRational;
use rayon::prelude::*;
use serde::Serialize;

use super::expr::Expr;
use super::{Catalog, Identity, Status};
use crate::rat::Rational;
use crate::series::{EqReport, PSeries};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Outcome {
    Equal,
    Mismatch { exponent: Rational, left: BigRational, right: BigRational },
    Error(String),
}

impl Outcome {
    pub fn is_equal(&self) -> bool {
        matches!(self, Outcome::Equal)
    }

    fn from_eq(r: Result<EqReport>) -> Outcome {
        match r {
            Ok(EqReport::Equal) => Outcome::Equal,
            Ok(EqReport::Mismatch { exponent, left, right }) => Outcome::Mismatch { exponent, left, right },
            Err(e) => Outcome::Error(e.to_string()),
        }
    }
}

impl std::fmt::Display for Outcome {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Outcome::Equal => f.write_str("equal"),
            Outcome::Mismatch { exponent, left, right } => {
                write!(f, "mismatch at q^{exponent}: {left} vs {right}")
            }
            Outcome::Error(e) => write!(f, "error: {e}"),
        }
    }
}

#[derive(Clone, Debug)]
pub struct VerifyReport {
    pub id: String,
    pub status: Status,
    pub order: Rational,
    pub outcome: Outcome,
    pub seconds: f64,
}

fn compare(lhs: &Expr, rhs: &Expr, order: Rational) -> Outcome {
    let l = match lhs.eval(order) {
        Ok(s) => s,
        Err(e) => return Outcome::Error(format!("lhs: {e}")),
    };
    let r = match rhs.eval(order) {
        Ok(s) => s,
        Err(e) => return Outcome::Error(format!("rhs: {e}")),
    };
    Outcome::from_eq(l.eq_upto(&r, order))
}

/// Expand both sides to `order` and compare. Errors land in the report.
pub fn verify(identity: &Identity, order: Rational) -> VerifyReport {
    let t = Instant::now();
    let outcome = compare(&identity.lhs, &identity.rhs, order);
    VerifyReport {
        id: identity.id.clone(),
        status: identity.status,
        order,
        outcome,
        seconds: t.elapsed().as_secs_f64(),
    }
}

/// Verify every entry with `jobs` workers (all cores when `None`). Reports
/// come back sorted by id.
pub fn verify_all(catalog: &Catalog, order: Rational, jobs: Option<usize>) -> Vec<VerifyReport> {
    let run = || catalog.entries().par_iter().map(|e| verify(e, order)).collect::<Vec<_>>();
    let mut out = match jobs {
        Some(n) => match rayon::ThreadPoolBuilder::new().num_threads(n.max(1)).build() {
            Ok(pool) => pool.install(run),
            Err(_) => run(),
        },
        None => run(),
    };
    out.sort_by(|a, b| a.id.cmp(&b.id));
    out
}

#[derive(Serialize)]
struct JsonReport<'a> {
    id: &'a str,
    status: &'static str,
    order: String,
    outcome: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    exponent: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    left: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    right: Option<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    error: Option<&'a str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    seconds: Option<f64>,
}

#[derive(Serialize)]
struct JsonRun<'a> {
    total: usize,
    equal: usize,
    reports: Vec<JsonReport<'a>>,
}

/// Machine-readable report. Without `timings` the output depends only on
/// the inputs.
pub fn reports_to_json(reports: &[VerifyReport], timings: bool) -> String {
    let rows = reports
        .iter()
        .map(|r| {
            let mut row = JsonReport {
                id: &r.id,
                status: r.status.as_str(),
                order: r.order.to_string(),
                outcome: "equal",
                exponent: None,
                left: None,
                right: None,
                error: None,
                seconds: timings.then_some(r.seconds),
            };
            match &r.outcome {
                Outcome::Equal => {}
                Outcome::Mismatch { exponent, left, right } => {
                    row.outcome = "mismatch";
                    row.exponent = Some(exponent.to_string());
                    row.left = Some(left.to_string());
                    row.right = Some(right.to_string());
                }
                Outcome::Error(e) => {
                    row.outcome = "error";
                    row.error = Some(e);
                }
            }
            row
        })
        .collect();
    let run = JsonRun { total: reports.len(), equal: reports.iter().filter(|r| r.outcome.is_equal()).count(), reports: rows };
    serde_json::to_string_pretty(&run).expect("report serializes")
}

#[derive(Clone, Debug)]
pub struct Component {
    pub index: usize,
    pub order: Rational,
    /// The component itself, to its propagated order.
    pub series: PSeries,
    /// `None` when nothing was claimed about this component.
    pub outcome: Option<Outcome>,
}

#[derive(Clone, Debug)]
pub struct DissectionReport {
    pub m: i64,
    pub components: Vec<Component>,
}

impl DissectionReport {
    /// Every claimed component matched.
    pub fn all_equal(&self) -> bool {
        self.components.iter().all(|c| c.outcome.as_ref().is_none_or(|o| o.is_equal()))
    }
}

/// Dissect `lhs` (expanded to `order`) into `m` components and compare the
/// claimed ones: `None` means the component vanishes.
pub fn dissection_check(
    lhs: &Expr,
    m: i64,
    expected: &[(usize, Option<Expr>)],
    order: Rational,
) -> Result<DissectionReport> {
    let s = lhs.eval(order)?;
    let parts = s.dissect(m)?;
    let mut components: Vec<Component> = parts
        .into_iter()
        .enumerate()
        .map(|(index, series)| Component { index, order: series.order(), series, outcome: None })
        .collect();
    for (j, want) in expected {
        let c = components
            .get_mut(*j)
            .ok_or_else(|| Error::InvalidArgument(format!("component {j} out of range for m = {m}")))?;
        let outcome = match want {
            None => Outcome::from_eq(c.series.eq_upto(&PSeries::zero(c.order), c.order)),
            Some(e) => match e.eval(c.order) {
                Ok(w) => Outcome::from_eq(c.series.eq_upto(&w, c.order)),
                Err(e) => Outcome::Error(e.to_string()),
            },
        };
        c.outcome = Some(outcome);
    }
    Ok(DissectionReport { m, components })
}
