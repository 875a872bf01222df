//! Identity catalog: expression trees, the corpus text format, the shipped
//! corpus, and coefficient-by-coefficient verification.

mod corpus;
mod expr;
mod syntax;
mod verify;

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

pub use corpus::{
    andrews_gordon, builtin, cao_wang, dissections, durfee, euler, lebesgue, lee, theorem_grid, vz_double, warnaar,
    Dissection, EXAMPLE1_SAMPLES,
};
pub use expr::Expr;
pub use syntax::{parse_corpus, parse_expr, write_corpus};
pub use verify::{
    dissection_check, reports_to_json, verify, verify_all, Component, DissectionReport, Outcome,
    VerifyReport,
};

use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Status {
    Proved,
    Conjectural,
    Auxiliary,
}

impl Status {
    pub fn as_str(&self) -> &'static str {
        match self {
            Status::Proved => "proved",
            Status::Conjectural => "conjectural",
            Status::Auxiliary => "auxiliary",
        }
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Status {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.trim() {
            "proved" => Ok(Status::Proved),
            "conjectural" => Ok(Status::Conjectural),
            "auxiliary" => Ok(Status::Auxiliary),
            other => Err(format!("unknown status '{other}' (expected proved, conjectural or auxiliary)")),
        }
    }
}

/// Two expressions claimed equal as formal power series.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Identity {
    pub id: String,
    pub status: Status,
    pub provenance: String,
    pub lhs: Expr,
    pub rhs: Expr,
}

impl Identity {
    pub fn new(id: impl Into<String>, status: Status, provenance: impl Into<String>, lhs: Expr, rhs: Expr) -> Self {
        Identity { id: id.into(), status, provenance: provenance.into(), lhs, rhs }
    }
}

/// A set of identities with unique ids, kept sorted by id.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Catalog {
    entries: Vec<Identity>,
}

impl Catalog {
    pub fn new(mut entries: Vec<Identity>) -> Result<Catalog> {
        entries.sort_by(|a, b| a.id.cmp(&b.id));
        let mut seen = BTreeSet::new();
        for e in &entries {
            if !seen.insert(e.id.as_str()) {
                return Err(Error::DuplicateIdentity(e.id.clone()));
            }
        }
        Ok(Catalog { entries })
    }

    pub fn parse(text: &str) -> Result<Catalog> {
        Catalog::new(parse_corpus(text)?)
    }

    pub fn entries(&self) -> &[Identity] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, id: &str) -> Result<&Identity> {
        self.entries
            .binary_search_by(|e| e.id.as_str().cmp(id))
            .map(|i| &self.entries[i])
            .map_err(|_| Error::UnknownIdentity(id.to_string()))
    }

    /// Entries whose id matches the glob and whose status is in `status`
    /// (all statuses when `None`).
    pub fn filter(&self, pattern: Option<&str>, status: Option<Status>) -> Result<Catalog> {
        let pat = match pattern {
            Some(p) => Some(glob::Pattern::new(p).map_err(|e| Error::InvalidArgument(format!("bad id pattern: {e}")))?),
            None => None,
        };
        let entries = self
            .entries
            .iter()
            .filter(|e| pat.as_ref().is_none_or(|p| p.matches(&e.id)))
            .filter(|e| status.is_none_or(|s| e.status == s))
            .cloned()
            .collect();
        Ok(Catalog { entries })
    }

    pub fn to_text(&self) -> String {
        write_corpus(&self.entries)
    }
}
