//! Shared reporting types: three-state predicates, hypothesis records, and
//! grid-scan reports.

use serde::Serialize;

/// Outcome of a predicate that may not apply to the given shape.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Holds,
    Fails,
    NotApplicable,
}

impl Status {
    pub fn from_bool(b: bool) -> Self {
        if b {
            Status::Holds
        } else {
            Status::Fails
        }
    }

    pub fn holds(self) -> bool {
        self == Status::Holds
    }
}

/// A named hypothesis together with its outcome; `witness` carries a short
/// human-readable description of the failing index or value when it fails.
#[derive(Clone, Debug, Serialize)]
pub struct Hypothesis {
    pub name: String,
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
}

impl Hypothesis {
    pub fn new(name: &str, status: Status) -> Self {
        Hypothesis {
            name: name.to_string(),
            status,
            witness: None,
        }
    }

    pub fn with_witness(name: &str, status: Status, witness: String) -> Self {
        Hypothesis {
            name: name.to_string(),
            status,
            witness: Some(witness),
        }
    }
}

/// Result of a grid scan asserting a sign or monotonicity property.
///
/// `pass` holds exactly when `min_margin >= -tolerance`. When the theorem
/// hypotheses behind the scanned property do not hold, `hypothesis` records
/// that and the scan is advisory.
#[derive(Clone, Debug, Serialize)]
pub struct MonotoneReport {
    pub property: String,
    pub pass: bool,
    pub min_margin: f64,
    /// Grid location at which the minimum margin was attained.
    pub argmin: f64,
    pub tolerance: f64,
    pub points: usize,
    pub hypothesis: Status,
}

impl MonotoneReport {
    pub fn new(
        property: &str,
        min_margin: f64,
        argmin: f64,
        tolerance: f64,
        points: usize,
        hypothesis: Status,
    ) -> Self {
        MonotoneReport {
            property: property.to_string(),
            pass: min_margin >= -tolerance,
            min_margin,
            argmin,
            tolerance,
            points,
            hypothesis,
        }
    }
}
