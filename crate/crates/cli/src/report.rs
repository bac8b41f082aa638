//! JSON reports and the status to exit-code map.

use fno_core::{FuzzyError, Status};
use serde::Serialize;
use serde_json::{json, Map, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Outcome {
    Ok,
    Verified,
    Found,
    Refuted,
    NotFound,
    NotDifferentiable,
    Empty,
    Infeasible,
    Inconclusive,
    NumericalFailure,
    InputError,
}

impl Outcome {
    pub fn exit_code(self) -> i32 {
        match self {
            Outcome::Ok | Outcome::Verified | Outcome::Found => 0,
            Outcome::Refuted | Outcome::NotFound | Outcome::NotDifferentiable | Outcome::Empty | Outcome::Infeasible => 1,
            Outcome::InputError => 2,
            Outcome::Inconclusive | Outcome::NumericalFailure => 3,
        }
    }
}

impl From<Status> for Outcome {
    fn from(s: Status) -> Self {
        match s {
            Status::Verified => Outcome::Verified,
            Status::Refuted => Outcome::Refuted,
            Status::Inconclusive => Outcome::Inconclusive,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct Report {
    pub command: &'static str,
    pub status: Outcome,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub value: Option<Value>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub certificate: Option<Value>,
    pub diagnostics: Map<String, Value>,
    pub seed: u64,
}

impl Report {
    pub fn new(command: &'static str, status: Outcome, seed: u64) -> Self {
        Self {
            command,
            status,
            value: None,
            certificate: None,
            diagnostics: Map::new(),
            seed,
        }
    }

    pub fn value(mut self, v: impl Serialize) -> Self {
        self.value = Some(to_value(v));
        self
    }

    pub fn certificate(mut self, c: impl Serialize) -> Self {
        self.certificate = Some(to_value(c));
        self
    }

    pub fn diag(mut self, key: &str, v: impl Serialize) -> Self {
        self.diagnostics.insert(key.to_string(), to_value(v));
        self
    }
}

fn to_value(v: impl Serialize) -> Value {
    serde_json::to_value(v).unwrap_or_else(|e| json!({ "serialization_error": e.to_string() }))
}

/// A command that stopped before producing its regular report.
#[derive(Debug)]
pub struct Failure {
    pub status: Outcome,
    pub kind: &'static str,
    pub message: String,
    pub details: Map<String, Value>,
}

impl Failure {
    pub fn input(kind: &'static str, message: String) -> Self {
        Self {
            status: Outcome::InputError,
            kind,
            message,
            details: Map::new(),
        }
    }

    pub fn into_report(self, command: &'static str, seed: u64) -> Report {
        let mut r = Report::new(command, self.status, seed)
            .diag("error", self.kind)
            .diag("message", &self.message);
        r.diagnostics.extend(self.details);
        r
    }
}

impl From<FuzzyError> for Failure {
    fn from(e: FuzzyError) -> Self {
        let message = e.to_string();
        let mut details = Map::new();
        let (status, kind) = match &e {
            FuzzyError::NotDifferentiable {
                coordinate,
                distance,
                right,
                left,
            } => {
                details.insert("coordinate".into(), to_value(coordinate));
                details.insert("distance".into(), to_value(distance));
                details.insert("right".into(), to_value(right));
                details.insert("left".into(), to_value(left));
                (Outcome::NotDifferentiable, "NotDifferentiable")
            }
            FuzzyError::InfeasiblePoint { constraint } => {
                details.insert("constraint".into(), to_value(constraint));
                (Outcome::Infeasible, "InfeasiblePoint")
            }
            FuzzyError::NoConvergence { last_change } => {
                details.insert("last_change".into(), to_value(last_change));
                (Outcome::NumericalFailure, "NoConvergence")
            }
            FuzzyError::NotRepresentable(_) => (Outcome::NumericalFailure, "NotRepresentable"),
            FuzzyError::MonotonicityViolation { .. } => (Outcome::NumericalFailure, "MonotonicityViolation"),
            FuzzyError::MaxIterations(_) => (Outcome::NumericalFailure, "MaxIterations"),
            FuzzyError::InvariantViolation(_) => (Outcome::NumericalFailure, "InvariantViolation"),
            FuzzyError::InvalidLevelSets { .. } => (Outcome::InputError, "InvalidLevelSets"),
            FuzzyError::GridMismatch => (Outcome::InputError, "GridMismatch"),
            FuzzyError::DimensionMismatch { .. } => (Outcome::InputError, "DimensionMismatch"),
            FuzzyError::IndexOutOfRange { .. } => (Outcome::InputError, "IndexOutOfRange"),
            FuzzyError::InvalidGrid(_) => (Outcome::InputError, "InvalidGrid"),
            FuzzyError::OrderViolation(_) => (Outcome::InputError, "OrderViolation"),
            FuzzyError::NonFinite { .. } => (Outcome::InputError, "NonFinite"),
            FuzzyError::Parse { .. } => (Outcome::InputError, "Parse"),
            FuzzyError::UnknownIdentifier { .. } => (Outcome::InputError, "UnknownIdentifier"),
            FuzzyError::DomainViolation { .. } => (Outcome::InputError, "DomainViolation"),
            FuzzyError::MissingDomain(_) => (Outcome::InputError, "MissingDomain"),
            FuzzyError::EmptySampleSet => (Outcome::InputError, "EmptySampleSet"),
            FuzzyError::NegativeMultiplier { .. } => (Outcome::InputError, "NegativeMultiplier"),
            FuzzyError::Precondition(_) => (Outcome::InputError, "Precondition"),
            FuzzyError::Csv(_) => (Outcome::InputError, "Csv"),
        };
        Self {
            status,
            kind,
            message,
            details,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exit_codes() {
        assert_eq!(Outcome::Verified.exit_code(), 0);
        assert_eq!(Outcome::NotFound.exit_code(), 1);
        assert_eq!(Outcome::InputError.exit_code(), 2);
        assert_eq!(Outcome::Inconclusive.exit_code(), 3);
    }

    #[test]
    fn numerical_failures_map_to_three() {
        let f = Failure::from(FuzzyError::NoConvergence { last_change: 1.0 });
        assert_eq!(f.status.exit_code(), 3);
        let f = Failure::from(FuzzyError::Parse {
            pos: 0,
            msg: "x".into(),
        });
        assert_eq!(f.status.exit_code(), 2);
    }
}
