//! Outcome of a sample-based verification.

use serde::Serialize;

use crate::levelsets::OrderWitness;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Status {
    Verified,
    Refuted,
    Inconclusive,
}

/// Sample at which a check failed or could not be decided.
///
/// `violation` is the endpoint inequality `lhs <= rhs` that fails there;
/// it is absent for inconclusive probes and for metric-based checks.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Witness {
    pub point: Vec<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub other: Option<Vec<f64>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub violation: Option<OrderWitness>,
}

impl Witness {
    pub fn at(point: Vec<f64>) -> Self {
        Self {
            point,
            other: None,
            lambda: None,
            violation: None,
        }
    }

    pub fn with_violation(mut self, v: OrderWitness) -> Self {
        self.violation = Some(v);
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Certificate {
    pub status: Status,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
    pub samples_used: usize,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl Certificate {
    pub fn verified(samples_used: usize) -> Self {
        Self {
            status: Status::Verified,
            witness: None,
            samples_used,
            notes: Vec::new(),
        }
    }

    pub fn refuted(witness: Witness, samples_used: usize) -> Self {
        Self {
            status: Status::Refuted,
            witness: Some(witness),
            samples_used,
            notes: Vec::new(),
        }
    }

    pub fn inconclusive(witness: Witness, samples_used: usize, note: impl Into<String>) -> Self {
        Self {
            status: Status::Inconclusive,
            witness: Some(witness),
            samples_used,
            notes: vec![note.into()],
        }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.notes.push(note.into());
        self
    }

    pub fn is_verified(&self) -> bool {
        self.status == Status::Verified
    }

    pub fn is_refuted(&self) -> bool {
        self.status == Status::Refuted
    }
}
