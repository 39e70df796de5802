//! Constant estimates with their sampling metadata, and pass/fail checks.

use serde::{Deserialize, Serialize};

/// A nonnegative ratio that may be infinite (the relative-distance convention
/// for sets of zero diameter, or an unbounded search).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Ratio {
    Finite(f64),
    Infinite,
}

impl Ratio {
    pub fn from_f64(v: f64) -> Self {
        if v.is_finite() {
            Ratio::Finite(v)
        } else {
            Ratio::Infinite
        }
    }

    pub fn finite(self) -> Option<f64> {
        match self {
            Ratio::Finite(v) => Some(v),
            Ratio::Infinite => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Ratio::Infinite)
    }

    /// Ordering where `Infinite` is larger than every finite value.
    pub fn min(self, other: Ratio) -> Ratio {
        match (self, other) {
            (Ratio::Finite(a), Ratio::Finite(b)) => Ratio::Finite(a.min(b)),
            (Ratio::Infinite, x) | (x, Ratio::Infinite) => x,
        }
    }

    pub fn max(self, other: Ratio) -> Ratio {
        match (self, other) {
            (Ratio::Finite(a), Ratio::Finite(b)) => Ratio::Finite(a.max(b)),
            _ => Ratio::Infinite,
        }
    }
}

impl std::fmt::Display for Ratio {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Ratio::Finite(v) => write!(f, "{v}"),
            Ratio::Infinite => f.write_str("inf"),
        }
    }
}

/// A named geometric constant estimate.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConstantReport {
    pub name: String,
    pub value: Ratio,
    /// Whether a bounded search reached its cap (the estimator's "fail" signal).
    pub capped: bool,
    /// Samples that contributed to `value`.
    pub samples: usize,
    /// Samples drawn but rejected (below resolution, empty sets).
    pub skipped: usize,
    pub seed: u64,
    pub r_min: f64,
    pub r_max: f64,
    /// Name of the geometric condition the value instantiates.
    pub reference: String,
    /// Discretization slack factor applied when comparing with target constants.
    pub slack: f64,
    /// Mesh pitch of the analysed space.
    pub resolution: f64,
    /// Auxiliary scalar outputs (fitted slopes, attained diameters, ...).
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub extra: Vec<(String, f64)>,
}

impl ConstantReport {
    pub fn new(name: impl Into<String>, reference: impl Into<String>, value: Ratio) -> Self {
        ConstantReport {
            name: name.into(),
            value,
            capped: false,
            samples: 1,
            skipped: 0,
            seed: 0,
            r_min: 0.0,
            r_max: 0.0,
            reference: reference.into(),
            slack: 1.0,
            resolution: 0.0,
            extra: Vec::new(),
        }
    }

    /// Looks up an auxiliary output by name.
    pub fn extra(&self, key: &str) -> Option<f64> {
        self.extra.iter().find(|(k, _)| k == key).map(|&(_, v)| v)
    }
}

/// Outcome of an exact pass/fail check over a finite family of cases.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub name: String,
    /// Name of the geometric statement being checked.
    pub reference: String,
    pub pass: bool,
    /// Cases examined.
    pub checked: usize,
    /// Cases excluded by the statement's hypotheses.
    pub skipped: usize,
    /// Vertices of a failing (or extremal) case.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub witness: Vec<u32>,
    /// Attained values (tightest ratios, counts, constants).
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub values: Vec<(String, f64)>,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub note: String,
}

impl CheckReport {
    pub fn new(name: impl Into<String>, reference: impl Into<String>) -> Self {
        CheckReport {
            name: name.into(),
            reference: reference.into(),
            pass: true,
            checked: 0,
            skipped: 0,
            witness: Vec::new(),
            values: Vec::new(),
            note: String::new(),
        }
    }

    /// Records a failure with its witness (the first failure is kept).
    pub fn fail(&mut self, witness: &[u32], note: impl Into<String>) {
        if self.pass {
            self.pass = false;
            self.witness = witness.to_vec();
            self.note = note.into();
        }
    }

    pub fn value(&self, key: &str) -> Option<f64> {
        self.values.iter().find(|(k, _)| k == key).map(|&(_, v)| v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn infinite_sentinel_orders_last() {
        assert_eq!(Ratio::Infinite.min(Ratio::Finite(2.0)), Ratio::Finite(2.0));
        assert_eq!(Ratio::Finite(1.0).max(Ratio::Infinite), Ratio::Infinite);
        assert_eq!(Ratio::from_f64(f64::INFINITY), Ratio::Infinite);
        let json = serde_json::to_string(&Ratio::Infinite).unwrap();
        assert_eq!(json, "\"infinite\"");
    }
}
