use serde::{Deserialize, Serialize};

/// Outcome of one extensional check: how many samples were tried, the worst
/// deviation seen, and whether it stayed within tolerance.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub check: String,
    pub samples: usize,
    pub worst_deviation: f64,
    pub pass: bool,
    /// Short statement of the property being checked.
    pub anchor: String,
    /// For representation checks: whether every sampled map was the identity.
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub trivial: Option<bool>,
}

impl VerificationReport {
    pub fn new(check: impl Into<String>, anchor: impl Into<String>) -> Self {
        Self {
            check: check.into(),
            samples: 0,
            worst_deviation: 0.0,
            pass: true,
            anchor: anchor.into(),
            trivial: None,
        }
    }

    /// Records one sample's deviation.
    pub fn record(&mut self, deviation: f64) {
        self.samples += 1;
        if deviation.is_nan() || deviation > self.worst_deviation {
            self.worst_deviation = deviation;
        }
    }

    /// Records a yes/no sample: a failure counts as deviation `1`.
    pub fn record_bool(&mut self, ok: bool) {
        self.record(if ok { 0.0 } else { 1.0 });
    }

    /// Sets `pass` from the worst deviation.
    pub fn finish(mut self, tol: f64) -> Self {
        self.pass = self.worst_deviation <= tol && !self.worst_deviation.is_nan();
        self
    }

    /// Folds another report for the same check into this one.
    pub fn merge(&mut self, other: &VerificationReport) {
        self.samples += other.samples;
        if other.worst_deviation.is_nan() || other.worst_deviation > self.worst_deviation {
            self.worst_deviation = other.worst_deviation;
        }
        self.pass &= other.pass;
    }
}
