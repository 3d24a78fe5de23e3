//! Outcomes of verification checks.

use serde::{Deserialize, Deserializer, Serialize, Serializer};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CheckStatus {
    Pass,
    Fail,
    /// The check exhibited the violation it was designed to find.
    Witness,
}

impl CheckStatus {
    pub fn is_failure(self) -> bool {
        self == CheckStatus::Fail
    }
}

impl std::fmt::Display for CheckStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            CheckStatus::Pass => "pass",
            CheckStatus::Fail => "fail",
            CheckStatus::Witness => "witness",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Expectation {
    /// `value ≤ bound`.
    AtMost,
    /// `value > bound`.
    Exceeds,
    /// Reported only.
    Info,
}

fn exp_string<S: Serializer>(x: &f64, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(&format!("{x:e}"))
}

fn parse_exp_string<'de, D: Deserializer<'de>>(d: D) -> Result<f64, D::Error> {
    let text = String::deserialize(d)?;
    text.parse().map_err(serde::de::Error::custom)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Residual {
    pub label: String,
    #[serde(serialize_with = "exp_string", deserialize_with = "parse_exp_string")]
    pub value: f64,
    #[serde(serialize_with = "exp_string", deserialize_with = "parse_exp_string")]
    pub bound: f64,
    pub expect: Expectation,
}

impl Residual {
    pub fn at_most(label: impl Into<String>, value: f64, bound: f64) -> Self {
        Residual {
            label: label.into(),
            value,
            bound,
            expect: Expectation::AtMost,
        }
    }

    pub fn exceeds(label: impl Into<String>, value: f64, bound: f64) -> Self {
        Residual {
            label: label.into(),
            value,
            bound,
            expect: Expectation::Exceeds,
        }
    }

    pub fn info(label: impl Into<String>, value: f64) -> Self {
        Residual {
            label: label.into(),
            value,
            bound: 0.0,
            expect: Expectation::Info,
        }
    }

    pub fn holds(&self) -> bool {
        match self.expect {
            Expectation::AtMost => self.value <= self.bound,
            Expectation::Exceeds => self.value > self.bound,
            Expectation::Info => true,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckOutcome {
    pub name: String,
    pub status: CheckStatus,
    pub residuals: Vec<Residual>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl CheckOutcome {
    pub fn new(name: impl Into<String>) -> Self {
        CheckOutcome {
            name: name.into(),
            status: CheckStatus::Pass,
            residuals: Vec::new(),
            witness: None,
            notes: Vec::new(),
        }
    }

    pub fn push(&mut self, r: Residual) {
        self.residuals.push(r);
    }

    pub fn note(&mut self, note: impl Into<String>) {
        self.notes.push(note.into());
    }

    /// Sets the status from the residuals. An outcome without any bounded
    /// residual fails, so a check never passes vacuously.
    pub fn finish(mut self, witness_check: bool) -> Self {
        let bounded = self.residuals.iter().any(|r| r.expect != Expectation::Info);
        self.status = if !bounded || self.residuals.iter().any(|r| !r.holds()) {
            if !bounded {
                self.notes.push("no bounded residual was evaluated".into());
            }
            CheckStatus::Fail
        } else if witness_check {
            CheckStatus::Witness
        } else {
            CheckStatus::Pass
        };
        self
    }

    pub fn failed(&self) -> bool {
        self.status.is_failure()
    }

    /// Largest residual with the given expectation.
    pub fn max_value(&self, expect: Expectation) -> Option<f64> {
        self.residuals
            .iter()
            .filter(|r| r.expect == expect)
            .map(|r| r.value)
            .reduce(f64::max)
    }

    /// Smallest residual with the given expectation.
    pub fn min_value(&self, expect: Expectation) -> Option<f64> {
        self.residuals
            .iter()
            .filter(|r| r.expect == expect)
            .map(|r| r.value)
            .reduce(f64::min)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn status_from_residuals() {
        let mut c = CheckOutcome::new("x");
        c.push(Residual::at_most("a", 1e-13, 1e-12));
        assert_eq!(c.clone().finish(false).status, CheckStatus::Pass);
        assert_eq!(c.clone().finish(true).status, CheckStatus::Witness);
        c.push(Residual::exceeds("b", 0.05, 0.1));
        assert_eq!(c.finish(false).status, CheckStatus::Fail);
    }

    #[test]
    fn empty_outcome_fails() {
        let mut c = CheckOutcome::new("x");
        c.push(Residual::info("i", 3.0));
        let c = c.finish(false);
        assert!(c.failed());
        assert_eq!(c.notes.len(), 1);
    }

    #[test]
    fn exponent_strings_round_trip() {
        for x in [1.25e-13, 0.1 + 0.2, std::f64::consts::PI, 0.0, 7e300] {
            assert_eq!(format!("{x:e}").parse::<f64>().unwrap(), x);
        }
    }
}
