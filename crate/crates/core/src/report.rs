//! Named numeric checks and their one-line rendering.

use std::fmt;

use serde::{Deserialize, Serialize};

/// One verification line: `name expected computed tolerance PASS|FAIL`.
///
/// Qualitative checks (a sign, an empty violation list) carry `expected = None` and report
/// whatever quantity was measured in `computed`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub expected: Option<f64>,
    pub computed: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl Check {
    /// `|computed − expected| ≤ tolerance`.
    pub fn close(name: impl Into<String>, expected: f64, computed: f64, tolerance: f64) -> Self {
        let pass = (computed - expected).abs() <= tolerance;
        Check { name: name.into(), expected: Some(expected), computed, tolerance, pass }
    }

    /// A boolean condition with the measured quantity attached for the record.
    pub fn holds(name: impl Into<String>, pass: bool, computed: f64) -> Self {
        Check { name: name.into(), expected: None, computed, tolerance: 0.0, pass }
    }

    pub fn status(&self) -> &'static str {
        if self.pass {
            "PASS"
        } else {
            "FAIL"
        }
    }

    pub fn diff(&self) -> Option<f64> {
        self.expected.map(|e| (self.computed - e).abs())
    }
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.expected {
            Some(e) => write!(
                f,
                "{} expected={} computed={} |diff|={:.3e} tol={:.1e} {}",
                self.name,
                e,
                self.computed,
                (self.computed - e).abs(),
                self.tolerance,
                self.status()
            ),
            None => write!(f, "{} computed={} {}", self.name, self.computed, self.status()),
        }
    }
}

pub fn all_pass(checks: &[Check]) -> bool {
    checks.iter().all(|c| c.pass)
}
