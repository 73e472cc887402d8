use std::fmt;

/// Outcome of one named numerical check.
#[derive(Clone, Debug, PartialEq)]
pub struct Check {
    pub name: &'static str,
    /// Residual (or, for lower-bound checks, the measured quantity).
    pub value: f64,
    pub tol: f64,
    pub passed: bool,
}

impl Check {
    /// Passes iff `value <= tol`. NaN never passes.
    pub fn at_most(name: &'static str, value: f64, tol: f64) -> Self {
        Check { name, value, tol, passed: value <= tol }
    }

    /// Passes iff `value > tol`.
    pub fn above(name: &'static str, value: f64, tol: f64) -> Self {
        Check { name, value, tol, passed: value > tol }
    }
}

/// A list of checks; passes iff every check does.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Report {
    pub checks: Vec<Check>,
}

impl Report {
    pub fn new(checks: Vec<Check>) -> Self {
        Report { checks }
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn first_failure(&self) -> Option<&Check> {
        self.checks.iter().find(|c| !c.passed)
    }

    pub fn get(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }

    /// Largest value over all checks.
    pub fn max_value(&self) -> f64 {
        self.checks.iter().map(|c| c.value).fold(0.0, crate::exec::f64_max)
    }

    pub fn extend(&mut self, other: Report) {
        self.checks.extend(other.checks);
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            writeln!(
                f,
                "{:<16} {:<4} value={:.3e} tol={:.1e}",
                c.name,
                if c.passed { "PASS" } else { "FAIL" },
                c.value,
                c.tol
            )?;
        }
        Ok(())
    }
}
