//! Verification reports: named checks, pass/fail outcomes and witnesses.
//!
//! Every verifier in this crate reports its result as a [`VerificationReport`]
//! holding one [`CheckResult`] per verified property. A failing check always
//! carries a [`Witness`]: the concrete input tuple at which the property
//! breaks, plus the derived values that exhibit the violation. Scans pick the
//! lexicographically smallest witness so reports are reproducible.

use serde::Serialize;
use std::fmt;

/// Concrete evidence for a failed check: named inputs and derived values.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Witness {
    /// Input tuple, e.g. `[("x", 0.0), ("y", 0.5), ("z", 1.0)]`.
    pub inputs: Vec<(String, f64)>,
    /// Derived quantities, e.g. `[("d(x,z)", 1.0), ("d(x,y)+d(y,z)", 0.5)]`.
    pub values: Vec<(String, f64)>,
}

impl Witness {
    pub fn new<I, V>(inputs: I, values: V) -> Self
    where
        I: IntoIterator<Item = (&'static str, f64)>,
        V: IntoIterator<Item = (String, f64)>,
    {
        Witness {
            inputs: inputs
                .into_iter()
                .map(|(k, v)| (k.to_string(), v))
                .collect(),
            values: values.into_iter().collect(),
        }
    }
}

impl fmt::Display for Witness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, v) in self.inputs.iter().chain(self.values.iter()) {
            if !first {
                write!(f, ", ")?;
            }
            write!(f, "{}={}", k, fmt_human(*v))?;
            first = false;
        }
        Ok(())
    }
}

/// Outcome of one named check inside a report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    /// Property name, e.g. `"triangle"` or `"zeta2"`.
    pub name: String,
    pub passed: bool,
    /// Number of tuples evaluated by the scan.
    pub checked: u64,
    /// Present iff `passed` is false.
    pub witness: Option<Witness>,
    /// Free-text detail (bounds used, diameters, caveats).
    pub note: Option<String>,
}

impl CheckResult {
    pub fn pass(name: impl Into<String>, checked: u64) -> Self {
        CheckResult {
            name: name.into(),
            passed: true,
            checked,
            witness: None,
            note: None,
        }
    }

    pub fn fail(name: impl Into<String>, checked: u64, witness: Witness) -> Self {
        CheckResult {
            name: name.into(),
            passed: false,
            checked,
            witness: Some(witness),
            note: None,
        }
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = Some(note.into());
        self
    }
}

/// A deterministic bundle of check results for one verified subject.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    /// What was verified, e.g. `"metric axioms: euclid"`.
    pub subject: String,
    pub checks: Vec<CheckResult>,
}

impl VerificationReport {
    pub fn new(subject: impl Into<String>) -> Self {
        VerificationReport {
            subject: subject.into(),
            checks: Vec::new(),
        }
    }

    pub fn push(&mut self, check: CheckResult) {
        self.checks.push(check);
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    /// First failing check, if any.
    pub fn first_failure(&self) -> Option<&CheckResult> {
        self.checks.iter().find(|c| !c.passed)
    }

    /// Stable JSON rendering used by machine-readable outputs.
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serialization cannot fail")
    }
}

impl fmt::Display for VerificationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{}", self.subject)?;
        for c in &self.checks {
            let verdict = if c.passed { "PASS" } else { "FAIL" };
            write!(f, "  {:<24} {}  ({} checked)", c.name, verdict, c.checked)?;
            if let Some(w) = &c.witness {
                write!(f, "  witness: {}", w)?;
            }
            if let Some(n) = &c.note {
                write!(f, "  [{}]", n)?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// 17 significant digits, for machine-readable files (round-trip fidelity).
pub fn fmt_machine(x: f64) -> String {
    format!("{:.16e}", x)
}

/// 6 significant digits, for human-facing tables.
pub fn fmt_human(x: f64) -> String {
    if x == 0.0 {
        "0".to_string()
    } else {
        format!("{:.5e}", x)
    }
}
