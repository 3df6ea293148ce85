//! Runtime checks of the measure inequalities along a search tree.

use std::fmt;

/// Floating slack for comparisons involving logarithms.
pub const LOG_SLACK: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum AuditKind {
    /// Σ base^{μ(child)} ≤ base^{μ(parent)}.
    Measure,
    /// The polynomial progress measure must drop by at least one.
    Progress,
    /// (L, S, R) stopped being a valid separation.
    Separation,
    /// More progress on the large side when imbalanced.
    Balance,
    /// A returned count vector had a negative entry.
    Nonnegative,
}

#[derive(Clone, Debug, PartialEq)]
pub struct AuditViolation {
    pub kind: AuditKind,
    pub step: &'static str,
    pub detail: String,
}

impl fmt::Display for AuditViolation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?} violation at {}: {}", self.kind, self.step, self.detail)
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct AuditLog {
    /// Number of steps checked.
    pub steps: u64,
    pub violations: Vec<AuditViolation>,
    /// Observations that are reported but not treated as violations.
    pub notes: Vec<String>,
}

impl AuditLog {
    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn violate(&mut self, kind: AuditKind, step: &'static str, detail: String) {
        self.violations.push(AuditViolation { kind, step, detail });
    }

    pub fn note(&mut self, s: String) {
        self.notes.push(s);
    }

    /// Checks log_base Σ base^{μ_c} ≤ μ_p. Terminal children are passed as
    /// `None` and skipped.
    pub fn check_measure(&mut self, step: &'static str, base: f64, parent: f64, children: &[Option<f64>]) {
        self.steps += 1;
        let live: Vec<f64> = children.iter().flatten().copied().collect();
        if live.is_empty() {
            return;
        }
        let top = live.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let sum: f64 = live.iter().map(|m| base.powf(m - top)).sum();
        let lhs = top + sum.ln() / base.ln();
        if lhs > parent + LOG_SLACK {
            self.violate(
                AuditKind::Measure,
                step,
                format!("log_{base} sum = {lhs:.9} > parent {parent:.9} (children {live:?})"),
            );
        }
    }

    pub fn check_progress(&mut self, step: &'static str, before: f64, after: &[f64]) {
        for &a in after {
            if a > before - 1.0 + LOG_SLACK {
                self.violate(AuditKind::Progress, step, format!("progress measure {before} -> {a}"));
            }
        }
    }

    pub fn merge(&mut self, other: AuditLog) {
        self.steps += other.steps;
        self.violations.extend(other.violations);
        self.notes.extend(other.notes);
    }
}
