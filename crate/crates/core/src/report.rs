use std::fmt;

/// One violated clause with a minimal witness.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    pub clause: String,
    pub witness: String,
}

/// Outcome of a checker. Empty `violations` means the subject passed every
/// clause in `clauses_checked` under `mode`.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ValidationReport {
    pub subject: String,
    /// How the check was carried out (exhaustive, sampled, symbolic, ...).
    pub mode: String,
    pub clauses_checked: Vec<String>,
    pub instances: u64,
    pub violations: Vec<Violation>,
    pub notes: Vec<String>,
}

impl ValidationReport {
    pub fn new(subject: impl Into<String>, mode: impl Into<String>) -> Self {
        ValidationReport { subject: subject.into(), mode: mode.into(), ..Default::default() }
    }

    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }

    pub fn clause(&mut self, name: impl Into<String>) {
        let name = name.into();
        if !self.clauses_checked.contains(&name) {
            self.clauses_checked.push(name);
        }
    }

    pub fn violate(&mut self, clause: impl Into<String>, witness: impl Into<String>) {
        self.violations.push(Violation { clause: clause.into(), witness: witness.into() });
    }

    pub fn note(&mut self, note: impl Into<String>) {
        self.notes.push(note.into());
    }

    pub fn violated(&self, clause: &str) -> bool {
        self.violations.iter().any(|v| v.clause == clause)
    }

    pub fn merge(&mut self, other: ValidationReport) {
        for c in other.clauses_checked {
            self.clause(c);
        }
        self.instances += other.instances;
        self.violations.extend(other.violations);
        self.notes.extend(other.notes);
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "subject: {}", self.subject)?;
        writeln!(f, "mode: {}", self.mode)?;
        writeln!(f, "clauses: {}", self.clauses_checked.join(","))?;
        writeln!(f, "instances: {}", self.instances)?;
        writeln!(f, "verdict: {}", if self.is_valid() { "pass" } else { "fail" })?;
        for v in &self.violations {
            writeln!(f, "violation: {} witness={}", v.clause, v.witness)?;
        }
        for n in &self.notes {
            writeln!(f, "note: {n}")?;
        }
        Ok(())
    }
}
