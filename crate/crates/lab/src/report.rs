use std::fmt;

/// One requirement instance and its outcome.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    /// The witness on success, the reason on failure.
    pub detail: String,
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Report {
    pub checks: Vec<Check>,
}

impl Report {
    pub fn check(&mut self, name: impl Into<String>, passed: bool, detail: impl Into<String>) {
        self.checks.push(Check { name: name.into(), passed, detail: detail.into() });
    }

    pub fn pass(&mut self, name: impl Into<String>, witness: impl Into<String>) {
        self.check(name, true, witness);
    }

    pub fn fail(&mut self, name: impl Into<String>, reason: impl Into<String>) {
        self.check(name, false, reason);
    }

    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

/// `CHECK <name> <PASS|FAIL> <witness-or-reason>`, one line per check. Names
/// never contain whitespace.
impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in &self.checks {
            let name: String = c.name.chars().map(|ch| if ch.is_whitespace() { '_' } else { ch }).collect();
            let detail = c.detail.replace('\n', " ");
            writeln!(f, "CHECK {name} {} {detail}", if c.passed { "PASS" } else { "FAIL" })?;
        }
        Ok(())
    }
}
