use serde::{Deserialize, Serialize};

const MAX_RECORDED: usize = 16;

/// One named check and what went wrong with it.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub failures: Vec<String>,
    #[serde(default, skip_serializing_if = "is_zero")]
    pub suppressed: usize,
}

fn is_zero(x: &usize) -> bool {
    *x == 0
}

/// Outcome of a validator: checks in the order they were first touched.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Report {
    pub checks: Vec<Check>,
}

impl Report {
    pub fn new() -> Self {
        Self::default()
    }

    fn entry(&mut self, name: &str) -> &mut Check {
        if let Some(i) = self.checks.iter().position(|c| c.name == name) {
            return &mut self.checks[i];
        }
        self.checks.push(Check { name: name.to_string(), passed: true, failures: Vec::new(), suppressed: 0 });
        self.checks.last_mut().unwrap()
    }

    /// Registers a check so it shows up as passed unless a failure follows.
    pub fn pass(&mut self, name: &str) {
        self.entry(name);
    }

    pub fn fail(&mut self, name: &str, detail: impl Into<String>) {
        let c = self.entry(name);
        c.passed = false;
        if c.failures.len() < MAX_RECORDED {
            c.failures.push(detail.into());
        } else {
            c.suppressed += 1;
        }
    }

    pub fn check(&mut self, name: &str, ok: bool, detail: impl FnOnce() -> String) {
        if ok {
            self.pass(name);
        } else {
            self.fail(name, detail());
        }
    }

    pub fn merge(&mut self, other: Report) {
        for c in other.checks {
            let e = self.entry(&c.name);
            e.passed &= c.passed;
            for f in c.failures {
                if e.failures.len() < MAX_RECORDED {
                    e.failures.push(f);
                } else {
                    e.suppressed += 1;
                }
            }
            e.suppressed += c.suppressed;
        }
    }

    pub fn is_ok(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failed(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.passed)
    }

    pub fn get(&self, name: &str) -> Option<&Check> {
        self.checks.iter().find(|c| c.name == name)
    }
}
