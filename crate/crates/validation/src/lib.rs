//! Bookkeeping for the acceptance run: each criterion yields one line,
//! `PASS` or `FAIL`, followed by its name and the measured values.

use std::time::Instant;

#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub name: String,
    pub pass: bool,
    pub detail: String,
    pub seconds: f64,
}

impl Outcome {
    pub fn line(&self) -> String {
        format!(
            "{} {} ({:.1}s): {}",
            if self.pass { "PASS" } else { "FAIL" },
            self.name,
            self.seconds,
            self.detail
        )
    }
}

#[derive(Debug, Default)]
pub struct Ledger {
    pub outcomes: Vec<Outcome>,
}

impl Ledger {
    /// Runs `check`, prints its line immediately and records it. An `Err`
    /// counts as a failure with the error text as detail.
    pub fn run<F>(&mut self, name: &str, check: F)
    where
        F: FnOnce() -> Result<(bool, String), String>,
    {
        let start = Instant::now();
        let (pass, detail) = match check() {
            Ok(r) => r,
            Err(e) => (false, format!("error: {e}")),
        };
        let o = Outcome { name: name.to_string(), pass, detail, seconds: start.elapsed().as_secs_f64() };
        println!("{}", o.line());
        self.outcomes.push(o);
    }

    pub fn failures(&self) -> usize {
        self.outcomes.iter().filter(|o| !o.pass).count()
    }

    pub fn summary(&self) -> String {
        format!("{} criteria, {} passed, {} failed", self.outcomes.len(), self.outcomes.len() - self.failures(), self.failures())
    }
}
