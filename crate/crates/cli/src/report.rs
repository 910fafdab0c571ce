//! Line-oriented run reports: one `key: value` per line, wall time last.

use std::fmt::Display;
use std::io::{self, Write};
use std::time::Instant;

use atomlab_core::{Budget, ValidationReport};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Status {
    Conclusive,
    /// A search budget ran out.
    Inconclusive,
}

impl Status {
    pub fn exit_code(self) -> i32 {
        match self {
            Status::Conclusive => 0,
            Status::Inconclusive => 2,
        }
    }
}

pub struct Report {
    lines: Vec<String>,
    pub status: Status,
    start: Instant,
}

impl Report {
    pub fn new(argv: &[String], seed: u64) -> Self {
        let mut r = Report { lines: Vec::new(), status: Status::Conclusive, start: Instant::now() };
        let args: Vec<String> = argv.iter().skip(1).map(|a| quote(a)).collect();
        r.line("command", format!("atomlab {}", args.join(" ")).trim_end());
        r.line("seed", seed);
        r
    }

    pub fn line(&mut self, key: &str, value: impl Display) {
        self.lines.push(format!("{key}: {value}"));
    }

    /// Marks the run inconclusive and discloses the budget that ran out.
    pub fn inconclusive(&mut self, budget: &Budget) {
        self.status = Status::Inconclusive;
        self.line("verdict", "inconclusive");
        self.line("budget-exhausted", budget.describe());
    }

    pub fn validation(&mut self, v: &ValidationReport) {
        for l in v.to_string().lines() {
            self.lines.push(l.to_string());
        }
    }

    pub fn emit(&self, out: &mut impl Write) -> io::Result<()> {
        for l in &self.lines {
            writeln!(out, "{l}")?;
        }
        writeln!(out, "wall: {}ms", self.start.elapsed().as_millis())
    }
}

fn quote(arg: &str) -> String {
    if arg.is_empty() || arg.chars().any(|c| c.is_whitespace() || c == '\'') {
        format!("'{}'", arg.replace('\'', "'\\''"))
    } else {
        arg.to_string()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn wall_time_is_the_last_line() {
        let argv: Vec<String> = ["atomlab", "ramsey", "x y"].iter().map(|s| s.to_string()).collect();
        let mut r = Report::new(&argv, 3);
        r.line("verdict", true);
        let mut out = Vec::new();
        r.emit(&mut out).unwrap();
        let text = String::from_utf8(out).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "command: atomlab ramsey 'x y'");
        assert_eq!(lines[1], "seed: 3");
        assert_eq!(lines[2], "verdict: true");
        assert!(lines[3].starts_with("wall: "));
    }

    #[test]
    fn inconclusive_discloses_budget() {
        let mut r = Report::new(&["atomlab".to_string()], 0);
        r.inconclusive(&Budget::nodes(5));
        assert_eq!(r.status.exit_code(), 2);
        assert!(r.lines.iter().any(|l| l == "budget-exhausted: nodes=5 time=unlimited"));
    }
}
