//! Search budgets. Exhausting one yields an inconclusive verdict, never a
//! guessed answer.

use std::sync::atomic::{AtomicU64, Ordering};
use std::time::{Duration, Instant};

/// Environment variable holding a global wall-clock budget in milliseconds.
pub const BUDGET_ENV: &str = "ATOMLAB_BUDGET_MS";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct Budget {
    /// Maximum number of search nodes.
    pub max_nodes: Option<u64>,
    pub max_time: Option<Duration>,
}

impl Budget {
    pub fn unlimited() -> Self {
        Budget::default()
    }

    pub fn nodes(n: u64) -> Self {
        Budget { max_nodes: Some(n), max_time: None }
    }

    /// Adds the wall-clock limit from [`BUDGET_ENV`] when it is set.
    pub fn with_env(mut self) -> Self {
        if let Some(ms) = std::env::var(BUDGET_ENV).ok().and_then(|v| v.parse::<u64>().ok()) {
            self.max_time = Some(Duration::from_millis(ms));
        }
        self
    }

    pub fn describe(&self) -> String {
        let nodes = self.max_nodes.map_or("unlimited".to_string(), |n| n.to_string());
        let time = self.max_time.map_or("unlimited".to_string(), |t| format!("{}ms", t.as_millis()));
        format!("nodes={nodes} time={time}")
    }

    pub fn meter(&self) -> Meter {
        Meter { budget: *self, start: Instant::now(), used: AtomicU64::new(0) }
    }
}

/// Shared counter charged by a running search.
#[derive(Debug)]
pub struct Meter {
    budget: Budget,
    start: Instant,
    used: AtomicU64,
}

impl Meter {
    /// Charges one node; returns `false` once the budget is exhausted.
    pub fn tick(&self) -> bool {
        let used = self.used.fetch_add(1, Ordering::Relaxed) + 1;
        if self.budget.max_nodes.is_some_and(|m| used > m) {
            return false;
        }
        if let Some(t) = self.budget.max_time {
            // checking the clock on every node is measurable; sample it
            if used.is_multiple_of(64) && self.start.elapsed() > t {
                return false;
            }
        }
        true
    }

    pub fn exhausted(&self) -> bool {
        let used = self.used.load(Ordering::Relaxed);
        self.budget.max_nodes.is_some_and(|m| used > m)
            || self.budget.max_time.is_some_and(|t| self.start.elapsed() > t)
    }

    pub fn used(&self) -> u64 {
        self.used.load(Ordering::Relaxed)
    }

    pub fn budget(&self) -> Budget {
        self.budget
    }
}
