//! Runs named checks, printing one PASS/FAIL line each with its runtime.

use std::panic::{catch_unwind, AssertUnwindSafe};
use std::time::{Duration, Instant};

#[derive(Debug, Default)]
pub struct Report {
    pub passed: usize,
    pub failed: usize,
}

impl Report {
    /// Runs `f`; it fails on `Err`, on panic, or when it takes longer than `budget`.
    pub fn check(&mut self, name: &str, budget: Duration, f: impl FnOnce() -> Result<String, String>) -> bool {
        let start = Instant::now();
        let outcome = catch_unwind(AssertUnwindSafe(f)).unwrap_or_else(|p| {
            Err(p
                .downcast_ref::<String>()
                .cloned()
                .or_else(|| p.downcast_ref::<&str>().map(|s| s.to_string()))
                .unwrap_or_else(|| "panicked".into()))
        });
        let elapsed = start.elapsed();
        let outcome = match outcome {
            Ok(_) if elapsed > budget => Err(format!("took {:.2} s, budget {:.0} s", elapsed.as_secs_f64(), budget.as_secs_f64())),
            other => other,
        };
        let ok = outcome.is_ok();
        let (tag, detail) = match outcome {
            Ok(d) => ("PASS", d),
            Err(d) => ("FAIL", d),
        };
        println!("{tag} {name:<11} {:>7.2} s  {detail}", elapsed.as_secs_f64());
        if ok {
            self.passed += 1;
        } else {
            self.failed += 1;
        }
        ok
    }
}

/// `Err(message)` unless `cond` holds.
pub fn ensure(cond: bool, message: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(message())
    }
}
