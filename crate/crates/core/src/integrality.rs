//! Process-wide tallies of exact-division and half-power checks.
//!
//! Every place that divides an exact quantity, or takes `q^{e/2}`, goes
//! through [`check`]. The counters let long verification runs report how many
//! guards were exercised and whether any of them tripped.

use std::sync::atomic::{AtomicU64, Ordering};

use crate::error::{Error, Result};

static CHECKS: AtomicU64 = AtomicU64::new(0);
static FAILURES: AtomicU64 = AtomicU64::new(0);

/// Records one integrality check. Returns `NonIntegral` with `what()` when `ok` is false.
pub fn check(ok: bool, what: impl FnOnce() -> String) -> Result<()> {
    CHECKS.fetch_add(1, Ordering::Relaxed);
    if ok {
        Ok(())
    } else {
        FAILURES.fetch_add(1, Ordering::Relaxed);
        Err(Error::NonIntegral(what()))
    }
}

pub fn checks() -> u64 {
    CHECKS.load(Ordering::Relaxed)
}

pub fn failures() -> u64 {
    FAILURES.load(Ordering::Relaxed)
}
