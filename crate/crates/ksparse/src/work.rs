//! Thread-local multiply-add counter.
//!
//! Every sparse kernel in the crate reports the exact number of scalar
//! multiply-adds it performs. The counter is the machine-independent
//! instrument behind all `O(k)` cost assertions: tests measure deltas around
//! an operation instead of wall-clock time. It is per-thread and never
//! shared, so concurrent runs do not interfere.

use std::cell::Cell;

thread_local! {
    static MULTIPLY_ADDS: Cell<u64> = const { Cell::new(0) };
}

/// Resets this thread's counter to zero.
pub fn reset() {
    MULTIPLY_ADDS.with(|c| c.set(0));
}

/// Total multiply-adds recorded on this thread since the last [`reset`].
pub fn total() -> u64 {
    MULTIPLY_ADDS.with(|c| c.get())
}

/// Records `n` multiply-adds.
pub fn record(n: u64) {
    MULTIPLY_ADDS.with(|c| c.set(c.get() + n));
}

/// Runs `f` and returns its result together with the multiply-adds it cost.
pub fn metered<T>(f: impl FnOnce() -> T) -> (T, u64) {
    let before = total();
    let out = f();
    (out, total() - before)
}
