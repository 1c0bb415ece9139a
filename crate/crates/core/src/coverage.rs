//! Records which public operations ran, for the suite coverage check.
//!
//! Off by default; [`enable`] switches it on for the whole process.

use std::collections::BTreeSet;
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Mutex;

static ENABLED: AtomicBool = AtomicBool::new(false);
static SEEN: Mutex<BTreeSet<&'static str>> = Mutex::new(BTreeSet::new());

pub fn enable() {
    ENABLED.store(true, Ordering::SeqCst);
}

pub(crate) fn hit(op: &'static str) {
    if ENABLED.load(Ordering::Relaxed) {
        SEEN.lock().expect("coverage lock").insert(op);
    }
}

/// Operations recorded so far, sorted.
pub fn seen() -> Vec<&'static str> {
    SEEN.lock().expect("coverage lock").iter().copied().collect()
}
