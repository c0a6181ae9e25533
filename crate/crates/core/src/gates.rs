//! Search-space limits for the exhaustive checks.
//!
//! Every brute-force routine refuses inputs whose search space exceeds its
//! limit. The limits can be lifted process-wide (the CLI's `--gate-override`).

use std::sync::atomic::{AtomicBool, Ordering};

use thiserror::Error;

/// `|X|` limit for the invertibility and strongness deciders.
pub const PRESERVER_ELEMENTS: u64 = 6;
/// `|X|` limit for the inverse-preservation check.
pub const INVERSE_ELEMENTS: u64 = 4;
/// Number of units / idempotent candidates scanned exhaustively.
pub const ENUMERATION: u64 = 1_000_000;
/// Number of matrices `q^{d^2}` a census may visit.
pub const CENSUS: u64 = 100_000_000;
/// Number of field elements `q^d` for the exhaustive lemma scans.
pub const LEMMA_ELEMENTS: u64 = 100_000;

static OVERRIDE: AtomicBool = AtomicBool::new(false);

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{op}: search space {size} exceeds the limit {limit} (use --gate-override to force)")]
pub struct GateError {
    pub op: &'static str,
    pub size: u128,
    pub limit: u64,
}

pub fn set_override(on: bool) {
    OVERRIDE.store(on, Ordering::Relaxed);
}

pub fn overridden() -> bool {
    OVERRIDE.load(Ordering::Relaxed)
}

pub fn check(op: &'static str, size: u128, limit: u64) -> Result<(), GateError> {
    if size > limit as u128 && !overridden() {
        Err(GateError { op, size, limit })
    } else {
        Ok(())
    }
}

/// `base^exp`, saturating.
pub fn pow(base: u64, exp: u64) -> u128 {
    let mut acc: u128 = 1;
    for _ in 0..exp {
        acc = acc.saturating_mul(base as u128);
    }
    acc
}
