//! Accounting for full-size per-pixel working buffers.
//!
//! The hierarchical driver is required to reuse one set of working arrays
//! (image copy, labels, states, state buffer) across all layers instead of
//! allocating per layer. Each allocation of such a buffer bumps a global
//! counter so tests can assert the reuse contract.

use std::sync::atomic::{AtomicU64, Ordering};

static PIXEL_BUFFERS: AtomicU64 = AtomicU64::new(0);

pub(crate) fn note_pixel_buffer() {
    PIXEL_BUFFERS.fetch_add(1, Ordering::Relaxed);
}

/// Total number of per-pixel working buffers allocated by this process so
/// far. Layer outputs copied out to the caller are not counted; only the
/// internal working arrays are.
pub fn pixel_buffer_allocations() -> u64 {
    PIXEL_BUFFERS.load(Ordering::Relaxed)
}
