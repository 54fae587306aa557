//! Path reduction: compress label paths into direct pointers to the
//! self-loop pixel at the bottom of each steepest-descent path.

use std::sync::atomic::{AtomicBool, AtomicI32, AtomicU32};

use rayon::prelude::*;

use crate::grid::ORD;

/// Rate-limited pointer jumping. Each global iteration advances every
/// pixel's label up to `rr` links along a snapshot of the labels taken at
/// the iteration start, so one iteration multiplies the effective pointer
/// stride by `rr + 1`. The loop ends with the first iteration in which every
/// pixel verifies its label is a self-loop within its jump budget; that
/// iteration is included in the returned count.
pub(crate) fn reduce_paths_in(labels: &[AtomicU32], scratch: &[AtomicI32], rr: u32) -> usize {
    let n = labels.len();
    let mut iterations = 0usize;
    loop {
        iterations += 1;
        // labels round-trip exactly through the i32 scratch
        (0..n)
            .into_par_iter()
            .for_each(|p| scratch[p].store(labels[p].load(ORD) as i32, ORD));
        let done = AtomicBool::new(true);
        (0..n).into_par_iter().for_each(|p| {
            let mut l = scratch[p].load(ORD) as u32;
            for _ in 0..rr {
                let ll = scratch[l as usize].load(ORD) as u32;
                if ll == l {
                    break;
                }
                l = ll;
            }
            labels[p].store(l, ORD);
            if scratch[l as usize].load(ORD) as u32 != l {
                done.store(false, ORD);
            }
        });
        if done.load(ORD) {
            return iterations;
        }
    }
}

/// Free-running collapse: every pixel independently chases links to the
/// self-loop and writes that root, with no synchronization between pixels.
/// Concurrent writes only ever shortcut a path toward its own root, so the
/// result is the same for any interleaving.
pub(crate) fn collapse_paths_in(labels: &[AtomicU32]) {
    (0..labels.len()).into_par_iter().for_each(|p| {
        let mut l = labels[p].load(ORD);
        loop {
            let ll = labels[l as usize].load(ORD);
            if ll == l {
                break;
            }
            l = ll;
        }
        labels[p].store(l, ORD);
    });
}
