//! Minimal-plateau merging: a minimal plateau can carry several self-loop
//! pixels in 2D/3D, so adjacent plateau pixels with different representatives
//! are merged until each catchment basin has a single label.

use std::sync::atomic::{AtomicBool, AtomicI32, AtomicU32};

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::{Lattice, ORD};
use crate::unionfind::{find_raw, union_raw};

/// Union–find merge: unions every adjacent minimal-plateau pair over the
/// half neighborhood, then flattens every pixel to its set representative.
pub(crate) fn merge_union_find(lat: &Lattice, states: &[AtomicI32], labels: &[AtomicU32]) {
    let n = labels.len();
    (0..n).into_par_iter().for_each(|p| {
        if states[p].load(ORD) >= 2 {
            lat.for_each_neighbor_after(p, |q| {
                if states[q].load(ORD) >= 2 {
                    union_raw(labels, p as u32, q as u32);
                }
            });
        }
    });
    (0..n).into_par_iter().for_each(|p| {
        labels[p].store(find_raw(labels, p as u32), ORD);
    });
}

/// Iterative min-merge: repeatedly lowers the representatives of adjacent
/// minimal-plateau pixels to their minimum and re-reduces all label paths,
/// until a full pass changes nothing. Every write is an atomic minimum, so
/// label values decrease monotonically and the fixed point is the same as
/// the union–find merge.
pub(crate) fn merge_relax(lat: &Lattice, states: &[AtomicI32], labels: &[AtomicU32]) -> Result<usize> {
    let n = labels.len();
    let mut outer = 0usize;
    loop {
        outer += 1;
        if outer > n + 1 {
            return Err(Error::Internal(
                "minimal-plateau merge exceeded its iteration cap".into(),
            ));
        }
        let changed = AtomicBool::new(false);
        (0..n).into_par_iter().for_each(|p| {
            if states[p].load(ORD) >= 2 {
                lat.for_each_neighbor_after(p, |q| {
                    if states[q].load(ORD) < 2 {
                        return;
                    }
                    let lp = labels[p].load(ORD) as usize;
                    let lq = labels[q].load(ORD) as usize;
                    loop {
                        let vlp = labels[lp].load(ORD);
                        let vlq = labels[lq].load(ORD);
                        if vlp == vlq {
                            break;
                        }
                        let m = vlp.min(vlq);
                        if labels[lp].fetch_min(m, ORD) > m {
                            changed.store(true, ORD);
                        }
                        if labels[lq].fetch_min(m, ORD) > m {
                            changed.store(true, ORD);
                        }
                    }
                });
            }
            loop {
                let l = labels[p].load(ORD);
                let ll = labels[l as usize].load(ORD);
                if ll == l {
                    break;
                }
                if labels[p].fetch_min(ll, ORD) > ll {
                    changed.store(true, ORD);
                }
            }
        });
        if !changed.load(ORD) {
            return Ok(outer);
        }
    }
}
