//! Plateau resolution: propagate labels inward from the boundaries of
//! non-minimal plateaux.
//!
//! Three strategies produce the work:
//!
//! * synchronous — one Jacobi sweep per global iteration, states double
//!   buffered so every update reads the previous iteration's states;
//! * tile-asynchronous — each tile iterates to local convergence against a
//!   frozen one-pixel boundary band, exchanging bands only at global
//!   iterations (fast, but plateau division may skew toward tile edges);
//! * balanced — tile-asynchronous execution that tracks the update distance
//!   of every plateau pixel as a negative state, converging to the same fair
//!   division as the synchronous strategy.

use std::sync::atomic::{AtomicBool, AtomicI32, AtomicU32};

use rayon::prelude::*;

use crate::grid::{GridImage, Intensity, Lattice, ORD};

/// Global Jacobi sweeps. Returns the number of sweeps executed, including
/// the final sweep that confirms the fixed point by changing nothing.
pub(crate) fn resolve_sync<T: Intensity>(
    img: &GridImage<T>,
    lat: &Lattice,
    states: &mut Vec<AtomicI32>,
    scratch: &mut Vec<AtomicI32>,
    labels: &[AtomicU32],
) -> usize {
    let n = img.len();
    let mut iterations = 0usize;
    loop {
        iterations += 1;
        let changed = AtomicBool::new(false);
        {
            let prev: &[AtomicI32] = states;
            let next: &[AtomicI32] = scratch;
            (0..n).into_par_iter().for_each(|p| {
                let s = prev[p].load(ORD);
                if s >= 2 {
                    let vp = img.get(p);
                    // ascending scan keeps the largest-index donor
                    let mut donor = usize::MAX;
                    lat.for_each_neighbor(p, |q| {
                        if prev[q].load(ORD) == 0 && img.get(q) == vp {
                            donor = q;
                        }
                    });
                    if donor != usize::MAX {
                        labels[p].store(donor as u32, ORD);
                        next[p].store(0, ORD);
                        changed.store(true, ORD);
                        return;
                    }
                }
                next[p].store(s, ORD);
            });
        }
        std::mem::swap(states, scratch);
        if !changed.load(ORD) {
            return iterations;
        }
    }
}

/// Tiled resolution driving either the asynchronous or the balanced update
/// rule. One global iteration processes every tile to local convergence and
/// then republishes states; `observer` (when present) sees the state array
/// after each global iteration.
pub(crate) fn resolve_tiled<T: Intensity>(
    img: &GridImage<T>,
    lat: &Lattice,
    states: &mut Vec<AtomicI32>,
    scratch: &mut Vec<AtomicI32>,
    labels: &[AtomicU32],
    tile_dims: &[usize],
    balanced: bool,
    mut observer: Option<&mut dyn FnMut(usize, &[i32])>,
) -> usize {
    let dims = lat.dims3();
    let ndim = lat.ndim();
    let mut t3 = [1usize; 3];
    t3[..ndim].copy_from_slice(tile_dims);
    let tcount = [
        dims[0].div_ceil(t3[0]),
        dims[1].div_ceil(t3[1]),
        dims[2].div_ceil(t3[2]),
    ];
    let total: usize = tcount.iter().product();

    let mut iterations = 0usize;
    loop {
        iterations += 1;
        let changed = AtomicBool::new(false);
        {
            let prev: &[AtomicI32] = states;
            let next: &[AtomicI32] = scratch;
            (0..total).into_par_iter().for_each(|t| {
                process_tile(img, lat, prev, next, labels, &t3, &tcount, t, balanced, &changed);
            });
        }
        std::mem::swap(states, scratch);
        if let Some(ref mut obs) = observer {
            let snap: Vec<i32> = states.iter().map(|v| v.load(ORD)).collect();
            obs(iterations, &snap);
        }
        if !changed.load(ORD) {
            return iterations;
        }
    }
}

/// Runs one tile to local convergence. The tile works on a private copy of
/// its pixel box extended by a one-pixel band; band values are frozen at the
/// last global synchronization point and only the tile interior is written
/// back. Within the tile, sweeps read the previous local sweep's states
/// (Jacobi), which keeps the result independent of pixel order.
#[allow(clippy::too_many_arguments)]
fn process_tile<T: Intensity>(
    img: &GridImage<T>,
    lat: &Lattice,
    prev_global: &[AtomicI32],
    next_global: &[AtomicI32],
    labels: &[AtomicU32],
    t3: &[usize; 3],
    tcount: &[usize; 3],
    t: usize,
    balanced: bool,
    changed: &AtomicBool,
) {
    let dims = lat.dims3();
    let gstr = lat.strides();
    let ndim = lat.ndim();

    let tc = [
        t / (tcount[1] * tcount[2]),
        (t / tcount[2]) % tcount[1],
        t % tcount[2],
    ];
    let mut lo = [0usize; 3];
    let mut hi = [0usize; 3];
    let mut blo = [0usize; 3];
    let mut le = [0usize; 3];
    for a in 0..3 {
        lo[a] = tc[a] * t3[a];
        hi[a] = (lo[a] + t3[a]).min(dims[a]);
        blo[a] = lo[a].saturating_sub(1);
        le[a] = (hi[a] + 1).min(dims[a]) - blo[a];
    }
    let lstr = [le[1] * le[2], le[2], 1usize];

    let mut prev = vec![0i32; le[0] * le[1] * le[2]];
    for c0 in blo[0]..blo[0] + le[0] {
        for c1 in blo[1]..blo[1] + le[1] {
            let grow = c0 * gstr[0] + c1 * gstr[1];
            let lrow = (c0 - blo[0]) * lstr[0] + (c1 - blo[1]) * lstr[1];
            for c2 in blo[2]..blo[2] + le[2] {
                prev[lrow + (c2 - blo[2])] = prev_global[grow + c2].load(ORD);
            }
        }
    }
    let mut next = prev.clone();

    // neighbor offsets of the local box, aligned index-for-index with the
    // global (ascending) ones
    let offs: Vec<(isize, isize, [i8; 3])> = lat
        .offsets()
        .iter()
        .map(|o| {
            let ldlin = o.delta[0] as isize * lstr[0] as isize
                + o.delta[1] as isize * lstr[1] as isize
                + o.delta[2] as isize * lstr[2] as isize;
            (ldlin, o.dlin, o.delta)
        })
        .collect();

    loop {
        let mut tile_changed = false;
        for c0 in lo[0]..hi[0] {
            for c1 in lo[1]..hi[1] {
                for c2 in lo[2]..hi[2] {
                    let gp = c0 * gstr[0] + c1 * gstr[1] + c2;
                    let lc = [c0 - blo[0], c1 - blo[1], c2 - blo[2]];
                    let lp = lc[0] * lstr[0] + lc[1] * lstr[1] + lc[2];
                    let s = prev[lp];
                    if s == 1 {
                        next[lp] = s;
                        continue;
                    }
                    let vp = img.get(gp);

                    if balanced {
                        // best donor: maximal state, then largest index
                        let mut best_s = i32::MIN;
                        let mut best_q = usize::MAX;
                        for &(ldlin, gdlin, delta) in &offs {
                            let mut in_box = true;
                            for a in 0..ndim {
                                let x = lc[a] as isize + delta[a] as isize;
                                if x < 0 || x >= le[a] as isize {
                                    in_box = false;
                                    break;
                                }
                            }
                            if !in_box {
                                continue;
                            }
                            let sq = prev[(lp as isize + ldlin) as usize];
                            if sq <= 0 && sq >= best_s {
                                let gq = (gp as isize + gdlin) as usize;
                                if img.get(gq) == vp {
                                    best_s = sq;
                                    best_q = gq;
                                }
                            }
                        }
                        if best_q != usize::MAX {
                            let cand = best_s - 1;
                            if s >= 2 || cand > s {
                                next[lp] = cand;
                                labels[gp].store(best_q as u32, ORD);
                                tile_changed = true;
                                changed.store(true, ORD);
                                continue;
                            }
                            if cand == s && best_q as u32 > labels[gp].load(ORD) {
                                // equal distance through a later donor: rebind
                                // the label so plateau parents are canonical;
                                // states are untouched, so this never forces
                                // an extra global iteration
                                next[lp] = s;
                                labels[gp].store(best_q as u32, ORD);
                                tile_changed = true;
                                continue;
                            }
                        }
                        next[lp] = s;
                    } else {
                        if s >= 2 {
                            let mut donor = usize::MAX;
                            for &(ldlin, gdlin, delta) in &offs {
                                let mut in_box = true;
                                for a in 0..ndim {
                                    let x = lc[a] as isize + delta[a] as isize;
                                    if x < 0 || x >= le[a] as isize {
                                        in_box = false;
                                        break;
                                    }
                                }
                                if !in_box {
                                    continue;
                                }
                                if prev[(lp as isize + ldlin) as usize] == 0 {
                                    let gq = (gp as isize + gdlin) as usize;
                                    if img.get(gq) == vp {
                                        donor = gq;
                                    }
                                }
                            }
                            if donor != usize::MAX {
                                next[lp] = 0;
                                labels[gp].store(donor as u32, ORD);
                                tile_changed = true;
                                changed.store(true, ORD);
                                continue;
                            }
                        }
                        next[lp] = s;
                    }
                }
            }
        }
        if !tile_changed {
            break;
        }
        std::mem::swap(&mut prev, &mut next);
    }

    // publish the converged interior; every pixel belongs to exactly one tile
    for c0 in lo[0]..hi[0] {
        for c1 in lo[1]..hi[1] {
            let grow = c0 * gstr[0] + c1 * gstr[1];
            let lrow = (c0 - blo[0]) * lstr[0] + (c1 - blo[1]) * lstr[1];
            for c2 in lo[2]..hi[2] {
                next_global[grow + c2].store(prev[lrow + (c2 - blo[2])], ORD);
            }
        }
    }
}
