//! Initialization sweep: classify every pixel and seed its label from the
//! direction of steepest descent.

use std::sync::atomic::{AtomicI32, AtomicU32};

use rayon::prelude::*;

use crate::grid::{steepest_in, GridImage, Intensity, Lattice, ORD};

/// State/label classification of a single pixel.
///
/// With `q` the lowest neighbor (largest index among equal minima):
/// lower `q` descends toward it (state 0); a strictly higher `q` marks a
/// singleton minimum (state 1); an equal `q` after `p` points forward along
/// the plateau (state 2); an equal `q` before `p` forms a self-loop
/// (state 3). A single-pixel image has no neighborhood and degenerates to a
/// state-1 basin.
#[inline]
pub(crate) fn classify<T: Intensity>(img: &GridImage<T>, lat: &Lattice, p: usize) -> (i32, u32) {
    match steepest_in(p, img, lat) {
        None => (1, p as u32),
        Some(q) => {
            let (vp, vq) = (img.get(p), img.get(q));
            if vq < vp {
                (0, q as u32)
            } else if vq > vp {
                (1, p as u32)
            } else if q > p {
                (2, q as u32)
            } else {
                (3, p as u32)
            }
        }
    }
}

pub(crate) fn initialize<T: Intensity>(
    img: &GridImage<T>,
    lat: &Lattice,
    states: &[AtomicI32],
    labels: &[AtomicU32],
) {
    (0..img.len()).into_par_iter().for_each(|p| {
        let (s, l) = classify(img, lat, p);
        states[p].store(s, ORD);
        labels[p].store(l, ORD);
    });
}
