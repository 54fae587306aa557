//! Slow, obviously-correct sequential references. These validate the
//! parallel phases and end-to-end results on small instances; they share the
//! grid vocabulary but none of the parallel kernels.

use std::collections::hash_map::Entry;
use std::collections::{HashMap, VecDeque};

use crate::error::{Error, Result};
use crate::grid::{Connectivity, GridImage, Intensity, LabelField, Lattice};

/// Outcome of a partition comparison.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OracleReport {
    /// True when both label fields induce the same equivalence relation.
    pub partitions_equal: bool,
    /// Distinct label counts of (first, second).
    pub region_counts: (usize, usize),
    /// First pixel at which the relations disagree, when they do.
    pub first_mismatch: Option<usize>,
}

/// Single-threaded watershed with the same tie-breaking rules as the
/// parallel implementation: iteration-by-iteration initialization, plateau
/// resolution on a state snapshot, path following, and min-root merging of
/// minimal plateaux. This is the canonical partition.
pub fn sequential_watershed<T: Intensity>(
    img: &GridImage<T>,
    conn: Connectivity,
) -> Result<LabelField> {
    let lat = Lattice::new(img.dims(), conn)?;
    let n = img.len();

    // initialize: lowest neighbor, last (largest-index) among equal minima
    let mut states = vec![0i32; n];
    let mut labels = vec![0u32; n];
    for p in 0..n {
        let mut best: Option<usize> = None;
        lat.for_each_neighbor(p, |q| {
            best = match best {
                Some(b) if img.get(q) > img.get(b) => Some(b),
                _ => Some(q),
            };
        });
        match best {
            None => {
                states[p] = 1;
                labels[p] = p as u32;
            }
            Some(q) => {
                let (vp, vq) = (img.get(p), img.get(q));
                if vq < vp {
                    states[p] = 0;
                    labels[p] = q as u32;
                } else if vq > vp {
                    states[p] = 1;
                    labels[p] = p as u32;
                } else if q > p {
                    states[p] = 2;
                    labels[p] = q as u32;
                } else {
                    states[p] = 3;
                    labels[p] = p as u32;
                }
            }
        }
    }

    // resolve non-minimal plateaux against a snapshot of the states
    loop {
        let snap = states.clone();
        let mut changed = false;
        for p in 0..n {
            if snap[p] < 2 {
                continue;
            }
            let mut donor = usize::MAX;
            lat.for_each_neighbor(p, |q| {
                if snap[q] == 0 && img.get(q) == img.get(p) {
                    donor = q;
                }
            });
            if donor != usize::MAX {
                labels[p] = donor as u32;
                states[p] = 0;
                changed = true;
            }
        }
        if !changed {
            break;
        }
    }

    // follow every label path to its self-loop
    let mut flat = vec![0u32; n];
    for p in 0..n {
        let mut l = labels[p] as usize;
        while labels[l] as usize != l {
            l = labels[l] as usize;
        }
        flat[p] = l as u32;
    }

    // merge minimal plateau labels, smaller root wins
    let mut parent = flat.clone();
    fn find(parent: &mut [u32], x: usize) -> usize {
        let mut root = x;
        while parent[root] as usize != root {
            root = parent[root] as usize;
        }
        let mut cur = x;
        while cur != root {
            cur = std::mem::replace(&mut parent[cur], root as u32) as usize;
        }
        root
    }
    for p in 0..n {
        if states[p] < 2 {
            continue;
        }
        let mut partners = Vec::new();
        lat.for_each_neighbor_after(p, |q| {
            if states[q] >= 2 {
                partners.push(q);
            }
        });
        for q in partners {
            let (rp, rq) = (find(&mut parent, p), find(&mut parent, q));
            if rp != rq {
                let (hi, lo) = if rp > rq { (rp, rq) } else { (rq, rp) };
                parent[hi] = lo as u32;
            }
        }
    }
    let out: Vec<u32> = (0..n).map(|p| find(&mut parent, p) as u32).collect();
    Ok(LabelField::from_vec(out))
}

/// Breadth-first distances within each equal-intensity plateau, counted in
/// state updates: plateau pixels with a strictly lower neighbor are sources
/// at distance 0. Pixels of minimal plateaux are unreachable and marked
/// `u32::MAX`; pixels not on any plateau are 0.
pub fn plateau_distance_map<T: Intensity>(
    img: &GridImage<T>,
    conn: Connectivity,
) -> Result<Vec<u32>> {
    let lat = Lattice::new(img.dims(), conn)?;
    let n = img.len();
    let mut dist = vec![0u32; n];
    let mut queue = VecDeque::new();
    for p in 0..n {
        let mut has_equal = false;
        let mut has_lower = false;
        lat.for_each_neighbor(p, |q| {
            if img.get(q) == img.get(p) {
                has_equal = true;
            }
            if img.get(q) < img.get(p) {
                has_lower = true;
            }
        });
        if has_equal && !has_lower {
            dist[p] = u32::MAX;
        } else if has_equal {
            queue.push_back(p);
        }
    }
    while let Some(p) = queue.pop_front() {
        let d = dist[p];
        let mut fresh = Vec::new();
        lat.for_each_neighbor(p, |q| {
            if img.get(q) == img.get(p) && dist[q] == u32::MAX {
                fresh.push(q);
            }
        });
        for q in fresh {
            dist[q] = d + 1;
            queue.push_back(q);
        }
    }
    Ok(dist)
}

/// Relation-level equality of two label fields, checked through a bijective
/// label-to-label mapping.
pub fn compare_partitions(a: &LabelField, b: &LabelField) -> Result<OracleReport> {
    if a.len() != b.len() {
        return Err(Error::Input(format!(
            "cannot compare partitions of {} and {} pixels",
            a.len(),
            b.len()
        )));
    }
    let mut a2b: HashMap<u32, u32> = HashMap::new();
    let mut b2a: HashMap<u32, u32> = HashMap::new();
    let mut first_mismatch = None;
    for p in 0..a.len() {
        let (la, lb) = (a.get(p), b.get(p));
        let ok_ab = match a2b.entry(la) {
            Entry::Occupied(e) => *e.get() == lb,
            Entry::Vacant(v) => {
                v.insert(lb);
                true
            }
        };
        let ok_ba = match b2a.entry(lb) {
            Entry::Occupied(e) => *e.get() == la,
            Entry::Vacant(v) => {
                v.insert(la);
                true
            }
        };
        if !(ok_ab && ok_ba) {
            first_mismatch = Some(p);
            break;
        }
    }
    Ok(OracleReport {
        partitions_equal: first_mismatch.is_none(),
        region_counts: (a.region_count(), b.region_count()),
        first_mismatch,
    })
}

/// Sequential hierarchy: the sequential watershed interleaved with a
/// brute-force image reconstruction (pass heights from a full boundary
/// scan). Regions follow their representatives across layers exactly like
/// the parallel driver, so the layers can be compared one by one.
pub fn sequential_hierarchy<T: Intensity>(
    img: &GridImage<T>,
    conn: Connectivity,
    layers: usize,
) -> Result<(Vec<LabelField>, Vec<usize>)> {
    if layers == 0 {
        return Err(Error::Config("hierarchy needs at least one layer".into()));
    }
    let lat = Lattice::new(img.dims(), conn)?;
    let mut work = GridImage::new(
        img.dims().to_vec(),
        img.data().iter().map(|v| v.to_u32()).collect::<Vec<u32>>(),
    )?;
    let mut fields: Vec<LabelField> = Vec::with_capacity(layers);
    let mut counts = Vec::with_capacity(layers);
    for layer in 0..layers {
        let lf = sequential_watershed(&work, conn)?;
        let exported = match fields.last() {
            None => lf.clone(),
            Some(prev) => {
                // group previous regions by where their representatives went;
                // the smallest previous representative names the group
                let mut rep_of_group: HashMap<u32, u32> = HashMap::new();
                for p in 0..work.len() {
                    let rep = prev.get(p);
                    let group = lf.get(rep as usize);
                    let e = rep_of_group.entry(group).or_insert(rep);
                    *e = (*e).min(rep);
                }
                LabelField::from_vec(
                    (0..work.len())
                        .map(|p| rep_of_group[&lf.get(prev.get(p) as usize)])
                        .collect(),
                )
            }
        };
        counts.push(exported.region_count());
        if layer + 1 < layers {
            let mut pass: HashMap<u32, u32> = HashMap::new();
            for p in 0..work.len() {
                let mut cross = Vec::new();
                lat.for_each_neighbor(p, |q| {
                    if lf.get(q) != lf.get(p) {
                        cross.push(q);
                    }
                });
                for q in cross {
                    let h = work.get(p).max(work.get(q));
                    let e = pass.entry(lf.get(p)).or_insert(u32::MAX);
                    *e = (*e).min(h);
                }
            }
            for p in 0..work.len() {
                if let Some(&m) = pass.get(&lf.get(p)) {
                    if work.get(p) < m {
                        work.data_mut()[p] = m;
                    }
                }
            }
        }
        fields.push(exported);
    }
    Ok((fields, counts))
}
