//! Image reconstruction and the hierarchical driver.
//!
//! One waterfall application raises every catchment basin to the height of
//! its lowest pass point and re-runs the watershed on the reconstructed
//! image, merging basins whose passes were reached. Iterating yields layers
//! of monotonically coarser partitions, ending with the whole image as a
//! single region.

use std::sync::atomic::{AtomicI32, AtomicU32};
use std::time::Instant;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::grid::{Connectivity, GridImage, Intensity, LabelField, Lattice, StateField, ORD};
use crate::watershed::{self, StepTimings, WatershedConfig};

/// Initial pass-height value for every basin. It exceeds every intensity a
/// working image can carry: inputs are widened to 32 bits, and values must
/// stay below this sentinel (8- and 16-bit inputs always do). Basins with no
/// external boundary keep the sentinel and are left untouched by
/// reconstruction.
pub const FLOOD_SENTINEL: u32 = i32::MAX as u32;

/// An ordered list of partitions, coarsest last. Layer 0 is the plain
/// watershed of the input; each later layer groups the previous layer's
/// regions according to the watershed of the reconstructed image. Labels are
/// representative pixel indices (never renumbered): watershed roots in layer
/// 0, carried-forward representatives afterwards.
///
/// Layers always nest. A region of layer k moves into layer k+1 as a unit,
/// following its representative; without that rule, tied pass heights can
/// fuse the reconstructed plateaux of several regions and fair plateau
/// division would split a region between two coarser ones. Whenever the
/// fresh watershed already coarsens the previous layer, the grouped labels
/// coincide with it.
#[derive(Debug, Clone)]
pub struct Hierarchy {
    pub layers: Vec<LabelField>,
    pub region_counts: Vec<usize>,
    /// Per layer: watershed plus (except for the last layer) reconstruction.
    pub layer_timings_ms: Vec<f64>,
    pub step_timings: Vec<StepTimings>,
}

impl Hierarchy {
    pub fn layer_count(&self) -> usize {
        self.layers.len()
    }
}

fn check_labels(img_len: usize, labels: &LabelField) -> Result<()> {
    if labels.len() != img_len {
        return Err(Error::Input(format!(
            "label field of {} entries does not match image of {} pixels",
            labels.len(),
            img_len
        )));
    }
    Ok(())
}

/// The lowest pass height of each basin: for every root r, the minimum of
/// `max(I(p), I(q))` over neighbor pairs with `L(p) = r, L(q) != r`. The
/// returned vector is indexed by root; slots of basins with no external
/// boundary (and slots that are not roots) hold [`FLOOD_SENTINEL`].
pub fn pass_heights(
    img: &GridImage<u32>,
    labels: &LabelField,
    conn: Connectivity,
) -> Result<Vec<u32>> {
    let lat = Lattice::new(img.dims(), conn)?;
    check_labels(img.len(), labels)?;
    let scratch: Vec<AtomicI32> = (0..img.len()).map(|_| AtomicI32::new(0)).collect();
    pass_heights_into(img, &lat, labels.as_atomics(), &scratch);
    Ok(scratch.iter().map(|v| v.load(ORD) as u32).collect())
}

/// Raises every pixel below its basin's pass height up to that height.
/// Basins whose slot still holds the sentinel are left unchanged, so
/// intensities never decrease.
pub fn raise_basins(
    img: &mut GridImage<u32>,
    labels: &LabelField,
    heights: &[u32],
) -> Result<()> {
    check_labels(img.len(), labels)?;
    if heights.len() != img.len() {
        return Err(Error::Input("pass-height store does not match image".into()));
    }
    img.data_mut().par_iter_mut().enumerate().for_each(|(p, v)| {
        let m = heights[labels.get(p) as usize];
        if m != FLOOD_SENTINEL && *v < m {
            *v = m;
        }
    });
    Ok(())
}

fn pass_heights_into(
    img: &GridImage<u32>,
    lat: &Lattice,
    labels: &[AtomicU32],
    newmin: &[AtomicI32],
) {
    let n = img.len();
    (0..n)
        .into_par_iter()
        .for_each(|p| newmin[p].store(i32::MAX, ORD));
    (0..n).into_par_iter().for_each(|p| {
        let lp = labels[p].load(ORD);
        let vp = img.get(p);
        lat.for_each_neighbor(p, |q| {
            let lq = labels[q].load(ORD);
            if lq != lp {
                // working intensities are below the sentinel, so the i32
                // ordering agrees with the u32 one
                let h = vp.max(img.get(q)) as i32;
                newmin[lp as usize].fetch_min(h, ORD);
            }
        });
    });
}

fn raise_in_place(img: &mut GridImage<u32>, labels: &[AtomicU32], newmin: &[AtomicI32]) {
    img.data_mut().par_iter_mut().enumerate().for_each(|(p, v)| {
        let m = newmin[labels[p].load(ORD) as usize].load(ORD) as u32;
        if m != FLOOD_SENTINEL && *v < m {
            *v = m;
        }
    });
}

/// Groups the previous layer's regions by where the fresh watershed sends
/// their representatives; the group representative is the smallest previous
/// representative it contains, so the result is again a root map. `map` is
/// scratch space of image length.
fn project_layer(prev: &LabelField, raw: &LabelField, map: &[AtomicI32]) -> Vec<u32> {
    let n = prev.len();
    for p in 0..n {
        map[raw.get(prev.get(p) as usize) as usize].store(i32::MAX, ORD);
    }
    for p in 0..n {
        let rep = prev.get(p);
        let group = raw.get(rep as usize) as usize;
        if map[group].load(ORD) > rep as i32 {
            map[group].store(rep as i32, ORD);
        }
    }
    (0..n)
        .map(|p| map[raw.get(prev.get(p) as usize) as usize].load(ORD) as u32)
        .collect()
}

/// Every layer must coarsen the one before it: pixels sharing a label in
/// the previous layer must share one in the current layer, i.e. the map
/// previous-label -> current-label is a function. `map` is scratch space of
/// image length.
fn check_coarsening(prev: &LabelField, cur: &LabelField, map: &[AtomicI32]) -> Result<()> {
    let n = prev.len();
    for p in 0..n {
        map[prev.get(p) as usize].store(-1, ORD);
    }
    for p in 0..n {
        let r = prev.get(p) as usize;
        let c = cur.get(p) as i32;
        let m = map[r].load(ORD);
        if m == -1 {
            map[r].store(c, ORD);
        } else if m != c {
            return Err(Error::Internal(format!(
                "layer is not a coarsening of its predecessor: pixels of region {r} split at pixel {p}"
            )));
        }
    }
    Ok(())
}

/// Builds `layers` partition layers: the watershed of `img`, then repeatedly
/// the watershed of the reconstructed image. The input image is not
/// modified; the working copy and all per-pixel stores are allocated once
/// and reused across layers.
pub fn build_hierarchy<T: Intensity>(
    img: &GridImage<T>,
    cfg: &WatershedConfig,
    layers: usize,
) -> Result<Hierarchy> {
    if layers == 0 {
        return Err(Error::Config("hierarchy needs at least one layer".into()));
    }
    let lat = cfg.validated_lattice(img.dims())?;
    let mut work = img.widen();
    if work.data().iter().any(|&v| v >= FLOOD_SENTINEL) {
        return Err(Error::InvalidImage(format!(
            "intensities must be below {FLOOD_SENTINEL}"
        )));
    }

    let n = work.len();
    let labels = LabelField::identity(n);
    let mut states = StateField::zeros(n);
    let mut scratch = StateField::zeros(n);

    let mut out = Hierarchy {
        layers: Vec::with_capacity(layers),
        region_counts: Vec::with_capacity(layers),
        layer_timings_ms: Vec::with_capacity(layers),
        step_timings: Vec::with_capacity(layers),
    };

    for layer in 0..layers {
        let t0 = Instant::now();
        let (timings, _, _) =
            watershed::run_into(&work, cfg, &lat, &labels, &mut states, &mut scratch)?;

        let snapshot = match out.layers.last() {
            None => LabelField::from_vec(labels.to_vec()),
            Some(prev) => {
                let grouped =
                    LabelField::from_vec(project_layer(prev, &labels, scratch.as_atomics()));
                check_coarsening(prev, &grouped, scratch.as_atomics())?;
                grouped
            }
        };
        let regions = watershed::count_roots(&snapshot);

        if layer + 1 < layers {
            // reconstruction follows the fresh watershed labels
            pass_heights_into(&work, &lat, labels.as_atomics(), scratch.as_atomics());
            raise_in_place(&mut work, labels.as_atomics(), scratch.as_atomics());
        }

        out.layer_timings_ms.push(t0.elapsed().as_secs_f64() * 1e3);
        out.step_timings.push(timings);
        out.region_counts.push(regions);
        out.layers.push(snapshot);
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::Scheme;
    use crate::watershed::{watershed, Strategy, Variant};
    use rand::{Rng, SeedableRng};

    fn conn1() -> Connectivity {
        Connectivity::new(Scheme::VonNeumann, 1).unwrap()
    }

    fn cfg1() -> WatershedConfig {
        WatershedConfig::new(Variant::Pruf, Strategy::Balanced, conn1())
    }

    fn cfg2(scheme: Scheme) -> WatershedConfig {
        WatershedConfig::new(
            Variant::Pruf,
            Strategy::Balanced,
            Connectivity::new(scheme, 2).unwrap(),
        )
    }

    #[test]
    fn pass_height_of_the_symmetric_pool() {
        let img = GridImage::new(vec![4], vec![75u32, 89, 89, 81]).unwrap();
        let res = watershed(&img, &cfg1()).unwrap();
        assert_eq!(res.region_count, 2);
        let heights = pass_heights(&img, &res.labels, conn1()).unwrap();
        for p in 0..4 {
            let r = res.labels.get(p) as usize;
            assert_eq!(heights[r], 89);
        }
    }

    #[test]
    fn single_region_keeps_the_sentinel_and_stays_unchanged() {
        let img = GridImage::new(vec![4], vec![3u32, 4, 5, 6]).unwrap();
        let res = watershed(&img, &cfg1()).unwrap();
        assert_eq!(res.region_count, 1);
        let heights = pass_heights(&img, &res.labels, conn1()).unwrap();
        assert_eq!(heights[res.labels.get(0) as usize], FLOOD_SENTINEL);
        let mut work = img.clone();
        raise_basins(&mut work, &res.labels, &heights).unwrap();
        assert_eq!(work.data(), img.data());
    }

    #[test]
    fn pass_heights_match_a_boundary_scan_oracle() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(12);
        let conn = Connectivity::new(Scheme::Moore, 2).unwrap();
        for _ in 0..10 {
            let data: Vec<u32> = (0..256).map(|_| rng.gen_range(0..8)).collect();
            let img = GridImage::new(vec![16, 16], data).unwrap();
            let res = watershed(&img, &cfg2(Scheme::Moore)).unwrap();
            let heights = pass_heights(&img, &res.labels, conn).unwrap();

            // brute-force double loop over all adjacent cross-label pairs
            let mut expect = std::collections::HashMap::<u32, u32>::new();
            for p in 0..img.len() {
                for q in crate::grid::neighbors(p, conn, img.dims()).unwrap() {
                    if res.labels.get(p) != res.labels.get(q) {
                        let h = img.get(p).max(img.get(q));
                        let e = expect.entry(res.labels.get(p)).or_insert(u32::MAX);
                        *e = (*e).min(h);
                    }
                }
            }
            for (root, h) in expect {
                assert_eq!(heights[root as usize], h);
            }
        }
    }

    #[test]
    fn raising_floods_the_pool_to_its_pass() {
        let mut img = GridImage::new(vec![4], vec![75u32, 89, 89, 81]).unwrap();
        let res = watershed(&img, &cfg1()).unwrap();
        let heights = pass_heights(&img, &res.labels, conn1()).unwrap();
        raise_basins(&mut img, &res.labels, &heights).unwrap();
        assert_eq!(img.data(), &[89, 89, 89, 89]);
    }

    #[test]
    fn reconstruction_levels_each_basin_at_its_pass() {
        // after raising, the minimum inside each old basin equals its pass
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(21);
        let data: Vec<u32> = (0..64).map(|_| rng.gen_range(0..9)).collect();
        let mut img = GridImage::new(vec![64], data).unwrap();
        let res = watershed(&img, &cfg1()).unwrap();
        let heights = pass_heights(&img, &res.labels, conn1()).unwrap();
        raise_basins(&mut img, &res.labels, &heights).unwrap();
        for p in 0..img.len() {
            let r = res.labels.get(p) as usize;
            if heights[r] != FLOOD_SENTINEL {
                assert!(img.get(p) >= heights[r]);
            }
        }
        for (root, &h) in heights.iter().enumerate() {
            if h == FLOOD_SENTINEL || res.labels.get(root) != root as u32 {
                continue;
            }
            let min_in_basin = (0..img.len())
                .filter(|&p| res.labels.get(p) as usize == root)
                .map(|p| img.get(p))
                .min()
                .unwrap();
            assert_eq!(min_in_basin, h);
        }
    }

    #[test]
    fn single_layer_hierarchy_is_the_plain_watershed() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let data: Vec<u8> = (0..144).map(|_| rng.gen_range(0..5)).collect();
        let img = GridImage::new(vec![12, 12], data).unwrap();
        let cfg = cfg2(Scheme::VonNeumann);
        let h = build_hierarchy(&img, &cfg, 1).unwrap();
        let w = watershed(&img.widen(), &cfg).unwrap();
        assert_eq!(h.layer_count(), 1);
        assert_eq!(h.layers[0].to_vec(), w.labels.to_vec());
        assert_eq!(h.region_counts[0], w.region_count);
    }

    #[test]
    fn zero_layers_is_a_configuration_error() {
        let img = GridImage::filled(vec![4, 4], 1u8).unwrap();
        assert!(matches!(
            build_hierarchy(&img, &cfg2(Scheme::Moore), 0),
            Err(Error::Config(_))
        ));
    }

    #[test]
    fn four_pool_terrain_collapses_within_three_waterfalls() {
        // pools at 5,7,7,5 with passes 10, 20, 10
        let img = GridImage::new(vec![7], vec![5u8, 10, 7, 20, 7, 10, 5]).unwrap();
        let h = build_hierarchy(&img, &cfg1(), 4).unwrap();
        assert_eq!(h.region_counts[0], 4);
        assert_eq!(h.region_counts[3], 1);
        let mut strictly_decreasing_to_one = true;
        for k in 1..h.region_counts.len() {
            let (a, b) = (h.region_counts[k - 1], h.region_counts[k]);
            if a > 1 && b >= a {
                strictly_decreasing_to_one = false;
            }
        }
        assert!(strictly_decreasing_to_one, "counts {:?}", h.region_counts);
    }

    #[test]
    fn hierarchies_coarsen_and_terminate_on_random_images() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(8);
        for _ in 0..5 {
            let data: Vec<u8> = (0..1024).map(|_| rng.gen_range(0..6)).collect();
            let img = GridImage::new(vec![32, 32], data).unwrap();
            let h = build_hierarchy(&img, &cfg2(Scheme::Moore), 10).unwrap();
            assert!(h.region_counts.windows(2).all(|w| w[1] <= w[0]));
            assert_eq!(*h.region_counts.last().unwrap(), 1);
            // once a single region is reached it stays
            let first_one = h.region_counts.iter().position(|&c| c == 1).unwrap();
            assert!(h.region_counts[first_one..].iter().all(|&c| c == 1));
        }
    }

    #[test]
    fn caller_image_is_not_mutated() {
        let img = GridImage::new(vec![7], vec![5u8, 10, 7, 20, 7, 10, 5]).unwrap();
        let copy = img.clone();
        build_hierarchy(&img, &cfg1(), 3).unwrap();
        assert_eq!(img, copy);
    }

    #[test]
    fn monotone_intensity_across_reconstructions() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(31);
        let data: Vec<u8> = (0..400).map(|_| rng.gen_range(0..7)).collect();
        let img = GridImage::new(vec![20, 20], data).unwrap();
        let cfg = cfg2(Scheme::VonNeumann);
        let conn = cfg.connectivity;

        let mut work = img.widen();
        for _ in 0..6 {
            let res = watershed(&work, &cfg).unwrap();
            let heights = pass_heights(&work, &res.labels, conn).unwrap();
            let before = work.clone();
            raise_basins(&mut work, &res.labels, &heights).unwrap();
            assert!(work
                .data()
                .iter()
                .zip(before.data())
                .all(|(now, then)| now >= then));
        }
    }
}
