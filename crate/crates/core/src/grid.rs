//! Grid vocabulary: images, linear ordering, connectivity, and the per-pixel
//! state/label stores used by every kernel.
//!
//! Pixels are ordered row-major with the last axis fastest. All tie-breaking
//! in the algorithms ("last in the fixed order") binds to this ordering,
//! which makes every result bit-reproducible.

use std::sync::atomic::{AtomicI32, AtomicU32, Ordering};

use crate::error::{Error, Result};
use crate::mem;

/// Relaxed is sufficient everywhere: every phase boundary is a rayon join,
/// which provides the required happens-before edges.
pub(crate) const ORD: Ordering = Ordering::Relaxed;

/// Scalar sample type of a [`GridImage`].
pub trait Intensity: Copy + Ord + Eq + Send + Sync + std::fmt::Debug + 'static {
    const MAX_VALUE: Self;
    fn to_u32(self) -> u32;
    fn to_f64(self) -> f64;
    /// Round to nearest and saturate to the representable range.
    fn from_f64_clamped(v: f64) -> Self;
}

macro_rules! impl_intensity {
    ($t:ty) => {
        impl Intensity for $t {
            const MAX_VALUE: Self = <$t>::MAX;
            #[inline]
            fn to_u32(self) -> u32 {
                self as u32
            }
            #[inline]
            fn to_f64(self) -> f64 {
                self as f64
            }
            #[inline]
            fn from_f64_clamped(v: f64) -> Self {
                v.round().clamp(0.0, <$t>::MAX as f64) as $t
            }
        }
    };
}

impl_intensity!(u8);
impl_intensity!(u16);
impl_intensity!(u32);

/// An n-dimensional scalar field (1 to 3 axes), stored row-major with the
/// last axis fastest.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct GridImage<T> {
    dims: Vec<usize>,
    data: Vec<T>,
}

impl<T: Intensity> GridImage<T> {
    /// Builds an image, validating that `data` covers exactly the product of
    /// `dims` and that there are 1 to 3 axes, each of extent >= 1.
    pub fn new(dims: Vec<usize>, data: Vec<T>) -> Result<Self> {
        if dims.is_empty() || dims.len() > 3 {
            return Err(Error::InvalidImage(format!(
                "expected 1 to 3 axes, got {}",
                dims.len()
            )));
        }
        if dims.iter().any(|&d| d == 0) {
            return Err(Error::InvalidImage(format!("zero extent in dims {dims:?}")));
        }
        let n: usize = dims.iter().product();
        if data.len() != n {
            return Err(Error::InvalidImage(format!(
                "data length {} does not match dims {:?} (product {})",
                data.len(),
                dims,
                n
            )));
        }
        Ok(Self { dims, data })
    }

    /// Constant image.
    pub fn filled(dims: Vec<usize>, value: T) -> Result<Self> {
        let n: usize = dims.iter().product();
        Self::new(dims, vec![value; n])
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    pub fn ndim(&self) -> usize {
        self.dims.len()
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    pub fn data(&self) -> &[T] {
        &self.data
    }

    pub fn data_mut(&mut self) -> &mut [T] {
        &mut self.data
    }

    #[inline]
    pub fn get(&self, p: usize) -> T {
        self.data[p]
    }

    /// Copies the image into a 32-bit working image (the width used across
    /// waterfall layers so the flood sentinel exceeds any input intensity).
    pub fn widen(&self) -> GridImage<u32> {
        mem::note_pixel_buffer();
        GridImage {
            dims: self.dims.clone(),
            data: self.data.iter().map(|v| v.to_u32()).collect(),
        }
    }
}

impl<T: Intensity> std::ops::Index<usize> for GridImage<T> {
    type Output = T;
    fn index(&self, p: usize) -> &T {
        &self.data[p]
    }
}

/// Neighborhood scheme: von Neumann (4 in 2D / 6 in 3D) or Moore
/// (8 in 2D / 26 in 3D). Neighbors outside the grid are clipped, never
/// wrapped.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Scheme {
    VonNeumann,
    Moore,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Connectivity {
    scheme: Scheme,
    dimension: usize,
}

impl Connectivity {
    pub fn new(scheme: Scheme, dimension: usize) -> Result<Self> {
        if !(1..=3).contains(&dimension) {
            return Err(Error::Config(format!(
                "connectivity dimension must be 1, 2 or 3, got {dimension}"
            )));
        }
        Ok(Self { scheme, dimension })
    }

    /// Conventional neighbor-count code: 4/8 in 2D, 6/26 in 3D.
    pub fn from_code(code: u32) -> Result<Self> {
        let (scheme, dimension) = match code {
            4 => (Scheme::VonNeumann, 2),
            8 => (Scheme::Moore, 2),
            6 => (Scheme::VonNeumann, 3),
            26 => (Scheme::Moore, 3),
            other => {
                return Err(Error::Config(format!(
                    "unsupported connectivity code {other} (expected 4, 8, 6 or 26)"
                )))
            }
        };
        Ok(Self { scheme, dimension })
    }

    pub fn code(&self) -> u32 {
        match (self.scheme, self.dimension) {
            (_, 1) => 2,
            (Scheme::VonNeumann, 2) => 4,
            (Scheme::Moore, 2) => 8,
            (Scheme::VonNeumann, 3) => 6,
            (Scheme::Moore, _) => 26,
            (Scheme::VonNeumann, _) => unreachable!(),
        }
    }

    pub fn scheme(&self) -> Scheme {
        self.scheme
    }

    pub fn dimension(&self) -> usize {
        self.dimension
    }

    /// Neighbor count at an interior pixel: 2d (von Neumann) or 3^d - 1
    /// (Moore).
    pub fn interior_degree(&self) -> usize {
        match self.scheme {
            Scheme::VonNeumann => 2 * self.dimension,
            Scheme::Moore => 3usize.pow(self.dimension as u32) - 1,
        }
    }
}

/// Precomputed geometry for one (dims, connectivity) pair: strides plus the
/// neighbor offsets in ascending linear order.
#[derive(Debug, Clone)]
pub(crate) struct Lattice {
    dims: [usize; 3],
    strides: [usize; 3],
    ndim: usize,
    len: usize,
    offsets: Vec<Offset>,
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct Offset {
    pub dlin: isize,
    pub delta: [i8; 3],
}

impl Lattice {
    pub(crate) fn new(dims: &[usize], conn: Connectivity) -> Result<Self> {
        if conn.dimension() != dims.len() {
            return Err(Error::Config(format!(
                "connectivity is {}-dimensional but the image has {} axes",
                conn.dimension(),
                dims.len()
            )));
        }
        let ndim = dims.len();
        let mut d3 = [1usize; 3];
        d3[..ndim].copy_from_slice(dims);
        let mut strides = [1usize; 3];
        for a in (0..ndim.saturating_sub(1)).rev() {
            strides[a] = strides[a + 1] * d3[a + 1];
        }
        let len: usize = d3.iter().product();

        // Lexicographic delta order gives ascending linear offsets because
        // strides are nested.
        let mut offsets = Vec::new();
        let range = |a: usize| if a < ndim { -1i8..=1 } else { 0..=0 };
        for d0 in range(0) {
            for d1 in range(1) {
                for d2 in range(2) {
                    let delta = [d0, d1, d2];
                    let l1: i32 = delta.iter().map(|&d| d.abs() as i32).sum();
                    if l1 == 0 {
                        continue;
                    }
                    if matches!(conn.scheme(), Scheme::VonNeumann) && l1 != 1 {
                        continue;
                    }
                    let dlin = d0 as isize * strides[0] as isize
                        + d1 as isize * strides[1] as isize
                        + d2 as isize * strides[2] as isize;
                    offsets.push(Offset { dlin, delta });
                }
            }
        }
        // At any fixed pixel the valid (in-grid) neighbors appear in ascending
        // linear order: adding the pixel's coordinates preserves the
        // lexicographic comparison of deltas, and linear_index is strictly
        // increasing in lexicographic coordinates. Raw dlin values of offsets
        // that are never simultaneously valid may collide on degenerate axes.
        Ok(Self {
            dims: d3,
            strides,
            ndim,
            len,
            offsets,
        })
    }

    pub(crate) fn len(&self) -> usize {
        self.len
    }

    pub(crate) fn offsets(&self) -> &[Offset] {
        &self.offsets
    }

    pub(crate) fn dims3(&self) -> [usize; 3] {
        self.dims
    }

    pub(crate) fn strides(&self) -> [usize; 3] {
        self.strides
    }

    pub(crate) fn ndim(&self) -> usize {
        self.ndim
    }

    #[inline]
    pub(crate) fn coords(&self, p: usize) -> [usize; 3] {
        match self.ndim {
            1 => [p, 0, 0],
            2 => [p / self.dims[1], p % self.dims[1], 0],
            _ => [
                p / self.strides[0],
                (p / self.strides[1]) % self.dims[1],
                p % self.dims[2],
            ],
        }
    }

    #[inline]
    fn is_interior(&self, c: [usize; 3]) -> bool {
        (0..self.ndim).all(|a| c[a] >= 1 && c[a] + 1 < self.dims[a])
    }

    /// Calls `f` on each in-grid neighbor of `p`, in ascending linear order.
    #[inline]
    pub(crate) fn for_each_neighbor(&self, p: usize, mut f: impl FnMut(usize)) {
        let c = self.coords(p);
        if self.is_interior(c) {
            for off in &self.offsets {
                f((p as isize + off.dlin) as usize);
            }
        } else {
            'offsets: for off in &self.offsets {
                for a in 0..self.ndim {
                    let x = c[a] as isize + off.delta[a] as isize;
                    if x < 0 || x >= self.dims[a] as isize {
                        continue 'offsets;
                    }
                }
                f((p as isize + off.dlin) as usize);
            }
        }
    }

    /// Like [`Self::for_each_neighbor`] but restricted to neighbors with a
    /// larger linear index (the half neighborhood used when each unordered
    /// pair should be visited once).
    #[inline]
    pub(crate) fn for_each_neighbor_after(&self, p: usize, mut f: impl FnMut(usize)) {
        let c = self.coords(p);
        if self.is_interior(c) {
            for off in &self.offsets {
                if off.dlin > 0 {
                    f((p as isize + off.dlin) as usize);
                }
            }
        } else {
            'offsets: for off in &self.offsets {
                if off.dlin <= 0 {
                    continue;
                }
                for a in 0..self.ndim {
                    let x = c[a] as isize + off.delta[a] as isize;
                    if x < 0 || x >= self.dims[a] as isize {
                        continue 'offsets;
                    }
                }
                f((p as isize + off.dlin) as usize);
            }
        }
    }
}

/// Row-major linear index of `coords` within `dims` (last axis fastest).
pub fn linear_index(coords: &[usize], dims: &[usize]) -> Result<usize> {
    if coords.len() != dims.len() {
        return Err(Error::Input(format!(
            "coordinate rank {} does not match dims rank {}",
            coords.len(),
            dims.len()
        )));
    }
    let mut idx = 0usize;
    for (a, (&c, &d)) in coords.iter().zip(dims.iter()).enumerate() {
        if c >= d {
            return Err(Error::Input(format!(
                "coordinate {c} out of range for axis {a} with extent {d}"
            )));
        }
        idx = idx * d + c;
    }
    Ok(idx)
}

/// In-grid neighbors of pixel `p` under `conn`, in ascending linear order.
/// `p` itself is never included; out-of-grid positions are clipped.
pub fn neighbors(p: usize, conn: Connectivity, dims: &[usize]) -> Result<Vec<usize>> {
    let lat = Lattice::new(dims, conn)?;
    if p >= lat.len() {
        return Err(Error::Input(format!(
            "pixel {p} out of range for image of {} pixels",
            lat.len()
        )));
    }
    let mut out = Vec::with_capacity(conn.interior_degree());
    lat.for_each_neighbor(p, |q| out.push(q));
    Ok(out)
}

/// The neighbor of `p` with minimal intensity; among equally low neighbors
/// the one with the largest linear index wins. Returns `None` only for a
/// single-pixel image, where the neighborhood is empty.
pub fn steepest_neighbor<T: Intensity>(
    p: usize,
    img: &GridImage<T>,
    conn: Connectivity,
) -> Result<Option<usize>> {
    let lat = Lattice::new(img.dims(), conn)?;
    if p >= img.len() {
        return Err(Error::Input(format!(
            "pixel {p} out of range for image of {} pixels",
            img.len()
        )));
    }
    Ok(steepest_in(p, img, &lat))
}

#[inline]
pub(crate) fn steepest_in<T: Intensity>(
    p: usize,
    img: &GridImage<T>,
    lat: &Lattice,
) -> Option<usize> {
    let mut best: Option<(T, usize)> = None;
    // Ascending scan with `<=` keeps the last (largest-index) minimum.
    lat.for_each_neighbor(p, |q| {
        let v = img.get(q);
        match best {
            Some((bv, _)) if v > bv => {}
            _ => best = Some((v, q)),
        }
    });
    best.map(|(_, q)| q)
}

/// Per-pixel label store. Labels are linear pixel indices; a completed
/// watershed maps every pixel to the representative (root) of its basin,
/// where roots satisfy `L(r) = r`. The store is shared-writable so the
/// parallel phases can update it in place.
#[derive(Debug)]
pub struct LabelField {
    data: Vec<AtomicU32>,
}

impl LabelField {
    /// Identity labeling: every pixel is its own representative.
    pub fn identity(n: usize) -> Self {
        mem::note_pixel_buffer();
        Self {
            data: (0..n).map(|p| AtomicU32::new(p as u32)).collect(),
        }
    }

    pub fn from_vec(labels: Vec<u32>) -> Self {
        Self {
            data: labels.into_iter().map(AtomicU32::new).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    #[inline]
    pub fn get(&self, p: usize) -> u32 {
        self.data[p].load(ORD)
    }

    #[inline]
    pub fn set(&self, p: usize, label: u32) {
        self.data[p].store(label, ORD);
    }

    pub fn to_vec(&self) -> Vec<u32> {
        self.data.iter().map(|v| v.load(ORD)).collect()
    }

    pub(crate) fn as_atomics(&self) -> &[AtomicU32] {
        &self.data
    }

    /// Number of distinct label values.
    pub fn region_count(&self) -> usize {
        let n = self.data.len();
        let mut seen = vec![0u64; n.div_ceil(64)];
        let mut count = 0usize;
        for slot in &self.data {
            let l = slot.load(ORD) as usize;
            assert!(l < n, "label {l} out of range for {n} pixels");
            let (w, b) = (l / 64, l % 64);
            if seen[w] >> b & 1 == 0 {
                seen[w] |= 1 << b;
                count += 1;
            }
        }
        count
    }

    /// True when every label is a fixed point: `L(L(p)) == L(p)`.
    pub fn is_root_map(&self) -> bool {
        (0..self.len()).all(|p| {
            let l = self.get(p) as usize;
            l < self.len() && self.get(l) == l as u32
        })
    }
}

impl Clone for LabelField {
    fn clone(&self) -> Self {
        Self::from_vec(self.to_vec())
    }
}

impl PartialEq for LabelField {
    fn eq(&self, other: &Self) -> bool {
        self.data.len() == other.data.len()
            && (0..self.data.len()).all(|p| self.get(p) == other.get(p))
    }
}

impl Eq for LabelField {}

/// Per-pixel algorithm state. After initialization every state is one of
/// 0 (has a lower neighbor), 1 (singleton minimum), 2 (minimal-plateau pixel
/// with a later equal neighbor) or 3 (minimal-plateau pixel with only earlier
/// equal neighbors). The balanced resolution strategy additionally uses
/// negative values: `-k` marks a non-minimal plateau pixel at update distance
/// `k` from the plateau boundary.
#[derive(Debug)]
pub struct StateField {
    data: Vec<AtomicI32>,
}

impl StateField {
    pub fn zeros(n: usize) -> Self {
        mem::note_pixel_buffer();
        Self {
            data: (0..n).map(|_| AtomicI32::new(0)).collect(),
        }
    }

    pub fn from_vec(states: Vec<i32>) -> Self {
        Self {
            data: states.into_iter().map(AtomicI32::new).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.data.len()
    }

    pub fn is_empty(&self) -> bool {
        self.data.is_empty()
    }

    #[inline]
    pub fn get(&self, p: usize) -> i32 {
        self.data[p].load(ORD)
    }

    #[inline]
    pub fn set(&self, p: usize, s: i32) {
        self.data[p].store(s, ORD);
    }

    pub fn to_vec(&self) -> Vec<i32> {
        self.data.iter().map(|v| v.load(ORD)).collect()
    }

    pub(crate) fn as_atomics(&self) -> &[AtomicI32] {
        &self.data
    }

    pub(crate) fn data_mut(&mut self) -> &mut Vec<AtomicI32> {
        &mut self.data
    }
}

impl Clone for StateField {
    fn clone(&self) -> Self {
        Self::from_vec(self.to_vec())
    }
}

impl PartialEq for StateField {
    fn eq(&self, other: &Self) -> bool {
        self.data.len() == other.data.len()
            && (0..self.data.len()).all(|p| self.get(p) == other.get(p))
    }
}

impl Eq for StateField {}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::{Rng, SeedableRng};

    fn conn2(scheme: Scheme) -> Connectivity {
        Connectivity::new(scheme, 2).unwrap()
    }

    #[test]
    fn linear_index_origin_and_last_axis() {
        assert_eq!(linear_index(&[0, 0], &[6, 2]).unwrap(), 0);
        assert_eq!(linear_index(&[0, 1], &[6, 2]).unwrap(), 1);
    }

    #[test]
    fn linear_index_matches_enumeration_order() {
        // Independent oracle: enumerate all coordinates of a 4x4x8 grid in
        // lexicographic order; the linear index must equal the position.
        let dims = [4usize, 4, 8];
        let mut expect = 0usize;
        for c0 in 0..dims[0] {
            for c1 in 0..dims[1] {
                for c2 in 0..dims[2] {
                    assert_eq!(linear_index(&[c0, c1, c2], &dims).unwrap(), expect);
                    expect += 1;
                }
            }
        }
        assert_eq!(linear_index(&[2, 1, 3], &dims).unwrap(), 2 * 32 + 8 + 3);
    }

    #[test]
    fn linear_index_rejects_out_of_range() {
        assert!(linear_index(&[6, 0], &[6, 2]).is_err());
        assert!(linear_index(&[0], &[6, 2]).is_err());
    }

    #[test]
    fn neighbor_counts_interior_and_corner() {
        let dims = [5usize, 5];
        // interior pixel (2,2) = 12
        assert_eq!(neighbors(12, conn2(Scheme::Moore), &dims).unwrap().len(), 8);
        assert_eq!(
            neighbors(0, conn2(Scheme::VonNeumann), &dims).unwrap().len(),
            2
        );
    }

    #[test]
    fn neighbors_match_coordinate_difference_oracle() {
        // Exhaustive |delta|_inf = 1 oracle on a 4x4x4 grid.
        let dims = [4usize, 4, 4];
        let conn = Connectivity::new(Scheme::Moore, 3).unwrap();
        let coord = |p: usize| [p / 16, (p / 4) % 4, p % 4];
        for p in 0..64 {
            let cp = coord(p);
            let mut expect: Vec<usize> = (0..64)
                .filter(|&q| {
                    q != p && {
                        let cq = coord(q);
                        (0..3).all(|a| cp[a].abs_diff(cq[a]) <= 1)
                    }
                })
                .collect();
            expect.sort_unstable();
            assert_eq!(neighbors(p, conn, &dims).unwrap(), expect);
        }
    }

    #[test]
    fn steepest_picks_unique_minimum() {
        let img = GridImage::new(vec![3], vec![75u8, 89, 81]).unwrap();
        let conn = Connectivity::new(Scheme::VonNeumann, 1).unwrap();
        assert_eq!(steepest_neighbor(1, &img, conn).unwrap(), Some(0));
    }

    #[test]
    fn steepest_breaks_ties_toward_largest_index() {
        let img = GridImage::new(vec![3], vec![89u8, 89, 89]).unwrap();
        let conn = Connectivity::new(Scheme::VonNeumann, 1).unwrap();
        assert_eq!(steepest_neighbor(1, &img, conn).unwrap(), Some(2));
    }

    #[test]
    fn steepest_matches_brute_force_scan() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let dims = vec![7usize, 7];
        let data: Vec<u8> = (0..49).map(|_| rng.gen_range(0..6)).collect();
        let img = GridImage::new(dims.clone(), data).unwrap();
        for scheme in [Scheme::VonNeumann, Scheme::Moore] {
            let conn = conn2(scheme);
            for p in 0..img.len() {
                let ns = neighbors(p, conn, &dims).unwrap();
                let min = ns.iter().map(|&q| img.get(q)).min().unwrap();
                let expect = ns.iter().copied().filter(|&q| img.get(q) == min).max();
                assert_eq!(steepest_neighbor(p, &img, conn).unwrap(), expect);
            }
        }
    }

    #[test]
    fn steepest_is_minimal_over_neighborhood() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let dims = vec![6usize, 5];
        let data: Vec<u8> = (0..30).map(|_| rng.gen_range(0..10)).collect();
        let img = GridImage::new(dims.clone(), data).unwrap();
        let conn = conn2(Scheme::Moore);
        for p in 0..img.len() {
            let q = steepest_neighbor(p, &img, conn).unwrap().unwrap();
            for n in neighbors(p, conn, &dims).unwrap() {
                assert!(img.get(q) <= img.get(n));
            }
        }
    }

    #[test]
    fn single_pixel_image_has_no_neighbors() {
        let img = GridImage::new(vec![1], vec![5u8]).unwrap();
        let conn = Connectivity::new(Scheme::Moore, 1).unwrap();
        assert_eq!(steepest_neighbor(0, &img, conn).unwrap(), None);
    }

    #[test]
    fn grid_image_validation() {
        assert!(GridImage::new(vec![2, 2], vec![0u8; 3]).is_err());
        assert!(GridImage::new(vec![], vec![0u8; 0]).is_err());
        assert!(GridImage::<u8>::new(vec![2, 0], vec![]).is_err());
        assert!(GridImage::new(vec![2, 2, 2, 2], vec![0u8; 16]).is_err());
    }

    #[test]
    fn connectivity_codes_round_trip() {
        for code in [4u32, 8, 6, 26] {
            assert_eq!(Connectivity::from_code(code).unwrap().code(), code);
        }
        assert!(Connectivity::from_code(5).is_err());
    }

    #[test]
    fn label_field_region_count_and_roots() {
        let f = LabelField::from_vec(vec![0, 0, 3, 3, 3]);
        assert_eq!(f.region_count(), 2);
        assert!(f.is_root_map());
        let g = LabelField::from_vec(vec![1, 2, 2]);
        assert!(!g.is_root_map());
    }

    proptest! {
        #[test]
        fn neighbors_are_symmetric(
            d0 in 1usize..5, d1 in 1usize..5, d2 in 1usize..4,
            moore in proptest::bool::ANY,
            ndim in 1usize..=3,
        ) {
            let dims: Vec<usize> = [d0, d1, d2][..ndim].to_vec();
            let scheme = if moore { Scheme::Moore } else { Scheme::VonNeumann };
            let conn = Connectivity::new(scheme, ndim).unwrap();
            let n: usize = dims.iter().product();
            let sets: Vec<Vec<usize>> =
                (0..n).map(|p| neighbors(p, conn, &dims).unwrap()).collect();
            for p in 0..n {
                for &q in &sets[p] {
                    prop_assert!(sets[q].contains(&p));
                    prop_assert!(q != p);
                }
            }
        }

        #[test]
        fn linear_index_is_strictly_increasing(
            d0 in 1usize..6, d1 in 1usize..6,
        ) {
            let dims = [d0, d1];
            let mut prev: Option<usize> = None;
            for c0 in 0..d0 {
                for c1 in 0..d1 {
                    let idx = linear_index(&[c0, c1], &dims).unwrap();
                    if let Some(p) = prev {
                        prop_assert!(idx == p + 1);
                    } else {
                        prop_assert!(idx == 0);
                    }
                    prev = Some(idx);
                }
            }
        }
    }

    #[test]
    fn steepest_is_pure() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let dims = vec![4usize, 4];
        let data: Vec<u8> = (0..16).map(|_| rng.gen_range(0..4)).collect();
        let img = GridImage::new(dims, data).unwrap();
        let conn = conn2(Scheme::Moore);
        for p in 0..img.len() {
            let a = steepest_neighbor(p, &img, conn).unwrap();
            let b = steepest_neighbor(p, &img, conn).unwrap();
            assert_eq!(a, b);
        }
    }
}
