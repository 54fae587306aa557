//! The watershed transform as barrier-separated data-parallel phases.
//!
//! A run executes four steps: initialize states and labels from steepest
//! descent, resolve non-minimal plateaux, reduce label paths into direct
//! pointers, and merge minimal-plateau labels so every catchment basin ends
//! with a single representative. The variant selects the path-reduction and
//! merge machinery; the strategy selects how plateau resolution is
//! synchronized.

mod init;
mod merge;
mod reduce;
mod resolve;

use std::time::Instant;

use crate::error::{Error, Result};
use crate::grid::{Connectivity, GridImage, Intensity, LabelField, Lattice, StateField};

/// Algorithm variant.
///
/// * `Prw` — path reduction plus iterative min-merge of plateau labels.
/// * `Pruf` — path reduction plus union–find merging.
/// * `Apruf` — like `Pruf`, but path reduction runs free of global
///   synchronization; favors smaller images where label paths are short.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variant {
    Prw,
    Pruf,
    Apruf,
}

impl Variant {
    pub const ALL: [Variant; 3] = [Variant::Prw, Variant::Pruf, Variant::Apruf];

    pub fn name(&self) -> &'static str {
        match self {
            Variant::Prw => "prw",
            Variant::Pruf => "pruf",
            Variant::Apruf => "apruf",
        }
    }
}

/// Plateau-resolution strategy. `Sync` and `Balanced` divide plateaux fairly
/// and deterministically; `TileAsync` trades fairness near tile boundaries
/// for fewer global iterations but always yields the same region count.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strategy {
    Sync,
    TileAsync,
    Balanced,
}

impl Strategy {
    pub const ALL: [Strategy; 3] = [Strategy::Sync, Strategy::TileAsync, Strategy::Balanced];

    pub fn name(&self) -> &'static str {
        match self {
            Strategy::Sync => "sync",
            Strategy::TileAsync => "async",
            Strategy::Balanced => "bal",
        }
    }
}

/// Configuration of one watershed run.
#[derive(Debug, Clone)]
pub struct WatershedConfig {
    pub variant: Variant,
    pub strategy: Strategy,
    pub connectivity: Connectivity,
    /// Label-doubling updates applied per pixel between global barriers in
    /// the path-reduction step.
    pub reduction_rate: u32,
    /// Per-axis tile extents for the tiled strategies; `None` selects
    /// 16x16 in 2D, 8x8x8 in 3D and 64 in 1D.
    pub tile_dims: Option<Vec<usize>>,
}

impl WatershedConfig {
    pub fn new(variant: Variant, strategy: Strategy, connectivity: Connectivity) -> Self {
        Self {
            variant,
            strategy,
            connectivity,
            reduction_rate: 6,
            tile_dims: None,
        }
    }

    pub fn with_reduction_rate(mut self, rr: u32) -> Self {
        self.reduction_rate = rr;
        self
    }

    pub fn with_tile_dims(mut self, tile_dims: Vec<usize>) -> Self {
        self.tile_dims = Some(tile_dims);
        self
    }

    pub fn resolved_tile_dims(&self, ndim: usize) -> Vec<usize> {
        match &self.tile_dims {
            Some(t) => t.clone(),
            None => match ndim {
                1 => vec![64],
                2 => vec![16, 16],
                _ => vec![8, 8, 8],
            },
        }
    }

    pub(crate) fn validated_lattice(&self, dims: &[usize]) -> Result<Lattice> {
        let lat = Lattice::new(dims, self.connectivity)?;
        if lat.len() > i32::MAX as usize {
            return Err(Error::Config(format!(
                "image of {} pixels exceeds the supported maximum of {}",
                lat.len(),
                i32::MAX
            )));
        }
        if self.reduction_rate < 1 {
            return Err(Error::Config("reduction rate must be at least 1".into()));
        }
        if let Some(t) = &self.tile_dims {
            if t.len() != dims.len() || t.iter().any(|&x| x == 0) {
                return Err(Error::Config(format!(
                    "tile dims {t:?} do not fit an image with {} axes",
                    dims.len()
                )));
            }
        }
        Ok(lat)
    }
}

/// Wall-clock duration of each step, in milliseconds.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct StepTimings {
    pub init_ms: f64,
    pub resolve_ms: f64,
    pub reduce_ms: f64,
    pub merge_ms: f64,
}

impl StepTimings {
    pub fn total_ms(&self) -> f64 {
        self.init_ms + self.resolve_ms + self.reduce_ms + self.merge_ms
    }
}

/// A completed partition: every pixel carries the linear index of its basin
/// representative, and every representative maps to itself.
#[derive(Debug)]
pub struct WatershedResult {
    pub labels: LabelField,
    pub region_count: usize,
    pub step_timings: StepTimings,
    /// Global iterations spent resolving plateaux (including the confirming
    /// pass).
    pub resolve_iterations: usize,
    /// Global iterations spent reducing paths (1 for the free-running
    /// variant).
    pub reduce_iterations: usize,
}

fn ms(t: Instant) -> f64 {
    t.elapsed().as_secs_f64() * 1e3
}

/// Runs the four steps into caller-provided working stores, so a hierarchy
/// can reuse one set of buffers across layers.
pub(crate) fn run_into<T: Intensity>(
    img: &GridImage<T>,
    cfg: &WatershedConfig,
    lat: &Lattice,
    labels: &LabelField,
    states: &mut StateField,
    scratch: &mut StateField,
) -> Result<(StepTimings, usize, usize)> {
    let mut timings = StepTimings::default();

    let t = Instant::now();
    init::initialize(img, lat, states.as_atomics(), labels.as_atomics());
    timings.init_ms = ms(t);

    let t = Instant::now();
    let resolve_iterations = match cfg.strategy {
        Strategy::Sync => resolve::resolve_sync(
            img,
            lat,
            states.data_mut(),
            scratch.data_mut(),
            labels.as_atomics(),
        ),
        Strategy::TileAsync | Strategy::Balanced => resolve::resolve_tiled(
            img,
            lat,
            states.data_mut(),
            scratch.data_mut(),
            labels.as_atomics(),
            &cfg.resolved_tile_dims(img.ndim()),
            matches!(cfg.strategy, Strategy::Balanced),
            None,
        ),
    };
    timings.resolve_ms = ms(t);

    let t = Instant::now();
    let reduce_iterations = match cfg.variant {
        Variant::Prw | Variant::Pruf => {
            reduce::reduce_paths_in(labels.as_atomics(), scratch.as_atomics(), cfg.reduction_rate)
        }
        Variant::Apruf => {
            reduce::collapse_paths_in(labels.as_atomics());
            1
        }
    };
    timings.reduce_ms = ms(t);

    let t = Instant::now();
    match cfg.variant {
        Variant::Pruf | Variant::Apruf => {
            merge::merge_union_find(lat, states.as_atomics(), labels.as_atomics());
        }
        Variant::Prw => {
            merge::merge_relax(lat, states.as_atomics(), labels.as_atomics())?;
        }
    }
    timings.merge_ms = ms(t);

    Ok((timings, resolve_iterations, reduce_iterations))
}

/// Full watershed partition of `img`.
pub fn watershed<T: Intensity>(img: &GridImage<T>, cfg: &WatershedConfig) -> Result<WatershedResult> {
    let lat = cfg.validated_lattice(img.dims())?;
    let labels = LabelField::identity(img.len());
    let mut states = StateField::zeros(img.len());
    let mut scratch = StateField::zeros(img.len());
    let (step_timings, resolve_iterations, reduce_iterations) =
        run_into(img, cfg, &lat, &labels, &mut states, &mut scratch)?;
    let region_count = count_roots(&labels);
    debug_assert!(labels.is_root_map());
    Ok(WatershedResult {
        labels,
        region_count,
        step_timings,
        resolve_iterations,
        reduce_iterations,
    })
}

pub(crate) fn count_roots(labels: &LabelField) -> usize {
    (0..labels.len())
        .filter(|&p| labels.get(p) == p as u32)
        .count()
}

fn check_fields<T: Intensity>(
    img: &GridImage<T>,
    states: &StateField,
    labels: &LabelField,
) -> Result<()> {
    if states.len() != img.len() || labels.len() != img.len() {
        return Err(Error::Input(format!(
            "field lengths ({}, {}) do not match the image ({} pixels)",
            states.len(),
            labels.len(),
            img.len()
        )));
    }
    Ok(())
}

/// Classifies every pixel and seeds labels along steepest descent
/// (initialization step of every variant).
pub fn init_states<T: Intensity>(
    img: &GridImage<T>,
    conn: Connectivity,
) -> Result<(StateField, LabelField)> {
    let lat = Lattice::new(img.dims(), conn)?;
    let states = StateField::zeros(img.len());
    let labels = LabelField::identity(img.len());
    init::initialize(img, &lat, states.as_atomics(), labels.as_atomics());
    Ok((states, labels))
}

/// Synchronous plateau resolution; returns the number of global sweeps,
/// including the final one that changes nothing.
pub fn resolve_plateaus_sync<T: Intensity>(
    img: &GridImage<T>,
    states: &mut StateField,
    labels: &mut LabelField,
    conn: Connectivity,
) -> Result<usize> {
    let lat = Lattice::new(img.dims(), conn)?;
    check_fields(img, states, labels)?;
    let mut scratch = StateField::zeros(img.len());
    Ok(resolve::resolve_sync(
        img,
        &lat,
        states.data_mut(),
        scratch.data_mut(),
        labels.as_atomics(),
    ))
}

fn check_tile_dims(tile_dims: &[usize], ndim: usize) -> Result<()> {
    if tile_dims.len() != ndim || tile_dims.iter().any(|&x| x == 0) {
        return Err(Error::Config(format!(
            "tile dims {tile_dims:?} do not fit an image with {ndim} axes"
        )));
    }
    Ok(())
}

/// Tile-asynchronous plateau resolution; returns the number of global
/// iterations.
pub fn resolve_plateaus_tile_async<T: Intensity>(
    img: &GridImage<T>,
    states: &mut StateField,
    labels: &mut LabelField,
    conn: Connectivity,
    tile_dims: &[usize],
) -> Result<usize> {
    let lat = Lattice::new(img.dims(), conn)?;
    check_fields(img, states, labels)?;
    check_tile_dims(tile_dims, img.ndim())?;
    let mut scratch = StateField::zeros(img.len());
    Ok(resolve::resolve_tiled(
        img,
        &lat,
        states.data_mut(),
        scratch.data_mut(),
        labels.as_atomics(),
        tile_dims,
        false,
        None,
    ))
}

/// Balanced plateau resolution; returns the number of global iterations.
pub fn resolve_plateaus_balanced<T: Intensity>(
    img: &GridImage<T>,
    states: &mut StateField,
    labels: &mut LabelField,
    conn: Connectivity,
    tile_dims: &[usize],
) -> Result<usize> {
    resolve_plateaus_balanced_traced(img, states, labels, conn, tile_dims, |_, _| {})
}

/// Balanced plateau resolution that reports the state array after every
/// global iteration, for inspecting convergence.
pub fn resolve_plateaus_balanced_traced<T: Intensity>(
    img: &GridImage<T>,
    states: &mut StateField,
    labels: &mut LabelField,
    conn: Connectivity,
    tile_dims: &[usize],
    mut observer: impl FnMut(usize, &[i32]),
) -> Result<usize> {
    let lat = Lattice::new(img.dims(), conn)?;
    check_fields(img, states, labels)?;
    check_tile_dims(tile_dims, img.ndim())?;
    let mut scratch = StateField::zeros(img.len());
    Ok(resolve::resolve_tiled(
        img,
        &lat,
        states.data_mut(),
        scratch.data_mut(),
        labels.as_atomics(),
        tile_dims,
        true,
        Some(&mut observer),
    ))
}

/// Rate-limited path reduction; leaves every label pointing at a self-loop
/// pixel and returns the number of global iterations.
pub fn reduce_paths(labels: &mut LabelField, reduction_rate: u32) -> Result<usize> {
    if reduction_rate < 1 {
        return Err(Error::Config("reduction rate must be at least 1".into()));
    }
    let scratch = StateField::zeros(labels.len());
    Ok(reduce::reduce_paths_in(
        labels.as_atomics(),
        scratch.as_atomics(),
        reduction_rate,
    ))
}

/// Free-running path collapse: every pixel follows links to its root with no
/// intermediate synchronization. The result equals [`reduce_paths`].
pub fn collapse_paths(labels: &mut LabelField) {
    reduce::collapse_paths_in(labels.as_atomics());
}

/// Union–find merge of minimal-plateau labels followed by flattening every
/// pixel to its set representative.
pub fn merge_plateaus_union_find(
    states: &StateField,
    labels: &mut LabelField,
    conn: Connectivity,
    dims: &[usize],
) -> Result<()> {
    let lat = Lattice::new(dims, conn)?;
    if states.len() != lat.len() || labels.len() != lat.len() {
        return Err(Error::Input("field lengths do not match dims".into()));
    }
    merge::merge_union_find(&lat, states.as_atomics(), labels.as_atomics());
    Ok(())
}

/// Iterative min-merge of minimal-plateau labels; produces the same labels
/// as [`merge_plateaus_union_find`]. Returns the number of outer passes.
pub fn merge_plateaus_relax(
    states: &StateField,
    labels: &mut LabelField,
    conn: Connectivity,
    dims: &[usize],
) -> Result<usize> {
    let lat = Lattice::new(dims, conn)?;
    if states.len() != lat.len() || labels.len() != lat.len() {
        return Err(Error::Input("field lengths do not match dims".into()));
    }
    merge::merge_relax(&lat, states.as_atomics(), labels.as_atomics())
}
