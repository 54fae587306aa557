//! Deterministic, data-parallel watershed and waterfall transforms for 1D,
//! 2D and 3D grayscale images.
//!
//! The watershed interprets intensity as terrain elevation and partitions the
//! image into catchment basins, one per regional minimum. Basins are built by
//! following paths of steepest descent, resolving plateaux with barrier-
//! separated parallel sweeps, compressing label paths, and merging minimal
//! plateau labels through a lock-free union–find. Repeated image
//! reconstruction (raising each basin to its lowest pass point) followed by a
//! fresh watershed yields a waterfall hierarchy of coarser partitions.
//!
//! Three algorithm variants are provided ([`Variant::Prw`], [`Variant::Pruf`],
//! [`Variant::Apruf`]) together with three plateau-resolution strategies
//! ([`Strategy::Sync`], [`Strategy::TileAsync`], [`Strategy::Balanced`]).
//! Results are fully deterministic: the `Sync` and `Balanced` strategies
//! produce bit-identical label fields for any worker count, and `TileAsync`
//! is deterministic for a fixed tile size.
//!
//! ```
//! use basin::{watershed, Connectivity, GridImage, Scheme, WatershedConfig};
//! use basin::{Strategy, Variant};
//!
//! let img = GridImage::new(vec![12], vec![75u8, 89, 89, 89, 89, 89, 89, 89, 89, 89, 89, 81])
//!     .unwrap();
//! let cfg = WatershedConfig::new(
//!     Variant::Pruf,
//!     Strategy::Balanced,
//!     Connectivity::new(Scheme::VonNeumann, 1).unwrap(),
//! );
//! let result = watershed(&img, &cfg).unwrap();
//! assert_eq!(result.region_count, 2);
//! ```

pub mod error;
pub mod grid;
pub mod mem;
pub mod oracle;
pub mod preprocess;
pub mod unionfind;
pub mod waterfall;
pub mod watershed;

pub use error::{Error, Result};
pub use grid::{Connectivity, GridImage, Intensity, LabelField, Scheme, StateField};
pub use watershed::{watershed, Strategy, Variant, WatershedConfig, WatershedResult};
pub use waterfall::{build_hierarchy, Hierarchy};
