//! Container loading: how many parts fit a transport container and how many
//! rides a demand needs.
//!
//! Parts are bounding boxes and may be rotated into any of the six
//! axis-aligned orientations. Single batching packs one part type on a
//! regular grid; mixed batching packs several types with either the GRASP
//! packer ([`pack_mixed`]) or the layer-building LAFF packer ([`pack_laff`]).

mod geometry;
mod grasp;
mod laff;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use crate::model::Dims;
pub use geometry::{orient, validate_placements, Placement, ORIENTATIONS};
pub use grasp::{pack_mixed, pack_mixed_with, GraspConfig};
pub use laff::pack_laff;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum BatchError {
    #[error("item {item} with bounding box {bbox:?} fits no orientation of container {container:?}")]
    ItemDoesNotFit { item: usize, bbox: Dims, container: Dims },
    #[error("dimensions must be positive: {0:?}")]
    ZeroDimension(Dims),
}

/// Outcome of loading one or more containers.
///
/// For single batching `placements` is empty and the counts describe the
/// whole demand. Mixed packers return one result per opened container with
/// `n_containers == 1` and explicit placements.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BatchResult {
    pub per_container_count: u64,
    pub n_containers: u64,
    pub placements: Vec<Placement>,
}

impl BatchResult {
    pub fn is_feasible(&self) -> bool {
        self.per_container_count > 0
    }
}

/// Whether `part` fits inside `container` in at least one of the six
/// axis-aligned orientations.
pub fn fits(part: Dims, container: Dims) -> bool {
    ORIENTATIONS
        .iter()
        .any(|&o| geometry::fits_oriented(orient(part, o), container))
}

/// Best regular-grid count of `part` in `container` and the orientation
/// that achieves it (first one on ties).
pub fn grid_capacity(part: Dims, container: Dims) -> (u64, Option<usize>) {
    let mut best = (0, None);
    for (i, &o) in ORIENTATIONS.iter().enumerate() {
        let d = orient(part, o);
        let n = (0..3).map(|k| container[k] / d[k]).product::<u64>();
        if n > best.0 {
            best = (n, Some(i));
        }
    }
    best
}

/// Single-type batching: per-container count and number of rides for `demand`.
///
/// A part that does not fit yields a count of zero and zero containers; the
/// caller treats the transport alternative as invalid.
pub fn pack_single(part: Dims, container: Dims, demand: u64) -> BatchResult {
    let (count, _) = grid_capacity(part, container);
    BatchResult {
        per_container_count: count,
        n_containers: rides(demand, count).unwrap_or(0),
        placements: Vec::new(),
    }
}

/// `ceil(demand / per_container)`, or `None` when nothing fits.
pub fn rides(demand: u64, per_container: u64) -> Option<u64> {
    if per_container == 0 {
        None
    } else {
        Some(demand.div_ceil(per_container))
    }
}

/// Explicit grid layout of `count` copies of item `item` in one container.
pub(crate) fn grid_layout(item: usize, part: Dims, container: Dims, count: u64) -> Vec<Placement> {
    let (cap, orientation) = grid_capacity(part, container);
    let Some(o) = orientation else {
        return Vec::new();
    };
    let d = orient(part, ORIENTATIONS[o]);
    let nx = container[0] / d[0];
    let ny = container[1] / d[1];
    let mut out = Vec::with_capacity(count.min(cap) as usize);
    for k in 0..count.min(cap) {
        let x = k % nx;
        let y = (k / nx) % ny;
        let z = k / (nx * ny);
        out.push(Placement {
            item,
            position: [x * d[0], y * d[1], z * d[2]],
            orientation: o as u8,
            dims: d,
        });
    }
    out
}

/// Record mirroring the fields of a batching log entry.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BatchRecord {
    pub part_size: Dims,
    pub container_size: Dims,
    pub demand: u64,
    pub nb_of_containers: u64,
    pub part: String,
    pub transportation: String,
}

impl BatchRecord {
    pub fn new(part: &str, part_size: Dims, transportation: &str, container_size: Dims, demand: u64) -> Self {
        BatchRecord {
            part_size,
            container_size,
            demand,
            nb_of_containers: pack_single(part_size, container_size, demand).n_containers,
            part: part.to_string(),
            transportation: transportation.to_string(),
        }
    }
}

impl std::fmt::Display for BatchRecord {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let dims = |d: Dims| format!("[{}, {}, {}]", d[0], d[1], d[2]);
        writeln!(f, "part size:          {}", dims(self.part_size))?;
        writeln!(f, "container size:     {}", dims(self.container_size))?;
        writeln!(f, "demand:             {}", self.demand)?;
        writeln!(f, "nb of containers:   {}", self.nb_of_containers)?;
        writeln!(f, "part:               {}", self.part)?;
        write!(f, "transportation:     {}", self.transportation)
    }
}
