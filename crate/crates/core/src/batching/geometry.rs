use serde::{Deserialize, Serialize};

use super::Dims;

/// Axis permutations; orientation `i` maps box axis `ORIENTATIONS[i][k]` onto container axis `k`.
pub const ORIENTATIONS: [[usize; 3]; 6] = [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];

pub fn orient(d: Dims, perm: [usize; 3]) -> Dims {
    [d[perm[0]], d[perm[1]], d[perm[2]]]
}

pub(crate) fn fits_oriented(d: Dims, space: Dims) -> bool {
    d[0] <= space[0] && d[1] <= space[1] && d[2] <= space[2]
}

/// Item `item` placed with its minimum corner at `position`, rotated by
/// orientation index `orientation`; `dims` is the rotated extent.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Placement {
    pub item: usize,
    pub position: [u64; 3],
    pub orientation: u8,
    pub dims: Dims,
}

impl Placement {
    pub fn max_corner(&self) -> [u64; 3] {
        [
            self.position[0] + self.dims[0],
            self.position[1] + self.dims[1],
            self.position[2] + self.dims[2],
        ]
    }

    pub fn overlaps(&self, other: &Placement) -> bool {
        let a = self.max_corner();
        let b = other.max_corner();
        (0..3).all(|k| self.position[k] < b[k] && other.position[k] < a[k])
    }

    pub fn volume(&self) -> u128 {
        self.dims.iter().map(|&d| d as u128).product()
    }
}

/// Checks that every placement lies inside `container` and no two overlap.
pub fn validate_placements(container: Dims, placements: &[Placement]) -> Result<(), String> {
    for (i, p) in placements.iter().enumerate() {
        let hi = p.max_corner();
        if (0..3).any(|k| hi[k] > container[k]) {
            return Err(format!("placement {i} ({p:?}) leaves container {container:?}"));
        }
        for (j, q) in placements.iter().enumerate().skip(i + 1) {
            if p.overlaps(q) {
                return Err(format!("placements {i} and {j} overlap"));
            }
        }
    }
    Ok(())
}

/// Axis-aligned empty region inside a container.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) struct Space {
    pub lo: [u64; 3],
    pub hi: [u64; 3],
}

impl Space {
    pub fn whole(container: Dims) -> Self {
        Space {
            lo: [0; 3],
            hi: container,
        }
    }

    pub fn size(&self) -> Dims {
        [
            self.hi[0] - self.lo[0],
            self.hi[1] - self.lo[1],
            self.hi[2] - self.lo[2],
        ]
    }

    pub fn volume(&self) -> u128 {
        self.size().iter().map(|&d| d as u128).product()
    }

    fn contains(&self, other: &Space) -> bool {
        (0..3).all(|k| self.lo[k] <= other.lo[k] && other.hi[k] <= self.hi[k])
    }

    fn intersects(&self, lo: [u64; 3], hi: [u64; 3]) -> bool {
        (0..3).all(|k| self.lo[k] < hi[k] && lo[k] < self.hi[k])
    }
}

/// Maximal empty spaces of one container.
#[derive(Clone, Debug)]
pub(crate) struct SpaceSet {
    pub spaces: Vec<Space>,
}

impl SpaceSet {
    pub fn new(container: Dims) -> Self {
        SpaceSet {
            spaces: vec![Space::whole(container)],
        }
    }

    /// Carves the box `[lo, hi)` out of every space it touches, keeping the
    /// maximal remainders. `min_side` drops slivers no remaining item can use.
    pub fn occupy(&mut self, lo: [u64; 3], hi: [u64; 3], min_side: u64) {
        let mut next = Vec::with_capacity(self.spaces.len() + 6);
        for s in self.spaces.drain(..) {
            if !s.intersects(lo, hi) {
                next.push(s);
                continue;
            }
            for k in 0..3 {
                if lo[k] > s.lo[k] {
                    let mut t = s;
                    t.hi[k] = lo[k];
                    next.push(t);
                }
                if hi[k] < s.hi[k] {
                    let mut t = s;
                    t.lo[k] = hi[k];
                    next.push(t);
                }
            }
        }
        next.retain(|s| s.size().iter().all(|&d| d >= min_side.max(1)));
        // Drop spaces nested in another one; keep the first of equal pairs.
        let mut keep = vec![true; next.len()];
        for i in 0..next.len() {
            if !keep[i] {
                continue;
            }
            for j in 0..next.len() {
                if i != j && keep[j] && next[j].contains(&next[i]) && (next[i] != next[j] || j < i) {
                    keep[i] = false;
                    break;
                }
            }
        }
        self.spaces = next.into_iter().zip(keep).filter_map(|(s, k)| k.then_some(s)).collect();
    }
}
