//! Largest Area Fit First: build horizontal layers, each seeded by the
//! remaining item with the largest footprint and filled with guillotine cuts.

use super::geometry::{fits_oriented, orient, Placement, ORIENTATIONS};
use super::grasp::{check_items, volume};
use super::{BatchError, BatchResult, Dims};

#[derive(Clone, Copy, Debug)]
struct Rect {
    x: u64,
    y: u64,
    w: u64,
    d: u64,
}

impl Rect {
    fn area(&self) -> u128 {
        self.w as u128 * self.d as u128
    }
}

/// Orientation of `bbox` with the largest footprint that fits a `w × d` area
/// and height at most `max_h`; ties go to the lower height.
fn best_orientation(bbox: Dims, w: u64, d: u64, max_h: u64) -> Option<(usize, Dims)> {
    let mut best: Option<(usize, Dims)> = None;
    for (oi, &perm) in ORIENTATIONS.iter().enumerate() {
        let o = orient(bbox, perm);
        if !fits_oriented(o, [w, d, max_h]) {
            continue;
        }
        let better = match best {
            None => true,
            Some((_, b)) => {
                let (fa, fb) = (o[0] as u128 * o[1] as u128, b[0] as u128 * b[1] as u128);
                fa > fb || (fa == fb && o[2] < b[2])
            }
        };
        if better {
            best = Some((oi, o));
        }
    }
    best
}

fn split(r: Rect, used: Dims) -> [Rect; 2] {
    // Guillotine cut keeping the larger leftover rectangle whole.
    let right_full = Rect {
        x: r.x + used[0],
        y: r.y,
        w: r.w - used[0],
        d: r.d,
    };
    let top_part = Rect {
        x: r.x,
        y: r.y + used[1],
        w: used[0],
        d: r.d - used[1],
    };
    let right_part = Rect {
        x: r.x + used[0],
        y: r.y,
        w: r.w - used[0],
        d: used[1],
    };
    let top_full = Rect {
        x: r.x,
        y: r.y + used[1],
        w: r.w,
        d: r.d - used[1],
    };
    if right_full.area().max(top_part.area()) >= right_part.area().max(top_full.area()) {
        [right_full, top_part]
    } else {
        [right_part, top_full]
    }
}

/// Deterministic layer packing of `qty` copies of each bounding box.
pub fn pack_laff(items: &[(Dims, u64)], container: Dims) -> Result<Vec<BatchResult>, BatchError> {
    check_items(items, container)?;
    let max_face = |d: Dims| {
        let mut s = d;
        s.sort_unstable();
        s[2] as u128 * s[1] as u128
    };
    let mut remaining: Vec<usize> = (0..items.len())
        .flat_map(|i| std::iter::repeat_n(i, items[i].1 as usize))
        .collect();
    remaining.sort_by(|&a, &b| {
        let (da, db) = (items[a].0, items[b].0);
        max_face(db)
            .cmp(&max_face(da))
            .then(volume(db).cmp(&volume(da)))
            .then(a.cmp(&b))
    });

    let mut out = Vec::new();
    while !remaining.is_empty() {
        let mut placements = Vec::new();
        let mut z = 0u64;
        loop {
            let height_left = container[2] - z;
            let seed = remaining.iter().enumerate().find_map(|(k, &t)| {
                best_orientation(items[t].0, container[0], container[1], height_left).map(|o| (k, t, o))
            });
            let Some((k, t, (oi, o))) = seed else { break };
            remaining.remove(k);
            let layer_h = o[2];
            placements.push(Placement {
                item: t,
                position: [0, 0, z],
                orientation: oi as u8,
                dims: o,
            });
            let mut free: Vec<Rect> = split(
                Rect {
                    x: 0,
                    y: 0,
                    w: container[0],
                    d: container[1],
                },
                o,
            )
            .into_iter()
            .filter(|r| r.area() > 0)
            .collect();
            while !free.is_empty() {
                free.sort_by(|a, b| b.area().cmp(&a.area()).then((a.x, a.y).cmp(&(b.x, b.y))));
                let r = free.remove(0);
                let pick = remaining
                    .iter()
                    .enumerate()
                    .find_map(|(k, &t)| best_orientation(items[t].0, r.w, r.d, layer_h).map(|o| (k, t, o)));
                if let Some((k, t, (oi, o))) = pick {
                    remaining.remove(k);
                    placements.push(Placement {
                        item: t,
                        position: [r.x, r.y, z],
                        orientation: oi as u8,
                        dims: o,
                    });
                    free.extend(split(r, o).into_iter().filter(|r| r.area() > 0));
                }
            }
            z += layer_h;
        }
        out.push(BatchResult {
            per_container_count: placements.len() as u64,
            n_containers: 1,
            placements,
        });
    }
    Ok(out)
}
