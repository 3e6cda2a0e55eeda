use std::collections::BTreeSet;

use super::{check, fits_any, permutations, OracleBudget, OracleError};

/// Search nodes allowed per subset before the oracle gives up.
const NODE_LIMIT: u64 = 20_000_000;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PackingOptimum {
    /// Fewest containers; `None` when some item fits no orientation.
    pub containers: Option<u64>,
    /// Expanded item positions per container, for the first optimum found.
    pub bins: Vec<Vec<usize>>,
}

struct Lattice<'a> {
    boxes: &'a [[u64; 3]],
    container: [u64; 3],
    nodes: u64,
}

type Cuboid = ([u64; 3], [u64; 3]);

impl Lattice<'_> {
    /// Coordinates along `axis` reachable as sums of sides of the boxes in `members`.
    fn coords(&self, members: &[usize], axis: usize) -> Vec<u64> {
        let mut sums = BTreeSet::from([0u64]);
        for &j in members {
            let sides: BTreeSet<u64> = self.boxes[j].into_iter().collect();
            let next: Vec<u64> = sums
                .iter()
                .flat_map(|&s| sides.iter().map(move |&d| s + d))
                .filter(|&x| x <= self.container[axis])
                .collect();
            sums.extend(next);
        }
        sums.into_iter().collect()
    }

    fn place(
        &mut self,
        members: &[usize],
        k: usize,
        grid: &[Vec<u64>; 3],
        placed: &mut Vec<Cuboid>,
    ) -> Result<bool, OracleError> {
        if k == members.len() {
            return Ok(true);
        }
        let c = self.container;
        let shapes: BTreeSet<[u64; 3]> = permutations(self.boxes[members[k]]).into_iter().collect();
        for d in shapes {
            if (0..3).any(|a| d[a] > c[a]) {
                continue;
            }
            for &x in grid[0].iter().take_while(|&&x| x + d[0] <= c[0]) {
                for &y in grid[1].iter().take_while(|&&y| y + d[1] <= c[1]) {
                    for &z in grid[2].iter().take_while(|&&z| z + d[2] <= c[2]) {
                        self.nodes += 1;
                        check("packing search nodes", self.nodes, NODE_LIMIT)?;
                        let lo = [x, y, z];
                        let hi = [x + d[0], y + d[1], z + d[2]];
                        if placed.iter().any(|(l, h)| (0..3).all(|a| lo[a] < h[a] && l[a] < hi[a])) {
                            continue;
                        }
                        placed.push((lo, hi));
                        let ok = self.place(members, k + 1, grid, placed)?;
                        placed.pop();
                        if ok {
                            return Ok(true);
                        }
                    }
                }
            }
        }
        Ok(false)
    }

    fn one_container(&mut self, mut members: Vec<usize>) -> Result<bool, OracleError> {
        let volume = |d: [u64; 3]| d.iter().map(|&x| x as u128).product::<u128>();
        let total: u128 = members.iter().map(|&j| volume(self.boxes[j])).sum();
        if total > volume(self.container) {
            return Ok(false);
        }
        members.sort_by_key(|&j| std::cmp::Reverse(volume(self.boxes[j])));
        let grid = [
            self.coords(&members, 0),
            self.coords(&members, 1),
            self.coords(&members, 2),
        ];
        self.nodes = 0;
        self.place(&members, 0, &grid, &mut Vec::new())
    }
}

/// Fewest containers holding `items` (bounding box, quantity), exact over
/// placements whose coordinates are sums of item sides.
///
/// Every packing can be pushed towards the origin until each box rests on a
/// wall or another box along every axis, which puts its corner on that
/// lattice; the search is therefore complete for the quantities allowed by
/// the budget.
pub fn enumerate_packings(
    items: &[([u64; 3], u64)],
    container: [u64; 3],
    budget: &OracleBudget,
) -> Result<PackingOptimum, OracleError> {
    let total: u64 = items.iter().map(|(_, q)| *q).sum();
    check("packed items", total, budget.max_packed_items as u64)?;
    let boxes: Vec<[u64; 3]> = items
        .iter()
        .flat_map(|&(d, q)| std::iter::repeat_n(d, q as usize))
        .collect();
    if boxes.iter().any(|&d| !fits_any(d, container) || d.contains(&0)) {
        return Ok(PackingOptimum {
            containers: None,
            bins: Vec::new(),
        });
    }
    let n = boxes.len();
    let full = (1usize << n) - 1;
    let mut lattice = Lattice {
        boxes: &boxes,
        container,
        nodes: 0,
    };
    let mut fits = vec![false; full + 1];
    fits[0] = true;
    for mask in 1..=full {
        // a subset of an unpackable set is checked first, so supersets can be skipped
        let members: Vec<usize> = (0..n).filter(|&i| mask >> i & 1 == 1).collect();
        let sub_ok = members.iter().all(|&i| fits[mask & !(1 << i)]);
        fits[mask] = sub_ok && lattice.one_container(members)?;
    }
    // best[mask] = (containers, first block)
    let mut best: Vec<(u64, usize)> = vec![(u64::MAX, 0); full + 1];
    best[0] = (0, 0);
    for mask in 1..=full {
        let low = mask & mask.wrapping_neg();
        let mut s = mask;
        while s > 0 {
            if s & low != 0 && fits[s] && best[mask ^ s].0 != u64::MAX && best[mask ^ s].0 + 1 < best[mask].0 {
                best[mask] = (best[mask ^ s].0 + 1, s);
            }
            s = (s - 1) & mask;
        }
    }
    let mut bins = Vec::new();
    let mut rest = full;
    while rest != 0 {
        let s = best[rest].1;
        bins.push((0..n).filter(|&i| s >> i & 1 == 1).collect());
        rest ^= s;
    }
    Ok(PackingOptimum {
        containers: Some(best[full].0),
        bins,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn opt(items: &[([u64; 3], u64)], c: [u64; 3]) -> Option<u64> {
        enumerate_packings(items, c, &OracleBudget::default())
            .unwrap()
            .containers
    }

    #[test]
    fn single_item() {
        assert_eq!(opt(&[([5, 5, 5], 1)], [10, 10, 10]), Some(1));
        assert_eq!(opt(&[([11, 1, 1], 1)], [10, 10, 10]), None);
    }

    #[test]
    fn two_halves_share_a_container() {
        assert_eq!(opt(&[([10, 10, 5], 1), ([5, 10, 10], 1)], [10, 10, 10]), Some(1));
        assert_eq!(opt(&[([10, 10, 6], 2)], [10, 10, 10]), Some(2));
    }

    #[test]
    fn rotation_is_needed() {
        // two 6×4×10 plates fit side by side only if turned the same way
        assert_eq!(opt(&[([4, 6, 10], 1), ([10, 4, 6], 1)], [8, 6, 10]), Some(1));
    }

    #[test]
    fn five_flat_parts_fill_one_container() {
        assert_eq!(opt(&[([6800, 400, 1500], 5)], [2330, 11998, 2350]), Some(1));
    }

    #[test]
    fn interlocking_boxes_need_mixed_corners() {
        // a pinwheel of four 2×1 slabs around a unit hole in a 3×3 square
        let c = [3, 3, 1];
        assert_eq!(opt(&[([2, 1, 1], 4), ([1, 1, 1], 1)], c), Some(1));
    }

    #[test]
    fn volume_bound_splits() {
        assert_eq!(opt(&[([5, 5, 5], 5)], [10, 10, 5]), Some(2));
    }

    #[test]
    fn refuses_six_items() {
        assert!(enumerate_packings(&[([1, 1, 1], 6)], [9, 9, 9], &OracleBudget::default()).is_err());
    }
}
