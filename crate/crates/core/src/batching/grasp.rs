//! GRASP container loading: randomized greedy construction over maximal empty
//! spaces, then relocate and swap moves between containers.

use std::cmp::Ordering;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::geometry::{fits_oriented, orient, Placement, SpaceSet, ORIENTATIONS};
use super::{grid_capacity, grid_layout, BatchError, BatchResult, Dims};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraspConfig {
    /// Size of the restricted candidate list during construction.
    pub rcl_size: usize,
    pub iterations: usize,
    pub local_search: bool,
    /// Cap on bin repacks tried by one local-search call.
    pub max_repacks: usize,
}

impl Default for GraspConfig {
    fn default() -> Self {
        GraspConfig {
            rcl_size: 3,
            iterations: 200,
            local_search: true,
            max_repacks: 400,
        }
    }
}

pub(crate) fn check_items(items: &[(Dims, u64)], container: Dims) -> Result<(), BatchError> {
    if container.contains(&0) {
        return Err(BatchError::ZeroDimension(container));
    }
    for (i, &(bbox, _)) in items.iter().enumerate() {
        if bbox.contains(&0) {
            return Err(BatchError::ZeroDimension(bbox));
        }
        if !super::fits(bbox, container) {
            return Err(BatchError::ItemDoesNotFit {
                item: i,
                bbox,
                container,
            });
        }
    }
    Ok(())
}

pub(crate) fn volume(d: Dims) -> u128 {
    d.iter().map(|&x| x as u128).product()
}

/// Containers for a single item type laid out on the best grid.
pub(crate) fn single_type_bins(item: usize, bbox: Dims, qty: u64, container: Dims) -> Vec<BatchResult> {
    let (cap, _) = grid_capacity(bbox, container);
    let mut out = Vec::new();
    let mut left = qty;
    while left > 0 {
        let n = left.min(cap);
        out.push(BatchResult {
            per_container_count: n,
            n_containers: 1,
            placements: grid_layout(item, bbox, container, n),
        });
        left -= n;
    }
    out
}

/// Corner height, depth, width, then leftover space volume; smaller is better.
type CornerRank = (u64, u64, u64, u128);

#[derive(Clone, Debug)]
struct Bin {
    spaces: SpaceSet,
    placements: Vec<Placement>,
    volume: u128,
}

struct Ctx<'a> {
    items: &'a [(Dims, u64)],
    container: Dims,
    min_side: u64,
}

impl Ctx<'_> {
    fn new_bin(&self) -> Bin {
        Bin {
            spaces: SpaceSet::new(self.container),
            placements: Vec::new(),
            volume: 0,
        }
    }

    /// Candidate (space, orientation) pairs for item type `t`, best first:
    /// lowest, then rearmost, then leftmost corner, then tightest space.
    fn candidates(&self, bin: &Bin, t: usize) -> Vec<(usize, usize)> {
        let bbox = self.items[t].0;
        let mut out: Vec<(CornerRank, usize, usize, Dims)> = Vec::new();
        for (si, s) in bin.spaces.spaces.iter().enumerate() {
            let size = s.size();
            for (oi, &perm) in ORIENTATIONS.iter().enumerate() {
                let d = orient(bbox, perm);
                if !fits_oriented(d, size) {
                    continue;
                }
                if out.iter().any(|c| c.1 == si && c.3 == d) {
                    continue;
                }
                let key = (s.lo[2], s.lo[1], s.lo[0], s.volume() - volume(d));
                out.push((key, si, oi, d));
            }
        }
        out.sort_by(|a, b| a.0.cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
        out.into_iter().map(|c| (c.1, c.2)).collect()
    }

    fn place(&self, bin: &mut Bin, t: usize, space: usize, orientation: usize) {
        let d = orient(self.items[t].0, ORIENTATIONS[orientation]);
        let lo = bin.spaces.spaces[space].lo;
        let hi = [lo[0] + d[0], lo[1] + d[1], lo[2] + d[2]];
        bin.spaces.occupy(lo, hi, self.min_side);
        bin.placements.push(Placement {
            item: t,
            position: lo,
            orientation: orientation as u8,
            dims: d,
        });
        bin.volume += volume(d);
    }

    fn try_place<R: Rng + ?Sized>(&self, bin: &mut Bin, t: usize, rcl: usize, rng: &mut R) -> bool {
        let cands = self.candidates(bin, t);
        if cands.is_empty() {
            return false;
        }
        let k = if rcl <= 1 {
            0
        } else {
            rng.gen_range(0..rcl.min(cands.len()))
        };
        let (s, o) = cands[k];
        self.place(bin, t, s, o);
        true
    }

    fn construct<R: Rng + ?Sized>(&self, order: &[usize], rcl: usize, rng: &mut R) -> Vec<Bin> {
        let mut bins: Vec<Bin> = Vec::new();
        for &t in order {
            if bins.iter_mut().any(|b| self.try_place(b, t, rcl, rng)) {
                continue;
            }
            let mut b = self.new_bin();
            let placed = self.try_place(&mut b, t, rcl, rng);
            debug_assert!(placed, "item checked to fit an empty container");
            bins.push(b);
        }
        bins
    }

    /// Deterministic repack of a multiset of item types into one container.
    fn repack(&self, types: &[usize]) -> Option<Bin> {
        let mut order = types.to_vec();
        sort_by_volume(&mut order, self.items);
        let mut bin = self.new_bin();
        for &t in &order {
            let cands = self.candidates(&bin, t);
            let &(s, o) = cands.first()?;
            self.place(&mut bin, t, s, o);
        }
        Some(bin)
    }

    fn without(&self, bin: &Bin, t: usize) -> Bin {
        let mut placements = bin.placements.clone();
        let pos = placements.iter().rposition(|p| p.item == t).expect("item present");
        let removed = placements.remove(pos);
        let mut spaces = SpaceSet::new(self.container);
        for p in &placements {
            spaces.occupy(p.position, p.max_corner(), self.min_side);
        }
        Bin {
            spaces,
            placements,
            volume: bin.volume - removed.volume(),
        }
    }

    fn with(&self, bin: &Bin, t: usize) -> Option<Bin> {
        let mut b = bin.clone();
        let cands = self.candidates(&b, t);
        if let Some(&(s, o)) = cands.first() {
            self.place(&mut b, t, s, o);
            return Some(b);
        }
        let mut types: Vec<usize> = bin.placements.iter().map(|p| p.item).collect();
        types.push(t);
        self.repack(&types)
    }

    fn local_search(&self, mut bins: Vec<Bin>, budget: usize) -> Vec<Bin> {
        let cap = volume(self.container);
        let mut repacks = 0usize;
        'outer: while repacks < budget {
            let mut order: Vec<usize> = (0..bins.len()).collect();
            order.sort_by_key(|&i| (bins[i].volume, i));
            // Relocate one item from a lighter bin into a heavier one.
            for &a in &order {
                for t in distinct_types(&bins[a]) {
                    let v = volume(self.items[t].0);
                    for &b in order.iter().rev() {
                        if a == b || bins[b].volume + v > cap || bins[b].volume + v <= bins[a].volume {
                            continue;
                        }
                        repacks += 1;
                        if let Some(nb) = self.with(&bins[b], t) {
                            let na = self.without(&bins[a], t);
                            bins[b] = nb;
                            if na.placements.is_empty() {
                                bins.remove(a);
                            } else {
                                bins[a] = na;
                            }
                            continue 'outer;
                        }
                        if repacks >= budget {
                            break 'outer;
                        }
                    }
                }
            }
            // Swap a smaller item of a fuller bin with a larger item of a lighter bin.
            for &a in order.iter().rev() {
                for &b in &order {
                    if a == b {
                        continue;
                    }
                    for ta in distinct_types(&bins[a]) {
                        for tb in distinct_types(&bins[b]) {
                            let (va, vb) = (volume(self.items[ta].0), volume(self.items[tb].0));
                            if vb <= va || bins[a].volume + (vb - va) > cap {
                                continue;
                            }
                            if bins[a].volume + (vb - va) <= bins[b].volume {
                                continue;
                            }
                            repacks += 1;
                            let mut types_a: Vec<usize> = bins[a].placements.iter().map(|p| p.item).collect();
                            let mut types_b: Vec<usize> = bins[b].placements.iter().map(|p| p.item).collect();
                            replace_one(&mut types_a, ta, tb);
                            replace_one(&mut types_b, tb, ta);
                            if let (Some(na), Some(nb)) = (self.repack(&types_a), self.repack(&types_b)) {
                                bins[a] = na;
                                bins[b] = nb;
                                continue 'outer;
                            }
                            if repacks >= budget {
                                break 'outer;
                            }
                        }
                    }
                }
            }
            break;
        }
        bins
    }
}

fn distinct_types(bin: &Bin) -> Vec<usize> {
    let mut t: Vec<usize> = bin.placements.iter().map(|p| p.item).collect();
    t.sort_unstable();
    t.dedup();
    t
}

fn replace_one(types: &mut [usize], from: usize, to: usize) {
    if let Some(x) = types.iter_mut().find(|x| **x == from) {
        *x = to;
    }
}

fn sort_by_volume(order: &mut [usize], items: &[(Dims, u64)]) {
    order.sort_by(|&a, &b| volume(items[b].0).cmp(&volume(items[a].0)).then(a.cmp(&b)));
}

/// Fewer containers first, then the more uneven fill (sum of squared volumes).
fn compare(a: &[Bin], b: &[Bin]) -> Ordering {
    let sq = |bins: &[Bin]| bins.iter().map(|x| x.volume * x.volume).sum::<u128>();
    a.len().cmp(&b.len()).then_with(|| sq(b).cmp(&sq(a)))
}

/// Mixed batching with the default GRASP settings.
pub fn pack_mixed<R: Rng + ?Sized>(
    items: &[(Dims, u64)],
    container: Dims,
    rng: &mut R,
) -> Result<Vec<BatchResult>, BatchError> {
    pack_mixed_with(items, container, &GraspConfig::default(), rng)
}

/// Packs `qty` copies of each bounding box into as few containers as the
/// search finds. Returns one [`BatchResult`] per opened container.
pub fn pack_mixed_with<R: Rng + ?Sized>(
    items: &[(Dims, u64)],
    container: Dims,
    config: &GraspConfig,
    rng: &mut R,
) -> Result<Vec<BatchResult>, BatchError> {
    check_items(items, container)?;
    let active: Vec<usize> = (0..items.len()).filter(|&i| items[i].1 > 0).collect();
    match active.as_slice() {
        [] => return Ok(Vec::new()),
        &[i] => return Ok(single_type_bins(i, items[i].0, items[i].1, container)),
        _ => {}
    }
    let mut order: Vec<usize> = active
        .iter()
        .flat_map(|&i| std::iter::repeat_n(i, items[i].1 as usize))
        .collect();
    sort_by_volume(&mut order, items);
    let total: u128 = order.iter().map(|&t| volume(items[t].0)).sum();
    let lower = total.div_ceil(volume(container)).max(1) as usize;
    let ctx = Ctx {
        items,
        container,
        min_side: active.iter().map(|&i| *items[i].0.iter().min().unwrap()).min().unwrap(),
    };

    let mut best: Option<Vec<Bin>> = None;
    for it in 0..config.iterations.max(1) {
        let rcl = if it == 0 { 1 } else { config.rcl_size };
        let mut bins = ctx.construct(&order, rcl, rng);
        if config.local_search && bins.len() > lower {
            bins = ctx.local_search(bins, config.max_repacks);
        }
        if best.as_ref().is_none_or(|b| compare(&bins, b) == Ordering::Less) {
            best = Some(bins);
        }
        if best.as_ref().is_some_and(|b| b.len() <= lower) {
            break;
        }
    }
    Ok(best
        .unwrap_or_default()
        .into_iter()
        .map(|b| BatchResult {
            per_container_count: b.placements.len() as u64,
            n_containers: 1,
            placements: b.placements,
        })
        .collect())
}
