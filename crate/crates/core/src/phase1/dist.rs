//! Upper bound on transport distance of a production assignment.

use thiserror::Error;

use crate::dataset::Dataset;
use crate::model::{LinkIdx, PartIdx, ProductionAssignment, UnitIdx};
use crate::network::{candidate_routes, DEFAULT_MAX_WAREHOUSES};
use crate::scalar::Scalar;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DistError {
    #[error("part `{part}` cannot travel from `{from}` to `{to}` on any route")]
    Disconnected { part: String, from: String, to: String },
}

/// Per (part, producer, consumer) distance bound, precomputed for every
/// pair a bill-of-materials edge can induce.
///
/// Same unit: zero. A direct link with a container the part fits: the
/// longest of its alternatives. Otherwise the shortest warehouse route whose
/// every leg has a fitting alternative, each leg counted at its longest
/// alternative. `None` when no such route exists.
#[derive(Clone, Debug)]
pub struct PairBounds<S> {
    /// Indexed by part, then producer position × consumer position.
    table: Vec<Vec<Option<S>>>,
}

fn leg_max<S: Scalar>(ds: &Dataset<S>, p: PartIdx, l: LinkIdx) -> Option<S> {
    let alts = ds.link_alternatives(l);
    if !alts.iter().any(|&(m, _)| ds.part_fits_mean(p, m)) {
        return None;
    }
    alts.iter().map(|&(_, d)| d).reduce(S::max)
}

/// Bound for one pair, computed without the table.
pub fn pair_bound<S: Scalar>(
    ds: &Dataset<S>,
    p: PartIdx,
    u1: UnitIdx,
    u2: UnitIdx,
    max_warehouses: usize,
) -> Option<S> {
    if u1 == u2 {
        return Some(S::zero());
    }
    let routes = candidate_routes(ds, u1, u2, max_warehouses);
    if let Some(first) = routes.first() {
        if first.len() == 1 {
            if let Some(d) = leg_max(ds, p, first[0]) {
                return Some(d);
            }
        }
    }
    routes
        .iter()
        .filter(|r| r.len() > 1)
        .filter_map(|r| r.iter().map(|&l| leg_max(ds, p, l)).sum::<Option<S>>())
        .reduce(S::min)
}

impl<S: Scalar> PairBounds<S> {
    pub fn new(ds: &Dataset<S>) -> Self {
        Self::with_max_warehouses(ds, DEFAULT_MAX_WAREHOUSES)
    }

    pub fn with_max_warehouses(ds: &Dataset<S>, max_warehouses: usize) -> Self {
        let table = (0..ds.part_count())
            .map(|i| {
                let p = PartIdx(i);
                let Some((parent, _)) = ds.parent(p) else {
                    return Vec::new();
                };
                let mut row = Vec::new();
                for &u1 in ds.producers(p) {
                    for &u2 in ds.producers(parent) {
                        row.push(pair_bound(ds, p, u1, u2, max_warehouses));
                    }
                }
                row
            })
            .collect();
        PairBounds { table }
    }

    /// Bound for child `p` made at `u1` and consumed at `u2`.
    pub fn get(&self, ds: &Dataset<S>, p: PartIdx, u1: UnitIdx, u2: UnitIdx) -> Option<S> {
        let (parent, _) = ds.parent(p)?;
        let i = ds.producers(p).binary_search(&u1).ok()?;
        let j = ds.producers(parent).binary_search(&u2).ok()?;
        self.table[p.0][i * ds.producers(parent).len() + j]
    }

    /// Sum of pair bounds over every child-parent producer pair present in
    /// `assignment`. Pairs are counted once each, unweighted by share.
    pub fn total(&self, ds: &Dataset<S>, assignment: &ProductionAssignment<S>) -> Result<S, DistError> {
        let mut sum = S::zero();
        for (p, allocs) in assignment.iter() {
            let Some((parent, _)) = ds.parent(p) else { continue };
            let Some(consumers) = assignment.get(parent) else {
                continue;
            };
            for a in allocs {
                for c in consumers {
                    match self.get(ds, p, a.unit, c.unit) {
                        Some(d) => sum += d,
                        None => {
                            return Err(DistError::Disconnected {
                                part: ds.part(p).id.clone(),
                                from: ds.unit(a.unit).id.clone(),
                                to: ds.unit(c.unit).id.clone(),
                            })
                        }
                    }
                }
            }
        }
        Ok(sum)
    }
}

/// Distance bound of a complete assignment.
pub fn dist_upper_bound<S: Scalar>(assignment: &ProductionAssignment<S>, ds: &Dataset<S>) -> Result<S, DistError> {
    PairBounds::new(ds).total(ds, assignment)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::load_dataset_from_str;
    use crate::model::{Allocation, SourcingMode};
    use crate::test_fixtures::CHAIN;

    fn chain() -> Dataset {
        load_dataset_from_str(CHAIN).unwrap()
    }

    fn single(ds: &Dataset) -> ProductionAssignment<f64> {
        let mut a = ProductionAssignment::new(SourcingMode::Single, 1);
        for (p, u) in [("R", 0), ("A", 1), ("B", 2)] {
            a.assign(
                ds.part_idx(p).unwrap(),
                vec![Allocation {
                    unit: UnitIdx(u),
                    share: 1.0,
                }],
            );
        }
        a
    }

    #[test]
    fn direct_link_counts_its_longest_alternative() {
        let ds = chain();
        let a = ds.part_idx("A").unwrap();
        assert_eq!(pair_bound(&ds, a, UnitIdx(1), UnitIdx(0), 2), Some(100.0));
    }

    #[test]
    fn warehouse_route_sums_leg_maxima() {
        let ds = chain();
        let b = ds.part_idx("B").unwrap();
        assert_eq!(pair_bound(&ds, b, UnitIdx(2), UnitIdx(1), 2), Some(5.0 + 12.0));
    }

    #[test]
    fn chain_total_is_hand_sum() {
        let ds = chain();
        assert_eq!(dist_upper_bound(&single(&ds), &ds), Ok(117.0));
    }

    #[test]
    fn empty_assignment_is_zero() {
        let ds = chain();
        assert_eq!(
            dist_upper_bound(&ProductionAssignment::new(SourcingMode::Single, 1), &ds),
            Ok(0.0)
        );
    }

    #[test]
    fn no_warehouses_allowed_disconnects() {
        let ds = chain();
        let b = ds.part_idx("B").unwrap();
        assert_eq!(pair_bound(&ds, b, UnitIdx(2), UnitIdx(1), 0), None);
    }
}
