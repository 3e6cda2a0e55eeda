use crate::dataset::Dataset;
use crate::model::{LinkIdx, NodeIdx, UnitIdx, WarehouseIdx};
use crate::scalar::Scalar;

/// Default cap on warehouses per route: one near the source, one near the target.
pub const DEFAULT_MAX_WAREHOUSES: usize = 2;

/// Link sequences from `u1` to `u2` of shape `u1 -> w* -> u2`.
///
/// Listed in a fixed order: the direct link, then routes through one
/// warehouse nearby either endpoint, then routes through a warehouse nearby
/// `u1` followed by a different warehouse nearby `u2`. No fit filtering is
/// applied here.
pub fn candidate_routes<S: Scalar>(
    ds: &Dataset<S>,
    u1: UnitIdx,
    u2: UnitIdx,
    max_warehouses: usize,
) -> Vec<Vec<LinkIdx>> {
    let mut out = Vec::new();
    if u1 == u2 {
        return out;
    }
    let (a, b) = (NodeIdx::Unit(u1), NodeIdx::Unit(u2));
    if let Some(l) = ds.link_between(a, b) {
        out.push(vec![l]);
    }
    if max_warehouses >= 1 {
        let mut near: Vec<WarehouseIdx> = ds
            .warehouses_near(u1)
            .iter()
            .chain(ds.warehouses_near(u2))
            .copied()
            .collect();
        near.sort();
        near.dedup();
        for w in near {
            let w = NodeIdx::Warehouse(w);
            if let (Some(l1), Some(l2)) = (ds.link_between(a, w), ds.link_between(w, b)) {
                out.push(vec![l1, l2]);
            }
        }
    }
    if max_warehouses >= 2 {
        for &ws in ds.warehouses_near(u1) {
            for &wt in ds.warehouses_near(u2) {
                if ws == wt {
                    continue;
                }
                let (x, y) = (NodeIdx::Warehouse(ws), NodeIdx::Warehouse(wt));
                if let (Some(l1), Some(l2), Some(l3)) =
                    (ds.link_between(a, x), ds.link_between(x, y), ds.link_between(y, b))
                {
                    out.push(vec![l1, l2, l3]);
                }
            }
        }
    }
    out
}
