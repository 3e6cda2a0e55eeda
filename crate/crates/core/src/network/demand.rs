use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use super::build::{NetworkError, TransportNetwork};
use crate::batching::rides;
use crate::dataset::Dataset;
use crate::model::{PartIdx, UnitIdx};
use crate::scalar::Scalar;

/// Production requirement of one part at one unit.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NodeDemand<S> {
    pub part: PartIdx,
    pub unit: UnitIdx,
    pub quantity: u64,
    /// Latest completion, hours before the final products are complete.
    pub offset_h: S,
}

/// Quantities and timing for `products` final products.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DemandSchedule<S> {
    pub products: u64,
    pub takt_h: S,
    /// Final-assembly window, `products × takt_h`.
    pub window_h: S,
    /// Sorted by (part, unit).
    pub nodes: Vec<NodeDemand<S>>,
    /// Indexed by flow id.
    pub flow_quantity: Vec<u64>,
}

impl<S: Scalar> DemandSchedule<S> {
    pub fn node(&self, part: PartIdx, unit: UnitIdx) -> Option<&NodeDemand<S>> {
        self.nodes
            .binary_search_by(|n| (n.part, n.unit).cmp(&(part, unit)))
            .ok()
            .map(|i| &self.nodes[i])
    }

    /// Rides the alternative `edge` needs for its flow, `None` if the part
    /// does not fit its container.
    pub fn rides(&self, net: &TransportNetwork<S>, edge: usize) -> Option<u64> {
        let e = net.edge_ref(edge);
        rides(self.flow_quantity[e.flow], net.alt(e).batch_size)
    }

    /// Ride count per edge id, zero where the part does not fit.
    pub fn edge_rides(&self, net: &TransportNetwork<S>) -> Vec<u64> {
        (0..net.edge_count()).map(|e| self.rides(net, e).unwrap_or(0)).collect()
    }
}

/// Rounds up, ignoring representation noise just above an integer.
pub fn ceil_count<S: Scalar>(x: S) -> u64 {
    let slack = S::tolerance() * x.abs().max(S::one());
    (x - slack).ceil().max(S::zero()).to_u64().unwrap_or(u64::MAX)
}

/// Fastest single-ride duration over the routes of a flow, counting only
/// alternatives the part fits.
fn fastest_ride_h<S: Scalar>(net: &TransportNetwork<S>, flow: usize) -> S {
    net.flows[flow]
        .routes
        .iter()
        .filter_map(|r| {
            r.hops
                .iter()
                .map(|h| {
                    h.alternatives
                        .iter()
                        .filter(|a| a.batch_size > 0)
                        .map(|a| a.distance_km / net.mean(a.mean).speed_km_per_h)
                        .reduce(S::min)
                })
                .sum::<Option<S>>()
        })
        .reduce(S::min)
        .unwrap_or_else(S::zero)
}

/// Spreads the final-product demand down the part tree.
///
/// Each final-assembly unit builds `ceil(K × share)` products. A consumer
/// building `q` of a part needs `q × quantity` of each child, split over the
/// child's producers by share and rounded up per producer. Completion
/// offsets add the consumer's production time and the fastest ride of the
/// flow; a unit feeding several consumers takes the earliest deadline.
pub fn propagate_demand<S: Scalar>(
    net: &TransportNetwork<S>,
    ds: &Dataset<S>,
    products: u64,
    takt_h: S,
) -> Result<DemandSchedule<S>, NetworkError> {
    if products == 0 || takt_h.is_nan() || takt_h <= S::zero() {
        return Err(NetworkError::Demand {
            products,
            takt_h: takt_h.to_string(),
        });
    }
    let k = S::from_count(products);
    let mut nodes: BTreeMap<(PartIdx, UnitIdx), (u64, S)> = BTreeMap::new();
    let mut flow_quantity = vec![0u64; net.flows.len()];
    for a in &net.parts[net.root.0].producers {
        nodes.insert((net.root, a.unit), (ceil_count(k * a.share), S::zero()));
    }

    let mut order = vec![net.root];
    let mut i = 0;
    while i < order.len() {
        let p = order[i];
        i += 1;
        for &(c, qty) in &net.parts[p.0].children {
            order.push(c);
            let consumers: Vec<(UnitIdx, u64, S)> = nodes
                .range((p, UnitIdx(0))..=(p, UnitIdx(usize::MAX)))
                .map(|(&(_, u), &(q, o))| (u, q, o))
                .collect();
            for (u, q, offset) in consumers {
                let need = S::from_count(q * u64::from(qty));
                let ready = offset + ds.production_hours(u) * S::from_count(q);
                for a in &net.parts[c.0].producers {
                    let supply = ceil_count(need * a.share);
                    let (deadline, f) = if a.unit == u {
                        (ready, None)
                    } else {
                        let f = net
                            .flow_index(c, a.unit, u)
                            .expect("flow for every producer/consumer pair");
                        (ready + fastest_ride_h(net, f), Some(f))
                    };
                    if let Some(f) = f {
                        flow_quantity[f] = supply;
                    }
                    let e = nodes.entry((c, a.unit)).or_insert((0, deadline));
                    e.0 += supply;
                    e.1 = e.1.max(deadline);
                }
            }
        }
    }

    Ok(DemandSchedule {
        products,
        takt_h,
        window_h: k * takt_h,
        nodes: nodes
            .into_iter()
            .map(|((part, unit), (quantity, offset_h))| NodeDemand {
                part,
                unit,
                quantity,
                offset_h,
            })
            .collect(),
        flow_quantity,
    })
}
