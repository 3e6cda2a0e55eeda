use std::collections::{BTreeMap, BTreeSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::routes::{candidate_routes, DEFAULT_MAX_WAREHOUSES};
use crate::batching::grid_capacity;
use crate::dataset::Dataset;
use crate::model::{
    Allocation, Dims, LinkIdx, MeanIdx, NodeIdx, PartIdx, ProductionAssignment, TransportMean, UnitIdx,
};
use crate::scalar::Scalar;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum NetworkError {
    #[error("part `{0}` has no producer in the assignment")]
    Unassigned(String),
    #[error("no route carries `{part}` from `{from}` to `{to}`")]
    Disconnected { part: String, from: String, to: String },
    #[error("every route for `{part}` from `{from}` to `{to}` has a leg whose containers cannot hold the part")]
    Unloadable { part: String, from: String, to: String },
    #[error("demand needs at least one final product and a positive takt, got K = {products}, takt = {takt_h} h")]
    Demand { products: u64, takt_h: String },
}

/// One transport-mean option on a route leg.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EdgeAlt<S> {
    /// Dense id, unique across the network.
    pub id: usize,
    pub mean: MeanIdx,
    pub distance_km: S,
    /// Parts of the flow's type per container; zero when the part does not fit.
    pub batch_size: u64,
}

/// A leg of a route, backed by one meta-link.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Hop<S> {
    pub link: LinkIdx,
    pub from: NodeIdx,
    pub to: NodeIdx,
    pub alternatives: Vec<EdgeAlt<S>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Route<S> {
    pub hops: Vec<Hop<S>>,
}

impl<S> Route<S> {
    /// Node sequence from source to destination.
    pub fn nodes(&self) -> Vec<NodeIdx> {
        let mut out: Vec<NodeIdx> = self.hops.iter().map(|h| h.from).collect();
        if let Some(last) = self.hops.last() {
            out.push(last.to);
        }
        out
    }
}

/// Producer-to-consumer requirement of one part.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Flow<S> {
    pub id: usize,
    pub part: PartIdx,
    pub source: UnitIdx,
    pub dest: UnitIdx,
    /// Producer share of the consumer's requirement.
    pub share: S,
    pub routes: Vec<Route<S>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PartInfo<S> {
    pub id: String,
    pub name: String,
    pub bbox: Dims,
    pub children: Vec<(PartIdx, u32)>,
    pub producers: Vec<Allocation<S>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NodeInfo {
    pub node: NodeIdx,
    pub id: String,
}

/// Transport DAG derived from a complete production assignment.
///
/// Self-contained: carries the part tree, the producing units and the
/// transport-mean parameters it needs, so planning and reporting do not go
/// back to the dataset.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TransportNetwork<S> {
    pub root: PartIdx,
    pub parts: Vec<PartInfo<S>>,
    pub means: Vec<TransportMean<S>>,
    /// Every node on some route, sorted.
    pub nodes: Vec<NodeInfo>,
    /// Sorted by (part, source, dest).
    pub flows: Vec<Flow<S>>,
    /// (link, mean) pairs leaving a warehouse that carry more than one part type.
    pub mixed_links: BTreeSet<(LinkIdx, MeanIdx)>,
    #[serde(skip)]
    edge_index: Vec<EdgeRef>,
}

/// Position of an alternative inside the network.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct EdgeRef {
    pub flow: usize,
    pub route: usize,
    pub hop: usize,
    pub alt: usize,
}

impl<S: Scalar> TransportNetwork<S> {
    pub fn edge_count(&self) -> usize {
        self.edge_index.len()
    }

    pub fn edge_ref(&self, id: usize) -> EdgeRef {
        self.edge_index[id]
    }

    pub fn hop(&self, e: EdgeRef) -> &Hop<S> {
        &self.flows[e.flow].routes[e.route].hops[e.hop]
    }

    pub fn alt(&self, e: EdgeRef) -> &EdgeAlt<S> {
        &self.hop(e).alternatives[e.alt]
    }

    pub fn mean(&self, m: MeanIdx) -> &TransportMean<S> {
        &self.means[m.0]
    }

    pub fn part(&self, p: PartIdx) -> &PartInfo<S> {
        &self.parts[p.0]
    }

    pub fn node_id(&self, n: NodeIdx) -> &str {
        let i = self
            .nodes
            .binary_search_by(|x| x.node.cmp(&n))
            .expect("node on a route");
        &self.nodes[i].id
    }

    pub fn flow_index(&self, part: PartIdx, source: UnitIdx, dest: UnitIdx) -> Option<usize> {
        self.flows
            .binary_search_by(|f| (f.part, f.source, f.dest).cmp(&(part, source, dest)))
            .ok()
    }

    pub fn is_mixed(&self, link: LinkIdx, mean: MeanIdx) -> bool {
        self.mixed_links.contains(&(link, mean))
    }

    /// Units producing the root part.
    pub fn final_assembly_units(&self) -> Vec<UnitIdx> {
        self.parts[self.root.0].producers.iter().map(|a| a.unit).collect()
    }

    pub fn route_count(&self) -> usize {
        self.flows.iter().map(|f| f.routes.len()).sum()
    }

    /// Every route is a simple path and the unit-level flow graph, expanded
    /// by part, follows the bill of materials towards the root.
    pub fn is_acyclic(&self) -> bool {
        let simple = self.flows.iter().flat_map(|f| &f.routes).all(|r| {
            let nodes = r.nodes();
            nodes.iter().collect::<BTreeSet<_>>().len() == nodes.len()
        });
        let mut depth = vec![0usize; self.parts.len()];
        let mut stack = vec![(self.root, 0)];
        while let Some((p, d)) = stack.pop() {
            depth[p.0] = d;
            stack.extend(self.parts[p.0].children.iter().map(|&(c, _)| (c, d + 1)));
        }
        let downward = self.flows.iter().all(|f| {
            let parent = self.parents().get(&f.part).copied();
            parent.is_some_and(|q| depth[q.0] + 1 == depth[f.part.0])
        });
        simple && downward
    }

    fn parents(&self) -> BTreeMap<PartIdx, PartIdx> {
        let mut out = BTreeMap::new();
        for (i, p) in self.parts.iter().enumerate() {
            for &(c, _) in &p.children {
                out.insert(c, PartIdx(i));
            }
        }
        out
    }

    /// Renumbers alternatives densely and recomputes derived indices.
    pub(crate) fn reindex(&mut self) {
        self.edge_index.clear();
        let mut carried: BTreeMap<(LinkIdx, MeanIdx), BTreeSet<PartIdx>> = BTreeMap::new();
        for (fi, f) in self.flows.iter_mut().enumerate() {
            f.id = fi;
            for (ri, r) in f.routes.iter_mut().enumerate() {
                for (hi, h) in r.hops.iter_mut().enumerate() {
                    for (ai, a) in h.alternatives.iter_mut().enumerate() {
                        a.id = self.edge_index.len();
                        self.edge_index.push(EdgeRef {
                            flow: fi,
                            route: ri,
                            hop: hi,
                            alt: ai,
                        });
                        if h.from.is_warehouse() {
                            carried.entry((h.link, a.mean)).or_default().insert(f.part);
                        }
                    }
                }
            }
        }
        self.mixed_links = carried
            .into_iter()
            .filter(|(_, p)| p.len() > 1)
            .map(|(k, _)| k)
            .collect();
        let mut nodes: BTreeSet<NodeIdx> = BTreeSet::new();
        for f in &self.flows {
            nodes.insert(NodeIdx::Unit(f.source));
            nodes.insert(NodeIdx::Unit(f.dest));
            for r in &f.routes {
                nodes.extend(r.nodes());
            }
        }
        for p in &self.parts {
            nodes.extend(p.producers.iter().map(|a| NodeIdx::Unit(a.unit)));
        }
        let ids: BTreeMap<NodeIdx, String> = self.nodes.drain(..).map(|n| (n.node, n.id)).collect();
        self.nodes = nodes
            .into_iter()
            .map(|n| NodeInfo {
                node: n,
                id: ids.get(&n).cloned().unwrap_or_default(),
            })
            .collect();
    }

    /// Rebuilds the skipped edge index after deserialization.
    pub fn from_json(s: &str) -> serde_json::Result<Self> {
        let mut net: Self = serde_json::from_str(s)?;
        net.reindex();
        Ok(net)
    }
}

/// Builds the transport network with the default warehouse cap.
pub fn build_network<S: Scalar>(
    assignment: &ProductionAssignment<S>,
    ds: &Dataset<S>,
) -> Result<TransportNetwork<S>, NetworkError> {
    build_network_with(assignment, ds, DEFAULT_MAX_WAREHOUSES)
}

/// Emits one flow per bill-of-materials edge and producer/consumer pair on
/// different units, with every candidate route and every transport-mean
/// alternative of each leg. Fit is not checked here.
pub fn build_network_with<S: Scalar>(
    assignment: &ProductionAssignment<S>,
    ds: &Dataset<S>,
    max_warehouses: usize,
) -> Result<TransportNetwork<S>, NetworkError> {
    let mut parts = Vec::with_capacity(ds.part_count());
    for (i, p) in ds.parts().iter().enumerate() {
        let idx = PartIdx(i);
        let mut producers = assignment
            .get(idx)
            .filter(|a| !a.is_empty())
            .ok_or_else(|| NetworkError::Unassigned(p.id.clone()))?
            .to_vec();
        producers.sort_by_key(|a| a.unit);
        parts.push(PartInfo {
            id: p.id.clone(),
            name: p.name.clone(),
            bbox: p.bbox,
            children: ds.children(idx).to_vec(),
            producers,
        });
    }

    let mut flows = Vec::new();
    for (i, info) in parts.iter().enumerate() {
        let p = PartIdx(i);
        let Some((parent, _)) = ds.parent(p) else { continue };
        for a in &info.producers {
            for c in &parts[parent.0].producers {
                if a.unit == c.unit {
                    continue;
                }
                let routes: Vec<Route<S>> = candidate_routes(ds, a.unit, c.unit, max_warehouses)
                    .into_iter()
                    .map(|links| Route {
                        hops: links.into_iter().map(|l| hop(ds, info.bbox, l)).collect(),
                    })
                    .collect();
                if routes.is_empty() {
                    return Err(NetworkError::Disconnected {
                        part: info.id.clone(),
                        from: ds.unit(a.unit).id.clone(),
                        to: ds.unit(c.unit).id.clone(),
                    });
                }
                flows.push(Flow {
                    id: 0,
                    part: p,
                    source: a.unit,
                    dest: c.unit,
                    share: a.share,
                    routes,
                });
            }
        }
    }
    flows.sort_by_key(|f| (f.part, f.source, f.dest));

    let mut nodes: BTreeSet<NodeIdx> = (0..ds.units().len()).map(|u| NodeIdx::Unit(UnitIdx(u))).collect();
    nodes.extend((0..ds.warehouses().len()).map(|w| NodeIdx::Warehouse(crate::model::WarehouseIdx(w))));
    let mut net = TransportNetwork {
        root: ds.root(),
        parts,
        means: ds.transport_means().to_vec(),
        nodes: nodes
            .into_iter()
            .map(|n| NodeInfo {
                node: n,
                id: ds.node_id(n).to_string(),
            })
            .collect(),
        flows,
        mixed_links: BTreeSet::new(),
        edge_index: Vec::new(),
    };
    net.reindex();
    Ok(net)
}

fn hop<S: Scalar>(ds: &Dataset<S>, bbox: Dims, l: LinkIdx) -> Hop<S> {
    let (from, to) = ds.link_ends(l);
    Hop {
        link: l,
        from,
        to,
        alternatives: ds
            .link_alternatives(l)
            .iter()
            .map(|&(m, d)| EdgeAlt {
                id: 0,
                mean: m,
                distance_km: d,
                batch_size: grid_capacity(bbox, ds.mean(m).container).0,
            })
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::load_dataset_from_str;
    use crate::test_fixtures::{chain_assignment, harbours, CHAIN};

    #[test]
    fn chain_flows_and_routes() {
        let ds: Dataset = load_dataset_from_str(CHAIN).unwrap();
        let net = build_network(&chain_assignment(&ds), &ds).unwrap();
        assert_eq!(net.flows.len(), 2);
        let a = &net.flows[0];
        assert_eq!(net.part(a.part).id, "A");
        assert_eq!(a.routes.len(), 1);
        assert_eq!(a.routes[0].hops[0].alternatives.len(), 2);
        let b = &net.flows[1];
        assert_eq!(b.routes.len(), 1);
        assert_eq!(b.routes[0].hops.len(), 2);
        assert_eq!(net.edge_count(), 2 + 1 + 2);
        assert!(net.is_acyclic());
        assert!(net.mixed_links.is_empty());
    }

    #[test]
    fn two_harbour_routes_match_hand_enumeration() {
        let (ds, a) = harbours();
        let net = build_network(&a, &ds).unwrap();
        let shapes: Vec<Vec<Vec<&str>>> = net
            .flows
            .iter()
            .map(|f| {
                f.routes
                    .iter()
                    .map(|r| r.nodes().into_iter().map(|n| ds.node_id(n)).collect())
                    .collect()
            })
            .collect();
        assert_eq!(
            shapes[0],
            vec![
                vec!["U1", "U0"],
                vec!["U1", "City_2 Harbor", "U0"],
                vec!["U1", "City_2 Harbor", "City_4 Harbor", "U0"],
            ]
        );
        assert_eq!(shapes[1].len(), 3);
        assert_eq!(net.route_count(), 6);
        // every leg out of City_2 or City_4 carries both A and B
        assert_eq!(net.mixed_links.len(), 4);
        assert!(net.is_acyclic());
    }

    #[test]
    fn missing_part_is_reported() {
        let ds: Dataset = load_dataset_from_str(CHAIN).unwrap();
        let mut a = ProductionAssignment::new(crate::model::SourcingMode::Single, 1);
        a.assign(
            ds.root(),
            vec![Allocation {
                unit: UnitIdx(0),
                share: 1.0,
            }],
        );
        assert!(matches!(build_network(&a, &ds), Err(NetworkError::Unassigned(_))));
    }

    #[test]
    fn json_round_trip_restores_edge_index() {
        let ds: Dataset = load_dataset_from_str(CHAIN).unwrap();
        let net = build_network(&chain_assignment(&ds), &ds).unwrap();
        let back = TransportNetwork::<f64>::from_json(&serde_json::to_string(&net).unwrap()).unwrap();
        assert_eq!(back, net);
    }
}
