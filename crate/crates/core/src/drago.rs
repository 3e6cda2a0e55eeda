//! Top-down transport link selection over a pruned network.
//!
//! Starting from each final-assembly unit, every input part is resolved by
//! picking the best incoming link under the chosen criterion, then the walk
//! continues from that link's source. Links leaving a warehouse that carry
//! several part types are deferred and sized jointly with mixed batching
//! once the walk is done.

use std::cmp::Ordering;
use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::batching::{pack_laff, pack_mixed_with, rides, BatchResult, GraspConfig};
use crate::model::{LinkIdx, MeanIdx, NodeIdx, PartIdx, TransportMean, UnitIdx};
use crate::network::{DemandSchedule, TransportNetwork};
use crate::scalar::Scalar;

/// A transport objective.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    Co2,
    Duration,
    Distance,
    Cost,
}

impl Metric {
    pub const ALL: [Metric; 4] = [Metric::Co2, Metric::Duration, Metric::Distance, Metric::Cost];

    pub fn index(self) -> usize {
        self as usize
    }

    /// Column heading with unit.
    pub fn heading(self) -> &'static str {
        match self {
            Metric::Co2 => "CO2 emissions [g]",
            Metric::Duration => "Duration [h]",
            Metric::Distance => "Distance [km]",
            Metric::Cost => "Transportation costs [EUR]",
        }
    }

    /// Contribution of `rides` trips of `distance_km` with `mean`.
    pub fn value<S: Scalar>(self, mean: &TransportMean<S>, distance_km: S, rides: u64) -> S {
        let km = S::from_count(rides) * distance_km;
        match self {
            Metric::Co2 => km * mean.co2_g_per_km,
            Metric::Duration => km / mean.speed_km_per_h,
            Metric::Distance => km,
            Metric::Cost => km * mean.cost_eur_per_km,
        }
    }
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Metric::Co2 => "co2",
            Metric::Duration => "duration",
            Metric::Distance => "distance",
            Metric::Cost => "cost",
        })
    }
}

impl FromStr for Metric {
    type Err = CriterionError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Metric::ALL
            .into_iter()
            .find(|m| m.to_string() == s)
            .ok_or_else(|| CriterionError::Unknown(s.to_string()))
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CriterionError {
    #[error("unknown criterion `{0}`")]
    Unknown(String),
    #[error("malformed weight `{0}`, expected metric=value")]
    Malformed(String),
    #[error("weights must be non-negative and sum to 1, got {0:?}")]
    Weights([f64; 4]),
    #[error("tradeoff needs --weights")]
    MissingWeights,
}

/// Weighted sum of metrics, each divided by its total in the run that
/// optimizes that metric alone.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tradeoff<S> {
    /// Indexed by [`Metric::index`].
    pub weights: [S; 4],
    /// Normalizers; filled by [`drago_plan`] when absent.
    pub scale: Option<[S; 4]>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Criterion<S> {
    Metric(Metric),
    Tradeoff(Tradeoff<S>),
}

impl<S: Scalar> Criterion<S> {
    /// Parses `co2|duration|distance|cost`, or `tradeoff` with weights such
    /// as `duration=0.5,co2=0.5`.
    pub fn parse(kind: &str, weights: Option<&str>) -> Result<Self, CriterionError> {
        if kind != "tradeoff" {
            return kind.parse().map(Criterion::Metric);
        }
        let spec = weights.ok_or(CriterionError::MissingWeights)?;
        let mut w = [S::zero(); 4];
        for item in spec.split(',').map(str::trim).filter(|s| !s.is_empty()) {
            let (k, v) = item
                .split_once('=')
                .ok_or_else(|| CriterionError::Malformed(item.to_string()))?;
            let m: Metric = k.trim().parse()?;
            let v: f64 = v
                .trim()
                .parse()
                .map_err(|_| CriterionError::Malformed(item.to_string()))?;
            w[m.index()] = S::lit(v);
        }
        Self::tradeoff(w)
    }

    pub fn tradeoff(weights: [S; 4]) -> Result<Self, CriterionError> {
        let sum: S = weights.iter().copied().sum();
        let tol = S::lit(1e-6);
        if weights.iter().any(|&x| x.is_nan() || x < S::zero()) || (sum - S::one()).abs() > tol {
            return Err(CriterionError::Weights(weights.map(Scalar::as_f64)));
        }
        Ok(Criterion::Tradeoff(Tradeoff { weights, scale: None }))
    }

    pub fn label(&self) -> String {
        match self {
            Criterion::Metric(m) => m.to_string(),
            Criterion::Tradeoff(t) => {
                let parts: Vec<String> = Metric::ALL
                    .iter()
                    .filter(|m| t.weights[m.index()] > S::zero())
                    .map(|m| format!("{m}={}", t.weights[m.index()]))
                    .collect();
                format!("tradeoff({})", parts.join(","))
            }
        }
    }

    /// Score of `rides` trips of `distance_km` with `mean`.
    pub fn score(&self, mean: &TransportMean<S>, distance_km: S, rides: u64) -> S {
        match self {
            Criterion::Metric(m) => m.value(mean, distance_km, rides),
            Criterion::Tradeoff(t) => {
                let scale = t.scale.unwrap_or([S::one(); 4]);
                Metric::ALL
                    .iter()
                    .filter(|m| t.weights[m.index()] > S::zero() && scale[m.index()] > S::zero())
                    .map(|&m| t.weights[m.index()] * m.value(mean, distance_km, rides) / scale[m.index()])
                    .sum()
            }
        }
    }
}

/// Score of alternative `edge` carrying its own flow, single batching.
pub fn score_link<S: Scalar>(
    net: &TransportNetwork<S>,
    schedule: &DemandSchedule<S>,
    edge: usize,
    criterion: &Criterion<S>,
) -> S {
    let alt = net.alt(net.edge_ref(edge));
    let n = schedule.rides(net, edge).unwrap_or(0);
    criterion.score(net.mean(alt.mean), alt.distance_km, n)
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum DragoError {
    #[error("no incoming link brings `{part}` to `{vertex}`")]
    UnreachableInput { vertex: String, part: String },
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Packer {
    #[default]
    Grasp,
    Laff,
}

impl FromStr for Packer {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "grasp" => Ok(Packer::Grasp),
            "laff" => Ok(Packer::Laff),
            other => Err(format!("unknown packer `{other}`")),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DragoOptions {
    /// Score whole routes instead of one incoming link at a time.
    pub route_exact: bool,
    pub packer: Packer,
    pub grasp: GraspConfig,
    /// Seeds the mixed-batching search.
    pub seed: u64,
}

impl Default for DragoOptions {
    fn default() -> Self {
        DragoOptions {
            route_exact: false,
            packer: Packer::Grasp,
            grasp: GraspConfig {
                iterations: 30,
                ..GraspConfig::default()
            },
            seed: 0,
        }
    }
}

/// Quantity of one flow moved over a chosen link.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Load {
    pub flow: usize,
    pub part: PartIdx,
    /// Alternative id in the network.
    pub edge: usize,
    pub quantity: u64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChosenLink<S> {
    pub link: LinkIdx,
    pub mean: MeanIdx,
    pub from: NodeIdx,
    pub to: NodeIdx,
    pub distance_km: S,
    pub loads: Vec<Load>,
    /// Parts per container: `b^e` for single batching, the fullest
    /// container for a mixed load.
    pub batch_size: u64,
    pub rides: u64,
    pub mixed: bool,
}

impl<S: Scalar> ChosenLink<S> {
    pub fn value(&self, net: &TransportNetwork<S>, metric: Metric) -> S {
        metric.value(net.mean(self.mean), self.distance_km, self.rides)
    }

    pub fn quantity(&self) -> u64 {
        self.loads.iter().map(|l| l.quantity).sum()
    }
}

/// A (vertex, input) pair whose best link carries several part types.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MixedInput {
    pub vertex: NodeIdx,
    pub part: PartIdx,
    pub flow: usize,
    pub edge: usize,
}

/// Walk output before joint sizing of mixed links.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OptimalPath<S> {
    pub links: Vec<ChosenLink<S>>,
    pub mixed_batching_inputs: Vec<MixedInput>,
}

impl<S: Scalar> OptimalPath<S> {
    /// Selected alternative ids, deferred ones included.
    pub fn edges(&self) -> Vec<usize> {
        let mut out: Vec<usize> = self
            .links
            .iter()
            .flat_map(|l| l.loads.iter().map(|x| x.edge))
            .chain(self.mixed_batching_inputs.iter().map(|m| m.edge))
            .collect();
        out.sort_unstable();
        out
    }

    /// Sum of per-alternative scores with single batching, the quantity the
    /// walk minimizes locally.
    pub fn selection_total(
        &self,
        net: &TransportNetwork<S>,
        schedule: &DemandSchedule<S>,
        criterion: &Criterion<S>,
    ) -> S {
        self.edges()
            .into_iter()
            .map(|e| score_link(net, schedule, e, criterion))
            .sum()
    }
}

fn single_link<S: Scalar>(net: &TransportNetwork<S>, schedule: &DemandSchedule<S>, edge: usize) -> ChosenLink<S> {
    let e = net.edge_ref(edge);
    let hop = net.hop(e);
    let alt = net.alt(e);
    let flow = &net.flows[e.flow];
    ChosenLink {
        link: hop.link,
        mean: alt.mean,
        from: hop.from,
        to: hop.to,
        distance_km: alt.distance_km,
        loads: vec![Load {
            flow: e.flow,
            part: flow.part,
            edge,
            quantity: schedule.flow_quantity[e.flow],
        }],
        batch_size: alt.batch_size,
        rides: schedule.rides(net, edge).unwrap_or(0),
        mixed: false,
    }
}

struct Candidate<'n, S> {
    score: S,
    mean_id: &'n str,
    edge: usize,
    route: usize,
}

fn by_score_then_ids<S: Scalar>(a: &Candidate<'_, S>, b: &Candidate<'_, S>) -> Ordering {
    a.score
        .partial_cmp(&b.score)
        .unwrap_or(Ordering::Equal)
        .then_with(|| a.mean_id.cmp(b.mean_id))
        .then_with(|| a.edge.cmp(&b.edge))
}

struct Walk<'a, S: Scalar> {
    net: &'a TransportNetwork<S>,
    schedule: &'a DemandSchedule<S>,
    criterion: &'a Criterion<S>,
    route_exact: bool,
    visited: BTreeSet<(UnitIdx, PartIdx)>,
    path: OptimalPath<S>,
}

impl<'a, S: Scalar> Walk<'a, S> {
    fn score(&self, edge: usize) -> S {
        score_link(self.net, self.schedule, edge, self.criterion)
    }

    fn take(&mut self, vertex: NodeIdx, flow: usize, edge: usize) {
        let hop = self.net.hop(self.net.edge_ref(edge));
        let alt = self.net.alt(self.net.edge_ref(edge));
        if self.net.is_mixed(hop.link, alt.mean) {
            self.path.mixed_batching_inputs.push(MixedInput {
                vertex,
                part: self.net.flows[flow].part,
                flow,
                edge,
            });
        } else {
            self.path.links.push(single_link(self.net, self.schedule, edge));
        }
    }

    /// Resolves every input of part `p` built at unit `u`, once per pair.
    fn unit(&mut self, u: UnitIdx, p: PartIdx) -> Result<(), DragoError> {
        if !self.visited.insert((u, p)) {
            return Ok(());
        }
        let net = self.net;
        for &(c, _) in &net.part(p).children {
            for a in &net.part(c).producers {
                if a.unit != u {
                    let f = net
                        .flow_index(c, a.unit, u)
                        .ok_or_else(|| DragoError::UnreachableInput {
                            vertex: net.node_id(NodeIdx::Unit(u)).to_string(),
                            part: net.part(c).id.clone(),
                        })?;
                    if self.route_exact {
                        self.flow_route_exact(f)?;
                    } else {
                        self.flow_hop_by_hop(f)?;
                    }
                }
                self.unit(a.unit, c)?;
            }
        }
        Ok(())
    }

    fn unreachable(&self, vertex: NodeIdx, f: usize) -> DragoError {
        DragoError::UnreachableInput {
            vertex: self.net.node_id(vertex).to_string(),
            part: self.net.part(self.net.flows[f].part).id.clone(),
        }
    }

    /// Walks one flow back from its consumer, choosing the best incoming
    /// link at each vertex among routes consistent with the links chosen so
    /// far.
    fn flow_hop_by_hop(&mut self, f: usize) -> Result<(), DragoError> {
        let net = self.net;
        let flow = &net.flows[f];
        let mut vertex = NodeIdx::Unit(flow.dest);
        let mut live: Vec<usize> = (0..flow.routes.len()).collect();
        let mut depth = 0;
        loop {
            let mut cands = Vec::new();
            for &r in &live {
                let hops = &flow.routes[r].hops;
                let hop = &hops[hops.len() - 1 - depth];
                for alt in &hop.alternatives {
                    cands.push(Candidate {
                        score: self.score(alt.id),
                        mean_id: &net.mean(alt.mean).id,
                        edge: alt.id,
                        route: r,
                    });
                }
            }
            cands.sort_by(by_score_then_ids);
            let mut best: Option<&Candidate<'_, S>> = None;
            let mut best_score = S::infinity();
            for c in &cands {
                if c.score < best_score {
                    best = Some(c);
                    best_score = c.score;
                    let hop = net.hop(net.edge_ref(c.edge));
                    if net.is_mixed(hop.link, net.alt(net.edge_ref(c.edge)).mean) {
                        break;
                    }
                }
            }
            let best = best.ok_or_else(|| self.unreachable(vertex, f))?;
            let (edge, route) = (best.edge, best.route);
            self.take(vertex, f, edge);
            let hops = &flow.routes[route].hops;
            let chosen = &hops[hops.len() - 1 - depth];
            let from = chosen.from;
            live.retain(|&r| {
                let h = &flow.routes[r].hops;
                h.len() > depth + 1 && h[h.len() - 1 - depth].link == chosen.link
            });
            if from == NodeIdx::Unit(flow.source) {
                return Ok(());
            }
            if live.is_empty() {
                return Err(self.unreachable(from, f));
            }
            depth += 1;
            vertex = from;
        }
    }

    /// Picks the route with the smallest sum of per-leg best scores.
    fn flow_route_exact(&mut self, f: usize) -> Result<(), DragoError> {
        let net = self.net;
        let flow = &net.flows[f];
        let mut best: Option<(S, Vec<usize>)> = None;
        for route in &flow.routes {
            let mut total = S::zero();
            let mut picks = Vec::with_capacity(route.hops.len());
            for hop in &route.hops {
                let mut cands: Vec<Candidate<'_, S>> = hop
                    .alternatives
                    .iter()
                    .map(|alt| Candidate {
                        score: self.score(alt.id),
                        mean_id: &net.mean(alt.mean).id,
                        edge: alt.id,
                        route: 0,
                    })
                    .collect();
                cands.sort_by(by_score_then_ids);
                let c = &cands[0];
                total += c.score;
                picks.push(c.edge);
            }
            if best.as_ref().is_none_or(|(s, _)| total < *s) {
                best = Some((total, picks));
            }
        }
        let (_, picks) = best.ok_or_else(|| self.unreachable(NodeIdx::Unit(flow.dest), f))?;
        for &edge in picks.iter().rev() {
            let to = net.hop(net.edge_ref(edge)).to;
            self.take(to, f, edge);
        }
        Ok(())
    }
}

/// Runs the top-down walk from every final-assembly unit.
pub fn drago_optimize<S: Scalar>(
    net: &TransportNetwork<S>,
    schedule: &DemandSchedule<S>,
    criterion: &Criterion<S>,
    route_exact: bool,
) -> Result<OptimalPath<S>, DragoError> {
    let mut walk = Walk {
        net,
        schedule,
        criterion,
        route_exact,
        visited: BTreeSet::new(),
        path: OptimalPath {
            links: Vec::new(),
            mixed_batching_inputs: Vec::new(),
        },
    };
    for start in net.final_assembly_units() {
        walk.unit(start, net.root)?;
    }
    Ok(walk.path)
}

/// Sizes deferred inputs jointly, one chosen link per shared (link, mean).
///
/// Loads of a single part type are batched as one. Several part types are
/// packed together; if the packer rejects the set, each part falls back to
/// its own single-batched link and a warning is returned.
pub fn resolve_mixed_batches<S: Scalar>(
    inputs: &[MixedInput],
    net: &TransportNetwork<S>,
    schedule: &DemandSchedule<S>,
    options: &DragoOptions,
) -> (Vec<ChosenLink<S>>, Vec<String>) {
    let mut groups: BTreeMap<(LinkIdx, MeanIdx), Vec<&MixedInput>> = BTreeMap::new();
    for m in inputs {
        let e = net.edge_ref(m.edge);
        groups.entry((net.hop(e).link, net.alt(e).mean)).or_default().push(m);
    }
    let mut links = Vec::new();
    let mut warnings = Vec::new();
    for (gi, ((link, mean), members)) in groups.into_iter().enumerate() {
        let first = net.edge_ref(members[0].edge);
        let hop = net.hop(first);
        let loads: Vec<Load> = members
            .iter()
            .map(|m| Load {
                flow: m.flow,
                part: m.part,
                edge: m.edge,
                quantity: schedule.flow_quantity[m.flow],
            })
            .collect();
        let mut per_part: BTreeMap<PartIdx, (u64, u64)> = BTreeMap::new();
        for (m, l) in members.iter().zip(&loads) {
            let e = per_part
                .entry(m.part)
                .or_insert((0, net.alt(net.edge_ref(m.edge)).batch_size));
            e.0 += l.quantity;
        }
        let base = ChosenLink {
            link,
            mean,
            from: hop.from,
            to: hop.to,
            distance_km: net.alt(first).distance_km,
            loads: Vec::new(),
            batch_size: 0,
            rides: 0,
            mixed: false,
        };
        if per_part.len() == 1 {
            let (qty, b) = per_part.values().next().copied().unwrap_or((0, 0));
            links.push(ChosenLink {
                loads,
                batch_size: b,
                rides: rides(qty, b).unwrap_or(0),
                ..base
            });
            continue;
        }
        let container = net.mean(mean).container;
        let items: Vec<_> = per_part.iter().map(|(p, (q, _))| (net.part(*p).bbox, *q)).collect();
        let packed: Result<Vec<BatchResult>, _> = match options.packer {
            Packer::Grasp => {
                let mut rng = ChaCha8Rng::seed_from_u64(options.seed);
                rng.set_stream(gi as u64);
                pack_mixed_with(&items, container, &options.grasp, &mut rng)
            }
            Packer::Laff => pack_laff(&items, container),
        };
        match packed {
            Ok(bins) => links.push(ChosenLink {
                loads,
                batch_size: bins.iter().map(|b| b.placements.len() as u64).max().unwrap_or(0),
                rides: bins.len() as u64,
                mixed: true,
                ..base
            }),
            Err(e) => {
                warnings.push(format!(
                    "{} -> {} by {}: parts not co-transportable ({e}); batching them separately",
                    net.node_id(hop.from),
                    net.node_id(hop.to),
                    net.mean(mean).id
                ));
                for (p, (qty, b)) in per_part {
                    links.push(ChosenLink {
                        loads: loads.iter().filter(|l| l.part == p).cloned().collect(),
                        batch_size: b,
                        rides: rides(qty, b).unwrap_or(0),
                        ..base.clone()
                    });
                }
            }
        }
    }
    (links, warnings)
}

/// Complete transport plan for one criterion.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Plan<S> {
    pub criterion: Criterion<S>,
    pub route_exact: bool,
    pub links: Vec<ChosenLink<S>>,
    pub warnings: Vec<String>,
}

impl<S: Scalar> Plan<S> {
    pub fn total(&self, net: &TransportNetwork<S>, metric: Metric) -> S {
        self.links.iter().map(|l| l.value(net, metric)).sum()
    }

    /// Flattened, id-keyed view for export.
    pub fn records(&self, net: &TransportNetwork<S>) -> Vec<PlanRecord> {
        self.links
            .iter()
            .map(|l| {
                let mean = net.mean(l.mean);
                PlanRecord {
                    from: net.node_id(l.from).to_string(),
                    to: net.node_id(l.to).to_string(),
                    transportation: mean.name.clone(),
                    parts: l.loads.iter().map(|x| net.part(x.part).id.clone()).collect(),
                    flows: l
                        .loads
                        .iter()
                        .map(|x| {
                            let f = &net.flows[x.flow];
                            format!(
                                "{}:{}->{}",
                                net.part(f.part).id,
                                net.node_id(NodeIdx::Unit(f.source)),
                                net.node_id(NodeIdx::Unit(f.dest))
                            )
                        })
                        .collect(),
                    quantity: l.quantity(),
                    batch_size: l.batch_size,
                    rides: l.rides,
                    mixed: l.mixed,
                    distance_km: l.distance_km.as_f64(),
                    contributions: Metric::ALL.map(|m| l.value(net, m).as_f64()),
                }
            })
            .collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlanRecord {
    pub from: String,
    pub to: String,
    pub transportation: String,
    pub parts: Vec<String>,
    /// `part:source->consumer` per load.
    pub flows: Vec<String>,
    pub quantity: u64,
    pub batch_size: u64,
    pub rides: u64,
    pub mixed: bool,
    pub distance_km: f64,
    /// CO2 g, duration h, distance km, cost EUR.
    pub contributions: [f64; 4],
}

/// Walk, joint sizing and, for a trade-off without normalizers, the
/// single-metric runs that provide them.
pub fn drago_plan<S: Scalar>(
    net: &TransportNetwork<S>,
    schedule: &DemandSchedule<S>,
    criterion: &Criterion<S>,
    options: &DragoOptions,
) -> Result<Plan<S>, DragoError> {
    let criterion = match criterion {
        Criterion::Tradeoff(t) if t.scale.is_none() => {
            let mut scale = [S::zero(); 4];
            for m in Metric::ALL {
                if t.weights[m.index()] > S::zero() {
                    scale[m.index()] = drago_plan(net, schedule, &Criterion::Metric(m), options)?.total(net, m);
                }
            }
            Criterion::Tradeoff(Tradeoff {
                weights: t.weights,
                scale: Some(scale),
            })
        }
        c => c.clone(),
    };
    let path = drago_optimize(net, schedule, &criterion, options.route_exact)?;
    let (mixed, warnings) = resolve_mixed_batches(&path.mixed_batching_inputs, net, schedule, options);
    let mut links = path.links;
    links.extend(mixed);
    Ok(Plan {
        criterion,
        route_exact: options.route_exact,
        links,
        warnings,
    })
}
