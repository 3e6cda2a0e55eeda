use std::cmp::Ordering;

use super::{check, permutations, OracleBudget, OracleError};
use crate::drago::{Criterion, Metric};
use crate::network::{DemandSchedule, TransportNetwork};
use crate::scalar::Scalar;

/// Cheapest and dearest route × mean combination of one flow.
#[derive(Clone, Debug, PartialEq)]
pub struct FlowOptimum {
    pub flow: usize,
    /// Alternative ids of the winner, source leg first.
    pub edges: Vec<usize>,
    pub score: f64,
    pub worst: f64,
    pub combinations: u64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RouteCensus {
    pub flows: Vec<FlowOptimum>,
    pub total: f64,
    pub worst_total: f64,
}

impl RouteCensus {
    /// Winning alternative ids, ascending.
    pub fn edges(&self) -> Vec<usize> {
        let mut out: Vec<usize> = self.flows.iter().flat_map(|f| f.edges.iter().copied()).collect();
        out.sort_unstable();
        out
    }
}

fn capacity(part: [u64; 3], container: [u64; 3]) -> u64 {
    permutations(part)
        .iter()
        .map(|d| (0..3).map(|k| container[k] / d[k]).product::<u64>())
        .max()
        .unwrap_or(0)
}

fn metric_value(m: Metric, km: f64, co2: f64, speed: f64, cost: f64) -> f64 {
    match m {
        Metric::Co2 => km * co2,
        Metric::Duration => km / speed,
        Metric::Distance => km,
        Metric::Cost => km * cost,
    }
}

struct Pick {
    score: f64,
    mean_id: String,
    edge: usize,
}

/// Exhaustive per-flow minimum of the summed single-batching scores over
/// every route and every choice of mean on each of its legs.
///
/// Ties fall to the smaller mean id on the last leg, then the next leg back,
/// then the smaller alternative id, the rule the greedy walk applies.
pub fn enumerate_routes<S: Scalar>(
    net: &TransportNetwork<S>,
    schedule: &DemandSchedule<S>,
    criterion: &Criterion<S>,
    budget: &OracleBudget,
) -> Result<RouteCensus, OracleError> {
    // (weight, normalizer) per metric for a tradeoff
    let weights: Option<[(f64, f64); 4]> = match criterion {
        Criterion::Metric(_) => None,
        Criterion::Tradeoff(t) => {
            let scale = t.scale.map(|s| s.map(Scalar::as_f64)).unwrap_or([1.0; 4]);
            Some(std::array::from_fn(|k| (t.weights[k].as_f64(), scale[k])))
        }
    };
    for f in &net.flows {
        check(
            "routes per flow",
            f.routes.len() as u64,
            budget.max_routes_per_flow as u64,
        )?;
    }

    let mut flows = Vec::with_capacity(net.flows.len());
    for (fi, f) in net.flows.iter().enumerate() {
        let q = schedule.flow_quantity[fi];
        let bbox = net.parts[f.part.0].bbox;
        let mut best: Option<(f64, Vec<String>, Vec<usize>)> = None;
        let mut worst = f64::NEG_INFINITY;
        let mut combinations = 0u64;
        for r in &f.routes {
            let legs: Vec<Vec<Pick>> = r
                .hops
                .iter()
                .map(|h| {
                    h.alternatives
                        .iter()
                        .filter_map(|a| {
                            let m = &net.means[a.mean.0];
                            let b = capacity(bbox, m.container);
                            if b == 0 {
                                return None;
                            }
                            let km = q.div_ceil(b) as f64 * a.distance_km.as_f64();
                            let (co2, speed, cost) = (
                                m.co2_g_per_km.as_f64(),
                                m.speed_km_per_h.as_f64(),
                                m.cost_eur_per_km.as_f64(),
                            );
                            let score = match (criterion, weights) {
                                (Criterion::Metric(mm), _) => metric_value(*mm, km, co2, speed, cost),
                                (_, w) => {
                                    let w = w.unwrap_or_default();
                                    Metric::ALL
                                        .iter()
                                        .filter(|mm| w[mm.index()].0 > 0.0 && w[mm.index()].1 > 0.0)
                                        .map(|&mm| {
                                            let (wk, sk) = w[mm.index()];
                                            wk * metric_value(mm, km, co2, speed, cost) / sk
                                        })
                                        .sum()
                                }
                            };
                            Some(Pick {
                                score,
                                mean_id: m.id.clone(),
                                edge: a.id,
                            })
                        })
                        .collect()
                })
                .collect();
            if legs.iter().any(Vec::is_empty) {
                continue;
            }
            let mut pick = vec![0usize; legs.len()];
            loop {
                combinations += 1;
                let score: f64 = pick.iter().enumerate().map(|(k, &i)| legs[k][i].score).sum();
                let means: Vec<String> = pick
                    .iter()
                    .enumerate()
                    .rev()
                    .map(|(k, &i)| legs[k][i].mean_id.clone())
                    .collect();
                let edges: Vec<usize> = pick.iter().enumerate().map(|(k, &i)| legs[k][i].edge).collect();
                worst = worst.max(score);
                let better = match &best {
                    None => true,
                    Some((s, m, e)) => match score.partial_cmp(s).unwrap_or(Ordering::Equal) {
                        Ordering::Less => true,
                        Ordering::Greater => false,
                        Ordering::Equal => {
                            (&means, edges.iter().rev().collect::<Vec<_>>()) < (m, e.iter().rev().collect())
                        }
                    },
                };
                if better {
                    best = Some((score, means, edges));
                }
                let mut k = 0;
                while k < pick.len() {
                    pick[k] += 1;
                    if pick[k] < legs[k].len() {
                        break;
                    }
                    pick[k] = 0;
                    k += 1;
                }
                if k == pick.len() {
                    break;
                }
            }
        }
        let Some((score, _, edges)) = best else { continue };
        flows.push(FlowOptimum {
            flow: fi,
            edges,
            score,
            worst,
            combinations,
        });
    }
    Ok(RouteCensus {
        total: flows.iter().map(|f| f.score).sum(),
        worst_total: flows.iter().map(|f| f.worst).sum(),
        flows,
    })
}
