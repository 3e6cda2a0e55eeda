use std::collections::{BTreeMap, BTreeSet, HashMap};

use super::{check, fits_any, OracleBudget, OracleError};
use crate::dataset::Dataset;
use crate::model::{Allocation, ProductionAssignment, SourcingMode};
use crate::scalar::Scalar;

const SLACK: f64 = 1e-9;
/// Double-sourcing split grid: 0.20, 0.25, ..., 0.80.
const SPLITS: u64 = 13;

/// Best assignment found, keyed by record ids.
#[derive(Clone, Debug, PartialEq)]
pub struct OracleAssignment {
    pub dist: f64,
    /// Part id to (unit id, share), parts in file order.
    pub allocations: Vec<(String, Vec<(String, f64)>)>,
}

impl OracleAssignment {
    pub fn to_assignment<S: Scalar>(&self, ds: &Dataset<S>, mode: SourcingMode) -> ProductionAssignment<S> {
        let mut a = ProductionAssignment::new(mode, 1);
        for (p, allocs) in &self.allocations {
            a.assign(
                ds.part_idx(p).expect("oracle part ids come from the dataset"),
                allocs
                    .iter()
                    .map(|(u, s)| Allocation {
                        unit: ds.unit_idx(u).expect("oracle unit ids come from the dataset"),
                        share: S::lit(*s),
                    })
                    .collect(),
            );
        }
        a
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct AssignmentCensus {
    /// Size of the nominal space: every unit (or unit pair and split) for every part.
    pub enumerated: u64,
    pub feasible: u64,
    /// Smallest distance bound; the first one in enumeration order on ties.
    pub best: Option<OracleAssignment>,
}

struct World {
    part_ids: Vec<String>,
    va: Vec<f64>,
    parent: Vec<Option<usize>>,
    /// Root first, every part after its parent.
    order: Vec<usize>,
    unit_ids: Vec<String>,
    unit_supplier: Vec<usize>,
    unit_country: Vec<usize>,
    capable: Vec<Vec<bool>>,
    spans: Vec<bool>,
    unit_cap: Vec<f64>,
    supplier_cap: Vec<f64>,
    country_cap: Vec<f64>,
    /// `[part][u1][u2]` distance bound.
    bound: Vec<Vec<Vec<Option<f64>>>>,
}

fn position(ids: &[String], id: &str) -> usize {
    ids.iter().position(|x| x == id).expect("dataset references resolve")
}

impl World {
    fn new<S: Scalar>(ds: &Dataset<S>) -> World {
        let f = ds.file();
        let part_ids: Vec<String> = f.parts.iter().map(|p| p.id.clone()).collect();
        let mut parent = vec![None; part_ids.len()];
        for (i, p) in f.parts.iter().enumerate() {
            for c in &p.children {
                parent[position(&part_ids, &c.part)] = Some(i);
            }
        }
        let root = position(&part_ids, &f.meta.final_product);
        let mut order = vec![root];
        let mut k = 0;
        while k < order.len() {
            let p = order[k];
            k += 1;
            order.extend((0..part_ids.len()).filter(|&c| parent[c] == Some(p)));
        }

        let country_ids: Vec<String> = f.countries.iter().map(|c| c.id.clone()).collect();
        let supplier_ids: Vec<String> = f.suppliers.iter().map(|s| s.id.clone()).collect();
        let unit_ids: Vec<String> = f.units.iter().map(|u| u.id.clone()).collect();
        let plant_of = |u: usize| {
            f.plants
                .iter()
                .find(|p| p.id == f.units[u].plant)
                .expect("plant exists")
        };
        let unit_country: Vec<usize> = (0..unit_ids.len())
            .map(|u| {
                let site = f.sites.iter().find(|s| s.id == plant_of(u).site).expect("site exists");
                position(&country_ids, &site.country)
            })
            .collect();
        let unit_supplier: Vec<usize> = f.units.iter().map(|u| position(&supplier_ids, &u.supplier)).collect();
        let capable: Vec<Vec<bool>> = (0..unit_ids.len())
            .map(|u| {
                part_ids
                    .iter()
                    .map(|p| plant_of(u).producible_parts.contains(p))
                    .collect()
            })
            .collect();
        let spans = (0..part_ids.len())
            .map(|p| {
                let cs: BTreeSet<usize> = (0..unit_ids.len())
                    .filter(|&u| capable[u][p])
                    .map(|u| unit_country[u])
                    .collect();
                cs.len() >= 2
            })
            .collect();

        let b = &f.bounds;
        let unit_cap = f
            .units
            .iter()
            .map(|u| u.va_max.unwrap_or(b.va_u_max).as_f64())
            .collect();
        let supplier_cap = f
            .suppliers
            .iter()
            .map(|s| s.va_max.unwrap_or(b.va_s_max).as_f64())
            .collect();
        let country_cap = f
            .countries
            .iter()
            .map(|c| c.va_max.unwrap_or(b.va_c_max).as_f64())
            .collect();

        let mut links: HashMap<(&str, &str), Vec<(&str, f64)>> = HashMap::new();
        for l in &f.links {
            links.insert(
                (l.source.as_str(), l.dest.as_str()),
                l.alternatives
                    .iter()
                    .map(|a| (a.mean.as_str(), a.distance_km.as_f64()))
                    .collect(),
            );
        }
        let containers: HashMap<&str, [u64; 3]> =
            f.transport_means.iter().map(|m| (m.id.as_str(), m.container)).collect();
        let near = |u: &str| -> Vec<&str> {
            f.warehouses
                .iter()
                .filter(|w| w.nearby_units.iter().any(|x| x == u))
                .map(|w| w.id.as_str())
                .collect()
        };
        let bound = f
            .parts
            .iter()
            .map(|part| {
                let leg = |a: &str, b: &str| -> Option<f64> {
                    let alts = links.get(&(a, b))?;
                    if !alts.iter().any(|(m, _)| fits_any(part.bbox, containers[m])) {
                        return None;
                    }
                    alts.iter().map(|&(_, d)| d).reduce(f64::max)
                };
                unit_ids
                    .iter()
                    .map(|u1| {
                        unit_ids
                            .iter()
                            .map(|u2| {
                                if u1 == u2 {
                                    return Some(0.0);
                                }
                                if let Some(d) = leg(u1, u2) {
                                    return Some(d);
                                }
                                let (n1, n2) = (near(u1), near(u2));
                                let mut best: Option<f64> = None;
                                let mut offer = |d: Option<f64>| {
                                    if let Some(d) = d {
                                        best = Some(best.map_or(d, |b| b.min(d)));
                                    }
                                };
                                let mut ws: Vec<&str> = n1.iter().chain(&n2).copied().collect();
                                ws.sort_unstable();
                                ws.dedup();
                                for w in ws {
                                    offer(leg(u1, w).zip(leg(w, u2)).map(|(a, b)| a + b));
                                }
                                for &x in &n1 {
                                    for &y in &n2 {
                                        if x != y {
                                            offer(
                                                leg(u1, x).zip(leg(x, y)).zip(leg(y, u2)).map(|((a, b), c)| a + b + c),
                                            );
                                        }
                                    }
                                }
                                best
                            })
                            .collect()
                    })
                    .collect()
            })
            .collect();

        World {
            va: f.parts.iter().map(|p| p.value_added.as_f64()).collect(),
            part_ids,
            parent,
            order,
            unit_ids,
            unit_supplier,
            unit_country,
            capable,
            spans,
            unit_cap,
            supplier_cap,
            country_cap,
            bound,
        }
    }

    /// Candidate allocations of one part, feasible or not.
    fn choices(&self, mode: SourcingMode) -> Vec<Vec<(usize, f64)>> {
        let n = self.unit_ids.len();
        match mode {
            SourcingMode::Single => (0..n).map(|u| vec![(u, 1.0)]).collect(),
            SourcingMode::Double => {
                let mut out = Vec::new();
                for u1 in 0..n {
                    for u2 in u1 + 1..n {
                        for k in 0..SPLITS {
                            let a = (20 + 5 * k) as f64 / 100.0;
                            out.push(vec![(u1, a), (u2, 1.0 - a)]);
                        }
                    }
                }
                out
            }
        }
    }
}

struct Search<'w> {
    w: &'w World,
    choices: Vec<Vec<(usize, f64)>>,
    picked: Vec<Option<usize>>,
    unit: Vec<f64>,
    supplier: Vec<f64>,
    country: Vec<f64>,
    feasible: u64,
    best: Option<(f64, Vec<Option<usize>>)>,
}

impl Search<'_> {
    fn allowed(&self, p: usize, alloc: &[(usize, f64)]) -> bool {
        let w = self.w;
        if alloc.iter().any(|&(u, _)| !w.capable[u][p]) {
            return false;
        }
        if let [(u1, _), (u2, _)] = alloc {
            if w.spans[p] && w.unit_country[*u1] == w.unit_country[*u2] {
                return false;
            }
        }
        true
    }

    fn credit(&mut self, u: usize, amount: f64) {
        self.unit[u] += amount;
        self.supplier[self.w.unit_supplier[u]] += amount;
        self.country[self.w.unit_country[u]] += amount;
    }

    fn within_caps(&self) -> bool {
        let w = self.w;
        self.unit.iter().zip(&w.unit_cap).all(|(v, c)| *v <= c + SLACK)
            && self.supplier.iter().zip(&w.supplier_cap).all(|(v, c)| *v <= c + SLACK)
            && self.country.iter().zip(&w.country_cap).all(|(v, c)| *v <= c + SLACK)
    }

    fn go(&mut self, depth: usize, dist: f64) {
        let w = self.w;
        if depth == w.order.len() {
            self.feasible += 1;
            if self.best.as_ref().is_none_or(|(d, _)| dist < *d) {
                self.best = Some((dist, self.picked.clone()));
            }
            return;
        }
        let p = w.order[depth];
        for i in 0..self.choices.len() {
            let alloc = self.choices[i].clone();
            if !self.allowed(p, &alloc) {
                continue;
            }
            let mut add = 0.0;
            let mut connected = true;
            if let Some(q) = w.parent[p] {
                let consumers = &self.choices[self.picked[q].expect("parents are placed first")];
                'pairs: for &(u, _) in &alloc {
                    for &(c, _) in consumers {
                        match w.bound[p][u][c] {
                            Some(d) => add += d,
                            None => {
                                connected = false;
                                break 'pairs;
                            }
                        }
                    }
                }
            }
            if !connected {
                continue;
            }
            for &(u, s) in &alloc {
                self.credit(u, w.va[p] * s);
            }
            if self.within_caps() {
                self.picked[p] = Some(i);
                self.go(depth + 1, dist + add);
                self.picked[p] = None;
            }
            for &(u, s) in &alloc {
                self.credit(u, -w.va[p] * s);
            }
        }
    }
}

/// Every assignment of units to parts, checked for capability, country
/// separation, share bounds, value-added ceilings and route connectivity,
/// with the distance bound of each feasible one.
pub fn enumerate_assignments<S: Scalar>(
    ds: &Dataset<S>,
    mode: SourcingMode,
    budget: &OracleBudget,
) -> Result<AssignmentCensus, OracleError> {
    let f = ds.file();
    check("parts", f.parts.len() as u64, budget.max_parts as u64)?;
    check("units", f.units.len() as u64, budget.max_units as u64)?;
    let w = World::new(ds);
    let choices = w.choices(mode);
    let enumerated = (choices.len() as u64)
        .checked_pow(w.part_ids.len() as u32)
        .unwrap_or(u64::MAX);
    check("candidate assignments", enumerated, budget.max_candidates)?;

    let mut s = Search {
        w: &w,
        choices,
        picked: vec![None; w.part_ids.len()],
        unit: vec![0.0; w.unit_ids.len()],
        supplier: vec![0.0; w.supplier_cap.len()],
        country: vec![0.0; w.country_cap.len()],
        feasible: 0,
        best: None,
    };
    s.go(0, 0.0);

    let best = s.best.take().map(|(dist, picked)| {
        let by_part: BTreeMap<usize, Vec<(String, f64)>> = picked
            .iter()
            .enumerate()
            .map(|(p, i)| {
                let alloc = &s.choices[i.expect("complete")];
                (p, alloc.iter().map(|&(u, a)| (w.unit_ids[u].clone(), a)).collect())
            })
            .collect();
        OracleAssignment {
            dist,
            allocations: by_part.into_iter().map(|(p, a)| (w.part_ids[p].clone(), a)).collect(),
        }
    });
    Ok(AssignmentCensus {
        enumerated,
        feasible: s.feasible,
        best,
    })
}
