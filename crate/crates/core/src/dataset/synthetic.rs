//! Seeded synthetic datasets with a configurable cardinality profile.
//!
//! Geography is a flat plane with three continent clusters. Every unit pair
//! that a bill-of-materials edge could connect gets a direct link with road
//! (same continent) and air alternatives; harbour warehouses add road legs
//! to nearby units and sea legs between harbours. The first air mean is an
//! outsize freighter whose hold fits every part, so every direct link has a
//! fitting alternative.

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{Dataset, DatasetFile, Meta, SCHEMA_VERSION};
use crate::model::*;
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Profile {
    pub parts: usize,
    pub countries: usize,
    pub suppliers: usize,
    pub sites: usize,
    pub units: usize,
    pub warehouses: usize,
    pub means: usize,
    /// Give every part producers in at least two countries.
    pub double_sourcing: bool,
}

impl Default for Profile {
    fn default() -> Self {
        Profile {
            parts: 47,
            countries: 17,
            suppliers: 29,
            sites: 43,
            units: 45,
            warehouses: 34,
            means: 17,
            double_sourcing: true,
        }
    }
}

impl Profile {
    /// A small profile suited to exhaustive checks.
    pub fn toy(parts: usize, units: usize) -> Self {
        Profile {
            parts,
            countries: 3.min(units.max(1)),
            suppliers: units.max(1),
            sites: 3.min(units.max(1)),
            units,
            warehouses: 2,
            means: 4,
            double_sourcing: units >= 2,
        }
    }
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ProfileError {
    #[error("profile field `{0}` must be at least 1")]
    Empty(&'static str),
    #[error("{sites} sites cannot host {countries} countries")]
    TooFewSites { sites: usize, countries: usize },
    #[error("{units} units exceed the {max} distinct (supplier, site) pairs")]
    TooManyUnits { units: usize, max: usize },
    #[error("double-sourcing feasibility needs at least 2 countries and 2 units")]
    DoubleSourcing,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Family {
    Sea,
    Road,
    Air,
}

const CONTINENTS: [(f64, f64); 3] = [(0.0, 0.0), (-7000.0, 600.0), (8500.0, 900.0)];
/// Hold of the outsize freighter; every generated part fits it.
const OUTSIZE_HOLD: Dims = [37000, 7400, 7100];

fn round_to(x: f64, step: f64) -> f64 {
    (x / step).round() * step
}

fn dist(a: (f64, f64), b: (f64, f64)) -> f64 {
    ((a.0 - b.0).powi(2) + (a.1 - b.1).powi(2)).sqrt()
}

fn families(n: usize) -> Vec<Family> {
    let air = ((n as f64 * 2.0 / 17.0).round() as usize).max(1).min(n);
    let road = ((n as f64 * 6.0 / 17.0).round() as usize)
        .max(usize::from(n >= 2))
        .min(n - air);
    let sea = n - air - road;
    let mut out = vec![Family::Air; air];
    out.extend(std::iter::repeat_n(Family::Road, road));
    out.extend(std::iter::repeat_n(Family::Sea, sea));
    out
}

fn check(profile: &Profile) -> Result<(), ProfileError> {
    for (name, v) in [
        ("parts", profile.parts),
        ("countries", profile.countries),
        ("suppliers", profile.suppliers),
        ("sites", profile.sites),
        ("units", profile.units),
        ("means", profile.means),
    ] {
        if v == 0 {
            return Err(ProfileError::Empty(name));
        }
    }
    if profile.sites < profile.countries {
        return Err(ProfileError::TooFewSites {
            sites: profile.sites,
            countries: profile.countries,
        });
    }
    let max = profile.sites * profile.suppliers;
    if profile.units > max {
        return Err(ProfileError::TooManyUnits {
            units: profile.units,
            max,
        });
    }
    if profile.double_sourcing && (profile.countries < 2 || profile.units < 2) {
        return Err(ProfileError::DoubleSourcing);
    }
    Ok(())
}

/// Deterministic dataset for `profile` and `seed`.
pub fn gen_synthetic<S: Scalar>(profile: &Profile, seed: u64) -> Result<Dataset<S>, ProfileError> {
    check(profile)?;
    let file = generate(profile, seed);
    Ok(Dataset::new(file).expect("generated dataset is structurally valid"))
}

fn generate<S: Scalar>(profile: &Profile, seed: u64) -> DatasetFile<S> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let lit = |x: f64| S::lit(x);
    let n_fal = profile.countries.min(3);

    // Countries, sites and their coordinates.
    let country_pos: Vec<(f64, f64)> = (0..profile.countries)
        .map(|c| {
            let (cx, cy) = CONTINENTS[c % 3];
            (cx + rng.gen_range(-1500.0..1500.0), cy + rng.gen_range(-1200.0..1200.0))
        })
        .collect();
    let country_cap = |c: usize| [0.22, 0.12, 0.2].get(c).copied().unwrap_or(0.1);
    let countries: Vec<Country<S>> = (0..profile.countries)
        .map(|c| Country {
            id: format!("C{c:02}"),
            va_min: None,
            va_max: (c < 3).then(|| lit(country_cap(c))),
        })
        .collect();
    let site_country: Vec<usize> = (0..profile.sites)
        .map(|s| {
            if s < profile.countries {
                s
            } else {
                rng.gen_range(0..profile.countries)
            }
        })
        .collect();
    let site_pos: Vec<(f64, f64)> = site_country
        .iter()
        .map(|&c| {
            (
                country_pos[c].0 + rng.gen_range(-300.0..300.0),
                country_pos[c].1 + rng.gen_range(-300.0..300.0),
            )
        })
        .collect();
    let sites: Vec<Site> = site_country
        .iter()
        .enumerate()
        .map(|(s, &c)| Site {
            id: format!("L{s:02}"),
            country: countries[c].id.clone(),
        })
        .collect();

    // Units: one plant each, (supplier, site) pairs unique.
    let mut pairs = BTreeSet::new();
    let mut unit_site = Vec::with_capacity(profile.units);
    let mut unit_supplier = Vec::with_capacity(profile.units);
    for u in 0..profile.units {
        loop {
            let site = if u < profile.sites {
                u
            } else {
                rng.gen_range(0..profile.sites)
            };
            let sup = if u < profile.suppliers {
                u
            } else {
                rng.gen_range(0..profile.suppliers)
            };
            if pairs.insert((sup, site)) {
                unit_site.push(site);
                unit_supplier.push(sup);
                break;
            }
        }
    }
    let unit_country: Vec<usize> = unit_site.iter().map(|&s| site_country[s]).collect();
    let unit_pos: Vec<(f64, f64)> = unit_site.iter().map(|&s| site_pos[s]).collect();
    let continent = |c: usize| c % 3;

    // Bill of materials.
    let m = profile.parts;
    let n_top = ((m as f64).sqrt().round() as usize).clamp(1, m.saturating_sub(1).max(1));
    let mut depth = vec![0usize; m];
    let mut parent: Vec<Option<(usize, u32)>> = vec![None; m];
    for p in 1..m {
        let (par, q) = if p <= n_top {
            (0, 1)
        } else {
            let candidates: Vec<usize> = (1..p).filter(|&x| depth[x] < 3).collect();
            let par = *candidates.choose(&mut rng).unwrap_or(&0);
            (par, if depth[par] >= 1 && rng.gen_bool(0.2) { 2 } else { 1 })
        };
        depth[p] = depth[par] + 1;
        parent[p] = Some((par, q));
    }

    // Value added: root first, the rest scaled to the remaining budget.
    let cap_total: f64 = (0..profile.countries).map(country_cap).sum();
    let budget = (0.5 * cap_total).min(0.999);
    let root_va = 0.11f64.min(0.3 * budget).min(country_cap(0) * 0.9);
    let weights: Vec<f64> = (1..m)
        .map(|p| {
            let level = match depth[p] {
                1 => 4.0,
                2 => 1.5,
                _ => 0.6,
            };
            level * rng.gen_range(0.5..1.5)
        })
        .collect();
    let wsum: f64 = weights.iter().sum::<f64>().max(1e-12);
    let mut va = vec![root_va; m];
    for p in 1..m {
        va[p] = round_to(((budget - root_va) * weights[p - 1] / wsum).clamp(0.001, 0.1), 1e-4).max(1e-4);
    }

    let bbox = |rng: &mut ChaCha8Rng, d: usize| -> Dims {
        let (l, w, h) = match d {
            0 => ((40000, 40001), (36000, 36001), (12000, 12001)),
            1 => ((6000, 32000), (2000, 6500), (1500, 6000)),
            2 => ((1500, 12000), (800, 3200), (600, 2600)),
            _ => ((200, 3000), (200, 1500), (100, 1200)),
        };
        let mut b = [
            rng.gen_range(l.0..l.1),
            rng.gen_range(w.0..w.1),
            rng.gen_range(h.0..h.1),
        ];
        if d > 0 {
            for (k, hold) in OUTSIZE_HOLD.iter().enumerate() {
                b[k] = b[k].min(*hold);
            }
        }
        b
    };
    let mut parts: Vec<Part<S>> = (0..m)
        .map(|p| Part {
            id: format!("P{p:02}"),
            name: match depth[p] {
                0 => "Final product".to_string(),
                1 => format!("Major assembly {p}"),
                2 => format!("Sub-assembly {p}"),
                _ => format!("Component {p}"),
            },
            bbox: bbox(&mut rng, depth[p]),
            value_added: lit(va[p]),
            children: Vec::new(),
        })
        .collect();
    for p in 1..m {
        let (par, q) = parent[p].expect("non-root");
        let id = parts[p].id.clone();
        parts[par].children.push(BomEdge { part: id, quantity: q });
    }

    // Producers.
    let fal_units: Vec<usize> = (0..profile.units).filter(|&u| unit_country[u] < n_fal).collect();
    let mut producers: Vec<Vec<usize>> = Vec::with_capacity(m);
    for p in 0..m {
        let pool: Vec<usize> = if p == 0 && !fal_units.is_empty() {
            fal_units.clone()
        } else {
            (0..profile.units).collect()
        };
        let want = rng.gen_range(2..=4).min(pool.len());
        let mut chosen: Vec<usize> = Vec::new();
        let first = *pool.choose(&mut rng).expect("units exist");
        chosen.push(first);
        if profile.double_sourcing {
            let differs = |u: &usize| unit_country[*u] != unit_country[first];
            let mut others: Vec<usize> = pool.iter().copied().filter(differs).collect();
            if others.is_empty() {
                others = (0..profile.units).filter(differs).collect();
            }
            if let Some(&u) = others.choose(&mut rng) {
                chosen.push(u);
            }
        }
        let mut rest: Vec<usize> = pool.iter().copied().filter(|u| !chosen.contains(u)).collect();
        rest.shuffle(&mut rng);
        while chosen.len() < want {
            match rest.pop() {
                Some(u) => chosen.push(u),
                None => break,
            }
        }
        chosen.sort_unstable();
        producers.push(chosen);
    }

    let suppliers: Vec<Supplier<S>> = (0..profile.suppliers)
        .map(|s| Supplier {
            id: format!("S{s:02}"),
            va_min: None,
            va_max: None,
        })
        .collect();
    let plants: Vec<Plant<S>> = (0..profile.units)
        .map(|u| Plant {
            id: format!("F{u:02}"),
            site: sites[unit_site[u]].id.clone(),
            producible_parts: (0..m)
                .filter(|p| producers[*p].contains(&u))
                .map(|p| parts[p].id.clone())
                .collect(),
            production_hours: Some(lit(round_to(rng.gen_range(2.0..24.0), 0.5))),
        })
        .collect();
    let units: Vec<ProductionUnit<S>> = (0..profile.units)
        .map(|u| ProductionUnit {
            id: format!("U{u:02}"),
            supplier: suppliers[unit_supplier[u]].id.clone(),
            plant: plants[u].id.clone(),
            va_max: None,
        })
        .collect();

    // Harbour warehouses near their k closest units.
    let mut wh_pos = Vec::new();
    let warehouses: Vec<Warehouse> = (0..profile.warehouses)
        .map(|w| {
            let site = w % profile.sites;
            let pos = (
                site_pos[site].0 + rng.gen_range(-80.0..80.0),
                site_pos[site].1 + rng.gen_range(-80.0..80.0),
            );
            wh_pos.push(pos);
            let mut by_dist: Vec<usize> = (0..profile.units).collect();
            by_dist.sort_by(|&a, &b| {
                dist(unit_pos[a], pos)
                    .total_cmp(&dist(unit_pos[b], pos))
                    .then(a.cmp(&b))
            });
            let k = rng.gen_range(2..=4).min(profile.units);
            let mut near: Vec<usize> = by_dist[..k].to_vec();
            near.sort_unstable();
            Warehouse {
                id: format!("W{w:02} Harbor"),
                site: sites[site].id.clone(),
                nearby_units: near.iter().map(|&u| units[u].id.clone()).collect(),
            }
        })
        .collect();

    // Transport means.
    let fams = families(profile.means);
    let mut counters = [0usize; 3];
    let means: Vec<TransportMean<S>> = fams
        .iter()
        .enumerate()
        .map(|(i, f)| {
            let k = match f {
                Family::Sea => 0,
                Family::Road => 1,
                Family::Air => 2,
            };
            counters[k] += 1;
            let n = counters[k];
            let (id, name, co2, speed, cost, container) = match f {
                Family::Air if n == 1 => (
                    "air",
                    "Outsize cargo aircraft".to_string(),
                    rng.gen_range(14000.0..18000.0),
                    rng.gen_range(650.0..750.0),
                    rng.gen_range(40.0..60.0),
                    OUTSIZE_HOLD,
                ),
                Family::Air => (
                    "air",
                    format!("Freighter {n}"),
                    rng.gen_range(8000.0..12000.0),
                    rng.gen_range(750.0..880.0),
                    rng.gen_range(15.0..30.0),
                    [3100, 2400, 1600],
                ),
                Family::Road if n == 1 => (
                    "road",
                    "Truck oversized low bed".to_string(),
                    rng.gen_range(1000.0..1400.0),
                    rng.gen_range(45.0..60.0),
                    rng.gen_range(5.0..8.0),
                    [14800, 3300, 3000],
                ),
                Family::Road if n == 2 => (
                    "road",
                    "Truck special convoy".to_string(),
                    rng.gen_range(1300.0..1800.0),
                    rng.gen_range(30.0..45.0),
                    rng.gen_range(8.0..12.0),
                    [32000, 6600, 6000],
                ),
                Family::Road => (
                    "road",
                    format!("Truck {n}"),
                    rng.gen_range(700.0..1000.0),
                    rng.gen_range(60.0..80.0),
                    rng.gen_range(2.0..5.0),
                    [13600, 2450, 2700],
                ),
                Family::Sea if n == 1 => (
                    "sea",
                    "RoRo ship".to_string(),
                    rng.gen_range(90.0..140.0),
                    rng.gen_range(28.0..36.0),
                    rng.gen_range(3.0..6.0),
                    [34000, 8000, 7500],
                ),
                Family::Sea => (
                    "sea",
                    format!("Container ship {n}"),
                    rng.gen_range(30.0..80.0),
                    rng.gen_range(22.0..40.0),
                    rng.gen_range(1.0..3.0),
                    [12000, 2350, 2390],
                ),
            };
            TransportMean {
                id: format!("{id}-{i:02}"),
                name,
                co2_g_per_km: lit(round_to(co2, 1.0)),
                speed_km_per_h: lit(round_to(speed, 1.0)),
                cost_eur_per_km: lit(round_to(cost, 0.01)),
                container,
            }
        })
        .collect();
    let of = |f: Family| -> Vec<usize> { (0..fams.len()).filter(|&i| fams[i] == f).collect() };
    let (air, road, sea) = (of(Family::Air), of(Family::Road), of(Family::Sea));

    let mut links: Vec<MetaLink<S>> = Vec::new();
    let alt = |m: usize, km: f64| LinkAlternative {
        mean: means[m].id.clone(),
        distance_km: lit(round_to(km, 0.1)),
    };
    let pick = |rng: &mut ChaCha8Rng, pool: &[usize], k: usize| -> Vec<usize> {
        let mut v: Vec<usize> = pool.choose_multiple(rng, k.min(pool.len())).copied().collect();
        v.sort_unstable();
        v
    };

    // Direct unit links for every producer pair a BOM edge can connect.
    let mut direct = BTreeSet::new();
    for p in 1..m {
        let (par, _) = parent[p].expect("non-root");
        for &u1 in &producers[p] {
            for &u2 in &producers[par] {
                if u1 != u2 {
                    direct.insert((u1, u2));
                }
            }
        }
    }
    for &(u1, u2) in &direct {
        let d = dist(unit_pos[u1], unit_pos[u2]);
        let mut alts = Vec::new();
        let mut chosen: Vec<usize> = Vec::new();
        if continent(unit_country[u1]) == continent(unit_country[u2]) {
            chosen.extend(pick(&mut rng, &road, 3));
        }
        chosen.push(air[0]);
        chosen.extend(pick(&mut rng, &air[1..], 1));
        chosen.sort_unstable();
        chosen.dedup();
        for mi in chosen {
            let km = match fams[mi] {
                Family::Road => 1.25 * d + rng.gen_range(15.0..60.0),
                _ => d + rng.gen_range(20.0..80.0),
            };
            alts.push(alt(mi, km));
        }
        links.push(MetaLink {
            source: units[u1].id.clone(),
            dest: units[u2].id.clone(),
            alternatives: alts,
        });
    }

    // Road legs between units and their harbours.
    for (w, wh) in warehouses.iter().enumerate() {
        let mut near: Vec<usize> = wh
            .nearby_units
            .iter()
            .map(|id| units.iter().position(|u| &u.id == id).unwrap())
            .collect();
        near.sort_unstable();
        for u in near {
            let d = dist(unit_pos[u], wh_pos[w]) + 5.0;
            for (source, dest) in [
                (units[u].id.clone(), wh.id.clone()),
                (wh.id.clone(), units[u].id.clone()),
            ] {
                let modes = if road.is_empty() {
                    vec![air[0]]
                } else {
                    pick(&mut rng, &road, 2)
                };
                links.push(MetaLink {
                    source,
                    dest,
                    alternatives: modes
                        .iter()
                        .map(|&mi| alt(mi, 1.2 * d + rng.gen_range(2.0..20.0)))
                        .collect(),
                });
            }
        }
    }

    // Sea and road legs between harbours.
    for a in 0..warehouses.len() {
        for b in 0..warehouses.len() {
            if a == b {
                continue;
            }
            let d = dist(wh_pos[a], wh_pos[b]);
            let same = continent(site_country[a % profile.sites]) == continent(site_country[b % profile.sites]);
            let mut modes = pick(&mut rng, &sea, 2);
            if same && !road.is_empty() {
                modes.extend(pick(&mut rng, &road, 1));
            }
            if modes.is_empty() {
                modes.push(air[0]);
            }
            modes.sort_unstable();
            modes.dedup();
            links.push(MetaLink {
                source: warehouses[a].id.clone(),
                dest: warehouses[b].id.clone(),
                alternatives: modes
                    .iter()
                    .map(|&mi| {
                        let f = if fams[mi] == Family::Sea { 1.5 } else { 1.25 };
                        alt(mi, f * d + rng.gen_range(30.0..120.0))
                    })
                    .collect(),
            });
        }
    }

    DatasetFile {
        meta: Meta {
            schema_version: SCHEMA_VERSION.to_string(),
            final_product: parts[0].id.clone(),
        },
        parts,
        countries,
        suppliers,
        sites,
        plants,
        units,
        warehouses,
        transport_means: means,
        links,
        bounds: Bounds::default(),
    }
}
