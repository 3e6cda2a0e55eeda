//! The resolved world model and everything that reads, checks or fabricates it.

mod consistency;
mod io;
mod synthetic;

use std::collections::{HashMap, HashSet};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::batching::fits;
use crate::model::*;
use crate::scalar::Scalar;

pub use consistency::{validate_consistency, ConsistencyReport, Finding, FindingCode, Severity};
pub use io::{load_dataset, load_dataset_from_reader, load_dataset_from_str, save_dataset, SCHEMA_VERSION};
pub use synthetic::{gen_synthetic, Profile, ProfileError};

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("parse error at `{path}` (line {line}, column {column}): {message}")]
    Parse {
        path: String,
        line: usize,
        column: usize,
        message: String,
    },
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("schema version `{found}` is not supported (expected `{expected}`)")]
    SchemaVersion { found: String, expected: String },
    #[error("duplicate {kind} id `{id}`")]
    DuplicateId { kind: &'static str, id: String },
    #[error("{from} references unknown {kind} `{missing}`")]
    DanglingReference {
        kind: &'static str,
        from: String,
        missing: String,
    },
    #[error("{subject}: {reason}")]
    Invalid { subject: String, reason: String },
    #[error("bill of materials is not a tree: {0}")]
    Bom(String),
    #[error("part `{0}` has no production unit able to produce it")]
    NoProducer(String),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Meta {
    pub schema_version: String,
    pub final_product: String,
}

/// On-disk layout of a dataset document.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DatasetFile<S> {
    pub meta: Meta,
    pub parts: Vec<Part<S>>,
    pub countries: Vec<Country<S>>,
    pub suppliers: Vec<Supplier<S>>,
    pub sites: Vec<Site>,
    pub plants: Vec<Plant<S>>,
    pub units: Vec<ProductionUnit<S>>,
    pub warehouses: Vec<Warehouse>,
    pub transport_means: Vec<TransportMean<S>>,
    #[serde(default)]
    pub links: Vec<MetaLink<S>>,
    pub bounds: Bounds<S>,
}

/// Immutable, fully cross-referenced world model.
#[derive(Clone, Debug)]
pub struct Dataset<S = f64> {
    file: DatasetFile<S>,
    index: Index<S>,
}

#[derive(Clone, Debug)]
struct Index<S> {
    parts: HashMap<String, PartIdx>,
    countries: HashMap<String, CountryIdx>,
    suppliers: HashMap<String, SupplierIdx>,
    units: HashMap<String, UnitIdx>,
    warehouses: HashMap<String, WarehouseIdx>,
    means: HashMap<String, MeanIdx>,
    root: PartIdx,
    parent: Vec<Option<(PartIdx, u32)>>,
    children: Vec<Vec<(PartIdx, u32)>>,
    bom_multiplier: Vec<u64>,
    unit_supplier: Vec<SupplierIdx>,
    unit_plant: Vec<PlantIdx>,
    unit_country: Vec<CountryIdx>,
    unit_site: Vec<SiteIdx>,
    producers: Vec<Vec<UnitIdx>>,
    capable: Vec<Vec<bool>>,
    warehouse_site: Vec<SiteIdx>,
    near_unit: Vec<Vec<WarehouseIdx>>,
    link_ends: Vec<(NodeIdx, NodeIdx)>,
    link_alts: Vec<Vec<(MeanIdx, S)>>,
    link_by_ends: HashMap<(NodeIdx, NodeIdx), LinkIdx>,
    mean_fits: Vec<Vec<bool>>,
    country_va_max: Vec<S>,
    supplier_va_max: Vec<S>,
    unit_va_max: Vec<S>,
    plant_hours: Vec<S>,
}

fn unique_ids<'a, I, T>(kind: &'static str, ids: I, wrap: fn(usize) -> T) -> Result<HashMap<String, T>, DatasetError>
where
    I: Iterator<Item = &'a String>,
{
    let mut map = HashMap::new();
    for (i, id) in ids.enumerate() {
        if map.insert(id.clone(), wrap(i)).is_some() {
            return Err(DatasetError::DuplicateId { kind, id: id.clone() });
        }
    }
    Ok(map)
}

fn lookup<T: Copy>(map: &HashMap<String, T>, kind: &'static str, from: String, id: &str) -> Result<T, DatasetError> {
    map.get(id).copied().ok_or_else(|| DatasetError::DanglingReference {
        kind,
        from,
        missing: id.to_string(),
    })
}

fn check_fraction<S: Scalar>(subject: &str, field: &str, v: S, open: bool) -> Result<(), DatasetError> {
    let ok = if open {
        v > S::zero() && v < S::one()
    } else {
        v >= S::zero() && v <= S::one()
    };
    if ok && v.is_finite() {
        Ok(())
    } else {
        Err(DatasetError::Invalid {
            subject: subject.to_string(),
            reason: format!("{field} = {v} outside {}", if open { "(0, 1)" } else { "[0, 1]" }),
        })
    }
}

fn check_bounds_pair<S: Scalar>(subject: &str, min: Option<S>, max: Option<S>) -> Result<(), DatasetError> {
    if let Some(v) = min {
        check_fraction(subject, "va_min", v, false)?;
    }
    if let Some(v) = max {
        check_fraction(subject, "va_max", v, false)?;
    }
    if let (Some(lo), Some(hi)) = (min, max) {
        if lo > hi {
            return Err(DatasetError::Invalid {
                subject: subject.to_string(),
                reason: format!("va_min {lo} exceeds va_max {hi}"),
            });
        }
    }
    Ok(())
}

fn positive<S: Scalar>(subject: &str, field: &str, v: S) -> Result<(), DatasetError> {
    if v > S::zero() && v.is_finite() {
        Ok(())
    } else {
        Err(DatasetError::Invalid {
            subject: subject.to_string(),
            reason: format!("{field} must be positive, got {v}"),
        })
    }
}

fn positive_dims(subject: &str, field: &str, d: Dims) -> Result<(), DatasetError> {
    if d.iter().all(|&x| x > 0) {
        Ok(())
    } else {
        Err(DatasetError::Invalid {
            subject: subject.to_string(),
            reason: format!("{field} dimensions must be positive, got {d:?}"),
        })
    }
}

impl<S: Scalar> Dataset<S> {
    /// Resolves every reference and checks the structural invariants.
    pub fn new(file: DatasetFile<S>) -> Result<Self, DatasetError> {
        if file.meta.schema_version != io::SCHEMA_VERSION {
            return Err(DatasetError::SchemaVersion {
                found: file.meta.schema_version.clone(),
                expected: io::SCHEMA_VERSION.to_string(),
            });
        }
        let index = Index::build(&file)?;
        Ok(Dataset { file, index })
    }

    pub fn file(&self) -> &DatasetFile<S> {
        &self.file
    }

    pub fn into_file(self) -> DatasetFile<S> {
        self.file
    }

    pub fn parts(&self) -> &[Part<S>] {
        &self.file.parts
    }

    pub fn countries(&self) -> &[Country<S>] {
        &self.file.countries
    }

    pub fn suppliers(&self) -> &[Supplier<S>] {
        &self.file.suppliers
    }

    pub fn sites(&self) -> &[Site] {
        &self.file.sites
    }

    pub fn plants(&self) -> &[Plant<S>] {
        &self.file.plants
    }

    pub fn units(&self) -> &[ProductionUnit<S>] {
        &self.file.units
    }

    pub fn warehouses(&self) -> &[Warehouse] {
        &self.file.warehouses
    }

    pub fn transport_means(&self) -> &[TransportMean<S>] {
        &self.file.transport_means
    }

    pub fn links(&self) -> &[MetaLink<S>] {
        &self.file.links
    }

    pub fn bounds(&self) -> &Bounds<S> {
        &self.file.bounds
    }

    pub fn part(&self, p: PartIdx) -> &Part<S> {
        &self.file.parts[p.0]
    }

    pub fn unit(&self, u: UnitIdx) -> &ProductionUnit<S> {
        &self.file.units[u.0]
    }

    pub fn mean(&self, m: MeanIdx) -> &TransportMean<S> {
        &self.file.transport_means[m.0]
    }

    pub fn part_count(&self) -> usize {
        self.file.parts.len()
    }

    pub fn part_idx(&self, id: &str) -> Option<PartIdx> {
        self.index.parts.get(id).copied()
    }

    pub fn unit_idx(&self, id: &str) -> Option<UnitIdx> {
        self.index.units.get(id).copied()
    }

    pub fn country_idx(&self, id: &str) -> Option<CountryIdx> {
        self.index.countries.get(id).copied()
    }

    pub fn supplier_idx(&self, id: &str) -> Option<SupplierIdx> {
        self.index.suppliers.get(id).copied()
    }

    pub fn warehouse_idx(&self, id: &str) -> Option<WarehouseIdx> {
        self.index.warehouses.get(id).copied()
    }

    pub fn mean_idx(&self, id: &str) -> Option<MeanIdx> {
        self.index.means.get(id).copied()
    }

    pub fn node_idx(&self, id: &str) -> Option<NodeIdx> {
        self.unit_idx(id)
            .map(NodeIdx::Unit)
            .or_else(|| self.warehouse_idx(id).map(NodeIdx::Warehouse))
    }

    pub fn node_id(&self, n: NodeIdx) -> &str {
        match n {
            NodeIdx::Unit(u) => &self.file.units[u.0].id,
            NodeIdx::Warehouse(w) => &self.file.warehouses[w.0].id,
        }
    }

    /// The final product.
    pub fn root(&self) -> PartIdx {
        self.index.root
    }

    pub fn parent(&self, p: PartIdx) -> Option<(PartIdx, u32)> {
        self.index.parent[p.0]
    }

    pub fn children(&self, p: PartIdx) -> &[(PartIdx, u32)] {
        &self.index.children[p.0]
    }

    /// Pieces of `p` needed per final product (product of BOM quantities up to the root).
    pub fn bom_multiplier(&self, p: PartIdx) -> u64 {
        self.index.bom_multiplier[p.0]
    }

    /// Units able to produce `p`, ascending.
    pub fn producers(&self, p: PartIdx) -> &[UnitIdx] {
        &self.index.producers[p.0]
    }

    pub fn can_produce(&self, u: UnitIdx, p: PartIdx) -> bool {
        self.index
            .capable
            .get(u.0)
            .and_then(|row| row.get(p.0))
            .copied()
            .unwrap_or(false)
    }

    pub fn unit_country(&self, u: UnitIdx) -> CountryIdx {
        self.index.unit_country[u.0]
    }

    pub fn unit_supplier(&self, u: UnitIdx) -> SupplierIdx {
        self.index.unit_supplier[u.0]
    }

    pub fn unit_plant(&self, u: UnitIdx) -> PlantIdx {
        self.index.unit_plant[u.0]
    }

    pub fn unit_site(&self, u: UnitIdx) -> SiteIdx {
        self.index.unit_site[u.0]
    }

    pub fn warehouse_site(&self, w: WarehouseIdx) -> SiteIdx {
        self.index.warehouse_site[w.0]
    }

    /// Warehouses nearby unit `u`, ascending.
    pub fn warehouses_near(&self, u: UnitIdx) -> &[WarehouseIdx] {
        &self.index.near_unit[u.0]
    }

    pub fn link_between(&self, from: NodeIdx, to: NodeIdx) -> Option<LinkIdx> {
        self.index.link_by_ends.get(&(from, to)).copied()
    }

    pub fn link_ends(&self, l: LinkIdx) -> (NodeIdx, NodeIdx) {
        self.index.link_ends[l.0]
    }

    /// Transport alternatives of a link as (mean, distance km).
    pub fn link_alternatives(&self, l: LinkIdx) -> &[(MeanIdx, S)] {
        &self.index.link_alts[l.0]
    }

    pub fn link_count(&self) -> usize {
        self.index.link_ends.len()
    }

    /// Whether part `p` fits the container of mean `m` in some axis-aligned orientation.
    pub fn part_fits_mean(&self, p: PartIdx, m: MeanIdx) -> bool {
        self.index.mean_fits[p.0][m.0]
    }

    pub fn country_va_max(&self, c: CountryIdx) -> S {
        self.index.country_va_max[c.0]
    }

    pub fn supplier_va_max(&self, s: SupplierIdx) -> S {
        self.index.supplier_va_max[s.0]
    }

    pub fn unit_va_max(&self, u: UnitIdx) -> S {
        self.index.unit_va_max[u.0]
    }

    /// Production duration per piece at unit `u`, hours.
    pub fn production_hours(&self, u: UnitIdx) -> S {
        self.index.plant_hours[self.index.unit_plant[u.0].0]
    }
}

impl<S: Scalar> Index<S> {
    fn build(file: &DatasetFile<S>) -> Result<Self, DatasetError> {
        let parts = unique_ids("part", file.parts.iter().map(|p| &p.id), PartIdx)?;
        let countries = unique_ids("country", file.countries.iter().map(|c| &c.id), CountryIdx)?;
        let suppliers = unique_ids("supplier", file.suppliers.iter().map(|s| &s.id), SupplierIdx)?;
        let sites = unique_ids("site", file.sites.iter().map(|s| &s.id), SiteIdx)?;
        let plants = unique_ids("plant", file.plants.iter().map(|p| &p.id), PlantIdx)?;
        let units = unique_ids("unit", file.units.iter().map(|u| &u.id), UnitIdx)?;
        let warehouses = unique_ids("warehouse", file.warehouses.iter().map(|w| &w.id), WarehouseIdx)?;
        let means = unique_ids("transport mean", file.transport_means.iter().map(|m| &m.id), MeanIdx)?;
        for w in &file.warehouses {
            if units.contains_key(&w.id) {
                return Err(DatasetError::DuplicateId {
                    kind: "node",
                    id: w.id.clone(),
                });
            }
        }

        check_fraction("bounds", "va_c_max", file.bounds.va_c_max, false)?;
        check_fraction("bounds", "va_s_max", file.bounds.va_s_max, false)?;
        check_fraction("bounds", "va_u_max", file.bounds.va_u_max, false)?;

        // Bill of materials.
        let m = file.parts.len();
        if m == 0 {
            return Err(DatasetError::Bom("no parts".into()));
        }
        let mut parent: Vec<Option<(PartIdx, u32)>> = vec![None; m];
        let mut children: Vec<Vec<(PartIdx, u32)>> = vec![Vec::new(); m];
        for (i, part) in file.parts.iter().enumerate() {
            let subject = format!("part `{}`", part.id);
            positive_dims(&subject, "bbox", part.bbox)?;
            check_fraction(&subject, "value_added", part.value_added, true)?;
            for edge in &part.children {
                let c = lookup(&parts, "part", subject.clone(), &edge.part)?;
                if edge.quantity == 0 {
                    return Err(DatasetError::Invalid {
                        subject: subject.clone(),
                        reason: format!("quantity of child `{}` must be at least 1", edge.part),
                    });
                }
                if parent[c.0].is_some() {
                    return Err(DatasetError::Bom(format!(
                        "part `{}` has more than one parent",
                        edge.part
                    )));
                }
                parent[c.0] = Some((PartIdx(i), edge.quantity));
                children[i].push((c, edge.quantity));
            }
        }
        let roots: Vec<usize> = (0..m).filter(|&i| parent[i].is_none()).collect();
        let root = lookup(&parts, "part", "meta.final_product".into(), &file.meta.final_product)?;
        match roots.as_slice() {
            [] => return Err(DatasetError::Bom("cycle: every part has a parent".into())),
            [r] if *r == root.0 => {}
            [_] => {
                return Err(DatasetError::Bom(format!(
                    "final product `{}` is not the root",
                    file.meta.final_product
                )))
            }
            many => {
                let ids: Vec<&str> = many.iter().map(|&i| file.parts[i].id.as_str()).collect();
                return Err(DatasetError::Bom(format!("multiple roots: {}", ids.join(", "))));
            }
        }
        let mut bom_multiplier = vec![0u64; m];
        let mut stack = vec![root];
        bom_multiplier[root.0] = 1;
        let mut seen = 0usize;
        while let Some(p) = stack.pop() {
            seen += 1;
            for &(c, q) in &children[p.0] {
                bom_multiplier[c.0] = bom_multiplier[p.0].saturating_mul(q as u64);
                stack.push(c);
            }
        }
        if seen != m {
            let stuck: Vec<&str> = (0..m)
                .filter(|&i| bom_multiplier[i] == 0)
                .map(|i| file.parts[i].id.as_str())
                .collect();
            return Err(DatasetError::Bom(format!("cycle among parts: {}", stuck.join(", "))));
        }

        // Geography and organisation.
        for c in &file.countries {
            check_bounds_pair(&format!("country `{}`", c.id), c.va_min, c.va_max)?;
        }
        for s in &file.suppliers {
            check_bounds_pair(&format!("supplier `{}`", s.id), s.va_min, s.va_max)?;
        }
        let site_country = file
            .sites
            .iter()
            .map(|s| lookup(&countries, "country", format!("site `{}`", s.id), &s.country))
            .collect::<Result<Vec<_>, _>>()?;
        let plant_site = file
            .plants
            .iter()
            .map(|p| lookup(&sites, "site", format!("plant `{}`", p.id), &p.site))
            .collect::<Result<Vec<_>, _>>()?;
        let mut plant_parts = Vec::with_capacity(file.plants.len());
        let mut plant_hours = Vec::with_capacity(file.plants.len());
        for plant in &file.plants {
            let subject = format!("plant `{}`", plant.id);
            let mut set = vec![false; m];
            for pid in &plant.producible_parts {
                set[lookup(&parts, "part", subject.clone(), pid)?.0] = true;
            }
            plant_parts.push(set);
            let hours = plant.production_hours.unwrap_or_else(S::zero);
            if hours < S::zero() || !hours.is_finite() {
                return Err(DatasetError::Invalid {
                    subject,
                    reason: format!("production_hours must be non-negative, got {hours}"),
                });
            }
            plant_hours.push(hours);
        }

        let mut unit_supplier = Vec::new();
        let mut unit_plant = Vec::new();
        let mut pairs = HashSet::new();
        let mut unit_va_max = Vec::new();
        for u in &file.units {
            let subject = format!("unit `{}`", u.id);
            let s = lookup(&suppliers, "supplier", subject.clone(), &u.supplier)?;
            let p = lookup(&plants, "plant", subject.clone(), &u.plant)?;
            if !pairs.insert((s, p)) {
                return Err(DatasetError::Invalid {
                    subject,
                    reason: format!(
                        "(supplier `{}`, plant `{}`) pair already used by another unit",
                        u.supplier, u.plant
                    ),
                });
            }
            if let Some(v) = u.va_max {
                check_fraction(&subject, "va_max", v, false)?;
            }
            unit_supplier.push(s);
            unit_plant.push(p);
            unit_va_max.push(u.va_max.unwrap_or(file.bounds.va_u_max));
        }
        let unit_site: Vec<SiteIdx> = unit_plant.iter().map(|p| plant_site[p.0]).collect();
        let unit_country: Vec<CountryIdx> = unit_site.iter().map(|s| site_country[s.0]).collect();
        let capable: Vec<Vec<bool>> = unit_plant.iter().map(|p| plant_parts[p.0].clone()).collect();
        let mut producers = vec![Vec::new(); m];
        for (u, row) in capable.iter().enumerate() {
            for (p, &ok) in row.iter().enumerate() {
                if ok {
                    producers[p].push(UnitIdx(u));
                }
            }
        }
        if let Some(p) = producers.iter().position(Vec::is_empty) {
            return Err(DatasetError::NoProducer(file.parts[p].id.clone()));
        }

        let mut near_unit = vec![Vec::new(); file.units.len()];
        let mut warehouse_site = Vec::new();
        for (wi, w) in file.warehouses.iter().enumerate() {
            let subject = format!("warehouse `{}`", w.id);
            warehouse_site.push(lookup(&sites, "site", subject.clone(), &w.site)?);
            if w.nearby_units.is_empty() {
                return Err(DatasetError::Invalid {
                    subject,
                    reason: "nearby_units must not be empty".into(),
                });
            }
            for uid in &w.nearby_units {
                let u = lookup(&units, "unit", subject.clone(), uid)?;
                if !near_unit[u.0].contains(&WarehouseIdx(wi)) {
                    near_unit[u.0].push(WarehouseIdx(wi));
                }
            }
        }
        for list in &mut near_unit {
            list.sort();
        }

        for t in &file.transport_means {
            let subject = format!("transport mean `{}`", t.id);
            positive(&subject, "co2_g_per_km", t.co2_g_per_km)?;
            positive(&subject, "speed_km_per_h", t.speed_km_per_h)?;
            positive(&subject, "cost_eur_per_km", t.cost_eur_per_km)?;
            positive_dims(&subject, "container", t.container)?;
        }

        let node = |id: &str, from: String| -> Result<NodeIdx, DatasetError> {
            units
                .get(id)
                .map(|&u| NodeIdx::Unit(u))
                .or_else(|| warehouses.get(id).map(|&w| NodeIdx::Warehouse(w)))
                .ok_or_else(|| DatasetError::DanglingReference {
                    kind: "node",
                    from,
                    missing: id.to_string(),
                })
        };
        let mut link_ends = Vec::new();
        let mut link_alts = Vec::new();
        let mut link_by_ends = HashMap::new();
        for (li, link) in file.links.iter().enumerate() {
            let subject = format!("link `{}` -> `{}`", link.source, link.dest);
            let a = node(&link.source, subject.clone())?;
            let b = node(&link.dest, subject.clone())?;
            if a == b {
                return Err(DatasetError::Invalid {
                    subject,
                    reason: "source and dest must differ".into(),
                });
            }
            if link.alternatives.is_empty() {
                return Err(DatasetError::Invalid {
                    subject,
                    reason: "at least one transport alternative is required".into(),
                });
            }
            let mut alts = Vec::with_capacity(link.alternatives.len());
            for alt in &link.alternatives {
                let mi = lookup(&means, "transport mean", subject.clone(), &alt.mean)?;
                if alts.iter().any(|&(m, _)| m == mi) {
                    return Err(DatasetError::Invalid {
                        subject,
                        reason: format!("transport mean `{}` listed twice", alt.mean),
                    });
                }
                positive(&subject, "distance_km", alt.distance_km)?;
                alts.push((mi, alt.distance_km));
            }
            if link_by_ends.insert((a, b), LinkIdx(li)).is_some() {
                return Err(DatasetError::DuplicateId {
                    kind: "link",
                    id: subject,
                });
            }
            link_ends.push((a, b));
            link_alts.push(alts);
        }

        let mean_fits = file
            .parts
            .iter()
            .map(|p| file.transport_means.iter().map(|t| fits(p.bbox, t.container)).collect())
            .collect();

        let country_va_max = file
            .countries
            .iter()
            .map(|c| c.va_max.unwrap_or(file.bounds.va_c_max))
            .collect();
        let supplier_va_max = file
            .suppliers
            .iter()
            .map(|s| s.va_max.unwrap_or(file.bounds.va_s_max))
            .collect();

        Ok(Index {
            parts,
            countries,
            suppliers,
            units,
            warehouses,
            means,
            root,
            parent,
            children,
            bom_multiplier,
            unit_supplier,
            unit_plant,
            unit_country,
            unit_site,
            producers,
            capable,
            warehouse_site,
            near_unit,
            link_ends,
            link_alts,
            link_by_ends,
            mean_fits,
            country_va_max,
            supplier_va_max,
            unit_va_max,
            plant_hours,
        })
    }
}
