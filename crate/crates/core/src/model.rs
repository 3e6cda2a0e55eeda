//! Domain entities of the industrial-system world model.
//!
//! Entities reference each other by string identifier as they appear in a
//! dataset file. Once a [`Dataset`](crate::Dataset) resolves them, the
//! optimizer works with the dense index newtypes defined here.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::scalar::Scalar;

/// Bounding box or container extent in millimetres, `[length, width, height]`.
pub type Dims = [u64; 3];

macro_rules! index_type {
    ($(#[$meta:meta])* $name:ident) => {
        $(#[$meta])*
        #[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
        pub struct $name(pub usize);

        impl $name {
            pub fn index(self) -> usize {
                self.0
            }
        }
    };
}

index_type!(
    /// Position of a part in [`Dataset::parts`](crate::Dataset::parts).
    PartIdx
);
index_type!(CountryIdx);
index_type!(SupplierIdx);
index_type!(SiteIdx);
index_type!(PlantIdx);
index_type!(
    /// Position of a production unit in [`Dataset::units`](crate::Dataset::units).
    UnitIdx
);
index_type!(WarehouseIdx);
index_type!(MeanIdx);
index_type!(LinkIdx);

/// Node of the transportation meta-graph: a production unit or a warehouse.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum NodeIdx {
    Unit(UnitIdx),
    Warehouse(WarehouseIdx),
}

impl NodeIdx {
    pub fn as_unit(self) -> Option<UnitIdx> {
        match self {
            NodeIdx::Unit(u) => Some(u),
            NodeIdx::Warehouse(_) => None,
        }
    }

    pub fn is_warehouse(self) -> bool {
        matches!(self, NodeIdx::Warehouse(_))
    }
}

fn one() -> u32 {
    1
}

/// Edge of the bill of materials: `quantity` pieces of `part` go into the parent.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BomEdge {
    pub part: String,
    #[serde(default = "one")]
    pub quantity: u32,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Part<S> {
    pub id: String,
    pub name: String,
    /// Bounding box in mm.
    pub bbox: Dims,
    /// Fraction of the final product's value, in (0, 1).
    pub value_added: S,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub children: Vec<BomEdge>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Country<S> {
    pub id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub va_min: Option<S>,
    /// Falls back to [`Bounds::va_c_max`] when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub va_max: Option<S>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Supplier<S> {
    pub id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub va_min: Option<S>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub va_max: Option<S>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Site {
    pub id: String,
    pub country: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Plant<S> {
    pub id: String,
    pub site: String,
    pub producible_parts: Vec<String>,
    /// Production duration per piece, hours. Zero when absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub production_hours: Option<S>,
}

/// A unique (supplier, plant) pair.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProductionUnit<S> {
    pub id: String,
    pub supplier: String,
    pub plant: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub va_max: Option<S>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Warehouse {
    pub id: String,
    pub site: String,
    /// Units this warehouse "is nearby".
    pub nearby_units: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TransportMean<S> {
    pub id: String,
    pub name: String,
    pub co2_g_per_km: S,
    pub speed_km_per_h: S,
    pub cost_eur_per_km: S,
    /// Usable container extent in mm.
    pub container: Dims,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LinkAlternative<S> {
    pub mean: String,
    pub distance_km: S,
}

/// Directed meta-graph edge with every transport mean it may use.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MetaLink<S> {
    pub source: String,
    pub dest: String,
    pub alternatives: Vec<LinkAlternative<S>>,
}

/// Default value-added ceilings for entities without an explicit bound.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Bounds<S> {
    pub va_c_max: S,
    pub va_s_max: S,
    pub va_u_max: S,
}

impl<S: Scalar> Default for Bounds<S> {
    fn default() -> Self {
        Bounds {
            va_c_max: S::lit(0.1),
            va_s_max: S::lit(0.15),
            va_u_max: S::lit(0.15),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SourcingMode {
    #[default]
    Single,
    Double,
}

impl fmt::Display for SourcingMode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SourcingMode::Single => f.write_str("single"),
            SourcingMode::Double => f.write_str("double"),
        }
    }
}

impl std::str::FromStr for SourcingMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "single" => Ok(SourcingMode::Single),
            "double" => Ok(SourcingMode::Double),
            other => Err(format!("unknown sourcing mode `{other}`")),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Allocation<S> {
    pub unit: UnitIdx,
    pub share: S,
}

/// Part → producing units with production shares.
///
/// Parts absent from the map are unassigned; a partial assignment is what a
/// decode that stopped early produces.
#[derive(Clone, Debug, PartialEq)]
pub struct ProductionAssignment<S> {
    pub mode: SourcingMode,
    /// Number of parallel final-assembly units for the root part.
    pub fal_count: usize,
    allocations: BTreeMap<PartIdx, Vec<Allocation<S>>>,
}

impl<S: Scalar> ProductionAssignment<S> {
    pub fn new(mode: SourcingMode, fal_count: usize) -> Self {
        ProductionAssignment {
            mode,
            fal_count: fal_count.max(1),
            allocations: BTreeMap::new(),
        }
    }

    pub fn assign(&mut self, part: PartIdx, allocations: Vec<Allocation<S>>) {
        self.allocations.insert(part, allocations);
    }

    pub fn get(&self, part: PartIdx) -> Option<&[Allocation<S>]> {
        self.allocations.get(&part).map(Vec::as_slice)
    }

    pub fn contains(&self, part: PartIdx) -> bool {
        self.allocations.contains_key(&part)
    }

    pub fn iter(&self) -> impl Iterator<Item = (PartIdx, &[Allocation<S>])> {
        self.allocations.iter().map(|(p, a)| (*p, a.as_slice()))
    }

    pub fn len(&self) -> usize {
        self.allocations.len()
    }

    pub fn is_empty(&self) -> bool {
        self.allocations.is_empty()
    }

    /// Whether the root part is produced by several parallel final-assembly
    /// units. Such a root is exempt from the double-sourcing rules and is
    /// split in equal shares.
    pub fn multi_fal(&self) -> bool {
        self.fal_count > 1
    }

    /// Number of producers `part` must have in a complete assignment.
    pub fn expected_sources(&self, part: PartIdx, root: PartIdx) -> usize {
        if part == root && self.multi_fal() {
            self.fal_count
        } else {
            match self.mode {
                SourcingMode::Single => 1,
                SourcingMode::Double => 2,
            }
        }
    }

    /// Units used by any part.
    pub fn used_units(&self) -> impl Iterator<Item = UnitIdx> + '_ {
        self.allocations.values().flatten().map(|a| a.unit)
    }

    /// Merges another assignment over disjoint parts into this one.
    pub fn extend(&mut self, other: &ProductionAssignment<S>) {
        for (p, a) in other.iter() {
            self.allocations.insert(p, a.to_vec());
        }
    }
}
