//! Small hand-checkable datasets shared by unit tests.

use crate::dataset::{load_dataset_from_str, Dataset};
use crate::model::{Allocation, ProductionAssignment, SourcingMode, UnitIdx};

/// R at U0, A at U1, B at U2.
pub(crate) fn chain_assignment(ds: &Dataset) -> ProductionAssignment<f64> {
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

pub(crate) fn harbours() -> (Dataset, ProductionAssignment<f64>) {
    let ds: Dataset = load_dataset_from_str(HARBOURS).unwrap();
    let a = chain_assignment(&ds);
    (ds, a)
}

/// Chain R <- A <- B over units U0, U1, U2 and a harbour W near U1 and U2.
pub(crate) const CHAIN: &str = r#"{
  "meta": {"schema_version": "indsys-1", "final_product": "R"},
  "parts": [
    {"id": "R", "name": "Root", "bbox": [50, 50, 50], "value_added": 0.2, "children": [{"part": "A"}]},
    {"id": "A", "name": "A", "bbox": [20, 20, 20], "value_added": 0.2, "children": [{"part": "B"}]},
    {"id": "B", "name": "B", "bbox": [10, 10, 10], "value_added": 0.2}
  ],
  "countries": [{"id": "FR"}, {"id": "DE"}],
  "suppliers": [{"id": "S0"}, {"id": "S1"}, {"id": "S2"}],
  "sites": [{"id": "L0", "country": "FR"}, {"id": "L1", "country": "DE"}],
  "plants": [
    {"id": "F0", "site": "L0", "producible_parts": ["R"]},
    {"id": "F1", "site": "L1", "producible_parts": ["A"]},
    {"id": "F2", "site": "L1", "producible_parts": ["B"]}
  ],
  "units": [
    {"id": "U0", "supplier": "S0", "plant": "F0"},
    {"id": "U1", "supplier": "S1", "plant": "F1"},
    {"id": "U2", "supplier": "S2", "plant": "F2"}
  ],
  "warehouses": [{"id": "W", "site": "L1", "nearby_units": ["U1", "U2"]}],
  "transport_means": [
    {"id": "sea", "name": "Ship", "co2_g_per_km": 10, "speed_km_per_h": 30, "cost_eur_per_km": 1, "container": [100, 100, 100]},
    {"id": "road", "name": "Truck", "co2_g_per_km": 100, "speed_km_per_h": 60, "cost_eur_per_km": 2, "container": [15, 15, 15]}
  ],
  "links": [
    {"source": "U1", "dest": "U0", "alternatives": [{"mean": "sea", "distance_km": 100}, {"mean": "road", "distance_km": 70}]},
    {"source": "U2", "dest": "W", "alternatives": [{"mean": "road", "distance_km": 5}]},
    {"source": "W", "dest": "U1", "alternatives": [{"mean": "road", "distance_km": 8}, {"mean": "sea", "distance_km": 12}]}
  ],
  "bounds": {"va_c_max": 1, "va_s_max": 1, "va_u_max": 1}
}"#;

/// Root R built at U0 from A (U1) and B (U2). "City_2 Harbor" is near U1 and
/// U2, "City_4 Harbor" near U0, so both parts can travel direct, through
/// City_2 alone, or through City_2 then City_4.
pub(crate) const HARBOURS: &str = r#"{
  "meta": {"schema_version": "indsys-1", "final_product": "R"},
  "parts": [
    {"id": "R", "name": "Root", "bbox": [900, 900, 900], "value_added": 0.2, "children": [{"part": "A", "quantity": 2}, {"part": "B"}]},
    {"id": "A", "name": "Wing", "bbox": [400, 200, 100], "value_added": 0.2},
    {"id": "B", "name": "Pylon", "bbox": [300, 300, 300], "value_added": 0.2}
  ],
  "countries": [{"id": "FR"}, {"id": "DE"}, {"id": "ES"}],
  "suppliers": [{"id": "S0"}, {"id": "S1"}, {"id": "S2"}],
  "sites": [{"id": "L0", "country": "FR"}, {"id": "L1", "country": "DE"}, {"id": "L2", "country": "ES"}],
  "plants": [
    {"id": "F0", "site": "L0", "producible_parts": ["R"]},
    {"id": "F1", "site": "L1", "producible_parts": ["A"]},
    {"id": "F2", "site": "L2", "producible_parts": ["B"]}
  ],
  "units": [
    {"id": "U0", "supplier": "S0", "plant": "F0"},
    {"id": "U1", "supplier": "S1", "plant": "F1"},
    {"id": "U2", "supplier": "S2", "plant": "F2"}
  ],
  "warehouses": [
    {"id": "City_2 Harbor", "site": "L1", "nearby_units": ["U1", "U2"]},
    {"id": "City_4 Harbor", "site": "L0", "nearby_units": ["U0"]}
  ],
  "transport_means": [
    {"id": "air", "name": "Cargo Aircraft", "co2_g_per_km": 900, "speed_km_per_h": 700, "cost_eur_per_km": 30, "container": [1000, 1000, 1000]},
    {"id": "road", "name": "Truck", "co2_g_per_km": 100, "speed_km_per_h": 60, "cost_eur_per_km": 2, "container": [1000, 500, 500]},
    {"id": "sea", "name": "Container Ship", "co2_g_per_km": 20, "speed_km_per_h": 30, "cost_eur_per_km": 1, "container": [2000, 1000, 1000]}
  ],
  "links": [
    {"source": "U1", "dest": "U0", "alternatives": [{"mean": "road", "distance_km": 900}, {"mean": "air", "distance_km": 700}]},
    {"source": "U2", "dest": "U0", "alternatives": [{"mean": "road", "distance_km": 1100}]},
    {"source": "U1", "dest": "City_2 Harbor", "alternatives": [{"mean": "road", "distance_km": 40}]},
    {"source": "U2", "dest": "City_2 Harbor", "alternatives": [{"mean": "road", "distance_km": 60}]},
    {"source": "City_2 Harbor", "dest": "U0", "alternatives": [{"mean": "road", "distance_km": 950}]},
    {"source": "City_2 Harbor", "dest": "City_4 Harbor", "alternatives": [{"mean": "sea", "distance_km": 1500}, {"mean": "road", "distance_km": 980}]},
    {"source": "City_4 Harbor", "dest": "U0", "alternatives": [{"mean": "road", "distance_km": 30}]}
  ],
  "bounds": {"va_c_max": 1, "va_s_max": 1, "va_u_max": 1}
}"#;
