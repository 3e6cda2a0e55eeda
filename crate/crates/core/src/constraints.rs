//! Feasibility rules for a production assignment.
//!
//! | id | rule |
//! |----|------|
//! | C1 | a unit only produces parts its plant is capable of |
//! | C2 | double sourcing uses two distinct units, in different countries whenever the part's producers span several |
//! | C3 | double-sourcing shares lie in \[0.2, 0.8\] and sum to one |
//! | C4 | value added per country stays under its ceiling |
//! | C5 | value added per supplier stays under its ceiling |
//! | C6 | value added per unit stays under its ceiling |

use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::model::{PartIdx, ProductionAssignment, SourcingMode};
use crate::scalar::Scalar;
use crate::value_added::{aggregate_value_added, ValueAddedRollup};

pub const SHARE_MIN: f64 = 0.2;
pub const SHARE_MAX: f64 = 0.8;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum ConstraintId {
    C1,
    C2,
    C3,
    C4,
    C5,
    C6,
    /// Wrong number of producers for the sourcing mode.
    Sourcing,
    /// Value added below a declared minimum. Reported as a warning only.
    VaMin,
}

impl fmt::Display for ConstraintId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ConstraintId::C1 => "C1",
            ConstraintId::C2 => "C2",
            ConstraintId::C3 => "C3",
            ConstraintId::C4 => "C4",
            ConstraintId::C5 => "C5",
            ConstraintId::C6 => "C6",
            ConstraintId::Sourcing => "sourcing",
            ConstraintId::VaMin => "va-min",
        };
        f.write_str(s)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Violation<S> {
    pub constraint: ConstraintId,
    pub subject: String,
    pub observed: S,
    pub bound: S,
    pub message: String,
}

impl<S: Scalar> fmt::Display for Violation<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}] {}: {}", self.constraint, self.subject, self.message)
    }
}

fn violation<S>(constraint: ConstraintId, subject: String, observed: S, bound: S, message: String) -> Violation<S> {
    Violation {
        constraint,
        subject,
        observed,
        bound,
        message,
    }
}

/// Whether the producers of `p` lie in at least two countries.
pub fn producers_span_countries<S: Scalar>(dataset: &Dataset<S>, p: PartIdx) -> bool {
    let countries: BTreeSet<_> = dataset.producers(p).iter().map(|&u| dataset.unit_country(u)).collect();
    countries.len() >= 2
}

/// Every rule broken by `assignment`; empty iff C1 to C6 all hold.
///
/// Unassigned parts are not violations, so partial assignments from an early
/// decode stop are checked on what they contain.
pub fn check_constraints<S: Scalar>(assignment: &ProductionAssignment<S>, dataset: &Dataset<S>) -> Vec<Violation<S>> {
    let tol = S::tolerance();
    let lo = S::lit(SHARE_MIN);
    let hi = S::lit(SHARE_MAX);
    let n_units = dataset.units().len();
    let mut out = Vec::new();
    let mut dangling = false;

    for (p, allocs) in assignment.iter() {
        let Some(part) = dataset.parts().get(p.0) else {
            out.push(violation(
                ConstraintId::C1,
                format!("part #{}", p.0),
                S::zero(),
                S::zero(),
                "part does not exist".into(),
            ));
            dangling = true;
            continue;
        };
        let subject = format!("part `{}`", part.id);
        for a in allocs {
            if a.unit.0 >= n_units {
                out.push(violation(
                    ConstraintId::C1,
                    subject.clone(),
                    S::zero(),
                    S::zero(),
                    format!("unit #{} does not exist", a.unit.0),
                ));
                dangling = true;
            } else if !dataset.can_produce(a.unit, p) {
                out.push(violation(
                    ConstraintId::C1,
                    subject.clone(),
                    S::zero(),
                    S::one(),
                    format!("unit `{}` cannot produce it", dataset.unit(a.unit).id),
                ));
            }
        }

        let expected = assignment.expected_sources(p, dataset.root());
        if allocs.len() != expected {
            out.push(violation(
                ConstraintId::Sourcing,
                subject.clone(),
                S::from_count(allocs.len() as u64),
                S::from_count(expected as u64),
                format!("{} producers, expected {expected}", allocs.len()),
            ));
        }
        let total: S = allocs.iter().map(|a| a.share).sum();
        let exempt = p == dataset.root() && assignment.multi_fal();
        let double = assignment.mode == SourcingMode::Double && !exempt;
        if (total - S::one()).abs() > tol {
            out.push(violation(
                if double {
                    ConstraintId::C3
                } else {
                    ConstraintId::Sourcing
                },
                subject.clone(),
                total,
                S::one(),
                format!("shares sum to {total}"),
            ));
        }
        let distinct: BTreeSet<_> = allocs.iter().map(|a| a.unit).collect();
        if distinct.len() != allocs.len() {
            out.push(violation(
                if double {
                    ConstraintId::C2
                } else {
                    ConstraintId::Sourcing
                },
                subject.clone(),
                S::from_count(distinct.len() as u64),
                S::from_count(allocs.len() as u64),
                "the same unit is listed twice".into(),
            ));
        }
        if double && allocs.len() == 2 {
            for a in allocs {
                if a.share < lo - tol || a.share > hi + tol {
                    out.push(violation(
                        ConstraintId::C3,
                        subject.clone(),
                        a.share,
                        if a.share < lo { lo } else { hi },
                        format!("share {} outside [{lo}, {hi}]", a.share),
                    ));
                }
            }
            let (u1, u2) = (allocs[0].unit, allocs[1].unit);
            if u1.0 < n_units
                && u2.0 < n_units
                && u1 != u2
                && dataset.unit_country(u1) == dataset.unit_country(u2)
                && producers_span_countries(dataset, p)
            {
                let c = &dataset.countries()[dataset.unit_country(u1).0].id;
                out.push(violation(
                    ConstraintId::C2,
                    subject.clone(),
                    S::one(),
                    S::lit(2.0),
                    format!("both producers are in `{c}` although another country can produce it"),
                ));
            }
        }
    }

    if !dangling {
        if let Ok(rollup) = aggregate_value_added(assignment, dataset) {
            out.extend(ceiling_violations(&rollup, dataset));
        }
    }
    out
}

/// C4 to C6 against an already computed roll-up.
pub fn ceiling_violations<S: Scalar>(rollup: &ValueAddedRollup<S>, dataset: &Dataset<S>) -> Vec<Violation<S>> {
    use crate::model::{CountryIdx, SupplierIdx, UnitIdx};
    let tol = S::tolerance();
    let mut out = Vec::new();
    for (i, &v) in rollup.per_country.iter().enumerate() {
        let max = dataset.country_va_max(CountryIdx(i));
        if v > max + tol {
            out.push(violation(
                ConstraintId::C4,
                format!("country `{}`", dataset.countries()[i].id),
                v,
                max,
                format!("value added {v} exceeds {max}"),
            ));
        }
    }
    for (i, &v) in rollup.per_supplier.iter().enumerate() {
        let max = dataset.supplier_va_max(SupplierIdx(i));
        if v > max + tol {
            out.push(violation(
                ConstraintId::C5,
                format!("supplier `{}`", dataset.suppliers()[i].id),
                v,
                max,
                format!("value added {v} exceeds {max}"),
            ));
        }
    }
    for (i, &v) in rollup.per_unit.iter().enumerate() {
        let max = dataset.unit_va_max(UnitIdx(i));
        if v > max + tol {
            out.push(violation(
                ConstraintId::C6,
                format!("unit `{}`", dataset.units()[i].id),
                v,
                max,
                format!("value added {v} exceeds {max}"),
            ));
        }
    }
    out
}

/// Countries and suppliers below their declared `va_min`. These minima take
/// part in no feasibility rule, so the findings are advisory.
pub fn va_min_warnings<S: Scalar>(rollup: &ValueAddedRollup<S>, dataset: &Dataset<S>) -> Vec<Violation<S>> {
    let tol = S::tolerance();
    let mut out = Vec::new();
    for (c, &v) in dataset.countries().iter().zip(&rollup.per_country) {
        if let Some(min) = c.va_min {
            if v + tol < min {
                out.push(violation(
                    ConstraintId::VaMin,
                    format!("country `{}`", c.id),
                    v,
                    min,
                    format!("value added {v} below minimum {min}"),
                ));
            }
        }
    }
    for (s, &v) in dataset.suppliers().iter().zip(&rollup.per_supplier) {
        if let Some(min) = s.va_min {
            if v + tol < min {
                out.push(violation(
                    ConstraintId::VaMin,
                    format!("supplier `{}`", s.id),
                    v,
                    min,
                    format!("value added {v} below minimum {min}"),
                ));
            }
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::load_dataset_from_str;
    use crate::model::{Allocation, UnitIdx};

    // Three parts; units U1 (FR) and U2 (FR) and U3 (DE).
    const TOY: &str = r#"{
      "meta": {"schema_version": "indsys-1", "final_product": "R"},
      "parts": [
        {"id": "R", "name": "Root", "bbox": [10, 10, 10], "value_added": 0.1, "children": [{"part": "A"}, {"part": "B"}]},
        {"id": "A", "name": "A", "bbox": [5, 5, 5], "value_added": 0.15},
        {"id": "B", "name": "B", "bbox": [5, 5, 5], "value_added": 0.1}
      ],
      "countries": [{"id": "FR", "va_max": 0.22, "va_min": 0.2}, {"id": "DE", "va_max": 0.2}],
      "suppliers": [{"id": "S1"}, {"id": "S2"}, {"id": "S3"}],
      "sites": [{"id": "L1", "country": "FR"}, {"id": "L2", "country": "DE"}],
      "plants": [
        {"id": "F1", "site": "L1", "producible_parts": ["R", "A", "B"]},
        {"id": "F2", "site": "L1", "producible_parts": ["A", "B"]},
        {"id": "F3", "site": "L2", "producible_parts": ["A"]}
      ],
      "units": [
        {"id": "U1", "supplier": "S1", "plant": "F1"},
        {"id": "U2", "supplier": "S2", "plant": "F2"},
        {"id": "U3", "supplier": "S3", "plant": "F3"}
      ],
      "warehouses": [],
      "transport_means": [{"id": "T", "name": "Truck", "co2_g_per_km": 1, "speed_km_per_h": 1,
                           "cost_eur_per_km": 1, "container": [100, 100, 100]}],
      "bounds": {"va_c_max": 0.1, "va_s_max": 0.5, "va_u_max": 0.5}
    }"#;

    fn toy() -> Dataset {
        load_dataset_from_str(TOY).unwrap()
    }

    fn one(u: usize) -> Vec<Allocation<f64>> {
        vec![Allocation {
            unit: UnitIdx(u),
            share: 1.0,
        }]
    }

    fn ids(v: &[Violation<f64>]) -> Vec<ConstraintId> {
        v.iter().map(|x| x.constraint).collect()
    }

    #[test]
    fn incapable_unit_violates_c1() {
        let ds = toy();
        let mut a = ProductionAssignment::new(SourcingMode::Single, 1);
        a.assign(ds.part_idx("B").unwrap(), one(2));
        assert_eq!(ids(&check_constraints(&a, &ds)), vec![ConstraintId::C1]);
    }

    #[test]
    fn same_country_double_violates_c2() {
        let ds = toy();
        let mut a = ProductionAssignment::new(SourcingMode::Double, 1);
        a.assign(
            ds.part_idx("A").unwrap(),
            vec![
                Allocation {
                    unit: UnitIdx(0),
                    share: 0.5,
                },
                Allocation {
                    unit: UnitIdx(1),
                    share: 0.5,
                },
            ],
        );
        assert!(ids(&check_constraints(&a, &ds)).contains(&ConstraintId::C2));
    }

    #[test]
    fn same_country_is_fine_when_no_alternative_country() {
        let ds = toy();
        let mut a = ProductionAssignment::new(SourcingMode::Double, 1);
        a.assign(
            ds.part_idx("B").unwrap(),
            vec![
                Allocation {
                    unit: UnitIdx(0),
                    share: 0.3,
                },
                Allocation {
                    unit: UnitIdx(1),
                    share: 0.7,
                },
            ],
        );
        assert!(check_constraints(&a, &ds).is_empty());
    }

    #[test]
    fn share_outside_range_violates_c3() {
        let ds = toy();
        let mut a = ProductionAssignment::new(SourcingMode::Double, 1);
        a.assign(
            ds.part_idx("A").unwrap(),
            vec![
                Allocation {
                    unit: UnitIdx(0),
                    share: 0.1,
                },
                Allocation {
                    unit: UnitIdx(2),
                    share: 0.9,
                },
            ],
        );
        let v = check_constraints(&a, &ds);
        assert_eq!(ids(&v), vec![ConstraintId::C3, ConstraintId::C3]);
    }

    #[test]
    fn country_ceiling_reports_observed_and_bound() {
        let ds = toy();
        let mut a = ProductionAssignment::new(SourcingMode::Single, 1);
        a.assign(ds.part_idx("A").unwrap(), one(0));
        a.assign(ds.part_idx("B").unwrap(), one(1));
        let v = check_constraints(&a, &ds);
        assert_eq!(ids(&v), vec![ConstraintId::C4]);
        assert!((v[0].observed - 0.25).abs() < 1e-12);
        assert_eq!(v[0].bound, 0.22);
    }

    #[test]
    fn valid_partial_assignment_is_clean() {
        let ds = toy();
        let mut a = ProductionAssignment::new(SourcingMode::Single, 1);
        a.assign(ds.part_idx("A").unwrap(), one(2));
        a.assign(ds.part_idx("R").unwrap(), one(0));
        assert!(check_constraints(&a, &ds).is_empty());
        let r = aggregate_value_added(&a, &ds).unwrap();
        assert_eq!(va_min_warnings(&r, &ds).len(), 1);
    }
}
