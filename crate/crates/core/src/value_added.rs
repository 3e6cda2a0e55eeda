//! Value-added roll-up per country, supplier and production unit.

use std::ops::Add;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dataset::Dataset;
use crate::model::{ProductionAssignment, UnitIdx};
use crate::scalar::Scalar;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ReferenceError {
    #[error("unknown part index {0}")]
    Part(usize),
    #[error("unknown unit index {0}")]
    Unit(usize),
}

/// Value added attributed to each entity, indexed like the dataset's lists.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ValueAddedRollup<S> {
    pub per_country: Vec<S>,
    pub per_supplier: Vec<S>,
    pub per_unit: Vec<S>,
}

impl<S: Scalar> ValueAddedRollup<S> {
    pub fn zeros<T: Scalar>(dataset: &Dataset<T>) -> Self {
        ValueAddedRollup {
            per_country: vec![S::zero(); dataset.countries().len()],
            per_supplier: vec![S::zero(); dataset.suppliers().len()],
            per_unit: vec![S::zero(); dataset.units().len()],
        }
    }

    /// Adds `amount` to unit `u` and to its supplier and country.
    pub fn credit(&mut self, dataset: &Dataset<S>, u: UnitIdx, amount: S) {
        self.per_unit[u.0] += amount;
        self.per_supplier[dataset.unit_supplier(u).0] += amount;
        self.per_country[dataset.unit_country(u).0] += amount;
    }

    pub fn total(&self) -> S {
        self.per_unit.iter().copied().sum()
    }
}

impl<S: Scalar> Add for ValueAddedRollup<S> {
    type Output = Self;

    fn add(mut self, rhs: Self) -> Self {
        let zip = |a: &mut Vec<S>, b: Vec<S>| {
            for (x, y) in a.iter_mut().zip(b) {
                *x += y;
            }
        };
        zip(&mut self.per_country, rhs.per_country);
        zip(&mut self.per_supplier, rhs.per_supplier);
        zip(&mut self.per_unit, rhs.per_unit);
        self
    }
}

/// Share-weighted roll-up: a part split `a : (1 - a)` credits `a · va` and
/// `(1 - a) · va` to its two units.
pub fn aggregate_value_added<S: Scalar>(
    assignment: &ProductionAssignment<S>,
    dataset: &Dataset<S>,
) -> Result<ValueAddedRollup<S>, ReferenceError> {
    let mut r = ValueAddedRollup::zeros(dataset);
    for (p, allocs) in assignment.iter() {
        let part = dataset.parts().get(p.0).ok_or(ReferenceError::Part(p.0))?;
        for a in allocs {
            if a.unit.0 >= dataset.units().len() {
                return Err(ReferenceError::Unit(a.unit.0));
            }
            r.credit(dataset, a.unit, part.value_added * a.share);
        }
    }
    Ok(r)
}

/// Sum of `value_added` over the assigned parts.
pub fn assigned_value<S: Scalar>(assignment: &ProductionAssignment<S>, dataset: &Dataset<S>) -> S {
    assignment
        .iter()
        .filter_map(|(p, _)| dataset.parts().get(p.0))
        .map(|part| part.value_added)
        .sum()
}
