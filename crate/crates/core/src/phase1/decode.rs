//! Priority list to production assignment.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::dist::PairBounds;
use crate::constraints::{producers_span_countries, SHARE_MAX, SHARE_MIN};
use crate::dataset::Dataset;
use crate::model::{Allocation, PartIdx, ProductionAssignment, SourcingMode, UnitIdx};
use crate::scalar::Scalar;

/// How the double-sourcing split `a : (1 - a)` is drawn.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ShareSampling {
    /// Uniform over {0.20, 0.25, ..., 0.80}.
    #[default]
    Grid,
    /// Uniform over the feasible part of \[0.2, 0.8\].
    Continuous,
}

const GRID_STEPS: u32 = 12;

fn grid_value<S: Scalar>(k: u32) -> S {
    S::lit(SHARE_MIN) + S::lit(0.05) * S::from_count(k as u64)
}

#[derive(Clone, Debug)]
pub struct DecodeOutcome<S> {
    pub assignment: ProductionAssignment<S>,
    /// Parts placed before the first failure.
    pub placed: usize,
    pub failed_part: Option<PartIdx>,
}

impl<S: Scalar> DecodeOutcome<S> {
    pub fn sr(&self, total: usize) -> S {
        S::from_count(self.placed as u64) / S::from_count(total.max(1) as u64)
    }
}

/// Reusable decoder holding the dataset-wide pair distance bounds.
#[derive(Clone, Debug)]
pub struct Decoder<'a, S> {
    ds: &'a Dataset<S>,
    pub mode: SourcingMode,
    pub fal_count: usize,
    pub share_sampling: ShareSampling,
    /// Probability of restricting a choice to unused units when any is available.
    pub unused_preference: f64,
    bounds: PairBounds<S>,
}

/// Running value-added totals while the assignment grows.
struct Budget<S> {
    unit: Vec<S>,
    supplier: Vec<S>,
    country: Vec<S>,
    used: Vec<bool>,
}

impl<'a, S: Scalar> Decoder<'a, S> {
    pub fn new(ds: &'a Dataset<S>, mode: SourcingMode) -> Self {
        Decoder {
            ds,
            mode,
            fal_count: 1,
            share_sampling: ShareSampling::Grid,
            unused_preference: 1.0,
            bounds: PairBounds::new(ds),
        }
    }

    pub fn with_fal_count(mut self, k: usize) -> Self {
        self.fal_count = k.max(1);
        self
    }

    pub fn dataset(&self) -> &'a Dataset<S> {
        self.ds
    }

    pub fn bounds(&self) -> &PairBounds<S> {
        &self.bounds
    }

    /// Inserts parts in list order until one cannot be placed.
    pub fn decode<R: Rng + ?Sized>(&self, priority_list: &[PartIdx], rng: &mut R) -> DecodeOutcome<S> {
        let ds = self.ds;
        let mut assignment = ProductionAssignment::new(self.mode, self.fal_count);
        let mut budget = Budget {
            unit: vec![S::zero(); ds.units().len()],
            supplier: vec![S::zero(); ds.suppliers().len()],
            country: vec![S::zero(); ds.countries().len()],
            used: vec![false; ds.units().len()],
        };
        for (placed, &p) in priority_list.iter().enumerate() {
            let allocs = if p == ds.root() && self.fal_count > 1 {
                self.place_parallel(p, &assignment, &budget, rng)
            } else {
                match self.mode {
                    SourcingMode::Single => self.place_single(p, &assignment, &budget, rng),
                    SourcingMode::Double => self.place_double(p, &assignment, &budget, rng),
                }
            };
            let Some(allocs) = allocs else {
                return DecodeOutcome {
                    assignment,
                    placed,
                    failed_part: Some(p),
                };
            };
            let va = ds.part(p).value_added;
            for a in &allocs {
                let amount = va * a.share;
                budget.unit[a.unit.0] += amount;
                budget.supplier[ds.unit_supplier(a.unit).0] += amount;
                budget.country[ds.unit_country(a.unit).0] += amount;
                budget.used[a.unit.0] = true;
            }
            assignment.assign(p, allocs);
        }
        DecodeOutcome {
            placed: priority_list.len(),
            assignment,
            failed_part: None,
        }
    }

    /// Whether `u` producing `p` has a route to every already placed
    /// consumer and from every already placed child producer.
    fn connected(&self, p: PartIdx, u: UnitIdx, assignment: &ProductionAssignment<S>) -> bool {
        let ds = self.ds;
        if let Some((parent, _)) = ds.parent(p) {
            if let Some(consumers) = assignment.get(parent) {
                if consumers.iter().any(|c| self.bounds.get(ds, p, u, c.unit).is_none()) {
                    return false;
                }
            }
        }
        ds.children(p).iter().all(|&(c, _)| {
            assignment
                .get(c)
                .is_none_or(|makers| makers.iter().all(|m| self.bounds.get(ds, c, m.unit, u).is_some()))
        })
    }

    /// Headroom of `u` alone: the smallest slack over unit, supplier and country.
    fn slack(&self, u: UnitIdx, b: &Budget<S>) -> (S, S, S) {
        let ds = self.ds;
        let s = ds.unit_supplier(u);
        let c = ds.unit_country(u);
        (
            ds.unit_va_max(u) - b.unit[u.0],
            ds.supplier_va_max(s) - b.supplier[s.0],
            ds.country_va_max(c) - b.country[c.0],
        )
    }

    fn fits_alone(&self, u: UnitIdx, amount: S, b: &Budget<S>) -> bool {
        let (su, ss, sc) = self.slack(u, b);
        amount <= su && amount <= ss && amount <= sc
    }

    fn choose<R: Rng + ?Sized>(&self, options: &[UnitIdx], b: &Budget<S>, rng: &mut R) -> Option<UnitIdx> {
        let unused: Vec<UnitIdx> = options.iter().copied().filter(|u| !b.used[u.0]).collect();
        let restrict = !unused.is_empty()
            && (self.unused_preference >= 1.0 || rng.gen_bool(self.unused_preference.clamp(0.0, 1.0)));
        if restrict {
            unused.choose(rng).copied()
        } else {
            options.choose(rng).copied()
        }
    }

    fn available(&self, p: PartIdx, assignment: &ProductionAssignment<S>) -> Vec<UnitIdx> {
        self.ds
            .producers(p)
            .iter()
            .copied()
            .filter(|&u| self.connected(p, u, assignment))
            .collect()
    }

    fn place_single<R: Rng + ?Sized>(
        &self,
        p: PartIdx,
        assignment: &ProductionAssignment<S>,
        b: &Budget<S>,
        rng: &mut R,
    ) -> Option<Vec<Allocation<S>>> {
        let va = self.ds.part(p).value_added;
        let options: Vec<UnitIdx> = self
            .available(p, assignment)
            .into_iter()
            .filter(|&u| self.fits_alone(u, va, b))
            .collect();
        let u = self.choose(&options, b, rng)?;
        Some(vec![Allocation {
            unit: u,
            share: S::one(),
        }])
    }

    /// Feasible share interval `[lo, hi]` for `u1` when `u2` takes the rest.
    fn share_range(&self, va: S, u1: UnitIdx, u2: UnitIdx, b: &Budget<S>) -> Option<(S, S)> {
        let ds = self.ds;
        let (su1, ss1, sc1) = self.slack(u1, b);
        let (su2, ss2, sc2) = self.slack(u2, b);
        let same_supplier = ds.unit_supplier(u1) == ds.unit_supplier(u2);
        let same_country = ds.unit_country(u1) == ds.unit_country(u2);
        let mut cap1 = su1;
        let mut cap2 = su2;
        if same_supplier {
            if va > ss1 {
                return None;
            }
        } else {
            cap1 = cap1.min(ss1);
            cap2 = cap2.min(ss2);
        }
        if same_country {
            if va > sc1 {
                return None;
            }
        } else {
            cap1 = cap1.min(sc1);
            cap2 = cap2.min(sc2);
        }
        // va·a ≤ cap1 and va·(1 - a) ≤ cap2.
        let lo = S::lit(SHARE_MIN).max(S::one() - cap2 / va);
        let hi = S::lit(SHARE_MAX).min(cap1 / va);
        (lo <= hi).then_some((lo, hi))
    }

    fn grid_in(lo: S, hi: S) -> Vec<u32> {
        (0..=GRID_STEPS)
            .filter(|&k| {
                let a = grid_value::<S>(k);
                a >= lo && a <= hi
            })
            .collect()
    }

    fn pair_ok(&self, va: S, u1: UnitIdx, u2: UnitIdx, span: bool, b: &Budget<S>) -> bool {
        if u1 == u2 || (span && self.ds.unit_country(u1) == self.ds.unit_country(u2)) {
            return false;
        }
        match self.share_range(va, u1, u2, b) {
            None => false,
            Some((lo, hi)) => match self.share_sampling {
                ShareSampling::Grid => !Self::grid_in(lo, hi).is_empty(),
                ShareSampling::Continuous => true,
            },
        }
    }

    fn place_double<R: Rng + ?Sized>(
        &self,
        p: PartIdx,
        assignment: &ProductionAssignment<S>,
        b: &Budget<S>,
        rng: &mut R,
    ) -> Option<Vec<Allocation<S>>> {
        let va = self.ds.part(p).value_added;
        let span = producers_span_countries(self.ds, p);
        let options = self.available(p, assignment);
        let firsts: Vec<UnitIdx> = options
            .iter()
            .copied()
            .filter(|&u1| options.iter().any(|&u2| self.pair_ok(va, u1, u2, span, b)))
            .collect();
        let u1 = self.choose(&firsts, b, rng)?;
        let partners: Vec<UnitIdx> = options
            .iter()
            .copied()
            .filter(|&u2| self.pair_ok(va, u1, u2, span, b))
            .collect();
        let u2 = self.choose(&partners, b, rng)?;
        let (lo, hi) = self.share_range(va, u1, u2, b)?;
        let a = match self.share_sampling {
            ShareSampling::Grid => grid_value(*Self::grid_in(lo, hi).choose(rng)?),
            ShareSampling::Continuous => {
                if hi > lo {
                    S::lit(rng.gen_range(lo.as_f64()..=hi.as_f64())).max(lo).min(hi)
                } else {
                    lo
                }
            }
        };
        Some(vec![
            Allocation { unit: u1, share: a },
            Allocation {
                unit: u2,
                share: S::one() - a,
            },
        ])
    }

    /// Root split evenly over `fal_count` distinct final-assembly units.
    fn place_parallel<R: Rng + ?Sized>(
        &self,
        p: PartIdx,
        assignment: &ProductionAssignment<S>,
        b: &Budget<S>,
        rng: &mut R,
    ) -> Option<Vec<Allocation<S>>> {
        let ds = self.ds;
        let k = self.fal_count;
        let share = S::one() / S::from_count(k as u64);
        let amount = ds.part(p).value_added * share;
        let mut local = Budget {
            unit: b.unit.clone(),
            supplier: b.supplier.clone(),
            country: b.country.clone(),
            used: b.used.clone(),
        };
        let mut options = self.available(p, assignment);
        let mut out = Vec::with_capacity(k);
        for _ in 0..k {
            let feasible: Vec<UnitIdx> = options
                .iter()
                .copied()
                .filter(|&u| self.fits_alone(u, amount, &local))
                .collect();
            let u = self.choose(&feasible, &local, rng)?;
            options.retain(|&x| x != u);
            local.unit[u.0] += amount;
            local.supplier[ds.unit_supplier(u).0] += amount;
            local.country[ds.unit_country(u).0] += amount;
            local.used[u.0] = true;
            out.push(Allocation { unit: u, share });
        }
        Some(out)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::constraints::check_constraints;
    use crate::dataset::load_dataset_from_str;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn dataset(parts: &str, plants: &str, units: &str, countries: &str, sites: &str, bounds: &str) -> Dataset {
        load_dataset_from_str(&format!(
            r#"{{
          "meta": {{"schema_version": "indsys-1", "final_product": "R"}},
          "parts": {parts},
          "countries": {countries},
          "suppliers": [{{"id": "S0"}}, {{"id": "S1"}}, {{"id": "S2"}}],
          "sites": {sites},
          "plants": {plants},
          "units": {units},
          "warehouses": [],
          "transport_means": [{{"id": "T", "name": "Truck", "co2_g_per_km": 1, "speed_km_per_h": 1,
                               "cost_eur_per_km": 1, "container": [100, 100, 100]}}],
          "links": [],
          "bounds": {bounds}
        }}"#
        ))
        .unwrap()
    }

    #[test]
    fn single_part_single_unit() {
        let ds = dataset(
            r#"[{"id": "R", "name": "R", "bbox": [1, 1, 1], "value_added": 0.1}]"#,
            r#"[{"id": "F", "site": "L", "producible_parts": ["R"]}]"#,
            r#"[{"id": "U", "supplier": "S0", "plant": "F"}]"#,
            r#"[{"id": "FR"}]"#,
            r#"[{"id": "L", "country": "FR"}]"#,
            r#"{"va_c_max": 1, "va_s_max": 1, "va_u_max": 1}"#,
        );
        let d = Decoder::new(&ds, SourcingMode::Single);
        let out = d.decode(&[PartIdx(0)], &mut ChaCha8Rng::seed_from_u64(0));
        assert_eq!(out.placed, 1);
        assert_eq!(out.sr(1), 1.0);
        assert_eq!(
            out.assignment.get(PartIdx(0)).unwrap(),
            &[Allocation {
                unit: UnitIdx(0),
                share: 1.0
            }]
        );
    }

    #[test]
    fn unit_ceiling_stops_second_part() {
        let ds = dataset(
            r#"[{"id": "R", "name": "R", "bbox": [1, 1, 1], "value_added": 0.2, "children": [{"part": "A"}]},
                {"id": "A", "name": "A", "bbox": [1, 1, 1], "value_added": 0.2}]"#,
            r#"[{"id": "F", "site": "L", "producible_parts": ["R", "A"]}]"#,
            r#"[{"id": "U", "supplier": "S0", "plant": "F", "va_max": 0.3}]"#,
            r#"[{"id": "FR"}]"#,
            r#"[{"id": "L", "country": "FR"}]"#,
            r#"{"va_c_max": 1, "va_s_max": 1, "va_u_max": 1}"#,
        );
        let d = Decoder::new(&ds, SourcingMode::Single);
        let out = d.decode(&[PartIdx(0), PartIdx(1)], &mut ChaCha8Rng::seed_from_u64(0));
        assert_eq!(out.sr(2), 0.5);
        assert_eq!(out.failed_part, Some(PartIdx(1)));
        assert!(check_constraints(&out.assignment, &ds).is_empty());
    }

    #[test]
    fn double_mode_uses_both_countries() {
        let ds = dataset(
            r#"[{"id": "R", "name": "R", "bbox": [1, 1, 1], "value_added": 0.1}]"#,
            r#"[{"id": "F0", "site": "L0", "producible_parts": ["R"]}, {"id": "F1", "site": "L1", "producible_parts": ["R"]}]"#,
            r#"[{"id": "U0", "supplier": "S0", "plant": "F0"}, {"id": "U1", "supplier": "S1", "plant": "F1"}]"#,
            r#"[{"id": "FR"}, {"id": "DE"}]"#,
            r#"[{"id": "L0", "country": "FR"}, {"id": "L1", "country": "DE"}]"#,
            r#"{"va_c_max": 1, "va_s_max": 1, "va_u_max": 1}"#,
        );
        let d = Decoder::new(&ds, SourcingMode::Double);
        for seed in 0..50 {
            let out = d.decode(&[PartIdx(0)], &mut ChaCha8Rng::seed_from_u64(seed));
            let a = out.assignment.get(PartIdx(0)).unwrap();
            assert_eq!(a.len(), 2);
            assert_ne!(a[0].unit, a[1].unit);
            assert!(a.iter().all(|x| (0.2 - 1e-12..=0.8 + 1e-12).contains(&x.share)));
            assert!((a[0].share + a[1].share - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn parallel_final_assembly_splits_evenly() {
        let ds = dataset(
            r#"[{"id": "R", "name": "R", "bbox": [1, 1, 1], "value_added": 0.3}]"#,
            r#"[{"id": "F0", "site": "L0", "producible_parts": ["R"]}, {"id": "F1", "site": "L0", "producible_parts": ["R"]},
                {"id": "F2", "site": "L0", "producible_parts": ["R"]}]"#,
            r#"[{"id": "U0", "supplier": "S0", "plant": "F0"}, {"id": "U1", "supplier": "S1", "plant": "F1"},
                {"id": "U2", "supplier": "S2", "plant": "F2"}]"#,
            r#"[{"id": "FR"}]"#,
            r#"[{"id": "L0", "country": "FR"}]"#,
            r#"{"va_c_max": 1, "va_s_max": 1, "va_u_max": 0.15}"#,
        );
        let d = Decoder::new(&ds, SourcingMode::Single).with_fal_count(3);
        let out = d.decode(&[PartIdx(0)], &mut ChaCha8Rng::seed_from_u64(1));
        let a = out.assignment.get(PartIdx(0)).unwrap();
        assert_eq!(a.len(), 3);
        assert!(check_constraints(&out.assignment, &ds).is_empty());
    }
}
