//! Phase II over a fixed assignment, and the id-keyed solution file that
//! carries an assignment between runs.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::constraints::check_constraints;
use crate::dataset::Dataset;
use crate::drago::{drago_plan, Criterion, DragoError, DragoOptions, Plan};
use crate::kpi::{compute_kpis, KpiReport};
use crate::model::{Allocation, ProductionAssignment, SourcingMode};
use crate::network::{
    build_network, propagate_demand, prune_infeasible, DemandSchedule, NetworkError, TransportNetwork,
};
use crate::scalar::Scalar;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PipelineError {
    #[error("solution file: {0}")]
    Solution(String),
    #[error("assignment breaks {} rule(s): {}", .0.len(), .0.join("; "))]
    Infeasible(Vec<String>),
    #[error(transparent)]
    Network(#[from] NetworkError),
    #[error(transparent)]
    Drago(#[from] DragoError),
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UnitShare {
    pub unit: String,
    pub share: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolutionPart {
    pub part: String,
    pub allocations: Vec<UnitShare>,
}

/// Part to producing units with shares, keyed by record ids.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolutionFile {
    pub mode: SourcingMode,
    pub fal_count: usize,
    pub sr: f64,
    pub dist: Option<f64>,
    /// In dataset part order.
    pub parts: Vec<SolutionPart>,
}

impl SolutionFile {
    pub fn from_assignment<S: Scalar>(a: &ProductionAssignment<S>, ds: &Dataset<S>, sr: S, dist: Option<S>) -> Self {
        SolutionFile {
            mode: a.mode,
            fal_count: a.fal_count,
            sr: sr.as_f64(),
            dist: dist.map(Scalar::as_f64),
            parts: a
                .iter()
                .map(|(p, allocs)| SolutionPart {
                    part: ds.part(p).id.clone(),
                    allocations: allocs
                        .iter()
                        .map(|x| UnitShare {
                            unit: ds.unit(x.unit).id.clone(),
                            share: x.share.as_f64(),
                        })
                        .collect(),
                })
                .collect(),
        }
    }

    pub fn to_assignment<S: Scalar>(&self, ds: &Dataset<S>) -> Result<ProductionAssignment<S>, PipelineError> {
        let mut a = ProductionAssignment::new(self.mode, self.fal_count);
        for entry in &self.parts {
            let p = ds
                .part_idx(&entry.part)
                .ok_or_else(|| PipelineError::Solution(format!("unknown part `{}`", entry.part)))?;
            let allocs = entry
                .allocations
                .iter()
                .map(|x| {
                    let unit = ds
                        .unit_idx(&x.unit)
                        .ok_or_else(|| PipelineError::Solution(format!("unknown unit `{}`", x.unit)))?;
                    Ok(Allocation {
                        unit,
                        share: S::lit(x.share),
                    })
                })
                .collect::<Result<Vec<_>, PipelineError>>()?;
            a.assign(p, allocs);
        }
        Ok(a)
    }

    /// One line per part: `part: unit (share), unit (share)`.
    pub fn listing(&self) -> String {
        let width = self.parts.iter().map(|p| p.part.len()).max().unwrap_or(0);
        let mut out = String::new();
        for p in &self.parts {
            let units: Vec<String> = p
                .allocations
                .iter()
                .map(|x| format!("{} ({:.2})", x.unit, x.share))
                .collect();
            let _ = writeln!(out, "{:<width$}  {}", p.part, units.join(", "));
        }
        out
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Phase2Config<S> {
    pub products: u64,
    pub takt_h: S,
    pub criterion: Criterion<S>,
    pub drago: DragoOptions,
}

#[derive(Clone, Debug)]
pub struct Phase2Output<S> {
    pub network: TransportNetwork<S>,
    pub schedule: DemandSchedule<S>,
    pub plan: Plan<S>,
    pub report: KpiReport,
}

/// Pruned network and demand for a complete, feasible assignment.
pub fn prepare_network<S: Scalar>(
    ds: &Dataset<S>,
    assignment: &ProductionAssignment<S>,
    products: u64,
    takt_h: S,
) -> Result<(TransportNetwork<S>, DemandSchedule<S>), PipelineError> {
    let broken: Vec<String> = check_constraints(assignment, ds)
        .iter()
        .map(ToString::to_string)
        .collect();
    if !broken.is_empty() {
        return Err(PipelineError::Infeasible(broken));
    }
    let missing: Vec<String> = (0..ds.part_count())
        .map(crate::model::PartIdx)
        .filter(|&p| !assignment.contains(p))
        .map(|p| format!("part `{}` is unassigned", ds.part(p).id))
        .collect();
    if !missing.is_empty() {
        return Err(PipelineError::Infeasible(missing));
    }
    let net = prune_infeasible(&build_network(assignment, ds)?)?;
    let schedule = propagate_demand(&net, ds, products, takt_h)?;
    Ok((net, schedule))
}

/// Network build, pruning, demand, DRAGO and KPIs for one criterion.
pub fn run_phase2<S: Scalar>(
    ds: &Dataset<S>,
    assignment: &ProductionAssignment<S>,
    config: &Phase2Config<S>,
) -> Result<Phase2Output<S>, PipelineError> {
    let (network, schedule) = prepare_network(ds, assignment, config.products, config.takt_h)?;
    let plan = drago_plan(&network, &schedule, &config.criterion, &config.drago)?;
    let report = compute_kpis(&plan, &network, config.products, config.drago.seed);
    Ok(Phase2Output {
        network,
        schedule,
        plan,
        report,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::drago::Metric;
    use crate::test_fixtures::harbours;

    fn config(m: Metric) -> Phase2Config<f64> {
        Phase2Config {
            products: 40,
            takt_h: 24.0,
            criterion: Criterion::Metric(m),
            drago: DragoOptions::default(),
        }
    }

    #[test]
    fn solution_round_trip() {
        let (ds, a) = harbours();
        let file = SolutionFile::from_assignment(&a, &ds, 1.0, Some(12.5));
        let text = serde_json::to_string(&file).unwrap();
        let back: SolutionFile = serde_json::from_str(&text).unwrap();
        assert_eq!(back.to_assignment(&ds).unwrap(), a);
        assert_eq!(file.listing().lines().count(), 3);
        assert!(file.listing().contains("U1 (1.00)"));
    }

    #[test]
    fn unknown_ids_are_reported() {
        let (ds, a) = harbours();
        let mut file = SolutionFile::from_assignment(&a, &ds, 1.0, None);
        file.parts[0].allocations[0].unit = "U9".into();
        assert!(matches!(file.to_assignment(&ds), Err(PipelineError::Solution(m)) if m.contains("U9")));
    }

    #[test]
    fn phase2_reports_positive_totals() {
        let (ds, a) = harbours();
        let out = run_phase2(&ds, &a, &config(Metric::Co2)).unwrap();
        assert!(out.report.totals.co2_g > 0.0);
        assert!(out.report.partition_gap() <= 1e-9);
    }

    #[test]
    fn infeasible_assignment_is_refused() {
        let (ds, mut a) = harbours();
        a.assign(
            ds.root(),
            vec![Allocation {
                unit: crate::model::UnitIdx(2),
                share: 1.0,
            }],
        );
        assert!(matches!(
            run_phase2(&ds, &a, &config(Metric::Cost)),
            Err(PipelineError::Infeasible(_))
        ));
    }
}
