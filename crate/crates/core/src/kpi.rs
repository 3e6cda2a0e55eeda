//! Transport objectives of a plan and their per-mean breakdown.

use std::fmt::Write as _;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::drago::{Metric, Plan};
use crate::network::TransportNetwork;
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct KpiTotals {
    pub co2_g: f64,
    pub duration_h: f64,
    pub distance_km: f64,
    /// Sum of rate (EUR/km) × km, hence EUR.
    pub cost_eur: f64,
}

impl KpiTotals {
    pub fn get(&self, m: Metric) -> f64 {
        match m {
            Metric::Co2 => self.co2_g,
            Metric::Duration => self.duration_h,
            Metric::Distance => self.distance_km,
            Metric::Cost => self.cost_eur,
        }
    }

    fn add(&mut self, m: Metric, v: f64) {
        match m {
            Metric::Co2 => self.co2_g += v,
            Metric::Duration => self.duration_h += v,
            Metric::Distance => self.distance_km += v,
            Metric::Cost => self.cost_eur += v,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MeanRow {
    pub mean: String,
    pub kpis: KpiTotals,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KpiMeta {
    pub criterion: String,
    pub products: u64,
    pub seed: u64,
    pub route_exact: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct KpiReport {
    pub meta: KpiMeta,
    pub totals: KpiTotals,
    /// One row per transport mean of the network, in dataset order.
    pub by_mean: Vec<MeanRow>,
}

impl KpiReport {
    /// Largest relative gap between a total and the sum of its column.
    pub fn partition_gap(&self) -> f64 {
        Metric::ALL
            .iter()
            .map(|&m| {
                let col: f64 = self.by_mean.iter().map(|r| r.kpis.get(m)).sum();
                let t = self.totals.get(m);
                (col - t).abs() / t.abs().max(f64::MIN_POSITIVE)
            })
            .fold(0.0, f64::max)
    }
}

/// f1 to f4 over the chosen links: `n_e·l·τ_c`, `n_e·l/τ_s`, `n_e·l`,
/// `n_e·l·τ_t`, plus the breakdown by transport mean.
pub fn compute_kpis<S: Scalar>(plan: &Plan<S>, net: &TransportNetwork<S>, products: u64, seed: u64) -> KpiReport {
    let mut totals = KpiTotals::default();
    let mut rows: Vec<MeanRow> = net
        .means
        .iter()
        .map(|m| MeanRow {
            mean: m.name.clone(),
            kpis: KpiTotals::default(),
        })
        .collect();
    for l in &plan.links {
        for m in Metric::ALL {
            let v = l.value(net, m).as_f64();
            totals.add(m, v);
            rows[l.mean.0].kpis.add(m, v);
        }
    }
    KpiReport {
        meta: KpiMeta {
            criterion: plan.criterion.label(),
            products,
            seed,
            route_exact: plan.route_exact,
        },
        totals,
        by_mean: rows,
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReportFormat {
    #[default]
    Table,
    Records,
}

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ReportError {
    #[error("unknown report format `{0}`, expected table or records")]
    UnknownFormat(String),
    #[error("malformed report records: {0}")]
    Parse(String),
}

impl FromStr for ReportFormat {
    type Err = ReportError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "table" => Ok(ReportFormat::Table),
            "records" => Ok(ReportFormat::Records),
            other => Err(ReportError::UnknownFormat(other.to_string())),
        }
    }
}

const ORDER: [Metric; 4] = [Metric::Duration, Metric::Distance, Metric::Co2, Metric::Cost];
const COST_NOTE: &str = "costs: EUR, the sum of rate [EUR/km] × distance [km]";

fn num(x: f64) -> String {
    format!("{x:.2}")
}

fn table(out: &mut String, corner: &str, headers: &[String], rows: &[(String, Vec<f64>)]) {
    let first = rows.iter().map(|r| r.0.len()).chain([corner.len()]).max().unwrap_or(0);
    let widths: Vec<usize> = headers
        .iter()
        .enumerate()
        .map(|(j, h)| {
            rows.iter()
                .map(|r| num(r.1[j]).len())
                .chain([h.len()])
                .max()
                .unwrap_or(0)
        })
        .collect();
    let _ = write!(out, "{corner:<first$}");
    for (h, w) in headers.iter().zip(&widths) {
        let _ = write!(out, "  {h:>w$}");
    }
    out.push('\n');
    for (name, vals) in rows {
        let _ = write!(out, "{name:<first$}");
        for (v, w) in vals.iter().zip(&widths) {
            let _ = write!(out, "  {:>w$}", num(*v));
        }
        out.push('\n');
    }
}

/// One report as a totals line plus the per-mean breakdown, or as JSON.
pub fn render_report(report: &KpiReport, format: ReportFormat) -> String {
    match format {
        ReportFormat::Records => serde_json::to_string_pretty(report).expect("report serializes") + "\n",
        ReportFormat::Table => {
            let mut out = format!(
                "criterion: {}  products: {}  seed: {}{}\n",
                report.meta.criterion,
                report.meta.products,
                report.meta.seed,
                if report.meta.route_exact { "  route-exact" } else { "" }
            );
            let headers: Vec<String> = ORDER.iter().map(|m| m.heading().to_string()).collect();
            let mut rows = vec![("Total".to_string(), ORDER.map(|m| report.totals.get(m)).to_vec())];
            rows.extend(
                report
                    .by_mean
                    .iter()
                    .map(|r| (r.mean.clone(), ORDER.map(|m| r.kpis.get(m)).to_vec())),
            );
            table(&mut out, "", &headers, &rows);
            out.push_str(COST_NOTE);
            out.push('\n');
            out
        }
    }
}

/// Several runs side by side: one row per run with every objective, then
/// one table per objective with transport means as rows and runs as
/// columns.
pub fn render_comparison(reports: &[KpiReport], format: ReportFormat) -> String {
    match format {
        ReportFormat::Records => serde_json::to_string_pretty(reports).expect("reports serialize") + "\n",
        ReportFormat::Table => {
            let mut out = String::new();
            let headers: Vec<String> = ORDER.iter().map(|m| m.heading().to_string()).collect();
            let rows: Vec<(String, Vec<f64>)> = reports
                .iter()
                .map(|r| {
                    (
                        format!("{} optimization", r.meta.criterion),
                        ORDER.map(|m| r.totals.get(m)).to_vec(),
                    )
                })
                .collect();
            table(&mut out, "", &headers, &rows);
            let runs: Vec<String> = reports.iter().map(|r| format!("{} opt.", r.meta.criterion)).collect();
            for m in [Metric::Distance, Metric::Duration, Metric::Co2, Metric::Cost] {
                out.push('\n');
                let means = reports.first().map(|r| r.by_mean.as_slice()).unwrap_or(&[]);
                let rows: Vec<(String, Vec<f64>)> = means
                    .iter()
                    .enumerate()
                    .map(|(i, row)| {
                        (
                            row.mean.clone(),
                            reports.iter().map(|r| r.by_mean[i].kpis.get(m)).collect(),
                        )
                    })
                    .collect();
                table(&mut out, m.heading(), &runs, &rows);
            }
            out.push_str(COST_NOTE);
            out.push('\n');
            out
        }
    }
}

pub fn parse_records(text: &str) -> Result<KpiReport, ReportError> {
    serde_json::from_str(text).map_err(|e| ReportError::Parse(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::drago::{drago_plan, ChosenLink, Criterion, DragoOptions, Load};
    use crate::model::{LinkIdx, MeanIdx, NodeIdx, PartIdx, UnitIdx};
    use crate::network::{build_network, propagate_demand, prune_infeasible};
    use crate::test_fixtures::harbours;

    fn harbour_net() -> (TransportNetwork<f64>, crate::network::DemandSchedule<f64>) {
        let (ds, a) = harbours();
        let net = prune_infeasible(&build_network(&a, &ds).unwrap()).unwrap();
        let s = propagate_demand(&net, &ds, 40, 1.0).unwrap();
        (net, s)
    }

    fn link(mean: usize, distance_km: f64, rides: u64) -> ChosenLink<f64> {
        ChosenLink {
            link: LinkIdx(0),
            mean: MeanIdx(mean),
            from: NodeIdx::Unit(UnitIdx(1)),
            to: NodeIdx::Unit(UnitIdx(0)),
            distance_km,
            loads: vec![Load {
                flow: 0,
                part: PartIdx(1),
                edge: 0,
                quantity: 1,
            }],
            batch_size: 1,
            rides,
            mixed: false,
        }
    }

    fn plan(links: Vec<ChosenLink<f64>>) -> Plan<f64> {
        Plan {
            criterion: Criterion::Metric(Metric::Co2),
            route_exact: false,
            links,
            warnings: Vec::new(),
        }
    }

    #[test]
    fn empty_plan_is_all_zero() {
        let (net, _) = harbour_net();
        let r = compute_kpis(&plan(Vec::new()), &net, 40, 0);
        assert_eq!(r.totals, KpiTotals::default());
        assert_eq!(r.by_mean.len(), 3);
        assert!(render_report(&r, ReportFormat::Table).contains("0.00"));
    }

    #[test]
    fn two_link_plan_matches_hand_sums() {
        let (net, _) = harbour_net();
        // truck: 100 g/km, 60 km/h, 2 EUR/km; ship: 20 g/km, 30 km/h, 1 EUR/km
        let r = compute_kpis(&plan(vec![link(1, 120.0, 3), link(2, 300.0, 2)]), &net, 40, 0);
        assert_eq!(r.totals.distance_km, 360.0 + 600.0);
        assert_eq!(r.totals.co2_g, 36000.0 + 12000.0);
        assert_eq!(r.totals.duration_h, 6.0 + 20.0);
        assert_eq!(r.totals.cost_eur, 720.0 + 600.0);
        assert_eq!(r.by_mean[1].kpis.distance_km, 360.0);
        assert_eq!(r.by_mean[0].kpis, KpiTotals::default());
    }

    #[test]
    fn breakdown_sums_to_totals() {
        let (net, s) = harbour_net();
        for m in Metric::ALL {
            let p = drago_plan(&net, &s, &Criterion::Metric(m), &DragoOptions::default()).unwrap();
            let r = compute_kpis(&p, &net, 40, 1);
            assert!(r.partition_gap() <= 1e-6);
        }
    }

    #[test]
    fn records_round_trip() {
        let (net, s) = harbour_net();
        let p = drago_plan(&net, &s, &Criterion::Metric(Metric::Duration), &DragoOptions::default()).unwrap();
        let r = compute_kpis(&p, &net, 40, 9);
        assert_eq!(parse_records(&render_report(&r, ReportFormat::Records)).unwrap(), r);
    }

    #[test]
    fn comparison_has_one_column_per_run() {
        let (net, s) = harbour_net();
        let reports: Vec<KpiReport> = Metric::ALL
            .iter()
            .map(|&m| {
                let p = drago_plan(&net, &s, &Criterion::Metric(m), &DragoOptions::default()).unwrap();
                compute_kpis(&p, &net, 40, 0)
            })
            .collect();
        let text = render_comparison(&reports, ReportFormat::Table);
        let header = text.lines().find(|l| l.starts_with("Distance [km]")).unwrap();
        assert_eq!(header.matches(" opt.").count(), 4);
        assert!(text.contains("co2 optimization"));
    }

    #[test]
    fn unknown_format_is_rejected() {
        assert_eq!("table".parse(), Ok(ReportFormat::Table));
        assert!(matches!(
            "csv".parse::<ReportFormat>(),
            Err(ReportError::UnknownFormat(_))
        ));
    }
}
