//! Native consistency check of a loaded dataset: container fit and
//! connectivity problems that would otherwise surface deep inside Phase II.

use std::fmt;

use serde::{Deserialize, Serialize};

use super::Dataset;
use crate::model::{LinkIdx, NodeIdx, PartIdx, UnitIdx, WarehouseIdx};
use crate::scalar::Scalar;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FindingCode {
    /// A part fits the container of no transport mean at all.
    PartFitsNoMean,
    /// A unit-to-unit link the part could travel offers no container it fits.
    LinkFitsNoAlternative,
    /// No producer of a part can reach any producer of its parent.
    PartDisconnected,
    /// Same as `LinkFitsNoAlternative` on a link that touches a warehouse.
    WarehouseLegFitsNoAlternative,
    /// A unit with no incoming or outgoing link.
    UnreachableUnit,
    /// A warehouse no link touches.
    IsolatedWarehouse,
}

impl fmt::Display for FindingCode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = serde_json::to_value(self).expect("plain enum");
        f.write_str(s.as_str().unwrap_or_default())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Finding {
    pub severity: Severity,
    pub code: FindingCode,
    pub subject: String,
    pub message: String,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConsistencyReport {
    pub findings: Vec<Finding>,
}

impl ConsistencyReport {
    pub fn errors(&self) -> impl Iterator<Item = &Finding> {
        self.findings.iter().filter(|f| f.severity == Severity::Error)
    }

    pub fn warnings(&self) -> impl Iterator<Item = &Finding> {
        self.findings.iter().filter(|f| f.severity == Severity::Warning)
    }

    pub fn has_errors(&self) -> bool {
        self.errors().next().is_some()
    }
}

impl fmt::Display for ConsistencyReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for x in &self.findings {
            let sev = match x.severity {
                Severity::Error => "error",
                Severity::Warning => "warning",
            };
            writeln!(f, "{sev:<7} {:<34} {:<28} {}", x.code.to_string(), x.subject, x.message)?;
        }
        let errors = self.errors().count();
        write!(f, "{errors} error(s), {} warning(s)", self.findings.len() - errors)
    }
}

fn usable<S: Scalar>(ds: &Dataset<S>, p: PartIdx, l: LinkIdx) -> bool {
    ds.link_alternatives(l).iter().any(|&(m, _)| ds.part_fits_mean(p, m))
}

fn hop<S: Scalar>(ds: &Dataset<S>, p: PartIdx, a: NodeIdx, b: NodeIdx) -> bool {
    ds.link_between(a, b).is_some_and(|l| usable(ds, p, l))
}

/// Whether `p` can travel from `u1` to `u2` directly or through at most two
/// warehouses nearby the endpoints.
pub(crate) fn route_exists<S: Scalar>(ds: &Dataset<S>, p: PartIdx, u1: UnitIdx, u2: UnitIdx) -> bool {
    if u1 == u2 {
        return true;
    }
    let (a, b) = (NodeIdx::Unit(u1), NodeIdx::Unit(u2));
    if hop(ds, p, a, b) {
        return true;
    }
    let mut near: Vec<WarehouseIdx> = ds
        .warehouses_near(u1)
        .iter()
        .chain(ds.warehouses_near(u2))
        .copied()
        .collect();
    near.sort();
    near.dedup();
    for &w in &near {
        let w = NodeIdx::Warehouse(w);
        if hop(ds, p, a, w) && hop(ds, p, w, b) {
            return true;
        }
    }
    for &ws in ds.warehouses_near(u1) {
        for &wt in ds.warehouses_near(u2) {
            let (x, y) = (NodeIdx::Warehouse(ws), NodeIdx::Warehouse(wt));
            if ws != wt && hop(ds, p, a, x) && hop(ds, p, x, y) && hop(ds, p, y, b) {
                return true;
            }
        }
    }
    false
}

fn side_ok<S: Scalar>(ds: &Dataset<S>, node: NodeIdx, p: PartIdx) -> bool {
    match node {
        NodeIdx::Unit(u) => ds.can_produce(u, p),
        NodeIdx::Warehouse(w) => ds.producers(p).iter().any(|&u| ds.warehouses_near(u).contains(&w)),
    }
}

/// Findings sorted by code, then subject. Pure: identical input gives an
/// identical report.
pub fn validate_consistency<S: Scalar>(ds: &Dataset<S>) -> ConsistencyReport {
    let mut findings = Vec::new();
    let root = ds.root();
    let finding = |severity, code, subject: String, message: String| Finding {
        severity,
        code,
        subject,
        message,
    };

    for (i, part) in ds.parts().iter().enumerate() {
        let p = PartIdx(i);
        if p == root {
            continue;
        }
        if !(0..ds.transport_means().len()).any(|m| ds.part_fits_mean(p, crate::model::MeanIdx(m))) {
            findings.push(finding(
                Severity::Error,
                FindingCode::PartFitsNoMean,
                format!("part `{}`", part.id),
                format!("no transport fits part (bounding box {:?})", part.bbox),
            ));
        }
        let (parent, _) = ds.parent(p).expect("non-root part has a parent");
        let connected = ds
            .producers(p)
            .iter()
            .any(|&u1| ds.producers(parent).iter().any(|&u2| route_exists(ds, p, u1, u2)));
        if !connected {
            findings.push(finding(
                Severity::Error,
                FindingCode::PartDisconnected,
                format!("part `{}`", part.id),
                format!("no producer can ship it to any producer of `{}`", ds.part(parent).id),
            ));
        }
    }

    for li in 0..ds.link_count() {
        let l = LinkIdx(li);
        let (a, b) = ds.link_ends(l);
        for (i, part) in ds.parts().iter().enumerate() {
            let p = PartIdx(i);
            let Some((parent, _)) = ds.parent(p) else { continue };
            if !side_ok(ds, a, p) || !side_ok(ds, b, parent) || usable(ds, p, l) {
                continue;
            }
            let unit_only = !a.is_warehouse() && !b.is_warehouse();
            let names: Vec<&str> = ds
                .link_alternatives(l)
                .iter()
                .map(|&(m, _)| ds.mean(m).id.as_str())
                .collect();
            findings.push(finding(
                if unit_only { Severity::Error } else { Severity::Warning },
                if unit_only {
                    FindingCode::LinkFitsNoAlternative
                } else {
                    FindingCode::WarehouseLegFitsNoAlternative
                },
                format!("part `{}`", part.id),
                format!(
                    "fits none of [{}] on link `{}` -> `{}`",
                    names.join(", "),
                    ds.node_id(a),
                    ds.node_id(b)
                ),
            ));
        }
    }

    let mut touched_units = vec![false; ds.units().len()];
    let mut touched_wh = vec![false; ds.warehouses().len()];
    for li in 0..ds.link_count() {
        let (a, b) = ds.link_ends(LinkIdx(li));
        for n in [a, b] {
            match n {
                NodeIdx::Unit(u) => touched_units[u.0] = true,
                NodeIdx::Warehouse(w) => touched_wh[w.0] = true,
            }
        }
    }
    if ds.units().len() > 1 {
        for (u, &t) in touched_units.iter().enumerate() {
            if !t {
                findings.push(finding(
                    Severity::Warning,
                    FindingCode::UnreachableUnit,
                    format!("unit `{}`", ds.units()[u].id),
                    "no link enters or leaves this unit".into(),
                ));
            }
        }
    }
    for (w, &t) in touched_wh.iter().enumerate() {
        if !t {
            findings.push(finding(
                Severity::Warning,
                FindingCode::IsolatedWarehouse,
                format!("warehouse `{}`", ds.warehouses()[w].id),
                "no link touches this warehouse".into(),
            ));
        }
    }

    findings.sort_by(|x, y| (x.code, &x.subject, &x.message).cmp(&(y.code, &y.subject, &y.message)));
    ConsistencyReport { findings }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::load_dataset_from_str;

    fn two_units(child_bbox: &str, container: &str) -> String {
        format!(
            r#"{{
          "meta": {{"schema_version": "indsys-1", "final_product": "R"}},
          "parts": [
            {{"id": "R", "name": "Root", "bbox": [1, 1, 1], "value_added": 0.1, "children": [{{"part": "C"}}]}},
            {{"id": "C", "name": "Child", "bbox": {child_bbox}, "value_added": 0.1}}
          ],
          "countries": [{{"id": "FR"}}],
          "suppliers": [{{"id": "S"}}],
          "sites": [{{"id": "L", "country": "FR"}}],
          "plants": [{{"id": "F1", "site": "L", "producible_parts": ["R"]}},
                     {{"id": "F2", "site": "L", "producible_parts": ["C"]}}],
          "units": [{{"id": "U1", "supplier": "S", "plant": "F1"}}, {{"id": "U2", "supplier": "S", "plant": "F2"}}],
          "warehouses": [],
          "transport_means": [{{"id": "T", "name": "Truck", "co2_g_per_km": 1, "speed_km_per_h": 1,
                               "cost_eur_per_km": 1, "container": {container}}}],
          "links": [{{"source": "U2", "dest": "U1", "alternatives": [{{"mean": "T", "distance_km": 10}}]}}],
          "bounds": {{"va_c_max": 1, "va_s_max": 1, "va_u_max": 1}}
        }}"#
        )
    }

    fn report(child: &str, container: &str) -> ConsistencyReport {
        let ds: Dataset = load_dataset_from_str(&two_units(child, container)).unwrap();
        validate_consistency(&ds)
    }

    #[test]
    fn tailplane_fits_low_bed() {
        assert!(report("[12300, 2300, 1800]", "[14800, 3300, 3000]").findings.is_empty());
    }

    #[test]
    fn pylon_fits_after_rotation() {
        assert!(report("[6800, 400, 1500]", "[2330, 11998, 2350]").findings.is_empty());
    }

    #[test]
    fn overlong_part_is_an_error() {
        let r = report("[20000, 1, 1]", "[15000, 3000, 3000]");
        assert!(r.has_errors());
        let codes: Vec<FindingCode> = r.findings.iter().map(|f| f.code).collect();
        assert_eq!(
            codes,
            vec![
                FindingCode::PartFitsNoMean,
                FindingCode::LinkFitsNoAlternative,
                FindingCode::PartDisconnected
            ]
        );
        assert!(r.findings[0].message.contains("no transport fits part"));
    }

    #[test]
    fn report_is_pure() {
        let a = report("[20000, 1, 1]", "[15000, 3000, 3000]");
        let b = report("[20000, 1, 1]", "[15000, 3000, 3000]");
        assert_eq!(a, b);
    }
}
