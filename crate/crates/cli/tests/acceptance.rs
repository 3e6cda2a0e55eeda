//! Acceptance run: one PASS/FAIL line per criterion, non-zero exit status
//! when any criterion fails.

use std::collections::BTreeSet;
use std::fs;
use std::path::Path;
use std::process::{Command, ExitCode};
use std::time::Instant;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use indsys::batching::{pack_laff, pack_mixed, pack_single, validate_placements, BatchResult, Dims};
use indsys::constraints::{check_constraints, ConstraintId};
use indsys::dataset::{gen_synthetic, Profile};
use indsys::drago::{drago_optimize, drago_plan, Criterion, DragoOptions, Metric, Packer};
use indsys::kpi::{compute_kpis, parse_records, KpiReport, KpiTotals};
use indsys::model::{Allocation, PartIdx, ProductionAssignment, SourcingMode, UnitIdx};
use indsys::oracles::{enumerate_assignments, enumerate_packings, enumerate_routes, OracleBudget};
use indsys::phase1::{run_phase1, Decoder, EaConfig, GenerationStats};
use indsys::pipeline::prepare_network;
use indsys::{Dataset64, Network64};

const PRODUCTS: u64 = 40;
const TAKT_H: f64 = 24.0;

type Check = fn(&mut Context) -> Outcome;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: impl Into<String>) -> Outcome {
    Outcome {
        pass,
        detail: detail.into(),
    }
}

struct EaRun {
    mode: SourcingMode,
    trace: Vec<GenerationStats>,
    final_sr: f64,
    final_dist: Option<f64>,
    secs: f64,
}

/// State shared between criteria: the full-size EA runs and every KPI
/// report produced along the way.
#[derive(Default)]
struct Context {
    ea_runs: Option<Vec<EaRun>>,
    reports: Vec<KpiReport>,
}

impl Context {
    fn ea_runs(&mut self) -> &[EaRun] {
        self.ea_runs.get_or_insert_with(|| {
            let ds: Dataset64 = gen_synthetic(&Profile::default(), 7).unwrap();
            let mut runs = Vec::new();
            for mode in [SourcingMode::Single, SourcingMode::Double] {
                for seed in 0..5 {
                    let t = Instant::now();
                    let config = EaConfig {
                        seed,
                        mode,
                        ..EaConfig::default()
                    };
                    let r = run_phase1(&ds, &config).unwrap();
                    let champion = r.champion();
                    runs.push(EaRun {
                        mode,
                        final_sr: champion.sr,
                        final_dist: champion.dist,
                        trace: r.trace.clone(),
                        secs: t.elapsed().as_secs_f64(),
                    });
                }
            }
            runs
        })
    }
}

fn close_le(a: f64, b: f64) -> bool {
    a <= b + 1e-9 * b.abs().max(1.0)
}

fn median(mut v: Vec<f64>) -> f64 {
    v.sort_by(f64::total_cmp);
    v[v.len() / 2]
}

/// A complete assignment drawn by decoding random priority lists.
fn random_assignment(ds: &Dataset64, mode: SourcingMode, rng: &mut ChaCha8Rng) -> Option<ProductionAssignment<f64>> {
    let decoder = Decoder::new(ds, mode);
    let mut list: Vec<PartIdx> = (0..ds.part_count()).map(PartIdx).collect();
    for _ in 0..200 {
        list.shuffle(rng);
        let out = decoder.decode(&list, rng);
        if out.failed_part.is_none() {
            return Some(out.assignment);
        }
    }
    None
}

fn criterion_1(_: &mut Context) -> Outcome {
    let r = pack_single([12300, 2300, 1800], [14800, 3300, 3000], 3);
    outcome(
        r.per_container_count == 1 && r.n_containers == 3,
        format!("{} per container, {} containers", r.per_container_count, r.n_containers),
    )
}

fn criterion_2(_: &mut Context) -> Outcome {
    let part = [6800, 400, 1500];
    let container = [2330, 11998, 2350];
    let r = pack_single(part, container, 8);
    let oracle = enumerate_packings(&[(part, 5)], container, &OracleBudget::default()).unwrap();
    outcome(
        r.per_container_count == 5 && r.n_containers == 2 && oracle.containers == Some(1),
        format!(
            "{} per container, {} containers; oracle packs 5 items into {:?} container(s)",
            r.per_container_count, r.n_containers, oracle.containers
        ),
    )
}

fn criterion_3(ctx: &mut Context) -> Outcome {
    let runs = ctx.ea_runs();
    let mut pass = true;
    let mut parts = Vec::new();
    for mode in [SourcingMode::Single, SourcingMode::Double] {
        let of_mode: Vec<&EaRun> = runs.iter().filter(|r| r.mode == mode).collect();
        let complete = of_mode.iter().filter(|r| r.final_sr == 1.0).count();
        let initial = of_mode.iter().map(|r| r.trace[0].mean_sr).sum::<f64>() / of_mode.len() as f64;
        let slowest = of_mode.iter().map(|r| r.secs).fold(0.0, f64::max);
        pass &= complete >= 4 && initial < 1.0 && slowest < 600.0;
        parts.push(format!(
            "{mode}: final sr=1 in {complete}/5, mean initial sr {initial:.3}, slowest run {slowest:.1}s"
        ));
    }
    outcome(pass, parts.join("; "))
}

fn criterion_4(ctx: &mut Context) -> Outcome {
    let runs = ctx.ea_runs();
    let mut bad = Vec::new();
    for (i, r) in runs.iter().enumerate() {
        if let (Some(first), Some(last)) = (r.trace[0].best_dist, r.final_dist) {
            if !close_le(last, first) {
                bad.push(format!("run {i}: final {last:.1} > initial {first:.1}"));
            }
        }
        let mut prev: Option<f64> = None;
        for g in r.trace.iter().filter(|g| g.best_sr == 1.0) {
            if let (Some(p), Some(d)) = (prev, g.best_dist) {
                if !close_le(d, p) {
                    bad.push(format!("run {i}: best dist rises at generation {}", g.gen));
                }
            }
            prev = g.best_dist.or(prev);
        }
    }
    let detail = if bad.is_empty() {
        format!(
            "{} runs, final <= initial and best dist non-increasing once sr=1",
            runs.len()
        )
    } else {
        bad.join("; ")
    };
    outcome(bad.is_empty(), detail)
}

fn criterion_5(ctx: &mut Context) -> Outcome {
    let runs = ctx.ea_runs();
    let med = |mode| {
        median(
            runs.iter()
                .filter(|r| r.mode == mode)
                .map(|r| r.final_dist.unwrap_or(f64::INFINITY))
                .collect(),
        )
    };
    let single = med(SourcingMode::Single);
    let double = med(SourcingMode::Double);
    outcome(
        double > single,
        format!("median dist single {single:.1}, double {double:.1}"),
    )
}

/// Copies `a` with one change that breaks `id`, or None when the dataset
/// offers no way to break it.
fn inject(
    ds: &Dataset64,
    a: &ProductionAssignment<f64>,
    id: ConstraintId,
) -> Option<(Dataset64, ProductionAssignment<f64>)> {
    let units: Vec<UnitIdx> = (0..ds.units().len()).map(UnitIdx).collect();
    let mut broken = a.clone();
    match id {
        ConstraintId::C1 => {
            let (p, u) = (0..ds.part_count())
                .map(PartIdx)
                .flat_map(|p| units.iter().map(move |&u| (p, u)))
                .find(|&(p, u)| !ds.can_produce(u, p))?;
            broken.assign(p, vec![Allocation { unit: u, share: 1.0 }]);
            Some((ds.clone(), broken))
        }
        ConstraintId::C2 => {
            broken.mode = SourcingMode::Double;
            let (p, u) = (0..ds.part_count())
                .map(PartIdx)
                .find_map(|p| ds.producers(p).first().map(|&u| (p, u)))?;
            broken.assign(
                p,
                vec![Allocation { unit: u, share: 0.5 }, Allocation { unit: u, share: 0.5 }],
            );
            Some((ds.clone(), broken))
        }
        ConstraintId::C3 => {
            broken.mode = SourcingMode::Double;
            let (p, u1, u2) = (0..ds.part_count()).map(PartIdx).find_map(|p| {
                let prods = ds.producers(p);
                prods.iter().enumerate().find_map(|(i, &u1)| {
                    prods[i + 1..]
                        .iter()
                        .find(|&&u2| ds.unit_country(u1) != ds.unit_country(u2))
                        .map(|&u2| (p, u1, u2))
                })
            })?;
            broken.assign(
                p,
                vec![Allocation { unit: u1, share: 0.1 }, Allocation { unit: u2, share: 0.9 }],
            );
            Some((ds.clone(), broken))
        }
        ConstraintId::C4 | ConstraintId::C5 | ConstraintId::C6 => {
            let mut file = ds.file().clone();
            let tiny = 1e-6;
            match id {
                ConstraintId::C4 => {
                    file.bounds.va_c_max = tiny;
                    for c in &mut file.countries {
                        c.va_min = None;
                        c.va_max = Some(tiny);
                    }
                }
                ConstraintId::C5 => {
                    file.bounds.va_s_max = tiny;
                    for s in &mut file.suppliers {
                        s.va_min = None;
                        s.va_max = Some(tiny);
                    }
                }
                _ => {
                    file.bounds.va_u_max = tiny;
                    for u in &mut file.units {
                        u.va_max = Some(tiny);
                    }
                }
            }
            Some((Dataset64::new(file).ok()?, broken))
        }
        _ => None,
    }
}

fn criterion_6(_: &mut Context) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let mut decoded = 0;
    let mut violations = 0;
    let mut detected: BTreeSet<ConstraintId> = BTreeSet::new();
    let targets = [
        ConstraintId::C1,
        ConstraintId::C2,
        ConstraintId::C3,
        ConstraintId::C4,
        ConstraintId::C5,
        ConstraintId::C6,
    ];
    for k in 0..20u64 {
        let profile = Profile::toy(4 + (k as usize % 5), 4 + (k as usize / 5) % 4);
        let ds: Dataset64 = gen_synthetic(&profile, 600 + k).unwrap();
        let mut list: Vec<PartIdx> = (0..ds.part_count()).map(PartIdx).collect();
        for i in 0..500 {
            let mode = if i % 2 == 0 {
                SourcingMode::Single
            } else {
                SourcingMode::Double
            };
            list.shuffle(&mut rng);
            let out = Decoder::new(&ds, mode).decode(&list, &mut rng);
            decoded += 1;
            violations += check_constraints(&out.assignment, &ds).len();
        }
        let Some(a) = random_assignment(&ds, SourcingMode::Single, &mut rng) else {
            continue;
        };
        for id in targets {
            if let Some((bds, broken)) = inject(&ds, &a, id) {
                if check_constraints(&broken, &bds).iter().any(|v| v.constraint == id) {
                    detected.insert(id);
                }
            }
        }
    }
    let missed: Vec<String> = targets
        .iter()
        .filter(|t| !detected.contains(t))
        .map(ToString::to_string)
        .collect();
    outcome(
        decoded == 10_000 && violations == 0 && missed.is_empty(),
        format!(
            "{decoded} decoded candidates, {violations} violations; injected faults detected for {}/6{}",
            detected.len(),
            if missed.is_empty() {
                String::new()
            } else {
                format!(" (missed {})", missed.join(", "))
            }
        ),
    )
}

fn criterion_7(_: &mut Context) -> Outcome {
    let mut matched = 0;
    let mut infeasible = 0;
    let mut cases = 0;
    for k in 0..20u64 {
        let (mode, profile) = if k % 2 == 0 {
            (SourcingMode::Single, Profile::toy(6, 6))
        } else {
            (SourcingMode::Double, Profile::toy(4, 4))
        };
        let ds: Dataset64 = gen_synthetic(&profile, 100 + k).unwrap();
        let census = enumerate_assignments(&ds, mode, &OracleBudget::default()).unwrap();
        let config = EaConfig {
            seed: k,
            mode,
            population_size: 100,
            max_generations: 50,
            unused_preference: 0.5,
            ..EaConfig::default()
        };
        let ea = run_phase1(&ds, &config).unwrap().champion().dist;
        cases += 1;
        match (ea, census.best.map(|b| b.dist)) {
            (Some(e), Some(o)) if (e - o).abs() <= 1e-9 * o.abs().max(1.0) => matched += 1,
            (None, Some(_)) => infeasible += 1,
            (None, None) => matched += 1,
            _ => {}
        }
    }
    outcome(
        matched >= 18 && infeasible == 0,
        format!("EA matches the exhaustive optimum on {matched}/{cases} datasets, {infeasible} infeasible where the oracle is not"),
    )
}

/// Prepared networks from toy datasets; `direct_only` drops every link
/// touching a warehouse so each flow has exactly one route.
fn route_networks(direct_only: bool, want: usize) -> Vec<(Network64, indsys::network::DemandSchedule<f64>)> {
    let mut rng = ChaCha8Rng::seed_from_u64(if direct_only { 81 } else { 82 });
    let mut out = Vec::new();
    for k in 0..500u64 {
        if out.len() == want {
            break;
        }
        let profile = Profile::toy(3 + (k as usize % 4), 3 + (k as usize / 4) % 4);
        let mut ds: Dataset64 = gen_synthetic(&profile, 800 + k).unwrap();
        if direct_only {
            let mut file = ds.file().clone();
            let warehouses: BTreeSet<String> = file.warehouses.iter().map(|w| w.id.clone()).collect();
            file.links
                .retain(|l| !warehouses.contains(&l.source) && !warehouses.contains(&l.dest));
            ds = Dataset64::new(file).unwrap();
        }
        let mode = if k % 2 == 0 {
            SourcingMode::Single
        } else {
            SourcingMode::Double
        };
        let Some(a) = random_assignment(&ds, mode, &mut rng) else {
            continue;
        };
        if let Ok(prepared) = prepare_network(&ds, &a, PRODUCTS, TAKT_H) {
            out.push(prepared);
        }
    }
    out
}

fn criterion_8(_: &mut Context) -> Outcome {
    let budget = OracleBudget::default();
    let direct = route_networks(true, 50);
    let mut direct_equal = 0;
    for (net, schedule) in &direct {
        let equal = Metric::ALL.iter().all(|&m| {
            let c = Criterion::Metric(m);
            let walk = drago_optimize(net, schedule, &c, false).unwrap();
            let census = enumerate_routes(net, schedule, &c, &budget).unwrap();
            walk.edges() == census.edges()
        });
        direct_equal += usize::from(equal);
    }
    let detour = route_networks(false, 50);
    let mut bracketed = 0;
    let mut with_detours = 0;
    let mut gaps = Vec::new();
    for (net, schedule) in &detour {
        with_detours += usize::from(net.route_count() > net.flows.len());
        let mut ok = true;
        for m in Metric::ALL {
            let c = Criterion::Metric(m);
            let census = enumerate_routes(net, schedule, &c, &budget).unwrap();
            let total = drago_optimize(net, schedule, &c, false)
                .unwrap()
                .selection_total(net, schedule, &c);
            ok &= close_le(census.total, total) && close_le(total, census.worst_total);
            gaps.push((total - census.total) / census.total.max(f64::MIN_POSITIVE));
        }
        bracketed += usize::from(ok);
    }
    let mean_gap = gaps.iter().sum::<f64>() / gaps.len().max(1) as f64;
    let max_gap = gaps.iter().copied().fold(0.0, f64::max);
    outcome(
        direct.len() == 50 && direct_equal == 50 && detour.len() == 50 && bracketed == 50,
        format!(
            "direct-only: {direct_equal}/{} identical to the oracle; with detours ({with_detours} networks have them): \
             {bracketed}/{} between optimum and worst, gap to optimum mean {:.2}% max {:.2}%",
            direct.len(),
            detour.len(),
            100.0 * mean_gap,
            100.0 * max_gap
        ),
    )
}

/// Metrics where a run optimizing another metric beat the run optimizing it.
fn dominance_failures(totals: &[KpiTotals]) -> Vec<String> {
    let mut out = Vec::new();
    for x in Metric::ALL {
        let own = totals[x.index()].get(x);
        for y in Metric::ALL.into_iter().filter(|&y| y != x) {
            let other = totals[y.index()].get(x);
            if !close_le(own, other) {
                out.push(format!("{x} under {y}-optimization {other:.1} < {own:.1}"));
            }
        }
    }
    out
}

fn criterion_9(ctx: &mut Context) -> Outcome {
    let ds: Dataset64 = gen_synthetic(&Profile::default(), 7).unwrap();
    let a = run_phase1(&ds, &EaConfig::default())
        .unwrap()
        .champion()
        .assignment
        .clone();
    let (net, schedule) = prepare_network(&ds, &a, PRODUCTS, TAKT_H).unwrap();
    let mut failures = Vec::new();
    for route_exact in [true, false] {
        let options = DragoOptions {
            route_exact,
            ..DragoOptions::default()
        };
        let totals: Vec<KpiTotals> = Metric::ALL
            .iter()
            .map(|&m| {
                let plan = drago_plan(&net, &schedule, &Criterion::Metric(m), &options).unwrap();
                let report = compute_kpis(&plan, &net, PRODUCTS, options.seed);
                let totals = report.totals;
                ctx.reports.push(report);
                totals
            })
            .collect();
        failures.push(dominance_failures(&totals));
    }
    let hop = &failures[1];
    outcome(
        failures[0].is_empty(),
        format!(
            "route-exact selection: {} dominance violation(s){}; hop-by-hop selection (informational): {} violation(s){}",
            failures[0].len(),
            if failures[0].is_empty() { String::new() } else { format!(" [{}]", failures[0].join("; ")) },
            hop.len(),
            if hop.is_empty() { String::new() } else { format!(" [{}]", hop.join("; ")) }
        ),
    )
}

fn criterion_10(ctx: &mut Context) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    for k in 0..20u64 {
        let ds: Dataset64 = gen_synthetic(&Profile::toy(5, 5), 1000 + k).unwrap();
        let mode = if k % 2 == 0 {
            SourcingMode::Single
        } else {
            SourcingMode::Double
        };
        let Some(a) = random_assignment(&ds, mode, &mut rng) else {
            continue;
        };
        let (net, schedule) = prepare_network(&ds, &a, PRODUCTS, TAKT_H).unwrap();
        for packer in [Packer::Grasp, Packer::Laff] {
            for m in Metric::ALL {
                let options = DragoOptions {
                    packer,
                    seed: k,
                    ..DragoOptions::default()
                };
                let plan = drago_plan(&net, &schedule, &Criterion::Metric(m), &options).unwrap();
                ctx.reports.push(compute_kpis(&plan, &net, PRODUCTS, k));
            }
        }
    }
    let worst = ctx.reports.iter().map(KpiReport::partition_gap).fold(0.0, f64::max);
    outcome(
        !ctx.reports.is_empty() && worst <= 1e-6,
        format!(
            "{} reports, largest relative partition gap {worst:.2e}",
            ctx.reports.len()
        ),
    )
}

fn run_cli(args: &[&str]) -> Result<(), String> {
    let out = Command::new(env!("CARGO_BIN_EXE_indsys"))
        .args(args)
        .output()
        .map_err(|e| e.to_string())?;
    if out.status.success() {
        Ok(())
    } else {
        Err(format!(
            "{args:?} exited with {}: {}",
            out.status,
            String::from_utf8_lossy(&out.stderr)
        ))
    }
}

fn dir_files(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut files: Vec<(String, Vec<u8>)> = fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (
                e.file_name().to_string_lossy().into_owned(),
                fs::read(e.path()).unwrap(),
            )
        })
        .collect();
    files.sort();
    files
}

fn criterion_11(ctx: &mut Context) -> Outcome {
    let tmp = tempfile::tempdir().unwrap();
    let dataset = tmp.path().join("toy.json");
    let dataset = dataset.to_str().unwrap();
    let outs = [tmp.path().join("run-a"), tmp.path().join("run-b")];
    let result = run_cli(&[
        "gen",
        "--profile",
        "toy",
        "--parts",
        "6",
        "--units",
        "6",
        "--seed",
        "11",
        "--out",
        dataset,
    ])
    .and_then(|_| {
        outs.iter().try_for_each(|out| {
            run_cli(&[
                "optimize",
                "--dataset",
                dataset,
                "--sourcing",
                "double",
                "--seed",
                "5",
                "--pop-size",
                "80",
                "--generations",
                "30",
                "--criterion",
                "all",
                "--out",
                out.to_str().unwrap(),
            ])
        })
    });
    if let Err(e) = result {
        return outcome(false, e);
    }
    let a = dir_files(&outs[0]);
    let b = dir_files(&outs[1]);
    for (name, bytes) in &a {
        if name.starts_with("report-") && name.ends_with(".json") {
            ctx.reports
                .push(parse_records(&String::from_utf8_lossy(bytes)).unwrap());
        }
    }
    let required = [
        "assignment.json",
        "plan-co2.json",
        "report-co2.json",
        "report-cost.json",
    ];
    let present = required.iter().all(|r| a.iter().any(|(n, _)| n == r));
    outcome(
        present && a == b,
        format!(
            "{} output files per run, {} byte-identical",
            a.len(),
            if a == b { "all" } else { "not all" }
        ),
    )
}

/// Random mixed-packing instance whose items each fit the container.
fn packing_instance(rng: &mut ChaCha8Rng) -> (Vec<(Dims, u64)>, Dims) {
    let container = [rng.gen_range(8..=14), rng.gen_range(8..=14), rng.gen_range(8..=14)];
    let types = rng.gen_range(1..=4);
    let items = (0..types)
        .map(|_| {
            let d = [rng.gen_range(2..=7), rng.gen_range(2..=7), rng.gen_range(2..=7)];
            (d, rng.gen_range(1..=3))
        })
        .collect();
    (items, container)
}

/// Whether the containers hold exactly the requested items, each inside
/// the container, unrotated apart from axis permutations, without overlap.
fn valid_packing(items: &[(Dims, u64)], container: Dims, bins: &[BatchResult]) -> bool {
    let mut placed = vec![0u64; items.len()];
    for bin in bins {
        if validate_placements(container, &bin.placements).is_err() {
            return false;
        }
        for p in &bin.placements {
            let mut a = p.dims;
            let mut b = items[p.item].0;
            a.sort_unstable();
            b.sort_unstable();
            if a != b {
                return false;
            }
            placed[p.item] += 1;
        }
    }
    placed.iter().zip(items).all(|(&n, &(_, q))| n == q)
}

fn criterion_12(_: &mut Context) -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let budget = OracleBudget::default();
    let mut invalid = 0;
    let mut compared = 0;
    let mut near = 0;
    for i in 0..1000 {
        let (items, container) = packing_instance(&mut rng);
        let bins = if i % 2 == 0 {
            pack_mixed(&items, container, &mut rng).unwrap()
        } else {
            pack_laff(&items, container).unwrap()
        };
        if !valid_packing(&items, container, &bins) {
            invalid += 1;
        }
        if items.iter().map(|(_, q)| q).sum::<u64>() <= 5 {
            if let Some(best) = enumerate_packings(&items, container, &budget).unwrap().containers {
                compared += 1;
                near += usize::from(bins.len() as u64 <= best + 1);
            }
        }
    }
    let share = near as f64 / compared.max(1) as f64;
    outcome(
        invalid == 0 && compared > 0 && share >= 0.95,
        format!(
            "1000 instances, {invalid} invalid; within oracle+1 on {near}/{compared} small instances ({:.1}%)",
            100.0 * share
        ),
    )
}

fn main() -> ExitCode {
    let criteria: [(&str, Check); 12] = [
        ("single batching, one part per container", criterion_1),
        ("single batching, five parts per container", criterion_2),
        ("phase I reaches full satisfaction", criterion_3),
        ("phase I distance improves monotonically", criterion_4),
        ("double sourcing costs distance", criterion_5),
        ("decoded candidates satisfy every constraint", criterion_6),
        ("phase I matches the exhaustive optimum", criterion_7),
        ("link selection against the route oracle", criterion_8),
        ("single-criterion dominance", criterion_9),
        ("KPI totals partition by transport mean", criterion_10),
        ("CLI runs are reproducible", criterion_11),
        ("mixed packings are valid and near optimal", criterion_12),
    ];
    let mut ctx = Context::default();
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let o = check(&mut ctx);
        failed += usize::from(!o.pass);
        println!(
            "criterion {:>2} {} {name}: {} ({:.1}s)",
            i + 1,
            if o.pass { "PASS" } else { "FAIL" },
            o.detail,
            t.elapsed().as_secs_f64()
        );
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
