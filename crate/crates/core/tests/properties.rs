//! Cross-module invariants over generated datasets.

use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use indsys::batching::{pack_laff, pack_mixed, pack_single, validate_placements, Dims};
use indsys::constraints::check_constraints;
use indsys::dataset::{gen_synthetic, load_dataset_from_str, save_dataset, validate_consistency, Profile};
use indsys::drago::{drago_optimize, drago_plan, Criterion, DragoOptions, Metric};
use indsys::kpi::compute_kpis;
use indsys::model::{PartIdx, ProductionAssignment, SourcingMode};
use indsys::network::propagate_demand;
use indsys::oracles::{enumerate_assignments, enumerate_packings, enumerate_routes, OracleBudget};
use indsys::phase1::Decoder;
use indsys::pipeline::prepare_network;
use indsys::value_added::aggregate_value_added;
use indsys::Dataset64;

fn toy(parts: usize, units: usize, seed: u64) -> Dataset64 {
    gen_synthetic(&Profile::toy(parts, units), seed).unwrap()
}

fn mode(double: bool) -> SourcingMode {
    if double {
        SourcingMode::Double
    } else {
        SourcingMode::Single
    }
}

fn complete(ds: &Dataset64, mode: SourcingMode, seed: u64) -> Option<ProductionAssignment<f64>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let decoder = Decoder::new(ds, mode);
    let mut list: Vec<PartIdx> = (0..ds.part_count()).map(PartIdx).collect();
    (0..100).find_map(|_| {
        list.shuffle(&mut rng);
        let out = decoder.decode(&list, &mut rng);
        out.failed_part.is_none().then_some(out.assignment)
    })
}

fn dims() -> impl Strategy<Value = Dims> {
    [1u64..=9, 1u64..=9, 1u64..=9]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn decoded_assignments_break_no_rule(
        parts in 3usize..=9, units in 3usize..=8, seed in 0u64..1000, double: bool
    ) {
        let ds = toy(parts, units, seed);
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut list: Vec<PartIdx> = (0..parts).map(PartIdx).collect();
        list.shuffle(&mut rng);
        let out = Decoder::new(&ds, mode(double)).decode(&list, &mut rng);
        prop_assert!(check_constraints(&out.assignment, &ds).is_empty());
        prop_assert_eq!(out.assignment.len(), out.placed);
    }

    #[test]
    fn value_added_is_additive_over_disjoint_parts(parts in 3usize..=8, seed in 0u64..1000, double: bool) {
        let ds = toy(parts, 5, seed);
        let Some(a) = complete(&ds, mode(double), seed) else { return Ok(()) };
        let split = parts / 2;
        let mut left = ProductionAssignment::new(a.mode, a.fal_count);
        let mut right = ProductionAssignment::new(a.mode, a.fal_count);
        for (p, allocs) in a.iter() {
            let side = if p.0 < split { &mut left } else { &mut right };
            side.assign(p, allocs.to_vec());
        }
        let whole = aggregate_value_added(&a, &ds).unwrap();
        let sum = aggregate_value_added(&left, &ds).unwrap() + aggregate_value_added(&right, &ds).unwrap();
        for (x, y) in whole.per_unit.iter().zip(&sum.per_unit) {
            prop_assert!((x - y).abs() < 1e-12);
        }
        let va: f64 = ds.parts().iter().map(|p| p.value_added).sum();
        prop_assert!((whole.total() - va).abs() < 1e-9);
    }

    #[test]
    fn dataset_round_trip_is_exact(parts in 2usize..=10, units in 2usize..=8, seed in 0u64..1000) {
        let ds = toy(parts, units, seed);
        let mut first = Vec::new();
        save_dataset(&ds, &mut first).unwrap();
        let back: Dataset64 = load_dataset_from_str(std::str::from_utf8(&first).unwrap()).unwrap();
        prop_assert_eq!(back.file(), ds.file());
        let mut second = Vec::new();
        save_dataset(&back, &mut second).unwrap();
        prop_assert_eq!(first, second);
        prop_assert_eq!(validate_consistency(&ds), validate_consistency(&back));
    }

    #[test]
    fn single_batching_obeys_the_ceiling_law(part in dims(), container in dims(), grow in dims(), demand in 1u64..500) {
        let r = pack_single(part, container, demand);
        if r.per_container_count > 0 {
            prop_assert!(r.n_containers * r.per_container_count >= demand);
            prop_assert!((r.n_containers - 1) * r.per_container_count < demand);
        }
        let bigger = [container[0] + grow[0], container[1] + grow[1], container[2] + grow[2]];
        prop_assert!(pack_single(part, bigger, demand).per_container_count >= r.per_container_count);
    }

    #[test]
    fn mixed_packers_stay_within_one_of_the_optimum(
        items in prop::collection::vec(([1u64..=6, 1u64..=6, 1u64..=6], 1u64..=2), 1..=3), container in [6u64..=12, 6u64..=12, 6u64..=12], seed: u64
    ) {
        let total: u64 = items.iter().map(|(_, q)| q).sum();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for bins in [pack_mixed(&items, container, &mut rng).unwrap(), pack_laff(&items, container).unwrap()] {
            let placed: usize = bins.iter().map(|b| b.placements.len()).sum();
            prop_assert_eq!(placed as u64, total);
            for b in &bins {
                prop_assert!(validate_placements(container, &b.placements).is_ok());
            }
            if total <= 5 {
                let best = enumerate_packings(&items, container, &OracleBudget::default()).unwrap().containers.unwrap();
                prop_assert!(bins.len() as u64 >= best && bins.len() as u64 <= best + 1);
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn networks_are_acyclic_and_demand_grows_with_products(
        parts in 3usize..=7, units in 3usize..=6, seed in 0u64..1000, double: bool, k in 1u64..60
    ) {
        let ds = toy(parts, units, seed);
        let Some(a) = complete(&ds, mode(double), seed) else { return Ok(()) };
        let (net, small) = prepare_network(&ds, &a, k, 24.0).unwrap();
        prop_assert!(net.is_acyclic());
        let large = propagate_demand(&net, &ds, k + 7, 24.0).unwrap();
        for (x, y) in small.nodes.iter().zip(&large.nodes) {
            prop_assert!(y.quantity >= x.quantity);
        }
        for (x, y) in small.flow_quantity.iter().zip(&large.flow_quantity) {
            prop_assert!(y >= x);
        }
    }

    #[test]
    fn route_exact_walk_equals_the_route_oracle(
        parts in 3usize..=6, units in 3usize..=6, seed in 0u64..1000, double: bool
    ) {
        let ds = toy(parts, units, seed);
        let Some(a) = complete(&ds, mode(double), seed) else { return Ok(()) };
        let (net, schedule) = prepare_network(&ds, &a, 40, 24.0).unwrap();
        for m in Metric::ALL {
            let c = Criterion::Metric(m);
            let census = enumerate_routes(&net, &schedule, &c, &OracleBudget::default()).unwrap();
            let exact = drago_optimize(&net, &schedule, &c, true).unwrap();
            let total = exact.selection_total(&net, &schedule, &c);
            prop_assert!((total - census.total).abs() <= 1e-9 * census.total.max(1.0));
            let greedy = drago_optimize(&net, &schedule, &c, false).unwrap();
            prop_assert!(greedy.selection_total(&net, &schedule, &c) >= census.total * (1.0 - 1e-12));
            prop_assert_eq!(&greedy, &drago_optimize(&net, &schedule, &c, false).unwrap());
        }
    }

    #[test]
    fn report_totals_partition_by_mean(parts in 3usize..=6, seed in 0u64..1000, double: bool) {
        let ds = toy(parts, 5, seed);
        let Some(a) = complete(&ds, mode(double), seed) else { return Ok(()) };
        let (net, schedule) = prepare_network(&ds, &a, 40, 24.0).unwrap();
        for m in Metric::ALL {
            let plan = drago_plan(&net, &schedule, &Criterion::Metric(m), &DragoOptions::default()).unwrap();
            let report = compute_kpis(&plan, &net, 40, 0);
            prop_assert!(report.partition_gap() <= 1e-9);
        }
    }
}

#[test]
fn consistent_toy_datasets_admit_a_single_sourcing_assignment() {
    for seed in 0..15 {
        let ds = toy(2 + seed as usize % 4, 2 + seed as usize % 5, seed);
        if validate_consistency(&ds).has_errors() {
            continue;
        }
        let census = enumerate_assignments(&ds, SourcingMode::Single, &OracleBudget::default()).unwrap();
        assert!(
            census.best.is_some(),
            "seed {seed}: no feasible single-sourcing assignment"
        );
    }
}

#[test]
fn f32_pipeline_runs_end_to_end() {
    let ds: indsys::Dataset32 = gen_synthetic(&Profile::toy(5, 4), 3).unwrap();
    let config = indsys::phase1::EaConfig {
        population_size: 30,
        max_generations: 10,
        ..Default::default()
    };
    let r = indsys::phase1::run_phase1(&ds, &config).unwrap();
    let champion = r.champion();
    assert_eq!(champion.sr, 1.0);
    let phase2 = indsys::pipeline::Phase2Config {
        products: 40,
        takt_h: 24.0f32,
        criterion: Criterion::Metric(Metric::Co2),
        drago: DragoOptions::default(),
    };
    let out = indsys::pipeline::run_phase2(&ds, &champion.assignment, &phase2).unwrap();
    assert!(out.report.totals.co2_g > 0.0);
    assert!(out.report.partition_gap() <= 1e-5);
}
