mod common;

use acs_supply::acs::{construct_ant, init_model, AntSolution, Scratch, Selector};
use acs_supply::cost::{Assignment, CostBreakdown};
use acs_supply::parallel::{reduce_best, run_iac, run_pa, RunError};
use acs_supply::rng::AntKey;
use acs_supply::{run, Architecture, Precision, RunConfig};
use proptest::prelude::*;

use common::*;

fn config(arch: Architecture, instances: usize, budget: u64, seed: u64) -> RunConfig {
    let mut c = RunConfig::new(arch, instances);
    c.solution_budget = budget;
    c.master_seed = seed;
    c.workers = Some(1);
    c
}

#[test]
fn one_instance_equals_sequential_colony() {
    for arch in [Architecture::Pa, Architecture::Iac] {
        for seed in 0..6 {
            let instance = small(seed + 100);
            let c = config(arch, 1, 60, seed);
            let result = run(&c, &instance).unwrap();

            let mut model = init_model::<f64>(&instance, c.acs).unwrap();
            let mut scratch = Scratch::default();
            let mut best: Option<AntSolution> = None;
            let mut trace = Vec::new();
            for it in 0..60 {
                let s = construct_ant(&model, &instance, AntKey::new(seed, 0, it, 0), Selector::Scalar, &mut scratch)
                    .unwrap();
                if best.as_ref().is_none_or(|b| s.cost.total < b.cost.total) {
                    best = Some(s);
                }
                model.global_update(best.as_ref().unwrap());
                if (it + 1) % 5 == 0 {
                    trace.push((it + 1, best.as_ref().unwrap().cost.total));
                }
            }
            let best = best.unwrap();
            assert_eq!(result.best_solution.assignment, best.assignment);
            assert_eq!(result.best_solution.cost.total, best.cost.total);
            assert_eq!(result.convergence, trace);
            assert_eq!(result.iterations_executed, 60);
        }
    }
}

#[test]
fn worker_count_does_not_change_results() {
    let instance = small(7);
    for arch in [Architecture::Iac, Architecture::Pa, Architecture::Pawv] {
        let mut c = config(arch, 8, 400, 3);
        c.ants_per_instance = 2;
        let reference = run(&c, &instance).unwrap();
        for w in [2, 4, 8] {
            c.workers = Some(w);
            assert!(run(&c, &instance).unwrap().same_outcome(&reference), "{arch} with {w} workers");
        }
    }
}

#[test]
fn pawv_matches_pa_in_equivalence_mode() {
    for seed in 0..8 {
        let instance = small(seed + 40);
        for (instances, ants) in [(1, 1), (4, 1), (4, 5), (16, 1)] {
            for precision in [Precision::Double, Precision::Single] {
                let mut pa = config(Architecture::Pa, instances, 320, seed);
                pa.ants_per_instance = ants;
                pa.precision = precision;
                let pawv = RunConfig { architecture: Architecture::Pawv, ..pa.clone() };
                let a = run(&pa, &instance).unwrap();
                let b = run(&pawv, &instance).unwrap();
                assert!(a.same_outcome(&b), "seed {seed}, {instances}x{ants}, {precision:?}");
            }
        }
    }
}

#[test]
fn vector_width_one_is_scalar_selection() {
    let instance = small(61);
    let pa = config(Architecture::Pa, 4, 200, 9);
    let mut pawv = RunConfig { architecture: Architecture::Pawv, ..pa.clone() };
    pawv.vector_width = 1;
    assert!(run(&pa, &instance).unwrap().same_outcome(&run(&pawv, &instance).unwrap()));
}

#[test]
fn relaxed_pawv_stays_feasible() {
    let instance = small(62);
    let mut c = config(Architecture::Pawv, 4, 200, 1);
    c.equivalence_mode = false;
    c.audit = true;
    assert_eq!(run(&c, &instance).unwrap().audit_violations, 0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn budget_is_respected(instances in 1usize..9, ants in 1usize..6, budget in 50u64..400, seed in any::<u64>()) {
        let instance = small(seed);
        for arch in [Architecture::Iac, Architecture::Pa] {
            let mut c = config(arch, instances, budget, seed);
            c.ants_per_instance = ants;
            if (instances * ants) as u64 > budget {
                prop_assert!(matches!(run(&c, &instance), Err(RunError::Config(_))));
                continue;
            }
            let r = run(&c, &instance).unwrap();
            let cap = (budget / (instances * ants) as u64) as usize;
            prop_assert_eq!(r.iterations_executed, cap);
            prop_assert_eq!(r.solutions_constructed, (cap * instances * ants) as u64);
            prop_assert!(r.solutions_constructed <= budget);
            prop_assert!(r.convergence.windows(2).all(|w| w[1].1 <= w[0].1 && w[1].0 == w[0].0 + 5));
            let min = r.instance_bests.iter().copied().fold(f64::INFINITY, f64::min);
            prop_assert_eq!(r.best_solution.cost.total, min);
        }
    }
}

fn sol(cost: f64, tag: usize) -> AntSolution {
    AntSolution {
        assignment: Assignment::complete(vec![tag]),
        cost: CostBreakdown { total: cost, ..Default::default() },
        seed_trace: None,
    }
}

#[test]
fn reduction_examples() {
    assert_eq!(reduce_best(vec![(0, sol(3.0, 0))]).unwrap().0, 0);
    assert_eq!(reduce_best(vec![(1, sol(2.0, 1)), (0, sol(2.0, 0))]).unwrap().0, 0);
    let mut c: Vec<_> = (0..12).map(|i| (i, sol((i % 4) as f64 + 1.0, i))).collect();
    let winner = reduce_best(c.clone()).unwrap().0;
    c.reverse();
    assert_eq!(reduce_best(c.clone()).unwrap().0, winner);
    c.rotate_left(5);
    assert_eq!(reduce_best(c).unwrap().0, winner);
    assert_eq!(winner, 0);
}

#[test]
fn time_limit_stops_early() {
    let instance = small(5);
    let mut c = config(Architecture::Pa, 1, 10_000_000, 1);
    c.time_limit_s = Some(0.05);
    let r = run(&c, &instance).unwrap();
    assert!(r.iterations_executed >= 1 && r.iterations_executed < 10_000_000);
}

#[test]
fn iac_colonies_use_distinct_streams() {
    let instance = small(8);
    let r = run_iac(&config(Architecture::Iac, 6, 600, 2), &instance).unwrap();
    assert_eq!(r.instance_bests.len(), 6);
    let c1 = run_iac(&config(Architecture::Iac, 1, 100, 2), &instance).unwrap();
    assert_eq!(r.instance_bests[0], c1.instance_bests[0]);
}

#[test]
fn mismatched_architecture_is_rejected() {
    let instance = small(8);
    assert!(matches!(
        run_pa(&config(Architecture::Iac, 1, 10, 0), &instance),
        Err(RunError::Config(_))
    ));
    assert!(matches!(run(&config(Architecture::Pa, 20, 10, 0), &instance), Err(RunError::Config(_))));
}
