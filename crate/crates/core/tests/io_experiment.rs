mod common;

use std::path::PathBuf;

use groupfair::cost::{CostPreset, CostSpec};
use groupfair::error::{IoError, ValidationError};
use groupfair::experiment::{parse_rows_csv, records_csv, rows_csv, run_experiment};
use groupfair::instance::{
    validate_instance, CostModel, DeclaredStructure, Edge, GroupFamily, Instance,
};
use groupfair::io::{parse_instance, read_instance, read_solution, write_instance, write_solution};
use groupfair::movielens::ingest_movielens;
use groupfair::oracle::brute_force_opt;
use groupfair::solver::{solve, verify_solution, Status};
use proptest::prelude::*;

fn scratch(name: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("groupfair-io-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    dir.join(name)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn instance_file_round_trip(params in common::small_params()) {
        let raw = common::raw(&params);
        let path = scratch(&format!("inst-{}.json", params.seed));
        write_instance(&path, &raw).unwrap();
        let back = read_instance(&path).unwrap();
        prop_assert_eq!(back.raw(), &raw);
        std::fs::remove_file(path).ok();
    }

    #[test]
    fn solution_file_round_trip(params in common::small_params()) {
        let inst = common::valid(&params);
        let sol = solve(&inst).unwrap();
        prop_assume!(sol.status != Status::Infeasible);
        let path = scratch(&format!("sol-{}.json", params.seed));
        write_solution(&path, &inst, &sol).unwrap();
        let back = read_solution(&path, &inst).unwrap();
        prop_assert_eq!(&back.matching, &sol.matching);
        prop_assert_eq!(back.status, sol.status);
        prop_assert_eq!(
            verify_solution(&inst, &back).is_ok(),
            verify_solution(&inst, &sol).is_ok()
        );
        std::fs::remove_file(path).ok();
    }

    #[test]
    fn experiment_csv_deterministic_and_round_trips(params in common::small_params()) {
        let inst = common::valid(&params);
        let top = inst.utility_upper_bound();
        let thresholds = [0.0, top / 3.0, top * 0.8, top + 1.0];
        let a = rows_csv(&run_experiment(&inst, &thresholds), false);
        let b = rows_csv(&run_experiment(&inst, &thresholds), false);
        prop_assert_eq!(&a, &b);
        prop_assert_eq!(records_csv(&parse_rows_csv(&a).unwrap(), false), a);
    }

    #[test]
    fn experiment_rows_respect_lp(params in common::small_params()) {
        let inst = common::valid(&params);
        let top = inst.utility_upper_bound();
        let rep = run_experiment(&inst, &[top / 4.0, top / 2.0, top]);
        for row in &rep.rows {
            let lp = row.lp_lower_bound;
            if lp.is_finite() {
                let tol = 1e-6 * (1.0 + lp.abs());
                for c in [row.naive_cost, row.greedy_cost, row.alg_cost] {
                    prop_assert!(!c.is_finite() || c >= lp - tol);
                }
            }
        }
    }
}

#[test]
fn crossing_groups_declared_disjoint_rejected() {
    let text = r#"{"n":3,"m":1,"edges":[[0,0,1],[1,0,1],[2,0,1]],"ell":1,
        "groups":{"structure":"disjoint","sets":[[0,1],[1,2]]},
        "costs":{"platform_defaults":{"platform":{"preset":"quadratic"},"group":{"preset":"quadratic"}}}}"#;
    let raw = parse_instance(text, "crossing").unwrap();
    let err: ValidationError = validate_instance(raw).unwrap_err();
    assert!(!err.to_string().is_empty());
}

#[test]
fn hand_written_single_item_solves() {
    let path = scratch("one.json");
    std::fs::write(
        &path,
        r#"{
  "n": 1,
  "m": 1,
  "edges": [[0, 0, 4]],
  "ell": 4,
  "groups": {"sets": [[0]]},
  "costs": {"platform_defaults": {"platform": {"preset": "quadratic"}, "group": {"table": [0, 1]}}}
}"#,
    )
    .unwrap();
    let inst = read_instance(&path).unwrap();
    let sol = solve(&inst).unwrap();
    assert_eq!(sol.status, Status::ExactIntegral);
    assert_eq!(sol.cost, 2.0);
    verify_solution(&inst, &sol).unwrap();
}

#[test]
fn empty_and_missing_files() {
    let path = scratch("empty.json");
    std::fs::write(&path, "  \n").unwrap();
    assert!(matches!(read_instance(&path), Err(IoError::Empty(_))));
    assert!(matches!(
        read_instance(&scratch("missing.json")),
        Err(IoError::Io { .. })
    ));
}

#[test]
fn zero_threshold_costs_zero() {
    let inst = validate_instance(Instance {
        n: 4,
        m: 2,
        edges: (0..4)
            .flat_map(|i| [Edge::new(i, 0, 3.0), Edge::new(i, 1, 5.0)])
            .collect(),
        ell: 0.0,
        groups: GroupFamily::new(DeclaredStructure::Auto, vec![vec![0, 1], vec![2, 3]]),
        costs: CostModel::uniform(CostSpec::quadratic()),
    })
    .unwrap();
    let r = &run_experiment(&inst, &[0.0]).rows[0];
    assert_eq!(
        [r.naive_cost, r.greedy_cost, r.lp_lower_bound, r.alg_cost],
        [0.0; 4]
    );
}

#[test]
fn nsw_spreads_load_on_symmetric_instance() {
    let (n, m) = (6, 3);
    let inst = validate_instance(Instance {
        n,
        m,
        edges: (0..n)
            .flat_map(|i| (0..m).map(move |p| Edge::new(i, p, 1.0)))
            .collect(),
        ell: n as f64,
        groups: GroupFamily::new(DeclaredStructure::Auto, vec![vec![0, 1, 2], vec![3, 4, 5]]),
        costs: CostModel::uniform(CostSpec::Preset(CostPreset::NswLog { scale: 1.0 })),
    })
    .unwrap();
    let spread = |pairs: Vec<(usize, usize)>| {
        let mut s = vec![0; m];
        for (_, p) in pairs {
            s[p] += 1;
        }
        s.iter().max().unwrap() - s.iter().min().unwrap()
    };
    let sol = solve(&inst).unwrap();
    let opt = brute_force_opt(&inst).unwrap().unwrap();
    assert!((sol.cost - opt.cost).abs() < 1e-9);
    assert!(spread(sol.matching.pairs().collect()) <= 1);
    assert!(spread(opt.matching.pairs().collect()) <= 1);
    let r = &run_experiment(&inst, &[n as f64]).rows[0];
    let hi = *r.sigma.iter().max().unwrap();
    let lo = *r.sigma.iter().min().unwrap();
    assert!(hi - lo <= 1);
}

#[test]
fn movielens_single_movie_from_files() {
    let data = scratch("u.data");
    let users = scratch("u.user");
    std::fs::write(&data, "7\t50\t4\t881250949\n8\t60\t2\t881250950\n").unwrap();
    std::fs::write(&users, "7|24|M|technician|85711\n8|53|F|other|94043\n").unwrap();
    let ml = ingest_movielens(&data, &users, 1, CostSpec::quadratic()).unwrap();
    assert_eq!(ml.instance.edges, vec![Edge::new(0, 0, 4.0)]);
    assert_eq!(ml.users, vec![7]);
    assert_eq!(ml.skipped_rows, 0);
}
