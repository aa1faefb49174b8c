//! Acceptance checks. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any fails.

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use groupfair::cost::{CostPreset, CostSpec};
use groupfair::experiment::{parse_rows_csv, records_csv, rows_csv, run_experiment};
use groupfair::instance::{
    validate_instance, CostModel, DeclaredStructure, Edge, GroupFamily, GroupStructure, Instance,
    ValidInstance,
};
use groupfair::mcmf::{min_cost_flow_fixed, residual_potentials};
use groupfair::movielens::ingest_movielens;
use groupfair::network::{build, NetworkSize};
use groupfair::oracle::{
    brute_force_opt, gen_independent_set_reduction, gen_random, max_independent_set, CostKind,
    GenStructure, Graph, RandomParams, UtilityDist,
};
use groupfair::solver::{differs_on_one_cycle, solve, Status};
use groupfair::uniform::solve_uniform;

const SANDWICH_TOL: f64 = 1e-6;
const UNIFORM_TOL: f64 = 1e-9;
const TABLE_TOL: f64 = 0.02;

struct Outcome {
    pass: bool,
    detail: String,
}

fn report(id: u32, name: &str, o: &Outcome, secs: f64) {
    println!(
        "{} [{id}] {name}: {} ({secs:.2}s)",
        if o.pass { "PASS" } else { "FAIL" },
        o.detail
    );
}

/// Seeded small instance in the oracle's range: n <= 8, m <= 3, degree <= 3.
fn small_instance(seed: u64, uniform_q: Option<f64>) -> ValidInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n = rng.gen_range(2..=8);
    let m = rng.gen_range(1..=3);
    let structure = if seed % 2 == 0 {
        GenStructure::Disjoint
    } else {
        GenStructure::Laminar {
            depth: rng.gen_range(2..=3),
        }
    };
    let cost = if (seed / 2) % 2 == 0 {
        CostKind::Quadratic
    } else {
        CostKind::Piecewise
    };
    let params = RandomParams {
        n,
        m,
        density: rng.gen_range(0.3..=1.0),
        max_degree: Some(3),
        utility: match uniform_q {
            Some(q) => UtilityDist::Constant { q },
            None => UtilityDist::Integer { lo: 1, hi: 6 },
        },
        num_groups: rng.gen_range(1..=n.min(4)),
        structure,
        cost,
        ell_fraction: rng.gen_range(0.1..0.95),
        seed,
    };
    let mut inst = gen_random(&params).expect("generator parameters are valid");
    if let Some(q) = uniform_q {
        let k = rng.gen_range(0..=n);
        inst.ell = k as f64 * q;
    }
    validate_instance(inst).expect("generated instances validate")
}

fn criterion_1_and_3(instances: &[ValidInstance]) -> (Outcome, Outcome) {
    let mut bad = Vec::new();
    let (mut feasible, mut rounded, mut one_cycle) = (0, 0, 0);
    let mut cycle_bad = Vec::new();
    let mut broken = [0usize; 3];
    let mut beyond_opt = 0;
    for (k, inst) in instances.iter().enumerate() {
        let sol = solve(inst).expect("solver runs on disjoint and laminar instances");
        let opt = brute_force_opt(inst).expect("instance within enumeration limit");
        match (&opt, sol.status) {
            (None, Status::Infeasible) => continue,
            (None, _) | (Some(_), Status::Infeasible) => {
                bad.push(format!("#{k}: feasibility disagrees"));
                continue;
            }
            _ => {}
        }
        feasible += 1;
        let opt = opt.unwrap().cost;
        let (lp, cost, add) = (sol.lp_lower_bound, sol.cost, sol.additive_bound);
        let tol = SANDWICH_TOL * (1.0 + opt.abs());
        let checks = [lp <= opt + tol, opt <= cost + tol, cost <= lp + add + tol];
        for (c, ok) in checks.iter().enumerate() {
            if !ok {
                broken[c] += 1;
            }
        }
        if cost > opt + add + tol {
            beyond_opt += 1;
        }
        if checks.contains(&false) {
            bad.push(format!("#{k}: lp {lp} opt {opt} cost {cost} bound {add}"));
        }
        if sol.status == Status::Rounded {
            rounded += 1;
            let br = sol
                .bracket
                .as_ref()
                .expect("rounded solutions carry a bracket");
            let net = build(inst).unwrap();
            if differs_on_one_cycle(&net, &br.lower, &br.upper) {
                one_cycle += 1;
            } else {
                cycle_bad.push(k);
            }
        }
    }
    let c1 = Outcome {
        pass: bad.is_empty() && instances.len() >= 200,
        detail: format!(
            "{} instances ({feasible} feasible), {} violations \
             (lp>opt {}, opt>cost {}, cost>lp+bound {}; cost>opt+bound {beyond_opt}){}",
            instances.len(),
            bad.len(),
            broken[0],
            broken[1],
            broken[2],
            if bad.is_empty() {
                String::new()
            } else {
                format!("; first: {}", bad[..bad.len().min(3)].join(", "))
            }
        ),
    };
    let c3 = Outcome {
        pass: cycle_bad.is_empty(),
        detail: format!("{one_cycle}/{rounded} rounded brackets differ on one cycle"),
    };
    (c1, c3)
}

fn criterion_2(instances: &[(ValidInstance, f64)]) -> Outcome {
    let mut bad = Vec::new();
    let mut feasible = 0;
    for (k, (inst, q)) in instances.iter().enumerate() {
        let sol = solve_uniform(inst, *q).expect("uniform instances");
        let opt = brute_force_opt(inst).expect("instance within enumeration limit");
        match (opt, sol.status) {
            (None, Status::Infeasible) => {}
            (Some(o), s) if s != Status::Infeasible => {
                feasible += 1;
                if (sol.cost - o.cost).abs() > UNIFORM_TOL {
                    bad.push(format!("#{k}: uniform {} oracle {}", sol.cost, o.cost));
                }
            }
            _ => bad.push(format!("#{k}: feasibility disagrees")),
        }
    }
    Outcome {
        pass: bad.is_empty() && instances.len() >= 200,
        detail: format!(
            "{} instances ({feasible} feasible), {} mismatches{}",
            instances.len(),
            bad.len(),
            bad.first()
                .map(|b| format!("; first: {b}"))
                .unwrap_or_default()
        ),
    }
}

fn criterion_4(instances: &[&ValidInstance]) -> Outcome {
    let mut bad = Vec::new();
    for (k, inst) in instances.iter().enumerate() {
        let net = build(inst).unwrap();
        let size = NetworkSize::of(inst);
        let nodes = net.node_count();
        let arcs = net.arc_count();
        if nodes > size.node_bound() {
            bad.push(format!(
                "#{k} ({}): {nodes} nodes > {}",
                inst.structure().name(),
                size.node_bound()
            ));
        }
        match inst.structure() {
            GroupStructure::Disjoint => {
                if arcs != size.disjoint_arc_count() {
                    bad.push(format!(
                        "#{k}: {arcs} arcs != {}",
                        size.disjoint_arc_count()
                    ));
                }
            }
            _ => {
                let d = net.depth();
                if arcs > size.laminar_arc_bound(d) {
                    bad.push(format!("#{k}: {arcs} arcs > {}", size.laminar_arc_bound(d)));
                }
            }
        }
    }
    Outcome {
        pass: bad.is_empty(),
        detail: format!(
            "{} networks, {} violations{}",
            instances.len(),
            bad.len(),
            bad.first()
                .map(|b| format!("; first: {b}"))
                .unwrap_or_default()
        ),
    }
}

fn criterion_5() -> Outcome {
    let mut graphs = vec![
        Graph::path(3),
        Graph::complete(3),
        Graph::cycle(5),
        Graph::complete(4),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for s in 0..100 {
        let v = rng.gen_range(1..=7);
        let p = rng.gen_range(0.1..0.9);
        graphs.push(Graph::random(v, p, 1000 + s));
    }
    let (mut checks, mut bad) = (0, Vec::new());
    for (k, g) in graphs.iter().enumerate() {
        let alpha = max_independent_set(g);
        for ell in 1..=g.vertices {
            let inst = validate_instance(gen_independent_set_reduction(g, ell).unwrap()).unwrap();
            let opt = brute_force_opt(&inst).unwrap();
            let zero = opt.is_some_and(|o| o.cost.abs() < 1e-9 && o.utility >= ell as f64 - 1e-9);
            checks += 1;
            if zero != (alpha >= ell) {
                bad.push(format!("graph #{k} ell {ell}"));
            }
        }
    }
    Outcome {
        pass: bad.is_empty(),
        detail: format!(
            "{} graphs, {checks} (graph, ell) pairs, {} disagreements{}",
            graphs.len(),
            bad.len(),
            bad.first()
                .map(|b| format!("; first: {b}"))
                .unwrap_or_default()
        ),
    }
}

fn movielens_dir() -> PathBuf {
    std::env::var_os("MOVIELENS_DIR")
        .map(PathBuf::from)
        .unwrap_or_else(|| PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../data/ml-100k"))
}

fn within(x: f64, target: f64) -> bool {
    (x - target).abs() <= TABLE_TOL * target.abs()
}

fn criterion_6() -> Vec<(String, Outcome)> {
    let dir = movielens_dir();
    let (data, users) = (dir.join("u.data"), dir.join("u.user"));
    let load = |k| ingest_movielens(&data, &users, k, CostSpec::quadratic());
    let top10 = match load(10) {
        Ok(ml) => ml,
        Err(e) => {
            return vec![(
                "MovieLens top-10".into(),
                Outcome {
                    pass: false,
                    detail: format!("cannot load data from {}: {e}", dir.display()),
                },
            )]
        }
    };
    let mut out = Vec::new();
    let edges = top10.instance.edges.len();
    out.push((
        "MovieLens top-10 size".into(),
        Outcome {
            pass: edges == 4863,
            detail: format!("{edges} edges, expected 4863"),
        },
    ));
    let inst = validate_instance(top10.instance).unwrap();
    let report = run_experiment(&inst, &[500.0, 1000.0, 1500.0]);
    let lp_expected = [1788.0, 6768.0, 15100.0];
    let cost_expected = [1802.0, 6794.0, 15100.0];
    for (k, row) in report.rows.iter().enumerate() {
        let (lp, cost) = (row.lp_lower_bound, row.alg_cost);
        out.push((
            format!("MovieLens top-10 ell={}", row.threshold),
            Outcome {
                pass: within(lp, lp_expected[k]) && within(cost, cost_expected[k]),
                detail: format!(
                    "lp {lp} (expected {} +-2%), cost {cost} (expected {} +-2%)",
                    lp_expected[k], cost_expected[k]
                ),
            },
        ));
    }
    match load(20) {
        Ok(ml) => {
            let e = ml.instance.edges.len();
            out.push((
                "MovieLens top-20 size".into(),
                Outcome {
                    pass: e == 8716,
                    detail: format!("{e} edges, expected 8716"),
                },
            ));
        }
        Err(e) => out.push((
            "MovieLens top-20 size".into(),
            Outcome {
                pass: false,
                detail: e.to_string(),
            },
        )),
    }
    match load(50) {
        Ok(ml) => {
            let inst = validate_instance(ml.instance).unwrap().with_ell(500.0);
            let sol = solve(&inst).unwrap();
            out.push((
                "MovieLens top-50 ell=500 lp".into(),
                Outcome {
                    pass: within(sol.lp_lower_bound, 700.0),
                    detail: format!("lp {} (expected 700 +-2%)", sol.lp_lower_bound),
                },
            ));
        }
        Err(e) => out.push((
            "MovieLens top-50 ell=500 lp".into(),
            Outcome {
                pass: false,
                detail: e.to_string(),
            },
        )),
    }
    out
}

fn nsw_instance() -> ValidInstance {
    let (n, m, q) = (12, 3, 1.0);
    validate_instance(Instance {
        n,
        m,
        edges: (0..n)
            .flat_map(|i| (0..m).map(move |p| Edge::new(i, p, q)))
            .collect(),
        ell: n as f64 * q,
        groups: GroupFamily::new(
            DeclaredStructure::Disjoint,
            (0..4).map(|g| vec![3 * g, 3 * g + 1, 3 * g + 2]).collect(),
        ),
        costs: CostModel::uniform(CostSpec::Preset(CostPreset::NswLog { scale: 1.0 })),
    })
    .unwrap()
}

fn criterion_7() -> Outcome {
    let inst = nsw_instance();
    let spread = |m: &groupfair::instance::Matching| {
        let mut sigma = vec![0usize; inst.m()];
        for (_, p) in m.pairs() {
            sigma[p] += 1;
        }
        sigma.iter().max().unwrap() - sigma.iter().min().unwrap()
    };
    let sol = solve(&inst).unwrap();
    let uni = solve_uniform(&inst, 1.0).unwrap();
    let opt = brute_force_opt(&inst).unwrap().unwrap();
    let (s1, s2, s3) = (
        spread(&sol.matching),
        spread(&uni.matching),
        spread(&opt.matching),
    );
    Outcome {
        pass: s1 <= 1 && s2 <= 1 && s3 <= 1 && sol.matching.len() == 12,
        detail: format!("max-min load: solve {s1}, uniform {s2}, exhaustive {s3}"),
    }
}

/// Spot checks of the property suite; the full suites live in the other
/// test targets.
fn criterion_8(instances: &[ValidInstance]) -> Outcome {
    let mut bad = Vec::new();
    // convexity validation
    let concave = validate_instance(Instance {
        n: 2,
        m: 1,
        edges: vec![Edge::new(0, 0, 1.0), Edge::new(1, 0, 1.0)],
        ell: 1.0,
        groups: GroupFamily::singletons(2),
        costs: CostModel::uniform(CostSpec::Table {
            table: vec![0.0, 2.0, 3.0],
        }),
    });
    if concave.is_ok() {
        bad.push("concave table accepted".to_string());
    }
    for (k, inst) in instances.iter().take(60).enumerate() {
        let net = build(inst).unwrap();
        // path structure and flow integrality via fixed-value flows
        let w = net.weights();
        if let Ok(flow) = min_cost_flow_fixed(&net, &w, 1) {
            if !flow.is_integral() || net.check_flow(flow.arc_flow()).is_err() {
                bad.push(format!("#{k}: bad flow"));
            }
            if residual_potentials(&net, &w, flow.arc_flow(), false, 1e-7).is_none() {
                bad.push(format!("#{k}: no optimality certificate"));
            }
        }
    }
    // determinism
    let p = RandomParams {
        seed: 99,
        structure: GenStructure::Laminar { depth: 3 },
        ..RandomParams::default()
    };
    let a = serde_json::to_string(&gen_random(&p).unwrap()).unwrap();
    let b = serde_json::to_string(&gen_random(&p).unwrap()).unwrap();
    if a != b {
        bad.push("generator not deterministic".into());
    }
    // CSV round trip
    let rep = run_experiment(&instances[0], &[0.0, 3.0, 1e9]);
    let csv = rows_csv(&rep, false);
    match parse_rows_csv(&csv) {
        Ok(rows) if records_csv(&rows, false) == csv => {}
        _ => bad.push("CSV round trip".into()),
    }
    Outcome {
        pass: bad.is_empty(),
        detail: if bad.is_empty() {
            "convexity, flow structure, certificates, determinism, CSV round trip".into()
        } else {
            bad.join(", ")
        },
    }
}

fn main() -> ExitCode {
    let mut failed = 0;
    let mut tally = |id: u32, name: &str, o: Outcome, secs: f64| {
        report(id, name, &o, secs);
        if !o.pass {
            failed += 1;
        }
    };

    let t = Instant::now();
    let general: Vec<ValidInstance> = (0..240).map(|s| small_instance(s, None)).collect();
    let (c1, c3) = criterion_1_and_3(&general);
    let secs = t.elapsed().as_secs_f64();
    tally(1, "oracle sandwich", c1, secs);

    let t = Instant::now();
    let uniform: Vec<(ValidInstance, f64)> = (0..240)
        .map(|s| {
            let q = [1.0, 2.0, 0.5, 3.0][(s % 4) as usize];
            (small_instance(10_000 + s, Some(q)), q)
        })
        .collect();
    tally(
        2,
        "uniform exactness",
        criterion_2(&uniform),
        t.elapsed().as_secs_f64(),
    );

    tally(3, "one-cycle brackets", c3, secs);

    let t = Instant::now();
    let all: Vec<&ValidInstance> = general
        .iter()
        .chain(uniform.iter().map(|(i, _)| i))
        .collect();
    tally(
        4,
        "network size formulas",
        criterion_4(&all),
        t.elapsed().as_secs_f64(),
    );

    let t = Instant::now();
    tally(
        5,
        "independent-set reduction",
        criterion_5(),
        t.elapsed().as_secs_f64(),
    );

    let t = Instant::now();
    for (name, o) in criterion_6() {
        tally(6, &name, o, t.elapsed().as_secs_f64());
    }

    let t = Instant::now();
    tally(7, "NSW balance", criterion_7(), t.elapsed().as_secs_f64());

    let t = Instant::now();
    tally(
        8,
        "property spot checks",
        criterion_8(&general),
        t.elapsed().as_secs_f64(),
    );

    if failed == 0 {
        println!("acceptance: all criteria pass");
        ExitCode::SUCCESS
    } else {
        println!("acceptance: {failed} check(s) failed");
        ExitCode::FAILURE
    }
}
