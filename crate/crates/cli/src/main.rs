use std::io::{self, Read, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use groupfair::baselines::{greedy, naive_greedy};
use groupfair::cost::{CostPreset, CostSpec};
use groupfair::experiment::{fmt_g, loads_csv, proportions_csv, rows_csv, run_experiment};
use groupfair::instance::{
    matching_cost, matching_utility, validate_instance, Instance, Matching, ValidInstance,
};
use groupfair::io::{parse_instance, read_solution, SolutionRecord};
use groupfair::movielens::ingest_movielens;
use groupfair::network::build;
use groupfair::oracle::{
    brute_force_opt, gen_independent_set_reduction, gen_random, CostKind, GenStructure, Graph,
    RandomParams, UtilityDist,
};
use groupfair::solver::{solve, verify_solution, Solution, Status};
use groupfair::uniform::solve_uniform;

const EXIT_INFEASIBLE: u8 = 2;

#[derive(Parser)]
#[command(name = "groupfair", version, about = "Group-fair convex-cost matching")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve an instance with the LP-rounding solver.
    Solve(SolveArgs),
    /// Ratio greedy baseline.
    Greedy(InstanceArgs),
    /// Highest-utility-first baseline.
    Naive(InstanceArgs),
    /// Exact solver for instances whose edges all have utility q.
    Uniform {
        #[command(flatten)]
        io: InstanceArgs,
        #[arg(long)]
        q: f64,
    },
    /// Exhaustive search; small instances only.
    Oracle(InstanceArgs),
    /// Generate an instance.
    #[command(subcommand)]
    Gen(GenCommand),
    /// Build an instance from the MovieLens-100k files.
    Movielens {
        #[arg(long)]
        data: PathBuf,
        #[arg(long)]
        users: PathBuf,
        #[arg(long, default_value_t = 10)]
        top_k: usize,
        #[arg(long, value_enum, default_value_t = Costs::Quadratic)]
        costs: Costs,
        /// Utility floor stored in the instance.
        #[arg(long, default_value_t = 0.0)]
        ell: f64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Compare the solver and baselines over several utility floors.
    Experiment {
        /// Instance file, or - for stdin.
        instance: PathBuf,
        #[arg(long, value_delimiter = ',', required = true)]
        thresholds: Vec<f64>,
        /// Add runtime columns (output is then no longer reproducible).
        #[arg(long)]
        timings: bool,
        /// Also write per-platform and per-group loads here.
        #[arg(long)]
        loads: Option<PathBuf>,
        /// Also write neighborhood group proportions here.
        #[arg(long)]
        proportions: Option<PathBuf>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Re-check a solution file against its instance.
    Verify {
        instance: PathBuf,
        solution: PathBuf,
    },
    /// Print the flow network as an edge list.
    Network(InstanceArgs),
}

#[derive(Args)]
struct InstanceArgs {
    /// Instance file, or - for stdin.
    #[arg(default_value = "-")]
    instance: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SolveArgs {
    #[command(flatten)]
    io: InstanceArgs,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Clone, Copy, ValueEnum)]
enum Costs {
    Quadratic,
    Nsw,
}

#[derive(Clone, Copy, ValueEnum)]
enum GenCost {
    Quadratic,
    Piecewise,
    Nsw,
    RandomConvex,
}

#[derive(Args)]
struct GenCommon {
    #[arg(long, default_value_t = 6)]
    n: usize,
    #[arg(long, default_value_t = 3)]
    m: usize,
    #[arg(long, default_value_t = 0.5)]
    density: f64,
    #[arg(long)]
    max_degree: Option<usize>,
    #[arg(long, default_value_t = 2)]
    groups: usize,
    #[arg(long, value_enum, default_value_t = GenCost::Quadratic)]
    cost: GenCost,
    /// Give every edge this utility instead of a random integer.
    #[arg(long)]
    q: Option<f64>,
    #[arg(long, default_value_t = 1)]
    utility_lo: u32,
    #[arg(long, default_value_t = 5)]
    utility_hi: u32,
    /// Floor as a fraction of the best achievable utility.
    #[arg(long, default_value_t = 0.5)]
    ell_fraction: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum GraphKind {
    Random,
    Path,
    Cycle,
    Complete,
    Empty,
}

#[derive(Subcommand)]
enum GenCommand {
    /// Random instance with disjoint groups.
    Random(GenCommon),
    /// Random instance with nested groups.
    Laminar {
        #[command(flatten)]
        common: GenCommon,
        #[arg(long, default_value_t = 2)]
        depth: usize,
    },
    /// Instance encoding an independent-set question.
    Indset {
        #[arg(long, value_enum, default_value_t = GraphKind::Random)]
        graph: GraphKind,
        #[arg(long, default_value_t = 6)]
        vertices: usize,
        /// Edge probability for random graphs.
        #[arg(long, default_value_t = 0.4)]
        p: f64,
        /// Independent set size asked for.
        #[arg(long, default_value_t = 2)]
        ell: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn load(path: &Path) -> Result<ValidInstance> {
    let (text, context) = if path == Path::new("-") {
        let mut s = String::new();
        io::stdin()
            .read_to_string(&mut s)
            .context("reading stdin")?;
        (s, "<stdin>".to_string())
    } else {
        let s =
            std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        (s, path.display().to_string())
    };
    let raw = parse_instance(&text, &context)?;
    Ok(validate_instance(raw)?)
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => {
            std::fs::write(path, text).with_context(|| format!("writing {}", path.display()))
        }
        None => {
            let mut stdout = io::stdout().lock();
            stdout.write_all(text.as_bytes())?;
            Ok(stdout.flush()?)
        }
    }
}

fn pretty(v: Value) -> Result<String> {
    Ok(serde_json::to_string_pretty(&v)? + "\n")
}

fn matching_json(inst: &ValidInstance, method: &str, m: &Matching) -> Value {
    json!({
        "method": method,
        "cost": matching_cost(inst, m).expect("matching uses instance edges"),
        "utility": matching_utility(inst, m),
        "matching": m.pairs().collect::<Vec<_>>(),
    })
}

fn solution_csv(sol: &Solution) -> String {
    let status = match sol.status {
        Status::ExactIntegral => "exact_integral",
        Status::Rounded => "rounded",
        Status::Infeasible => "infeasible",
    };
    let mut out = String::from("status,cost,utility,lp_lower_bound,gap,additive_bound\n");
    out += &format!(
        "{status},{},{},{},{},{}\n\nitem,platform\n",
        fmt_g(sol.cost),
        fmt_g(sol.utility),
        fmt_g(sol.lp_lower_bound),
        fmt_g(sol.gap()),
        fmt_g(sol.additive_bound),
    );
    for (i, p) in sol.matching.pairs() {
        out += &format!("{i},{p}\n");
    }
    out
}

fn report_solution(
    inst: &ValidInstance,
    sol: &Solution,
    format: Format,
    out: Option<&Path>,
) -> Result<u8> {
    let text = match format {
        Format::Json => pretty(serde_json::to_value(SolutionRecord::from_solution(
            inst, sol,
        )?)?)?,
        Format::Csv => solution_csv(sol),
    };
    emit(out, &text)?;
    if sol.status == Status::Infeasible {
        eprintln!(
            "infeasible: best reachable utility {} is below {}",
            sol.utility,
            inst.ell()
        );
        return Ok(EXIT_INFEASIBLE);
    }
    Ok(0)
}

fn gen_params(c: &GenCommon, structure: GenStructure) -> RandomParams {
    RandomParams {
        n: c.n,
        m: c.m,
        density: c.density,
        max_degree: c.max_degree,
        utility: match c.q {
            Some(q) => UtilityDist::Constant { q },
            None => UtilityDist::Integer {
                lo: c.utility_lo,
                hi: c.utility_hi,
            },
        },
        num_groups: c.groups,
        structure,
        cost: match c.cost {
            GenCost::Quadratic => CostKind::Quadratic,
            GenCost::Piecewise => CostKind::Piecewise,
            GenCost::Nsw => CostKind::Nsw,
            GenCost::RandomConvex => CostKind::RandomConvex,
        },
        ell_fraction: c.ell_fraction,
        seed: c.seed,
    }
}

fn write_instance_out(inst: &Instance, out: Option<&Path>) -> Result<u8> {
    emit(out, &pretty(serde_json::to_value(inst)?)?)?;
    Ok(0)
}

fn run(cli: Cli) -> Result<u8> {
    match cli.command {
        Command::Solve(args) => {
            let inst = load(&args.io.instance)?;
            let sol = solve(&inst)?;
            report_solution(&inst, &sol, args.format, args.io.out.as_deref())
        }
        Command::Uniform { io, q } => {
            let inst = load(&io.instance)?;
            let sol = solve_uniform(&inst, q)?;
            report_solution(&inst, &sol, Format::Json, io.out.as_deref())
        }
        Command::Greedy(io) => baseline(&io, "greedy", greedy),
        Command::Naive(io) => baseline(&io, "naive", naive_greedy),
        Command::Oracle(io) => {
            let inst = load(&io.instance)?;
            match brute_force_opt(&inst)? {
                Some(opt) => {
                    emit(
                        io.out.as_deref(),
                        &pretty(matching_json(&inst, "oracle", &opt.matching))?,
                    )?;
                    Ok(0)
                }
                None => {
                    eprintln!("infeasible: no matching reaches utility {}", inst.ell());
                    Ok(EXIT_INFEASIBLE)
                }
            }
        }
        Command::Gen(GenCommand::Random(c)) => {
            let inst = gen_random(&gen_params(&c, GenStructure::Disjoint))?;
            write_instance_out(&inst, c.out.as_deref())
        }
        Command::Gen(GenCommand::Laminar { common, depth }) => {
            let inst = gen_random(&gen_params(&common, GenStructure::Laminar { depth }))?;
            write_instance_out(&inst, common.out.as_deref())
        }
        Command::Gen(GenCommand::Indset {
            graph,
            vertices,
            p,
            ell,
            seed,
            out,
        }) => {
            if !(0.0..=1.0).contains(&p) {
                bail!("edge probability {p} outside [0, 1]");
            }
            let g = match graph {
                GraphKind::Random => Graph::random(vertices, p, seed),
                GraphKind::Path => Graph::path(vertices),
                GraphKind::Cycle => Graph::cycle(vertices),
                GraphKind::Complete => Graph::complete(vertices),
                GraphKind::Empty => Graph::empty(vertices),
            };
            write_instance_out(&gen_independent_set_reduction(&g, ell)?, out.as_deref())
        }
        Command::Movielens {
            data,
            users,
            top_k,
            costs,
            ell,
            out,
        } => {
            let spec = match costs {
                Costs::Quadratic => CostSpec::quadratic(),
                Costs::Nsw => CostSpec::Preset(CostPreset::NswLog { scale: 1.0 }),
            };
            let mut ml = ingest_movielens(&data, &users, top_k, spec)?;
            ml.instance.ell = ell;
            if ml.skipped_rows > 0 {
                eprintln!("skipped {} malformed rows", ml.skipped_rows);
            }
            eprintln!(
                "{} users, {} movies, {} ratings",
                ml.instance.n,
                ml.instance.m,
                ml.instance.edges.len()
            );
            write_instance_out(&ml.instance, out.as_deref())
        }
        Command::Experiment {
            instance,
            thresholds,
            timings,
            loads,
            proportions,
            out,
        } => {
            let inst = load(&instance)?;
            let report = run_experiment(&inst, &thresholds);
            for row in &report.rows {
                if let Some(e) = &row.error {
                    eprintln!("threshold {}: {e}", fmt_g(row.threshold));
                }
            }
            if let Some(path) = loads {
                emit(Some(&path), &loads_csv(&report))?;
            }
            if let Some(path) = proportions {
                emit(Some(&path), &proportions_csv(&report))?;
            }
            emit(out.as_deref(), &rows_csv(&report, timings))?;
            Ok(0)
        }
        Command::Verify { instance, solution } => {
            let inst = load(&instance)?;
            let sol = read_solution(&solution, &inst)?;
            let rep = verify_solution(&inst, &sol)?;
            let mut text = format!(
                "OK\ncost {}\nutility {}\nlp_lower_bound {}\ngap {}\nadditive_bound {}\n",
                fmt_g(rep.cost),
                fmt_g(rep.utility),
                fmt_g(rep.lp_lower_bound),
                fmt_g(rep.gap),
                fmt_g(rep.additive_bound)
            );
            if let Some(one) = rep.single_cycle {
                text += &format!("single_cycle {one}\n");
            }
            emit(None, &text)?;
            Ok(0)
        }
        Command::Network(io) => {
            let inst = load(&io.instance)?;
            let net = build(&inst)?;
            let mut buf = Vec::new();
            net.write_edge_list(&mut buf)?;
            emit(io.out.as_deref(), &String::from_utf8(buf)?)?;
            Ok(0)
        }
    }
}

fn baseline(
    io: &InstanceArgs,
    name: &str,
    f: fn(&ValidInstance) -> Result<Matching, groupfair::error::BaselineError>,
) -> Result<u8> {
    let inst = load(&io.instance)?;
    match f(&inst) {
        Ok(m) => {
            emit(io.out.as_deref(), &pretty(matching_json(&inst, name, &m))?)?;
            Ok(0)
        }
        Err(e) => {
            eprintln!("infeasible: {e}");
            Ok(EXIT_INFEASIBLE)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
