//! Command-line front end: graph generation and ingestion, diffusion runs,
//! sweeps, local clustering, flow refinement, equivalence reports, and the
//! scatter experiment. Every run writes its artifact plus a manifest; exit
//! codes are 0 (success), 1 (validation error), 2 (numerical failure).

use std::fs;
use std::io::BufReader;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use implicitreg::diffusion::{
    heat_kernel_apply, pagerank, DiffusionKind, HeatMode, PageRankMode,
};
use implicitreg::error::{Error, Result};
use implicitreg::graph::{load_edge_list, preprocess, Graph, NodeVector};
use implicitreg::local::{local_profile, LocalMethod};
use implicitreg::numerics::dense_eigendecompose;
use implicitreg::partition::{
    mqi_refine, niceness_metrics, spectral_partition, sweep_cut, Cluster, EigenSolver,
    SweepOrdering,
};
use implicitreg::regularize::{pnorm_fit, verify_equivalence, EquivalenceReport, RegularizerFamily};
use implicitreg::{apply_matrix, generate, GraphFamily, MatrixKind};

use implicitreg_cli::experiment::{run_scatter, ScatterConfig, ScatterMethod, SCATTER_HEADER, SUMMARY_HEADER};
use implicitreg_cli::manifest::write_manifest;
use implicitreg_cli::suites::cheeger_suite;
use implicitreg_cli::fmt_f64;

#[derive(Parser)]
#[command(name = "implicitreg", version, about = "Diffusion-based graph analytics")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic graph and write it as an edge list.
    Gen(GenArgs),
    /// Dense or power-method eigendecomposition of the normalized Laplacian.
    Eigen(EigenArgs),
    /// Run a diffusion dynamics from a seed node and write the vector.
    Diffuse(DiffuseArgs),
    /// Sweep cut over a node vector.
    Sweep(SweepArgs),
    /// Best local cluster around a target node under a volume budget.
    Local(LocalArgs),
    /// Flow-based quotient-cut refinement of a node set.
    Mqi(MqiArgs),
    /// Diffusion-versus-regularized-optimum equivalence report.
    VerifyReg(VerifyRegArgs),
    /// Size-resolved conductance/niceness scatter experiment.
    Scatter(ScatterArgs),
    /// Cheeger-bound check over the built-in 50-graph suite.
    CheegerSuite(CheegerArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum FamilyName {
    Path,
    Cycle,
    Complete,
    Grid,
    Dumbbell,
    RingOfCliques,
    WhiskeredExpander,
    RandomRegular,
}

#[derive(Args)]
struct GenArgs {
    #[arg(long, value_enum)]
    family: FamilyName,
    /// Node count (path, cycle, complete, random-regular).
    #[arg(long)]
    n: Option<usize>,
    /// Clique size (dumbbell).
    #[arg(long)]
    k: Option<usize>,
    /// Bridge count (dumbbell).
    #[arg(long)]
    b: Option<usize>,
    #[arg(long)]
    rows: Option<usize>,
    #[arg(long)]
    cols: Option<usize>,
    /// Clique count (ring-of-cliques).
    #[arg(long)]
    count: Option<usize>,
    /// Clique size (ring-of-cliques).
    #[arg(long)]
    size: Option<usize>,
    /// Core size (whiskered-expander).
    #[arg(long)]
    core: Option<usize>,
    /// Core degree (whiskered-expander, random-regular).
    #[arg(long)]
    degree: Option<usize>,
    #[arg(long)]
    whiskers: Option<usize>,
    #[arg(long)]
    length: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum SolverName {
    Dense,
    Power,
}

#[derive(Args)]
struct EigenArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long, value_enum, default_value_t = SolverName::Dense)]
    solver: SolverName,
    /// Power-method iteration cap.
    #[arg(long, default_value_t = 20_000)]
    iters: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum DynamicsName {
    Heat,
    Pagerank,
    Lazywalk,
}

#[derive(Clone, Copy, ValueEnum)]
enum DiffuseModeName {
    Exact,
    Series,
    Richardson,
}

#[derive(Args)]
struct DiffuseArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long, value_enum)]
    dynamics: DynamicsName,
    #[arg(long, default_value_t = 1.0)]
    t: f64,
    #[arg(long, default_value_t = 0.15)]
    gamma: f64,
    #[arg(long, default_value_t = 0.5)]
    alpha: f64,
    #[arg(long, default_value_t = 10)]
    steps: usize,
    #[arg(long, value_enum, default_value_t = DiffuseModeName::Exact)]
    mode: DiffuseModeName,
    /// Series terms (heat, series mode).
    #[arg(long, default_value_t = 60)]
    terms: usize,
    #[arg(long, default_value_t = 1e-10)]
    tol: f64,
    #[arg(long)]
    seed_node: usize,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum OrderingName {
    Raw,
    SqrtDegree,
    Degree,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long)]
    graph: PathBuf,
    /// Vector file: one real per line, node index implicit.
    #[arg(long)]
    vector: PathBuf,
    #[arg(long, value_enum, default_value_t = OrderingName::SqrtDegree)]
    ordering: OrderingName,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum LocalMethodName {
    Push,
    Mov,
}

#[derive(Args)]
struct LocalArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    target: usize,
    #[arg(long)]
    budget: f64,
    #[arg(long, value_enum, default_value_t = LocalMethodName::Push)]
    method: LocalMethodName,
    /// Push truncation threshold; defaults to 1e-6/budget.
    #[arg(long)]
    epsilon: Option<f64>,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct MqiArgs {
    #[arg(long)]
    graph: PathBuf,
    /// Comma-separated node ids of the side to refine.
    #[arg(long)]
    side: String,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct VerifyRegArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long, default_value = "0.1,1,10")]
    t_grid: String,
    #[arg(long, default_value = "0.1,0.5,0.9")]
    gamma_grid: String,
    #[arg(long, default_value_t = 0.6)]
    alpha: f64,
    #[arg(long, default_value = "1,2,3")]
    steps_grid: String,
    #[arg(long, default_value_t = 1.1)]
    p_min: f64,
    #[arg(long, default_value_t = 4.0)]
    p_max: f64,
    #[arg(long, default_value_t = 25)]
    p_count: usize,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct ScatterArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long, default_value_t = 100)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 0.1)]
    gamma: f64,
    #[arg(long, default_value_t = 1e-5)]
    epsilon: f64,
    /// Comma-separated subset of {spectral,flow}.
    #[arg(long, default_value = "spectral,flow")]
    methods: String,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Args)]
struct CheegerArgs {
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

fn main() {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => {}
        Err(e) => {
            eprintln!("error: {e}");
            std::process::exit(if e.is_validation() { 1 } else { 2 });
        }
    }
}

fn run(command: Command) -> Result<()> {
    match command {
        Command::Gen(args) => cmd_gen(args),
        Command::Eigen(args) => cmd_eigen(args),
        Command::Diffuse(args) => cmd_diffuse(args),
        Command::Sweep(args) => cmd_sweep(args),
        Command::Local(args) => cmd_local(args),
        Command::Mqi(args) => cmd_mqi(args),
        Command::VerifyReg(args) => cmd_verify_reg(args),
        Command::Scatter(args) => cmd_scatter(args),
        Command::CheegerSuite(args) => cmd_cheeger_suite(args),
    }
}

/// Load an edge list, keep the largest component, and persist the id map
/// next to the output for traceability.
fn load_graph(path: &Path, out: &Path) -> Result<Graph> {
    let file = fs::File::open(path)?;
    let graph = load_edge_list(BufReader::new(file))?;
    let (graph, id_map) = preprocess(&graph)?;
    let mut name = out.file_name().unwrap_or_default().to_os_string();
    name.push(".idmap.csv");
    fs::write(out.with_file_name(name), id_map.to_csv())?;
    Ok(graph)
}

fn parse_f64_list(text: &str) -> Result<Vec<f64>> {
    text.split(',')
        .map(|tok| {
            tok.trim()
                .parse::<f64>()
                .map_err(|_| Error::InvalidParameter(format!("bad number `{tok}`")))
        })
        .collect()
}

fn parse_usize_list(text: &str) -> Result<Vec<usize>> {
    text.split(',')
        .map(|tok| {
            tok.trim()
                .parse::<usize>()
                .map_err(|_| Error::InvalidParameter(format!("bad integer `{tok}`")))
        })
        .collect()
}

fn require(name: &str, value: Option<usize>) -> Result<usize> {
    value.ok_or_else(|| Error::InvalidParameter(format!("--{name} is required for this family")))
}

fn cmd_gen(args: GenArgs) -> Result<()> {
    let family = match args.family {
        FamilyName::Path => GraphFamily::Path { n: require("n", args.n)? },
        FamilyName::Cycle => GraphFamily::Cycle { n: require("n", args.n)? },
        FamilyName::Complete => GraphFamily::Complete { n: require("n", args.n)? },
        FamilyName::Grid => GraphFamily::Grid {
            rows: require("rows", args.rows)?,
            cols: require("cols", args.cols)?,
        },
        FamilyName::Dumbbell => GraphFamily::Dumbbell {
            clique: require("k", args.k)?,
            bridges: require("b", args.b)?,
        },
        FamilyName::RingOfCliques => GraphFamily::RingOfCliques {
            count: require("count", args.count)?,
            size: require("size", args.size)?,
        },
        FamilyName::WhiskeredExpander => GraphFamily::WhiskeredExpander {
            core: require("core", args.core)?,
            degree: require("degree", args.degree)?,
            whiskers: require("whiskers", args.whiskers)?,
            length: require("length", args.length)?,
        },
        FamilyName::RandomRegular => GraphFamily::RandomRegular {
            n: require("n", args.n)?,
            degree: require("degree", args.degree)?,
        },
    };
    let graph = generate(&family, args.seed)?;
    let mut text = String::new();
    for (u, v, w) in graph.edges() {
        if w == 1.0 {
            text.push_str(&format!("{u} {v}\n"));
        } else {
            text.push_str(&format!("{u} {v} {w}\n"));
        }
    }
    fs::write(&args.out, text)?;
    write_manifest(
        &args.out,
        "gen",
        Some(graph.structure_hash()),
        Some(args.seed),
        json!({ "family": family.to_string() }),
    )?;
    println!("wrote {} nodes, {} edges", graph.n(), graph.edge_count());
    Ok(())
}

fn write_vector(path: &Path, values: &[f64]) -> Result<()> {
    let mut text = String::with_capacity(values.len() * 8);
    for v in values {
        text.push_str(&fmt_f64(*v));
        text.push('\n');
    }
    fs::write(path, text)?;
    Ok(())
}

fn read_vector(path: &Path, n: usize) -> Result<NodeVector> {
    let text = fs::read_to_string(path)?;
    let values: Vec<f64> = text
        .lines()
        .enumerate()
        .map(|(i, line)| {
            line.trim()
                .parse::<f64>()
                .map_err(|_| Error::Parse { line: i + 1, msg: format!("bad value `{line}`") })
        })
        .collect::<Result<_>>()?;
    if values.len() != n {
        return Err(Error::DimensionMismatch { expected: n, got: values.len() });
    }
    NodeVector::new(values)
}

fn cmd_eigen(args: EigenArgs) -> Result<()> {
    let graph = load_graph(&args.graph, &args.out)?;
    let (rows, v2, lambda2) = match args.solver {
        SolverName::Dense => {
            let eig = dense_eigendecompose(&graph, MatrixKind::NormalizedLaplacian)?;
            let rows: Vec<String> = eig
                .eigenvalues
                .iter()
                .enumerate()
                .map(|(i, l)| format!("{i},{}", fmt_f64(*l)))
                .collect();
            (rows, eig.eigenvector(1), eig.lambda2())
        }
        SolverName::Power => {
            // The power path estimates only the second eigenpair.
            use implicitreg::diffusion::{power_method, PowerTarget};
            use rand::Rng;
            use rand::SeedableRng;
            let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(args.seed);
            let start = NodeVector::new(
                (0..graph.n()).map(|_| rng.random_range(-1.0..1.0)).collect(),
            )?;
            let report = power_method(
                &graph,
                PowerTarget::SecondOfNormalizedLaplacian,
                &start,
                args.iters,
                1e-12,
            )?;
            let rows = vec![format!("1,{}", fmt_f64(report.lambda))];
            let lambda2 = report.lambda;
            (rows, report.vector.into_vec(), lambda2)
        }
    };
    let mut text = String::from("index,eigenvalue\n");
    for row in rows {
        text.push_str(&row);
        text.push('\n');
    }
    fs::write(&args.out, text)?;
    let mut vec_name = args.out.file_name().unwrap_or_default().to_os_string();
    vec_name.push(".v2.vec");
    write_vector(&args.out.with_file_name(vec_name), &v2)?;
    write_manifest(
        &args.out,
        "eigen",
        Some(graph.structure_hash()),
        Some(args.seed),
        json!({ "graph": args.graph.display().to_string(), "solver": match args.solver { SolverName::Dense => "dense", SolverName::Power => "power" }, "iters": args.iters }),
    )?;
    println!("lambda2 = {}", fmt_f64(lambda2));
    Ok(())
}

fn cmd_diffuse(args: DiffuseArgs) -> Result<()> {
    let graph = load_graph(&args.graph, &args.out)?;
    let n = graph.n();
    if args.seed_node >= n {
        return Err(Error::InvalidParameter(format!(
            "seed node {} out of bounds for n={n}",
            args.seed_node
        )));
    }
    let seed = NodeVector::indicator(n, args.seed_node)?;
    let (vector, params): (NodeVector, Value) = match args.dynamics {
        DynamicsName::Heat => {
            let mode = match args.mode {
                DiffuseModeName::Series => HeatMode::TruncatedSeries { terms: args.terms },
                _ => HeatMode::ExactDense,
            };
            (
                heat_kernel_apply(&graph, args.t, &seed, mode)?,
                json!({ "dynamics": "heat", "t": args.t, "mode": match mode { HeatMode::ExactDense => "exact".to_string(), HeatMode::TruncatedSeries { terms } => format!("series:{terms}") } }),
            )
        }
        DynamicsName::Pagerank => {
            let mode = match args.mode {
                DiffuseModeName::Richardson => PageRankMode::Richardson { tol: args.tol },
                _ => PageRankMode::ExactDense,
            };
            (
                pagerank(&graph, args.gamma, &seed, mode)?,
                json!({ "dynamics": "pagerank", "gamma": args.gamma, "tol": args.tol }),
            )
        }
        DynamicsName::Lazywalk => {
            let kind = DiffusionKind::LazyWalk { alpha: args.alpha, steps: args.steps };
            kind.validate()?;
            let mut x = seed.clone();
            for _ in 0..args.steps {
                x = apply_matrix(&graph, MatrixKind::LazyWalk { alpha: args.alpha }, &x)?;
            }
            (x, json!({ "dynamics": "lazywalk", "alpha": args.alpha, "steps": args.steps }))
        }
    };
    write_vector(&args.out, vector.as_slice())?;
    let mut params = params;
    params["graph"] = json!(args.graph.display().to_string());
    params["seed_node"] = json!(args.seed_node);
    write_manifest(&args.out, "diffuse", Some(graph.structure_hash()), None, params)?;
    println!("wrote {} entries, mass {}", vector.len(), fmt_f64(vector.sum()));
    Ok(())
}

fn cmd_sweep(args: SweepArgs) -> Result<()> {
    let graph = load_graph(&args.graph, &args.out)?;
    let vector = read_vector(&args.vector, graph.n())?;
    let ordering = match args.ordering {
        OrderingName::Raw => SweepOrdering::Raw,
        OrderingName::SqrtDegree => SweepOrdering::InvSqrtDegree,
        OrderingName::Degree => SweepOrdering::InvDegree,
    };
    let profile = sweep_cut(&graph, &vector, ordering)?;
    let mut text = String::from("prefix_size,node,cut,volume,conductance\n");
    let mut cut = 0.0;
    let mut vol = 0.0;
    let mut in_set = vec![false; graph.n()];
    for (k, &u) in profile.order.iter().enumerate() {
        if k >= profile.prefix_conductance.len() {
            break;
        }
        let mut to_inside = 0.0;
        for (v, w) in graph.neighbors(u) {
            if in_set[v] {
                to_inside += w;
            }
        }
        in_set[u] = true;
        vol += graph.degree(u);
        cut += graph.degree(u) - 2.0 * to_inside;
        text.push_str(&format!(
            "{},{},{},{},{}\n",
            k + 1,
            u,
            fmt_f64(cut),
            fmt_f64(vol),
            fmt_f64(profile.prefix_conductance[k])
        ));
    }
    fs::write(&args.out, text)?;
    write_manifest(
        &args.out,
        "sweep",
        Some(graph.structure_hash()),
        None,
        json!({ "graph": args.graph.display().to_string(), "vector": args.vector.display().to_string(), "ordering": format!("{ordering:?}") }),
    )?;
    println!(
        "best prefix {} with conductance {}",
        profile.best_prefix + 1,
        fmt_f64(profile.best_cluster.conductance)
    );
    Ok(())
}

fn cluster_csv(
    graph: &Graph,
    method: &str,
    seed_node: &str,
    param: &str,
    cluster: &Cluster,
) -> Result<String> {
    let (spl, connected, ratio) = if cluster.size() >= 2 {
        let m = niceness_metrics(graph, cluster)?;
        (m.avg_internal_spl, m.connected, m.ext_int_ratio)
    } else {
        (f64::NAN, true, f64::NAN)
    };
    let mut text = String::from(
        "method,seed_node,param,cluster_size,volume,cut,conductance,avg_internal_spl,connected,ext_int_ratio\n",
    );
    text.push_str(&format!(
        "{method},{seed_node},{param},{},{},{},{},{},{},{}\n",
        cluster.size(),
        fmt_f64(cluster.volume),
        fmt_f64(cluster.cut_weight),
        fmt_f64(cluster.conductance),
        fmt_f64(spl),
        u8::from(connected),
        fmt_f64(ratio),
    ));
    Ok(text)
}

fn write_members(out: &Path, members: &[usize]) -> Result<()> {
    let mut name = out.file_name().unwrap_or_default().to_os_string();
    name.push(".members.csv");
    let mut text = String::from("node\n");
    for &u in members {
        text.push_str(&format!("{u}\n"));
    }
    fs::write(out.with_file_name(name), text)?;
    Ok(())
}

fn cmd_local(args: LocalArgs) -> Result<()> {
    let graph = load_graph(&args.graph, &args.out)?;
    let method = match args.method {
        LocalMethodName::Push => match args.epsilon {
            Some(eps) => LocalMethod::Push {
                gammas: match LocalMethod::default_push(args.budget) {
                    LocalMethod::Push { gammas, .. } => gammas,
                    _ => unreachable!(),
                },
                epsilon: eps,
            },
            None => LocalMethod::default_push(args.budget),
        },
        LocalMethodName::Mov => LocalMethod::Mov {
            kappas: (1..=9).map(|i| i as f64 / 10.0).collect(),
        },
    };
    let best = local_profile(&graph, args.target, args.budget, &method)?;
    let method_name = match args.method {
        LocalMethodName::Push => "push",
        LocalMethodName::Mov => "mov",
    };
    let param = format!("budget={}", fmt_f64(args.budget));
    match best {
        Some(cluster) => {
            fs::write(
                &args.out,
                cluster_csv(&graph, method_name, &args.target.to_string(), &param, &cluster)?,
            )?;
            write_members(&args.out, &cluster.members)?;
            println!(
                "cluster of {} nodes, conductance {}",
                cluster.size(),
                fmt_f64(cluster.conductance)
            );
        }
        None => {
            // Distinct empty result: header-only CSV, still exit 0.
            fs::write(
                &args.out,
                "method,seed_node,param,cluster_size,volume,cut,conductance,avg_internal_spl,connected,ext_int_ratio\n",
            )?;
            write_members(&args.out, &[])?;
            println!("no qualifying cluster");
        }
    }
    write_manifest(
        &args.out,
        "local",
        Some(graph.structure_hash()),
        None,
        json!({ "graph": args.graph.display().to_string(), "target": args.target, "budget": args.budget, "method": method_name }),
    )?;
    Ok(())
}

fn cmd_mqi(args: MqiArgs) -> Result<()> {
    let graph = load_graph(&args.graph, &args.out)?;
    let side = parse_usize_list(&args.side)?;
    let outcome = mqi_refine(&graph, &side)?;
    let param = format!("side_size={}", side.len());
    fs::write(
        &args.out,
        cluster_csv(&graph, "mqi", "", &param, &outcome.cluster)?,
    )?;
    write_members(&args.out, &outcome.cluster.members)?;
    write_manifest(
        &args.out,
        "mqi",
        Some(graph.structure_hash()),
        None,
        json!({ "graph": args.graph.display().to_string(), "side": args.side, "iterations": outcome.iterations }),
    )?;
    println!(
        "refined to {} nodes in {} rounds, conductance {}",
        outcome.cluster.size(),
        outcome.iterations,
        fmt_f64(outcome.cluster.conductance)
    );
    Ok(())
}

fn cmd_verify_reg(args: VerifyRegArgs) -> Result<()> {
    let graph = load_graph(&args.graph, &args.out)?;
    let graph_id = args
        .graph
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_else(|| "graph".into());
    let t_grid = parse_f64_list(&args.t_grid)?;
    let gamma_grid = parse_f64_list(&args.gamma_grid)?;
    let steps_grid = parse_usize_list(&args.steps_grid)?;
    if args.p_count < 2 || !(args.p_min > 1.0) || !(args.p_max > args.p_min) {
        return Err(Error::InvalidParameter("bad p grid".into()));
    }
    let p_grid: Vec<f64> = (0..args.p_count)
        .map(|i| args.p_min + (args.p_max - args.p_min) * i as f64 / (args.p_count - 1) as f64)
        .collect();

    let mut text = String::from(EquivalenceReport::csv_header());
    text.push('\n');
    let mut max_pass_gap: f64 = 0.0;
    for &t in &t_grid {
        let report = verify_equivalence(
            &graph,
            &graph_id,
            &DiffusionKind::HeatKernel { t },
            &RegularizerFamily::GeneralizedEntropy,
        )?;
        max_pass_gap = max_pass_gap.max(report.frobenius_gap);
        text.push_str(&report.to_csv_row());
        text.push('\n');
    }
    for &gamma in &gamma_grid {
        let report = verify_equivalence(
            &graph,
            &graph_id,
            &DiffusionKind::PageRank { gamma },
            &RegularizerFamily::LogDet,
        )?;
        max_pass_gap = max_pass_gap.max(report.frobenius_gap);
        text.push_str(&report.to_csv_row());
        text.push('\n');
    }
    for &steps in &steps_grid {
        // The exact p for the lazy walk is an open question, so these rows
        // report a best fit over the p grid instead of a pass/fail gap.
        let fit = pnorm_fit(&graph, args.alpha, steps, &p_grid)?;
        let best = fit.best();
        let mut report = verify_equivalence(
            &graph,
            &graph_id,
            &DiffusionKind::LazyWalk { alpha: args.alpha, steps },
            &RegularizerFamily::PNorm { p: best.p },
        )?;
        report.regularizer = format!("pnorm_best_fit;p={}", fmt_f64(best.p));
        text.push_str(&report.to_csv_row());
        text.push('\n');
    }
    fs::write(&args.out, text)?;
    write_manifest(
        &args.out,
        "verify-reg",
        Some(graph.structure_hash()),
        None,
        json!({
            "graph": args.graph.display().to_string(),
            "t_grid": args.t_grid,
            "gamma_grid": args.gamma_grid,
            "alpha": args.alpha,
            "steps_grid": args.steps_grid,
            "p_grid": format!("{}..{}x{}", args.p_min, args.p_max, args.p_count),
        }),
    )?;
    println!("max gap over pass/fail rows: {}", fmt_f64(max_pass_gap));
    Ok(())
}

fn cmd_scatter(args: ScatterArgs) -> Result<()> {
    let graph = load_graph(&args.graph, &args.out)?;
    let mut methods = Vec::new();
    for tok in args.methods.split(',') {
        methods.push(match tok.trim() {
            "spectral" => ScatterMethod::SpectralLocal,
            "flow" => ScatterMethod::Flow,
            other => {
                return Err(Error::InvalidParameter(format!("unknown method `{other}`")))
            }
        });
    }
    let config = ScatterConfig {
        trials: args.trials,
        seed: args.seed,
        gamma: args.gamma,
        epsilon: args.epsilon,
        methods,
    };
    let outcome = run_scatter(&graph, &config)?;
    let mut text = String::from(SCATTER_HEADER);
    text.push('\n');
    for row in &outcome.rows {
        text.push_str(&row.to_csv_row());
        text.push('\n');
    }
    fs::write(&args.out, text)?;
    let mut summary = String::from(SUMMARY_HEADER);
    summary.push('\n');
    for s in &outcome.summaries {
        summary.push_str(&s.to_csv_row());
        summary.push('\n');
    }
    let mut name = args.out.file_name().unwrap_or_default().to_os_string();
    name.push(".summary.csv");
    fs::write(args.out.with_file_name(name), summary)?;
    write_manifest(
        &args.out,
        "scatter",
        Some(graph.structure_hash()),
        Some(args.seed),
        json!({
            "graph": args.graph.display().to_string(),
            "trials": args.trials,
            "gamma": args.gamma,
            "epsilon": args.epsilon,
            "methods": args.methods,
        }),
    )?;
    for s in &outcome.summaries {
        println!(
            "{}: {} valid trials, median conductance {}",
            s.method,
            s.valid_trials,
            fmt_f64(s.median_conductance.unwrap_or(f64::NAN))
        );
    }
    Ok(())
}

fn cmd_cheeger_suite(args: CheegerArgs) -> Result<()> {
    let suite = cheeger_suite(args.seed);
    let mut text = String::from("graph_id,n,lambda2,lower,best_conductance,upper,ok\n");
    let mut violations = 0usize;
    for (id, graph) in &suite {
        let (profile, lambda2) = spectral_partition(graph, EigenSolver::Dense)?;
        let phi = profile.best_cluster.conductance;
        let lower = lambda2 / 2.0;
        let upper = (2.0 * lambda2).sqrt();
        let ok = lower <= phi + 1e-12 && phi <= upper + 1e-12;
        if !ok {
            violations += 1;
        }
        text.push_str(&format!(
            "{id},{},{},{},{},{},{}\n",
            graph.n(),
            fmt_f64(lambda2),
            fmt_f64(lower),
            fmt_f64(phi),
            fmt_f64(upper),
            u8::from(ok)
        ));
    }
    fs::write(&args.out, text)?;
    write_manifest(&args.out, "cheeger-suite", None, Some(args.seed), json!({}))?;
    println!("{} graphs, {} violations", suite.len(), violations);
    Ok(())
}
