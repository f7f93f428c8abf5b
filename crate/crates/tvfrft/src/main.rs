use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;
use serde_json::{json, Map, Value};

use tvfrft::config::{BandSpec, ExperimentConfig};
use tvfrft::harness::{experiment_signal, noise_fields, run_bench, run_grid, run_sweep};
use tvfrft::io;
use tvfrft::plan::{PlanFile, ReportFile};
use tvfrft::table::{ResultTable, TableFormat};
use tvfrft_core::graph::{build_cycle_time_graph, cartesian_product};
use tvfrft_core::localized::localized_operator;
use tvfrft_core::reconstruct::{is_real, localized_recovery_operator, recovery_operator, reconstruct_direct, report, RecoveryPath};
use tvfrft_core::select::{greedy_select, random_plan, ObjectiveForm, SamplingProblem, SelectOptions, Strategy};
use tvfrft_core::spectral::{TransformFactory, MATERIALIZE_BUDGET};

#[derive(Parser)]
#[command(name = "tvfrft", version, about = "Sampling and reconstruction of time-vertex signals in joint fractional Fourier domains")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Graph construction.
    #[command(subcommand)]
    Graph(GraphCommand),
    /// Apply the joint fractional transform to a signal, or export its matrix.
    Transform(TransformArgs),
    /// Select a sampling set and write it as a plan.
    Select(SelectArgs),
    /// Reconstruct a signal from the samples named by a plan.
    Reconstruct(ReconstructArgs),
    /// NMSE against sample count for several strategies.
    Sweep(ExperimentArgs),
    /// Runtime and NMSE across vertex counts.
    Bench(BenchArgs),
    /// Coarse-then-fine search over the transform orders.
    Grid(GridArgs),
}

#[derive(Subcommand)]
enum GraphCommand {
    /// Build a graph and write its edge list.
    Build(GraphBuildArgs),
}

#[derive(Args)]
struct Common {
    /// JSON config; its fields override the matching flags.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    /// Output file; standard output when absent.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = TableFormat::Csv)]
    format: TableFormat,
}

#[derive(Args)]
struct GraphFlags {
    /// Edge-list CSV with header `src,dst,weight`.
    #[arg(long, conflicts_with_all = ["points", "cycle"])]
    edges: Option<PathBuf>,
    /// Point-cloud CSV with header `x1,...,xd`, joined by a Gaussian kernel.
    #[arg(long, conflicts_with = "cycle")]
    points: Option<PathBuf>,
    /// Cycle graph on this many vertices.
    #[arg(long)]
    cycle: Option<usize>,
    /// Vertex count of an edge list with trailing isolated vertices.
    #[arg(long)]
    vertices: Option<usize>,
    #[arg(long)]
    directed: bool,
    /// Weights below this value are dropped from kernel graphs.
    #[arg(long)]
    threshold: Option<f64>,
}

impl GraphFlags {
    fn spec(&self, kernel_width: Option<f64>) -> Result<Option<Value>> {
        Ok(if let Some(path) = &self.edges {
            Some(json!({"type": "edges", "path": path, "vertices": self.vertices, "directed": self.directed}))
        } else if let Some(path) = &self.points {
            let Some(width) = kernel_width else { bail!("a point-cloud graph needs a kernel width") };
            Some(json!({"type": "points", "path": path, "kernel_width": width, "threshold": self.threshold.unwrap_or(0.0)}))
        } else {
            self.cycle.map(|n| json!({"type": "cycle", "vertices": n, "directed": self.directed}))
        })
    }
}

#[derive(Args)]
struct ModelFlags {
    /// Width of the Gaussian kernel joining point-cloud vertices.
    #[arg(long)]
    kernel_width: Option<f64>,
    /// adjacency, laplacian, normalized_laplacian or normalized_adjacency.
    #[arg(long)]
    shift: Option<String>,
    /// Number of time instants.
    #[arg(long)]
    times: Option<usize>,
    /// Fractional order of the time transform.
    #[arg(long, allow_hyphen_values = true)]
    alpha: Option<f64>,
    /// Fractional order of the graph transform.
    #[arg(long, allow_hyphen_values = true)]
    beta: Option<f64>,
    /// Lowest time frequencies in the band.
    #[arg(long)]
    k_t: Option<usize>,
    /// Lowest graph frequencies in the band.
    #[arg(long)]
    k_g: Option<usize>,
    /// Spectral kernel of the localized operator: ideal or exponential.
    #[arg(long)]
    kernel: Option<String>,
}

#[derive(Args)]
struct GraphBuildArgs {
    #[command(flatten)]
    common: Common,
    #[command(flatten)]
    graph: GraphFlags,
    /// Width of the Gaussian kernel joining point-cloud vertices.
    #[arg(long)]
    sigma: Option<f64>,
    /// Take the Cartesian product with an undirected cycle of this length.
    #[arg(long)]
    product_times: Option<usize>,
}

#[derive(Args)]
struct TransformArgs {
    #[command(flatten)]
    common: Common,
    #[command(flatten)]
    graph: GraphFlags,
    #[command(flatten)]
    model: ModelFlags,
    /// N × T signal CSV to transform.
    #[arg(long)]
    signal: Option<PathBuf>,
    /// Apply the inverse transform instead.
    #[arg(long)]
    inverse: bool,
    /// Write the materialized NT × NT transform matrix here.
    #[arg(long)]
    dump_transform: Option<PathBuf>,
}

#[derive(Args)]
struct SelectArgs {
    #[command(flatten)]
    common: Common,
    #[command(flatten)]
    graph: GraphFlags,
    #[command(flatten)]
    model: ModelFlags,
    /// maxsigmin, mintrac, minpinv, maxsig, maxvol or random.
    #[arg(long, default_value = "minpinv")]
    strategy: String,
    /// direct or localized.
    #[arg(long)]
    form: Option<String>,
    /// Number of samples.
    #[arg(long)]
    m: usize,
    /// Evaluate every candidate from the literal matrices.
    #[arg(long)]
    recompute: bool,
}

#[derive(Args)]
struct ReconstructArgs {
    #[command(flatten)]
    common: Common,
    #[command(flatten)]
    graph: GraphFlags,
    #[command(flatten)]
    model: ModelFlags,
    /// Plan written by `select`; fixes the orders and the band.
    #[arg(long)]
    plan: PathBuf,
    /// Reference signal; a seeded bandlimited signal when absent.
    #[arg(long)]
    signal: Option<PathBuf>,
    /// Standard deviation of the noise added to the samples.
    #[arg(long)]
    sigma: Option<f64>,
    /// direct or localized.
    #[arg(long)]
    path: Option<String>,
    /// Write the reconstructed signal here.
    #[arg(long)]
    estimate: Option<PathBuf>,
}

#[derive(Args)]
struct ExperimentArgs {
    #[command(flatten)]
    common: Common,
    #[command(flatten)]
    graph: GraphFlags,
    #[command(flatten)]
    model: ModelFlags,
    /// Comma-separated strategy names.
    #[arg(long, value_delimiter = ',')]
    strategies: Option<Vec<String>>,
    #[arg(long)]
    form: Option<String>,
    #[arg(long)]
    path: Option<String>,
    /// Comma-separated sample counts.
    #[arg(long, value_delimiter = ',')]
    samples: Option<Vec<usize>>,
    #[arg(long)]
    sigma: Option<f64>,
    #[arg(long)]
    trials: Option<usize>,
    /// Signal CSV used instead of a synthetic signal.
    #[arg(long)]
    signal: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    #[command(flatten)]
    experiment: ExperimentArgs,
    /// Comma-separated vertex counts.
    #[arg(long, value_delimiter = ',')]
    vertex_counts: Option<Vec<usize>>,
}

#[derive(Args)]
struct GridArgs {
    #[command(flatten)]
    experiment: ExperimentArgs,
    /// Strategy used in every cell.
    #[arg(long)]
    grid_strategy: Option<String>,
    /// Parallel cell evaluations; all cores when absent.
    #[arg(long)]
    workers: Option<usize>,
}

fn put<T: Serialize>(map: &mut Map<String, Value>, key: &str, value: Option<T>) {
    if let Some(v) = value {
        map.insert(key.to_string(), serde_json::to_value(v).expect("flag values serialize"));
    }
}

fn common_flags(common: &Common, graph: Option<Value>) -> Map<String, Value> {
    let mut m = Map::new();
    put(&mut m, "seed", common.seed);
    put(&mut m, "output", common.out.as_ref());
    put(&mut m, "graph", graph);
    m
}

fn model_flags(m: &mut Map<String, Value>, model: &ModelFlags) {
    put(m, "shift", model.shift.as_ref());
    put(m, "times", model.times);
    put(m, "alpha", model.alpha);
    put(m, "beta", model.beta);
    put(m, "kernel", model.kernel.as_ref());
    if model.k_t.is_some() || model.k_g.is_some() {
        let (dt, dg) = match ExperimentConfig::default().band {
            BandSpec::Lowest { k_t, k_g } => (k_t, k_g),
            _ => unreachable!("the default band is a lowest band"),
        };
        put(m, "band", Some(json!({"k_t": model.k_t.unwrap_or(dt), "k_g": model.k_g.unwrap_or(dg)})));
    }
}

fn experiment_flags(args: &ExperimentArgs) -> Result<Map<String, Value>> {
    let mut m = common_flags(&args.common, args.graph.spec(args.model.kernel_width)?);
    model_flags(&mut m, &args.model);
    put(&mut m, "strategies", args.strategies.as_ref());
    put(&mut m, "form", args.form.as_ref());
    put(&mut m, "path", args.path.as_ref());
    put(&mut m, "sample_counts", args.samples.as_ref());
    put(&mut m, "sigma", args.sigma);
    put(&mut m, "trials", args.trials);
    put(&mut m, "signal", args.signal.as_ref());
    Ok(m)
}

fn emit(text: &str, out: Option<&Path>) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text).with_context(|| format!("writing {}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn emit_table(table: &ResultTable, cfg: &ExperimentConfig, format: TableFormat) -> Result<()> {
    emit(&table.render(format), cfg.output.as_deref())
}

fn graph_build(args: &GraphBuildArgs) -> Result<()> {
    let flags = common_flags(&args.common, args.graph.spec(args.sigma)?);
    let cfg = ExperimentConfig::resolve(flags, args.common.config.as_deref())?;
    let mut graph = cfg.graph_spec()?.build()?;
    if let Some(t) = args.product_times {
        graph = cartesian_product(&build_cycle_time_graph(t, false)?, &graph)?;
    }
    match args.common.format {
        TableFormat::Csv => match &cfg.output {
            Some(path) => io::write_edges(path, &graph)?,
            None => print!("{}", io::edges_csv(&graph)),
        },
        TableFormat::Json => {
            let edges: Vec<Value> = graph.edges.iter().map(|e| json!({"src": e.src, "dst": e.dst, "weight": e.weight.re})).collect();
            let doc = json!({"vertices": graph.num_vertices, "directed": graph.directed, "edges": edges});
            emit(&serde_json::to_string_pretty(&doc)?, cfg.output.as_deref())?;
        }
    }
    Ok(())
}

fn factory(cfg: &ExperimentConfig) -> Result<TransformFactory> {
    Ok(TransformFactory::new(cfg.times, &cfg.vertex_shift()?, cfg.convention.into())?)
}

fn transform(args: &TransformArgs) -> Result<()> {
    let mut flags = common_flags(&args.common, args.graph.spec(args.model.kernel_width)?);
    model_flags(&mut flags, &args.model);
    let cfg = ExperimentConfig::resolve(flags, args.common.config.as_deref())?;
    let joint = factory(&cfg)?.joint(cfg.alpha, cfg.beta)?;
    let joint = if args.inverse { joint.inverse() } else { joint };
    if let Some(path) = &args.dump_transform {
        io::write_matrix(path, &joint.matrix(MATERIALIZE_BUDGET)?)?;
    }
    if let Some(path) = &args.signal {
        let x = io::read_signal(path)?;
        let y = joint.apply(&x)?;
        match &cfg.output {
            Some(out) => io::write_signal(out, &y)?,
            None => {
                for i in 0..y.data.nrows() {
                    let row: Vec<String> = (0..y.data.ncols()).map(|j| io::format_complex(y.data[(i, j)])).collect();
                    println!("{}", row.join(","));
                }
            }
        }
    } else if args.dump_transform.is_none() {
        bail!("nothing to do: give --signal or --dump-transform");
    }
    Ok(())
}

fn problem_for(cfg: &ExperimentConfig, alpha: f64, beta: f64) -> Result<SamplingProblem> {
    let joint = factory(cfg)?.joint(alpha, beta)?;
    let band = cfg.band.build(joint.n_vertices, joint.n_times)?;
    let mut problem = SamplingProblem::new(&joint, &band)?;
    if cfg.kernel != tvfrft::config::KernelSpec::Ideal {
        problem = problem.with_localized(localized_operator(&joint, &cfg.kernel.values(&band), &band, MATERIALIZE_BUDGET)?);
    }
    Ok(problem)
}

fn select(args: &SelectArgs) -> Result<()> {
    let mut flags = common_flags(&args.common, args.graph.spec(args.model.kernel_width)?);
    model_flags(&mut flags, &args.model);
    put(&mut flags, "form", args.form.as_ref());
    let cfg = ExperimentConfig::resolve(flags, args.common.config.as_deref())?;
    let strategy = Strategy::parse(&args.strategy).with_context(|| format!("unknown strategy `{}`", args.strategy))?;
    let problem = problem_for(&cfg, cfg.alpha, cfg.beta)?;
    let plan = if strategy == Strategy::Random {
        random_plan(&problem, args.m, cfg.seed)?
    } else {
        greedy_select(strategy, cfg.form, &problem, args.m, &SelectOptions { recompute: args.recompute })?
    };
    emit(&serde_json::to_string_pretty(&PlanFile::from(&plan))?, cfg.output.as_deref())
}

fn reconstruct(args: &ReconstructArgs) -> Result<()> {
    let mut flags = common_flags(&args.common, args.graph.spec(args.model.kernel_width)?);
    model_flags(&mut flags, &args.model);
    put(&mut flags, "sigma", args.sigma);
    put(&mut flags, "path", args.path.as_ref());
    put(&mut flags, "signal", args.signal.as_ref());
    let mut cfg = ExperimentConfig::resolve(flags, args.common.config.as_deref())?;
    let text = std::fs::read_to_string(&args.plan).with_context(|| format!("reading {}", args.plan.display()))?;
    let plan: PlanFile = serde_json::from_str(&text).with_context(|| format!("parsing {}", args.plan.display()))?;
    if !(ObjectiveForm::parse(&plan.form).is_some() && Strategy::parse(&plan.strategy).is_some()) {
        bail!("{}: unknown strategy or form", args.plan.display());
    }
    cfg.alpha = plan.alpha;
    cfg.beta = plan.beta;
    cfg.band = BandSpec::Joint { f_j: plan.band.clone() };

    let problem = problem_for(&cfg, plan.alpha, plan.beta)?;
    let x = experiment_signal(&cfg, &problem.joint, &problem.band)?;
    let r = match cfg.path {
        RecoveryPath::Direct => recovery_operator(&problem, &plan.indices)?,
        RecoveryPath::Localized => {
            localized_recovery_operator(&*problem.localized_operator()?, &plan.indices, problem.joint.n_vertices, problem.joint.n_times)?
        }
    };
    let noise = noise_fields(cfg.seed, 1, problem.size(), cfg.sigma, !is_real(&x))?.remove(0);
    let samples: Vec<_> = plan.indices.iter().map(|&i| x.vec()[i] + noise[i]).collect();
    let y = reconstruct_direct(&samples, &r)?;
    if let Some(path) = &args.estimate {
        io::write_signal(path, &y)?;
    }
    let rep = report(&x, &y, &r, cfg.sigma)?;
    emit(&serde_json::to_string_pretty(&ReportFile::from(&rep))?, cfg.output.as_deref())
}

fn sweep(args: &ExperimentArgs) -> Result<()> {
    let cfg = ExperimentConfig::resolve(experiment_flags(args)?, args.common.config.as_deref())?;
    emit_table(&run_sweep(&cfg)?, &cfg, args.common.format)
}

fn bench(args: &BenchArgs) -> Result<()> {
    let e = &args.experiment;
    let mut flags = experiment_flags(e)?;
    if let Some(counts) = &args.vertex_counts {
        flags.insert("bench".into(), json!({ "vertex_counts": counts }));
    }
    let cfg = ExperimentConfig::resolve(flags, e.common.config.as_deref())?;
    emit_table(&run_bench(&cfg)?, &cfg, e.common.format)
}

fn grid(args: &GridArgs) -> Result<()> {
    let e = &args.experiment;
    let mut flags = experiment_flags(e)?;
    let mut g = Map::new();
    put(&mut g, "strategy", args.grid_strategy.as_ref());
    put(&mut g, "workers", args.workers);
    if !g.is_empty() {
        flags.insert("grid".into(), Value::Object(g));
    }
    let cfg = ExperimentConfig::resolve(flags, e.common.config.as_deref())?;
    let outcome = run_grid(&cfg)?;
    eprintln!(
        "best (alpha, beta) = ({}, {}), nmse {:e}; {} coarse + {} fine cells",
        outcome.best.alpha, outcome.best.beta, outcome.best.nmse_mean, outcome.coarse_cells, outcome.fine_cells
    );
    emit_table(&outcome.table, &cfg, e.common.format)
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Graph(GraphCommand::Build(a)) => graph_build(&a),
        Command::Transform(a) => transform(&a),
        Command::Select(a) => select(&a),
        Command::Reconstruct(a) => reconstruct(&a),
        Command::Sweep(a) => sweep(&a),
        Command::Bench(a) => bench(&a),
        Command::Grid(a) => grid(&a),
    }
}
