use std::fmt;
use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use serde::Serialize;

use maxoutprobe::community::{detect_communities, modularity};
use maxoutprobe::estimators::{estimate_probe_based, DEFAULT_ESTIMATION_PROBES};
use maxoutprobe::generators::{self, AffiliationParams};
use maxoutprobe::graph::{count_triangles_wedges, global_clustering, load_edge_list, local_clustering};
use maxoutprobe::harness::{
    self, apply_strategy, budget_for, improvement_curves, summarize, KnownSample, StrategyConfig, SweepGrid,
    DEFAULT_BUDGET_FRACTIONS,
};
use maxoutprobe::rng::{derive_seed, stream};
use maxoutprobe::sampling::DEFAULT_EDGE_FRACTION;
use maxoutprobe::{
    Adjacency, CompleteGraph, EstimateReport, LoadReport, ObservedGraph, Phase, ProbeLedger, SamplerKind, SamplerSpec,
    StrategyKind, TriangleWedgeCounts,
};

mod manifest;

use manifest::RunManifest;

#[derive(Parser, Debug)]
#[command(name = "maxoutprobe", version, about = "Budgeted probing of incomplete networks")]
struct Cli {
    /// Worker threads for parallel work; 0 uses one per core.
    #[arg(long, global = true, env = "MAXOUTPROBE_THREADS", default_value_t = 0)]
    threads: usize,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Draw an incomplete observation from a complete graph.
    Sample(SampleArgs),
    /// Spend a probing budget on an observation with one strategy.
    Probe(ProbeArgs),
    /// Estimate the degree multiplier and wedge closure of an observation.
    Estimate(EstimateArgs),
    /// Run the full sampler x strategy x budget experiment grid.
    Sweep(SweepArgs),
    /// Structural statistics of a graph and, optionally, an observation of it.
    Stats(StatsArgs),
    /// Write a synthetic graph as an edge list.
    Generate(GenerateArgs),
    /// Check that the files listed in a manifest are unchanged.
    Verify(VerifyArgs),
}

#[derive(Args, Debug, Serialize)]
struct SampleArgs {
    /// Complete graph edge list.
    #[arg(long, short)]
    graph: PathBuf,
    /// randnode, randedge, rw, rwj or nodefrac.
    #[arg(long, value_parser = parse_sampler)]
    sampler: SamplerKind,
    /// Target edge fraction; the node selection probability for nodefrac.
    #[arg(long, default_value_t = 0.1)]
    fraction: f64,
    /// Jump probability of the rwj sampler.
    #[arg(long, default_value_t = 0.15)]
    jump: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Where to write the observation.
    #[arg(long, short)]
    out: PathBuf,
    /// Manifest path [default: <out>.manifest.json].
    #[arg(long)]
    manifest: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
struct KnownArgs {
    /// Use closed-form estimators for an observation drawn by this sampler
    /// (randnode, nodefrac or randedge).
    #[arg(long, value_parser = parse_sampler)]
    known_sampler: Option<SamplerKind>,
    /// Node selection fraction of a known node sample.
    #[arg(long, requires = "known_sampler")]
    f_n: Option<f64>,
    /// Edge fraction of a known edge sample.
    #[arg(long, requires = "known_sampler")]
    f_e: Option<f64>,
}

impl KnownArgs {
    fn resolve(&self) -> Result<Option<KnownSample>> {
        let Some(kind) = self.known_sampler else { return Ok(None) };
        let known = match kind {
            SamplerKind::RandNode | SamplerKind::NodeFraction => {
                KnownSample::Node(self.f_n.ok_or_else(|| usage(format!("--known-sampler {kind} needs --f-n")))?)
            }
            SamplerKind::RandEdge => {
                KnownSample::Edge(self.f_e.ok_or_else(|| usage(format!("--known-sampler {kind} needs --f-e")))?)
            }
            SamplerKind::RandWalk | SamplerKind::RandWalkJump => {
                return Err(usage(format!("sampler {kind} has no closed-form estimators")).into())
            }
        };
        Ok(Some(known))
    }
}

#[derive(Args, Debug, Serialize)]
struct EstimationArgs {
    /// Estimation probes requested by the out-degree strategy.
    #[arg(long, default_value_t = DEFAULT_ESTIMATION_PROBES)]
    est_probes: usize,
    /// Do not charge estimation probes against the budget.
    #[arg(long)]
    uncharged_estimation: bool,
}

#[derive(Args, Debug, Serialize)]
#[group(id = "budget_choice", required = true, multiple = false)]
struct BudgetArgs {
    /// Number of probes.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    budget: Option<u64>,
    /// Budget as a fraction of the complete graph's nodes, floored.
    #[arg(long)]
    budget_frac: Option<f64>,
}

#[derive(Args, Debug, Serialize)]
struct ProbeArgs {
    #[arg(long, short)]
    graph: PathBuf,
    /// Observation written by `sample`.
    #[arg(long)]
    observed: PathBuf,
    #[arg(long, value_parser = parse_strategy)]
    strategy: StrategyKind,
    #[command(flatten)]
    budget: BudgetArgs,
    #[command(flatten)]
    known: KnownArgs,
    #[command(flatten)]
    estimation: EstimationArgs,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Where to write the augmented observation.
    #[arg(long, short)]
    out: PathBuf,
    /// Probe log CSV [default: <out>.probes.csv].
    #[arg(long)]
    log: Option<PathBuf>,
    /// Manifest path [default: <out>.manifest.json].
    #[arg(long)]
    manifest: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
struct EstimateArgs {
    #[arg(long, short)]
    graph: PathBuf,
    #[arg(long)]
    observed: PathBuf,
    #[command(flatten)]
    known: KnownArgs,
    /// Estimation probes when no known sampler is given.
    #[arg(long, default_value_t = DEFAULT_ESTIMATION_PROBES)]
    est_probes: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Also write the observation augmented by the estimation probes.
    #[arg(long, short)]
    out: Option<PathBuf>,
    /// Probe log CSV [default: <out>.probes.csv].
    #[arg(long, requires = "out")]
    log: Option<PathBuf>,
    /// Manifest path [default: <out>.manifest.json].
    #[arg(long, requires = "out")]
    manifest: Option<PathBuf>,
}

#[derive(Args, Debug, Serialize)]
struct SweepArgs {
    /// Complete graph edge lists; repeat for several graphs.
    #[arg(long, short, required = true)]
    graph: Vec<PathBuf>,
    #[arg(long, value_delimiter = ',', value_parser = parse_sampler, default_values_t = SamplerKind::ALL.to_vec())]
    samplers: Vec<SamplerKind>,
    #[arg(long, value_delimiter = ',', value_parser = parse_strategy, default_values_t = StrategyKind::ALL.to_vec())]
    strategies: Vec<StrategyKind>,
    /// Budget fractions of |V|.
    #[arg(long, value_delimiter = ',', default_values_t = DEFAULT_BUDGET_FRACTIONS.to_vec())]
    budgets: Vec<f64>,
    #[arg(long, default_value_t = DEFAULT_EDGE_FRACTION)]
    edge_fraction: f64,
    #[arg(long, default_value_t = harness::DEFAULT_REPEATS)]
    repeats: usize,
    #[arg(long, default_value_t = 0.15)]
    jump: f64,
    #[command(flatten)]
    estimation: EstimationArgs,
    /// Use closed-form estimators for random node and random edge samples.
    #[arg(long)]
    known_sample: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Directory for the result, curve and summary CSVs and the manifest.
    #[arg(long, short)]
    out_dir: PathBuf,
}

#[derive(Args, Debug, Serialize)]
struct StatsArgs {
    #[arg(long, short)]
    graph: PathBuf,
    #[arg(long)]
    observed: Option<PathBuf>,
    /// Also detect communities and report their modularity.
    #[arg(long)]
    communities: bool,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args, Debug, Serialize)]
struct GenerateArgs {
    #[command(subcommand)]
    model: Model,
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    /// Where to write the edge list.
    #[arg(long, short, global = true)]
    out: Option<PathBuf>,
    /// Manifest path [default: <out>.manifest.json].
    #[arg(long, global = true)]
    manifest: Option<PathBuf>,
}

#[derive(Subcommand, Debug, Serialize)]
enum Model {
    /// G(n, p).
    Er {
        #[arg(long)]
        nodes: usize,
        #[arg(long)]
        p: f64,
    },
    /// Equal-sized dense blocks with sparse links between them.
    Planted {
        #[arg(long)]
        blocks: usize,
        #[arg(long)]
        block_size: usize,
        #[arg(long)]
        p_in: f64,
        #[arg(long)]
        p_out: f64,
    },
    /// Preferential attachment with triangle closure.
    Powerlaw {
        #[arg(long)]
        nodes: usize,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        p_triangle: f64,
    },
    /// Overlapping near-cliques with heavy-tailed sizes and memberships.
    Affiliation {
        #[arg(long, default_value_t = AffiliationParams::default().nodes)]
        nodes: usize,
        #[arg(long, default_value_t = AffiliationParams::default().mean_memberships)]
        memberships: f64,
        #[arg(long, default_value_t = AffiliationParams::default().min_group)]
        min_group: usize,
        #[arg(long, default_value_t = AffiliationParams::default().max_group)]
        max_group: usize,
        #[arg(long, default_value_t = AffiliationParams::default().size_exponent)]
        size_exponent: f64,
        #[arg(long, default_value_t = AffiliationParams::default().activity_exponent)]
        activity_exponent: f64,
        #[arg(long, default_value_t = AffiliationParams::default().p_keep)]
        p_keep: f64,
    },
    /// Random bipartite graph; triangle free.
    Bipartite {
        #[arg(long)]
        left: usize,
        #[arg(long)]
        right: usize,
        #[arg(long)]
        p: f64,
    },
}

#[derive(Args, Debug)]
struct VerifyArgs {
    manifest: PathBuf,
}

/// Bad input from the user rather than a failure while running.
#[derive(Debug)]
struct UsageError(String);

impl fmt::Display for UsageError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

fn usage(msg: impl Into<String>) -> UsageError {
    UsageError(msg.into())
}

fn parse_sampler(s: &str) -> Result<SamplerKind, String> {
    s.parse().map_err(|e: maxoutprobe::Error| e.to_string())
}

fn parse_strategy(s: &str) -> Result<StrategyKind, String> {
    s.parse().map_err(|e: maxoutprobe::Error| e.to_string())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}

fn exit_code(e: &anyhow::Error) -> u8 {
    let is_usage = e.chain().any(|cause| {
        cause.is::<UsageError>() || matches!(cause.downcast_ref(), Some(maxoutprobe::Error::InvalidArgument(_)))
    });
    if is_usage {
        1
    } else {
        2
    }
}

fn run(cli: Cli) -> Result<()> {
    if cli.threads > 0 {
        rayon::ThreadPoolBuilder::new()
            .num_threads(cli.threads)
            .build_global()
            .context("configuring the thread pool")?;
    }
    match cli.command {
        Command::Sample(args) => cmd_sample(&args),
        Command::Probe(args) => cmd_probe(&args),
        Command::Estimate(args) => cmd_estimate(&args),
        Command::Sweep(args) => cmd_sweep(&args),
        Command::Stats(args) => cmd_stats(&args),
        Command::Generate(args) => cmd_generate(&args),
        Command::Verify(args) => cmd_verify(&args),
    }
}

fn load_graph(path: &Path) -> Result<(CompleteGraph, LoadReport)> {
    let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    load_edge_list(BufReader::new(file)).with_context(|| format!("loading {}", path.display()))
}

fn load_observed(path: &Path, g: &CompleteGraph) -> Result<ObservedGraph> {
    let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    ObservedGraph::read_from(BufReader::new(file), g).with_context(|| format!("loading {}", path.display()))
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    }
    let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    Ok(BufWriter::new(file))
}

fn write_observed(obs: &ObservedGraph, path: &Path) -> Result<()> {
    let mut w = create(path)?;
    obs.write_to(&mut w)?;
    w.flush()?;
    Ok(())
}

fn write_log(ledger: &ProbeLedger, g: &CompleteGraph, path: &Path) -> Result<()> {
    let mut w = create(path)?;
    ledger.write_csv(g.labels(), &mut w)?;
    w.flush()?;
    Ok(())
}

fn sibling(path: &Path, suffix: &str) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(suffix);
    PathBuf::from(s)
}

fn print_json(value: &impl Serialize) -> Result<()> {
    let mut out = std::io::stdout().lock();
    serde_json::to_writer_pretty(&mut out, value)?;
    writeln!(out)?;
    Ok(())
}

#[derive(Serialize)]
struct ObservationSummary {
    nodes: usize,
    edges: usize,
    explored: usize,
    candidates: usize,
    node_fraction: f64,
    edge_fraction: f64,
}

impl ObservationSummary {
    fn of(obs: &ObservedGraph, g: &CompleteGraph) -> Self {
        ObservationSummary {
            nodes: obs.node_count(),
            edges: obs.edge_count(),
            explored: obs.explored_count(),
            candidates: obs.candidates().len(),
            node_fraction: obs.node_count() as f64 / g.node_count() as f64,
            edge_fraction: obs.edge_count() as f64 / g.edge_count() as f64,
        }
    }
}

fn cmd_sample(args: &SampleArgs) -> Result<()> {
    let (g, _) = load_graph(&args.graph)?;
    let spec = SamplerSpec { kind: args.sampler, jump_prob: args.jump };
    let seed = harness::sampler_seed(args.seed, args.sampler, 0);
    let (obs, fractions) = spec.sample(&g, args.fraction, seed)?;
    write_observed(&obs, &args.out)?;

    let mut m = RunManifest::new("sample", args, args.seed)?;
    m.input(&args.graph)?;
    m.output(&args.out)?;
    m.write(&args.manifest.clone().unwrap_or_else(|| sibling(&args.out, ".manifest.json")))?;

    #[derive(Serialize)]
    struct Report {
        sampler: &'static str,
        node_selection_fraction: Option<f64>,
        #[serde(flatten)]
        observation: ObservationSummary,
    }
    print_json(&Report {
        sampler: args.sampler.name(),
        node_selection_fraction: fractions.node_fraction,
        observation: ObservationSummary::of(&obs, &g),
    })
}

fn strategy_config(kind: StrategyKind, est: &EstimationArgs, use_known_sample: bool) -> StrategyConfig {
    let mut cfg = StrategyConfig::new(kind);
    cfg.estimation_probes = est.est_probes;
    cfg.charge_estimation = !est.uncharged_estimation;
    cfg.use_known_sample = use_known_sample;
    cfg
}

fn cmd_probe(args: &ProbeArgs) -> Result<()> {
    let (g, _) = load_graph(&args.graph)?;
    let mut obs = load_observed(&args.observed, &g)?;
    let b = match (args.budget.budget, args.budget.budget_frac) {
        (Some(b), _) => b as usize,
        (None, Some(f)) => budget_for(&g, f)?,
        (None, None) => unreachable!("clap requires one budget flag"),
    };
    let known = args.known.resolve()?;
    let config = strategy_config(args.strategy, &args.estimation, known.is_some());
    if obs.candidates().is_empty() {
        return Err(maxoutprobe::Error::NoCandidates.into());
    }
    let before = ObservationSummary::of(&obs, &g);
    let seed = derive_seed(args.seed, &format!("strategy/{}", args.strategy.name()), &[]);
    let run = apply_strategy(&g, &mut obs, b, &config, known, seed)?;

    let log = args.log.clone().unwrap_or_else(|| sibling(&args.out, ".probes.csv"));
    write_observed(&obs, &args.out)?;
    write_log(&run.ledger, &g, &log)?;

    let mut m = RunManifest::new("probe", args, args.seed)?;
    m.input(&args.graph)?;
    m.input(&args.observed)?;
    m.output(&args.out)?;
    m.output(&log)?;
    m.write(&args.manifest.clone().unwrap_or_else(|| sibling(&args.out, ".manifest.json")))?;

    #[derive(Serialize)]
    struct Report {
        strategy: &'static str,
        budget: usize,
        probes_spent: usize,
        estimation_probes: usize,
        selection_probes: usize,
        estimate: Option<EstimateReport>,
        before: ObservationSummary,
        after: ObservationSummary,
    }
    print_json(&Report {
        strategy: args.strategy.name(),
        budget: run.ledger.budget(),
        probes_spent: run.ledger.spent(),
        estimation_probes: run.ledger.spent_in(Phase::Estimation),
        selection_probes: run.ledger.spent_in(Phase::Selection),
        estimate: run.estimate.map(|e| e.report()),
        before,
        after: ObservationSummary::of(&obs, &g),
    })
}

fn cmd_estimate(args: &EstimateArgs) -> Result<()> {
    let (g, _) = load_graph(&args.graph)?;
    let mut obs = load_observed(&args.observed, &g)?;

    #[derive(Serialize)]
    struct ProbeDetail<'a> {
        node: &'a str,
        observed_degree: usize,
        true_degree: usize,
        open_wedges: usize,
        closed: usize,
    }
    #[derive(Serialize)]
    struct Report<'a> {
        #[serde(flatten)]
        estimate: EstimateReport,
        probes: Vec<ProbeDetail<'a>>,
    }

    let (estimate, probes, ledger) = match args.known.resolve()? {
        Some(known) => (known.estimate(&obs)?, Vec::new(), None),
        None => {
            if args.est_probes == 0 {
                return Err(usage("--est-probes must be at least 1").into());
            }
            let mut ledger = ProbeLedger::new(args.est_probes);
            let mut rng = stream(args.seed, "estimation", &[]);
            let (est, probes) = estimate_probe_based(&g, &mut obs, &mut ledger, args.est_probes, &mut rng)?;
            (est, probes, Some(ledger))
        }
    };

    if let Some(out) = &args.out {
        write_observed(&obs, out)?;
        let mut m = RunManifest::new("estimate", args, args.seed)?;
        m.input(&args.graph)?;
        m.input(&args.observed)?;
        m.output(out)?;
        if let Some(ledger) = &ledger {
            let log = args.log.clone().unwrap_or_else(|| sibling(out, ".probes.csv"));
            write_log(ledger, &g, &log)?;
            m.output(&log)?;
        }
        m.write(&args.manifest.clone().unwrap_or_else(|| sibling(out, ".manifest.json")))?;
    }

    print_json(&Report {
        estimate: estimate.report(),
        probes: probes
            .iter()
            .map(|p| ProbeDetail {
                node: g.label(p.node),
                observed_degree: p.observed_degree,
                true_degree: p.true_degree,
                open_wedges: p.wedge_partners.len(),
                closed: p.closed,
            })
            .collect(),
    })
}

fn cmd_sweep(args: &SweepArgs) -> Result<()> {
    if args.strategies.is_empty() {
        return Err(usage("--strategies must name at least one strategy").into());
    }
    if args.samplers.is_empty() || args.budgets.is_empty() {
        return Err(usage("--samplers and --budgets must not be empty").into());
    }
    let mut stems = Vec::new();
    for path in &args.graph {
        let stem = path
            .file_stem()
            .map(|s| s.to_string_lossy().into_owned())
            .ok_or_else(|| usage(format!("cannot name outputs after {}", path.display())))?;
        if stems.contains(&stem) {
            return Err(usage(format!("two graphs share the file stem `{stem}`")).into());
        }
        stems.push(stem);
    }
    let grid = SweepGrid {
        samplers: args.samplers.iter().map(|&kind| SamplerSpec { kind, jump_prob: args.jump }).collect(),
        strategies: args.strategies.iter().map(|&k| strategy_config(k, &args.estimation, args.known_sample)).collect(),
        budget_fractions: args.budgets.clone(),
        edge_fraction: args.edge_fraction,
        repeats: args.repeats,
        master_seed: args.seed,
    };

    fs::create_dir_all(&args.out_dir).with_context(|| format!("creating {}", args.out_dir.display()))?;
    let mut m = RunManifest::new("sweep", args, args.seed)?;
    let mut stdout = std::io::stdout().lock();
    writeln!(stdout, "graph\tstrategy\tauc\tmean_improvement")?;
    for (path, stem) in args.graph.iter().zip(&stems) {
        let (g, _) = load_graph(path)?;
        m.input(path)?;
        let rows = harness::sweep(&g, &grid)?;
        let summary = summarize(&rows);
        let curves = improvement_curves(&rows)?;

        let results = args.out_dir.join(format!("{stem}.results.csv"));
        let curves_path = args.out_dir.join(format!("{stem}.curves.csv"));
        let summary_path = args.out_dir.join(format!("{stem}.summary.csv"));
        let mut w = create(&results)?;
        harness::write_results_csv(&rows, &mut w)?;
        w.flush()?;
        let mut w = create(&curves_path)?;
        harness::write_curves_csv(&curves, &mut w)?;
        w.flush()?;
        let mut w = create(&summary_path)?;
        harness::write_summary_csv(&summary, &mut w)?;
        w.flush()?;
        for p in [&results, &curves_path, &summary_path] {
            m.output(p)?;
        }

        for (kind, curve) in &curves {
            let improvements: Vec<f64> =
                summary.iter().filter(|s| s.strategy == *kind).filter_map(|s| s.mean_improvement).collect();
            let mean = improvements.iter().sum::<f64>() / improvements.len().max(1) as f64;
            writeln!(stdout, "{stem}\t{kind}\t{:.4}\t{mean:.2}", curve.auc)?;
        }
    }
    m.write(&args.out_dir.join("manifest.json"))
}

fn cmd_stats(args: &StatsArgs) -> Result<()> {
    let (g, load) = load_graph(&args.graph)?;

    #[derive(Serialize)]
    struct Structure {
        nodes: usize,
        edges: usize,
        max_degree: usize,
        mean_degree: f64,
        #[serde(flatten)]
        counts: TriangleWedgeCounts,
        global_clustering: f64,
        average_clustering: f64,
    }
    #[derive(Serialize)]
    struct Communities {
        count: usize,
        modularity: f64,
    }
    #[derive(Serialize)]
    struct ObservedStats {
        origin: &'static str,
        #[serde(flatten)]
        summary: ObservationSummary,
        structure: Structure,
    }
    #[derive(Serialize)]
    struct Report {
        load: LoadReport,
        graph: Structure,
        communities: Option<Communities>,
        observed: Option<ObservedStats>,
    }

    fn structure<G: Adjacency>(g: &G) -> Result<Structure> {
        let n = g.node_count();
        let mut local = 0.0;
        let mut max_degree = 0;
        for u in g.nodes() {
            local += local_clustering(g, u)?;
            max_degree = max_degree.max(g.neighbors(u).len());
        }
        Ok(Structure {
            nodes: n,
            edges: g.edge_count(),
            max_degree,
            mean_degree: 2.0 * g.edge_count() as f64 / n.max(1) as f64,
            counts: count_triangles_wedges(g),
            global_clustering: global_clustering(g),
            average_clustering: local / n.max(1) as f64,
        })
    }

    let communities = args.communities.then(|| {
        let p = detect_communities(&g, args.seed);
        Communities { count: p.n_communities(), modularity: modularity(&g, &p) }
    });
    let observed = match &args.observed {
        Some(path) => {
            let obs = load_observed(path, &g)?;
            Some(ObservedStats {
                origin: obs.origin().name(),
                summary: ObservationSummary::of(&obs, &g),
                structure: structure(&obs)?,
            })
        }
        None => None,
    };
    print_json(&Report { load, graph: structure(&g)?, communities, observed })
}

fn cmd_generate(args: &GenerateArgs) -> Result<()> {
    let g = match args.model {
        Model::Er { nodes, p } => generators::erdos_renyi(nodes, p, args.seed)?,
        Model::Planted { blocks, block_size, p_in, p_out } => {
            generators::planted_partition(blocks, block_size, p_in, p_out, args.seed)?
        }
        Model::Powerlaw { nodes, m, p_triangle } => generators::powerlaw_cluster(nodes, m, p_triangle, args.seed)?,
        Model::Affiliation { nodes, memberships, min_group, max_group, size_exponent, activity_exponent, p_keep } => {
            let params = AffiliationParams {
                nodes,
                mean_memberships: memberships,
                min_group,
                max_group,
                size_exponent,
                activity_exponent,
                p_keep,
            };
            generators::affiliation(&params, args.seed)?
        }
        Model::Bipartite { left, right, p } => generators::random_bipartite(left, right, p, args.seed)?,
    };
    match &args.out {
        Some(out) => {
            let mut w = create(out)?;
            g.write_edge_list(&mut w)?;
            w.flush()?;
            let mut m = RunManifest::new("generate", args, args.seed)?;
            m.output(out)?;
            m.write(&args.manifest.clone().unwrap_or_else(|| sibling(out, ".manifest.json")))
        }
        None => {
            let mut out = std::io::stdout().lock();
            g.write_edge_list(&mut out)?;
            Ok(out.flush()?)
        }
    }
}

fn cmd_verify(args: &VerifyArgs) -> Result<()> {
    let m = RunManifest::read(&args.manifest)?;
    let problems = m.mismatches();
    if problems.is_empty() {
        println!("ok: {} files match", m.inputs.len() + m.outputs.len());
        Ok(())
    } else {
        anyhow::bail!("{}", problems.join("; "))
    }
}
