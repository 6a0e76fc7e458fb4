//! Command-line surface binding the laboratory's modules: evaluation,
//! exact counting, probabilistic evaluation, edge analysis, critical-model
//! search, the hard counting problems, reduction pipelines, gadget
//! builders, and the named verification suites.
//!
//! Exit codes: 0 success, 1 failed verification, 2 bad usage or bad input,
//! 3 enumeration cap exceeded, 4 internal assertion failure.

mod formats;
mod report;

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use urlab_core::gadgets::{
    explosion, fine_dissociation, iterable_coding, iterate_model, saturated_coding, DashedPolicy,
    ExtraPolicy, RoleMap,
};
use urlab_core::hardprob::{pp2dnf_as_pqe, pp2dnf_prob, ustcon_prob};
use urlab_core::instance::{Edge, Instance};
use urlab_core::pipelines::{
    brute_force_phi1_oracle, node_connectedness_pipeline, saturation_pipeline, Provenance,
    SaturationOracle,
};
use urlab_core::query::Query;
use urlab_core::reliability::{mc_estimate, Count, PqeJob, Probability, Tid, UrJob};
use urlab_core::structure::{
    analyze_edge, find_critical_model, CriticalModel, CriticalSearch, EdgeAnalysis,
};
use urlab_core::verify::{run_suite, CriterionResult, VerifyParams, SUITE_NAMES};
use urlab_core::Error as CoreError;

use formats::{
    instance_to_dot, instance_to_json, load_bipartite, load_instance, load_st_graph, load_tid,
};
use report::ReportBuilder;

#[derive(Parser)]
#[command(name = "urlab", version, about = "Exact uniform-reliability laboratory")]
struct Cli {
    /// Emit a full JSON run report instead of plain results.
    #[arg(long, global = true)]
    json: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate a query on an instance.
    Eval(EvalArgs),
    /// Count the satisfying subinstances (uniform reliability).
    Ur(UrArgs),
    /// Exact probabilistic query evaluation over a TID.
    Pqe(PqeArgs),
    /// Seeded Monte Carlo estimate of the query probability.
    Mc(McArgs),
    /// Classify one edge: weight, garbage, copies, extras, triangles.
    Analyze(AnalyzeArgs),
    /// Search for a critical model within explicit bounds.
    Critical(CriticalArgs),
    /// The weighted bipartite edge-cover problem.
    Pp2dnf(Pp2dnfArgs),
    /// The weighted source-sink connectivity problem.
    Ustcon(UstconArgs),
    /// Reduction pipelines and gadget builders.
    #[command(subcommand)]
    Reduce(ReduceCommand),
    /// Run named verification suites.
    Verify(VerifyArgs),
}

#[derive(Args)]
struct EvalArgs {
    #[arg(long)]
    query: PathBuf,
    #[arg(long)]
    instance: PathBuf,
}

#[derive(Args)]
struct UrArgs {
    #[arg(long)]
    query: PathBuf,
    #[arg(long)]
    instance: PathBuf,
    /// Cap on the fact count (defaults to 24; URLAB_CAP overrides).
    #[arg(long)]
    cap: Option<usize>,
    /// Worker threads; the result is independent of the count.
    #[arg(long, default_value_t = 1)]
    workers: usize,
}

#[derive(Args)]
struct PqeArgs {
    #[arg(long)]
    query: PathBuf,
    /// TID file (text with ` : prob` suffixes, or JSON).
    #[arg(long, conflicts_with = "instance")]
    tid: Option<PathBuf>,
    /// Plain instance; combine with --uniform.
    #[arg(long)]
    instance: Option<PathBuf>,
    /// Probability for facts without an explicit one (default 1/2).
    #[arg(long)]
    uniform: Option<String>,
    #[arg(long)]
    cap: Option<usize>,
    #[arg(long, default_value_t = 1)]
    workers: usize,
}

#[derive(Args)]
struct McArgs {
    #[arg(long)]
    query: PathBuf,
    #[arg(long, conflicts_with = "instance")]
    tid: Option<PathBuf>,
    #[arg(long)]
    instance: Option<PathBuf>,
    #[arg(long)]
    uniform: Option<String>,
    #[arg(long, default_value_t = 10_000)]
    samples: u64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Args)]
struct AnalyzeArgs {
    #[arg(long)]
    instance: PathBuf,
    /// Edge as `left,right`.
    #[arg(long)]
    edge: String,
}

#[derive(Args)]
struct CriticalArgs {
    #[arg(long)]
    query: PathBuf,
    #[arg(long, default_value_t = 6)]
    size_bound: usize,
    #[arg(long, default_value_t = 4)]
    domain_bound: usize,
}

#[derive(Args)]
struct Pp2dnfArgs {
    #[arg(long)]
    lambda: String,
    #[arg(long)]
    mu: String,
    #[arg(long)]
    nu: String,
    /// Bipartite graph JSON: {"U":[...],"V":[...],"E":[[u,v],...]}.
    #[arg(long)]
    graph: PathBuf,
    /// Also compute through the PQE route and check agreement.
    #[arg(long)]
    as_pqe: bool,
    /// Accept probabilities outside the problem definition's open ranges.
    #[arg(long)]
    unchecked: bool,
}

#[derive(Args)]
struct UstconArgs {
    #[arg(long)]
    phi: String,
    #[arg(long)]
    eta: String,
    /// Graph file: edge-list text with an `st <r> <s>` header, or JSON.
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    unchecked: bool,
}

#[derive(Subcommand)]
enum ReduceCommand {
    /// Vertex-copying reduction with Vandermonde interpolation.
    NodePipeline(NodePipelineArgs),
    /// Parallel-paths saturation with rounding recovery.
    SaturationPipeline(SaturationArgs),
    /// Chain-iterate the distinguished edge of a model.
    Iterate(IterateArgs),
    /// Saturated coding of a bipartite graph in a critical model.
    CodeBipartite(CodeBipartiteArgs),
    /// Iterable coding of a source-sink graph in a critical model.
    CodeGraph(CodeGraphArgs),
    /// Fine dissociation of the distinguished edge.
    FineDissoc(FineDissocArgs),
    /// Explosion of the distinguished edge.
    Explode(ExplodeArgs),
}

#[derive(Args)]
struct NodePipelineArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    phi: String,
}

#[derive(Clone, Copy, ValueEnum)]
enum OracleKind {
    Collapsed,
    Brute,
}

#[derive(Args)]
struct SaturationArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    phi: String,
    #[arg(long)]
    eta: String,
    #[arg(long, value_enum, default_value_t = OracleKind::Collapsed)]
    oracle: OracleKind,
}

#[derive(Clone, Copy, ValueEnum)]
enum PolicyArg {
    Endpoints,
    Triangles,
    Everywhere,
}

impl From<PolicyArg> for ExtraPolicy {
    fn from(p: PolicyArg) -> ExtraPolicy {
        match p {
            PolicyArg::Endpoints => ExtraPolicy::EndpointsOnly,
            PolicyArg::Triangles => ExtraPolicy::SharedTriangles,
            PolicyArg::Everywhere => ExtraPolicy::Everywhere,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum DashedArg {
    Exclude,
    Include,
}

#[derive(Args)]
struct OutputArgs {
    /// Write the instance here instead of printing it.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Emit a DOT dump of the instance.
    #[arg(long)]
    dot: bool,
}

#[derive(Args)]
struct IterateArgs {
    #[arg(long)]
    instance: PathBuf,
    #[arg(long)]
    edge: String,
    #[arg(short)]
    k: usize,
    #[arg(long, value_enum, default_value_t = PolicyArg::Endpoints)]
    policy: PolicyArg,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct CodeBipartiteArgs {
    #[arg(long)]
    instance: PathBuf,
    #[arg(long)]
    edge: String,
    #[arg(long)]
    graph: PathBuf,
    #[arg(short = 'N', long = "replicas")]
    n: usize,
    /// Chosen left-incident fact, e.g. `R(a,a)` (default: smallest).
    #[arg(long)]
    f_left: Option<String>,
    #[arg(long)]
    f_right: Option<String>,
    /// Write the fact-role map here as JSON.
    #[arg(long)]
    roles_out: Option<PathBuf>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct CodeGraphArgs {
    #[arg(long)]
    instance: PathBuf,
    #[arg(long)]
    edge: String,
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    f_left: Option<String>,
    #[arg(long)]
    f_right: Option<String>,
    #[arg(long)]
    roles_out: Option<PathBuf>,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct FineDissocArgs {
    #[arg(long)]
    instance: PathBuf,
    #[arg(long)]
    edge: String,
    #[arg(long, value_enum, default_value_t = DashedArg::Exclude)]
    dashed: DashedArg,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct ExplodeArgs {
    #[arg(long)]
    instance: PathBuf,
    #[arg(long)]
    edge: String,
    #[arg(short)]
    k: usize,
    #[command(flatten)]
    output: OutputArgs,
}

#[derive(Args)]
struct VerifyArgs {
    /// Suite name, or `all`.
    suite: Option<String>,
    /// List the available suites.
    #[arg(long)]
    list: bool,
    #[arg(long)]
    trials: Option<u64>,
    #[arg(long)]
    max_facts: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    hom_cases: Option<u64>,
    #[arg(long)]
    mc_tids: Option<u64>,
    #[arg(long)]
    mc_samples: Option<u64>,
    #[arg(long)]
    node_max_n: Option<usize>,
    #[arg(long)]
    size_bound: Option<usize>,
    #[arg(long)]
    domain_bound: Option<usize>,
}

fn main() -> ExitCode {
    // Die quietly when the output pipe closes (e.g. piping into `head`).
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            let code = match e.downcast_ref::<CoreError>() {
                Some(CoreError::CapExceeded { .. }) => 3,
                Some(CoreError::Assertion(_)) => 4,
                _ => 2,
            };
            ExitCode::from(code)
        }
    }
}

fn default_cap(explicit: Option<usize>) -> usize {
    explicit
        .or_else(|| std::env::var("URLAB_CAP").ok().and_then(|v| v.parse().ok()))
        .unwrap_or(urlab_core::DEFAULT_SUBSET_CAP)
}

fn load_query(path: &Path) -> Result<Query> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| anyhow!("reading {}: {e}", path.display()))?;
    Ok(Query::parse(text.trim())?)
}

fn parse_edge(spec: &str) -> Result<Edge> {
    let (a, b) = spec
        .split_once(',')
        .ok_or_else(|| anyhow!("edge must be given as `left,right`"))?;
    Ok(Edge::new(a.trim(), b.trim())?)
}

fn parse_prob(text: &str) -> Result<Probability> {
    Ok(Probability::parse(text)?)
}

fn parse_fact(text: &str) -> Result<urlab_core::Fact> {
    let inst = Instance::parse(text)?;
    inst.fact_vec()
        .into_iter()
        .next()
        .ok_or_else(|| anyhow!("expected a fact, got {text:?}"))
}

fn run(cli: Cli) -> Result<ExitCode> {
    let json = cli.json;
    match cli.command {
        Command::Eval(args) => {
            let mut rb = ReportBuilder::new();
            rb.input("query", &args.query);
            rb.input("instance", &args.instance);
            let q = load_query(&args.query)?;
            let inst = load_instance(&args.instance)?;
            let satisfied = q.evaluate(&inst);
            rb.params(json!({"query": q.to_string()}));
            rb.finish(json!({"satisfied": satisfied.to_string()})).print(json);
            Ok(ExitCode::SUCCESS)
        }
        Command::Ur(args) => {
            let mut rb = ReportBuilder::new();
            rb.input("query", &args.query);
            rb.input("instance", &args.instance);
            let q = load_query(&args.query)?;
            let inst = load_instance(&args.instance)?;
            let cap = default_cap(args.cap);
            let job = UrJob::new(&q, &inst, cap)?;
            let count = run_partitioned(args.workers, job.mask_count(), |lo, hi| {
                job.count_range(lo, hi)
            })
            .into_iter()
            .fold(Count::from(0u32), |acc, c| acc + c);
            rb.params(json!({"cap": cap, "workers": args.workers, "query": q.to_string()}));
            rb.finish(json!({"count": count.to_string()})).print(json);
            Ok(ExitCode::SUCCESS)
        }
        Command::Pqe(args) => {
            let mut rb = ReportBuilder::new();
            rb.input("query", &args.query);
            let q = load_query(&args.query)?;
            let tid = load_tid_args(&mut rb, args.tid.as_deref(), args.instance.as_deref(), args.uniform.as_deref())?;
            let cap = default_cap(args.cap);
            let job = PqeJob::new(&q, &tid, cap)?;
            let sum = run_partitioned(args.workers, job.mask_count(), |lo, hi| job.sum_range(lo, hi))
                .into_iter()
                .fold(num_rational_zero(), |acc, s| acc + s);
            let p = Probability::new(sum)?;
            rb.params(json!({"cap": cap, "workers": args.workers, "query": q.to_string()}));
            rb.finish(json!({"probability": p.to_string()})).print(json);
            Ok(ExitCode::SUCCESS)
        }
        Command::Mc(args) => {
            let mut rb = ReportBuilder::new();
            rb.input("query", &args.query);
            let q = load_query(&args.query)?;
            let tid = load_tid_args(&mut rb, args.tid.as_deref(), args.instance.as_deref(), args.uniform.as_deref())?;
            let est = mc_estimate(&q, &tid, args.samples, args.seed)?;
            rb.params(json!({"samples": args.samples, "seed": args.seed, "query": q.to_string()}));
            rb.finish(json!({
                "estimate": est.estimate.to_string(),
                "half_width": est.half_width,
            }))
            .print(json);
            Ok(ExitCode::SUCCESS)
        }
        Command::Analyze(args) => {
            let mut rb = ReportBuilder::new();
            rb.input("instance", &args.instance);
            let inst = load_instance(&args.instance)?;
            let edge = parse_edge(&args.edge)?;
            let analysis = analyze_edge(&inst, &edge)?;
            rb.params(json!({"edge": edge.to_string()}));
            rb.finish(analysis_json(&analysis)).print(json);
            Ok(ExitCode::SUCCESS)
        }
        Command::Critical(args) => {
            let mut rb = ReportBuilder::new();
            rb.input("query", &args.query);
            let q = load_query(&args.query)?;
            rb.params(json!({
                "size_bound": args.size_bound,
                "domain_bound": args.domain_bound,
                "query": q.to_string(),
            }));
            let outcome = find_critical_model(&q, args.size_bound, args.domain_bound)?;
            let results = match &outcome {
                CriticalSearch::Found { model, explored } => critical_json(model, *explored),
                CriticalSearch::NotFound { explored } => json!({
                    "found": false,
                    "explored": explored,
                }),
            };
            rb.finish(results).print(json);
            Ok(ExitCode::SUCCESS)
        }
        Command::Pp2dnf(args) => {
            let mut rb = ReportBuilder::new();
            rb.input("graph", &args.graph);
            let b = load_bipartite(&args.graph)?;
            let lambda = parse_prob(&args.lambda)?;
            let mu = parse_prob(&args.mu)?;
            let nu = parse_prob(&args.nu)?;
            let strict = !args.unchecked;
            let direct = pp2dnf_prob(&lambda, &mu, &nu, &b, strict)?;
            let mut results = json!({"probability": direct.to_string()});
            if args.as_pqe {
                let via = pp2dnf_as_pqe(&lambda, &mu, &nu, &b, strict)?;
                results["as_pqe"] = json!(via.to_string());
                results["agree"] = json!(via == direct);
            }
            rb.params(json!({
                "lambda": lambda.to_string(),
                "mu": mu.to_string(),
                "nu": nu.to_string(),
                "unchecked": args.unchecked,
            }));
            rb.finish(results).print(json);
            Ok(ExitCode::SUCCESS)
        }
        Command::Ustcon(args) => {
            let mut rb = ReportBuilder::new();
            rb.input("graph", &args.graph);
            let g = load_st_graph(&args.graph)?;
            let phi = parse_prob(&args.phi)?;
            let eta = parse_prob(&args.eta)?;
            let p = ustcon_prob(&phi, &eta, &g, !args.unchecked)?;
            rb.params(json!({
                "phi": phi.to_string(),
                "eta": eta.to_string(),
                "unchecked": args.unchecked,
            }));
            rb.finish(json!({"probability": p.to_string()})).print(json);
            Ok(ExitCode::SUCCESS)
        }
        Command::Reduce(sub) => run_reduce(sub, json),
        Command::Verify(args) => run_verify(args, json),
    }
}

fn num_rational_zero() -> urlab_core::num_rational::BigRational {
    use urlab_core::num_traits::Zero;
    urlab_core::num_rational::BigRational::zero()
}

/// Splits `0..total` into one contiguous range per worker and collects the
/// partial results; exact arithmetic makes the merge order irrelevant.
fn run_partitioned<T: Send>(
    workers: usize,
    total: u64,
    work: impl Fn(u64, u64) -> T + Sync,
) -> Vec<T> {
    let workers = workers.max(1).min(64) as u64;
    if workers == 1 || total < 2 * workers {
        return vec![work(0, total)];
    }
    let chunk = total.div_ceil(workers);
    std::thread::scope(|scope| {
        let handles: Vec<_> = (0..workers)
            .map(|w| {
                let work = &work;
                let lo = w * chunk;
                let hi = ((w + 1) * chunk).min(total);
                scope.spawn(move || work(lo, hi))
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("worker panicked")).collect()
    })
}

fn load_tid_args(
    rb: &mut ReportBuilder,
    tid: Option<&Path>,
    instance: Option<&Path>,
    uniform: Option<&str>,
) -> Result<Tid> {
    let uniform_p = uniform.map(parse_prob).transpose()?;
    match (tid, instance) {
        (Some(path), None) => {
            rb.input("tid", path);
            load_tid(path, uniform_p.as_ref())
        }
        (None, Some(path)) => {
            rb.input("instance", path);
            let inst = load_instance(path)?;
            Ok(Tid::uniform(inst, uniform_p.unwrap_or_else(Probability::half)))
        }
        _ => Err(anyhow!("provide exactly one of --tid or --instance")),
    }
}

fn facts_json(facts: impl IntoIterator<Item = urlab_core::Fact>) -> Value {
    Value::Array(facts.into_iter().map(|f| json!(f.to_string())).collect())
}

fn analysis_json(a: &EdgeAnalysis) -> Value {
    let copies = |m: &BTreeMap<urlab_core::instance::Elem, std::collections::BTreeSet<urlab_core::Fact>>| {
        Value::Object(
            m.iter()
                .map(|(e, facts)| (e.to_string(), facts_json(facts.iter().cloned())))
                .collect(),
        )
    };
    json!({
        "edge": a.edge.to_string(),
        "weight": a.weight(),
        "extra_weight": a.extra_weight(),
        "lex_weight": [a.lex_weight().0, a.lex_weight().1],
        "non_leaf": a.non_leaf,
        "clean": a.is_clean(),
        "covering": facts_json(a.covering.iter().cloned()),
        "garbage_left": facts_json(a.garbage_left.iter().cloned()),
        "garbage_right": facts_json(a.garbage_right.iter().cloned()),
        "copies_left": copies(&a.copies_left),
        "copies_right": copies(&a.copies_right),
        "extras_left": facts_json(a.extras_left.iter().cloned()),
        "extras_right": facts_json(a.extras_right.iter().cloned()),
        "triangles": a.triangles.iter().map(|e| e.to_string()).collect::<Vec<_>>(),
    })
}

fn critical_json(model: &CriticalModel, explored: u64) -> Value {
    json!({
        "found": true,
        "theta": model.theta,
        "xi": model.xi,
        "lambda": [model.lambda.0, model.lambda.1],
        "edge": model.edge.to_string(),
        "f_left": model.f_left.to_string(),
        "f_right": model.f_right.to_string(),
        "instance": model.instance.to_text(),
        "explored": explored,
        "bound": {
            "max_facts": model.bound.max_facts,
            "max_elems": model.bound.max_elems,
        },
    })
}

fn emit_instance(inst: &Instance, output: &OutputArgs, rb: ReportBuilder, json_mode: bool) -> Result<()> {
    let rendered = if output.dot { instance_to_dot(inst) } else { inst.to_text() };
    if let Some(path) = &output.out {
        std::fs::write(path, &rendered)?;
        rb.finish(json!({
            "facts": inst.len(),
            "elements": inst.dom().len(),
            "written": path.display().to_string(),
        }))
        .print(json_mode);
    } else if json_mode {
        rb.finish(json!({
            "facts": inst.len(),
            "elements": inst.dom().len(),
            "instance": rendered,
            "instance_json": serde_json::from_str::<Value>(&instance_to_json(inst))?,
        }))
        .print(true);
    } else {
        print!("{rendered}");
    }
    Ok(())
}

fn write_roles(path: &Path, roles: &RoleMap) -> Result<()> {
    let obj: Value = Value::Object(
        roles
            .iter()
            .map(|(f, r)| (f.to_string(), json!(r.to_string())))
            .collect(),
    );
    std::fs::write(path, serde_json::to_string_pretty(&json!({ "roles": obj }))?)?;
    Ok(())
}

fn load_critical_parts(
    instance: &Path,
    edge: &str,
    f_left: Option<&str>,
    f_right: Option<&str>,
) -> Result<CriticalModel> {
    let inst = load_instance(instance)?;
    let e = parse_edge(edge)?;
    let bound = urlab_core::structure::SearchBound {
        max_facts: inst.len(),
        max_elems: inst.dom().len(),
    };
    let fl = f_left.map(parse_fact).transpose()?;
    let fr = f_right.map(parse_fact).transpose()?;
    Ok(CriticalModel::from_parts(inst, e, fl, fr, bound)?)
}

fn run_reduce(sub: ReduceCommand, json_mode: bool) -> Result<ExitCode> {
    match sub {
        ReduceCommand::NodePipeline(args) => {
            let mut rb = ReportBuilder::new();
            rb.input("graph", &args.graph);
            let g = load_st_graph(&args.graph)?;
            let phi = parse_prob(&args.phi)?;
            let mut oracle = brute_force_phi1_oracle(&phi);
            let report = node_connectedness_pipeline(&g, &phi, &mut oracle)?;
            rb.params(json!({"phi": phi.to_string()}));
            rb.provenance(json!({
                "oracle": "brute-force",
                "oracle_values": report
                    .oracle_values
                    .iter()
                    .map(|a| a.value.to_string())
                    .collect::<Vec<_>>(),
            }));
            rb.finish(json!({
                "count": report.count.to_string(),
                "counts_by_cardinality": report
                    .counts_by_cardinality
                    .0
                    .iter()
                    .map(|x| x.to_string())
                    .collect::<Vec<_>>(),
            }))
            .print(json_mode);
            Ok(ExitCode::SUCCESS)
        }
        ReduceCommand::SaturationPipeline(args) => {
            let mut rb = ReportBuilder::new();
            rb.input("graph", &args.graph);
            let g = load_st_graph(&args.graph)?;
            let phi = parse_prob(&args.phi)?;
            let eta = parse_prob(&args.eta)?;
            let oracle = match args.oracle {
                OracleKind::Collapsed => SaturationOracle::Collapsed,
                OracleKind::Brute => SaturationOracle::BruteForce,
            };
            let report = saturation_pipeline(&g, &phi, &eta, oracle)?;
            rb.params(json!({"phi": phi.to_string(), "eta": eta.to_string()}));
            rb.provenance(json!({
                "oracle": match report.oracle.provenance {
                    Provenance::BruteForce => "brute-force",
                    Provenance::Collapsed => "collapsed",
                    Provenance::External => "external",
                },
                "oracle_value": report.oracle.value.to_string(),
                "q": report.q,
                "epsilon": report.epsilon.to_string(),
                "epsilon_prime": report.epsilon_prime.to_string(),
            }));
            rb.finish(json!({
                "z": report.z.to_string(),
                "denominator": format!("{}^{}", report.b, report.n),
            }))
            .print(json_mode);
            Ok(ExitCode::SUCCESS)
        }
        ReduceCommand::Iterate(args) => {
            let mut rb = ReportBuilder::new();
            rb.input("instance", &args.instance);
            let inst = load_instance(&args.instance)?;
            let edge = parse_edge(&args.edge)?;
            let out = iterate_model(&inst, &edge, args.k, args.policy.into())?;
            rb.params(json!({"edge": edge.to_string(), "k": args.k}));
            emit_instance(&out, &args.output, rb, json_mode)?;
            Ok(ExitCode::SUCCESS)
        }
        ReduceCommand::CodeBipartite(args) => {
            let mut rb = ReportBuilder::new();
            rb.input("instance", &args.instance);
            rb.input("graph", &args.graph);
            let cm = load_critical_parts(
                &args.instance,
                &args.edge,
                args.f_left.as_deref(),
                args.f_right.as_deref(),
            )?;
            let b = load_bipartite(&args.graph)?;
            let (coded, roles) = saturated_coding(&cm, &b, args.n)?;
            if let Some(path) = &args.roles_out {
                write_roles(path, &roles)?;
            }
            rb.params(json!({
                "edge": cm.edge.to_string(),
                "replicas": args.n,
                "f_left": cm.f_left.to_string(),
                "f_right": cm.f_right.to_string(),
            }));
            emit_instance(&coded, &args.output, rb, json_mode)?;
            Ok(ExitCode::SUCCESS)
        }
        ReduceCommand::CodeGraph(args) => {
            let mut rb = ReportBuilder::new();
            rb.input("instance", &args.instance);
            rb.input("graph", &args.graph);
            let cm = load_critical_parts(
                &args.instance,
                &args.edge,
                args.f_left.as_deref(),
                args.f_right.as_deref(),
            )?;
            let g = load_st_graph(&args.graph)?;
            let (coded, roles) = iterable_coding(&cm, &g)?;
            if let Some(path) = &args.roles_out {
                write_roles(path, &roles)?;
            }
            rb.params(json!({
                "edge": cm.edge.to_string(),
                "f_left": cm.f_left.to_string(),
                "f_right": cm.f_right.to_string(),
            }));
            emit_instance(&coded, &args.output, rb, json_mode)?;
            Ok(ExitCode::SUCCESS)
        }
        ReduceCommand::FineDissoc(args) => {
            let mut rb = ReportBuilder::new();
            rb.input("instance", &args.instance);
            let inst = load_instance(&args.instance)?;
            let edge = parse_edge(&args.edge)?;
            let policy = match args.dashed {
                DashedArg::Exclude => DashedPolicy::Exclude,
                DashedArg::Include => DashedPolicy::Include,
            };
            let out = fine_dissociation(&inst, &edge, policy)?;
            rb.params(json!({"edge": edge.to_string()}));
            emit_instance(&out, &args.output, rb, json_mode)?;
            Ok(ExitCode::SUCCESS)
        }
        ReduceCommand::Explode(args) => {
            let mut rb = ReportBuilder::new();
            rb.input("instance", &args.instance);
            let inst = load_instance(&args.instance)?;
            let edge = parse_edge(&args.edge)?;
            let out = explosion(&inst, &edge, args.k)?;
            rb.params(json!({"edge": edge.to_string(), "k": args.k}));
            emit_instance(&out, &args.output, rb, json_mode)?;
            Ok(ExitCode::SUCCESS)
        }
    }
}

fn run_verify(args: VerifyArgs, json_mode: bool) -> Result<ExitCode> {
    if args.list {
        for name in SUITE_NAMES {
            println!("{name}");
        }
        return Ok(ExitCode::SUCCESS);
    }
    let mut params = VerifyParams::default();
    if let Some(v) = args.trials {
        params.trials = v;
    }
    if let Some(v) = args.max_facts {
        params.max_facts = v;
    }
    if let Some(v) = args.seed {
        params.seed = v;
    }
    if let Some(v) = args.hom_cases {
        params.hom_cases = v;
    }
    if let Some(v) = args.mc_tids {
        params.mc_tids = v;
    }
    if let Some(v) = args.mc_samples {
        params.mc_samples = v;
    }
    if let Some(v) = args.node_max_n {
        params.node_max_n = v;
    }
    if let Some(v) = args.size_bound {
        params.struct_size_bound = v;
    }
    if let Some(v) = args.domain_bound {
        params.struct_domain_bound = v;
    }
    let suite = args.suite.as_deref().unwrap_or("all");
    let names: Vec<&str> = if suite == "all" {
        SUITE_NAMES.to_vec()
    } else if SUITE_NAMES.contains(&suite) {
        vec![suite]
    } else {
        return Err(anyhow!(
            "unknown suite {suite:?}; available: {}",
            SUITE_NAMES.join(", ")
        ));
    };
    let mut results: Vec<CriterionResult> = Vec::new();
    for name in names {
        let start = std::time::Instant::now();
        let result = run_suite(name, &params)?;
        let elapsed = start.elapsed().as_secs_f64();
        if !json_mode {
            println!("{} [{elapsed:.2}s]", result.line());
            for failure in &result.failures {
                println!("    {failure}");
            }
        }
        results.push(result);
    }
    let all_pass = results.iter().all(|r| r.pass);
    if json_mode {
        let report = json!({
            "suites": results
                .iter()
                .map(|r| {
                    json!({
                        "name": r.name,
                        "pass": r.pass,
                        "cases": r.cases,
                        "detail": r.detail,
                        "failures": r.failures,
                    })
                })
                .collect::<Vec<_>>(),
        });
        println!("{}", serde_json::to_string_pretty(&report)?);
    }
    Ok(if all_pass { ExitCode::SUCCESS } else { ExitCode::FAILURE })
}
