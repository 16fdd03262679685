//! The `keymesh` command line: reproducible experiments with machine-readable
//! output.
//!
//! Single-object reports are JSON; sweeps and baseline runs are CSV (JSON on
//! request). Every payload embeds the tool version, the seed, and the full
//! parameter set, and carries no timestamps, so identical invocations produce
//! byte-identical output. Node ids are stored 0-based everywhere; 1-based
//! display is available for on-screen output only.

use std::collections::BTreeMap;
use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::io::Write;
use std::path::PathBuf;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use crate::baselines::{self, BaselineModel, EgConfig};
use crate::error::Error;
use crate::keygraph::{self, build_graph, GraphConfig, KeyId, NodeId};
use crate::metrics::{self, PathAveraging};
use crate::router;
use crate::securemsg::SimNetwork;
use crate::seeding;

const VERSION: &str = env!("CARGO_PKG_VERSION");

/// Above this size the sweep and metrics commands fall back to sampled
/// average-path estimation unless `--sample-pairs` says otherwise.
const EXACT_PATH_LIMIT: u32 = 4096;
const DEFAULT_SAMPLE_PAIRS: u64 = 100_000;

/// Largest network the exhaustive `verify` subcommand will accept.
const VERIFY_LIMIT: u32 = 4096;

#[derive(Parser, Debug)]
#[command(
    name = "keymesh",
    version,
    about = "Structured key-sharing topology: build, route, send, measure, compare"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build the structured graph and export it as JSON
    Topology(TopologyArgs),
    /// Compute the greedy multi-hop route between two nodes
    Route(RouteArgs),
    /// Deliver a hop-by-hop encrypted message over the simulated network
    Send(SendArgs),
    /// Measure diameter, average shortest path and clustering
    Metrics(MetricsArgs),
    /// Run the metrics across a list of network sizes (CSV)
    Sweep(SweepArgs),
    /// Report the keys revealed by capturing a set of nodes
    Capture(CaptureArgs),
    /// Run a baseline model: ring, random key pool (eg) or random graph (er)
    Baseline(BaselineArgs),
    /// Exhaustively check the hop-count bound and greedy optimality
    Verify(VerifyArgs),
}

#[derive(Args, Debug)]
struct CommonArgs {
    /// Number of nodes in the network
    #[arg(long)]
    n: u32,
    /// Seed for all deterministic randomness
    #[arg(long, env = "KEYMESH_SEED", default_value_t = 0)]
    seed: u64,
    /// Output format
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Write the payload to a file instead of standard output
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct TopologyArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Include per-edge key ids (key material is never exported)
    #[arg(long)]
    include_key_ids: bool,
    /// Render node ids 1-based (display only; files always store 0-based)
    #[arg(long)]
    one_based: bool,
}

#[derive(Args, Debug)]
struct RouteArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Source node id
    #[arg(long)]
    src: u32,
    /// Destination node id
    #[arg(long)]
    dst: u32,
    #[arg(long)]
    one_based: bool,
}

#[derive(Args, Debug)]
struct SendArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[arg(long)]
    src: u32,
    #[arg(long)]
    dst: u32,
    /// Message plaintext
    #[arg(long)]
    message: String,
    #[arg(long)]
    one_based: bool,
}

#[derive(Args, Debug)]
struct MetricsArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Estimate the average path from this many sampled pairs instead of
    /// computing it exactly
    #[arg(long)]
    sample_pairs: Option<u64>,
}

#[derive(Args, Debug)]
struct SweepArgs {
    /// Comma-separated network sizes, one CSV row each
    #[arg(long, value_delimiter = ',', required = true)]
    n_list: Vec<u32>,
    #[arg(long, env = "KEYMESH_SEED", default_value_t = 0)]
    seed: u64,
    /// Random-graph trials behind the clustering comparison column
    #[arg(long, default_value_t = 30)]
    er_trials: u64,
    #[arg(long)]
    sample_pairs: Option<u64>,
    /// Which metric columns to fill
    #[arg(long, value_enum, default_value_t = MetricSelection::All)]
    metrics: MetricSelection,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct CaptureArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Comma-separated ids of the captured nodes
    #[arg(long, value_delimiter = ',', required = true)]
    nodes: Vec<u32>,
    #[arg(long)]
    one_based: bool,
}

#[derive(Args, Debug)]
struct BaselineArgs {
    /// Baseline model to run
    #[arg(long, value_enum)]
    model: ModelKind,
    #[arg(long)]
    n: u32,
    #[arg(long, env = "KEYMESH_SEED", default_value_t = 0)]
    seed: u64,
    /// Key pool size (eg model)
    #[arg(long)]
    pool: Option<u32>,
    /// Keys drawn per node (eg model)
    #[arg(long)]
    ring_size: Option<u32>,
    /// Edge count (er model); defaults to the structured graph's edge count
    #[arg(long)]
    edges: Option<usize>,
    /// Number of generated graphs
    #[arg(long, default_value_t = 1)]
    trials: u64,
    /// Emit one aggregated row instead of one row per trial
    #[arg(long)]
    summary: bool,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    #[command(flatten)]
    common: CommonArgs,
    #[arg(long)]
    one_based: bool,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum Format {
    Json,
    Csv,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum ModelKind {
    Ring,
    Eg,
    Er,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
enum MetricSelection {
    /// Paths and clustering
    All,
    /// Diameter, bound and average path only
    Paths,
    /// Clustering columns only
    Clustering,
}

impl MetricSelection {
    fn label(self) -> &'static str {
        match self {
            MetricSelection::All => "all",
            MetricSelection::Paths => "paths",
            MetricSelection::Clustering => "clustering",
        }
    }
}

/// Run the CLI against real process arguments, stdout and stderr.
pub fn run_from_env() -> i32 {
    let args: Vec<String> = std::env::args().collect();
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run(args, &mut stdout.lock(), &mut stderr.lock())
}

/// Parse `args`, execute, and write the payload. Returns the exit status:
/// 0 on success, 2 for usage errors, 1 for runtime failures.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(err) => {
            let rendered = err.render().to_string();
            return if matches!(
                err.kind(),
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion
            ) {
                let _ = write!(stdout, "{rendered}");
                0
            } else {
                let _ = write!(stderr, "{rendered}");
                2
            };
        }
    };
    match dispatch(cli.command) {
        Ok(output) => match deliver(&output, stdout) {
            Ok(()) => 0,
            Err(err) => {
                let _ = writeln!(
                    stderr,
                    "{}",
                    error_object("io", &format!("cannot write output: {err}"))
                );
                1
            }
        },
        Err(failure) => {
            let _ = writeln!(stderr, "{}", error_object(failure.kind, &failure.message));
            failure.exit_code
        }
    }
}

struct Output {
    payload: String,
    out: Option<PathBuf>,
}

struct Failure {
    exit_code: i32,
    kind: &'static str,
    message: String,
}

impl Failure {
    fn usage(message: impl Into<String>) -> Failure {
        Failure {
            exit_code: 2,
            kind: "usage",
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(err: Error) -> Failure {
        let kind = match err {
            Error::InvalidConfig(_) => "invalid-config",
            Error::NodeOutOfRange { .. } => "node-out-of-range",
            Error::SameNode(_) => "same-node",
            Error::NotAnEdge { .. } => "not-an-edge",
            Error::BoundUndefined(_) => "bound-undefined",
            Error::TooManyEdges { .. } => "too-many-edges",
            Error::EmptyPlaintext => "empty-plaintext",
            Error::AuthenticationFailure { .. } => "authentication-failure",
        };
        Failure {
            exit_code: if err.is_usage() { 2 } else { 1 },
            kind,
            message: err.to_string(),
        }
    }
}

fn error_object(kind: &str, message: &str) -> String {
    json!({ "error": { "kind": kind, "message": message } }).to_string()
}

fn deliver(output: &Output, stdout: &mut dyn Write) -> std::io::Result<()> {
    match &output.out {
        Some(path) => std::fs::write(path, output.payload.as_bytes()),
        None => stdout.write_all(output.payload.as_bytes()),
    }
}

#[derive(Serialize)]
struct Envelope<T: Serialize> {
    version: &'static str,
    command: &'static str,
    seed: u64,
    params: serde_json::Value,
    report: T,
}

fn json_payload<T: Serialize>(
    command: &'static str,
    seed: u64,
    params: serde_json::Value,
    report: T,
) -> String {
    let envelope = Envelope {
        version: VERSION,
        command,
        seed,
        params,
        report,
    };
    let mut payload = serde_json::to_string_pretty(&envelope).expect("reports serialize");
    payload.push('\n');
    payload
}

fn csv_header(command: &str, seed: u64, params: &[(&str, String)]) -> String {
    let mut header = format!("# keymesh {VERSION}\n# command={command} seed={seed}");
    for (key, value) in params {
        let _ = write!(header, " {key}={value}");
    }
    header.push('\n');
    header
}

fn display_base(one_based: bool, out: &Option<PathBuf>) -> Result<u32, Failure> {
    if one_based && out.is_some() {
        return Err(Failure::usage(
            "--one-based is display-only; output files always store 0-based node ids",
        ));
    }
    Ok(u32::from(one_based))
}

fn require_json(format: Format) -> Result<(), Failure> {
    if format != Format::Json {
        return Err(Failure::usage(
            "this command emits a single JSON object; csv is only available for sweep and baseline",
        ));
    }
    Ok(())
}

fn key_id_string(id: KeyId, base: u32) -> String {
    format!("{}-{}", id.lo().index() + base, id.hi().index() + base)
}

fn dispatch(command: Command) -> Result<Output, Failure> {
    match command {
        Command::Topology(args) => topology(args),
        Command::Route(args) => route_cmd(args),
        Command::Send(args) => send_cmd(args),
        Command::Metrics(args) => metrics_cmd(args),
        Command::Sweep(args) => sweep_cmd(args),
        Command::Capture(args) => capture_cmd(args),
        Command::Baseline(args) => baseline_cmd(args),
        Command::Verify(args) => verify_cmd(args),
    }
}

#[derive(Serialize)]
struct TopologyReport {
    n: u32,
    offsets: Vec<u32>,
    degree_histogram: BTreeMap<usize, u32>,
    edges: Vec<(u32, u32)>,
    #[serde(skip_serializing_if = "Option::is_none")]
    key_ids: Option<Vec<String>>,
}

fn topology(args: TopologyArgs) -> Result<Output, Failure> {
    require_json(args.common.format)?;
    let base = display_base(args.one_based, &args.common.out)?;
    let graph = build_graph(GraphConfig::from_numeric_seed(
        args.common.n,
        args.common.seed,
    )?);
    let export = graph.export(args.include_key_ids);
    let report = TopologyReport {
        n: export.n,
        offsets: export.offsets,
        degree_histogram: export.degree_histogram,
        edges: export
            .edges
            .into_iter()
            .map(|(a, b)| (a + base, b + base))
            .collect(),
        key_ids: export
            .key_ids
            .map(|ids| ids.into_iter().map(|id| key_id_string(id, base)).collect()),
    };
    let params = json!({
        "n": args.common.n,
        "seed": args.common.seed,
        "include_key_ids": args.include_key_ids,
        "one_based": args.one_based,
    });
    Ok(Output {
        payload: json_payload("topology", args.common.seed, params, report),
        out: args.common.out,
    })
}

#[derive(Serialize)]
struct RouteReport {
    src: u32,
    dst: u32,
    hops: Vec<u32>,
    hop_count: usize,
    /// Closed-form hop bound; absent when undefined for this size.
    bound: Option<u32>,
}

fn route_cmd(args: RouteArgs) -> Result<Output, Failure> {
    require_json(args.common.format)?;
    let base = display_base(args.one_based, &args.common.out)?;
    let graph = build_graph(GraphConfig::from_numeric_seed(
        args.common.n,
        args.common.seed,
    )?);
    let trace = router::route(NodeId::new(args.src), NodeId::new(args.dst), &graph)?;
    let report = RouteReport {
        src: args.src + base,
        dst: args.dst + base,
        hops: trace.hops().iter().map(|h| h.index() + base).collect(),
        hop_count: trace.hop_count(),
        bound: router::diameter_bound(args.common.n).ok(),
    };
    let params = json!({
        "n": args.common.n,
        "seed": args.common.seed,
        "src": args.src,
        "dst": args.dst,
        "one_based": args.one_based,
    });
    Ok(Output {
        payload: json_payload("route", args.common.seed, params, report),
        out: args.common.out,
    })
}

#[derive(Serialize)]
struct SendReport {
    src: u32,
    dst: u32,
    hops: Vec<u32>,
    hop_count: usize,
    key_ids: Vec<String>,
    delivered_plaintext: String,
    transmissions: u64,
    success: bool,
    cipher: &'static str,
}

fn send_cmd(args: SendArgs) -> Result<Output, Failure> {
    require_json(args.common.format)?;
    let base = display_base(args.one_based, &args.common.out)?;
    let graph = build_graph(GraphConfig::from_numeric_seed(
        args.common.n,
        args.common.seed,
    )?);
    let mut network = SimNetwork::new(graph);
    let delivery = network.send_secure(
        NodeId::new(args.src),
        NodeId::new(args.dst),
        args.message.as_bytes(),
    )?;
    let report = SendReport {
        src: args.src + base,
        dst: args.dst + base,
        hops: delivery
            .trace
            .hops()
            .iter()
            .map(|h| h.index() + base)
            .collect(),
        hop_count: delivery.hop_count,
        key_ids: delivery
            .key_ids
            .iter()
            .map(|&id| key_id_string(id, base))
            .collect(),
        delivered_plaintext: String::from_utf8_lossy(&delivery.delivered_plaintext).into_owned(),
        transmissions: delivery.transmissions,
        success: delivery.success,
        cipher: network.cipher_name(),
    };
    let params = json!({
        "n": args.common.n,
        "seed": args.common.seed,
        "src": args.src,
        "dst": args.dst,
        "message": args.message,
        "one_based": args.one_based,
    });
    Ok(Output {
        payload: json_payload("send", args.common.seed, params, report),
        out: args.common.out,
    })
}

fn averaging_mode(n: u32, sample_pairs: Option<u64>, seed: u64) -> Result<PathAveraging, Failure> {
    match sample_pairs {
        Some(0) => Err(Failure::usage("--sample-pairs must be at least 1")),
        Some(pairs) => Ok(PathAveraging::Sampled { pairs, seed }),
        None if n > EXACT_PATH_LIMIT => Ok(PathAveraging::Sampled {
            pairs: DEFAULT_SAMPLE_PAIRS,
            seed,
        }),
        None => Ok(PathAveraging::Exact),
    }
}

fn metrics_cmd(args: MetricsArgs) -> Result<Output, Failure> {
    require_json(args.common.format)?;
    let graph = build_graph(GraphConfig::from_numeric_seed(
        args.common.n,
        args.common.seed,
    )?);
    let mode = averaging_mode(args.common.n, args.sample_pairs, args.common.seed)?;
    let report = metrics::measure(graph.topology(), mode);
    let params = json!({
        "n": args.common.n,
        "seed": args.common.seed,
        "sample_pairs": args.sample_pairs,
    });
    Ok(Output {
        payload: json_payload("metrics", args.common.seed, params, report),
        out: args.common.out,
    })
}

#[derive(Serialize)]
struct SweepRow {
    n: u32,
    diameter: Option<u32>,
    bound: Option<u32>,
    avg_path: Option<f64>,
    clustering_structured: Option<f64>,
    clustering_er_mean: Option<f64>,
    error: Option<String>,
}

fn fmt_opt<T: std::fmt::Display>(value: &Option<T>) -> String {
    value.as_ref().map(T::to_string).unwrap_or_default()
}

fn sweep_row(args: &SweepArgs, n: u32) -> SweepRow {
    let mut row = SweepRow {
        n,
        diameter: None,
        bound: router::diameter_bound(n).ok(),
        avg_path: None,
        clustering_structured: None,
        clustering_er_mean: None,
        error: None,
    };
    let config = match GraphConfig::from_numeric_seed(n, args.seed) {
        Ok(config) => config,
        Err(err) => {
            row.error = Some(err.to_string());
            return row;
        }
    };
    let mode = match averaging_mode(n, args.sample_pairs, args.seed) {
        Ok(mode) => mode,
        Err(failure) => {
            row.error = Some(failure.message);
            return row;
        }
    };
    let graph = build_graph(config);
    if matches!(args.metrics, MetricSelection::All | MetricSelection::Paths) {
        row.diameter = metrics::diameter(graph.topology());
        row.avg_path = metrics::average_shortest_path(graph.topology(), mode);
    }
    if matches!(
        args.metrics,
        MetricSelection::All | MetricSelection::Clustering
    ) {
        row.clustering_structured = Some(metrics::clustering_coefficient(graph.topology()));
        let mut total = 0.0;
        for trial in 0..args.er_trials {
            let er_seed = seeding::sub_seed(args.seed, "sweep-er", &[n as u64, trial]);
            let er = baselines::er_random_graph(n, graph.edge_count(), er_seed)
                .expect("matched edge count always fits");
            total += metrics::clustering_coefficient(&er);
        }
        row.clustering_er_mean = (args.er_trials > 0).then(|| total / args.er_trials as f64);
    }
    row
}

fn sweep_cmd(args: SweepArgs) -> Result<Output, Failure> {
    let rows: Vec<SweepRow> = args.n_list.iter().map(|&n| sweep_row(&args, n)).collect();
    let n_list = args
        .n_list
        .iter()
        .map(u32::to_string)
        .collect::<Vec<_>>()
        .join(",");
    let payload = match args.format {
        Format::Json => {
            let params = json!({
                "n_list": args.n_list,
                "seed": args.seed,
                "er_trials": args.er_trials,
                "sample_pairs": args.sample_pairs,
                "metrics": args.metrics.label(),
            });
            json_payload("sweep", args.seed, params, rows)
        }
        Format::Csv => {
            let mut payload = csv_header(
                "sweep",
                args.seed,
                &[
                    ("n_list", n_list),
                    ("er_trials", args.er_trials.to_string()),
                    (
                        "sample_pairs",
                        args.sample_pairs
                            .map(|p| p.to_string())
                            .unwrap_or_else(|| "none".into()),
                    ),
                    ("metrics", args.metrics.label().to_string()),
                ],
            );
            payload.push_str(
                "n,diameter,bound,avg_path,clustering_structured,clustering_er_mean,error\n",
            );
            for row in &rows {
                let _ = writeln!(
                    payload,
                    "{},{},{},{},{},{},{}",
                    row.n,
                    fmt_opt(&row.diameter),
                    fmt_opt(&row.bound),
                    fmt_opt(&row.avg_path),
                    fmt_opt(&row.clustering_structured),
                    fmt_opt(&row.clustering_er_mean),
                    fmt_opt(&row.error),
                );
            }
            payload
        }
    };
    Ok(Output {
        payload,
        out: args.out,
    })
}

#[derive(Serialize)]
struct CaptureJson {
    captured: Vec<u32>,
    revealed_key_ids: Vec<String>,
    revealed_count: usize,
    total_links: usize,
    fraction_compromised: f64,
}

fn capture_cmd(args: CaptureArgs) -> Result<Output, Failure> {
    require_json(args.common.format)?;
    let base = display_base(args.one_based, &args.common.out)?;
    let graph = build_graph(GraphConfig::from_numeric_seed(
        args.common.n,
        args.common.seed,
    )?);
    let captured: BTreeSet<NodeId> = args.nodes.iter().map(|&i| NodeId::new(i)).collect();
    let report = baselines::capture_report(&graph, &captured)?;
    let report = CaptureJson {
        captured: report.captured.iter().map(|c| c.index() + base).collect(),
        revealed_key_ids: report
            .revealed_key_ids
            .iter()
            .map(|&id| key_id_string(id, base))
            .collect(),
        revealed_count: report.revealed_count,
        total_links: report.total_links,
        fraction_compromised: report.fraction_compromised,
    };
    let params = json!({
        "n": args.common.n,
        "seed": args.common.seed,
        "nodes": args.nodes,
        "one_based": args.one_based,
    });
    Ok(Output {
        payload: json_payload("capture", args.common.seed, params, report),
        out: args.common.out,
    })
}

#[derive(Serialize)]
struct BaselineTrialRow {
    model: &'static str,
    n: u32,
    trial: u64,
    edges: usize,
    connected: bool,
    diameter: Option<u32>,
    avg_path: Option<f64>,
    clustering: f64,
}

#[derive(Serialize)]
struct BaselineSummaryRow {
    model: &'static str,
    n: u32,
    trials: u64,
    connectivity_probability: f64,
    edges_mean: f64,
    clustering_mean: f64,
}

fn baseline_model(args: &BaselineArgs) -> Result<BaselineModel, Failure> {
    match args.model {
        ModelKind::Ring => Ok(BaselineModel::Ring { n: args.n }),
        ModelKind::Eg => {
            let pool = args
                .pool
                .ok_or_else(|| Failure::usage("the eg model requires --pool"))?;
            let ring_size = args
                .ring_size
                .ok_or_else(|| Failure::usage("the eg model requires --ring-size"))?;
            Ok(BaselineModel::Eg(EgConfig::new(
                args.n,
                pool,
                ring_size,
                args.trials,
                args.seed,
            )?))
        }
        ModelKind::Er => {
            let edge_count = match args.edges {
                Some(edges) => edges,
                None => keygraph::structured_edge_count(args.n)?,
            };
            Ok(BaselineModel::Er {
                n: args.n,
                edge_count,
                seed: args.seed,
            })
        }
    }
}

fn baseline_cmd(args: BaselineArgs) -> Result<Output, Failure> {
    if args.trials == 0 {
        return Err(Failure::usage("--trials must be at least 1"));
    }
    let model = baseline_model(&args)?;
    let mut trial_rows = Vec::with_capacity(args.trials as usize);
    for trial in 0..args.trials {
        let graph = model.generate(trial)?;
        let connected = graph.is_connected();
        trial_rows.push(BaselineTrialRow {
            model: model.name(),
            n: args.n,
            trial,
            edges: graph.edge_count(),
            connected,
            diameter: metrics::diameter(&graph),
            avg_path: metrics::average_shortest_path(&graph, PathAveraging::Exact),
            clustering: metrics::clustering_coefficient(&graph),
        });
    }
    let params_csv = [
        ("model", model.name().to_string()),
        ("n", args.n.to_string()),
        (
            "pool",
            args.pool
                .map(|p| p.to_string())
                .unwrap_or_else(|| "none".into()),
        ),
        (
            "ring_size",
            args.ring_size
                .map(|r| r.to_string())
                .unwrap_or_else(|| "none".into()),
        ),
        (
            "edges",
            args.edges
                .map(|e| e.to_string())
                .unwrap_or_else(|| "auto".into()),
        ),
        ("trials", args.trials.to_string()),
        ("summary", args.summary.to_string()),
    ];
    let params_json = json!({
        "model": model.name(),
        "n": args.n,
        "seed": args.seed,
        "pool": args.pool,
        "ring_size": args.ring_size,
        "edges": args.edges,
        "trials": args.trials,
        "summary": args.summary,
    });
    let payload = if args.summary {
        let connected = trial_rows.iter().filter(|r| r.connected).count() as f64;
        let summary = BaselineSummaryRow {
            model: model.name(),
            n: args.n,
            trials: args.trials,
            connectivity_probability: connected / args.trials as f64,
            edges_mean: trial_rows.iter().map(|r| r.edges as f64).sum::<f64>()
                / args.trials as f64,
            clustering_mean: trial_rows.iter().map(|r| r.clustering).sum::<f64>()
                / args.trials as f64,
        };
        match args.format {
            Format::Json => json_payload("baseline", args.seed, params_json, summary),
            Format::Csv => {
                let mut payload = csv_header("baseline", args.seed, &params_csv);
                payload.push_str(
                    "model,n,trials,connectivity_probability,edges_mean,clustering_mean\n",
                );
                let _ = writeln!(
                    payload,
                    "{},{},{},{},{},{}",
                    summary.model,
                    summary.n,
                    summary.trials,
                    summary.connectivity_probability,
                    summary.edges_mean,
                    summary.clustering_mean,
                );
                payload
            }
        }
    } else {
        match args.format {
            Format::Json => json_payload("baseline", args.seed, params_json, trial_rows),
            Format::Csv => {
                let mut payload = csv_header("baseline", args.seed, &params_csv);
                payload.push_str("model,n,trial,edges,connected,diameter,avg_path,clustering\n");
                for row in &trial_rows {
                    let _ = writeln!(
                        payload,
                        "{},{},{},{},{},{},{},{}",
                        row.model,
                        row.n,
                        row.trial,
                        row.edges,
                        row.connected,
                        fmt_opt(&row.diameter),
                        fmt_opt(&row.avg_path),
                        row.clustering,
                    );
                }
                payload
            }
        }
    };
    Ok(Output {
        payload,
        out: args.out,
    })
}

#[derive(Serialize)]
struct MismatchJson {
    src: u32,
    dst: u32,
    greedy_hops: u32,
    bfs_hops: u32,
}

#[derive(Serialize)]
struct VerifyReport {
    n: u32,
    bound: Option<u32>,
    bfs_diameter: Option<u32>,
    max_greedy_hops: u32,
    bound_holds: Option<bool>,
    bound_tight: Option<bool>,
    pairs_checked: u64,
    mismatch_count: usize,
    mismatches: Vec<MismatchJson>,
}

fn verify_cmd(args: VerifyArgs) -> Result<Output, Failure> {
    require_json(args.common.format)?;
    let base = display_base(args.one_based, &args.common.out)?;
    if args.common.n > VERIFY_LIMIT {
        return Err(Failure::usage(format!(
            "verify checks all ordered pairs exhaustively; use --n of at most {VERIFY_LIMIT}"
        )));
    }
    let graph = build_graph(GraphConfig::from_numeric_seed(
        args.common.n,
        args.common.seed,
    )?);
    let optimality = metrics::verify_greedy_optimality(&graph);
    let max_greedy_hops = metrics::max_route_hops(&graph);
    let bound = router::diameter_bound(args.common.n).ok();
    let bfs_diameter = metrics::diameter(graph.topology());
    let report = VerifyReport {
        n: args.common.n,
        bound,
        bfs_diameter,
        max_greedy_hops,
        bound_holds: bound
            .zip(bfs_diameter)
            .map(|(b, d)| d <= b && max_greedy_hops <= b),
        bound_tight: bound.zip(bfs_diameter).map(|(b, d)| d == b),
        pairs_checked: optimality.pairs_checked,
        mismatch_count: optimality.mismatches.len(),
        mismatches: optimality
            .mismatches
            .iter()
            .map(|m| MismatchJson {
                src: m.src.index() + base,
                dst: m.dst.index() + base,
                greedy_hops: m.greedy_hops,
                bfs_hops: m.bfs_hops,
            })
            .collect(),
    };
    let params = json!({
        "n": args.common.n,
        "seed": args.common.seed,
        "one_based": args.one_based,
    });
    Ok(Output {
        payload: json_payload("verify", args.common.seed, params, report),
        out: args.common.out,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_capture(args: &[&str]) -> (i32, String, String) {
        let mut stdout = Vec::new();
        let mut stderr = Vec::new();
        let code = run(args.iter().copied(), &mut stdout, &mut stderr);
        (
            code,
            String::from_utf8(stdout).unwrap(),
            String::from_utf8(stderr).unwrap(),
        )
    }

    #[test]
    fn route_between_a_node_and_itself_is_zero_hops() {
        let (code, out, _) =
            run_capture(&["keymesh", "route", "--n", "16", "--src", "0", "--dst", "0"]);
        assert_eq!(code, 0);
        let value: serde_json::Value = serde_json::from_str(&out).unwrap();
        assert_eq!(value["report"]["hop_count"], 0);
        assert_eq!(value["report"]["hops"], serde_json::json!([0]));
    }

    #[test]
    fn unknown_subcommand_is_a_usage_error() {
        let (code, _, err) = run_capture(&["keymesh", "frobnicate"]);
        assert_eq!(code, 2);
        assert!(!err.is_empty());
    }

    #[test]
    fn out_of_range_node_is_a_usage_error_with_json_object() {
        let (code, _, err) =
            run_capture(&["keymesh", "route", "--n", "16", "--src", "0", "--dst", "99"]);
        assert_eq!(code, 2);
        let value: serde_json::Value = serde_json::from_str(err.trim()).unwrap();
        assert_eq!(value["error"]["kind"], "node-out-of-range");
    }

    #[test]
    fn one_based_rejects_file_output() {
        let (code, _, err) = run_capture(&[
            "keymesh",
            "topology",
            "--n",
            "8",
            "--one-based",
            "--out",
            "/tmp/keymesh-one-based-reject.json",
        ]);
        assert_eq!(code, 2);
        assert!(err.contains("0-based"));
    }

    #[test]
    fn help_exits_zero() {
        let (code, out, _) = run_capture(&["keymesh", "--help"]);
        assert_eq!(code, 0);
        assert!(out.contains("topology"));
    }
}
