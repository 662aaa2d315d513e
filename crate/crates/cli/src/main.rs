//! Command-line front end for the isomorphism engine.
//!
//! Exit codes: 0 for a definite answer (or plain success), 2 when the engine
//! gives up with an indeterminate verdict, 1 for any error, including bad
//! usage. Clap's default usage exit code is 2, which would collide with the
//! indeterminate code, so argument errors are remapped.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use gbsiso::baselines::{color_refinement, fixture, wl1_compare, Wl1Outcome, FIXTURE_NAMES};
use gbsiso::correlations::CorrelationTensor;
use gbsiso::encoding::{encode, moments_from_sampler};
use gbsiso::graph::{
    emit_edge_list, emit_graph6, generate, isomorphic_copy, parse_edge_list, parse_graph6,
    GraphModel,
};
use gbsiso::pipeline::{run, run_corpus, Config, CorpusPair, RunReport, Verdict};
use gbsiso::Graph;

#[derive(Parser)]
#[command(name = "gbsiso", version, about = "Graph isomorphism via photon-counting correlations")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Decide whether two graphs are isomorphic.
    Test(TestArgs),
    /// Generate a graph (optionally with a scrambled isomorphic partner).
    Gen(GenArgs),
    /// Print the sampler encoding of a graph.
    Encode(EncodeArgs),
    /// Print a photon-number cumulant tensor of a graph.
    Corr(CorrArgs),
    /// Compare two graphs with 1-dimensional color refinement only.
    Baseline(BaselineArgs),
    /// Run the engine over a corpus of graph pairs.
    Bench(BenchArgs),
}

#[derive(Args)]
struct PipelineOpts {
    /// Highest cumulant order used for refinement.
    #[arg(long, default_value_t = 3)]
    kmax: usize,
    /// Spectral-radius target of the rescaled adjacency matrix, in (0, 1).
    #[arg(long, default_value_t = 0.9)]
    alpha: f64,
    /// Quantization step as a fraction of the largest tensor entry.
    #[arg(long, default_value_t = 1e-9)]
    tau_rel: f64,
    /// Node budget for the final candidate enumeration.
    #[arg(long, default_value_t = 1_000_000)]
    enum_cap: u64,
    /// Size of the worker thread pool (default: all cores).
    #[arg(long)]
    threads: Option<usize>,
    /// Seed recorded in the report (the decision procedure is deterministic).
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Record per-round wall-clock times (breaks byte-for-byte determinism).
    #[arg(long)]
    timings: bool,
    /// Multiplier on the estimated cost of the next refinement round.
    #[arg(long, default_value_t = 1.0)]
    cost_scale: f64,
}

impl PipelineOpts {
    fn to_config(&self) -> Config {
        Config {
            kmax: self.kmax,
            alpha: self.alpha,
            tau_rel: self.tau_rel,
            enum_cap: self.enum_cap,
            threads: self.threads,
            seed: self.seed,
            timings: self.timings,
            cost_scale: self.cost_scale,
        }
    }
}

#[derive(Args)]
struct IoOpts {
    /// Input format; auto picks graph6 for .g6/.graph6 files, edge list otherwise.
    #[arg(long, value_enum, default_value_t = FormatOpt::Auto)]
    format: FormatOpt,
    /// Emit the machine-readable JSON report instead of text.
    #[arg(long)]
    json: bool,
    /// Write output to this file instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FormatOpt {
    Auto,
    G6,
    El,
}

#[derive(Args)]
struct TestArgs {
    /// First graph file.
    g1: PathBuf,
    /// Second graph file.
    g2: PathBuf,
    #[command(flatten)]
    pipeline: PipelineOpts,
    #[command(flatten)]
    io: IoOpts,
}

#[derive(Args)]
struct GenArgs {
    /// er, regular, complete, path, cycle, star, or a named fixture.
    #[arg(long)]
    model: String,
    /// Number of vertices (ignored for fixtures).
    #[arg(short = 'M', long)]
    order: Option<usize>,
    /// Edge probability for the er model.
    #[arg(long, default_value_t = 0.5)]
    p: f64,
    /// Degree for the regular model.
    #[arg(long, default_value_t = 3)]
    degree: usize,
    /// Also write an isomorphic copy under a random relabeling.
    #[arg(long, value_enum, default_value_t = PairOpt::None)]
    pair: PairOpt,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// graph6 (simple graphs only) or edge list.
    #[arg(long = "gen-format", value_enum, default_value_t = GenFormat::G6)]
    format: GenFormat,
    /// Output path prefix; files get .g6/.el and _iso suffixes.
    #[arg(long)]
    out: String,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum PairOpt {
    None,
    Iso,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum GenFormat {
    G6,
    El,
}

#[derive(Args)]
struct EncodeArgs {
    graph: PathBuf,
    #[arg(long, default_value_t = 0.9)]
    alpha: f64,
    #[arg(long, value_enum, default_value_t = FormatOpt::Auto)]
    format: FormatOpt,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CorrArgs {
    graph: PathBuf,
    /// Cumulant order.
    #[arg(short = 'k', long, default_value_t = 2)]
    order: usize,
    #[arg(long, default_value_t = 0.9)]
    alpha: f64,
    /// Emit one `i_1,...,i_k,value` line per entry instead of JSON.
    #[arg(long)]
    csv: bool,
    /// Lift the default cap on tensor entries.
    #[arg(long)]
    allow_large: bool,
    #[arg(long, value_enum, default_value_t = FormatOpt::Auto)]
    format: FormatOpt,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct BaselineArgs {
    g1: PathBuf,
    g2: PathBuf,
    #[command(flatten)]
    io: IoOpts,
}

#[derive(Args)]
struct BenchArgs {
    /// Directory holding a pairs.txt manifest and the graph files it names.
    corpus: PathBuf,
    #[command(flatten)]
    pipeline: PipelineOpts,
    /// Also run the named baseline on every pair (only wl1 is known).
    #[arg(long)]
    baseline: Option<String>,
    #[arg(long, value_enum, default_value_t = FormatOpt::Auto)]
    format: FormatOpt,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let ok = matches!(
                err.kind(),
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion
            );
            let _ = err.print();
            return if ok { ExitCode::SUCCESS } else { ExitCode::from(1) };
        }
    };
    match dispatch(cli.command) {
        Ok(code) => code,
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

fn dispatch(command: Command) -> Result<ExitCode, String> {
    match command {
        Command::Test(args) => cmd_test(args),
        Command::Gen(args) => cmd_gen(args),
        Command::Encode(args) => cmd_encode(args),
        Command::Corr(args) => cmd_corr(args),
        Command::Baseline(args) => cmd_baseline(args),
        Command::Bench(args) => cmd_bench(args),
    }
}

fn init_threads(threads: Option<usize>) -> Result<(), String> {
    if let Some(n) = threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| format!("thread pool: {e}"))?;
    }
    Ok(())
}

fn load_graph(path: &Path, format: FormatOpt) -> Result<Graph, String> {
    let text =
        fs::read_to_string(path).map_err(|e| format!("{}: {e}", path.display()))?;
    let graph6 = match format {
        FormatOpt::G6 => true,
        FormatOpt::El => false,
        FormatOpt::Auto => path
            .extension()
            .map(|ext| ext.eq_ignore_ascii_case("g6") || ext.eq_ignore_ascii_case("graph6"))
            .unwrap_or(false),
    };
    let parsed = if graph6 {
        let line = text.lines().find(|l| !l.trim().is_empty()).unwrap_or("");
        parse_graph6(line)
    } else {
        parse_edge_list(&text)
    };
    parsed.map_err(|e| format!("{}: {e}", path.display()))
}

/// Prints a line to stdout, treating a broken pipe as a silent success so
/// that piping into `head` does not turn into an error.
fn print_stdout(text: &str) -> Result<(), String> {
    use std::io::{ErrorKind, Write};
    let stdout = std::io::stdout();
    let mut lock = stdout.lock();
    match writeln!(lock, "{text}") {
        Ok(()) => Ok(()),
        Err(e) if e.kind() == ErrorKind::BrokenPipe => Ok(()),
        Err(e) => Err(format!("stdout: {e}")),
    }
}

fn deliver(text: &str, out: &Option<PathBuf>) -> Result<(), String> {
    match out {
        Some(path) => {
            let mut payload = text.to_string();
            if !payload.ends_with('\n') {
                payload.push('\n');
            }
            fs::write(path, payload).map_err(|e| format!("{}: {e}", path.display()))
        }
        None => print_stdout(text),
    }
}

fn to_json<T: Serialize>(value: &T) -> Result<String, String> {
    serde_json::to_string_pretty(value).map_err(|e| e.to_string())
}

fn render_report(report: &RunReport) -> String {
    let mut text = String::new();
    let _ = writeln!(text, "verdict: {}", report.verdict.label());
    if let Some(reason) = &report.reason {
        let _ = writeln!(text, "reason: {reason}");
    }
    let _ = writeln!(text, "order: {}", report.order);
    if let Some(witness) = &report.witness {
        let images: Vec<String> = witness.as_slice().iter().map(|v| v.to_string()).collect();
        let _ = writeln!(text, "witness: {}", images.join(" "));
    }
    if let Some(bound) = &report.surviving_bound {
        let _ = writeln!(text, "surviving: {bound}");
    }
    for entry in &report.trace {
        let _ = write!(
            text,
            "k={} surviving={} status={}",
            entry.k,
            entry.surviving,
            entry.status.label()
        );
        match entry.millis {
            Some(ms) => {
                let _ = writeln!(text, " millis={ms}");
            }
            None => {
                let _ = writeln!(text);
            }
        }
    }
    text.truncate(text.trim_end().len());
    text
}

fn verdict_exit(verdict: Verdict) -> ExitCode {
    if verdict == Verdict::Indeterminate {
        ExitCode::from(2)
    } else {
        ExitCode::SUCCESS
    }
}

fn cmd_test(args: TestArgs) -> Result<ExitCode, String> {
    init_threads(args.pipeline.threads)?;
    let g1 = load_graph(&args.g1, args.io.format)?;
    let g2 = load_graph(&args.g2, args.io.format)?;
    let config = args.pipeline.to_config();
    let mut report = run(&g1, &g2, &config).map_err(|e| e.to_string())?;
    report
        .versions
        .insert("gbsiso-cli".to_string(), env!("CARGO_PKG_VERSION").to_string());
    let text = if args.io.json {
        to_json(&report)?
    } else {
        render_report(&report)
    };
    deliver(&text, &args.io.out)?;
    Ok(verdict_exit(report.verdict))
}

#[derive(Serialize)]
struct GenManifest {
    model: String,
    m: usize,
    seed: u64,
    #[serde(skip_serializing_if = "Option::is_none")]
    p: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    degree: Option<usize>,
    format: String,
    files: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    permutation: Option<Vec<usize>>,
}

fn cmd_gen(args: GenArgs) -> Result<ExitCode, String> {
    let mut p = None;
    let mut degree = None;
    let graph = if FIXTURE_NAMES.contains(&args.model.as_str()) {
        fixture(&args.model).map_err(|e| e.to_string())?
    } else {
        let model = match args.model.as_str() {
            "er" => {
                p = Some(args.p);
                GraphModel::ErdosRenyi { p: args.p }
            }
            "regular" => {
                degree = Some(args.degree);
                GraphModel::RandomRegular { degree: args.degree }
            }
            "complete" => GraphModel::Complete,
            "path" => GraphModel::Path,
            "cycle" => GraphModel::Cycle,
            "star" => GraphModel::Star,
            other => {
                return Err(format!(
                    "unknown model {other:?}; expected er, regular, complete, path, cycle, \
                     star, or one of {FIXTURE_NAMES:?}"
                ))
            }
        };
        let m = args
            .order
            .ok_or_else(|| format!("model {:?} needs --order", args.model))?;
        generate(&model, m, args.seed).map_err(|e| e.to_string())?
    };

    let (ext, emit): (&str, fn(&Graph) -> Result<String, String>) = match args.format {
        GenFormat::G6 => ("g6", |g| emit_graph6(g).map_err(|e| e.to_string())),
        GenFormat::El => ("el", |g| Ok(emit_edge_list(g))),
    };
    let mut files = Vec::new();
    let main_path = format!("{}.{ext}", args.out);
    fs::write(&main_path, format!("{}\n", emit(&graph)?))
        .map_err(|e| format!("{main_path}: {e}"))?;
    files.push(main_path);

    let permutation = if args.pair == PairOpt::Iso {
        let (copy, pi) = isomorphic_copy(&graph, args.seed.wrapping_add(1));
        let iso_path = format!("{}_iso.{ext}", args.out);
        fs::write(&iso_path, format!("{}\n", emit(&copy)?))
            .map_err(|e| format!("{iso_path}: {e}"))?;
        files.push(iso_path);
        Some(pi.as_slice().to_vec())
    } else {
        None
    };

    let manifest = GenManifest {
        model: args.model,
        m: graph.order(),
        seed: args.seed,
        p,
        degree,
        format: ext.to_string(),
        files,
        permutation,
    };
    print_stdout(&to_json(&manifest)?)?;
    Ok(ExitCode::SUCCESS)
}

#[derive(Serialize)]
struct EncodeOut {
    m: usize,
    c: f64,
    lambda: Vec<f64>,
    r: Vec<f64>,
    /// Unitary as rows of [re, im] pairs.
    u: Vec<Vec<[f64; 2]>>,
}

fn cmd_encode(args: EncodeArgs) -> Result<ExitCode, String> {
    let graph = load_graph(&args.graph, args.format)?;
    let enc = encode(graph.adjacency(), args.alpha).map_err(|e| e.to_string())?;
    let m = enc.modes();
    let u = (0..m)
        .map(|i| {
            (0..m)
                .map(|j| {
                    let z = enc.unitary()[(i, j)];
                    [z.re, z.im]
                })
                .collect()
        })
        .collect();
    let out = EncodeOut {
        m,
        c: enc.rescale_factor(),
        lambda: enc.spectrum().to_vec(),
        r: enc.squeezing().to_vec(),
        u,
    };
    deliver(&to_json(&out)?, &args.out)?;
    Ok(ExitCode::SUCCESS)
}

#[derive(Serialize)]
struct CorrOut {
    m: usize,
    order: usize,
    alpha: f64,
    rescale_factor: f64,
    /// Row-major flat tensor, index i_1 slowest.
    data: Vec<f64>,
}

fn cmd_corr(args: CorrArgs) -> Result<ExitCode, String> {
    let graph = load_graph(&args.graph, args.format)?;
    let enc = encode(graph.adjacency(), args.alpha).map_err(|e| e.to_string())?;
    let moments = moments_from_sampler(&enc).map_err(|e| e.to_string())?;
    let tensor = if args.allow_large {
        CorrelationTensor::compute_with_entry_cap(&moments, args.order, usize::MAX)
    } else {
        CorrelationTensor::compute(&moments, args.order)
    }
    .map_err(|e| e.to_string())?;

    let text = if args.csv {
        let m = tensor.modes();
        let k = tensor.order();
        let mut text = String::new();
        let header: Vec<String> = (1..=k).map(|i| format!("i{i}")).collect();
        let _ = writeln!(text, "{},value", header.join(","));
        let mut indices = vec![0usize; k];
        for (flat, value) in tensor.data().iter().enumerate() {
            let mut rest = flat;
            for slot in (0..k).rev() {
                indices[slot] = rest % m;
                rest /= m;
            }
            let cells: Vec<String> = indices.iter().map(|i| i.to_string()).collect();
            let _ = writeln!(text, "{},{value}", cells.join(","));
        }
        text.truncate(text.trim_end().len());
        text
    } else {
        to_json(&CorrOut {
            m: tensor.modes(),
            order: tensor.order(),
            alpha: args.alpha,
            rescale_factor: enc.rescale_factor(),
            data: tensor.data().to_vec(),
        })?
    };
    deliver(&text, &args.out)?;
    Ok(ExitCode::SUCCESS)
}

#[derive(Serialize)]
struct ColorStats {
    num_colors: usize,
    rounds: usize,
}

#[derive(Serialize)]
struct BaselineOut {
    outcome: String,
    g1: ColorStats,
    g2: ColorStats,
}

fn cmd_baseline(args: BaselineArgs) -> Result<ExitCode, String> {
    let g1 = load_graph(&args.g1, args.io.format)?;
    let g2 = load_graph(&args.g2, args.io.format)?;
    let outcome = wl1_compare(&g1, &g2);
    let stats = |g: &Graph| {
        let coloring = color_refinement(g);
        ColorStats {
            num_colors: coloring.num_colors(),
            rounds: coloring.rounds(),
        }
    };
    let out = BaselineOut {
        outcome: match outcome {
            Wl1Outcome::Distinguished => "distinguished".to_string(),
            Wl1Outcome::Indeterminate => "indeterminate".to_string(),
        },
        g1: stats(&g1),
        g2: stats(&g2),
    };
    let text = if args.io.json {
        to_json(&out)?
    } else {
        format!(
            "outcome: {}\ng1: colors={} rounds={}\ng2: colors={} rounds={}",
            out.outcome, out.g1.num_colors, out.g1.rounds, out.g2.num_colors, out.g2.rounds
        )
    };
    deliver(&text, &args.io.out)?;
    Ok(match outcome {
        Wl1Outcome::Distinguished => ExitCode::SUCCESS,
        Wl1Outcome::Indeterminate => ExitCode::from(2),
    })
}

#[derive(Serialize)]
struct BenchSummary {
    total: usize,
    isomorphic: usize,
    not_isomorphic: usize,
    indeterminate: usize,
    errors: usize,
    agreements: usize,
    disagreements: usize,
    total_millis: u128,
}

#[derive(Serialize)]
struct BaselineSummary {
    name: String,
    distinguished: usize,
    indeterminate: usize,
    /// Pairs the baseline distinguished whose ground truth says isomorphic.
    false_rejections: usize,
}

#[derive(Serialize)]
struct BenchReport {
    corpus: String,
    config: Config,
    summary: BenchSummary,
    #[serde(skip_serializing_if = "Option::is_none")]
    baseline: Option<BaselineSummary>,
    pairs: Vec<serde_json::Value>,
}

fn parse_manifest(dir: &Path, format: FormatOpt) -> Result<Vec<CorpusPair>, String> {
    let manifest = dir.join("pairs.txt");
    let text =
        fs::read_to_string(&manifest).map_err(|e| format!("{}: {e}", manifest.display()))?;
    let mut pairs = Vec::new();
    for (lineno, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let tokens: Vec<&str> = line.split_whitespace().collect();
        if tokens.len() < 3 || tokens.len() > 4 {
            return Err(format!(
                "{}:{}: expected `id path1 path2 [iso|non-iso]`",
                manifest.display(),
                lineno + 1
            ));
        }
        let truth = match tokens.get(3) {
            None => None,
            Some(&"iso") => Some(true),
            Some(&"non-iso") => Some(false),
            Some(other) => {
                return Err(format!(
                    "{}:{}: unknown truth label {other:?}",
                    manifest.display(),
                    lineno + 1
                ))
            }
        };
        pairs.push(CorpusPair {
            id: tokens[0].to_string(),
            g1: load_graph(&dir.join(tokens[1]), format)?,
            g2: load_graph(&dir.join(tokens[2]), format)?,
            truth,
        });
    }
    if pairs.is_empty() {
        return Err(format!("{}: no pairs", manifest.display()));
    }
    Ok(pairs)
}

fn cmd_bench(args: BenchArgs) -> Result<ExitCode, String> {
    init_threads(args.pipeline.threads)?;
    if let Some(name) = &args.baseline {
        if name != "wl1" {
            return Err(format!("unknown baseline {name:?}; only wl1 is known"));
        }
    }
    let pairs = parse_manifest(&args.corpus, args.format)?;
    let config = args.pipeline.to_config();
    config.validate().map_err(|e| e.to_string())?;

    let wl1: Option<Vec<Wl1Outcome>> = args
        .baseline
        .as_ref()
        .map(|_| pairs.iter().map(|p| wl1_compare(&p.g1, &p.g2)).collect());
    let outcomes = run_corpus(&pairs, &config);

    let mut summary = BenchSummary {
        total: outcomes.len(),
        isomorphic: 0,
        not_isomorphic: 0,
        indeterminate: 0,
        errors: 0,
        agreements: 0,
        disagreements: 0,
        total_millis: 0,
    };
    for outcome in &outcomes {
        match outcome.verdict {
            Some(Verdict::Isomorphic) => summary.isomorphic += 1,
            Some(Verdict::NotIsomorphic) => summary.not_isomorphic += 1,
            Some(Verdict::Indeterminate) => summary.indeterminate += 1,
            None => summary.errors += 1,
        }
        match outcome.agrees {
            Some(true) => summary.agreements += 1,
            Some(false) => summary.disagreements += 1,
            None => {}
        }
        summary.total_millis += outcome.millis;
    }

    let baseline = wl1.as_ref().map(|results| {
        let mut distinguished = 0;
        let mut indeterminate = 0;
        let mut false_rejections = 0;
        for (result, pair) in results.iter().zip(&pairs) {
            match result {
                Wl1Outcome::Distinguished => {
                    distinguished += 1;
                    if pair.truth == Some(true) {
                        false_rejections += 1;
                    }
                }
                Wl1Outcome::Indeterminate => indeterminate += 1,
            }
        }
        BaselineSummary {
            name: "wl1".to_string(),
            distinguished,
            indeterminate,
            false_rejections,
        }
    });

    let pair_values = outcomes
        .iter()
        .enumerate()
        .map(|(i, outcome)| {
            let mut value = serde_json::to_value(outcome).map_err(|e| e.to_string())?;
            if let Some(results) = &wl1 {
                let label = match results[i] {
                    Wl1Outcome::Distinguished => "distinguished",
                    Wl1Outcome::Indeterminate => "indeterminate",
                };
                value
                    .as_object_mut()
                    .expect("outcome serializes to an object")
                    .insert("wl1".to_string(), serde_json::Value::String(label.into()));
            }
            Ok(value)
        })
        .collect::<Result<Vec<_>, String>>()?;

    let report = BenchReport {
        corpus: args.corpus.display().to_string(),
        config,
        summary,
        baseline,
        pairs: pair_values,
    };
    deliver(&to_json(&report)?, &args.out)?;
    Ok(ExitCode::SUCCESS)
}
