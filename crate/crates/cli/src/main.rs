use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use anyhow::{anyhow, Context};
use clap::{Parser, Subcommand, ValueEnum};
use log::info;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use fliprepair::graph::{parse_graph, write_graph, write_tour};
use fliprepair::oracle::{best_count, enumerate_tours, tv_from_counts};
use fliprepair::sampler::{sample_tour, Engine, SampleConfig, SampleError, SampleReport};
use fliprepair::store::MAX_CHUNK;
use fliprepair::timing::{time_walk, LadderRow, DEFAULT_LADDER};
use fliprepair::verify::{self, Check, SkewdetParams};
use fliprepair::walk::DEFAULT_C_MIX;
use fliprepair::{DirectedMultigraph, WalkRng};

#[derive(Parser, Debug, Serialize)]
#[command(name = "fliprepair", version, about = "Uniform Eulerian tour sampling")]
struct Cli {
    /// Directory for the run manifest and output files.
    #[arg(long, global = true, default_value = "fliprepair-out")]
    out_dir: PathBuf,
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand, Debug, Serialize)]
enum Cmd {
    /// Sample tours of a graph file.
    Sample(SampleArgs),
    /// Run invariant suites; one JSON line per check.
    Verify(VerifyArgs),
    /// Count Eulerian tours.
    Count(CountArgs),
    /// Generate a random Eulerian graph.
    Gen(GenArgs),
    /// Per-step timings as CSV.
    Bench(BenchArgs),
}

#[derive(clap::Args, Debug, Serialize)]
struct SampleArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long, default_value_t = 0.1)]
    eps: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Independent runs; run `i` uses seed `seed ^ i`.
    #[arg(long, default_value_t = 1)]
    runs: u64,
    /// Compare the empirical distribution against the enumerated census.
    #[arg(long)]
    tv_against_census: bool,
    /// Override the number of walk steps.
    #[arg(long)]
    steps: Option<u64>,
    #[arg(long, value_enum, default_value_t = EngineArg::Auto)]
    engine: EngineArg,
    /// Chunk size for the store engine.
    #[arg(long)]
    chunk: Option<usize>,
    #[arg(long, default_value_t = DEFAULT_C_MIX)]
    c_mix: f64,
    #[arg(long, default_value_t = 2.0)]
    c_net: f64,
    #[arg(long, default_value_t = 3)]
    gadget_min_degree: usize,
}

#[derive(ValueEnum, Clone, Copy, Debug, Serialize)]
enum EngineArg {
    Auto,
    Flat,
    Naive,
    Store,
}

impl From<EngineArg> for Engine {
    fn from(e: EngineArg) -> Engine {
        match e {
            EngineArg::Auto => Engine::Auto,
            EngineArg::Flat => Engine::Flat,
            EngineArg::Naive => Engine::Naive,
            EngineArg::Store => Engine::Store,
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Serialize)]
enum Suite {
    Skewdet,
    Chords,
    Chain,
    Switchnet,
    Oracle,
    All,
}

#[derive(clap::Args, Debug, Serialize)]
struct VerifyArgs {
    #[arg(long, value_enum)]
    suite: Suite,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// skewdet: largest n for the identity and covering checks.
    #[arg(long, default_value_t = 8)]
    n_max: usize,
    /// skewdet: largest n for the spectral gap checks.
    #[arg(long, default_value_t = 10)]
    gap_n_max: usize,
    /// skewdet: random instances per n.
    #[arg(long, default_value_t = 20)]
    seeds: usize,
    #[arg(long, default_value_t = 1000)]
    lsi_trials: usize,
    #[arg(long, default_value_t = 50)]
    matrices: usize,
    /// chords: arcs in the test graph.
    #[arg(long, default_value_t = 1024)]
    m: usize,
    /// chords: shared-randomness steps.
    #[arg(long, default_value_t = 100_000)]
    steps: u64,
    #[arg(long, default_value_t = 1024)]
    validate_every: u64,
    /// chain and oracle: number of random graphs.
    #[arg(long)]
    graphs: Option<usize>,
    /// chain and oracle: arc limit per graph.
    #[arg(long)]
    max_arcs: Option<usize>,
    /// switchnet: networks to audit.
    #[arg(long, default_value_t = 200)]
    nets: usize,
    /// switchnet: random settings for the contraction check.
    #[arg(long, default_value_t = 1000)]
    settings: usize,
}

#[derive(ValueEnum, Clone, Copy, Debug, Serialize)]
enum Method {
    Enumerate,
    Best,
}

#[derive(clap::Args, Debug, Serialize)]
struct CountArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long, value_enum, default_value_t = Method::Best)]
    method: Method,
}

#[derive(ValueEnum, Clone, Copy, Debug, Serialize)]
enum Model {
    Regular2,
    RandomEulerian,
    Bidirected,
}

#[derive(clap::Args, Debug, Serialize)]
struct GenArgs {
    #[arg(value_enum)]
    model: Model,
    #[arg(long)]
    n: usize,
    /// random-eulerian: permutations to superpose; bidirected: edges beyond a tree.
    #[arg(long, default_value_t = 3)]
    extra: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Graph file to write; stdout when absent.
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(clap::Args, Debug, Serialize)]
struct BenchArgs {
    /// Arc counts to time.
    #[arg(long, value_delimiter = ',', default_values_t = DEFAULT_LADDER)]
    ladder: Vec<usize>,
    #[arg(long, value_enum, default_value_t = EngineArg::Store)]
    engine: EngineArg,
    #[arg(long, default_value_t = 2000)]
    steps: u64,
    /// Chunk size override for the store engine.
    #[arg(long)]
    chunk: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

#[derive(Serialize)]
struct RunManifest<'a> {
    command: &'a str,
    config: &'a Cli,
    seed: Option<u64>,
    versions: Value,
    seconds: f64,
    outputs: Vec<PathBuf>,
    passed: bool,
}

enum Failure {
    /// Bad flags, unreadable or invalid input.
    Input(anyhow::Error),
    Internal(anyhow::Error),
}

impl<E: Into<anyhow::Error>> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Internal(e.into())
    }
}

fn input<T, E: Into<anyhow::Error>>(r: Result<T, E>) -> Result<T, Failure> {
    r.map_err(|e| Failure::Input(e.into()))
}

struct Outcome {
    passed: bool,
    outputs: Vec<PathBuf>,
}

fn read_graph(path: &Path) -> Result<DirectedMultigraph, Failure> {
    let text = input(fs::read_to_string(path).with_context(|| format!("reading {}", path.display())))?;
    input(parse_graph(&text).with_context(|| format!("parsing {}", path.display())))
}

fn write_out(dir: &Path, name: &str, contents: &str, outputs: &mut Vec<PathBuf>) -> Result<(), Failure> {
    let path = dir.join(name);
    fs::write(&path, contents).with_context(|| format!("writing {}", path.display()))?;
    outputs.push(path);
    Ok(())
}

fn cmd_sample(a: &SampleArgs, dir: &Path) -> Result<Outcome, Failure> {
    let g = read_graph(&a.graph)?;
    let base = SampleConfig {
        eps: a.eps,
        seed: a.seed,
        c_mix: a.c_mix,
        c_net: a.c_net,
        gadget_min_degree: a.gadget_min_degree,
        steps: a.steps,
        engine: a.engine.into(),
        chunk: a.chunk,
    };
    input(base.validate())?;
    input(g.check_eulerian())?;
    if a.runs == 0 {
        return Err(Failure::Input(anyhow!("--runs must be at least 1")));
    }
    let reports: Vec<Result<SampleReport, SampleError>> = (0..a.runs)
        .into_par_iter()
        .map(|i| sample_tour(&g, &SampleConfig { seed: a.seed ^ i, ..base.clone() }))
        .collect();
    let reports = reports.into_iter().collect::<Result<Vec<_>, _>>()?;
    info!("{} runs, {} walk steps each", reports.len(), reports[0].steps);

    let mut outputs = Vec::new();
    let tours: String = reports.iter().map(|r| write_tour(&r.tour)).collect();
    let mut lines = String::new();
    for r in &reports {
        lines.push_str(&serde_json::to_string(r)?);
        lines.push('\n');
    }
    write_out(dir, "tours.txt", &tours, &mut outputs)?;
    write_out(dir, "reports.jsonl", &lines, &mut outputs)?;
    if a.runs == 1 {
        print!("{lines}");
    }

    let mut passed = true;
    if a.tv_against_census {
        let census = input(enumerate_tours(&g))?;
        let mut hits = vec![0u64; census.count()];
        let mut outside = 0u64;
        for r in &reports {
            match census.index_of(&r.tour) {
                Some(k) => hits[k] += 1,
                None => outside += 1,
            }
        }
        let tv = tv_from_counts(&hits, a.runs);
        let bound = a.eps / 2.0 + 3.0 * (census.count() as f64 / a.runs as f64).sqrt();
        passed = outside == 0 && tv <= bound;
        let summary = json!({
            "runs": a.runs, "census": census.count(), "tv": tv, "bound": bound,
            "outside_census": outside, "pass": passed,
        });
        println!("{summary}");
        write_out(dir, "tv.json", &format!("{summary}\n"), &mut outputs)?;
    }
    Ok(Outcome { passed, outputs })
}

fn cmd_verify(a: &VerifyArgs, dir: &Path) -> Result<Outcome, Failure> {
    let want = |s: Suite| a.suite == Suite::All || a.suite == s;
    let mut checks: Vec<Check> = Vec::new();
    if want(Suite::Skewdet) {
        let p = SkewdetParams {
            gap_n_max: a.gap_n_max,
            n_max: a.n_max,
            seeds: a.seeds,
            lsi_trials: a.lsi_trials,
            covering_matrices: a.matrices,
            seed: a.seed,
        };
        checks.extend(input(verify::skewdet_suite(&p))?);
    }
    if want(Suite::Chain) {
        checks.extend(verify::chain_suite(a.graphs.unwrap_or(60), a.max_arcs.unwrap_or(12), a.seed));
    }
    if want(Suite::Oracle) {
        checks.extend(verify::oracle_suite(a.graphs.unwrap_or(30), a.max_arcs.unwrap_or(10), a.seed));
    }
    if want(Suite::Chords) {
        checks.extend(verify::chords_suite(a.m, a.steps, a.validate_every, a.seed));
    }
    if want(Suite::Switchnet) {
        checks.extend(verify::switchnet_suite(a.nets, a.settings, a.seed));
    }
    let mut lines = String::new();
    for c in &checks {
        lines.push_str(&serde_json::to_string(c)?);
        lines.push('\n');
    }
    print!("{lines}");
    let mut outputs = Vec::new();
    write_out(dir, "checks.jsonl", &lines, &mut outputs)?;
    Ok(Outcome { passed: verify::all_passed(&checks), outputs })
}

fn cmd_count(a: &CountArgs, dir: &Path) -> Result<Outcome, Failure> {
    let g = read_graph(&a.graph)?;
    let t = Instant::now();
    let (count, method) = match a.method {
        Method::Enumerate => (input(enumerate_tours(&g))?.count().to_string(), "enumerate"),
        Method::Best => (input(best_count(&g))?.to_string(), "best"),
    };
    // counts beyond u64 are written as strings
    let count = count.parse::<u64>().map(Value::from).unwrap_or(Value::String(count));
    let line = json!({"count": count, "method": method, "seconds": t.elapsed().as_secs_f64()}).to_string();
    println!("{line}");
    let mut outputs = Vec::new();
    write_out(dir, "count.json", &format!("{line}\n"), &mut outputs)?;
    Ok(Outcome { passed: true, outputs })
}

fn cmd_gen(a: &GenArgs) -> Result<Outcome, Failure> {
    let mut rng = WalkRng::from_seed(a.seed);
    let g = match a.model {
        Model::Regular2 => fliprepair::gen::regular2(a.n, &mut rng),
        Model::RandomEulerian => fliprepair::gen::random_eulerian(a.n, a.extra, &mut rng),
        Model::Bidirected => fliprepair::gen::bidirected(a.n, a.extra, &mut rng),
    };
    let text = write_graph(&input(g)?);
    let mut outputs = Vec::new();
    match &a.output {
        Some(p) => {
            fs::write(p, &text).with_context(|| format!("writing {}", p.display()))?;
            outputs.push(p.clone());
        }
        None => print!("{text}"),
    }
    Ok(Outcome { passed: true, outputs })
}

fn cmd_bench(a: &BenchArgs, dir: &Path) -> Result<Outcome, Failure> {
    if matches!(a.chunk, Some(b) if b == 0 || b > MAX_CHUNK) {
        return Err(Failure::Input(anyhow!("--chunk must lie in 1..={MAX_CHUNK}")));
    }
    let mut csv = format!("{}\n", LadderRow::CSV_HEADER);
    if a.steps > 0 {
        for &m in &a.ladder {
            if m < 4 {
                return Err(Failure::Input(anyhow!("ladder entries must be at least 4 arcs")));
            }
            let row = time_walk(m, a.engine.into(), a.steps, a.seed, a.chunk);
            info!("M={} {:.0} ns/step", row.m, row.ns_per_step);
            csv.push_str(&row.csv());
            csv.push('\n');
        }
    }
    print!("{csv}");
    let mut outputs = Vec::new();
    write_out(dir, "bench.csv", &csv, &mut outputs)?;
    Ok(Outcome { passed: true, outputs })
}

fn run(cli: &Cli) -> Result<Outcome, Failure> {
    fs::create_dir_all(&cli.out_dir).with_context(|| format!("creating {}", cli.out_dir.display()))?;
    match &cli.cmd {
        Cmd::Sample(a) => cmd_sample(a, &cli.out_dir),
        Cmd::Verify(a) => cmd_verify(a, &cli.out_dir),
        Cmd::Count(a) => cmd_count(a, &cli.out_dir),
        Cmd::Gen(a) => cmd_gen(a),
        Cmd::Bench(a) => cmd_bench(a, &cli.out_dir),
    }
}

fn write_manifest(cli: &Cli, outcome: &Outcome, seconds: f64) -> anyhow::Result<()> {
    let (command, seed) = match &cli.cmd {
        Cmd::Sample(a) => ("sample", Some(a.seed)),
        Cmd::Verify(a) => ("verify", Some(a.seed)),
        Cmd::Count(_) => ("count", None),
        Cmd::Gen(a) => ("gen", Some(a.seed)),
        Cmd::Bench(a) => ("bench", Some(a.seed)),
    };
    let manifest = RunManifest {
        command,
        config: cli,
        seed,
        versions: json!({"fliprepair": fliprepair::VERSION, "fliprepair-cli": env!("CARGO_PKG_VERSION")}),
        seconds,
        outputs: outcome.outputs.clone(),
        passed: outcome.passed,
    };
    fs::write(cli.out_dir.join("manifest.json"), serde_json::to_string_pretty(&manifest)? + "\n")?;
    Ok(())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().filter_or("FLIPREPAIR_LOG", "warn")).init();
    let cli = Cli::parse();
    let t = Instant::now();
    match run(&cli) {
        Ok(outcome) => {
            if let Err(e) = write_manifest(&cli, &outcome, t.elapsed().as_secs_f64()) {
                eprintln!("error: {e:#}");
                return ExitCode::from(1);
            }
            if outcome.passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(Failure::Input(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
        Err(Failure::Internal(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
