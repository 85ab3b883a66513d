use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use softstream::bench::{
    emit_table, run_experiment, Algorithm, DatasetSource, ExperimentSpec, OutputFormat, PointRows,
};
use softstream::{
    CenterSet, ClusterError, SeededRng, StopRule, StreamClusterer, StreamConfig, WindowClusterer,
    WindowConfig,
};

#[derive(Parser, Debug)]
#[command(name = "cluster", version, about = "Fuzzy k-means benchmarks and streaming k-means drivers")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Compare EM and EM++ (and optionally the streaming pipelines) on a dataset.
    Bench(BenchArgs),
    /// Cluster a point stream with the multi-level cash-register clusterer.
    Stream(StreamArgs),
    /// Cluster the last L points of a stream with the sliding-window clusterer.
    Window(WindowArgs),
}

#[derive(Args, Debug)]
struct StopArgs {
    /// Iteration cap for EM and Lloyd.
    #[arg(long, default_value_t = 300)]
    max_iters: usize,
    /// Stop when the potential changes by at most this fraction.
    #[arg(long, default_value_t = 1e-6)]
    rel_tol: f64,
    /// Stop when no center moves farther than this.
    #[arg(long, default_value_t = 1e-8)]
    move_tol: f64,
}

impl StopArgs {
    fn rule(&self) -> StopRule {
        StopRule {
            max_iters: self.max_iters,
            rel_tol: self.rel_tol,
            move_tol: self.move_tol,
        }
    }
}

#[derive(Args, Debug)]
struct BenchArgs {
    /// spam[:PATH], cloud[:PATH], csv:PATH or synth[:n=..,d=..,c=..,sep=..,seed=..]
    #[arg(long, default_value = "spam")]
    dataset: DatasetSource,
    #[arg(long, value_delimiter = ',', default_values_t = [10, 25, 50])]
    k: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_values_t = [0.1, 0.25, 0.5])]
    m: Vec<f64>,
    #[arg(long, default_value_t = 20)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Algorithms to run; the first one is the baseline of the table.
    #[arg(long = "algo", value_delimiter = ',', default_values_t = [Algorithm::Em, Algorithm::EmPlusPlus])]
    algorithms: Vec<Algorithm>,
    /// Write the table here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
    /// md or csv
    #[arg(long, default_value = "md")]
    format: OutputFormat,
    #[command(flatten)]
    stop: StopArgs,
    /// Per-level memory of the stream pipeline.
    #[arg(long, default_value_t = 1000)]
    memory: usize,
    #[arg(long, default_value_t = 3)]
    levels: usize,
    /// Window length of the window pipeline; defaults to the whole dataset.
    #[arg(long)]
    window: Option<usize>,
    #[arg(long, default_value_t = 1.0 / 3.0)]
    epsilon: f64,
}

#[derive(Args, Debug)]
struct InputArgs {
    /// Point file (one comma- or whitespace-separated row per point), or - for stdin.
    #[arg(long, default_value = "-")]
    input: PathBuf,
    /// Write the centers here instead of standard output.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Weighted k-means++ runs per query; the cheapest on the summary is kept.
    #[arg(long, default_value_t = 1)]
    query_runs: usize,
    /// Refine the query centers with weighted Lloyd.
    #[arg(long)]
    refine: bool,
}

#[derive(Args, Debug)]
struct StreamArgs {
    #[arg(long)]
    k: usize,
    /// Points buffered per level before compression.
    #[arg(long)]
    memory: usize,
    #[arg(long, default_value_t = 3)]
    levels: usize,
    /// k-means# repetitions per compression; defaults to ceil(log2 memory).
    #[arg(long)]
    sharp_runs: Option<usize>,
    #[command(flatten)]
    io: InputArgs,
}

#[derive(Args, Debug)]
struct WindowArgs {
    #[arg(long)]
    k: usize,
    /// Window length L in points.
    #[arg(long)]
    window: usize,
    /// Memory/shift trade-off in (0, 1/2).
    #[arg(long, default_value_t = 1.0 / 3.0)]
    epsilon: f64,
    #[arg(long)]
    sharp_runs: Option<usize>,
    #[command(flatten)]
    io: InputArgs,
}

fn open_output(out: &Option<PathBuf>) -> io::Result<Box<dyn Write>> {
    Ok(match out {
        Some(path) => Box::new(BufWriter::new(File::create(path)?)),
        None => Box::new(BufWriter::new(io::stdout())),
    })
}

fn open_input(path: &Path) -> io::Result<Box<dyn BufRead>> {
    if path == Path::new("-") {
        Ok(Box::new(BufReader::new(io::stdin())))
    } else {
        let file = File::open(path)
            .map_err(|e| io::Error::new(e.kind(), format!("{}: {e}", path.display())))?;
        Ok(Box::new(BufReader::new(file)))
    }
}

fn write_centers(out: &mut dyn Write, centers: &CenterSet) -> io::Result<()> {
    let header: Vec<String> = (1..=centers.dim()).map(|j| format!("x{j}")).collect();
    writeln!(out, "{}", header.join(","))?;
    for c in centers.iter() {
        let cells: Vec<String> = c.iter().map(f64::to_string).collect();
        writeln!(out, "{}", cells.join(","))?;
    }
    out.flush()
}

fn bench(args: BenchArgs) -> Result<(), ClusterError> {
    let spec = ExperimentSpec {
        source: args.dataset,
        ks: args.k,
        ms: args.m,
        trials: args.trials,
        seed: args.seed,
        algorithms: args.algorithms,
        stop: args.stop.rule(),
        stream_memory: args.memory,
        stream_levels: args.levels,
        window: args.window,
        window_epsilon: args.epsilon,
    };
    let stats = run_experiment(&spec)?;
    emit_table(&stats, args.format, open_output(&args.out)?)
}

fn refine_rule(refine: bool) -> Option<StopRule> {
    refine.then(StopRule::default)
}

fn stream(args: StreamArgs) -> Result<(), ClusterError> {
    let mut rows = PointRows::new(open_input(&args.io.input)?, &args.io.input);
    let first = rows.next().ok_or(ClusterError::EmptyStream)??;

    let mut config = StreamConfig::new(args.k, args.memory);
    config.levels = args.levels;
    config.seed = args.io.seed;
    config.query_runs = args.io.query_runs;
    config.refine = refine_rule(args.io.refine);
    if let Some(runs) = args.sharp_runs {
        config.sharp_runs = runs;
    }
    let mut clusterer = StreamClusterer::new(config, first.len())?;
    clusterer.ingest(&first)?;
    for row in rows {
        clusterer.ingest(&row?)?;
    }
    let centers = clusterer.finalize(&mut SeededRng::new(args.io.seed))?;
    eprintln!(
        "ingested {} points, {} weighted points live",
        clusterer.ingested(),
        clusterer.live_len()
    );
    write_centers(&mut *open_output(&args.io.out)?, &centers)?;
    Ok(())
}

fn window(args: WindowArgs) -> Result<(), ClusterError> {
    let mut rows = PointRows::new(open_input(&args.io.input)?, &args.io.input);
    let first = rows.next().ok_or(ClusterError::EmptyStream)??;

    let mut config = WindowConfig::new(args.window, args.k, args.epsilon);
    config.seed = args.io.seed;
    config.sharp_runs = args.sharp_runs;
    config.query_runs = args.io.query_runs;
    config.refine = refine_rule(args.io.refine);
    let mut clusterer = WindowClusterer::new(config, first.len())?;
    clusterer.insert(&first)?;
    for row in rows {
        clusterer.insert(&row?)?;
    }
    let centers = clusterer.query(&mut SeededRng::new(args.io.seed))?;
    eprintln!(
        "seen {} points, window starts at {}, shift {}, {} weighted points live",
        clusterer.seen(),
        clusterer.window_start(),
        clusterer.shift(),
        clusterer.live_len()
    );
    write_centers(&mut *open_output(&args.io.out)?, &centers)?;
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Bench(args) => bench(args),
        Command::Stream(args) => stream(args),
        Command::Window(args) => window(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
