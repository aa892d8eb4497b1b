//! `melif`: run the filter-combination optimizers and the benchmark matrix.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use melif_core::bench::{self, BenchOptions, RunConfig, ThreadSpec};
use melif_core::dataset::{self, load_csv, parse_manifest, write_csv, LabelColumn, ManifestEntry, PlantedSpec};
use melif_core::evaluator::{ClassifierKind, CvObjective, EvalConfig, EvalService, GridSpacing, Metric};
use melif_core::filters::{FilterEnsemble, FilterParams, Measure};
use melif_core::optim::{self, default_starting_points, HaltSpec, OptimizerConfig, OptimizerKind};
use melif_core::{Dataset, FoldStrategy};

#[derive(Parser)]
#[command(name = "melif", version, about = "Search linear combinations of ranking filters for feature selection")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a set of configurations over every dataset in a manifest.
    Bench(BenchArgs),
    /// Run one optimizer on one dataset.
    Run(RunArgs),
    /// Write a planted synthetic dataset as CSV.
    Synth(SynthArgs),
}

#[derive(Args)]
struct SearchArgs {
    /// Worker threads per search, or `2pf` for 2 x starting points x folds.
    #[arg(long, default_value_t = default_threads())]
    threads: String,
    /// Grid spacing; 1/delta must be an integer.
    #[arg(long, default_value_t = 0.25)]
    delta: f64,
    /// Number of top-ranked features kept.
    #[arg(long, default_value_t = 100)]
    m: usize,
    #[arg(long, default_value_t = 5)]
    folds: usize,
    /// `nc` (nearest centroid), `knn` or `knn:K`.
    #[arg(long, default_value = "nc")]
    classifier: String,
    /// `macro` or `binary` (F1 of class id 1).
    #[arg(long, default_value = "macro")]
    metric: String,
    #[arg(long, default_value = "spearman,su,fc,vdm")]
    measures: String,
    /// Bins used to discretize features for SU and VDM.
    #[arg(long, default_value_t = 10)]
    bins: usize,
    /// Combine raw measure values instead of min-max normalized ones.
    #[arg(long)]
    no_normalize: bool,
    /// Plain (unstratified) cross-validation folds.
    #[arg(long)]
    no_stratify: bool,
    /// Evaluate the folds of one point concurrently.
    #[arg(long)]
    parallel_folds: bool,
    /// UCB1 exploration coefficient.
    #[arg(long, default_value_t = 1.0)]
    exploration: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
}

fn default_threads() -> String {
    optim::default_threads().to_string()
}

impl SearchArgs {
    fn options(&self) -> Result<BenchOptions> {
        Ok(BenchOptions {
            threads: self.threads.parse::<ThreadSpec>()?,
            spacing: GridSpacing::from_delta(self.delta)?,
            eval: EvalConfig {
                m: self.m,
                folds: self.folds,
                fold_strategy: if self.no_stratify {
                    FoldStrategy::Plain
                } else {
                    FoldStrategy::Stratified
                },
                classifier: self.classifier.parse::<ClassifierKind>()?,
                metric: self.metric.parse::<Metric>()?,
                seed: self.seed,
                parallel_folds: self.parallel_folds,
            },
            measures: Measure::parse_list(&self.measures)?,
            filter: FilterParams {
                bins: self.bins,
                normalize: !self.no_normalize,
                ..FilterParams::default()
            },
            exploration: self.exploration,
            seed: self.seed,
        })
    }
}

#[derive(Args)]
struct BenchArgs {
    /// File listing one dataset per line: `path[,label[,header|noheader]]`.
    #[arg(long, required_unless_present = "synthetic")]
    manifest: Option<PathBuf>,
    /// Add a planted dataset `n,d,k[,seed]` (repeatable).
    #[arg(long)]
    synthetic: Vec<String>,
    /// Comma-separated configuration ids, or `all`.
    #[arg(long, default_value = "all")]
    configs: String,
    #[command(flatten)]
    search: SearchArgs,
    #[arg(long)]
    out_csv: Option<PathBuf>,
    #[arg(long)]
    out_json: Option<PathBuf>,
    /// Write `-` instead of wall-clock seconds in the CSV time columns.
    #[arg(long)]
    redact_time: bool,
}

#[derive(Args)]
struct RunArgs {
    /// CSV dataset.
    #[arg(long, required_unless_present = "synthetic", conflicts_with = "synthetic")]
    data: Option<PathBuf>,
    /// Label column: index, header name, or `last`.
    #[arg(long, default_value = "last")]
    label: String,
    #[arg(long)]
    no_header: bool,
    /// Planted dataset `n,d,k[,seed]` instead of a file.
    #[arg(long)]
    synthetic: Option<String>,
    /// `melif`, `melif+`, `pq` or `ma`.
    #[arg(long, default_value = "pq")]
    optimizer: String,
    #[arg(long)]
    max_points: Option<usize>,
    #[arg(long)]
    stagnation: Option<usize>,
    #[arg(long, default_value_t = 1.0)]
    perfect_score: f64,
    #[command(flatten)]
    search: SearchArgs,
    /// Evaluation log, one JSON object per visited point.
    #[arg(long)]
    log_jsonl: Option<PathBuf>,
    /// Full search result as JSON.
    #[arg(long)]
    out_json: Option<PathBuf>,
}

#[derive(Args)]
struct SynthArgs {
    #[arg(long, default_value_t = 60)]
    n: usize,
    #[arg(long, default_value_t = 1000)]
    d: usize,
    /// Informative features.
    #[arg(long, default_value_t = 10)]
    k: usize,
    #[arg(long, default_value_t = 2)]
    classes: usize,
    /// Class mean shift on informative features, in noise standard deviations.
    #[arg(long, default_value_t = 2.0)]
    shift: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
    /// Append `<out>,label` to this manifest file.
    #[arg(long)]
    manifest: Option<PathBuf>,
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    let file = File::create(path).with_context(|| format!("cannot write {}", path.display()))?;
    Ok(BufWriter::new(file))
}

fn bench_cmd(args: BenchArgs) -> Result<ExitCode> {
    let opts = args.search.options()?;
    let configs = RunConfig::parse_list(&args.configs)?;
    let mut entries = match &args.manifest {
        Some(path) => {
            let text = std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
            parse_manifest(&text, path.parent().unwrap_or(Path::new(".")))?
        }
        None => Vec::new(),
    };
    for s in &args.synthetic {
        entries.push(ManifestEntry::Synthetic(s.parse::<PlantedSpec>()?));
    }
    let report = bench::run_matrix(&entries, &configs, &opts)?;
    print!("{}", report.format_table());
    if let Some(path) = &args.out_csv {
        let mut out = create(path)?;
        report.write_csv(&mut out, args.redact_time)?;
        out.flush()?;
    }
    if let Some(path) = &args.out_json {
        let mut out = create(path)?;
        out.write_all(report.to_json()?.as_bytes())?;
        out.flush()?;
    }
    Ok(if report.has_errors() {
        ExitCode::FAILURE
    } else {
        ExitCode::SUCCESS
    })
}

fn run_cmd(args: RunArgs) -> Result<ExitCode> {
    let opts = args.search.options()?;
    let kind: OptimizerKind = args.optimizer.parse()?;
    let ds: Dataset = match (&args.data, &args.synthetic) {
        (Some(path), _) => {
            let label: LabelColumn = args.label.parse()?;
            load_csv(path, &label, !args.no_header)?
        }
        (None, Some(spec)) => dataset::planted(&spec.parse()?)?.0,
        (None, None) => bail!("either --data or --synthetic is required"),
    };
    let halt = HaltSpec {
        max_points: args.max_points,
        stagnation_window: args.stagnation,
        perfect_score: args.perfect_score,
    };
    if matches!(kind, OptimizerKind::PriorityQueue | OptimizerKind::Bandit) {
        halt.validate_bounded()
            .context("pq and ma need --max-points or --stagnation")?;
    }

    let ensemble = FilterEnsemble::build(&ds, &opts.measures, &opts.filter)?;
    let objective = CvObjective::new(&ds, &ensemble, &opts.eval)?;
    let service = EvalService::new(objective, opts.spacing);
    let starts = default_starting_points(ensemble.dim(), opts.spacing);
    let cfg = OptimizerConfig {
        threads: opts.threads.resolve(starts.len(), opts.eval.folds),
        spacing: opts.spacing,
        starting_points: starts,
        halt,
        seed: opts.seed,
        exploration: opts.exploration,
    };
    let result = optim::run(kind, &service, &cfg)?;

    println!("dataset     {}", ds.name());
    println!("optimizer   {kind} ({} threads)", cfg.threads);
    println!("measures    {}", ensemble.measures().join(","));
    println!("best point  {}", result.best_point.display(opts.spacing));
    println!("best score  {:.4}", result.best_score);
    println!("evaluated   {} points", result.points_evaluated());
    println!("halt        {}", result.halt_reason);
    println!("time        {:.3} s", result.wall_nanos as f64 / 1e9);
    let names: Vec<&str> = result
        .best_features
        .iter()
        .take(20)
        .map(|&j| ds.feature_names()[j].as_str())
        .collect();
    println!("features    {}{}", names.join(","), if result.best_features.len() > 20 { ",..." } else { "" });

    if let Some(path) = &args.log_jsonl {
        let mut out = create(path)?;
        result.write_jsonl(&mut out)?;
        out.flush()?;
    }
    if let Some(path) = &args.out_json {
        let mut out = create(path)?;
        serde_json::to_writer_pretty(&mut out, &result)?;
        out.flush()?;
    }
    Ok(ExitCode::SUCCESS)
}

fn synth_cmd(args: SynthArgs) -> Result<ExitCode> {
    let spec = PlantedSpec {
        objects: args.n,
        features: args.d,
        informative: args.k,
        classes: args.classes,
        shift: args.shift,
        seed: args.seed,
    };
    let (ds, informative) = dataset::planted(&spec)?;
    write_csv(&ds, &args.out)?;
    println!("wrote {} ({} x {}), informative features: {:?}", args.out.display(), ds.object_count(), ds.feature_count(), informative);
    if let Some(manifest) = &args.manifest {
        let mut f = std::fs::OpenOptions::new()
            .create(true)
            .append(true)
            .open(manifest)
            .with_context(|| format!("cannot append to {}", manifest.display()))?;
        writeln!(f, "{},label", args.out.display())?;
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Bench(a) => bench_cmd(a),
        Command::Run(a) => run_cmd(a),
        Command::Synth(a) => synth_cmd(a),
    };
    match outcome {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
