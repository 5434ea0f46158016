use clap::{Args, Parser, Subcommand};
use fairclust::dataio;
use fairclust::harness::{self, ExperimentConfig, RunParams};
use fairclust::lp::build_lp;
use fairclust::metric::{build_metric, euclidean, MetricContext};
use fairclust::oracle::{brute_force_opt, MAX_ORACLE_POINTS};
use fairclust::synth::{self, DatasetStyle};
use fairclust::{Error, Exec, Power};
use serde_json::json;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

/// Fair-radius clustering with outlier detection.
#[derive(Parser)]
#[command(name = "fairclust", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the pipeline once.
    Run(RunArgs),
    /// Sweep over k and p, writing table.csv and per-run outputs.
    Table(TableArgs),
    /// Exact optimum by enumeration (at most 12 points).
    Oracle(OracleArgs),
    /// Scale, sample and inject outliers, then export the working dataset.
    Inject(InjectArgs),
    /// Write a synthetic dataset shaped like one of the benchmark tables.
    Synth(SynthArgs),
}

#[derive(Args, Clone)]
struct DataArgs {
    /// Input CSV with a header row.
    #[arg(long)]
    data: PathBuf,
    /// Comma-separated feature columns; omit to use all columns.
    #[arg(long, value_delimiter = ',')]
    features: Vec<String>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 1000)]
    sample_size: usize,
    #[arg(long, default_value_t = 0.01)]
    inject_fraction: f64,
    /// Use the features as given instead of standard scaling them.
    #[arg(long)]
    no_scale: bool,
}

#[derive(Args, Clone)]
struct ModelArgs {
    /// Outlier budget; defaults to ceil(0.01 n).
    #[arg(long)]
    m: Option<usize>,
    #[arg(long, default_value_t = 1.0)]
    alpha: f64,
    #[arg(long, default_value_t = 0.0)]
    tau: f64,
    /// File of point indices (one per line) to treat as outliers instead of
    /// detecting them.
    #[arg(long)]
    outlier_labels: Option<PathBuf>,
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    data: DataArgs,
    #[command(flatten)]
    model: ModelArgs,
    #[arg(long)]
    k: usize,
    #[arg(long, default_value = "2")]
    p: Power,
    /// Directory for record.json, result.json, fair_radius.csv and audit.json.
    #[arg(long)]
    out_dir: Option<PathBuf>,
    /// Also write the LP in CPLEX LP format to this path.
    #[arg(long)]
    export_lp: Option<PathBuf>,
}

#[derive(Args)]
struct TableArgs {
    #[command(flatten)]
    data: DataArgs,
    #[command(flatten)]
    model: ModelArgs,
    #[arg(long, value_delimiter = ',', default_value = "5,10,15")]
    k: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_value = "1,2")]
    p: Vec<Power>,
    #[arg(long)]
    out_dir: PathBuf,
    /// Run the cells one after another.
    #[arg(long)]
    sequential: bool,
}

#[derive(Args)]
struct OracleArgs {
    #[command(flatten)]
    data: DataArgs,
    #[arg(long)]
    k: usize,
    #[arg(long, default_value = "2")]
    p: Power,
    #[arg(long, default_value_t = 0)]
    m: usize,
    #[arg(long, default_value_t = 1.0)]
    alpha: f64,
}

#[derive(Args)]
struct InjectArgs {
    #[command(flatten)]
    data: DataArgs,
    /// Output directory; the dataset is written as dataset.csv plus dataset.json.
    #[arg(long)]
    out_dir: PathBuf,
}

#[derive(Args)]
struct SynthArgs {
    #[arg(long, default_value = "bank")]
    style: DatasetStyle,
    #[arg(long, default_value_t = 2000)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: PathBuf,
}

fn config(data: &DataArgs, model: Option<&ModelArgs>, k: usize, p: Power) -> ExperimentConfig {
    let features: Vec<&str> = data.features.iter().map(String::as_str).collect();
    let mut cfg = ExperimentConfig {
        k,
        p,
        seed: data.seed,
        sample_size: data.sample_size,
        inject_fraction: data.inject_fraction,
        scale: !data.no_scale,
        ..ExperimentConfig::new(&data.data, &features)
    };
    if let Some(model) = model {
        cfg.m = model.m;
        cfg.alpha = model.alpha;
        cfg.tau = model.tau;
        cfg.outlier_labels = model.outlier_labels.clone();
    }
    cfg
}

fn write(path: &Path, contents: &str) -> Result<(), Error> {
    std::fs::write(path, contents).map_err(|e| Error::io(path, e))
}

fn cmd_run(args: RunArgs) -> Result<(), Error> {
    let cfg = config(&args.data, Some(&args.model), args.k, args.p);
    let d = harness::prepare_dataset(&cfg)?;
    let params = RunParams {
        k: cfg.k,
        p: cfg.p,
        m: cfg.m.unwrap_or_else(|| harness::default_outlier_budget(d.len())),
        alpha: cfg.alpha,
        tau: cfg.tau,
    };
    if let Some(path) = &args.export_lp {
        let ctx = build_metric(&d, params.k)?;
        build_lp(&ctx, params.p, params.k, params.m, params.alpha)?.write_lp_file(path)?;
    }
    let labels = cfg.outlier_labels.as_ref().map(harness::read_outlier_labels).transpose()?;
    let out = harness::ifxo_dataset(&d, &params, labels.as_ref(), Exec::default())?;
    let record = serde_json::to_string_pretty(&out.record)?;
    if let Some(dir) = &args.out_dir {
        std::fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
        write(&dir.join("record.json"), &record)?;
        write(&dir.join("result.json"), &serde_json::to_string_pretty(&out.export())?)?;
        write(&dir.join("fair_radius.csv"), &out.points_csv())?;
        out.rounded.write_audit(dir.join("audit.json"))?;
    }
    println!("{record}");
    Ok(())
}

fn cmd_table(args: TableArgs) -> Result<(), Error> {
    let first_k = args.k.first().copied().unwrap_or(1);
    let first_p = args.p.first().copied().unwrap_or(Power::Two);
    let cfg = config(&args.data, Some(&args.model), first_k, first_p);
    let exec = if args.sequential { Exec::Sequential } else { Exec::default() };
    let entries = harness::run_table(&cfg, &args.k, &args.p, Some(&args.out_dir), exec)?;
    let table = std::fs::read_to_string(args.out_dir.join("table.csv")).unwrap_or_default();
    print!("{table}");
    // report the most severe cell failure through the exit code
    let mut worst: Option<Error> = None;
    for e in entries {
        if let Err(err) = e.outcome {
            eprintln!("k = {}, p = {}: {err}", e.k, e.p);
            let replace = match &worst {
                None => true,
                Some(w) => severity(&err) > severity(w),
            };
            if replace {
                worst = Some(err);
            }
        }
    }
    worst.map_or(Ok(()), Err)
}

fn cmd_oracle(args: OracleArgs) -> Result<(), Error> {
    let cfg = config(&args.data, None, args.k, args.p);
    let d = harness::prepare_dataset(&cfg)?;
    if d.len() > MAX_ORACLE_POINTS {
        return Err(Error::InstanceTooLarge { n: d.len(), max: MAX_ORACLE_POINTS });
    }
    let n = d.len();
    let dist = (0..n * n).map(|i| euclidean(d.point(i / n), d.point(i % n))).collect();
    let ctx = MetricContext::from_distance_matrix(n, args.k, dist)?;
    let opt = brute_force_opt(&ctx, args.p, args.k, args.m, args.alpha)?;
    let report = json!({
        "n": d.len(),
        "k": args.k,
        "m": args.m,
        "p": args.p,
        "alpha": args.alpha,
        "feasible": opt.is_feasible(),
        "opt_cost": opt.is_feasible().then_some(opt.opt_cost),
        "opt_centers": opt.opt_centers,
        "opt_outliers": opt.opt_outliers,
    });
    println!("{}", serde_json::to_string_pretty(&report)?);
    if opt.is_feasible() {
        Ok(())
    } else {
        Err(Error::Infeasible("no center set meets the fairness constraint".into()))
    }
}

fn cmd_inject(args: InjectArgs) -> Result<(), Error> {
    let cfg = config(&args.data, None, 1, Power::Two);
    let d = harness::prepare_dataset(&cfg)?;
    std::fs::create_dir_all(&args.out_dir).map_err(|e| Error::io(&args.out_dir, e))?;
    let path = args.out_dir.join("dataset.csv");
    d.export(&path)?;
    println!(
        "{}",
        serde_json::to_string_pretty(&json!({
            "path": path,
            "n": d.len(),
            "injected_outlier_indices": d.injected_outlier_indices(),
        }))?
    );
    Ok(())
}

fn cmd_synth(args: SynthArgs) -> Result<(), Error> {
    let d = synth::generate(args.style, args.n, args.seed)?;
    d.export(&args.out)?;
    // raw synthetic data carries no preprocessing metadata
    let _ = std::fs::remove_file(dataio::sidecar_path(&args.out));
    Ok(())
}

fn severity(e: &Error) -> u8 {
    if e.is_invariant_violation() {
        3
    } else if matches!(e, Error::Infeasible(_)) {
        2
    } else {
        1
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Run(a) => cmd_run(a),
        Command::Table(a) => cmd_table(a),
        Command::Oracle(a) => cmd_oracle(a),
        Command::Inject(a) => cmd_inject(a),
        Command::Synth(a) => cmd_synth(a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(severity(&e))
        }
    }
}
