use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::json;

use robust_cluster::baselines::{kmeanspp_init, kmedian_hybrid, lloyd, random_init, LloydParams};
use robust_cluster::bench::{
    pathology_suite, reproduce_table, ExperimentConfig, IodOverrides, MethodSpec, Scenario,
    LETTERS_ENV, THREADS_ENV,
};
use robust_cluster::dataset::{
    read_centroids_csv, read_csv, write_centroids_csv, write_file, write_labels_csv, CsvOptions,
};
use robust_cluster::metrics::{mislabeling, wcss, MislabelingMode};
use robust_cluster::reference::TableId;
use robust_cluster::synth::{ErrorLaw, OutlierSpec, OutlierStrategy};
use robust_cluster::{cod_cluster, default_params, iodk, CodParams, Error, Init, Result};

#[derive(Parser)]
#[command(
    name = "robust-cluster",
    version,
    about = "Robust clustering with trimmed-mean centroids"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Cluster a CSV file.
    Cluster(ClusterArgs),
    /// Monte-Carlo run of one synthetic scenario.
    Simulate(SimulateArgs),
    /// Rerun a published table and compare.
    Table(TableArgs),
    /// Lloyd failure cases against COD.
    Pathology(PathologyArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum InitArg {
    Iod,
    Kmeanspp,
    Random,
    File,
}

#[derive(Clone, Copy, ValueEnum)]
enum MethodArg {
    Cod,
    Lloyd,
    Kmedian,
}

#[derive(Args)]
struct ClusterArgs {
    input: PathBuf,
    #[arg(short, long)]
    k: usize,
    #[arg(long, default_value_t = MethodArg::Cod, value_enum)]
    method: MethodArg,
    #[arg(long, default_value_t = 0.3)]
    delta: f64,
    #[arg(long, default_value_t = 1e-8)]
    epsilon: f64,
    #[arg(long, default_value_t = 50)]
    max_iter: usize,
    #[arg(long, default_value_t = InitArg::Iod, value_enum)]
    init: InitArg,
    /// Initial centroids for `--init file`.
    #[arg(long)]
    centroids: Option<PathBuf>,
    /// Smallest cluster fraction for IOD; defaults to 1/(2k).
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Zero-based column holding truth labels.
    #[arg(long)]
    label_column: Option<usize>,
    /// Standardize every feature column.
    #[arg(long)]
    standardize: bool,
    /// Treat the first row as data even if it looks like a header.
    #[arg(long)]
    no_header: bool,
    #[arg(short, long, default_value = "out")]
    output: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum LawArg {
    T,
    Gaussian,
}

#[derive(Clone, Copy, ValueEnum)]
enum StrategyArg {
    FarClump,
    Midpoints,
    Ring,
}

#[derive(Args)]
struct SimulateArgs {
    /// TOML or JSON experiment file; scenario flags are ignored when given.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(short, long, default_value_t = 2)]
    k: usize,
    #[arg(short, long, default_value_t = 5)]
    d: usize,
    #[arg(long, default_value_t = LawArg::T, value_enum)]
    law: LawArg,
    #[arg(long, default_value_t = 10.0)]
    nu: f64,
    #[arg(long, default_value_t = 5.0)]
    sigma: f64,
    #[arg(long, default_value_t = 25.0)]
    delta_sep: f64,
    #[arg(long, default_value_t = 200)]
    n_per_cluster: usize,
    #[arg(long, default_value_t = 0)]
    outliers: usize,
    #[arg(long, default_value_t = StrategyArg::FarClump, value_enum)]
    strategy: StrategyArg,
    /// Distance multiple for far clumps, radius for rings.
    #[arg(long, default_value_t = 50.0)]
    outlier_scale: f64,
    #[arg(long, default_value_t = 30)]
    reps: usize,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(
        long,
        value_delimiter = ',',
        default_value = "cod_iod,lloyd_iod,lloyd_kmeanspp,lloyd_random"
    )]
    methods: Vec<MethodSpec>,
    #[arg(long, default_value_t = 0.3)]
    delta: f64,
    /// Explicit IOD parameters `m1,m,beta`.
    #[arg(long, value_delimiter = ',', num_args = 3)]
    iod: Option<Vec<f64>>,
    #[arg(long, env = THREADS_ENV)]
    threads: Option<usize>,
    #[arg(short, long, default_value = "out")]
    output: PathBuf,
    #[arg(long, default_value = "simulate")]
    stem: String,
}

#[derive(Args)]
struct TableArgs {
    /// nu, sigma, dim or letters.
    table: TableId,
    #[arg(long, default_value_t = 30)]
    reps: usize,
    /// Multiplier on the per-cluster sample size.
    #[arg(long, default_value_t = 1.0)]
    scale: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Letter-recognition file for the letters table.
    #[arg(long, env = LETTERS_ENV)]
    data: Option<PathBuf>,
    #[arg(long, env = THREADS_ENV)]
    threads: Option<usize>,
    /// Directory for CSV/JSON reports.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct PathologyArgs {
    #[arg(long, default_value_t = 100)]
    reps: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(short, long)]
    output: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match cli.command {
        Command::Cluster(a) => cmd_cluster(a),
        Command::Simulate(a) => cmd_simulate(a),
        Command::Table(a) => cmd_table(a),
        Command::Pathology(a) => cmd_pathology(a),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn cmd_cluster(a: ClusterArgs) -> Result<()> {
    if a.k < 2 {
        return Err(Error::Config(format!("k must be >= 2, got {}", a.k)));
    }
    let ds = read_csv(
        &a.input,
        &CsvOptions {
            has_header: if a.no_header { Some(false) } else { None },
            label_column: a.label_column,
            standardize: a.standardize,
        },
    )?;
    let points = &ds.points;
    if a.k > points.n() {
        return Err(Error::Contract(format!(
            "k = {} exceeds the number of rows n = {}",
            a.k,
            points.n()
        )));
    }
    let alpha = a.alpha.unwrap_or(1.0 / (2.0 * a.k as f64));
    let init_name = a.init.to_possible_value_name();
    println!(
        "replay: robust-cluster cluster {} -k {} --method {} --init {} --delta {} --epsilon {} --max-iter {} --alpha {} --seed {}",
        a.input.display(),
        a.k,
        method_name(a.method),
        init_name,
        a.delta,
        a.epsilon,
        a.max_iter,
        alpha,
        a.seed
    );
    let mut rng = ChaCha8Rng::seed_from_u64(a.seed);
    let start = Instant::now();
    let init = match a.init {
        InitArg::Iod => iodk(points, &default_params(points.n(), a.k, alpha)?)?.centroids,
        InitArg::Kmeanspp => kmeanspp_init(points, a.k, &mut rng)?,
        InitArg::Random => random_init(points, a.k, &mut rng)?,
        InitArg::File => {
            let path = a
                .centroids
                .as_ref()
                .ok_or_else(|| Error::Config("--init file needs --centroids".into()))?;
            let c = read_centroids_csv(path)?;
            if c.k() != a.k || c.d() != points.d() {
                return Err(Error::Contract(format!(
                    "{} holds {} centroids of dimension {}, expected {} of dimension {}",
                    path.display(),
                    c.k(),
                    c.d(),
                    a.k,
                    points.d()
                )));
            }
            c
        }
    };
    let init_secs = start.elapsed().as_secs_f64();
    let init = Init::Centroids(init);
    let lloyd_params = LloydParams {
        epsilon: a.epsilon,
        max_iterations: a.max_iter,
        ..LloydParams::default()
    };
    let run = match a.method {
        MethodArg::Cod => cod_cluster(
            points,
            &init,
            &CodParams {
                delta: a.delta,
                epsilon: a.epsilon,
                max_iterations: a.max_iter,
            },
        )?,
        MethodArg::Lloyd => lloyd(points, &init, &lloyd_params, &mut rng)?,
        MethodArg::Kmedian => kmedian_hybrid(points, &init, &lloyd_params, &mut rng)?,
    };
    let total_secs = start.elapsed().as_secs_f64();
    let score = match &ds.truth {
        Some(t) => Some(mislabeling(&run.labels, t, MislabelingMode::Permutations)?),
        None => None,
    };
    write_labels_csv(a.output.join("labels.csv"), &run.labels)?;
    write_centroids_csv(a.output.join("centroids.csv"), &run.centroids)?;
    let summary = json!({
        "config": {
            "input": a.input,
            "k": a.k,
            "method": method_name(a.method),
            "init": init_name,
            "delta": a.delta,
            "epsilon": a.epsilon,
            "max_iter": a.max_iter,
            "alpha": alpha,
            "seed": a.seed,
            "standardize": a.standardize,
            "label_column": a.label_column,
        },
        "metrics": {
            "n": points.n(),
            "d": points.d(),
            "iterations": run.iterations(),
            "cluster_sizes": run.labels.counts(),
            "wcss": wcss(points, &run.centroids)?,
            "mislabeling": score,
        },
        "timings": { "init_secs": init_secs, "total_secs": total_secs },
    });
    write_file(
        &a.output.join("summary.json"),
        serde_json::to_string_pretty(&summary)?.as_bytes(),
    )?;
    println!(
        "clustered {} rows into {} clusters in {} iterations; wrote {}",
        points.n(),
        a.k,
        run.iterations(),
        a.output.display()
    );
    if let Some(s) = score {
        println!("mislabeling: {s}");
    }
    Ok(())
}

trait ValueName {
    fn to_possible_value_name(&self) -> String;
}

impl<T: ValueEnum> ValueName for T {
    fn to_possible_value_name(&self) -> String {
        self.to_possible_value()
            .map(|v| v.get_name().to_string())
            .unwrap_or_default()
    }
}

fn method_name(m: MethodArg) -> String {
    m.to_possible_value_name()
}

fn cmd_simulate(a: SimulateArgs) -> Result<()> {
    let mut config = match &a.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => {
            let seed = a.seed.ok_or_else(|| {
                Error::Config("--seed is required unless --config is given".into())
            })?;
            let law = match a.law {
                LawArg::T => ErrorLaw::StudentT {
                    nu: a.nu,
                    sigma: a.sigma,
                    scale_convention: Default::default(),
                },
                LawArg::Gaussian => ErrorLaw::Gaussian { sigma: a.sigma },
            };
            let strategy = match a.strategy {
                StrategyArg::FarClump => OutlierStrategy::FarClump {
                    multiple: a.outlier_scale,
                },
                StrategyArg::Midpoints => OutlierStrategy::Midpoints,
                StrategyArg::Ring => OutlierStrategy::Ring {
                    radius: a.outlier_scale,
                },
            };
            let iod_overrides = match a.iod.as_deref() {
                Some([m1, m, beta]) => Some(IodOverrides {
                    m1: *m1 as usize,
                    m: *m as usize,
                    beta: *beta,
                }),
                _ => None,
            };
            ExperimentConfig {
                scenario: Scenario::Mixture {
                    k: a.k,
                    d: a.d,
                    law,
                    delta_sep: a.delta_sep,
                    per_cluster: a.n_per_cluster,
                },
                methods: a.methods.clone(),
                reps: a.reps,
                base_seed: seed,
                outliers: (a.outliers > 0).then_some(OutlierSpec {
                    count: a.outliers,
                    strategy,
                }),
                iod_overrides,
                delta: a.delta,
                epsilon: 1e-8,
                max_iterations: 50,
                empty_cluster_rule: Default::default(),
                threads: None,
            }
        }
    };
    config.validate()?;
    let config_path = a.output.join(format!("{}.config.toml", a.stem));
    let text = toml::to_string(&config).map_err(|e| Error::Config(e.to_string()))?;
    write_file(&config_path, text.as_bytes())?;
    println!(
        "replay: robust-cluster simulate --config {}  (base_seed {})",
        config_path.display(),
        config.base_seed
    );
    config.threads = a.threads.or(config.threads);
    let report = robust_cluster::bench::run_cell(&config)?;
    let (csv, json) = report.write(&a.output, &a.stem)?;
    for m in &report.methods {
        let stats = match (m.mean, m.stderr) {
            (Some(mean), Some(se)) => format!("{mean:.3} ({se:.3})"),
            _ => "n/a".into(),
        };
        let flag = if m.invalid { "  INVALID" } else { "" };
        println!(
            "{:<16} {stats}  failures {}/{}{flag}",
            m.method.to_string(),
            m.failures,
            config.reps
        );
    }
    println!("wrote {} and {}", csv.display(), json.display());
    Ok(())
}

fn cmd_table(a: TableArgs) -> Result<()> {
    println!(
        "replay: robust-cluster table {} --reps {} --scale {} --seed {}{}",
        a.table,
        a.reps,
        a.scale,
        a.seed,
        a.data
            .as_ref()
            .map(|p| format!(" --data {}", p.display()))
            .unwrap_or_default()
    );
    let report = reproduce_table(
        a.table,
        a.reps,
        a.scale,
        a.seed,
        a.data.as_deref(),
        a.threads,
    )?;
    print!("{}", report.render());
    if let Some(dir) = &a.output {
        write_report_pair(
            dir,
            &format!("table_{}", a.table),
            &report.to_csv(),
            &report.to_json()?,
        )?;
    }
    Ok(())
}

fn cmd_pathology(a: PathologyArgs) -> Result<()> {
    println!(
        "replay: robust-cluster pathology --reps {} --seed {}",
        a.reps, a.seed
    );
    let report = pathology_suite(a.reps, a.seed)?;
    print!("{}", report.render());
    if let Some(dir) = &a.output {
        let mut csv = String::from("case,rep,lloyd,cod\n");
        for (name, case) in [
            ("three_centroid", &report.three_centroid),
            ("heavy_tail", &report.heavy_tail),
        ] {
            for (r, (l, c)) in case.lloyd.iter().zip(&case.cod).enumerate() {
                csv.push_str(&format!("{name},{r},{l},{c}\n"));
            }
        }
        write_report_pair(
            dir,
            "pathology",
            &csv,
            &serde_json::to_string_pretty(&report)?,
        )?;
    }
    Ok(())
}

fn write_report_pair(dir: &Path, stem: &str, csv: &str, json: &str) -> Result<()> {
    let c = dir.join(format!("{stem}.csv"));
    let j = dir.join(format!("{stem}.json"));
    write_file(&c, csv.as_bytes())?;
    write_file(&j, json.as_bytes())?;
    println!("wrote {} and {}", c.display(), j.display());
    Ok(())
}
