//! Monte-Carlo experiment harness.
//!
//! A cell is one scenario run `reps` times with a list of methods. Rep `r`
//! uses seed `base_seed ^ r`; data come from stream 0 of that seed and every
//! method draws from its own stream, so reps can run in any order on any
//! number of workers and adding a method never changes another's numbers.

use std::fmt::{self, Write as _};
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::baselines::{
    kmeanspp_init, kmedian_hybrid, lloyd, random_init, EmptyClusterRule, LloydParams,
};
use crate::cod::{cod_cluster, CodParams, Init};
use crate::dataset::{read_letters, sample_letters, write_file, LetterRecord};
use crate::error::{ensure, Error, Result};
use crate::geometry::{mean_of, CentroidSet, LabelVector, PointSet};
use crate::iod::{default_params, iodk, IodParams};
use crate::metrics::{mislabeling, mislabeling_on_mask, MislabelingMode};
use crate::reference::{ReferenceTables, TableId};
use crate::synth::{
    gen_centroids, inject_outliers, lloyd_pathology_heavy, lloyd_pathology_three, sample_mixture,
    ErrorLaw, MixtureSpec, OutlierSpec,
};

/// Environment variable overriding the worker count.
pub const THREADS_ENV: &str = "ROBUST_CLUSTER_THREADS";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InitKind {
    Iod,
    Kmeanspp,
    Random,
    /// The true centroids.
    Oracle,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ClusterKind {
    Cod,
    Lloyd,
    Kmedian,
}

/// A clustering routine paired with an initializer, written `cluster_init`
/// (`cod_iod`, `lloyd_kmeanspp`, ...).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct MethodSpec {
    pub cluster: ClusterKind,
    pub init: InitKind,
}

impl MethodSpec {
    pub const fn new(cluster: ClusterKind, init: InitKind) -> Self {
        Self { cluster, init }
    }

    /// Stream id of this method's random numbers (FNV-1a of the label,
    /// never 0, which belongs to data generation).
    fn stream(&self) -> u64 {
        let mut h: u64 = 0xcbf2_9ce4_8422_2325;
        for b in self.to_string().bytes() {
            h ^= b as u64;
            h = h.wrapping_mul(0x0100_0000_01b3);
        }
        h | 1
    }
}

impl fmt::Display for MethodSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = match self.cluster {
            ClusterKind::Cod => "cod",
            ClusterKind::Lloyd => "lloyd",
            ClusterKind::Kmedian => "kmedian",
        };
        let i = match self.init {
            InitKind::Iod => "iod",
            InitKind::Kmeanspp => "kmeanspp",
            InitKind::Random => "random",
            InitKind::Oracle => "oracle",
        };
        write!(f, "{c}_{i}")
    }
}

impl FromStr for MethodSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = || {
            Error::Config(format!(
                "unknown method `{s}`; expected <cod|lloyd|kmedian>_<iod|kmeanspp|random|oracle>"
            ))
        };
        let (c, i) = s.split_once('_').ok_or_else(bad)?;
        let cluster = match c {
            "cod" => ClusterKind::Cod,
            "lloyd" => ClusterKind::Lloyd,
            "kmedian" => ClusterKind::Kmedian,
            _ => return Err(bad()),
        };
        let init = match i {
            "iod" => InitKind::Iod,
            "kmeanspp" => InitKind::Kmeanspp,
            "random" => InitKind::Random,
            "oracle" => InitKind::Oracle,
            _ => return Err(bad()),
        };
        Ok(Self { cluster, init })
    }
}

impl TryFrom<String> for MethodSpec {
    type Error = Error;
    fn try_from(s: String) -> Result<Self> {
        s.parse()
    }
}

impl From<MethodSpec> for String {
    fn from(m: MethodSpec) -> String {
        m.to_string()
    }
}

/// Where the data of every rep come from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Scenario {
    /// `k` fresh centroids with minimum separation `delta_sep` per rep,
    /// `per_cluster` draws of `law` around each.
    Mixture {
        k: usize,
        d: usize,
        #[serde(flatten)]
        law: ErrorLaw,
        delta_sep: f64,
        per_cluster: usize,
    },
    /// Subsample of the letter-recognition file, redrawn per rep.
    Letters {
        path: PathBuf,
        classes: Vec<char>,
        per_class: usize,
        #[serde(default)]
        outlier_class: Option<char>,
        #[serde(default)]
        outlier_count: usize,
    },
}

impl Scenario {
    pub fn k(&self) -> usize {
        match self {
            Scenario::Mixture { k, .. } => *k,
            Scenario::Letters { classes, .. } => classes.len(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct IodOverrides {
    pub m1: usize,
    pub m: usize,
    pub beta: f64,
}

fn default_delta() -> f64 {
    0.3
}
fn default_epsilon() -> f64 {
    1e-8
}
fn default_max_iterations() -> usize {
    50
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub scenario: Scenario,
    pub methods: Vec<MethodSpec>,
    pub reps: usize,
    pub base_seed: u64,
    #[serde(default)]
    pub outliers: Option<OutlierSpec>,
    #[serde(default)]
    pub iod_overrides: Option<IodOverrides>,
    /// Trimming level of COD.
    #[serde(default = "default_delta")]
    pub delta: f64,
    #[serde(default = "default_epsilon")]
    pub epsilon: f64,
    #[serde(default = "default_max_iterations")]
    pub max_iterations: usize,
    /// Empty-cluster handling of the Lloyd-type baselines.
    #[serde(default)]
    pub empty_cluster_rule: EmptyClusterRule,
    /// Worker count; falls back to `ROBUST_CLUSTER_THREADS`, then to the
    /// number of cores.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub threads: Option<usize>,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        ensure!(self.reps >= 1, "reps must be >= 1");
        ensure!(!self.methods.is_empty(), "no methods configured");
        CodParams {
            delta: self.delta,
            epsilon: self.epsilon,
            max_iterations: self.max_iterations,
        }
        .validate()?;
        match &self.scenario {
            Scenario::Mixture {
                k,
                d,
                law,
                delta_sep,
                per_cluster,
            } => {
                ensure!(*k >= 2, "k must be >= 2, got {k}");
                ensure!(*d >= 1, "d must be >= 1");
                ensure!(*per_cluster >= 1, "per_cluster must be >= 1");
                ensure!(*delta_sep > 0.0, "delta_sep must be positive");
                law.validate()?;
            }
            Scenario::Letters {
                classes, per_class, ..
            } => {
                ensure!(classes.len() >= 2, "need at least two classes");
                ensure!(*per_class >= 1, "per_class must be >= 1");
                ensure!(
                    self.outliers.is_none(),
                    "letters scenarios take outliers from outlier_class"
                );
            }
        }
        if let Some(o) = self.iod_overrides {
            IodParams::new(o.m1, o.m, o.beta, self.scenario.k()).validate()?;
        }
        Ok(())
    }

    /// Parses TOML, or JSON when the text starts with `{`.
    pub fn parse(text: &str) -> Result<Self> {
        let config: Self = if text.trim_start().starts_with('{') {
            serde_json::from_str(text).map_err(|e| Error::Config(e.to_string()))?
        } else {
            toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?
        };
        config.validate()?;
        Ok(config)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text)
    }

    pub fn rep_seed(&self, rep: usize) -> u64 {
        self.base_seed ^ rep as u64
    }

    fn lloyd_params(&self) -> LloydParams {
        LloydParams {
            epsilon: self.epsilon,
            max_iterations: self.max_iterations,
            empty_cluster_rule: self.empty_cluster_rule,
        }
    }
}

/// Data of one rep.
#[derive(Debug, Clone)]
pub struct RepData {
    pub points: PointSet,
    pub truth: LabelVector,
    pub keep_mask: Vec<bool>,
    pub centroids: CentroidSet,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SeedEntry {
    pub rep: usize,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ReferenceValue {
    pub mean: f64,
    pub stderr: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MethodSummary {
    pub method: MethodSpec,
    /// Mean over successful reps; `None` when every rep failed.
    pub mean: Option<f64>,
    /// Sample standard deviation over `sqrt(count)`.
    pub stderr: Option<f64>,
    pub failures: usize,
    /// More than 10% of the reps failed.
    pub invalid: bool,
    /// One entry per rep; `None` marks a failure.
    pub raw: Vec<Option<f64>>,
    /// First failure message, if any.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub first_error: Option<String>,
    pub wall_clock_secs: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reference: Option<ReferenceValue>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub deviation: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub config: ExperimentConfig,
    pub methods: Vec<MethodSummary>,
    pub seed_ledger: Vec<SeedEntry>,
    pub wall_clock_secs: f64,
}

/// `(mean, stderr)` of `values` with the unbiased sample deviation; the
/// stderr of fewer than two values is 0.
pub fn mean_stderr(values: &[f64]) -> Option<(f64, f64)> {
    if values.is_empty() {
        return None;
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    if values.len() < 2 {
        return Some((mean, 0.0));
    }
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0);
    Some((mean, (var / n).sqrt()))
}

impl MethodSummary {
    fn from_raw(
        method: MethodSpec,
        raw: Vec<Option<f64>>,
        first_error: Option<String>,
        time: Duration,
    ) -> Self {
        let ok: Vec<f64> = raw.iter().flatten().copied().collect();
        let failures = raw.len() - ok.len();
        let stats = mean_stderr(&ok);
        Self {
            method,
            mean: stats.map(|s| s.0),
            stderr: stats.map(|s| s.1),
            failures,
            invalid: failures * 10 > raw.len(),
            raw,
            first_error,
            wall_clock_secs: time.as_secs_f64(),
            reference: None,
            deviation: None,
        }
    }
}

impl ExperimentReport {
    pub fn method(&self, method: MethodSpec) -> Option<&MethodSummary> {
        self.methods.iter().find(|m| m.method == method)
    }

    /// `method,rep,seed,mislabeling,status`, one row per method and rep.
    /// Timings are left out so the bytes depend on the seeds only.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("method,rep,seed,mislabeling,status\n");
        for m in &self.methods {
            for (entry, value) in self.seed_ledger.iter().zip(&m.raw) {
                let (v, status) = match value {
                    Some(v) => (v.to_string(), "ok"),
                    None => (String::new(), "failed"),
                };
                let _ = writeln!(
                    out,
                    "{},{},{},{},{}",
                    m.method, entry.rep, entry.seed, v, status
                );
            }
        }
        out
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    /// Writes `<stem>.csv` and `<stem>.json` into `dir`.
    pub fn write(&self, dir: impl AsRef<Path>, stem: &str) -> Result<(PathBuf, PathBuf)> {
        let dir = dir.as_ref();
        let csv = dir.join(format!("{stem}.csv"));
        let json = dir.join(format!("{stem}.json"));
        write_file(&csv, self.to_csv().as_bytes())?;
        write_file(&json, self.to_json()?.as_bytes())?;
        Ok((csv, json))
    }
}

/// Worker count: explicit value, then `ROBUST_CLUSTER_THREADS`, then 0
/// (rayon's default).
pub fn resolve_threads(explicit: Option<usize>) -> usize {
    explicit
        .or_else(|| std::env::var(THREADS_ENV).ok()?.trim().parse().ok())
        .unwrap_or(0)
}

fn pool(threads: usize) -> Result<rayon::ThreadPool> {
    rayon::ThreadPoolBuilder::new()
        .num_threads(threads)
        .build()
        .map_err(|e| Error::Config(format!("cannot start worker pool: {e}")))
}

fn data_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Loaded once per cell so reps do not reread the file.
enum Source {
    Mixture,
    Letters(Vec<LetterRecord>),
}

impl Source {
    fn load(scenario: &Scenario) -> Result<Self> {
        Ok(match scenario {
            Scenario::Mixture { .. } => Source::Mixture,
            Scenario::Letters { path, .. } => Source::Letters(read_letters(path)?),
        })
    }
}

fn generate(config: &ExperimentConfig, source: &Source, seed: u64) -> Result<RepData> {
    let mut rng = data_rng(seed);
    match (&config.scenario, source) {
        (
            Scenario::Mixture {
                k,
                d,
                law,
                delta_sep,
                per_cluster,
            },
            _,
        ) => {
            let centroids = gen_centroids(*k, *d, *delta_sep, &mut rng)?;
            let spec = MixtureSpec {
                centroids: centroids.clone(),
                counts: vec![*per_cluster; *k],
                law: *law,
            };
            let (points, truth) = sample_mixture(&spec, &mut rng)?;
            match &config.outliers {
                Some(o) => {
                    let c = inject_outliers(&points, &truth, &centroids, o, &mut rng)?;
                    Ok(RepData {
                        points: c.points,
                        truth: c.truth,
                        keep_mask: c.keep_mask,
                        centroids,
                    })
                }
                None => Ok(RepData {
                    keep_mask: vec![true; points.n()],
                    points,
                    truth,
                    centroids,
                }),
            }
        }
        (
            Scenario::Letters {
                path,
                classes,
                per_class,
                outlier_class,
                outlier_count,
            },
            Source::Letters(records),
        ) => {
            let s = sample_letters(
                records,
                path,
                classes,
                *per_class,
                *outlier_class,
                *outlier_count,
                rng.random(),
            )?;
            let truth = s.dataset.truth.expect("letters carry labels");
            let centroid_rows: Vec<Vec<f64>> = truth
                .members()
                .iter()
                .map(|m| mean_of(&s.dataset.points, m))
                .collect();
            Ok(RepData {
                centroids: CentroidSet::from_rows(&centroid_rows)?,
                points: s.dataset.points,
                truth,
                keep_mask: s.keep_mask,
            })
        }
        (Scenario::Letters { .. }, Source::Mixture) => unreachable!("source loaded from scenario"),
    }
}

/// Generates the data of rep `rep` exactly as [`run_cell`] does.
pub fn rep_data(config: &ExperimentConfig, rep: usize) -> Result<RepData> {
    config.validate()?;
    generate(
        config,
        &Source::load(&config.scenario)?,
        config.rep_seed(rep),
    )
}

/// IOD parameters for one rep: the overrides, or defaults with α equal to
/// the smallest true cluster fraction.
pub fn iod_params_for(config: &ExperimentConfig, data: &RepData) -> Result<IodParams> {
    let k = config.scenario.k();
    match config.iod_overrides {
        Some(o) => Ok(IodParams::new(o.m1, o.m, o.beta, k)),
        None => {
            let smallest = data.truth.counts().into_iter().min().unwrap_or(0);
            default_params(data.points.n(), k, smallest as f64 / data.points.n() as f64)
        }
    }
}

struct RepOutcome {
    values: Vec<std::result::Result<f64, String>>,
    times: Vec<Duration>,
}

fn run_rep(config: &ExperimentConfig, source: &Source, rep: usize) -> RepOutcome {
    let seed = config.rep_seed(rep);
    let m = config.methods.len();
    let data = match generate(config, source, seed) {
        Ok(d) => d,
        Err(e) => {
            return RepOutcome {
                values: vec![Err(format!("data generation: {e}")); m],
                times: vec![Duration::ZERO; m],
            }
        }
    };
    let iod_start = Instant::now();
    let iod = if config.methods.iter().any(|s| s.init == InitKind::Iod) {
        Some(iod_params_for(config, &data).and_then(|p| iodk(&data.points, &p)))
    } else {
        None
    };
    let iod_time = iod_start.elapsed();
    let mut values = Vec::with_capacity(m);
    let mut times = Vec::with_capacity(m);
    for method in &config.methods {
        let start = Instant::now();
        let mut rng = stream_rng(seed, method.stream());
        let outcome = run_method(config, &data, iod.as_ref(), *method, &mut rng)
            .and_then(|labels| {
                mislabeling_on_mask(
                    &labels,
                    &data.truth,
                    &data.keep_mask,
                    MislabelingMode::Permutations,
                )
            })
            .map_err(|e| e.to_string());
        let mut time = start.elapsed();
        if method.init == InitKind::Iod {
            time += iod_time;
        }
        values.push(outcome);
        times.push(time);
    }
    RepOutcome { values, times }
}

fn run_method(
    config: &ExperimentConfig,
    data: &RepData,
    iod: Option<&Result<crate::iod::IodResult>>,
    method: MethodSpec,
    rng: &mut ChaCha8Rng,
) -> Result<LabelVector> {
    let k = config.scenario.k();
    let points = &data.points;
    let init = match method.init {
        InitKind::Iod => match iod.expect("computed when any method uses it") {
            Ok(r) => r.centroids.clone(),
            Err(e) => return Err(Error::Infeasible(format!("initialization failed: {e}"))),
        },
        InitKind::Kmeanspp => kmeanspp_init(points, k, rng)?,
        InitKind::Random => random_init(points, k, rng)?,
        InitKind::Oracle => data.centroids.clone(),
    };
    let init = Init::Centroids(init);
    let run = match method.cluster {
        ClusterKind::Cod => cod_cluster(
            points,
            &init,
            &CodParams {
                delta: config.delta,
                epsilon: config.epsilon,
                max_iterations: config.max_iterations,
            },
        )?,
        ClusterKind::Lloyd => lloyd(points, &init, &config.lloyd_params(), rng)?,
        ClusterKind::Kmedian => kmedian_hybrid(points, &init, &config.lloyd_params(), rng)?,
    };
    Ok(run.labels)
}

/// Runs every rep of the cell and aggregates per method.
pub fn run_cell(config: &ExperimentConfig) -> Result<ExperimentReport> {
    run_cell_with_threads(config, resolve_threads(config.threads))
}

/// [`run_cell`] on exactly `threads` workers (0: rayon's default).
pub fn run_cell_with_threads(
    config: &ExperimentConfig,
    threads: usize,
) -> Result<ExperimentReport> {
    config.validate()?;
    let source = Source::load(&config.scenario)?;
    let start = Instant::now();
    let outcomes: Vec<RepOutcome> = pool(threads)?.install(|| {
        (0..config.reps)
            .into_par_iter()
            .map(|r| run_rep(config, &source, r))
            .collect()
    });
    let methods = config
        .methods
        .iter()
        .enumerate()
        .map(|(j, &method)| {
            let raw: Vec<Option<f64>> = outcomes
                .iter()
                .map(|o| o.values[j].as_ref().ok().copied())
                .collect();
            let first_error = outcomes
                .iter()
                .find_map(|o| o.values[j].as_ref().err().cloned());
            let time = outcomes.iter().map(|o| o.times[j]).sum();
            MethodSummary::from_raw(method, raw, first_error, time)
        })
        .collect();
    Ok(ExperimentReport {
        config: config.clone(),
        methods,
        seed_ledger: (0..config.reps)
            .map(|rep| SeedEntry {
                rep,
                seed: config.rep_seed(rep),
            })
            .collect(),
        wall_clock_secs: start.elapsed().as_secs_f64(),
    })
}

/// Recomputes one rep in isolation; `None` marks a failed method.
pub fn replay_rep(config: &ExperimentConfig, rep: usize) -> Result<Vec<(MethodSpec, Option<f64>)>> {
    config.validate()?;
    let source = Source::load(&config.scenario)?;
    let outcome = run_rep(config, &source, rep);
    Ok(config
        .methods
        .iter()
        .copied()
        .zip(outcome.values.into_iter().map(|v| v.ok()))
        .collect())
}

/// Fixed constants of the published simulation protocol.
pub const TABLE_M1: usize = 20;
pub const TABLE_M: usize = 10;
pub const TABLE_BETA: f64 = 0.05;
pub const TABLE_DELTA: f64 = 0.3;
pub const TABLE_SEPARATION: f64 = 25.0;
pub const TABLE_PER_CLUSTER: usize = 200;
pub const LETTERS_DELTA: f64 = 0.48;
pub const LETTERS_PER_CLASS: usize = 100;
pub const LETTERS_OUTLIERS: usize = 20;
pub const LETTERS_OUTLIER_CLASS: char = 'R';

/// Environment variable pointing at the letter-recognition data file.
pub const LETTERS_ENV: &str = "LETTERS_DATA";

fn scaled(count: usize, scale: f64) -> usize {
    ((count as f64 * scale).round() as usize).max(1)
}

/// Configuration of one simulation-table cell: `k` clusters, `value` of the
/// table's varied parameter.
pub fn table_cell_config(
    table: TableId,
    k: usize,
    value: f64,
    reps: usize,
    scale: f64,
    base_seed: u64,
    letters_path: Option<&Path>,
) -> Result<ExperimentConfig> {
    ensure!(scale > 0.0, "scale must be positive, got {scale}");
    let methods = table
        .methods()
        .iter()
        .map(|m| m.parse())
        .collect::<Result<Vec<MethodSpec>>>()?;
    let t = |nu: f64, sigma: f64| ErrorLaw::StudentT {
        nu,
        sigma,
        scale_convention: Default::default(),
    };
    let (d, law) = match table {
        TableId::Nu => (5, t(value, 5.0)),
        TableId::Sigma => (10, t(1.5, value)),
        TableId::Dim => (value as usize, t(1.5, 5.0)),
        TableId::Letters => {
            let path = letters_path.ok_or_else(|| missing_letters(None))?;
            if !path.exists() {
                return Err(missing_letters(Some(path)));
            }
            let classes = match k {
                2 => vec!['W', 'V'],
                3 => vec!['X', 'M', 'A'],
                _ => return Err(Error::UnknownCell(format!("letters has no k = {k} column"))),
            };
            let with_outliers = value != 0.0;
            return Ok(ExperimentConfig {
                scenario: Scenario::Letters {
                    path: path.to_path_buf(),
                    classes,
                    per_class: scaled(LETTERS_PER_CLASS, scale),
                    outlier_class: with_outliers.then_some(LETTERS_OUTLIER_CLASS),
                    outlier_count: if with_outliers {
                        scaled(LETTERS_OUTLIERS, scale)
                    } else {
                        0
                    },
                },
                methods,
                reps,
                base_seed,
                outliers: None,
                iod_overrides: Some(IodOverrides {
                    m1: TABLE_M1,
                    m: TABLE_M,
                    beta: TABLE_BETA,
                }),
                delta: LETTERS_DELTA,
                epsilon: default_epsilon(),
                max_iterations: default_max_iterations(),
                empty_cluster_rule: EmptyClusterRule::default(),
                threads: None,
            });
        }
    };
    Ok(ExperimentConfig {
        scenario: Scenario::Mixture {
            k,
            d,
            law,
            delta_sep: TABLE_SEPARATION,
            per_cluster: scaled(TABLE_PER_CLUSTER, scale),
        },
        methods,
        reps,
        base_seed,
        outliers: None,
        iod_overrides: Some(IodOverrides {
            m1: TABLE_M1,
            m: TABLE_M,
            beta: TABLE_BETA,
        }),
        delta: TABLE_DELTA,
        epsilon: default_epsilon(),
        max_iterations: default_max_iterations(),
        empty_cluster_rule: EmptyClusterRule::default(),
        threads: None,
    })
}

fn missing_letters(path: Option<&Path>) -> Error {
    let where_ = match path {
        Some(p) => format!("{} does not exist", p.display()),
        None => format!("no data path given (pass --data or set {LETTERS_ENV})"),
    };
    Error::Config(format!(
        "letters table needs the letter-recognition file: {where_}; expected {}",
        crate::dataset::LETTERS_FORMAT
    ))
}

/// Grid of a table: `(k, value)` pairs in display order.
pub fn table_grid(table: TableId) -> Vec<(usize, f64)> {
    let values: &[f64] = match table {
        TableId::Nu => &[1.0, 1.5, 10.0],
        TableId::Sigma => &[1.0, 5.0, 10.0],
        TableId::Dim => &[2.0, 10.0, 30.0],
        TableId::Letters => &[0.0, 1.0],
    };
    [2, 3]
        .iter()
        .flat_map(|&k| values.iter().map(move |&v| (k, v)))
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableCell {
    pub k: usize,
    pub value: f64,
    pub report: ExperimentReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TableReport {
    pub table: TableId,
    pub reps: usize,
    pub scale: f64,
    pub base_seed: u64,
    pub cells: Vec<TableCell>,
}

/// Seed of cell `i` of a table run.
pub fn cell_seed(base_seed: u64, cell: usize) -> u64 {
    base_seed ^ ((cell as u64 + 1) << 32)
}

/// Runs every cell of `table` and attaches the published values.
pub fn reproduce_table(
    table: TableId,
    reps: usize,
    scale: f64,
    base_seed: u64,
    letters_path: Option<&Path>,
    threads: Option<usize>,
) -> Result<TableReport> {
    let reference = ReferenceTables::embedded();
    let mut cells = Vec::new();
    for (i, (k, value)) in table_grid(table).into_iter().enumerate() {
        let mut config = table_cell_config(
            table,
            k,
            value,
            reps,
            scale,
            cell_seed(base_seed, i),
            letters_path,
        )?;
        config.threads = threads;
        let mut report = run_cell(&config)?;
        for m in &mut report.methods {
            if let Ok((mean, stderr)) = reference.lookup(table, k, value, &m.method.to_string()) {
                m.reference = Some(ReferenceValue { mean, stderr });
                m.deviation = m.mean.map(|x| (x - mean).abs());
            }
        }
        cells.push(TableCell { k, value, report });
    }
    Ok(TableReport {
        table,
        reps,
        scale,
        base_seed,
        cells,
    })
}

impl TableReport {
    /// Side-by-side text table: measured `mean (stderr)`, published value,
    /// absolute deviation.
    pub fn render(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(
            out,
            "table {}  reps={}  scale={}  seed={}",
            self.table, self.reps, self.scale, self.base_seed
        );
        let _ = writeln!(
            out,
            "{:>3} {:>9} {:<16} {:>17} {:>17} {:>7}",
            "k",
            self.table.param(),
            "method",
            "measured",
            "published",
            "|diff|"
        );
        let fmt_pair = |m: Option<f64>, s: Option<f64>| match (m, s) {
            (Some(m), Some(s)) => format!("{m:.3} ({s:.3})"),
            _ => "n/a".to_string(),
        };
        for cell in &self.cells {
            let value = match self.table {
                TableId::Letters if cell.value == 0.0 => "clean".to_string(),
                TableId::Letters => "outliers".to_string(),
                _ => cell.value.to_string(),
            };
            for m in &cell.report.methods {
                let mut measured = fmt_pair(m.mean, m.stderr);
                if m.invalid {
                    measured.push('!');
                }
                let published = m
                    .reference
                    .map(|r| fmt_pair(Some(r.mean), Some(r.stderr)))
                    .unwrap_or_else(|| "-".into());
                let diff = m
                    .deviation
                    .map(|d| format!("{d:.3}"))
                    .unwrap_or_else(|| "-".into());
                let _ = writeln!(
                    out,
                    "{:>3} {:>9} {:<16} {:>17} {:>17} {:>7}",
                    cell.k,
                    value,
                    m.method.to_string(),
                    measured,
                    published,
                    diff
                );
            }
        }
        out
    }

    /// All cells' rows in one CSV with a leading `k,value` pair.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("k,value,method,rep,seed,mislabeling,status\n");
        for cell in &self.cells {
            for line in cell.report.to_csv().lines().skip(1) {
                let _ = writeln!(out, "{},{},{}", cell.k, cell.value, line);
            }
        }
        out
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// Per-rep mislabeling of Lloyd and COD on one pathological construction.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
pub struct PathologyCase {
    pub lloyd: Vec<f64>,
    pub cod: Vec<f64>,
}

impl PathologyCase {
    pub fn lloyd_fraction_at_least(&self, threshold: f64) -> f64 {
        fraction(&self.lloyd, |v| v >= threshold)
    }

    pub fn cod_fraction_at_most(&self, threshold: f64) -> f64 {
        fraction(&self.cod, |v| v <= threshold)
    }

    pub fn cod_mean(&self) -> Option<f64> {
        mean_stderr(&self.cod).map(|s| s.0)
    }

    pub fn lloyd_mean(&self) -> Option<f64> {
        mean_stderr(&self.lloyd).map(|s| s.0)
    }
}

fn fraction(values: &[f64], pred: impl Fn(f64) -> bool) -> f64 {
    if values.is_empty() {
        return 0.0;
    }
    values.iter().filter(|&&v| pred(v)).count() as f64 / values.len() as f64
}

/// Settings of the two pathological constructions.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PathologySettings {
    pub three_n: usize,
    pub three_delta: f64,
    pub three_beta: f64,
    pub three_c: f64,
    /// COD trimming on the three-centroid data: `1/2 − β/4`.
    pub three_cod_delta: f64,
    pub heavy_n: usize,
    pub heavy_delta: f64,
    pub heavy_epsilon: f64,
    pub heavy_cod_delta: f64,
}

impl Default for PathologySettings {
    fn default() -> Self {
        Self {
            three_n: 300,
            three_delta: 100.0,
            three_beta: 0.3,
            three_c: 3.0,
            three_cod_delta: 0.425,
            heavy_n: 2000,
            heavy_delta: 20.0,
            heavy_epsilon: 0.5,
            heavy_cod_delta: 0.3,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathologyReport {
    pub settings: PathologySettings,
    pub seed: u64,
    /// Lloyd and COD both start from the corrupted labeling.
    pub three_centroid: PathologyCase,
    /// Reps in which Lloyd emptied a cluster at some iteration.
    pub three_centroid_emptied: Vec<bool>,
    /// Lloyd and COD both start from IOD with `α = 1/2`.
    pub heavy_tail: PathologyCase,
    /// Reps in which IOD itself failed (both methods scored as 1/2).
    pub heavy_tail_iod_failures: usize,
}

impl PathologyReport {
    pub fn render(&self) -> String {
        let mut out = String::new();
        let reps = self.three_centroid.lloyd.len();
        let _ = writeln!(out, "pathology suite  reps={reps}  seed={}", self.seed);
        for (name, case) in [
            ("three-centroid", &self.three_centroid),
            ("heavy-tail", &self.heavy_tail),
        ] {
            let _ = writeln!(
                out,
                "{name:<15} lloyd mean {:.3}  lloyd>=0.25 in {:.0}%   cod mean {:.3}  cod<=0.1 in {:.0}%",
                case.lloyd_mean().unwrap_or(f64::NAN),
                100.0 * case.lloyd_fraction_at_least(0.25),
                case.cod_mean().unwrap_or(f64::NAN),
                100.0 * case.cod_fraction_at_most(0.1),
            );
        }
        out
    }
}

/// Both Lloyd pathologies with the default settings.
pub fn pathology_suite(reps: usize, seed: u64) -> Result<PathologyReport> {
    pathology_suite_with(reps, seed, &PathologySettings::default())
}

pub fn pathology_suite_with(
    reps: usize,
    seed: u64,
    settings: &PathologySettings,
) -> Result<PathologyReport> {
    let (three_centroid, three_centroid_emptied) = pathology_three(reps, seed, settings)?;
    let (heavy_tail, heavy_tail_iod_failures) = pathology_heavy(reps, seed, settings)?;
    Ok(PathologyReport {
        settings: *settings,
        seed,
        three_centroid,
        three_centroid_emptied,
        heavy_tail,
        heavy_tail_iod_failures,
    })
}

/// Three-centroid construction: Lloyd (random reseeding of empty clusters)
/// and COD from the corrupted labeling. Also returns, per rep, whether
/// Lloyd emptied a cluster.
pub fn pathology_three(
    reps: usize,
    seed: u64,
    s: &PathologySettings,
) -> Result<(PathologyCase, Vec<bool>)> {
    let rows: Vec<(f64, f64, bool)> = (0..reps)
        .into_par_iter()
        .map(|r| -> Result<(f64, f64, bool)> {
            let rep_seed = seed ^ r as u64;
            let p = lloyd_pathology_three(
                s.three_n,
                s.three_delta,
                s.three_beta,
                s.three_c,
                &mut data_rng(rep_seed),
            )?;
            let init = Init::Labels(p.init_labels.clone());
            let run = lloyd(
                &p.points,
                &init,
                &LloydParams::default(),
                &mut stream_rng(rep_seed, 1),
            )?;
            let emptied = run.history.iter().any(|h| !h.empty_clusters.is_empty());
            let l = mislabeling(&run.labels, &p.truth, MislabelingMode::Permutations)?;
            let cod = cod_cluster(&p.points, &init, &CodParams::with_delta(s.three_cod_delta))?;
            let c = mislabeling(&cod.labels, &p.truth, MislabelingMode::Permutations)?;
            Ok((l, c, emptied))
        })
        .collect::<Result<_>>()?;
    Ok((
        PathologyCase {
            lloyd: rows.iter().map(|t| t.0).collect(),
            cod: rows.iter().map(|t| t.1).collect(),
        },
        rows.iter().map(|t| t.2).collect(),
    ))
}

/// Heavy-tail construction: Lloyd and COD from the same IOD start with
/// `α = 1/2`. Reps where IOD is infeasible score 1/2 for both and are
/// counted in the second value.
pub fn pathology_heavy(
    reps: usize,
    seed: u64,
    s: &PathologySettings,
) -> Result<(PathologyCase, usize)> {
    let rows: Vec<(f64, f64, bool)> = (0..reps)
        .into_par_iter()
        .map(|r| -> Result<(f64, f64, bool)> {
            let rep_seed = seed ^ r as u64;
            let (points, truth, _) = lloyd_pathology_heavy(
                s.heavy_n,
                s.heavy_delta,
                s.heavy_epsilon,
                &mut data_rng(rep_seed),
            )?;
            let params = default_params(points.n(), 2, 0.5)?;
            let init = match iodk(&points, &params) {
                Ok(r) => Init::Centroids(r.centroids),
                Err(Error::Infeasible(_)) => return Ok((0.5, 0.5, true)),
                Err(e) => return Err(e),
            };
            let run = lloyd(
                &points,
                &init,
                &LloydParams::default(),
                &mut stream_rng(rep_seed, 1),
            )?;
            let l = mislabeling(&run.labels, &truth, MislabelingMode::Permutations)?;
            let cod = cod_cluster(&points, &init, &CodParams::with_delta(s.heavy_cod_delta))?;
            let c = mislabeling(&cod.labels, &truth, MislabelingMode::Permutations)?;
            Ok((l, c, false))
        })
        .collect::<Result<_>>()?;
    Ok((
        PathologyCase {
            lloyd: rows.iter().map(|t| t.0).collect(),
            cod: rows.iter().map(|t| t.1).collect(),
        },
        rows.iter().filter(|t| t.2).count(),
    ))
}
