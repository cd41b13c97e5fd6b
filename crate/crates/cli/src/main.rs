use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use netcentral::centrality::{DeltaRule, PowerIteration, Regularization, Scaling};
use netcentral::estimator::{BiasCoefficients, EigenMode, Estimator};
use netcentral::inference::{
    confidence, robust_test, test, FitSummary, IntervalUnion, NullIntervalPolicy, Sided, TestResult,
};
use netcentral::montecarlo::{realize, run_experiment, write_outputs, ExperimentConfig};
use netcentral::walks::{derive_b, derive_g, reference_b, reference_g, BiasConvention, Budget};
use netcentral::{io as nio, Error, SparseGraph};

/// Regression on network centralities with corrections for a noisily
/// measured network.
#[derive(Parser)]
#[command(name = "netcentral", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a Monte Carlo experiment described by a JSON config.
    Simulate(SimulateArgs),
    /// Regress outcomes on a centrality of an observed network.
    Regress(RegressArgs),
    /// Print a centrality vector for an edge list.
    Centrality(CentralityArgs),
    /// Derive the g and b_T coefficient tables, optionally checking them.
    #[command(alias = "derive")]
    DeriveCoefficients(DeriveArgs),
}

#[derive(Clone, Copy, ValueEnum, PartialEq, Eq)]
enum Format {
    Json,
    Csv,
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long)]
    config: PathBuf,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
    #[arg(long, env = "NETCENTRAL_THREADS")]
    threads: Option<usize>,
    /// Overrides `master_seed` from the config.
    #[arg(long)]
    seed: Option<u64>,
    /// Writes replication 0 of every node count to this directory.
    #[arg(long)]
    dump_graph: Option<PathBuf>,
    /// `csv` writes size/power/distribution tables; `json` writes results.json.
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
}

#[derive(Clone, Copy, ValueEnum)]
enum Kind {
    Degree,
    Diffusion,
    Eigenvector,
    RegularizedEigenvector,
}

#[derive(Clone, Copy, ValueEnum)]
enum EigenModeArg {
    CaseA,
    CaseB,
    Corollary5,
}

#[derive(Clone, Copy, ValueEnum)]
enum CoefficientsArg {
    Tabulated,
    Full,
}

#[derive(Clone, Copy, ValueEnum)]
enum SidedArg {
    Two,
    Left,
    Right,
}

#[derive(Clone, Copy, ValueEnum)]
enum NullIntervalArg {
    Interval,
    SingletonZero,
}

#[derive(Args)]
struct RecipeArgs {
    /// Centrality; repeat to fit several.
    #[arg(long = "estimator", value_enum, default_value = "degree")]
    kinds: Vec<Kind>,
    /// Attenuation δ: a number, `inv-lambda1` or `inv-sqrt-lambda1`.
    #[arg(long, default_value = "1")]
    delta: String,
    #[arg(long = "horizon", short = 'T', default_value_t = 2)]
    horizon: usize,
    #[arg(long, value_enum, default_value = "tabulated")]
    bias_coefficients: CoefficientsArg,
    /// Eigenvector scaling: `sqrt-n`, `sqrt-lambda1` or a number.
    #[arg(long, default_value = "sqrt-lambda1")]
    scaling: String,
    #[arg(long, value_enum, default_value = "corollary5")]
    eigen_mode: EigenModeArg,
    /// Regularization: `oracle:<p_n>` or `plug-in:<M>`.
    #[arg(long)]
    regularization: Option<String>,
    /// A full estimator as JSON; replaces the flags above.
    #[arg(long, conflicts_with = "kinds")]
    estimator_json: Option<String>,
    /// Seed for the power-iteration start vector.
    #[arg(long, default_value_t = PowerIteration::default().seed)]
    seed: u64,
}

#[derive(Args)]
struct RegressArgs {
    #[arg(long)]
    edges: PathBuf,
    /// CSV `id,y` covering every node exactly once.
    #[arg(long)]
    outcomes: PathBuf,
    #[command(flatten)]
    recipe: RecipeArgs,
    #[arg(long = "beta0", default_value = "0", allow_negative_numbers = true)]
    beta0: Vec<f64>,
    #[arg(long = "alpha", default_value = "0.05")]
    alpha: Vec<f64>,
    #[arg(long, value_enum, default_value = "two")]
    sided: SidedArg,
    #[arg(long, value_enum, default_value = "interval")]
    null_interval: NullIntervalArg,
    #[arg(long, value_enum, default_value = "json")]
    format: Format,
    /// Output file; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CentralityArgs {
    #[arg(long)]
    edges: PathBuf,
    /// Number of nodes; defaults to one more than the largest id.
    #[arg(long)]
    nodes: Option<usize>,
    #[command(flatten)]
    recipe: RecipeArgs,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum, PartialEq, Eq)]
enum What {
    G,
    B,
}

#[derive(Clone, Copy, ValueEnum)]
enum ConventionArg {
    Tabulated,
    Full,
}

#[derive(Args)]
struct DeriveArgs {
    #[arg(value_enum)]
    what_positional: Option<What>,
    #[arg(long, value_enum, conflicts_with = "what_positional")]
    what: Option<What>,
    /// Largest `t` for g, largest horizon `T` for b.
    #[arg(long, default_value_t = 4)]
    max: usize,
    #[arg(long, value_enum, default_value = "csv")]
    format: Format,
    /// Compare with the embedded tables; exit 1 on any mismatch.
    #[arg(long)]
    verify: bool,
    /// Allow walks up to length 14 instead of 10.
    #[arg(long)]
    extended: bool,
    #[arg(long, value_enum, default_value = "tabulated")]
    convention: ConventionArg,
    #[arg(long)]
    out: Option<PathBuf>,
}

enum Failure {
    Mismatch(String),
    Data(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Data(e.to_string())
    }
}

impl From<io::Error> for Failure {
    fn from(e: io::Error) -> Self {
        Failure::Data(e.to_string())
    }
}

impl From<csv::Error> for Failure {
    fn from(e: csv::Error) -> Self {
        Failure::Data(e.to_string())
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure::Data(e.to_string())
    }
}

type CmdResult = std::result::Result<(), Failure>;

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    let out = match cli.command {
        Command::Simulate(a) => simulate(a),
        Command::Regress(a) => regress(a),
        Command::Centrality(a) => centrality(a),
        Command::DeriveCoefficients(a) => derive(a),
    };
    match out {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Mismatch(m)) => {
            eprintln!("verification failed: {m}");
            ExitCode::from(1)
        }
        Err(Failure::Data(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
    }
}

fn open(path: &Path) -> Result<BufReader<File>, Failure> {
    File::open(path).map(BufReader::new).map_err(|e| Failure::Data(format!("{}: {e}", path.display())))
}

fn sink(path: Option<&Path>) -> Result<Box<dyn Write>, Failure> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(File::create(p)?)),
        None => Box::new(BufWriter::new(io::stdout().lock())),
    })
}

fn load_config(path: &Path) -> Result<ExperimentConfig, Failure> {
    let text = std::fs::read_to_string(path).map_err(|e| Failure::Data(format!("{}: {e}", path.display())))?;
    let de = &mut serde_json::Deserializer::from_str(&text);
    serde_path_to_error::deserialize(de).map_err(|e| {
        let pointer = e.path().to_string();
        let inner = e.into_inner();
        Failure::Data(format!("{}: at /{}: {inner}", path.display(), pointer.replace('.', "/")))
    })
}

fn simulate(a: SimulateArgs) -> CmdResult {
    let mut cfg = load_config(&a.config)?;
    if let Some(s) = a.seed {
        cfg.master_seed = s;
    }
    cfg.validate()?;
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(k) = a.threads {
        pool = pool.num_threads(k);
    }
    let pool = pool.build().map_err(|e| Failure::Data(e.to_string()))?;
    let result = pool.install(|| run_experiment(&cfg))?;
    match a.format {
        Format::Csv => write_outputs(&a.out, &cfg, &result)?,
        Format::Json => {
            std::fs::create_dir_all(&a.out)?;
            let mut w = BufWriter::new(File::create(a.out.join("results.json"))?);
            serde_json::to_writer_pretty(&mut w, &result)?;
            writeln!(w)?;
        }
    }
    if let Some(dir) = &a.dump_graph {
        dump(dir, &cfg)?;
    }
    let failed: Vec<String> =
        result.cells.iter().filter(|c| c.all_failed()).map(|c| format!("{} at n = {}", c.estimator, c.n)).collect();
    if !failed.is_empty() {
        return Err(Failure::Data(format!("every replication failed for {}", failed.join(", "))));
    }
    Ok(())
}

/// Writes `Â`, the outcomes for the first estimator, and each estimator's
/// in-memory centrality for replication 0 of every node count.
fn dump(dir: &Path, cfg: &ExperimentConfig) -> CmdResult {
    std::fs::create_dir_all(dir)?;
    for (cell, &n) in cfg.n_grid.iter().enumerate() {
        let r = realize(cfg, cell, 0)?;
        nio::write_edge_list(File::create(dir.join(format!("n{n}_edges.csv")))?, &r.a_hat)?;
        let c = cfg.estimators[0].estimator.true_centrality(&r.a)?;
        let y: Vec<f64> = c.values.iter().zip(&r.eps).map(|(ci, e)| cfg.beta_true * ci + e).collect();
        write_vector(File::create(dir.join(format!("n{n}_outcomes.csv")))?, "y", &y)?;
        for spec in cfg.estimators.iter().filter(|s| !s.no_error) {
            let path = dir.join(format!("n{n}_centrality_{}.csv", spec.label()));
            match spec.estimator.observed_centrality(&r.a_hat) {
                Ok(c) => write_vector(File::create(path)?, "value", &c.values)?,
                Err(e) => eprintln!("warning: {} at n = {n}: {e}", spec.label()),
            }
        }
    }
    Ok(())
}

fn write_vector<W: Write>(w: W, column: &str, v: &[f64]) -> CmdResult {
    let mut w = csv::Writer::from_writer(w);
    w.write_record(["id", column])?;
    for (i, x) in v.iter().enumerate() {
        w.write_record([i.to_string(), x.to_string()])?;
    }
    w.flush()?;
    Ok(())
}

fn parse_scaling(s: &str) -> Result<Scaling, Failure> {
    match s {
        "sqrt-n" => Ok(Scaling::SqrtN),
        "sqrt-lambda1" => Ok(Scaling::SqrtLambda1),
        _ => s
            .parse()
            .map(|a| Scaling::Fixed { a })
            .map_err(|_| Failure::Data(format!("invalid scaling `{s}`"))),
    }
}

fn parse_delta(s: &str) -> Result<DeltaRule, Failure> {
    match s {
        "inv-lambda1" => Ok(DeltaRule::InverseLambda1),
        "inv-sqrt-lambda1" => Ok(DeltaRule::InverseSqrtLambda1),
        _ => s
            .parse()
            .map(|delta| DeltaRule::Fixed { delta })
            .map_err(|_| Failure::Data(format!("invalid delta `{s}`"))),
    }
}

fn parse_regularization(s: Option<&str>) -> Result<Regularization, Failure> {
    let s = s.ok_or_else(|| Failure::Data("regularized eigenvector needs --regularization".into()))?;
    let bad = || Failure::Data(format!("invalid regularization `{s}`"));
    let (mode, value) = s.split_once(':').ok_or_else(bad)?;
    let value: f64 = value.parse().map_err(|_| bad())?;
    match mode {
        "oracle" => Ok(Regularization::Oracle { p_n: value }),
        "plug-in" => Ok(Regularization::PlugIn { m: value }),
        _ => Err(bad()),
    }
}

fn estimators(r: &RecipeArgs) -> Result<Vec<Estimator>, Failure> {
    if let Some(json) = &r.estimator_json {
        return serde_json::from_str(json).map(|e| vec![e]).map_err(|e| Failure::Data(format!("--estimator-json: {e}")));
    }
    r.kinds
        .iter()
        .map(|k| {
            Ok(match k {
                Kind::Degree => Estimator::Degree,
                Kind::Diffusion => Estimator::Diffusion {
                    delta: parse_delta(&r.delta)?,
                    horizon: r.horizon,
                    coefficients: match r.bias_coefficients {
                        CoefficientsArg::Tabulated => BiasCoefficients::Tabulated,
                        CoefficientsArg::Full => BiasCoefficients::Full,
                    },
                },
                Kind::Eigenvector => Estimator::Eigenvector {
                    scaling: parse_scaling(&r.scaling)?,
                    mode: match r.eigen_mode {
                        EigenModeArg::CaseA => EigenMode::CaseA,
                        EigenModeArg::CaseB => EigenMode::CaseB,
                        EigenModeArg::Corollary5 => EigenMode::Corollary5,
                    },
                },
                Kind::RegularizedEigenvector => Estimator::RegularizedEigenvector {
                    scaling: parse_scaling(&r.scaling)?,
                    regularization: parse_regularization(r.regularization.as_deref())?,
                },
            })
        })
        .collect()
}

fn power_opts(r: &RecipeArgs) -> PowerIteration {
    PowerIteration { seed: r.seed, ..PowerIteration::default() }
}

#[derive(Serialize)]
struct NullReport {
    beta0: f64,
    /// Test matched to the estimator; absent when its components are missing.
    test: Option<TestResult>,
    robust: TestResult,
}

#[derive(Serialize)]
struct EstimatorReport {
    estimator: String,
    spec: Estimator,
    fit: FitSummary,
    tests: Vec<NullReport>,
    /// One per α; absent when the estimator has no bias and variance components.
    intervals: Option<Vec<IntervalUnion>>,
}

fn report(e: &Estimator, y: &[f64], g: &SparseGraph, a: &RegressArgs) -> Result<EstimatorReport, Failure> {
    let sided = match a.sided {
        SidedArg::Two => Sided::Two,
        SidedArg::Left => Sided::Left,
        SidedArg::Right => Sided::Right,
    };
    let policy = match a.null_interval {
        NullIntervalArg::Interval => NullIntervalPolicy::Interval,
        NullIntervalArg::SingletonZero => NullIntervalPolicy::SingletonZero,
    };
    let (_, fit) = e.fit_with(y, g, &power_opts(&a.recipe))?;
    let tests = a
        .beta0
        .iter()
        .map(|&b0| NullReport {
            beta0: b0,
            test: test(&fit, b0, sided, &a.alpha).ok(),
            robust: robust_test(&fit, b0, sided, &a.alpha),
        })
        .collect();
    let intervals = if fit.b_hat.is_some() {
        Some(a.alpha.iter().map(|&al| confidence(&fit, al, sided, policy)).collect::<Result<Vec<_>, _>>()?)
    } else {
        None
    };
    Ok(EstimatorReport { estimator: e.label(), spec: *e, fit: fit.summary(), tests, intervals })
}

fn opt(x: Option<f64>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

fn regress(a: RegressArgs) -> CmdResult {
    let edges = nio::read_edge_list(open(&a.edges)?)?;
    let y = nio::read_outcomes(open(&a.outcomes)?)?;
    let g = nio::bind(&edges, &y)?;
    let reports =
        estimators(&a.recipe)?.iter().map(|e| report(e, &y, &g, &a)).collect::<Result<Vec<_>, Failure>>()?;
    let mut w = sink(a.out.as_deref())?;
    match a.format {
        Format::Json => {
            serde_json::to_writer_pretty(&mut w, &reports)?;
            writeln!(w)?;
        }
        Format::Csv => {
            let mut c = csv::Writer::from_writer(w);
            c.write_record([
                "estimator", "beta_hat", "attenuation", "beta_check", "V_hat", "V0_hat", "beta0", "statistic",
                "p_value", "robust_statistic", "robust_p_value",
            ])?;
            for r in &reports {
                for t in &r.tests {
                    c.write_record([
                        r.estimator.clone(),
                        r.fit.beta_hat.to_string(),
                        opt(r.fit.attenuation),
                        opt(r.fit.beta_check),
                        opt(r.fit.v_hat),
                        r.fit.v0_hat.to_string(),
                        t.beta0.to_string(),
                        opt(t.test.as_ref().map(|x| x.statistic)),
                        opt(t.test.as_ref().map(|x| x.p_value)),
                        t.robust.statistic.to_string(),
                        t.robust.p_value.to_string(),
                    ])?;
                }
            }
            c.flush()?;
            return Ok(());
        }
    }
    w.flush()?;
    Ok(())
}

fn centrality(a: CentralityArgs) -> CmdResult {
    let edges = nio::read_edge_list(open(&a.edges)?)?;
    let n = a.nodes.unwrap_or_else(|| edges.iter().map(|&(i, j)| i.max(j) + 1).max().unwrap_or(0));
    let g = SparseGraph::from_edges(n, &edges)?;
    let est = estimators(&a.recipe)?;
    let [e] = est.as_slice() else {
        return Err(Failure::Data("centrality takes exactly one estimator".into()));
    };
    let c = e.observed_centrality_with(&g, &power_opts(&a.recipe))?;
    let mut w = sink(a.out.as_deref())?;
    match a.format {
        Format::Csv => write_vector(&mut w, "value", &c.values)?,
        Format::Json => {
            serde_json::to_writer_pretty(
                &mut w,
                &serde_json::json!({ "estimator": e.label(), "lambda1": c.lambda1, "values": c.values }),
            )?;
            writeln!(w)?;
        }
    }
    w.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct CoefficientRow {
    #[serde(rename = "T", skip_serializing_if = "Option::is_none")]
    horizon: Option<usize>,
    t: usize,
    /// Power `r` of `ι′Âʳι` for g, power `k` of `δᵏ` for b.
    power: usize,
    coefficient: String,
}

fn derive(a: DeriveArgs) -> CmdResult {
    let what = a.what.or(a.what_positional).ok_or_else(|| Failure::Data("specify g or b".into()))?;
    let budget = if a.extended { Budget::EXTENDED } else { Budget::DEFAULT };
    let convention = match a.convention {
        ConventionArg::Tabulated => BiasConvention::Tabulated,
        ConventionArg::Full => BiasConvention::FullExpansion,
    };
    let mut rows = Vec::new();
    let mut mismatches = Vec::new();
    for m in 1..=a.max {
        match what {
            What::G => {
                let g = derive_g(m, budget)?;
                if a.verify && reference_g(m)? != g {
                    mismatches.push(format!("g({m})"));
                }
                rows.extend(g.coeffs.iter().map(|(&r, c)| CoefficientRow {
                    horizon: None,
                    t: m,
                    power: r,
                    coefficient: c.to_string(),
                }));
            }
            What::B => {
                let b = derive_b(m, budget, convention)?;
                if a.verify && reference_b(m)? != b {
                    mismatches.push(format!("b_{m}"));
                }
                rows.extend(b.coeffs.iter().map(|(&(t, k), c)| CoefficientRow {
                    horizon: Some(m),
                    t,
                    power: k,
                    coefficient: c.to_string(),
                }));
            }
        }
    }
    let mut w = sink(a.out.as_deref())?;
    match a.format {
        Format::Json => {
            serde_json::to_writer_pretty(&mut w, &rows)?;
            writeln!(w)?;
        }
        Format::Csv => {
            let mut c = csv::Writer::from_writer(&mut w);
            for r in &rows {
                c.serialize(r)?;
            }
            c.flush()?;
        }
    }
    w.flush()?;
    if mismatches.is_empty() {
        Ok(())
    } else {
        Err(Failure::Mismatch(format!("differs from embedded tables: {}", mismatches.join(", "))))
    }
}
