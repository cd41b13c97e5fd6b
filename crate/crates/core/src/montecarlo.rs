//! Replicated simulation over node counts and estimators.
//!
//! Replication `r` of cell `c` draws everything from streams keyed by
//! `(master_seed, c, r)`, so results do not depend on thread count or order.

use std::collections::BTreeMap;
use std::fmt;
use std::io::Write;
use std::path::Path;
use std::sync::Arc;
use std::time::Instant;

use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimator::Estimator;
use crate::graph::{build_true_adjacency, observe, sample_latent, Graphon, GraphonSpec, SparsityRule};
use crate::inference::{robust_test, test, Sided};
use crate::matrix::{DenseSymmetric, SparseGraph};
use crate::rng::{replication_seed, stream, stream_rng};

/// Draws `ε_i` given the node's latent type.
pub type NoiseFn = Arc<dyn Fn(&mut ChaCha8Rng, f64) -> f64 + Send + Sync>;

/// Regression error law.
#[derive(Clone, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ErrorModel {
    Gaussian {
        sigma: f64,
    },
    #[serde(skip)]
    Custom(NoiseFn),
}

impl Default for ErrorModel {
    fn default() -> Self {
        ErrorModel::Gaussian { sigma: 1.0 }
    }
}

impl fmt::Debug for ErrorModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ErrorModel::Gaussian { sigma } => write!(f, "Gaussian({sigma})"),
            ErrorModel::Custom(_) => f.write_str("Custom(..)"),
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct EstimatorSpec {
    #[serde(flatten)]
    pub estimator: Estimator,
    /// Fit on the true network instead of the observed one.
    #[serde(default)]
    pub no_error: bool,
    /// Overrides the label used in output files.
    #[serde(default)]
    pub name: Option<String>,
}

impl From<Estimator> for EstimatorSpec {
    fn from(estimator: Estimator) -> Self {
        Self { estimator, no_error: false, name: None }
    }
}

impl EstimatorSpec {
    pub fn label(&self) -> String {
        match &self.name {
            Some(n) => n.clone(),
            None if self.no_error => format!("{}-no-error", self.estimator.label()),
            None => self.estimator.label(),
        }
    }
}

fn one() -> f64 {
    1.0
}
fn default_reps() -> usize {
    1000
}
fn default_alphas() -> Vec<f64> {
    vec![0.05]
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub graphon: GraphonSpec,
    pub n_grid: Vec<usize>,
    pub sparsity: SparsityRule,
    #[serde(default = "one")]
    pub beta_true: f64,
    /// Null values tested in every replication; defaults to `[beta_true, 0]`.
    #[serde(default)]
    pub beta0_grid: Vec<f64>,
    pub estimators: Vec<EstimatorSpec>,
    #[serde(default)]
    pub error_model: ErrorModel,
    #[serde(default = "default_reps")]
    pub replications: usize,
    #[serde(default)]
    pub master_seed: u64,
    #[serde(default = "default_alphas")]
    pub alpha_grid: Vec<f64>,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        Graphon::from_spec(&self.graphon)?;
        if self.replications == 0 {
            return Err(Error::InvalidParameter("replications must be at least 1".into()));
        }
        if self.n_grid.is_empty() || self.estimators.is_empty() {
            return Err(Error::InvalidParameter("n_grid and estimators must be nonempty".into()));
        }
        for &n in &self.n_grid {
            if n < 2 {
                return Err(Error::InvalidSize(n));
            }
            self.sparsity.resolve(n)?;
        }
        if let Some(&a) = self.alpha_grid.iter().find(|&&a| !(a > 0.0 && a < 1.0)) {
            return Err(Error::InvalidLevel(a));
        }
        let mut labels: Vec<String> = self.estimators.iter().map(|e| e.label()).collect();
        labels.sort();
        if labels.windows(2).any(|w| w[0] == w[1]) {
            return Err(Error::InvalidParameter("estimator labels must be unique; set `name`".into()));
        }
        Ok(())
    }

    pub fn nulls(&self) -> Vec<f64> {
        if self.beta0_grid.is_empty() {
            vec![self.beta_true, 0.0]
        } else {
            self.beta0_grid.clone()
        }
    }
}

/// One simulated data set before any regressor is computed.
pub struct Realization {
    pub seed: u64,
    pub p_n: f64,
    pub u: Vec<f64>,
    pub a: DenseSymmetric,
    pub a_hat: SparseGraph,
    pub eps: Vec<f64>,
}

/// Draws replication `rep` of cell `cell` (the index into `n_grid`).
pub fn realize(cfg: &ExperimentConfig, cell: usize, rep: usize) -> Result<Realization> {
    let graphon = Graphon::from_spec(&cfg.graphon)?;
    realize_with(cfg, &graphon, cell, rep, true)
}

fn realize_with(cfg: &ExperimentConfig, graphon: &Graphon, cell: usize, rep: usize, need_observed: bool) -> Result<Realization> {
    let n = cfg.n_grid[cell];
    let p_n = cfg.sparsity.resolve(n)?;
    let seed = replication_seed(cfg.master_seed, cell as u64, rep as u64);
    let latent = sample_latent(n, seed)?;
    let a = build_true_adjacency(graphon, &latent, p_n)?;
    let a_hat = if need_observed { observe(&a, seed) } else { SparseGraph::empty(n) };
    let mut rng = stream_rng(seed, stream::NOISE);
    let eps = match &cfg.error_model {
        ErrorModel::Gaussian { sigma } => {
            (0..n).map(|_| sigma * <StandardNormal as Distribution<f64>>::sample(&StandardNormal, &mut rng)).collect::<Vec<f64>>()
        }
        ErrorModel::Custom(h) => latent.u.iter().map(|&u| h(&mut rng, u)).collect(),
    };
    Ok(Realization { seed, p_n, u: latent.u, a, a_hat, eps })
}

/// Per-replication output for one estimator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Draw {
    pub replication: usize,
    pub beta_hat: f64,
    pub beta_check: Option<f64>,
    pub b_hat: Option<f64>,
    pub v_hat: Option<f64>,
    pub v0_hat: f64,
    /// Mode-matched statistic, one per null value.
    pub stat_ours: Vec<f64>,
    /// Robust t, one per null value.
    pub stat_robust: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TestKind {
    Ours,
    Robust,
}

impl TestKind {
    pub fn name(&self) -> &'static str {
        match self {
            TestKind::Ours => "ours",
            TestKind::Robust => "robust",
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct CellResult {
    pub n: usize,
    pub p_n: f64,
    pub estimator: String,
    pub nulls: Vec<f64>,
    pub draws: Vec<Draw>,
    /// Failure counts keyed by error kind.
    pub failures: BTreeMap<String, usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Summary {
    pub mean: f64,
    pub sd: f64,
    pub rmse: f64,
    pub q05: f64,
    pub median: f64,
    pub q95: f64,
}

fn quantile(sorted: &[f64], q: f64) -> f64 {
    if sorted.is_empty() {
        return f64::NAN;
    }
    let pos = q * (sorted.len() - 1) as f64;
    let (lo, hi) = (pos.floor() as usize, pos.ceil() as usize);
    sorted[lo] + (pos - lo as f64) * (sorted[hi] - sorted[lo])
}

/// Mean, sd, RMSE around `target`, and quantiles.
pub fn summarize(values: &[f64], target: f64) -> Summary {
    let k = values.len() as f64;
    let mean = values.iter().sum::<f64>() / k;
    let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (k - 1.0).max(1.0);
    let rmse = (values.iter().map(|v| (v - target).powi(2)).sum::<f64>() / k).sqrt();
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    Summary {
        mean,
        sd: var.sqrt(),
        rmse,
        q05: quantile(&sorted, 0.05),
        median: quantile(&sorted, 0.5),
        q95: quantile(&sorted, 0.95),
    }
}

impl CellResult {
    pub fn failure_count(&self) -> usize {
        self.failures.values().sum()
    }

    pub fn all_failed(&self) -> bool {
        self.draws.is_empty()
    }

    fn null_index(&self, beta0: f64) -> Option<usize> {
        self.nulls.iter().position(|&b| b == beta0)
    }

    /// Two-sided rejection frequency and its binomial standard error.
    pub fn reject_rate(&self, kind: TestKind, beta0: f64, alpha: f64) -> Option<(f64, f64)> {
        let k = self.null_index(beta0)?;
        if self.draws.is_empty() {
            return None;
        }
        let crit = crate::stats::normal_quantile(1.0 - alpha / 2.0);
        let hits = self
            .draws
            .iter()
            .filter(|d| {
                let s = match kind {
                    TestKind::Ours => d.stat_ours[k],
                    TestKind::Robust => d.stat_robust[k],
                };
                s.abs() >= crit
            })
            .count();
        let r = self.draws.len() as f64;
        let rate = hits as f64 / r;
        Some((rate, (rate * (1.0 - rate) / r).sqrt()))
    }

    pub fn beta_hats(&self) -> Vec<f64> {
        self.draws.iter().map(|d| d.beta_hat).collect()
    }

    pub fn beta_checks(&self) -> Vec<f64> {
        self.draws.iter().filter_map(|d| d.beta_check).collect()
    }

    /// Statistics for the null at `beta0`.
    pub fn statistics(&self, kind: TestKind, beta0: f64) -> Vec<f64> {
        let Some(k) = self.null_index(beta0) else { return Vec::new() };
        self.draws
            .iter()
            .map(|d| match kind {
                TestKind::Ours => d.stat_ours[k],
                TestKind::Robust => d.stat_robust[k],
            })
            .collect()
    }
}

fn error_kind(e: &Error) -> String {
    let s = format!("{e:?}");
    s.split(|c: char| !c.is_alphanumeric()).next().unwrap_or("Error").to_string()
}

fn evaluate(spec: &EstimatorSpec, beta: f64, nulls: &[f64], r: &Realization, rep: usize) -> Result<Draw> {
    let c = spec.estimator.true_centrality(&r.a)?;
    let y: Vec<f64> = c.values.iter().zip(&r.eps).map(|(ci, e)| beta * ci + e).collect();
    let (_, fit) = if spec.no_error {
        spec.estimator.fit_without_error(&y, &r.a)?
    } else {
        spec.estimator.fit(&y, &r.a_hat)?
    };
    let mut stat_ours = Vec::with_capacity(nulls.len());
    let mut stat_robust = Vec::with_capacity(nulls.len());
    for &b0 in nulls {
        stat_ours.push(test(&fit, b0, Sided::Two, &[])?.statistic);
        stat_robust.push(robust_test(&fit, b0, Sided::Two, &[]).statistic);
    }
    Ok(Draw {
        replication: rep,
        beta_hat: fit.beta_hat,
        beta_check: fit.beta_check,
        b_hat: fit.b_hat,
        v_hat: fit.v_hat,
        v0_hat: fit.v0_hat,
        stat_ours,
        stat_robust,
    })
}

/// Runs replications `reps` of cell `cell`, one result per estimator.
pub fn run_cell(cfg: &ExperimentConfig, cell: usize, reps: std::ops::Range<usize>) -> Result<Vec<CellResult>> {
    let graphon = Graphon::from_spec(&cfg.graphon)?;
    let n = *cfg.n_grid.get(cell).ok_or_else(|| Error::InvalidParameter(format!("no cell {cell}")))?;
    let p_n = cfg.sparsity.resolve(n)?;
    let nulls = cfg.nulls();
    let need_observed = cfg.estimators.iter().any(|e| !e.no_error);
    let k = cfg.estimators.len();

    let outcomes: Vec<Vec<std::result::Result<Draw, String>>> = reps
        .into_par_iter()
        .map(|rep| match realize_with(cfg, &graphon, cell, rep, need_observed) {
            Ok(r) => cfg
                .estimators
                .iter()
                .map(|spec| evaluate(spec, cfg.beta_true, &nulls, &r, rep).map_err(|e| error_kind(&e)))
                .collect(),
            Err(e) => vec![Err(error_kind(&e)); k],
        })
        .collect();

    let mut results: Vec<CellResult> = cfg
        .estimators
        .iter()
        .map(|spec| CellResult {
            n,
            p_n,
            estimator: spec.label(),
            nulls: nulls.clone(),
            draws: Vec::new(),
            failures: BTreeMap::new(),
        })
        .collect();
    for per_rep in outcomes {
        for (res, out) in results.iter_mut().zip(per_rep) {
            match out {
                Ok(d) => res.draws.push(d),
                Err(kind) => *res.failures.entry(kind).or_insert(0) += 1,
            }
        }
    }
    Ok(results)
}

#[derive(Debug, Clone, Serialize)]
pub struct ExperimentResult {
    pub cells: Vec<CellResult>,
    pub seconds: f64,
}

impl ExperimentResult {
    pub fn cell(&self, n: usize, estimator: &str) -> Option<&CellResult> {
        self.cells.iter().find(|c| c.n == n && c.estimator == estimator)
    }
}

pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    cfg.validate()?;
    let start = Instant::now();
    let mut cells = Vec::new();
    for cell in 0..cfg.n_grid.len() {
        cells.extend(run_cell(cfg, cell, 0..cfg.replications)?);
    }
    Ok(ExperimentResult { cells, seconds: start.elapsed().as_secs_f64() })
}

/// Rejection rates as `(β₀, rate)` for one cell and test.
pub fn power_curve(cell: &CellResult, kind: TestKind, alpha: f64) -> Vec<(f64, f64)> {
    cell.nulls.iter().filter_map(|&b| cell.reject_rate(kind, b, alpha).map(|(r, _)| (b, r))).collect()
}

/// Limit of the degree-regression slope at `p_n = c/n` under a constant
/// graphon `f ≡ c₀`: `λ/(λ+1)` with `λ = n p_n c₀`.
pub fn degree_attenuation_limit(n: usize, p_n: f64, c0: f64) -> f64 {
    let lambda = n as f64 * p_n * c0;
    lambda / (lambda + 1.0)
}

/// Mean of `β̂` per node count next to the analytic limit, for the first
/// estimator of a constant-graphon configuration.
pub fn attenuation_study(cfg: &ExperimentConfig) -> Result<Vec<(usize, f64, Option<f64>)>> {
    let result = run_experiment(cfg)?;
    let label = cfg.estimators[0].label();
    let c0 = match cfg.graphon {
        GraphonSpec::Constant { c } => Some(c),
        _ => None,
    };
    Ok(result
        .cells
        .iter()
        .filter(|c| c.estimator == label)
        .map(|c| {
            let mean = summarize(&c.beta_hats(), cfg.beta_true).mean;
            (c.n, mean, c0.map(|c0| degree_attenuation_limit(c.n, c.p_n, c0)))
        })
        .collect())
}

fn opt(x: Option<f64>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

fn write_rates(path: &Path, result: &ExperimentResult, cfg: &ExperimentConfig, only_truth: bool) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record(["n", "p", "estimator", "beta0", "alpha", "reject_rate", "se", "failures"])?;
    for cell in &result.cells {
        for &b0 in &cell.nulls {
            if only_truth && b0 != cfg.beta_true {
                continue;
            }
            for &alpha in &cfg.alpha_grid {
                for kind in [TestKind::Ours, TestKind::Robust] {
                    let (rate, se) = cell.reject_rate(kind, b0, alpha).unwrap_or((f64::NAN, f64::NAN));
                    w.write_record([
                        cell.n.to_string(),
                        cell.p_n.to_string(),
                        format!("{}:{}", cell.estimator, kind.name()),
                        b0.to_string(),
                        alpha.to_string(),
                        rate.to_string(),
                        se.to_string(),
                        cell.failure_count().to_string(),
                    ])?;
                }
            }
        }
    }
    w.flush()?;
    Ok(())
}

fn write_distribution(path: &Path, cells: &[&CellResult], beta_true: f64) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    w.write_record([
        "n", "p", "replication", "beta_hat", "beta_check", "B_hat", "V_hat", "V0_hat", "stat_ours", "stat_robust",
    ])?;
    for cell in cells {
        let k = cell.null_index(beta_true);
        for d in &cell.draws {
            w.write_record([
                cell.n.to_string(),
                cell.p_n.to_string(),
                d.replication.to_string(),
                d.beta_hat.to_string(),
                opt(d.beta_check),
                opt(d.b_hat),
                opt(d.v_hat),
                d.v0_hat.to_string(),
                opt(k.map(|k| d.stat_ours[k])),
                opt(k.map(|k| d.stat_robust[k])),
            ])?;
        }
    }
    w.flush()?;
    Ok(())
}

#[derive(Serialize)]
struct ManifestCell<'a> {
    n: usize,
    p: f64,
    estimator: &'a str,
    draws: usize,
    failures: &'a BTreeMap<String, usize>,
}

#[derive(Serialize)]
struct Manifest<'a> {
    config: &'a ExperimentConfig,
    master_seed: u64,
    seed_rule: &'static str,
    resolved_p: BTreeMap<usize, f64>,
    cells: Vec<ManifestCell<'a>>,
    seconds: f64,
}

/// Writes `size.csv`, `power.csv`, `dist_<estimator>.csv` and `manifest.json`.
pub fn write_outputs(dir: &Path, cfg: &ExperimentConfig, result: &ExperimentResult) -> Result<()> {
    std::fs::create_dir_all(dir)?;
    write_rates(&dir.join("size.csv"), result, cfg, true)?;
    write_rates(&dir.join("power.csv"), result, cfg, false)?;
    for spec in &cfg.estimators {
        let label = spec.label();
        let cells: Vec<&CellResult> = result.cells.iter().filter(|c| c.estimator == label).collect();
        write_distribution(&dir.join(format!("dist_{label}.csv")), &cells, cfg.beta_true)?;
    }
    let manifest = Manifest {
        config: cfg,
        master_seed: cfg.master_seed,
        seed_rule: "replication seed = splitmix(splitmix(splitmix(master) ^ cell) ^ replication); \
                    ChaCha8 streams 1 latent, 2 observation, 3 noise",
        resolved_p: result.cells.iter().map(|c| (c.n, c.p_n)).collect(),
        cells: result
            .cells
            .iter()
            .map(|c| ManifestCell {
                n: c.n,
                p: c.p_n,
                estimator: &c.estimator,
                draws: c.draws.len(),
                failures: &c.failures,
            })
            .collect(),
        seconds: result.seconds,
    };
    let mut f = std::fs::File::create(dir.join("manifest.json"))?;
    serde_json::to_writer_pretty(&mut f, &manifest)?;
    writeln!(f)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::centrality::Scaling;

    fn config(reps: usize) -> ExperimentConfig {
        ExperimentConfig {
            graphon: GraphonSpec::Constant { c: 1.0 },
            n_grid: vec![60],
            sparsity: SparsityRule::InverseSqrtN,
            beta_true: 1.0,
            beta0_grid: vec![],
            estimators: vec![
                Estimator::Degree.into(),
                Estimator::Eigenvector { scaling: Scaling::SqrtLambda1, mode: Default::default() }.into(),
            ],
            error_model: ErrorModel::default(),
            replications: reps,
            master_seed: 9,
            alpha_grid: vec![0.05],
        }
    }

    #[test]
    fn thread_count_does_not_change_results() {
        let cfg = config(24);
        let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let four = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
        let a = one.install(|| run_cell(&cfg, 0, 0..24)).unwrap();
        let b = four.install(|| run_cell(&cfg, 0, 0..24)).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.draws, y.draws);
        }
        let split = run_cell(&cfg, 0, 12..24).unwrap();
        assert_eq!(split[0].draws[..], a[0].draws[12..]);
    }

    #[test]
    fn config_json_defaults() {
        let cfg: ExperimentConfig = serde_json::from_str(
            r#"{"graphon":{"kind":"constant","c":1.0},"n_grid":[100],"sparsity":{"rule":"inverse-n"},
                "estimators":[{"kind":"degree"},{"kind":"degree","no_error":true}],"replications":10}"#,
        )
        .unwrap();
        cfg.validate().unwrap();
        assert_eq!(cfg.nulls(), vec![1.0, 0.0]);
        assert_eq!(cfg.estimators[1].label(), "degree-no-error");
        assert!(serde_json::from_str::<ExperimentConfig>(r#"{"graphon":{"kind":"constant","c":1.0}}"#).is_err());
    }

    #[test]
    fn duplicate_labels_rejected() {
        let mut cfg = config(1);
        cfg.estimators.push(Estimator::Degree.into());
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn summaries() {
        let s = summarize(&[1.0, 2.0, 3.0], 2.0);
        assert_eq!((s.mean, s.median, s.sd), (2.0, 2.0, 1.0));
        assert!((s.rmse - (2.0f64 / 3.0).sqrt()).abs() < 1e-15);
        assert_eq!(degree_attenuation_limit(100, 0.01, 1.0), 0.5);
    }
}
