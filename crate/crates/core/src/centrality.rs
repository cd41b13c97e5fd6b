//! Degree, diffusion, eigenvector and regularized eigenvector centralities.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{SparseGraph, SymmetricOperator, WeightedGraph};
use crate::rng::{stream, stream_rng};

/// How the diffusion decay `δ` is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "kebab-case", deny_unknown_fields)]
pub enum DeltaRule {
    Fixed { delta: f64 },
    /// `δ = 1 / λ₁`.
    InverseLambda1,
    /// `δ = 1 / √λ₁`.
    InverseSqrtLambda1,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiffusionParams {
    pub delta: DeltaRule,
    pub horizon: usize,
}

impl DiffusionParams {
    pub fn fixed(delta: f64, horizon: usize) -> Self {
        Self { delta: DeltaRule::Fixed { delta }, horizon }
    }

    /// Resolves `δ` against `m`, computing `λ₁` only when the rule needs it.
    pub fn resolve_delta<M: SymmetricOperator + ?Sized>(&self, m: &M) -> Result<f64> {
        let delta = match self.delta {
            DeltaRule::Fixed { delta } => delta,
            DeltaRule::InverseLambda1 | DeltaRule::InverseSqrtLambda1 => {
                let l1 = leading_eigenpair(m)?.lambda1;
                if l1 <= 0.0 {
                    return Err(Error::DegenerateSpectrum(l1));
                }
                if matches!(self.delta, DeltaRule::InverseLambda1) { 1.0 / l1 } else { 1.0 / l1.sqrt() }
            }
        };
        if !(0.0..=1.0).contains(&delta) {
            return Err(Error::InvalidParameter(format!("diffusion decay {delta} outside [0, 1]")));
        }
        Ok(delta)
    }
}

/// Choice of the eigenvector scale `a_n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Scaling {
    Fixed { a: f64 },
    SqrtN,
    SqrtLambda1,
}

impl Scaling {
    pub fn resolve(&self, n: usize, lambda1: f64) -> Result<f64> {
        match *self {
            Scaling::Fixed { a } if a > 0.0 => Ok(a),
            Scaling::Fixed { a } => Err(Error::InvalidParameter(format!("scale {a} must be positive"))),
            Scaling::SqrtN => Ok((n as f64).sqrt()),
            Scaling::SqrtLambda1 if lambda1 > 0.0 => Ok(lambda1.sqrt()),
            Scaling::SqrtLambda1 => Err(Error::DegenerateSpectrum(lambda1)),
        }
    }
}

/// Degree threshold used to down-weight high-degree nodes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Regularization {
    /// Known sparsity: `τ = 2 n p_n`.
    Oracle { p_n: f64 },
    /// Lower bound `M` on the graphon integral: `τ = 3 n ρ̂ / M`.
    PlugIn { m: f64 },
}

/// What produced a centrality vector, with every data-dependent choice resolved.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Recipe {
    Degree,
    Diffusion { delta: f64, horizon: usize },
    Eigenvector { scaling: Scaling, a_n: f64 },
    RegularizedEigenvector { scaling: Scaling, a_n: f64, tau: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct CentralityVector {
    pub values: Vec<f64>,
    pub recipe: Recipe,
    /// Leading eigenvalue, present for the eigenvector kinds.
    pub lambda1: Option<f64>,
}

pub fn degree<M: SymmetricOperator + ?Sized>(m: &M) -> CentralityVector {
    CentralityVector { values: m.row_sums(), recipe: Recipe::Degree, lambda1: None }
}

/// `Σ_{t=1}^T δᵗ Aᵗ ι`, by `T` matrix-vector products.
pub fn diffusion<M: SymmetricOperator + ?Sized>(m: &M, params: &DiffusionParams) -> Result<CentralityVector> {
    if params.horizon == 0 {
        return Err(Error::InvalidParameter("diffusion horizon must be at least 1".into()));
    }
    let delta = params.resolve_delta(m)?;
    let n = m.dim();
    let mut s = vec![1.0; n];
    let mut next = vec![0.0; n];
    let mut values = vec![0.0; n];
    let mut weight = 1.0;
    for _ in 0..params.horizon {
        m.apply(&s, &mut next);
        std::mem::swap(&mut s, &mut next);
        weight *= delta;
        values.iter_mut().zip(&s).for_each(|(c, x)| *c += weight * x);
    }
    Ok(CentralityVector { values, recipe: Recipe::Diffusion { delta, horizon: params.horizon }, lambda1: None })
}

/// Walk totals `ι′Mᵏι` for `k = 1..=kmax`.
pub fn walk_totals<M: SymmetricOperator + ?Sized>(m: &M, kmax: usize) -> Vec<f64> {
    let n = m.dim();
    let mut s = vec![1.0; n];
    let mut next = vec![0.0; n];
    let mut out = Vec::with_capacity(kmax);
    for _ in 0..kmax {
        m.apply(&s, &mut next);
        std::mem::swap(&mut s, &mut next);
        out.push(s.iter().sum());
    }
    out
}

/// Settings for [`leading_eigenpair_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PowerIteration {
    pub max_iterations: usize,
    /// Convergence when `‖Mv − λv‖₂ ≤ tolerance · ‖M‖_F`.
    pub tolerance: f64,
    pub seed: u64,
    /// Also run a deflated iteration to estimate `|λ₂|`.
    pub check_gap: bool,
}

impl Default for PowerIteration {
    fn default() -> Self {
        Self { max_iterations: 200_000, tolerance: 1e-10, seed: 0x5eed, check_gap: false }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Eigenpair {
    pub lambda1: f64,
    /// Unit vector with nonnegative entry sum.
    pub vector: Vec<f64>,
    pub iterations: usize,
    pub residual: f64,
    /// Set when the gap was checked and `|λ₁| − |λ₂| < 1e-8 |λ₁|`.
    pub degenerate_gap: Option<bool>,
}

pub fn leading_eigenpair<M: SymmetricOperator + ?Sized>(m: &M) -> Result<Eigenpair> {
    leading_eigenpair_with(m, &PowerIteration::default())
}

fn norm(x: &[f64]) -> f64 {
    x.iter().map(|v| v * v).sum::<f64>().sqrt()
}

fn dot(x: &[f64], y: &[f64]) -> f64 {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

/// Leading eigenpair by shifted power iteration.
///
/// Each step maps `x ↦ Mx + σx` with `σ` half the current Rayleigh quotient
/// (floored at zero). For nonnegative matrices this converges to the Perron
/// pair, which is also the largest in magnitude, and it does so on bipartite
/// graphs where `−λ₁` is an eigenvalue as well. Convergence is judged on the
/// unshifted residual.
pub fn leading_eigenpair_with<M: SymmetricOperator + ?Sized>(m: &M, opts: &PowerIteration) -> Result<Eigenpair> {
    let n = m.dim();
    let fro = m.frobenius_norm();
    if n == 0 || fro == 0.0 {
        return Err(Error::EmptyGraph);
    }
    let tol = opts.tolerance * fro;
    let mut rng = stream_rng(opts.seed, stream::POWER_START);
    let mut x: Vec<f64> = (0..n).map(|_| 1.0 + 0.5 * rng.random::<f64>()).collect();
    let s = norm(&x);
    x.iter_mut().for_each(|v| *v /= s);
    let mut y = vec![0.0; n];
    let mut residual = f64::INFINITY;
    for it in 1..=opts.max_iterations {
        m.apply(&x, &mut y);
        let lambda = dot(&x, &y);
        residual = x.iter().zip(&y).map(|(a, b)| (b - lambda * a).powi(2)).sum::<f64>().sqrt();
        if residual <= tol {
            if x.iter().sum::<f64>() < 0.0 {
                x.iter_mut().for_each(|v| *v = -*v);
            }
            let mut pair = Eigenpair { lambda1: lambda, vector: x, iterations: it, residual, degenerate_gap: None };
            if opts.check_gap {
                let l2 = second_magnitude(m, &pair.vector, pair.lambda1, opts);
                pair.degenerate_gap = Some(pair.lambda1.abs() - l2 < 1e-8 * pair.lambda1.abs());
                if pair.degenerate_gap == Some(true) {
                    log::warn!("eigengap below tolerance: |λ1| = {}, |λ2| ≈ {l2}", pair.lambda1.abs());
                }
            }
            return Ok(pair);
        }
        let sigma = 0.5 * lambda.max(0.0);
        y.iter_mut().zip(&x).for_each(|(b, a)| *b += sigma * a);
        let s = norm(&y);
        if s == 0.0 {
            break;
        }
        x.iter_mut().zip(&y).for_each(|(a, b)| *a = b / s);
    }
    Err(Error::NoConvergence { iterations: opts.max_iterations, residual })
}

/// Estimates `|λ₂|` by power iteration on `M − λ₁ v vᵀ`.
fn second_magnitude<M: SymmetricOperator + ?Sized>(m: &M, v: &[f64], l1: f64, opts: &PowerIteration) -> f64 {
    let n = m.dim();
    let mut rng = stream_rng(opts.seed ^ 0x2, stream::POWER_START);
    let mut x: Vec<f64> = (0..n).map(|_| rng.random::<f64>() - 0.5).collect();
    let mut y = vec![0.0; n];
    let mut est = 0.0;
    for _ in 0..opts.max_iterations.min(5_000) {
        let c = dot(&x, v);
        x.iter_mut().zip(v).for_each(|(a, b)| *a -= c * b);
        let s = norm(&x);
        if s == 0.0 {
            return 0.0;
        }
        x.iter_mut().for_each(|a| *a /= s);
        m.apply(&x, &mut y);
        let c = dot(&x, v);
        y.iter_mut().zip(v).for_each(|(a, b)| *a -= l1 * c * b);
        let new = norm(&y);
        if (new - est).abs() <= 1e-12 * new.max(1.0) {
            return new;
        }
        est = new;
        std::mem::swap(&mut x, &mut y);
    }
    est
}

/// `a_n v₁(M)`.
pub fn eigenvector_centrality<M: SymmetricOperator + ?Sized>(m: &M, scaling: Scaling) -> Result<CentralityVector> {
    eigenvector_centrality_with(m, scaling, &PowerIteration::default())
}

pub fn eigenvector_centrality_with<M: SymmetricOperator + ?Sized>(
    m: &M,
    scaling: Scaling,
    opts: &PowerIteration,
) -> Result<CentralityVector> {
    let pair = leading_eigenpair_with(m, opts)?;
    from_pair(m.dim(), pair, scaling, None)
}

fn from_pair(n: usize, pair: Eigenpair, scaling: Scaling, tau: Option<f64>) -> Result<CentralityVector> {
    if pair.lambda1 <= 0.0 {
        return Err(Error::DegenerateSpectrum(pair.lambda1));
    }
    let a_n = scaling.resolve(n, pair.lambda1)?;
    let values = pair.vector.iter().map(|v| a_n * v).collect();
    let recipe = match tau {
        None => Recipe::Eigenvector { scaling, a_n },
        Some(tau) => Recipe::RegularizedEigenvector { scaling, a_n, tau },
    };
    Ok(CentralityVector { values, recipe, lambda1: Some(pair.lambda1) })
}

#[derive(Debug, Clone, PartialEq)]
pub struct Regularized {
    pub matrix: WeightedGraph,
    /// Node weights `λ_i = min{τ / deg_i, 1}`.
    pub weights: Vec<f64>,
    pub tau: f64,
}

/// Reweights edges by `√(λ_i λ_j)` so that `λ_i deg_i ≤ τ` for every node.
pub fn regularize(g: &SparseGraph, spec: Regularization) -> Result<Regularized> {
    let n = g.dim() as f64;
    let tau = match spec {
        Regularization::Oracle { p_n } => {
            if !(p_n > 0.0 && p_n <= 1.0) {
                return Err(Error::InvalidSparsity(p_n));
            }
            2.0 * n * p_n
        }
        Regularization::PlugIn { m } => {
            if !(m > 0.0 && m <= 1.0) {
                return Err(Error::InvalidBound(m));
            }
            let rho = 2.0 * g.num_edges() as f64 / (n * (n - 1.0));
            3.0 * n * rho / m
        }
    };
    let weights: Vec<f64> = g
        .degrees()
        .into_iter()
        .map(|d| if d == 0 { 1.0 } else { (tau / d as f64).min(1.0) })
        .collect();
    let w = g.edges().map(|(i, j)| (weights[i] * weights[j]).sqrt()).collect();
    Ok(Regularized { matrix: WeightedGraph::new(g.clone(), w)?, weights, tau })
}

/// `a_n v₁(Â_λ)` for the regularized matrix.
pub fn regularized_eigenvector_centrality(
    g: &SparseGraph,
    spec: Regularization,
    scaling: Scaling,
) -> Result<CentralityVector> {
    regularized_eigenvector_centrality_with(g, spec, scaling, &PowerIteration::default())
}

pub fn regularized_eigenvector_centrality_with(
    g: &SparseGraph,
    spec: Regularization,
    scaling: Scaling,
    opts: &PowerIteration,
) -> Result<CentralityVector> {
    let reg = regularize(g, spec)?;
    let pair = leading_eigenpair_with(&reg.matrix, opts)?;
    from_pair(g.dim(), pair, scaling, Some(reg.tau))
}
