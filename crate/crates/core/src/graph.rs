//! Graphons, sparsity rules, latent types and the two-stage network draw.

use std::fmt;
use std::sync::Arc;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{DenseSymmetric, SparseGraph};
use crate::rng::{stream, stream_rng};

/// A real function on `[0, 1]`, used as a graphon eigenfunction.
pub type Eigenfunction = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

/// JSON form of the serializable graphon kinds.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
pub enum GraphonSpec {
    Constant { c: f64 },
    Sbm { pi: Vec<f64>, #[serde(rename = "P")] p: Vec<Vec<f64>> },
}

#[derive(Clone)]
enum Kind {
    Constant(f64),
    Sbm { pi: Vec<f64>, cum: Vec<f64>, p: Vec<Vec<f64>> },
    Rank { eigenvalues: Vec<f64>, functions: Vec<Eigenfunction> },
}

/// Symmetric link-intensity function on `[0, 1]²` with values in `[0, 1]`.
#[derive(Clone)]
pub struct Graphon {
    kind: Kind,
}

impl fmt::Debug for Graphon {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            Kind::Constant(c) => write!(f, "Graphon::Constant({c})"),
            Kind::Sbm { pi, p, .. } => write!(f, "Graphon::Sbm {{ pi: {pi:?}, P: {p:?} }}"),
            Kind::Rank { eigenvalues, .. } => write!(f, "Graphon::Rank({eigenvalues:?})"),
        }
    }
}

const PROBE_POINTS: usize = 4096;
const ORTHONORMALITY_TOLERANCE: f64 = 1e-2;

impl Graphon {
    pub fn constant(c: f64) -> Result<Self> {
        if !(c > 0.0 && c <= 1.0) {
            return Err(Error::InvalidGraphon(format!("constant {c} must lie in (0, 1]")));
        }
        Ok(Self { kind: Kind::Constant(c) })
    }

    pub fn sbm(pi: Vec<f64>, p: Vec<Vec<f64>>) -> Result<Self> {
        let b = pi.len();
        if b == 0 {
            return Err(Error::InvalidGraphon("no blocks".into()));
        }
        if pi.iter().any(|&w| w.is_nan() || w <= 0.0) {
            return Err(Error::InvalidGraphon("block proportions must be positive".into()));
        }
        if (pi.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidGraphon("block proportions must sum to 1".into()));
        }
        if p.len() != b || p.iter().any(|row| row.len() != b) {
            return Err(Error::InvalidGraphon(format!("P must be {b}x{b}")));
        }
        for (g, row) in p.iter().enumerate() {
            for (h, &w) in row.iter().enumerate() {
                if !(0.0..=1.0).contains(&w) {
                    return Err(Error::InvalidGraphon(format!("P[{g}][{h}] outside [0, 1]")));
                }
                if w != p[h][g] {
                    return Err(Error::InvalidGraphon("P must be symmetric".into()));
                }
            }
        }
        let mass: f64 = (0..b).flat_map(|g| (0..b).map(move |h| (g, h))).map(|(g, h)| pi[g] * pi[h] * p[g][h]).sum();
        if mass <= 0.0 {
            return Err(Error::InvalidGraphon("graphon integrates to zero".into()));
        }
        let mut cum: Vec<f64> = pi
            .iter()
            .scan(0.0, |acc, w| {
                *acc += w;
                Some(*acc)
            })
            .collect();
        cum[b - 1] = f64::INFINITY;
        Ok(Self { kind: Kind::Sbm { pi, cum, p } })
    }

    /// Finite-rank graphon `f(u, v) = Σ λ_r φ_r(u) φ_r(v)`.
    ///
    /// Values are probed on a deterministic sample and must stay in `[0, 1]` with
    /// positive mean. Orthonormality of the `φ_r` is only spot-checked by Monte
    /// Carlo quadrature; a defect above 1e-2 is logged as a warning.
    pub fn rank(eigenvalues: Vec<f64>, functions: Vec<Eigenfunction>) -> Result<Self> {
        if eigenvalues.is_empty() || eigenvalues.len() != functions.len() {
            return Err(Error::InvalidGraphon("need one eigenfunction per eigenvalue".into()));
        }
        let g = Self { kind: Kind::Rank { eigenvalues, functions } };
        let mut rng = stream_rng(0x0067_7261_7068_6f6e, 0);
        let mut total = 0.0;
        for _ in 0..PROBE_POINTS {
            let (u, v): (f64, f64) = (rng.random(), rng.random());
            let w = g.eval(u, v);
            if !(-1e-12..=1.0 + 1e-12).contains(&w) {
                return Err(Error::InvalidGraphon(format!("f({u}, {v}) = {w} outside [0, 1]")));
            }
            total += w;
        }
        if total <= 0.0 {
            return Err(Error::InvalidGraphon("graphon integrates to zero".into()));
        }
        let defect = g.orthonormality_defect(PROBE_POINTS);
        if defect > ORTHONORMALITY_TOLERANCE {
            log::warn!("eigenfunctions deviate from orthonormality by {defect:.3e}");
        }
        Ok(g)
    }

    pub fn from_spec(spec: &GraphonSpec) -> Result<Self> {
        match spec {
            GraphonSpec::Constant { c } => Self::constant(*c),
            GraphonSpec::Sbm { pi, p } => Self::sbm(pi.clone(), p.clone()),
        }
    }

    /// JSON descriptor, unavailable for finite-rank graphons built from closures.
    pub fn spec(&self) -> Option<GraphonSpec> {
        match &self.kind {
            Kind::Constant(c) => Some(GraphonSpec::Constant { c: *c }),
            Kind::Sbm { pi, p, .. } => Some(GraphonSpec::Sbm { pi: pi.clone(), p: p.clone() }),
            Kind::Rank { .. } => None,
        }
    }

    /// Largest deviation of the empirical Gram matrix of the eigenfunctions from
    /// the identity, estimated on `points` quadrature nodes. Zero for the
    /// constant and block kinds.
    pub fn orthonormality_defect(&self, points: usize) -> f64 {
        let Kind::Rank { functions, .. } = &self.kind else { return 0.0 };
        let r = functions.len();
        let mut gram = vec![0.0; r * r];
        let mut rng = stream_rng(0x6f72_7468, 0);
        for _ in 0..points {
            let u: f64 = rng.random();
            let vals: Vec<f64> = functions.iter().map(|f| f(u)).collect();
            for a in 0..r {
                for b in 0..r {
                    gram[a * r + b] += vals[a] * vals[b];
                }
            }
        }
        let mut worst: f64 = 0.0;
        for a in 0..r {
            for b in 0..r {
                let target = if a == b { 1.0 } else { 0.0 };
                worst = worst.max((gram[a * r + b] / points as f64 - target).abs());
            }
        }
        worst
    }

    #[inline]
    pub fn eval(&self, u: f64, v: f64) -> f64 {
        match &self.kind {
            Kind::Constant(c) => *c,
            Kind::Sbm { cum, p, .. } => p[block_of(cum, u)][block_of(cum, v)],
            Kind::Rank { eigenvalues, functions } => eigenvalues
                .iter()
                .zip(functions)
                .map(|(l, f)| l * f(u) * f(v))
                .sum(),
        }
    }
}

fn block_of(cum: &[f64], u: f64) -> usize {
    cum.iter().position(|&c| u < c).unwrap_or(cum.len() - 1)
}

/// Sparsity scale `p_n` as a function of the node count.
#[derive(Clone, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "kebab-case", deny_unknown_fields)]
pub enum SparsityRule {
    Constant { p: f64 },
    InverseN,
    InverseSqrtN,
    InverseCbrtN,
    /// `p_n = n⁻¹ √(log n / log log n)`.
    DelocalizationThreshold,
    #[serde(skip)]
    Custom(Arc<dyn Fn(usize) -> f64 + Send + Sync>),
}

impl fmt::Debug for SparsityRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::Constant { p } => write!(f, "Constant({p})"),
            Self::InverseN => f.write_str("InverseN"),
            Self::InverseSqrtN => f.write_str("InverseSqrtN"),
            Self::InverseCbrtN => f.write_str("InverseCbrtN"),
            Self::DelocalizationThreshold => f.write_str("DelocalizationThreshold"),
            Self::Custom(_) => f.write_str("Custom(..)"),
        }
    }
}

impl SparsityRule {
    pub fn resolve(&self, n: usize) -> Result<f64> {
        let nf = n as f64;
        let p = match self {
            Self::Constant { p } => *p,
            Self::InverseN => 1.0 / nf,
            Self::InverseSqrtN => nf.powf(-0.5),
            Self::InverseCbrtN => nf.powf(-1.0 / 3.0),
            Self::DelocalizationThreshold => (nf.ln() / nf.ln().ln()).sqrt() / nf,
            Self::Custom(f) => f(n),
        };
        check_sparsity(p)?;
        Ok(p)
    }
}

fn check_sparsity(p: f64) -> Result<()> {
    if p > 0.0 && p <= 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidSparsity(p))
    }
}

/// Latent types `U_i ~ U[0, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct LatentSample {
    pub u: Vec<f64>,
    pub seed: u64,
}

pub fn sample_latent(n: usize, seed: u64) -> Result<LatentSample> {
    if n < 2 {
        return Err(Error::InvalidSize(n));
    }
    let mut rng = stream_rng(seed, stream::LATENT);
    let u = (0..n).map(|_| rng.random::<f64>()).collect();
    Ok(LatentSample { u, seed })
}

/// `A_ij = p_n f(U_i, U_j)` off the diagonal, zero on it.
pub fn build_true_adjacency(g: &Graphon, u: &LatentSample, p_n: f64) -> Result<DenseSymmetric> {
    check_sparsity(p_n)?;
    let u = &u.u;
    DenseSymmetric::from_upper(u.len(), |i, j| (p_n * g.eval(u[i], u[j])).clamp(0.0, 1.0))
}

/// Draws `Â_ij ~ Bernoulli(A_ij)` independently over the upper triangle.
pub fn observe(a: &DenseSymmetric, seed: u64) -> SparseGraph {
    use crate::matrix::SymmetricOperator;
    let n = a.dim();
    let mut rng = stream_rng(seed, stream::OBSERVE);
    let mut offsets = Vec::with_capacity(n + 1);
    let mut targets = Vec::new();
    offsets.push(0);
    for i in 0..n {
        let row = a.row(i);
        for (j, &w) in row.iter().enumerate().skip(i + 1) {
            if rng.random::<f64>() < w {
                targets.push(j);
            }
        }
        offsets.push(targets.len());
    }
    SparseGraph::from_sorted_rows(n, offsets, targets)
}
