//! OLS on a centrality regressor with measurement-error bias and variance
//! estimators, tests and confidence sets.

use serde::{Deserialize, Serialize};

use crate::centrality::{walk_totals, CentralityVector, Recipe};
use crate::error::{Error, Result};
use crate::matrix::SparseGraph;
use crate::stats::{normal_cdf, normal_quantile, normal_sf};
use crate::walks::BiasPolynomial;

/// Attenuation below this is treated as nonpositive.
pub const ATTENUATION_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    /// Regressor computed on the true network; robust inference only.
    NoError,
    NoisyDegree,
    NoisyDiffusion,
    /// Eigenvector with a small scale: robust variance, bias shift kept.
    NoisyEigenvectorCaseA,
    /// Eigenvector with a large scale: network-noise variance.
    NoisyEigenvectorCaseB,
    /// Eigenvector scaled by `√λ₁`: robust t centred at the null.
    NoisyEigenvectorCorollary5,
    /// Regularized eigenvector: robust inference only.
    NoisyRegularizedEigenvector,
}

#[derive(Debug, Clone, PartialEq)]
pub struct RegressionFit {
    pub beta_hat: f64,
    /// `Σ Cᵢ²`.
    pub ssq_c: f64,
    pub residuals: Vec<f64>,
    pub v0_hat: f64,
    pub b_hat: Option<f64>,
    pub v_hat: Option<f64>,
    pub beta_check: Option<f64>,
    pub n: usize,
    pub mode: Mode,
}

/// JSON view of a fit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FitSummary {
    pub beta_hat: f64,
    #[serde(rename = "B_hat")]
    pub b_hat: Option<f64>,
    pub attenuation: Option<f64>,
    pub beta_check: Option<f64>,
    #[serde(rename = "V_hat")]
    pub v_hat: Option<f64>,
    #[serde(rename = "V0_hat")]
    pub v0_hat: f64,
    pub n: usize,
    pub mode: Mode,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BiasVariance {
    pub b_hat: f64,
    pub v_hat: f64,
}

impl RegressionFit {
    /// Attaches `B̂` and `V̂` and fills `β̌` when the attenuation is positive.
    pub fn with_components(mut self, bv: BiasVariance) -> Self {
        self.b_hat = Some(bv.b_hat);
        self.v_hat = Some(bv.v_hat);
        self.beta_check = bias_correct(&self).ok();
        self
    }

    /// `1 − B̂`.
    pub fn attenuation(&self) -> Option<f64> {
        self.b_hat.map(|b| 1.0 - b)
    }

    pub fn summary(&self) -> FitSummary {
        FitSummary {
            beta_hat: self.beta_hat,
            b_hat: self.b_hat,
            attenuation: self.attenuation(),
            beta_check: self.beta_check,
            v_hat: self.v_hat,
            v0_hat: self.v0_hat,
            n: self.n,
            mode: self.mode,
        }
    }
}

/// `β̂ = y′C / C′C`, residuals and the robust variance `V̂₀`.
pub fn ols(y: &[f64], c: &[f64], mode: Mode) -> Result<RegressionFit> {
    if y.len() != c.len() {
        return Err(Error::LengthMismatch { expected: c.len(), got: y.len() });
    }
    let ssq_c: f64 = c.iter().map(|x| x * x).sum();
    if ssq_c == 0.0 {
        return Err(Error::ZeroRegressor);
    }
    let beta_hat = y.iter().zip(c).map(|(a, b)| a * b).sum::<f64>() / ssq_c;
    let residuals: Vec<f64> = y.iter().zip(c).map(|(yi, ci)| yi - beta_hat * ci).collect();
    let meat: f64 = c.iter().zip(&residuals).map(|(ci, ei)| ci * ci * ei * ei).sum();
    Ok(RegressionFit {
        beta_hat,
        ssq_c,
        residuals,
        v0_hat: meat / (ssq_c * ssq_c),
        b_hat: None,
        v_hat: None,
        beta_check: None,
        n: c.len(),
        mode,
    })
}

fn check_dims(a_hat: &SparseGraph, c_hat: &CentralityVector, fit: &RegressionFit) -> Result<()> {
    use crate::matrix::SymmetricOperator;
    if c_hat.values.len() != a_hat.dim() || fit.n != a_hat.dim() {
        return Err(Error::LengthMismatch { expected: a_hat.dim(), got: c_hat.values.len() });
    }
    Ok(())
}

/// `B̂ = ι′Âι / ΣĈ²` and `V̂ = ½ (ΣĈ²)⁻² Σ_{i≠j} Â_ij (Ĉᵢ + Ĉⱼ)²`.
pub fn degree_bias_variance(a_hat: &SparseGraph, c_hat: &CentralityVector, fit: &RegressionFit) -> Result<BiasVariance> {
    check_dims(a_hat, c_hat, fit)?;
    if c_hat.recipe != Recipe::Degree {
        return Err(Error::ConfigMismatch("degree components need a degree regressor".into()));
    }
    let c = &c_hat.values;
    let ssq = fit.ssq_c;
    let b_hat = 2.0 * a_hat.num_edges() as f64 / ssq;
    let edge_sum: f64 = a_hat.edges().map(|(i, j)| (c[i] + c[j]).powi(2)).sum();
    Ok(BiasVariance { b_hat, v_hat: edge_sum / (ssq * ssq) })
}

/// Diffusion components with coefficients `b_T`.
///
/// `B̂ = (ΣĈ²)⁻¹ Σ_t b_T(t, δ) ι′Âᵗι`. The variance uses
/// `u_t = Â^(2T−t) ι`, `w_t = Â^(t−1) ι` and sums `(Σ_t u_t[i] w_t[j])²` over
/// both orientations of every edge.
pub fn diffusion_bias_variance(
    a_hat: &SparseGraph,
    c_hat: &CentralityVector,
    fit: &RegressionFit,
    coeffs: &BiasPolynomial,
) -> Result<BiasVariance> {
    use crate::matrix::SymmetricOperator;
    check_dims(a_hat, c_hat, fit)?;
    let Recipe::Diffusion { delta, horizon } = c_hat.recipe else {
        return Err(Error::ConfigMismatch("diffusion components need a diffusion regressor".into()));
    };
    if coeffs.horizon != horizon {
        return Err(Error::ConfigMismatch(format!(
            "coefficients for T = {} applied to T = {horizon}",
            coeffs.horizon
        )));
    }
    let ssq = fit.ssq_c;
    let totals = walk_totals(a_hat, 2 * horizon - 1);
    let b_hat = coeffs.evaluate(delta, &totals) / ssq;

    let n = a_hat.dim();
    let mut powers = vec![vec![1.0; n]];
    for k in 1..2 * horizon {
        let mut next = vec![0.0; n];
        a_hat.apply(&powers[k - 1], &mut next);
        powers.push(next);
    }
    let two_t = 2 * horizon;
    let pair = |i: usize, j: usize| -> f64 {
        (1..=two_t).map(|t| powers[two_t - t][i] * powers[t - 1][j]).sum()
    };
    let edge_sum: f64 = a_hat.edges().map(|(i, j)| pair(i, j).powi(2) + pair(j, i).powi(2)).sum();
    let v_hat = 0.5 * delta.powi(two_t as i32) * edge_sum / (ssq * ssq);
    Ok(BiasVariance { b_hat, v_hat })
}

/// `B̂ = 1/λ₁` and `V̂ = 2 (λ₁ ΣĈ²)⁻² Σ_{i≠j} Â_ij (Ĉᵢ² + Ĉⱼ²)`.
pub fn eigen_bias_variance(
    lambda1: f64,
    c_hat: &CentralityVector,
    a_hat: &SparseGraph,
    fit: &RegressionFit,
) -> Result<BiasVariance> {
    check_dims(a_hat, c_hat, fit)?;
    if lambda1 <= 0.0 {
        return Err(Error::DegenerateSpectrum(lambda1));
    }
    let c = &c_hat.values;
    let edge_sum: f64 = a_hat.edges().map(|(i, j)| 2.0 * (c[i] * c[i] + c[j] * c[j])).sum();
    let scale = lambda1 * fit.ssq_c;
    Ok(BiasVariance { b_hat: 1.0 / lambda1, v_hat: 2.0 * edge_sum / (scale * scale) })
}

/// `β̌ = β̂ / (1 − B̂)`.
pub fn bias_correct(fit: &RegressionFit) -> Result<f64> {
    let b = fit.b_hat.ok_or(Error::MissingComponents("bias correction needs B_hat"))?;
    let attenuation = 1.0 - b;
    if attenuation <= ATTENUATION_FLOOR {
        return Err(Error::NonpositiveAttenuation(attenuation));
    }
    Ok(fit.beta_hat / attenuation)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Sided {
    Two,
    /// Rejects for small statistics.
    Left,
    /// Rejects for large statistics.
    Right,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Branch {
    NullZero,
    NullNonzero,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestResult {
    pub statistic: f64,
    pub p_value: f64,
    pub null_value: f64,
    pub sided: Sided,
    /// `(α, rejected)`; rejection when `p ≤ α`.
    pub reject_at: Vec<(f64, bool)>,
    pub branch: Branch,
}

fn p_value(stat: f64, sided: Sided) -> f64 {
    match sided {
        Sided::Two => (2.0 * normal_sf(stat.abs())).min(1.0),
        Sided::Right => normal_sf(stat),
        Sided::Left => normal_cdf(stat),
    }
}

fn finish(statistic: f64, beta0: f64, sided: Sided, alphas: &[f64]) -> TestResult {
    let p_value = p_value(statistic, sided);
    TestResult {
        statistic,
        p_value,
        null_value: beta0,
        sided,
        reject_at: alphas.iter().map(|&a| (a, p_value <= a)).collect(),
        branch: if beta0 == 0.0 { Branch::NullZero } else { Branch::NullNonzero },
    }
}

/// Conventional heteroskedasticity-robust t: `(β̂ − β₀)/√V̂₀`.
pub fn robust_test(fit: &RegressionFit, beta0: f64, sided: Sided, alphas: &[f64]) -> TestResult {
    finish((fit.beta_hat - beta0) / fit.v0_hat.sqrt(), beta0, sided, alphas)
}

/// The test matched to the fit's mode.
///
/// For `β₀ = 0` every mode uses `β̂/√V̂₀`. For `β₀ ≠ 0` the degree, diffusion
/// and eigenvector case-b modes use `(β̂ − β₀(1−B̂))/(β₀√V̂)`, eigenvector
/// case a uses `(β̂ − β₀(1−B̂))/√V̂₀`, and the remaining modes use the
/// robust t. Dividing by `β₀` means a negative null flips the statistic's
/// sign; two-sided p-values are unaffected.
pub fn test(fit: &RegressionFit, beta0: f64, sided: Sided, alphas: &[f64]) -> Result<TestResult> {
    let statistic = if beta0 == 0.0 {
        fit.beta_hat / fit.v0_hat.sqrt()
    } else {
        match fit.mode {
            Mode::NoError | Mode::NoisyEigenvectorCorollary5 | Mode::NoisyRegularizedEigenvector => {
                (fit.beta_hat - beta0) / fit.v0_hat.sqrt()
            }
            Mode::NoisyEigenvectorCaseA => {
                let b = fit.b_hat.ok_or(Error::MissingComponents("test needs B_hat"))?;
                (fit.beta_hat - beta0 * (1.0 - b)) / fit.v0_hat.sqrt()
            }
            Mode::NoisyDegree | Mode::NoisyDiffusion | Mode::NoisyEigenvectorCaseB => {
                let (Some(b), Some(v)) = (fit.b_hat, fit.v_hat) else {
                    return Err(Error::MissingComponents("test needs B_hat and V_hat"));
                };
                (fit.beta_hat - beta0 * (1.0 - b)) / (beta0 * v.sqrt())
            }
        }
    };
    Ok(finish(statistic, beta0, sided, alphas))
}

/// Closed interval with possibly infinite endpoints.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Interval {
    pub lower: f64,
    pub upper: f64,
}

impl Interval {
    pub fn new(lower: f64, upper: f64) -> Self {
        Self { lower, upper }
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lower <= x && x <= self.upper
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum NullIntervalPolicy {
    /// `β̂ ± z √V̂₀`.
    Interval,
    /// `{0}`.
    SingletonZero,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct IntervalUnion {
    pub c0: Interval,
    /// One piece, or two half-lines when `wraps` is set.
    pub c: Vec<Interval>,
    pub wraps: bool,
    /// `c0 ∪ c` as sorted disjoint intervals.
    pub c_star: Vec<Interval>,
    pub alpha: f64,
}

impl IntervalUnion {
    pub fn contains(&self, x: f64) -> bool {
        self.c_star.iter().any(|i| i.contains(x))
    }
}

/// Inverts the bias-aware statistic into `{β : |β̂ − β(1−B̂)| ≤ z|β|√V̂}`.
///
/// The boundary points are `β̂/(1−B̂+z√V̂)` and `β̂/(1−B̂−z√V̂)`. When the
/// second denominator is zero the set is a half-line; when the denominators
/// have opposite signs it is the union of two half-lines.
fn invert_bias_aware(beta_hat: f64, b_hat: f64, v_hat: f64, z: f64) -> (Vec<Interval>, bool) {
    let a = 1.0 - b_hat;
    let zs = z * v_hat.sqrt();
    let (d_lo, d_hi) = (a + zs, a - zs);
    let lead = d_lo * d_hi;
    if beta_hat == 0.0 {
        return if lead > 0.0 {
            (vec![Interval::new(0.0, 0.0)], false)
        } else {
            (vec![Interval::new(f64::NEG_INFINITY, f64::INFINITY)], false)
        };
    }
    if lead == 0.0 {
        let d = if d_lo != 0.0 { d_lo } else { d_hi };
        if d == 0.0 {
            return (vec![Interval::new(f64::NEG_INFINITY, f64::INFINITY)], false);
        }
        let e = beta_hat / d;
        return if a * beta_hat > 0.0 {
            (vec![Interval::new(e, f64::INFINITY)], false)
        } else {
            (vec![Interval::new(f64::NEG_INFINITY, e)], false)
        };
    }
    let (e1, e2) = (beta_hat / d_lo, beta_hat / d_hi);
    let (lo, hi) = (e1.min(e2), e1.max(e2));
    if lead > 0.0 {
        (vec![Interval::new(lo, hi)], false)
    } else {
        (vec![Interval::new(f64::NEG_INFINITY, lo), Interval::new(hi, f64::INFINITY)], true)
    }
}

fn merge(mut pieces: Vec<Interval>) -> Vec<Interval> {
    pieces.sort_by(|a, b| a.lower.total_cmp(&b.lower));
    let mut out: Vec<Interval> = Vec::new();
    for p in pieces {
        match out.last_mut() {
            Some(last) if p.lower <= last.upper => last.upper = last.upper.max(p.upper),
            _ => out.push(p),
        }
    }
    out
}

/// `𝒞₀`, `𝒞` and their union `𝒞★` at level `1 − α`.
///
/// One-sided requests use `z_{1−α}` and keep only the matching side:
/// `Right` reports lower bounds (`[ℓ, ∞)`), `Left` upper bounds.
pub fn confidence(fit: &RegressionFit, alpha: f64, sided: Sided, policy: NullIntervalPolicy) -> Result<IntervalUnion> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidLevel(alpha));
    }
    let (Some(b_hat), Some(v_hat)) = (fit.b_hat, fit.v_hat) else {
        return Err(Error::MissingComponents("confidence set needs B_hat and V_hat"));
    };
    let z = match sided {
        Sided::Two => normal_quantile(1.0 - alpha / 2.0),
        Sided::Left | Sided::Right => normal_quantile(1.0 - alpha),
    };
    let half = z * fit.v0_hat.sqrt();
    let c0 = match (policy, sided) {
        (NullIntervalPolicy::SingletonZero, _) => Interval::new(0.0, 0.0),
        (_, Sided::Two) => Interval::new(fit.beta_hat - half, fit.beta_hat + half),
        (_, Sided::Right) => Interval::new(fit.beta_hat - half, f64::INFINITY),
        (_, Sided::Left) => Interval::new(f64::NEG_INFINITY, fit.beta_hat + half),
    };
    let (mut c, mut wraps) = invert_bias_aware(fit.beta_hat, b_hat, v_hat, z);
    match sided {
        Sided::Two => {}
        Sided::Right => {
            let lower = if wraps { f64::NEG_INFINITY } else { c[0].lower };
            c = vec![Interval::new(lower, f64::INFINITY)];
            wraps = false;
        }
        Sided::Left => {
            let upper = if wraps { f64::INFINITY } else { c[c.len() - 1].upper };
            c = vec![Interval::new(f64::NEG_INFINITY, upper)];
            wraps = false;
        }
    }
    let mut pieces = c.clone();
    pieces.push(c0);
    Ok(IntervalUnion { c0, c_star: merge(pieces), c, wraps, alpha })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::centrality::{degree, diffusion, eigenvector_centrality, DiffusionParams, Scaling};
    use crate::walks::reference_b;

    fn k3() -> SparseGraph {
        SparseGraph::from_edges(3, &[(0, 1), (0, 2), (1, 2)]).unwrap()
    }

    #[test]
    fn ols_examples() {
        let c = [2.0, 2.0, 2.0];
        let f = ols(&[1.0, 2.0, 3.0], &c, Mode::NoisyDegree).unwrap();
        assert_eq!(f.beta_hat, 1.0);
        let f = ols(&[4.0, 4.0, 4.0], &c, Mode::NoError).unwrap();
        assert_eq!((f.beta_hat, f.v0_hat), (2.0, 0.0));
        assert!(f.residuals.iter().all(|&e| e == 0.0));
        let f = ols(&[1.0, -1.0], &[1.0, 1.0], Mode::NoError).unwrap();
        assert_eq!(f.beta_hat, 0.0);
        assert_eq!(ols(&[1.0], &[0.0], Mode::NoError), Err(Error::ZeroRegressor));
        assert!(ols(&[1.0], &[1.0, 2.0], Mode::NoError).is_err());
    }

    #[test]
    fn degree_components_on_triangle() {
        let g = k3();
        let c = degree(&g);
        let fit = ols(&[1.0, 2.0, 3.0], &c.values, Mode::NoisyDegree).unwrap();
        let bv = degree_bias_variance(&g, &c, &fit).unwrap();
        assert!((bv.b_hat - 0.5).abs() < 1e-15);
        assert!((bv.v_hat - 1.0 / 3.0).abs() < 1e-15);
        let fit = fit.with_components(bv);
        assert_eq!(fit.beta_check, Some(2.0));
    }

    #[test]
    fn diffusion_components_on_triangle() {
        let g = k3();
        let c = diffusion(&g, &DiffusionParams::fixed(0.5, 1)).unwrap();
        let fit = ols(&[1.0, 2.0, 3.0], &c.values, Mode::NoisyDiffusion).unwrap();
        let bv = diffusion_bias_variance(&g, &c, &fit, &reference_b(1).unwrap()).unwrap();
        assert!((bv.b_hat - 0.5).abs() < 1e-15);

        let d = 0.5f64;
        let c = diffusion(&g, &DiffusionParams::fixed(d, 2)).unwrap();
        let fit = ols(&[1.0, 2.0, 3.0], &c.values, Mode::NoisyDiffusion).unwrap();
        let bv = diffusion_bias_variance(&g, &c, &fit, &reference_b(2).unwrap()).unwrap();
        let num = (d.powi(2) - 3.0 * d.powi(3) + 3.0 * d.powi(4)) * 6.0
            + (3.0 * d.powi(3) - 2.0 * d.powi(4)) * 12.0
            + 2.0 * d.powi(4) * 24.0;
        assert!((bv.b_hat - num / 12.0).abs() < 1e-14);
        assert!(matches!(
            diffusion_bias_variance(&g, &c, &fit, &reference_b(3).unwrap()),
            Err(Error::ConfigMismatch(_))
        ));
    }

    #[test]
    fn eigen_components_on_triangle() {
        let g = k3();
        let c = eigenvector_centrality(&g, Scaling::SqrtLambda1).unwrap();
        let fit = ols(&[1.0, 2.0, 3.0], &c.values, Mode::NoisyEigenvectorCaseB).unwrap();
        let bv = eigen_bias_variance(c.lambda1.unwrap(), &c, &g, &fit).unwrap();
        assert!((bv.b_hat - 0.5).abs() < 1e-12);
        assert!((bv.v_hat - 1.0).abs() < 1e-9);
        assert!(eigen_bias_variance(0.0, &c, &g, &fit).is_err());
    }

    fn fake_fit(beta_hat: f64, b: f64, v: f64, v0: f64, mode: Mode) -> RegressionFit {
        RegressionFit {
            beta_hat,
            ssq_c: 1.0,
            residuals: vec![],
            v0_hat: v0,
            b_hat: Some(b),
            v_hat: Some(v),
            beta_check: None,
            n: 1,
            mode,
        }
    }

    #[test]
    fn test_examples() {
        let f = fake_fit(0.0, 0.0, 1.0, 1.0, Mode::NoisyDegree);
        let r = test(&f, 0.0, Sided::Two, &[0.05]).unwrap();
        assert_eq!((r.statistic, r.p_value, r.branch), (0.0, 1.0, Branch::NullZero));
        let f = fake_fit(1.0, 0.5, 0.25, 1.0, Mode::NoisyDegree);
        let r = test(&f, 2.0, Sided::Two, &[0.05]).unwrap();
        assert_eq!((r.statistic, r.p_value, r.branch), (0.0, 1.0, Branch::NullNonzero));
        let f = fake_fit(1.96, 0.0, 1.0, 1.0, Mode::NoError);
        let r = test(&f, 0.0, Sided::Two, &[0.05]).unwrap();
        assert!((r.p_value - 0.05).abs() < 1e-4);
        assert_eq!(r.reject_at, vec![(0.05, true)]);
        let mut f = fake_fit(1.0, 0.5, 0.25, 1.0, Mode::NoisyDiffusion);
        f.v_hat = None;
        assert!(matches!(test(&f, 1.0, Sided::Two, &[]), Err(Error::MissingComponents(_))));
        assert!(test(&f, 0.0, Sided::Two, &[]).is_ok());
    }

    #[test]
    fn bias_correct_guard() {
        assert_eq!(bias_correct(&fake_fit(0.5, 0.5, 1.0, 1.0, Mode::NoisyDegree)), Ok(1.0));
        assert_eq!(bias_correct(&fake_fit(0.5, 0.0, 1.0, 1.0, Mode::NoisyDegree)), Ok(0.5));
        assert_eq!(
            bias_correct(&fake_fit(0.5, 1.0, 1.0, 1.0, Mode::NoisyDegree)),
            Err(Error::NonpositiveAttenuation(0.0))
        );
    }

    #[test]
    fn intervals() {
        let f = fake_fit(1.0, 0.0, 0.04, 0.04, Mode::NoisyDegree);
        let ci = confidence(&f, 0.05, Sided::Two, NullIntervalPolicy::Interval).unwrap();
        assert_eq!(ci.c_star.len(), 1);
        assert!(ci.c_star[0].lower < ci.c0.lower + 1e-12);

        let z = normal_quantile(0.975);
        let b = 1.0 - z * 0.1;
        let f = fake_fit(1.0, b, 0.01, 0.01, Mode::NoisyDegree);
        let ci = confidence(&f, 0.05, Sided::Two, NullIntervalPolicy::Interval).unwrap();
        assert_eq!(ci.c[0].upper, f64::INFINITY);

        let f = fake_fit(1.0, 0.5, 1.0, 0.01, Mode::NoisyDegree);
        let ci = confidence(&f, 0.05, Sided::Two, NullIntervalPolicy::SingletonZero).unwrap();
        assert!(ci.wraps);
        assert_eq!(ci.c0, Interval::new(0.0, 0.0));
        assert!(ci.contains(0.0) && ci.contains(100.0) && ci.contains(-100.0));
        assert!(confidence(&f, 1.0, Sided::Two, NullIntervalPolicy::Interval).is_err());
    }

    #[test]
    fn one_sided_lower_bound() {
        let z = normal_quantile(0.9);
        let (beta_hat, atten, sd) = (-11604.0, 0.74, 0.1);
        let f = fake_fit(beta_hat, 1.0 - atten, sd * sd, 1.0, Mode::NoisyDegree);
        let ci = confidence(&f, 0.1, Sided::Right, NullIntervalPolicy::SingletonZero).unwrap();
        assert!((ci.c[0].lower - beta_hat / (atten - z * sd)).abs() < 1e-9);
        assert_eq!(ci.c[0].upper, f64::INFINITY);
    }
}
