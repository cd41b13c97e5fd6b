//! End-to-end fits: centrality on a network, OLS, and the matching bias and
//! variance components.

use serde::{Deserialize, Serialize};

use crate::centrality::{
    degree, diffusion, eigenvector_centrality_with, regularized_eigenvector_centrality_with, CentralityVector,
    DeltaRule, DiffusionParams, PowerIteration, Regularization, Scaling,
};
use crate::error::Result;
use crate::inference::{
    degree_bias_variance, diffusion_bias_variance, eigen_bias_variance, ols, Mode, RegressionFit,
};
use crate::matrix::{SparseGraph, SymmetricOperator};
use crate::walks::{derive_b, reference_b, BiasConvention, BiasPolynomial, Budget};

/// Source of the diffusion bias coefficients `b_T`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BiasCoefficients {
    /// Embedded published tables, `T ≤ 10`.
    #[default]
    Tabulated,
    /// Derived at run time from the full expansion, `T ≤ 7`.
    Full,
}

impl BiasCoefficients {
    pub fn load(self, horizon: usize) -> Result<BiasPolynomial> {
        match self {
            BiasCoefficients::Tabulated => reference_b(horizon),
            BiasCoefficients::Full => derive_b(horizon, Budget::EXTENDED, BiasConvention::FullExpansion),
        }
    }
}

/// Which eigenvector inference regime to apply.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum EigenMode {
    CaseA,
    CaseB,
    #[default]
    Corollary5,
}

fn default_delta() -> DeltaRule {
    DeltaRule::Fixed { delta: 1.0 }
}

fn default_horizon() -> usize {
    2
}

/// A centrality regressor together with its inference mode.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Estimator {
    Degree,
    Diffusion {
        #[serde(default = "default_delta")]
        delta: DeltaRule,
        #[serde(default = "default_horizon")]
        horizon: usize,
        #[serde(default)]
        coefficients: BiasCoefficients,
    },
    Eigenvector {
        scaling: Scaling,
        #[serde(default)]
        mode: EigenMode,
    },
    RegularizedEigenvector {
        scaling: Scaling,
        regularization: Regularization,
    },
}

impl Estimator {
    /// Short label used in output files.
    pub fn label(&self) -> String {
        match self {
            Estimator::Degree => "degree".into(),
            Estimator::Diffusion { horizon, .. } => format!("diffusion-T{horizon}"),
            Estimator::Eigenvector { .. } => "eigenvector".into(),
            Estimator::RegularizedEigenvector { .. } => "regularized-eigenvector".into(),
        }
    }

    /// The regressor on a network measured without error. Regularized
    /// eigenvector centrality targets the plain eigenvector of the true network.
    pub fn true_centrality<M: SymmetricOperator + ?Sized>(&self, a: &M) -> Result<CentralityVector> {
        self.true_centrality_with(a, &PowerIteration::default())
    }

    pub fn true_centrality_with<M: SymmetricOperator + ?Sized>(
        &self,
        a: &M,
        opts: &PowerIteration,
    ) -> Result<CentralityVector> {
        match *self {
            Estimator::Degree => Ok(degree(a)),
            Estimator::Diffusion { delta, horizon, .. } => diffusion(a, &DiffusionParams { delta, horizon }),
            Estimator::Eigenvector { scaling, .. } | Estimator::RegularizedEigenvector { scaling, .. } => {
                eigenvector_centrality_with(a, scaling, opts)
            }
        }
    }

    /// The regressor on an observed binary network.
    pub fn observed_centrality(&self, g: &SparseGraph) -> Result<CentralityVector> {
        self.observed_centrality_with(g, &PowerIteration::default())
    }

    pub fn observed_centrality_with(&self, g: &SparseGraph, opts: &PowerIteration) -> Result<CentralityVector> {
        match *self {
            Estimator::RegularizedEigenvector { scaling, regularization } => {
                regularized_eigenvector_centrality_with(g, regularization, scaling, opts)
            }
            _ => self.true_centrality_with(g, opts),
        }
    }

    pub fn mode(&self) -> Mode {
        match self {
            Estimator::Degree => Mode::NoisyDegree,
            Estimator::Diffusion { .. } => Mode::NoisyDiffusion,
            Estimator::Eigenvector { mode: EigenMode::CaseA, .. } => Mode::NoisyEigenvectorCaseA,
            Estimator::Eigenvector { mode: EigenMode::CaseB, .. } => Mode::NoisyEigenvectorCaseB,
            Estimator::Eigenvector { mode: EigenMode::Corollary5, .. } => Mode::NoisyEigenvectorCorollary5,
            Estimator::RegularizedEigenvector { .. } => Mode::NoisyRegularizedEigenvector,
        }
    }

    /// Fits `y` on the regressor computed from the observed network, with the
    /// bias and variance components this estimator supports.
    pub fn fit(&self, y: &[f64], g: &SparseGraph) -> Result<(CentralityVector, RegressionFit)> {
        self.fit_with(y, g, &PowerIteration::default())
    }

    pub fn fit_with(
        &self,
        y: &[f64],
        g: &SparseGraph,
        opts: &PowerIteration,
    ) -> Result<(CentralityVector, RegressionFit)> {
        let c = self.observed_centrality_with(g, opts)?;
        let fit = ols(y, &c.values, self.mode())?;
        let fit = match *self {
            Estimator::Degree => {
                let bv = degree_bias_variance(g, &c, &fit)?;
                fit.with_components(bv)
            }
            Estimator::Diffusion { horizon, coefficients, .. } => {
                let coeffs = coefficients.load(horizon)?;
                let bv = diffusion_bias_variance(g, &c, &fit, &coeffs)?;
                fit.with_components(bv)
            }
            Estimator::Eigenvector { .. } => {
                let bv = eigen_bias_variance(c.lambda1.unwrap_or(0.0), &c, g, &fit)?;
                fit.with_components(bv)
            }
            Estimator::RegularizedEigenvector { .. } => fit,
        };
        Ok((c, fit))
    }

    /// Fits `y` on the regressor computed from the true network.
    pub fn fit_without_error<M: SymmetricOperator + ?Sized>(
        &self,
        y: &[f64],
        a: &M,
    ) -> Result<(CentralityVector, RegressionFit)> {
        let c = self.true_centrality(a)?;
        let fit = ols(y, &c.values, Mode::NoError)?;
        Ok((c, fit))
    }
}
