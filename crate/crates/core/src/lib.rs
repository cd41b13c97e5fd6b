//! Regression on network centralities estimated from a noisy graph.
//!
//! The observed network `Â` is a Bernoulli draw around a latent weighted
//! network `A = p_n f(U_i, U_j)`. Regressing an outcome on centralities of `Â`
//! attenuates the slope; this crate estimates the attenuation and its
//! variance, and builds tests and confidence sets that account for both.

pub mod centrality;
pub mod error;
pub mod estimator;
pub mod graph;
pub mod inference;
pub mod io;
pub mod matrix;
pub mod montecarlo;
pub mod rng;
pub mod stats;
pub mod walks;

pub use centrality::{
    degree, diffusion, eigenvector_centrality, leading_eigenpair, regularize, regularized_eigenvector_centrality,
    CentralityVector, DeltaRule, DiffusionParams, Eigenpair, PowerIteration, Recipe, Regularization, Scaling,
};
pub use error::{Error, Result};
pub use estimator::{BiasCoefficients, EigenMode, Estimator};
pub use graph::{build_true_adjacency, observe, sample_latent, Graphon, GraphonSpec, SparsityRule};
pub use inference::{confidence, ols, robust_test, test, Interval, IntervalUnion, Mode, RegressionFit, Sided};
pub use matrix::{DenseSymmetric, SparseGraph, SymmetricOperator, WeightedGraph};
pub use montecarlo::{run_experiment, ExperimentConfig};
