//! Numerical lower bounds on the bias-variance trade-off.
//!
//! The crate computes information-theoretic lower bounds on estimator
//! variance under bias constraints: pairwise divergences with closed forms
//! and independent numerical oracles ([`divergences`]), χ²-divergence and
//! Hellinger affinity matrices with their norms and pseudoinverse
//! ([`infomatrices`]), the change-of-expectation inequalities
//! ([`bounds`]), an estimator zoo with exact moments and a reproducible
//! Monte Carlo harness ([`estimators`]), kernel dictionaries for the
//! trade-off constants ([`kernels`]), and end-to-end verification
//! scenarios ([`scenarios`]).

pub mod bounds;
pub mod combinatorics;
pub mod divergences;
pub mod error;
pub mod estimators;
pub mod grid;
pub mod infomatrices;
pub mod kernels;
pub mod linalg;
pub mod models;
pub mod quad;
pub mod rng;
pub mod scenarios;
pub mod special;

pub use bounds::{BoundReport, StatMoments, Statistic};
pub use divergences::{DivergenceKind, DivergenceValue, OracleBudget, Provenance};
pub use error::{Error, Result};
pub use estimators::{Estimate, EstimatorSpec, FunctionEstimator, MomentEstimate, ProjectionBasis};
pub use grid::{GridFunction, SmoothnessClass};
pub use infomatrices::{DivMatrix, MarkovKernelMatrix, MatrixKind};
pub use kernels::{KernelDictionary, KernelShape};
pub use models::{Family, FamilyParams, ParamVector, PolyStatistic, Sample};
pub use rng::RngStream;
pub use scenarios::{ScenarioResult, SuiteSummary};
