//! Estimators with exact moment formulas where available, a seeded Monte
//! Carlo bias/variance/MAD harness, and the reduction machinery (spherical
//! symmetrization and L² projection onto a compact kernel basis).

use crate::error::{Error, Result};
use crate::grid::GridFunction;
use crate::models::{sample, Family, FamilyParams, Sample};
use crate::rng::RngStream;
use crate::special::{expect_pos_part, expect_pos_part_sq, norm_cdf, norm_pdf, norm_sf};
use nalgebra::DMatrix;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// An estimator; the observation arity it expects is fixed by the variant.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub enum EstimatorSpec {
    /// `(2h)^{-1} Σ ΔY_i` over cells with midpoint within `h` of `center`.
    KernelSmoother { bandwidth: f64, center: f64 },
    /// `sign(x)(|x| − level)_+` coordinatewise.
    SoftThreshold { level: f64 },
    /// `Σ_i [(x_i² − level)_+ − E(ξ² − level)_+]`, unit noise.
    QuadFunctionalThreshold { level: f64 },
    /// `(1 − (m−2)/(n‖x‖²)) x`; zero vector when `x = 0`.
    JamesStein,
    /// `c · x` coordinatewise.
    LinearShrinkage { factor: f64 },
    /// `Σ x_i² − m σ²`.
    UnbiasedQuadratic,
    /// `min_i y_i`, optionally corrected by `−1/n`.
    PppMin { bias_corrected: bool },
    /// Haar-averaged `K⁻¹ Σ_r D_r⁻¹ inner(D_r x)`.
    Symmetrized {
        inner: Box<EstimatorSpec>,
        rotations: Vec<Vec<f64>>,
        dim: usize,
    },
    /// L² projection of a function estimator onto a compact kernel basis.
    Projected {
        inner: FunctionEstimator,
        basis: ProjectionBasis,
    },
}

impl EstimatorSpec {
    pub fn validate(&self) -> Result<()> {
        match self {
            EstimatorSpec::KernelSmoother { bandwidth, .. } => {
                if *bandwidth <= 0.0 || *bandwidth > 0.5 {
                    return Err(Error::ParameterDomain(
                        "bandwidth must lie in (0, 1/2]".into(),
                    ));
                }
            }
            EstimatorSpec::SoftThreshold { level }
            | EstimatorSpec::QuadFunctionalThreshold { level } => {
                if *level < 0.0 {
                    return Err(Error::ParameterDomain(
                        "threshold level must be >= 0".into(),
                    ));
                }
            }
            EstimatorSpec::LinearShrinkage { factor } => {
                if !(0.0..=1.0).contains(factor) {
                    return Err(Error::ParameterDomain(
                        "shrinkage factor must lie in [0,1]".into(),
                    ));
                }
            }
            EstimatorSpec::Symmetrized { inner, .. } => inner.validate()?,
            _ => {}
        }
        Ok(())
    }

    pub fn is_scalar_valued(&self) -> bool {
        matches!(
            self,
            EstimatorSpec::KernelSmoother { .. }
                | EstimatorSpec::QuadFunctionalThreshold { .. }
                | EstimatorSpec::UnbiasedQuadratic
                | EstimatorSpec::PppMin { .. }
        )
    }
}

/// Output of one estimator application.
#[derive(Clone, Debug, PartialEq)]
pub enum Estimate {
    Vector(Vec<f64>),
    Scalar(f64),
}

impl Estimate {
    pub fn as_vec(&self) -> Vec<f64> {
        match self {
            Estimate::Vector(v) => v.clone(),
            Estimate::Scalar(s) => vec![*s],
        }
    }
}

/// Coordinate noise variance of the sequence model behind `family`.
fn noise_level(family: &Family) -> Result<f64> {
    match family {
        // IsoNormal σ² corresponds to noise level n = 1/σ²
        Family::IsoNormal { sigma } => Ok(1.0 / (sigma * sigma)),
        _ => Err(Error::Unsupported(
            "sequence-model estimator needs the iso-normal family".into(),
        )),
    }
}

/// Apply an estimator to one observation.
pub fn apply(spec: &EstimatorSpec, obs: &Sample, family: &Family) -> Result<Estimate> {
    spec.validate()?;
    match spec {
        EstimatorSpec::KernelSmoother { bandwidth, center } => {
            let (dy, cells) = match (obs, family) {
                (Sample::Increments(dy), Family::GwnDiscrete { cells, .. }) => (dy, *cells),
                _ => {
                    return Err(Error::Arity(
                        "kernel smoother consumes white-noise increments".into(),
                    ))
                }
            };
            Ok(Estimate::Scalar(smooth_at(dy, cells, *bandwidth, *center)))
        }
        EstimatorSpec::SoftThreshold { level } => {
            let x = vector_obs(obs)?;
            Ok(Estimate::Vector(
                x.iter().map(|&v| soft_threshold(v, *level)).collect(),
            ))
        }
        EstimatorSpec::QuadFunctionalThreshold { level } => {
            require_unit_noise(family)?;
            let x = vector_obs(obs)?;
            let c = quad_threshold_centering(*level);
            Ok(Estimate::Scalar(
                x.iter().map(|&v| (v * v - level).max(0.0) - c).sum::<f64>(),
            ))
        }
        EstimatorSpec::JamesStein => {
            let x = vector_obs(obs)?;
            let m = x.len();
            if m <= 2 {
                return Err(Error::ParameterDomain(
                    "james–stein needs dimension > 2".into(),
                ));
            }
            let n = noise_level(family)?;
            let norm_sq: f64 = x.iter().map(|v| v * v).sum();
            if norm_sq == 0.0 {
                return Ok(Estimate::Vector(vec![0.0; m]));
            }
            let shrink = 1.0 - (m as f64 - 2.0) / (n * norm_sq);
            Ok(Estimate::Vector(x.iter().map(|v| shrink * v).collect()))
        }
        EstimatorSpec::LinearShrinkage { factor } => {
            let x = vector_obs(obs)?;
            Ok(Estimate::Vector(x.iter().map(|v| factor * v).collect()))
        }
        EstimatorSpec::UnbiasedQuadratic => {
            let x = vector_obs(obs)?;
            let sigma_sq = match family {
                Family::IsoNormal { sigma } => sigma * sigma,
                _ => {
                    return Err(Error::Unsupported(
                        "unbiased quadratic needs gaussian noise".into(),
                    ))
                }
            };
            let m = x.len() as f64;
            Ok(Estimate::Scalar(
                x.iter().map(|v| v * v).sum::<f64>() - m * sigma_sq,
            ))
        }
        EstimatorSpec::PppMin { bias_corrected } => {
            let pts = match obs {
                Sample::Points(p) => p,
                _ => return Err(Error::Arity("min statistic consumes point clouds".into())),
            };
            let n = match family {
                Family::PppBoundary { intensity, .. } => *intensity,
                _ => {
                    return Err(Error::Arity(
                        "min statistic lives in the boundary model".into(),
                    ))
                }
            };
            if pts.is_empty() {
                return Err(Error::Validation(
                    "empty point cloud; raise the height cap".into(),
                ));
            }
            let min = pts.iter().map(|p| p.1).fold(f64::INFINITY, f64::min);
            Ok(Estimate::Scalar(if *bias_corrected {
                min - 1.0 / n
            } else {
                min
            }))
        }
        EstimatorSpec::Symmetrized {
            inner,
            rotations,
            dim,
        } => {
            let x = vector_obs(obs)?;
            if x.len() != *dim {
                return Err(Error::DimensionMismatch(
                    "rotation dimension != observation".into(),
                ));
            }
            if inner.is_scalar_valued() {
                return Err(Error::Arity(
                    "symmetrization needs a vector-valued inner estimator".into(),
                ));
            }
            let m = *dim;
            let mut acc = vec![0.0; m];
            for rot in rotations {
                // y = D x
                let mut y = vec![0.0; m];
                for i in 0..m {
                    for j in 0..m {
                        y[i] += rot[i * m + j] * x[j];
                    }
                }
                let inner_est = apply(inner, &Sample::Vector(y), family)?.as_vec();
                // acc += Dᵀ inner(Dx)  (D orthogonal: D⁻¹ = Dᵀ)
                for i in 0..m {
                    for j in 0..m {
                        acc[i] += rot[j * m + i] * inner_est[j];
                    }
                }
            }
            let k = rotations.len() as f64;
            Ok(Estimate::Vector(acc.into_iter().map(|v| v / k).collect()))
        }
        EstimatorSpec::Projected { inner, basis } => {
            let (dy, cells, nlevel) = match (obs, family) {
                (Sample::Increments(dy), Family::GwnDiscrete { cells, noise_level }) => {
                    (dy, *cells, *noise_level)
                }
                _ => {
                    return Err(Error::Arity(
                        "projection consumes white-noise increments".into(),
                    ))
                }
            };
            let f_hat = inner.estimate(dy, cells, nlevel)?;
            basis.project(&f_hat)
        }
    }
}

fn vector_obs(obs: &Sample) -> Result<&Vec<f64>> {
    match obs {
        Sample::Vector(v) => Ok(v),
        _ => Err(Error::Arity("expected a vector observation".into())),
    }
}

fn require_unit_noise(family: &Family) -> Result<()> {
    match family {
        Family::IsoNormal { sigma } if (*sigma - 1.0).abs() < 1e-12 => Ok(()),
        _ => Err(Error::Unsupported(
            "the functional threshold is defined for unit noise".into(),
        )),
    }
}

pub fn soft_threshold(x: f64, t: f64) -> f64 {
    x.signum() * (x.abs() - t).max(0.0)
}

fn smooth_at(dy: &[f64], cells: usize, h: f64, x0: f64) -> f64 {
    let m = cells as f64;
    let mut acc = 0.0;
    for (c, d) in dy.iter().enumerate() {
        let mid = (c as f64 + 0.5) / m;
        if (mid - x0).abs() <= h {
            acc += d;
        }
    }
    acc / (2.0 * h)
}

/// `E[(ξ² − u)_+]` for standard normal ξ.
pub fn quad_threshold_centering(u: f64) -> f64 {
    let c = u.sqrt();
    2.0 * ((1.0 - u) * norm_sf(c) + c * norm_pdf(c))
}

/// Exact bias and variance of the soft-threshold coordinate estimator at
/// parameter `theta` under unit noise: `θ̂ = (X−T)_+ − (−X−T)_+`.
pub fn exact_soft_threshold_moments(level: f64, theta: f64) -> (f64, f64) {
    let (a, b) = (level - theta, level + theta);
    let mean = expect_pos_part(a) - expect_pos_part(b);
    let second = expect_pos_part_sq(a) + expect_pos_part_sq(b);
    (mean - theta, second - mean * mean)
}

/// Per-coordinate envelope for the soft-threshold variance at zero,
/// `2√2/(√π T³) e^{−T²/2}`, from the chain
/// `Var₀ = √(2/π) ∫₀^∞ x² e^{−(x+T)²/2} dx ≤ √(2/π) e^{−T²/2} · 2/T³`.
pub fn soft_threshold_var0_envelope(level: f64) -> f64 {
    let t = level;
    2.0 * 2.0f64.sqrt() / (std::f64::consts::PI.sqrt() * t * t * t) * (-t * t / 2.0).exp()
}

/// Envelope for the variance of `(ξ² − u)_+` at zero signal: `(8/√u) e^{−u/2}`.
pub fn quad_threshold_var0_envelope(u: f64) -> f64 {
    8.0 / u.sqrt() * (-u / 2.0).exp()
}

/// Exact mean and variance of `(X² − u)_+` for `X ~ N(theta, 1)`.
pub fn exact_quad_threshold_moments(u: f64, theta: f64) -> (f64, f64) {
    let c = u.sqrt();
    let (a, b) = (c - theta, -c - theta);
    // partial gaussian moments over [a, ∞) and (−∞, b]
    let i = [
        norm_sf(a),
        norm_pdf(a),
        norm_sf(a) + a * norm_pdf(a),
        (a * a + 2.0) * norm_pdf(a),
        3.0 * norm_sf(a) + (a * a * a + 3.0 * a) * norm_pdf(a),
    ];
    let j = [
        norm_cdf(b),
        -norm_pdf(b),
        norm_cdf(b) - b * norm_pdf(b),
        -(b * b + 2.0) * norm_pdf(b),
        3.0 * norm_cdf(b) - (b * b * b + 3.0 * b) * norm_pdf(b),
    ];
    let t2u = theta * theta - u;
    // (z+θ)² − u = z² + 2θ z + (θ² − u)
    let mean = (i[2] + j[2]) + 2.0 * theta * (i[1] + j[1]) + t2u * (i[0] + j[0]);
    // ((z+θ)² − u)² = z⁴ + 4θ z³ + (6θ² − 2u) z² + 4θ(θ² − u) z + (θ² − u)²
    let second = (i[4] + j[4])
        + 4.0 * theta * (i[3] + j[3])
        + (6.0 * theta * theta - 2.0 * u) * (i[2] + j[2])
        + 4.0 * theta * t2u * (i[1] + j[1])
        + t2u * t2u * (i[0] + j[0]);
    (mean, second - mean * mean)
}

/// Monte Carlo moment estimates of an estimator at a fixed truth.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MomentEstimate {
    pub bias: Vec<f64>,
    pub bias_ses: Vec<f64>,
    pub bias_norm_sq: f64,
    pub bias_norm_sq_se: f64,
    pub variance_sum: f64,
    pub variance_sum_se: f64,
    /// `E‖θ̂ − mean‖` (scalar estimators: `E|θ̂ − mean|`).
    pub mad_mean: f64,
    pub mad_mean_se: f64,
    /// Median-centered MAD, scalar estimators only.
    pub mad_median: Option<f64>,
    pub mad_median_se: Option<f64>,
    pub mse: f64,
    pub mse_se: f64,
    pub reps: usize,
    pub seed: u64,
}

/// The target the estimator is judged against.
fn truth(spec: &EstimatorSpec, params: &FamilyParams) -> Result<Vec<f64>> {
    match spec {
        EstimatorSpec::UnbiasedQuadratic | EstimatorSpec::QuadFunctionalThreshold { .. } => {
            let t = params.as_vector()?;
            Ok(vec![t.values().iter().map(|v| v * v).sum()])
        }
        EstimatorSpec::PppMin { .. } => {
            let f = params.as_function()?;
            Ok(vec![f.cell_value(0)])
        }
        EstimatorSpec::KernelSmoother { center, .. } => {
            let f = params.as_function()?;
            let cell = ((center * f.cells() as f64) as usize).min(f.cells() - 1);
            Ok(vec![f.cell_value(cell)])
        }
        EstimatorSpec::Projected { basis, .. } => {
            let f = params.as_function()?;
            Ok(basis.project(f)?.as_vec())
        }
        _ => {
            let t = params.as_vector()?;
            Ok(t.values().to_vec())
        }
    }
}

/// Seeded Monte Carlo bias/variance/MAD measurement.
///
/// Replications are sharded into 32 deterministic batches (one substream per
/// batch, one per replication inside); batch results are combined in index
/// order, so the estimate is reproducible across thread counts, and batch
/// spread provides the standard errors.
pub fn mc_moments(
    spec: &EstimatorSpec,
    family: &Family,
    params: &FamilyParams,
    reps: usize,
    stream: RngStream,
) -> Result<MomentEstimate> {
    if reps < 1_000 {
        return Err(Error::Config("need at least 1000 replications".into()));
    }
    spec.validate()?;
    let target = truth(spec, params)?;
    let dim = target.len();
    let batches = 32usize;
    let per_batch = reps / batches;
    let total = per_batch * batches;

    // pass 1: batch means
    let batch_sums: Result<Vec<Vec<f64>>> = (0..batches)
        .into_par_iter()
        .map(|b| {
            let bs = stream.substream(b as u64);
            let mut acc = vec![0.0; dim];
            for r in 0..per_batch {
                let obs = sample(family, params, bs.substream(r as u64))?;
                let est = apply(spec, &obs, family)?.as_vec();
                for (a, e) in acc.iter_mut().zip(&est) {
                    *a += e;
                }
            }
            Ok(acc)
        })
        .collect();
    let batch_sums = batch_sums?;
    let mut mean = vec![0.0; dim];
    for bs in &batch_sums {
        for (m, v) in mean.iter_mut().zip(bs) {
            *m += v;
        }
    }
    for m in mean.iter_mut() {
        *m /= total as f64;
    }

    // pass 2: centered statistics per batch (same substreams, same draws)
    struct BatchStats {
        var_sum: f64,
        mad_mean: f64,
        mse: f64,
        scalars: Vec<f64>,
    }
    let keep_scalars = dim == 1 && per_batch <= 200_000;
    let stats: Result<Vec<BatchStats>> = (0..batches)
        .into_par_iter()
        .map(|b| {
            let bs = stream.substream(b as u64);
            let mut var_sum = 0.0;
            let mut mad = 0.0;
            let mut mse = 0.0;
            let mut scalars = Vec::new();
            for r in 0..per_batch {
                let obs = sample(family, params, bs.substream(r as u64))?;
                let est = apply(spec, &obs, family)?.as_vec();
                let mut dev_sq = 0.0;
                let mut err_sq = 0.0;
                for i in 0..dim {
                    dev_sq += (est[i] - mean[i]) * (est[i] - mean[i]);
                    err_sq += (est[i] - target[i]) * (est[i] - target[i]);
                }
                var_sum += dev_sq;
                mad += dev_sq.sqrt();
                mse += err_sq;
                if keep_scalars {
                    scalars.push(est[0]);
                }
            }
            let n = per_batch as f64;
            Ok(BatchStats {
                var_sum: var_sum / n,
                mad_mean: mad / n,
                mse: mse / n,
                scalars,
            })
        })
        .collect();
    let stats = stats?;

    let agg = |f: &dyn Fn(&BatchStats) -> f64| -> (f64, f64) {
        let vals: Vec<f64> = stats.iter().map(f).collect();
        let m = vals.iter().sum::<f64>() / batches as f64;
        let var = vals.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / (batches as f64 - 1.0);
        (m, (var / batches as f64).sqrt())
    };
    let (variance_sum, variance_sum_se) = agg(&|s| s.var_sum);
    let (mad_mean, mad_mean_se) = agg(&|s| s.mad_mean);
    let (mse, mse_se) = agg(&|s| s.mse);

    let bias: Vec<f64> = mean.iter().zip(&target).map(|(m, t)| m - t).collect();
    // per-coordinate mean standard errors from batch means
    let mut bias_ses = vec![0.0; dim];
    for i in 0..dim {
        let vals: Vec<f64> = batch_sums.iter().map(|b| b[i] / per_batch as f64).collect();
        let m = vals.iter().sum::<f64>() / batches as f64;
        let var = vals.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / (batches as f64 - 1.0);
        bias_ses[i] = (var / batches as f64).sqrt();
    }
    let bias_norm_sq: f64 = bias.iter().map(|b| b * b).sum();
    let bias_norm_sq_se = 2.0
        * bias
            .iter()
            .zip(&bias_ses)
            .map(|(b, s)| (b * s) * (b * s))
            .sum::<f64>()
            .sqrt();

    // median-centered MAD for scalar estimators
    let (mad_median, mad_median_se) = if keep_scalars {
        let mut all: Vec<f64> = stats
            .iter()
            .flat_map(|s| s.scalars.iter().copied())
            .collect();
        all.sort_by(|a, b| a.partial_cmp(b).unwrap());
        let med = all[all.len() / 2];
        let per: Vec<f64> = stats
            .iter()
            .map(|s| s.scalars.iter().map(|v| (v - med).abs()).sum::<f64>() / per_batch as f64)
            .collect();
        let m = per.iter().sum::<f64>() / batches as f64;
        let var = per.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / (batches as f64 - 1.0);
        (Some(m), Some((var / batches as f64).sqrt()))
    } else {
        (None, None)
    };

    Ok(MomentEstimate {
        bias,
        bias_ses,
        bias_norm_sq,
        bias_norm_sq_se,
        variance_sum,
        variance_sum_se,
        mad_mean,
        mad_mean_se,
        mad_median,
        mad_median_se,
        mse,
        mse_se,
        reps: total,
        seed: stream.seed(),
    })
}

/// Wrap an estimator in its spherical symmetrization over `k_rotations`
/// Haar-random orthogonal matrices (QR of a Gaussian matrix with the R-sign
/// correction), drawn once from `stream`.
pub fn spherical_symmetrize(
    inner: EstimatorSpec,
    k_rotations: usize,
    dim: usize,
    stream: RngStream,
) -> Result<EstimatorSpec> {
    if inner.is_scalar_valued() {
        return Err(Error::Arity(
            "symmetrization needs a vector-valued inner estimator".into(),
        ));
    }
    if k_rotations == 0 {
        return Err(Error::Config("need at least one rotation".into()));
    }
    let rotations: Vec<Vec<f64>> = (0..k_rotations)
        .map(|r| haar_rotation(dim, stream.substream(r as u64)))
        .collect();
    Ok(EstimatorSpec::Symmetrized {
        inner: Box::new(inner),
        rotations,
        dim,
    })
}

/// One Haar-distributed orthogonal matrix (row-major).
pub fn haar_rotation(dim: usize, stream: RngStream) -> Vec<f64> {
    let mut rng = stream.rng();
    let g = DMatrix::from_fn(dim, dim, |_, _| {
        let u: f64 = rng.gen::<f64>();
        let v: f64 = rng.gen::<f64>();
        // Box-Muller keeps draws independent of rand_distr internals
        (-2.0 * u.max(1e-300).ln()).sqrt() * (2.0 * std::f64::consts::PI * v).cos()
    });
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..dim {
        if r[(j, j)] < 0.0 {
            for i in 0..dim {
                q[(i, j)] = -q[(i, j)];
            }
        }
    }
    let mut out = vec![0.0; dim * dim];
    for i in 0..dim {
        for j in 0..dim {
            out[i * dim + j] = q[(i, j)];
        }
    }
    out
}

/// Function estimators on the white-noise grid, used by the projection
/// reduction.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub enum FunctionEstimator {
    Zero,
    /// Returns a fixed function (the oracle truth, typically).
    Oracle(GridFunction),
    /// Kernel smoother evaluated at every grid cell.
    KernelSmoother {
        bandwidth: f64,
    },
    /// Synthesize from James–Stein-shrunk basis coefficients.
    JamesSteinOnBasis(ProjectionBasis),
}

impl FunctionEstimator {
    /// Estimate `f` on the cell grid from the observed increments.
    pub fn estimate(&self, dy: &[f64], cells: usize, noise_level: f64) -> Result<GridFunction> {
        match self {
            FunctionEstimator::Zero => GridFunction::constant(cells, 0.0),
            FunctionEstimator::Oracle(f) => {
                if f.cells() != cells {
                    return Err(Error::DimensionMismatch("oracle grid != model grid".into()));
                }
                Ok(f.clone())
            }
            FunctionEstimator::KernelSmoother { bandwidth } => {
                let m = cells as f64;
                let vals: Vec<f64> = (0..=cells)
                    .map(|g| smooth_at(dy, cells, *bandwidth, g as f64 / m))
                    .collect();
                GridFunction::new(vals)
            }
            FunctionEstimator::JamesSteinOnBasis(basis) => {
                // raw coefficient observations are N(θ_i, 1/n); shrink and resynthesize
                let raw = basis.raw_coefficients(dy, cells)?;
                let m = raw.len();
                if m <= 2 {
                    return Err(Error::ParameterDomain(
                        "james–stein needs dimension > 2".into(),
                    ));
                }
                let norm_sq: f64 = raw.iter().map(|v| v * v).sum();
                let shrink = if norm_sq == 0.0 {
                    0.0
                } else {
                    1.0 - (m as f64 - 2.0) / (noise_level * norm_sq)
                };
                let coef: Vec<f64> = raw.iter().map(|v| shrink * v).collect();
                basis.synthesize(&coef, cells)
            }
        }
    }
}

/// Orthonormal basis `ψ_i = √m K(m·x − (i − 1/2))` from a kernel with support
/// in `[−1/2, 1/2]`, discretely renormalized to unit norm on the cell grid.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ProjectionBasis {
    pub m: usize,
    pub grid_cells: usize,
    /// Kernel profile over one block of `grid_cells / m` cells.
    profile: Vec<f64>,
}

impl ProjectionBasis {
    /// Build from a kernel; errors when `m` does not divide the grid or the
    /// kernel leaks outside `[−1/2, 1/2]`.
    pub fn from_kernel(kernel: impl Fn(f64) -> f64, m: usize, grid_cells: usize) -> Result<Self> {
        if m == 0 || !grid_cells.is_multiple_of(m) {
            return Err(Error::Config(
                "basis count must divide the grid cells".into(),
            ));
        }
        for probe in [-0.95, -0.75, -0.55, 0.55, 0.75, 0.95] {
            if kernel(probe).abs() > 1e-12 {
                return Err(Error::Validation(
                    "kernel support must be contained in [-1/2, 1/2]".into(),
                ));
            }
        }
        let block = grid_cells / m;
        let mut profile: Vec<f64> = (0..block)
            .map(|j| (m as f64).sqrt() * kernel(j as f64 / block as f64 - 0.5))
            .collect();
        let norm_sq: f64 = profile.iter().map(|v| v * v).sum::<f64>() / grid_cells as f64;
        if norm_sq <= 0.0 {
            return Err(Error::Validation("kernel vanishes on the grid".into()));
        }
        let scale = norm_sq.sqrt().recip();
        for v in profile.iter_mut() {
            *v *= scale;
        }
        Ok(ProjectionBasis {
            m,
            grid_cells,
            profile,
        })
    }

    /// Default quartic bump `(1 − 4x²)²` basis.
    pub fn quartic(m: usize, grid_cells: usize) -> Result<Self> {
        Self::from_kernel(
            |x| {
                if x.abs() <= 0.5 {
                    (1.0 - 4.0 * x * x).powi(2)
                } else {
                    0.0
                }
            },
            m,
            grid_cells,
        )
    }

    fn block(&self) -> usize {
        self.grid_cells / self.m
    }

    /// `θ̃_i = ⟨f, ψ_i⟩` on the cell grid.
    pub fn project(&self, f: &GridFunction) -> Result<Estimate> {
        if f.cells() != self.grid_cells {
            return Err(Error::DimensionMismatch(
                "function grid != basis grid".into(),
            ));
        }
        let block = self.block();
        let mut out = vec![0.0; self.m];
        for (i, o) in out.iter_mut().enumerate() {
            let mut acc = 0.0;
            for j in 0..block {
                acc += f.cell_value(i * block + j) * self.profile[j];
            }
            *o = acc / self.grid_cells as f64;
        }
        Ok(Estimate::Vector(out))
    }

    /// Raw coefficient observations `∫ ψ_i dY` (distributed `N(θ_i, 1/n)`).
    pub fn raw_coefficients(&self, dy: &[f64], cells: usize) -> Result<Vec<f64>> {
        if cells != self.grid_cells || dy.len() != cells {
            return Err(Error::DimensionMismatch("increments != basis grid".into()));
        }
        let block = self.block();
        let mut out = vec![0.0; self.m];
        for (i, o) in out.iter_mut().enumerate() {
            let mut acc = 0.0;
            for j in 0..block {
                acc += dy[i * block + j] * self.profile[j];
            }
            *o = acc;
        }
        Ok(out)
    }

    /// `f = Σ_i c_i ψ_i` on the cell grid.
    pub fn synthesize(&self, coefficients: &[f64], cells: usize) -> Result<GridFunction> {
        if coefficients.len() != self.m || cells != self.grid_cells {
            return Err(Error::DimensionMismatch(
                "coefficient count != basis size".into(),
            ));
        }
        let block = self.block();
        let mut vals = vec![0.0; cells + 1];
        for i in 0..self.m {
            for j in 0..block {
                vals[i * block + j] = coefficients[i] * self.profile[j];
            }
        }
        GridFunction::new(vals)
    }

    /// Embed a coefficient vector as the grid function `f_θ`.
    pub fn embed(&self, theta: &[f64]) -> Result<GridFunction> {
        self.synthesize(theta, self.grid_cells)
    }
}

/// Monte Carlo integrated bias/variance of a function estimator, plus the
/// moments of its projection onto `basis`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct FunctionMoments {
    pub ibias_sq: f64,
    pub ibias_sq_se: f64,
    pub ivar: f64,
    pub ivar_se: f64,
    pub projected_bias_norm_sq: f64,
    pub projected_bias_norm_sq_se: f64,
    pub projected_variance_sum: f64,
    pub projected_variance_sum_se: f64,
    pub reps: usize,
}

/// Measure `IBias²` and `IVar` of a function estimator in the white-noise
/// model with truth `f_true`, together with the squared bias norm and summed
/// variance of its basis projection (the reduction comparison).
pub fn mc_function_moments(
    est: &FunctionEstimator,
    family: &Family,
    f_true: &GridFunction,
    basis: &ProjectionBasis,
    reps: usize,
    stream: RngStream,
) -> Result<FunctionMoments> {
    let (cells, nlevel) = match family {
        Family::GwnDiscrete { cells, noise_level } => (*cells, *noise_level),
        _ => {
            return Err(Error::Unsupported(
                "function moments need the white-noise model".into(),
            ))
        }
    };
    if f_true.cells() != cells {
        return Err(Error::DimensionMismatch("truth grid != model grid".into()));
    }
    let params = FamilyParams::Function(f_true.clone());
    let theta_true = basis.project(f_true)?.as_vec();
    let dim = basis.m;
    let batches = 32usize;
    let per_batch = (reps / batches).max(1);
    let total = per_batch * batches;

    // pass 1: mean function and mean coefficients
    let sums: Result<Vec<(Vec<f64>, Vec<f64>)>> = (0..batches)
        .into_par_iter()
        .map(|b| {
            let bs = stream.substream(b as u64);
            let mut fsum = vec![0.0; cells];
            let mut csum = vec![0.0; dim];
            for r in 0..per_batch {
                let obs = sample(family, &params, bs.substream(r as u64))?;
                let dy = match &obs {
                    Sample::Increments(d) => d,
                    _ => unreachable!(),
                };
                let fh = est.estimate(dy, cells, nlevel)?;
                for i in 0..cells {
                    fsum[i] += fh.cell_value(i);
                }
                let proj = basis.project(&fh)?.as_vec();
                for (c, p) in csum.iter_mut().zip(&proj) {
                    *c += p;
                }
            }
            Ok((fsum, csum))
        })
        .collect();
    let sums = sums?;
    let mut fmean = vec![0.0; cells];
    let mut cmean = vec![0.0; dim];
    for (fs, cs) in &sums {
        for (a, b) in fmean.iter_mut().zip(fs) {
            *a += b;
        }
        for (a, b) in cmean.iter_mut().zip(cs) {
            *a += b;
        }
    }
    for v in fmean.iter_mut() {
        *v /= total as f64;
    }
    for v in cmean.iter_mut() {
        *v /= total as f64;
    }

    // pass 2: integrated variance and projected variance per batch
    let stats: Result<Vec<(f64, f64)>> = (0..batches)
        .into_par_iter()
        .map(|b| {
            let bs = stream.substream(b as u64);
            let mut ivar = 0.0;
            let mut pvar = 0.0;
            for r in 0..per_batch {
                let obs = sample(family, &params, bs.substream(r as u64))?;
                let dy = match &obs {
                    Sample::Increments(d) => d,
                    _ => unreachable!(),
                };
                let fh = est.estimate(dy, cells, nlevel)?;
                let mut acc = 0.0;
                for i in 0..cells {
                    let d = fh.cell_value(i) - fmean[i];
                    acc += d * d;
                }
                ivar += acc / cells as f64;
                let proj = basis.project(&fh)?.as_vec();
                let mut accp = 0.0;
                for i in 0..dim {
                    let d = proj[i] - cmean[i];
                    accp += d * d;
                }
                pvar += accp;
            }
            let n = per_batch as f64;
            Ok((ivar / n, pvar / n))
        })
        .collect();
    let stats = stats?;
    let agg = |vals: Vec<f64>| -> (f64, f64) {
        let m = vals.iter().sum::<f64>() / batches as f64;
        let var = vals.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / (batches as f64 - 1.0);
        (m, (var / batches as f64).sqrt())
    };
    let (ivar, ivar_se) = agg(stats.iter().map(|s| s.0).collect());
    let (pvar, pvar_se) = agg(stats.iter().map(|s| s.1).collect());

    // bias terms from pass-1 means, with batch-mean standard errors
    let mut ibias_sq = 0.0;
    for i in 0..cells {
        let d = fmean[i] - f_true.cell_value(i);
        ibias_sq += d * d;
    }
    ibias_sq /= cells as f64;
    let fmean_se: Vec<f64> = (0..cells)
        .map(|i| {
            let vals: Vec<f64> = sums
                .iter()
                .map(|(fs, _)| fs[i] / per_batch as f64)
                .collect();
            let m = vals.iter().sum::<f64>() / batches as f64;
            let var = vals.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / (batches as f64 - 1.0);
            (var / batches as f64).sqrt()
        })
        .collect();
    let ibias_sq_se = 2.0
        * (0..cells)
            .map(|i| ((fmean[i] - f_true.cell_value(i)) * fmean_se[i]).powi(2))
            .sum::<f64>()
            .sqrt()
        / cells as f64;
    let mut pbias_sq = 0.0;
    let mut pbias_sq_se_acc = 0.0;
    for i in 0..dim {
        let d = cmean[i] - theta_true[i];
        pbias_sq += d * d;
        let vals: Vec<f64> = sums
            .iter()
            .map(|(_, cs)| cs[i] / per_batch as f64)
            .collect();
        let m = vals.iter().sum::<f64>() / batches as f64;
        let var = vals.iter().map(|v| (v - m) * (v - m)).sum::<f64>() / (batches as f64 - 1.0);
        pbias_sq_se_acc += (d * d * var / batches as f64).max(0.0);
    }
    let pbias_sq_se = 2.0 * pbias_sq_se_acc.sqrt();

    Ok(FunctionMoments {
        ibias_sq,
        ibias_sq_se,
        ivar,
        ivar_se,
        projected_bias_norm_sq: pbias_sq,
        projected_bias_norm_sq_se: pbias_sq_se,
        projected_variance_sum: pvar,
        projected_variance_sum_se: pvar_se,
        reps: total,
    })
}


#[cfg(test)]
mod se_scaling_tests {
    use super::*;

    #[test]
    fn standard_errors_scale_as_inverse_sqrt_reps() {
        let spec = EstimatorSpec::SoftThreshold { level: 0.7 };
        let fam = Family::IsoNormal { sigma: 1.0 };
        let params = FamilyParams::vector(vec![0.4, -0.2]);
        let a = mc_moments(&spec, &fam, &params, 40_000, RngStream::new(2)).unwrap();
        let b = mc_moments(&spec, &fam, &params, 160_000, RngStream::new(2)).unwrap();
        // quadrupling reps should halve the SEs (within sampling noise of SEs)
        for (sa, sb) in [
            (a.variance_sum_se, b.variance_sum_se),
            (a.bias_ses[0], b.bias_ses[0]),
            (a.mse_se, b.mse_se),
        ] {
            let ratio = sb / sa;
            assert!(
                (0.25..=1.0).contains(&ratio),
                "se ratio {} not near 1/2",
                ratio
            );
        }
    }
}

#[cfg(test)]
mod equivariance_tests {
    use super::*;

    #[test]
    fn symmetrized_mean_map_commutes_with_rotations() {
        // E_{Dθ}[θ̃] = D E_θ[θ̃] within 3 SE for a random rotation D
        let dim = 4;
        let fam = Family::IsoNormal { sigma: 1.0 };
        let inner = EstimatorSpec::SoftThreshold { level: 0.6 };
        let sym = spherical_symmetrize(inner, 48, dim, RngStream::new(71)).unwrap();
        let theta = vec![0.8, -0.1, 0.4, 0.2];
        let rot = haar_rotation(dim, RngStream::new(72));
        let rotated: Vec<f64> = (0..dim)
            .map(|i| (0..dim).map(|j| rot[i * dim + j] * theta[j]).sum())
            .collect();
        let reps = 150_000;
        let at = |t: &[f64], tag: u64| {
            mc_moments(
                &sym,
                &fam,
                &FamilyParams::vector(t.to_vec()),
                reps,
                RngStream::new(100 + tag),
            )
            .unwrap()
        };
        let m_theta = at(&theta, 0);
        let m_rot = at(&rotated, 1);
        for i in 0..dim {
            let lhs = m_rot.bias[i] + rotated[i]; // E_{Dθ}[θ̃]_i
            let rhs: f64 = (0..dim)
                .map(|j| rot[i * dim + j] * (m_theta.bias[j] + theta[j]))
                .sum();
            let se = (m_rot.bias_ses[i].powi(2)
                + (0..dim)
                    .map(|j| (rot[i * dim + j] * m_theta.bias_ses[j]).powi(2))
                    .sum::<f64>())
            .sqrt();
            assert!(
                (lhs - rhs).abs() < 3.0 * se,
                "coord {}: {} vs {} (se {})",
                i,
                lhs,
                rhs,
                se
            );
        }
    }
}
