//! Distribution families, parameter vectors, samplers and exact log-densities.
//!
//! Product families draw one coordinate per parameter entry. The Gaussian
//! white noise surrogate draws `m` independent increments
//! `ΔY_i = f_i/m + ε_i`, `ε_i ~ N(0, 1/(nm))`; the support-boundary model
//! draws a Poisson number of points uniformly on the strip between `f` and
//! `f + H` (piecewise constant on cells). For those two, only likelihood
//! ratios are defined against a second parameter.

use crate::error::{Error, Result};
use crate::grid::GridFunction;
use crate::rng::RngStream;
use crate::special;
use rand::Rng;
use rand_distr::{Distribution, Gamma as GammaDist, Normal as NormalDist, Poisson as PoissonDist};
use serde::{Deserialize, Serialize};
use statrs::function::gamma::ln_gamma;

/// A parametric observation model.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Family {
    /// `N(θ, σ² I_d)`.
    IsoNormal { sigma: f64 },
    /// `⊗ Pois(λ_ℓ)`.
    PoissonProduct,
    /// `⊗ Ber(θ_ℓ)`.
    BernoulliProduct,
    /// `⊗ Exp(β_ℓ)` (rate parametrization).
    ExponentialProduct,
    /// `⊗ Gamma(α_ℓ, β_ℓ)` with fixed shapes and rate parameters.
    GammaProduct { shapes: Vec<f64> },
    /// Discretized white noise: `m` cells, noise level `n`.
    GwnDiscrete { cells: usize, noise_level: f64 },
    /// Poisson point process on the epigraph strip of a boundary function.
    PppBoundary { intensity: f64, height_cap: f64 },
}

impl Family {
    pub fn validate(&self) -> Result<()> {
        match self {
            Family::IsoNormal { sigma } if *sigma <= 0.0 => Err(Error::ParameterDomain(
                "iso-normal sigma must be > 0".into(),
            )),
            Family::GammaProduct { shapes } if shapes.iter().any(|a| *a <= 0.0) => {
                Err(Error::ParameterDomain("gamma shapes must be > 0".into()))
            }
            Family::GwnDiscrete { cells, noise_level } if *cells < 2 || *noise_level <= 0.0 => Err(
                Error::Config("gwn needs m >= 2 cells and noise level n > 0".into()),
            ),
            Family::PppBoundary {
                intensity,
                height_cap,
            } => {
                if *intensity <= 0.0 {
                    Err(Error::ParameterDomain("ppp intensity must be > 0".into()))
                } else if *height_cap <= 0.0 {
                    Err(Error::Config("ppp height cap must be > 0".into()))
                } else {
                    Ok(())
                }
            }
            _ => Ok(()),
        }
    }

    pub fn is_function_valued(&self) -> bool {
        matches!(
            self,
            Family::GwnDiscrete { .. } | Family::PppBoundary { .. }
        )
    }
}

/// Parameter vector of a product family, optionally with a declared sparse support.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParamVector {
    values: Vec<f64>,
    support: Option<Vec<usize>>,
}

impl ParamVector {
    pub fn dense(values: Vec<f64>) -> Self {
        ParamVector {
            values,
            support: None,
        }
    }

    /// An `n`-vector equal to `value` on `support` and zero elsewhere.
    pub fn sparse(n: usize, support: &[usize], value: f64) -> Result<Self> {
        let mut values = vec![0.0; n];
        for &i in support {
            if i >= n {
                return Err(Error::DimensionMismatch(format!(
                    "support index {} out of 0..{}",
                    i, n
                )));
            }
            values[i] = value;
        }
        let mut s = support.to_vec();
        s.sort_unstable();
        s.dedup();
        if s.len() != support.len() {
            return Err(Error::ParameterDomain("duplicate support index".into()));
        }
        Ok(ParamVector {
            values,
            support: Some(s),
        })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn dim(&self) -> usize {
        self.values.len()
    }

    pub fn support(&self) -> Option<&[usize]> {
        self.support.as_deref()
    }

    fn check_sparse_invariant(&self) -> Result<()> {
        if let Some(s) = &self.support {
            for (i, v) in self.values.iter().enumerate() {
                if !s.contains(&i) && *v != 0.0 {
                    return Err(Error::ParameterDomain(format!(
                        "sparse vector non-zero at {} outside declared support",
                        i
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Parameters of a family: a vector for product families, a boundary/regression
/// function for the white-noise and point-process models.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub enum FamilyParams {
    Vector(ParamVector),
    Function(GridFunction),
}

impl FamilyParams {
    pub fn vector(values: Vec<f64>) -> Self {
        FamilyParams::Vector(ParamVector::dense(values))
    }

    pub fn as_vector(&self) -> Result<&ParamVector> {
        match self {
            FamilyParams::Vector(v) => Ok(v),
            _ => Err(Error::ParameterDomain("expected a parameter vector".into())),
        }
    }

    pub fn as_function(&self) -> Result<&GridFunction> {
        match self {
            FamilyParams::Function(f) => Ok(f),
            _ => Err(Error::ParameterDomain("expected a grid function".into())),
        }
    }
}

/// One observation from a family.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Sample {
    /// One draw per coordinate of a product family.
    Vector(Vec<f64>),
    /// The `m` white-noise increments.
    Increments(Vec<f64>),
    /// Support points of the point process.
    Points(Vec<(f64, f64)>),
}

/// Validate that `params` lie in the family's parameter domain.
pub fn validate_params(family: &Family, params: &FamilyParams) -> Result<()> {
    family.validate()?;
    match family {
        Family::IsoNormal { .. } => {
            params.as_vector()?;
            Ok(())
        }
        Family::PoissonProduct => {
            let v = params.as_vector()?;
            v.check_sparse_invariant()?;
            if v.values().iter().any(|l| *l <= 0.0) {
                return Err(Error::ParameterDomain(
                    "poisson intensities must be > 0".into(),
                ));
            }
            Ok(())
        }
        Family::BernoulliProduct => {
            let v = params.as_vector()?;
            if v.values().iter().any(|t| *t <= 0.0 || *t >= 1.0) {
                return Err(Error::ParameterDomain(
                    "bernoulli parameters must lie in (0,1)".into(),
                ));
            }
            Ok(())
        }
        Family::ExponentialProduct => {
            let v = params.as_vector()?;
            if v.values().iter().any(|b| *b <= 0.0) {
                return Err(Error::ParameterDomain(
                    "exponential rates must be > 0".into(),
                ));
            }
            Ok(())
        }
        Family::GammaProduct { shapes } => {
            let v = params.as_vector()?;
            if v.dim() != shapes.len() {
                return Err(Error::DimensionMismatch(format!(
                    "{} rates for {} shapes",
                    v.dim(),
                    shapes.len()
                )));
            }
            if v.values().iter().any(|b| *b <= 0.0) {
                return Err(Error::ParameterDomain("gamma rates must be > 0".into()));
            }
            Ok(())
        }
        Family::GwnDiscrete { cells, .. } => {
            let f = params.as_function()?;
            if f.cells() != *cells {
                return Err(Error::DimensionMismatch(format!(
                    "function on {} cells for a model with {}",
                    f.cells(),
                    cells
                )));
            }
            if let FamilyParams::Vector(v) = params {
                v.check_sparse_invariant()?;
            }
            Ok(())
        }
        Family::PppBoundary { .. } => {
            params.as_function()?;
            Ok(())
        }
    }
}

/// Draw one observation.
pub fn sample(family: &Family, params: &FamilyParams, stream: RngStream) -> Result<Sample> {
    validate_params(family, params)?;
    let mut rng = stream.rng();
    match family {
        Family::IsoNormal { sigma } => {
            let v = params.as_vector()?;
            let normal = NormalDist::new(0.0, *sigma).unwrap();
            Ok(Sample::Vector(
                v.values()
                    .iter()
                    .map(|t| t + normal.sample(&mut rng))
                    .collect(),
            ))
        }
        Family::PoissonProduct => {
            let v = params.as_vector()?;
            let draws = v
                .values()
                .iter()
                .map(|&l| PoissonDist::new(l).unwrap().sample(&mut rng))
                .collect();
            Ok(Sample::Vector(draws))
        }
        Family::BernoulliProduct => {
            let v = params.as_vector()?;
            Ok(Sample::Vector(
                v.values()
                    .iter()
                    .map(|&t| if rng.gen_bool(t) { 1.0 } else { 0.0 })
                    .collect(),
            ))
        }
        Family::ExponentialProduct => {
            let v = params.as_vector()?;
            Ok(Sample::Vector(
                v.values()
                    .iter()
                    .map(|&b| rand_distr::Exp::new(b).unwrap().sample(&mut rng))
                    .collect(),
            ))
        }
        Family::GammaProduct { shapes } => {
            let v = params.as_vector()?;
            let draws = shapes
                .iter()
                .zip(v.values())
                .map(|(&a, &b)| GammaDist::new(a, 1.0 / b).unwrap().sample(&mut rng))
                .collect();
            Ok(Sample::Vector(draws))
        }
        Family::GwnDiscrete { cells, noise_level } => {
            let f = params.as_function()?;
            let m = *cells as f64;
            let sd = (1.0 / (noise_level * m)).sqrt();
            let noise = NormalDist::new(0.0, sd).unwrap();
            let incs = (0..*cells)
                .map(|i| f.cell_value(i) / m + noise.sample(&mut rng))
                .collect();
            Ok(Sample::Increments(incs))
        }
        Family::PppBoundary {
            intensity,
            height_cap,
        } => {
            let f = params.as_function()?;
            let mean_count = intensity * height_cap;
            let count = PoissonDist::new(mean_count).unwrap().sample(&mut rng) as usize;
            let m = f.cells();
            let mut pts = Vec::with_capacity(count);
            for _ in 0..count {
                let x: f64 = rng.gen_range(0.0..1.0);
                let cell = ((x * m as f64) as usize).min(m - 1);
                let base = f.cell_value(cell);
                let y = base + rng.gen_range(0.0..*height_cap);
                pts.push((x, y));
            }
            Ok(Sample::Points(pts))
        }
    }
}

/// Exact joint log-density of `sample` under `params`.
///
/// Defined for the product families and the discretized white noise model.
/// The point process has no reference density; use [`log_density_ratio`].
pub fn log_density(family: &Family, params: &FamilyParams, sample: &Sample) -> Result<f64> {
    validate_params(family, params)?;
    match (family, sample) {
        (Family::IsoNormal { sigma }, Sample::Vector(x)) => {
            let v = expect_dim(params.as_vector()?, x.len())?;
            let mut acc = 0.0;
            for (xi, ti) in x.iter().zip(v.values()) {
                let z = (xi - ti) / sigma;
                acc += -0.5 * z * z - sigma.ln() - 0.5 * (2.0 * std::f64::consts::PI).ln();
            }
            Ok(acc)
        }
        (Family::PoissonProduct, Sample::Vector(x)) => {
            let v = expect_dim(params.as_vector()?, x.len())?;
            let mut acc = 0.0;
            for (xi, li) in x.iter().zip(v.values()) {
                if *xi < 0.0 || xi.fract() != 0.0 {
                    return Err(Error::ParameterDomain(
                        "poisson outcomes are nonnegative integers".into(),
                    ));
                }
                acc += xi * li.ln() - li - ln_gamma(xi + 1.0);
            }
            Ok(acc)
        }
        (Family::BernoulliProduct, Sample::Vector(x)) => {
            let v = expect_dim(params.as_vector()?, x.len())?;
            let mut acc = 0.0;
            for (xi, ti) in x.iter().zip(v.values()) {
                acc += if *xi == 1.0 {
                    ti.ln()
                } else if *xi == 0.0 {
                    (1.0 - ti).ln()
                } else {
                    return Err(Error::ParameterDomain("bernoulli outcomes are 0/1".into()));
                };
            }
            Ok(acc)
        }
        (Family::ExponentialProduct, Sample::Vector(x)) => {
            let v = expect_dim(params.as_vector()?, x.len())?;
            let mut acc = 0.0;
            for (xi, bi) in x.iter().zip(v.values()) {
                if *xi < 0.0 {
                    return Ok(f64::NEG_INFINITY);
                }
                acc += bi.ln() - bi * xi;
            }
            Ok(acc)
        }
        (Family::GammaProduct { shapes }, Sample::Vector(x)) => {
            let v = expect_dim(params.as_vector()?, x.len())?;
            let mut acc = 0.0;
            for ((xi, bi), ai) in x.iter().zip(v.values()).zip(shapes) {
                if *xi <= 0.0 {
                    return Ok(f64::NEG_INFINITY);
                }
                acc += ai * bi.ln() - ln_gamma(*ai) + (ai - 1.0) * xi.ln() - bi * xi;
            }
            Ok(acc)
        }
        (Family::GwnDiscrete { cells, noise_level }, Sample::Increments(dy)) => {
            if dy.len() != *cells {
                return Err(Error::DimensionMismatch("increment count != cells".into()));
            }
            let f = params.as_function()?;
            let m = *cells as f64;
            let var = 1.0 / (noise_level * m);
            let mut acc = 0.0;
            for (i, d) in dy.iter().enumerate() {
                let z = d - f.cell_value(i) / m;
                acc += -0.5 * z * z / var - 0.5 * (2.0 * std::f64::consts::PI * var).ln();
            }
            Ok(acc)
        }
        (Family::PppBoundary { .. }, _) => Err(Error::Unsupported(
            "point process densities are only defined as ratios; use log_density_ratio".into(),
        )),
        _ => Err(Error::Arity("sample kind does not match family".into())),
    }
}

/// Log likelihood ratio `log dP_p/dP_q (sample)`.
///
/// For the point process this requires `q <= p` pointwise (domination); the
/// ratio is `exp(n ∫ (p - q))` times the indicator that no support point lies
/// below `p`, so the result is `-inf` when a point violates the boundary.
pub fn log_density_ratio(
    family: &Family,
    params_p: &FamilyParams,
    params_q: &FamilyParams,
    sample: &Sample,
) -> Result<f64> {
    match family {
        Family::PppBoundary { intensity, .. } => {
            let fp = params_p.as_function()?;
            let fq = params_q.as_function()?;
            if !fq.le_pointwise(fp) {
                return Err(Error::Domination(
                    "dP_f/dP_g needs g <= f pointwise in the boundary model".into(),
                ));
            }
            let pts = match sample {
                Sample::Points(p) => p,
                _ => return Err(Error::Arity("expected point-cloud sample".into())),
            };
            let m = fp.cells();
            for (x, y) in pts {
                let cell = ((x * m as f64) as usize).min(m - 1);
                if *y < fp.cell_value(cell) {
                    return Ok(f64::NEG_INFINITY);
                }
            }
            // g <= f, so the signed integral is ‖f − g‖₁
            Ok(intensity * fp.sub(fq)?.l1_norm())
        }
        _ => Ok(log_density(family, params_p, sample)? - log_density(family, params_q, sample)?),
    }
}

fn expect_dim(v: &ParamVector, d: usize) -> Result<&ParamVector> {
    if v.dim() != d {
        return Err(Error::DimensionMismatch(format!(
            "sample dim {} != param dim {}",
            d,
            v.dim()
        )));
    }
    Ok(v)
}

/// Fisher information of the one-dimensional families, used by the
/// Cramér–Rao convergence checks.
pub fn fisher_information(family: &Family, theta: f64) -> Result<f64> {
    match family {
        Family::IsoNormal { sigma } => Ok(1.0 / (sigma * sigma)),
        Family::PoissonProduct => Ok(1.0 / theta),
        Family::BernoulliProduct => Ok(1.0 / (theta * (1.0 - theta))),
        Family::ExponentialProduct => Ok(1.0 / (theta * theta)),
        _ => Err(Error::Unsupported(
            "fisher information implemented for 1-d product families".into(),
        )),
    }
}

/// A statistic `X = c + Σ_i b_i Z_i + Σ_i q_i Z_i²` of a product-family
/// observation, with closed-form mean and variance.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct PolyStatistic {
    pub constant: f64,
    pub linear: Vec<f64>,
    pub quadratic: Vec<f64>,
}

impl PolyStatistic {
    pub fn identity(dim: usize, coord: usize) -> Self {
        let mut linear = vec![0.0; dim];
        linear[coord] = 1.0;
        PolyStatistic {
            constant: 0.0,
            linear,
            quadratic: vec![0.0; dim],
        }
    }

    pub fn constant_stat(dim: usize, c: f64) -> Self {
        PolyStatistic {
            constant: c,
            linear: vec![0.0; dim],
            quadratic: vec![0.0; dim],
        }
    }

    pub fn sum_of_coords(dim: usize) -> Self {
        PolyStatistic {
            constant: 0.0,
            linear: vec![1.0; dim],
            quadratic: vec![0.0; dim],
        }
    }

    pub fn is_linear(&self) -> bool {
        self.quadratic.iter().all(|c| *c == 0.0)
    }

    pub fn evaluate(&self, sample: &Sample) -> Result<f64> {
        let x = match sample {
            Sample::Vector(v) => v,
            _ => {
                return Err(Error::Arity(
                    "polynomial statistics act on vector samples".into(),
                ))
            }
        };
        if x.len() != self.linear.len() {
            return Err(Error::DimensionMismatch(
                "statistic dim != sample dim".into(),
            ));
        }
        let mut acc = self.constant;
        for (i, xi) in x.iter().enumerate() {
            acc += self.linear[i] * xi + self.quadratic[i] * xi * xi;
        }
        Ok(acc)
    }

    /// Raw coordinate moments `E[Z^k]`, k = 1..4, for the product families.
    fn coord_moments(family: &Family, params: &ParamVector, i: usize) -> Result<[f64; 4]> {
        let t = params.values()[i];
        match family {
            Family::IsoNormal { sigma } => Ok(special::normal_raw_moments(t, *sigma)),
            Family::PoissonProduct => Ok(special::poisson_raw_moments(t)),
            Family::BernoulliProduct => Ok(special::bernoulli_raw_moments(t)),
            Family::ExponentialProduct => Ok(special::gamma_raw_moments(1.0, t)),
            Family::GammaProduct { shapes } => Ok(special::gamma_raw_moments(shapes[i], t)),
            _ => Err(Error::Unsupported(
                "closed moments exist for product families only".into(),
            )),
        }
    }

    /// Closed-form mean under `family(params)`.
    pub fn mean(&self, family: &Family, params: &FamilyParams) -> Result<f64> {
        let v = params.as_vector()?;
        let mut acc = self.constant;
        for i in 0..v.dim() {
            let m = Self::coord_moments(family, v, i)?;
            acc += self.linear[i] * m[0] + self.quadratic[i] * m[1];
        }
        Ok(acc)
    }

    /// Closed-form variance under `family(params)` (coordinates independent).
    pub fn variance(&self, family: &Family, params: &FamilyParams) -> Result<f64> {
        let v = params.as_vector()?;
        let mut acc = 0.0;
        for i in 0..v.dim() {
            let m = Self::coord_moments(family, v, i)?;
            let (b, q) = (self.linear[i], self.quadratic[i]);
            let var_z = m[1] - m[0] * m[0];
            let cov_z_z2 = m[2] - m[0] * m[1];
            let var_z2 = m[3] - m[1] * m[1];
            acc += b * b * var_z + 2.0 * b * q * cov_z_z2 + q * q * var_z2;
        }
        Ok(acc)
    }

    /// Closed-form `E|X - c|`; available for linear statistics of Gaussians.
    pub fn mad(&self, family: &Family, params: &FamilyParams, center: f64) -> Result<f64> {
        let sigma = match family {
            Family::IsoNormal { sigma } => *sigma,
            _ => {
                return Err(Error::Unsupported(
                    "closed-form MAD implemented for gaussian linear statistics".into(),
                ))
            }
        };
        if !self.is_linear() {
            return Err(Error::Unsupported(
                "closed-form MAD needs a linear statistic".into(),
            ));
        }
        let mu = self.mean(family, params)?;
        let sd = sigma * self.linear.iter().map(|b| b * b).sum::<f64>().sqrt();
        if sd == 0.0 {
            return Ok((mu - center).abs());
        }
        Ok(special::normal_mad(mu, sd, center))
    }
}
