//! Run configuration: TOML-shaped, flat sections, unknown keys rejected.

use bvbounds::{Error, EstimatorSpec, Family, FamilyParams, GridFunction, Result};
use serde::Deserialize;

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RootConfig {
    pub family: Option<FamilyConfig>,
    pub params: Option<ParamsConfig>,
    pub statistic: Option<StatisticConfig>,
    pub estimator: Option<EstimatorConfig>,
    pub bound: Option<BoundConfig>,
    pub scenario: Option<ScenarioConfig>,
    pub run: Option<RunSection>,
}

impl RootConfig {
    pub fn parse(text: &str) -> Result<Self> {
        toml::from_str(text).map_err(|e| Error::Config(format!("{}", e)))
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilyConfig {
    pub kind: String,
    pub sigma: Option<f64>,
    pub shapes: Option<Vec<f64>>,
    pub cells: Option<usize>,
    pub noise_level: Option<f64>,
    pub intensity: Option<f64>,
    pub height_cap: Option<f64>,
}

impl FamilyConfig {
    pub fn to_family(&self) -> Result<Family> {
        let fam = match self.kind.as_str() {
            "iso-normal" => Family::IsoNormal {
                sigma: self.sigma.unwrap_or(1.0),
            },
            "poisson" => Family::PoissonProduct,
            "bernoulli" => Family::BernoulliProduct,
            "exponential" => Family::ExponentialProduct,
            "gamma" => Family::GammaProduct {
                shapes: self
                    .shapes
                    .clone()
                    .ok_or_else(|| Error::Config("gamma family needs shapes".into()))?,
            },
            "gwn" => Family::GwnDiscrete {
                cells: self
                    .cells
                    .ok_or_else(|| Error::Config("gwn needs cells".into()))?,
                noise_level: self
                    .noise_level
                    .ok_or_else(|| Error::Config("gwn needs noise_level".into()))?,
            },
            "ppp" => Family::PppBoundary {
                intensity: self
                    .intensity
                    .ok_or_else(|| Error::Config("ppp needs intensity".into()))?,
                height_cap: self
                    .height_cap
                    .ok_or_else(|| Error::Config("ppp needs height_cap".into()))?,
            },
            other => return Err(Error::Config(format!("unknown family kind '{}'", other))),
        };
        fam.validate()?;
        Ok(fam)
    }
}

/// Parameter vectors inline or grid functions from CSV files.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ParamsConfig {
    pub p: Option<Vec<f64>>,
    pub q: Option<Vec<f64>>,
    /// Additional parameter vectors (multi-point bounds); `p` is the base.
    pub list: Option<Vec<Vec<f64>>>,
    pub p_csv: Option<String>,
    pub q_csv: Option<String>,
}

impl ParamsConfig {
    pub fn param_p(&self) -> Result<FamilyParams> {
        load_param(&self.p, &self.p_csv, "p")
    }

    pub fn param_q(&self) -> Result<FamilyParams> {
        load_param(&self.q, &self.q_csv, "q")
    }
}

fn load_param(vec: &Option<Vec<f64>>, csv: &Option<String>, name: &str) -> Result<FamilyParams> {
    match (vec, csv) {
        (Some(v), None) => Ok(FamilyParams::vector(v.clone())),
        (None, Some(path)) => {
            let text = std::fs::read_to_string(path)
                .map_err(|e| Error::Config(format!("reading {}: {}", path, e)))?;
            Ok(FamilyParams::Function(GridFunction::from_csv(&text)?))
        }
        _ => Err(Error::Config(format!(
            "params.{} must be a vector or a csv path",
            name
        ))),
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct StatisticConfig {
    pub kind: Option<String>,
    pub constant: Option<f64>,
    pub linear: Option<Vec<f64>>,
    pub quadratic: Option<Vec<f64>>,
}

impl StatisticConfig {
    pub fn to_statistic(&self, dim: usize) -> Result<bvbounds::Statistic> {
        match self.kind.as_deref() {
            Some("ppp-min") => Ok(bvbounds::Statistic::PppMin),
            None | Some("poly") => {
                let linear = self.linear.clone().unwrap_or_else(|| vec![0.0; dim]);
                let d = linear.len();
                Ok(bvbounds::Statistic::Poly(bvbounds::models::PolyStatistic {
                    constant: self.constant.unwrap_or(0.0),
                    linear,
                    quadratic: self.quadratic.clone().unwrap_or_else(|| vec![0.0; d]),
                }))
            }
            Some(other) => Err(Error::Config(format!("unknown statistic kind '{}'", other))),
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EstimatorConfig {
    pub kind: String,
    pub level: Option<f64>,
    pub bandwidth: Option<f64>,
    pub center: Option<f64>,
    pub factor: Option<f64>,
    pub bias_corrected: Option<bool>,
    pub rotations: Option<usize>,
    pub inner: Option<String>,
}

impl EstimatorConfig {
    pub fn to_spec(&self, dim: usize, seed: u64) -> Result<EstimatorSpec> {
        let base = |kind: &str| -> Result<EstimatorSpec> {
            Ok(match kind {
                "soft-threshold" => EstimatorSpec::SoftThreshold {
                    level: self
                        .level
                        .ok_or_else(|| Error::Config("needs level".into()))?,
                },
                "quad-functional-threshold" => EstimatorSpec::QuadFunctionalThreshold {
                    level: self
                        .level
                        .ok_or_else(|| Error::Config("needs level".into()))?,
                },
                "james-stein" => EstimatorSpec::JamesStein,
                "linear-shrinkage" => EstimatorSpec::LinearShrinkage {
                    factor: self
                        .factor
                        .ok_or_else(|| Error::Config("needs factor".into()))?,
                },
                "unbiased-quadratic" => EstimatorSpec::UnbiasedQuadratic,
                "ppp-min" => EstimatorSpec::PppMin {
                    bias_corrected: self.bias_corrected.unwrap_or(false),
                },
                "kernel-smoother" => EstimatorSpec::KernelSmoother {
                    bandwidth: self
                        .bandwidth
                        .ok_or_else(|| Error::Config("needs bandwidth".into()))?,
                    center: self.center.unwrap_or(0.5),
                },
                other => return Err(Error::Config(format!("unknown estimator kind '{}'", other))),
            })
        };
        if self.kind == "symmetrized" {
            let inner = base(
                self.inner
                    .as_deref()
                    .ok_or_else(|| Error::Config("symmetrized needs inner".into()))?,
            )?;
            return bvbounds::estimators::spherical_symmetrize(
                inner,
                self.rotations.unwrap_or(64),
                dim,
                bvbounds::RngStream::new(seed).substream(0x57),
            );
        }
        base(&self.kind)
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoundConfig {
    /// Subset of {two-point, path-limit, multi-point-chi2, multi-point-hellinger, mad}.
    pub inequalities: Vec<String>,
    pub path_steps: Option<usize>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScenarioConfig {
    pub id: String,
    pub n: Option<f64>,
    pub s: Option<u64>,
    pub gamma: Option<f64>,
    pub r: Option<f64>,
    pub beta: Option<f64>,
    pub c: Option<f64>,
    pub m: Option<usize>,
    pub p: Option<usize>,
    pub cells: Option<usize>,
    pub variance_budget: Option<f64>,
    pub a_ladder: Option<Vec<f64>>,
    pub design: Option<String>,
    pub reps: Option<usize>,
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunSection {
    pub reps: Option<usize>,
    pub tol: Option<f64>,
    pub threads: Option<usize>,
    pub out_dir: Option<String>,
    pub format: Option<String>,
}
