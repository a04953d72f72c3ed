//! End-to-end case studies: constants, lower-bound instances, estimator
//! measurements and sandwich verdicts, emitted as serializable results.
//!
//! Constants blocks are pure functions of the configuration; measurement
//! blocks are seeded Monte Carlo and carry standard errors. Rerunning a
//! scenario with the same configuration and seed reproduces the output
//! byte for byte.

use crate::bounds::{self, BoundReport, StatMoments, Statistic};
use crate::combinatorics::binomial;
use crate::error::{Error, Result};
use crate::estimators::{
    self, exact_quad_threshold_moments, exact_soft_threshold_moments, mc_function_moments,
    mc_moments, quad_threshold_centering, quad_threshold_var0_envelope,
    soft_threshold_var0_envelope, EstimatorSpec, FunctionEstimator, MomentEstimate,
    ProjectionBasis,
};
use crate::grid::GridFunction;
use crate::infomatrices::sparse_chi2_row_sum;
use crate::kernels::KernelDictionary;
use crate::models::{log_density_ratio, sample, Family, FamilyParams, ParamVector};
use crate::rng::RngStream;
use num_traits::ToPrimitive;
use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

/// A named scalar constant with its one-sidedness label.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ConstantEntry {
    pub name: String,
    pub value: f64,
    /// `"lower-bound-on-sup"`, `"upper-bound-on-inf"`, or `"exact"`.
    pub one_sided: String,
}

/// A pass/fail verdict tied to a computed comparison.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct Verdict {
    pub name: String,
    pub pass: bool,
    pub detail: String,
}

/// A labeled Monte Carlo measurement.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct LabeledMoments {
    pub name: String,
    pub moments: MomentEstimate,
}

/// Structured record of one scenario run.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct ScenarioResult {
    pub id: String,
    pub schema_version: u32,
    pub seed: u64,
    pub config: Vec<(String, f64)>,
    pub constants: Vec<ConstantEntry>,
    pub bounds: Vec<BoundReport>,
    pub measurements: Vec<LabeledMoments>,
    pub verdicts: Vec<Verdict>,
}

pub const SCHEMA_VERSION: u32 = 1;

impl ScenarioResult {
    fn new(id: &str, seed: u64) -> Self {
        ScenarioResult {
            id: id.to_string(),
            schema_version: SCHEMA_VERSION,
            seed,
            config: Vec::new(),
            constants: Vec::new(),
            bounds: Vec::new(),
            measurements: Vec::new(),
            verdicts: Vec::new(),
        }
    }

    fn cfg(&mut self, name: &str, v: f64) {
        self.config.push((name.to_string(), v));
    }

    fn constant(&mut self, name: &str, value: f64, one_sided: &str) {
        self.constants.push(ConstantEntry {
            name: name.to_string(),
            value,
            one_sided: one_sided.to_string(),
        });
    }

    fn verdict(&mut self, name: &str, pass: bool, detail: String) {
        self.verdicts.push(Verdict {
            name: name.to_string(),
            pass,
            detail,
        });
    }

    fn measure(&mut self, name: &str, m: MomentEstimate) {
        self.measurements.push(LabeledMoments {
            name: name.to_string(),
            moments: m,
        });
    }

    pub fn all_pass(&self) -> bool {
        self.verdicts.iter().all(|v| v.pass) && self.bounds.iter().all(|b| b.holds)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("scenario serialization")
    }

    /// Flat CSV tables: (name, csv text).
    pub fn to_csv_tables(&self) -> Vec<(String, String)> {
        let mut consts = String::from("name,value,one_sided\n");
        for c in &self.constants {
            consts.push_str(&format!("{},{},{}\n", c.name, c.value, c.one_sided));
        }
        let mut bnds = String::from("id,lhs,rhs,slack,holds,tolerance,vacuous\n");
        for b in &self.bounds {
            bnds.push_str(&format!(
                "{},{},{},{},{},{},{}\n",
                b.id, b.lhs, b.rhs, b.slack, b.holds, b.tolerance, b.vacuous
            ));
        }
        let mut verd = String::from("name,pass,detail\n");
        for v in &self.verdicts {
            verd.push_str(&format!("{},{},\"{}\"\n", v.name, v.pass, v.detail));
        }
        vec![
            ("constants".to_string(), consts),
            ("bounds".to_string(), bnds),
            ("verdicts".to_string(), verd),
        ]
    }
}

// ---------------------------------------------------------------------------
// pointwise white noise
// ---------------------------------------------------------------------------

/// Pointwise trade-off constants and kernel-smoother verification in the
/// white-noise model.
pub fn run_pointwise_gwn(
    r: f64,
    beta: f64,
    c_const: f64,
    n: f64,
    m: usize,
    dict: &KernelDictionary,
    seed: u64,
) -> Result<ScenarioResult> {
    if ![0.5, 1.0, 2.0].contains(&beta) {
        return Err(Error::ParameterDomain(
            "supported smoothness: beta in {0.5, 1, 2}".into(),
        ));
    }
    let mut out = ScenarioResult::new("pointwise-gwn", seed);
    out.cfg("R", r);
    out.cfg("beta", beta);
    out.cfg("C", c_const);
    out.cfg("n", n);
    out.cfg("m", m as f64);

    let gamma = dict.gamma(r, beta)?;
    out.constant("gamma", gamma, "lower-bound-on-sup");
    out.constant("gamma_low", dict.gamma_low(r, beta)?, "lower-bound-on-sup");
    for (i, a_frac) in [0.0, 0.25, 0.5, 0.75].iter().enumerate() {
        let a = a_frac * r;
        out.constant(
            &format!("gamma_bar[a={:.3}]", a),
            dict.gamma_bar(r, beta, c_const, a)?,
            "lower-bound-on-sup",
        );
        let _ = i;
    }
    out.verdict(
        "gamma-positivity",
        (gamma > 0.0) == (r > 1.0),
        format!("gamma = {} at R = {}", gamma, r),
    );

    // kernel smoother at a bandwidth grid
    let x0 = 0.5;
    let fam = Family::GwnDiscrete {
        cells: m,
        noise_level: n,
    };
    for &h in &[0.02, 0.05, 0.1] {
        // discrete variance is exact: count/(4h²nm)
        let count = (0..m)
            .filter(|c| ((*c as f64 + 0.5) / m as f64 - x0).abs() <= h)
            .count();
        let var_disc = count as f64 / (4.0 * h * h * n * m as f64);
        let var_cont = 1.0 / (2.0 * n * h);
        out.constant(&format!("smoother_var[h={}]", h), var_disc, "exact");
        out.verdict(
            &format!("smoother-variance-continuum[h={}]", h),
            (var_disc - var_cont).abs() / var_cont < 0.02,
            format!("discrete {} vs continuum {}", var_disc, var_cont),
        );

        // worst case bias over the dictionary test functions t^β K((x−x₀)/t)
        let mut worst_product = 0.0f64;
        for e in &dict.entries {
            if (e.k0 - 1.0).abs() > 1e-12 || e.holder_norm(beta)? > r {
                continue;
            }
            for i in 1..=40 {
                let t = 0.5 * i as f64 / 40.0;
                let f = GridFunction::from_fn(m, |x| t.powf(beta) * e.shape.eval((x - x0) / t))?;
                if f.holder_norm(beta)? > r {
                    continue;
                }
                // deterministic smoother mean: (2h)^{-1} Σ_sel f_c/m
                let mean: f64 = (0..m)
                    .filter(|c| ((*c as f64 + 0.5) / m as f64 - x0).abs() <= h)
                    .map(|c| f.cell_value(c) / m as f64)
                    .sum::<f64>()
                    / (2.0 * h);
                let bias = (mean - f.cell_value(m / 2)).abs();
                worst_product = worst_product.max(bias.powf(1.0 / beta) * var_disc);
            }
        }
        out.constant(
            &format!("smoother_product[h={}]", h),
            worst_product,
            "exact",
        );
        out.verdict(
            &format!("tradeoff-product[h={}]", h),
            worst_product >= gamma / n,
            format!(
                "sup bias^(1/beta) * var = {} vs gamma/n = {}",
                worst_product,
                gamma / n
            ),
        );
    }

    // antisymmetric truth around x₀ has vanishing bias up to the half-cell error
    let slope = (r / 2.0).min(1.0);
    let f_anti = GridFunction::from_fn(m, |x| slope * (x - x0))?;
    let h = 0.1;
    let mean: f64 = (0..m)
        .filter(|c| ((*c as f64 + 0.5) / m as f64 - x0).abs() <= h)
        .map(|c| f_anti.cell_value(c) / m as f64)
        .sum::<f64>()
        / (2.0 * h);
    let bias = mean - f_anti.cell_value(m / 2);
    let quad_err = slope / (2.0 * m as f64);
    out.verdict(
        "antisymmetric-bias-vanishes",
        bias.abs() <= 1.05 * quad_err + 1e-12,
        format!("bias {} vs quadrature error {}", bias, quad_err),
    );

    // a small Monte Carlo cross-check of the smoother variance
    let spec = EstimatorSpec::KernelSmoother {
        bandwidth: 0.05,
        center: x0,
    };
    let zero = FamilyParams::Function(GridFunction::constant(m, 0.0)?);
    let mm = mc_moments(&spec, &fam, &zero, 40_000, RngStream::new(seed))?;
    let count = (0..m)
        .filter(|c| ((*c as f64 + 0.5) / m as f64 - x0).abs() <= 0.05)
        .count();
    let var_disc = count as f64 / (4.0 * 0.05 * 0.05 * n * m as f64);
    out.verdict(
        "smoother-variance-mc",
        (mm.variance_sum - var_disc).abs() < 4.0 * mm.variance_sum_se,
        format!("mc {} vs exact {}", mm.variance_sum, var_disc),
    );
    out.measure("kernel-smoother[h=0.05]", mm);
    Ok(out)
}

// ---------------------------------------------------------------------------
// sparse sequence model
// ---------------------------------------------------------------------------

/// The soft-threshold sandwich quantities at one `(n, s, γ)`, all exact.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SandwichReport {
    pub n: u64,
    pub s: u64,
    pub gamma: f64,
    pub threshold: f64,
    /// Exact `Σ Var₀` of the soft-threshold estimator.
    pub var0_sum: f64,
    /// Analytic envelope `2√2/(√π T³) e^{−T²/2}` summed over coordinates.
    pub var0_envelope: f64,
    /// Deterministic bias-norm bound `γ s log(n/s²)`.
    pub bias_bound: f64,
    /// Exact bias norm² at the worst s-sparse design with entries `√(α log(n/s²))`.
    pub bias_norm_sq: f64,
    /// Exact `Σ Var_θ` at that design and its `4s + envelope` bound.
    pub var_theta_sum: f64,
    pub var_theta_bound: f64,
    /// Functional estimator: exact bias and its deterministic bound (needs `γ log ≥ 2`).
    pub functional_bias: f64,
    pub functional_bias_bound: f64,
    /// Functional `Var₀` and its analytic envelope.
    pub functional_var0: f64,
    pub functional_var0_envelope: f64,
    pub all_hold: bool,
}

/// Exact soft-threshold sandwich at `(n, s, γ)` with `γ log(n/s²) ≥ 2`.
pub fn sparse_sandwich(n: u64, s: u64, gamma: f64) -> Result<SandwichReport> {
    if s < 1 || 4 * s * s > n {
        return Err(Error::ParameterDomain("need 1 <= s <= sqrt(n)/2".into()));
    }
    let log_ratio = ((n as f64) / ((s * s) as f64)).ln();
    if gamma * log_ratio < 2.0 {
        return Err(Error::ParameterDomain("need gamma log(n/s²) >= 2".into()));
    }
    let t = (gamma * log_ratio).sqrt();
    let (_, var0) = exact_soft_threshold_moments(t, 0.0);
    let var0_sum = n as f64 * var0;
    let var0_envelope = n as f64 * soft_threshold_var0_envelope(t);

    // worst-case design: s active coordinates at √(α log(n/s²))
    let alpha = 4.0 * gamma + 1.0 / log_ratio;
    let active = (alpha * log_ratio).sqrt();
    let (bias_active, var_active) = exact_soft_threshold_moments(t, active);
    let bias_norm_sq = s as f64 * bias_active * bias_active;
    let bias_bound = gamma * s as f64 * log_ratio;
    let var_theta_sum = s as f64 * var_active + (n - s) as f64 * var0;
    let var_theta_bound = 4.0 * s as f64 + var0_envelope;

    // functional threshold at u = γ log(n/s²)
    let u = gamma * log_ratio;
    let c_u = quad_threshold_centering(u);
    let (fmean, _) = exact_quad_threshold_moments(u, active);
    let functional_bias = s as f64 * (fmean - c_u - active * active);
    let functional_bias_bound = gamma * s as f64 * log_ratio;
    let (_, fvar0) = exact_quad_threshold_moments(u, 0.0);
    let functional_var0 = n as f64 * fvar0;
    let functional_var0_envelope = n as f64 * quad_threshold_var0_envelope(u);

    let tol = 1e-8;
    let all_hold = var0_sum <= var0_envelope * (1.0 + tol)
        && bias_norm_sq <= bias_bound * (1.0 + tol)
        && var_theta_sum <= var_theta_bound * (1.0 + tol)
        && functional_bias.abs() <= functional_bias_bound * (1.0 + tol)
        && functional_var0 <= functional_var0_envelope * (1.0 + tol);
    Ok(SandwichReport {
        n,
        s,
        gamma,
        threshold: t,
        var0_sum,
        var0_envelope,
        bias_bound,
        bias_norm_sq,
        var_theta_sum,
        var_theta_bound,
        functional_bias,
        functional_bias_bound,
        functional_var0,
        functional_var0_envelope,
        all_hold,
    })
}

/// Sparse-sequence scenario: the variance lower-bound constant, the exact sandwich,
/// the row-sum inequality instance, and Monte Carlo cross-checks.
pub fn run_sparse_sequence(
    n: u64,
    s: u64,
    gamma: f64,
    reps: usize,
    seed: u64,
) -> Result<ScenarioResult> {
    if s < 1 || 4 * s * s > n {
        return Err(Error::ParameterDomain("need 1 <= s <= sqrt(n)/2".into()));
    }
    let log_ratio = ((n as f64) / ((s * s) as f64)).ln();
    let alpha = 4.0 * gamma + 1.0 / log_ratio;
    if alpha > 0.99 {
        return Err(Error::ParameterDomain(
            "need 4γ + 1/log(n/s²) <= 0.99".into(),
        ));
    }
    let mut out = ScenarioResult::new("sparse-sequence", seed);
    out.cfg("n", n as f64);
    out.cfg("s", s as f64);
    out.cfg("gamma", gamma);
    out.cfg("reps", reps as f64);

    let lb_const = (1.0 - 0.5f64.powf(0.01)) / (25.0 * std::f64::consts::E * log_ratio)
        * n as f64
        * ((s * s) as f64 / n as f64).powf(4.0 * gamma);
    out.constant("sparse-variance-lower-bound", lb_const, "exact");
    out.constant("alpha", alpha, "exact");

    // exact sandwich when γ log(n/s²) ≥ 2, otherwise just the variance parts
    let t = (gamma * log_ratio).sqrt();
    let active = (alpha * log_ratio).sqrt();
    if gamma * log_ratio >= 2.0 {
        let sand = sparse_sandwich(n, s, gamma)?;
        out.constant("sandwich.var0_sum", sand.var0_sum, "exact");
        out.constant("sandwich.var0_envelope", sand.var0_envelope, "exact");
        out.verdict("sandwich-all-hold", sand.all_hold, format!("{:?}", sand));
    } else {
        let (_, var0) = exact_soft_threshold_moments(t, 0.0);
        let v0 = n as f64 * var0;
        let env = n as f64 * soft_threshold_var0_envelope(t);
        out.constant("sandwich.var0_sum", v0, "exact");
        out.constant("sandwich.var0_envelope", env, "exact");
        out.verdict("var0-envelope", v0 <= env, format!("{} <= {}", v0, env));
    }

    // row-sum inequality instance with exact moments
    let row = sparse_chi2_row_sum(n, s, alpha)?;
    out.constant("chi2-row-sum", row.value, "exact");
    out.verdict(
        "b-table-total",
        row.total_consistent,
        "Σ b(n,s,r) = C(n-1,s-1)".into(),
    );
    let m_count = binomial(n - 1, s - 1).to_f64().unwrap_or(f64::INFINITY);
    let (mean_active, _) = exact_soft_threshold_moments(t, active);
    let shifted_mean = mean_active + active; // E_t[θ̂_i], bias + truth
    let (_, var0) = exact_soft_threshold_moments(t, 0.0);
    let lhs = m_count * shifted_mean * shifted_mean;
    let rhs = row.value * var0;
    out.verdict(
        "row-sum-bound-instance",
        lhs <= rhs * (1.0 + 1e-8),
        format!("M·(ΔE)² = {} <= ‖χ²‖·Var₀ = {}", lhs, rhs),
    );

    // Monte Carlo cross-check of the exact moments on a subsampled design set
    let supports = sample_supports(n as usize, s as usize, 3, RngStream::new(seed).substream(1));
    let fam = Family::IsoNormal { sigma: 1.0 };
    for (i, sup) in supports.iter().enumerate() {
        let theta = ParamVector::sparse(n as usize, sup, active)?;
        let spec = EstimatorSpec::SoftThreshold { level: t };
        let mm = mc_moments(
            &spec,
            &fam,
            &FamilyParams::Vector(theta),
            reps,
            RngStream::new(seed).substream(10 + i as u64),
        )?;
        let exact_varsum = {
            let (_, va) = exact_soft_threshold_moments(t, active);
            s as f64 * va + (n - s) as f64 * var0
        };
        out.verdict(
            &format!("mc-variance-matches-exact[{}]", i),
            (mm.variance_sum - exact_varsum).abs() < 4.0 * mm.variance_sum_se,
            format!("mc {} vs exact {}", mm.variance_sum, exact_varsum),
        );
        out.measure(&format!("soft-threshold[design {}]", i), mm);
    }
    Ok(out)
}

/// Seeded uniform support subsampling (used when `C(n,s)` explodes).
fn sample_supports(n: usize, s: usize, count: usize, stream: RngStream) -> Vec<Vec<usize>> {
    let mut rng = stream.rng();
    let mut out = Vec::with_capacity(count);
    let mut idx: Vec<usize> = (0..n).collect();
    for _ in 0..count {
        idx.shuffle(&mut rng);
        let mut sup: Vec<usize> = idx[..s].to_vec();
        sup.sort_unstable();
        out.push(sup);
    }
    out
}

// ---------------------------------------------------------------------------
// quadratic functional
// ---------------------------------------------------------------------------

/// Quadratic-functional scenario: the variance lower-bound constant, exact
/// bias-bound and variance-envelope checks, and the unbiased estimator in the
/// dense regime.
pub fn run_quadratic_functional(
    n: u64,
    s: u64,
    gamma: f64,
    reps: usize,
    seed: u64,
) -> Result<ScenarioResult> {
    if s < 1 || 4 * s * s > n {
        return Err(Error::ParameterDomain("need 1 <= s <= sqrt(n)/2".into()));
    }
    let log_ratio = ((n as f64) / ((s * s) as f64)).ln();
    if gamma * log_ratio < 2.0 {
        return Err(Error::ParameterDomain("need gamma log(n/s²) >= 2".into()));
    }
    let mut out = ScenarioResult::new("quadratic-functional", seed);
    out.cfg("n", n as f64);
    out.cfg("s", s as f64);
    out.cfg("gamma", gamma);
    out.cfg("reps", reps as f64);

    let radius_sq = 2.0 * s as f64 * (1.0 + (n as f64).sqrt() / s as f64).ln();
    out.constant("parameter-radius-sq", radius_sq, "exact");

    // lower-bound block (the hypothesis design needs 2γ' + 1/log ≤ 0.99)
    let gamma_lb = gamma.min(0.999 * (0.99 - 1.0 / log_ratio) / 2.0);
    let lb_const = (1.0 - 0.5f64.powf(0.01)) / std::f64::consts::E
        * n as f64
        * ((s * s) as f64 / n as f64).powf(2.0 * gamma_lb);
    out.constant("lower-bound-gamma", gamma_lb, "exact");
    out.constant("functional-variance-lower-bound", lb_const, "exact");
    let alpha_p = 2.0 * gamma_lb + 1.0 / log_ratio;
    let lb_entry = (alpha_p * log_ratio).sqrt();
    let design_norm_sq = s as f64 * alpha_p * log_ratio;
    out.verdict(
        "design-in-parameter-space",
        design_norm_sq <= radius_sq + 1e-12,
        format!("‖θ‖² = {} vs radius² = {}", design_norm_sq, radius_sq),
    );

    // upper-bound block: exact deterministic bias bound, sup over designs
    let u = gamma * log_ratio;
    let c_u = quad_threshold_centering(u);
    let bias_bound = gamma * s as f64 * log_ratio;
    let mut worst_bias = 0.0f64;
    for active in [0.5, 1.0, u.sqrt(), 2.0 * u.sqrt(), lb_entry, 5.0] {
        let (fmean, _) = exact_quad_threshold_moments(u, active);
        let bias = s as f64 * (fmean - c_u - active * active);
        worst_bias = worst_bias.max(bias.abs());
    }
    out.constant("functional-worst-bias", worst_bias, "exact");
    out.verdict(
        "functional-bias-bound",
        worst_bias <= bias_bound * (1.0 + 1e-8),
        format!("sup |bias| = {} <= {}", worst_bias, bias_bound),
    );

    // exact variance envelope at zero signal
    let (_, fvar0) = exact_quad_threshold_moments(u, 0.0);
    let var0 = n as f64 * fvar0;
    let env = n as f64 * quad_threshold_var0_envelope(u);
    out.constant("functional-var0", var0, "exact");
    out.constant("functional-var0-envelope", env, "exact");
    out.verdict(
        "functional-variance-envelope",
        var0 <= env * (1.0 + 1e-8),
        format!("{} <= {}", var0, env),
    );

    // sparse regime: thresholded functional estimator is unbiased at θ = 0
    let fam = Family::IsoNormal { sigma: 1.0 };
    let spec = EstimatorSpec::QuadFunctionalThreshold { level: u };
    let zero = FamilyParams::vector(vec![0.0; n as usize]);
    let m0 = mc_moments(&spec, &fam, &zero, reps, RngStream::new(seed))?;
    out.verdict(
        "functional-threshold-unbiased-at-zero",
        m0.bias[0].abs() < 3.0 * m0.bias_ses[0],
        format!("bias {} (se {})", m0.bias[0], m0.bias_ses[0]),
    );
    out.verdict(
        "functional-var0-mc-matches-exact",
        (m0.variance_sum - var0).abs() < 4.0 * m0.variance_sum_se,
        format!("mc {} vs exact {}", m0.variance_sum, var0),
    );
    out.measure("functional-threshold[theta=0]", m0);

    // dense regime side: unbiased quadratic estimator, Var = 2(n + 2‖θ‖²)
    let dense_dim = 10usize;
    for (name, theta) in [
        ("theta=0", vec![0.0; dense_dim]),
        ("theta=e1", {
            let mut v = vec![0.0; dense_dim];
            v[0] = 1.0;
            v
        }),
    ] {
        let norm_sq: f64 = theta.iter().map(|v| v * v).sum();
        let mu = mc_moments(
            &EstimatorSpec::UnbiasedQuadratic,
            &fam,
            &FamilyParams::vector(theta),
            reps,
            RngStream::new(seed).substream(7),
        )?;
        let expected = 2.0 * (dense_dim as f64 + 2.0 * norm_sq);
        out.verdict(
            &format!("unbiased-quadratic-bias[{}]", name),
            mu.bias[0].abs() < 3.0 * mu.bias_ses[0],
            format!("bias {} (se {})", mu.bias[0], mu.bias_ses[0]),
        );
        out.verdict(
            &format!("unbiased-quadratic-variance[{}]", name),
            (mu.variance_sum - expected).abs() < 4.0 * mu.variance_sum_se,
            format!("mc {} vs 2(n+2‖θ‖²) = {}", mu.variance_sum, expected),
        );
        out.measure(&format!("unbiased-quadratic[{}]", name), mu);
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// support boundary
// ---------------------------------------------------------------------------

/// Boundary-model scenario: likelihood-ratio moment identities, two-point
/// bound instances at `Δ ≍ 1/n`, and the min-statistic moments.
pub fn run_boundary(n: f64, beta: f64, r: f64, reps: usize, seed: u64) -> Result<ScenarioResult> {
    if !(0.0..1.0).contains(&beta) || beta == 0.0 {
        return Err(Error::ParameterDomain(
            "boundary smoothness needs 0 < beta < 1".into(),
        ));
    }
    let mut out = ScenarioResult::new("boundary", seed);
    out.cfg("n", n);
    out.cfg("beta", beta);
    out.cfg("R", r);
    out.cfg("reps", reps as f64);

    let cells = 32usize;
    let height = 10.0 / n + 1.0;
    let fam = Family::PppBoundary {
        intensity: n,
        height_cap: height,
    };
    let theta = 0.2;
    let g = FamilyParams::Function(GridFunction::constant(cells, theta)?);
    // a β-Hölder bump above g
    let amp = (0.5 * r).min(1.0) * 0.2;
    let f_bump = GridFunction::from_fn(cells, |x| {
        theta + amp * (1.0 - (2.0 * (x - 0.5)).abs()).max(0.0).powf(beta)
    })?;
    let f = FamilyParams::Function(f_bump.clone());
    let l1 = f_bump.sub(g.as_function()?)?.l1_norm();

    // E_g[(dP_f/dP_g)^α] = exp(n ‖f−g‖₁ (α−1)) for α ∈ {1/2, 2}
    let stream = RngStream::new(seed);
    for (ai, alpha) in [0.5f64, 2.0].iter().enumerate() {
        let expected = (n * l1 * (alpha - 1.0)).exp();
        let batches = 32usize;
        let per = (reps / batches).max(1);
        let mut batch_means = Vec::with_capacity(batches);
        for b in 0..batches {
            let bs = stream.substream(100 + (ai * batches + b) as u64);
            let mut acc = 0.0;
            for rp in 0..per {
                let x = sample(&fam, &g, bs.substream(rp as u64))?;
                acc += (alpha * log_density_ratio(&fam, &f, &g, &x)?).exp();
            }
            batch_means.push(acc / per as f64);
        }
        let mean = batch_means.iter().sum::<f64>() / batches as f64;
        let var = batch_means
            .iter()
            .map(|v| (v - mean) * (v - mean))
            .sum::<f64>()
            / (batches as f64 - 1.0);
        let se = (var / batches as f64).sqrt();
        out.verdict(
            &format!("ratio-moment-identity[alpha={}]", alpha),
            (mean - expected).abs() < 3.0 * se,
            format!(
                "mc {} vs exp(n‖f−g‖₁(α−1)) = {} (se {})",
                mean, expected, se
            ),
        );
    }

    // two-point bounds for X = min Y_i at constant boundaries θ, θ+Δ
    for (tag, delta) in [("delta=1/n", 1.0 / n), ("delta=10/n", 10.0 / n)] {
        let lo = FamilyParams::Function(GridFunction::constant(cells, theta)?);
        let hi = FamilyParams::Function(GridFunction::constant(cells, theta + delta)?);
        let div = bounds::pair_divergences(&fam, &hi, &lo)?;
        let stat = Statistic::PppMin;
        let moments = StatMoments::closed_form(
            vec![stat.mean(&fam, &hi)?, stat.mean(&fam, &lo)?],
            vec![stat.variance(&fam, &hi)?, stat.variance(&fam, &lo)?],
        )?;
        let reports = bounds::two_point_bounds(&div, &moments)?;
        for rep in &reports {
            if !rep.vacuous {
                out.bounds.push(rep.clone());
            }
        }
        // χ² instance Δ² ≤ (e^{nΔ} − 1)/n²
        let ratio = delta * delta * n * n / (n * delta).exp_m1();
        out.constant(&format!("chi2-instance-ratio[{}]", tag), ratio, "exact");
    }
    let r1 = out
        .constants
        .iter()
        .find(|c| c.name.contains("delta=1/n"))
        .unwrap()
        .value;
    let r10 = out
        .constants
        .iter()
        .find(|c| c.name.contains("delta=10/n"))
        .unwrap()
        .value;
    out.verdict(
        "chi2-ratio-theta-order-one-at-1-over-n",
        (0.3..=1.0).contains(&r1) && (r1 - 1.0 / 1f64.exp_m1()).abs() < 1e-9,
        format!("ratio {} (= 1/(e−1) ≈ 0.582)", r1),
    );
    out.verdict(
        "chi2-ratio-degrades-at-10-over-n",
        r10 < 0.1 * r1,
        format!("ratio {} << {}", r10, r1),
    );

    // min-statistic moments by Monte Carlo
    let spec = EstimatorSpec::PppMin {
        bias_corrected: false,
    };
    let lo = FamilyParams::Function(GridFunction::constant(cells, theta)?);
    let mm = mc_moments(&spec, &fam, &lo, reps, stream.substream(7))?;
    out.verdict(
        "min-statistic-mean",
        (mm.bias[0] - 1.0 / n).abs() < 4.0 * mm.bias_ses[0],
        format!("bias {} vs 1/n = {}", mm.bias[0], 1.0 / n),
    );
    out.verdict(
        "min-statistic-variance",
        (mm.variance_sum - 1.0 / (n * n)).abs() < 4.0 * mm.variance_sum_se,
        format!("var {} vs 1/n² = {}", mm.variance_sum, 1.0 / (n * n)),
    );
    out.measure("ppp-min", mm);
    Ok(out)
}

// ---------------------------------------------------------------------------
// L² reduction
// ---------------------------------------------------------------------------

/// Reduction scenario: Γ_β dictionary bound, projection and symmetrization
/// inequalities on test estimators, and the perturbation geometry of the
/// multi-point construction.
pub fn run_l2_reduction(
    m: usize,
    r: f64,
    beta: u32,
    reps: usize,
    seed: u64,
) -> Result<ScenarioResult> {
    if !(1..=2).contains(&beta) {
        return Err(Error::ParameterDomain(
            "supported smoothness: beta in {1, 2}".into(),
        ));
    }
    if m < 4 {
        return Err(Error::ParameterDomain("need m >= 4".into()));
    }
    let mut out = ScenarioResult::new("l2-reduction", seed);
    out.cfg("m", m as f64);
    out.cfg("R", r);
    out.cfg("beta", beta as f64);
    out.cfg("reps", reps as f64);

    let dict = KernelDictionary::standard();
    let gamma_beta = dict.gamma_upper_sobolev(beta)?;
    out.constant("Gamma_beta", gamma_beta, "upper-bound-on-inf");

    // projection pipeline (Prop 5.2 inequalities) on function estimators
    let cells = 16 * m;
    let noise = 32.0;
    let fam = Family::GwnDiscrete {
        cells,
        noise_level: noise,
    };
    let basis = ProjectionBasis::quartic(m, cells)?;
    let radius = r / (gamma_beta * (m as f64).powf(beta as f64));
    let theta: Vec<f64> = (0..m)
        .map(|i| radius * ((i + 1) as f64 / m as f64) * if i % 2 == 0 { 1.0 } else { -0.7 })
        .collect();
    let scale = radius / theta.iter().map(|v| v * v).sum::<f64>().sqrt().max(1e-12);
    let theta: Vec<f64> = theta.iter().map(|v| 0.9 * scale * v).collect();
    let f_true = basis.embed(&theta)?;

    let stream = RngStream::new(seed);
    let cases: Vec<(&str, FunctionEstimator)> = vec![
        ("zero", FunctionEstimator::Zero),
        ("oracle", FunctionEstimator::Oracle(f_true.clone())),
        (
            "kernel-smoother",
            FunctionEstimator::KernelSmoother {
                bandwidth: 1.0 / m as f64,
            },
        ),
        (
            "james-stein-basis",
            FunctionEstimator::JamesSteinOnBasis(basis.clone()),
        ),
    ];
    for (i, (name, est)) in cases.iter().enumerate() {
        let fm = mc_function_moments(est, &fam, &f_true, &basis, reps, stream.substream(i as u64))?;
        let bias_ok = fm.projected_bias_norm_sq
            <= fm.ibias_sq + 3.0 * (fm.projected_bias_norm_sq_se + fm.ibias_sq_se) + 1e-10;
        let var_ok = fm.projected_variance_sum
            <= fm.ivar + 3.0 * (fm.projected_variance_sum_se + fm.ivar_se) + 1e-10;
        out.verdict(
            &format!("projection-bias[{}]", name),
            bias_ok,
            format!(
                "projected {} vs integrated {}",
                fm.projected_bias_norm_sq, fm.ibias_sq
            ),
        );
        out.verdict(
            &format!("projection-variance[{}]", name),
            var_ok,
            format!(
                "projected {} vs integrated {}",
                fm.projected_variance_sum, fm.ivar
            ),
        );
        if *name == "zero" {
            // Parseval: projected squared bias equals ‖θ‖², integrated equals ‖f_θ‖²
            let norm_sq: f64 = theta.iter().map(|v| v * v).sum();
            out.verdict(
                "zero-estimator-parseval",
                (fm.projected_bias_norm_sq - norm_sq).abs() < 1e-6
                    && (fm.ibias_sq - f_true.l2_norm_sq()).abs() < 1e-6
                    && (norm_sq - f_true.l2_norm_sq()).abs() < 1e-6,
                format!("‖θ‖² = {}, ‖f_θ‖² = {}", norm_sq, f_true.l2_norm_sq()),
            );
        }
        if *name == "oracle" {
            out.verdict(
                "oracle-projection-recovers-theta",
                fm.projected_bias_norm_sq < 1e-6,
                format!("projected bias² = {}", fm.projected_bias_norm_sq),
            );
        }
    }

    // symmetrization pipeline (Prop 5.3) in the sequence model
    let seq_fam = Family::IsoNormal { sigma: 1.0 };
    let dim = m;
    let js = EstimatorSpec::JamesStein;
    let sym_js = estimators::spherical_symmetrize(js.clone(), 64, dim, stream.substream(40))?;
    let shifted = EstimatorSpec::LinearShrinkage { factor: 0.6 };
    let sym_shift =
        estimators::spherical_symmetrize(shifted.clone(), 64, dim, stream.substream(41))?;
    let norm_target = 1.2f64;
    let sphere_thetas: Vec<Vec<f64>> = (0..3)
        .map(|i| {
            let rot = estimators::haar_rotation(dim, stream.substream(50 + i));
            let mut v = vec![0.0; dim];
            for (j, vj) in v.iter_mut().enumerate() {
                *vj = rot[j * dim] * norm_target;
            }
            v
        })
        .collect();
    for (name, inner, symmetrized) in [
        ("james-stein", &js, &sym_js),
        ("shrinkage", &shifted, &sym_shift),
    ] {
        let mut worst_bias = (0.0f64, 0.0f64);
        let mut worst_var = (0.0f64, 0.0f64);
        let mut worst_se = 0.0f64;
        for (ti, th) in sphere_thetas.iter().enumerate() {
            let params = FamilyParams::vector(th.clone());
            let a = mc_moments(
                inner,
                &seq_fam,
                &params,
                reps,
                stream.substream(60 + ti as u64),
            )?;
            let b = mc_moments(
                symmetrized,
                &seq_fam,
                &params,
                reps,
                stream.substream(70 + ti as u64),
            )?;
            worst_bias = (
                worst_bias.0.max(a.bias_norm_sq),
                worst_bias.1.max(b.bias_norm_sq),
            );
            worst_var = (
                worst_var.0.max(a.variance_sum),
                worst_var.1.max(b.variance_sum),
            );
            worst_se = worst_se
                .max(a.bias_norm_sq_se)
                .max(b.bias_norm_sq_se)
                .max(a.variance_sum_se)
                .max(b.variance_sum_se);
        }
        out.verdict(
            &format!("symmetrization-bias[{}]", name),
            worst_bias.1 <= worst_bias.0 + 3.0 * worst_se + 1e-10,
            format!("symmetrized {} vs original {}", worst_bias.1, worst_bias.0),
        );
        out.verdict(
            &format!("symmetrization-variance[{}]", name),
            worst_var.1 <= worst_var.0 + 3.0 * worst_se + 1e-10,
            format!("symmetrized {} vs original {}", worst_var.1, worst_var.0),
        );
    }

    // perturbation geometry of the proof: ‖θ_i − θ₀‖²/Δ² and cross terms
    let a_level = 1.0;
    let expect_diag = a_level * a_level / 4.0 * (1.0 + 1.0 / (m as f64 - 1.0));
    let expect_cross =
        -a_level * a_level / (4.0 * (m as f64 - 1.0)) * (1.0 + 1.0 / (m as f64 - 1.0));
    let mut errs_diag = Vec::new();
    let mut errs_cross = Vec::new();
    for &dl in &[0.1, 0.05, 0.025] {
        let theta0 = vec![a_level; m];
        let mk = |i: usize| -> Vec<f64> {
            (0..m)
                .map(|j| {
                    if i == j {
                        (1.0f64 + dl).sqrt() * a_level
                    } else {
                        (1.0f64 - dl / (m as f64 - 1.0)).sqrt() * a_level
                    }
                })
                .collect()
        };
        let t1 = mk(0);
        let t2 = mk(1);
        let diag: f64 = t1
            .iter()
            .zip(&theta0)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            / (dl * dl);
        let cross: f64 = t1
            .iter()
            .zip(&t2)
            .zip(&theta0)
            .map(|((a, b), o)| (a - o) * (b - o))
            .sum::<f64>()
            / (dl * dl);
        errs_diag.push((diag - expect_diag).abs());
        errs_cross.push((cross - expect_cross).abs());
        out.constant(&format!("geometry-diag[delta={}]", dl), diag, "exact");
        out.constant(&format!("geometry-cross[delta={}]", dl), cross, "exact");
    }
    let linear_decay = errs_diag.windows(2).all(|w| w[1] <= 0.75 * w[0])
        && errs_cross.windows(2).all(|w| w[1] <= 0.75 * w[0]);
    out.verdict(
        "perturbation-geometry-converges",
        linear_decay && errs_diag[2] < 0.05 * expect_diag,
        format!("diag errors {:?}, cross errors {:?}", errs_diag, errs_cross),
    );
    Ok(out)
}

// ---------------------------------------------------------------------------
// bias blow-up demo
// ---------------------------------------------------------------------------

/// Finite surrogate of the infinite-bias phenomenon: under a variance budget,
/// shrinkage bias grows linearly in the signal amplitude.
pub fn run_bias_blowup_demo(
    m: usize,
    variance_budget: f64,
    a_ladder: &[f64],
    reps: usize,
    seed: u64,
) -> Result<ScenarioResult> {
    if variance_budget >= m as f64 / 2.0 {
        return Err(Error::Config("demo needs variance budget < m/2".into()));
    }
    if a_ladder.len() < 2 {
        return Err(Error::Config("need at least two amplitudes".into()));
    }
    let mut out = ScenarioResult::new("bias-blowup", seed);
    out.cfg("m", m as f64);
    out.cfg("variance_budget", variance_budget);
    out.cfg("reps", reps as f64);

    // largest admissible shrinkage: c² m ≤ budget
    let c = (variance_budget / m as f64).sqrt().min(1.0);
    out.constant("shrinkage-factor", c, "exact");
    out.verdict(
        "identity-excluded-by-budget",
        m as f64 > variance_budget,
        format!("c = 1 would need ΣVar = m = {} <= {}", m, variance_budget),
    );

    let fam = Family::IsoNormal { sigma: 1.0 };
    let spec = EstimatorSpec::LinearShrinkage { factor: c };
    let predicted_slope = (1.0 - c) * (m as f64).sqrt();
    let mut measured: Vec<(f64, f64, f64)> = Vec::new();
    for (i, &a) in a_ladder.iter().enumerate() {
        let params = FamilyParams::vector(vec![a; m]);
        let mm = mc_moments(
            &spec,
            &fam,
            &params,
            reps,
            RngStream::new(seed).substream(i as u64),
        )?;
        let bias_norm = mm.bias_norm_sq.sqrt();
        let se = mm.bias_norm_sq_se / (2.0 * bias_norm.max(1e-9));
        out.verdict(
            &format!("bias-matches-closed-form[a={}]", a),
            (bias_norm - predicted_slope * a).abs() < 3.0 * se + 1e-9,
            format!(
                "measured {} vs (1−c)a√m = {}",
                bias_norm,
                predicted_slope * a
            ),
        );
        out.verdict(
            &format!("variance-within-budget[a={}]", a),
            mm.variance_sum <= variance_budget + 3.0 * mm.variance_sum_se,
            format!("ΣVar = {} budget {}", mm.variance_sum, variance_budget),
        );
        measured.push((a, bias_norm, se));
        out.measure(&format!("shrinkage[a={}]", a), mm);
    }
    // least-squares slope through the origin
    let sxx: f64 = measured.iter().map(|(a, _, _)| a * a).sum();
    let sxy: f64 = measured.iter().map(|(a, b, _)| a * b).sum();
    let slope = sxy / sxx;
    out.constant("fitted-bias-slope", slope, "exact");
    out.constant("predicted-bias-slope", predicted_slope, "exact");
    out.verdict(
        "bias-grows-linearly",
        (slope - predicted_slope).abs() / predicted_slope < 0.05,
        format!("fitted {} vs predicted {}", slope, predicted_slope),
    );
    // doubling a doubles the measured bias norm
    let doubled: Vec<&(f64, f64, f64)> = measured
        .iter()
        .filter(|(a, _, _)| {
            measured
                .iter()
                .any(|(a2, _, _)| (a2 - 2.0 * a).abs() < 1e-12)
        })
        .collect();
    for (a, b, se) in doubled {
        let (_, b2, se2) = measured
            .iter()
            .find(|(a2, _, _)| (a2 - 2.0 * a).abs() < 1e-12)
            .unwrap();
        out.verdict(
            &format!("doubling-doubles-bias[a={}]", a),
            (b2 - 2.0 * b).abs() < 3.0 * (se + se2) + 1e-9,
            format!("‖bias‖(2a) = {} vs 2‖bias‖(a) = {}", b2, 2.0 * b),
        );
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// high-dimensional regression
// ---------------------------------------------------------------------------

/// Design matrix choice for the regression scenario.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum DesignKind {
    /// First p columns of a scaled Hadamard-like orthogonal set.
    Orthogonal,
    /// Independent ±1 entries.
    RandomSign,
}

/// Mutual coherence condition and the regression lower-bound ingredients at
/// desk scale.
pub fn run_hd_regression(
    n: usize,
    p: usize,
    s: u64,
    gamma: f64,
    design: DesignKind,
    seed: u64,
) -> Result<ScenarioResult> {
    if p > 40 {
        return Err(Error::Config(
            "desk-scale check enumerates designs; need p <= 40".into(),
        ));
    }
    if s < 1 || 4 * s * s > p as u64 {
        return Err(Error::ParameterDomain("need 1 <= s <= sqrt(p)/2".into()));
    }
    let log_ratio = (p as f64 / (s * s) as f64).ln();
    let alpha = 4.0 * gamma + 1.0 / log_ratio;
    if alpha > 0.99 {
        return Err(Error::ParameterDomain(
            "need 4γ + 1/log(p/s²) <= 0.99".into(),
        ));
    }
    let mut out = ScenarioResult::new("hd-regression", seed);
    out.cfg("n", n as f64);
    out.cfg("p", p as f64);
    out.cfg("s", s as f64);
    out.cfg("gamma", gamma);

    // design with (XᵀX)_ii = n
    let x = build_design(n, p, design, RngStream::new(seed));
    let mut gram = vec![0.0; p * p];
    for i in 0..p {
        for j in 0..p {
            gram[i * p + j] = (0..n).map(|k| x[k * p + i] * x[k * p + j]).sum();
        }
    }
    for i in 0..p {
        if (gram[i * p + i] - n as f64).abs() > 1e-9 * n as f64 {
            return Err(Error::Validation(
                "design columns must satisfy (XᵀX)_ii = n".into(),
            ));
        }
    }
    let mut mc = 0.0f64;
    for i in 0..p {
        for j in 0..p {
            if i != j {
                mc = mc.max(gram[i * p + j].abs() / n as f64);
            }
        }
    }
    out.constant("mutual-coherence", mc, "exact");
    let mc_bound = 1.0 / ((s * s) as f64 * log_ratio);
    out.constant("coherence-condition-bound", mc_bound, "exact");
    let condition = mc <= mc_bound;
    out.verdict(
        "coherence-condition",
        condition,
        format!("mc = {} vs {}", mc, mc_bound),
    );
    if design == DesignKind::Orthogonal {
        out.verdict(
            "orthogonal-design-zero-coherence",
            mc.abs() < 1e-12,
            format!("mc = {}", mc),
        );
    }

    let lb_const = (1.0 - 0.5f64.powf(0.01)) / (25.0 * std::f64::consts::E.powi(2) * log_ratio)
        * (p as f64 / n as f64)
        * ((s * s) as f64 / p as f64).powf(4.0 * gamma);
    out.constant("regression-variance-lower-bound", lb_const, "exact");

    // s = 1 reduction: the regression constant equals the sequence-model
    // constant (with n→p) scaled by 1/(n·e)
    if s == 1 {
        let seq_const = (1.0 - 0.5f64.powf(0.01)) / (25.0 * std::f64::consts::E * log_ratio)
            * p as f64
            * (1.0 / p as f64).powf(4.0 * gamma);
        let reduced = seq_const / (n as f64 * std::f64::consts::E);
        out.verdict(
            "s1-reduces-to-sequence-constant",
            (lb_const - reduced).abs() < 1e-12 * lb_const.max(1e-300),
            format!("regression {} vs sequence/(n·e) {}", lb_const, reduced),
        );
    }

    // entrywise χ² bound from the proof, over the explicit s-sparse design
    if condition {
        let entry_level = (alpha * log_ratio / n as f64).sqrt();
        let supports = enumerate_supports_containing_zero(p, s as usize);
        let mut worst_violation = f64::NEG_INFINITY;
        let mut ok = true;
        for sa in &supports {
            for sb in &supports {
                let mut quad = 0.0; // β_jᵀ XᵀX β_k
                let mut inner = 0.0; // β_jᵀ β_k
                for &ia in sa {
                    for &ib in sb {
                        quad += entry_level * entry_level * gram[ia * p + ib];
                        if ia == ib {
                            inner += entry_level * entry_level;
                        }
                    }
                }
                let gap = quad - (n as f64 * inner + 1.0);
                worst_violation = worst_violation.max(gap);
                ok &= gap <= 1e-9;
            }
        }
        out.verdict(
            "chi2-entry-bound",
            ok,
            format!(
                "max (β_jᵀXᵀXβ_k − nβ_jᵀβ_k − 1) = {} over {} designs",
                worst_violation,
                supports.len()
            ),
        );
    }
    Ok(out)
}

fn build_design(n: usize, p: usize, kind: DesignKind, stream: RngStream) -> Vec<f64> {
    let mut x = vec![0.0; n * p];
    match kind {
        DesignKind::Orthogonal => {
            // orthogonal ±1-scaled columns from a Fourier-like sign pattern
            for j in 0..p {
                for k in 0..n {
                    // Hadamard on the lowest bits; requires n a power of two
                    let bits = (k & j).count_ones();
                    x[k * p + j] = if bits % 2 == 0 { 1.0 } else { -1.0 };
                }
            }
        }
        DesignKind::RandomSign => {
            let mut rng = stream.rng();
            use rand::Rng;
            for v in x.iter_mut() {
                *v = if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
            }
        }
    }
    x
}

fn enumerate_supports_containing_zero(p: usize, s: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut current = vec![0usize];
    fn rec(p: usize, s: usize, start: usize, current: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if current.len() == s {
            out.push(current.clone());
            return;
        }
        for i in start..p {
            current.push(i);
            rec(p, s, i + 1, current, out);
            current.pop();
        }
    }
    rec(p, s, 1, &mut current, &mut out);
    out
}

// ---------------------------------------------------------------------------
// verify-all battery
// ---------------------------------------------------------------------------

/// Verdict summary of a whole-scenario run.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct SuiteSummary {
    pub results: Vec<ScenarioResult>,
}

impl SuiteSummary {
    pub fn all_pass(&self) -> bool {
        self.results.iter().all(|r| r.all_pass())
    }
}

/// Run every scenario at a desk-scale default configuration.
pub fn run_default_suite(seed: u64, reps: usize) -> Result<SuiteSummary> {
    let dict = KernelDictionary::standard();
    let results = vec![
        run_pointwise_gwn(3.0, 1.0, 1.0, 100.0, 1000, &dict, seed)?,
        run_sparse_sequence(400, 2, 0.15, reps, seed)?,
        run_quadratic_functional(400, 2, 1.0, reps, seed)?,
        run_boundary(20.0, 0.5, 2.0, reps, seed)?,
        run_l2_reduction(8, 4.0, 1, reps.min(60_000), seed)?,
        run_bias_blowup_demo(8, 2.0, &[1.0, 2.0, 5.0, 10.0], reps, seed)?,
        run_hd_regression(2500, 36, 2, 0.1, DesignKind::RandomSign, seed)?,
        run_hd_regression(64, 16, 1, 0.1, DesignKind::Orthogonal, seed)?,
    ];
    Ok(SuiteSummary { results })
}
