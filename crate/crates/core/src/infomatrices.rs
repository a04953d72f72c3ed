//! χ²-divergence and Hellinger affinity matrices for `M + 1` distributions,
//! their norms and pseudoinverse, the data-processing comparison for discrete
//! kernels, the Gamma first-order expansion check, and the combinatorial
//! row-sum bound for sparse normal means.

use crate::combinatorics::OverlapCounts;
use crate::divergences::{hellinger_affinity, Provenance};
use crate::error::{Error, Result};
use crate::linalg;
use crate::models::{log_density_ratio, sample, validate_params, Family, FamilyParams};
use crate::rng::RngStream;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

/// Which information matrix.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum MatrixKind {
    Chi2,
    HellingerAffinity,
}

/// A symmetric information matrix over the non-base distributions.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DivMatrix {
    pub kind: MatrixKind,
    pub m: usize,
    /// Row-major M×M entries; `+inf` marks a divergent entry.
    pub entries: Vec<f64>,
    pub provenance: Provenance,
    /// Entrywise standard errors (Monte Carlo only).
    pub std_errors: Option<Vec<f64>>,
    /// Index of the base measure in the caller's parameter list.
    pub base_index: usize,
    /// False when some entry is `+inf`.
    pub finite: bool,
}

impl DivMatrix {
    pub fn entry(&self, j: usize, k: usize) -> f64 {
        self.entries[j * self.m + k]
    }

    pub fn spectral_norm(&self) -> Result<f64> {
        self.require_finite()?;
        linalg::spectral_norm(&self.entries, self.m)
    }

    pub fn row_sum_norm(&self) -> f64 {
        linalg::row_sum_norm(&self.entries, self.m)
    }

    pub fn min_eigenvalue(&self) -> Result<f64> {
        self.require_finite()?;
        linalg::min_eigenvalue(&self.entries, self.m)
    }

    /// Eigendecomposition pseudoinverse zeroing eigenvalues `≤ tol · λ_max`.
    pub fn pseudo_inverse(&self, tol: f64) -> Result<Vec<f64>> {
        self.require_finite()?;
        linalg::pseudo_inverse(&self.entries, self.m, tol)
    }

    pub fn quadratic_form(&self, v: &[f64]) -> Result<f64> {
        if v.len() != self.m {
            return Err(Error::DimensionMismatch(
                "vector length != matrix size".into(),
            ));
        }
        self.require_finite()?;
        Ok(linalg::quadratic_form(&self.entries, self.m, v, v))
    }

    fn require_finite(&self) -> Result<()> {
        if !self.finite {
            return Err(Error::Validation("matrix has infinite entries".into()));
        }
        Ok(())
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        for j in 0..self.m {
            let row: Vec<String> = (0..self.m)
                .map(|k| format!("{}", self.entry(j, k)))
                .collect();
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }
}

/// Closed-form χ²-divergence matrix; `params[0]` is the base measure `P₀`.
pub fn chi2_matrix(family: &Family, params: &[FamilyParams]) -> Result<DivMatrix> {
    if params.len() < 2 {
        return Err(Error::Config(
            "need a base and at least one alternative".into(),
        ));
    }
    for p in params {
        validate_params(family, p)?;
    }
    let m = params.len() - 1;
    let mut entries = vec![0.0; m * m];
    let mut finite = true;
    for j in 0..m {
        for k in j..m {
            let v = chi2_cross_entry(family, &params[0], &params[j + 1], &params[k + 1])?;
            finite &= v.is_finite();
            entries[j * m + k] = v;
            entries[k * m + j] = v;
        }
    }
    Ok(DivMatrix {
        kind: MatrixKind::Chi2,
        m,
        entries,
        provenance: Provenance::ClosedForm,
        std_errors: None,
        base_index: 0,
        finite,
    })
}

/// Entry `∫ (dP_j/dP_0) dP_k − 1` in closed form.
fn chi2_cross_entry(
    family: &Family,
    base: &FamilyParams,
    pj: &FamilyParams,
    pk: &FamilyParams,
) -> Result<f64> {
    match family {
        Family::IsoNormal { sigma } => {
            let (t0, tj, tk) = (base.as_vector()?, pj.as_vector()?, pk.as_vector()?);
            check_dims(&[t0.dim(), tj.dim(), tk.dim()])?;
            let mut ip = 0.0;
            for i in 0..t0.dim() {
                ip += (tj.values()[i] - t0.values()[i]) * (tk.values()[i] - t0.values()[i]);
            }
            Ok((ip / (sigma * sigma)).exp_m1())
        }
        Family::PoissonProduct => {
            let (l0, lj, lk) = (base.as_vector()?, pj.as_vector()?, pk.as_vector()?);
            check_dims(&[l0.dim(), lj.dim(), lk.dim()])?;
            let mut s = 0.0;
            for i in 0..l0.dim() {
                s += (lj.values()[i] - l0.values()[i]) * (lk.values()[i] - l0.values()[i])
                    / l0.values()[i];
            }
            Ok(s.exp_m1())
        }
        Family::BernoulliProduct => {
            let (t0, tj, tk) = (base.as_vector()?, pj.as_vector()?, pk.as_vector()?);
            check_dims(&[t0.dim(), tj.dim(), tk.dim()])?;
            let mut prod = 1.0;
            for i in 0..t0.dim() {
                let b = t0.values()[i];
                prod *= (tj.values()[i] - b) * (tk.values()[i] - b) / (b * (1.0 - b)) + 1.0;
            }
            Ok(prod - 1.0)
        }
        Family::ExponentialProduct => {
            let (b0, bj, bk) = (base.as_vector()?, pj.as_vector()?, pk.as_vector()?);
            check_dims(&[b0.dim(), bj.dim(), bk.dim()])?;
            gamma_cross_entry(&vec![1.0; b0.dim()], b0.values(), bj.values(), bk.values())
        }
        Family::GammaProduct { shapes } => {
            let (b0, bj, bk) = (base.as_vector()?, pj.as_vector()?, pk.as_vector()?);
            check_dims(&[b0.dim(), bj.dim(), bk.dim()])?;
            gamma_cross_entry(shapes, b0.values(), bj.values(), bk.values())
        }
        Family::GwnDiscrete { noise_level, .. } => {
            let (f0, fj, fk) = (base.as_function()?, pj.as_function()?, pk.as_function()?);
            let ip = fj.sub(f0)?.inner(&fk.sub(f0)?)?;
            Ok((noise_level * ip).exp_m1())
        }
        Family::PppBoundary { intensity, .. } => {
            let (f0, fj, fk) = (base.as_function()?, pj.as_function()?, pk.as_function()?);
            if !f0.le_pointwise(fj) || !f0.le_pointwise(fk) {
                return Err(Error::Domination(
                    "χ² matrix in the boundary model needs f_j >= f_0 pointwise".into(),
                ));
            }
            // E_{P_k}[dP_j/dP_0] = exp(n ∫ (min(f_j, f_k) − f_0))
            let mcells = f0.cells();
            let mut acc = 0.0;
            for i in 0..mcells {
                acc += fj.cell_value(i).min(fk.cell_value(i)) - f0.cell_value(i);
            }
            Ok((intensity * acc / mcells as f64).exp_m1())
        }
    }
}

/// Shared Gamma/exponential cross entry; finite iff the pooled rate
/// `β_j + β_k − β_0` stays positive coordinatewise. Shapes are family-level
/// constants here, so the Γ factors of the general formula cancel.
fn gamma_cross_entry(shapes: &[f64], b0: &[f64], bj: &[f64], bk: &[f64]) -> Result<f64> {
    let mut log_prod = 0.0f64;
    for i in 0..b0.len() {
        let a = shapes[i];
        let pooled_rate = bj[i] + bk[i] - b0[i];
        if pooled_rate <= 0.0 {
            return Ok(f64::INFINITY);
        }
        log_prod += a * (bj[i].ln() + bk[i].ln() - b0[i].ln() - pooled_rate.ln());
    }
    Ok(log_prod.exp_m1())
}

/// Closed-form Hellinger affinity matrix
/// `ρ(P_base | others)_{j,k} = ρ_jk / (ρ_j0 ρ_k0) − 1` over the non-base
/// parameters, from the pairwise affinity closed forms.
pub fn hellinger_affinity_matrix(
    family: &Family,
    base_index: usize,
    params: &[FamilyParams],
) -> Result<DivMatrix> {
    if params.len() < 2 {
        return Err(Error::Config(
            "need a base and at least one alternative".into(),
        ));
    }
    if base_index >= params.len() {
        return Err(Error::DimensionMismatch("base index out of range".into()));
    }
    let others: Vec<usize> = (0..params.len()).filter(|i| *i != base_index).collect();
    let m = others.len();
    let base = &params[base_index];
    // affinities with the base must be positive
    let mut base_aff = Vec::with_capacity(m);
    for &i in &others {
        let a = hellinger_affinity(family, &params[i], base)?;
        if a <= 1e-300 {
            return Err(Error::Validation(format!(
                "degenerate base: affinity with parameter {} vanishes",
                i
            )));
        }
        base_aff.push(a);
    }
    let mut entries = vec![0.0; m * m];
    for j in 0..m {
        for k in j..m {
            let ajk = hellinger_affinity(family, &params[others[j]], &params[others[k]])?;
            let v = ajk / (base_aff[j] * base_aff[k]) - 1.0;
            entries[j * m + k] = v;
            entries[k * m + j] = v;
        }
    }
    Ok(DivMatrix {
        kind: MatrixKind::HellingerAffinity,
        m,
        entries,
        provenance: Provenance::ClosedForm,
        std_errors: None,
        base_index,
        finite: true,
    })
}

/// Monte Carlo verifier of the χ²-divergence matrix: entry `(j,k)` is the
/// sample mean of `dP_j/dP_0 − 1` under `X ~ P_k`, symmetrized by averaging
/// with `(k,j)`. Entrywise standard errors are reported.
pub fn mc_matrix_oracle(
    family: &Family,
    params: &[FamilyParams],
    reps: usize,
    stream: RngStream,
) -> Result<DivMatrix> {
    if params.len() < 2 {
        return Err(Error::Config(
            "need a base and at least one alternative".into(),
        ));
    }
    for p in params {
        validate_params(family, p)?;
    }
    let m = params.len() - 1;
    // ordered pairs (j,k), j..m, k..m upper triangle; each estimated both ways
    let pairs: Vec<(usize, usize)> = (0..m).flat_map(|j| (j..m).map(move |k| (j, k))).collect();
    let results: Result<Vec<(usize, usize, f64, f64)>> = pairs
        .par_iter()
        .map(|&(j, k)| {
            let est_under = |num: usize, samp: usize, sub: u64| -> Result<(f64, f64)> {
                let s = stream.substream(sub);
                let (mut acc, mut acc2) = (0.0f64, 0.0f64);
                for r in 0..reps {
                    let x = sample(family, &params[samp], s.substream(r as u64))?;
                    let v = log_density_ratio(family, &params[num], &params[0], &x)?.exp() - 1.0;
                    acc += v;
                    acc2 += v * v;
                }
                let n = reps as f64;
                let mean = acc / n;
                let var = (acc2 / n - mean * mean).max(0.0) * n / (n - 1.0);
                Ok((mean, (var / n).sqrt()))
            };
            let tag = (j * m + k) as u64;
            let (a, se_a) = est_under(j + 1, k + 1, 2 * tag)?;
            if j == k {
                return Ok((j, k, a, se_a));
            }
            let (b, se_b) = est_under(k + 1, j + 1, 2 * tag + 1)?;
            Ok((
                j,
                k,
                0.5 * (a + b),
                0.5 * (se_a * se_a + se_b * se_b).sqrt(),
            ))
        })
        .collect();
    let mut entries = vec![0.0; m * m];
    let mut ses = vec![0.0; m * m];
    for (j, k, v, se) in results? {
        entries[j * m + k] = v;
        entries[k * m + j] = v;
        ses[j * m + k] = se;
        ses[k * m + j] = se;
    }
    Ok(DivMatrix {
        kind: MatrixKind::Chi2,
        m,
        entries,
        provenance: Provenance::MonteCarlo,
        std_errors: Some(ses),
        base_index: 0,
        finite: true,
    })
}

/// A row-stochastic kernel on finite outcome spaces.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct MarkovKernelMatrix {
    pub rows: usize,
    pub cols: usize,
    /// Row-major `rows × cols`.
    pub entries: Vec<f64>,
}

impl MarkovKernelMatrix {
    pub fn new(rows: usize, cols: usize, entries: Vec<f64>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::DimensionMismatch("kernel entry count".into()));
        }
        for r in 0..rows {
            let row = &entries[r * cols..(r + 1) * cols];
            if row.iter().any(|v| *v < 0.0) {
                return Err(Error::Validation("kernel has a negative entry".into()));
            }
            let s: f64 = row.iter().sum();
            if (s - 1.0).abs() > 1e-12 {
                return Err(Error::Validation(format!("kernel row {} sums to {}", r, s)));
            }
        }
        Ok(MarkovKernelMatrix {
            rows,
            cols,
            entries,
        })
    }

    /// Pushforward of a probability vector.
    pub fn apply(&self, q: &[f64]) -> Result<Vec<f64>> {
        if q.len() != self.rows {
            return Err(Error::DimensionMismatch(
                "distribution length != kernel rows".into(),
            ));
        }
        let mut out = vec![0.0; self.cols];
        for (x, qx) in q.iter().enumerate() {
            for y in 0..self.cols {
                out[y] += qx * self.entries[x * self.cols + y];
            }
        }
        Ok(out)
    }
}

/// Exact χ² matrix of finite discrete distributions given as probability
/// vectors; `dists[0]` is the base and must dominate the others.
pub fn chi2_matrix_discrete(dists: &[Vec<f64>]) -> Result<DivMatrix> {
    let m = dists.len() - 1;
    let n = dists[0].len();
    for d in dists {
        if d.len() != n {
            return Err(Error::DimensionMismatch(
                "distribution lengths differ".into(),
            ));
        }
        let s: f64 = d.iter().sum();
        if (s - 1.0).abs() > 1e-10 || d.iter().any(|p| *p < 0.0) {
            return Err(Error::Validation("not a probability vector".into()));
        }
    }
    for x in 0..n {
        if dists[0][x] <= 0.0 && dists.iter().skip(1).any(|d| d[x] > 0.0) {
            return Err(Error::Domination("base measure misses an outcome".into()));
        }
    }
    let mut entries = vec![0.0; m * m];
    for j in 0..m {
        for k in j..m {
            let mut s = 0.0;
            for x in 0..n {
                if dists[0][x] > 0.0 {
                    s += dists[j + 1][x] * dists[k + 1][x] / dists[0][x];
                }
            }
            entries[j * m + k] = s - 1.0;
            entries[k * m + j] = s - 1.0;
        }
    }
    Ok(DivMatrix {
        kind: MatrixKind::Chi2,
        m,
        entries,
        provenance: Provenance::ExactSum,
        std_errors: None,
        base_index: 0,
        finite: true,
    })
}

/// Outcome of the data-processing comparison `χ²(Q) − χ²(KQ) ⪰ 0`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DataProcessingReport {
    pub min_eigenvalue: f64,
    pub pass: bool,
    pub chi2_source: DivMatrix,
    pub chi2_pushforward: DivMatrix,
}

/// Verify the data-processing inequality for a Markov kernel on exact finite
/// distributions: PASS iff `min eig(χ²(Q) − χ²(KQ)) ≥ −1e−8`.
pub fn data_processing_check(
    kernel: &MarkovKernelMatrix,
    dists: &[Vec<f64>],
) -> Result<DataProcessingReport> {
    if dists.len() < 2 {
        return Err(Error::Config(
            "need a base and at least one alternative".into(),
        ));
    }
    let before = chi2_matrix_discrete(dists)?;
    let pushed: Result<Vec<Vec<f64>>> = dists.iter().map(|d| kernel.apply(d)).collect();
    let after = chi2_matrix_discrete(&pushed?)?;
    let m = before.m;
    let diff: Vec<f64> = before
        .entries
        .iter()
        .zip(&after.entries)
        .map(|(a, b)| a - b)
        .collect();
    let min_eig = linalg::min_eigenvalue(&diff, m)?;
    Ok(DataProcessingReport {
        min_eigenvalue: min_eig,
        pass: min_eig >= -1e-8,
        chi2_source: before,
        chi2_pushforward: after,
    })
}

/// Convergence report for the Gamma first-order expansion: the exact
/// `log(1 + entry)` against the quadratic form `(β_j−β₀)ᵀ Σ⁻¹ (β_k−β₀)` with
/// `Σ = diag(β₀ℓ²/αℓ)`, at perturbation scales `δ` and `δ/2`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GammaExpansionReport {
    pub delta: f64,
    pub max_abs_error: f64,
    pub max_abs_error_half: f64,
    pub max_rel_error: f64,
    /// max over entries of `err(δ/2) / err(δ)`; `o(Δ²)` behavior needs < 0.6.
    pub error_ratio: f64,
    pub pass: bool,
}

pub fn gamma_first_order_check(
    shapes: &[f64],
    base_rates: &[f64],
    directions: &[Vec<f64>],
    delta: f64,
) -> Result<GammaExpansionReport> {
    if directions.is_empty() || delta <= 0.0 {
        return Err(Error::Config(
            "need at least one direction and δ > 0".into(),
        ));
    }
    let d = base_rates.len();
    for dir in directions {
        if dir.len() != d {
            return Err(Error::DimensionMismatch("direction length".into()));
        }
    }
    let eval = |scale: f64| -> Result<(f64, f64)> {
        // returns (max abs error, max rel error) over matrix entries
        let rates: Vec<Vec<f64>> = directions
            .iter()
            .map(|dir| {
                base_rates
                    .iter()
                    .zip(dir)
                    .map(|(b, u)| b + scale * u)
                    .collect()
            })
            .collect();
        let mut max_abs: f64 = 0.0;
        let mut max_rel: f64 = 0.0;
        for j in 0..rates.len() {
            for k in 0..rates.len() {
                let entry = gamma_cross_entry(shapes, base_rates, &rates[j], &rates[k])?;
                if !entry.is_finite() {
                    return Err(Error::ParameterDomain("gamma finiteness violated".into()));
                }
                let exact = entry.ln_1p();
                let mut qform = 0.0;
                for l in 0..d {
                    let sinv = shapes[l] / (base_rates[l] * base_rates[l]);
                    qform += (rates[j][l] - base_rates[l]) * sinv * (rates[k][l] - base_rates[l]);
                }
                let err = (exact - qform).abs();
                max_abs = max_abs.max(err);
                if qform.abs() > 0.0 {
                    max_rel = max_rel.max(err / qform.abs());
                }
            }
        }
        Ok((max_abs, max_rel))
    };
    let (e_full, rel_full) = eval(delta)?;
    let (e_half, _) = eval(0.5 * delta)?;
    let ratio = if e_full > 0.0 { e_half / e_full } else { 0.0 };
    Ok(GammaExpansionReport {
        delta,
        max_abs_error: e_full,
        max_abs_error_half: e_half,
        max_rel_error: rel_full,
        error_ratio: ratio,
        pass: ratio < 0.6,
    })
}

/// Row sum of the sparse-design χ² matrix together with its overlap table.
#[derive(Clone, Debug, Serialize)]
pub struct SparseRowSum {
    pub n: u64,
    pub s: u64,
    pub alpha: f64,
    /// `Σ_r b(n,s,r) [ (n/s²)^{rα} − 1 ]`
    pub value: f64,
    /// `b(n,s,r)` for r = 1..=s (exact, converted to f64 for reporting).
    pub b_table: Vec<f64>,
    /// Exact identity `Σ_r b(n,s,r) = C(n−1, s−1)`.
    pub total_consistent: bool,
}

/// Exact row sum `Σ_{r=1}^{s} b(n,s,r)[(n/s²)^{rα} − 1]` of the χ² matrix
/// built from s-sparse normal means with common non-zero entry
/// `sqrt(α log(n/s²))`, using big-integer overlap counts.
pub fn sparse_chi2_row_sum(n: u64, s: u64, alpha: f64) -> Result<SparseRowSum> {
    if alpha <= 0.0 {
        return Err(Error::ParameterDomain("alpha must be positive".into()));
    }
    let oc = OverlapCounts::new(n, s)?;
    let ratio = n as f64 / (s * s) as f64;
    let b = oc.counts_f64();
    let mut value = 0.0;
    for (idx, bf) in b.iter().enumerate() {
        let r = (idx + 1) as f64;
        value += bf * (ratio.powf(r * alpha) - 1.0);
    }
    Ok(SparseRowSum {
        n,
        s,
        alpha,
        value,
        b_table: b,
        total_consistent: oc.verify_total(),
    })
}

fn check_dims(dims: &[usize]) -> Result<()> {
    if dims.windows(2).any(|w| w[0] != w[1]) {
        return Err(Error::DimensionMismatch(
            "parameter dimensions differ".into(),
        ));
    }
    Ok(())
}
