//! Functions on a regular grid of `[0, 1]` with discrete norms.
//!
//! A [`GridFunction`] stores values at the `m + 1` equispaced points
//! `x_j = j/m`. The observation models treat `f` as piecewise constant on the
//! `m` cells, each cell taking its left-endpoint value, so every norm below is
//! a Riemann sum over cells.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// Declared smoothness class of a grid function.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum SmoothnessClass {
    Holder(f64),
    Sobolev(f64),
}

/// A function sampled at `m + 1` equispaced points on `[0, 1]`.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct GridFunction {
    values: Vec<f64>,
    pub smoothness: Option<SmoothnessClass>,
    pub radius: Option<f64>,
}

impl GridFunction {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.len() < 3 {
            return Err(Error::Config(
                "grid needs at least 2 cells (3 points)".into(),
            ));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(Error::ParameterDomain("grid values must be finite".into()));
        }
        Ok(GridFunction {
            values,
            smoothness: None,
            radius: None,
        })
    }

    pub fn constant(cells: usize, value: f64) -> Result<Self> {
        Self::new(vec![value; cells + 1])
    }

    pub fn from_fn(cells: usize, f: impl Fn(f64) -> f64) -> Result<Self> {
        let vals = (0..=cells).map(|j| f(j as f64 / cells as f64)).collect();
        Self::new(vals)
    }

    pub fn with_class(mut self, class: SmoothnessClass, radius: f64) -> Self {
        self.smoothness = Some(class);
        self.radius = Some(radius);
        self
    }

    /// Number of cells `m`.
    pub fn cells(&self) -> usize {
        self.values.len() - 1
    }

    /// All `m + 1` node values.
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Value on cell `i` (left endpoint convention), i = 0..m-1.
    pub fn cell_value(&self, i: usize) -> f64 {
        self.values[i]
    }

    pub fn node(&self, j: usize) -> f64 {
        j as f64 / self.cells() as f64
    }

    /// Cell-wise Riemann sum of `g(f_i)`.
    fn cell_sum(&self, g: impl Fn(f64) -> f64) -> f64 {
        let m = self.cells();
        self.values[..m].iter().map(|&v| g(v)).sum::<f64>() / m as f64
    }

    /// Discrete `L²` norm squared.
    pub fn l2_norm_sq(&self) -> f64 {
        self.cell_sum(|v| v * v)
    }

    /// Discrete `L¹` norm.
    pub fn l1_norm(&self) -> f64 {
        self.cell_sum(f64::abs)
    }

    pub fn sup_norm(&self) -> f64 {
        self.values.iter().fold(0.0, |a, v| a.max(v.abs()))
    }

    /// Discrete `L²` inner product over cells.
    pub fn inner(&self, other: &GridFunction) -> Result<f64> {
        self.check_same_grid(other)?;
        let m = self.cells();
        Ok((0..m)
            .map(|i| self.values[i] * other.values[i])
            .sum::<f64>()
            / m as f64)
    }

    pub fn sub(&self, other: &GridFunction) -> Result<GridFunction> {
        self.check_same_grid(other)?;
        let vals = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(a, b)| a - b)
            .collect();
        GridFunction::new(vals)
    }

    fn check_same_grid(&self, other: &GridFunction) -> Result<()> {
        if self.values.len() != other.values.len() {
            return Err(Error::DimensionMismatch(format!(
                "grids of {} and {} cells",
                self.cells(),
                other.cells()
            )));
        }
        Ok(())
    }

    /// Pointwise ordering `self(x) <= other(x)` on the grid.
    pub fn le_pointwise(&self, other: &GridFunction) -> bool {
        self.values.iter().zip(&other.values).all(|(a, b)| a <= b)
    }

    /// Grid surrogate of the β-Hölder norm: finite-difference derivatives up
    /// to the largest integer strictly below β plus the maximal difference
    /// quotient of exponent `β - ⌊β⌋` over all grid pairs.
    pub fn holder_norm(&self, beta: f64) -> Result<f64> {
        holder_norm_on_grid(&self.values, 1.0 / self.cells() as f64, beta)
    }

    /// Grid surrogate of the Sobolev norm `(‖f‖² + ‖f^{(β)}‖²)^{1/2}`, integer β.
    pub fn sobolev_norm(&self, beta: u32) -> f64 {
        let h = 1.0 / self.cells() as f64;
        let deriv = nth_difference(&self.values, h, beta as usize);
        let l2sq = self.l2_norm_sq();
        let dsq = deriv.iter().map(|v| v * v).sum::<f64>() * h;
        (l2sq + dsq).sqrt()
    }

    /// Write `x,f(x)` pairs.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("x,f\n");
        for (j, v) in self.values.iter().enumerate() {
            out.push_str(&format!("{},{}\n", self.node(j), v));
        }
        out
    }

    /// Parse `x,f(x)` pairs written by [`GridFunction::to_csv`]; x values must
    /// be the equispaced nodes in order.
    pub fn from_csv(text: &str) -> Result<Self> {
        let mut vals = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || (lineno == 0 && line.starts_with('x')) {
                continue;
            }
            let mut parts = line.split(',');
            let (x, f) = (parts.next(), parts.next());
            let f: f64 = f
                .ok_or_else(|| Error::Config(format!("csv line {}: missing value", lineno + 1)))?
                .trim()
                .parse()
                .map_err(|e| Error::Config(format!("csv line {}: {}", lineno + 1, e)))?;
            let _x: f64 = x
                .unwrap()
                .trim()
                .parse()
                .map_err(|e| Error::Config(format!("csv line {}: {}", lineno + 1, e)))?;
            vals.push(f);
        }
        GridFunction::new(vals)
    }
}

/// β-Hölder norm of raw samples with spacing `h` (shared with kernel grids).
pub(crate) fn holder_norm_on_grid(values: &[f64], h: f64, beta: f64) -> Result<f64> {
    if beta <= 0.0 {
        return Err(Error::ParameterDomain(
            "holder exponent must be positive".into(),
        ));
    }
    // largest integer strictly smaller than beta
    let k = if beta.fract() == 0.0 {
        beta as usize - 1
    } else {
        beta.floor() as usize
    };
    let frac = beta - k as f64;
    let mut norm = 0.0;
    let mut level: Vec<f64> = values.to_vec();
    for ell in 0..=k {
        norm += level.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        if ell < k {
            level = nth_difference_once(&level, h);
        }
    }
    // level holds the ⌊β⌋-th derivative surrogate
    let mut quot = 0.0f64;
    let n = level.len();
    if (frac - 1.0).abs() < 1e-15 {
        // Lipschitz quotient: adjacent pairs dominate by telescoping
        for w in level.windows(2) {
            quot = quot.max((w[1] - w[0]).abs() / h);
        }
    } else {
        for i in 0..n {
            for j in (i + 1)..n {
                let dist = ((j - i) as f64) * h;
                quot = quot.max((level[j] - level[i]).abs() / dist.powf(frac));
            }
        }
    }
    Ok(norm + quot)
}

fn nth_difference_once(values: &[f64], h: f64) -> Vec<f64> {
    values.windows(2).map(|w| (w[1] - w[0]) / h).collect()
}

fn nth_difference(values: &[f64], h: f64, order: usize) -> Vec<f64> {
    let mut out = values.to_vec();
    for _ in 0..order {
        out = nth_difference_once(&out, h);
    }
    out
}
