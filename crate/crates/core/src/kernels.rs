//! Kernel dictionaries and the dictionary-optimized trade-off constants.
//!
//! Each constant reported here is one-sided by construction: any dictionary
//! member is feasible for the defining supremum, so the dictionary maximum
//! certifies a lower bound on it; the compact-support dictionary minimum
//! certifies an upper bound on the Sobolev infimum. Norms are grid
//! surrogates (finite differences plus maximal difference quotients).

use crate::error::{Error, Result};
use crate::grid::holder_norm_on_grid;
use serde::{Deserialize, Serialize};

/// A parametrized kernel shape.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub enum KernelShape {
    /// `exp(−x²/a)`, unbounded support.
    GaussBump { a: f64 },
    /// `(1 − 4(x/width)²)²` on `[−width/2, width/2]`.
    QuarticBump { width: f64 },
    /// `cos²(π x/width)` on `[−width/2, width/2]`.
    CosSqBump { width: f64 },
}

impl KernelShape {
    pub fn eval(&self, x: f64) -> f64 {
        match self {
            KernelShape::GaussBump { a } => (-x * x / a).exp(),
            KernelShape::QuarticBump { width } => {
                let u = x / width;
                if u.abs() <= 0.5 {
                    (1.0 - 4.0 * u * u).powi(2)
                } else {
                    0.0
                }
            }
            KernelShape::CosSqBump { width } => {
                let u = x / width;
                if u.abs() <= 0.5 {
                    (std::f64::consts::PI * u).cos().powi(2)
                } else {
                    0.0
                }
            }
        }
    }

    /// Half-width of the evaluation window.
    fn eval_radius(&self) -> f64 {
        match self {
            KernelShape::GaussBump { a } => (8.0 * a.max(0.25)).sqrt().max(6.0),
            KernelShape::QuarticBump { width } | KernelShape::CosSqBump { width } => 0.75 * width,
        }
    }

    pub fn compact_support_half_width(&self) -> Option<f64> {
        match self {
            KernelShape::GaussBump { .. } => None,
            KernelShape::QuarticBump { width } | KernelShape::CosSqBump { width } => {
                Some(width / 2.0)
            }
        }
    }

    pub fn name(&self) -> String {
        match self {
            KernelShape::GaussBump { a } => format!("gauss(a={})", a),
            KernelShape::QuarticBump { width } => format!("quartic(w={})", width),
            KernelShape::CosSqBump { width } => format!("cos2(w={})", width),
        }
    }
}

/// One dictionary member with grid-evaluated norms.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct DictEntry {
    pub shape: KernelShape,
    pub k0: f64,
    pub sup_norm: f64,
    pub l2_norm_sq: f64,
}

impl DictEntry {
    const GRID_POINTS: usize = 1601;

    fn build(shape: KernelShape) -> Self {
        let l = shape.eval_radius();
        let (samples, _) = Self::samples(&shape, l);
        let h = 2.0 * l / (Self::GRID_POINTS - 1) as f64;
        let sup = samples.iter().fold(0.0f64, |a, v| a.max(v.abs()));
        let l2: f64 = samples.iter().map(|v| v * v).sum::<f64>() * h;
        DictEntry {
            k0: shape.eval(0.0),
            sup_norm: sup,
            l2_norm_sq: l2,
            shape,
        }
    }

    fn samples(shape: &KernelShape, l: f64) -> (Vec<f64>, f64) {
        let n = Self::GRID_POINTS;
        let h = 2.0 * l / (n - 1) as f64;
        ((0..n).map(|i| shape.eval(-l + i as f64 * h)).collect(), h)
    }

    /// Grid surrogate of `‖K‖_{C^β(ℝ)}`.
    pub fn holder_norm(&self, beta: f64) -> Result<f64> {
        let l = self.shape.eval_radius();
        let (samples, h) = Self::samples(&self.shape, l);
        holder_norm_on_grid(&samples, h, beta)
    }

    /// Grid surrogate of the Sobolev norm `(‖K‖₂² + ‖K^{(β)}‖₂²)^{1/2}` after
    /// L²-normalization; compact-support members only.
    pub fn sobolev_norm_normalized(&self, beta: u32) -> Result<f64> {
        if self.shape.compact_support_half_width().is_none() {
            return Err(Error::Unsupported(
                "sobolev entries need compact support".into(),
            ));
        }
        let l = self.shape.eval_radius();
        let (mut samples, h) = Self::samples(&self.shape, l);
        let scale = self.l2_norm_sq.sqrt().recip();
        for v in samples.iter_mut() {
            *v *= scale;
        }
        let mut deriv = samples.clone();
        for _ in 0..beta {
            deriv = deriv.windows(2).map(|w| (w[1] - w[0]) / h).collect();
        }
        let dsq: f64 = deriv.iter().map(|v| v * v).sum::<f64>() * h;
        Ok((1.0 + dsq).sqrt())
    }
}

/// The kernel dictionary used by the scenario constants.
#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct KernelDictionary {
    pub entries: Vec<DictEntry>,
}

impl KernelDictionary {
    /// Gaussian bumps over a width ladder plus compactly supported bumps.
    pub fn standard() -> Self {
        let mut entries = Vec::new();
        for a in [0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 64.0, 256.0] {
            entries.push(DictEntry::build(KernelShape::GaussBump { a }));
        }
        for width in [0.25, 0.5, 1.0] {
            entries.push(DictEntry::build(KernelShape::QuarticBump { width }));
            entries.push(DictEntry::build(KernelShape::CosSqBump { width }));
        }
        KernelDictionary { entries }
    }

    /// Dictionary lower bound for
    /// `γ(R,β) = sup_{K(0)=1} (‖K‖₂^{-1} (1 − ‖K‖_{C^β}/R)_+)²`.
    pub fn gamma(&self, r: f64, beta: f64) -> Result<f64> {
        if r <= 0.0 {
            return Err(Error::ParameterDomain("radius must be positive".into()));
        }
        let mut best = 0.0f64;
        for e in &self.entries {
            if (e.k0 - 1.0).abs() > 1e-12 {
                continue;
            }
            let holder = e.holder_norm(beta)?;
            let clamp = (1.0 - holder / r).max(0.0);
            best = best.max(clamp * clamp / e.l2_norm_sq);
        }
        Ok(best)
    }

    /// Dictionary lower bound for `γ̄(R,β,C,a)`, positive only when `a+1 < R`.
    pub fn gamma_bar(&self, r: f64, beta: f64, c: f64, a: f64) -> Result<f64> {
        if !(0.0..r).contains(&a) {
            return Err(Error::ParameterDomain("need 0 <= a < R".into()));
        }
        let ra = r - a;
        let mut best = 0.0f64;
        for e in &self.entries {
            if (e.k0 - 1.0).abs() > 1e-12 {
                continue;
            }
            let holder = e.holder_norm(beta)?;
            let clamp = (1.0 - holder / ra).max(0.0);
            let damp = (-c * ra * ra * e.l2_norm_sq / (holder * holder)).exp();
            best = best.max(clamp * clamp / e.l2_norm_sq * damp);
        }
        Ok(best)
    }

    /// Dictionary lower bound for the modulus-of-continuity constant
    /// `γ_Low(R,β)`; each member is rescaled to the feasibility boundary
    /// `‖cK‖_{C^β} = R`, where the objective `c^{1/β}/‖K‖₂²` is maximal.
    pub fn gamma_low(&self, r: f64, beta: f64) -> Result<f64> {
        let lead = (2.0 * beta).powi(2)
            / (2.0f64.powf(1.0 / beta) * (2.0 * beta + 1.0).powf(2.0 + 1.0 / beta));
        let mut best = 0.0f64;
        for e in &self.entries {
            if e.k0 <= 0.0 {
                continue;
            }
            let holder = e.holder_norm(beta)?;
            let c = r / holder;
            let value = lead * (c * e.k0).powf(2.0 + 1.0 / beta) / (c * c * e.l2_norm_sq);
            best = best.max(value);
        }
        Ok(best)
    }

    /// Dictionary upper bound for
    /// `Γ_β = inf {‖K‖_{S^β} : ‖K‖₂ = 1, supp K ⊂ [−1/2, 1/2]}` (integer β).
    pub fn gamma_upper_sobolev(&self, beta: u32) -> Result<f64> {
        let mut best = f64::INFINITY;
        for e in &self.entries {
            match e.shape.compact_support_half_width() {
                Some(hw) if hw <= 0.5 + 1e-12 => {
                    best = best.min(e.sobolev_norm_normalized(beta)?);
                }
                _ => {}
            }
        }
        if !best.is_finite() {
            return Err(Error::Config(
                "dictionary has no compactly supported member".into(),
            ));
        }
        Ok(best)
    }
}
