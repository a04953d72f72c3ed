//! Gaussian special functions and closed-form moment helpers.

use statrs::function::erf;

/// Standard normal density.
pub fn norm_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

/// Standard normal c.d.f. `Φ(x)`.
pub fn norm_cdf(x: f64) -> f64 {
    0.5 * erf::erfc(-x / std::f64::consts::SQRT_2)
}

/// Upper tail `Φ̄(x) = 1 − Φ(x)`, accurate far into the tail.
pub fn norm_sf(x: f64) -> f64 {
    0.5 * erf::erfc(x / std::f64::consts::SQRT_2)
}

/// `E[(Z − a)_+]` for standard normal `Z`.
pub fn expect_pos_part(a: f64) -> f64 {
    norm_pdf(a) - a * norm_sf(a)
}

/// `E[(Z − a)_+^2] = (1 + a²)Φ̄(a) − aφ(a)` for standard normal `Z`.
pub fn expect_pos_part_sq(a: f64) -> f64 {
    (1.0 + a * a) * norm_sf(a) - a * norm_pdf(a)
}

/// Mean absolute deviation `E|X − c|` for `X ~ N(mu, sigma²)`.
pub fn normal_mad(mu: f64, sigma: f64, c: f64) -> f64 {
    let d = (c - mu) / sigma;
    sigma * (2.0 * norm_pdf(d) + d * (2.0 * norm_cdf(d) - 1.0))
}

/// Raw moments `E[Z^k]`, k = 1..4, for `Z ~ N(mu, sigma²)`.
pub fn normal_raw_moments(mu: f64, sigma: f64) -> [f64; 4] {
    let (m, s2) = (mu, sigma * sigma);
    [
        m,
        m * m + s2,
        m * m * m + 3.0 * m * s2,
        m * m * m * m + 6.0 * m * m * s2 + 3.0 * s2 * s2,
    ]
}

/// Raw moments `E[Z^k]`, k = 1..4, for `Z ~ Pois(lambda)`.
pub fn poisson_raw_moments(l: f64) -> [f64; 4] {
    [
        l,
        l + l * l,
        l + 3.0 * l * l + l * l * l,
        l + 7.0 * l * l + 6.0 * l * l * l + l * l * l * l,
    ]
}

/// Raw moments `E[Z^k]`, k = 1..4, for `Z ~ Ber(p)`.
pub fn bernoulli_raw_moments(p: f64) -> [f64; 4] {
    [p, p, p, p]
}

/// Raw moments `E[Z^k]`, k = 1..4, for `Z ~ Gamma(alpha, rate)`.
pub fn gamma_raw_moments(alpha: f64, rate: f64) -> [f64; 4] {
    let mut out = [0.0; 4];
    let mut acc = 1.0;
    for (k, slot) in out.iter_mut().enumerate() {
        acc *= (alpha + k as f64) / rate;
        *slot = acc;
    }
    out
}
