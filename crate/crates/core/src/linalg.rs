//! Small symmetric-matrix helpers on row-major `Vec<f64>` storage.

use crate::error::{Error, Result};
use nalgebra::DMatrix;

/// Symmetric eigendecomposition; returns eigenvalues (ascending) and the
/// orthonormal eigenvector matrix as columns.
pub fn sym_eigen(entries: &[f64], n: usize) -> Result<(Vec<f64>, DMatrix<f64>)> {
    if entries.len() != n * n {
        return Err(Error::DimensionMismatch(format!(
            "expected {}x{} matrix",
            n, n
        )));
    }
    let m = DMatrix::from_row_slice(n, n, entries);
    if !is_symmetric(entries, n, 1e-9 * norm_inf(entries).max(1.0)) {
        return Err(Error::Validation("matrix is not symmetric".into()));
    }
    let se = nalgebra::SymmetricEigen::new(m);
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&i, &j| se.eigenvalues[i].partial_cmp(&se.eigenvalues[j]).unwrap());
    let vals: Vec<f64> = idx.iter().map(|&i| se.eigenvalues[i]).collect();
    let mut vecs = DMatrix::zeros(n, n);
    for (col, &i) in idx.iter().enumerate() {
        vecs.set_column(col, &se.eigenvectors.column(i));
    }
    Ok((vals, vecs))
}

pub fn is_symmetric(entries: &[f64], n: usize, tol: f64) -> bool {
    for i in 0..n {
        for j in (i + 1)..n {
            if (entries[i * n + j] - entries[j * n + i]).abs() > tol {
                return false;
            }
        }
    }
    true
}

fn norm_inf(entries: &[f64]) -> f64 {
    entries.iter().fold(0.0, |acc, x| acc.max(x.abs()))
}

/// Largest eigenvalue of a symmetric matrix.
pub fn spectral_norm(entries: &[f64], n: usize) -> Result<f64> {
    let (vals, _) = sym_eigen(entries, n)?;
    Ok(vals.iter().fold(f64::NEG_INFINITY, |a, &b| a.max(b.abs())))
}

/// Smallest eigenvalue of a symmetric matrix.
pub fn min_eigenvalue(entries: &[f64], n: usize) -> Result<f64> {
    let (vals, _) = sym_eigen(entries, n)?;
    Ok(vals[0])
}

/// Maximum row sum norm `max_i Σ_j |a_ij|`.
pub fn row_sum_norm(entries: &[f64], n: usize) -> f64 {
    (0..n)
        .map(|i| (0..n).map(|j| entries[i * n + j].abs()).sum::<f64>())
        .fold(0.0, f64::max)
}

/// Moore–Penrose pseudoinverse of a symmetric matrix via eigendecomposition,
/// zeroing eigenvalues with `|λ| ≤ tol · max|λ|`.
pub fn pseudo_inverse(entries: &[f64], n: usize, tol: f64) -> Result<Vec<f64>> {
    let (vals, vecs) = sym_eigen(entries, n)?;
    let lmax = vals.iter().fold(0.0f64, |a, &b| a.max(b.abs()));
    let cut = tol * lmax;
    let mut out = vec![0.0; n * n];
    for k in 0..n {
        let lam = vals[k];
        if lam.abs() <= cut {
            continue;
        }
        let inv = 1.0 / lam;
        for i in 0..n {
            let vik = vecs[(i, k)];
            for j in 0..n {
                out[i * n + j] += inv * vik * vecs[(j, k)];
            }
        }
    }
    Ok(out)
}

/// `xᵀ A y` for row-major `A`.
pub fn quadratic_form(entries: &[f64], n: usize, x: &[f64], y: &[f64]) -> f64 {
    let mut acc = 0.0;
    for i in 0..n {
        let mut row = 0.0;
        for j in 0..n {
            row += entries[i * n + j] * y[j];
        }
        acc += x[i] * row;
    }
    acc
}

/// Row-major matrix product of two n×n matrices.
pub fn mat_mul(a: &[f64], b: &[f64], n: usize) -> Vec<f64> {
    let mut out = vec![0.0; n * n];
    for i in 0..n {
        for k in 0..n {
            let aik = a[i * n + k];
            if aik == 0.0 {
                continue;
            }
            for j in 0..n {
                out[i * n + j] += aik * b[k * n + j];
            }
        }
    }
    out
}
