//! Spectral helpers for symmetric matrices: inertia, kernels, pseudo-inverse.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::PerturbError;

/// Relative rank cutoff for the pseudo-inverse.
pub const RANK_CUTOFF: f64 = 1e-8;

/// Eigenvalues in ascending order with matching eigenvector columns.
pub fn sorted_eigen(h: &DMatrix<f64>) -> (Vec<f64>, DMatrix<f64>) {
    let sym = (h + h.transpose()) * 0.5;
    let eig = SymmetricEigen::new(sym);
    let mut order: Vec<usize> = (0..eig.eigenvalues.len()).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = DMatrix::from_fn(h.nrows(), order.len(), |r, c| eig.eigenvectors[(r, order[c])]);
    (values, vectors)
}

/// Number of eigenvalues below `-gap`; every eigenvalue must clear the gap.
pub fn morse_index(h: &DMatrix<f64>, gap: f64) -> Result<usize, PerturbError> {
    morse_bott_index(h, 0, gap)
}

/// Index of a Morse-Bott critical point: exactly `kernel_dim` eigenvalues may
/// lie in `[-gap, gap]`, the rest are counted by sign.
pub fn morse_bott_index(h: &DMatrix<f64>, kernel_dim: usize, gap: f64) -> Result<usize, PerturbError> {
    let (values, _) = sorted_eigen(h);
    if values.iter().any(|v| !v.is_finite()) {
        return Err(PerturbError::NonFinite);
    }
    let small: Vec<f64> = values.iter().copied().filter(|v| v.abs() <= gap).collect();
    if small.len() != kernel_dim {
        if kernel_dim == 0 {
            return Err(PerturbError::Degenerate { eigenvalue: small[0], gap });
        }
        return Err(PerturbError::KernelMismatch {
            expected: kernel_dim,
            got: small.len(),
        });
    }
    Ok(values.iter().filter(|&&v| v < -gap).count())
}

/// Smallest absolute eigenvalue.
pub fn min_abs_eigenvalue(h: &DMatrix<f64>) -> f64 {
    sorted_eigen(h).0.iter().fold(f64::INFINITY, |m, v| m.min(v.abs()))
}

/// Minimal-norm solution of `h x = rhs` through the spectral pseudo-inverse,
/// dropping eigenvalues below `RANK_CUTOFF * max |eigenvalue|`.
pub fn pseudo_inverse_solve(h: &DMatrix<f64>, rhs: &DVector<f64>) -> DVector<f64> {
    pseudo_inverse_solve_with(h, rhs, RANK_CUTOFF)
}

pub fn pseudo_inverse_solve_with(h: &DMatrix<f64>, rhs: &DVector<f64>, rel_cutoff: f64) -> DVector<f64> {
    let (values, vectors) = sorted_eigen(h);
    let scale = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let mut x = DVector::zeros(rhs.len());
    if scale == 0.0 {
        return x;
    }
    for (i, &v) in values.iter().enumerate() {
        if v.abs() > rel_cutoff * scale {
            let u = vectors.column(i);
            x += u * (u.dot(rhs) / v);
        }
    }
    x
}

/// Orthonormal basis (as columns) of the numerical kernel.
pub fn kernel_basis(h: &DMatrix<f64>, rel_cutoff: f64) -> DMatrix<f64> {
    let (values, vectors) = sorted_eigen(h);
    let scale = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let cols: Vec<DVector<f64>> = values
        .iter()
        .enumerate()
        .filter(|(_, v)| scale == 0.0 || v.abs() <= rel_cutoff * scale)
        .map(|(i, _)| vectors.column(i).into_owned())
        .collect();
    if cols.is_empty() {
        DMatrix::zeros(h.nrows(), 0)
    } else {
        DMatrix::from_columns(&cols)
    }
}
