use serde::{Deserialize, Serialize};

use super::eigen::{hermitian_eig, hermitian_eigenvalues, jacobi_svd};
use super::matrix::{c64, dot, vec_norm, ComplexMatrix};
use crate::error::{Error, Result};

/// Default relative tolerance for positivity claims.
pub const DEFAULT_TOL: f64 = 1e-9;

/// Evidence for a claim `M ⪰ 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PositivityCertificate {
    pub is_positive: bool,
    pub min_eigenvalue: f64,
    pub matrix_norm: f64,
    pub tolerance: f64,
}

impl PositivityCertificate {
    pub fn from_spectrum(min_eigenvalue: f64, matrix_norm: f64, tolerance: f64) -> Self {
        Self {
            is_positive: min_eigenvalue >= -Self::threshold_for(matrix_norm, tolerance),
            min_eigenvalue,
            matrix_norm,
            tolerance,
        }
    }

    fn threshold_for(norm: f64, tol: f64) -> f64 {
        tol * norm.max(1.0)
    }

    /// Magnitude below which a negative eigenvalue is treated as zero.
    pub fn threshold(&self) -> f64 {
        Self::threshold_for(self.matrix_norm, self.tolerance)
    }
}

/// Certifies positivity of the Hermitian part of `m`.
pub fn is_psd(m: &ComplexMatrix, tol: f64) -> Result<PositivityCertificate> {
    let values = hermitian_eigenvalues(m)?;
    let min = values.first().copied().unwrap_or(0.0);
    let max = values.last().copied().unwrap_or(0.0);
    Ok(PositivityCertificate::from_spectrum(min, min.abs().max(max.abs()), tol))
}

pub fn psd_sqrt(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    psd_sqrt_with_tol(m, DEFAULT_TOL)
}

/// Positive square root; eigenvalues in `[-tol·max(1,‖M‖), 0)` are clipped.
pub fn psd_sqrt_with_tol(m: &ComplexMatrix, tol: f64) -> Result<ComplexMatrix> {
    let e = hermitian_eig(m)?;
    let cert = PositivityCertificate::from_spectrum(e.min(), e.spectral_radius(), tol);
    if !cert.is_positive {
        return Err(Error::NotPsd {
            min_eigenvalue: cert.min_eigenvalue,
            threshold: cert.threshold(),
        });
    }
    Ok(e.apply(|x| x.max(0.0).sqrt()))
}

/// Returns `L` with `L* L = M`. This is the Hermitian square root.
pub fn gram_factor(m: &ComplexMatrix) -> Result<ComplexMatrix> {
    psd_sqrt(m)
}

/// Polar decomposition `X = U P` with `P = (X*X)^{1/2}` and `U` unitary.
/// On the kernel of `P`, `U` is an orthonormal completion.
pub fn polar_decompose(x: &ComplexMatrix) -> Result<(ComplexMatrix, ComplexMatrix)> {
    let n = x.ensure_square()?;
    let (isometry, p) = tall_polar(x)?;
    debug_assert_eq!(isometry.cols(), n);
    Ok((isometry, p))
}

/// Polar factors of an `m x n` matrix with `m ≥ n`: `X = Û P` where `Û` is
/// an `m x n` isometry (unitary when square) and `P = (X*X)^{1/2}`.
pub fn tall_polar(x: &ComplexMatrix) -> Result<(ComplexMatrix, ComplexMatrix)> {
    let (m, n) = x.shape();
    if m < n {
        return Err(Error::Shape(format!("polar factor of a wide {m}x{n} matrix")));
    }
    let svd = jacobi_svd(x)?;
    let sigma_max = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let cutoff = 1e-10 * sigma_max.max(1.0);

    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| svd.singular_values[b].total_cmp(&svd.singular_values[a]));

    let mut left: Vec<Option<Vec<c64>>> = vec![None; n];
    let mut basis: Vec<Vec<c64>> = Vec::with_capacity(n);
    for &k in &order {
        let s = svd.singular_values[k];
        if s <= cutoff {
            continue;
        }
        let col = svd.scaled_left.column(k);
        if let Some(u) = orthonormalize_against(&col, &basis) {
            basis.push(u.clone());
            left[k] = Some(u);
        }
    }
    let mut completion = complete_orthonormal(&basis, m, n - basis.len()).into_iter();
    let columns: Vec<Vec<c64>> = left
        .into_iter()
        .map(|u| u.unwrap_or_else(|| completion.next().expect("completion size")))
        .collect();

    // Û = W V*, P = V Σ V*
    let w = ComplexMatrix::from_columns(&columns);
    let v = &svd.right;
    let u = w.matmul(&v.adjoint());
    let mut vs = v.clone();
    for (k, &s) in svd.singular_values.iter().enumerate() {
        for i in 0..n {
            vs[(i, k)] *= s;
        }
    }
    let p = vs.matmul(&v.adjoint()).hermitian_part();
    Ok((u, p))
}

/// Removes the components of `x` along `basis` (twice, for stability) and
/// normalizes. Returns `None` when nothing substantial is left.
fn orthonormalize_against(x: &[c64], basis: &[Vec<c64>]) -> Option<Vec<c64>> {
    let start = vec_norm(x);
    if start == 0.0 {
        return None;
    }
    let mut y = x.to_vec();
    for _ in 0..2 {
        for b in basis {
            let c = dot(b, &y);
            for (yi, bi) in y.iter_mut().zip(b) {
                *yi -= c * bi;
            }
        }
    }
    let r = vec_norm(&y);
    if r <= 1e-8 * start {
        return None;
    }
    Some(y.into_iter().map(|z| z / r).collect())
}

/// `count` orthonormal vectors in `C^dim` orthogonal to `basis` (assumed
/// orthonormal), drawn from the standard basis by Gram–Schmidt.
pub fn complete_orthonormal(basis: &[Vec<c64>], dim: usize, count: usize) -> Vec<Vec<c64>> {
    let mut all: Vec<Vec<c64>> = basis.to_vec();
    let mut out = Vec::with_capacity(count);
    while out.len() < count {
        // pick the standard vector with the largest residual
        let best = (0..dim)
            .map(|i| {
                let resid: f64 = 1.0 - all.iter().map(|b| b[i].norm_sqr()).sum::<f64>();
                (i, resid)
            })
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .expect("dim > 0");
        let mut e = vec![c64::new(0.0, 0.0); dim];
        e[best.0] = c64::new(1.0, 0.0);
        let u = orthonormalize_against(&e, &all).expect("basis is not complete");
        all.push(u.clone());
        out.push(u);
    }
    out
}

/// `A^k`; `A^0 = I`.
pub fn matrix_power(a: &ComplexMatrix, k: u32) -> Result<ComplexMatrix> {
    let n = a.ensure_square()?;
    let mut result = ComplexMatrix::identity(n);
    let mut base = a.clone();
    let mut e = k;
    let mut first = true;
    while e > 0 {
        if e & 1 == 1 {
            result = if first { base.clone() } else { result.matmul(&base) };
            first = false;
        }
        e >>= 1;
        if e > 0 {
            base = base.matmul(&base);
        }
    }
    Ok(result)
}

/// Inverse by Gaussian elimination with partial pivoting. Fails when the
/// reciprocal condition number (from singular values) is below `1e-12`.
pub fn inverse(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    let n = a.ensure_square()?;
    let rc = reciprocal_condition(a)?;
    if rc < 1e-12 {
        return Err(Error::Singular { rcond: rc });
    }
    let mut m = a.clone();
    let mut inv = ComplexMatrix::identity(n);
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&i, &j| m[(i, col)].norm().total_cmp(&m[(j, col)].norm()))
            .expect("nonempty range");
        if m[(pivot, col)].norm() == 0.0 {
            return Err(Error::Singular { rcond: 0.0 });
        }
        if pivot != col {
            for j in 0..n {
                let t = m[(col, j)];
                m[(col, j)] = m[(pivot, j)];
                m[(pivot, j)] = t;
                let t = inv[(col, j)];
                inv[(col, j)] = inv[(pivot, j)];
                inv[(pivot, j)] = t;
            }
        }
        let d = m[(col, col)];
        for j in 0..n {
            m[(col, j)] /= d;
            inv[(col, j)] /= d;
        }
        for i in 0..n {
            if i == col {
                continue;
            }
            let f = m[(i, col)];
            if f.norm() == 0.0 {
                continue;
            }
            for j in 0..n {
                let mc = m[(col, j)];
                let ic = inv[(col, j)];
                m[(i, j)] -= f * mc;
                inv[(i, j)] -= f * ic;
            }
        }
    }
    Ok(inv)
}

/// `σ_min / σ_max`, or 0 for the zero matrix.
pub fn reciprocal_condition(a: &ComplexMatrix) -> Result<f64> {
    let svd = jacobi_svd(a)?;
    let max = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    let min = svd.singular_values.iter().cloned().fold(f64::INFINITY, f64::min);
    Ok(if max == 0.0 { 0.0 } else { min / max })
}
