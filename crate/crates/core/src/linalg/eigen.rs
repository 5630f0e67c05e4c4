//! Cyclic Jacobi methods: two-sided for Hermitian eigenproblems, one-sided
//! (Hestenes) for the singular value decomposition.

use super::matrix::{c64, ComplexMatrix};
use crate::error::{Error, Result};

const MAX_SWEEPS: usize = 40;
const SVD_MAX_SWEEPS: usize = 60;
const OFF_DIAG_RTOL: f64 = 1e-13;

/// Eigenpairs of a Hermitian matrix, eigenvalues ascending.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    pub eigenvalues: Vec<f64>,
    /// Unitary; column `k` pairs with `eigenvalues[k]`.
    pub eigenvectors: ComplexMatrix,
}

impl EigenDecomposition {
    pub fn min(&self) -> f64 {
        self.eigenvalues[0]
    }

    pub fn max(&self) -> f64 {
        *self.eigenvalues.last().expect("nonempty spectrum")
    }

    /// Spectral norm of the source matrix.
    pub fn spectral_radius(&self) -> f64 {
        self.min().abs().max(self.max().abs())
    }

    pub fn eigenvector(&self, k: usize) -> Vec<c64> {
        self.eigenvectors.column(k)
    }

    /// `V f(Λ) V*`.
    pub fn apply(&self, f: impl Fn(f64) -> f64) -> ComplexMatrix {
        let n = self.eigenvalues.len();
        let v = &self.eigenvectors;
        let mut scaled = v.clone();
        for (k, &lam) in self.eigenvalues.iter().enumerate() {
            let s = f(lam);
            for i in 0..n {
                scaled[(i, k)] *= s;
            }
        }
        let mut out = scaled.matmul(&v.adjoint());
        // symmetric functions of a Hermitian matrix stay Hermitian
        for i in 0..n {
            out[(i, i)].im = 0.0;
            for j in (i + 1)..n {
                let z = (out[(i, j)] + out[(j, i)].conj()) * 0.5;
                out[(i, j)] = z;
                out[(j, i)] = z.conj();
            }
        }
        out
    }
}

fn check_finite(m: &ComplexMatrix) -> Result<()> {
    for i in 0..m.rows() {
        for (j, z) in m.row(i).iter().enumerate() {
            if !z.re.is_finite() || !z.im.is_finite() {
                return Err(Error::NonFinite { row: i, col: j });
            }
        }
    }
    Ok(())
}

/// Eigendecomposition of the Hermitian part of `m` by cyclic Jacobi
/// rotations.
pub fn hermitian_eig(m: &ComplexMatrix) -> Result<EigenDecomposition> {
    let (a, v) = jacobi(m, true)?;
    let n = a.rows();
    let v = v.expect("vectors requested");
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| a[(i, i)].re.total_cmp(&a[(j, j)].re));
    let eigenvalues = order.iter().map(|&k| a[(k, k)].re).collect();
    let eigenvectors = ComplexMatrix::from_fn(n, n, |i, k| v[(i, order[k])]);
    Ok(EigenDecomposition {
        eigenvalues,
        eigenvectors,
    })
}

/// Ascending eigenvalues of the Hermitian part of `m`, without vectors.
pub fn hermitian_eigenvalues(m: &ComplexMatrix) -> Result<Vec<f64>> {
    let (a, _) = jacobi(m, false)?;
    let mut values = a.diagonal_real();
    values.sort_by(f64::total_cmp);
    Ok(values)
}

fn jacobi(m: &ComplexMatrix, vectors: bool) -> Result<(ComplexMatrix, Option<ComplexMatrix>)> {
    let n = m.ensure_square()?;
    check_finite(m)?;
    let mut a = m.hermitian_part();
    let mut v = vectors.then(|| ComplexMatrix::identity(n));

    let total = a.frobenius_norm();
    let threshold = OFF_DIAG_RTOL * total;
    let off_norm = |a: &ComplexMatrix| -> f64 {
        let mut s = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                s += a[(i, j)].norm_sqr();
            }
        }
        (2.0 * s).sqrt()
    };

    let mut sweeps = 0;
    while off_norm(&a) > threshold {
        if sweeps == MAX_SWEEPS {
            return Err(Error::NoConvergence {
                method: "Jacobi eigensolver",
                iterations: sweeps,
                residual: off_norm(&a) / total.max(f64::MIN_POSITIVE),
            });
        }
        sweeps += 1;
        for p in 0..n {
            for q in (p + 1)..n {
                rotate_pair(&mut a, v.as_mut(), p, q);
            }
        }
    }
    Ok((a, v))
}

/// Annihilates `a[p][q]` with a unitary plane rotation `G`, `a ← G* a G`,
/// `v ← v G`.
fn rotate_pair(a: &mut ComplexMatrix, v: Option<&mut ComplexMatrix>, p: usize, q: usize) {
    let apq = a[(p, q)];
    let g = apq.norm();
    if g == 0.0 {
        return;
    }
    let app = a[(p, p)].re;
    let aqq = a[(q, q)].re;
    // tiny against both diagonal entries: rotating only adds rounding
    if g < 1e-300 || (app.abs() + g * 1e18 == app.abs() && aqq.abs() + g * 1e18 == aqq.abs()) {
        a[(p, q)] = c64::new(0.0, 0.0);
        a[(q, p)] = c64::new(0.0, 0.0);
        return;
    }
    let phase = apq / g;
    let theta = (aqq - app) / (2.0 * g);
    let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
    let t = if theta == 0.0 { 1.0 } else { t };
    let c = 1.0 / (t * t + 1.0).sqrt();
    let s = t * c;

    // G = [[c, s], [-s·conj(phase), c·conj(phase)]]
    let gpp = c64::new(c, 0.0);
    let gpq = c64::new(s, 0.0);
    let gqp = -phase.conj() * s;
    let gqq = phase.conj() * c;

    // a stays Hermitian: update columns p, q and mirror them into rows
    let n = a.rows();
    let data = a.data_mut();
    for k in 0..n {
        if k == p || k == q {
            continue;
        }
        let akp = data[k * n + p];
        let akq = data[k * n + q];
        let new_p = akp * gpp + akq * gqp;
        let new_q = akp * gpq + akq * gqq;
        data[k * n + p] = new_p;
        data[k * n + q] = new_q;
        data[p * n + k] = new_p.conj();
        data[q * n + k] = new_q.conj();
    }
    data[p * n + p] = c64::new(app - t * g, 0.0);
    data[q * n + q] = c64::new(aqq + t * g, 0.0);
    data[p * n + q] = c64::new(0.0, 0.0);
    data[q * n + p] = c64::new(0.0, 0.0);

    let Some(v) = v else { return };
    let rows = v.rows();
    let cols = v.cols();
    let vd = v.data_mut();
    for k in 0..rows {
        let vkp = vd[k * cols + p];
        let vkq = vd[k * cols + q];
        vd[k * cols + p] = vkp * gpp + vkq * gqp;
        vd[k * cols + q] = vkp * gpq + vkq * gqq;
    }
}

/// Thin SVD `X = W Σ V*` for an `m x n` matrix, `W` with orthogonal (not
/// yet normalized) columns `W_k = X v_k`.
#[derive(Debug, Clone)]
pub struct JacobiSvd {
    /// Singular values in the column order of `right`, not sorted.
    pub singular_values: Vec<f64>,
    /// `X V`; column `k` has norm `singular_values[k]`.
    pub scaled_left: ComplexMatrix,
    /// Unitary `n x n`.
    pub right: ComplexMatrix,
}

/// One-sided Jacobi SVD: orthogonalizes the columns of `x` by plane
/// rotations. Singular values carry high relative accuracy, which matters
/// for polar factors of nearly singular matrices.
pub fn jacobi_svd(x: &ComplexMatrix) -> Result<JacobiSvd> {
    check_finite(x)?;
    let (m, n) = x.shape();
    // work column-major for cheap column access
    let mut cols: Vec<Vec<c64>> = (0..n).map(|j| x.column(j)).collect();
    let mut v: Vec<Vec<c64>> = (0..n)
        .map(|j| {
            let mut e = vec![c64::new(0.0, 0.0); n];
            e[j] = c64::new(1.0, 0.0);
            e
        })
        .collect();
    let eps = f64::EPSILON;

    let mut converged = false;
    let mut sweeps = 0;
    while !converged {
        if sweeps == SVD_MAX_SWEEPS {
            return Err(Error::NoConvergence {
                method: "one-sided Jacobi SVD",
                iterations: sweeps,
                residual: f64::NAN,
            });
        }
        sweeps += 1;
        converged = true;
        for p in 0..n {
            for q in (p + 1)..n {
                let alpha: f64 = cols[p].iter().map(|z| z.norm_sqr()).sum();
                let beta: f64 = cols[q].iter().map(|z| z.norm_sqr()).sum();
                let gamma: c64 = cols[p].iter().zip(&cols[q]).map(|(a, b)| a.conj() * b).sum();
                let g = gamma.norm();
                if g == 0.0 || g <= eps * (alpha * beta).sqrt() {
                    continue;
                }
                converged = false;
                let phase = gamma / g;
                let zeta = (beta - alpha) / (2.0 * g);
                let t = if zeta == 0.0 {
                    1.0
                } else {
                    zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt())
                };
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                let rot = |xp: &mut Vec<c64>, xq: &mut Vec<c64>| {
                    for (a, b) in xp.iter_mut().zip(xq.iter_mut()) {
                        let bq = *b * phase.conj();
                        let ap = *a;
                        *a = ap * c - bq * s;
                        *b = ap * s + bq * c;
                    }
                };
                let (lo, hi) = cols.split_at_mut(q);
                rot(&mut lo[p], &mut hi[0]);
                let (lo, hi) = v.split_at_mut(q);
                rot(&mut lo[p], &mut hi[0]);
            }
        }
    }

    let singular_values = cols
        .iter()
        .map(|c| c.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt())
        .collect();
    let scaled_left = ComplexMatrix::from_fn(m, n, |i, j| cols[j][i]);
    let right = ComplexMatrix::from_fn(n, n, |i, j| v[j][i]);
    Ok(JacobiSvd {
        singular_values,
        scaled_left,
        right,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn reconstruct(e: &EigenDecomposition) -> ComplexMatrix {
        e.apply(|x| x)
    }

    #[test]
    fn diagonal_input_is_sorted() {
        let m = ComplexMatrix::from_real_diag(&[3.0, 1.0]);
        let e = hermitian_eig(&m).unwrap();
        assert_eq!(e.eigenvalues, vec![1.0, 3.0]);
        // eigenvectors form a permutation
        let v = &e.eigenvectors;
        assert!((v[(1, 0)].norm() - 1.0).abs() < 1e-15);
        assert!((v[(0, 1)].norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn real_symmetric_two_by_two() {
        let m = ComplexMatrix::from_real_rows(&[&[2.0, -1.0], &[-1.0, 2.0]]);
        let e = hermitian_eig(&m).unwrap();
        assert!((e.eigenvalues[0] - 1.0).abs() < 1e-14);
        assert!((e.eigenvalues[1] - 3.0).abs() < 1e-14);
        assert!(reconstruct(&e).max_abs_diff(&m) < 1e-14);
    }

    #[test]
    fn pauli_y_like() {
        let i = c64::new(0.0, 1.0);
        let z = c64::new(0.0, 0.0);
        let m = ComplexMatrix::from_rows(&[&[z, i], &[-i, z]]);
        let e = hermitian_eig(&m).unwrap();
        assert!((e.eigenvalues[0] + 1.0).abs() < 1e-14);
        assert!((e.eigenvalues[1] - 1.0).abs() < 1e-14);
        assert!(reconstruct(&e).max_abs_diff(&m) < 1e-14);
    }

    #[test]
    fn zero_matrix_needs_no_sweeps() {
        let e = hermitian_eig(&ComplexMatrix::zeros(3, 3)).unwrap();
        assert_eq!(e.eigenvalues, vec![0.0; 3]);
    }

    #[test]
    fn rejects_rectangular_and_nan() {
        assert!(matches!(
            hermitian_eig(&ComplexMatrix::zeros(2, 3)),
            Err(Error::NotSquare { rows: 2, cols: 3 })
        ));
        let mut m = ComplexMatrix::identity(2);
        m[(0, 1)] = c64::new(f64::INFINITY, 0.0);
        assert!(matches!(hermitian_eig(&m), Err(Error::NonFinite { .. })));
    }

    #[test]
    fn svd_of_rank_one() {
        let x = ComplexMatrix::from_real_rows(&[&[1.0, 1.0], &[1.0, 1.0]]);
        let s = jacobi_svd(&x).unwrap();
        let mut sv = s.singular_values.clone();
        sv.sort_by(f64::total_cmp);
        assert!(sv[0].abs() < 1e-15);
        assert!((sv[1] - 2.0).abs() < 1e-14);
        let back = s.scaled_left.matmul(&s.right.adjoint());
        assert!(back.max_abs_diff(&x) < 1e-14);
    }
}
