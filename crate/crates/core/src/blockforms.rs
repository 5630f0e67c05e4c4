//! Structured block matrices built from a square operator `A`.
//!
//! Everything is materialized densely. Block `(r, s)` of an
//! `(n+1) x (n+1)` block matrix with `d x d` blocks occupies rows
//! `r·d .. (r+1)·d` and columns `s·d .. (s+1)·d`.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::linalg::{c64, matrix_power, ComplexMatrix};

fn require_positive(n: usize, what: &str) -> Result<()> {
    if n == 0 {
        Err(Error::InvalidArgument(format!("{what} must be at least 1")))
    } else {
        Ok(())
    }
}

/// `R_n(A)`: `(n+1)` block rows with `A` on the block subdiagonal.
pub fn build_rn(a: &ComplexMatrix, n: usize) -> Result<ComplexMatrix> {
    let d = a.ensure_square()?;
    require_positive(n, "n")?;
    let mut out = ComplexMatrix::zeros((n + 1) * d, (n + 1) * d);
    for r in 1..=n {
        out.set_block(r * d, (r - 1) * d, a);
    }
    Ok(out)
}

/// `Δ_n(A)`: block tridiagonal with `2I` on the diagonal, `A` below and `A*`
/// above.
pub fn build_delta(a: &ComplexMatrix, n: usize) -> Result<ComplexMatrix> {
    let d = a.ensure_square()?;
    require_positive(n, "n")?;
    let two = ComplexMatrix::identity(d).scale_real(2.0);
    let adj = a.adjoint();
    let mut out = ComplexMatrix::zeros((n + 1) * d, (n + 1) * d);
    for r in 0..=n {
        out.set_block(r * d, r * d, &two);
        if r > 0 {
            out.set_block(r * d, (r - 1) * d, a);
            out.set_block((r - 1) * d, r * d, &adj);
        }
    }
    Ok(out)
}

/// `Γ_n(A)`: Hermitian block Toeplitz with `2I` on the diagonal, `A^k` on
/// the k-th block subdiagonal and `(A*)^k` on the k-th superdiagonal.
pub fn build_gamma(a: &ComplexMatrix, n: usize) -> Result<ComplexMatrix> {
    build_power_toeplitz(a, n, 2.0)
}

/// The Toeplitz matrix of `Ā(r − s)` with `diag · I` on the diagonal.
/// `diag = 1` gives the norm-test matrix, `diag = 2` gives `Γ_n`.
pub(crate) fn build_power_toeplitz(a: &ComplexMatrix, n: usize, diag: f64) -> Result<ComplexMatrix> {
    let d = a.ensure_square()?;
    require_positive(n, "n")?;
    let mut coefficients = BTreeMap::new();
    coefficients.insert(0, ComplexMatrix::identity(d).scale_real(diag));
    let mut p = ComplexMatrix::identity(d);
    for k in 1..=n as i64 {
        p = p.matmul(a);
        coefficients.insert(-k, p.adjoint());
        coefficients.insert(k, p.clone());
    }
    let spec = BlockToeplitzSpec::new(d, n, coefficients)?;
    build_block_toeplitz(&spec, n + 1)
}

/// Coefficients of a block Toeplitz matrix, keyed by `r − s`.
#[derive(Debug, Clone)]
pub struct BlockToeplitzSpec {
    block_dim: usize,
    half_bandwidth: usize,
    coefficients: BTreeMap<i64, ComplexMatrix>,
    /// When set, coefficient `−j` is taken as the adjoint of coefficient `j`
    /// for every `j > 0`.
    pub enforce_hermitian: bool,
}

impl BlockToeplitzSpec {
    pub fn new(block_dim: usize, half_bandwidth: usize, coefficients: BTreeMap<i64, ComplexMatrix>) -> Result<Self> {
        if block_dim == 0 {
            return Err(Error::InvalidArgument("block dimension must be at least 1".into()));
        }
        for (&j, c) in &coefficients {
            if j.unsigned_abs() as usize > half_bandwidth {
                return Err(Error::InvalidArgument(format!(
                    "coefficient index {j} outside bandwidth {half_bandwidth}"
                )));
            }
            if c.shape() != (block_dim, block_dim) {
                return Err(Error::Shape(format!(
                    "coefficient {j} is {}x{}, expected {block_dim}x{block_dim}",
                    c.rows(),
                    c.cols()
                )));
            }
        }
        Ok(Self {
            block_dim,
            half_bandwidth,
            coefficients,
            enforce_hermitian: false,
        })
    }

    pub fn hermitian(mut self) -> Self {
        self.enforce_hermitian = true;
        self
    }

    pub fn block_dim(&self) -> usize {
        self.block_dim
    }

    pub fn half_bandwidth(&self) -> usize {
        self.half_bandwidth
    }

    /// Coefficient `j`, or the zero block when absent.
    pub fn coefficient(&self, j: i64) -> ComplexMatrix {
        if self.enforce_hermitian && j < 0 {
            if let Some(c) = self.coefficients.get(&-j) {
                return c.adjoint();
            }
        }
        self.coefficients
            .get(&j)
            .cloned()
            .unwrap_or_else(|| ComplexMatrix::zeros(self.block_dim, self.block_dim))
    }

    /// Largest `‖C_{−j} − C_j*‖_F` over the stored coefficients.
    pub fn hermitian_defect(&self) -> f64 {
        (0..=self.half_bandwidth as i64)
            .map(|j| self.coefficient(-j).distance(&self.coefficient(j).adjoint()))
            .fold(0.0, f64::max)
    }
}

/// `N_blocks x N_blocks` block matrix with block `(r, s)` = coefficient `r − s`.
pub fn build_block_toeplitz(spec: &BlockToeplitzSpec, n_blocks: usize) -> Result<ComplexMatrix> {
    require_positive(n_blocks, "block count")?;
    let d = spec.block_dim;
    let mut out = ComplexMatrix::zeros(n_blocks * d, n_blocks * d);
    let blocks: Vec<ComplexMatrix> = (-(n_blocks as i64 - 1)..n_blocks as i64)
        .map(|j| spec.coefficient(j))
        .collect();
    let offset = n_blocks as i64 - 1;
    for r in 0..n_blocks {
        for s in 0..n_blocks {
            let j = r as i64 - s as i64;
            let b = &blocks[(j + offset) as usize];
            if b.max_abs() != 0.0 {
                out.set_block(r * d, s * d, b);
            }
        }
    }
    Ok(out)
}

/// The Fejér-weighted Toeplitz matrix
/// `(1/(N+1)) · T` where `T` has first block row
/// `(2I, N·A*, (N−1)·A*², …, 2·A*^{N−1}, A*^N)`, i.e. block `(r, s)` is
/// `(N+1−|j|)·Ā(j)` for `j = r − s ≠ 0` and `2I` on the diagonal, all
/// scaled by `1/(N+1)`.
pub fn build_fejer_toeplitz(a: &ComplexMatrix, n: usize) -> Result<ComplexMatrix> {
    let d = a.ensure_square()?;
    require_positive(n, "N")?;
    let scale = 1.0 / (n as f64 + 1.0);
    let mut coefficients = BTreeMap::new();
    coefficients.insert(0, ComplexMatrix::identity(d).scale_real(2.0 * scale));
    let mut p = ComplexMatrix::identity(d);
    for k in 1..=n {
        p = p.matmul(a);
        let w = (n + 1 - k) as f64 * scale;
        coefficients.insert(k as i64, p.scale_real(w));
        coefficients.insert(-(k as i64), p.adjoint().scale_real(w));
    }
    let spec = BlockToeplitzSpec::new(d, n, coefficients)?;
    build_block_toeplitz(&spec, n + 1)
}

/// `Ā(n)`: `A^n` for `n ≥ 0`, `(A*)^{|n|}` for `n < 0`.
pub fn power_sequence(a: &ComplexMatrix, n: i64) -> Result<ComplexMatrix> {
    let k = u32::try_from(n.unsigned_abs()).map_err(|_| Error::InvalidArgument(format!("power {n} too large")))?;
    if n >= 0 {
        matrix_power(a, k)
    } else {
        matrix_power(&a.adjoint(), k)
    }
}

/// `M[indices, indices]`; indices must be strictly increasing and in range.
pub fn principal_submatrix(m: &ComplexMatrix, indices: &[usize]) -> Result<ComplexMatrix> {
    let n = m.ensure_square()?;
    if indices.is_empty() {
        return Err(Error::InvalidArgument("empty index list".into()));
    }
    for w in indices.windows(2) {
        if w[0] >= w[1] {
            return Err(Error::InvalidArgument(format!(
                "indices not strictly increasing at {} -> {}",
                w[0], w[1]
            )));
        }
    }
    if let Some(&bad) = indices.iter().find(|&&i| i >= n) {
        return Err(Error::InvalidArgument(format!("index {bad} out of range for size {n}")));
    }
    Ok(ComplexMatrix::from_fn(indices.len(), indices.len(), |i, j| {
        m[(indices[i], indices[j])]
    }))
}

/// Scalar indices covering the listed blocks of size `block_dim`.
pub fn block_indices(block_dim: usize, blocks: &[usize]) -> Vec<usize> {
    blocks
        .iter()
        .flat_map(|&b| (b * block_dim)..((b + 1) * block_dim))
        .collect()
}

/// `diag(s_0 I, s_1 I, …)` with `d x d` identity blocks.
pub fn block_scalar_diag(block_dim: usize, scalars: &[c64]) -> ComplexMatrix {
    let mut diag = Vec::with_capacity(block_dim * scalars.len());
    for &s in scalars {
        diag.extend(std::iter::repeat_n(s, block_dim));
    }
    ComplexMatrix::from_diag(&diag)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::inverse;

    fn scalar(z: c64) -> ComplexMatrix {
        ComplexMatrix::from_diag(&[z])
    }

    fn sample(d: usize, seed: u64) -> ComplexMatrix {
        // small deterministic pseudo-random matrix
        let mut x = seed.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        ComplexMatrix::from_fn(d, d, |_, _| {
            let mut next = || {
                x = x.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
                ((x >> 11) as f64 / (1u64 << 53) as f64) - 0.5
            };
            c64::new(next(), next())
        })
    }

    #[test]
    fn rn_scalar_and_nilpotency() {
        let r = build_rn(&scalar(c64::new(1.0, 0.0)), 1).unwrap();
        assert_eq!(r, ComplexMatrix::from_real_rows(&[&[0.0, 0.0], &[1.0, 0.0]]));
        let a = sample(3, 1);
        let r2 = build_rn(&a, 2).unwrap();
        assert_eq!(matrix_power(&r2, 3).unwrap().max_abs(), 0.0);
        assert!(build_rn(&a, 0).is_err());
    }

    #[test]
    fn delta_scalar_display() {
        let a = c64::new(0.3, -0.7);
        let d = build_delta(&scalar(a), 2).unwrap();
        let z = c64::new(0.0, 0.0);
        let two = c64::new(2.0, 0.0);
        let expected = ComplexMatrix::from_rows(&[&[two, a.conj(), z], &[a, two, a.conj()], &[z, a, two]]);
        assert_eq!(d, expected);
        let d0 = build_delta(&ComplexMatrix::zeros(2, 2), 3).unwrap();
        assert_eq!(d0, ComplexMatrix::identity(8).scale_real(2.0));
    }

    #[test]
    fn twice_real_part_of_identity_minus_rn() {
        // 2 Re(I − R_n(A)) = Δ_n(−A)
        let a = sample(2, 7);
        let n = 4;
        let x = &ComplexMatrix::identity(10) - &build_rn(&a, n).unwrap();
        let two_re = &x + &x.adjoint();
        assert!(two_re.max_abs_diff(&build_delta(&(-&a), n).unwrap()) < 1e-15);
    }

    #[test]
    fn gamma_small_cases() {
        assert_eq!(
            build_gamma(&ComplexMatrix::zeros(2, 2), 2).unwrap(),
            ComplexMatrix::identity(6).scale_real(2.0)
        );
        let a = c64::new(0.6, 0.8);
        let g = build_gamma(&scalar(a), 1).unwrap();
        let two = c64::new(2.0, 0.0);
        assert_eq!(g, ComplexMatrix::from_rows(&[&[two, a.conj()], &[a, two]]));
    }

    #[test]
    fn gamma_is_twice_real_part_of_neumann_sum() {
        // (I − R)^{-1} = I + R + … + R^n, and 2 Re of it is Γ_n(A)
        let a = sample(2, 3);
        let n = 3;
        let r = build_rn(&a, n).unwrap();
        let size = r.rows();
        let mut neumann = ComplexMatrix::identity(size);
        let mut p = ComplexMatrix::identity(size);
        for _ in 0..n {
            p = p.matmul(&r);
            neumann = &neumann + &p;
        }
        let inv = inverse(&(&ComplexMatrix::identity(size) - &r)).unwrap();
        assert!(inv.max_abs_diff(&neumann) < 1e-12);
        let two_re = &neumann + &neumann.adjoint();
        assert!(two_re.max_abs_diff(&build_gamma(&a, n).unwrap()) < 1e-14);
    }

    #[test]
    fn block_toeplitz_overlaps() {
        let a = sample(2, 11);
        let mut c = BTreeMap::new();
        c.insert(0, ComplexMatrix::identity(2).scale_real(2.0));
        c.insert(1, a.clone());
        c.insert(-1, a.adjoint());
        let spec = BlockToeplitzSpec::new(2, 1, c).unwrap();
        assert_eq!(build_block_toeplitz(&spec, 4).unwrap(), build_delta(&a, 3).unwrap());

        let mut c = BTreeMap::new();
        c.insert(0, scalar(c64::new(2.0, 0.0)));
        c.insert(1, scalar(c64::new(1.0, 0.0)));
        c.insert(-1, scalar(c64::new(1.0, 0.0)));
        let spec = BlockToeplitzSpec::new(1, 1, c).unwrap();
        let t = build_block_toeplitz(&spec, 3).unwrap();
        assert_eq!(
            t,
            ComplexMatrix::from_real_rows(&[&[2.0, 1.0, 0.0], &[1.0, 2.0, 1.0], &[0.0, 1.0, 2.0]])
        );
    }

    #[test]
    fn block_toeplitz_hermitian_flag_overwrites_negative_side() {
        let a = sample(2, 5);
        let mut c = BTreeMap::new();
        c.insert(0, ComplexMatrix::identity(2));
        c.insert(1, a.clone());
        c.insert(-1, ComplexMatrix::zeros(2, 2));
        let spec = BlockToeplitzSpec::new(2, 1, c).unwrap();
        assert!(spec.hermitian_defect() > 0.0);
        let non_herm = build_block_toeplitz(&spec, 2).unwrap();
        assert_eq!(non_herm.block(0, 2, 2, 2).max_abs(), 0.0);
        let spec = spec.hermitian();
        assert_eq!(spec.hermitian_defect(), 0.0);
        let t = build_block_toeplitz(&spec, 2).unwrap();
        assert_eq!(t.block(0, 2, 2, 2), a.adjoint());
    }

    #[test]
    fn block_toeplitz_rejects_mixed_dims() {
        let mut c = BTreeMap::new();
        c.insert(0, ComplexMatrix::identity(2));
        c.insert(1, ComplexMatrix::identity(3));
        assert!(matches!(BlockToeplitzSpec::new(2, 1, c), Err(Error::Shape(_))));
    }

    #[test]
    fn fejer_toeplitz_small() {
        let a = c64::new(0.4, 0.2);
        let f = build_fejer_toeplitz(&scalar(a), 1).unwrap();
        let two = c64::new(2.0, 0.0);
        let expected = ComplexMatrix::from_rows(&[&[two, a.conj()], &[a, two]]).scale_real(0.5);
        assert!(f.max_abs_diff(&expected) < 1e-16);

        let f0 = build_fejer_toeplitz(&ComplexMatrix::zeros(2, 2), 3).unwrap();
        assert_eq!(f0, ComplexMatrix::identity(8).scale_real(0.5));

        // first row (2, N a*, (N−1) a*², …) / (N+1) for N = 3
        let f = build_fejer_toeplitz(&scalar(a), 3).unwrap();
        let ac = a.conj();
        let row = [two, ac * 3.0, ac * ac * 2.0, ac * ac * ac];
        for (j, z) in row.iter().enumerate() {
            assert!((f[(0, j)] - z / 4.0).norm() < 1e-15);
        }
        assert!(build_fejer_toeplitz(&scalar(a), 0).is_err());
    }

    #[test]
    fn power_sequence_basics() {
        let a = sample(3, 9);
        assert_eq!(power_sequence(&a, 0).unwrap(), ComplexMatrix::identity(3));
        let neg2 = power_sequence(&a, -2).unwrap();
        assert!(neg2.max_abs_diff(&a.adjoint().matmul(&a.adjoint())) < 1e-15);
    }

    #[test]
    fn submatrix_errors_and_identity_selection() {
        let m = sample(4, 2);
        assert_eq!(principal_submatrix(&m, &[0, 1, 2, 3]).unwrap(), m);
        assert!(principal_submatrix(&m, &[1, 1]).is_err());
        assert!(principal_submatrix(&m, &[2, 1]).is_err());
        assert!(principal_submatrix(&m, &[0, 4]).is_err());
    }

    #[test]
    fn gamma_of_power_is_principal_submatrix() {
        // Γ_2(A²) sits in Γ_4(A) on block indices {0, 2, 4}
        let a = sample(2, 4);
        let big = build_gamma(&a, 4).unwrap();
        let sub = principal_submatrix(&big, &block_indices(2, &[0, 2, 4])).unwrap();
        let a2 = matrix_power(&a, 2).unwrap();
        assert!(sub.max_abs_diff(&build_gamma(&a2, 2).unwrap()) < 1e-15);
    }
}
