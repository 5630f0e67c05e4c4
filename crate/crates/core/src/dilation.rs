//! Finite unitary dilations, checks of supplied 2-dilations, and the von
//! Neumann inequality.

use serde::{Deserialize, Serialize};

use crate::blockforms::build_gamma;
use crate::error::{Error, Result};
use crate::linalg::{
    c64, inverse, is_psd, jacobi_svd, matrix_power, ComplexMatrix, PositivityCertificate, DEFAULT_TOL,
};
use crate::radius::operator_norm;

const NORM_SLACK: f64 = 1e-9;
/// Unitarity and isometry tolerance.
pub const UNITARY_TOL: f64 = 1e-9;
/// Tolerance for compression identities.
pub const COMPRESSION_TOL: f64 = 1e-7;
pub const DEFAULT_SAMPLES: usize = 4096;

/// A unitary `U` on `m` copies of the source space whose compression to the
/// first copy reproduces `A^k` for `k ≤ horizon`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct DilationBundle {
    pub u: ComplexMatrix,
    pub embed_dim: usize,
    pub horizon: usize,
    pub source: ComplexMatrix,
    /// `‖A D_A − D_{A*} A‖_F` for the defect operators used.
    pub defect_residual: f64,
}

impl DilationBundle {
    pub fn block_dim(&self) -> usize {
        self.source.rows()
    }

    /// `‖U*U − I‖_F`.
    pub fn unitarity_residual(&self) -> f64 {
        let m = self.u.rows();
        self.u.adjoint_mul(&self.u).distance(&ComplexMatrix::identity(m))
    }

    /// `‖P U^k P − A^k‖_F` for `k = 1..=horizon`.
    pub fn compression_residuals(&self) -> Vec<f64> {
        let d = self.block_dim();
        let mut uk = ComplexMatrix::identity(self.u.rows());
        let mut ak = ComplexMatrix::identity(d);
        (1..=self.horizon)
            .map(|_| {
                uk = uk.matmul(&self.u);
                ak = ak.matmul(&self.source);
                uk.block(0, 0, d, d).distance(&ak)
            })
            .collect()
    }

    /// The isometry embedding the source space as the first block.
    pub fn embedding(&self) -> ComplexMatrix {
        first_block_embedding(self.block_dim(), self.embed_dim)
    }
}

/// `[I; 0; …; 0]` with `blocks` block rows of size `d`.
pub fn first_block_embedding(d: usize, blocks: usize) -> ComplexMatrix {
    let mut v = ComplexMatrix::zeros(d * blocks, d);
    v.set_block(0, 0, &ComplexMatrix::identity(d));
    v
}

/// `(I − A*A)^{1/2}` for a contraction, built from the SVD of `A` so that
/// singular values at 1 do not lose half their digits.
pub fn defect_operator(a: &ComplexMatrix) -> Result<ComplexMatrix> {
    let svd = jacobi_svd(a)?;
    let norm = svd.singular_values.iter().cloned().fold(0.0, f64::max);
    if norm > 1.0 + NORM_SLACK {
        return Err(Error::Domain(format!("‖A‖ = {norm:.12} exceeds 1")));
    }
    let z = &svd.right;
    let c: Vec<c64> = svd
        .singular_values
        .iter()
        .map(|&s| {
            let s = s.min(1.0);
            c64::new(((1.0 - s) * (1.0 + s)).sqrt(), 0.0)
        })
        .collect();
    Ok(z.matmul(&ComplexMatrix::from_diag(&c))
        .matmul(&z.adjoint())
        .hermitian_part())
}

/// `D_{A*} = I − A(I + D_A)^{-1}A*`, which intertwines exactly with `D_A`.
fn adjoint_defect(a: &ComplexMatrix, d_a: &ComplexMatrix) -> Result<ComplexMatrix> {
    let id = ComplexMatrix::identity(a.rows());
    let middle = inverse(&(&id + d_a))?;
    Ok((&id - &a.matmul(&middle).matmul(&a.adjoint())).hermitian_part())
}

/// Unitary on `(horizon + 1)` copies of the space:
///
/// ```text
/// [ A    0  …  0  D_{A*} ]
/// [ D_A  0  …  0  −A*    ]
/// [ 0    I  …  0  0      ]
/// [ ⋮       ⋱     ⋮      ]
/// [ 0    0  …  I  0      ]
/// ```
pub fn build_unitary_dilation(a: &ComplexMatrix, horizon: usize) -> Result<DilationBundle> {
    let d = a.ensure_square()?;
    if horizon == 0 {
        return Err(Error::InvalidArgument("horizon must be at least 1".into()));
    }
    let norm = operator_norm(a)?;
    if norm > 1.0 + NORM_SLACK {
        return Err(Error::Domain(format!("‖A‖ = {norm:.12} exceeds 1")));
    }
    let a_adj = a.adjoint();
    let d_a = defect_operator(a)?;
    let d_a_adj = adjoint_defect(a, &d_a)?;
    let defect_residual = a.matmul(&d_a).distance(&d_a_adj.matmul(a));

    let n = horizon;
    let mut u = ComplexMatrix::zeros((n + 1) * d, (n + 1) * d);
    let id = ComplexMatrix::identity(d);
    u.set_block(0, 0, a);
    u.set_block(d, 0, &d_a);
    for j in 1..n {
        u.set_block((j + 1) * d, j * d, &id);
    }
    u.set_block(0, n * d, &d_a_adj);
    u.set_block(d, n * d, &(-&a_adj));

    let bundle = DilationBundle {
        u,
        embed_dim: n + 1,
        horizon,
        source: a.clone(),
        defect_residual,
    };
    let residual = bundle.unitarity_residual();
    if residual > UNITARY_TOL {
        return Err(Error::Numerical(format!(
            "dilation is not unitary (residual {residual:.3e})"
        )));
    }
    Ok(bundle)
}

/// Result of checking a supplied `(U, V)` against `A^k = 2V*U^kV`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TwoDilationReport {
    pub horizon: usize,
    /// `‖2V*U^kV − A^k‖_F` for `k = 1..=horizon`.
    pub identity_residuals: Vec<f64>,
    pub identity_holds: bool,
    /// `‖E − E²/(n+1)‖_F` for the all-identity block matrix `E`.
    pub idempotence_residual: f64,
    /// `‖2V̲*(DED*)V̲ − Γ_n(A)‖_F`.
    pub gamma_residual: f64,
    /// Positivity of `2V̲*(DED*)V̲`, certified on its own.
    pub conjugate_certificate: PositivityCertificate,
}

impl TwoDilationReport {
    pub fn holds(&self) -> bool {
        self.identity_holds && self.conjugate_certificate.is_positive && self.gamma_residual <= COMPRESSION_TOL
    }
}

pub fn verify_two_dilation(
    a: &ComplexMatrix,
    u: &ComplexMatrix,
    v: &ComplexMatrix,
    horizon: usize,
) -> Result<TwoDilationReport> {
    let d = a.ensure_square()?;
    let m = u.ensure_square()?;
    if v.shape() != (m, d) {
        return Err(Error::Shape(format!(
            "V is {}x{}, expected {m}x{d}",
            v.rows(),
            v.cols()
        )));
    }
    if horizon == 0 {
        return Err(Error::InvalidArgument("horizon must be at least 1".into()));
    }
    let unitary = u.adjoint_mul(u).distance(&ComplexMatrix::identity(m));
    if unitary > UNITARY_TOL {
        return Err(Error::Domain(format!("U is not unitary (residual {unitary:.3e})")));
    }
    let isometry = v.adjoint_mul(v).distance(&ComplexMatrix::identity(d));
    if isometry > UNITARY_TOL {
        return Err(Error::Domain(format!("V is not an isometry (residual {isometry:.3e})")));
    }

    let n = horizon;
    let mut powers = vec![ComplexMatrix::identity(m)];
    for k in 1..=n {
        powers.push(powers[k - 1].matmul(u));
    }
    let identity_residuals: Vec<f64> = (1..=n)
        .map(|k| {
            let lhs = v.adjoint_mul(&powers[k].matmul(v)).scale_real(2.0);
            Ok(lhs.distance(&matrix_power(a, k as u32)?))
        })
        .collect::<Result<_>>()?;
    let identity_holds = identity_residuals.iter().all(|&r| r <= COMPRESSION_TOL);

    // E has every block equal to I; D = diag(I, U, …, U^n)
    let blocks = n + 1;
    let id = ComplexMatrix::identity(m);
    let mut e = ComplexMatrix::zeros(blocks * m, blocks * m);
    let mut dmat = ComplexMatrix::zeros(blocks * m, blocks * m);
    for (r, power) in powers.iter().enumerate() {
        dmat.set_block(r * m, r * m, power);
        for s in 0..blocks {
            e.set_block(r * m, s * m, &id);
        }
    }
    let idempotence_residual = e.distance(&e.matmul(&e).scale_real(1.0 / blocks as f64));
    let ded = dmat.matmul(&e).matmul(&dmat.adjoint()).scale_real(2.0);
    let vbar = ComplexMatrix::block_diag_repeat(v, blocks);
    let conj = vbar.adjoint_mul(&ded.matmul(&vbar)).hermitian_part();
    let conjugate_certificate = is_psd(&conj, DEFAULT_TOL)?;
    let gamma_residual = conj.distance(&build_gamma(a, n)?);

    Ok(TwoDilationReport {
        horizon,
        identity_residuals,
        identity_holds,
        idempotence_residual,
        gamma_residual,
        conjugate_certificate,
    })
}

/// `p(z) = b_0 + b_1 z + … + b_m z^m`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Polynomial {
    coefficients: Vec<c64>,
}

impl Polynomial {
    pub fn new(coefficients: Vec<c64>) -> Result<Self> {
        if coefficients.is_empty() {
            return Err(Error::InvalidArgument(
                "polynomial needs at least one coefficient".into(),
            ));
        }
        if let Some(k) = coefficients.iter().position(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::NonFinite { row: k, col: 0 });
        }
        Ok(Self { coefficients })
    }

    pub fn from_real(coefficients: &[f64]) -> Result<Self> {
        Self::new(coefficients.iter().map(|&x| c64::new(x, 0.0)).collect())
    }

    /// `z^n`.
    pub fn monomial(n: usize) -> Self {
        let mut coefficients = vec![c64::new(0.0, 0.0); n + 1];
        coefficients[n] = c64::new(1.0, 0.0);
        Self { coefficients }
    }

    pub fn coefficients(&self) -> &[c64] {
        &self.coefficients
    }

    pub fn degree(&self) -> usize {
        self.coefficients.len() - 1
    }

    pub fn eval(&self, z: c64) -> c64 {
        self.coefficients
            .iter()
            .rev()
            .fold(c64::new(0.0, 0.0), |acc, &b| acc * z + b)
    }

    /// `p(A)` by Horner's rule.
    pub fn eval_matrix(&self, a: &ComplexMatrix) -> Result<ComplexMatrix> {
        let d = a.ensure_square()?;
        let id = ComplexMatrix::identity(d);
        Ok(self
            .coefficients
            .iter()
            .rev()
            .fold(ComplexMatrix::zeros(d, d), |acc, &b| &acc.matmul(a) + &id.scale(b)))
    }

    /// `Σ k |b_k|`, a bound for `|p'|` on the unit circle.
    pub fn derivative_bound(&self) -> f64 {
        self.coefficients
            .iter()
            .enumerate()
            .map(|(k, b)| k as f64 * b.norm())
            .sum()
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct VonNeumannReport {
    /// `‖p(A)‖`.
    pub operator_value: f64,
    /// Largest `|p(z)|` over the sampled circle points.
    pub sampled_sup: f64,
    /// Lipschitz pad added to the sampled supremum.
    pub padding: f64,
    pub holds: bool,
}

/// Compares `‖p(A)‖` with the sup of `|p|` on the circle, padded by
/// `Σ k|b_k| · 2π/samples` so that sampling cannot undercut the true sup.
pub fn von_neumann_check(a: &ComplexMatrix, p: &Polynomial, samples: usize) -> Result<VonNeumannReport> {
    a.ensure_square()?;
    if samples == 0 {
        return Err(Error::InvalidArgument("samples must be positive".into()));
    }
    let norm = operator_norm(a)?;
    if norm > 1.0 + NORM_SLACK {
        return Err(Error::Domain(format!("‖A‖ = {norm:.12} exceeds 1")));
    }
    let operator_value = operator_norm(&p.eval_matrix(a)?)?;
    let sampled_sup = (0..samples)
        .map(|k| {
            let t = std::f64::consts::TAU * k as f64 / samples as f64;
            p.eval(c64::from_polar(1.0, t)).norm()
        })
        .fold(0.0, f64::max);
    let padding = p.derivative_bound() * std::f64::consts::TAU / samples as f64;
    Ok(VonNeumannReport {
        operator_value,
        sampled_sup,
        padding,
        holds: operator_value <= sampled_sup + padding + 1e-6,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn scalar_dilation_powers() {
        let a = ComplexMatrix::from_real_diag(&[0.5]);
        let b = build_unitary_dilation(&a, 3).unwrap();
        assert_eq!(b.u.shape(), (4, 4));
        let mut uk = ComplexMatrix::identity(4);
        for k in 1..=3 {
            uk = uk.matmul(&b.u);
            assert!((uk[(0, 0)].re - 0.5f64.powi(k)).abs() < 1e-14);
        }
        assert!(b.unitarity_residual() < 1e-14);
    }

    #[test]
    fn nilpotent_dilation() {
        let a = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]);
        let b = build_unitary_dilation(&a, 2).unwrap();
        assert!(b.compression_residuals().iter().all(|&r| r < 1e-14));
        assert!(b.defect_residual < 1e-14);
    }

    #[test]
    fn unitary_source_has_zero_defects() {
        let a = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[1.0, 0.0]]);
        let b = build_unitary_dilation(&a, 3).unwrap();
        assert!(b.u.block(2, 0, 2, 2).max_abs() < 1e-15);
        assert!(b.compression_residuals().iter().all(|&r| r < 1e-14));
    }

    #[test]
    fn rejects_non_contractions() {
        let a = ComplexMatrix::identity(2).scale_real(1.01);
        assert!(matches!(build_unitary_dilation(&a, 2), Err(Error::Domain(_))));
    }

    #[test]
    fn two_dilation_from_halved_nilpotent() {
        let t = ComplexMatrix::from_real_rows(&[&[0.0, 1.0], &[0.0, 0.0]]);
        let a = t.scale_real(2.0);
        for n in 1..=6 {
            let b = build_unitary_dilation(&t, n).unwrap();
            let r = verify_two_dilation(&a, &b.u, &b.embedding(), n).unwrap();
            assert!(r.holds(), "n = {n}: {r:?}");
            assert_eq!(r.idempotence_residual, 0.0);
        }
    }

    #[test]
    fn two_dilation_negative_control() {
        let a = ComplexMatrix::zeros(2, 2);
        let v = first_block_embedding(2, 1);
        let r = verify_two_dilation(&a, &ComplexMatrix::identity(2), &v, 3).unwrap();
        assert!(!r.identity_holds);
        assert!(r.conjugate_certificate.is_positive);
    }

    #[test]
    fn von_neumann_examples() {
        let s = ComplexMatrix::lower_shift(4);
        let expected = [1.0, 1.0, 1.0, 0.0];
        for (n, want) in (1..=4).zip(expected) {
            let r = von_neumann_check(&s, &Polynomial::monomial(n), DEFAULT_SAMPLES).unwrap();
            assert!((r.operator_value - want).abs() < 1e-12);
            assert!(r.holds);
        }
        let a = ComplexMatrix::from_real_rows(&[&[0.3, 0.4], &[0.0, -0.5]]);
        let r = von_neumann_check(&a, &Polynomial::monomial(1), 64).unwrap();
        assert!(r.holds && r.operator_value <= 1.0);
    }

    #[test]
    fn polynomial_matrix_evaluation() {
        let p = Polynomial::from_real(&[1.0, -2.0, 1.0]).unwrap();
        let a = ComplexMatrix::from_real_rows(&[&[1.0, 1.0], &[0.0, 1.0]]);
        // (A − I)² = 0 for this Jordan block
        assert!(p.eval_matrix(&a).unwrap().max_abs() < 1e-15);
        assert_eq!(p.eval(c64::new(1.0, 0.0)), c64::new(0.0, 0.0));
    }
}
