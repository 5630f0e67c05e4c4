//! Executable positivity equivalences.
//!
//! Each check builds the relevant block matrix and certifies it with
//! [`is_psd`]. Conditions quantified over all `n` can only be refuted by a
//! finite scan; [`refute`] searches up to a cap and reports
//! [`Refutation::Inconclusive`] when the cap is reached.

mod roots;
mod trig;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::blockforms::{build_block_toeplitz, build_delta, build_gamma, build_power_toeplitz};
use crate::error::{Error, Result};
use crate::linalg::{hermitian_eig, inverse, is_psd, ComplexMatrix, PositivityCertificate, DEFAULT_TOL};
use crate::radius::max_rotated_eigenvalue;

pub use roots::polynomial_roots;
pub use trig::{eval_poly, fejer_riesz_scalar, spectral_residual, OperatorTrigPolynomial, TrigPolynomial, CIRCLE_GRID};

/// Default refutation cap for the all-`n` families.
pub const DEFAULT_CAP: usize = 32;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Claim {
    #[serde(rename = "Thm1_ii")]
    Thm1Block2,
    #[serde(rename = "Thm1_iii")]
    Thm1Chain,
    #[serde(rename = "Thm2_Delta")]
    Thm2Delta,
    #[serde(rename = "Thm2_Gamma")]
    Thm2Gamma,
    Lemma4,
    Lemma6,
    Lemma7,
    Thm10,
}

impl fmt::Display for Claim {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Claim::Thm1Block2 => "Thm1_ii",
            Claim::Thm1Chain => "Thm1_iii",
            Claim::Thm2Delta => "Thm2_Delta",
            Claim::Thm2Gamma => "Thm2_Gamma",
            Claim::Lemma4 => "Lemma4",
            Claim::Lemma6 => "Lemma6",
            Claim::Lemma7 => "Lemma7",
            Claim::Thm10 => "Thm10",
        };
        f.write_str(s)
    }
}

/// Per-`n` certificates for one claim.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CertificateReport {
    pub claim: Claim,
    pub n_range: Vec<usize>,
    pub verdicts: Vec<PositivityCertificate>,
    pub overall: bool,
}

impl CertificateReport {
    fn from_verdicts(claim: Claim, n_range: Vec<usize>, verdicts: Vec<PositivityCertificate>) -> Self {
        let overall = verdicts.iter().all(|c| c.is_positive);
        Self {
            claim,
            n_range,
            verdicts,
            overall,
        }
    }

    /// Smallest `n` whose certificate fails.
    pub fn first_failure(&self) -> Option<usize> {
        self.n_range
            .iter()
            .zip(&self.verdicts)
            .find(|(_, c)| !c.is_positive)
            .map(|(&n, _)| n)
    }

    pub fn min_eigenvalue(&self) -> f64 {
        self.verdicts
            .iter()
            .map(|c| c.min_eigenvalue)
            .fold(f64::INFINITY, f64::min)
    }
}

/// Outcome of scanning an all-`n` family for a failing member.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub enum Refutation {
    Refuted {
        n: usize,
        certificate: PositivityCertificate,
    },
    Inconclusive {
        cap: usize,
    },
}

impl Refutation {
    pub fn refuting_n(&self) -> Option<usize> {
        match self {
            Refutation::Refuted { n, .. } => Some(*n),
            Refutation::Inconclusive { .. } => None,
        }
    }
}

fn family_matrix(claim: Claim, a: &ComplexMatrix, n: usize) -> Result<ComplexMatrix> {
    match claim {
        Claim::Thm1Chain => build_power_toeplitz(a, n, 1.0),
        Claim::Thm2Delta => build_delta(a, n),
        Claim::Thm2Gamma => build_gamma(a, n),
        other => Err(Error::InvalidArgument(format!("{other} is not an indexed family"))),
    }
}

fn family_report(claim: Claim, a: &ComplexMatrix, n: usize, tol: f64) -> Result<CertificateReport> {
    a.ensure_square()?;
    if n == 0 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    let verdicts = (1..=n)
        .map(|k| is_psd(&family_matrix(claim, a, k)?, tol))
        .collect::<Result<Vec<_>>>()?;
    Ok(CertificateReport::from_verdicts(claim, (1..=n).collect(), verdicts))
}

/// Scans `n = 1..=cap` of an indexed family (`Thm1_iii`, `Thm2_Delta`,
/// `Thm2_Gamma`) and stops at the first failure.
pub fn refute(claim: Claim, a: &ComplexMatrix, cap: usize, tol: f64) -> Result<Refutation> {
    for n in 1..=cap {
        let cert = is_psd(&family_matrix(claim, a, n)?, tol)?;
        if !cert.is_positive {
            return Ok(Refutation::Refuted { n, certificate: cert });
        }
    }
    Ok(Refutation::Inconclusive { cap })
}

/// `[[I, A*], [A, I]] ⪰ 0`, equivalent to `‖A‖ ≤ 1`.
pub fn thm1_block2(a: &ComplexMatrix) -> Result<PositivityCertificate> {
    thm1_block2_with_tol(a, DEFAULT_TOL)
}

pub fn thm1_block2_with_tol(a: &ComplexMatrix, tol: f64) -> Result<PositivityCertificate> {
    is_psd(&build_power_toeplitz(a, 1, 1.0)?, tol)
}

/// Toeplitz matrices of `Ā(r − s)` with identity diagonal, `k = 1..=n`.
pub fn thm1_chain(a: &ComplexMatrix, n: usize) -> Result<CertificateReport> {
    thm1_chain_with_tol(a, n, DEFAULT_TOL)
}

pub fn thm1_chain_with_tol(a: &ComplexMatrix, n: usize, tol: f64) -> Result<CertificateReport> {
    family_report(Claim::Thm1Chain, a, n, tol)
}

/// `Δ_k(A) ⪰ 0` for `k = 1..=n`.
pub fn thm2_delta(a: &ComplexMatrix, n: usize) -> Result<CertificateReport> {
    thm2_delta_with_tol(a, n, DEFAULT_TOL)
}

pub fn thm2_delta_with_tol(a: &ComplexMatrix, n: usize, tol: f64) -> Result<CertificateReport> {
    family_report(Claim::Thm2Delta, a, n, tol)
}

/// `Γ_k(A) ⪰ 0` for `k = 1..=n`.
pub fn thm2_gamma(a: &ComplexMatrix, n: usize) -> Result<CertificateReport> {
    thm2_gamma_with_tol(a, n, DEFAULT_TOL)
}

pub fn thm2_gamma_with_tol(a: &ComplexMatrix, n: usize, tol: f64) -> Result<CertificateReport> {
    family_report(Claim::Thm2Gamma, a, n, tol)
}

/// `(I−A)^{-1} + (I−A*)^{-1} − I ⪰ 0`, equivalent to `‖A‖ ≤ 1` when `I − A`
/// is invertible.
pub fn lemma4_resolvent(a: &ComplexMatrix) -> Result<PositivityCertificate> {
    lemma4_resolvent_with_tol(a, DEFAULT_TOL)
}

pub fn lemma4_resolvent_with_tol(a: &ComplexMatrix, tol: f64) -> Result<PositivityCertificate> {
    let d = a.ensure_square()?;
    let id = ComplexMatrix::identity(d);
    let r = inverse(&(&id - a))?;
    let m = &(&r + &r.adjoint()) - &id;
    is_psd(&m, tol)
}

/// Certificates for `Re A ⪰ 0` and `Re A^{-1} ⪰ 0`; for invertible `A` the
/// two verdicts coincide.
pub fn lemma5_reinverse(a: &ComplexMatrix) -> Result<(PositivityCertificate, PositivityCertificate)> {
    a.ensure_square()?;
    let inv = inverse(a)?;
    Ok((
        is_psd(&a.hermitian_part(), DEFAULT_TOL)?,
        is_psd(&inv.hermitian_part(), DEFAULT_TOL)?,
    ))
}

/// Grid positivity of `F(t)` against Toeplitz positivity of `T_k(F)`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HerglotzReport {
    /// `min_t λ_min(F(t))` over the sampled grid.
    pub grid_min_eigenvalue: f64,
    pub grid_positive: bool,
    pub toeplitz: CertificateReport,
    /// `grid_positive ⇒ toeplitz.overall`.
    pub implication_holds: bool,
}

/// Samples `F` on a 1024-point grid and certifies `T_k(F)` for `k = 1..=n`.
pub fn herglotz_block(f: &OperatorTrigPolynomial, n: usize) -> Result<HerglotzReport> {
    const GRID: usize = 1024;
    let scale = (0..=f.half_degree() as i64)
        .map(|j| f.coefficient(j).frobenius_norm())
        .sum::<f64>()
        .max(1.0);
    if f.hermitian_defect() > 1e-12 * scale {
        return Err(Error::Domain(format!(
            "operator coefficients are not Hermitian-symmetric (defect {:.3e})",
            f.hermitian_defect()
        )));
    }
    if n == 0 {
        return Err(Error::InvalidArgument("N must be at least 1".into()));
    }
    let mut grid_min = f64::INFINITY;
    let mut grid_norm: f64 = 0.0;
    for k in 0..GRID {
        let t = std::f64::consts::TAU * k as f64 / GRID as f64;
        let e = hermitian_eig(&f.eval(t))?;
        grid_min = grid_min.min(e.min());
        grid_norm = grid_norm.max(e.spectral_radius());
    }
    let grid_positive = grid_min >= -DEFAULT_TOL * grid_norm.max(1.0);

    let spec = f.toeplitz_spec()?;
    let verdicts = (1..=n)
        .map(|k| is_psd(&build_block_toeplitz(&spec, k)?, DEFAULT_TOL))
        .collect::<Result<Vec<_>>>()?;
    let toeplitz = CertificateReport::from_verdicts(Claim::Lemma6, (1..=n).collect(), verdicts);
    let implication_holds = !grid_positive || toeplitz.overall;
    Ok(HerglotzReport {
        grid_min_eigenvalue: grid_min,
        grid_positive,
        toeplitz,
        implication_holds,
    })
}

/// Largest sampled-and-refined `λ_max(Re(e^{it}A))`.
pub fn lemma7_max(a: &ComplexMatrix, angle_grid: usize) -> Result<f64> {
    if angle_grid < 8 {
        return Err(Error::InvalidArgument(format!(
            "angle grid must have at least 8 points, got {angle_grid}"
        )));
    }
    Ok(max_rotated_eigenvalue(a, angle_grid)?.0)
}

/// `Re(e^{it}A) ⪯ I` for all sampled `t`, i.e. `w(A) ≤ 1 + tol`.
pub fn lemma7_check(a: &ComplexMatrix, angle_grid: usize) -> Result<bool> {
    lemma7_check_with_tol(a, angle_grid, DEFAULT_TOL)
}

pub fn lemma7_check_with_tol(a: &ComplexMatrix, angle_grid: usize, tol: f64) -> Result<bool> {
    Ok(lemma7_max(a, angle_grid)? <= 1.0 + tol)
}

/// `Φ_A(g) = Σ_{|j|≤N} c_j Ā(j) + c_0 I`.
pub fn phi_operator(a: &ComplexMatrix, g: &TrigPolynomial) -> Result<ComplexMatrix> {
    let d = a.ensure_square()?;
    let n = g.half_degree() as i64;
    // Ā(0) = I, so the constant term enters twice
    let mut out = ComplexMatrix::identity(d).scale(g.coefficient(0) * 2.0);
    let mut power = ComplexMatrix::identity(d);
    for j in 1..=n {
        power = power.matmul(a);
        out = &out + &power.scale(g.coefficient(j));
        out = &out + &power.adjoint().scale(g.coefficient(-j));
    }
    Ok(out)
}

/// Certifies `Φ_A(g) ⪰ 0`; `g` must be positive on the circle.
pub fn thm10_phi(a: &ComplexMatrix, g: &TrigPolynomial) -> Result<PositivityCertificate> {
    thm10_phi_with_tol(a, g, DEFAULT_TOL)
}

pub fn thm10_phi_with_tol(a: &ComplexMatrix, g: &TrigPolynomial, tol: f64) -> Result<PositivityCertificate> {
    if !g.is_positive_on_grid() {
        return Err(Error::Domain(format!(
            "g is not a positive trigonometric polynomial (grid min {:.6e}, Hermitian defect {:.3e})",
            g.grid_min(CIRCLE_GRID),
            g.hermitian_defect()
        )));
    }
    is_psd(&phi_operator(a, g)?, tol)
}

/// Spectrum of the scalar tridiagonal `Δ_n(a)` next to the closed form
/// `2 + 2|a| cos(jπ/(n+2))`, `j = 1..=n+1`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TridiagSpectrum {
    pub computed: Vec<f64>,
    pub closed_form: Vec<f64>,
    pub max_deviation: f64,
}

pub fn tridiag_spectrum(a: crate::linalg::c64, n: usize) -> Result<TridiagSpectrum> {
    let delta = build_delta(&ComplexMatrix::from_diag(&[a]), n)?;
    let computed = hermitian_eig(&delta)?.eigenvalues;
    let m = a.norm();
    let mut closed_form: Vec<f64> = (1..=n + 1)
        .map(|j| 2.0 + 2.0 * m * (j as f64 * std::f64::consts::PI / (n as f64 + 2.0)).cos())
        .collect();
    closed_form.sort_by(f64::total_cmp);
    let max_deviation = computed
        .iter()
        .zip(&closed_form)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max);
    Ok(TridiagSpectrum {
        computed,
        closed_form,
        max_deviation,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::c64;

    fn r(rows: &[&[f64]]) -> ComplexMatrix {
        ComplexMatrix::from_real_rows(rows)
    }

    fn nil2(top: f64) -> ComplexMatrix {
        r(&[&[0.0, top], &[0.0, 0.0]])
    }

    #[test]
    fn block2_examples() {
        let c = thm1_block2(&ComplexMatrix::identity(2)).unwrap();
        assert!(c.is_positive && c.min_eigenvalue.abs() < 1e-14);
        let c = thm1_block2(&ComplexMatrix::identity(2).scale_real(2.0)).unwrap();
        assert!(!c.is_positive && (c.min_eigenvalue + 1.0).abs() < 1e-14);
        let c = thm1_block2(&nil2(1.0)).unwrap();
        assert!(c.is_positive && c.min_eigenvalue.abs() < 1e-14);
    }

    #[test]
    fn chain_examples() {
        assert!(thm1_chain(&ComplexMatrix::zeros(2, 2), 6).unwrap().overall);
        let i = c64::new(0.0, 1.0);
        let z = c64::new(0.0, 0.0);
        let u = ComplexMatrix::from_rows(&[&[z, i], &[c64::new(1.0, 0.0), z]]);
        assert!(thm1_chain(&u, 6).unwrap().overall);
        let big = ComplexMatrix::from_real_diag(&[1.05, 0.2]);
        let rep = refute(Claim::Thm1Chain, &big, 10, DEFAULT_TOL).unwrap();
        assert_eq!(rep.refuting_n(), Some(1));
    }

    #[test]
    fn delta_examples() {
        assert!(thm2_delta(&nil2(2.0), 12).unwrap().overall);
        let rep = refute(Claim::Thm2Delta, &nil2(2.2), 32, DEFAULT_TOL).unwrap();
        assert!(rep.refuting_n().is_some());
        let rep = thm2_delta(&ComplexMatrix::zeros(2, 2), 3).unwrap();
        assert!(rep.overall && (rep.min_eigenvalue() - 2.0).abs() < 1e-15);
    }

    #[test]
    fn gamma_examples() {
        let a = ComplexMatrix::from_diag(&[c64::from_polar(1.0, 0.4)]);
        assert!(thm2_gamma(&a, 12).unwrap().overall);
        let s = ComplexMatrix::lower_shift(4).scale_real(4.0 / (1.0 + 5f64.sqrt()));
        assert!(thm2_gamma(&s, 12).unwrap().overall);
        let rep = thm2_gamma(&ComplexMatrix::identity(2).scale_real(3.0), 2).unwrap();
        assert_eq!(rep.first_failure(), Some(1));
    }

    #[test]
    fn lemma4_examples() {
        let c = lemma4_resolvent(&ComplexMatrix::zeros(2, 2)).unwrap();
        assert!(c.is_positive && (c.min_eigenvalue - 1.0).abs() < 1e-14);
        let c = lemma4_resolvent(&ComplexMatrix::identity(2).scale_real(-1.0)).unwrap();
        assert!(c.is_positive && c.min_eigenvalue.abs() < 1e-14);
        let c = lemma4_resolvent(&nil2(1.2)).unwrap();
        assert!(!c.is_positive);
        assert!(matches!(
            lemma4_resolvent(&ComplexMatrix::identity(2)),
            Err(Error::Singular { .. })
        ));
    }

    #[test]
    fn lemma5_examples() {
        let (x, y) = lemma5_reinverse(&ComplexMatrix::identity(2)).unwrap();
        assert!(x.is_positive && y.is_positive);
        let (x, y) = lemma5_reinverse(&ComplexMatrix::from_real_diag(&[1.0, -1.0])).unwrap();
        assert!(!x.is_positive && !y.is_positive);
        assert!(lemma5_reinverse(&nil2(1.0)).is_err());
    }

    #[test]
    fn herglotz_examples() {
        let f = OperatorTrigPolynomial::tridiagonal_symbol(&nil2(2.0)).unwrap();
        let rep = herglotz_block(&f, 6).unwrap();
        assert!(rep.grid_positive && rep.toeplitz.overall && rep.implication_holds);

        let mut c = std::collections::BTreeMap::new();
        c.insert(0, ComplexMatrix::identity(2));
        let rep = herglotz_block(&OperatorTrigPolynomial::new(c).unwrap(), 4).unwrap();
        assert!(rep.grid_positive && rep.toeplitz.overall);

        let mut c = std::collections::BTreeMap::new();
        c.insert(1, ComplexMatrix::identity(2));
        c.insert(-1, ComplexMatrix::identity(2));
        let rep = herglotz_block(&OperatorTrigPolynomial::new(c).unwrap(), 2).unwrap();
        assert!(!rep.grid_positive);
        assert!((rep.grid_min_eigenvalue + 2.0).abs() < 1e-12);
        assert_eq!(rep.toeplitz.first_failure(), Some(2));
        assert!((rep.toeplitz.verdicts[1].min_eigenvalue + 1.0).abs() < 1e-14);

        let mut c = std::collections::BTreeMap::new();
        c.insert(1, ComplexMatrix::identity(2));
        assert!(matches!(
            herglotz_block(&OperatorTrigPolynomial::new(c).unwrap(), 2),
            Err(Error::Domain(_))
        ));
    }

    #[test]
    fn lemma7_examples() {
        assert!(lemma7_check(&ComplexMatrix::identity(2), 16).unwrap());
        assert!(lemma7_check(&nil2(2.0), 16).unwrap());
        assert!(!lemma7_check(&ComplexMatrix::identity(2).scale_real(1.01), 16).unwrap());
        assert!(lemma7_check(&nil2(2.0), 4).is_err());
    }

    #[test]
    fn phi_examples() {
        let a = nil2(2.0);
        let one = TrigPolynomial::constant(1.0);
        assert_eq!(
            phi_operator(&a, &one).unwrap(),
            ComplexMatrix::identity(2).scale_real(2.0)
        );
        let g = TrigPolynomial::hermitian_from_nonnegative(&[c64::new(2.0, 0.0), c64::new(1.0, 0.0)]).unwrap();
        let phi = phi_operator(&a, &g).unwrap();
        let expected = &(&ComplexMatrix::identity(2).scale_real(4.0) + &a) + &a.adjoint();
        assert!(phi.max_abs_diff(&expected) < 1e-15);
        assert!(thm10_phi(&a, &g).unwrap().is_positive);

        let s = ComplexMatrix::lower_shift(4).scale_real(4.0 / (1.0 + 5f64.sqrt()));
        for n in 1..=12 {
            assert!(
                thm10_phi(&s, &TrigPolynomial::fejer_kernel(n, 0.0))
                    .unwrap()
                    .is_positive
            );
        }

        let bad = TrigPolynomial::hermitian_from_nonnegative(&[c64::new(0.5, 0.0), c64::new(1.0, 0.0)]).unwrap();
        assert!(matches!(thm10_phi(&a, &bad), Err(Error::Domain(_))));
    }

    #[test]
    fn tridiagonal_spectrum_examples() {
        let s = tridiag_spectrum(c64::new(1.0, 0.0), 2).unwrap();
        let sq = 2f64.sqrt();
        for (x, y) in s.computed.iter().zip([2.0 - sq, 2.0, 2.0 + sq]) {
            assert!((x - y).abs() < 1e-12);
        }
        let s = tridiag_spectrum(c64::new(0.0, 0.0), 5).unwrap();
        assert!(s.computed.iter().all(|&x| x == 2.0));
        let negative = (1..=40).any(|n| tridiag_spectrum(c64::new(1.1, 0.0), n).unwrap().computed[0] < 0.0);
        assert!(negative);
    }
}
