//! Numerical radius, operator norm and the numerical range.
//!
//! `w(A) = max_t λ_max(Re(e^{it} A))`. The maximum over `t` is located on a
//! uniform angle grid and then refined by golden-section search inside the
//! best brackets, plus a few more that could still hold the global maximum. `λ_max` of
//! `Re(e^{it}A)` is Lipschitz in `t` with constant `‖A‖`, which bounds how
//! far a bracket's sample can sit below the true maximum.

use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use crate::blockforms::build_rn;
use crate::error::{Error, Result};
use crate::linalg::{c64, dot, hermitian_eig, hermitian_eigenvalues, matrix_power, ComplexMatrix};

pub const GRID_ANGLES: usize = 720;
const MIN_REFINED_BRACKETS: usize = 3;
/// Flat curves put every bracket inside the Lipschitz gap; refining more
/// than this many cannot change the answer beyond the sampling noise.
const MAX_REFINED_BRACKETS: usize = 8;
const ANGLE_WIDTH: f64 = 1e-10;
/// Additive slack on every inequality this module checks.
pub const DEFAULT_SLACK: f64 = 1e-6;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RadiusResult {
    pub value: f64,
    /// In `[0, 2π)`.
    pub argmax_angle: f64,
    /// Unit vector with `|⟨x, Ax⟩| ≈ value`.
    pub witness_vector: Vec<c64>,
}

/// `Re(e^{it} A) = (e^{it}A + e^{−it}A*) / 2`.
pub fn rotated_real_part(a: &ComplexMatrix, t: f64) -> ComplexMatrix {
    a.scale(c64::from_polar(1.0, t)).hermitian_part()
}

fn top_eigenpair(a: &ComplexMatrix, t: f64) -> Result<(f64, Vec<c64>)> {
    let e = hermitian_eig(&rotated_real_part(a, t))?;
    let k = e.eigenvalues.len() - 1;
    Ok((e.eigenvalues[k], e.eigenvector(k)))
}

fn top_eigenvalue(a: &ComplexMatrix, t: f64) -> Result<f64> {
    let values = hermitian_eigenvalues(&rotated_real_part(a, t))?;
    Ok(values[values.len() - 1])
}

/// Maximizes `λ_max(Re(e^{it}A))` over `t` starting from `grid` uniformly
/// spaced angles. Returns `(value, angle)`.
pub(crate) fn max_rotated_eigenvalue(a: &ComplexMatrix, grid: usize) -> Result<(f64, f64)> {
    a.ensure_square()?;
    let grid = grid.max(3);
    let step = TAU / grid as f64;
    let samples: Vec<f64> = (0..grid)
        .map(|k| top_eigenvalue(a, k as f64 * step))
        .collect::<Result<_>>()?;

    let (mut best_t, mut best) = (0.0, samples[0]);
    for (k, &v) in samples.iter().enumerate() {
        if v > best {
            best = v;
            best_t = k as f64 * step;
        }
    }

    let lipschitz = a.frobenius_norm();
    let mut peaks: Vec<usize> = (0..grid)
        .filter(|&k| {
            let prev = samples[(k + grid - 1) % grid];
            let next = samples[(k + 1) % grid];
            samples[k] >= prev && samples[k] >= next
        })
        .collect();
    peaks.sort_by(|&i, &j| samples[j].total_cmp(&samples[i]).then(i.cmp(&j)));

    for (rank, &k) in peaks.iter().enumerate() {
        if rank >= MAX_REFINED_BRACKETS || (rank >= MIN_REFINED_BRACKETS && samples[k] < best - lipschitz * step) {
            break;
        }
        let center = k as f64 * step;
        let (v, t) = golden_section_max(|t| top_eigenvalue(a, t), center - step, center + step)?;
        if v > best || (v == best && t.rem_euclid(TAU) < best_t) {
            best = v;
            best_t = t.rem_euclid(TAU);
        }
    }
    Ok((best, best_t))
}

fn golden_section_max(f: impl Fn(f64) -> Result<f64>, mut lo: f64, mut hi: f64) -> Result<(f64, f64)> {
    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    let mut x1 = hi - ratio * (hi - lo);
    let mut x2 = lo + ratio * (hi - lo);
    let mut f1 = f(x1)?;
    let mut f2 = f(x2)?;
    while hi - lo > ANGLE_WIDTH {
        if f1 >= f2 {
            hi = x2;
            x2 = x1;
            f2 = f1;
            x1 = hi - ratio * (hi - lo);
            f1 = f(x1)?;
        } else {
            lo = x1;
            x1 = x2;
            f1 = f2;
            x2 = lo + ratio * (hi - lo);
            f2 = f(x2)?;
        }
    }
    Ok(if f1 >= f2 { (f1, x1) } else { (f2, x2) })
}

/// `w(A) = sup_{‖x‖=1} |⟨x, Ax⟩|`.
pub fn numerical_radius(a: &ComplexMatrix) -> Result<RadiusResult> {
    let (value, angle) = max_rotated_eigenvalue(a, GRID_ANGLES)?;
    let (_, witness_vector) = top_eigenpair(a, angle)?;
    Ok(RadiusResult {
        value: value.max(0.0),
        argmax_angle: angle,
        witness_vector,
    })
}

/// Largest singular value, `sqrt(λ_max(A*A))`. Accepts any shape.
pub fn operator_norm(a: &ComplexMatrix) -> Result<f64> {
    let gram = a.adjoint_mul(a);
    Ok(hermitian_eig(&gram)?.max().max(0.0).sqrt())
}

/// `⟨x_k, A x_k⟩` for top eigenvectors `x_k` of `Re(e^{it_k}A)` at
/// `t_k = 2πk/samples`. At angles where the top eigenvalue is degenerate the
/// point may fall inside the numerical range rather than on its boundary.
pub fn numerical_range_boundary(a: &ComplexMatrix, samples: usize) -> Result<Vec<c64>> {
    a.ensure_square()?;
    if samples < 4 {
        return Err(Error::InvalidArgument(format!(
            "at least 4 boundary samples required, got {samples}"
        )));
    }
    (0..samples)
        .map(|k| {
            let t = TAU * k as f64 / samples as f64;
            let (_, x) = top_eigenpair(a, t)?;
            Ok(dot(&x, &a.mul_vec(&x)))
        })
        .collect()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PowerRow {
    pub m: u32,
    /// `w(A^m)`.
    pub radius_of_power: f64,
    /// `w(A)^m`.
    pub power_of_radius: f64,
    pub holds: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PowerInequalityReport {
    pub radius: f64,
    pub rows: Vec<PowerRow>,
    pub slack: f64,
}

impl PowerInequalityReport {
    pub fn all_hold(&self) -> bool {
        self.rows.iter().all(|r| r.holds)
    }

    /// Largest `w(A^m) − w(A)^m` over the rows.
    pub fn worst_excess(&self) -> f64 {
        self.rows
            .iter()
            .map(|r| r.radius_of_power - r.power_of_radius)
            .fold(f64::NEG_INFINITY, f64::max)
    }
}

/// Evaluates `w(A^m) ≤ w(A)^m` for `m = 1..=m_max`.
pub fn check_power_inequality(a: &ComplexMatrix, m_max: u32) -> Result<PowerInequalityReport> {
    check_power_inequality_with_slack(a, m_max, DEFAULT_SLACK)
}

pub fn check_power_inequality_with_slack(a: &ComplexMatrix, m_max: u32, slack: f64) -> Result<PowerInequalityReport> {
    let radius = numerical_radius(a)?.value;
    let mut rows = Vec::with_capacity(m_max as usize);
    let mut power = a.clone();
    for m in 1..=m_max {
        if m > 1 {
            power = power.matmul(a);
        }
        let radius_of_power = numerical_radius(&power)?.value;
        let power_of_radius = radius.powi(m as i32);
        rows.push(PowerRow {
            m,
            radius_of_power,
            power_of_radius,
            holds: radius_of_power <= power_of_radius + slack,
        });
    }
    Ok(PowerInequalityReport { radius, rows, slack })
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Lemma8Report {
    pub n: usize,
    pub radius: f64,
    pub shifted_radius: f64,
    /// `(n+1)/n · w(R_n(A))`.
    pub bound: f64,
    pub holds: bool,
}

/// Checks `w(A) ≤ (n+1)/n · w(R_n(A))`.
pub fn check_lemma8(a: &ComplexMatrix, n: usize) -> Result<Lemma8Report> {
    let r = build_rn(a, n)?;
    let radius = numerical_radius(a)?.value;
    let shifted_radius = numerical_radius(&r)?.value;
    let bound = (n as f64 + 1.0) / n as f64 * shifted_radius;
    Ok(Lemma8Report {
        n,
        radius,
        shifted_radius,
        bound,
        holds: radius <= bound + DEFAULT_SLACK,
    })
}

/// Convenience for `w(A^m)`.
pub fn radius_of_power(a: &ComplexMatrix, m: u32) -> Result<f64> {
    Ok(numerical_radius(&matrix_power(a, m)?)?.value)
}

/// `(1 + √5) / 4`, the numerical radius of the 4x4 lower shift.
pub fn shift4_radius() -> f64 {
    (1.0 + 5f64.sqrt()) / 4.0
}

#[cfg(test)]
mod tests {
    use super::*;

    fn nil2(top: f64) -> ComplexMatrix {
        ComplexMatrix::from_real_rows(&[&[0.0, top], &[0.0, 0.0]])
    }

    #[test]
    fn shift_radius_matches_closed_form() {
        let r = numerical_radius(&ComplexMatrix::lower_shift(4)).unwrap();
        assert!((r.value - shift4_radius()).abs() < 1e-9, "{}", r.value);
    }

    #[test]
    fn two_by_two_nilpotent() {
        let r = numerical_radius(&nil2(2.0)).unwrap();
        assert!((r.value - 1.0).abs() < 1e-9);
        let a = nil2(2.0);
        let q = dot(&r.witness_vector, &a.mul_vec(&r.witness_vector)).norm();
        assert!(q >= r.value - 1e-7);
    }

    #[test]
    fn hermitian_radius_is_norm() {
        let r = numerical_radius(&ComplexMatrix::from_real_diag(&[-3.0, 2.0])).unwrap();
        assert!((r.value - 3.0).abs() < 1e-12);
        assert!(r.argmax_angle >= 0.0 && r.argmax_angle < TAU);
    }

    #[test]
    fn zero_matrix() {
        let r = numerical_radius(&ComplexMatrix::zeros(3, 3)).unwrap();
        assert_eq!(r.value, 0.0);
    }

    #[test]
    fn norms() {
        let i = c64::new(0.0, 1.0);
        let z = c64::new(0.0, 0.0);
        let u = ComplexMatrix::from_rows(&[&[z, i, z], &[z, z, -i], &[c64::new(1.0, 0.0), z, z]]);
        assert!((operator_norm(&u).unwrap() - 1.0).abs() < 1e-12);
        assert!((operator_norm(&nil2(2.0)).unwrap() - 2.0).abs() < 1e-12);
        assert!((operator_norm(&ComplexMatrix::lower_shift(4)).unwrap() - 1.0).abs() < 1e-12);
        let wide = ComplexMatrix::from_real_rows(&[&[3.0, 0.0, 4.0]]);
        assert!((operator_norm(&wide).unwrap() - 5.0).abs() < 1e-12);
    }

    #[test]
    fn boundary_of_normal_and_nilpotent() {
        let pts = numerical_range_boundary(&ComplexMatrix::from_real_diag(&[0.0, 1.0]), 64).unwrap();
        for p in &pts {
            assert!(p.im.abs() < 1e-12 && p.re >= -1e-12 && p.re <= 1.0 + 1e-12);
        }
        assert!(pts.iter().any(|p| (p.re - 1.0).abs() < 1e-12));
        assert!(pts.iter().any(|p| p.re.abs() < 1e-12));

        let pts = numerical_range_boundary(&nil2(1.0), 64).unwrap();
        for p in &pts {
            assert!((p.norm() - 0.5).abs() < 1e-7);
        }

        let pts = numerical_range_boundary(&ComplexMatrix::identity(2), 8).unwrap();
        assert!(pts.iter().all(|p| (p - c64::new(1.0, 0.0)).norm() < 1e-12));

        assert!(numerical_range_boundary(&nil2(1.0), 3).is_err());
    }

    #[test]
    fn power_inequality_on_shift() {
        let rep = check_power_inequality(&ComplexMatrix::lower_shift(4), 3).unwrap();
        assert!(rep.all_hold());
        let w1 = rep.rows[0].radius_of_power;
        let w2 = rep.rows[1].radius_of_power;
        let w3 = rep.rows[2].radius_of_power;
        assert!((w2 - 0.5).abs() < 1e-9 && (w3 - 0.5).abs() < 1e-9);
        assert!(w1 * w2 < w3);
        assert!((w1 * w2 - 0.4045084971874737).abs() < 1e-8);
    }

    #[test]
    fn power_inequality_identity_is_tight() {
        let rep = check_power_inequality(&ComplexMatrix::identity(3), 4).unwrap();
        for r in &rep.rows {
            assert!((r.radius_of_power - 1.0).abs() < 1e-12);
            assert!((r.power_of_radius - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn lemma8_scalar_equality() {
        let rep = check_lemma8(&ComplexMatrix::identity(1), 1).unwrap();
        assert!((rep.shifted_radius - 0.5).abs() < 1e-9);
        assert!((rep.bound - 1.0).abs() < 1e-9);
        assert!(rep.holds);
        let rep = check_lemma8(&ComplexMatrix::zeros(2, 2), 3).unwrap();
        assert!(rep.holds && rep.radius == 0.0);
    }
}
