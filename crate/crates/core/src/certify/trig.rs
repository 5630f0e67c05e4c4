use std::collections::BTreeMap;
use std::f64::consts::TAU;

use serde::{Deserialize, Serialize};

use super::roots::polynomial_roots;
use crate::blockforms::BlockToeplitzSpec;
use crate::error::{Error, Result};
use crate::linalg::{c64, ComplexMatrix};

/// Points used for grid positivity checks on the unit circle.
pub const CIRCLE_GRID: usize = 4096;

/// Scalar trigonometric polynomial `g(e^{it}) = Σ_{|j|≤N} c_j e^{ijt}`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrigPolynomial {
    half_degree: usize,
    /// `coefficients[j + N] = c_j`.
    coefficients: Vec<c64>,
}

impl TrigPolynomial {
    /// From `c_{−N}, …, c_N` (odd length).
    pub fn new(coefficients: Vec<c64>) -> Result<Self> {
        if coefficients.len().is_multiple_of(2) {
            return Err(Error::InvalidArgument(format!(
                "expected 2N+1 coefficients, got {}",
                coefficients.len()
            )));
        }
        if coefficients.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::InvalidArgument("non-finite coefficient".into()));
        }
        Ok(Self {
            half_degree: coefficients.len() / 2,
            coefficients,
        })
    }

    /// From `c_0, …, c_N`, completing `c_{−j} = conj(c_j)`.
    pub fn hermitian_from_nonnegative(upper: &[c64]) -> Result<Self> {
        if upper.is_empty() {
            return Err(Error::InvalidArgument("no coefficients".into()));
        }
        let n = upper.len() - 1;
        let mut c = vec![c64::new(0.0, 0.0); 2 * n + 1];
        for (j, &z) in upper.iter().enumerate() {
            c[n + j] = z;
            c[n - j] = z.conj();
        }
        c[n].im = 0.0;
        Self::new(c)
    }

    pub fn constant(c: f64) -> Self {
        Self {
            half_degree: 0,
            coefficients: vec![c64::new(c, 0.0)],
        }
    }

    /// `Σ_{|j|≤N} (N+1−|j|)/(N+1) e^{ijθ} e^{ijt}`; `θ = 0` is the Fejér kernel.
    pub fn fejer_kernel(n: usize, theta: f64) -> Self {
        let upper: Vec<c64> = (0..=n)
            .map(|j| c64::from_polar((n + 1 - j) as f64 / (n + 1) as f64, j as f64 * theta))
            .collect();
        Self::hermitian_from_nonnegative(&upper).expect("nonempty")
    }

    /// `|p(e^{it})|²` for `p(z) = Σ b_k z^k`.
    pub fn modulus_squared(p: &[c64]) -> Result<Self> {
        if p.is_empty() {
            return Err(Error::InvalidArgument("empty polynomial".into()));
        }
        let n = p.len() - 1;
        // c_j = Σ_k b_{k+j} conj(b_k)
        let upper: Vec<c64> = (0..=n)
            .map(|j| (0..=n - j).map(|k| p[k + j] * p[k].conj()).sum())
            .collect();
        Self::hermitian_from_nonnegative(&upper)
    }

    pub fn half_degree(&self) -> usize {
        self.half_degree
    }

    pub fn coefficient(&self, j: i64) -> c64 {
        let n = self.half_degree as i64;
        if j.abs() > n {
            c64::new(0.0, 0.0)
        } else {
            self.coefficients[(j + n) as usize]
        }
    }

    /// `c_{−N}, …, c_N`.
    pub fn coefficients(&self) -> &[c64] {
        &self.coefficients
    }

    pub fn eval(&self, t: f64) -> c64 {
        let n = self.half_degree as i64;
        (-n..=n)
            .map(|j| self.coefficient(j) * c64::from_polar(1.0, j as f64 * t))
            .sum()
    }

    pub fn l1_norm(&self) -> f64 {
        self.coefficients.iter().map(|z| z.norm()).sum()
    }

    /// `max_j |c_{−j} − conj(c_j)|`.
    pub fn hermitian_defect(&self) -> f64 {
        let n = self.half_degree as i64;
        (0..=n)
            .map(|j| (self.coefficient(-j) - self.coefficient(j).conj()).norm())
            .fold(0.0, f64::max)
    }

    pub fn is_hermitian(&self) -> bool {
        self.hermitian_defect() <= 1e-12 * self.l1_norm().max(1.0)
    }

    /// `Re g` on `points` equally spaced angles.
    pub fn sample(&self, points: usize) -> Vec<f64> {
        (0..points)
            .map(|k| self.eval(TAU * k as f64 / points as f64).re)
            .collect()
    }

    /// Minimum of `Re g` over the grid.
    pub fn grid_min(&self, points: usize) -> f64 {
        self.sample(points).into_iter().fold(f64::INFINITY, f64::min)
    }

    /// Hermitian and `min g ≥ −1e−10·Σ|c_j|` on the default grid.
    pub fn is_positive_on_grid(&self) -> bool {
        self.is_hermitian() && self.grid_min(CIRCLE_GRID) >= -1e-10 * self.l1_norm()
    }
}

/// Operator-valued `F(t) = Σ_{|j|≤N} C_j e^{ijt}` with square coefficients.
#[derive(Debug, Clone)]
pub struct OperatorTrigPolynomial {
    block_dim: usize,
    half_degree: usize,
    coefficients: BTreeMap<i64, ComplexMatrix>,
}

impl OperatorTrigPolynomial {
    pub fn new(coefficients: BTreeMap<i64, ComplexMatrix>) -> Result<Self> {
        let first = coefficients
            .values()
            .next()
            .ok_or_else(|| Error::InvalidArgument("no coefficients".into()))?;
        let block_dim = first.ensure_square()?;
        for (j, c) in &coefficients {
            if c.shape() != (block_dim, block_dim) {
                return Err(Error::Shape(format!("coefficient {j} has shape {:?}", c.shape())));
            }
        }
        let half_degree = coefficients
            .keys()
            .map(|j| j.unsigned_abs() as usize)
            .max()
            .unwrap_or(0);
        Ok(Self {
            block_dim,
            half_degree,
            coefficients,
        })
    }

    /// `e^{−it}A* + 2I + e^{it}A`.
    pub fn tridiagonal_symbol(a: &ComplexMatrix) -> Result<Self> {
        let d = a.ensure_square()?;
        let mut c = BTreeMap::new();
        c.insert(0, ComplexMatrix::identity(d).scale_real(2.0));
        c.insert(1, a.clone());
        c.insert(-1, a.adjoint());
        Self::new(c)
    }

    pub fn block_dim(&self) -> usize {
        self.block_dim
    }

    pub fn half_degree(&self) -> usize {
        self.half_degree
    }

    pub fn coefficient(&self, j: i64) -> ComplexMatrix {
        self.coefficients
            .get(&j)
            .cloned()
            .unwrap_or_else(|| ComplexMatrix::zeros(self.block_dim, self.block_dim))
    }

    pub fn eval(&self, t: f64) -> ComplexMatrix {
        let mut out = ComplexMatrix::zeros(self.block_dim, self.block_dim);
        for (&j, c) in &self.coefficients {
            out = &out + &c.scale(c64::from_polar(1.0, j as f64 * t));
        }
        out
    }

    /// `max_j ‖C_{−j} − C_j*‖_F`.
    pub fn hermitian_defect(&self) -> f64 {
        let n = self.half_degree as i64;
        (0..=n)
            .map(|j| self.coefficient(-j).distance(&self.coefficient(j).adjoint()))
            .fold(0.0, f64::max)
    }

    pub fn toeplitz_spec(&self) -> Result<BlockToeplitzSpec> {
        BlockToeplitzSpec::new(self.block_dim, self.half_degree, self.coefficients.clone())
    }
}

/// Spectral factor `p` with `|p(e^{it})|² = q(e^{it})`, returned as
/// `b_0, …, b_n`.
///
/// The roots of `z^N q(z)` come in pairs `(r, 1/conj(r))`; `p` takes the
/// roots inside the disc and one root of each (numerically split) double
/// root on the circle. Its scale is fitted by least squares on the grid.
pub fn fejer_riesz_scalar(q: &TrigPolynomial) -> Result<Vec<c64>> {
    if !q.is_hermitian() {
        return Err(Error::Domain(format!(
            "coefficients are not Hermitian (defect {:.3e})",
            q.hermitian_defect()
        )));
    }
    let samples = q.sample(CIRCLE_GRID);
    let min = samples.iter().cloned().fold(f64::INFINITY, f64::min);
    let l1 = q.l1_norm();
    if min < -1e-10 * l1 {
        return Err(Error::Domain(format!(
            "trigonometric polynomial is negative on the circle (min {min:.6e})"
        )));
    }
    let max_q = samples.iter().cloned().fold(0.0, f64::max);
    if max_q == 0.0 {
        return Ok(vec![c64::new(0.0, 0.0)]);
    }

    // effective degree: drop negligible outer coefficients
    let mut n = q.half_degree();
    while n > 0 && q.coefficient(n as i64).norm() <= 1e-14 * l1 {
        n -= 1;
    }
    if n == 0 {
        return Ok(vec![c64::new(q.coefficient(0).re.max(0.0).sqrt(), 0.0)]);
    }

    // z^n q(z) = Σ_{k=0}^{2n} c_{k−n} z^k
    let poly: Vec<c64> = (0..=2 * n).map(|k| q.coefficient(k as i64 - n as i64)).collect();
    let roots = polynomial_roots(&poly)?;
    let chosen = select_inner_roots(&roots, n)?;

    let monic = expand_roots(&chosen);
    let (mut num, mut den) = (0.0, 0.0);
    for (k, &qv) in samples.iter().enumerate() {
        let z = c64::from_polar(1.0, TAU * k as f64 / CIRCLE_GRID as f64);
        let m2 = eval_poly(&monic, z).norm_sqr();
        num += qv * m2;
        den += m2 * m2;
    }
    let scale = (num / den).max(0.0).sqrt();
    let p: Vec<c64> = monic.into_iter().map(|b| b * scale).collect();

    let residual = spectral_residual(q, &p);
    if residual > 1e-7 * max_q {
        return Err(Error::Numerical(format!(
            "spectral factor residual {residual:.3e} exceeds {:.3e}",
            1e-7 * max_q
        )));
    }
    Ok(p)
}

/// `max_grid |q − |p|²|`.
pub fn spectral_residual(q: &TrigPolynomial, p: &[c64]) -> f64 {
    (0..CIRCLE_GRID)
        .map(|k| {
            let t = TAU * k as f64 / CIRCLE_GRID as f64;
            let z = c64::from_polar(1.0, t);
            (q.eval(t).re - eval_poly(p, z).norm_sqr()).abs()
        })
        .fold(0.0, f64::max)
}

pub fn eval_poly(p: &[c64], z: c64) -> c64 {
    p.iter().rev().fold(c64::new(0.0, 0.0), |acc, &b| acc * z + b)
}

fn expand_roots(roots: &[c64]) -> Vec<c64> {
    let mut p = vec![c64::new(1.0, 0.0)];
    for &r in roots {
        let mut next = vec![c64::new(0.0, 0.0); p.len() + 1];
        for (k, &b) in p.iter().enumerate() {
            next[k + 1] += b;
            next[k] -= r * b;
        }
        p = next;
    }
    p
}

const ON_CIRCLE: f64 = 1e-7;

fn select_inner_roots(roots: &[c64], n: usize) -> Result<Vec<c64>> {
    for tol in [ON_CIRCLE, 1e-5, 1e-3] {
        let mut inside = Vec::new();
        let mut circle = Vec::new();
        for &r in roots {
            let m = r.norm();
            if (m - 1.0).abs() <= tol {
                circle.push(r);
            } else if m < 1.0 {
                inside.push(r);
            }
        }
        if circle.len() % 2 == 1 || inside.len() + circle.len() / 2 != n {
            continue;
        }
        // greedy nearest-neighbour pairing of the circle roots
        while let Some(r) = circle.pop() {
            let (idx, _) = circle
                .iter()
                .enumerate()
                .map(|(i, s)| (i, (s - r).norm()))
                .min_by(|a, b| a.1.total_cmp(&b.1))
                .expect("even count");
            let s = circle.swap_remove(idx);
            let mid = (r + s) * 0.5;
            inside.push(mid / mid.norm());
        }
        return Ok(inside);
    }
    // fall back to the n roots of smallest modulus
    let mut sorted = roots.to_vec();
    sorted.sort_by(|a, b| a.norm().total_cmp(&b.norm()));
    sorted.truncate(n);
    Ok(sorted)
}
