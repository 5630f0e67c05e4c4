//! Constructive factorization of matrices with `w(A) ≤ 1`.
//!
//! The chain runs witness `H` → factors `(X, Y)` → contraction `C` →
//! isometry `V`. Every stage is checked against its defining identity rather
//! than against fixed matrices, since none of the outputs is unique.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::blockforms::build_delta;
use crate::error::{Error, Result};
use crate::linalg::{
    hermitian_eig, inverse, is_psd, psd_sqrt, psd_sqrt_with_tol, tall_polar, ComplexMatrix, PositivityCertificate,
    DEFAULT_TOL,
};
use crate::radius::{max_rotated_eigenvalue, numerical_radius};

pub const DEFAULT_MAX_ITERS: usize = 5000;

/// Tolerance for the `X*X + Y*Y = I` and `2X*Y = A` identities.
pub const FACTOR_TOL: f64 = 1e-7;
/// Tolerance for `2(I − C*C)^{1/2} C = A`.
pub const CONTRACTION_TOL: f64 = 1e-6;

const RADIUS_SLACK: f64 = 1e-9;
const RICCATI_MAX_ITERS: usize = 5_000;
const CONDITION_GRID: usize = 64;

/// A Hermitian `H` with `[[I+H, A*], [A, I−H]] ⪰ 0`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HermitianWitness {
    pub h: ComplexMatrix,
    pub block: ComplexMatrix,
    pub certificate: PositivityCertificate,
}

impl HermitianWitness {
    /// Assembles the block for `(A, H)` and certifies it. `H` is replaced by
    /// its Hermitian part.
    pub fn new(a: &ComplexMatrix, h: &ComplexMatrix, tol: f64) -> Result<Self> {
        let d = a.ensure_square()?;
        if h.shape() != (d, d) {
            return Err(Error::Shape(format!(
                "witness is {}x{}, expected {d}x{d}",
                h.rows(),
                h.cols()
            )));
        }
        let h = h.hermitian_part();
        let block = witness_block(a, &h);
        let certificate = is_psd(&block, tol)?;
        Ok(Self { h, block, certificate })
    }

    pub fn dim(&self) -> usize {
        self.h.rows()
    }

    /// The `A` block read back out of the assembled matrix.
    pub fn a(&self) -> ComplexMatrix {
        let d = self.dim();
        self.block.block(d, 0, d, d)
    }
}

fn witness_block(a: &ComplexMatrix, h: &ComplexMatrix) -> ComplexMatrix {
    let d = a.rows();
    let id = ComplexMatrix::identity(d);
    let mut m = ComplexMatrix::zeros(2 * d, 2 * d);
    m.set_block(0, 0, &(&id + h));
    m.set_block(0, d, &a.adjoint());
    m.set_block(d, 0, a);
    m.set_block(d, d, &(&id - h));
    m
}

/// Settings for [`solve_witness_with`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WitnessOptions {
    pub max_iters: usize,
    pub tol: f64,
    /// Reject inputs with `w(A) > 1` before iterating.
    pub check_radius: bool,
}

impl Default for WitnessOptions {
    fn default() -> Self {
        Self {
            max_iters: DEFAULT_MAX_ITERS,
            tol: DEFAULT_TOL,
            check_radius: true,
        }
    }
}

/// A certified witness together with the iteration trace that produced it.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct WitnessSolve {
    pub witness: HermitianWitness,
    pub iterations: usize,
    /// Distance from each affine iterate to the PSD cone.
    pub residual_history: Vec<f64>,
}

/// Carried by [`Error::Infeasible`] when the iteration budget runs out.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InfeasibilityReport {
    pub iterations: usize,
    pub best_h: ComplexMatrix,
    pub best_residual: f64,
    pub residual_history: Vec<f64>,
}

pub fn solve_witness_h(a: &ComplexMatrix, max_iters: usize, tol: f64) -> Result<HermitianWitness> {
    let opts = WitnessOptions {
        max_iters,
        tol,
        ..WitnessOptions::default()
    };
    Ok(solve_witness_with(a, &opts)?.witness)
}

/// Alternating projections between the PSD cone and the affine set of
/// witness blocks, starting from `H = 0`. Success is decided only by the
/// certificate of the current affine iterate.
pub fn solve_witness_with(a: &ComplexMatrix, opts: &WitnessOptions) -> Result<WitnessSolve> {
    let d = a.ensure_square()?;
    if opts.check_radius {
        let w = numerical_radius(a)?.value;
        if w > 1.0 + RADIUS_SLACK {
            return Err(Error::Domain(format!(
                "numerical radius {w:.12} exceeds 1; no witness exists"
            )));
        }
    }

    let mut h = ComplexMatrix::zeros(d, d);
    let mut history = Vec::new();
    let mut best = (h.clone(), f64::INFINITY);
    for iter in 0..=opts.max_iters {
        let block = witness_block(a, &h);
        let e = hermitian_eig(&block)?;
        let certificate = PositivityCertificate::from_spectrum(e.min(), e.spectral_radius(), opts.tol);
        if certificate.is_positive {
            return Ok(WitnessSolve {
                witness: HermitianWitness { h, block, certificate },
                iterations: iter,
                residual_history: history,
            });
        }
        if iter == opts.max_iters {
            break;
        }
        let p = e.apply(|x| x.max(0.0));
        let residual = block.distance(&p);
        history.push(residual);
        if residual < best.1 {
            best = (h.clone(), residual);
        }
        let diff = &p.block(0, 0, d, d) - &p.block(d, d, d, d);
        h = diff.scale_real(0.5).hermitian_part();
    }
    Err(Error::Infeasible(Box::new(InfeasibilityReport {
        iterations: opts.max_iters,
        best_h: best.0,
        best_residual: best.1,
        residual_history: history,
    })))
}

/// The witness whose block has rank `d`: `K = I − H` is the maximal
/// solution of `K + A* K^{-1} A = 2I`, found by the monotone fixed-point
/// iteration from `K = 2I`. Needs `w(A) < 1`; on the boundary `K` becomes
/// singular and an error is returned.
///
/// With this witness `X*X = (I − H)/2` is invertible and the range of `Y`
/// lies in the range of `X`, which is what makes [`derive_c`] exact.
pub fn extremal_witness(a: &ComplexMatrix, tol: f64) -> Result<HermitianWitness> {
    let d = a.ensure_square()?;
    let two = ComplexMatrix::identity(d).scale_real(2.0);
    let a_adj = a.adjoint();
    let mut k = two.clone();
    let mut last_step = f64::INFINITY;
    let mut converged = false;
    for _ in 0..RICCATI_MAX_ITERS {
        let next = (&two - &a_adj.matmul(&inverse(&k)?).matmul(a)).hermitian_part();
        let step = next.max_abs_diff(&k);
        k = next;
        // linear convergence; stop once the step stalls at rounding level
        if step <= 1e-15 || (step <= 1e-13 && step >= last_step) {
            converged = true;
            break;
        }
        last_step = step;
    }
    if !converged {
        return Err(Error::NoConvergence {
            method: "witness Riccati iteration",
            iterations: RICCATI_MAX_ITERS,
            residual: last_step,
        });
    }
    let h = &ComplexMatrix::identity(d) - &k;
    let w = HermitianWitness::new(a, &h, tol)?;
    if !w.certificate.is_positive {
        return Err(Error::NotPsd {
            min_eigenvalue: w.certificate.min_eigenvalue,
            threshold: w.certificate.threshold(),
        });
    }
    Ok(w)
}

/// Splits a Gram factor of the witness block into `2d x d` factors with
/// `X*X + Y*Y = I` and `2X*Y = A`.
pub fn factor_xy(w: &HermitianWitness) -> Result<(ComplexMatrix, ComplexMatrix)> {
    if !w.certificate.is_positive {
        return Err(Error::NotPsd {
            min_eigenvalue: w.certificate.min_eigenvalue,
            threshold: w.certificate.threshold(),
        });
    }
    let d = w.dim();
    let l = psd_sqrt_with_tol(&w.block, w.certificate.tolerance)?;
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let y = l.block(0, 0, 2 * d, d).scale_real(s);
    let x = l.block(0, d, 2 * d, d).scale_real(s);
    Ok((x, y))
}

fn check_factor_shapes(x: &ComplexMatrix, y: &ComplexMatrix) -> Result<usize> {
    if x.shape() != y.shape() {
        return Err(Error::Shape(format!(
            "X is {}x{} but Y is {}x{}",
            x.rows(),
            x.cols(),
            y.rows(),
            y.cols()
        )));
    }
    Ok(x.cols())
}

/// `‖X*X + Y*Y − I‖_F`.
pub fn gram_residual(x: &ComplexMatrix, y: &ComplexMatrix) -> Result<f64> {
    let d = check_factor_shapes(x, y)?;
    let g = &x.adjoint_mul(x) + &y.adjoint_mul(y);
    Ok(g.distance(&ComplexMatrix::identity(d)))
}

/// `2(I − C*C)^{1/2} C`.
pub fn contraction_image(c: &ComplexMatrix) -> Result<ComplexMatrix> {
    let d = c.ensure_square()?;
    let defect = psd_sqrt(&(&ComplexMatrix::identity(d) - &c.adjoint_mul(c)))?;
    Ok(defect.matmul(c).scale_real(2.0))
}

/// `C = Û*Y` where `X = Û(X*X)^{1/2}` with `Û` a tall isometry.
pub fn derive_c(x: &ComplexMatrix, y: &ComplexMatrix) -> Result<ComplexMatrix> {
    check_factor_shapes(x, y)?;
    if x.rows() < x.cols() {
        return Err(Error::Shape(format!(
            "factors must be tall, got {}x{}",
            x.rows(),
            x.cols()
        )));
    }
    let gram = gram_residual(x, y)?;
    if gram > FACTOR_TOL {
        return Err(Error::InvalidArgument(format!(
            "X*X + Y*Y deviates from I by {gram:.3e}"
        )));
    }
    let (u, _) = tall_polar(x)?;
    let c = u.adjoint_mul(y);
    let a = x.adjoint_mul(y).scale_real(2.0);
    let residual = match contraction_image(&c) {
        Ok(img) => img.distance(&a),
        Err(e) => {
            return Err(Error::Numerical(format!(
                "C is not a contraction ({e}); X = {x:?}, Y = {y:?}"
            )))
        }
    };
    if residual > CONTRACTION_TOL {
        return Err(Error::Numerical(format!(
            "2(I - C*C)^(1/2) C misses A by {residual:.3e}; X = {x:?}, Y = {y:?}"
        )));
    }
    Ok(c)
}

/// `[[0, 2I], [0, 0]]` with `m x m` blocks.
pub fn two_block_nilpotent(m: usize) -> ComplexMatrix {
    let mut n = ComplexMatrix::zeros(2 * m, 2 * m);
    n.set_block(0, m, &ComplexMatrix::identity(m).scale_real(2.0));
    n
}

/// `V = [X; Y]`, an isometry whenever `X*X + Y*Y = I`.
pub fn build_isometry_v(x: &ComplexMatrix, y: &ComplexMatrix) -> Result<ComplexMatrix> {
    check_factor_shapes(x, y)?;
    let gram = gram_residual(x, y)?;
    if gram > FACTOR_TOL {
        return Err(Error::InvalidArgument(format!(
            "X*X + Y*Y deviates from I by {gram:.3e}"
        )));
    }
    ComplexMatrix::vstack(x, y)
}

/// `V* N V` with `N` the two-block nilpotent sized to the stack.
pub fn compress_nilpotent(v: &ComplexMatrix) -> Result<ComplexMatrix> {
    if !v.rows().is_multiple_of(2) {
        return Err(Error::Shape(format!("isometry has an odd row count {}", v.rows())));
    }
    let n = two_block_nilpotent(v.rows() / 2);
    Ok(v.adjoint_mul(&n.matmul(v)))
}

/// Every stage of the factorization together with its residuals.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AndoFactorization {
    pub witness: HermitianWitness,
    pub x: ComplexMatrix,
    pub y: ComplexMatrix,
    pub c: ComplexMatrix,
    pub v: ComplexMatrix,
    pub residuals: BTreeMap<String, f64>,
    /// Iterations spent by the alternating-projection solve.
    pub solver_iterations: usize,
}

impl AndoFactorization {
    pub fn residual(&self, name: &str) -> f64 {
        self.residuals.get(name).copied().unwrap_or(f64::NAN)
    }
}

/// Runs the whole chain. Feasibility is established by
/// [`solve_witness_with`]; the factors are then taken from the
/// [`extremal_witness`] when it exists, otherwise from the solved one.
pub fn ando_factorize(a: &ComplexMatrix, opts: &WitnessOptions) -> Result<AndoFactorization> {
    let solved = solve_witness_with(a, opts)?;
    let witness = extremal_witness(a, opts.tol).unwrap_or_else(|_| solved.witness.clone());
    let (x, y) = factor_xy(&witness)?;
    let c = derive_c(&x, &y)?;
    let v = build_isometry_v(&x, &y)?;

    let d = a.rows();
    let id = ComplexMatrix::identity(d);
    let mut residuals = BTreeMap::new();
    residuals.insert("gram".to_string(), gram_residual(&x, &y)?);
    residuals.insert("product".to_string(), x.adjoint_mul(&y).scale_real(2.0).distance(a));
    residuals.insert("contraction".to_string(), contraction_image(&c)?.distance(a));
    residuals.insert("isometry".to_string(), v.adjoint_mul(&v).distance(&id));
    residuals.insert("compression".to_string(), compress_nilpotent(&v)?.distance(a));
    residuals.insert("witness_min_eigenvalue".to_string(), witness.certificate.min_eigenvalue);
    Ok(AndoFactorization {
        witness,
        x,
        y,
        c,
        v,
        residuals,
        solver_iterations: solved.iterations,
    })
}

/// Decomposition of `Δ_n(A)` into `n` embedded copies of the witness block.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SplittingReport {
    pub n: usize,
    pub summands: Vec<PositivityCertificate>,
    /// Largest entrywise gap between the summed pieces and `Δ_n(A)`.
    pub max_deviation: f64,
    pub all_positive: bool,
}

impl SplittingReport {
    pub fn holds(&self) -> bool {
        self.all_positive && self.max_deviation <= 1e-12
    }
}

/// Writes `Δ_n(A)` as a sum of `n` PSD pieces, one per off-diagonal block
/// pair. The outermost pieces carry `2I` in their outer corners.
pub fn splitting_summands(a: &ComplexMatrix, h: &ComplexMatrix, n: usize) -> Result<Vec<ComplexMatrix>> {
    let d = a.ensure_square()?;
    if n == 0 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    let id = ComplexMatrix::identity(d);
    let two = id.scale_real(2.0);
    let upper = &id + h;
    let lower = &id - h;
    let a_adj = a.adjoint();
    let size = (n + 1) * d;
    Ok((0..n)
        .map(|k| {
            let mut s = ComplexMatrix::zeros(size, size);
            s.set_block(k * d, k * d, if k == 0 { &two } else { &upper });
            s.set_block((k + 1) * d, (k + 1) * d, if k + 1 == n { &two } else { &lower });
            s.set_block(k * d, (k + 1) * d, &a_adj);
            s.set_block((k + 1) * d, k * d, a);
            s
        })
        .collect())
}

pub fn verify_eq27_splitting(a: &ComplexMatrix, h: &ComplexMatrix, n: usize) -> Result<SplittingReport> {
    let w = HermitianWitness::new(a, h, DEFAULT_TOL)?;
    if !w.certificate.is_positive {
        return Err(Error::Domain(format!(
            "H is not a witness for A (block min eigenvalue {:.6e})",
            w.certificate.min_eigenvalue
        )));
    }
    let pieces = splitting_summands(a, &w.h, n)?;
    let summands = pieces
        .iter()
        .map(|s| is_psd(s, DEFAULT_TOL))
        .collect::<Result<Vec<_>>>()?;
    let total = pieces.iter().skip(1).fold(pieces[0].clone(), |acc, s| &acc + s);
    let max_deviation = total.max_abs_diff(&build_delta(a, n)?);
    let all_positive = summands.iter().all(|c| c.is_positive);
    Ok(SplittingReport {
        n,
        summands,
        max_deviation,
        all_positive,
    })
}

/// The four equivalent conditions on `A`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Condition {
    /// `w(A) ≤ 1`.
    Radius,
    /// `X*X + Y*Y = I`, `A = 2X*Y`.
    Factors,
    /// `A = 2(I − C*C)^{1/2} C` with `‖C‖ ≤ 1`.
    Contraction,
    /// `[[I+H, A*], [A, I−H]] ⪰ 0`.
    Witness,
}

/// Claimed witnesses for a [`Condition`].
#[derive(Debug, Clone, Copy)]
pub enum ConditionPayload<'a> {
    None,
    Factors { x: &'a ComplexMatrix, y: &'a ComplexMatrix },
    Contraction(&'a ComplexMatrix),
    Witness(&'a ComplexMatrix),
}

pub fn verify_condition(a: &ComplexMatrix, which: Condition, payload: ConditionPayload<'_>) -> Result<bool> {
    let d = a.ensure_square()?;
    match (which, payload) {
        (Condition::Radius, ConditionPayload::None) => Ok(numerical_radius(a)?.value <= 1.0 + RADIUS_SLACK),
        (Condition::Factors, ConditionPayload::Factors { x, y }) => {
            if check_factor_shapes(x, y)? != d {
                return Err(Error::Shape(format!("factors have {} columns, A is {d}x{d}", x.cols())));
            }
            let product = x.adjoint_mul(y).scale_real(2.0);
            if gram_residual(x, y)? > FACTOR_TOL || product.distance(a) > FACTOR_TOL {
                return Ok(false);
            }
            // 2 Re(e^{it} X*Y) ⪯ X*X + Y*Y = I on the angle grid
            let (top, _) = max_rotated_eigenvalue(&product, CONDITION_GRID)?;
            Ok(top <= 1.0 + FACTOR_TOL)
        }
        (Condition::Contraction, ConditionPayload::Contraction(c)) => {
            if c.shape() != (d, d) {
                return Err(Error::Shape(format!("C is {}x{}, A is {d}x{d}", c.rows(), c.cols())));
            }
            let norm = crate::radius::operator_norm(c)?;
            if norm > 1.0 + RADIUS_SLACK {
                return Ok(false);
            }
            Ok(contraction_image(c)?.distance(a) <= CONTRACTION_TOL)
        }
        (Condition::Witness, ConditionPayload::Witness(h)) => {
            if h.hermitian_defect() > 1e-10 {
                return Ok(false);
            }
            Ok(HermitianWitness::new(a, h, DEFAULT_TOL)?.certificate.is_positive)
        }
        (which, _) => Err(Error::InvalidArgument(format!(
            "payload does not match condition {which:?}"
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn nil2(top: f64) -> ComplexMatrix {
        ComplexMatrix::from_real_rows(&[&[0.0, top], &[0.0, 0.0]])
    }

    #[test]
    fn zero_matrix_accepted_immediately() {
        let s = solve_witness_with(&ComplexMatrix::zeros(3, 3), &WitnessOptions::default()).unwrap();
        assert_eq!(s.iterations, 0);
        assert_eq!(s.witness.h.max_abs(), 0.0);
    }

    #[test]
    fn nilpotent_witness_block_spectrum() {
        let h = ComplexMatrix::from_real_diag(&[-1.0, 1.0]);
        let w = HermitianWitness::new(&nil2(2.0), &h, DEFAULT_TOL).unwrap();
        assert!(w.certificate.is_positive);
        let e = hermitian_eig(&w.block).unwrap().eigenvalues;
        for (x, y) in e.iter().zip([0.0, 0.0, 0.0, 4.0]) {
            assert!((x - y).abs() < 1e-13);
        }
    }

    #[test]
    fn radius_above_one_is_a_domain_error() {
        let r = solve_witness_h(&nil2(3.0), 100, DEFAULT_TOL);
        assert!(matches!(r, Err(Error::Domain(_))));
    }

    #[test]
    fn nilpotent_chain_from_given_witness() {
        let a = nil2(2.0);
        let w = HermitianWitness::new(&a, &ComplexMatrix::from_real_diag(&[-1.0, 1.0]), DEFAULT_TOL).unwrap();
        let (x, y) = factor_xy(&w).unwrap();
        assert!(gram_residual(&x, &y).unwrap() < 1e-12);
        assert!(x.adjoint_mul(&y).scale_real(2.0).distance(&a) < 1e-12);
        let c = derive_c(&x, &y).unwrap();
        assert!(c.distance(&nil2(1.0)) < 1e-10);
        let v = build_isometry_v(&x, &y).unwrap();
        assert!(compress_nilpotent(&v).unwrap().distance(&a) < 1e-12);
    }

    #[test]
    fn zero_matrix_chain() {
        let a = ComplexMatrix::zeros(2, 2);
        let w = HermitianWitness::new(&a, &a, DEFAULT_TOL).unwrap();
        let (x, y) = factor_xy(&w).unwrap();
        let half = ComplexMatrix::identity(2).scale_real(0.5);
        assert!(x.adjoint_mul(&x).distance(&half) < 1e-12);
        assert!(y.adjoint_mul(&y).distance(&half) < 1e-12);
        assert!(x.adjoint_mul(&y).max_abs() < 1e-12);
        let f = ando_factorize(&a, &WitnessOptions::default()).unwrap();
        assert!(f.c.max_abs() < 1e-12);
    }

    #[test]
    fn isometry_of_scaled_identities() {
        let x = ComplexMatrix::identity(2).scale_real(std::f64::consts::FRAC_1_SQRT_2);
        let v = build_isometry_v(&x, &x).unwrap();
        assert!(v.adjoint_mul(&v).distance(&ComplexMatrix::identity(2)) < 1e-15);
        assert!(compress_nilpotent(&v).unwrap().distance(&ComplexMatrix::identity(2)) < 1e-15);
    }

    #[test]
    fn splitting_examples() {
        let r = verify_eq27_splitting(&nil2(2.0), &ComplexMatrix::from_real_diag(&[-1.0, 1.0]), 2).unwrap();
        assert_eq!(r.summands.len(), 2);
        assert!(r.holds());
        let r = verify_eq27_splitting(&ComplexMatrix::zeros(2, 2), &ComplexMatrix::zeros(2, 2), 4).unwrap();
        assert!(r.holds());
        assert!(verify_eq27_splitting(&nil2(2.0), &ComplexMatrix::zeros(2, 2), 2).is_err());
    }

    #[test]
    fn condition_examples() {
        let a = nil2(2.0);
        assert!(verify_condition(&a, Condition::Radius, ConditionPayload::None).unwrap());
        assert!(verify_condition(&a, Condition::Contraction, ConditionPayload::Contraction(&nil2(1.0))).unwrap());
        let big = ComplexMatrix::identity(2).scale_real(1.5);
        let zero = ComplexMatrix::zeros(2, 2);
        assert!(!verify_condition(&big, Condition::Witness, ConditionPayload::Witness(&zero)).unwrap());
        assert!(verify_condition(&a, Condition::Witness, ConditionPayload::None).is_err());
    }

    #[test]
    fn extremal_witness_has_rank_d() {
        let a = ComplexMatrix::from_real_rows(&[&[0.3, 0.5], &[-0.2, 0.1]]);
        let w = extremal_witness(&a, DEFAULT_TOL).unwrap();
        let e = hermitian_eig(&w.block).unwrap().eigenvalues;
        assert!(e[0].abs() < 1e-12 && e[1].abs() < 1e-12 && e[2] > 1e-3);
    }
}
