//! Random corpora, cross-checks between equivalent certificates, and the
//! fixed reference values.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ando::{ando_factorize, solve_witness_with, verify_condition, Condition, ConditionPayload, WitnessOptions};
use crate::blockforms::{build_delta, build_gamma};
use crate::certify::{
    lemma4_resolvent_with_tol, lemma7_check_with_tol, refute, thm10_phi_with_tol, thm1_block2_with_tol,
    thm1_chain_with_tol, tridiag_spectrum, Claim, Refutation, TrigPolynomial, DEFAULT_CAP,
};
use crate::error::{Error, Result};
use crate::linalg::{c64, is_psd, matrix_power, tall_polar, ComplexMatrix, DEFAULT_TOL};
use crate::radius::{numerical_radius, operator_norm, radius_of_power, shift4_radius};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Ensemble {
    /// I.i.d. standard complex Gaussian entries.
    Ginibre,
    /// The lower shift; identical for every draw.
    NilpotentShift,
    Hermitian,
    Unitary,
}

impl FromStr for Ensemble {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ginibre" => Ok(Self::Ginibre),
            "nilpotent_shift" => Ok(Self::NilpotentShift),
            "hermitian" => Ok(Self::Hermitian),
            "unitary" => Ok(Self::Unitary),
            other => Err(Error::InvalidArgument(format!("unknown ensemble '{other}'"))),
        }
    }
}

impl fmt::Display for Ensemble {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Ginibre => "ginibre",
            Self::NilpotentShift => "nilpotent_shift",
            Self::Hermitian => "hermitian",
            Self::Unitary => "unitary",
        })
    }
}

/// The functional a corpus is normalized by.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Target {
    Norm,
    Radius,
}

impl FromStr for Target {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "norm" => Ok(Self::Norm),
            "radius" => Ok(Self::Radius),
            other => Err(Error::InvalidArgument(format!("unknown target '{other}'"))),
        }
    }
}

impl Target {
    pub fn evaluate(self, a: &ComplexMatrix) -> Result<f64> {
        match self {
            Target::Norm => operator_norm(a),
            Target::Radius => Ok(numerical_radius(a)?.value),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusSpec {
    pub seed: u64,
    pub count: usize,
    pub dim: usize,
    pub target: Target,
    pub target_value: f64,
    pub ensemble: Ensemble,
}

fn complex_gaussian(rng: &mut ChaCha8Rng) -> c64 {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    let re: f64 = rng.sample(StandardNormal);
    let im: f64 = rng.sample(StandardNormal);
    c64::new(re * s, im * s)
}

fn ginibre(rng: &mut ChaCha8Rng, d: usize) -> ComplexMatrix {
    ComplexMatrix::from_fn(d, d, |_, _| complex_gaussian(rng))
}

fn draw(rng: &mut ChaCha8Rng, ensemble: Ensemble, d: usize) -> Result<ComplexMatrix> {
    Ok(match ensemble {
        Ensemble::Ginibre => ginibre(rng, d),
        Ensemble::NilpotentShift => ComplexMatrix::lower_shift(d),
        Ensemble::Hermitian => ginibre(rng, d).hermitian_part(),
        Ensemble::Unitary => tall_polar(&ginibre(rng, d))?.0,
    })
}

/// Draws `count` matrices and rescales each so the target functional equals
/// `target_value`. The same spec always yields the same corpus.
pub fn generate_corpus(spec: &CorpusSpec) -> Result<Vec<ComplexMatrix>> {
    if spec.dim == 0 || spec.count == 0 {
        return Err(Error::InvalidArgument("dim and count must be at least 1".into()));
    }
    if !(spec.target_value.is_finite() && spec.target_value > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "target value must be positive, got {}",
            spec.target_value
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    (0..spec.count)
        .map(|_| {
            let a = draw(&mut rng, spec.ensemble, spec.dim)?;
            let value = spec.target.evaluate(&a)?;
            if value == 0.0 {
                return Err(Error::Domain(format!(
                    "{} draw of size {} has zero {:?}; cannot rescale",
                    spec.ensemble, spec.dim, spec.target
                )));
            }
            Ok(a.scale_real(spec.target_value / value))
        })
        .collect()
}

/// Groups of certificates a sweep can run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CheckGroup {
    /// Block norm tests against `‖A‖ ≤ 1`.
    Norm,
    /// `Δ_n`, `Γ_n` and the rotated real part against `w(A) ≤ 1`.
    Radius,
    /// `Φ_A` on Fejér kernels.
    Fejer,
    /// The witness and factorization chain.
    Ando,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepConfig {
    pub groups: BTreeSet<CheckGroup>,
    pub tol: f64,
    /// Largest block count for the chain norm test.
    pub chain_n: usize,
    /// Largest `n` for per-`n` `Δ`/`Γ` certificates.
    pub family_n: usize,
    /// Refutation cap for the all-`n` families.
    pub cap: usize,
    /// Largest Fejér kernel degree.
    pub fejer_max: usize,
    /// Distance from `w = 1` inside which witness failures are inconclusive.
    pub boundary_band: f64,
    /// Witness iteration budget away from the boundary.
    pub witness_iters: usize,
    /// Witness iteration budget inside the boundary band, where alternating
    /// projections converge slowly.
    pub boundary_witness_iters: usize,
}

impl Default for SweepConfig {
    fn default() -> Self {
        Self {
            groups: [
                CheckGroup::Norm,
                CheckGroup::Radius,
                CheckGroup::Fejer,
                CheckGroup::Ando,
            ]
            .into_iter()
            .collect(),
            tol: DEFAULT_TOL,
            chain_n: 8,
            family_n: 10,
            cap: DEFAULT_CAP,
            fejer_max: 8,
            boundary_band: 1e-6,
            witness_iters: crate::ando::DEFAULT_MAX_ITERS,
            boundary_witness_iters: 200,
        }
    }
}

impl SweepConfig {
    pub fn with_groups(groups: impl IntoIterator<Item = CheckGroup>) -> Self {
        Self {
            groups: groups.into_iter().collect(),
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Pass,
    Fail,
    /// A finite scan could not settle an all-`n` claim.
    Inconclusive,
    NotApplicable,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckResult {
    pub check: String,
    pub outcome: Outcome,
    /// The verdict implied by the reference quantity.
    pub expected: bool,
    pub min_eigenvalue: Option<f64>,
}

impl CheckResult {
    fn new(check: &str, outcome: Outcome, expected: bool, min_eigenvalue: Option<f64>) -> Self {
        Self {
            check: check.to_string(),
            outcome,
            expected,
            min_eigenvalue,
        }
    }

    pub fn disagrees(&self) -> bool {
        match self.outcome {
            Outcome::Pass => !self.expected,
            Outcome::Fail => self.expected,
            Outcome::Inconclusive | Outcome::NotApplicable => false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MatrixRow {
    pub index: usize,
    pub dim: usize,
    pub norm: f64,
    pub radius: f64,
    pub checks: Vec<CheckResult>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Disagreement {
    pub index: usize,
    pub check: String,
    pub expected: bool,
    pub outcome: Outcome,
}

/// Deterministic part of a sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepSummary {
    pub matrices: usize,
    pub checks_run: usize,
    pub inconclusive: usize,
    pub disagreements: Vec<Disagreement>,
    /// Smallest certificate eigenvalue seen for each check.
    pub extremal_eigenvalues: Vec<(String, f64)>,
    pub rows: Vec<MatrixRow>,
}

/// Wall-clock data, kept apart so the summary stays reproducible.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepTimings {
    pub total_ms: f64,
    pub per_matrix_ms: Vec<f64>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SweepReport {
    pub timings: SweepTimings,
    pub summary: SweepSummary,
}

fn outcome(ok: bool) -> Outcome {
    if ok {
        Outcome::Pass
    } else {
        Outcome::Fail
    }
}

fn norm_checks(a: &ComplexMatrix, norm: f64, cfg: &SweepConfig, out: &mut Vec<CheckResult>) -> Result<()> {
    let expected = norm <= 1.0 + cfg.tol;
    let block = thm1_block2_with_tol(a, cfg.tol)?;
    out.push(CheckResult::new(
        "thm1_block2",
        outcome(block.is_positive),
        expected,
        Some(block.min_eigenvalue),
    ));
    let chain = thm1_chain_with_tol(a, cfg.chain_n, cfg.tol)?;
    out.push(CheckResult::new(
        "thm1_chain",
        outcome(chain.overall),
        expected,
        Some(chain.min_eigenvalue()),
    ));
    match lemma4_resolvent_with_tol(a, cfg.tol) {
        Ok(c) => out.push(CheckResult::new(
            "lemma4_resolvent",
            outcome(c.is_positive),
            expected,
            Some(c.min_eigenvalue),
        )),
        Err(Error::Singular { .. }) => out.push(CheckResult::new(
            "lemma4_resolvent",
            Outcome::NotApplicable,
            expected,
            None,
        )),
        Err(e) => return Err(e),
    }
    Ok(())
}

fn radius_checks(a: &ComplexMatrix, radius: f64, cfg: &SweepConfig, out: &mut Vec<CheckResult>) -> Result<()> {
    let expected = radius <= 1.0 + cfg.tol;
    let mut agree = true;
    let mut min_delta = f64::INFINITY;
    let mut min_gamma = f64::INFINITY;
    let mut delta_all = true;
    let mut gamma_all = true;
    for n in 1..=cfg.family_n {
        let cd = is_psd(&build_delta(a, n)?, cfg.tol)?;
        let cg = is_psd(&build_gamma(a, n)?, cfg.tol)?;
        agree &= cd.is_positive == cg.is_positive;
        delta_all &= cd.is_positive;
        gamma_all &= cg.is_positive;
        min_delta = min_delta.min(cd.min_eigenvalue);
        min_gamma = min_gamma.min(cg.min_eigenvalue);
    }
    out.push(CheckResult::new("delta_gamma_per_n", outcome(agree), true, None));

    for (name, claim, all, min) in [
        ("thm2_delta", Claim::Thm2Delta, delta_all, min_delta),
        ("thm2_gamma", Claim::Thm2Gamma, gamma_all, min_gamma),
    ] {
        let result = if !all {
            Outcome::Fail
        } else if expected {
            Outcome::Pass
        } else {
            match refute(claim, a, cfg.cap, cfg.tol)? {
                Refutation::Refuted { .. } => Outcome::Fail,
                Refutation::Inconclusive { .. } => Outcome::Inconclusive,
            }
        };
        out.push(CheckResult::new(name, result, expected, Some(min)));
    }
    let l7 = lemma7_check_with_tol(a, 64, cfg.tol)?;
    out.push(CheckResult::new("lemma7", outcome(l7), expected, None));
    Ok(())
}

fn fejer_checks(a: &ComplexMatrix, radius: f64, cfg: &SweepConfig, out: &mut Vec<CheckResult>) -> Result<()> {
    let expected = radius <= 1.0 + cfg.tol;
    let argmax = numerical_radius(a)?.argmax_angle;
    let mut all = true;
    let mut min = f64::INFINITY;
    for n in 1..=cfg.fejer_max {
        for theta in [0.0, -argmax, std::f64::consts::FRAC_PI_2, std::f64::consts::PI] {
            let c = thm10_phi_with_tol(a, &TrigPolynomial::fejer_kernel(n, theta), cfg.tol)?;
            all &= c.is_positive;
            min = min.min(c.min_eigenvalue);
        }
    }
    // Fejér kernels are a finite subfamily, so passing them cannot refute
    let result = match (all, expected) {
        (false, _) => Outcome::Fail,
        (true, true) => Outcome::Pass,
        (true, false) => Outcome::Inconclusive,
    };
    out.push(CheckResult::new("thm10_fejer", result, expected, Some(min)));
    Ok(())
}

fn ando_checks(a: &ComplexMatrix, radius: f64, cfg: &SweepConfig, out: &mut Vec<CheckResult>) -> Result<()> {
    let expected = radius <= 1.0 + cfg.tol;
    let near_boundary = (radius - 1.0).abs() <= cfg.boundary_band;
    let opts = WitnessOptions {
        tol: cfg.tol,
        max_iters: if near_boundary {
            cfg.boundary_witness_iters
        } else {
            cfg.witness_iters
        },
        ..WitnessOptions::default()
    };
    let result = if expected {
        match ando_factorize(a, &opts) {
            Ok(f) => {
                let ok = verify_condition(a, Condition::Radius, ConditionPayload::None)?
                    && verify_condition(a, Condition::Factors, ConditionPayload::Factors { x: &f.x, y: &f.y })?
                    && verify_condition(a, Condition::Contraction, ConditionPayload::Contraction(&f.c))?
                    && verify_condition(a, Condition::Witness, ConditionPayload::Witness(&f.witness.h))?;
                outcome(ok)
            }
            Err(_) if near_boundary => Outcome::Inconclusive,
            Err(_) => Outcome::Fail,
        }
    } else {
        match solve_witness_with(a, &opts) {
            Ok(_) => Outcome::Pass,
            Err(Error::Domain(_)) | Err(Error::Infeasible(_)) => Outcome::Fail,
            Err(e) => return Err(e),
        }
    };
    out.push(CheckResult::new("ando", result, expected, None));
    Ok(())
}

fn evaluate(index: usize, a: &ComplexMatrix, cfg: &SweepConfig) -> Result<MatrixRow> {
    let norm = operator_norm(a)?;
    let radius = numerical_radius(a)?.value;
    let mut checks = Vec::new();
    for group in &cfg.groups {
        match group {
            CheckGroup::Norm => norm_checks(a, norm, cfg, &mut checks)?,
            CheckGroup::Radius => radius_checks(a, radius, cfg, &mut checks)?,
            CheckGroup::Fejer => fejer_checks(a, radius, cfg, &mut checks)?,
            CheckGroup::Ando => ando_checks(a, radius, cfg, &mut checks)?,
        }
    }
    Ok(MatrixRow {
        index,
        dim: a.rows(),
        norm,
        radius,
        checks,
    })
}

/// Runs every configured certificate on each matrix in parallel and
/// collects disagreements with the reference quantity. Rows keep corpus
/// order, so the summary is identical between runs.
pub fn run_equivalence_sweep(corpus: &[ComplexMatrix], cfg: &SweepConfig) -> Result<SweepReport> {
    if corpus.is_empty() {
        return Err(Error::InvalidArgument("corpus is empty".into()));
    }
    let start = Instant::now();
    let timed: Vec<(MatrixRow, f64)> = corpus
        .par_iter()
        .enumerate()
        .map(|(i, a)| {
            let t = Instant::now();
            let row = evaluate(i, a, cfg)?;
            Ok((row, t.elapsed().as_secs_f64() * 1e3))
        })
        .collect::<Result<_>>()?;
    let (rows, per_matrix_ms): (Vec<_>, Vec<_>) = timed.into_iter().unzip();

    let mut disagreements = Vec::new();
    let mut inconclusive = 0;
    let mut checks_run = 0;
    let mut extremal: Vec<(String, f64)> = Vec::new();
    for row in &rows {
        for c in &row.checks {
            checks_run += 1;
            if c.outcome == Outcome::Inconclusive {
                inconclusive += 1;
            }
            if c.disagrees() {
                disagreements.push(Disagreement {
                    index: row.index,
                    check: c.check.clone(),
                    expected: c.expected,
                    outcome: c.outcome,
                });
            }
            if let Some(m) = c.min_eigenvalue {
                match extremal.iter_mut().find(|(name, _)| *name == c.check) {
                    Some(entry) => entry.1 = entry.1.min(m),
                    None => extremal.push((c.check.clone(), m)),
                }
            }
        }
    }
    Ok(SweepReport {
        timings: SweepTimings {
            total_ms: start.elapsed().as_secs_f64() * 1e3,
            per_matrix_ms,
        },
        summary: SweepSummary {
            matrices: rows.len(),
            checks_run,
            inconclusive,
            disagreements,
            extremal_eigenvalues: extremal,
            rows,
        },
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GoldenEntry {
    pub name: String,
    pub expected: f64,
    pub computed: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GoldenReport {
    pub tolerance: f64,
    pub entries: Vec<GoldenEntry>,
}

impl GoldenReport {
    pub fn all_passed(&self) -> bool {
        self.entries.iter().all(|e| e.passed)
    }

    pub fn failures(&self) -> Vec<&GoldenEntry> {
        self.entries.iter().filter(|e| !e.passed).collect()
    }
}

pub const GOLDEN_TOL: f64 = 1e-6;

/// Reference values for the 4×4 shift, the 2×2 nilpotent, the scalar
/// tridiagonal spectrum and power bounds of shift matrices.
pub fn golden_regression() -> Result<GoldenReport> {
    let tol = GOLDEN_TOL;
    let mut entries = Vec::new();
    let mut equal = |name: &str, expected: f64, computed: f64| {
        entries.push(GoldenEntry {
            name: name.to_string(),
            expected,
            computed,
            passed: (computed - expected).abs() <= tol,
        });
    };

    let s = ComplexMatrix::lower_shift(4);
    let w1 = numerical_radius(&s)?.value;
    let w2 = radius_of_power(&s, 2)?;
    let w3 = radius_of_power(&s, 3)?;
    equal("w(S4)", shift4_radius(), w1);
    equal("w(S4^2)", 0.5, w2);
    equal("w(S4^3)", 0.5, w3);
    let nil = ComplexMatrix::from_real_rows(&[&[0.0, 2.0], &[0.0, 0.0]]);
    equal("w([[0,2],[0,0]])", 1.0, numerical_radius(&nil)?.value);
    let spectrum = tridiag_spectrum(c64::new(1.0, 0.0), 2)?;
    let sq = 2f64.sqrt();
    for (k, (want, got)) in [2.0 - sq, 2.0, 2.0 + sq].iter().zip(&spectrum.computed).enumerate() {
        equal(&format!("eig_{k}(Delta_2(1))"), *want, *got);
    }

    // strict failure of submultiplicativity
    entries.push(GoldenEntry {
        name: "w(S4)w(S4^2) < w(S4^3)".into(),
        expected: w3,
        computed: w1 * w2,
        passed: w1 * w2 < w3 - tol,
    });

    let mut worst: f64 = 0.0;
    for d in 2..=8 {
        let sd = ComplexMatrix::lower_shift(d);
        let a = sd.scale_real(1.0 / numerical_radius(&sd)?.value);
        for m in 1..=20 {
            worst = worst.max(operator_norm(&matrix_power(&a, m)?)?);
        }
    }
    entries.push(GoldenEntry {
        name: "max ||A^m||, shifts with w = 1, m <= 20".into(),
        expected: 2.0,
        computed: worst,
        passed: worst <= 2.0 + tol,
    });

    Ok(GoldenReport {
        tolerance: tol,
        entries,
    })
}
