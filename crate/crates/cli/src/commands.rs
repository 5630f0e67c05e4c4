use std::fs;
use std::path::{Path, PathBuf};

use numrad_core::ando::{ando_factorize, WitnessOptions};
use numrad_core::certify::{
    refute, thm1_block2_with_tol, thm1_chain_with_tol, thm2_delta_with_tol, thm2_gamma_with_tol, CertificateReport,
    Claim, Refutation,
};
use numrad_core::dilation::{build_unitary_dilation, von_neumann_check, Polynomial};
use numrad_core::harness::{
    generate_corpus, golden_regression, run_equivalence_sweep, CorpusSpec, Ensemble, SweepConfig, Target,
};
use numrad_core::radius::numerical_range_boundary;
use numrad_core::{c64, numerical_radius, operator_norm, PositivityCertificate};
use serde_json::{json, Value};

use crate::error::{CliError, Status};
use crate::matrix_file::{read_matrix, write_matrix};
use crate::output::{print_json, sig12, Format, Table};
use crate::{Cli, Command, GlobalOpts};

pub fn run(cli: &Cli) -> Result<Status, CliError> {
    let g = &cli.global;
    if !(g.tol.is_finite() && g.tol >= 0.0) {
        return Err(CliError::Input(format!(
            "--tol must be a nonnegative number, got {}",
            g.tol
        )));
    }
    match &cli.command {
        Command::Radius { matrix } => radius(g, matrix),
        Command::Range { matrix, samples, out } => range(g, matrix, *samples, out),
        Command::Certify {
            matrix,
            theorem,
            n,
            cap,
        } => certify(g, matrix, *theorem, *n, *cap),
        Command::Ando {
            matrix,
            iters,
            out_prefix,
        } => ando(g, matrix, *iters, out_prefix),
        Command::Dilate { matrix, horizon, out } => dilate(g, matrix, *horizon, out),
        Command::Vonneumann { matrix, poly, samples } => vonneumann(g, matrix, poly, *samples),
        Command::Sweep {
            seed,
            count,
            dim,
            target,
            ensemble,
            cap,
        } => sweep(g, *seed, *count, *dim, target, ensemble, *cap),
        Command::Golden => golden(g),
    }
}

fn radius(g: &GlobalOpts, path: &Path) -> Result<Status, CliError> {
    let a = read_matrix(path)?;
    let r = numerical_radius(&a)?;
    let norm = operator_norm(&a)?;
    match g.format {
        Format::Json => print_json(json!({
            "claim": "radius",
            "numerical_radius": r.value,
            "operator_norm": norm,
            "argmax_angle": r.argmax_angle,
            "tolerance": g.tol,
        })),
        Format::Text => Table::new()
            .num("numerical radius", r.value)
            .num("operator norm", norm)
            .num("argmax angle", r.argmax_angle)
            .print(),
    }
    Ok(Status::Pass)
}

fn range(g: &GlobalOpts, path: &Path, samples: usize, out: &Path) -> Result<Status, CliError> {
    let a = read_matrix(path)?;
    let points = numerical_range_boundary(&a, samples)?;
    let mut csv = String::from("re,im\n");
    for z in &points {
        csv.push_str(&format!("{},{}\n", sig12(z.re), sig12(z.im)));
    }
    fs::write(out, csv).map_err(|e| CliError::io(out, e))?;
    match g.format {
        Format::Json => print_json(json!({
            "claim": "range",
            "points": points.len(),
            "out": out.display().to_string(),
        })),
        Format::Text => Table::new()
            .row("points", points.len().to_string())
            .row("written to", out.display().to_string())
            .print(),
    }
    Ok(Status::Pass)
}

struct VerdictRow {
    claim: Claim,
    n: usize,
    cert: PositivityCertificate,
}

impl VerdictRow {
    fn json(&self) -> Value {
        json!({
            "claim": self.claim.to_string(),
            "n": self.n,
            "min_eigenvalue": self.cert.min_eigenvalue,
            "verdict": if self.cert.is_positive { "pass" } else { "fail" },
            "tolerance": self.cert.tolerance,
        })
    }
}

fn rows_of(report: &CertificateReport) -> impl Iterator<Item = VerdictRow> + '_ {
    report
        .n_range
        .iter()
        .zip(&report.verdicts)
        .map(|(&n, &cert)| VerdictRow {
            claim: report.claim,
            n,
            cert,
        })
}

fn certify(g: &GlobalOpts, path: &Path, theorem: u8, n: usize, cap: usize) -> Result<Status, CliError> {
    let a = read_matrix(path)?;
    if n == 0 {
        return Err(CliError::Input("--n must be at least 1".into()));
    }
    let mut rows = Vec::new();
    let (family, reference, reference_name) = if theorem == 1 {
        let cert = thm1_block2_with_tol(&a, g.tol)?;
        rows.push(VerdictRow {
            claim: Claim::Thm1Block2,
            n: 1,
            cert,
        });
        rows.extend(rows_of(&thm1_chain_with_tol(&a, n, g.tol)?));
        (Claim::Thm1Chain, operator_norm(&a)?, "operator norm")
    } else {
        rows.extend(rows_of(&thm2_delta_with_tol(&a, n, g.tol)?));
        rows.extend(rows_of(&thm2_gamma_with_tol(&a, n, g.tol)?));
        (Claim::Thm2Delta, numerical_radius(&a)?.value, "numerical radius")
    };

    let first_failure = rows.iter().filter(|r| !r.cert.is_positive).map(|r| r.n).min();
    let (status, refuting_n) = match first_failure {
        Some(k) => (Status::Failed, Some(k)),
        // the scanned range passed; a reference above 1 means a later n must fail
        None if reference > 1.0 + g.tol => match refute(family, &a, cap.max(n), g.tol)? {
            Refutation::Refuted { n, .. } => (Status::Failed, Some(n)),
            Refutation::Inconclusive { .. } => (Status::Inconclusive, None),
        },
        None => (Status::Pass, None),
    };
    let outcome = match status {
        Status::Pass => "pass",
        Status::Failed => "refuted",
        Status::Inconclusive => "inconclusive",
    };

    match g.format {
        Format::Json => print_json(json!({
            "reports": rows.iter().map(VerdictRow::json).collect::<Vec<_>>(),
            "reference": reference,
            "outcome": outcome,
            "refuting_n": refuting_n,
            "cap": cap,
        })),
        Format::Text => {
            println!("{:<10}  {:>3}  {:>20}  verdict", "claim", "n", "min eigenvalue");
            for r in &rows {
                println!(
                    "{:<10}  {:>3}  {:>20}  {}",
                    r.claim.to_string(),
                    r.n,
                    sig12(r.cert.min_eigenvalue),
                    if r.cert.is_positive { "pass" } else { "fail" }
                );
            }
            let mut t = Table::new();
            t.num(reference_name, reference).num("tolerance", g.tol);
            match refuting_n {
                Some(k) => t.row("refuted at n", k.to_string()),
                None if status == Status::Inconclusive => t.row("outcome", format!("inconclusive up to n = {cap}")),
                None => t.row("outcome", "pass"),
            };
            t.print();
        }
    }
    Ok(status)
}

fn with_suffix(prefix: &Path, suffix: &str) -> PathBuf {
    let mut name = prefix.as_os_str().to_owned();
    name.push(suffix);
    PathBuf::from(name)
}

fn ando(g: &GlobalOpts, path: &Path, iters: usize, prefix: &Path) -> Result<Status, CliError> {
    let a = read_matrix(path)?;
    let opts = WitnessOptions {
        max_iters: iters,
        tol: g.tol,
        ..WitnessOptions::default()
    };
    let f = ando_factorize(&a, &opts)?;
    let mut written = Vec::new();
    for (name, m) in [("H", &f.witness.h), ("X", &f.x), ("Y", &f.y), ("C", &f.c), ("V", &f.v)] {
        let p = with_suffix(prefix, &format!("_{name}.json"));
        write_matrix(&p, m)?;
        written.push(p.display().to_string());
    }
    let residual_path = with_suffix(prefix, "_residuals.json");
    let residuals = serde_json::to_value(&f.residuals).expect("serializable");
    let text = serde_json::to_string_pretty(&crate::output::round_json(residuals.clone())).expect("serializable");
    fs::write(&residual_path, text + "\n").map_err(|e| CliError::io(&residual_path, e))?;
    written.push(residual_path.display().to_string());

    match g.format {
        Format::Json => print_json(json!({
            "claim": "ando",
            "residuals": residuals,
            "solver_iterations": f.solver_iterations,
            "files": written,
            "tolerance": g.tol,
        })),
        Format::Text => {
            let mut t = Table::new();
            t.row("solver iterations", f.solver_iterations.to_string());
            for (k, v) in &f.residuals {
                t.num(k.as_str(), *v);
            }
            for w in &written {
                t.row("wrote", w.as_str());
            }
            t.print();
        }
    }
    Ok(Status::Pass)
}

fn dilate(g: &GlobalOpts, path: &Path, horizon: usize, out: &Path) -> Result<Status, CliError> {
    let a = read_matrix(path)?;
    let b = build_unitary_dilation(&a, horizon)?;
    write_matrix(out, &b.u)?;
    let unitarity = b.unitarity_residual();
    let compression = b.compression_residuals();
    let ok = compression.iter().all(|&r| r <= numrad_core::dilation::COMPRESSION_TOL);
    match g.format {
        Format::Json => print_json(json!({
            "claim": "dilation",
            "size": b.u.rows(),
            "unitarity_residual": unitarity,
            "compression_residuals": compression,
            "verdict": if ok { "pass" } else { "fail" },
            "out": out.display().to_string(),
        })),
        Format::Text => {
            let mut t = Table::new();
            t.row("size", b.u.rows().to_string())
                .num("unitarity residual", unitarity);
            for (k, r) in compression.iter().enumerate() {
                t.num(format!("compression k={}", k + 1), *r);
            }
            t.row("written to", out.display().to_string()).print();
        }
    }
    Ok(Status::from_bool(ok))
}

fn parse_coefficient(s: &str) -> Result<c64, CliError> {
    let s = s.trim();
    s.parse::<c64>()
        .map_err(|_| CliError::Input(format!("cannot parse polynomial coefficient '{s}'")))
}

fn vonneumann(g: &GlobalOpts, path: &Path, poly: &[String], samples: usize) -> Result<Status, CliError> {
    let a = read_matrix(path)?;
    let coeffs = poly
        .iter()
        .map(|s| parse_coefficient(s))
        .collect::<Result<Vec<_>, _>>()?;
    let p = Polynomial::new(coeffs)?;
    let r = von_neumann_check(&a, &p, samples)?;
    match g.format {
        Format::Json => print_json(json!({
            "claim": "von_neumann",
            "operator_value": r.operator_value,
            "sampled_sup": r.sampled_sup,
            "padding": r.padding,
            "verdict": if r.holds { "pass" } else { "fail" },
        })),
        Format::Text => Table::new()
            .num("norm of p(A)", r.operator_value)
            .num("sup of |p| on circle", r.sampled_sup)
            .num("padding", r.padding)
            .row("holds", r.holds.to_string())
            .print(),
    }
    Ok(Status::from_bool(r.holds))
}

fn parse_target(s: &str) -> Result<(Target, f64), CliError> {
    let bad = || CliError::Input(format!("--target expects radius=V or norm=V, got '{s}'"));
    let (kind, value) = s.split_once('=').ok_or_else(bad)?;
    let target: Target = kind.trim().parse().map_err(|_| bad())?;
    let value: f64 = value.trim().parse().map_err(|_| bad())?;
    Ok((target, value))
}

fn sweep(
    g: &GlobalOpts,
    seed: u64,
    count: usize,
    dim: usize,
    target: &str,
    ensemble: &str,
    cap: usize,
) -> Result<Status, CliError> {
    let (target, target_value) = parse_target(target)?;
    let ensemble: Ensemble = ensemble.parse()?;
    let corpus = generate_corpus(&CorpusSpec {
        seed,
        count,
        dim,
        target,
        target_value,
        ensemble,
    })?;
    let cfg = SweepConfig {
        tol: g.tol,
        cap,
        ..SweepConfig::default()
    };
    let report = run_equivalence_sweep(&corpus, &cfg)?;
    let s = &report.summary;
    match g.format {
        Format::Json => print_json(json!({
            "claim": "sweep",
            "timings": { "total_ms": report.timings.total_ms },
            "summary": {
                "matrices": s.matrices,
                "checks_run": s.checks_run,
                "inconclusive": s.inconclusive,
                "disagreements": s.disagreements,
                "extremal_eigenvalues": s.extremal_eigenvalues,
            },
            "tolerance": g.tol,
        })),
        Format::Text => {
            let mut t = Table::new();
            t.row("matrices", s.matrices.to_string())
                .row("checks run", s.checks_run.to_string())
                .row("inconclusive", s.inconclusive.to_string())
                .row("disagreements", s.disagreements.len().to_string());
            for (name, m) in &s.extremal_eigenvalues {
                t.num(format!("min eigenvalue {name}"), *m);
            }
            for d in &s.disagreements {
                t.row(
                    "disagreement",
                    format!(
                        "matrix {} check {} expected {} got {:?}",
                        d.index, d.check, d.expected, d.outcome
                    ),
                );
            }
            t.num("elapsed ms", report.timings.total_ms);
            t.print();
        }
    }
    Ok(Status::from_bool(s.disagreements.is_empty()))
}

fn golden(g: &GlobalOpts) -> Result<Status, CliError> {
    let r = golden_regression()?;
    match g.format {
        Format::Json => print_json(json!({
            "claim": "golden",
            "entries": r.entries,
            "tolerance": r.tolerance,
            "verdict": if r.all_passed() { "pass" } else { "fail" },
        })),
        Format::Text => {
            for e in &r.entries {
                println!(
                    "{:<42}  expected {:>20}  computed {:>20}  {}",
                    e.name,
                    sig12(e.expected),
                    sig12(e.computed),
                    if e.passed { "pass" } else { "FAIL" }
                );
            }
        }
    }
    Ok(Status::from_bool(r.all_passed()))
}
