//! Subcommand implementations. Each returns its standard output as a string
//! so `main` owns all printing and exit codes.

use std::fmt;
use std::fs;
use std::path::Path;

use qspace_core::acceptance::{
    compare_spectra, inner_discrepancy, run_all, CheckConfig, CriterionId,
};
use qspace_core::doc::{parse_hamiltonian, parse_operator, parse_state, state_to_json};
use qspace_core::ladder::commutator_sweep;
use qspace_core::sampling;
use qspace_core::second_quant::{coefficients_in_basis, evolve_samples, occupancies};
use qspace_core::tolerance::MIN_TOL_OVERRIDE;
use qspace_core::{
    apply_expr, build_hamiltonian, inner, matrix_in_basis, spectrum, FockSpace, MatrixElements,
    ProductKind, QSpaceError, Statistics, TruncatedBasis,
};
use serde_json::{json, Value};

use crate::format::{num, residual};
use crate::{Cli, Command, Format, KindArg, StatsArg};

/// Largest basis the dense eigensolver is asked to handle.
const MAX_DENSE_DIM: usize = 2000;

const CCR_TOL: f64 = 1e-12;
const ORACLE_INNER_TOL: f64 = 1e-10;
const ORACLE_EIGEN_TOL: f64 = 1e-9;

#[derive(Debug, Default)]
pub struct Outcome {
    pub stdout: String,
    /// Diagnostics for standard error that do not change the exit code.
    pub warnings: Vec<String>,
    pub check_failed: bool,
}

impl Outcome {
    fn text(stdout: String) -> Self {
        Outcome {
            stdout,
            ..Outcome::default()
        }
    }
}

#[derive(Debug)]
pub struct CliError(String);

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<QSpaceError> for CliError {
    fn from(e: QSpaceError) -> Self {
        CliError(e.to_string())
    }
}

type Result<T> = std::result::Result<T, CliError>;

fn usage(msg: impl Into<String>) -> CliError {
    CliError(msg.into())
}

/// Reads and parses one input document, prefixing any error with its path.
fn load<T>(path: &Path, parse: impl FnOnce(&str) -> qspace_core::Result<T>) -> Result<T> {
    let text =
        fs::read_to_string(path).map_err(|e| CliError(format!("{}: {e}", path.display())))?;
    parse(&text).map_err(|e| CliError(format!("{}: {e}", path.display())))
}

fn stats_of(s: StatsArg) -> Statistics {
    match s {
        StatsArg::Boson => Statistics::Boson,
        StatsArg::Fermion => Statistics::Fermion,
    }
}

/// `--tol` wins over `QSPACE_TOL`.
fn tolerance(cli: &Cli) -> Result<Option<f64>> {
    let tol = match cli.tol {
        Some(t) => Some(t),
        None => match std::env::var("QSPACE_TOL") {
            Ok(s) => Some(
                s.trim()
                    .parse::<f64>()
                    .map_err(|_| usage(format!("QSPACE_TOL: not a number: {s:?}")))?,
            ),
            Err(_) => None,
        },
    };
    match tol {
        Some(t) if !(t.is_finite() && t > 0.0) => Err(usage(format!(
            "tolerance must be positive and finite, got {t}"
        ))),
        _ => Ok(tol),
    }
}

fn floored(tol: Option<f64>, default: f64) -> Result<f64> {
    match tol {
        Some(t) if t < MIN_TOL_OVERRIDE => Err(usage(format!(
            "tolerance {t:e} is below the minimum {MIN_TOL_OVERRIDE:e}"
        ))),
        Some(t) => Ok(t),
        None => Ok(default),
    }
}

fn lines<I: IntoIterator<Item = String>>(items: I) -> String {
    items.into_iter().map(|l| l + "\n").collect()
}

fn json_line(v: Value) -> String {
    format!("{v}\n")
}

pub fn run(cli: &Cli) -> Result<Outcome> {
    if let Some(n) = cli.threads {
        if n == 0 {
            return Err(usage("--threads must be at least 1"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| usage(format!("thread pool: {e}")))?;
    }
    let tol = tolerance(cli)?;
    let fmt = cli.format;
    match &cli.command {
        Command::Product { kind, left, right } => {
            let kind = match kind {
                KindArg::Sym => ProductKind::Symmetric,
                KindArg::Asym => ProductKind::Antisymmetric,
            };
            let a = load(left, parse_state)?;
            let b = load(right, parse_state)?;
            let z = inner(kind, &a, &b)?;
            Ok(Outcome::text(match fmt {
                Format::Plain => format!("{} {}\n", num(z.re), num(z.im)),
                Format::Json => json_line(json!({ "re": z.re, "im": z.im })),
            }))
        }
        Command::Apply { op, state } => {
            let (stats, expr) = load(op, parse_operator)?;
            let v = load(state, parse_state)?;
            if stats != v.stats() {
                return Err(QSpaceError::StatisticsMismatch {
                    expected: stats,
                    found: v.stats(),
                }
                .into());
            }
            let out = apply_expr(&expr, &v)?;
            Ok(Outcome::text(state_to_json(&out) + "\n"))
        }
        Command::CcrCheck { stats, modes, nmax } => {
            let stats = stats_of(*stats);
            let n_max = match (nmax, stats) {
                (Some(n), _) => *n,
                (None, Statistics::Fermion) => *modes as u32,
                (None, Statistics::Boson) => {
                    return Err(usage("--nmax is required for bosons"));
                }
            };
            if *modes == 0 {
                return Err(usage("--modes must be at least 1"));
            }
            let tol = floored(tol, CCR_TOL)?;
            let basis = TruncatedBasis::up_to(FockSpace::new(stats, *modes), n_max)?;
            let reports = commutator_sweep(&basis)?;
            let worst = reports.iter().map(|r| r.max_residual()).fold(0.0, f64::max);
            let checked: usize = reports.iter().map(|r| r.checked()).sum();
            let passed = worst <= tol;
            let stdout = match fmt {
                Format::Plain => format!("max residual {}\n", residual(worst)),
                Format::Json => json_line(json!({
                    "max_residual": worst,
                    "tolerance": tol,
                    "checked": checked,
                    "passed": passed,
                })),
            };
            Ok(Outcome {
                stdout,
                warnings: Vec::new(),
                check_failed: !passed,
            })
        }
        Command::Spectrum {
            hamiltonian,
            sector,
            nmax,
        } => {
            let (stats, me) = load(hamiltonian, parse_hamiltonian)?;
            let space = FockSpace::new(stats, me.modes());
            let basis = match (sector, nmax) {
                (Some(n), None) => TruncatedBasis::sector(space, *n)?,
                (None, Some(n)) => TruncatedBasis::up_to(space, *n)?,
                _ => return Err(usage("give exactly one of --sector or --nmax")),
            };
            check_dim(basis.len())?;
            let built = matrix_in_basis(&build_hamiltonian(&me), &basis)?;
            let values = spectrum(&built.matrix)?.values;
            let stdout = match fmt {
                Format::Plain => lines(values.iter().map(|&x| num(x))),
                Format::Json => json_line(json!({ "eigenvalues": values })),
            };
            Ok(Outcome {
                stdout,
                warnings: truncation_warning(built.truncation.len()),
                check_failed: false,
            })
        }
        Command::Evolve {
            hamiltonian,
            state,
            time,
            steps,
        } => {
            let (stats, me) = load(hamiltonian, parse_hamiltonian)?;
            let v = load(state, parse_state)?;
            if stats != v.stats() {
                return Err(QSpaceError::StatisticsMismatch {
                    expected: stats,
                    found: v.stats(),
                }
                .into());
            }
            if me.modes() != v.space().modes {
                return Err(QSpaceError::ModeCountMismatch {
                    left: me.modes(),
                    right: v.space().modes,
                }
                .into());
            }
            if !time.is_finite() {
                return Err(usage("--t must be finite"));
            }
            let basis = TruncatedBasis::up_to(v.space(), v.max_particles())?;
            check_dim(basis.len())?;
            let built = matrix_in_basis(&build_hamiltonian(&me), &basis)?;
            let psi0 = coefficients_in_basis(&v, &basis)?;
            let samples = evolve_samples(&built.matrix, &psi0, *time, *steps)?;
            Ok(Outcome {
                stdout: evolution_table(&samples, &basis, fmt),
                warnings: truncation_warning(built.truncation.len()),
                check_failed: false,
            })
        }
        Command::OracleCompare {
            modes,
            particles,
            stats,
            hamiltonian,
        } => {
            let stats = stats_of(*stats);
            let inner_tol = floored(tol, ORACLE_INNER_TOL)?;
            let eigen_tol = floored(tol, ORACLE_EIGEN_TOL)?;
            let me = match hamiltonian {
                Some(path) => {
                    let (h_stats, me) = load(path, parse_hamiltonian)?;
                    if h_stats != stats {
                        return Err(QSpaceError::StatisticsMismatch {
                            expected: stats,
                            found: h_stats,
                        }
                        .into());
                    }
                    if me.modes() != *modes {
                        return Err(QSpaceError::ModeCountMismatch {
                            left: *modes,
                            right: me.modes(),
                        }
                        .into());
                    }
                    me
                }
                None => sampling::matrix_elements(&mut sampling::rng(cli.seed), *modes, 0.3),
            };
            oracle_compare(&me, stats, *particles, inner_tol, eigen_tol, fmt)
        }
        Command::Selfcheck { only } => {
            let mut ids: Vec<CriterionId> = Vec::new();
            for token in only {
                let selected = CriterionId::select(token.trim());
                if selected.is_empty() {
                    return Err(usage(format!("unknown criterion {token:?}")));
                }
                ids.extend(selected);
            }
            let ids: Vec<CriterionId> = if ids.is_empty() {
                CriterionId::ALL.to_vec()
            } else {
                CriterionId::ALL
                    .into_iter()
                    .filter(|c| ids.contains(c))
                    .collect()
            };
            let cfg = CheckConfig {
                seed: cli.seed,
                tolerance_override: tol,
            };
            let reports = run_all(&cfg, &ids)?;
            let failed = reports.iter().filter(|r| !r.passed).count();
            let stdout = match fmt {
                Format::Plain => {
                    let mut out = lines(reports.iter().map(|r| r.to_string()));
                    out.push_str(&format!(
                        "{} of {} criteria passed\n",
                        reports.len() - failed,
                        reports.len()
                    ));
                    out
                }
                Format::Json => json_line(json!({
                    "passed": failed == 0,
                    "criteria": reports.iter().map(|r| json!({
                        "number": r.id.number(),
                        "key": r.id.key(),
                        "passed": r.passed,
                        "worst_residual": r.worst_residual,
                        "tolerance": r.tolerance,
                        "detail": r.detail,
                    })).collect::<Vec<_>>(),
                })),
            };
            Ok(Outcome {
                stdout,
                warnings: Vec::new(),
                check_failed: failed > 0,
            })
        }
    }
}

fn check_dim(dim: usize) -> Result<()> {
    if dim > MAX_DENSE_DIM {
        return Err(usage(format!(
            "basis dimension {dim} exceeds the dense limit {MAX_DENSE_DIM}"
        )));
    }
    Ok(())
}

fn truncation_warning(events: usize) -> Vec<String> {
    if events == 0 {
        Vec::new()
    } else {
        vec![format!(
            "warning: {events} components left the truncated basis and were dropped"
        )]
    }
}

fn evolution_table(
    samples: &[(f64, qspace_core::CVector)],
    basis: &TruncatedBasis,
    fmt: Format,
) -> String {
    let m = basis.space().modes;
    let rows = samples.iter().enumerate().map(|(k, (t, psi))| {
        let (occ, total) = occupancies(psi, basis);
        (k, *t, psi.norm(), total, occ)
    });
    match fmt {
        Format::Plain => {
            let mut header = vec!["step".to_string(), "t".into(), "norm".into(), "N".into()];
            header.extend((0..m).map(|k| format!("n_{k}")));
            let mut out = header.join(",") + "\n";
            for (k, t, norm, total, occ) in rows {
                let mut cells = vec![k.to_string(), num(t), num(norm), num(total)];
                cells.extend(occ.into_iter().map(num));
                out.push_str(&(cells.join(",") + "\n"));
            }
            out
        }
        Format::Json => json_line(Value::Array(
            rows.map(|(k, t, norm, total, occ)| {
                json!({ "step": k, "t": t, "norm": norm, "N": total, "occupancies": occ })
            })
            .collect(),
        )),
    }
}

fn oracle_compare(
    me: &MatrixElements,
    stats: Statistics,
    n: usize,
    inner_tol: f64,
    eigen_tol: f64,
    fmt: Format,
) -> Result<Outcome> {
    let (inner_worst, _) = inner_discrepancy(stats, me.modes(), n)?;
    let (q, l) = compare_spectra(me, stats, n)?;
    if q.len() != l.len() {
        return Err(usage(format!(
            "sector dimensions differ: occupation basis {} vs oracle {}",
            q.len(),
            l.len()
        )));
    }
    let eigen_worst = q
        .iter()
        .zip(&l)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    let passed = inner_worst <= inner_tol && eigen_worst <= eigen_tol;
    let stdout = match fmt {
        Format::Plain => format!(
            "max inner-product discrepancy {}\nmax eigenvalue discrepancy {}\n",
            residual(inner_worst),
            residual(eigen_worst)
        ),
        Format::Json => json_line(json!({
            "max_inner_product_discrepancy": inner_worst,
            "max_eigenvalue_discrepancy": eigen_worst,
            "inner_product_tolerance": inner_tol,
            "eigenvalue_tolerance": eigen_tol,
            "passed": passed,
        })),
    };
    Ok(Outcome {
        stdout,
        warnings: Vec::new(),
        check_failed: !passed,
    })
}
