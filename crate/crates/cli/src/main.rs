use std::io::{self, Write};
use std::path::Path;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::json;

use spherecert::certifier::{certify_stability, theorem11_check, Problem, NORMALIZATION};
use spherecert::harmonics::harmonic_basis;
use spherecert::identities::verify_identities;
use spherecert::kahler_table::{lemma42_table, to_csv_line, CSV_HEADER};
use spherecert::{format_rational, parse_rational, CalibrationSpec, MomentTable, MultiIndex, Rational};

#[derive(Parser, Debug)]
#[command(name = "spherecert", version, about = "Exact certification of the calibrated Cauchy-Riemann inequality on S^3")]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    format: Format,
    /// Append the symbolic volume factor "*|S^m|" to emitted integrals.
    #[arg(long, global = true)]
    volume_tag: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Moments of all even monomials up to a total degree.
    Moments {
        #[arg(long, default_value_t = 3)]
        m: usize,
        #[arg(long, default_value_t = 4)]
        max_degree: u32,
    },
    /// Exact basis of the degree-l eigenspace.
    Basis {
        #[arg(long, default_value_t = 3)]
        m: usize,
        #[arg(long)]
        l: u32,
    },
    /// Weighted pairing integrals of the Kähler form on S^3.
    #[command(name = "table-lemma42")]
    TableLemma42,
    /// Degree-by-degree certificate bundle.
    Certify {
        /// Built-in calibration name or path to a calibration JSON file.
        #[arg(long, default_value = "kahler3")]
        omega: String,
        /// Highest degree checked exactly.
        #[arg(long = "L", default_value_t = 2)]
        l_exact: u32,
        /// Rational factor applied to the calibration.
        #[arg(long, default_value = "1")]
        scale: String,
        /// Worker threads for degree reports.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
    },
    /// Eigenspace preservation and orthogonality for degrees 0..=L.
    Theorem11 {
        #[arg(long, default_value = "kahler3")]
        omega: String,
        #[arg(long = "L", default_value_t = 4)]
        l_exact: u32,
    },
    /// Seeded randomized checks of the exact identities.
    VerifyIdentities {
        #[arg(long, default_value = "kahler3")]
        omega: String,
        #[arg(long)]
        seed: u64,
        #[arg(long, default_value_t = 25)]
        trials: usize,
        #[arg(long, default_value_t = 5)]
        max_degree: u32,
    },
}

/// Outcome of a subcommand: the report, plus whether a verification failed.
struct Outcome {
    body: String,
    violation: bool,
}

fn load_spec(omega: &str, scale: &Rational) -> Result<CalibrationSpec, String> {
    let mut spec = match CalibrationSpec::builtin(omega) {
        Some(s) => s,
        None => {
            let path = Path::new(omega);
            let text = std::fs::read_to_string(path).map_err(|e| format!("cannot read calibration {omega}: {e}"))?;
            serde_json::from_str(&text).map_err(|e| format!("malformed calibration {omega}: {e}"))?
        }
    };
    if scale != &Rational::from_integer(1.into()) {
        for t in &mut spec.terms {
            let c = parse_rational(&t.coeff).map_err(|e| e.to_string())?;
            t.coeff = format_rational(&(c * scale));
        }
    }
    Ok(spec)
}

fn load_problem(omega: &str, scale: &Rational) -> Result<Problem, String> {
    let spec = load_spec(omega, scale)?;
    Problem::from_spec(&spec).map_err(|e| e.to_string())
}

fn tag(value: String, volume_tag: bool) -> String {
    if volume_tag {
        format!("{value}*|S^m|")
    } else {
        value
    }
}

fn to_json<T: Serialize>(v: &T) -> Result<String, String> {
    serde_json::to_string_pretty(v).map_err(|e| e.to_string())
}

fn csv(lines: Vec<String>) -> String {
    let mut out = format!("# normalization: {NORMALIZATION}\n");
    for l in lines {
        out.push_str(&l);
        out.push('\n');
    }
    out
}

fn run(cli: Cli) -> Result<Outcome, String> {
    let fmt = cli.format;
    let vt = cli.volume_tag;
    match cli.command {
        Command::Moments { m, max_degree } => {
            if m < 1 {
                return Err("m must be at least 1".into());
            }
            let table = MomentTable::new(m);
            let rows: Vec<(MultiIndex, String)> = (0..=max_degree)
                .step_by(2)
                .flat_map(|d| MultiIndex::all_of_degree(m + 1, d))
                .filter(|a| !a.has_odd())
                .map(|a| {
                    let v = tag(format_rational(&table.monomial_moment(&a)), vt);
                    (a, v)
                })
                .collect();
            let body = match fmt {
                Format::Csv => {
                    let header = (1..=m + 1).map(|i| format!("a{i}")).chain(["moment".into()]).collect::<Vec<_>>();
                    let mut lines = vec![header.join(",")];
                    for (a, v) in rows {
                        let exps: Vec<String> = a.exponents().iter().map(u32::to_string).collect();
                        lines.push(format!("{},{v}", exps.join(",")));
                    }
                    csv(lines)
                }
                Format::Json => to_json(&json!({
                    "normalization": NORMALIZATION,
                    "m": m,
                    "max_degree": max_degree,
                    "moments": rows.iter().map(|(a, v)| json!({"exp": a.exponents(), "moment": v})).collect::<Vec<_>>(),
                }))?,
            };
            Ok(Outcome { body, violation: false })
        }
        Command::Basis { m, l } => {
            if m < 1 {
                return Err("m must be at least 1".into());
            }
            let space = harmonic_basis(m, l);
            let body = match fmt {
                Format::Csv => {
                    let header = std::iter::once("index".to_string())
                        .chain((1..=m + 1).map(|i| format!("a{i}")))
                        .chain(["coeff".into()])
                        .collect::<Vec<_>>();
                    let mut lines = vec![
                        format!("# lambda: {}, dim: {}", space.eigenvalue, space.dim()),
                        header.join(","),
                    ];
                    for (k, b) in space.basis.iter().enumerate() {
                        for t in b.to_json_terms() {
                            let exps: Vec<String> = t.exp.iter().map(u32::to_string).collect();
                            lines.push(format!("{k},{},{}", exps.join(","), t.coeff));
                        }
                    }
                    csv(lines)
                }
                Format::Json => to_json(&json!({
                    "normalization": NORMALIZATION,
                    "m": m,
                    "l": l,
                    "lambda": space.eigenvalue,
                    "dim": space.dim(),
                    "basis": space.basis.iter().map(|b| b.to_json_terms()).collect::<Vec<_>>(),
                }))?,
            };
            Ok(Outcome { body, violation: false })
        }
        Command::TableLemma42 => {
            let problem = Problem::kahler();
            let mut rows = lemma42_table(&problem);
            if vt {
                for r in &mut rows {
                    r.computed = tag(std::mem::take(&mut r.computed), true);
                    r.expected = tag(std::mem::take(&mut r.expected), true);
                }
            }
            let violation = rows.iter().any(|r| !r.matched);
            let body = match fmt {
                Format::Csv => {
                    let mut lines = vec![CSV_HEADER.to_string()];
                    lines.extend(rows.iter().map(to_csv_line));
                    csv(lines)
                }
                Format::Json => to_json(&json!({
                    "normalization": NORMALIZATION,
                    "int_phi2": "1/4",
                    "rows": rows,
                    "all_match": !violation,
                }))?,
            };
            Ok(Outcome { body, violation })
        }
        Command::Certify {
            omega,
            l_exact,
            scale,
            jobs,
        } => {
            let scale = parse_rational(&scale).map_err(|e| e.to_string())?;
            let problem = load_problem(&omega, &scale)?;
            let bundle = certify_stability(&problem, l_exact, jobs).map_err(|e| e.to_string())?;
            let violation = !bundle.is_certified();
            let body = match fmt {
                Format::Csv => {
                    let mut lines = vec!["l,lambda,dim,status,kernel_dim,min_pivot".to_string()];
                    for d in &bundle.degrees {
                        let status = serde_json::to_value(d.status).map_err(|e| e.to_string())?;
                        lines.push(format!(
                            "{},{},{},{},{},{}",
                            d.l,
                            d.lambda,
                            d.dim,
                            status.as_str().unwrap_or_default(),
                            d.kernel_dim,
                            d.min_pivot.as_ref().map(format_rational).unwrap_or_default()
                        ));
                    }
                    lines.push(format!(
                        "# tail: {} < lambda_{} = {}: {}",
                        bundle.tail.factor_squared, bundle.tail.l, bundle.tail.lambda, bundle.tail.strict
                    ));
                    if let Some(f) = &bundle.equality_family {
                        lines.push(format!("# equality: {}", f.relations.join("; ")));
                    }
                    lines.push(format!(
                        "# verdict: {}",
                        if bundle.is_certified() { "certified" } else { "not_certified" }
                    ));
                    csv(lines)
                }
                Format::Json => to_json(&bundle)?,
            };
            Ok(Outcome { body, violation })
        }
        Command::Theorem11 { omega, l_exact } => {
            let problem = load_problem(&omega, &Rational::from_integer(1.into()))?;
            let reports: Vec<_> = (0..=l_exact).map(|l| theorem11_check(&problem, l)).collect();
            let violation = reports.iter().any(|r| !r.passed());
            let body = match fmt {
                Format::Csv => {
                    let mut lines = vec!["l,checked,failures".to_string()];
                    lines.extend(reports.iter().map(|r| format!("{},{},{}", r.l, r.checked, r.failures.len())));
                    csv(lines)
                }
                Format::Json => to_json(&json!({
                    "normalization": NORMALIZATION,
                    "reports": reports,
                    "passed": !violation,
                }))?,
            };
            Ok(Outcome { body, violation })
        }
        Command::VerifyIdentities {
            omega,
            seed,
            trials,
            max_degree,
        } => {
            let problem = load_problem(&omega, &Rational::from_integer(1.into()))?;
            let report = verify_identities(&problem, seed, trials, max_degree);
            let violation = !report.passed();
            let body = match fmt {
                Format::Csv => csv(vec![
                    "seed,trials,max_degree,coprimitive_checked,commutation_checked,counterexamples".into(),
                    format!(
                        "{},{},{},{},{},{}",
                        report.seed,
                        report.trials,
                        report.max_degree,
                        report.coprimitive_checked,
                        report.commutation_checked,
                        report.counterexamples.len()
                    ),
                ]),
                Format::Json => to_json(&json!({
                    "normalization": NORMALIZATION,
                    "report": report,
                    "passed": !violation,
                }))?,
            };
            Ok(Outcome { body, violation })
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let informational = matches!(
                e.kind(),
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion
            );
            let _ = e.print();
            return if informational { ExitCode::SUCCESS } else { ExitCode::from(1) };
        }
    };
    match run(cli) {
        Ok(out) => {
            let mut stdout = io::stdout().lock();
            let mut body = out.body;
            if !body.ends_with('\n') {
                body.push('\n');
            }
            if stdout.write_all(body.as_bytes()).is_err() {
                return ExitCode::from(1);
            }
            if out.violation {
                ExitCode::from(2)
            } else {
                ExitCode::SUCCESS
            }
        }
        Err(msg) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}
