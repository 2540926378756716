//! `eoa`: entanglement-of-assistance calculations from the command line.
//!
//! Exit codes: 0 success, 1 verification counterexample, 2 input error.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use eoa_core::assistance::{analyze, AnalyzeOptions, EocBudget, Measurement, NumericBudget};
use eoa_core::ensembles::{entangled_decomposition, equal_concurrence_decomposition, hjw_ensemble, Ensemble};
use eoa_core::qcore::io::{density_from_str, state_from_str};
use eoa_core::states::{generate, FamilySpec};
use eoa_core::verify::{run_suite, Suite, SuiteConfig, TrialRow};
use eoa_core::{DensityMatrix, Error, MonotoneSpec, PureState};

#[derive(Parser)]
#[command(name = "eoa", version, about = "Entanglement of assistance for three-qubit pure states")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Cut values, assistance values and lossless verdict for one state.
    Analyze(AnalyzeArgs),
    /// Seeded Monte Carlo verification suite.
    Verify(VerifyArgs),
    /// Pure-state decomposition of a two-qubit density matrix.
    Decompose(DecomposeArgs),
}

#[derive(Args)]
struct Output {
    /// Write the report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Csv,
}

#[derive(Args)]
struct AnalyzeArgs {
    /// Named family (ghz, w, product, bellc, haar[:seed]) or a JSON family spec.
    #[arg(long, conflicts_with = "state", required_unless_present = "state")]
    family: Option<String>,
    /// State file `{"dims": [2,2,2], "amplitudes": [[re, im], ...]}`.
    #[arg(long)]
    state: Option<PathBuf>,
    /// e2, ek:K, entropy:ALPHA, s0, concurrence, gconc.
    #[arg(long, default_value = "e2")]
    monotone: MonotoneSpec,
    /// Total evaluations of the numeric POVM search.
    #[arg(long)]
    budget: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Lossless classifier tolerance.
    #[arg(long)]
    tol: Option<f64>,
    /// Also run the two-round collaboration search.
    #[arg(long)]
    eoc: bool,
    #[command(flatten)]
    output: Output,
}

#[derive(Args)]
struct VerifyArgs {
    /// thm1, thm2, prop2, corollary, appendixB, ckw or eq37.
    suite: Suite,
    #[arg(long, default_value_t = 100)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Pass tolerance; defaults to the suite's contract value.
    #[arg(long)]
    tol: Option<f64>,
    /// Total evaluations per numeric POVM search.
    #[arg(long)]
    budget: Option<usize>,
    #[command(flatten)]
    output: Output,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Mode {
    Hjw,
    Equalc,
    Entangled,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Basis {
    Computational,
    X,
}

#[derive(Args)]
struct DecomposeArgs {
    /// Density matrix file (bare matrix, `{"entries": ...}` or a state file).
    #[arg(long)]
    rho: PathBuf,
    #[arg(long, value_enum)]
    mode: Mode,
    /// Purifier measurement for `--mode hjw`.
    #[arg(long, value_enum, default_value_t = Basis::Computational)]
    basis: Basis,
    #[command(flatten)]
    output: Output,
}

/// Failure carrying its exit code.
enum Failure {
    Counterexample(String),
    Input(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::Verification { .. } => Failure::Counterexample(e.to_string()),
            other => Failure::Input(other.to_string()),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Analyze(a) => cmd_analyze(a),
        Command::Verify(v) => cmd_verify(v),
        Command::Decompose(d) => cmd_decompose(d),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Counterexample(msg)) => {
            eprintln!("counterexample: {msg}");
            ExitCode::from(1)
        }
        Err(Failure::Input(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}

fn check_paths(inputs: &[&Path], out: Option<&Path>) -> Result<(), Failure> {
    for p in inputs {
        if !p.is_file() {
            return Err(Failure::Input(format!("input file {} not found", p.display())));
        }
    }
    if let Some(out) = out {
        let parent = out.parent().filter(|d| !d.as_os_str().is_empty());
        if parent.is_some_and(|d| !d.is_dir()) {
            return Err(Failure::Input(format!("output directory for {} does not exist", out.display())));
        }
    }
    Ok(())
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::Input(format!("cannot read {}: {e}", path.display())))
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), Failure> {
    match out {
        Some(p) => fs::write(p, text).map_err(|e| Failure::Input(format!("cannot write {}: {e}", p.display()))),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .map_err(|e| Failure::Input(format!("cannot write to stdout: {e}")))
        }
    }
}

fn to_json<T: serde::Serialize>(value: &T) -> Result<String, Failure> {
    let mut s = serde_json::to_string_pretty(value).map_err(|e| Failure::Input(e.to_string()))?;
    s.push('\n');
    Ok(s)
}

fn positive_tol(tol: Option<f64>) -> Result<(), Failure> {
    match tol {
        Some(t) if !(t > 0.0) => Err(Failure::Input(format!("--tol must be positive, got {t}"))),
        _ => Ok(()),
    }
}

fn numeric_budget(budget: Option<usize>, seed: u64) -> Result<NumericBudget, Failure> {
    match budget {
        Some(0) => Err(Failure::Input("--budget must be positive".into())),
        Some(n) => Ok(NumericBudget::with_total(n, seed)),
        None => Ok(NumericBudget {
            seed,
            ..NumericBudget::default()
        }),
    }
}

fn cmd_analyze(a: AnalyzeArgs) -> Result<(), Failure> {
    let out = a.output.out.as_deref();
    let inputs: Vec<&Path> = a.state.as_deref().into_iter().collect();
    check_paths(&inputs, out)?;
    positive_tol(a.tol)?;
    let psi: PureState = match (&a.family, &a.state) {
        (Some(name), _) => generate(&FamilySpec::parse(name)?)?,
        (None, Some(path)) => state_from_str(&read(path)?)?,
        (None, None) => return Err(Failure::Input("pass --family or --state".into())),
    };
    let numeric = numeric_budget(a.budget, a.seed)?;
    let opts = AnalyzeOptions {
        numeric,
        eoc: a.eoc.then(|| EocBudget {
            seed: a.seed,
            ..EocBudget::default()
        }),
        lossless_tol: a.tol.unwrap_or(AnalyzeOptions::default().lossless_tol),
    };
    let report = analyze(&psi, a.monotone, &opts)?;
    let text = match a.output.format {
        Format::Json => to_json(&report)?,
        Format::Csv => {
            let eoc = report.eoc_lower_bound.map_or(String::new(), |v| v.to_string());
            let case = serde_json::to_value(report.case).map_err(|e| Failure::Input(e.to_string()))?;
            format!(
                "cutA,cutB,eoaConstructive,eoaNumeric,numericConverged,outcomeCap,eocLowerBound,monotone,verdict,gap,case\n\
                 {},{},{},{},{},{},{},{},{},{},{}\n",
                report.cut_a,
                report.cut_b,
                report.eoa_constructive,
                report.eoa_numeric,
                report.numeric_converged,
                report.outcome_cap,
                eoc,
                report.monotone,
                report.verdict,
                report.gap,
                case.as_str().unwrap_or_default(),
            )
        }
    };
    emit(out, &text)
}

fn cmd_verify(v: VerifyArgs) -> Result<(), Failure> {
    let out = v.output.out.as_deref();
    check_paths(&[], out)?;
    positive_tol(v.tol)?;
    if v.trials == 0 {
        return Err(Failure::Input("--trials must be at least 1".into()));
    }
    let mut cfg = SuiteConfig::new(v.suite, v.trials, v.seed);
    if let Some(t) = v.tol {
        cfg.tol = t;
    }
    if v.budget.is_some() {
        cfg.numeric = Some(numeric_budget(v.budget, v.seed)?);
    }
    let report = run_suite(v.suite, &cfg)?;
    let text = match v.output.format {
        Format::Json => to_json(&report)?,
        Format::Csv => {
            let mut s = String::from(TrialRow::CSV_HEADER);
            s.push('\n');
            for row in &report.rows {
                s.push_str(&row.csv_line());
                s.push('\n');
            }
            s
        }
    };
    emit(out, &text)?;
    if report.all_passed() {
        Ok(())
    } else {
        if v.output.format == Format::Csv {
            if let Some(c) = &report.counterexample {
                eprintln!("{c}");
            }
        }
        Err(Failure::Counterexample(format!(
            "{} of {} trials failed; first failure at trial {}",
            report.failed,
            report.trials,
            report.counterexample.as_ref().map_or(String::new(), |c| c["trial"].to_string())
        )))
    }
}

fn cmd_decompose(d: DecomposeArgs) -> Result<(), Failure> {
    let out = d.output.out.as_deref();
    check_paths(&[d.rho.as_path()], out)?;
    if d.output.format == Format::Csv {
        return Err(Failure::Input("decompose writes JSON only".into()));
    }
    let rho: DensityMatrix = density_from_str(&read(&d.rho)?)?;
    let ensemble: Ensemble = match d.mode {
        Mode::Hjw => {
            let rank = rho.rank(1e-12);
            let meas = match d.basis {
                Basis::Computational => Measurement::computational(2, rank.clamp(2, 4)),
                Basis::X => Measurement::x_basis(2),
            };
            hjw_ensemble(&rho, &meas)?
        }
        Mode::Equalc => equal_concurrence_decomposition(&rho)?,
        Mode::Entangled => entangled_decomposition(&rho)?.ensemble,
    };
    let concurrences = ensemble.concurrences()?;
    emit(out, &to_json(&ensemble.to_json())?)?;
    let line = concurrences.iter().map(|c| c.to_string()).collect::<Vec<_>>().join(" ");
    if out.is_some() {
        println!("concurrences: {line}");
    } else {
        eprintln!("concurrences: {line}");
    }
    Ok(())
}
