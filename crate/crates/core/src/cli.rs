//! Command-line front end.
//!
//! Exit codes: `0` compatible / valid, `1` incompatible / invalid state /
//! failed round trip, `2` input or usage error.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};

use crate::compat::{check_bfm, CompatReport};
use crate::io::{read_matrix, read_report, write_text, IoError, ReportFile};
use crate::linalg::{support_and_null, Tolerances};
use crate::states::{validate_density, DensityMatrix, StateError};
use crate::witness::{
    build_shared_decomposition, build_witness, compare_round_trip, normalization_residual,
    simulate_protocol, SharedDecomposition, WitnessError, WitnessState,
};

pub const EXIT_OK: i32 = 0;
pub const EXIT_REJECTED: i32 = 1;
pub const EXIT_INPUT: i32 = 2;

#[derive(Debug, Parser)]
#[command(
    name = "qcompat",
    version,
    about = "Compatibility of quantum state assignments"
)]
struct Cli {
    /// Eigenvalues at or below this are treated as zero.
    #[arg(long, global = true, env = "QCOMPAT_TOL_EIG", value_name = "X")]
    tol_eig: Option<f64>,
    /// Threshold for subspace intersection and the PI/PII checks.
    #[arg(long, global = true, value_name = "Y")]
    tol_overlap: Option<f64>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Check that a matrix file holds a valid density matrix.
    Validate { file: PathBuf },
    /// Print the support and null space of a density matrix.
    Support { file: PathBuf },
    /// Decide compatibility of two or more state assignments.
    Check {
        #[arg(required = true, num_args = 2..)]
        files: Vec<PathBuf>,
        #[arg(long, value_enum, default_value_t = Criterion::Bfm)]
        criterion: Criterion,
        #[arg(long, value_name = "OUT")]
        json: Option<PathBuf>,
    },
    /// Build decompositions of two states sharing a common pure state.
    Decompose {
        a: PathBuf,
        b: PathBuf,
        #[arg(long, value_name = "OUT")]
        json: Option<PathBuf>,
    },
    /// Build the tripartite witness state for a compatible pair.
    Witness {
        a: PathBuf,
        b: PathBuf,
        #[arg(long, value_name = "OUT")]
        json: Option<PathBuf>,
    },
    /// Run the ancilla measurement protocol on a stored witness.
    Simulate {
        witness: PathBuf,
        #[arg(long, value_name = "OUT")]
        json: Option<PathBuf>,
    },
}

/// Verdict that decides the exit code of `check`. `all` requires every
/// criterion to hold.
#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Criterion {
    Bfm,
    Pi,
    Pii,
    All,
}

#[derive(Debug)]
enum Failure {
    /// Bad input: unreadable file, schema problem, usage.
    Input(String),
    /// Well-formed input that fails the check being asked for.
    Rejected(String),
}

impl Failure {
    fn exit_code(&self) -> i32 {
        match self {
            Failure::Input(_) => EXIT_INPUT,
            Failure::Rejected(_) => EXIT_REJECTED,
        }
    }

    fn message(&self) -> &str {
        match self {
            Failure::Input(m) | Failure::Rejected(m) => m,
        }
    }
}

impl From<IoError> for Failure {
    fn from(e: IoError) -> Self {
        Failure::Input(e.to_string())
    }
}

type Outcome = Result<i32, Failure>;

fn tolerances(cli: &Cli) -> Result<Tolerances, Failure> {
    let mut tol = Tolerances::default();
    if let Some(x) = cli.tol_eig {
        tol.eigenvalue_zero_tol = x;
    }
    if let Some(y) = cli.tol_overlap {
        tol.overlap_tol = y;
    }
    tol.validate().map_err(|e| Failure::Input(e.to_string()))?;
    Ok(tol)
}

#[derive(Clone)]
struct Loaded {
    state: DensityMatrix,
    name: String,
}

fn load_state(path: &Path, tol: &Tolerances) -> Result<Loaded, Failure> {
    let (m, label) = read_matrix(path)?;
    let name = label.clone().unwrap_or_else(|| path.display().to_string());
    let state = validate_density(&m, tol).map_err(|e| match e {
        StateError::InvalidDensity(_) => Failure::Rejected(format!("{}: {e}", path.display())),
        other => Failure::Input(format!("{}: {other}", path.display())),
    })?;
    let state = match label {
        Some(l) => state.with_label(l),
        None => state,
    };
    Ok(Loaded { state, name })
}

fn load_pair(a: &Path, b: &Path, tol: &Tolerances) -> Result<(Loaded, Loaded), Failure> {
    let a = load_state(a, tol)?;
    let b = load_state(b, tol)?;
    if a.state.dim() != b.state.dim() {
        return Err(Failure::Input(format!(
            "dimension mismatch: {} has dim {}, {} has dim {}",
            a.name,
            a.state.dim(),
            b.name,
            b.state.dim()
        )));
    }
    Ok((a, b))
}

fn write_json(path: Option<&PathBuf>, file: &ReportFile) -> Result<(), Failure> {
    if let Some(p) = path {
        write_text(p, &file.to_json())?;
    }
    Ok(())
}

fn summarize_report(out: &mut dyn Write, r: &CompatReport) -> std::io::Result<()> {
    writeln!(out, "observers: {}", r.observers)?;
    writeln!(
        out,
        "bfm: {} (intersection_dim {})",
        if r.verdict_bfm {
            "compatible"
        } else {
            "incompatible"
        },
        r.intersection_dim
    )?;
    let suffix = if r.pairwise_aggregated {
        " [all pairs]"
    } else {
        ""
    };
    writeln!(
        out,
        "pi: {} (commutator_norm {:e}){suffix}",
        r.verdict_pi, r.commutator_norm
    )?;
    writeln!(
        out,
        "pii: {} (product_norm {:e}){suffix}",
        r.verdict_pii, r.product_norm
    )?;
    summarize_tolerances(out, &r.tolerances_used)
}

fn summarize_tolerances(out: &mut dyn Write, t: &Tolerances) -> std::io::Result<()> {
    writeln!(
        out,
        "tolerances: hermiticity {:e}, eigenvalue_zero {:e}, trace {:e}, overlap {:e}",
        t.hermiticity_tol, t.eigenvalue_zero_tol, t.trace_tol, t.overlap_tol
    )
}

fn summarize_decomposition(out: &mut dyn Write, d: &SharedDecomposition) -> std::io::Result<()> {
    writeln!(out, "p0: {} ({} further terms in A)", d.p0, d.rest_a.len())?;
    writeln!(out, "q0: {} ({} further terms in B)", d.q0, d.rest_b.len())
}

fn check_reports(states: &[Loaded], tol: &Tolerances) -> Result<CompatReport, Failure> {
    let dims: Vec<usize> = states.iter().map(|l| l.state.dim()).collect();
    if dims.iter().any(|&d| d != dims[0]) {
        return Err(Failure::Input(format!(
            "dimension mismatch between inputs: {dims:?}"
        )));
    }
    let list: Vec<DensityMatrix> = states.iter().map(|l| l.state.clone()).collect();
    check_bfm(&list, tol).map_err(|e| Failure::Input(e.to_string()))
}

fn witness_failure(e: WitnessError) -> Failure {
    match e {
        WitnessError::Incompatible => Failure::Rejected(e.to_string()),
        other => Failure::Input(other.to_string()),
    }
}

fn execute(cli: &Cli, out: &mut dyn Write) -> Outcome {
    let tol = tolerances(cli)?;
    let io = |e: std::io::Error| Failure::Input(format!("cannot write output: {e}"));
    match &cli.command {
        Command::Validate { file } => {
            let l = load_state(file, &tol)?;
            let rank = l
                .state
                .rank(&tol)
                .map_err(|e| Failure::Input(e.to_string()))?;
            writeln!(
                out,
                "valid: {} (dim {}, rank {rank})",
                l.name,
                l.state.dim()
            )
            .map_err(io)?;
            Ok(EXIT_OK)
        }
        Command::Support { file } => {
            let l = load_state(file, &tol)?;
            let (support, null, eig) = support_and_null(l.state.matrix(), &tol)
                .map_err(|e| Failure::Input(e.to_string()))?;
            writeln!(out, "dim: {}", l.state.dim()).map_err(io)?;
            writeln!(out, "support_dim: {}", support.dim()).map_err(io)?;
            writeln!(out, "null_dim: {}", null.dim()).map_err(io)?;
            for (k, (lambda, v)) in eig.values.iter().zip(&eig.vectors).enumerate() {
                let role = if k < support.dim() { "support" } else { "null" };
                let entries: Vec<String> = v
                    .iter()
                    .map(|z| format!("{:.6}{:+.6}i", z.re, z.im))
                    .collect();
                writeln!(out, "{role} {lambda:.12e} [{}]", entries.join(", ")).map_err(io)?;
            }
            Ok(EXIT_OK)
        }
        Command::Check {
            files,
            criterion,
            json,
        } => {
            let states = files
                .iter()
                .map(|f| load_state(f, &tol))
                .collect::<Result<Vec<_>, _>>()?;
            let report = check_reports(&states, &tol)?;
            summarize_report(out, &report).map_err(io)?;
            let names = states.into_iter().map(|l| l.name).collect();
            write_json(json.as_ref(), &ReportFile::new(names, &report))?;
            let pass = match criterion {
                Criterion::Bfm => report.verdict_bfm,
                Criterion::Pi => report.verdict_pi,
                Criterion::Pii => report.verdict_pii,
                Criterion::All => report.verdict_bfm && report.verdict_pi && report.verdict_pii,
            };
            Ok(if pass { EXIT_OK } else { EXIT_REJECTED })
        }
        Command::Decompose { a, b, json } => {
            let (a, b) = load_pair(a, b, &tol)?;
            let report = check_reports(&[a.clone(), b.clone()], &tol)?;
            let d =
                build_shared_decomposition(&a.state, &b.state, &tol).map_err(witness_failure)?;
            summarize_report(out, &report).map_err(io)?;
            summarize_decomposition(out, &d).map_err(io)?;
            let file = ReportFile::new(vec![a.name, b.name], &report).with_decomposition(&d);
            write_json(json.as_ref(), &file)?;
            Ok(EXIT_OK)
        }
        Command::Witness { a, b, json } => {
            let (a, b) = load_pair(a, b, &tol)?;
            let report = check_reports(&[a.clone(), b.clone()], &tol)?;
            let d =
                build_shared_decomposition(&a.state, &b.state, &tol).map_err(witness_failure)?;
            let w = build_witness(&d).map_err(witness_failure)?;
            summarize_report(out, &report).map_err(io)?;
            summarize_decomposition(out, &d).map_err(io)?;
            writeln!(out, "witness dims (A, B, S): {:?}", w.dims).map_err(io)?;
            writeln!(out, "normalization: {}", w.normalization).map_err(io)?;
            let file = ReportFile::new(vec![a.name, b.name], &report).with_witness(&w);
            write_json(json.as_ref(), &file)?;
            Ok(EXIT_OK)
        }
        Command::Simulate { witness, json } => {
            let mut file = read_report(witness)?;
            let w: WitnessState = file.witness_state()?;
            let outcome = simulate_protocol(&w, &tol).map_err(|e| Failure::Input(e.to_string()))?;
            let rt = compare_round_trip(&w, &outcome).map_err(|e| Failure::Input(e.to_string()))?;
            writeln!(out, "alice_error: {:e}", rt.alice_error).map_err(io)?;
            writeln!(out, "bob_error: {:e}", rt.bob_error).map_err(io)?;
            writeln!(out, "joint_fidelity: {}", rt.joint_fidelity).map_err(io)?;
            writeln!(out, "max_deviation: {:e}", rt.max_deviation()).map_err(io)?;
            writeln!(
                out,
                "normalization_residual: {:e}",
                normalization_residual(&w)
            )
            .map_err(io)?;
            writeln!(
                out,
                "outcome probabilities: alice {}, bob {}, joint {}",
                outcome.prob_alice, outcome.prob_bob, outcome.prob_joint
            )
            .map_err(io)?;
            writeln!(
                out,
                "round_trip: {}",
                if rt.passes() { "pass" } else { "fail" }
            )
            .map_err(io)?;
            summarize_tolerances(out, &tol).map_err(io)?;
            file.simulation = Some(crate::io::SimulationSection::new(
                &rt,
                [outcome.prob_alice, outcome.prob_bob, outcome.prob_joint],
            ));
            write_json(json.as_ref(), &file)?;
            Ok(if rt.passes() { EXIT_OK } else { EXIT_REJECTED })
        }
    }
}

/// Runs the CLI on `args` (including the program name) and returns the exit
/// code. Summaries go to `out`, diagnostics to `err`.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
            let text = e.render().to_string();
            let _ = if e.use_stderr() {
                write!(err, "{text}")
            } else {
                write!(out, "{text}")
            };
            return code;
        }
    };
    match execute(&cli, out) {
        Ok(code) => code,
        Err(f) => {
            let _ = writeln!(err, "error: {}", f.message());
            f.exit_code()
        }
    }
}
