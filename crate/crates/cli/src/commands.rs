use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand, ValueEnum};
use coherence_core::classify::{classify_channel_with, gi_extremality, mixed_unitary_decompose_with_budget, MixedUnitaryOutcome, DEFAULT_DECOMPOSE_BUDGET};
use coherence_core::convert::{fi_deterministic_full_rank, fi_deterministic_pure_with, gi_deterministic_pure, gi_deterministic_with, reduce_joint, sfi_probability, sgi_optimal_probability, ConversionVerdict};
use coherence_core::oracle::SearchBudget;
use coherence_core::Tolerance;
use serde_json::{json, Value};

use crate::demos::{self, DemoName};
use crate::document::{Document, StateInput};
use crate::error::CliError;
use crate::report::{self, Report};

#[derive(Debug, Parser)]
#[command(name = "coherence", version, about = "Classify incoherent channels and decide state conversions")]
pub struct Cli {
    /// Absolute and relative tolerance for numerical checks.
    #[arg(long, global = true, default_value_t = 1e-9)]
    pub tol: f64,
    /// Seed for randomized searches.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Iteration budget for searches.
    #[arg(long, global = true)]
    pub budget: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Report which classes of incoherent operations a channel belongs to.
    Classify {
        channel: PathBuf,
        /// Nondegenerate diagonal Hamiltonian enabling the TIO check.
        #[arg(long)]
        hamiltonian: Option<PathBuf>,
    },
    /// Decide a deterministic conversion between two states.
    Convert {
        #[arg(value_enum)]
        class: ConvertClass,
        source: PathBuf,
        target: PathBuf,
        /// Write the witness map, if any, to this file.
        #[arg(long)]
        emit_map: Option<PathBuf>,
    },
    /// Optimal or bounded probability of a stochastic pure-state conversion.
    Prob {
        #[arg(value_enum)]
        class: ProbClass,
        source: PathBuf,
        target: PathBuf,
    },
    /// Test a GI map for extremality among unital maps.
    Extremal {
        channel: PathBuf,
        /// Also try to write the map as a mixture of diagonal unitaries.
        #[arg(long)]
        decompose: bool,
        #[arg(long, default_value_t = 16)]
        max_terms: usize,
    },
    /// Reduce a joint GI map on rho (x) sigma to a GI map on rho.
    Reduce {
        joint: PathBuf,
        sigma: PathBuf,
        /// Write the reduced channel_schur document to this file.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run one of the built-in constructions and check its expected values.
    Demo {
        #[arg(value_enum)]
        name: DemoName,
    },
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ConvertClass {
    Gi,
    Fi,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ProbClass {
    Sgi,
    Sfi,
}

/// A finished computation and the exit code it maps to.
#[derive(Debug)]
pub struct Outcome {
    pub report: Report,
    pub exit_code: i32,
}

impl From<Report> for Outcome {
    fn from(report: Report) -> Self {
        Self { report, exit_code: 0 }
    }
}

pub struct Context {
    pub tol: Tolerance,
    pub seed: u64,
    pub budget: SearchBudget,
}

impl Context {
    fn from_cli(cli: &Cli) -> Result<Self, CliError> {
        let tol = Tolerance::uniform(cli.tol)?;
        let budget = SearchBudget::new(cli.budget.unwrap_or(SearchBudget::default().max_iterations), cli.seed, SearchBudget::default().convergence_eps)?;
        Ok(Self { tol, seed: cli.seed, budget })
    }

    pub fn report(&self, command: &str, inputs: Value, anchor: &str) -> Report {
        Report::new(command, inputs, self.tol.abs_eps, anchor)
    }
}

fn path_str(p: &Path) -> String {
    p.display().to_string()
}

pub fn execute(cli: &Cli) -> Result<Outcome, CliError> {
    let ctx = Context::from_cli(cli)?;
    match &cli.command {
        Command::Classify { channel, hamiltonian } => classify(&ctx, channel, hamiltonian.as_deref()),
        Command::Convert { class, source, target, emit_map } => convert(&ctx, *class, source, target, emit_map.as_deref()),
        Command::Prob { class, source, target } => prob(&ctx, *class, source, target),
        Command::Extremal { channel, decompose, max_terms } => extremal(&ctx, channel, *decompose, *max_terms, cli.budget),
        Command::Reduce { joint, sigma, out } => reduce(&ctx, joint, sigma, out.as_deref()),
        Command::Demo { name } => demos::run(&ctx, *name),
    }
}

fn classify(ctx: &Context, path: &Path, hamiltonian: Option<&Path>) -> Result<Outcome, CliError> {
    let m = Document::load(path)?.to_channel(&ctx.tol)?;
    let h = hamiltonian.map(|p| Document::load(p)?.to_hamiltonian()).transpose()?;
    let r = classify_channel_with(&m, h.as_ref(), &ctx.tol)?;
    let inputs = json!({"channel": path_str(path), "hamiltonian": hamiltonian.map(path_str)});
    let mut report = ctx.report("classify", inputs, "Schur-map form of GI maps and the same-form criterion for FI maps");
    report.set("flags", report::flags(&r));
    report.set("schur", r.schur.as_ref().map(|a| report::matrix(a.matrix())).unwrap_or(Value::Null));
    Ok(report.into())
}

fn load_state(path: &Path, tol: &Tolerance) -> Result<StateInput, CliError> {
    Document::load(path)?.to_state(tol)
}

fn convert(ctx: &Context, class: ConvertClass, source: &Path, target: &Path, emit: Option<&Path>) -> Result<Outcome, CliError> {
    let (src, dst) = (load_state(source, &ctx.tol)?, load_state(target, &ctx.tol)?);
    let (name, anchor, verdict): (&str, &str, ConversionVerdict) = match class {
        ConvertClass::Gi => {
            let v = match (&src, &dst) {
                (StateInput::Pure(a), StateInput::Pure(b)) => gi_deterministic_pure(a, b)?,
                _ => gi_deterministic_with(&src.density(), &dst.density(), &ctx.budget)?,
            };
            ("gi", "deterministic GI conversion needs equal diagonals and a PSD Schur completion", v)
        }
        ConvertClass::Fi => {
            let v = match (&src, &dst) {
                (StateInput::Pure(a), StateInput::Pure(b)) => fi_deterministic_pure_with(a, b, &ctx.budget)?,
                _ => fi_deterministic_full_rank(&src.density(), &dst.density())?,
            };
            ("fi", "deterministic FI conversion: permutations, erasure and two-operator witnesses", v)
        }
    };
    let inputs = json!({"class": name, "source": path_str(source), "target": path_str(target)});
    let mut report = ctx.report("convert", inputs, anchor);
    report.set("verdict", report::verdict(&verdict));
    if let (Some(path), Some(map)) = (emit, &verdict.map) {
        Document::from_kraus(map).save(path)?;
        report.set("map_file", json!(path_str(path)));
    }
    let exit_code = if !verdict.possible && !verdict.conclusive { 4 } else { 0 };
    Ok(Outcome { report, exit_code })
}

fn prob(ctx: &Context, class: ProbClass, source: &Path, target: &Path) -> Result<Outcome, CliError> {
    let (StateInput::Pure(psi), StateInput::Pure(phi)) = (load_state(source, &ctx.tol)?, load_state(target, &ctx.tol)?) else {
        return Err(CliError::Invalid("stochastic conversion probabilities are defined for pure states".into()));
    };
    let inputs = |c: &str| json!({"class": c, "source": path_str(source), "target": path_str(target)});
    let report = match class {
        ProbClass::Sgi => {
            let v = sgi_optimal_probability(&psi, &phi)?;
            let mut r = ctx.report("prob", inputs("sgi"), "optimal SGI probability min_i |psi_i|^2 / |phi_i|^2");
            r.set("value", json!(v.probability));
            r.set("exact", json!(true));
            r.set("reason", json!(v.reason.map(|x| x.as_str())));
            r.set("map", v.map.as_ref().map(report::channel).unwrap_or(Value::Null));
            r
        }
        ProbClass::Sfi => {
            let b = sfi_probability(&psi, &phi)?;
            let mut r = ctx.report("prob", inputs("sfi"), "permutation-improved lower bound for stochastic FI conversion");
            r.set("value", json!(b.lower_bound));
            r.set("exact", json!(b.exact));
            r.set("permutation", json!(b.permutation.mapping()));
            r.set("map", b.map.as_ref().map(report::channel).unwrap_or(Value::Null));
            r
        }
    };
    Ok(report.into())
}

fn extremal(ctx: &Context, path: &Path, decompose: bool, max_terms: usize, budget: Option<usize>) -> Result<Outcome, CliError> {
    let m = Document::load(path)?.to_channel(&ctx.tol)?;
    let w = gi_extremality(&m)?;
    let inputs = json!({"channel": path_str(path), "decompose": decompose, "max_terms": max_terms});
    let mut report = ctx.report("extremal", inputs, "extremal GI maps: linear independence of the K_i^dagger K_j diagonals");
    report.set(
        "verdict",
        json!({
            "extremal": w.extremal,
            "rank_found": w.rank_found,
            "rank_required": w.rank_required,
            "witness_vectors": w.witness_vectors.as_ref().map(|vs| vs.iter().map(|v| v.iter().map(|&z| report::complex(z)).collect::<Vec<_>>()).collect::<Vec<_>>()),
            "family_determinant": w.family_determinant.map(report::complex),
        }),
    );
    let mut exit_code = 0;
    if decompose {
        report = report.with_seed(ctx.seed);
        let outcome = mixed_unitary_decompose_with_budget(&m, max_terms, ctx.seed, budget.unwrap_or(DEFAULT_DECOMPOSE_BUDGET))?;
        let value = match &outcome {
            MixedUnitaryOutcome::Found(terms) => json!({
                "status": "found",
                "terms": terms.iter().map(|t| json!({"weight": t.weight, "phases": t.phases})).collect::<Vec<_>>(),
            }),
            MixedUnitaryOutcome::NotMixedUnitary => json!({"status": "not_mixed_unitary", "terms": null}),
            MixedUnitaryOutcome::BudgetExhausted => {
                exit_code = 4;
                json!({"status": "budget_exhausted", "terms": null})
            }
        };
        report.set("decomposition", value);
    }
    Ok(Outcome { report, exit_code })
}

fn reduce(ctx: &Context, joint: &Path, sigma: &Path, out: Option<&Path>) -> Result<Outcome, CliError> {
    let a = Document::load(joint)?.to_schur(&ctx.tol)?;
    let s = load_state(sigma, &ctx.tol)?.density();
    let reduced = reduce_joint(&a, &s)?;
    let inputs = json!({"joint": path_str(joint), "sigma": path_str(sigma)});
    let mut report = ctx.report("reduce", inputs, "a joint GI map on rho (x) sigma acts on rho as a single-system GI map");
    report.set("reduced", report::schur(&reduced));
    if let Some(path) = out {
        Document::from_schur(&reduced).save(path)?;
        report.set("output_file", json!(path_str(path)));
    }
    Ok(report.into())
}

/// Parses `argv`, runs the command and prints the report. Returns the
/// process exit code.
pub fn run<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match execute(&cli) {
        Ok(outcome) => {
            print!("{}", outcome.report.render());
            outcome.exit_code
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
