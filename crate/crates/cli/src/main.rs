//! `absplit`: computes and certifies the stable wedge splitting of a real
//! abelian variety from a TOML input document.
//!
//! Exit codes: 0 when everything passes, 1 when a verification suite
//! fails or the splitting is refused, 2 on invalid input.

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use splitting_core::assemble::{
    assemble_splitting, assembly_notes, check_coefficients, integral_top_cell, verify_all,
    AssembleError, Depth, InputDoc, VarietyInput, VerifyConfig,
};
use splitting_core::expression::{
    render, LambdaDoc, RenderFormat, SplitDocument, SplittingExpression, SCHEMA_VERSION,
};
use splitting_core::real_locus::{all_components_connected_iff, gamma_possibilities};
use splitting_core::report::Report;
use splitting_core::topology::certify_splitting;
use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "absplit",
    about = "Stable wedge splittings of real abelian varieties, exactly verified",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

impl From<Format> for RenderFormat {
    fn from(f: Format) -> RenderFormat {
        match f {
            Format::Text => RenderFormat::Text,
            Format::Json => RenderFormat::Json,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum DepthArg {
    Quick,
    Full,
}

#[derive(Args)]
struct CommonArgs {
    /// Input document (TOML)
    #[arg(long)]
    input: PathBuf,
    /// Output format
    #[arg(long, value_enum, default_value = "text")]
    format: Format,
}

#[derive(Subcommand)]
enum Command {
    /// Compute the splitting expression
    Split(CommonArgs),
    /// Run the verification suites
    Verify {
        #[command(flatten)]
        common: CommonArgs,
        /// Verification depth
        #[arg(long, value_enum, default_value = "full")]
        depth: DepthArg,
        /// Seed for the randomized exact property checks
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Negative control: corrupt one diagonal projector first; the
        /// run must then fail
        #[arg(long)]
        inject_corruption: bool,
    },
    /// Compute only the real-locus component count
    Components(CommonArgs),
    /// Run only the topology oracle
    Oracle {
        /// Input document (TOML); alternative to --g/--n
        #[arg(long)]
        input: Option<PathBuf>,
        /// Dimension of the abelian variety
        #[arg(long)]
        g: Option<usize>,
        /// Number of components of the real locus (power of two)
        #[arg(long)]
        n: Option<u64>,
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
    },
}

fn load_input(path: &PathBuf) -> Result<VarietyInput> {
    let text = std::fs::read_to_string(path)
        .with_context(|| format!("cannot read input document {}", path.display()))?;
    let doc: InputDoc = toml::from_str(&text).context("cannot parse input document")?;
    Ok(doc.into_variety_input()?)
}

fn lambda_doc(input: &VarietyInput) -> LambdaDoc {
    LambdaDoc {
        inverted_primes: input.coefficients.inverted_primes.iter().copied().collect(),
        rational: input.coefficients.rational,
    }
}

fn split_document(
    input: &VarietyInput,
    status: &str,
    expr: &SplittingExpression,
    notes: Vec<String>,
    verification: BTreeMap<String, String>,
) -> SplitDocument {
    let mut doc = SplitDocument::from_expression(expr);
    doc.status = status.to_string();
    doc.g = input.g;
    doc.lambda = Some(lambda_doc(input));
    doc.notes = notes;
    doc.verification = verification;
    doc
}

fn run_split(common: &CommonArgs) -> Result<u8> {
    let input = load_input(&common.input)?;
    let gate = check_coefficients(&input.coefficients, input.g);
    let mut verification = BTreeMap::new();
    verification.insert(
        "coefficient-gate".to_string(),
        if gate.passed { "pass" } else { "fail" }.to_string(),
    );
    match assemble_splitting(&input) {
        Ok(expr) => {
            let notes = assembly_notes(&input);
            match common.format {
                Format::Json => {
                    let doc = split_document(&input, "ok", &expr, notes, verification);
                    println!("{}", serde_json::to_string_pretty(&doc)?);
                }
                Format::Text => {
                    if let Some(n) = expr.n_components {
                        println!("n(X) = {n}");
                    }
                    println!("X_+ ~ {}", render(&expr, RenderFormat::Text));
                    for note in notes {
                        println!("note: {note}");
                    }
                }
            }
            Ok(0)
        }
        Err(AssembleError::CoefficientsNotInvertible { missing, fallback }) => {
            let fb = fallback
                .map(|b| *b)
                .unwrap_or_else(|| integral_top_cell(input.g));
            match common.format {
                Format::Json => {
                    let mut doc = split_document(&input, "refused", &fb, Vec::new(), verification);
                    doc.notes.push(format!(
                        "coefficient ring must invert the primes {missing:?}; integral fallback offered"
                    ));
                    println!("{}", serde_json::to_string_pretty(&doc)?);
                }
                Format::Text => {
                    println!(
                        "refused: primes {missing:?} must be invertible for the full splitting"
                    );
                    println!(
                        "integral fallback: X_+ ~ {}",
                        render(&fb, RenderFormat::Text)
                    );
                }
            }
            Ok(1)
        }
        Err(AssembleError::NoRationalPoint) => {
            match common.format {
                Format::Json => {
                    let doc = SplitDocument {
                        schema_version: SCHEMA_VERSION,
                        status: "no-splitting-claimed".into(),
                        g: input.g,
                        lambda: Some(lambda_doc(&input)),
                        n_components: None,
                        plus_part: Vec::new(),
                        minus_part: Vec::new(),
                        integral_fallback: None,
                        notes: vec!["no rational point asserted".into()],
                        verification,
                    };
                    println!("{}", serde_json::to_string_pretty(&doc)?);
                }
                Format::Text => {
                    println!("no splitting claimed: the input does not assert a rational point");
                }
            }
            Ok(1)
        }
        Err(e) => Err(e.into()),
    }
}

fn print_report(report: &Report, format: Format) -> Result<()> {
    match format {
        Format::Json => {
            #[derive(serde::Serialize)]
            struct ReportDoc<'a> {
                schema_version: u32,
                status: &'a str,
                suites: &'a [splitting_core::report::Suite],
            }
            let doc = ReportDoc {
                schema_version: SCHEMA_VERSION,
                status: report.status(),
                suites: &report.suites,
            };
            println!("{}", serde_json::to_string_pretty(&doc)?);
        }
        Format::Text => print!("{report}"),
    }
    Ok(())
}

fn run_verify(
    common: &CommonArgs,
    depth: DepthArg,
    seed: u64,
    inject_corruption: bool,
) -> Result<u8> {
    let input = load_input(&common.input)?;
    let config = VerifyConfig {
        depth: match depth {
            DepthArg::Quick => Depth::Quick,
            DepthArg::Full => Depth::Full,
        },
        seed,
        inject_corruption,
    };
    let report = verify_all(&input, &config);
    print_report(&report, common.format)?;
    Ok(if report.passed() { 0 } else { 1 })
}

fn run_components(common: &CommonArgs) -> Result<u8> {
    let input = load_input(&common.input)?;
    let (n, notes) = input.resolve_components()?;
    let gamma: Option<Vec<u64>> = input
        .cm_data()?
        .as_ref()
        .map(gamma_possibilities)
        .transpose()?
        .map(|set| set.into_iter().collect());
    let always_connected = input
        .cm_data()?
        .as_ref()
        .map(all_components_connected_iff)
        .transpose()?;
    match common.format {
        Format::Json => {
            #[derive(serde::Serialize)]
            struct ComponentsDoc {
                schema_version: u32,
                g: usize,
                n_components: u64,
                #[serde(skip_serializing_if = "Option::is_none")]
                gamma_possibilities: Option<Vec<u64>>,
                #[serde(skip_serializing_if = "Option::is_none")]
                always_connected: Option<bool>,
                #[serde(skip_serializing_if = "Vec::is_empty")]
                notes: Vec<String>,
            }
            let doc = ComponentsDoc {
                schema_version: SCHEMA_VERSION,
                g: input.g,
                n_components: n,
                gamma_possibilities: gamma,
                always_connected,
                notes,
            };
            println!("{}", serde_json::to_string_pretty(&doc)?);
        }
        Format::Text => {
            println!("n(X) = {n}");
            if let Some(gamma) = gamma {
                println!("possible counts over all module choices: {gamma:?}");
            }
            if let Some(always) = always_connected {
                println!("connected for every variety with this data: {always}");
            }
            for note in notes {
                println!("note: {note}");
            }
        }
    }
    Ok(0)
}

fn run_oracle(
    input: Option<PathBuf>,
    g: Option<usize>,
    n: Option<u64>,
    format: Format,
) -> Result<u8> {
    let (g, n) = match (input, g, n) {
        (Some(path), None, None) => {
            let input = load_input(&path)?;
            let (n, _) = input.resolve_components()?;
            (input.g, n)
        }
        (None, Some(g), Some(n)) => (g, n),
        _ => anyhow::bail!("pass either --input, or both --g and --n"),
    };
    let suite = certify_splitting(g, n);
    let mut report = Report::new();
    report.push(suite);
    print_report(&report, format)?;
    Ok(if report.passed() { 0 } else { 1 })
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let outcome = match &cli.command {
        Command::Split(common) => run_split(common),
        Command::Verify {
            common,
            depth,
            seed,
            inject_corruption,
        } => run_verify(common, *depth, *seed, *inject_corruption),
        Command::Components(common) => run_components(common),
        Command::Oracle {
            input,
            g,
            n,
            format,
        } => run_oracle(input.clone(), *g, *n, *format),
    };
    match outcome {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
