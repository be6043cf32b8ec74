//! `opminimal`: minimal models of dg operads from the command line.
//!
//! Exit codes: 0 success, 1 unreadable input, 2 violated hypothesis,
//! 3 failed postcondition or verification, 64 bad usage.

mod render;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use opminimal_core::sullivan::{check_hypotheses, Target};
use opminimal_core::{minimal_model, verify_minimal_model, Builtin, Error, FiniteDgOperad, MinimalModel, Mode};

const EXIT_PARSE: u8 = 1;
const EXIT_HYPOTHESIS: u8 = 2;
const EXIT_POSTCONDITION: u8 = 3;
const EXIT_USAGE: u8 = 64;

#[derive(Parser, Debug)]
#[command(name = "opminimal", version, about = "Minimal models of dg operads over the rationals")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build a minimal model and write it as JSON.
    Model(ModelArgs),
    /// Re-check a model file against its target.
    Verify(VerifyArgs),
    /// Cohomology dimensions of a target and the hypotheses of the construction.
    Cohomology(CohomologyArgs),
    /// List the builtin operads.
    Builtins(FormatArgs),
}

#[derive(Args, Debug)]
struct OperadSource {
    /// Builtin operad name (see `builtins`).
    #[arg(long, conflicts_with = "file")]
    operad: Option<Builtin>,
    /// Operad JSON file.
    #[arg(long)]
    file: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ModelArgs {
    #[command(flatten)]
    source: OperadSource,
    #[arg(long, default_value_t = 4, value_parser = clap::value_parser!(u32).range(2..))]
    max_arity: u32,
    #[arg(long, value_enum, default_value_t = ModeArg::NonUnitary)]
    mode: ModeArg,
    /// Where to write the model JSON; printed to stdout with `--format json` otherwise.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// Model JSON file.
    #[arg(long, required_unless_present = "path")]
    file: Option<PathBuf>,
    #[arg(conflicts_with = "file")]
    path: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Args, Debug)]
struct CohomologyArgs {
    #[command(flatten)]
    source: OperadSource,
    #[arg(long, default_value_t = 4, value_parser = clap::value_parser!(u32).range(0..))]
    max_arity: u32,
    /// Hypotheses to test; defaults to unitary when the operad has a unit point.
    #[arg(long, value_enum)]
    mode: Option<ModeArg>,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Args, Debug)]
struct FormatArgs {
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    Unitary,
    NonUnitary,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Unitary => Mode::Unitary,
            ModeArg::NonUnitary => Mode::NonUnitary,
        }
    }
}

/// A failed command: exit code and message for stderr.
struct Failure(u8, String);

impl Failure {
    fn parse(e: impl std::fmt::Display) -> Self {
        Failure(EXIT_PARSE, e.to_string())
    }
}

fn classify(e: Error) -> Failure {
    match e {
        Error::Hypothesis(_) | Error::NotUnitary(_) => Failure(EXIT_HYPOTHESIS, e.to_string()),
        Error::Parse(_) | Error::Json(_) | Error::UnknownBuiltin(_) | Error::MalformedTree(_) | Error::UnknownGenerator(_) => {
            Failure(EXIT_PARSE, e.to_string())
        }
        _ => Failure(EXIT_POSTCONDITION, e.to_string()),
    }
}

fn read(path: &Path) -> Result<String, Failure> {
    fs::read_to_string(path).map_err(|e| Failure::parse(format!("{}: {e}", path.display())))
}

fn load_target(src: &OperadSource, max_arity: usize) -> Result<Target, Failure> {
    match (&src.operad, &src.file) {
        (Some(b), _) => Target::builtin(*b, max_arity.max(2)).map_err(classify),
        (None, Some(path)) => {
            let op = FiniteDgOperad::from_json_str(&read(path)?).map_err(|e| Failure::parse(format!("{}: {e}", path.display())))?;
            Ok(Target::inline(op))
        }
        (None, None) => Err(Failure(EXIT_USAGE, "one of --operad or --file is required".into())),
    }
}

fn write_out(path: &Path, text: &str) -> Result<(), Failure> {
    fs::write(path, text).map_err(|e| Failure(EXIT_POSTCONDITION, format!("cannot write {}: {e}", path.display())))
}

fn cmd_model(args: &ModelArgs) -> Result<(), Failure> {
    let max = args.max_arity as usize;
    let target = load_target(&args.source, max)?;
    if max > target.operad.max_arity() {
        return Err(Failure(
            EXIT_USAGE,
            format!("--max-arity {max} exceeds the operad file's truncation {}", target.operad.max_arity()),
        ));
    }
    let model = minimal_model(&target, max, args.mode.into()).map_err(classify)?;
    let report = verify_minimal_model(&model);
    let text = model.to_json_string(Some(&report));
    if let Some(out) = &args.out {
        write_out(out, &text)?;
    }
    match args.format {
        Format::Json if args.out.is_none() => print!("{text}"),
        Format::Json => println!("{}", serde_json::to_string_pretty(&report).expect("report serializes")),
        Format::Text => print!("{}", render::model_summary(&model, &target.name(), &report)),
    }
    if report.is_ok() {
        Ok(())
    } else {
        Err(Failure(EXIT_POSTCONDITION, render::failed_checks(&report)))
    }
}

fn cmd_verify(args: &VerifyArgs) -> Result<(), Failure> {
    let path = args.file.as_ref().or(args.path.as_ref()).expect("clap requires one path");
    let text = read(path)?;
    let model = MinimalModel::from_json_str(&text).map_err(|e| Failure::parse(format!("{}: {e}", path.display())))?;
    let report = verify_minimal_model(&model);
    match args.format {
        Format::Json => println!("{}", serde_json::to_string_pretty(&report).expect("report serializes")),
        Format::Text => print!("{}", render::report_lines(&report)),
    }
    if report.is_ok() {
        Ok(())
    } else {
        Err(Failure(EXIT_POSTCONDITION, render::failed_checks(&report)))
    }
}

fn cmd_cohomology(args: &CohomologyArgs) -> Result<(), Failure> {
    let target = load_target(&args.source, (args.max_arity as usize).max(2))?;
    let op = &target.operad;
    let max = (args.max_arity as usize).min(op.max_arity());
    let mode = args.mode.map(Mode::from).unwrap_or(if op.has_unit_point() { Mode::Unitary } else { Mode::NonUnitary });
    let dims = (0..=max).map(|n| op.cohomology_dims(n).map(|d| (n, d))).collect::<Result<Vec<_>, _>>().map_err(classify)?;
    let hypotheses = check_hypotheses(op, mode);
    match args.format {
        Format::Json => {
            let arities: serde_json::Map<String, serde_json::Value> =
                dims.iter().map(|(n, d)| (n.to_string(), json!(d))).collect();
            let v = json!({
                "operad": target.name(),
                "mode": mode.to_string(),
                "cohomology": arities,
                "hypotheses": match &hypotheses { Ok(()) => json!({"hold": true}), Err(e) => json!({"hold": false, "reason": e.to_string()}) },
            });
            println!("{}", serde_json::to_string_pretty(&v).expect("json value serializes"));
        }
        Format::Text => {
            println!("cohomology of {} up to arity {max}", target.name());
            for (n, d) in &dims {
                println!("  H(P({n})): {}", render::degree_dims(d));
            }
            match &hypotheses {
                Ok(()) => println!("hypotheses ({mode}): hold"),
                Err(e) => println!("hypotheses ({mode}): FAIL: {e}"),
            }
        }
    }
    hypotheses.map_err(classify)
}

fn cmd_builtins(args: &FormatArgs) -> Result<(), Failure> {
    match args.format {
        Format::Json => {
            let list: Vec<_> = Builtin::ALL
                .iter()
                .map(|b| json!({"name": b.name(), "unitary": b.is_unitary(), "description": b.description()}))
                .collect();
            println!("{}", serde_json::to_string_pretty(&list).expect("json value serializes"));
        }
        Format::Text => {
            for b in Builtin::ALL {
                println!("{:<9} {}", b.name(), b.description());
            }
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    let result = match &cli.command {
        Command::Model(a) => cmd_model(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Cohomology(a) => cmd_cohomology(a),
        Command::Builtins(a) => cmd_builtins(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure(code, msg)) => {
            eprintln!("opminimal: {msg}");
            ExitCode::from(code)
        }
    }
}
