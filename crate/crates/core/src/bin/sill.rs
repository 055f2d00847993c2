use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use sill::parser::{parse_source, parse_type, SourceFile};
use sill::runtime::{self, Configuration, Outcome, DEFAULT_FUEL};
use sill::sigcheck::{check_signature, SigError};
use sill::subtype::subtype;

const TYPE_ERROR: u8 = 1;
const PARSE_ERROR: u8 = 2;
const IO_ERROR: u8 = 3;
const DEADLOCK: u8 = 4;
const OUT_OF_FUEL: u8 = 5;
const FIDELITY: u8 = 6;

#[derive(Parser)]
#[command(
    name = "sill",
    version,
    about = "Session types with intersections and unions"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Check every definition in a file.
    Check { file: PathBuf },
    /// Decide whether one type is a subtype of another.
    Subtype { file: PathBuf, a: String, b: String },
    /// Run a definition without parameters and print what it sends.
    Run(RunArgs),
    /// Like `run`, printing the step trace instead.
    Trace(RunArgs),
}

#[derive(Args)]
struct RunArgs {
    file: PathBuf,
    entry: String,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_FUEL)]
    fuel: u64,
    /// Also write the step trace to this file.
    #[arg(long)]
    trace: Option<PathBuf>,
    /// Skip checking the signature before running.
    #[arg(long)]
    no_check: bool,
}

fn load(path: &Path) -> Result<SourceFile, u8> {
    let bytes = fs::read(path).map_err(|e| {
        eprintln!("error: cannot read {}: {e}", path.display());
        IO_ERROR
    })?;
    let text = String::from_utf8(bytes).map_err(|e| {
        eprintln!(
            "{}: byte {}: input is not UTF-8",
            path.display(),
            e.utf8_error().valid_up_to()
        );
        PARSE_ERROR
    })?;
    parse_source(&text).map_err(|e| {
        eprintln!("{}:{}:{}: {}", path.display(), e.line, e.col, e.message);
        PARSE_ERROR
    })
}

fn report(path: &Path, src: &SourceFile, errors: &[SigError]) {
    for e in errors {
        let span = match e {
            SigError::NonContractive { name, .. } => src.type_span(name),
            SigError::Type { def, .. } => src.proc_span(def),
            SigError::UndefinedType { .. } | SigError::UndefinedProc { .. } => None,
        };
        match span {
            Some(s) => eprintln!(
                "{}:{}:{}: error: {e}",
                path.display(),
                s.start.line,
                s.start.col
            ),
            None => eprintln!("{}: error: {e}", path.display()),
        }
    }
}

fn cmd_check(file: &Path) -> Result<(), u8> {
    let src = load(file)?;
    match check_signature(&src.signature) {
        Ok(()) => {
            println!(
                "ok: {} types, {} processes",
                src.signature.type_count(),
                src.signature.procdefs().count()
            );
            Ok(())
        }
        Err(errors) => {
            report(file, &src, &errors);
            Err(TYPE_ERROR)
        }
    }
}

fn cmd_subtype(file: &Path, a: &str, b: &str) -> Result<(), u8> {
    let src = load(file)?;
    if let Err(errors) = sill::sigcheck::check_names(&src.signature) {
        report(file, &src, &errors);
        return Err(TYPE_ERROR);
    }
    let report_ok = sill::sigcheck::check_contractive(&src.signature);
    if !report_ok.ok {
        eprintln!("{}: error: {report_ok}", file.display());
        return Err(TYPE_ERROR);
    }
    let parse = |s: &str| {
        let t = parse_type(s).map_err(|e| {
            eprintln!("error in `{s}` at column {}: {}", e.col, e.message);
            PARSE_ERROR
        })?;
        let mut missing = None;
        t.for_each_name(&mut |n| {
            if src.signature.typedef(n).is_none() {
                missing.get_or_insert_with(|| n.clone());
            }
        });
        match missing {
            Some(n) => {
                eprintln!("error in `{s}`: undefined type name `{n}`");
                Err(PARSE_ERROR)
            }
            None => Ok(t),
        }
    };
    let (ta, tb) = (parse(a)?, parse(b)?);
    let yes = subtype(&src.signature, &ta, &tb);
    println!("{ta} <= {tb} : {}", if yes { "yes" } else { "no" });
    if yes {
        Ok(())
    } else {
        Err(TYPE_ERROR)
    }
}

fn cmd_run(args: &RunArgs, print_trace: bool) -> Result<(), u8> {
    let src = load(&args.file)?;
    let sig = &src.signature;
    if !args.no_check {
        if let Err(errors) = check_signature(sig) {
            report(&args.file, &src, &errors);
            return Err(TYPE_ERROR);
        }
    }
    let config = Configuration::main(sig, &args.entry).map_err(|e| {
        eprintln!("error: {e}");
        TYPE_ERROR
    })?;
    let rep = runtime::run(sig, config, args.seed, args.fuel).map_err(|v| {
        eprintln!("error: {v}");
        FIDELITY
    })?;
    if let Some(path) = &args.trace {
        fs::write(path, rep.trace_text()).map_err(|e| {
            eprintln!("error: cannot write {}: {e}", path.display());
            IO_ERROR
        })?;
    }
    if print_trace {
        print!("{}", rep.trace_text());
    } else {
        for (i, (_, obs)) in rep.config.streams().iter().enumerate() {
            if i == 0 {
                println!("{}", runtime::render_observations(obs));
            } else {
                println!(
                    "{}: {}",
                    rep.config.streams()[i].0,
                    runtime::render_observations(obs)
                );
            }
        }
    }
    match rep.outcome {
        Outcome::Poised => Ok(()),
        Outcome::Deadlock => {
            eprintln!("deadlock after {} steps", rep.trace.len());
            for (c, p) in rep.config.procs() {
                eprintln!("  {c}: {p}");
            }
            Err(DEADLOCK)
        }
        Outcome::FuelExhausted => {
            eprintln!("out of fuel after {} steps", rep.trace.len());
            Err(OUT_OF_FUEL)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Check { file } => cmd_check(file),
        Command::Subtype { file, a, b } => cmd_subtype(file, a, b),
        Command::Run(args) => cmd_run(args, false),
        Command::Trace(args) => cmd_run(args, true),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(code) => ExitCode::from(code),
    }
}
