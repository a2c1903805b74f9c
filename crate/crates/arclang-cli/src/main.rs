//! `arc` — command-line driver: parse and check model files, export
//! elaborated architectures, and run stimuli deterministically.
//!
//! Exit codes: 0 success (warnings allowed), 1 error diagnostics, 2 usage or
//! I/O problems, 3 runtime fault or divergence. Diagnostics go to stderr;
//! DOT/JSON/trace payloads go to stdout.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use arclang::arch::{elaborate, export_dot, export_json, ElaboratedArchitecture};
use arclang::diag::{sort_diagnostics, Diagnostic};
use arclang::sema::{analyze, CheckedModel, CompKind};
use arclang::sim::{
    prepare_stimuli, render_trace, RunConfig, RunError, Simulator, Verbosity, DEFAULT_MAX_STEPS,
};
use arclang::syntax::{parse_model, parse_stimulus};

#[derive(Parser)]
#[command(
    name = "arc",
    version,
    about = "Compiler and deterministic simulator for port-based component architectures"
)]
struct Cli {
    #[command(subcommand)]
    cmd: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Parse, type-check, and wire the given model files
    Check {
        /// Model source files
        #[arg(required = true)]
        files: Vec<PathBuf>,
        /// Elaborate only this component as the root (default: every
        /// structural component)
        #[arg(long)]
        root: Option<String>,
    },
    /// Print the elaborated architecture of a root component
    Graph {
        /// Model source files
        #[arg(required = true)]
        files: Vec<PathBuf>,
        /// Root component type
        #[arg(long)]
        root: String,
        /// Output format
        #[arg(long, value_enum, default_value_t = Format::Dot)]
        format: Format,
    },
    /// Inject a stimulus stream into a root component and print the trace
    Run {
        /// Model source files
        #[arg(required = true)]
        files: Vec<PathBuf>,
        /// Root component type
        #[arg(long)]
        root: String,
        /// Stimulus file: one `<port> <literal>` per line
        #[arg(long)]
        stimuli: PathBuf,
        /// Step budget before the run is declared divergent
        #[arg(long, default_value_t = DEFAULT_MAX_STEPS)]
        max_steps: usize,
        /// Trace detail
        #[arg(long, value_enum, default_value_t = TraceArg::Boundary)]
        trace: TraceArg,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Dot,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum TraceArg {
    Boundary,
    Full,
}

/// Failures before any simulation starts, mapped onto exit codes.
enum CliError {
    /// Exit 2: bad invocation or unreadable input.
    Usage(String),
    /// Exit 1: the model has error diagnostics.
    Diags(Vec<Diagnostic>),
    /// Exit 2: stimuli do not fit the root component's interface.
    Stimuli(Vec<Diagnostic>),
}

fn print_diags(diags: &[Diagnostic]) {
    for d in diags {
        eprintln!("{d}");
    }
}

fn fail(err: CliError) -> u8 {
    match err {
        CliError::Usage(msg) => {
            eprintln!("error: {msg}");
            2
        }
        CliError::Diags(diags) => {
            print_diags(&diags);
            1
        }
        CliError::Stimuli(diags) => {
            print_diags(&diags);
            2
        }
    }
}

/// Read, parse, and semantically check every input file.
fn load_model(files: &[PathBuf]) -> Result<CheckedModel, CliError> {
    let mut units = Vec::new();
    let mut diags = Vec::new();
    for path in files {
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::Usage(format!("cannot read `{}`: {e}", path.display())))?;
        match parse_model(&text, &path.display().to_string()) {
            Ok(unit) => units.push(unit),
            Err(mut errs) => diags.append(&mut errs),
        }
    }
    if !diags.is_empty() {
        sort_diagnostics(&mut diags);
        return Err(CliError::Diags(diags));
    }
    analyze(&units).map_err(CliError::Diags)
}

fn resolve_root<'m>(
    model: &'m CheckedModel,
    root: &str,
) -> Result<&'m arclang::sema::ResolvedComponent, CliError> {
    model
        .component(root)
        .ok_or_else(|| CliError::Usage(format!("no component named `{root}`")))
}

fn elaborate_root(model: &CheckedModel, root: &str) -> Result<ElaboratedArchitecture, CliError> {
    let ea = elaborate(root, model).map_err(CliError::Diags)?;
    print_diags(&ea.warnings);
    Ok(ea)
}

fn cmd_check(files: &[PathBuf], root: Option<&str>) -> Result<(), CliError> {
    let model = load_model(files)?;
    match root {
        Some(r) => {
            resolve_root(&model, r)?;
            elaborate_root(&model, r)?;
        }
        None => {
            // Wire every structural component; report each problem once even
            // when components participate in several trees.
            let mut errors = Vec::new();
            let mut warnings = Vec::new();
            for (name, rc) in &model.components {
                if rc.kind != CompKind::Structural {
                    continue;
                }
                match elaborate(name, &model) {
                    Ok(ea) => warnings.extend(ea.warnings),
                    Err(diags) => errors.extend(diags),
                }
            }
            if !errors.is_empty() {
                errors.extend(warnings);
                sort_diagnostics(&mut errors);
                return Err(CliError::Diags(errors));
            }
            sort_diagnostics(&mut warnings);
            print_diags(&warnings);
        }
    }
    Ok(())
}

fn cmd_graph(files: &[PathBuf], root: &str, format: Format) -> Result<(), CliError> {
    let model = load_model(files)?;
    resolve_root(&model, root)?;
    let ea = elaborate_root(&model, root)?;
    let text = match format {
        Format::Dot => export_dot(&ea),
        Format::Json => export_json(&ea),
    };
    print!("{text}");
    Ok(())
}

fn cmd_run(
    files: &[PathBuf],
    root: &str,
    stimuli_path: &Path,
    max_steps: usize,
    trace: TraceArg,
) -> Result<u8, CliError> {
    let model = load_model(files)?;
    resolve_root(&model, root)?;
    let ea = elaborate_root(&model, root)?;

    let stim_text = fs::read_to_string(stimuli_path)
        .map_err(|e| CliError::Usage(format!("cannot read `{}`: {e}", stimuli_path.display())))?;
    let file_label = stimuli_path.display().to_string();
    let parsed = parse_stimulus(&stim_text, &file_label).map_err(CliError::Diags)?;
    let prepared = prepare_stimuli(&parsed, &model, root).map_err(CliError::Stimuli)?;

    let cfg = RunConfig {
        max_steps,
        verbosity: match trace {
            TraceArg::Boundary => Verbosity::Boundary,
            TraceArg::Full => Verbosity::Full,
        },
    };
    let mut sim = Simulator::new(&model, &ea);
    let outcome = sim.run(&prepared, &cfg);
    // Flush whatever was recorded, even for aborted runs.
    print!("{}", render_trace(sim.trace(), cfg.verbosity));
    match outcome {
        Ok(()) => Ok(0),
        Err(RunError::Divergence { steps }) => {
            eprintln!("error: run diverged after {steps} steps (budget {max_steps})");
            Ok(3)
        }
        Err(RunError::Fault(fault)) => {
            eprintln!("error: runtime fault at {}: {}", fault.pos, fault.message);
            Ok(3)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let code = match cli.cmd {
        Cmd::Check { files, root } => match cmd_check(&files, root.as_deref()) {
            Ok(()) => 0,
            Err(e) => fail(e),
        },
        Cmd::Graph {
            files,
            root,
            format,
        } => match cmd_graph(&files, &root, format) {
            Ok(()) => 0,
            Err(e) => fail(e),
        },
        Cmd::Run {
            files,
            root,
            stimuli,
            max_steps,
            trace,
        } => match cmd_run(&files, &root, &stimuli, max_steps, trace) {
            Ok(code) => code,
            Err(e) => fail(e),
        },
    };
    ExitCode::from(code)
}
