//! `tracegen`: emit, verify, check, bench and trace while-programs.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use thiserror::Error;

use tracegen::backend::{
    emit_smtlib, run_prover, BackendError, ConjectureMode, EmissionConfig, NatEncoding,
    ProverCommand, ProverStatus, ProverVerdict, DEFAULT_TIMEOUT_SECONDS, PROVER_ENV,
};
use tracegen::frontend::{parse_program, FrontendError};
use tracegen::oracle::{
    check_facts_on_trace, check_trace, execute, lemma1_facts, sample_inputs, CheckReport,
    ExecConfig, InputValuation, SampleBounds, DEFAULT_STEP_LIMIT,
};
use tracegen::program_model::{ModelError, ProgramModel};
use tracegen::semantics::{build_task, SemanticsError, TaskOptions, VerificationTask};

const EXIT_NOT_PROVEN: u8 = 1;
const EXIT_INPUT: u8 = 2;
const EXIT_VIOLATION: u8 = 3;

#[derive(Parser)]
#[command(name = "tracegen", version, about = "Trace-logic verification conditions for while-programs")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Write the SMT-LIB problem for a program.
    Emit {
        file: PathBuf,
        #[command(flatten)]
        emission: EmissionFlags,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Emit and run a prover; exit 0 only when proven.
    Verify {
        file: PathBuf,
        #[command(flatten)]
        emission: EmissionFlags,
        #[command(flatten)]
        prover: ProverFlags,
    },
    /// Check the generated axioms against sampled executions.
    Check {
        /// Program files or directories of `.w` files.
        #[arg(required = true)]
        paths: Vec<PathBuf>,
        #[command(flatten)]
        sweep: SweepFlags,
        #[arg(long)]
        no_lemmas: bool,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Verify every `.w` file in a directory and print a results table.
    Bench {
        dir: PathBuf,
        #[command(flatten)]
        emission: EmissionFlags,
        #[command(flatten)]
        prover: ProverFlags,
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
    /// Execute a program on one input and print the step log.
    Trace {
        file: PathBuf,
        /// `name=value` for ints, `name=[v,...]` for arrays.
        #[arg(long = "input", value_name = "ASSIGNMENT", allow_hyphen_values = true)]
        inputs: Vec<String>,
        #[arg(long, default_value_t = DEFAULT_STEP_LIMIT)]
        step_limit: usize,
        #[arg(short, long)]
        output: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, ValueEnum)]
enum NatMode {
    Algebraic,
    Integer,
}

#[derive(Clone, Copy, ValueEnum)]
enum ConjMode {
    NegatedAssert,
    AssertNot,
}

#[derive(Args)]
struct EmissionFlags {
    #[arg(long, value_enum, default_value = "algebraic")]
    nat_mode: NatMode,
    #[arg(long, value_enum, default_value = "negated-assert")]
    conjecture_mode: ConjMode,
    #[arg(long)]
    no_lemmas: bool,
}

impl EmissionFlags {
    fn config(&self) -> EmissionConfig {
        let mut cfg = EmissionConfig::default();
        cfg.nat_mode = match self.nat_mode {
            NatMode::Algebraic => NatEncoding::Algebraic,
            NatMode::Integer => NatEncoding::Integer,
        };
        cfg.conjecture_mode = match self.conjecture_mode {
            ConjMode::NegatedAssert => ConjectureMode::NegatedAssert,
            ConjMode::AssertNot => ConjectureMode::AssertNot,
        };
        cfg.include_lemmas = !self.no_lemmas;
        cfg
    }
}

#[derive(Args)]
struct ProverFlags {
    /// Command template; `{file}` and `{timeout}` are substituted.
    /// Defaults to $TRACEGEN_PROVER.
    #[arg(long)]
    prover: Option<String>,
    /// Seconds.
    #[arg(long, default_value_t = DEFAULT_TIMEOUT_SECONDS)]
    timeout: u64,
}

#[derive(Args)]
struct SweepFlags {
    #[arg(long, default_value_t = 50)]
    count: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 5)]
    max_len: usize,
    /// Inclusive, as `LO..HI`.
    #[arg(long, default_value = "-3..3", allow_hyphen_values = true, value_parser = parse_range)]
    val_range: (i64, i64),
    #[arg(long, default_value_t = DEFAULT_STEP_LIMIT)]
    step_limit: usize,
    /// Out-of-bounds reads of const arrays yield 0 instead of an error.
    #[arg(long)]
    permissive_reads: bool,
}

fn parse_range(s: &str) -> Result<(i64, i64), String> {
    let (lo, hi) = s
        .split_once("..")
        .ok_or_else(|| format!("expected LO..HI, got `{s}`"))?;
    let lo: i64 = lo.trim().parse().map_err(|e| format!("{lo}: {e}"))?;
    let hi: i64 = hi.trim().parse().map_err(|e| format!("{hi}: {e}"))?;
    if lo > hi {
        return Err(format!("empty range {lo}..{hi}"));
    }
    Ok((lo, hi))
}

#[derive(Debug, Error)]
enum CliError {
    #[error("{path}: {source}")]
    Io { path: String, source: io::Error },
    #[error("{path}:{source}")]
    Parse {
        path: String,
        source: FrontendError,
    },
    #[error("{path}: {source}")]
    Semantics {
        path: String,
        source: SemanticsError,
    },
    #[error("{path}: {source}")]
    Model { path: String, source: ModelError },
    #[error(transparent)]
    Backend(#[from] BackendError),
    #[error("no prover given: pass --prover or set {PROVER_ENV}")]
    NoProver,
    #[error("bad input `{0}`: {1}")]
    Input(String, String),
    #[error("{0}")]
    Exec(String),
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.display().to_string(),
        source,
    })
}

fn write_out(output: Option<&Path>, text: &str) -> Result<(), CliError> {
    match output {
        Some(p) => fs::write(p, text).map_err(|source| CliError::Io {
            path: p.display().to_string(),
            source,
        }),
        None => {
            let mut out = io::stdout().lock();
            out.write_all(text.as_bytes())
                .and_then(|()| out.flush())
                .map_err(|source| CliError::Io {
                    path: "<stdout>".into(),
                    source,
                })
        }
    }
}

fn load(path: &Path) -> Result<ProgramModel, CliError> {
    let src = read(path)?;
    let program = parse_program(&src).map_err(|source| CliError::Parse {
        path: path.display().to_string(),
        source,
    })?;
    Ok(ProgramModel::new(program))
}

fn task(path: &Path, model: &ProgramModel, lemmas: bool) -> Result<VerificationTask, CliError> {
    build_task(
        model,
        &TaskOptions {
            include_lemmas: lemmas,
            mutation: None,
        },
    )
    .map_err(|source| CliError::Semantics {
        path: path.display().to_string(),
        source,
    })
}

fn prover(flags: &ProverFlags) -> Result<ProverCommand, CliError> {
    match &flags.prover {
        Some(t) => Ok(ProverCommand::parse(t)?),
        None => ProverCommand::from_env().ok_or(CliError::NoProver)?.map_err(Into::into),
    }
}

fn verify_file(
    path: &Path,
    cfg: &EmissionConfig,
    cmd: &ProverCommand,
) -> Result<ProverVerdict, CliError> {
    let model = load(path)?;
    let t = task(path, &model, cfg.include_lemmas)?;
    let text = emit_smtlib(&t, cfg)?;
    Ok(run_prover(&text, cmd, cfg)?)
}

fn status_name(s: ProverStatus) -> &'static str {
    match s {
        ProverStatus::Proven => "Proven",
        ProverStatus::Unknown => "Unknown",
        ProverStatus::Timeout => "Timeout",
        ProverStatus::ProverError => "ProverError",
    }
}

/// `.w` files under each path, directories expanded in name order.
fn collect_programs(paths: &[PathBuf]) -> Result<Vec<PathBuf>, CliError> {
    let mut out = Vec::new();
    for p in paths {
        if p.is_dir() {
            let entries = fs::read_dir(p).map_err(|source| CliError::Io {
                path: p.display().to_string(),
                source,
            })?;
            let mut files: Vec<PathBuf> = entries
                .filter_map(Result::ok)
                .map(|e| e.path())
                .filter(|f| f.extension().is_some_and(|x| x == "w"))
                .collect();
            files.sort();
            out.extend(files);
        } else {
            out.push(p.clone());
        }
    }
    Ok(out)
}

fn check_file(path: &Path, sweep: &SweepFlags, lemmas: bool) -> Result<(CheckReport, String), CliError> {
    let model = load(path)?;
    let t = task(path, &model, lemmas)?;
    let facts = lemma1_facts(&model).map_err(|source| CliError::Model {
        path: path.display().to_string(),
        source,
    })?;
    let bounds = SampleBounds {
        max_len: sweep.max_len,
        val_lo: sweep.val_range.0,
        val_hi: sweep.val_range.1,
    };
    let exec = ExecConfig {
        step_limit: sweep.step_limit,
        permissive_reads: sweep.permissive_reads,
    };
    let inputs = sample_inputs(model.program(), sweep.count, sweep.seed, &bounds);
    let mut report = CheckReport::default();
    let mut skipped = Vec::new();
    let mut traces = 0;
    for (k, inp) in inputs.iter().enumerate() {
        match execute(model.program(), inp, &exec) {
            Ok(tr) => {
                traces += 1;
                report.merge(check_trace(&t, &tr, k));
                report.merge(check_facts_on_trace(&facts, &tr, k));
            }
            Err(e) => skipped.push(format!("  skipped trace {k} [{inp}]: {e}\n")),
        }
    }
    let mut text = format!(
        "{}: {} ({traces} traces, {} skipped)\n",
        path.display(),
        report.summary(),
        skipped.len()
    );
    for line in report.render().lines().filter(|l| !l.ends_with(" checks")) {
        text.push_str("  ");
        text.push_str(line);
        text.push('\n');
    }
    for s in skipped {
        text.push_str(&s);
    }
    Ok((report, text))
}

fn parse_assignment(s: &str, inp: &mut InputValuation) -> Result<(), CliError> {
    let bad = |m: &str| CliError::Input(s.to_string(), m.to_string());
    let (name, value) = s.split_once('=').ok_or_else(|| bad("expected name=value"))?;
    let name = name.trim().to_string();
    let value = value.trim();
    if let Some(items) = value.strip_prefix('[').and_then(|v| v.strip_suffix(']')) {
        let vals = items
            .split(',')
            .map(str::trim)
            .filter(|x| !x.is_empty())
            .map(|x| x.parse::<i64>().map_err(|e| bad(&e.to_string())))
            .collect::<Result<Vec<_>, _>>()?;
        inp.arrays.insert(name, vals);
    } else {
        let v = value.parse::<i64>().map_err(|e| bad(&e.to_string()))?;
        inp.ints.insert(name, v);
    }
    Ok(())
}

fn run(cli: Cli) -> Result<u8, CliError> {
    match cli.command {
        Command::Emit {
            file,
            emission,
            output,
        } => {
            let model = load(&file)?;
            let cfg = emission.config();
            let t = task(&file, &model, cfg.include_lemmas)?;
            write_out(output.as_deref(), &emit_smtlib(&t, &cfg)?)?;
            Ok(0)
        }
        Command::Verify {
            file,
            emission,
            prover: pflags,
        } => {
            let cfg = emission.config().with_timeout(pflags.timeout)?;
            let cmd = prover(&pflags)?;
            let v = verify_file(&file, &cfg, &cmd)?;
            println!(
                "{}\t{}\t{:.2}s",
                file.display(),
                status_name(v.status),
                v.wall_time.as_secs_f64()
            );
            if v.status == ProverStatus::ProverError {
                eprint!("{}", v.raw_output);
            }
            Ok(if v.status == ProverStatus::Proven {
                0
            } else {
                EXIT_NOT_PROVEN
            })
        }
        Command::Check {
            paths,
            sweep,
            no_lemmas,
            output,
        } => {
            let mut total = CheckReport::default();
            let mut text = String::new();
            for path in collect_programs(&paths)? {
                let (report, part) = check_file(&path, &sweep, !no_lemmas)?;
                text.push_str(&part);
                total.merge(report);
            }
            text.push_str(&total.summary());
            text.push('\n');
            if !total.conjecture_failures.is_empty() {
                text.push_str(&format!(
                    "{} conjecture failures\n",
                    total.conjecture_failures.len()
                ));
            }
            write_out(output.as_deref(), &text)?;
            Ok(if !total.is_sound() {
                EXIT_VIOLATION
            } else if !total.conjecture_failures.is_empty() {
                EXIT_NOT_PROVEN
            } else {
                0
            })
        }
        Command::Bench {
            dir,
            emission,
            prover: pflags,
            jobs,
            output,
        } => {
            let cfg = emission.config().with_timeout(pflags.timeout)?;
            let cmd = prover(&pflags)?;
            let files = collect_programs(&[dir])?;
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(jobs.max(1))
                .build()
                .expect("thread pool");
            let rows: Vec<(String, String, f64)> = pool.install(|| {
                files
                    .par_iter()
                    .map(|f| {
                        let name = f
                            .file_stem()
                            .map(|s| s.to_string_lossy().into_owned())
                            .unwrap_or_default();
                        match verify_file(f, &cfg, &cmd) {
                            Ok(v) => (name, status_name(v.status).to_string(), v.wall_time.as_secs_f64()),
                            Err(e) => {
                                eprintln!("{e}");
                                (name, "InputError".to_string(), 0.0)
                            }
                        }
                    })
                    .collect()
            });
            let mut text = String::from("benchmark\tstatus\tsolved\ttime_s\n");
            let mut solved = 0;
            for (name, status, secs) in &rows {
                let mark = if status == "Proven" {
                    solved += 1;
                    "\u{2713}"
                } else {
                    "-"
                };
                text.push_str(&format!("{name}\t{status}\t{mark}\t{secs:.2}\n"));
            }
            text.push_str(&format!("Total solved\t{solved}\t{}\n", rows.len()));
            write_out(output.as_deref(), &text)?;
            Ok(0)
        }
        Command::Trace {
            file,
            inputs,
            step_limit,
            output,
        } => {
            let model = load(&file)?;
            let mut inp = InputValuation::default();
            for a in &inputs {
                parse_assignment(a, &mut inp)?;
            }
            let cfg = ExecConfig {
                step_limit,
                ..ExecConfig::default()
            };
            let tr = execute(model.program(), &inp, &cfg)
                .map_err(|e| CliError::Exec(format!("{}: {e}", file.display())))?;
            write_out(output.as_deref(), &tr.dump())?;
            Ok(0)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("tracegen: {e}");
            ExitCode::from(EXIT_INPUT)
        }
    }
}
