use std::io::{ErrorKind, Read, Write};
use std::process::{Command, Stdio};
use std::sync::mpsc;
use std::thread;
use std::time::{Duration, Instant};

use super::{BackendError, EmissionConfig, PROVER_ENV};

const POLL: Duration = Duration::from_millis(5);
/// How long pipe readers may lag behind a finished or killed process.
const DRAIN: Duration = Duration::from_millis(500);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ProverStatus {
    Proven,
    Unknown,
    Timeout,
    ProverError,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProverVerdict {
    pub status: ProverStatus,
    pub wall_time: Duration,
    /// Standard output followed by standard error.
    pub raw_output: String,
    pub exit_code: Option<i32>,
}

/// A prover invocation template. `{file}` is replaced by the problem path
/// (appended if absent) and `{timeout}` by the timeout in seconds.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ProverCommand {
    words: Vec<String>,
}

impl ProverCommand {
    /// Splits `template` on whitespace; no shell quoting is interpreted.
    pub fn parse(template: &str) -> Result<ProverCommand, BackendError> {
        let words: Vec<String> = template.split_whitespace().map(String::from).collect();
        if words.is_empty() {
            return Err(BackendError::EmptyCommand);
        }
        Ok(ProverCommand { words })
    }

    pub fn from_env() -> Option<Result<ProverCommand, BackendError>> {
        std::env::var(PROVER_ENV).ok().map(|t| ProverCommand::parse(&t))
    }

    pub fn program(&self) -> &str {
        &self.words[0]
    }

    /// Arguments after the program name for one run.
    pub fn args(&self, file: &str, timeout: u64) -> Vec<String> {
        let mut args: Vec<String> = self.words[1..]
            .iter()
            .map(|w| {
                w.replace("{file}", file)
                    .replace("{timeout}", &timeout.to_string())
            })
            .collect();
        if !self.words.iter().any(|w| w.contains("{file}")) {
            args.push(file.to_string());
        }
        args
    }
}

/// Maps prover output to a status. The first line carrying a verdict wins.
pub fn classify_output(output: &str) -> Option<ProverStatus> {
    for line in output.lines() {
        let line = line.trim();
        let szs = line
            .strip_prefix('%')
            .unwrap_or(line)
            .trim()
            .strip_prefix("SZS status ")
            .and_then(|r| r.split_whitespace().next());
        let status = match (line, szs) {
            (_, Some("Unsatisfiable" | "Theorem" | "ContradictoryAxioms")) => {
                ProverStatus::Proven
            }
            (_, Some("Timeout")) => ProverStatus::Timeout,
            (_, Some("Satisfiable" | "CounterSatisfiable" | "GaveUp" | "Unknown" | "Inappropriate")) => {
                ProverStatus::Unknown
            }
            ("unsat", _) => ProverStatus::Proven,
            ("sat" | "unknown", _) => ProverStatus::Unknown,
            ("timeout", _) => ProverStatus::Timeout,
            _ if line.contains("Refutation found") => ProverStatus::Proven,
            _ if line.contains("Time limit reached") => ProverStatus::Timeout,
            _ => continue,
        };
        return Some(status);
    }
    None
}

fn spawn_reader(mut pipe: impl Read + Send + 'static) -> mpsc::Receiver<String> {
    let (tx, rx) = mpsc::channel();
    thread::spawn(move || {
        let mut buf = Vec::new();
        let _ = pipe.read_to_end(&mut buf);
        let _ = tx.send(String::from_utf8_lossy(&buf).into_owned());
    });
    rx
}

/// Writes `smtlib` to a temporary file and runs `cmd` on it, killing the
/// process once `cfg`'s timeout has elapsed.
pub fn run_prover(
    smtlib: &str,
    cmd: &ProverCommand,
    cfg: &EmissionConfig,
) -> Result<ProverVerdict, BackendError> {
    let mut file = tempfile::Builder::new()
        .prefix("tracegen-")
        .suffix(".smt2")
        .tempfile()?;
    file.write_all(smtlib.as_bytes())?;
    file.flush()?;
    let path = file.path().to_string_lossy().into_owned();
    let timeout = Duration::from_secs(cfg.timeout_seconds());

    let start = Instant::now();
    let mut child = Command::new(cmd.program())
        .args(cmd.args(&path, cfg.timeout_seconds()))
        .stdin(Stdio::null())
        .stdout(Stdio::piped())
        .stderr(Stdio::piped())
        .spawn()
        .map_err(|source| BackendError::Spawn {
            program: cmd.program().to_string(),
            source,
        })?;
    let out_rx = spawn_reader(child.stdout.take().expect("piped stdout"));
    let err_rx = spawn_reader(child.stderr.take().expect("piped stderr"));

    let mut killed = false;
    let status = loop {
        if let Some(status) = child.try_wait()? {
            break Some(status);
        }
        if start.elapsed() >= timeout {
            match child.kill() {
                Ok(()) => {}
                Err(e) if e.kind() == ErrorKind::InvalidInput => {}
                Err(e) => return Err(e.into()),
            }
            child.wait()?;
            killed = true;
            break None;
        }
        thread::sleep(POLL);
    };
    let wall_time = start.elapsed();
    // Grandchildren may keep the pipes open; their output is dropped.
    let stdout = out_rx.recv_timeout(DRAIN).unwrap_or_default();
    let stderr = err_rx.recv_timeout(DRAIN).unwrap_or_default();
    let raw_output = format!("{stdout}{stderr}");
    let exit_code = status.and_then(|s| s.code());

    let status = if killed {
        ProverStatus::Timeout
    } else {
        classify_output(&raw_output).unwrap_or(ProverStatus::ProverError)
    };
    Ok(ProverVerdict {
        status,
        wall_time,
        raw_output,
        exit_code,
    })
}
