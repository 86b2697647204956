//! `rieszlab` command-line front end over `rieszlab-core`.
//!
//! Exit codes: 0 success, 1 a reported check failed, 2 bad configuration or
//! input, 3 non-convergence or an ill-conditioned fit.

// negated comparisons reject NaN along with out-of-range values
#![allow(clippy::neg_cmp_op_on_partial_ord)]

mod commands;
pub mod config;
pub mod output;

use clap::Parser;
use config::{Cli, Command, Settings};
use output::Table;
use std::ffi::OsString;
use std::io::Write;
use std::time::{SystemTime, UNIX_EPOCH};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Core(#[from] rieszlab_core::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        use rieszlab_core::Error as E;
        match self {
            CliError::Config(_) => 2,
            CliError::Core(E::NonConvergence { .. } | E::IllConditioned(_)) => 3,
            CliError::Core(_) => 2,
        }
    }
}

pub(crate) struct Outcome {
    pub table: Table,
    pub pass: bool,
}

fn configure_threads() -> Result<(), CliError> {
    let Ok(v) = std::env::var("RIESZLAB_THREADS") else {
        return Ok(());
    };
    let n: usize = v.trim().parse().map_err(|_| CliError::Config(format!("RIESZLAB_THREADS = `{v}` is not a count")))?;
    if n > 0 {
        // a second call in the same process keeps the first pool
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    Ok(())
}

fn dispatch(cmd: &Command) -> Result<(Settings, Outcome), CliError> {
    let run = |common, f: &dyn Fn(&mut Settings)| -> Result<Settings, CliError> {
        let mut s = Settings::from_common(common)?;
        f(&mut s);
        Ok(s)
    };
    Ok(match cmd {
        Command::GammaTable(c) => {
            let s = run(c, &|_| {})?;
            let o = commands::gamma_table(&s)?;
            (s, o)
        }
        Command::VerifyIdentities(a) => {
            let s = run(&a.common, &|s| s.set("filter", a.filter.clone()))?;
            let o = commands::verify_identities(&s, a)?;
            (s, o)
        }
        Command::Certify(a) => {
            let s = run(&a.common, &|s| {
                s.set_flag("weak11", a.weak11);
                s.set_flag("bmo", a.bmo);
            })?;
            let o = commands::certify_cmd(&s, a)?;
            (s, o)
        }
        Command::Apply(a) => {
            let s = run(&a.common, &|s| {
                s.set("input", a.input.as_ref().map(|p| p.display().to_string()));
                s.set("field-output", a.field_output.as_ref().map(|p| p.display().to_string()));
                s.set("method", a.method.map(|m| if m == config::Method::Kernel { "kernel".into() } else { "fft".into() }));
                s.set_flag("compare", a.compare);
            })?;
            let o = commands::apply(&s, a)?;
            (s, o)
        }
        Command::Weak11(c) => {
            let s = run(c, &|_| {})?;
            let o = commands::weak11(&s)?;
            (s, o)
        }
        Command::Bmo(c) => {
            let s = run(c, &|_| {})?;
            let o = commands::bmo(&s)?;
            (s, o)
        }
        Command::RadialProfile(a) => {
            let s = run(&a.common, &|s| {
                s.set("sigma", a.sigma.clone());
                s.set("u", a.u.clone());
            })?;
            let o = commands::radial_profile(&s, a)?;
            (s, o)
        }
    })
}

fn emit(s: &Settings, o: &Outcome) -> Result<(), CliError> {
    let ts = if s.timestamp()? {
        Some(SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0))
    } else {
        None
    };
    let text = o.table.render(s.format()?, ts);
    match s.output() {
        Some(path) => std::fs::write(&path, text)
            .map_err(|e| CliError::Config(format!("cannot write {}: {e}", path.display()))),
        None => {
            let mut out = std::io::stdout().lock();
            out.write_all(text.as_bytes()).and_then(|_| out.flush()).map_err(|e| CliError::Core(e.into()))
        }
    }
}

/// Parses `args` (program name first), runs the command and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let result = configure_threads().and_then(|_| dispatch(&cli.command)).and_then(|(s, o)| {
        emit(&s, &o)?;
        Ok(o.pass)
    });
    match result {
        Ok(true) => 0,
        Ok(false) => {
            eprintln!("rieszlab: one or more checks failed");
            1
        }
        Err(e) => {
            eprintln!("rieszlab: {e}");
            e.exit_code()
        }
    }
}
