//! Command-line front end: configuration, CSV output and figure presets.

#![allow(clippy::neg_cmp_op_on_partial_ord)] // `!(x > y)` is the NaN-rejecting form.

pub mod commands;
pub mod config;
pub mod csv;
pub mod error;
pub mod figures;

pub use commands::{run, Outcome};
pub use config::{parse_config, Precision, RunConfig, Subcommand};
pub use error::{CliError, Result};
pub use figures::emit_figure_preset;

/// Environment variable holding the worker-thread count.
pub const THREADS_ENV: &str = "THRESHOLD_EP_THREADS";

/// Sizes the global rayon pool from [`THREADS_ENV`] when it is set.
pub fn init_threads() -> Result<()> {
    let Ok(raw) = std::env::var(THREADS_ENV) else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .map_err(|_| CliError::Config(vec![format!("{THREADS_ENV} must be a positive integer, got `{raw}`")]))?;
    if n == 0 {
        return Err(CliError::Config(vec![format!("{THREADS_ENV} must be positive")]));
    }
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| CliError::Threads(e.to_string()))
}

/// Parses, runs and writes output. Returns the process exit code.
pub fn main_with_args<I, S>(argv: I) -> i32
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let cfg = match parse_config(argv, None) {
        Ok(cfg) => cfg,
        Err(CliError::Usage(e)) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
        Err(e) => {
            eprintln!("error: {e}");
            return e.exit_code();
        }
    };
    let result = init_threads().and_then(|_| run(&cfg)).and_then(|out| {
        match &cfg.output {
            Some(path) if !out.output.is_empty() => {
                std::fs::write(path, &out.output).map_err(|e| CliError::io(path, e))?;
            }
            _ => print!("{}", out.output),
        }
        Ok(out)
    });
    match result {
        Ok(out) => {
            for note in &out.notes {
                eprintln!("{note}");
            }
            for f in &out.failures {
                eprintln!("tolerance not met: {f}");
            }
            if out.ok() {
                0
            } else {
                1
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}
