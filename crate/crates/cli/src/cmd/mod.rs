//! Subcommand implementations.

pub mod de;
pub mod graph;
pub mod sim;

use std::path::Path;

use qgt::graph::GtParams;

use crate::config::require;
use crate::error::{CliError, CliResult};
use crate::manifest::Recorder;
use crate::EnsembleArgs;

/// Runs `f` on a pool of `jobs` threads, or on the global pool.
pub fn with_jobs<T: Send>(jobs: Option<usize>, f: impl FnOnce() -> T + Send) -> CliResult<T> {
    match jobs {
        None => Ok(f()),
        Some(0) => Err(CliError::Usage("--jobs must be at least 1".into())),
        Some(j) => rayon::ThreadPoolBuilder::new()
            .num_threads(j)
            .build()
            .map(|pool| pool.install(f))
            .map_err(|e| CliError::Runtime(format!("cannot start thread pool: {e}"))),
    }
}

/// Prints to stdout and also writes to `path` when given.
pub fn tee(rec: &mut Recorder, path: Option<&Path>, contents: &str) -> CliResult<()> {
    print!("{contents}");
    match path {
        Some(p) => rec.write(p, contents),
        None => Ok(()),
    }
}

/// Writes to `path` through the recorder, or prints to stdout.
pub fn emit(rec: &mut Recorder, path: Option<&Path>, contents: &str) -> CliResult<()> {
    match path {
        Some(p) => rec.write(p, contents),
        None => {
            print!("{contents}");
            Ok(())
        }
    }
}

impl EnsembleArgs {
    pub fn params(&self) -> CliResult<GtParams> {
        let q = require(self.q, "q")?;
        let d_v = require(self.dv, "dv")?;
        let d_vx = match (self.dvx, q) {
            (Some(x), _) => x,
            (None, 1) => d_v,
            (None, _) => return Err(CliError::Usage("missing required parameter --dvx".into())),
        };
        Ok(GtParams::derive(
            require(self.n, "n")?,
            q,
            d_v,
            d_vx,
            require(self.dc, "dc")?,
        )?)
    }
}
