//! IO and parallelism plumbing shared by the subcommands.

use std::fs::File;
use std::io::{self, BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use super::CliError;

/// Open `path`, or stdin when absent.
pub fn open_input(path: Option<&Path>) -> Result<Box<dyn BufRead>, CliError> {
    match path {
        Some(path) => {
            let file = File::open(path)
                .map_err(|e| CliError::data(anyhow::anyhow!("cannot open `{}`: {e}", path.display())))?;
            Ok(Box::new(BufReader::new(file)))
        }
        None => Ok(Box::new(BufReader::new(io::stdin()))),
    }
}

/// Open `path` for writing, or stdout when absent.
pub fn open_output(path: Option<&Path>) -> Result<Box<dyn Write>, CliError> {
    match path {
        Some(path) => {
            let file = File::create(path)
                .map_err(|e| CliError::data(anyhow::anyhow!("cannot create `{}`: {e}", path.display())))?;
            Ok(Box::new(BufWriter::new(file)))
        }
        None => Ok(Box::new(BufWriter::new(io::stdout()))),
    }
}

/// A thread pool when more than one worker is requested.
pub fn build_pool(workers: usize) -> Result<Option<rayon::ThreadPool>, CliError> {
    if workers <= 1 {
        return Ok(None);
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map(Some)
        .map_err(|e| CliError::config(anyhow::anyhow!("cannot build worker pool: {e}")))
    }

/// Records per chunk for parallel processing; bounds memory while keeping
/// output order equal to input order for any worker count.
pub const CHUNK_SIZE: usize = 4096;

/// Map `items` through `f` (in parallel when a pool is given) and hand the
/// results to `write` in input order.
pub fn map_ordered<T, U>(
    items: impl Iterator<Item = T>,
    pool: Option<&rayon::ThreadPool>,
    f: impl Fn(T) -> U + Sync,
    mut write: impl FnMut(U) -> Result<(), CliError>,
) -> Result<(), CliError>
where
    T: Send,
    U: Send,
{
    use rayon::prelude::*;

    let mut items = items.peekable();
    let mut chunk = Vec::with_capacity(CHUNK_SIZE);
    while items.peek().is_some() {
        chunk.clear();
        chunk.extend(items.by_ref().take(CHUNK_SIZE));
        let mapped: Vec<U> = match pool {
            Some(pool) => pool.install(|| chunk.par_drain(..).map(&f).collect()),
            None => chunk.drain(..).map(&f).collect(),
        };
        for item in mapped {
            write(item)?;
        }
    }
    Ok(())
}

/// Diagnostics stream: one JSON object per failing record, on stderr.
#[derive(Debug, Default)]
pub struct Diagnostics {
    pub count: u64,
}

impl Diagnostics {
    pub fn emit(&mut self, diagnostic: &serde_json::Value) {
        self.count += 1;
        eprintln!("{diagnostic}");
    }
}
